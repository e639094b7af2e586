use num_rational::Rational64;
use num_traits::One;

use super::{Expr, Func, Node, Var};

impl Expr {
    /// Exact partial derivative. Symbols that do not appear differentiate to 0.
    pub fn diff(&self, v: Var) -> Expr {
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Coord(i) => match v {
                Var::Coord(j) if *i == j => Expr::one(),
                _ => Expr::zero(),
            },
            Node::Time => match v {
                Var::Time => Expr::one(),
                Var::Coord(_) => Expr::zero(),
            },
            Node::Sum(terms) => Expr::sum(terms.iter().map(|t| t.diff(v))),
            Node::Product(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for (i, f) in factors.iter().enumerate() {
                    let df = f.diff(v);
                    if df.is_zero_literal() {
                        continue;
                    }
                    let others = factors
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, g)| g.clone());
                    terms.push(Expr::product(others.chain(std::iter::once(df))));
                }
                Expr::sum(terms)
            }
            Node::Pow(base, e) => {
                let db = base.diff(v);
                if db.is_zero_literal() {
                    return Expr::zero();
                }
                let coef = Expr::num(super::Number::Rational(*e));
                Expr::product([coef, Expr::pow(base.clone(), *e - Rational64::one()), db])
            }
            Node::Func(func, arg) => {
                let da = arg.diff(v);
                if da.is_zero_literal() {
                    return Expr::zero();
                }
                let outer = match func {
                    Func::Exp => self.clone(),
                    Func::Ln => arg.clone().recip(),
                    Func::Sin => arg.clone().cos(),
                    Func::Cos => -arg.clone().sin(),
                };
                outer * da
            }
        }
    }

    /// Partial derivative with respect to coordinate `index`.
    pub fn d(&self, index: usize) -> Expr {
        self.diff(Var::Coord(index))
    }

    pub fn dt(&self) -> Expr {
        self.diff(Var::Time)
    }
}

#[cfg(test)]
mod tests {
    use super::super::Chart;
    use super::*;
    use crate::expr::parse;

    fn chart() -> Chart {
        Chart::standard(4).unwrap()
    }

    fn close(a: &Expr, b: &Expr) -> bool {
        let pts = [
            [0.3, -0.2, 0.5, 0.1],
            [-0.7, 0.4, -0.2, 0.9],
            [0.1, 0.8, 0.0, -0.6],
        ];
        pts.iter().all(|p| {
            [0.0, 0.4].iter().all(|&t| {
                let x = a.eval(p, t).unwrap();
                let y = b.eval(p, t).unwrap();
                (x - y).abs() < 1e-12 * (1.0 + x.abs())
            })
        })
    }

    #[test]
    fn chain_rule_through_exp() {
        let c = chart();
        let e = parse("exp(z3-z4)", &c).unwrap();
        let expected = parse("-exp(z3-z4)", &c).unwrap();
        assert!(close(&e.d(3), &expected));
    }

    #[test]
    fn sample_hamiltonian_gradient() {
        let c = chart();
        let h = parse("1/2*z1^2 + 1/2*z2^2 + exp(z3 - z4)", &c).unwrap();
        assert_eq!(h.d(0), Expr::coord(0));
    }

    #[test]
    fn explicit_time_derivative_of_first_symmetry_component() {
        let c = chart();
        let e1 = parse("1/2*z1^2 - exp(z3-z4) - t/2*(z1+z2)*exp(z3-z4)", &c).unwrap();
        let expected = parse("-1/2*(z1+z2)*exp(z3-z4)", &c).unwrap();
        assert!(close(&e1.dt(), &expected));
    }

    #[test]
    fn absent_symbol_gives_zero() {
        let c = chart();
        assert!(parse("z1*sin(z2)", &c).unwrap().d(3).is_zero_literal());
        assert!(parse("z1", &c).unwrap().dt().is_zero_literal());
    }

    #[test]
    fn rational_power_and_log() {
        let c = chart();
        let e = parse("(z1^2 + 1)^(1/2) + ln(z2^2 + 2)", &c).unwrap();
        let d1 = parse("z1*(z1^2+1)^(-1/2)", &c).unwrap();
        let d2 = parse("2*z2/(z2^2+2)", &c).unwrap();
        assert!(close(&e.d(0), &d1));
        assert!(close(&e.d(1), &d2));
    }

    proptest::proptest! {
        #[test]
        fn matches_central_differences(seed: u64, i in 0usize..4, x in proptest::array::uniform4(-1.0f64..1.0)) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let e = crate::random::expr(&mut rng, 4, 3);
            let h = 1e-5;
            let (mut up, mut down) = (x, x);
            up[i] += h;
            down[i] -= h;
            let fd = (e.eval(&up, 0.0).unwrap() - e.eval(&down, 0.0).unwrap()) / (2.0 * h);
            let exact = e.d(i).eval(&x, 0.0).unwrap();
            let scale = 1.0 + exact.abs() + e.eval(&x, 0.0).unwrap().abs();
            proptest::prop_assert!((fd - exact).abs() < 1e-5 * scale, "{e}: fd {fd} exact {exact}");
        }
    }
}
