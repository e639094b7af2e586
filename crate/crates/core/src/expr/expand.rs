use num_traits::ToPrimitive;

use super::{Expr, Func, Node};

/// Largest integer power of a sum that is multiplied out.
const MAX_EXPANDED_POWER: i64 = 8;

impl Expr {
    /// Multiplies out products of sums and small positive integer powers of
    /// sums, and merges products of exponentials into one exponential, so
    /// that like terms meet and cancel. Meant for presentation and for
    /// shrinking results before they feed further algebra.
    pub fn expand(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Coord(_) | Node::Time => self.clone(),
            Node::Sum(ts) => Expr::sum(ts.iter().map(Expr::expand)),
            Node::Product(fs) => multiply_out(fs.iter().map(Expr::expand).collect()),
            Node::Pow(b, e) => {
                let base = b.expand();
                let small = e.is_integer() && (1..=MAX_EXPANDED_POWER).contains(e.numer());
                match (base.node(), small) {
                    (Node::Sum(_), true) => {
                        let k = e.numer().to_usize().unwrap_or(0);
                        multiply_out(vec![base.clone(); k])
                    }
                    (Node::Func(Func::Exp, arg), _) if e.is_integer() => {
                        Expr::apply(Func::Exp, arg.scale(super::Number::Rational(*e)).expand())
                    }
                    _ => Expr::pow(base, *e),
                }
            }
            Node::Func(f, arg) => Expr::apply(*f, arg.expand()),
        }
    }
}

fn terms_of(e: &Expr) -> Vec<Expr> {
    match e.node() {
        Node::Sum(ts) => ts.clone(),
        _ => vec![e.clone()],
    }
}

fn multiply_out(factors: Vec<Expr>) -> Expr {
    let mut acc = vec![Expr::one()];
    for f in &factors {
        let ts = terms_of(f);
        let mut next = Vec::with_capacity(acc.len() * ts.len());
        for a in &acc {
            for t in &ts {
                next.push(merge_exponentials(Expr::product([a.clone(), t.clone()])));
            }
        }
        acc = next;
    }
    Expr::sum(acc)
}

/// `exp(a)·exp(b)·x → exp(a + b)·x`.
fn merge_exponentials(term: Expr) -> Expr {
    let fs = match term.node() {
        Node::Product(fs) => fs.clone(),
        Node::Pow(..) => vec![term.clone()],
        _ => return term,
    };
    let mut args = Vec::new();
    let mut rest = Vec::new();
    let mut powers = false;
    for f in &fs {
        match f.node() {
            Node::Func(Func::Exp, a) => args.push(a.clone()),
            Node::Pow(b, e) if e.is_integer() => match b.node() {
                Node::Func(Func::Exp, a) => {
                    powers = true;
                    args.push(a.scale(super::Number::Rational(*e)));
                }
                _ => rest.push(f.clone()),
            },
            _ => rest.push(f.clone()),
        }
    }
    if args.len() < 2 && !powers {
        return term;
    }
    rest.push(Expr::apply(Func::Exp, Expr::sum(args).expand()));
    Expr::product(rest)
}
