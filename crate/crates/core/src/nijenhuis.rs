//! Recursion operator `R_E` on vector fields and its Frölicher–Nijenhuis
//! torsion.
//!
//! `R_E(X) = Φ_W(L_E Φ_W^{-1} X) − [E, X]`. Its matrix `m` is stored so that
//! `R_E(∂a) = Σ_b m_ab ∂b`, i.e. `R_E = Σ m_ab dz_a ⊗ ∂b`. The dual `R̄_E`
//! acts on 1-forms by `R̄_E(dz_a) = Σ_b m_ab dz_b` and extends to higher forms
//! as a derivation.

use std::fmt;

use rand::Rng;

use crate::check::{Outcome, Part};
use crate::expr::{is_zero_all, Chart, Expr, Var};
use crate::matrix::ExprMatrix;
use crate::multifield::{
    exterior_d, lie_bracket, lie_derivative_form, pair, schouten, write_linear_combination, Form,
    Multivector,
};
use crate::random;
use crate::symcheck::PhaseSystem;

/// A (1,1)-tensor field given by its coefficient matrix.
#[derive(Clone, Debug)]
pub struct TangentOperator {
    m: ExprMatrix,
}

impl TangentOperator {
    pub fn new(m: ExprMatrix) -> Self {
        TangentOperator { m }
    }

    pub fn identity(dim: usize) -> Self {
        TangentOperator {
            m: ExprMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.n()
    }

    pub fn apply(&self, x: &Multivector) -> Multivector {
        let n = self.dim();
        let xs = x.components();
        let comps = (0..n)
            .map(|b| {
                Expr::sum(
                    (0..n)
                        .filter(|&a| !xs[a].is_zero_literal())
                        .map(|a| &xs[a] * self.m.get(a, b)),
                )
            })
            .collect();
        Multivector::from_components(comps)
    }

    /// Transpose action on 1-forms, so that `⟨u, R X⟩ = ⟨R̄ u, X⟩`.
    pub fn apply_dual(&self, u: &Form) -> Form {
        let n = self.dim();
        let us = u.components();
        let comps = (0..n)
            .map(|a| {
                Expr::sum(
                    (0..n)
                        .filter(|&b| !us[b].is_zero_literal())
                        .map(|b| self.m.get(a, b) * &us[b]),
                )
            })
            .collect();
        Form::from_components(comps)
    }

    /// `R̄` extended to forms of any degree as a degree-0 derivation.
    pub fn apply_derivation(&self, u: &Form) -> Form {
        let n = self.dim();
        let images: Vec<Form> = (0..n)
            .map(|a| self.apply_dual(&Form::basis(n, &[a])))
            .collect();
        let mut total = Form::zero(n, u.degree());
        for (blade, c) in u.terms() {
            let idx = blade.indices();
            for s in 0..idx.len() {
                let mut piece = Form::scalar(n, c.clone());
                for (j, &i) in idx.iter().enumerate() {
                    let factor = if j == s {
                        images[i].clone()
                    } else {
                        Form::basis(n, &[i])
                    };
                    piece = piece.wedge(&factor);
                }
                total = total + piece;
            }
        }
        total.map_coefficients(Expr::expand)
    }

    /// `Σ m_ab dz_a⊗∂z_b`, row by row.
    pub fn display<'a>(&'a self, chart: &'a Chart) -> OperatorDisplay<'a> {
        OperatorDisplay { op: self, chart }
    }

    /// `L_X R` as a (1,1)-tensor, plus `∂_t R`.
    pub fn transport(&self, x: &Multivector) -> ExprMatrix {
        let n = self.dim();
        let xs = x.components();
        ExprMatrix::from_fn(n, |a, b| {
            let m = self.m.get(a, b);
            let mut terms = vec![m.diff(Var::Time), x.apply(m)];
            for c in 0..n {
                terms.push(self.m.get(c, b) * &xs[c].d(a));
                terms.push(-(self.m.get(a, c) * &xs[b].d(c)));
            }
            Expr::sum(terms).expand()
        })
    }
}

pub struct OperatorDisplay<'a> {
    op: &'a TangentOperator,
    chart: &'a Chart,
}

impl fmt::Display for OperatorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.op.m.nonzero().into_iter().map(|(a, b, c)| {
            (
                format!("d{}⊗∂{}", self.chart.name(a), self.chart.name(b)),
                c.clone(),
            )
        });
        write_linear_combination(f, terms, self.chart)
    }
}

pub fn build_r_e(sys: &PhaseSystem) -> TangentOperator {
    let n = sys.dim();
    let phi = sys.phi();
    let rows: Vec<Vec<Expr>> = (0..n)
        .map(|a| {
            let x = Multivector::basis(n, &[a]);
            let lifted = lie_derivative_form(sys.e(), &phi.apply_inverse(&x));
            let r = phi.apply(&lifted) - lie_bracket(sys.e(), &x);
            r.components().into_iter().map(|c| c.expand()).collect()
        })
        .collect();
    TangentOperator::new(ExprMatrix::from_rows(&rows))
}

/// `R̄_E u = L_E u − Φ_W^{-1}[E, Φ_W u]` on forms of any degree.
pub fn r_bar(sys: &PhaseSystem, u: &Form) -> Form {
    let phi = sys.phi();
    let f = lie_derivative_form(sys.e(), u) - phi.apply_inverse(&schouten(sys.e(), &phi.apply(u)));
    f.map_coefficients(Expr::expand)
}

/// `T(R)(X, Y) = [RX, RY] − R([RX, Y] + [X, RY] − R[X, Y])`.
pub fn torsion(r: &TangentOperator, x: &Multivector, y: &Multivector) -> Multivector {
    let rx = r.apply(x);
    let ry = r.apply(y);
    let inner = lie_bracket(&rx, y) + lie_bracket(x, &ry) - r.apply(&lie_bracket(x, y));
    (lie_bracket(&rx, &ry) - r.apply(&inner)).map_coefficients(Expr::expand)
}

fn vanish<K: crate::multifield::Kind>(
    name: &str,
    fields: &[crate::multifield::Field<K>],
    sys: &PhaseSystem,
) -> Part {
    let coeffs: Vec<Expr> = fields.iter().flat_map(|f| f.coefficients()).collect();
    Part::new(name, is_zero_all(&coeffs, sys.samples(), sys.tol()))
}

/// Torsion on every coordinate pair and on `random_pairs` seeded random
/// vector fields, with antisymmetry and function-linearity on the random ones.
pub fn check_torsion(sys: &PhaseSystem, r: &TangentOperator, random_pairs: usize) -> Outcome {
    let n = sys.dim();
    let mut basis = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            basis.push(torsion(
                r,
                &Multivector::basis(n, &[a]),
                &Multivector::basis(n, &[b]),
            ));
        }
    }
    let mut rng = sys.rng(3);
    let mut random = Vec::new();
    let mut antisym = Vec::new();
    let mut linear = Vec::new();
    for _ in 0..random_pairs {
        let x: Multivector = random::field(&mut rng, n, 1, 0.75, 2);
        let y: Multivector = random::field(&mut rng, n, 1, 0.75, 2);
        let t = torsion(r, &x, &y);
        antisym.push(&t + &torsion(r, &y, &x));
        if rng.gen_bool(0.5) {
            let f = random::expr(&mut rng, n, 1);
            linear.push(torsion(r, &x.scale(&f), &y) - t.scale(&f));
        }
        random.push(t);
    }
    Outcome::from_parts(vec![
        vanish("T(d_a, d_b)", &basis, sys),
        vanish("T(X, Y)", &random, sys),
        vanish("T(X, Y) + T(Y, X)", &antisym, sys),
        vanish("T(fX, Y) - f T(X, Y)", &linear, sys),
    ])
}

/// `⟨u, R X⟩ = ⟨R̄ u, X⟩` on random pairs, with `R̄` built from its own formula.
pub fn check_transpose(sys: &PhaseSystem, r: &TangentOperator, pairs: usize) -> Outcome {
    let n = sys.dim();
    let mut rng = sys.rng(4);
    let mut residuals = Vec::new();
    let mut dual = Vec::new();
    for _ in 0..pairs {
        let x: Multivector = random::field(&mut rng, n, 1, 0.75, 2);
        let u: Form = random::field(&mut rng, n, 1, 0.75, 2);
        let rb = r_bar(sys, &u);
        residuals.push(Form::scalar(n, pair(&u, &r.apply(&x)) - pair(&rb, &x)));
        dual.push(rb - r.apply_dual(&u));
    }
    Outcome::from_parts(vec![
        vanish("<u, R X> - <R~ u, X>", &residuals, sys),
        vanish("R~ u - transpose(R) u", &dual, sys),
    ])
}

pub struct AuxiliaryForms {
    pub omega: Form,
    pub omega_dot: Form,
    pub omega_ddot: Form,
}

pub fn auxiliary_forms(sys: &PhaseSystem, r: &TangentOperator) -> AuxiliaryForms {
    let omega = sys
        .phi()
        .apply_inverse(sys.w())
        .map_coefficients(Expr::expand);
    let omega_dot = r.apply_derivation(&omega);
    let omega_ddot = r.apply_derivation(&omega_dot);
    AuxiliaryForms {
        omega,
        omega_dot,
        omega_ddot,
    }
}

/// Closedness of the three forms, `ω• = 2Φ_W^{-1}Ŵ`, agreement of the
/// derivation and bracket routes for `R̄`, and nondegeneracy of `ω`.
pub fn check_auxiliary(sys: &PhaseSystem, forms: &AuxiliaryForms) -> Outcome {
    let n = sys.dim();
    let two_w_hat = sys.phi().apply_inverse(sys.w_hat()).scale(&Expr::int(2));
    let mut top = Form::scalar(n, Expr::one());
    for _ in 0..sys.n() {
        top = top.wedge(&forms.omega);
    }
    let nondegenerate = is_zero_all(&[top.top_coefficient()], sys.samples(), sys.tol());
    Outcome::from_parts(vec![
        vanish("d omega", &[exterior_d(&forms.omega)], sys),
        vanish("d omega*", &[exterior_d(&forms.omega_dot)], sys),
        vanish("d omega**", &[exterior_d(&forms.omega_ddot)], sys),
        vanish(
            "omega* - 2 Phi^-1(W_hat)",
            &[&forms.omega_dot - &two_w_hat],
            sys,
        ),
        vanish(
            "R~ omega: derivation vs bracket",
            &[&forms.omega_dot - &r_bar(sys, &forms.omega)],
            sys,
        ),
        Part::nonzero("omega^n != 0", nondegenerate),
    ])
}

/// `(∂_t + L_{X_h}) R = 0`, and `Tr R^k = Tr L^k` for `k ≤ kmax`.
pub fn check_invariance(
    sys: &PhaseSystem,
    r: &TangentOperator,
    l: &ExprMatrix,
    kmax: usize,
) -> Outcome {
    let transported = r.transport(sys.x_h());
    let traces: Vec<Expr> = r
        .matrix()
        .power_traces(kmax)
        .into_iter()
        .zip(l.power_traces(kmax))
        .map(|(a, b)| a - b)
        .collect();
    Outcome::from_parts(vec![
        Part::new(
            "(d/dt + L_X_h) R",
            is_zero_all(transported.entries(), sys.samples(), sys.tol()),
        ),
        Part::new(
            "Tr R^k - Tr L^k",
            is_zero_all(&traces, sys.samples(), sys.tol()),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::SystemDefinition;
    use crate::expr::parse;
    use crate::lax::build_lax;

    fn toda() -> PhaseSystem {
        SystemDefinition::builtin("toda").unwrap().system().unwrap()
    }

    #[test]
    fn sample_operator_has_eight_terms() {
        let sys = toda();
        let r = build_r_e(&sys);
        let want = [
            (0, 0, "z1"),
            (0, 3, "-1"),
            (1, 1, "z2"),
            (1, 2, "1"),
            (2, 2, "z1"),
            (2, 1, "exp(z3 - z4)"),
            (3, 3, "z2"),
            (3, 0, "-exp(z3 - z4)"),
        ];
        let expected = ExprMatrix::from_fn(4, |i, j| {
            want.iter()
                .find(|w| (w.0, w.1) == (i, j))
                .map_or(Expr::zero(), |w| parse(w.2, sys.chart()).unwrap())
        });
        assert!(is_zero_all(r.matrix().sub(&expected).entries(), sys.samples(), 1e-9).passed);
        assert_eq!(r.matrix().nonzero().len(), 8);
        assert_eq!(
            r.display(sys.chart()).to_string(),
            "z1 dz1⊗∂z1 - dz1⊗∂z4 + z2 dz2⊗∂z2 + dz2⊗∂z3 + exp(z3 - z4) dz3⊗∂z2 + z1 dz3⊗∂z3 \
             - exp(z3 - z4) dz4⊗∂z1 + z2 dz4⊗∂z4"
        );
    }

    #[test]
    fn sample_torsion_vanishes() {
        let sys = toda();
        let r = build_r_e(&sys);
        let o = check_torsion(&sys, &r, 20);
        assert!(o.passed, "{o:?}");
        assert!(check_transpose(&sys, &r, 20).passed);
        assert!(check_invariance(&sys, &r, &build_lax(&sys).l, 4).passed);
    }

    #[test]
    fn identity_is_torsionless() {
        let sys = toda();
        assert!(check_torsion(&sys, &TangentOperator::identity(4), 5).passed);
    }

    #[test]
    fn sample_auxiliary_forms() {
        let sys = toda();
        let r = build_r_e(&sys);
        let f = auxiliary_forms(&sys, &r);
        let canonical = Form::basis(4, &[0, 2]) + Form::basis(4, &[1, 3]);
        assert!(
            is_zero_all(
                &(&f.omega - &canonical).coefficients(),
                sys.samples(),
                1e-12
            )
            .passed
        );
        let o = check_auxiliary(&sys, &f);
        assert!(o.passed, "{o:?}");
    }

    #[test]
    fn zero_generator_gives_zero_operator() {
        let sys = toda().with_generator(Multivector::zero(4, 1)).unwrap();
        assert!(build_r_e(&sys).matrix().nonzero().is_empty());
    }

    #[test]
    fn generic_operator_has_torsion() {
        let sys = toda();
        let z = |i| Expr::coord(i);
        let m = ExprMatrix::from_fn(4, |a, b| if a == b { z((a + 1) % 4) } else { Expr::zero() });
        assert!(!check_torsion(&sys, &TangentOperator::new(m), 2).passed);
    }
}
