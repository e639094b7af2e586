//! Bidifferential calculus `(d, d̃)` on differential forms.
//!
//! Both differentials come from the same recipe: transport a form to
//! multivectors with `Φ_W`, bracket with a Poisson bivector, transport back.
//! With `W` this is the exterior derivative; with `Ŵ` it is `d̃`.

use crate::check::{Outcome, Part};
use crate::expr::{is_zero_all, Expr, Var};
use crate::multifield::{exterior_d, lie_derivative_form, schouten, Form, Multivector};
use crate::random;
use crate::symcheck::PhaseSystem;

pub struct Bicomplex<'a> {
    sys: &'a PhaseSystem,
    /// `d̃ z_a`.
    table: Vec<Form>,
    /// `d̃(dz_a) = −d(d̃ z_a)`.
    table_d: Vec<Form>,
}

impl<'a> Bicomplex<'a> {
    pub fn new(sys: &'a PhaseSystem) -> Self {
        let dim = sys.dim();
        let mut bc = Bicomplex {
            sys,
            table: Vec::new(),
            table_d: Vec::new(),
        };
        bc.table = (0..dim)
            .map(|a| bc.d_tilde(&Form::scalar(dim, Expr::coord(a))))
            .collect();
        bc.table_d = bc.table.iter().map(|f| -exterior_d(f)).collect();
        bc
    }

    pub fn system(&self) -> &PhaseSystem {
        self.sys
    }

    /// `d̃ z_a` for every coordinate.
    pub fn table(&self) -> &[Form] {
        &self.table
    }

    fn transported(&self, v: &Multivector, u: &Form) -> Form {
        let phi = self.sys.phi();
        let f = phi.apply_inverse(&schouten(v, &phi.apply(u)));
        f.map_coefficients(Expr::expand)
    }

    /// Exterior derivative realized as `Φ_W^{-1}[W, Φ_W u]`.
    pub fn d_bracket(&self, u: &Form) -> Form {
        self.transported(self.sys.w(), u)
    }

    /// `d̃u = Φ_W^{-1}[Ŵ, Φ_W u]`.
    pub fn d_tilde(&self, u: &Form) -> Form {
        self.transported(self.sys.w_hat(), u)
    }

    /// `d̃` extended from its values on `z_a` and `dz_a` as a graded
    /// derivation: `d̃(f dz_I) = d̃f ∧ dz_I + f d̃(dz_I)`.
    pub fn d_tilde_derivation(&self, u: &Form) -> Form {
        let dim = self.sys.dim();
        let mut total = Form::zero(dim, u.degree() + 1);
        for (blade, c) in u.terms() {
            let idx = blade.indices();
            let basis = Form::basis(dim, idx);
            let df = self.function_d_tilde(c);
            total = total + df.wedge(&basis);
            for s in 0..idx.len() {
                let mut piece = Form::scalar(dim, c.clone());
                for (j, &i) in idx.iter().enumerate() {
                    let factor = if j == s {
                        self.table_d[i].clone()
                    } else {
                        Form::basis(dim, &[i])
                    };
                    piece = piece.wedge(&factor);
                }
                let sign = if s % 2 == 1 { -1 } else { 1 };
                total = total + piece.scale(&Expr::int(sign));
            }
        }
        total.map_coefficients(Expr::expand)
    }

    fn function_d_tilde(&self, f: &Expr) -> Form {
        let dim = self.sys.dim();
        let mut out = Form::zero(dim, 1);
        for (a, t) in self.table.iter().enumerate() {
            let da = f.d(a);
            if !da.is_zero_literal() {
                out = out + t.scale(&da);
            }
        }
        out
    }
}

fn forms_vanish(name: &str, forms: &[Form], sys: &PhaseSystem) -> Part {
    let coeffs: Vec<Expr> = forms.iter().flat_map(|f| f.coefficients()).collect();
    Part::new(name, is_zero_all(&coeffs, sys.samples(), sys.tol()))
}

/// Test forms: coordinate functions and differentials, plus seeded random
/// forms of degree 0, 1 and 2.
pub fn test_forms(sys: &PhaseSystem, random_per_degree: usize) -> Vec<Form> {
    let dim = sys.dim();
    let mut forms: Vec<Form> = (0..dim)
        .map(|a| Form::scalar(dim, Expr::coord(a)))
        .collect();
    forms.extend((0..dim).map(|a| Form::basis(dim, &[a])));
    let mut rng = sys.rng(2);
    for degree in 0..=2 {
        for _ in 0..random_per_degree {
            forms.push(random::field(&mut rng, dim, degree, 0.5, 2));
        }
    }
    forms
}

/// `d² = d̃² = dd̃ + d̃d = 0`, together with the two cross-checks: the
/// bracket realization of `d` against the exterior derivative, and the
/// bracket route for `d̃` against its derivation extension.
pub fn check_bicomplex(bc: &Bicomplex, forms: &[Form]) -> Outcome {
    let sys = bc.sys;
    let mut d2 = Vec::new();
    let mut dt2 = Vec::new();
    let mut anti = Vec::new();
    let mut d_routes = Vec::new();
    let mut dt_routes = Vec::new();
    for u in forms {
        let du = exterior_d(u);
        let dtu = bc.d_tilde(u);
        d2.push(exterior_d(&du));
        dt2.push(bc.d_tilde(&dtu));
        anti.push(exterior_d(&dtu) + bc.d_tilde(&du));
        d_routes.push(bc.d_bracket(u) - du);
        dt_routes.push(bc.d_tilde_derivation(u) - dtu);
    }
    Outcome::from_parts(vec![
        forms_vanish("d^2", &d2, sys),
        forms_vanish("d~^2", &dt2, sys),
        forms_vanish("d d~ + d~ d", &anti, sys),
        forms_vanish("d: bracket vs exterior", &d_routes, sys),
        forms_vanish("d~: bracket vs derivation", &dt_routes, sys),
    ])
}

/// Lenard recursion `(k+1) d̃I^(k) = k dI^(k+1)`.
pub fn check_lenard(bc: &Bicomplex, integrals: &[Expr]) -> Outcome {
    let sys = bc.sys;
    let dim = sys.dim();
    let mut parts = Vec::new();
    for k in 1..integrals.len() {
        let lhs = bc
            .d_tilde(&Form::scalar(dim, integrals[k - 1].clone()))
            .scale(&Expr::int(k as i64 + 1));
        let rhs = Form::differential(dim, &integrals[k]).scale(&Expr::int(k as i64));
        parts.push(forms_vanish(
            &format!("{}d~I{} - {}dI{}", k + 1, k, k, k + 1),
            &[lhs - rhs],
            sys,
        ));
    }
    if parts.is_empty() {
        parts.push(Part::new("no pairs", crate::expr::ZeroTest::vacuous()));
    }
    Outcome::from_parts(parts)
}

/// `d̃` commutes with the time evolution: `D(d̃u) = d̃(Du)` with
/// `D = ∂_t + L_{X_h}`, on the given time-independent forms.
pub fn check_invariance(bc: &Bicomplex, forms: &[Form]) -> Outcome {
    let x = bc.sys.x_h();
    let residuals: Vec<Form> = forms
        .iter()
        .map(|u| {
            let dtu = bc.d_tilde(u);
            let lhs = dtu.diff(Var::Time) + lie_derivative_form(x, &dtu);
            let rhs = bc.d_tilde(&(u.diff(Var::Time) + lie_derivative_form(x, u)));
            lhs - rhs
        })
        .collect();
    Outcome::from_parts(vec![forms_vanish("D d~u - d~ Du", &residuals, bc.sys)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::definition::SystemDefinition;
    use crate::expr::parse;
    use crate::lax::{build_lax, lax_traces};
    use crate::multifield::Multivector;

    fn toda() -> PhaseSystem {
        SystemDefinition::builtin("toda").unwrap().system().unwrap()
    }

    fn one_form(sys: &PhaseSystem, comps: [&str; 4]) -> Form {
        Form::from_components(
            comps
                .iter()
                .map(|s| parse(s, sys.chart()).unwrap())
                .collect(),
        )
    }

    #[test]
    fn sample_table() {
        let sys = toda();
        let bc = Bicomplex::new(&sys);
        let want = [
            one_form(&sys, ["z1", "0", "0", "-exp(z3 - z4)"]),
            one_form(&sys, ["0", "z2", "exp(z3 - z4)", "0"]),
            one_form(&sys, ["0", "1", "z1", "0"]),
            one_form(&sys, ["-1", "0", "0", "z2"]),
        ];
        for (got, want) in bc.table().iter().zip(&want) {
            assert!(
                is_zero_all(&(got - want).coefficients(), sys.samples(), 1e-12).passed,
                "{got:?}"
            );
        }
    }

    #[test]
    fn derivation_on_a_product() {
        let sys = toda();
        let bc = Bicomplex::new(&sys);
        let f = Form::scalar(4, parse("z1*z3", sys.chart()).unwrap());
        let want = bc.table()[2].scale(&Expr::coord(0)) + bc.table()[0].scale(&Expr::coord(2));
        assert!(
            is_zero_all(
                &(bc.d_tilde(&f) - want).coefficients(),
                sys.samples(),
                1e-12
            )
            .passed
        );
        assert!(bc.d_tilde(&Form::scalar(4, Expr::int(7))).is_empty());
    }

    #[test]
    fn sample_is_a_bicomplex_with_lenard_scheme() {
        let sys = toda();
        let bc = Bicomplex::new(&sys);
        let forms = test_forms(&sys, 2);
        let o = check_bicomplex(&bc, &forms);
        assert!(o.passed, "{o:?}");
        let traces = lax_traces(&build_lax(&sys), 3);
        assert!(check_lenard(&bc, &traces).passed);
        assert!(check_invariance(&bc, &forms).passed);
    }

    #[test]
    fn generator_breaking_the_cubic_condition_breaks_nilpotency() {
        let sys = toda();
        let e = Multivector::from_components(vec![
            parse("z1*z2", sys.chart()).unwrap(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
        ]);
        let bad = sys.with_generator(e).unwrap();
        let bc = Bicomplex::new(&bad);
        let o = check_bicomplex(&bc, &test_forms(&bad, 1));
        assert!(!o.part("d~^2").unwrap().passed);
        assert!(o.part("d^2").unwrap().passed);
        assert!(!crate::symcheck::check_yang_baxter(&bad).passed);
    }

    #[test]
    fn planar_deformation_keeps_the_bicomplex() {
        // z1^2 ∂z1 only deforms the (z1, z3) plane, so the cubic condition still holds
        let sys = toda();
        let e = Multivector::from_components(vec![
            parse("z1^2", sys.chart()).unwrap(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
        ]);
        let planar = sys.with_generator(e).unwrap();
        assert!(crate::symcheck::check_yang_baxter(&planar).passed);
        assert!(check_bicomplex(&Bicomplex::new(&planar), &test_forms(&planar, 1)).passed);
    }
}
