//! Lax pair induced by a non-Noether symmetry.
//!
//! `L = W^{-1} Ŵ` (row `a`, column `b`), and `P_ab = ∂a X_h^b` is the
//! Jacobian of the Hamiltonian vector field. Along the flow
//! `dL/dt = LP − PL`.

use nalgebra::Complex;

use crate::check::{Outcome, Part};
use crate::expr::{is_zero_all, residual_test, EvalError, Expr, Var};
use crate::matrix::{cluster, eigenvalues, ExprMatrix};
use crate::symcheck::PhaseSystem;

#[derive(Clone, Debug)]
pub struct LaxPair {
    pub l: ExprMatrix,
    pub p: ExprMatrix,
}

pub fn build_lax(sys: &PhaseSystem) -> LaxPair {
    let n = sys.dim();
    let inv = sys.phi().inverse_matrix();
    let w_hat = sys.w_hat();
    let l = ExprMatrix::from_fn(n, |a, b| {
        Expr::sum((0..n).map(|d| &inv[a][d] * &w_hat.get(&[d, b]))).expand()
    });
    let x = sys.x_h().components();
    let p = ExprMatrix::from_fn(n, |a, b| x[b].d(a).expand());
    LaxPair { l, p }
}

/// `L` written out through derivatives of `E` and `W`:
/// `L_ab = Σ W^{-1}_ad (−E^c ∂c W^{db} + W^{cb} ∂c E^d + W^{dc} ∂c E^b)`.
pub fn lax_from_components(sys: &PhaseSystem) -> ExprMatrix {
    let n = sys.dim();
    let inv = sys.phi().inverse_matrix();
    let w = |a: usize, b: usize| sys.w().get(&[a, b]);
    let e = sys.e().components();
    ExprMatrix::from_fn(n, |a, b| {
        let mut terms = Vec::new();
        for d in 0..n {
            if inv[a][d].is_zero_literal() {
                continue;
            }
            for c in 0..n {
                let inner = -(&e[c] * &w(d, b).d(c)) + w(c, b) * e[d].d(c) + w(d, c) * e[b].d(c);
                terms.push(&inv[a][d] * &inner);
            }
        }
        Expr::sum(terms).expand()
    })
}

/// `I^(k) = Tr L^k` for `k = 1..=kmax`.
pub fn lax_traces(lp: &LaxPair, kmax: usize) -> Vec<Expr> {
    lp.l.power_traces(kmax)
        .into_iter()
        .map(|t| t.expand())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commutator {
    /// `dL/dt = LP − PL`.
    LP,
    /// `dL/dt = PL − LP`, the opposite orientation.
    PL,
}

/// Entrywise `∂_t L + {h, L} − [·,·]` along the Hamiltonian flow.
pub fn lax_residual(lp: &LaxPair, sys: &PhaseSystem, commutator: Commutator) -> ExprMatrix {
    let x = sys.x_h();
    let dl = ExprMatrix::from_fn(lp.l.n(), |a, b| {
        let e = lp.l.get(a, b);
        e.diff(Var::Time) + x.apply(e)
    });
    let lp_pl = lp.l.mul(&lp.p).sub(&lp.p.mul(&lp.l));
    match commutator {
        Commutator::LP => dl.sub(&lp_pl),
        Commutator::PL => dl.add(&lp_pl),
    }
}

pub fn check_lax_equation(lp: &LaxPair, sys: &PhaseSystem, commutator: Commutator) -> Outcome {
    let r = lax_residual(lp, sys, commutator);
    let name = match commutator {
        Commutator::LP => "dL/dt - (LP - PL)",
        Commutator::PL => "dL/dt - (PL - LP)",
    };
    Outcome::from_parts(vec![Part::new(
        name,
        is_zero_all(r.entries(), sys.samples(), sys.tol()),
    )])
}

/// Sorted eigenvalues of `L` at a point.
pub fn spectrum(l: &ExprMatrix, point: &[f64], time: f64) -> Result<Vec<Complex<f64>>, EvalError> {
    Ok(eigenvalues(&l.eval(point, time)?))
}

/// Number of times each secular root occurs in the spectrum of `L`.
///
/// Determined at every sample point whose roots are well separated; the
/// count must be the same for every root and every such point.
pub fn spectral_multiplicity(
    sys: &PhaseSystem,
    lp: &LaxPair,
    ys: &[Expr],
) -> Result<usize, String> {
    let mut found: Option<usize> = None;
    for p in sys.samples().points() {
        let (Ok(roots), Ok(ev)) = (
            crate::symcheck::secular_roots(ys, &p.coords, p.time),
            spectrum(&lp.l, &p.coords, p.time),
        ) else {
            continue;
        };
        if cluster(&roots, 1e-6).len() != roots.len() {
            continue;
        }
        for r in &roots {
            let m = ev
                .iter()
                .filter(|v| (*v - r).norm() <= 1e-6 * (1.0 + r.norm()))
                .count();
            match found {
                None => found = Some(m),
                Some(prev) if prev != m => {
                    return Err(format!(
                        "root {r} occurs {m} times, another {prev} times, at {:?}",
                        p.coords
                    ));
                }
                _ => {}
            }
        }
    }
    match found {
        Some(m) if m * ys.len() == lp.l.n() => Ok(m),
        Some(m) => Err(format!(
            "multiplicity {m} does not account for all {} eigenvalues",
            lp.l.n()
        )),
        None => Err("no sample point with separated roots".into()),
    }
}

/// `Tr L^k = m Σ c_i^k` pointwise, with `m` the spectral multiplicity.
pub fn check_trace_roots(
    sys: &PhaseSystem,
    ys: &[Expr],
    traces: &[Expr],
    multiplicity: usize,
    tol: f64,
) -> Outcome {
    let test = residual_test(sys.samples(), tol, |p| {
        let roots = crate::symcheck::secular_roots(ys, &p.coords, p.time).ok()?;
        let mut worst: f64 = 0.0;
        for (i, t) in traces.iter().enumerate() {
            let k = i as i32 + 1;
            let power_sum: Complex<f64> = roots.iter().map(|c| c.powi(k)).sum();
            let v = t.eval(&p.coords, p.time).ok()?;
            worst = worst.max((power_sum * multiplicity as f64 - Complex::new(v, 0.0)).norm());
        }
        Some(worst)
    });
    Outcome::from_parts(vec![Part::new("Tr L^k - m*sum c^k", test)])
}

/// Sorted spectrum of `L` against the secular roots repeated `multiplicity` times.
pub fn check_spectrum(
    sys: &PhaseSystem,
    lp: &LaxPair,
    ys: &[Expr],
    multiplicity: usize,
    tol: f64,
) -> Outcome {
    let test = residual_test(sys.samples(), tol, |p| {
        let roots = crate::symcheck::secular_roots(ys, &p.coords, p.time).ok()?;
        let ev = spectrum(&lp.l, &p.coords, p.time).ok()?;
        let mut repeated: Vec<Complex<f64>> = roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(*r, multiplicity))
            .collect();
        crate::matrix::sort_complex(&mut repeated);
        if repeated.len() != ev.len() {
            return Some(f64::INFINITY);
        }
        Some(
            ev.iter()
                .zip(&repeated)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    });
    Outcome::from_parts(vec![Part::new("spec L - secular roots", test)])
}
