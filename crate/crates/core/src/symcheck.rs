//! Phase-space systems and the checks tied to a symmetry generator: the
//! symmetry condition, the non-Noether property, conserved quantities and
//! secular roots, and the compatibility of the two Poisson structures.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::check::{Outcome, Part};
use crate::expr::{is_zero_all, residual_test, Chart, EvalError, Expr, SampleSet, Sampling, Var};
use crate::matrix::{binomial, elementary_symmetric, monic_roots};
use crate::multifield::{
    lie_derivative, phi_w, schouten, top_ratio, FieldError, Form, Multivector, PhiW,
};
use crate::random;

#[derive(Debug, Error, Clone)]
pub enum SystemError {
    #[error("{what} has dimension {got}, chart has {chart}")]
    Dimension {
        what: &'static str,
        got: usize,
        chart: usize,
    },
    #[error("{what} must have degree {expected}, got {got}")]
    Degree {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} refers to coordinate {index}, outside the chart")]
    Coordinate { what: &'static str, index: usize },
    #[error("bivector is not Poisson: [W,W] reaches {residual:e} at {witness:?}")]
    NotPoisson {
        residual: f64,
        witness: Option<crate::expr::SamplePoint>,
    },
    #[error(transparent)]
    Singular(#[from] FieldError),
}

/// Hamiltonian system `(W, h)` with a candidate symmetry generator `E`,
/// validated on a fixed sample set.
#[derive(Clone, Debug)]
pub struct PhaseSystem {
    chart: Chart,
    w: Multivector,
    h: Expr,
    e: Multivector,
    samples: SampleSet,
    phi: PhiW,
    w_hat: Multivector,
    x_h: Multivector,
}

impl PhaseSystem {
    /// Fails unless `[W,W]` vanishes and `W` is non-degenerate at every sample.
    pub fn new(
        chart: Chart,
        w: Multivector,
        h: Expr,
        e: Multivector,
        sampling: &Sampling,
    ) -> Result<Self, SystemError> {
        let dim = chart.dim();
        for (what, f, degree) in [("W", &w, 2), ("E", &e, 1)] {
            if f.dim() != dim {
                return Err(SystemError::Dimension {
                    what,
                    got: f.dim(),
                    chart: dim,
                });
            }
            if f.degree() != degree {
                return Err(SystemError::Degree {
                    what,
                    expected: degree,
                    got: f.degree(),
                });
            }
        }
        if sampling.ranges.len() != dim {
            return Err(SystemError::Dimension {
                what: "sampling ranges",
                got: sampling.ranges.len(),
                chart: dim,
            });
        }
        let exprs = w.coefficients().into_iter().map(|c| ("W", c));
        let exprs = exprs.chain(e.coefficients().into_iter().map(|c| ("E", c)));
        for (what, c) in exprs.chain([("h", h.clone())]) {
            if let Some(index) = c.max_coord().filter(|&i| i >= dim) {
                return Err(SystemError::Coordinate { what, index });
            }
        }
        let samples = sampling.points();
        let jacobi = is_zero_all(&schouten(&w, &w).coefficients(), &samples, samples.tol());
        if !jacobi.passed {
            return Err(SystemError::NotPoisson {
                residual: jacobi.max_residual,
                witness: jacobi.witness,
            });
        }
        let phi = PhiW::new(&w, &samples)?;
        let w_hat = schouten(&w, &e);
        let x_h = hamiltonian_vector_field(&w, &h);
        Ok(PhaseSystem {
            chart,
            w,
            h,
            e,
            samples,
            phi,
            w_hat,
            x_h,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn w(&self) -> &Multivector {
        &self.w
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn e(&self) -> &Multivector {
        &self.e
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn tol(&self) -> f64 {
        self.samples.tol()
    }

    pub fn phi(&self) -> &PhiW {
        &self.phi
    }

    /// Deformed bivector `Ŵ = [W, E]`, the change of `W` along the symmetry.
    pub fn w_hat(&self) -> &Multivector {
        &self.w_hat
    }

    /// `X_h = {h, ·}`, the generator of the dynamics.
    pub fn x_h(&self) -> &Multivector {
        &self.x_h
    }

    /// Total time derivative `∂_t q + {h, q}` of an observable.
    pub fn total_derivative(&self, q: &Expr) -> Expr {
        q.dt() + self.x_h.apply(q)
    }

    /// A new system with the same structure and a different generator.
    pub fn with_generator(&self, e: Multivector) -> Result<Self, SystemError> {
        PhaseSystem::new(
            self.chart.clone(),
            self.w.clone(),
            self.h.clone(),
            e,
            self.samples.config(),
        )
    }

    /// Seeded generator for random test fields, derived from the sampling seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(
            self.samples.config().seed ^ stream.wrapping_mul(0xA076_1D64_78BD_642F),
        )
    }
}

/// `X_f = {f, ·}` for the bracket of `v`: `X_f^b = Σa V^{ab} ∂a f`.
pub fn hamiltonian_vector_field(v: &Multivector, f: &Expr) -> Multivector {
    let n = v.dim();
    Multivector::from_components(
        (0..n)
            .map(|b| Expr::sum((0..n).map(|a| v.get(&[a, b]) * f.d(a))))
            .collect(),
    )
}

/// `{f, g} = V(df ∧ dg) = Σ V^{ab} ∂a f ∂b g`.
pub fn poisson_bracket(f: &Expr, g: &Expr, v: &Multivector) -> Expr {
    let mut terms = Vec::new();
    for (blade, c) in v.terms() {
        let (a, b) = (blade.indices()[0], blade.indices()[1]);
        terms.push(c * &(f.d(a) * g.d(b) - f.d(b) * g.d(a)));
    }
    Expr::sum(terms)
}

fn zero_part(name: &str, f: &Multivector, sys: &PhaseSystem) -> Part {
    Part::new(
        name,
        is_zero_all(&f.coefficients(), &sys.samples, sys.tol()),
    )
}

pub struct SymmetryCheck {
    pub outcome: Outcome,
    /// `∂_t E − [E, X_h]`.
    pub residual: Multivector,
}

/// Symmetry condition `∂_t E = [E, X_h]`; for time-independent `E` it says
/// that `E` commutes with the Hamiltonian flow.
pub fn check_symmetry(sys: &PhaseSystem) -> SymmetryCheck {
    let residual = sys.e.diff(Var::Time) - schouten(&sys.e, &sys.x_h);
    let outcome = Outcome::from_parts(vec![zero_part("dE/dt - [E, X_h]", &residual, sys)]);
    SymmetryCheck { outcome, residual }
}

/// Passes when `E` does not preserve `W`, i.e. `Ŵ` is not identically zero.
pub fn check_non_noether(sys: &PhaseSystem) -> Outcome {
    let test = is_zero_all(&sys.w_hat.coefficients(), &sys.samples, sys.tol());
    Outcome::from_parts(vec![Part::nonzero("[W, E] != 0", test)])
}

fn power(f: &Multivector, k: usize) -> Multivector {
    let mut acc = Multivector::scalar(f.dim(), Expr::one());
    for _ in 0..k {
        acc = acc.wedge(f);
    }
    acc
}

/// `Y^(k) = Ŵ^k ∧ W^{n−k} / W^n` for `k = 1..n`.
pub fn conserved_quantities(sys: &PhaseSystem) -> Result<Vec<Expr>, FieldError> {
    let n = sys.n();
    let volume = power(&sys.w, n);
    (1..=n)
        .map(|k| {
            let top = power(&sys.w_hat, k).wedge(&power(&sys.w, n - k));
            top_ratio(&top, &volume, &sys.samples).map(|y| y.expand())
        })
        .collect()
}

/// `∂_t q + {h, q} = 0` for every named observable.
pub fn check_conservation(sys: &PhaseSystem, quantities: &[(String, Expr)]) -> Outcome {
    let parts = quantities
        .iter()
        .map(|(name, q)| {
            Part::new(
                format!("d{name}/dt"),
                crate::expr::is_zero(&sys.total_derivative(q), &sys.samples, sys.tol()),
            )
        })
        .collect();
    Outcome::from_parts(parts)
}

/// Coefficients of the monic secular polynomial, highest power first:
/// entry `k` multiplies `c^{n−k}` and equals `(−1)^k C(n,k) Y^(k)`.
pub fn secular_coefficients(ys: &[Expr]) -> Vec<Expr> {
    let n = ys.len();
    let mut out = vec![Expr::one()];
    for (i, y) in ys.iter().enumerate() {
        let k = i + 1;
        let c = binomial(n, k).round() as i64 * if k % 2 == 1 { -1 } else { 1 };
        out.push((Expr::int(c) * y.clone()).expand());
    }
    out
}

/// Human-readable secular polynomial in the variable `c`.
pub fn secular_polynomial_text(ys: &[Expr], chart: &Chart) -> String {
    let n = ys.len();
    let mut s = if n == 1 {
        "c".to_string()
    } else {
        format!("c^{n}")
    };
    for (k, coef) in secular_coefficients(ys).into_iter().enumerate().skip(1) {
        if coef.is_zero_literal() {
            continue;
        }
        let var = match n - k {
            0 => String::new(),
            1 => "*c".to_string(),
            p => format!("*c^{p}"),
        };
        let text = coef.display(chart).to_string();
        let (sign, body) = match text.strip_prefix('-') {
            Some(_) => ("-", (-coef).display(chart).to_string()),
            None => ("+", text),
        };
        let body = if var.is_empty() || !body.contains([' ', '+']) {
            body
        } else {
            format!("({body})")
        };
        s.push_str(&format!(" {sign} {body}{var}"));
    }
    s
}

/// Numeric roots of the secular polynomial at a point, sorted by real part
/// then imaginary part.
pub fn secular_roots(
    ys: &[Expr],
    point: &[f64],
    time: f64,
) -> Result<Vec<Complex<f64>>, EvalError> {
    let n = ys.len();
    let mut coeffs = Vec::with_capacity(n);
    for (i, y) in ys.iter().enumerate() {
        let k = i + 1;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        coeffs.push(sign * binomial(n, k) * y.eval(point, time)?);
    }
    Ok(monic_roots(&coeffs))
}

/// `Y^(k)` rebuilt from secular roots: `e_k(c) / C(n,k)`.
pub fn reconstruct_from_roots(roots: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = roots.len();
    elementary_symmetric(roots)
        .into_iter()
        .enumerate()
        .map(|(i, e)| e / binomial(n, i + 1))
        .collect()
}

/// Cross-check between the volume-ratio integrals and their reconstruction
/// from numerically computed secular roots.
pub fn check_root_reconstruction(sys: &PhaseSystem, ys: &[Expr], tol: f64) -> Outcome {
    let test = residual_test(&sys.samples, tol, |p| {
        let roots = secular_roots(ys, &p.coords, p.time).ok()?;
        let rebuilt = reconstruct_from_roots(&roots);
        let mut worst: f64 = 0.0;
        for (y, r) in ys.iter().zip(rebuilt) {
            let v = y.eval(&p.coords, p.time).ok()?;
            worst = worst.max((r - Complex::new(v, 0.0)).norm());
        }
        Some(worst)
    });
    Outcome::from_parts(vec![Part::new("Y from secular roots", test)])
}

/// `[[E,[E,W]],W] = 0` together with its consequences `[Ŵ,W] = 0` and `[Ŵ,Ŵ] = 0`.
pub fn check_yang_baxter(sys: &PhaseSystem) -> Outcome {
    let inner = schouten(&sys.e, &sys.w_hat);
    Outcome::from_parts(vec![
        zero_part("[[E,[E,W]],W]", &schouten(&inner, &sys.w), sys),
        zero_part("[W_hat,W]", &schouten(&sys.w_hat, &sys.w), sys),
        zero_part("[W_hat,W_hat]", &schouten(&sys.w_hat, &sys.w_hat), sys),
    ])
}

/// Pairwise involutivity of the integrals under both brackets.
pub fn check_involutivity(sys: &PhaseSystem, ys: &[Expr]) -> Outcome {
    let mut parts = Vec::new();
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            for (label, v) in [("", &sys.w), ("*", &sys.w_hat)] {
                let b = poisson_bracket(&ys[i], &ys[j], v);
                let name = format!("{{Y{},Y{}}}{label}", i + 1, j + 1);
                parts.push(Part::new(
                    name,
                    crate::expr::is_zero(&b, &sys.samples, sys.tol()),
                ));
            }
        }
    }
    if parts.is_empty() {
        parts.push(Part::new("no pairs", crate::expr::ZeroTest::vacuous()));
    }
    Outcome::from_parts(parts)
}

/// Both bivectors Poisson and compatible, and each preserved by its own
/// Hamiltonian vector fields (checked on seeded random functions).
pub fn check_bihamiltonian(sys: &PhaseSystem, random_functions: usize) -> Outcome {
    let mut parts = vec![
        zero_part("[W,W]", &schouten(&sys.w, &sys.w), sys),
        zero_part("[W,W_hat]", &schouten(&sys.w, &sys.w_hat), sys),
        zero_part("[W_hat,W_hat]", &schouten(&sys.w_hat, &sys.w_hat), sys),
    ];
    let mut rng = sys.rng(1);
    let fs: Vec<Expr> = (0..random_functions)
        .map(|_| random::expr(&mut rng, sys.dim(), 2))
        .collect();
    for (label, v) in [("W", &sys.w), ("W_hat", &sys.w_hat)] {
        let mut coeffs = Vec::new();
        for f in &fs {
            let x = phi_w(v, &Form::differential(sys.dim(), f));
            coeffs.extend(lie_derivative(&x, v).coefficients());
        }
        parts.push(Part::new(
            format!("Liouville {label}"),
            is_zero_all(&coeffs, &sys.samples, sys.tol()),
        ));
    }
    Outcome::from_parts(parts)
}
