//! Sampled zero testing.
//!
//! Identities are checked by evaluating the residual at a seeded set of
//! random points rather than by canonical simplification. A point at which
//! the residual cannot be evaluated (division by zero, log of a non-positive
//! number) is discarded and redrawn a bounded number of times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Expr;

const MAX_RETRIES: u64 = 16;

/// Sampling configuration. Defaults: 100 points, coordinates uniform in
/// [−1, 1], time uniform in [0, 1], tolerance 1e−9, seed 42.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub count: usize,
    pub ranges: Vec<(f64, f64)>,
    pub time_range: (f64, f64),
    pub seed: u64,
    pub tol: f64,
}

impl Sampling {
    pub fn new(dim: usize) -> Self {
        Sampling {
            count: 100,
            ranges: vec![(-1.0, 1.0); dim],
            time_range: (0.0, 1.0),
            seed: 42,
            tol: 1e-9,
        }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn points(&self) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let points = (0..self.count).map(|_| self.draw(&mut rng)).collect();
        SampleSet {
            points,
            config: self.clone(),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> SamplePoint {
        let coords = self
            .ranges
            .iter()
            .map(|&(lo, hi)| uniform(rng, lo, hi))
            .collect();
        let time = uniform(rng, self.time_range.0, self.time_range.1);
        SamplePoint { coords, time }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub coords: Vec<f64>,
    pub time: f64,
}

/// A fixed, reproducible set of evaluation points.
#[derive(Clone, Debug)]
pub struct SampleSet {
    points: Vec<SamplePoint>,
    config: Sampling,
}

impl SampleSet {
    pub fn points(&self) -> &[SamplePoint] {
        &self.points
    }

    pub fn tol(&self) -> f64 {
        self.config.tol
    }

    pub fn config(&self) -> &Sampling {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Replacement for sample `index` after `attempt` failed evaluations.
    fn replacement(&self, index: usize, attempt: u64) -> SamplePoint {
        let seed = self.config.seed
            ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ attempt.rotate_left(32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.config.draw(&mut rng)
    }

    /// Evaluates `f` at every sample, redrawing points where it errors.
    /// Returns `(value, point)` pairs, or the point where retries ran out.
    fn evaluate<F>(&self, mut f: F) -> Vec<(f64, SamplePoint)>
    where
        F: FnMut(&SamplePoint) -> Option<f64>,
    {
        let mut out = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if let Some(v) = f(p) {
                out.push((v, p.clone()));
                continue;
            }
            let mut resolved = None;
            for attempt in 1..=MAX_RETRIES {
                let q = self.replacement(i, attempt);
                if let Some(v) = f(&q) {
                    resolved = Some((v, q));
                    break;
                }
            }
            out.push(resolved.unwrap_or((f64::INFINITY, p.clone())));
        }
        out
    }
}

/// Outcome of a sampled zero test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTest {
    pub passed: bool,
    pub max_residual: f64,
    /// Point attaining `max_residual` (first one on ties).
    pub witness: Option<SamplePoint>,
}

impl ZeroTest {
    pub fn vacuous() -> Self {
        ZeroTest {
            passed: true,
            max_residual: 0.0,
            witness: None,
        }
    }

    /// Combines two tests, keeping the worse residual.
    pub fn merge(self, other: ZeroTest) -> ZeroTest {
        let passed = self.passed && other.passed;
        let keep_other = other.max_residual > self.max_residual
            || (self.witness.is_none() && other.witness.is_some());
        let (max_residual, witness) = if keep_other {
            (other.max_residual, other.witness)
        } else {
            (self.max_residual, self.witness)
        };
        ZeroTest {
            passed,
            max_residual,
            witness,
        }
    }
}

/// `true` iff `|e| < tol` at every sample.
pub fn is_zero(e: &Expr, samples: &SampleSet, tol: f64) -> ZeroTest {
    is_zero_all(std::slice::from_ref(e), samples, tol)
}

/// Joint zero test of several expressions (e.g. all coefficients of a
/// field); the residual at a point is the largest absolute value.
pub fn is_zero_all(exprs: &[Expr], samples: &SampleSet, tol: f64) -> ZeroTest {
    let live: Vec<&Expr> = exprs.iter().filter(|e| !e.is_zero_literal()).collect();
    if live.is_empty() {
        return ZeroTest {
            passed: true,
            max_residual: 0.0,
            witness: samples.points.first().cloned(),
        };
    }
    residual_test(samples, tol, |p| {
        let mut worst: f64 = 0.0;
        for e in &live {
            worst = worst.max(e.eval(&p.coords, p.time).ok()?.abs());
        }
        Some(worst)
    })
}

/// Zero test of an arbitrary pointwise residual function. `None` marks a
/// point where the residual is undefined.
pub fn residual_test<F>(samples: &SampleSet, tol: f64, f: F) -> ZeroTest
where
    F: FnMut(&SamplePoint) -> Option<f64>,
{
    let values = samples.evaluate(f);
    let mut max_residual = 0.0;
    let mut witness = None;
    for (v, p) in values {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if witness.is_none() || v > max_residual {
            max_residual = v;
            witness = Some(p);
        }
    }
    ZeroTest {
        passed: max_residual < tol,
        max_residual,
        witness,
    }
}
