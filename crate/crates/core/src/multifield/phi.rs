use std::collections::HashMap;

use crate::expr::{Expr, SamplePoint, SampleSet};

use super::{Field, FieldError, Form, Kind, Multivector};

/// Antisymmetric coefficient matrix `π^{ab}` of a bivector.
fn bivector_matrix(w: &Multivector) -> Vec<Vec<Expr>> {
    assert_eq!(w.degree(), 2, "expected a bivector");
    let n = w.dim();
    (0..n)
        .map(|a| (0..n).map(|b| w.get(&[a, b])).collect())
        .collect()
}

/// Image of a form under the algebra morphism fixed by `dz_a ↦ images[a]`.
fn extend<K: Kind, L: Kind>(source: &Field<K>, images: &[Field<L>]) -> Field<L> {
    let dim = source.dim();
    let mut total = Field::<L>::zero(dim, source.degree());
    for (blade, c) in source.terms() {
        let mut acc = Field::<L>::scalar(dim, c.clone());
        for &i in blade.indices() {
            acc = acc.wedge(&images[i]);
            if acc.is_empty() {
                break;
            }
        }
        if !acc.is_empty() {
            total = total + acc;
        }
    }
    total
}

fn vector_images(pi: &[Vec<Expr>]) -> Vec<Multivector> {
    let n = pi.len();
    (0..n)
        .map(|a| Multivector::from_components((0..n).map(|b| pi[b][a].clone()).collect()))
        .collect()
}

/// Bundle map of a bivector, `Φ_W(dz_a) = Σb π^{ba} ∂b`, extended to forms
/// of every degree as an algebra morphism.
pub fn phi_w(w: &Multivector, u: &Form) -> Multivector {
    assert_eq!(w.dim(), u.dim(), "dimension mismatch");
    extend(u, &vector_images(&bivector_matrix(w)))
}

/// `Φ_W` with its symbolic inverse, available once `W` is known to be
/// non-degenerate on the sample set.
#[derive(Clone, Debug)]
pub struct PhiW {
    pi: Vec<Vec<Expr>>,
    inverse: Vec<Vec<Expr>>,
    det: Expr,
    images: Vec<Multivector>,
    inverse_images: Vec<Form>,
}

impl PhiW {
    pub fn new(w: &Multivector, samples: &SampleSet) -> Result<Self, FieldError> {
        let pi = bivector_matrix(w);
        let n = pi.len();
        let mut minors = Minors::new(&pi);
        let all = (1u64 << n) - 1;
        let det = minors.det(all, all);
        check_nonvanishing(&det, samples, |value, witness| FieldError::Singular {
            value,
            witness,
        })?;
        let inv_det = det.clone().recip();
        let inverse: Vec<Vec<Expr>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // (π^{-1})_{ij} = C_{ji} / det
                        let cof = minors.det(all & !(1 << j), all & !(1 << i));
                        let signed = if (i + j) % 2 == 1 { -cof } else { cof };
                        &signed * &inv_det
                    })
                    .collect()
            })
            .collect();
        let images = vector_images(&pi);
        let inverse_images = (0..n)
            .map(|b| Form::from_components((0..n).map(|a| inverse[a][b].clone()).collect()))
            .collect();
        Ok(PhiW {
            pi,
            inverse,
            det,
            images,
            inverse_images,
        })
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    /// `π^{ab}`.
    pub fn matrix(&self) -> &[Vec<Expr>] {
        &self.pi
    }

    /// `(π^{-1})_{ab}`.
    pub fn inverse_matrix(&self) -> &[Vec<Expr>] {
        &self.inverse
    }

    pub fn determinant(&self) -> &Expr {
        &self.det
    }

    pub fn apply(&self, u: &Form) -> Multivector {
        extend(u, &self.images)
    }

    /// `Φ_W^{-1}(∂b) = Σa (π^{-1})_{ab} dz_a`.
    pub fn apply_inverse(&self, a: &Multivector) -> Form {
        extend(a, &self.inverse_images)
    }
}

/// Memoized Laplace expansion of minors, keyed by row and column bitmasks.
struct Minors<'a> {
    m: &'a [Vec<Expr>],
    memo: HashMap<(u64, u64), Expr>,
}

impl<'a> Minors<'a> {
    fn new(m: &'a [Vec<Expr>]) -> Self {
        Minors {
            m,
            memo: HashMap::new(),
        }
    }

    fn det(&mut self, rows: u64, cols: u64) -> Expr {
        if rows == 0 {
            return Expr::one();
        }
        if let Some(d) = self.memo.get(&(rows, cols)) {
            return d.clone();
        }
        let r = rows.trailing_zeros() as usize;
        let mut terms = Vec::new();
        let mut pos = 0;
        for c in 0..self.m.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = self.m[r][c].clone();
            if !entry.is_zero_literal() {
                let sub = self.det(rows & !(1 << r), cols & !(1 << c));
                let t = &entry * &sub;
                terms.push(if pos % 2 == 1 { -t } else { t });
            }
            pos += 1;
        }
        let d = Expr::sum(terms);
        self.memo.insert((rows, cols), d.clone());
        d
    }
}

fn check_nonvanishing<F>(e: &Expr, samples: &SampleSet, err: F) -> Result<(), FieldError>
where
    F: Fn(f64, Option<SamplePoint>) -> FieldError,
{
    if e.is_zero_literal() {
        return Err(err(0.0, samples.points().first().cloned()));
    }
    for p in samples.points() {
        if let Ok(v) = e.eval(&p.coords, p.time) {
            if v.abs() <= samples.tol() {
                return Err(err(v, Some(p.clone())));
            }
        }
    }
    Ok(())
}

/// Ratio of two top-degree fields' single coefficients.
pub fn top_ratio<K: Kind>(
    a: &Field<K>,
    b: &Field<K>,
    samples: &SampleSet,
) -> Result<Expr, FieldError> {
    for f in [a, b] {
        if f.degree() != f.dim() {
            return Err(FieldError::Degree {
                expected: f.dim(),
                actual: f.degree(),
            });
        }
    }
    if a.dim() != b.dim() {
        return Err(FieldError::Dimension(a.dim(), b.dim()));
    }
    let den = b.top_coefficient();
    check_nonvanishing(&den, samples, |value, witness| {
        FieldError::ZeroDenominator { value, witness }
    })?;
    Ok(&a.top_coefficient() * &den.recip())
}
