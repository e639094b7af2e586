//! Graded algebra of multivector fields and differential forms on a chart.
//!
//! Both kinds share one sparse representation: a map from strictly
//! increasing multi-indices ([`Blade`]) to coefficient expressions, where an
//! absent key means a zero coefficient. A multivector term `c·∂a∧∂b` and a
//! form term `c·dza∧dzb` are stored identically; the phantom kind parameter
//! keeps them from being mixed up.

mod algebra;
mod forms;
mod phi;
#[cfg(test)]
mod props;

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::expr::{Chart, Expr, Number, SamplePoint, Var};

pub use algebra::{lie_bracket, lie_derivative, schouten};
pub use forms::{exterior_d, interior_product, lie_derivative_form, pair};
pub use phi::{phi_w, top_ratio, PhiW};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("degenerate structure: determinant {value:e} at {witness:?}")]
    Singular {
        value: f64,
        witness: Option<SamplePoint>,
    },
    #[error("division by a vanishing top coefficient ({value:e}) at {witness:?}")]
    ZeroDenominator {
        value: f64,
        witness: Option<SamplePoint>,
    },
    #[error("expected a field of degree {expected}, got {actual}")]
    Degree { expected: usize, actual: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

/// Strictly increasing multi-index `a1 < … < ak`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blade(Vec<usize>);

impl Blade {
    /// Sorts `indices`, returning the permutation sign, or `None` when an
    /// index repeats (the wedge vanishes).
    pub fn normalize(mut indices: Vec<usize>) -> Option<(Blade, i64)> {
        let mut sign = 1;
        // insertion sort, counting transpositions
        for i in 1..indices.len() {
            let mut j = i;
            while j > 0 && indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((Blade(indices), sign))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

pub trait Kind: Clone + Copy + fmt::Debug + Send + Sync + 'static {
    fn basis_symbol(name: &str) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Contravariant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Covariant;

impl Kind for Contravariant {
    fn basis_symbol(name: &str) -> String {
        format!("∂{name}")
    }
}

impl Kind for Covariant {
    fn basis_symbol(name: &str) -> String {
        format!("d{name}")
    }
}

/// Homogeneous antisymmetric field of fixed degree.
#[derive(Clone, Debug)]
pub struct Field<K: Kind> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Blade, Expr>,
    kind: PhantomData<K>,
}

/// Degree-k antisymmetric contravariant field.
pub type Multivector = Field<Contravariant>;
/// Degree-k differential form.
pub type Form = Field<Covariant>;

impl<K: Kind> Field<K> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Field {
            dim,
            degree,
            terms: BTreeMap::new(),
            kind: PhantomData,
        }
    }

    pub fn scalar(dim: usize, f: Expr) -> Self {
        Self::from_terms(dim, 0, [(Vec::new(), f)])
    }

    /// Builds a field from possibly unsorted index lists; permutations are
    /// normalized with their sign and repeated indices dropped.
    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut acc: BTreeMap<Blade, Vec<Expr>> = BTreeMap::new();
        for (idx, coef) in terms {
            assert_eq!(idx.len(), degree, "term degree mismatch");
            assert!(idx.iter().all(|&i| i < dim), "index out of chart range");
            if coef.is_zero_literal() {
                continue;
            }
            if let Some((blade, sign)) = Blade::normalize(idx) {
                let c = if sign < 0 { -coef } else { coef };
                acc.entry(blade).or_default().push(c);
            }
        }
        let terms = acc
            .into_iter()
            .map(|(b, cs)| (b, Expr::sum(cs)))
            .filter(|(_, c)| !c.is_zero_literal())
            .collect();
        Field {
            dim,
            degree,
            terms,
            kind: PhantomData,
        }
    }

    /// Unit basis element, e.g. `basis(4, &[0, 2])` is ∂z1∧∂z3 (or dz1∧dz3).
    pub fn basis(dim: usize, indices: &[usize]) -> Self {
        Self::from_terms(dim, indices.len(), [(indices.to_vec(), Expr::one())])
    }

    /// Degree-1 field from its components.
    pub fn from_components(components: Vec<Expr>) -> Self {
        let dim = components.len();
        Self::from_terms(
            dim,
            1,
            components
                .into_iter()
                .enumerate()
                .map(|(i, c)| (vec![i], c)),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficients(&self) -> Vec<Expr> {
        self.terms.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No stored terms. Semantic zero tests go through [`crate::expr::is_zero_all`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient on an arbitrary index list, with permutation sign.
    pub fn get(&self, indices: &[usize]) -> Expr {
        match Blade::normalize(indices.to_vec()) {
            None => Expr::zero(),
            Some((blade, sign)) => match self.terms.get(&blade) {
                None => Expr::zero(),
                Some(c) if sign < 0 => -c,
                Some(c) => c.clone(),
            },
        }
    }

    /// Components of a degree-1 field.
    pub fn components(&self) -> Vec<Expr> {
        assert_eq!(self.degree, 1, "components() needs a degree-1 field");
        (0..self.dim).map(|i| self.get(&[i])).collect()
    }

    /// Coefficient of a degree-0 field.
    pub fn as_scalar(&self) -> Expr {
        assert_eq!(self.degree, 0, "as_scalar() needs a degree-0 field");
        self.get(&[])
    }

    /// Single coefficient of a top-degree field.
    pub fn top_coefficient(&self) -> Expr {
        assert_eq!(
            self.degree, self.dim,
            "top_coefficient() needs a top-degree field"
        );
        self.get(&(0..self.dim).collect::<Vec<_>>())
    }

    pub fn map_coefficients<F: FnMut(&Expr) -> Expr>(&self, mut f: F) -> Self {
        Self::from_terms(
            self.dim,
            self.degree,
            self.terms.iter().map(|(b, c)| (b.0.clone(), f(c))),
        )
    }

    pub fn scale(&self, f: &Expr) -> Self {
        self.map_coefficients(|c| c * f)
    }

    pub fn scale_num(&self, n: Number) -> Self {
        self.map_coefficients(|c| c.scale(n))
    }

    pub fn diff(&self, v: Var) -> Self {
        self.map_coefficients(|c| c.diff(v))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        algebra::wedge(self, other)
    }

    /// Coefficients evaluated at a point, keyed by blade.
    pub fn eval(
        &self,
        point: &[f64],
        time: f64,
    ) -> Result<BTreeMap<Blade, f64>, crate::expr::EvalError> {
        self.terms
            .iter()
            .map(|(b, c)| Ok((b.clone(), c.eval(point, time)?)))
            .collect()
    }

    pub fn display<'a>(&'a self, chart: &'a Chart) -> FieldDisplay<'a, K> {
        FieldDisplay { field: self, chart }
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let rhs = other
            .terms
            .iter()
            .map(|(b, c)| (b.0.clone(), if sign < 0 { -c } else { c.clone() }));
        Self::from_terms(
            self.dim,
            self.degree,
            self.terms
                .iter()
                .map(|(b, c)| (b.0.clone(), c.clone()))
                .chain(rhs),
        )
    }
}

impl Multivector {
    /// Directional derivative `X(f)` of a function along a vector field.
    pub fn apply(&self, f: &Expr) -> Expr {
        assert_eq!(self.degree, 1, "apply() needs a vector field");
        Expr::sum(self.terms.iter().map(|(b, c)| c * &f.d(b.0[0])))
    }
}

impl Form {
    /// Differential of a function as a 1-form.
    pub fn differential(dim: usize, f: &Expr) -> Form {
        Form::from_components((0..dim).map(|a| f.d(a)).collect())
    }
}

impl<K: Kind> Add for &Field<K> {
    type Output = Field<K>;
    fn add(self, rhs: &Field<K>) -> Field<K> {
        self.combine(rhs, 1)
    }
}

impl<K: Kind> Sub for &Field<K> {
    type Output = Field<K>;
    fn sub(self, rhs: &Field<K>) -> Field<K> {
        self.combine(rhs, -1)
    }
}

impl<K: Kind> Add for Field<K> {
    type Output = Field<K>;
    fn add(self, rhs: Field<K>) -> Field<K> {
        self.combine(&rhs, 1)
    }
}

impl<K: Kind> Sub for Field<K> {
    type Output = Field<K>;
    fn sub(self, rhs: Field<K>) -> Field<K> {
        self.combine(&rhs, -1)
    }
}

impl<K: Kind> Neg for &Field<K> {
    type Output = Field<K>;
    fn neg(self) -> Field<K> {
        self.map_coefficients(|c| -c)
    }
}

impl<K: Kind> Neg for Field<K> {
    type Output = Field<K>;
    fn neg(self) -> Field<K> {
        -&self
    }
}

pub struct FieldDisplay<'a, K: Kind> {
    field: &'a Field<K>,
    chart: &'a Chart,
}

impl<K: Kind> fmt::Display for FieldDisplay<'_, K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.field.terms.iter().map(|(blade, coef)| {
            let basis: Vec<String> = blade
                .0
                .iter()
                .map(|&a| K::basis_symbol(self.chart.name(a)))
                .collect();
            (basis.join("∧"), coef.clone())
        });
        write_linear_combination(f, terms, self.chart)
    }
}

/// Writes `Σ c_i B_i` with signs pulled out of the coefficients.
pub(crate) fn write_linear_combination<I>(
    f: &mut fmt::Formatter<'_>,
    terms: I,
    chart: &Chart,
) -> fmt::Result
where
    I: IntoIterator<Item = (String, Expr)>,
{
    let mut empty = true;
    for (i, (basis, coef)) in terms.into_iter().enumerate() {
        empty = false;
        let (num, _) = coef.split_coefficient();
        let negative = num.is_negative();
        let magnitude = if negative { -&coef } else { coef.clone() };
        match (i, negative) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        if basis.is_empty() {
            write!(f, "{}", magnitude.display(chart))?;
        } else if magnitude.is_one_literal() {
            f.write_str(&basis)?;
        } else if matches!(magnitude.node(), crate::expr::Node::Sum(_)) {
            write!(f, "({}) {basis}", magnitude.display(chart))?;
        } else {
            write!(f, "{} {basis}", magnitude.display(chart))?;
        }
    }
    if empty {
        f.write_str("0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blade_normalization_sign() {
        assert_eq!(Blade::normalize(vec![2, 0]), Some((Blade(vec![0, 2]), -1)));
        assert_eq!(
            Blade::normalize(vec![2, 0, 1]),
            Some((Blade(vec![0, 1, 2]), 1))
        );
        assert_eq!(Blade::normalize(vec![1, 1]), None);
    }

    #[test]
    fn permuted_insertion_and_lookup() {
        let w = Multivector::from_terms(4, 2, [(vec![2, 0], Expr::int(3))]);
        assert_eq!(w.get(&[0, 2]).as_number(), Some(Number::int(-3)));
        assert_eq!(w.get(&[2, 0]).as_number(), Some(Number::int(3)));
        assert!(w.get(&[1, 3]).is_zero_literal());
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let w = Multivector::from_terms(
            4,
            2,
            [(vec![0, 1], Expr::int(1)), (vec![1, 0], Expr::int(1))],
        );
        assert!(w.is_empty());
    }

    #[test]
    fn display() {
        let chart = Chart::standard(4).unwrap();
        let w = Multivector::from_terms(
            4,
            2,
            [
                (vec![0, 2], Expr::coord(0)),
                (vec![2, 3], Expr::int(-1)),
                (vec![1, 3], Expr::one()),
            ],
        );
        assert_eq!(
            w.display(&chart).to_string(),
            "z1 ∂z1∧∂z3 + ∂z2∧∂z4 - ∂z3∧∂z4"
        );
        let u = Form::from_components(vec![
            Expr::zero(),
            Expr::coord(1),
            Expr::zero(),
            Expr::zero(),
        ]);
        assert_eq!(u.display(&chart).to_string(), "z2 dz2");
    }
}
