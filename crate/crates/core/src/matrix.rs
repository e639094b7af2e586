//! Square matrices of expressions and small numeric spectral helpers.

use nalgebra::{Complex, DMatrix};

use crate::expr::{EvalError, Expr, Var};

/// Dense square matrix with expression entries, row-major.
#[derive(Clone, Debug)]
pub struct ExprMatrix {
    n: usize,
    entries: Vec<Expr>,
}

impl ExprMatrix {
    pub fn from_fn<F: FnMut(usize, usize) -> Expr>(n: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                entries.push(f(a, b));
            }
        }
        ExprMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, |_, _| Expr::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |a, b| if a == b { Expr::one() } else { Expr::zero() })
    }

    pub fn from_rows(rows: &[Vec<Expr>]) -> Self {
        Self::from_fn(rows.len(), |a, b| rows[a][b].clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> &Expr {
        &self.entries[a * self.n + b]
    }

    pub fn entries(&self) -> &[Expr] {
        &self.entries
    }

    /// `(row, column, entry)` for every entry that is not literally zero.
    pub fn nonzero(&self) -> Vec<(usize, usize, &Expr)> {
        (0..self.n)
            .flat_map(|a| (0..self.n).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, self.get(a, b)))
            .filter(|(_, _, e)| !e.is_zero_literal())
            .collect()
    }

    pub fn map<F: FnMut(&Expr) -> Expr>(&self, f: F) -> Self {
        ExprMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |a, b| self.get(b, a).clone())
    }

    pub fn diff(&self, v: Var) -> Self {
        self.map(|e| e.diff(v))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "size mismatch");
        Self::from_fn(self.n, |a, b| {
            Expr::sum((0..self.n).map(|c| self.get(a, c) * other.get(c, b)))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "size mismatch");
        Self::from_fn(self.n, |a, b| self.get(a, b) + other.get(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "size mismatch");
        Self::from_fn(self.n, |a, b| self.get(a, b) - other.get(a, b))
    }

    pub fn trace(&self) -> Expr {
        Expr::sum((0..self.n).map(|a| self.get(a, a).clone()))
    }

    /// `Tr(M^k)` for `k = 1..=kmax`.
    pub fn power_traces(&self, kmax: usize) -> Vec<Expr> {
        let mut out = Vec::with_capacity(kmax);
        let mut power = self.clone();
        for k in 1..=kmax {
            if k > 1 {
                power = power.mul(self);
            }
            out.push(power.trace());
        }
        out
    }

    pub fn eval(&self, point: &[f64], time: f64) -> Result<DMatrix<f64>, EvalError> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                m[(a, b)] = self.get(a, b).eval(point, time)?;
            }
        }
        Ok(m)
    }
}

/// Sorts by real part, then imaginary part.
pub fn sort_complex(values: &mut [Complex<f64>]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Eigenvalues of a real square matrix, sorted.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let mut ev: Vec<Complex<f64>> = m.clone().complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut ev);
    ev
}

/// Groups sorted values lying within `tol` of a cluster's first member.
/// Returns `(representative, multiplicity)` pairs.
pub fn cluster(values: &[Complex<f64>], tol: f64) -> Vec<(Complex<f64>, usize)> {
    let mut out: Vec<(Complex<f64>, usize)> = Vec::new();
    for &v in values {
        match out
            .iter_mut()
            .find(|(c, _)| (c - v).norm() <= tol * (1.0 + c.norm()))
        {
            Some((_, m)) => *m += 1,
            None => out.push((v, 1)),
        }
    }
    out
}

/// Roots of the monic polynomial `c^n + coeffs[0] c^{n-1} + … + coeffs[n-1]`,
/// sorted by real then imaginary part.
pub fn monic_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len();
    let mut roots = match n {
        0 => Vec::new(),
        1 => vec![Complex::new(-coeffs[0], 0.0)],
        2 => {
            let (b, c) = (coeffs[0], coeffs[1]);
            let disc = b * b - 4.0 * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
                let q = -0.5 * (b + sgn * s);
                if q == 0.0 {
                    vec![Complex::new(0.0, 0.0); 2]
                } else {
                    vec![Complex::new(q, 0.0), Complex::new(c / q, 0.0)]
                }
            } else {
                let s = (-disc).sqrt();
                vec![
                    Complex::new(-b / 2.0, -s / 2.0),
                    Complex::new(-b / 2.0, s / 2.0),
                ]
            }
        }
        _ => {
            let mut comp = DMatrix::zeros(n, n);
            for j in 0..n {
                comp[(0, j)] = -coeffs[j];
            }
            for i in 1..n {
                comp[(i, i - 1)] = 1.0;
            }
            comp.complex_eigenvalues().iter().copied().collect()
        }
    };
    sort_complex(&mut roots);
    roots
}

/// Elementary symmetric polynomials `e_1..e_n` of the given values.
pub fn elementary_symmetric(values: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut e = vec![Complex::new(0.0, 0.0); values.len() + 1];
    e[0] = Complex::new(1.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] = e[k] + e[k - 1] * v;
        }
    }
    e.remove(0);
    e
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
