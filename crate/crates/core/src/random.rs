//! Seeded random expressions and fields for property testing.
//!
//! Generated expressions are smooth and defined everywhere (polynomials,
//! `sin`, `cos`, `exp` of bounded-degree arguments), so sampled identities
//! never hit evaluation errors.

use rand::Rng;

use crate::expr::{Expr, Func};
use crate::multifield::{Field, Kind};

/// Random smooth expression in `dim` coordinates, nested at most `depth` deep.
pub fn expr<R: Rng>(rng: &mut R, dim: usize, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, dim);
    }
    match rng.gen_range(0..5) {
        0 => expr(rng, dim, depth - 1) + expr(rng, dim, depth - 1),
        1 => expr(rng, dim, depth - 1) * expr(rng, dim, depth - 1),
        2 => Expr::powi(expr(rng, dim, depth - 1), rng.gen_range(2..=3)),
        3 => {
            let f = [Func::Sin, Func::Cos, Func::Exp][rng.gen_range(0..3)];
            Expr::apply(f, leaf(rng, dim) + leaf(rng, dim))
        }
        _ => expr(rng, dim, depth - 1) - expr(rng, dim, depth - 1),
    }
}

fn leaf<R: Rng>(rng: &mut R, dim: usize) -> Expr {
    if rng.gen_bool(0.7) {
        Expr::coord(rng.gen_range(0..dim))
    } else {
        Expr::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
    }
}

/// Random field of the given degree; each basis blade is populated with
/// probability `density`.
pub fn field<K: Kind, R: Rng>(
    rng: &mut R,
    dim: usize,
    degree: usize,
    density: f64,
    depth: usize,
) -> Field<K> {
    let mut terms = Vec::new();
    for b in blades(dim, degree) {
        if rng.gen_bool(density) {
            let c = expr(rng, dim, depth);
            terms.push((b, c));
        }
    }
    Field::from_terms(dim, degree, terms)
}

/// All strictly increasing index lists of length `k` below `n`.
pub fn blades(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn blade_counts_are_binomial() {
        assert_eq!(blades(4, 2).len(), 6);
        assert_eq!(blades(6, 3).len(), 20);
        assert_eq!(blades(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn generated_expressions_evaluate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = expr(&mut rng, 4, 3);
            assert!(e.eval(&[0.3, -0.2, 0.9, -1.0], 0.0).is_ok(), "{e}");
        }
    }
}
