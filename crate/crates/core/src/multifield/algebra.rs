use crate::expr::Expr;

use super::{Field, Kind, Multivector};

pub(super) fn wedge<K: Kind>(a: &Field<K>, b: &Field<K>) -> Field<K> {
    assert_eq!(a.dim, b.dim, "dimension mismatch");
    let degree = a.degree + b.degree;
    if degree > a.dim {
        return Field::zero(a.dim, degree);
    }
    let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            let mut idx = ia.0.clone();
            idx.extend_from_slice(&ib.0);
            terms.push((idx, ca * cb));
        }
    }
    Field::from_terms(a.dim, degree, terms)
}

/// Right derivative with respect to the odd variable of index `a`: the basis
/// element is moved to the far right and removed.
fn right_derivative(field: &Multivector, a: usize) -> Vec<(Vec<usize>, Expr)> {
    field
        .terms
        .iter()
        .filter_map(|(blade, c)| {
            let pos = blade.0.iter().position(|&i| i == a)?;
            let mut idx = blade.0.clone();
            idx.remove(pos);
            let after = blade.0.len() - 1 - pos;
            Some((idx, if after % 2 == 1 { -c } else { c.clone() }))
        })
        .collect()
}

fn push_products(
    out: &mut Vec<(Vec<usize>, Expr)>,
    left: &[(Vec<usize>, Expr)],
    right: &Multivector,
    sign: i64,
) {
    for (il, cl) in left {
        for (ir, cr) in &right.terms {
            let mut idx = il.clone();
            idx.extend_from_slice(&ir.0);
            let c = cl * cr;
            out.push((idx, if sign < 0 { -c } else { c }));
        }
    }
}

/// Schouten–Nijenhuis bracket of a p-vector and a q-vector, a
/// (p+q−1)-vector. On vector fields it is the Lie bracket, `[X, f] = X(f)`,
/// and `[X, A]` is the Lie derivative of `A` along `X`.
///
/// Two functions bracket to zero.
pub fn schouten(a: &Multivector, b: &Multivector) -> Multivector {
    assert_eq!(a.dim, b.dim, "dimension mismatch");
    let (p, q) = (a.degree, b.degree);
    if p + q == 0 {
        return Multivector::zero(a.dim, 0);
    }
    let degree = p + q - 1;
    if degree > a.dim {
        return Multivector::zero(a.dim, degree);
    }
    let swap_sign = if (p + 1) * (q + 1) % 2 == 1 { -1 } else { 1 };
    let mut out = Vec::new();
    for i in 0..a.dim {
        if p > 0 {
            push_products(
                &mut out,
                &right_derivative(a, i),
                &b.diff(crate::expr::Var::Coord(i)),
                1,
            );
        }
        if q > 0 {
            push_products(
                &mut out,
                &right_derivative(b, i),
                &a.diff(crate::expr::Var::Coord(i)),
                -swap_sign,
            );
        }
    }
    Multivector::from_terms(a.dim, degree, out)
}

/// Lie derivative of a multivector along a vector field, from the
/// coordinate rule `L_X ∂i = −Σb (∂i X^b) ∂b`.
pub fn lie_derivative(x: &Multivector, a: &Multivector) -> Multivector {
    assert_eq!(x.degree, 1, "lie_derivative needs a vector field");
    assert_eq!(x.dim, a.dim, "dimension mismatch");
    let xc = x.components();
    let mut out = Vec::new();
    for (blade, c) in &a.terms {
        out.push((blade.0.clone(), x.apply(c)));
        for s in 0..blade.0.len() {
            for (b, xb) in xc.iter().enumerate() {
                let dx = xb.d(blade.0[s]);
                if dx.is_zero_literal() {
                    continue;
                }
                let mut idx = blade.0.clone();
                idx[s] = b;
                out.push((idx, -(c * &dx)));
            }
        }
    }
    Multivector::from_terms(a.dim, a.degree, out)
}

/// Lie bracket of vector fields, `[X, Y]^b = X(Y^b) − Y(X^b)`.
pub fn lie_bracket(x: &Multivector, y: &Multivector) -> Multivector {
    assert!(
        x.degree == 1 && y.degree == 1,
        "lie_bracket needs vector fields"
    );
    let (xc, yc) = (x.components(), y.components());
    Multivector::from_components(
        xc.iter()
            .zip(&yc)
            .map(|(xb, yb)| x.apply(yb) - y.apply(xb))
            .collect(),
    )
}
