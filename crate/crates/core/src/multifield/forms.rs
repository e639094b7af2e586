use crate::expr::Expr;

use super::{Form, Multivector};

/// Exterior derivative.
pub fn exterior_d(u: &Form) -> Form {
    let mut out = Vec::new();
    for (blade, c) in &u.terms {
        for a in 0..u.dim {
            if blade.0.contains(&a) {
                continue;
            }
            let dc = c.d(a);
            if dc.is_zero_literal() {
                continue;
            }
            let mut idx = Vec::with_capacity(blade.0.len() + 1);
            idx.push(a);
            idx.extend_from_slice(&blade.0);
            out.push((idx, dc));
        }
    }
    Form::from_terms(u.dim, u.degree + 1, out)
}

/// Interior product `i_X u`, contracting the first slot. Zero on functions.
pub fn interior_product(x: &Multivector, u: &Form) -> Form {
    assert_eq!(x.degree, 1, "interior_product needs a vector field");
    assert_eq!(x.dim, u.dim, "dimension mismatch");
    if u.degree == 0 {
        return Form::zero(u.dim, 0);
    }
    let mut out = Vec::new();
    for (blade, c) in &u.terms {
        for (s, &i) in blade.0.iter().enumerate() {
            let xi = x.get(&[i]);
            if xi.is_zero_literal() {
                continue;
            }
            let mut idx = blade.0.clone();
            idx.remove(s);
            let term = c * &xi;
            out.push((idx, if s % 2 == 1 { -term } else { term }));
        }
    }
    Form::from_terms(u.dim, u.degree - 1, out)
}

/// Lie derivative of a form, `L_X = i_X d + d i_X`.
pub fn lie_derivative_form(x: &Multivector, u: &Form) -> Form {
    if u.degree == 0 {
        return Form::scalar(u.dim, x.apply(&u.as_scalar()));
    }
    interior_product(x, &exterior_d(u)) + exterior_d(&interior_product(x, u))
}

/// Pairing of a 1-form with a vector field.
pub fn pair(u: &Form, x: &Multivector) -> Expr {
    interior_product(x, u).as_scalar()
}
