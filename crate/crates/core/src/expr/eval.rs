use std::fmt;

use thiserror::Error;

use super::{Expr, Func, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    /// Logarithm of a non-positive number or fractional power of a negative one.
    Domain,
    NonFinite,
    /// Point shorter than the highest referenced coordinate.
    MissingCoordinate,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::Domain => "argument outside the function domain",
            EvalErrorKind::NonFinite => "non-finite intermediate value",
            EvalErrorKind::MissingCoordinate => "point has too few coordinates",
        })
    }
}

/// Numeric evaluation failure, carrying the offending subtree.
#[derive(Debug, Error, Clone)]
#[error("{kind} in `{subtree}`")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subtree: Expr,
}

impl Expr {
    /// Evaluates at `point` (indexed by chart coordinate) and `time`.
    pub fn eval(&self, point: &[f64], time: f64) -> Result<f64, EvalError> {
        let err = |kind| EvalError {
            kind,
            subtree: self.clone(),
        };
        let v = match self.node() {
            Node::Num(n) => n.to_f64(),
            Node::Coord(i) => *point
                .get(*i)
                .ok_or_else(|| err(EvalErrorKind::MissingCoordinate))?,
            Node::Time => time,
            Node::Sum(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(point, time)?;
                }
                acc
            }
            Node::Product(factors) => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.eval(point, time)?;
                }
                acc
            }
            Node::Pow(base, e) => {
                let b = base.eval(point, time)?;
                if b == 0.0 && *e.numer() < 0 {
                    return Err(err(EvalErrorKind::DivisionByZero));
                }
                if e.is_integer() {
                    let k = *e.numer();
                    if let Ok(k) = i32::try_from(k) {
                        b.powi(k)
                    } else {
                        b.powf(k as f64)
                    }
                } else {
                    if b < 0.0 {
                        return Err(err(EvalErrorKind::Domain));
                    }
                    b.powf(*e.numer() as f64 / *e.denom() as f64)
                }
            }
            Node::Func(func, arg) => {
                let a = arg.eval(point, time)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(err(EvalErrorKind::Domain));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(EvalErrorKind::NonFinite))
        }
    }
}
