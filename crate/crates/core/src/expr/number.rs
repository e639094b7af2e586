use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, ToPrimitive, Zero};

/// Numeric literal: exact rational when possible, IEEE double otherwise.
///
/// Rational arithmetic silently degrades to floating point on `i64` overflow.
#[derive(Clone, Copy, Debug)]
pub enum Number {
    Rational(Rational64),
    Float(f64),
}

impl Number {
    pub const ZERO: Number = Number::Rational(Rational64::new_raw(0, 1));
    pub const ONE: Number = Number::Rational(Rational64::new_raw(1, 1));

    pub fn int(v: i64) -> Self {
        Number::Rational(Rational64::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Number::Rational(Rational64::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(f) => f,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Float(f) => f == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Float(f) => f == 1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Float(f) => f < 0.0,
        }
    }

    pub fn as_rational(self) -> Option<Rational64> {
        match self {
            Number::Rational(r) => Some(r),
            Number::Float(_) => None,
        }
    }

    pub fn abs(self) -> Number {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    /// `None` for zero.
    pub fn recip(self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Number::Rational(r) => Number::Rational(r.recip()),
            Number::Float(f) => Number::Float(1.0 / f),
        })
    }

    /// Raises to a rational power. Returns `None` when the result is not a
    /// finite real number (0 to a negative power, even root of a negative).
    pub fn pow(self, exp: Rational64) -> Option<Number> {
        if exp.is_integer() {
            let e = *exp.numer();
            if let Number::Rational(r) = self {
                if let Some(v) = checked_rational_powi(r, e) {
                    return Some(Number::Rational(v));
                }
            }
            let v = self
                .to_f64()
                .powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
            return v.is_finite().then_some(Number::Float(v));
        }
        let base = self.to_f64();
        if base < 0.0 {
            return None;
        }
        let v = base.powf(exp.to_f64()?);
        v.is_finite().then_some(Number::Float(v))
    }

    /// Total order by numeric value; ties broken with rationals first.
    pub fn total_cmp(&self, other: &Number) -> Ordering {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()).then_with(|| {
                let rank = |n: &Number| matches!(n, Number::Float(_)) as u8;
                rank(self).cmp(&rank(other))
            }),
        }
    }
}

fn checked_rational_powi(base: Rational64, e: i64) -> Option<Rational64> {
    if e < 0 {
        if base.is_zero() {
            return None;
        }
        return checked_rational_powi(base.recip(), e.checked_neg()?);
    }
    let mut acc = Rational64::one();
    for _ in 0..e {
        acc = acc.checked_mul(&base)?;
    }
    Some(acc)
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Float(v) => write!(f, "{v:?}"),
        }
    }
}

impl std::ops::Add for Number {
    type Output = Number;

    fn add(self, other: Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => match a.checked_add(&b) {
                Some(r) => Number::Rational(r),
                None => Number::Float(self.to_f64() + other.to_f64()),
            },
            _ => Number::Float(self.to_f64() + other.to_f64()),
        }
    }
}

impl std::ops::Mul for Number {
    type Output = Number;

    fn mul(self, other: Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => match a.checked_mul(&b) {
                Some(r) => Number::Rational(r),
                None => Number::Float(self.to_f64() * other.to_f64()),
            },
            _ => Number::Float(self.to_f64() * other.to_f64()),
        }
    }
}

impl std::ops::Neg for Number {
    type Output = Number;

    fn neg(self) -> Number {
        match self {
            Number::Rational(r) => match r.numer().checked_neg() {
                Some(n) => Number::Rational(Rational64::new_raw(n, *r.denom())),
                None => Number::Float(-self.to_f64()),
            },
            Number::Float(f) => Number::Float(-f),
        }
    }
}
