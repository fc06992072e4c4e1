use crate::rational::{self, Rational};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

/// A probability (or expectation) tagged with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    /// Exact rational.
    Exact(Rational),
    /// Closed form evaluated in floating point (e.g. regularized incomplete beta).
    Real(f64),
    /// Seeded Monte Carlo estimate.
    Estimate { value: f64, std_err: f64 },
}

impl Value {
    pub fn zero() -> Value {
        Value::Exact(rational::zero())
    }

    pub fn one() -> Value {
        Value::Exact(rational::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational::to_f64(r),
            Value::Real(x) => *x,
            Value::Estimate { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn std_err(&self) -> f64 {
        match self {
            Value::Estimate { std_err, .. } => *std_err,
            _ => 0.0,
        }
    }

    /// Exact comparison when both sides are rational, float comparison otherwise.
    pub fn cmp_value(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            _ => self.to_f64() == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_one(),
            _ => self.to_f64() >= 1.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Exact(r) => *r > rational::zero(),
            _ => self.to_f64() > 0.0,
        }
    }

    pub fn ge_half(&self) -> bool {
        match self {
            Value::Exact(r) => *r >= rational::half(),
            _ => self.to_f64() >= 0.5,
        }
    }

    pub fn gt_half(&self) -> bool {
        match self {
            Value::Exact(r) => *r > rational::half(),
            _ => self.to_f64() > 0.5,
        }
    }

    /// `1 - self`.
    pub fn complement(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(rational::one() - r),
            Value::Real(x) => Value::Real(1.0 - x),
            Value::Estimate { value, std_err } => Value::Estimate {
                value: 1.0 - value,
                std_err: *std_err,
            },
        }
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            (Value::Estimate { .. }, _) | (_, Value::Estimate { .. }) => {
                // relative errors add in quadrature
                let (a, b) = (self.to_f64(), other.to_f64());
                let se = ((self.std_err() * b).powi(2) + (other.std_err() * a).powi(2)).sqrt();
                Value::Estimate {
                    value: a * b,
                    std_err: se,
                }
            }
            _ => Value::Real(self.to_f64() * other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Real(self.to_f64() - other.to_f64()),
        }
    }

    /// `self / other`, or `None` when `other` is zero.
    pub fn div(&self, other: &Value) -> Option<Value> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a / b),
            _ => Value::Real(self.to_f64() / other.to_f64()),
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&rational::format(r)),
            Value::Real(x) => write!(f, "{}", format_sig(*x, 12)),
            Value::Estimate { value, std_err } => {
                write!(f, "{} ± {}", format_sig(*value, 6), format_sig(*std_err, 2))
            }
        }
    }
}

/// Decimal string with `digits` significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Value::Exact(frac(2, 3));
        let b = Value::Exact(frac(3, 4));
        assert_eq!(a.mul(&b), Value::Exact(frac(1, 2)));
        assert_eq!(a.complement(), Value::Exact(frac(1, 3)));
        assert_eq!(a.div(&b), Some(Value::Exact(frac(8, 9))));
        assert!(a.div(&Value::zero()).is_none());
    }

    #[test]
    fn mixed_comparison() {
        assert_eq!(
            Value::Exact(frac(1, 2)).cmp_value(&Value::Real(0.4)),
            Ordering::Greater
        );
        assert!(Value::Exact(frac(1, 2)).ge_half());
        assert!(!Value::Exact(frac(1, 2)).gt_half());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(2.0 / 11.0, 12), "0.181818181818");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.000123456, 3), "0.000123");
    }
}
