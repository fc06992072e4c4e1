//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    frac(1, 2)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator beyond f64 range: fall back to a scaled quotient
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite float (dyadic expansion).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `"p/q"`, integers, and decimal literals such as `"0.65"`, `"-1.5e-3"` exactly.
pub fn parse(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| format!("bad numerator in {t:?}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| format!("bad denominator in {t:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(t).ok_or_else(|| format!("not a rational or decimal: {t:?}"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{whole}{fraction}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - fraction.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Canonical text form: `"p/q"` or `"p"`.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= one()
}

pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/10").unwrap(), frac(3, 10));
        assert_eq!(parse("0.3").unwrap(), frac(3, 10));
        assert_eq!(parse("0.65").unwrap(), frac(13, 20));
        assert_eq!(parse("1").unwrap(), one());
        assert_eq!(parse("1.0").unwrap(), one());
        assert_eq!(parse(".5").unwrap(), half());
        assert_eq!(parse("-2.5e-1").unwrap(), frac(-1, 4));
        assert_eq!(parse("1e-3").unwrap(), frac(1, 1000));
        assert_eq!(parse(" 6/8 ").unwrap(), frac(3, 4));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("0.3.4").is_err());
        assert!(parse(".").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format(&frac(2, 11)), "2/11");
        assert_eq!(format(&int(1)), "1");
        assert_eq!(format(&frac(4, 8)), "1/2");
    }
}
