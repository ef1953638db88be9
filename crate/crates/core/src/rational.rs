//! Exact rational numbers and their text forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, UfgError};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `-12`, `3.25`, `1.5e-3` or `7/8` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || UfgError::Input(format!("not a number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let p = pow10(scale.unsigned_abs() as u32);
    Ok(if scale >= 0 {
        Rational::from_integer(num * p)
    } else {
        Rational::new(num, p)
    })
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `p/q` in lowest terms, or `p` when the denominator is one.
pub fn fraction_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering rounded (half away from zero) to `sig` significant digits,
/// without exponent and with trailing zeros removed.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.numer().abs();
    let b = r.denom().clone();
    let below = |e: i64| -> bool {
        // a/b < 10^e
        if e >= 0 {
            a < &b * pow10(e as u32)
        } else {
            &a * pow10((-e) as u32) < b
        }
    };
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    while below(e) {
        e -= 1;
    }
    while !below(e + 1) {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let (n, d) = if shift >= 0 {
        (&a * pow10(shift as u32), b.clone())
    } else {
        (a.clone(), &b * pow10((-shift) as u32))
    };
    let (mut q, rem) = n.div_rem(&d);
    if rem * 2 >= d {
        q += 1;
    }
    if q == pow10(sig as u32) {
        q = pow10(sig as u32 - 1);
        e += 1;
    }
    let digits = q.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let point = e + 1;
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-point) as usize));
        out.push_str(&digits);
    } else if point as usize >= digits.len() {
        out.push_str(&digits);
        out.extend(std::iter::repeat('0').take(point as usize - digits.len()));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("1805").unwrap(), int(1805));
        assert_eq!(parse_rational("-3.25").unwrap(), ratio(-13, 4));
        assert_eq!(parse_rational("1.5e-3").unwrap(), ratio(3, 2000));
        assert_eq!(parse_rational("2e2").unwrap(), int(200));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("6/8").unwrap(), ratio(3, 4));
        for bad in ["", "-", "1.2.3", "abc", "1/0", "3e", "1,5"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(5, 3), 15), "1.66666666666667");
        assert_eq!(to_decimal(&ratio(2, 3), 15), "0.666666666666667");
        assert_eq!(to_decimal(&int(0), 15), "0");
        assert_eq!(to_decimal(&int(120), 15), "120");
        assert_eq!(to_decimal(&ratio(-1, 8), 15), "-0.125");
        assert_eq!(to_decimal(&ratio(1, 3000), 3), "0.000333");
        assert_eq!(to_decimal(&ratio(9999, 10000), 3), "1");
        assert_eq!(to_decimal(&int(123456), 3), "123000");
    }

    #[test]
    fn fraction_forms() {
        assert_eq!(fraction_string(&ratio(4, 6)), "2/3");
        assert_eq!(fraction_string(&int(-7)), "-7");
    }
}
