//! Exact rational arithmetic helpers.
//!
//! Probabilities, rewards and values are carried as `BigRational` and only
//! converted to floating point at serialization boundaries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Tolerance used when a rational is compared against a decimal target.
pub const TOLERANCE: f64 = 1e-9;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn close_to(q: &Rat, target: f64) -> bool {
    (to_f64(q) - target).abs() <= TOLERANCE
}

pub fn in_unit_interval(q: &Rat) -> bool {
    !q.is_negative() && *q <= Rat::one()
}

/// Parses `12`, `-0.85`, `.5` or `17/20`.
pub fn parse(text: &str) -> Option<Rat> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num: BigInt = parse_digits(num)?;
        let den: BigInt = parse_digits(den)?;
        if den.is_zero() {
            return None;
        }
        Rat::new(num, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if whole.is_empty() && frac.is_empty() {
            return None;
        }
        let whole = if whole.is_empty() { BigInt::zero() } else { parse_digits(whole)? };
        let frac_num = if frac.is_empty() { BigInt::zero() } else { parse_digits(frac)? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Rat::new(whole * &scale + frac_num, scale)
    } else {
        Rat::from_integer(parse_digits(body)?)
    };
    Some(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Renders exactly: a terminating decimal when the denominator only has the
/// prime factors 2 and 5, `p/q` otherwise.
pub fn render(q: &Rat) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let digits = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (q * Rat::from_integer(scale.clone())).to_integer();
    let negative = scaled.is_negative();
    let magnitude = scaled.abs().to_string();
    let padded = format!("{:0>width$}", magnitude, width = digits + 1);
    let (whole, frac) = padded.split_at(padded.len() - digits);
    format!("{}{}.{}", if negative { "-" } else { "" }, whole, frac)
}

/// Exponentiation by a non-negative integer.
pub fn pow(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse("0.85"), Some(ratio(17, 20)));
        assert_eq!(parse("-100"), Some(int(-100)));
        assert_eq!(parse("17/20"), Some(ratio(17, 20)));
        assert_eq!(parse(".5"), Some(ratio(1, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("-"), None);
        assert_eq!(parse("1.2.3"), None);
    }

    #[test]
    fn renders_exactly() {
        assert_eq!(render(&ratio(17, 20)), "0.85");
        assert_eq!(render(&ratio(-17, 40)), "-0.425");
        assert_eq!(render(&ratio(1, 3)), "1/3");
        assert_eq!(render(&int(-45)), "-45");
        assert_eq!(render(&ratio(3, 40)), "0.075");
        assert_eq!(render(&ratio(-1, 20)), "-0.05");
    }

    #[test]
    fn render_parse_round_trip() {
        for (n, d) in [(1, 3), (-7, 8), (0, 1), (123, 1000), (-5, 6)] {
            let q = ratio(n, d);
            assert_eq!(parse(&render(&q)), Some(q));
        }
    }
}
