//! Exact rationals and the fixed-point machinery used for irrational powers.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always normalized (lowest terms, positive
/// denominator) by `num-rational`.
pub type Rational = num_rational::BigRational;

/// Fractional bits carried by every non-exact power evaluation. Output is
/// rendered at f64 precision (53 bits), so this leaves 75 guard bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, an integer, or a plain decimal literal (`0.2`, `.25`, `3.`)
/// into an exact rational. Decimals become fractions over a power of ten.
pub fn parse_rational(token: &str) -> Result<Rational, String> {
    let token = token.trim();
    if token.is_empty() {
        return Err("empty number".into());
    }
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token.strip_prefix('+').unwrap_or(token)),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num).ok_or_else(|| format!("invalid numerator in `{token}`"))?;
        let den = parse_digits(den).ok_or_else(|| format!("invalid denominator in `{token}`"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{token}`"));
        }
        Rational::new(num, den)
    } else {
        let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
        if whole.is_empty() && frac.is_empty() {
            return Err(format!("invalid number `{token}`"));
        }
        let digits = format!("{whole}{frac}");
        let mantissa = parse_digits(&digits).ok_or_else(|| format!("invalid decimal `{token}`"))?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        Rational::new(mantissa, scale)
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `num/den`, including a `/1` denominator for integers.
pub fn fmt_exact(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Positional decimal rendering rounded (half away from zero) to `digits`
/// significant digits, computed from the exact value.
pub fn fmt_decimal(r: &Rational, digits: usize) -> String {
    assert!(digits > 0);
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.abs();

    let mut exp10 = decimal_exponent(&a);
    let mut mantissa = round_half_up(&(a.clone() * pow10(digits as i64 - 1 - exp10)));
    if mantissa == num_traits::pow(BigInt::from(10u32), digits) {
        exp10 += 1;
        mantissa = round_half_up(&(a * pow10(digits as i64 - 1 - exp10)));
    }

    let m = mantissa.to_string();
    let body = if exp10 >= 0 {
        let int_len = exp10 as usize + 1;
        if int_len >= m.len() {
            format!("{m}{}", "0".repeat(int_len - m.len()))
        } else {
            format!("{}.{}", &m[..int_len], &m[int_len..])
        }
    } else {
        format!("0.{}{m}", "0".repeat((-exp10 - 1) as usize))
    };
    format!("{sign}{body}")
}

fn pow10(e: i64) -> Rational {
    let p = Rational::from_integer(num_traits::pow(BigInt::from(10u32), e.unsigned_abs() as usize));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// floor(log10(a)) for a > 0.
fn decimal_exponent(a: &Rational) -> i64 {
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    while pow10(e) > *a {
        e -= 1;
    }
    while pow10(e + 1) <= *a {
        e += 1;
    }
    e
}

fn round_half_up(x: &Rational) -> BigInt {
    let doubled = x * int(2) + int(1);
    doubled.numer().div_floor(&(doubled.denom() * BigInt::from(2)))
}

/// `x^exp` for `x >= 0`.
///
/// Integer exponents are exact. Otherwise the result is the largest multiple
/// of `2^-bits` not exceeding the true value: with `exp = a/b`, the b-th
/// integer root of `floor(x^a * 2^(b*bits))` is taken, which is exactly
/// `floor(x^(a/b) * 2^bits)`. Returns `None` for `0` raised to a
/// non-positive power.
pub fn pow_rational(x: &Rational, exp: &Rational, bits: u32) -> Option<Rational> {
    assert!(!x.is_negative(), "pow_rational on a negative base");
    if x.is_zero() {
        return exp.is_positive().then(Rational::zero);
    }
    if exp.is_zero() {
        return Some(Rational::one());
    }
    let a = exp.numer().abs().to_u32().expect("exponent numerator too large");
    let b = exp.denom().to_u32().expect("exponent denominator too large");
    let base = if exp.is_negative() { x.recip() } else { x.clone() };
    let powered = num_traits::pow(base, a as usize);
    if b == 1 {
        return Some(powered);
    }
    let num = to_biguint(powered.numer());
    let den = to_biguint(powered.denom());
    let scaled = (num << (u64::from(b) * u64::from(bits))) / den;
    let root = scaled.nth_root(b);
    Some(Rational::new(BigInt::from_biguint(Sign::Plus, root), BigInt::one() << bits))
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("non-negative integer")
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rounds an arbitrary rational down onto the `2^-bits` grid so repeated
/// high-precision arithmetic keeps bounded denominators.
pub fn truncate_bits(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_rational("0.2").unwrap(), ratio(1, 5));
        assert_eq!(parse_rational("0.6").unwrap(), ratio(3, 5));
        assert_eq!(parse_rational(".25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("3.").unwrap(), int(3));
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn malformed_numbers_are_rejected() {
        for bad in ["", ".", "1/0", "a", "1/2/3", "0.2.1", "1e3", "/3", "3/"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_formatting_keeps_unit_denominator() {
        assert_eq!(fmt_exact(&int(1)), "1/1");
        assert_eq!(fmt_exact(&ratio(54, 55)), "54/55");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(fmt_decimal(&ratio(54, 55), 12), "0.981818181818");
        assert_eq!(fmt_decimal(&int(1), 12), "1.00000000000");
        assert_eq!(fmt_decimal(&ratio(2, 3), 3), "0.667");
        assert_eq!(fmt_decimal(&ratio(1, 55), 4), "0.01818");
        assert_eq!(fmt_decimal(&ratio(9999, 1000), 3), "10.0");
        assert_eq!(fmt_decimal(&int(123456), 3), "123000");
        assert_eq!(fmt_decimal(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(fmt_decimal(&Rational::zero(), 5), "0");
    }

    #[test]
    fn integer_powers_are_exact() {
        let x = ratio(2, 3);
        assert_eq!(pow_rational(&x, &int(2), 64).unwrap(), ratio(4, 9));
        assert_eq!(pow_rational(&x, &int(-1), 64).unwrap(), ratio(3, 2));
        assert_eq!(pow_rational(&Rational::zero(), &ratio(1, 2), 64).unwrap(), Rational::zero());
        assert!(pow_rational(&Rational::zero(), &int(-1), 64).is_none());
    }

    #[test]
    fn fractional_powers_bracket_the_true_value() {
        let bits = 100;
        let ulp = Rational::new(BigInt::one(), BigInt::one() << bits);
        // sqrt(1/4) is exactly representable
        assert_eq!(pow_rational(&ratio(1, 4), &ratio(1, 2), bits).unwrap(), ratio(1, 2));
        // (2/7)^(3/5): check floor property via the 5th power
        let x = ratio(2, 7);
        let e = ratio(3, 5);
        let lo = pow_rational(&x, &e, bits).unwrap();
        let hi = &lo + &ulp;
        let target = num_traits::pow(x, 3);
        assert!(num_traits::pow(lo, 5) <= target);
        assert!(num_traits::pow(hi, 5) > target);
    }

    #[test]
    fn fractional_power_matches_float() {
        let v = pow_rational(&ratio(3, 1000), &ratio(1, 32), 128).unwrap();
        let f = (0.003f64).powf(1.0 / 32.0);
        assert!((to_f64(&v) - f).abs() < 1e-15);
    }
}
