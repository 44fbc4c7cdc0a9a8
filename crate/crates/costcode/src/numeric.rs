//! Exact-rational helpers: decimal-literal parsing and conversions that stay
//! correct when numerators and denominators outgrow `f64`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses a plain decimal literal ("0.25", "1", "2.5") into an exact rational.
///
/// Scientific notation is rejected; the config formats carry probabilities and
/// costs as plain decimals so they can be represented exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::InvalidInput(format!("empty decimal literal: {s:?}")));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(Error::InvalidInput(format!(
            "not a plain decimal literal: {s:?}"
        )));
    }
    let mut digits = String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let numer: BigUint = digits
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad decimal literal: {s:?}")))?;
    let denom = BigUint::from(10u32).pow(frac_part.len() as u32);
    let mut value = BigRational::new(BigInt::from(numer), BigInt::from(denom));
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Converts a ratio of (possibly huge) non-negative integers to `f64` without
/// overflowing intermediate conversions.
pub fn big_ratio_to_f64(numer: &BigUint, denom: &BigUint) -> f64 {
    assert!(!denom.is_zero(), "ratio denominator is zero");
    if numer.is_zero() {
        return 0.0;
    }
    // Keep ~64 significant bits of each side and track the stripped exponent.
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n_top = (numer >> (shift_n as u64)).to_u64().expect("shifted to 64 bits") as f64;
    let d_top = (denom >> (shift_d as u64)).to_u64().expect("shifted to 64 bits") as f64;
    let exp = (shift_n - shift_d) as i32;
    (n_top / d_top) * 2f64.powi(exp)
}

/// `f64` value of an exact non-negative rational, robust to huge terms.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let numer = r.numer().magnitude();
    let denom = r.denom().magnitude();
    if numer.is_zero() {
        return 0.0;
    }
    sign * big_ratio_to_f64(numer, denom)
}

/// Base-2 logarithm of an exact positive rational, accurate to ~1e-14 even
/// when the value underflows `f64`.
pub fn log2_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive rational");
    let numer = r.numer().magnitude();
    let denom = r.denom().magnitude();
    log2_biguint(numer) - log2_biguint(denom)
}

fn log2_biguint(v: &BigUint) -> f64 {
    debug_assert!(!v.is_zero());
    let bits = v.bits();
    if bits <= 53 {
        return (v.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 53;
    let top = (v >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

/// Exact rational equal to the given finite `f64`.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// True if the rational is exactly one.
pub fn is_one(r: &BigRational) -> bool {
    r.is_one()
}
