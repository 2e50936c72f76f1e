//! Exact rational recovery for probabilities.
//!
//! Probabilities enter the crate either as rationals (exact by definition)
//! or as `f64`s whose shortest decimal representation is re-parsed into a
//! rational. A jump law gets an exact representation only when the recovered
//! rationals sum to exactly 1; otherwise exact-mode operations refuse it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Parses a plain decimal literal (`-12.34e-5` style) into an exact rational.
pub fn decimal_rational(text: &str) -> Option<BigRational> {
    let (mantissa, exp10) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = text[pos + 1..].parse().ok()?;
            (&text[..pos], exp)
        }
        None => (text, 0i64),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits: String = [int_part, frac_part].concat();
    if digits.is_empty() || frac_part.contains(['+', '-']) {
        return None;
    }
    let numer: BigInt = digits.parse().ok()?;
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let ratio = if scale >= 0 {
        BigRational::from_integer(numer * ten.pow(scale as u32))
    } else {
        BigRational::new(numer, ten.pow((-scale) as u32))
    };
    Some(ratio)
}

/// Recovers the rational named by a float's shortest decimal form.
///
/// `0.7_f64` displays as `"0.7"` and maps to `7/10`, not to the dyadic
/// value the float actually stores. Returns `None` for non-finite inputs.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    decimal_rational(&format!("{x}"))
}

/// Float shadow of a rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// True iff the rationals sum to exactly 1.
pub fn sums_to_one(values: &[BigRational]) -> bool {
    let total: BigRational = values.iter().fold(BigRational::zero(), |acc, v| acc + v);
    total.is_one()
}
