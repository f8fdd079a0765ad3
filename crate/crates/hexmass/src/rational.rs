//! Exact rational scalars.
//!
//! All derivation-time arithmetic (weight tensors, reference mass matrices,
//! metric expansions) runs over arbitrary-precision rationals; results are
//! converted to `f64` once, when a rule or matrix is handed to runtime code.
//! Emitted tables always serialize rationals as `"num/den"` strings.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact representation of a finite `f64` (every finite double is a dyadic
/// rational). Panics on NaN/infinity.
pub fn rat_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("non-finite coordinate")
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Canonical table form `"num/den"`, e.g. `"128/27"`, `"0/1"`.
pub fn rat_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn rat_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// Parses a decimal literal with optional exponent ("2", "-0.125", "1.5e-2")
/// into the exact rational it denotes.
pub fn rat_from_decimal_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().ok()?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!(
        "{}{}{}",
        if int_part == "-" || int_part == "+" { int_part } else { "" },
        int_part.trim_start_matches(['+', '-']),
        frac_part
    );
    let negative = int_part.starts_with('-');
    let bare: String = digits.trim_start_matches(['+', '-']).to_string();
    if bare.is_empty() || !bare.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut numer: BigInt = bare.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let scale = num_traits::pow::pow(ten, shift.unsigned_abs() as usize);
    Some(if shift >= 0 {
        Rational::from_integer(numer * scale)
    } else {
        Rational::new(numer, scale)
    })
}

/// |r| as a rational.
pub fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}
