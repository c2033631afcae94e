//! Exact rational scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator after every operation. The textual form used at every
//! serialization boundary is `"p/q"` (always with an explicit denominator, so
//! `1` is written `"1/1"`); the parser also accepts a bare integer `"p"`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `p/q` as a [`Rational`]. Panics when `q == 0`.
pub fn q(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Canonical `"p/q"` string.
pub fn to_canonical(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or `"p"`; the result is reduced to lowest terms.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((p, d)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(p, d))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`.
///
/// Runs the continued-fraction expansion of the exact binary value of `x` and
/// picks between the last admissible convergent and the best semiconvergent.
pub fn rationalize(x: f64, max_den: u64) -> Result<Rational> {
    let exact = Rational::from_float(x)
        .ok_or_else(|| Error::Parse(format!("cannot rationalize non-finite value {x}")))?;
    let max_den = BigInt::from(max_den.max(1));
    if exact.denom() <= &max_den {
        return Ok(exact);
    }

    // Convergents h/k with the usual recurrences.
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            // Largest semiconvergent still inside the bound.
            let t = (&max_den - &k_prev).div_floor(&k);
            let semi = Rational::new(&t * &h + &h_prev, &t * &k + &k_prev);
            let conv = Rational::new(h.clone(), k.clone());
            let semi_err = (&semi - &exact).abs();
            let conv_err = (&conv - &exact).abs();
            return Ok(if semi_err < conv_err { semi } else { conv });
        }
        let h_next = &a * &h + &h_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            return Ok(Rational::new(h, k));
        }
        rest = frac.recip();
    }
}
