//! Exact rational scalar type and small helpers used throughout the crate.
//!
//! All piecewise-affine computations run on `Q = BigRational`; floats only
//! appear at the boundary (polynomial evaluation, entropy logarithms, CSV
//! output).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

/// Integer as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `n/d`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p/q"` or `"p"` (arbitrary precision).
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator {num:?}: {e}"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator {den:?}: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|e| format!("bad integer {s:?}: {e}"))?;
        Ok(Q::from_integer(n))
    }
}

/// Render as `"p/q"` (or `"p"` when integral).
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Convert to `f64`, scaling down first so huge numerators/denominators do
/// not overflow to infinity.
pub fn q_to_f64(q: &Q) -> f64 {
    let nb = q.numer().bits();
    let db = q.denom().bits();
    let max = nb.max(db);
    if max <= 900 {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        return n / d;
    }
    let shift = (max - 512) as u64;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Natural log of a positive big integer, accurate to ~1e-15 relative.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// `ln(a/b)` for positive big integers.
pub fn ln_ratio(a: &BigUint, b: &BigUint) -> f64 {
    ln_biguint(a) - ln_biguint(b)
}

/// Exact rational from a finite `f64`.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Absolute value.
pub fn qabs(q: &Q) -> Q {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["3/4", "-8/3", "0", "17", "-15/4"] {
            let q = parse_q(s).unwrap();
            assert_eq!(parse_q(&fmt_q(&q)).unwrap(), q);
        }
        assert!(parse_q("1/0").is_err());
        assert_eq!(fmt_q(&qr(6, 8)), "3/4");
    }

    #[test]
    fn f64_conversion_handles_large_values() {
        let mut q = qr(5, 3);
        for _ in 0..200 {
            q = &q * &qr(5, 3);
        }
        let approx = q_to_f64(&q);
        let expected = 201.0 * (5.0f64 / 3.0).ln();
        assert!((approx.ln() - expected).abs() < 1e-9);
    }

    #[test]
    fn big_log_matches_small_log() {
        let n = BigUint::from(123456789u64);
        assert!((ln_biguint(&n) - (123456789f64).ln()).abs() < 1e-12);
        let one = BigUint::one();
        assert_eq!(ln_biguint(&one), 0.0);
    }
}
