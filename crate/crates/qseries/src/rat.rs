//! Exact rational scalars.
//!
//! All coefficients in this crate are [`Rat`] values: arbitrary-precision
//! rationals kept in canonical form (reduced, positive denominator) by
//! `num-rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number; always canonical (gcd(|num|, den) = 1, den > 0).
pub type Rat = BigRational;

/// `n` as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// True if `r` has denominator 1.
pub fn is_integer(r: &Rat) -> bool {
    r.is_integer()
}

/// The integer value of `r`, if it is an integer that fits in `i64`.
pub fn to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        let n = r.numer();
        i64::try_from(n.clone()).ok()
    } else {
        None
    }
}

/// Fractional part of `r` in `[0, 1)`: `r - floor(r)`.
pub fn fract(r: &Rat) -> Rat {
    r - r.floor()
}

/// Canonical text form: `p` for integers, `p/r` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse the canonical text form produced by [`fmt_rat`].
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(n))
        }
    }
}

/// Clear denominators and divide out content: maps a rational vector to the
/// unique primitive integer vector with the same direction and sign.
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut content = BigInt::zero();
    for x in &ints {
        content = content.gcd(x);
    }
    if !content.is_zero() && !content.is_one() {
        for x in &mut ints {
            *x /= &content;
        }
    }
    ints
}

/// Flip signs so the first nonzero entry is positive. No-op on zero vectors.
pub fn normalize_sign(v: &mut [BigInt]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -(x.clone());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_automatic() {
        let r = ratio(4, -6);
        assert_eq!(fmt_rat(&r), "-2/3");
        assert!(r.denom() > &BigInt::zero());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-7", "3/2", "-10/3"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&r), s);
        }
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn fract_in_unit_interval() {
        assert_eq!(fract(&ratio(9, 4)), ratio(1, 4));
        assert_eq!(fract(&ratio(-9, 4)), ratio(3, 4));
        assert_eq!(fract(&rat(-3)), rat(0));
    }

    #[test]
    fn primitive_vector_normalization() {
        let v = vec![ratio(2, 3), ratio(-4, 3), rat(0)];
        let ints = primitive_integer_vector(&v);
        assert_eq!(ints, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(0)]);
        let mut w = vec![BigInt::from(-3), BigInt::from(6)];
        normalize_sign(&mut w);
        assert_eq!(w, vec![BigInt::from(3), BigInt::from(-6)]);
    }
}
