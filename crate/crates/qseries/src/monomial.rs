//! Signed q-monomials.
//!
//! A [`QMonomial`] is `±q^e` with exact rational `e >= 0`. These are the
//! admissible `z` arguments of the theta-style builders: the package works
//! with one formal variable only, so "free" parameters are always pinned to
//! a signed power of `q`.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, rat, Rat};

/// `sign * q^exp` with `sign` in `{+1, -1}` and `exp >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMonomial {
    sign: i8,
    exp: Rat,
}

impl QMonomial {
    /// Build `sign * q^exp`. Errors when `exp < 0` or `sign` is not `±1`.
    pub fn new(sign: i8, exp: Rat) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidArgument(format!("monomial sign must be ±1, got {sign}")));
        }
        if exp < Rat::zero() {
            return Err(Error::NegativeExponent(exp));
        }
        Ok(Self { sign, exp })
    }

    /// `q`.
    pub fn q() -> Self {
        Self { sign: 1, exp: rat(1) }
    }

    /// `q^e` for integer `e >= 0`.
    pub fn q_pow(e: u32) -> Self {
        Self { sign: 1, exp: rat(e as i64) }
    }

    /// `-q^e` for integer `e >= 0`.
    pub fn neg_q_pow(e: u32) -> Self {
        Self { sign: -1, exp: rat(e as i64) }
    }

    /// The constant `1` (`q^0`).
    pub fn one() -> Self {
        Self { sign: 1, exp: rat(0) }
    }

    /// The constant `-1`.
    pub fn neg_one() -> Self {
        Self { sign: -1, exp: rat(0) }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn exp(&self) -> &Rat {
        &self.exp
    }

    /// Flip the sign.
    pub fn negate(&self) -> Self {
        Self { sign: -self.sign, exp: self.exp.clone() }
    }

    /// Sign and exponent of `(±q^e)^k`; the exponent may be negative for
    /// negative `k`, which is why this does not return a `QMonomial`.
    pub fn pow(&self, k: i64) -> (i8, Rat) {
        let sign = if self.sign == -1 && k.rem_euclid(2) == 1 { -1 } else { 1 };
        (sign, &self.exp * rat(k))
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.exp.is_zero() {
            "1".to_string()
        } else if self.exp == rat(1) {
            "q".to_string()
        } else if self.exp.is_integer() && self.exp > Rat::zero() {
            format!("q^{}", self.exp.numer())
        } else {
            format!("q^({})", fmt_rat(&self.exp))
        };
        if self.sign < 0 {
            write!(f, "-{body}")
        } else {
            write!(f, "{body}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn rejects_negative_exponent() {
        assert!(matches!(QMonomial::new(1, ratio(-1, 2)), Err(Error::NegativeExponent(_))));
        assert!(QMonomial::new(2, rat(1)).is_err());
    }

    #[test]
    fn powers_track_sign_and_exponent() {
        let m = QMonomial::neg_q_pow(3);
        assert_eq!(m.pow(2), (1, rat(6)));
        assert_eq!(m.pow(-3), (-1, rat(-9)));
        assert_eq!(QMonomial::q().pow(-1), (1, rat(-1)));
    }

    #[test]
    fn display_forms() {
        assert_eq!(QMonomial::q().to_string(), "q");
        assert_eq!(QMonomial::neg_q_pow(1).to_string(), "-q");
        assert_eq!(QMonomial::q_pow(10).to_string(), "q^10");
        assert_eq!(QMonomial::new(1, ratio(1, 2)).unwrap().to_string(), "q^(1/2)");
        assert_eq!(QMonomial::neg_one().to_string(), "-1");
    }
}
