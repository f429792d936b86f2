//! Finite q-product factorisation of rational functions.
//!
//! The candidate exponents come from [`product_exponents`] applied to the
//! series expansion of the function; the integer prefix of that sequence is
//! peeled off and everything is certified by exact polynomial arithmetic,
//! never by series comparison, so no false factorisation can be returned.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{QPoly, RationalFunction};
use crate::rat::Rat;

use super::prodmake::{product_exponents, QProduct};

/// Write `f` as `leading * q^v * prod (1-q^j)^(a_j) * remainder`, with the
/// remainder equal to 1 exactly when `f` is a finite q-product. `max_exp`
/// bounds the factor exponents `j`; the default is `4d + 3` where `d` is the
/// larger of the numerator and denominator degrees.
pub fn qfactor(
    f: &RationalFunction,
    max_exp: Option<usize>,
) -> Result<(QProduct, RationalFunction)> {
    if f.num().is_zero() {
        return Err(Error::InvalidArgument("cannot q-factor the zero function".into()));
    }
    let vn = f.num().valuation().expect("nonzero numerator");
    let vd = f.den().valuation().expect("nonzero denominator");
    if vn < vd {
        return Err(Error::PoleAtZero);
    }
    let v = vn - vd;
    let num = f.num().shift_down(vn).expect("valuation");
    let den = f.den().shift_down(vd).expect("valuation");
    let leading = num.coeff(0) / den.coeff(0);

    let d = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    let bound = max_exp.unwrap_or(4 * d + 3).max(1);

    // Series expansion of the normalized ratio, constant term 1.
    let order = bound + 1;
    let series = num
        .to_series(order)
        .scale(&leading.recip())
        .mul(&den.to_series(order).inv()?);
    let a = product_exponents(&series, order)?;

    // Keep the integer prefix of the exponent sequence.
    let mut kept: BTreeMap<usize, Rat> = BTreeMap::new();
    for (j, aj) in a.iter().enumerate().skip(1) {
        if !aj.is_integer() {
            break;
        }
        if !aj.is_zero() {
            kept.insert(j, aj.clone());
        }
    }

    // Certify: f * D = leading * q^v * P * remainder exactly, where P and D
    // collect the positive and negative kept exponents.
    let mut pos = QPoly::one();
    let mut neg = QPoly::one();
    for (&j, aj) in &kept {
        let e = crate::rat::to_i64(aj)
            .ok_or_else(|| Error::InvalidArgument("factor exponent out of range".into()))?;
        let base = QPoly::one_minus_q(j);
        if e > 0 {
            pos = pos.mul(&base.pow(e as u64));
        } else {
            neg = neg.mul(&base.pow(e.unsigned_abs()));
        }
    }
    let rem_num = f.num().mul(&neg);
    let rem_den = f
        .den()
        .mul(&QPoly::monomial(leading.clone(), v))
        .mul(&pos);
    let remainder = RationalFunction::new(rem_num, rem_den)?.reduced();

    Ok((QProduct::new(leading, v, kept), remainder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn poly(v: &[i64]) -> QPoly {
        QPoly::new(v.iter().map(|&n| rat(n)).collect())
    }

    #[test]
    fn factors_one_minus_q_squared() {
        let f = RationalFunction::from_poly(poly(&[1, 0, -1]));
        let (p, rem) = qfactor(&f, None).unwrap();
        assert_eq!(p.exponents, BTreeMap::from([(2usize, rat(1))]));
        assert_eq!(p.leading_coeff, rat(1));
        assert_eq!(p.q_valuation, 0);
        assert!(rem.is_one());
    }

    #[test]
    fn factors_quotients_with_valuation_and_constant() {
        // 3 q^2 (1-q^3) / (1-q) = 3 q^2 (1+q+q^2)
        let num = poly(&[0, 0, 3]).mul(&poly(&[1, 0, 0, -1]));
        let f = RationalFunction::new(num, poly(&[1, -1])).unwrap();
        let (p, rem) = qfactor(&f, Some(10)).unwrap();
        assert_eq!(p.leading_coeff, rat(3));
        assert_eq!(p.q_valuation, 2);
        assert_eq!(p.exponents, BTreeMap::from([(1usize, rat(-1)), (3usize, rat(1))]));
        assert!(rem.is_one());
    }

    #[test]
    fn partial_factorisation_leaves_remainder() {
        // (1-q)(1 + q + q^3) is not a pure q-product; the (1-q) peels off.
        let f = RationalFunction::from_poly(poly(&[1, -1]).mul(&poly(&[1, 1, 0, 1])));
        let (p, rem) = qfactor(&f, Some(8)).unwrap();
        // Exactness invariant: num * D = den * c q^v * P * rem.
        let lhs = f.num().mul(&den_of(&p, false));
        let rhs = f
            .den()
            .mul(&QPoly::monomial(p.leading_coeff.clone(), p.q_valuation))
            .mul(&den_of(&p, true))
            .mul(rem.num())
            .div_exact(rem.den())
            .expect("reduced remainder divides");
        assert_eq!(lhs, rhs);
        assert!(!rem.is_one());
    }

    #[test]
    fn rejects_poles_at_zero() {
        let f = RationalFunction::new(poly(&[1, 1]), poly(&[0, 1])).unwrap();
        assert!(matches!(qfactor(&f, None), Err(Error::PoleAtZero)));
    }

    #[test]
    fn non_integer_exponent_prefix_stops_cleanly() {
        // (2 - q)/2 = 1 - q/2 has a_1 = 1/2, so nothing peels off.
        let f = RationalFunction::new(poly(&[2, -1]), poly(&[2])).unwrap();
        let (p, rem) = qfactor(&f, Some(6)).unwrap();
        assert!(p.exponents.is_empty());
        assert_eq!(p.leading_coeff, rat(1));
        assert_eq!(rem.num().mul(&poly(&[2])), rem.den().mul(&poly(&[2, -1])));
    }

    fn den_of(p: &QProduct, positive: bool) -> QPoly {
        let mut acc = QPoly::one();
        for (&j, a) in &p.exponents {
            let e = crate::rat::to_i64(a).unwrap();
            if (e > 0) == positive {
                acc = acc.mul(&QPoly::one_minus_q(j).pow(e.unsigned_abs()));
            }
        }
        acc
    }
}
