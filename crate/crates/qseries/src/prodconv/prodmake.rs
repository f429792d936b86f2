//! Series-to-product conversion.
//!
//! Any series `1 + sum b_n q^n` is formally `prod (1-q^n)^(a_n)`. Taking the
//! logarithmic q-derivative of both sides gives the coefficient recurrence
//! `c_n = n b_n - sum_{j<n} c_j b_{n-j}` with `c_n = -sum_{d|n} d a_d`, from
//! which the exponents `a_n` follow by Möbius-style peeling of divisors.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, rat, ratio, Rat};
use crate::series::QSeries;
use crate::text::exponent_suffix;

/// A (possibly infinite) product `leading_coeff * q^v * prod (1-q^j)^(a_j)`.
/// `exponents[j]` is the exponent of `(1-q^j)` in the value itself, so a
/// reciprocal like the Rogers-Ramanujan product stores `-1` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QProduct {
    pub leading_coeff: Rat,
    pub q_valuation: usize,
    pub exponents: BTreeMap<usize, Rat>,
}

impl QProduct {
    pub fn new(leading_coeff: Rat, q_valuation: usize, exponents: BTreeMap<usize, Rat>) -> Self {
        let exponents = exponents.into_iter().filter(|(j, a)| *j > 0 && !a.is_zero()).collect();
        Self { leading_coeff, q_valuation, exponents }
    }

    /// True when every exponent is an integer.
    pub fn all_integral(&self) -> bool {
        self.exponents.values().all(|a| a.is_integer())
    }
}

impl fmt::Display for QProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.leading_coeff.is_one() {
            parts.push(fmt_rat(&self.leading_coeff));
        }
        if self.q_valuation > 0 {
            parts.push(if self.q_valuation == 1 {
                "q".to_string()
            } else {
                format!("q^{}", self.q_valuation)
            });
        }
        for (j, a) in &self.exponents {
            let base = if *j == 1 { "(1-q)".to_string() } else { format!("(1-q^{j})") };
            parts.push(format!("{base}{}", exponent_suffix(a)));
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// Exponent sequence `a_1 .. a_{order-1}` of `f = prod (1-q^j)^(a_j)`.
/// Requires `f[0] = 1` and a zero prefactor; shared by the recognizers.
pub(crate) fn product_exponents(f: &QSeries, order: usize) -> Result<Vec<Rat>> {
    if !f.prefactor().is_zero() {
        return Err(Error::NonzeroPrefactor(f.prefactor().clone()));
    }
    if !f.coeff(0)?.is_one() {
        return Err(Error::ConstantTermNotOne(f.coeff(0)?.clone()));
    }
    if order > f.trunc_order() {
        return Err(Error::InsufficientTruncation { have: f.trunc_order(), need: order });
    }
    let b = f.coeffs();
    let mut c = vec![Rat::zero(); order]; // c[0] unused
    for n in 1..order {
        let mut acc = rat(n as i64) * &b[n];
        for j in 1..n {
            if !c[j].is_zero() && !b[n - j].is_zero() {
                acc -= &c[j] * &b[n - j];
            }
        }
        c[n] = acc;
    }
    let mut a = vec![Rat::zero(); order]; // a[0] unused
    for n in 1..order {
        let mut acc = c[n].clone();
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                if d < n {
                    acc += rat(d as i64) * &a[d];
                }
                let e = n / d;
                if e != d && e < n {
                    acc += rat(e as i64) * &a[e];
                }
            }
            d += 1;
        }
        a[n] = -acc / rat(n as i64);
    }
    Ok(a)
}

/// Convert a series with constant term 1 into an infinite product agreeing
/// with it to `O(q^order)`. Non-integral exponents are recorded as they are;
/// `QProduct::all_integral` reports whether any appeared.
pub fn prodmake(f: &QSeries, order: usize) -> Result<QProduct> {
    let a = product_exponents(f, order)?;
    let exponents = a
        .into_iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(QProduct::new(Rat::one(), 0, exponents))
}

/// [`prodmake`] preceded by normalization: a leading coefficient and a
/// monomial `q`-power (valuation plus any integer prefactor) are peeled off
/// into the `QProduct` header first.
pub fn prodmake_normalized(f: &QSeries, order: usize) -> Result<QProduct> {
    if !f.prefactor().is_integer() {
        return Err(Error::NonzeroPrefactor(f.prefactor().clone()));
    }
    let v = f.valuation().ok_or_else(|| {
        Error::InvalidArgument("cannot convert the zero series to a product".into())
    })?;
    let total_val = f.prefactor() + rat(v as i64);
    if total_val.is_negative() {
        return Err(Error::PoleAtZero);
    }
    let q_valuation = usize::try_from(total_val.to_integer())
        .map_err(|_| Error::InvalidArgument("valuation out of range".into()))?;
    let leading = f.coeff(v)?.clone();
    let inv_leading = leading.recip();
    let tail: Vec<Rat> = f.coeffs()[v..].iter().map(|c| c * &inv_leading).collect();
    let g = QSeries::from_coeffs(tail);
    let order = order.min(g.trunc_order());
    let core = prodmake(&g, order)?;
    Ok(QProduct::new(leading, q_valuation, core.exponents))
}

/// Expand `leading_coeff * q^v * prod (1-q^j)^(a_j)` to `O(q^trunc)`.
/// Half-integer exponents go through the series square root; denominators
/// above 2 are rejected.
pub fn expand_qproduct(p: &QProduct, trunc: usize) -> Result<QSeries> {
    let trunc = trunc.max(1);
    let mut result = QSeries::one(trunc);
    for (&j, a) in &p.exponents {
        if j >= trunc {
            continue;
        }
        let mut base_coeffs = vec![Rat::zero(); trunc];
        base_coeffs[0] = Rat::one();
        base_coeffs[j] = -Rat::one();
        let base = QSeries::from_coeffs(base_coeffs);
        if a.is_integer() {
            let e = crate::rat::to_i64(a)
                .ok_or_else(|| Error::InvalidArgument("product exponent out of range".into()))?;
            result = result.mul(&base.pow(e)?);
        } else if *a.denom() == 2.into() {
            let int_part = a - ratio(1, 2);
            let e = crate::rat::to_i64(&int_part)
                .ok_or_else(|| Error::InvalidArgument("product exponent out of range".into()))?;
            result = result.mul(&base.pow(e)?).mul(&base.sqrt()?);
        } else {
            return Err(Error::ExponentDenominator(a.clone()));
        }
    }
    if p.q_valuation >= trunc {
        return Err(Error::BeyondTruncation { index: p.q_valuation, trunc });
    }
    let shifted = result.mul(&QSeries::monomial(p.leading_coeff.clone(), p.q_valuation, trunc)?);
    Ok(shifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{aqprod, etaq};
    use crate::monomial::QMonomial;

    fn rr_sum(trunc: usize) -> QSeries {
        // 1 + sum_{n=1}^{8} q^(n^2) / (q;q)_n
        let mut x = QSeries::one(trunc);
        for n in 1..=8u32 {
            let exp = (n * n) as usize;
            if exp >= trunc {
                continue; // term is O(q^trunc)
            }
            let den = aqprod(&QMonomial::q(), 1, n, trunc).unwrap();
            let term = den
                .inv()
                .unwrap()
                .mul(&QSeries::monomial(Rat::one(), exp, trunc).unwrap());
            x = x.checked_add(&term).unwrap();
        }
        x
    }

    #[test]
    fn rogers_ramanujan_product() {
        let x = rr_sum(50);
        assert_eq!(x.coeff(49).unwrap(), &rat(961));
        let p = prodmake(&x, 40).unwrap();
        for j in 1..40usize {
            let expect = if j % 5 == 1 || j % 5 == 4 { rat(-1) } else { rat(0) };
            assert_eq!(p.exponents.get(&j).cloned().unwrap_or_else(Rat::zero), expect, "j={j}");
        }
        assert!(p.all_integral());
        assert_eq!(
            p.to_string(),
            "(1-q)^(-1) * (1-q^4)^(-1) * (1-q^6)^(-1) * (1-q^9)^(-1) * (1-q^11)^(-1) * \
             (1-q^14)^(-1) * (1-q^16)^(-1) * (1-q^19)^(-1) * (1-q^21)^(-1) * (1-q^24)^(-1) * \
             (1-q^26)^(-1) * (1-q^29)^(-1) * (1-q^31)^(-1) * (1-q^34)^(-1) * (1-q^36)^(-1) * \
             (1-q^39)^(-1)"
        );
    }

    #[test]
    fn simple_products() {
        let f = QSeries::from_coeffs(vec![rat(1), rat(-1), rat(0), rat(0)]);
        let p = prodmake(&f, 4).unwrap();
        assert_eq!(p.exponents, BTreeMap::from([(1, rat(1))]));
        // 1/(q;q)_inf has every exponent -1.
        let f = etaq(1, 30).unwrap().inv().unwrap();
        let p = prodmake(&f, 30).unwrap();
        for j in 1..30usize {
            assert_eq!(p.exponents.get(&j), Some(&rat(-1)), "j={j}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = QSeries::from_coeffs(vec![rat(2), rat(1)]);
        assert!(matches!(prodmake(&f, 2), Err(Error::ConstantTermNotOne(_))));
        let f = QSeries::one(5);
        assert!(matches!(prodmake(&f, 9), Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn fractional_exponents_are_flagged_not_fatal() {
        // sqrt of the geometric series: exponents are all -1/2.
        let f = QSeries::from_coeffs(vec![Rat::one(); 12]).sqrt().unwrap();
        let p = prodmake(&f, 12).unwrap();
        assert!(!p.all_integral());
        assert_eq!(p.exponents.get(&1), Some(&ratio(-1, 2)));
    }

    #[test]
    fn expand_round_trips() {
        let p = QProduct::new(
            Rat::one(),
            0,
            BTreeMap::from([(1usize, rat(-5)), (5usize, rat(1)), (7usize, rat(2))]),
        );
        let f = expand_qproduct(&p, 40).unwrap();
        let q = prodmake(&f, 40).unwrap();
        assert_eq!(q.exponents, p.exponents);
        // expand(prodmake(f)) == f.
        let f = rr_sum(40);
        let g = expand_qproduct(&prodmake(&f, 40).unwrap(), 40).unwrap();
        assert!(f.agrees_to(&g, 40));
    }

    #[test]
    fn expand_handles_half_integer_exponents() {
        let p = QProduct::new(Rat::one(), 0, BTreeMap::from([(1usize, ratio(-1, 2))]));
        let f = expand_qproduct(&p, 12).unwrap();
        let sq = f.mul(&f);
        let expect = QSeries::from_coeffs(vec![Rat::one(); 12]);
        assert_eq!(sq, expect);
        let bad = QProduct::new(Rat::one(), 0, BTreeMap::from([(1usize, ratio(1, 3))]));
        assert!(matches!(expand_qproduct(&bad, 5), Err(Error::ExponentDenominator(_))));
    }

    #[test]
    fn normalized_variant_peels_constant_and_valuation() {
        // 5 q^2 / (q;q)_inf
        let f = etaq(1, 30)
            .unwrap()
            .inv()
            .unwrap()
            .scale(&rat(5))
            .mul(&QSeries::monomial(Rat::one(), 2, 30).unwrap());
        let p = prodmake_normalized(&f, 25).unwrap();
        assert_eq!(p.leading_coeff, rat(5));
        assert_eq!(p.q_valuation, 2);
        assert_eq!(p.exponents.get(&1), Some(&rat(-1)));
        let back = expand_qproduct(&p, 25).unwrap();
        assert!(back.agrees_to(&f.truncated(25), 25));
    }
}
