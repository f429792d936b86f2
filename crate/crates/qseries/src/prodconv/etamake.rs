//! Eta-product recognition.
//!
//! Given `f = 1 + c q^k + ...`, multiplying by `etaq(k)^c` clears the `q^k`
//! term without touching anything below it, so repeating the step for
//! `k = 1, 2, ...` either exhausts the series (an eta product, `exact`) or
//! hits a non-integer coefficient and stops with a partial answer.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::builders::etaq;
use crate::error::{Error, Result};
use crate::rat::{fmt_rat, rat, ratio, Rat};
use crate::series::QSeries;
use crate::text::exponent_suffix;

/// `leading_coeff * q^q_power * prod eta(k tau)^(e_k)`, where `q_power` is
/// the power displayed when the factors are written as true eta functions
/// (it absorbs the `sum e_k k / 24` offset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaProduct {
    pub leading_coeff: Rat,
    pub q_power: Rat,
    pub exponents: BTreeMap<usize, i64>,
    /// True when the residual was exactly `1 + O(q^T)` after the greedy pass.
    pub exact: bool,
}

impl EtaProduct {
    /// Total `q`-power of the underlying series form
    /// (`q_power + sum e_k k/24`).
    pub fn series_q_power(&self) -> Rat {
        let mut acc = self.q_power.clone();
        for (&k, &e) in &self.exponents {
            acc += ratio(e, 1) * ratio(k as i64, 24);
        }
        acc
    }

    /// Expand back to a truncated series.
    pub fn expand(&self, trunc: usize) -> Result<QSeries> {
        let mut acc = QSeries::constant(self.leading_coeff.clone(), trunc);
        for (&k, &e) in &self.exponents {
            acc = acc.mul(&etaq(k as u32, trunc)?.pow(e)?);
        }
        Ok(acc.shift_prefactor(&self.series_q_power()))
    }
}

impl fmt::Display for EtaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.leading_coeff.is_one() {
            parts.push(fmt_rat(&self.leading_coeff));
        }
        if !self.q_power.is_zero() {
            parts.push(format!("q^({})", fmt_rat(&self.q_power)));
        }
        for (&k, &e) in &self.exponents {
            let base = if k == 1 { "eta(tau)".to_string() } else { format!("eta({k}*tau)") };
            parts.push(format!("{base}{}", exponent_suffix(&rat(e))));
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}", parts.join(" * "))?;
        if !self.exact {
            write!(f, " * [inexact residual]")?;
        }
        Ok(())
    }
}

/// Recognize `f` as a product of eta functions agreeing with it to
/// `O(q^order)` (relative to the valuation). A leading coefficient and any
/// `q`-power (prefactor plus valuation) are normalized out first.
pub fn etamake(f: &QSeries, order: usize) -> Result<EtaProduct> {
    let v = f
        .valuation()
        .ok_or_else(|| Error::InvalidArgument("cannot eta-factor the zero series".into()))?;
    let leading = f.coeff(v)?.clone();
    let total_power = f.prefactor() + rat(v as i64);
    let inv_leading = leading.recip();
    let tail: Vec<Rat> = f.coeffs()[v..].iter().map(|c| c * &inv_leading).collect();
    let t_eff = order.min(tail.len()).max(1);
    let mut residual = QSeries::from_coeffs(tail[..t_eff].to_vec());

    let mut exponents: BTreeMap<usize, i64> = BTreeMap::new();
    let mut exact = true;
    for k in 1..t_eff {
        let ck = residual.coeff(k)?.clone();
        if ck.is_zero() {
            continue;
        }
        let Some(c) = crate::rat::to_i64(&ck) else {
            exact = false;
            break;
        };
        residual = residual.mul(&etaq(k as u32, t_eff)?.pow(c)?);
        exponents.insert(k, -c);
    }
    if exact {
        exact = residual.coeffs()[1..].iter().all(|c| c.is_zero())
            && residual.coeff(0)?.is_one();
    }

    let mut q_power = total_power;
    for (&k, &e) in &exponents {
        q_power -= ratio(e, 1) * ratio(k as i64, 24);
    }
    Ok(EtaProduct { leading_coeff: leading, q_power, exponents, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{theta2, theta3, theta4};

    #[test]
    fn theta3_as_eta_product() {
        let p = etamake(&theta3(100), 100).unwrap();
        assert!(p.exact);
        assert_eq!(p.leading_coeff, rat(1));
        assert_eq!(p.exponents, BTreeMap::from([(1usize, -2i64), (2, 5), (4, -2)]));
        assert_eq!(p.q_power, rat(0));
        assert_eq!(p.to_string(), "eta(tau)^(-2) * eta(2*tau)^5 * eta(4*tau)^(-2)");
        let back = p.expand(100).unwrap();
        assert!(back.agrees_to(&theta3(100), 100));
    }

    #[test]
    fn theta4_as_eta_product() {
        let p = etamake(&theta4(100), 100).unwrap();
        assert!(p.exact);
        assert_eq!(p.exponents, BTreeMap::from([(1usize, 2i64), (2, -1)]));
        assert_eq!(p.q_power, rat(0));
    }

    #[test]
    fn theta2_as_eta_product() {
        // theta2 carries prefactor 1/4; the eta form needs no q-power.
        let p = etamake(&theta2(100), 100).unwrap();
        assert!(p.exact);
        assert_eq!(p.leading_coeff, rat(2));
        assert_eq!(p.exponents, BTreeMap::from([(2usize, -1i64), (4, 2)]));
        assert_eq!(p.q_power, rat(0));
        // Dividing the prefactor out shifts the displayed q-power to -1/4.
        let shifted = theta2(100).shift_prefactor(&ratio(-1, 4));
        let p = etamake(&shifted, 100).unwrap();
        assert_eq!(p.exponents, BTreeMap::from([(2usize, -1i64), (4, 2)]));
        assert_eq!(p.q_power, ratio(-1, 4));
        assert_eq!(p.to_string(), "2 * q^(-1/4) * eta(2*tau)^(-1) * eta(4*tau)^2");
        assert!(p.expand(100).unwrap().agrees_to(&shifted, 99));
    }

    #[test]
    fn inexact_input_is_flagged() {
        // theta3 truncated too short to clear leaves a partial product; a
        // series with a rational coefficient stops immediately.
        let f = QSeries::from_coeffs(vec![rat(1), ratio(1, 2), rat(0), rat(0)]);
        let p = etamake(&f, 4).unwrap();
        assert!(!p.exact);
        assert!(p.exponents.is_empty());
    }

    #[test]
    fn eta_quotient_round_trip() {
        // eta(2)^3 eta(3)^(-1) eta(5): recover exponents from the expansion.
        let f = etaq(2, 80)
            .unwrap()
            .pow(3)
            .unwrap()
            .mul(&etaq(3, 80).unwrap().pow(-1).unwrap())
            .mul(&etaq(5, 80).unwrap());
        let p = etamake(&f, 80).unwrap();
        assert!(p.exact);
        assert_eq!(p.exponents, BTreeMap::from([(2usize, 3i64), (3, -1), (5, 1)]));
        assert_eq!(p.series_q_power(), rat(0));
    }
}
