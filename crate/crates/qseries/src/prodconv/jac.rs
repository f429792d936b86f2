//! Jacobi-type theta-product recognition.
//!
//! `JAC(a,b)` with `0 < a < b` stands for the theta product
//! `(q^a;q^b)_inf (q^(b-a);q^b)_inf (q^b;q^b)_inf`; `JAC(0,b)` is the eta
//! product `(q^b;q^b)_inf`. Recognition runs [`prodmake`] and searches the
//! exponent sequence for the smallest period `b`, then folds residues `r`
//! and `b - r` into `JAC` factors. The `(q^b;q^b)` copies carried by each
//! `JAC(r,b)` are subtracted before the `JAC(0,b)` exponent is assigned, so
//! the residue-0 class comes out right.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::builders::{etaq, tripleprod};
use crate::error::{Error, Result};
use crate::monomial::QMonomial;
use crate::rat::{fmt_rat, rat, ratio, Rat};
use crate::series::QSeries;
use crate::text::exponent_suffix;

/// `leading_coeff * q^v * prod JAC(a,b)^e` with keys folded into
/// `0 <= a <= b/2`. Exponents are exact rationals; half-integers appear for
/// the self-paired residue `b/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacProduct {
    pub leading_coeff: Rat,
    pub q_valuation: usize,
    pub factors: BTreeMap<(u32, u32), Rat>,
}

impl JacProduct {
    pub fn new(leading_coeff: Rat, q_valuation: usize, factors: BTreeMap<(u32, u32), Rat>) -> Self {
        let factors = factors
            .into_iter()
            .filter(|(_, e)| !e.is_zero())
            .map(|((a, b), e)| (if a > b / 2 { (b - a, b) } else { (a, b) }, e))
            .collect();
        Self { leading_coeff, q_valuation, factors }
    }
}

impl fmt::Display for JacProduct {
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
        for ((a, b), e) in &self.factors {
            parts.push(format!("JAC({a},{b},infinity){}", exponent_suffix(e)));
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

/// One `(q^a; q^b)_infinity^e` factor of the expanded q-product form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPochhammerTerm {
    pub a: u32,
    pub b: u32,
    pub exponent: Rat,
}

impl fmt::Display for QPochhammerTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let power = |n: u32| if n == 1 { "q".to_string() } else { format!("q^{n}") };
        write!(
            f,
            "({};{})_infinity{}",
            power(self.a),
            power(self.b),
            exponent_suffix(&self.exponent)
        )
    }
}

/// Convert a series into a Jacobi-type product agreeing with it to
/// `O(q^order)`, if a periodic exponent pattern exists. The candidate period
/// bound defaults to `(order-1)/2`, guaranteeing two full periods of
/// evidence; the smallest period wins. Residue classes with `a_r != a_(b-r)`
/// disqualify the candidate period.
pub fn jacprodmake(f: &QSeries, order: usize, max_period: Option<usize>) -> Result<JacProduct> {
    let v = f
        .valuation()
        .ok_or_else(|| Error::InvalidArgument("cannot convert the zero series".into()))?;
    if !f.prefactor().is_integer() {
        return Err(Error::NonzeroPrefactor(f.prefactor().clone()));
    }
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
    let a = super::prodmake::product_exponents(&g, order)?;
    let bmax = max_period.unwrap_or((order.saturating_sub(1)) / 2).max(1);

    for b in 1..=bmax {
        if b + 1 > order {
            break;
        }
        // Class representative: a_r for r in 1..=b (a_b stands for class 0).
        let class = |n: usize| -> &Rat {
            let r = n % b;
            if r == 0 {
                &a[b]
            } else {
                &a[r]
            }
        };
        let periodic = (1..order).all(|n| a[n] == *class(n));
        if !periodic {
            continue;
        }
        let symmetric = (1..b).all(|r| a[r] == a[b - r]);
        if !symmetric {
            continue;
        }
        // Fold into JAC factors and account for the (q^b;q^b) copies.
        let mut factors: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
        let mut eta_copies = Rat::zero();
        for r in 1..=b / 2 {
            let e = if 2 * r == b { &a[r] * ratio(1, 2) } else { a[r].clone() };
            if !e.is_zero() {
                factors.insert((r as u32, b as u32), e.clone());
            }
            eta_copies += &e;
        }
        let jac0 = &a[b] - &eta_copies;
        if !jac0.is_zero() {
            factors.insert((0, b as u32), jac0);
        }
        return Ok(JacProduct::new(leading, q_valuation, factors));
    }
    Err(Error::NoPeriodFound(bmax))
}

/// Expand the `JAC` factors into `(q^a;q^b)_infinity` form: each `JAC(a,b)`
/// with `a > 0` contributes its three Pochhammer symbols, `JAC(0,b)`
/// contributes `(q^b;q^b)_infinity`; like factors merge and zero exponents
/// drop out.
pub fn jac2prod(j: &JacProduct) -> Vec<QPochhammerTerm> {
    let mut acc: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
    let mut bump = |a: u32, b: u32, e: &Rat| {
        let entry = acc.entry((b, a)).or_insert_with(Rat::zero);
        *entry += e;
    };
    for ((a, b), e) in &j.factors {
        if *a > 0 {
            bump(*a, *b, e);
            bump(*b - *a, *b, e);
        }
        bump(*b, *b, e);
    }
    acc.into_iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|((b, a), exponent)| QPochhammerTerm { a, b, exponent })
        .collect()
}

/// Expand a Jacobi product to a series by replacing each `JAC(a,b)` with its
/// theta series (`tripleprod` for `a > 0`, `etaq` for `a = 0`); integer
/// powers go through `pow`, half-integer powers through the series square
/// root. Exponent denominators above 2 are rejected.
pub fn jac2series(j: &JacProduct, trunc: usize) -> Result<QSeries> {
    let trunc = trunc.max(1);
    let mut acc = QSeries::constant(j.leading_coeff.clone(), trunc);
    for ((a, b), e) in &j.factors {
        let base = if *a == 0 {
            etaq(*b, trunc)?
        } else {
            tripleprod(&QMonomial::q_pow(*a), *b, None, trunc)?
        };
        if e.is_integer() {
            let k = crate::rat::to_i64(e)
                .ok_or_else(|| Error::InvalidArgument("JAC exponent out of range".into()))?;
            acc = acc.mul(&base.pow(k)?);
        } else if *e.denom() == 2.into() {
            let int_part = e - ratio(1, 2);
            let k = crate::rat::to_i64(&int_part)
                .ok_or_else(|| Error::InvalidArgument("JAC exponent out of range".into()))?;
            acc = acc.mul(&base.pow(k)?).mul(&base.sqrt()?);
        } else {
            return Err(Error::ExponentDenominator(e.clone()));
        }
    }
    Ok(acc.shift_prefactor(&rat(j.q_valuation as i64)))
}
