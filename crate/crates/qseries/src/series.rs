//! Truncated formal power series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] denotes `q^r * (c_0 + c_1 q + ... + c_{T-1} q^{T-1} + O(q^T))`
//! where `r` is an exact rational prefactor exponent (zero for ordinary
//! series) and `T >= 1` is the truncation order. The series is known modulo
//! `q^(r + T)`; operations never extend that knowledge, and binary
//! operations truncate to the minimum of their operands.
//!
//! Values are immutable after construction and every operation is a pure
//! function, so sharing across threads is safe.

use std::fmt;
use std::ops::{Mul, Neg};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::par;
use crate::rat::{rat, ratio, Rat};

/// Convolutions at least this long go through the parallel path.
const PAR_MUL_THRESHOLD: usize = 96;

/// Truncated q-series: `q^prefactor * sum(coeffs[n] * q^n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rat>,
    prefactor: Rat,
}

impl QSeries {
    /// Series with the given coefficients and a zero prefactor.
    /// Panics if `coeffs` is empty (the truncation order must be >= 1).
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be at least 1");
        Self { coeffs, prefactor: Rat::zero() }
    }

    /// Series with an explicit rational `q`-power prefactor.
    pub fn with_prefactor(coeffs: Vec<Rat>, prefactor: Rat) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be at least 1");
        Self { coeffs, prefactor }
    }

    /// The zero series `0 + O(q^trunc)`.
    pub fn zero(trunc: usize) -> Self {
        Self::from_coeffs(vec![Rat::zero(); trunc.max(1)])
    }

    /// The constant series `1 + O(q^trunc)`.
    pub fn one(trunc: usize) -> Self {
        Self::constant(Rat::one(), trunc)
    }

    /// The constant series `c + O(q^trunc)`.
    pub fn constant(c: Rat, trunc: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); trunc.max(1)];
        coeffs[0] = c;
        Self::from_coeffs(coeffs)
    }

    /// `c * q^exp + O(q^trunc)`; `exp` must be below `trunc`.
    pub fn monomial(c: Rat, exp: usize, trunc: usize) -> Result<Self> {
        if exp >= trunc {
            return Err(Error::BeyondTruncation { index: exp, trunc });
        }
        let mut coeffs = vec![Rat::zero(); trunc];
        coeffs[exp] = c;
        Ok(Self::from_coeffs(coeffs))
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn prefactor(&self) -> &Rat {
        &self.prefactor
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Absolute exponent below which every coefficient is known:
    /// `prefactor + trunc_order`.
    pub fn bound(&self) -> Rat {
        &self.prefactor + rat(self.trunc_order() as i64)
    }

    /// Coefficient of `q^n` relative to the prefactor.
    pub fn coeff(&self, n: usize) -> Result<&Rat> {
        self.coeffs.get(n).ok_or(Error::BeyondTruncation { index: n, trunc: self.trunc_order() })
    }

    /// Coefficient of the absolute power `q^e`. `None` when `e` is at or
    /// beyond the knowledge bound; exact zero below the prefactor or at
    /// exponents not congruent to it.
    pub fn abs_coeff(&self, e: &Rat) -> Option<Rat> {
        if *e >= self.bound() {
            return None;
        }
        let rel = e - &self.prefactor;
        if rel.is_negative() || !rel.is_integer() {
            return Some(Rat::zero());
        }
        let idx = usize::try_from(rel.numer().clone()).ok()?;
        Some(self.coeffs[idx].clone())
    }

    /// Smallest index with a nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Copy truncated to `min(trunc, self.trunc_order())`.
    pub fn truncated(&self, trunc: usize) -> Self {
        let t = trunc.clamp(1, self.trunc_order());
        Self { coeffs: self.coeffs[..t].to_vec(), prefactor: self.prefactor.clone() }
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &Rat) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            prefactor: self.prefactor.clone(),
        }
    }

    /// Add `delta` to the prefactor exponent (multiplication by `q^delta`).
    pub fn shift_prefactor(&self, delta: &Rat) -> Self {
        Self { coeffs: self.coeffs.clone(), prefactor: &self.prefactor + delta }
    }

    /// Sum, aligned on prefactors. The difference of prefactors must be an
    /// integer; the result is truncated to what both operands know.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    /// Difference, with the same alignment rules as [`checked_add`](Self::checked_add).
    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self> {
        let diff = &other.prefactor - &self.prefactor;
        if !diff.is_integer() {
            return Err(Error::PrefactorMismatch(self.prefactor.clone(), other.prefactor.clone()));
        }
        let prefactor = self.prefactor.clone().min(other.prefactor.clone());
        let bound = self.bound().min(other.bound());
        let len = (&bound - &prefactor).to_integer();
        let len = usize::try_from(len)
            .map_err(|_| Error::InvalidArgument("prefactor difference too large".into()))?;
        let off_self = usize::try_from((&self.prefactor - &prefactor).to_integer())
            .map_err(|_| Error::InvalidArgument("prefactor difference too large".into()))?;
        let off_other = usize::try_from((&other.prefactor - &prefactor).to_integer())
            .map_err(|_| Error::InvalidArgument("prefactor difference too large".into()))?;
        let mut coeffs = vec![Rat::zero(); len];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let mut v = Rat::zero();
            if i >= off_self {
                if let Some(x) = self.coeffs.get(i - off_self) {
                    v += x;
                }
            }
            if i >= off_other {
                if let Some(x) = other.coeffs.get(i - off_other) {
                    if subtract {
                        v -= x;
                    } else {
                        v += x;
                    }
                }
            }
            *c = v;
        }
        Ok(Self { coeffs, prefactor })
    }

    /// Cauchy product truncated to the shorter operand; prefactors add.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.trunc_order().min(other.trunc_order());
        let coeffs = if cfg!(feature = "parallel") && trunc >= PAR_MUL_THRESHOLD {
            convolve(&self.coeffs, &other.coeffs, trunc, true)
        } else {
            convolve(&self.coeffs, &other.coeffs, trunc, false)
        };
        Self { coeffs, prefactor: &self.prefactor + &other.prefactor }
    }

    /// Sequential convolution kernel, kept public for benchmarking the
    /// parallel dispatch against the plain loop.
    pub fn mul_serial(&self, other: &Self) -> Self {
        let trunc = self.trunc_order().min(other.trunc_order());
        Self {
            coeffs: convolve(&self.coeffs, &other.coeffs, trunc, false),
            prefactor: &self.prefactor + &other.prefactor,
        }
    }

    /// Multiplicative inverse: `f * f.inv() = 1 + O(q^T)`.
    /// Requires a nonzero constant term.
    pub fn inv(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let t = self.trunc_order();
        let inv_a0 = a0.recip();
        let mut out = vec![Rat::zero(); t];
        out[0] = inv_a0.clone();
        for n in 1..t {
            let mut acc = Rat::zero();
            for j in 1..=n {
                if !self.coeffs[j].is_zero() && !out[n - j].is_zero() {
                    acc += &self.coeffs[j] * &out[n - j];
                }
            }
            if !acc.is_zero() {
                out[n] = -acc * &inv_a0;
            }
        }
        Ok(Self { coeffs: out, prefactor: -self.prefactor.clone() })
    }

    /// Integer power by binary exponentiation; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one(self.trunc_order()));
        }
        let (mut base, mut k) = if e < 0 {
            (self.inv()?, e.unsigned_abs())
        } else {
            (self.clone(), e as u64)
        };
        let mut acc: Option<Self> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Square root with constant term 1, by the recurrence
    /// `g_n = (f_n - sum_{0<j<n} g_j g_{n-j}) / 2`. The prefactor is halved.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::SqrtConstantNotOne(self.coeffs[0].clone()));
        }
        let t = self.trunc_order();
        let mut g = vec![Rat::zero(); t];
        g[0] = Rat::one();
        let half = ratio(1, 2);
        for n in 1..t {
            let mut acc = self.coeffs[n].clone();
            for j in 1..n {
                if !g[j].is_zero() && !g[n - j].is_zero() {
                    acc -= &g[j] * &g[n - j];
                }
            }
            g[n] = acc * &half;
        }
        Ok(Self { coeffs: g, prefactor: &self.prefactor * &half })
    }

    /// Substitute `q -> q^k` for `k >= 1`: coefficient of `q^{k n}` becomes
    /// `coeffs[n]`, and the prefactor is multiplied by `k`.
    pub fn substitute_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("substitution power must be >= 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let t = self.trunc_order();
        let new_t = k * (t - 1) + 1;
        let mut coeffs = vec![Rat::zero(); new_t];
        for (n, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[k * n] = c.clone();
            }
        }
        Ok(Self { coeffs, prefactor: &self.prefactor * rat(k as i64) })
    }

    /// The operator `q d/dq`: coefficient of `q^n` becomes `n * coeffs[n]`.
    /// Requires a zero prefactor.
    pub fn q_derivative(&self) -> Result<Self> {
        if !self.prefactor.is_zero() {
            return Err(Error::NonzeroPrefactor(self.prefactor.clone()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * rat(n as i64))
            .collect();
        Ok(Self { coeffs, prefactor: Rat::zero() })
    }

    /// Arithmetic-progression subseries: result coefficient `i` is
    /// `coeffs[n*i + k]`. Requires a zero prefactor and `0 <= k < n`.
    pub fn sift(&self, n: usize, k: usize) -> Result<Self> {
        if !self.prefactor.is_zero() {
            return Err(Error::NonzeroPrefactor(self.prefactor.clone()));
        }
        if n == 0 || k >= n {
            return Err(Error::ResidueOutOfRange { residue: k as i64, modulus: n as i64 });
        }
        let t = self.trunc_order();
        if k >= t {
            return Err(Error::InsufficientTruncation { have: t, need: k + 1 });
        }
        let new_t = (t - k).div_ceil(n);
        let coeffs = (0..new_t).map(|i| self.coeffs[n * i + k].clone()).collect();
        Ok(Self { coeffs, prefactor: Rat::zero() })
    }

    /// True when both series agree at every absolute exponent below `order`
    /// (and both know their coefficients that far).
    pub fn agrees_to(&self, other: &Self, order: i64) -> bool {
        let order = rat(order);
        if self.bound() < order || other.bound() < order {
            return false;
        }
        let mut exps: Vec<Rat> = Vec::new();
        for (base, coeffs) in [(&self.prefactor, &self.coeffs), (&other.prefactor, &other.coeffs)] {
            for (n, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let e = base + rat(n as i64);
                    if e < order {
                        exps.push(e);
                    }
                }
            }
        }
        exps.sort();
        exps.dedup();
        exps.into_iter().all(|e| self.abs_coeff(&e) == other.abs_coeff(&e))
    }
}

/// Truncated Cauchy convolution; iterates over the sparser operand.
fn convolve(a: &[Rat], b: &[Rat], trunc: usize, parallel: bool) -> Vec<Rat> {
    let (outer, inner) = {
        let nz_a = a.iter().take(trunc).filter(|c| !c.is_zero()).count();
        let nz_b = b.iter().take(trunc).filter(|c| !c.is_zero()).count();
        if nz_a <= nz_b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let support: Vec<usize> = outer
        .iter()
        .take(trunc)
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, _)| j)
        .collect();
    let coeff_at = |n: usize| -> Rat {
        let mut acc = Rat::zero();
        for &j in &support {
            if j > n {
                break;
            }
            let other = &inner[n - j];
            if !other.is_zero() {
                acc += &outer[j] * other;
            }
        }
        acc
    };
    if parallel {
        par::map_indices(trunc, coeff_at)
    } else {
        (0..trunc).map(coeff_at).collect()
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            prefactor: self.prefactor.clone(),
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::series_to_text(self))
    }
}
