//! Exact polynomials and rational functions in `q`.
//!
//! Unlike [`QSeries`](crate::series::QSeries), a [`QPoly`] carries complete
//! knowledge: arithmetic never truncates. [`qfactor`](crate::prodconv::qfactor)
//! works on [`RationalFunction`] values so its verification step can be an
//! exact polynomial identity rather than a series comparison.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::series::QSeries;

/// Dense exact polynomial; `coeffs[n]` is the coefficient of `q^n`.
/// Trailing zeros are stripped, and the zero polynomial is `coeffs == []`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// `c * q^n`.
    pub fn monomial(c: Rat, n: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    /// `1 - q^n`.
    pub fn one_minus_q(n: usize) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[0] = Rat::one();
        coeffs[n] = -Rat::one();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rat {
        self.coeffs.get(n).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `q = 0`, or `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Self::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Quotient by `q^n`; every coefficient below `n` must be zero.
    pub fn shift_down(&self, n: usize) -> Result<Self> {
        if self.coeffs.iter().take(n).any(|c| !c.is_zero()) {
            return Err(Error::InvalidArgument(format!("polynomial not divisible by q^{n}")));
        }
        Ok(Self::new(self.coeffs.iter().skip(n).cloned().collect()))
    }

    /// Euclidean division: `(quotient, remainder)` with
    /// `self = quotient * divisor + remainder` and `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let d = divisor.degree().unwrap();
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(d)];
        while rem.len() > d {
            let k = rem.len() - 1;
            let c = rem[k].clone();
            if !c.is_zero() {
                let factor = &c / &lead;
                quot[k - d] = factor.clone();
                for (i, b) in divisor.coeffs.iter().enumerate() {
                    if !b.is_zero() {
                        rem[k - d + i] -= &factor * b;
                    }
                }
            }
            rem.pop();
        }
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(divisor).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if let Some(d) = a.degree() {
            let lead = a.coeffs[d].clone();
            if !lead.is_one() {
                a = a.scale(&lead.recip());
            }
        }
        a
    }

    /// View as a truncated series: exact padding with zeros is legitimate
    /// because a polynomial's coefficients are all known.
    pub fn to_series(&self, trunc: usize) -> QSeries {
        let trunc = trunc.max(1);
        let mut coeffs = vec![Rat::zero(); trunc];
        for (i, c) in self.coeffs.iter().enumerate().take(trunc) {
            coeffs[i] = c.clone();
        }
        QSeries::from_coeffs(coeffs)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::text::poly_to_text(self))
    }
}

/// Quotient of two exact polynomials; the denominator is never zero.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: QPoly,
    den: QPoly,
}

impl RationalFunction {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: QPoly) -> Self {
        Self { num: p, den: QPoly::one() }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the fraction reduces to the constant 1.
    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            num: self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.num.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        Ok(Self { num: self.num.mul(&other.den), den: self.den.mul(&other.num) })
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(Self { num: self.num.pow(e as u64), den: self.den.pow(e as u64) })
        } else {
            if self.num.is_zero() {
                return Err(Error::DivisionByZeroPoly);
            }
            let k = e.unsigned_abs();
            Ok(Self { num: self.den.pow(k), den: self.num.pow(k) })
        }
    }

    /// Cancel the polynomial GCD and normalize the denominator to have
    /// constant-or-lowest coefficient 1.
    pub fn reduced(&self) -> Self {
        if self.num.is_zero() {
            return Self { num: QPoly::zero(), den: QPoly::one() };
        }
        let g = self.num.gcd(&self.den);
        let (mut num, mut den) = if g.is_one() {
            (self.num.clone(), self.den.clone())
        } else {
            (
                self.num.div_exact(&g).expect("gcd divides"),
                self.den.div_exact(&g).expect("gcd divides"),
            )
        };
        let v = den.valuation().expect("nonzero denominator");
        let c = den.coeff(v);
        if !c.is_one() {
            let inv = c.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Self { num, den }
    }

    /// Valuation at `q = 0`: `val(num) - val(den)`. `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        Some(self.num.valuation()? as i64 - self.den.valuation().expect("nonzero den") as i64)
    }

    /// Expand as a series to `O(q^trunc)` relative to the valuation: returns
    /// `(valuation, series)` with `series` starting at a nonzero constant.
    pub fn to_series(&self, trunc: usize) -> Result<(i64, QSeries)> {
        if self.num.is_zero() {
            return Ok((0, QSeries::zero(trunc)));
        }
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap();
        let num = self.num.shift_down(vn).expect("valuation");
        let den = self.den.shift_down(vd).expect("valuation");
        let series = num.to_series(trunc).mul(&den.to_series(trunc).inv()?);
        Ok((vn as i64 - vd as i64, series))
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn poly(v: &[i64]) -> QPoly {
        QPoly::new(v.iter().map(|&n| rat(n)).collect())
    }

    #[test]
    fn mul_and_normalize() {
        let p = poly(&[1, -1]);
        let q = poly(&[1, 1]);
        assert_eq!(p.mul(&q), poly(&[1, 0, -1]));
        assert_eq!(QPoly::new(vec![rat(1), rat(0), rat(0)]), poly(&[1]));
        assert_eq!(p.degree(), Some(1));
        assert!(QPoly::zero().degree().is_none());
    }

    #[test]
    fn division() {
        let p = poly(&[1, 0, -1]); // 1 - q^2 = (1-q)(1+q)
        assert_eq!(p.div_exact(&poly(&[1, -1])).unwrap(), poly(&[1, 1]));
        assert!(poly(&[1, 1, 1]).div_exact(&poly(&[1, -1])).is_none());
        let (q, r) = poly(&[2, 3, 1]).div_rem(&poly(&[1, 1])).unwrap();
        assert_eq!(q, poly(&[2, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_is_monic() {
        let a = poly(&[1, -1]).mul(&poly(&[1, 0, 1])).scale(&rat(3));
        let b = poly(&[1, -1]).mul(&poly(&[2, 2]));
        assert_eq!(a.gcd(&b), poly(&[-1, 1]));
    }

    #[test]
    fn rational_function_reduction() {
        let f = RationalFunction::new(poly(&[1, 0, -1]), poly(&[1, -1])).unwrap();
        let r = f.reduced();
        assert_eq!(r.num(), &poly(&[1, 1]));
        assert!(r.den().is_one());
        assert!(f.is_one() == false);
        let g = RationalFunction::new(poly(&[2, 2]), poly(&[2, 2])).unwrap();
        assert!(g.is_one());
    }

    #[test]
    fn series_expansion_with_valuation() {
        // q^2 / (1 - q) = q^2 * (1 + q + ...)
        let f = RationalFunction::new(poly(&[0, 0, 1]), poly(&[1, -1])).unwrap();
        let (v, s) = f.to_series(4).unwrap();
        assert_eq!(v, 2);
        assert_eq!(s, QSeries::from_coeffs(vec![rat(1); 4]));
    }
}
