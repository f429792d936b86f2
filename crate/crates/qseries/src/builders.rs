//! Classical q-series and product builders.
//!
//! Rising q-factorials, Gaussian polynomials, eta products, theta functions,
//! Jacobi-type products, and the truncated series sides of the triple
//! product, quintuple product, and Winquist identities.
//!
//! The theta-style sums take an optional half-width `N`; when omitted, the
//! smallest `N` is chosen such that every term with index magnitude beyond
//! `N` has exponent at least the truncation order, so nothing representable
//! is silently lost.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::monomial::QMonomial;
use crate::poly::QPoly;
use crate::rat::{rat, ratio, Rat};
use crate::series::QSeries;

/// Accumulates `coeff * q^exp` terms with exact rational exponents and
/// normalizes them into `(prefactor, series)` form. All retained exponents
/// must share one fractional offset; negative exponents are rejected
/// outright (Laurent output is unsupported).
struct TermAccumulator {
    trunc: usize,
    delta: Option<Rat>,
    coeffs: Vec<Rat>,
}

impl TermAccumulator {
    fn new(trunc: usize) -> Self {
        Self { trunc: trunc.max(1), delta: None, coeffs: vec![Rat::zero(); trunc.max(1)] }
    }

    fn add(&mut self, coeff: Rat, exp: Rat) -> Result<()> {
        if exp.is_negative() {
            return Err(Error::NegativeExponent(exp));
        }
        let frac = crate::rat::fract(&exp);
        let int_part = (&exp - &frac).to_integer();
        let Ok(idx) = usize::try_from(int_part) else {
            return Ok(()); // far beyond any truncation we could hold
        };
        if idx >= self.trunc {
            return Ok(());
        }
        match &self.delta {
            None => self.delta = Some(frac),
            Some(d) if *d != frac => return Err(Error::MixedFractionalExponents),
            _ => {}
        }
        self.coeffs[idx] += coeff;
        Ok(())
    }

    fn finish(self) -> QSeries {
        let prefactor = self.delta.unwrap_or_else(Rat::zero);
        QSeries::with_prefactor(self.coeffs, prefactor)
    }
}

/// Smallest `m` from which the quadratic `lb` stays at or above `target`.
/// `lb` must be a quadratic in `m` with positive leading coefficient (or the
/// pointwise minimum handled by calling this once per branch).
fn quadratic_cutoff(lb: impl Fn(i64) -> Rat, target: &Rat) -> Result<i64> {
    let mut m = 0i64;
    loop {
        if lb(m) >= *target && lb(m + 1) >= *target && lb(m + 1) >= lb(m) {
            return Ok(m);
        }
        m += 1;
        if m > 100_000_000 {
            return Err(Error::InvalidArgument("summation half-width does not converge".into()));
        }
    }
}

fn require_integer_exponent(a: &QMonomial, what: &str) -> Result<usize> {
    if !a.exp().is_integer() {
        return Err(Error::InvalidArgument(format!(
            "{what} requires an integer q-power, got exponent {}",
            crate::rat::fmt_rat(a.exp())
        )));
    }
    usize::try_from(a.exp().to_integer())
        .map_err(|_| Error::InvalidArgument(format!("{what}: exponent out of range")))
}

/// Multiply `f` by `(1 - s*q^m)` in place, truncating at `f.len()`.
fn mul_binomial(coeffs: &mut [Rat], sign: i8, m: usize) {
    if m == 0 {
        // Constant factor (1 - s).
        let c = rat(1 - sign as i64);
        for x in coeffs.iter_mut() {
            *x *= &c;
        }
        return;
    }
    let t = coeffs.len();
    for k in (m..t).rev() {
        let (head, tail) = coeffs.split_at_mut(k);
        let prev = &head[k - m];
        if !prev.is_zero() {
            if sign > 0 {
                tail[0] -= prev;
            } else {
                tail[0] += prev;
            }
        }
    }
}

/// Rising q-factorial `(a; q^base)_n`: the truncated expansion of
/// `prod_{i=0}^{n-1} (1 - a*q^(i*base))`.
pub fn aqprod(a: &QMonomial, base: u32, n: u32, trunc: usize) -> Result<QSeries> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let e = require_integer_exponent(a, "aqprod")?;
    let trunc = trunc.max(1);
    let mut coeffs = vec![Rat::zero(); trunc];
    coeffs[0] = Rat::one();
    for i in 0..n as usize {
        let m = e + i * base as usize;
        if m >= trunc && m > 0 {
            continue; // factor is 1 + O(q^trunc)
        }
        mul_binomial(&mut coeffs, a.sign(), m);
    }
    Ok(QSeries::from_coeffs(coeffs))
}

/// Infinite rising q-factorial `(a; q^base)_infinity`, with factors whose
/// exponent reaches the truncation order omitted.
pub fn aqprod_inf(a: &QMonomial, base: u32, trunc: usize) -> Result<QSeries> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let e = require_integer_exponent(a, "aqprod_inf")?;
    let trunc = trunc.max(1);
    let mut coeffs = vec![Rat::zero(); trunc];
    coeffs[0] = Rat::one();
    let mut m = e;
    loop {
        if m >= trunc && m > 0 {
            break;
        }
        mul_binomial(&mut coeffs, a.sign(), m);
        m += base as usize;
        if m == e {
            break; // base 0 cannot happen, defensive
        }
    }
    Ok(QSeries::from_coeffs(coeffs))
}

/// Gaussian polynomial (q-binomial coefficient) `[n choose m]_q`, computed by
/// the Pascal recurrence `[n,m] = [n-1,m-1] + q^m [n-1,m]`, which keeps every
/// intermediate value an exact integer polynomial. Returns the zero
/// polynomial unless `0 <= m <= n`.
pub fn qbin(m: i64, n: i64) -> QPoly {
    if m < 0 || n < 0 || m > n {
        return QPoly::zero();
    }
    let n = n as usize;
    let mut row: Vec<QPoly> = vec![QPoly::one()];
    for i in 1..=n {
        let mut next: Vec<QPoly> = Vec::with_capacity(i + 1);
        for j in 0..=i {
            let left = if j > 0 { row.get(j - 1) } else { None };
            let right = row.get(j).map(|p| p.mul(&QPoly::monomial(Rat::one(), j)));
            let val = match (left, right) {
                (Some(l), Some(r)) => l.add(&r),
                (Some(l), None) => l.clone(),
                (None, Some(r)) => r,
                (None, None) => QPoly::zero(),
            };
            next.push(val);
        }
        row = next;
    }
    row.swap_remove(m as usize)
}

/// Euler product `prod (1 - q^(k n))` expanded by the pentagonal number
/// theorem: `sum_{j} (-1)^j q^(k j(3j-1)/2)` truncated to `O(q^trunc)`.
pub fn etaq(k: u32, trunc: usize) -> Result<QSeries> {
    if k == 0 {
        return Err(Error::InvalidArgument("etaq requires k >= 1".into()));
    }
    let k = k as usize;
    let trunc = trunc.max(1);
    let mut coeffs = vec![Rat::zero(); trunc];
    coeffs[0] = Rat::one();
    let mut j: usize = 1;
    loop {
        let g_pos = j * (3 * j - 1) / 2;
        let g_neg = j * (3 * j + 1) / 2;
        if k * g_pos >= trunc {
            break;
        }
        let sign = if j % 2 == 1 { -Rat::one() } else { Rat::one() };
        coeffs[k * g_pos] += &sign;
        if k * g_neg < trunc {
            coeffs[k * g_neg] += &sign;
        }
        j += 1;
    }
    Ok(QSeries::from_coeffs(coeffs))
}

/// Truncated theta series `sum_{i=-N}^{N} z^i q^(base * i^2)`.
/// With `n = None` the half-width is chosen automatically from `trunc`.
pub fn theta(z: &QMonomial, base: u32, n: Option<i64>, trunc: usize) -> Result<QSeries> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let b = rat(base as i64);
    let e = z.exp().clone();
    let target = rat(trunc as i64);
    let n = match n {
        Some(n) if n >= 0 => n,
        Some(n) => return Err(Error::InvalidArgument(format!("half-width must be >= 0, got {n}"))),
        None => {
            let pos = quadratic_cutoff(|m| &b * rat(m) * rat(m) + &e * rat(m), &target)?;
            let neg = quadratic_cutoff(|m| &b * rat(m) * rat(m) - &e * rat(m), &target)?;
            pos.max(neg)
        }
    };
    let mut acc = TermAccumulator::new(trunc);
    for i in -n..=n {
        let (sign, ze) = z.pow(i);
        let exp = ze + &b * rat(i) * rat(i);
        acc.add(rat(sign as i64), exp)?;
    }
    Ok(acc.finish())
}

/// `theta2(q) = sum q^((n+1/2)^2)` as `q^(1/4)` times an integer series:
/// prefactor 1/4, coefficient 2 at every exponent `n(n+1) < trunc`.
pub fn theta2(trunc: usize) -> QSeries {
    let trunc = trunc.max(1);
    let mut coeffs = vec![Rat::zero(); trunc];
    let mut n = 0usize;
    while n * (n + 1) < trunc {
        coeffs[n * (n + 1)] = rat(2);
        n += 1;
    }
    QSeries::with_prefactor(coeffs, ratio(1, 4))
}

/// `theta3(q) = 1 + 2 sum_{n>=1} q^(n^2)` truncated.
pub fn theta3(trunc: usize) -> QSeries {
    let trunc = trunc.max(1);
    let mut coeffs = vec![Rat::zero(); trunc];
    coeffs[0] = Rat::one();
    let mut n = 1usize;
    while n * n < trunc {
        coeffs[n * n] = rat(2);
        n += 1;
    }
    QSeries::from_coeffs(coeffs)
}

/// `theta4(q) = 1 + 2 sum_{n>=1} (-1)^n q^(n^2)` truncated.
pub fn theta4(trunc: usize) -> QSeries {
    let trunc = trunc.max(1);
    let mut coeffs = vec![Rat::zero(); trunc];
    coeffs[0] = Rat::one();
    let mut n = 1usize;
    while n * n < trunc {
        coeffs[n * n] = if n % 2 == 1 { rat(-2) } else { rat(2) };
        n += 1;
    }
    QSeries::from_coeffs(coeffs)
}

/// Jacobi-type infinite product `(q^a; q^b)_inf (q^(b-a); q^b)_inf`.
pub fn jacprod(a: u32, b: u32, trunc: usize) -> Result<QSeries> {
    if a == 0 || a >= b {
        return Err(Error::InvalidArgument(format!("jacprod requires 0 < a < b, got ({a}, {b})")));
    }
    let f = aqprod_inf(&QMonomial::q_pow(a), b, trunc)?;
    let g = aqprod_inf(&QMonomial::q_pow(b - a), b, trunc)?;
    Ok(f.mul(&g))
}

/// Series side of the triple product identity:
/// `sum_{n=-N}^{N} (-1)^n z^n q^(base * n(n-1)/2)`.
pub fn tripleprod(z: &QMonomial, base: u32, n: Option<i64>, trunc: usize) -> Result<QSeries> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let b = rat(base as i64);
    let e = z.exp().clone();
    let target = rat(trunc as i64);
    let half = ratio(1, 2);
    let weight = |i: i64| &b * rat(i) * rat(i - 1) * &half;
    let n = match n {
        Some(n) if n >= 0 => n,
        Some(n) => return Err(Error::InvalidArgument(format!("half-width must be >= 0, got {n}"))),
        None => {
            let pos = quadratic_cutoff(|m| weight(m) + &e * rat(m), &target)?;
            let neg = quadratic_cutoff(|m| weight(-m) - &e * rat(m), &target)?;
            pos.max(neg)
        }
    };
    let mut acc = TermAccumulator::new(trunc);
    for i in -n..=n {
        let (zsign, ze) = z.pow(i);
        let sign = if i.rem_euclid(2) == 1 { -zsign } else { zsign };
        acc.add(rat(sign as i64), ze + weight(i))?;
    }
    Ok(acc.finish())
}

/// Series side of the quintuple product identity:
/// `sum_m ((-z)^(-3m) - (-z)^(3m+1)) q^(base * m(3m+1)/2)`.
pub fn quinprod(z: &QMonomial, base: u32, n: Option<i64>, trunc: usize) -> Result<QSeries> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let b = rat(base as i64);
    let neg_z = z.negate();
    let target = rat(trunc as i64);
    let half = ratio(1, 2);
    let weight = |m: i64| &b * rat(m) * rat(3 * m + 1) * &half;
    let n = match n {
        Some(n) if n >= 0 => n,
        Some(n) => return Err(Error::InvalidArgument(format!("half-width must be >= 0, got {n}"))),
        None => {
            let mut cutoff = 0;
            for pick in 0..4 {
                let lb = |m: i64| {
                    let m = if pick < 2 { m } else { -m };
                    let k = if pick % 2 == 0 { -3 * m } else { 3 * m + 1 };
                    weight(m) + neg_z.exp() * rat(k)
                };
                cutoff = cutoff.max(quadratic_cutoff(lb, &target)?);
            }
            cutoff
        }
    };
    let mut acc = TermAccumulator::new(trunc);
    for m in -n..=n {
        let w = weight(m);
        let (s1, e1) = neg_z.pow(-3 * m);
        acc.add(rat(s1 as i64), e1 + &w)?;
        let (s2, e2) = neg_z.pow(3 * m + 1);
        acc.add(rat(-s2 as i64), e2 + &w)?;
    }
    Ok(acc.finish())
}

/// One factor `(a; q^base)_infinity` of a product identity, as data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PochhammerFactor {
    pub a: QMonomial,
    pub base: u32,
}

impl PochhammerFactor {
    /// Expand the factor as a truncated series.
    pub fn expand(&self, trunc: usize) -> Result<QSeries> {
        aqprod_inf(&self.a, self.base, trunc)
    }
}

impl fmt::Display for PochhammerFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.base == 1 { "q".to_string() } else { format!("q^{}", self.base) };
        write!(f, "({};{})_infinity", self.a, base)
    }
}

/// Product side of the quintuple product identity, instantiated at
/// `z` and `q -> q^base`: the five factors
/// `(-z;q)_inf (-q/z;q)_inf (z^2 q;q^2)_inf (q/z^2;q^2)_inf (q;q)_inf`.
pub fn quinprod_factors(z: &QMonomial, base: u32) -> Result<Vec<PochhammerFactor>> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let b = rat(base as i64);
    let s = z.sign();
    let e = z.exp().clone();
    let factor = |sign: i8, exp: Rat, fbase: u32| -> Result<PochhammerFactor> {
        Ok(PochhammerFactor { a: QMonomial::new(sign, exp)?, base: fbase })
    };
    Ok(vec![
        factor(-s, e.clone(), base)?,
        factor(-s, &b - &e, base)?,
        factor(1, rat(2) * &e + &b, 2 * base)?,
        factor(1, &b - rat(2) * &e, 2 * base)?,
        factor(1, b.clone(), base)?,
    ])
}

/// Series side of Winquist's identity at `a`, `b`, `q -> q^base`:
/// a double sum over `n in [0,N]`, `m in [-N,N]` with sign `(-1)^(n+m)`,
/// weight `q^(base*(3n(n+1)/2 + m(3m+1)/2))` and the two product terms
/// `(a^-3n - a^(3n+3))(b^-3m - b^(3m+1))` and
/// `(a^(-3m+1) - a^(3m+2))(b^(3n+2) - b^(-3n-1))`.
pub fn winquist(
    a: &QMonomial,
    b: &QMonomial,
    base: u32,
    n: Option<i64>,
    trunc: usize,
) -> Result<QSeries> {
    if base == 0 {
        return Err(Error::InvalidArgument("base exponent must be >= 1".into()));
    }
    let bq = rat(base as i64);
    let target = rat(trunc as i64);
    let half = ratio(1, 2);
    let n = match n {
        Some(n) if n >= 0 => n,
        Some(n) => return Err(Error::InvalidArgument(format!("half-width must be >= 0, got {n}"))),
        None => {
            // Any term at index magnitude M has exponent at least
            // base*M(3M-1)/2 - 3(M+1)(a.exp + b.exp).
            let slack = a.exp() + b.exp();
            let lb = |m: i64| {
                &bq * rat(m) * rat(3 * m - 1) * &half - rat(3) * rat(m + 1) * &slack
            };
            quadratic_cutoff(lb, &target)?
        }
    };
    let mut acc = TermAccumulator::new(trunc);
    let weight = |nn: i64, mm: i64| {
        &bq * (rat(3) * rat(nn) * rat(nn + 1) * &half + rat(mm) * rat(3 * mm + 1) * &half)
    };
    for nn in 0..=n {
        for mm in -n..=n {
            let sign = if (nn + mm).rem_euclid(2) == 1 { rat(-1) } else { rat(1) };
            let w = weight(nn, mm);
            // (x1 - x2)(y1 - y2) expands to four signed monomials.
            let mut cross = |xp: (i8, Rat), yp: (i8, Rat), outer: &Rat| -> Result<()> {
                let (xs, xe) = xp;
                let (ys, ye) = yp;
                let c = rat((xs * ys) as i64) * outer;
                acc.add(c, xe + ye + &w)
            };
            // Part one.
            cross(a.pow(-3 * nn), b.pow(-3 * mm), &sign)?;
            cross(a.pow(-3 * nn), b.pow(3 * mm + 1), &-sign.clone())?;
            cross(a.pow(3 * nn + 3), b.pow(-3 * mm), &-sign.clone())?;
            cross(a.pow(3 * nn + 3), b.pow(3 * mm + 1), &sign)?;
            // Part two.
            cross(a.pow(-3 * mm + 1), b.pow(3 * nn + 2), &sign)?;
            cross(a.pow(-3 * mm + 1), b.pow(-3 * nn - 1), &-sign.clone())?;
            cross(a.pow(3 * mm + 2), b.pow(3 * nn + 2), &-sign.clone())?;
            cross(a.pow(3 * mm + 2), b.pow(-3 * nn - 1), &sign)?;
        }
    }
    Ok(acc.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    // Brute-force oracles, independent of the series machinery.

    /// Partition counts p(0..trunc) by dynamic programming over parts.
    fn partition_counts(trunc: usize) -> Vec<Rat> {
        let mut dp = vec![Rat::zero(); trunc];
        dp[0] = Rat::one();
        for part in 1..trunc {
            for n in part..trunc {
                let prev = dp[n - part].clone();
                dp[n] += prev;
            }
        }
        dp
    }

    /// Counts of partitions into distinct parts.
    fn distinct_partition_counts(trunc: usize) -> Vec<Rat> {
        let mut dp = vec![Rat::zero(); trunc];
        dp[0] = Rat::one();
        for part in 1..trunc {
            for n in (part..trunc).rev() {
                let prev = dp[n - part].clone();
                dp[n] += prev;
            }
        }
        dp
    }

    /// Naive expansion of prod_{n>=1} (1 - q^(k n)) by direct multiplication.
    fn naive_eta(k: usize, trunc: usize) -> Vec<Rat> {
        let mut coeffs = vec![Rat::zero(); trunc];
        coeffs[0] = Rat::one();
        let mut m = k;
        while m < trunc {
            for idx in (m..trunc).rev() {
                let prev = coeffs[idx - m].clone();
                coeffs[idx] -= prev;
            }
            m += k;
        }
        coeffs
    }

    /// Counts of partitions fitting in an `m x w` box (at most `m` parts,
    /// each at most `w`), the Gaussian polynomial oracle.
    fn box_partitions(m: usize, w: usize) -> Vec<Rat> {
        fn count(
            max_part: usize,
            parts_left: usize,
            remaining: usize,
            memo: &mut std::collections::HashMap<(usize, usize, usize), u128>,
        ) -> u128 {
            if remaining == 0 {
                return 1;
            }
            if parts_left == 0 || max_part == 0 {
                return 0;
            }
            if let Some(&v) = memo.get(&(max_part, parts_left, remaining)) {
                return v;
            }
            let mut acc = 0u128;
            for p in 1..=max_part.min(remaining) {
                acc += count(p, parts_left - 1, remaining - p, memo);
            }
            memo.insert((max_part, parts_left, remaining), acc);
            acc
        }
        let mut memo = std::collections::HashMap::new();
        (0..=m * w).map(|s| rat(count(w, m, s, &mut memo) as i64)).collect()
    }

    #[test]
    fn aqprod_examples() {
        let one = aqprod(&QMonomial::q(), 1, 0, 10).unwrap();
        assert_eq!(one, QSeries::one(10));
        // (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let f = aqprod(&QMonomial::q(), 1, 2, 10).unwrap();
        let mut expect = vec![rat(0); 10];
        expect[0] = rat(1);
        expect[1] = rat(-1);
        expect[2] = rat(-1);
        expect[3] = rat(1);
        assert_eq!(f, QSeries::from_coeffs(expect));
        let g = aqprod(&QMonomial::neg_q_pow(1), 1, 1, 10).unwrap();
        assert_eq!(g.coeff(0).unwrap(), &rat(1));
        assert_eq!(g.coeff(1).unwrap(), &rat(1));
    }

    #[test]
    fn aqprod_inf_matches_etaq_and_counts_distinct_partitions() {
        let t = 40;
        assert_eq!(aqprod_inf(&QMonomial::q(), 1, t).unwrap(), etaq(1, t).unwrap());
        // (q; q^5)_inf: multiply factors (1-q)(1-q^6)(1-q^11)... by hand.
        let f = aqprod_inf(&QMonomial::q(), 5, 20).unwrap();
        let mut hand = QSeries::one(20);
        for m in [1usize, 6, 11, 16] {
            let mut c = vec![rat(0); 20];
            c[0] = rat(1);
            c[m] = rat(-1);
            hand = hand.mul(&QSeries::from_coeffs(c));
        }
        assert_eq!(f, hand);
        // (-q; q)_inf generates distinct partitions.
        let pd = aqprod_inf(&QMonomial::neg_q_pow(1), 1, 10).unwrap();
        assert_eq!(pd.coeffs(), &distinct_partition_counts(10)[..]);
        assert_eq!(
            distinct_partition_counts(10).iter().map(crate::rat::fmt_rat).collect::<Vec<_>>(),
            ["1", "1", "1", "2", "2", "3", "4", "5", "6", "8"]
        );
    }

    #[test]
    fn qbin_examples_and_box_oracle() {
        assert!(qbin(2, 1).is_zero());
        assert!(qbin(-1, 3).is_zero());
        assert_eq!(qbin(0, 5), QPoly::one());
        assert_eq!(qbin(1, 2), QPoly::new(vec![rat(1), rat(1)]));
        // qbin(2,4) = 1 + q + 2q^2 + q^3 + q^4 counts partitions in a 2x2 box.
        let g = qbin(2, 4);
        assert_eq!(g.coeffs(), &box_partitions(2, 2)[..]);
        assert_eq!(
            g,
            QPoly::new(vec![rat(1), rat(1), rat(2), rat(1), rat(1)])
        );
        // Degree, symmetry, positivity, column sum for a larger case.
        let m = 3i64;
        let n = 8i64;
        let g = qbin(m, n);
        assert_eq!(g.degree(), Some((m * (n - m)) as usize));
        assert_eq!(g.coeffs(), &box_partitions(m as usize, (n - m) as usize)[..]);
        assert_eq!(qbin(n - m, n), g);
        assert!(g.coeffs().iter().all(|c| c.is_integer() && !c.is_negative()));
        let sum: Rat = g.coeffs().iter().sum();
        assert_eq!(sum, rat(56)); // C(8,3)
    }

    #[test]
    fn etaq_pentagonal_numbers() {
        // 1 - q - q^2 + q^5 + q^7 - q^12 + O(q^13)
        let f = etaq(1, 13).unwrap();
        let mut expect = vec![rat(0); 13];
        for (e, c) in [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)] {
            expect[e as usize] = rat(c);
        }
        assert_eq!(f, QSeries::from_coeffs(expect));
        // Against direct multiplication, for several k and orders.
        for k in 1..=4usize {
            let t = 60;
            assert_eq!(etaq(k as u32, t).unwrap().coeffs(), &naive_eta(k, t)[..]);
        }
        // etaq(3,10) = 1 - q^3 - q^6.
        let f = etaq(3, 10).unwrap();
        assert_eq!(crate::text::series_to_text(&f), "1 - q^3 - q^6 + O(q^10)");
        // Consistency with substitution.
        let t = 50usize;
        let k = 5usize;
        let sub = etaq(1, t.div_ceil(k) + 1).unwrap().substitute_power(k).unwrap().truncated(t);
        assert_eq!(etaq(k as u32, t).unwrap().truncated(sub.trunc_order()), sub);
    }

    #[test]
    fn partition_generating_function() {
        let t = 60;
        let p = etaq(1, t).unwrap().inv().unwrap();
        assert_eq!(p.coeffs(), &partition_counts(t)[..]);
        assert_eq!(p.coeff(10).unwrap(), &rat(42));
        let head: Vec<String> = p.coeffs()[..7].iter().map(crate::rat::fmt_rat).collect();
        assert_eq!(head, ["1", "1", "2", "3", "5", "7", "11"]);
    }

    #[test]
    fn theta_family() {
        let t3 = theta3(20);
        assert_eq!(crate::text::series_to_text(&t3), "1 + 2*q + 2*q^4 + 2*q^9 + 2*q^16 + O(q^20)");
        let t4 = theta4(20);
        assert_eq!(crate::text::series_to_text(&t4), "1 - 2*q + 2*q^4 - 2*q^9 + 2*q^16 + O(q^20)");
        // theta4[n] = (-1)^n theta3[n].
        for n in 0..20 {
            let sign = if n % 2 == 1 { rat(-1) } else { rat(1) };
            assert_eq!(t4.coeff(n).unwrap(), &(t3.coeff(n).unwrap() * sign));
        }
        let t2 = theta2(21);
        assert_eq!(t2.prefactor(), &ratio(1, 4));
        assert_eq!(
            crate::text::series_to_text(&t2),
            "q^(1/4) * (2 + 2*q^2 + 2*q^6 + 2*q^12 + 2*q^20 + O(q^21))"
        );
        // theta with z = 1 reproduces theta3.
        let t = theta(&QMonomial::one(), 1, None, 20).unwrap();
        assert_eq!(t, theta3(20));
        // theta with z = -q against theta4 under q -> q^2 ... theta(-q,1) has
        // exponents i^2 + i; theta4(q) = theta(-1, 1). Direct check:
        let t = theta(&QMonomial::neg_one(), 1, None, 20).unwrap();
        assert_eq!(t, theta4(20));
    }

    #[test]
    fn theta_rejects_laurent_terms() {
        // z = q^10, base 1: exponent at i = -5 is i^2 - 50 < 0.
        let err = theta(&QMonomial::q_pow(10), 1, Some(5), 30);
        assert!(matches!(err, Err(Error::NegativeExponent(_))));
    }

    #[test]
    fn theta_session_numerator() {
        // theta(q^10, q^25, 5): exponents 25 i^2 + 10 i, the U numerator.
        let t = theta(&QMonomial::q_pow(10), 25, Some(5), 700).unwrap();
        let mut exps: Vec<usize> = t
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| e)
            .collect();
        exps.sort();
        assert_eq!(exps, vec![0, 15, 35, 80, 120, 195, 255, 360, 440, 575, 675]);
    }

    #[test]
    fn jacprod_symmetry_and_values() {
        let t = 40;
        assert_eq!(jacprod(1, 5, t).unwrap(), jacprod(4, 5, t).unwrap());
        // jacprod(1,2) = (q;q^2)_inf^2.
        let f = aqprod_inf(&QMonomial::q(), 2, t).unwrap();
        assert_eq!(jacprod(1, 2, t).unwrap(), f.mul(&f));
        assert!(jacprod(0, 5, t).is_err());
        assert!(jacprod(5, 5, t).is_err());
    }

    #[test]
    fn tripleprod_pentagonal_instance() {
        // tripleprod(q, q^3): Euler's pentagonal theorem.
        let f = tripleprod(&QMonomial::q(), 3, Some(10), 60).unwrap();
        let mut expect = vec![rat(0); 60];
        for (e, c) in [
            (0i64, 1i64),
            (1, -1),
            (2, -1),
            (5, 1),
            (7, 1),
            (12, -1),
            (15, -1),
            (22, 1),
            (26, 1),
            (35, -1),
            (40, -1),
            (51, 1),
            (57, 1),
        ] {
            expect[e as usize] = rat(c);
        }
        assert_eq!(f, QSeries::from_coeffs(expect));
        // Same result with automatic half-width.
        assert_eq!(tripleprod(&QMonomial::q(), 3, None, 60).unwrap(), f);
        assert_eq!(f, etaq(1, 60).unwrap());
    }

    #[test]
    fn tripleprod_equals_product_form() {
        // (z;q)_inf (q/z;q)_inf (q;q)_inf with z = -q^2, base 7.
        let t = 80;
        let z = QMonomial::neg_q_pow(2);
        let series = tripleprod(&z, 7, None, t).unwrap();
        let product = aqprod_inf(&z, 7, t)
            .unwrap()
            .mul(&aqprod_inf(&QMonomial::neg_q_pow(5), 7, t).unwrap())
            .mul(&etaq(7, t).unwrap());
        assert_eq!(series, product);
    }

    #[test]
    fn quinprod_series_and_factors() {
        // quinprod(q, q^5) matches the mod-5 dissection values.
        let f = quinprod(&QMonomial::q(), 5, Some(20), 100).unwrap();
        let mut expect = vec![rat(0); 100];
        for (e, c) in [
            (0i64, 1i64),
            (1, 1),
            (3, -1),
            (7, -1),
            (8, -1),
            (14, -1),
            (20, 1),
            (29, 1),
            (31, 1),
            (42, 1),
            (52, -1),
            (66, -1),
            (69, -1),
            (85, -1),
            (99, 1),
        ] {
            expect[e as usize] = rat(c);
        }
        assert_eq!(f, QSeries::from_coeffs(expect));
        assert_eq!(quinprod(&QMonomial::q(), 5, None, 100).unwrap(), f);
        assert_eq!(f.coeff(0).unwrap(), &rat(1));

        // Product side: five factors, instantiated at z = q, base 5.
        let factors = quinprod_factors(&QMonomial::q(), 5).unwrap();
        assert_eq!(factors.len(), 5);
        let rendered: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            rendered,
            vec![
                "(-q;q^5)_infinity",
                "(-q^4;q^5)_infinity",
                "(q^7;q^10)_infinity",
                "(q^3;q^10)_infinity",
                "(q^5;q^5)_infinity"
            ]
        );
        let mut product = QSeries::one(100);
        for fac in &factors {
            product = product.mul(&fac.expand(100).unwrap());
        }
        assert_eq!(product, f);
    }

    #[test]
    fn quinprod_equals_product_form_other_instance() {
        let t = 90;
        let z = QMonomial::q_pow(2);
        let series = quinprod(&z, 7, None, t).unwrap();
        let mut product = QSeries::one(t);
        for fac in quinprod_factors(&z, 7).unwrap() {
            product = product.mul(&fac.expand(t).unwrap());
        }
        assert_eq!(series, product);
    }

    #[test]
    fn winquist_session_values() {
        let f = winquist(&QMonomial::q_pow(5), &QMonomial::q_pow(3), 11, Some(10), 9).unwrap();
        assert_eq!(crate::text::series_to_text(&f), "1 - q^2 - 2*q^3 + q^5 + q^7 + O(q^9)");
        assert_eq!(f.coeff(0).unwrap(), &rat(1));
        // Automatic half-width agrees.
        let g = winquist(&QMonomial::q_pow(5), &QMonomial::q_pow(3), 11, None, 9).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn winquist_equals_nine_factor_product() {
        // a = q^5, b = q^3, base 11: the eight Pochhammer factors and (q;q)^2.
        let t = 60;
        let series = winquist(&QMonomial::q_pow(5), &QMonomial::q_pow(3), 11, None, t).unwrap();
        let exps = [5u32, 6, 3, 8, 8, 3, 2, 9];
        let mut product = etaq(11, t).unwrap();
        product = product.mul(&etaq(11, t).unwrap());
        for e in exps {
            product = product.mul(&aqprod_inf(&QMonomial::q_pow(e), 11, t).unwrap());
        }
        assert!(series.agrees_to(&product, t as i64));
    }
}
