//! Discovery of polynomial relations among q-series.
//!
//! The scheme throughout: build a monomial basis over the input series,
//! expand each monomial as a q-series, lay the coefficient sequences out as
//! the rows of a matrix, and compute the exact kernel of its transpose.
//! Candidate relations found from the solving window are then re-verified
//! against every coefficient both operands know; failures are dropped and
//! reported separately, so a too-small window can cost completeness but
//! never soundness.

mod linalg;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::par;
use crate::prodconv::{etamake, EtaProduct};
use crate::rat::{fmt_rat, rat, Rat};
use crate::series::QSeries;

/// Extra coefficient rows beyond the monomial count (before `topshift`).
const ROW_MARGIN: i64 = 20;

/// Which monomials span the search space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    /// All monomials of total degree exactly `n`.
    Homogeneous(u32),
    /// All monomials of total degree at most `n`, including the constant.
    Inhomogeneous(u32),
    /// `X^i Y^j` with `i <= deg1`, `j <= deg2`.
    Bivariate(u32, u32),
}

/// Deterministically ordered monomial list: graded lexicographic, higher
/// degree first, `X1 > X2 > ...` within a degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    pub vars: usize,
    pub mode: BasisMode,
    pub monomials: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn homogeneous(vars: usize, degree: u32) -> Self {
        let mut monomials = Vec::new();
        fixed_degree(vars, degree, &mut Vec::new(), &mut monomials);
        Self { vars, mode: BasisMode::Homogeneous(degree), monomials }
    }

    pub fn inhomogeneous(vars: usize, degree: u32) -> Self {
        let mut monomials = Vec::new();
        for d in (0..=degree).rev() {
            fixed_degree(vars, d, &mut Vec::new(), &mut monomials);
        }
        Self { vars, mode: BasisMode::Inhomogeneous(degree), monomials }
    }

    pub fn bivariate(deg1: u32, deg2: u32) -> Self {
        let mut monomials: Vec<Vec<u32>> = (0..=deg1)
            .flat_map(|i| (0..=deg2).map(move |j| vec![i, j]))
            .collect();
        monomials.sort_by(|a, b| {
            let (da, db) = (a[0] + a[1], b[0] + b[1]);
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        Self { vars: 2, mode: BasisMode::Bivariate(deg1, deg2), monomials }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    fn var_name(&self, i: usize) -> String {
        match self.mode {
            BasisMode::Bivariate(_, _) => ["X", "Y"][i].to_string(),
            _ => format!("X{}", i + 1),
        }
    }

    /// `X1^2*X2` style rendering; the all-zero monomial renders as `1`.
    pub fn monomial_text(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    self.var_name(i)
                } else {
                    format!("{}^{e}", self.var_name(i))
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

fn fixed_degree(vars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if vars == 1 {
        prefix.push(degree);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for e in (0..=degree).rev() {
        prefix.push(e);
        fixed_degree(vars - 1, degree - e, prefix, out);
        prefix.pop();
    }
}

/// An integer-coefficient relation over a monomial basis: the combination
/// `sum coeffs[m] * monomial_m(inputs)` vanishes to `O(q^verified_to)`.
/// Coefficient vectors are primitive with positive leading sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub basis: MonomialBasis,
    pub coeffs: Vec<BigInt>,
    pub verified_to: i64,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut first = true;
        for (mono, c) in self.basis.monomials.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let mag = c.magnitude().to_string();
            let text = self.basis.monomial_text(mono);
            let body = if text == "1" {
                mag
            } else if mag == "1" {
                text
            } else {
                format!("{mag}*{text}")
            };
            if first {
                if c.is_negative() {
                    out.push('-');
                }
                first = false;
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        if first {
            out.push('0');
        }
        write!(f, "{out}")
    }
}

/// Result set of a relation search, with the spurious candidates that failed
/// full re-verification reported separately.
#[derive(Debug, Clone)]
pub struct Findings {
    pub relations: Vec<Relation>,
    pub rejected: Vec<Vec<BigInt>>,
    pub rows_used: usize,
}

/// An expression of a target series as a polynomial in the inputs:
/// `f = sum expression[m] * monomial_m(inputs)`.
#[derive(Debug, Clone)]
pub struct ComboResult {
    pub basis: MonomialBasis,
    pub target_included: bool,
    /// Nonzero coefficients in basis order.
    pub expression: Vec<(Vec<u32>, Rat)>,
    /// Eta-product renderings of the involved monomials, when requested.
    pub eta_rendering: Option<Vec<(Vec<u32>, EtaProduct)>>,
    pub verified_to: i64,
}

impl fmt::Display for ComboResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut first = true;
        for (mono, c) in &self.expression {
            let mag = fmt_rat(&c.abs());
            let text = self.basis.monomial_text(mono);
            let body = if text == "1" {
                mag
            } else if mag == "1" {
                text
            } else {
                format!("{mag}*{text}")
            };
            if first {
                if c.is_negative() {
                    out.push('-');
                }
                first = false;
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&body);
        }
        if first {
            out.push('0');
        }
        write!(f, "{out}")
    }
}

/// Combo search results plus the row count used (the session's "# of terms").
#[derive(Debug, Clone)]
pub struct ComboFindings {
    pub combos: Vec<ComboResult>,
    pub rejected: Vec<Vec<BigInt>>,
    pub rows_used: usize,
}

/// Basis of the right nullspace of the transpose of `matrix` (rows-as-series
/// layout), as primitive integer vectors, first nonzero entry positive,
/// deterministic given row and column order.
pub fn kernel_basis(matrix: &[Vec<Rat>]) -> Vec<Vec<BigInt>> {
    if matrix.is_empty() {
        return Vec::new();
    }
    let rows = matrix.len();
    let cols = matrix[0].len();
    // Transpose, clearing denominators row by row.
    let transposed: Vec<Vec<BigInt>> = (0..cols)
        .map(|j| {
            let row: Vec<Rat> = (0..rows).map(|i| matrix[i][j].clone()).collect();
            linalg::clear_denominators(&row)
        })
        .collect();
    linalg::integer_nullspace(transposed, rows)
}

/// Common alignment window of a set of series: smallest prefactor and the
/// smallest knowledge bound. All prefactors must differ by integers.
fn common_window(series: &[&QSeries]) -> Result<(Rat, Rat)> {
    let rho = series
        .iter()
        .map(|s| s.prefactor().clone())
        .min()
        .ok_or_else(|| Error::InvalidArgument("empty series list".into()))?;
    for s in series {
        if !(s.prefactor() - &rho).is_integer() {
            return Err(Error::PrefactorMismatch(rho.clone(), s.prefactor().clone()));
        }
    }
    let bound = series.iter().map(|s| s.bound()).min().expect("nonempty");
    Ok((rho, bound))
}

/// Expand every basis monomial over the inputs, in parallel.
fn evaluate_basis(list: &[QSeries], basis: &MonomialBasis) -> Result<Vec<QSeries>> {
    let min_trunc = list.iter().map(|s| s.trunc_order()).min().unwrap_or(1);
    // Power tables per variable, up to the largest exponent used.
    let mut tables: Vec<Vec<QSeries>> = Vec::with_capacity(list.len());
    for (i, s) in list.iter().enumerate() {
        let max_e = basis.monomials.iter().map(|m| m[i]).max().unwrap_or(0);
        let mut t = vec![s.pow(0)?];
        for e in 1..=max_e {
            let prev = &t[(e - 1) as usize];
            t.push(prev.mul(s));
        }
        tables.push(t);
    }
    let values = par::map_slice(&basis.monomials, |mono| {
        let mut acc: Option<QSeries> = None;
        for (i, &e) in mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let factor = &tables[i][e as usize];
            acc = Some(match acc {
                None => factor.clone(),
                Some(a) => a.mul(factor),
            });
        }
        acc.unwrap_or_else(|| QSeries::one(min_trunc))
    });
    Ok(values)
}

/// Verification of `sum coeffs[i] * series[i] = 0` against every known
/// coefficient. `Ok(bound)` on success (the absolute order verified to),
/// `Err(exponent)` at the first failure.
fn verify_combination(series: &[QSeries], coeffs: &[BigInt]) -> std::result::Result<i64, i64> {
    let mut comb: Option<QSeries> = None;
    for (s, c) in series.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        let scaled = s.scale(&Rat::from_integer(c.clone()));
        comb = Some(match comb {
            None => scaled,
            Some(acc) => acc.checked_add(&scaled).expect("windows pre-aligned"),
        });
    }
    let Some(comb) = comb else {
        return Err(0);
    };
    if comb.is_zero() {
        Ok(comb.bound().floor().to_integer().try_into().unwrap_or(i64::MAX))
    } else {
        let v = comb.valuation().expect("nonzero");
        let e = comb.prefactor() + rat(v as i64);
        Err(e.floor().to_integer().try_into().unwrap_or(i64::MAX))
    }
}

/// Row count for the solving window: monomial rows (target included) plus a
/// margin of 20, adjusted by `topshift` and capped by the common truncation.
fn solving_rows(n_rows: usize, topshift: i64, avail: i64) -> Result<usize> {
    if avail < n_rows as i64 + 1 {
        return Err(Error::InsufficientTruncation {
            have: avail.max(0) as usize,
            need: n_rows + 1,
        });
    }
    let requested = (n_rows as i64 + ROW_MARGIN + topshift).max(n_rows as i64 + 1);
    Ok(requested.min(avail) as usize)
}

fn coefficient_matrix(series: &[&QSeries], rho: &Rat, rows: usize) -> Vec<Vec<Rat>> {
    series
        .iter()
        .map(|s| {
            (0..rows)
                .map(|j| {
                    s.abs_coeff(&(rho + rat(j as i64)))
                        .expect("row window within common bound")
                })
                .collect()
        })
        .collect()
}

fn find_relations(list: &[QSeries], basis: MonomialBasis, topshift: i64) -> Result<Findings> {
    let mons = evaluate_basis(list, &basis)?;
    let refs: Vec<&QSeries> = mons.iter().collect();
    let (rho, bound) = common_window(&refs)?;
    let avail: i64 = (&bound - &rho)
        .floor()
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidArgument("window out of range".into()))?;
    let rows = solving_rows(mons.len(), topshift, avail)?;
    let matrix = coefficient_matrix(&refs, &rho, rows);
    let kernel = kernel_basis(&matrix);
    let mut relations = Vec::new();
    let mut rejected = Vec::new();
    for v in kernel {
        match verify_combination(&mons, &v) {
            Ok(verified_to) => {
                relations.push(Relation { basis: basis.clone(), coeffs: v, verified_to })
            }
            Err(_) => rejected.push(v),
        }
    }
    Ok(Findings { relations, rejected, rows_used: rows })
}

/// Homogeneous polynomial relations of total degree `degree` among the
/// series in `list`.
pub fn findhom(list: &[QSeries], degree: u32, topshift: i64) -> Result<Findings> {
    if list.is_empty() || degree == 0 {
        return Err(Error::InvalidArgument("need series and degree >= 1".into()));
    }
    find_relations(list, MonomialBasis::homogeneous(list.len(), degree), topshift)
}

/// Relations over all monomials of total degree at most `degree`, including
/// the constant.
pub fn findnonhom(list: &[QSeries], degree: u32, topshift: i64) -> Result<Findings> {
    if list.is_empty() || degree == 0 {
        return Err(Error::InvalidArgument("need series and degree >= 1".into()));
    }
    find_relations(list, MonomialBasis::inhomogeneous(list.len(), degree), topshift)
}

fn find_combos(
    f: &QSeries,
    list: &[QSeries],
    basis: MonomialBasis,
    topshift: i64,
    eta_render: bool,
) -> Result<ComboFindings> {
    let mons = evaluate_basis(list, &basis)?;
    let mut all: Vec<&QSeries> = mons.iter().collect();
    all.push(f);
    let (rho, bound) = common_window(&all)?;
    let avail: i64 = (&bound - &rho)
        .floor()
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidArgument("window out of range".into()))?;
    let rows = solving_rows(all.len(), topshift, avail)?;
    let matrix = coefficient_matrix(&all, &rho, rows);
    let kernel = kernel_basis(&matrix);

    let mut combos = Vec::new();
    let mut rejected = Vec::new();
    let series_with_f: Vec<QSeries> = mons.iter().cloned().chain([f.clone()]).collect();
    for v in kernel {
        let f_coeff = v.last().expect("kernel vector");
        if f_coeff.is_zero() {
            continue; // relation among the basis alone, not a combination
        }
        let verified_to = match verify_combination(&series_with_f, &v) {
            Ok(vt) => vt,
            Err(_) => {
                rejected.push(v);
                continue;
            }
        };
        // Normalize the target's coefficient to -1: f = sum c_m * monomial.
        let scale = -Rat::from_integer(f_coeff.clone()).recip();
        let expression: Vec<(Vec<u32>, Rat)> = basis
            .monomials
            .iter()
            .zip(&v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), Rat::from_integer(c.clone()) * &scale))
            .collect();
        let eta_rendering = if eta_render {
            let mut renderings = Vec::new();
            for (mono, _) in &expression {
                let idx = basis.monomials.iter().position(|m| m == mono).expect("basis monomial");
                renderings.push((mono.clone(), etamake(&mons[idx], mons[idx].trunc_order())?));
            }
            Some(renderings)
        } else {
            None
        };
        combos.push(ComboResult {
            basis: basis.clone(),
            target_included: true,
            expression,
            eta_rendering,
            verified_to,
        });
    }
    Ok(ComboFindings { combos, rejected, rows_used: rows })
}

/// Express `f` as a homogeneous degree-`degree` polynomial in `list`.
pub fn findhomcombo(
    f: &QSeries,
    list: &[QSeries],
    degree: u32,
    topshift: i64,
    eta_render: bool,
) -> Result<ComboFindings> {
    if list.is_empty() || degree == 0 {
        return Err(Error::InvalidArgument("need series and degree >= 1".into()));
    }
    find_combos(f, list, MonomialBasis::homogeneous(list.len(), degree), topshift, eta_render)
}

/// Express `f` as a polynomial of total degree at most `degree` in `list`.
pub fn findnonhomcombo(
    f: &QSeries,
    list: &[QSeries],
    degree: u32,
    topshift: i64,
    eta_render: bool,
) -> Result<ComboFindings> {
    if list.is_empty() || degree == 0 {
        return Err(Error::InvalidArgument("need series and degree >= 1".into()));
    }
    find_combos(f, list, MonomialBasis::inhomogeneous(list.len(), degree), topshift, eta_render)
}

/// Polynomial relation `P(X, Y) = 0` between two series, with degree bounds.
/// When `check` is given the relation must hold to `O(q^check)`; verification
/// failure is reported distinctly from an empty kernel.
pub fn findpoly(
    x: &QSeries,
    y: &QSeries,
    deg1: u32,
    deg2: u32,
    check: Option<usize>,
) -> Result<Relation> {
    let basis = MonomialBasis::bivariate(deg1, deg2);
    let list = [x.clone(), y.clone()];
    let mons = evaluate_basis(&list, &basis)?;
    let refs: Vec<&QSeries> = mons.iter().collect();
    let (rho, bound) = common_window(&refs)?;
    let avail: i64 = (&bound - &rho)
        .floor()
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidArgument("window out of range".into()))?;
    if let Some(c) = check {
        if bound < rat(c as i64) {
            return Err(Error::InsufficientTruncation {
                have: avail.max(0) as usize,
                need: c,
            });
        }
    }
    let rows = solving_rows(mons.len(), 0, avail)?;
    let matrix = coefficient_matrix(&refs, &rho, rows);
    let kernel = kernel_basis(&matrix);
    if kernel.is_empty() {
        return Err(Error::NoPolynomialFound);
    }
    let mut first_failure = None;
    for v in kernel {
        match verify_combination(&mons, &v) {
            Ok(verified_to) => return Ok(Relation { basis, coeffs: v, verified_to }),
            Err(e) => first_failure = first_failure.or(Some(e)),
        }
    }
    Err(Error::VerificationFailed(first_failure.unwrap_or(0)))
}
