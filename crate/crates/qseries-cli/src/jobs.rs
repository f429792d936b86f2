//! Subcommand dispatch and rendering.
//!
//! Every job reads expressions, runs one library operation, and renders the
//! result in the selected format. Identical invocations produce
//! byte-identical output; the JSON rendering is the stability contract.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use qseries::prodconv::{
    etamake, jac2prod, jac2series, jacprodmake, prodmake_normalized, qfactor, EtaProduct,
    JacProduct, QProduct,
};
use qseries::rat::{fmt_rat, rat};
use qseries::relations::{
    findhom, findhomcombo, findnonhom, findnonhomcombo, findpoly, ComboFindings, Findings,
    Relation,
};
use qseries::series::QSeries;
use qseries::text::series_to_text;

use crate::expr::{evaluate, parse_expression, parse_jac, EvalCtx, EvalError, Value};

#[derive(Debug, Parser)]
#[command(
    name = "qseries",
    version,
    about = "Exact q-series: classical series/products, product recognition, relation discovery"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format (json is the stability contract)
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct ExprInput {
    /// Inline expression
    #[arg(long)]
    pub expr: Option<String>,
    /// File containing the expression
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ListInput {
    /// Series expression (repeat for each list member)
    #[arg(long = "expr")]
    pub exprs: Vec<String>,
    /// File with one expression per line (appended after --expr entries)
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an expression and print its series expansion
    Expand {
        #[command(flatten)]
        input: ExprInput,
        /// Truncation order for exact (untruncated) expressions
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Convert a series into an infinite product
    Prodmake {
        #[command(flatten)]
        input: ExprInput,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
        /// Product order (defaults to the series truncation)
        #[arg(long)]
        order: Option<usize>,
    },
    /// Factor an exact rational function into a finite q-product
    Qfactor {
        #[command(flatten)]
        input: ExprInput,
        /// Largest factor exponent to consider (default 4d+3)
        #[arg(long)]
        max_exp: Option<usize>,
    },
    /// Write a series as a product of eta functions
    Etamake {
        #[command(flatten)]
        input: ExprInput,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Convert a series into a Jacobi-type theta product
    Jacprodmake {
        #[command(flatten)]
        input: ExprInput,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
        #[arg(long)]
        order: Option<usize>,
        /// Largest candidate period (default (order-1)/2)
        #[arg(long)]
        max_period: Option<usize>,
    },
    /// Expand a JAC expression into (q^a;q^b)_infinity factors
    Jac2prod {
        /// Jacobi-product expression, e.g. "JAC(0,5,infinity)/JAC(1,5,infinity)"
        #[arg(long)]
        jac: String,
    },
    /// Expand a JAC expression into a q-series via theta series
    Jac2series {
        #[arg(long)]
        jac: String,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Extract the arithmetic progression a(n*i + k) of a series
    Sift {
        #[command(flatten)]
        input: ExprInput,
        /// Modulus
        #[arg(short = 'n', long = "modulus")]
        n: usize,
        /// Residue class
        #[arg(short = 'k', long = "residue")]
        k: usize,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Homogeneous polynomial relations among series
    Findhom {
        #[command(flatten)]
        input: ListInput,
        /// Degree of the sought relations
        #[arg(short = 'n', long = "degree")]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        topshift: i64,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Polynomial relations of bounded total degree among series
    Findnonhom {
        #[command(flatten)]
        input: ListInput,
        #[arg(short = 'n', long = "degree")]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        topshift: i64,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Express a target series as a homogeneous polynomial in the inputs
    Findhomcombo {
        /// Target series expression
        #[arg(long)]
        target: String,
        #[command(flatten)]
        input: ListInput,
        #[arg(short = 'n', long = "degree")]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        topshift: i64,
        /// Render each monomial as an eta product
        #[arg(long)]
        eta: bool,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Express a target series as a polynomial of bounded degree
    Findnonhomcombo {
        #[arg(long)]
        target: String,
        #[command(flatten)]
        input: ListInput,
        #[arg(short = 'n', long = "degree")]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        topshift: i64,
        #[arg(long)]
        eta: bool,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Polynomial relation P(X,Y) = 0 between two series
    Findpoly {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        deg1: u32,
        #[arg(long)]
        deg2: u32,
        /// Require verification to O(q^check)
        #[arg(long)]
        check: Option<usize>,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
    /// Check that two expressions agree as series
    CheckIdentity {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(short = 'T', long, default_value_t = 100)]
        trunc: usize,
    },
}

#[derive(Debug)]
pub enum JobError {
    Usage(String),
    Domain(String),
}

impl JobError {
    pub fn exit_code(&self) -> u8 {
        match self {
            JobError::Usage(_) => 2,
            JobError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobError::Usage(m) => write!(f, "usage: {m}"),
            JobError::Domain(m) => write!(f, "{m}"),
        }
    }
}

impl From<EvalError> for JobError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Usage { .. } => JobError::Usage(e.to_string()),
            EvalError::Domain(d) => JobError::Domain(d.to_string()),
        }
    }
}

impl From<qseries::Error> for JobError {
    fn from(e: qseries::Error) -> Self {
        JobError::Domain(e.to_string())
    }
}

#[derive(Debug)]
pub struct JobOutput {
    pub stdout: String,
}

/// Parse argv-style arguments and run the job; used by tests.
pub fn run_args<I, S>(args: I) -> Result<JobOutput, JobError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| JobError::Usage(e.to_string()))?;
    run_job(&cli)
}

fn read_expr(input: &ExprInput) -> Result<String, JobError> {
    match (&input.expr, &input.input) {
        (Some(e), None) => Ok(e.clone()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| JobError::Usage(format!("cannot read {}: {e}", path.display()))),
        _ => Err(JobError::Usage("provide exactly one of --expr or --in".into())),
    }
}

fn read_list(input: &ListInput) -> Result<Vec<String>, JobError> {
    let mut exprs = input.exprs.clone();
    if let Some(path) = &input.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| JobError::Usage(format!("cannot read {}: {e}", path.display())))?;
        exprs.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
    }
    if exprs.is_empty() {
        return Err(JobError::Usage("no input series given (--expr or --in)".into()));
    }
    Ok(exprs)
}

fn eval_series(text: &str, trunc: usize) -> Result<QSeries, JobError> {
    let ast = parse_expression(text)?;
    let mut ctx = EvalCtx::new(trunc);
    Ok(evaluate(&ast, &mut ctx)?.into_series(trunc)?)
}

fn eval_series_list(texts: &[String], trunc: usize) -> Result<Vec<QSeries>, JobError> {
    texts.iter().map(|t| eval_series(t, trunc)).collect()
}

pub fn run_job(cli: &Cli) -> Result<JobOutput, JobError> {
    let fmt = cli.format;
    let out = match &cli.command {
        Command::Expand { input, trunc } => {
            let s = eval_series(&read_expr(input)?, *trunc)?;
            render(fmt, series_to_text(&s) + "\n", series_json(&s))
        }
        Command::Prodmake { input, trunc, order } => {
            let s = eval_series(&read_expr(input)?, *trunc)?;
            let p = prodmake_normalized(&s, order.unwrap_or_else(|| s.trunc_order()))?;
            render(fmt, format!("{p}\n"), qproduct_json(&p))
        }
        Command::Qfactor { input, max_exp } => {
            let ast = parse_expression(&read_expr(input)?)?;
            let mut ctx = EvalCtx::new(1);
            let value = evaluate(&ast, &mut ctx)?;
            let Value::Exact(exact) = value else {
                return Err(JobError::Usage(
                    "qfactor requires an exact rational function (no truncated builders)".into(),
                ));
            };
            let rf = exact
                .to_rational_function()
                .ok_or_else(|| JobError::Domain(qseries::Error::PoleAtZero.to_string()))?;
            let (p, rem) = qfactor(&rf, *max_exp)?;
            let rem_text =
                if rem.is_one() { "1".to_string() } else { format!("{rem}") };
            render(
                fmt,
                format!("product: {p}\nremainder: {rem_text}\n"),
                json!({
                    "type": "qfactor",
                    "product": qproduct_json(&p),
                    "remainder": {
                        "num": qseries::text::poly_to_text(rem.num()),
                        "den": qseries::text::poly_to_text(rem.den()),
                        "is_one": rem.is_one(),
                    },
                }),
            )
        }
        Command::Etamake { input, trunc, order } => {
            let s = eval_series(&read_expr(input)?, *trunc)?;
            let p = etamake(&s, order.unwrap_or_else(|| s.trunc_order()))?;
            render(fmt, format!("{p}\n"), etaproduct_json(&p))
        }
        Command::Jacprodmake { input, trunc, order, max_period } => {
            let s = eval_series(&read_expr(input)?, *trunc)?;
            let j = jacprodmake(&s, order.unwrap_or_else(|| s.trunc_order()), *max_period)?;
            render(fmt, format!("{j}\n"), jacproduct_json(&j))
        }
        Command::Jac2prod { jac } => {
            let j = parse_jac(jac)?;
            let terms = jac2prod(&j);
            let mut parts: Vec<String> = Vec::new();
            if !num_traits::One::is_one(&j.leading_coeff) {
                parts.push(fmt_rat(&j.leading_coeff));
            }
            if j.q_valuation > 0 {
                parts.push(if j.q_valuation == 1 {
                    "q".to_string()
                } else {
                    format!("q^{}", j.q_valuation)
                });
            }
            parts.extend(terms.iter().map(|t| t.to_string()));
            let text = if parts.is_empty() { "1".to_string() } else { parts.join(" * ") };
            render(
                fmt,
                text + "\n",
                json!({
                    "type": "qpochhammer_product",
                    "leading_coeff": fmt_rat(&j.leading_coeff),
                    "q_valuation": j.q_valuation,
                    "factors": terms
                        .iter()
                        .map(|t| json!([t.a, t.b, fmt_rat(&t.exponent)]))
                        .collect::<Vec<_>>(),
                }),
            )
        }
        Command::Jac2series { jac, trunc } => {
            let j = parse_jac(jac)?;
            let s = jac2series(&j, *trunc)?;
            render(fmt, series_to_text(&s) + "\n", series_json(&s))
        }
        Command::Sift { input, n, k, trunc } => {
            let s = eval_series(&read_expr(input)?, *trunc)?;
            let sifted = s.sift(*n, *k)?;
            render(fmt, series_to_text(&sifted) + "\n", series_json(&sifted))
        }
        Command::Findhom { input, degree, topshift, trunc } => {
            let series = eval_series_list(&read_list(input)?, *trunc)?;
            let findings = findhom(&series, *degree, *topshift)?;
            render_findings(fmt, &findings, *degree, "RELATIONS")
        }
        Command::Findnonhom { input, degree, topshift, trunc } => {
            let series = eval_series_list(&read_list(input)?, *trunc)?;
            let findings = findnonhom(&series, *degree, *topshift)?;
            render_findings(fmt, &findings, *degree, "RELATIONS")
        }
        Command::Findhomcombo { target, input, degree, topshift, eta, trunc } => {
            let f = eval_series(target, *trunc)?;
            let series = eval_series_list(&read_list(input)?, *trunc)?;
            let found = findhomcombo(&f, &series, *degree, *topshift, *eta)?;
            render_combos(fmt, &found, *degree)
        }
        Command::Findnonhomcombo { target, input, degree, topshift, eta, trunc } => {
            let f = eval_series(target, *trunc)?;
            let series = eval_series_list(&read_list(input)?, *trunc)?;
            let found = findnonhomcombo(&f, &series, *degree, *topshift, *eta)?;
            render_combos(fmt, &found, *degree)
        }
        Command::Findpoly { x, y, deg1, deg2, check, trunc } => {
            let xs = eval_series(x, *trunc)?;
            let ys = eval_series(y, *trunc)?;
            let rel = findpoly(&xs, &ys, *deg1, *deg2, *check)?;
            let mons = rel.basis.len();
            render(
                fmt,
                format!(
                    "dims , {mons}\nthe polynomial is\n{rel}\nverified to O(q^{})\n",
                    rel.verified_to
                ),
                json!({
                    "type": "polynomial_relation",
                    "monomials": rel.basis.monomials,
                    "coeffs": rel.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "text": rel.to_string(),
                    "verified_to": rel.verified_to,
                }),
            )
        }
        Command::CheckIdentity { lhs, rhs, trunc } => {
            let l = eval_series(lhs, *trunc)?;
            let r = eval_series(rhs, *trunc)?;
            let bound = rat(*trunc as i64).min(l.bound()).min(r.bound());
            let order: i64 = bound
                .floor()
                .to_integer()
                .try_into()
                .map_err(|_| JobError::Usage("order out of range".into()))?;
            if l.agrees_to(&r, order) {
                render(
                    fmt,
                    format!("equal to O(q^{order})\n"),
                    json!({"type": "identity_check", "equal": true, "order": order}),
                )
            } else {
                let diff = l.checked_sub(&r)?;
                let v = diff.valuation().expect("series differ");
                let e = diff.prefactor() + rat(v as i64);
                return Err(JobError::Domain(format!(
                    "lhs and rhs differ at q^({}): difference coefficient {}",
                    fmt_rat(&e),
                    fmt_rat(diff.coeff(v).expect("valuation"))
                )));
            }
        }
    };
    Ok(out)
}

fn render(fmt: Format, text: String, json: Json) -> JobOutput {
    match fmt {
        Format::Text => JobOutput { stdout: text },
        Format::Json => JobOutput { stdout: format!("{json}\n") },
    }
}

fn series_json(s: &QSeries) -> Json {
    json!({
        "type": "series",
        "prefactor_exp": fmt_rat(s.prefactor()),
        "trunc_order": s.trunc_order(),
        "coeffs": s.coeffs().iter().map(fmt_rat).collect::<Vec<_>>(),
    })
}

fn qproduct_json(p: &QProduct) -> Json {
    json!({
        "type": "qproduct",
        "leading_coeff": fmt_rat(&p.leading_coeff),
        "q_valuation": p.q_valuation,
        "exponents": p.exponents.iter().map(|(j, a)| json!([j, fmt_rat(a)])).collect::<Vec<_>>(),
        "all_integral": p.all_integral(),
    })
}

fn etaproduct_json(p: &EtaProduct) -> Json {
    json!({
        "type": "etaproduct",
        "leading_coeff": fmt_rat(&p.leading_coeff),
        "q_power": fmt_rat(&p.q_power),
        "exponents": p.exponents.iter().map(|(k, e)| json!([k, e])).collect::<Vec<_>>(),
        "exact": p.exact,
    })
}

fn jacproduct_json(j: &JacProduct) -> Json {
    json!({
        "type": "jacproduct",
        "leading_coeff": fmt_rat(&j.leading_coeff),
        "q_valuation": j.q_valuation,
        "factors": j
            .factors
            .iter()
            .map(|((a, b), e)| json!([a, b, fmt_rat(e)]))
            .collect::<Vec<_>>(),
    })
}

fn relation_json(r: &Relation) -> Json {
    json!({
        "monomials": r.basis.monomials,
        "coeffs": r.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "text": r.to_string(),
        "verified_to": r.verified_to,
    })
}

fn render_findings(fmt: Format, findings: &Findings, degree: u32, banner: &str) -> JobOutput {
    let rels: Vec<String> = findings.relations.iter().map(|r| r.to_string()).collect();
    let mut text = format!(
        "# of terms , {}\n-----{banner}-----of order---, {degree}\n{{{}}}\n",
        findings.rows_used,
        rels.join(", ")
    );
    if !findings.rejected.is_empty() {
        text.push_str(&format!(
            "dropped {} spurious candidate(s) failing re-verification\n",
            findings.rejected.len()
        ));
    }
    let json = json!({
        "type": "relations",
        "degree": degree,
        "rows_used": findings.rows_used,
        "relations": findings.relations.iter().map(relation_json).collect::<Vec<_>>(),
        "rejected": findings.rejected.len(),
    });
    render(fmt, text, json)
}

fn render_combos(fmt: Format, found: &ComboFindings, degree: u32) -> JobOutput {
    let combos: Vec<String> = found.combos.iter().map(|c| c.to_string()).collect();
    let mut text = format!(
        "# of terms , {}\n-----possible linear combinations of degree------, {degree}\n{{{}}}\n",
        found.rows_used,
        combos.join(", ")
    );
    for combo in &found.combos {
        if let Some(renderings) = &combo.eta_rendering {
            for (mono, eta) in renderings {
                text.push_str(&format!(
                    "eta: {} = {}\n",
                    combo.basis.monomial_text(mono),
                    eta
                ));
            }
        }
    }
    if !found.rejected.is_empty() {
        text.push_str(&format!(
            "dropped {} spurious candidate(s) failing re-verification\n",
            found.rejected.len()
        ));
    }
    let json = json!({
        "type": "combinations",
        "degree": degree,
        "rows_used": found.rows_used,
        "combos": found
            .combos
            .iter()
            .map(|c| {
                json!({
                    "expression": c
                        .expression
                        .iter()
                        .map(|(m, coeff)| json!({"monomial": m, "coeff": fmt_rat(coeff)}))
                        .collect::<Vec<_>>(),
                    "text": c.to_string(),
                    "verified_to": c.verified_to,
                    "eta": c.eta_rendering.as_ref().map(|rs| {
                        rs.iter()
                            .map(|(m, e)| {
                                json!({
                                    "monomial": m,
                                    "text": e.to_string(),
                                    "leading_coeff": fmt_rat(&e.leading_coeff),
                                    "q_power": fmt_rat(&e.q_power),
                                    "exponents": e
                                        .exponents
                                        .iter()
                                        .map(|(k, v)| json!([k, v]))
                                        .collect::<Vec<_>>(),
                                    "exact": e.exact,
                                })
                            })
                            .collect::<Vec<_>>()
                    }),
                })
            })
            .collect::<Vec<_>>(),
        "rejected": found.rejected.len(),
    });
    render(fmt, text, json)
}
