//! Expression language for the command line.
//!
//! A small calculator grammar, rich enough to transcribe interactive
//! sessions: rational literals, `q`, `+ - * / ^`, parentheses, `sum(body,
//! var, lo, hi)` loops, `O(q^T)` truncation markers, and calls to the
//! builder functions. Values stay exact rational functions of `q` until a
//! truncated builder enters the computation, at which point they become
//! truncated series with the valuation carried as a `q`-power prefactor, so
//! no knowledge is lost when multiplying by monomials.
//!
//! There is a second tiny grammar, [`parse_jac`], for Jacobi-product inputs
//! like `JAC(0,5,infinity)/JAC(1,5,infinity)` (also `sqrt(...)` and integer
//! powers), used by the `jac2prod` and `jac2series` subcommands.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use qseries::builders;
use qseries::monomial::QMonomial;
use qseries::poly::{QPoly, RationalFunction};
use qseries::prodconv::JacProduct;
use qseries::rat::{rat, ratio, Rat};
use qseries::series::QSeries;

/// Errors carry a source position and classify as usage (malformed input)
/// or domain (a legitimate computation that failed).
#[derive(Debug, Clone)]
pub enum EvalError {
    Usage { line: usize, col: usize, msg: String },
    Domain(qseries::Error),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Usage { line, col, msg } => write!(f, "{line}:{col}: {msg}"),
            EvalError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<qseries::Error> for EvalError {
    fn from(e: qseries::Error) -> Self {
        EvalError::Domain(e)
    }
}

type EvalResult<T> = Result<T, EvalError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn usage(self, msg: impl Into<String>) -> EvalError {
        EvalError::Usage { line: self.line, col: self.col, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

struct Lexer {
    tokens: Vec<(Tok, Pos)>,
    idx: usize,
}

impl Lexer {
    fn new(text: &str) -> EvalResult<Self> {
        let mut tokens = Vec::new();
        let mut line = 1usize;
        let mut col = 1usize;
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let pos = Pos { line, col };
            match c {
                b'\n' => {
                    line += 1;
                    col = 1;
                    i += 1;
                    continue;
                }
                c if c.is_ascii_whitespace() => {}
                b'(' => tokens.push((Tok::LParen, pos)),
                b')' => tokens.push((Tok::RParen, pos)),
                b',' => tokens.push((Tok::Comma, pos)),
                b'+' => tokens.push((Tok::Plus, pos)),
                b'-' => tokens.push((Tok::Minus, pos)),
                b'*' => tokens.push((Tok::Star, pos)),
                b'/' => tokens.push((Tok::Slash, pos)),
                b'^' => tokens.push((Tok::Caret, pos)),
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                        col += 1;
                    }
                    let n: BigInt = text[start..i].parse().expect("digits");
                    tokens.push((Tok::Num(n), pos));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                        col += 1;
                    }
                    tokens.push((Tok::Ident(text[start..i].to_string()), pos));
                    continue;
                }
                other => {
                    return Err(pos.usage(format!("unexpected character '{}'", other as char)))
                }
            }
            i += 1;
            col += 1;
        }
        tokens.push((Tok::End, Pos { line, col }));
        Ok(Self { tokens, idx: 0 })
    }

    fn peek(&self) -> &(Tok, Pos) {
        &self.tokens[self.idx]
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().0 == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> EvalResult<Pos> {
        let (t, pos) = self.next();
        if &t == tok {
            Ok(pos)
        } else {
            Err(pos.usage(format!("expected {what}")))
        }
    }
}

/// Abstract syntax of the calculator language.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Q,
    Infinity,
    Var(String, Pos),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, Pos),
    Neg(Box<Ast>),
    Pow(Box<Ast>, Box<Ast>, Pos),
    Call(String, Vec<Ast>, Pos),
    Sum { var: String, lo: Box<Ast>, hi: Box<Ast>, body: Box<Ast>, pos: Pos },
    BigO(usize),
}

/// Parse an expression, reporting syntax errors with line and column.
pub fn parse_expression(text: &str) -> EvalResult<Ast> {
    let mut lx = Lexer::new(text)?;
    let ast = parse_add(&mut lx)?;
    let (tok, pos) = lx.next();
    if tok != Tok::End {
        return Err(pos.usage("unexpected trailing input"));
    }
    Ok(ast)
}

fn parse_add(lx: &mut Lexer) -> EvalResult<Ast> {
    let mut acc = parse_mul(lx)?;
    loop {
        if lx.eat(&Tok::Plus) {
            acc = Ast::Add(Box::new(acc), Box::new(parse_mul(lx)?));
        } else if lx.eat(&Tok::Minus) {
            acc = Ast::Sub(Box::new(acc), Box::new(parse_mul(lx)?));
        } else {
            return Ok(acc);
        }
    }
}

fn parse_mul(lx: &mut Lexer) -> EvalResult<Ast> {
    let mut acc = parse_unary(lx)?;
    loop {
        if lx.eat(&Tok::Star) {
            acc = Ast::Mul(Box::new(acc), Box::new(parse_unary(lx)?));
        } else if lx.peek().0 == Tok::Slash {
            let (_, pos) = lx.next();
            acc = Ast::Div(Box::new(acc), Box::new(parse_unary(lx)?), pos);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_unary(lx: &mut Lexer) -> EvalResult<Ast> {
    if lx.eat(&Tok::Minus) {
        Ok(Ast::Neg(Box::new(parse_unary(lx)?)))
    } else {
        parse_power(lx)
    }
}

fn parse_power(lx: &mut Lexer) -> EvalResult<Ast> {
    let base = parse_primary(lx)?;
    if lx.peek().0 == Tok::Caret {
        let (_, pos) = lx.next();
        let exp = if lx.eat(&Tok::Minus) {
            Ast::Neg(Box::new(parse_primary(lx)?))
        } else {
            parse_primary(lx)?
        };
        if lx.peek().0 == Tok::Caret {
            let (_, p2) = lx.next();
            return Err(p2.usage("chained '^' needs parentheses"));
        }
        return Ok(Ast::Pow(Box::new(base), Box::new(exp), pos));
    }
    Ok(base)
}

fn parse_primary(lx: &mut Lexer) -> EvalResult<Ast> {
    let (tok, pos) = lx.next();
    match tok {
        Tok::Num(n) => Ok(Ast::Num(n)),
        Tok::LParen => {
            let inner = parse_add(lx)?;
            lx.expect(&Tok::RParen, "')'")?;
            Ok(inner)
        }
        Tok::Ident(name) => {
            if name == "q" {
                return Ok(Ast::Q);
            }
            if name == "infinity" || name == "inf" {
                return Ok(Ast::Infinity);
            }
            if lx.eat(&Tok::LParen) {
                let mut args = Vec::new();
                if !lx.eat(&Tok::RParen) {
                    loop {
                        args.push(parse_add(lx)?);
                        if lx.eat(&Tok::Comma) {
                            continue;
                        }
                        lx.expect(&Tok::RParen, "')' or ','")?;
                        break;
                    }
                }
                if name == "O" {
                    return lower_big_o(args, pos);
                }
                if name == "sum" {
                    return lower_sum(args, pos);
                }
                Ok(Ast::Call(name, args, pos))
            } else {
                Ok(Ast::Var(name, pos))
            }
        }
        _ => Err(pos.usage("expected a number, 'q', a call, or '('")),
    }
}

fn lower_big_o(args: Vec<Ast>, pos: Pos) -> EvalResult<Ast> {
    if args.len() != 1 {
        return Err(pos.usage("O takes one argument, O(q^T)"));
    }
    match &args[0] {
        Ast::Pow(base, exp, _) if **base == Ast::Q => {
            if let Ast::Num(n) = &**exp {
                if let Ok(t) = usize::try_from(n.clone()) {
                    if t >= 1 {
                        return Ok(Ast::BigO(t));
                    }
                }
            }
            Err(pos.usage("O(q^T) needs a positive integer T"))
        }
        Ast::Q => Ok(Ast::BigO(1)),
        _ => Err(pos.usage("O takes the form O(q^T)")),
    }
}

fn lower_sum(mut args: Vec<Ast>, pos: Pos) -> EvalResult<Ast> {
    if args.len() != 4 {
        return Err(pos.usage("sum takes (body, var, lo, hi)"));
    }
    let hi = args.pop().unwrap();
    let lo = args.pop().unwrap();
    let var = match args.pop().unwrap() {
        Ast::Var(name, _) => name,
        _ => return Err(pos.usage("sum's second argument must be a variable name")),
    };
    let body = args.pop().unwrap();
    Ok(Ast::Sum { var, lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body), pos })
}

/// An exact value `q^shift * num/den`, normalized so both polynomials have a
/// nonzero constant term (their valuations are folded into `shift`).
#[derive(Debug, Clone)]
pub struct ExactValue {
    shift: Rat,
    rf: RationalFunction,
}

impl ExactValue {
    fn normalized(shift: Rat, rf: RationalFunction) -> Self {
        if rf.num().is_zero() {
            return Self {
                shift: Rat::zero(),
                rf: RationalFunction::from_poly(QPoly::zero()),
            };
        }
        let vn = rf.num().valuation().expect("nonzero");
        let vd = rf.den().valuation().expect("nonzero denominator");
        let num = rf.num().shift_down(vn).expect("valuation");
        let den = rf.den().shift_down(vd).expect("valuation");
        Self {
            shift: shift + rat(vn as i64) - rat(vd as i64),
            rf: RationalFunction::new(num, den).expect("nonzero denominator"),
        }
    }

    fn constant(c: Rat) -> Self {
        Self::normalized(Rat::zero(), RationalFunction::from_poly(QPoly::constant(c)))
    }

    fn q_power(e: Rat) -> Self {
        Self { shift: e, rf: RationalFunction::from_poly(QPoly::one()) }
    }

    fn is_zero(&self) -> bool {
        self.rf.num().is_zero()
    }

    /// Materialize at relative truncation `trunc`; the shift becomes the
    /// series prefactor.
    fn to_series(&self, trunc: usize) -> EvalResult<QSeries> {
        if self.is_zero() {
            return Ok(QSeries::zero(trunc));
        }
        let (v, s) = self.rf.to_series(trunc.max(1))?;
        debug_assert_eq!(v, 0);
        Ok(s.shift_prefactor(&self.shift))
    }

    fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if !self.shift.is_zero() {
            return None;
        }
        let num = self.rf.num();
        let den = self.rf.den();
        if num.degree() == Some(0) && den.degree() == Some(0) {
            Some(num.coeff(0) / den.coeff(0))
        } else {
            None
        }
    }

    fn as_monomial(&self) -> Option<QMonomial> {
        let num = self.rf.num();
        let den = self.rf.den();
        if num.degree() != Some(0) || den.degree() != Some(0) {
            return None;
        }
        let c = num.coeff(0) / den.coeff(0);
        let sign = if c == rat(1) {
            1
        } else if c == rat(-1) {
            -1
        } else {
            return None;
        };
        QMonomial::new(sign, self.shift.clone()).ok()
    }

    /// Fold the shift back into a rational function; requires an integer,
    /// nonnegative shift.
    pub fn to_rational_function(&self) -> Option<RationalFunction> {
        if self.is_zero() {
            return Some(RationalFunction::from_poly(QPoly::zero()));
        }
        if !self.shift.is_integer() || self.shift.is_negative() {
            return None;
        }
        let v = usize::try_from(self.shift.to_integer()).ok()?;
        let num = self.rf.num().mul(&QPoly::monomial(Rat::one(), v));
        Some(RationalFunction::new(num, self.rf.den().clone()).expect("nonzero denominator"))
    }
}

/// Evaluation result: exact until a truncated builder enters.
#[derive(Debug, Clone)]
pub enum Value {
    Exact(ExactValue),
    Series(QSeries),
}

impl Value {
    pub fn into_series(self, default_trunc: usize) -> EvalResult<QSeries> {
        match self {
            Value::Exact(e) => e.to_series(default_trunc),
            Value::Series(s) => Ok(s),
        }
    }

    fn as_exact(&self) -> Option<&ExactValue> {
        match self {
            Value::Exact(e) => Some(e),
            Value::Series(_) => None,
        }
    }
}

/// Evaluation context: ambient truncation for materializing exact values and
/// the loop-variable environment.
pub struct EvalCtx {
    pub default_trunc: usize,
    vars: HashMap<String, Rat>,
}

impl EvalCtx {
    pub fn new(default_trunc: usize) -> Self {
        Self { default_trunc, vars: HashMap::new() }
    }
}

/// Evaluate an expression to an exact value or truncated series.
pub fn evaluate(ast: &Ast, ctx: &mut EvalCtx) -> EvalResult<Value> {
    match ast {
        Ast::Num(n) => Ok(Value::Exact(ExactValue::constant(Rat::from_integer(n.clone())))),
        Ast::Q => Ok(Value::Exact(ExactValue::q_power(rat(1)))),
        Ast::Infinity => Err(Pos { line: 0, col: 0 }
            .usage("'infinity' is only valid as the order argument of aqprod")),
        Ast::Var(name, pos) => match ctx.vars.get(name) {
            Some(v) => Ok(Value::Exact(ExactValue::constant(v.clone()))),
            None => Err(pos.usage(format!("unknown variable '{name}'"))),
        },
        Ast::Add(a, b) => {
            let x = evaluate(a, ctx)?;
            let y = evaluate(b, ctx)?;
            add_values(x, y, false)
        }
        Ast::Sub(a, b) => {
            let x = evaluate(a, ctx)?;
            let y = evaluate(b, ctx)?;
            add_values(x, y, true)
        }
        Ast::Mul(a, b) => {
            let x = evaluate(a, ctx)?;
            let y = evaluate(b, ctx)?;
            mul_values(x, y)
        }
        Ast::Div(a, b, pos) => {
            let x = evaluate(a, ctx)?;
            let y = evaluate(b, ctx)?;
            div_values(x, y, *pos)
        }
        Ast::Neg(a) => {
            let x = evaluate(a, ctx)?;
            Ok(match x {
                Value::Exact(e) => Value::Exact(ExactValue {
                    shift: e.shift,
                    rf: e.rf.neg(),
                }),
                Value::Series(s) => Value::Series(-&s),
            })
        }
        Ast::Pow(base, exp, pos) => {
            let b = evaluate(base, ctx)?;
            let e = eval_rat(exp, ctx, *pos)?;
            pow_value(b, e, *pos)
        }
        Ast::Call(name, args, pos) => eval_call(name, args, ctx, *pos),
        Ast::Sum { var, lo, hi, body, pos } => {
            let lo = eval_rat(lo, ctx, *pos)?.floor().to_integer();
            let hi = eval_rat(hi, ctx, *pos)?.floor().to_integer();
            let (lo, hi) = (
                i64::try_from(lo).map_err(|_| pos.usage("sum bound out of range"))?,
                i64::try_from(hi).map_err(|_| pos.usage("sum bound out of range"))?,
            );
            let shadowed = ctx.vars.remove(var);
            let mut acc: Option<Value> = None;
            for i in lo..=hi {
                ctx.vars.insert(var.clone(), rat(i));
                let term = evaluate(body, ctx)?;
                acc = Some(match acc {
                    None => term,
                    Some(a) => add_values(a, term, false)?,
                });
            }
            match shadowed {
                Some(v) => {
                    ctx.vars.insert(var.clone(), v);
                }
                None => {
                    ctx.vars.remove(var);
                }
            }
            Ok(acc.unwrap_or_else(|| Value::Exact(ExactValue::constant(Rat::zero()))))
        }
        Ast::BigO(t) => Ok(Value::Series(QSeries::zero(*t))),
    }
}

fn add_values(x: Value, y: Value, subtract: bool) -> EvalResult<Value> {
    match (x, y) {
        (Value::Exact(a), Value::Exact(b)) => {
            if a.is_zero() {
                let rf = if subtract { b.rf.neg() } else { b.rf };
                return Ok(Value::Exact(ExactValue { shift: b.shift, rf }));
            }
            if b.is_zero() {
                return Ok(Value::Exact(a));
            }
            let diff = &b.shift - &a.shift;
            if !diff.is_integer() {
                return Err(qseries::Error::PrefactorMismatch(a.shift, b.shift).into());
            }
            // Align on the smaller shift; the other side's numerator picks up
            // the q-power difference.
            let base = a.shift.clone().min(b.shift.clone());
            let lift = |e: &ExactValue| -> EvalResult<RationalFunction> {
                let k = usize::try_from((&e.shift - &base).to_integer())
                    .map_err(|_| qseries::Error::InvalidArgument("shift out of range".into()))?;
                let num = e.rf.num().mul(&QPoly::monomial(Rat::one(), k));
                Ok(RationalFunction::new(num, e.rf.den().clone()).expect("nonzero denominator"))
            };
            let ra = lift(&a)?;
            let rb = lift(&b)?;
            let sum = if subtract { ra.sub(&rb) } else { ra.add(&rb) };
            Ok(Value::Exact(ExactValue::normalized(base, sum)))
        }
        (x, y) => {
            let (a, b) = promote_pair(x, y)?;
            let r = if subtract { a.checked_sub(&b)? } else { a.checked_add(&b)? };
            Ok(Value::Series(r))
        }
    }
}

fn mul_values(x: Value, y: Value) -> EvalResult<Value> {
    match (x, y) {
        (Value::Exact(a), Value::Exact(b)) => Ok(Value::Exact(ExactValue::normalized(
            a.shift + b.shift,
            a.rf.mul(&b.rf),
        ))),
        (x, y) => {
            let (a, b) = promote_pair(x, y)?;
            Ok(Value::Series(a.mul(&b)))
        }
    }
}

fn div_values(x: Value, y: Value, pos: Pos) -> EvalResult<Value> {
    match (x, y) {
        (Value::Exact(a), Value::Exact(b)) => {
            if b.is_zero() {
                return Err(pos.usage("division by zero"));
            }
            Ok(Value::Exact(ExactValue::normalized(a.shift - b.shift, a.rf.div(&b.rf)?)))
        }
        (x, y) => {
            let (a, b) = promote_pair(x, y)?;
            Ok(Value::Series(a.mul(&b.inv()?)))
        }
    }
}

/// Materialize whichever side is exact at the other's relative truncation.
fn promote_pair(x: Value, y: Value) -> EvalResult<(QSeries, QSeries)> {
    match (x, y) {
        (Value::Series(a), Value::Series(b)) => Ok((a, b)),
        (Value::Exact(e), Value::Series(b)) => {
            let a = e.to_series(b.trunc_order())?;
            Ok((a, b))
        }
        (Value::Series(a), Value::Exact(e)) => {
            let b = e.to_series(a.trunc_order())?;
            Ok((a, b))
        }
        (Value::Exact(_), Value::Exact(_)) => unreachable!("handled by callers"),
    }
}

fn pow_value(base: Value, e: Rat, pos: Pos) -> EvalResult<Value> {
    if e.is_integer() {
        let k = i64::try_from(e.to_integer()).map_err(|_| pos.usage("exponent out of range"))?;
        return match base {
            Value::Exact(a) => {
                if k == 0 {
                    return Ok(Value::Exact(ExactValue::constant(Rat::one())));
                }
                Ok(Value::Exact(ExactValue::normalized(a.shift * rat(k), a.rf.pow(k)?)))
            }
            Value::Series(s) => Ok(Value::Series(s.pow(k)?)),
        };
    }
    // Rational exponent: exact monomials take it on the shift; series accept
    // half-integer exponents through the square root.
    match base {
        Value::Exact(a) => {
            if a.rf.is_one() {
                return Ok(Value::Exact(ExactValue { shift: a.shift * e, rf: a.rf }));
            }
            Err(pos.usage("rational exponents apply only to q-powers and series"))
        }
        Value::Series(s) => {
            if *e.denom() == BigInt::from(2) {
                let int_part = &e - ratio(1, 2);
                let k = i64::try_from(int_part.to_integer())
                    .map_err(|_| pos.usage("exponent out of range"))?;
                Ok(Value::Series(s.pow(k)?.mul(&s.sqrt()?)))
            } else {
                Err(pos.usage("series exponents must be integers or half-integers"))
            }
        }
    }
}

fn eval_rat(ast: &Ast, ctx: &mut EvalCtx, pos: Pos) -> EvalResult<Rat> {
    let v = evaluate(ast, ctx)?;
    v.as_exact()
        .and_then(|e| e.as_rat())
        .ok_or_else(|| pos.usage("expected an exact rational constant"))
}

fn eval_usize(ast: &Ast, ctx: &mut EvalCtx, pos: Pos, what: &str) -> EvalResult<usize> {
    let r = eval_rat(ast, ctx, pos)?;
    if !r.is_integer() {
        return Err(pos.usage(format!("{what} must be an integer")));
    }
    usize::try_from(r.to_integer()).map_err(|_| pos.usage(format!("{what} out of range")))
}

fn eval_i64(ast: &Ast, ctx: &mut EvalCtx, pos: Pos, what: &str) -> EvalResult<i64> {
    let r = eval_rat(ast, ctx, pos)?;
    if !r.is_integer() {
        return Err(pos.usage(format!("{what} must be an integer")));
    }
    i64::try_from(r.to_integer()).map_err(|_| pos.usage(format!("{what} out of range")))
}

fn eval_monomial(ast: &Ast, ctx: &mut EvalCtx, pos: Pos, what: &str) -> EvalResult<QMonomial> {
    let v = evaluate(ast, ctx)?;
    v.as_exact()
        .and_then(|e| e.as_monomial())
        .ok_or_else(|| pos.usage(format!("{what} must be a signed q-power like q, -q, or q^3")))
}

/// Base arguments accept either `q^b` or the integer `b`.
fn eval_base(ast: &Ast, ctx: &mut EvalCtx, pos: Pos) -> EvalResult<u32> {
    let v = evaluate(ast, ctx)?;
    let e = v
        .as_exact()
        .ok_or_else(|| pos.usage("base must be a positive q-power or integer"))?;
    if let Some(m) = e.as_monomial() {
        if m.sign() > 0 && m.exp().is_integer() {
            if let Ok(b) = u32::try_from(m.exp().to_integer()) {
                if b >= 1 {
                    return Ok(b);
                }
            }
        }
    } else if let Some(r) = e.as_rat() {
        if r.is_integer() {
            if let Ok(b) = u32::try_from(r.to_integer()) {
                if b >= 1 {
                    return Ok(b);
                }
            }
        }
    }
    Err(pos.usage("base must be a positive q-power or integer"))
}

fn arity(pos: Pos, name: &str, args: &[Ast], allowed: &[usize]) -> EvalResult<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(pos.usage(format!(
            "{name} takes {} argument(s), got {}",
            allowed.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" or "),
            args.len()
        )))
    }
}

fn eval_call(name: &str, args: &[Ast], ctx: &mut EvalCtx, pos: Pos) -> EvalResult<Value> {
    match name {
        "aqprod" => {
            arity(pos, "aqprod", args, &[4])?;
            let a = eval_monomial(&args[0], ctx, pos, "aqprod's first argument")?;
            let base = eval_base(&args[1], ctx, pos)?;
            let trunc = eval_usize(&args[3], ctx, pos, "truncation order")?;
            if matches!(args[2], Ast::Infinity) {
                Ok(Value::Series(builders::aqprod_inf(&a, base, trunc)?))
            } else {
                let n = eval_usize(&args[2], ctx, pos, "order")? as u32;
                Ok(Value::Series(builders::aqprod(&a, base, n, trunc)?))
            }
        }
        "etaq" => {
            arity(pos, "etaq", args, &[2])?;
            let k = eval_usize(&args[0], ctx, pos, "k")? as u32;
            let trunc = eval_usize(&args[1], ctx, pos, "truncation order")?;
            Ok(Value::Series(builders::etaq(k, trunc)?))
        }
        "qbin" => {
            arity(pos, "qbin", args, &[2])?;
            let m = eval_i64(&args[0], ctx, pos, "m")?;
            let n = eval_i64(&args[1], ctx, pos, "n")?;
            let poly = builders::qbin(m, n);
            Ok(Value::Exact(ExactValue::normalized(
                Rat::zero(),
                RationalFunction::from_poly(poly),
            )))
        }
        "theta" => {
            arity(pos, "theta", args, &[3, 4])?;
            let z = eval_monomial(&args[0], ctx, pos, "theta's z")?;
            let base = eval_base(&args[1], ctx, pos)?;
            let (n, trunc) = if args.len() == 4 {
                (
                    Some(eval_i64(&args[2], ctx, pos, "half-width")?),
                    eval_usize(&args[3], ctx, pos, "truncation order")?,
                )
            } else {
                (None, eval_usize(&args[2], ctx, pos, "truncation order")?)
            };
            Ok(Value::Series(builders::theta(&z, base, n, trunc)?))
        }
        "theta2" | "theta3" | "theta4" => {
            arity(pos, name, args, &[1, 2])?;
            let (sub, trunc) = if args.len() == 2 {
                let m = eval_monomial(&args[0], ctx, pos, "theta substitution")?;
                if m.sign() < 0 || !m.exp().is_integer() {
                    return Err(pos.usage("theta substitution must be a positive q-power"));
                }
                let k = usize::try_from(m.exp().to_integer())
                    .map_err(|_| pos.usage("substitution power out of range"))?;
                if k == 0 {
                    return Err(pos.usage("theta substitution must be a positive q-power"));
                }
                (k, eval_usize(&args[1], ctx, pos, "truncation order")?)
            } else {
                (1, eval_usize(&args[0], ctx, pos, "truncation order")?)
            };
            let inner = trunc.div_ceil(sub).max(1) + 1;
            let base = match name {
                "theta2" => builders::theta2(inner),
                "theta3" => builders::theta3(inner),
                _ => builders::theta4(inner),
            };
            let s = base.substitute_power(sub)?;
            Ok(Value::Series(s.truncated(trunc)))
        }
        "jacprod" => {
            arity(pos, "jacprod", args, &[3])?;
            let a = eval_usize(&args[0], ctx, pos, "a")? as u32;
            let b = eval_usize(&args[1], ctx, pos, "b")? as u32;
            let trunc = eval_usize(&args[2], ctx, pos, "truncation order")?;
            Ok(Value::Series(builders::jacprod(a, b, trunc)?))
        }
        "tripleprod" | "quinprod" => {
            arity(pos, name, args, &[3, 4])?;
            let z = eval_monomial(&args[0], ctx, pos, "z")?;
            let base = eval_base(&args[1], ctx, pos)?;
            let (n, trunc) = if args.len() == 4 {
                (
                    Some(eval_i64(&args[2], ctx, pos, "half-width")?),
                    eval_usize(&args[3], ctx, pos, "truncation order")?,
                )
            } else {
                (None, eval_usize(&args[2], ctx, pos, "truncation order")?)
            };
            let s = if name == "tripleprod" {
                builders::tripleprod(&z, base, n, trunc)?
            } else {
                builders::quinprod(&z, base, n, trunc)?
            };
            Ok(Value::Series(s))
        }
        "winquist" => {
            arity(pos, "winquist", args, &[4, 5])?;
            let a = eval_monomial(&args[0], ctx, pos, "a")?;
            let b = eval_monomial(&args[1], ctx, pos, "b")?;
            let base = eval_base(&args[2], ctx, pos)?;
            let (n, trunc) = if args.len() == 5 {
                (
                    Some(eval_i64(&args[3], ctx, pos, "half-width")?),
                    eval_usize(&args[4], ctx, pos, "truncation order")?,
                )
            } else {
                (None, eval_usize(&args[3], ctx, pos, "truncation order")?)
            };
            Ok(Value::Series(builders::winquist(&a, &b, base, n, trunc)?))
        }
        "sift" => {
            arity(pos, "sift", args, &[3])?;
            let trunc = ctx.default_trunc;
            let s = evaluate(&args[0], ctx)?.into_series(trunc)?;
            let n = eval_usize(&args[1], ctx, pos, "modulus")?;
            let k = eval_usize(&args[2], ctx, pos, "residue")?;
            Ok(Value::Series(s.sift(n, k)?))
        }
        "sqrt" => {
            arity(pos, "sqrt", args, &[1])?;
            let v = evaluate(&args[0], ctx)?;
            pow_value(v, ratio(1, 2), pos)
        }
        "legendre" => {
            arity(pos, "legendre", args, &[2])?;
            let a = eval_i64(&args[0], ctx, pos, "a")?;
            let p = eval_i64(&args[1], ctx, pos, "p")?;
            if p < 3 || p % 2 == 0 {
                return Err(pos.usage("legendre(a, p) needs an odd p >= 3"));
            }
            Ok(Value::Exact(ExactValue::constant(rat(legendre_symbol(a, p)))))
        }
        other => Err(pos.usage(format!("unknown function '{other}'"))),
    }
}

/// Legendre symbol by Euler's criterion (meaningful for odd prime `p`).
fn legendre_symbol(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut result: i64 = 1;
    let mut base = a % p;
    let mut exp = (p - 1) / 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if result == p - 1 {
        -1
    } else {
        result
    }
}

/// Parse a Jacobi-product expression: products and quotients of
/// `JAC(a, b, infinity)` factors with integer powers, plus `sqrt(...)`,
/// numeric constants, and `q^v` monomial prefactors.
pub fn parse_jac(text: &str) -> EvalResult<JacProduct> {
    let mut lx = Lexer::new(text)?;
    let acc = parse_jac_expr(&mut lx)?;
    let (tok, pos) = lx.next();
    if tok != Tok::End {
        return Err(pos.usage("unexpected trailing input"));
    }
    let mut valuation = Rat::zero();
    let JacAccum { leading, q_power, factors } = acc;
    valuation += q_power;
    if !valuation.is_integer() || valuation.is_negative() {
        return Err(Pos { line: 1, col: 1 }.usage("q-power must be a nonnegative integer"));
    }
    let v = usize::try_from(valuation.to_integer())
        .map_err(|_| Pos { line: 1, col: 1 }.usage("q-power out of range"))?;
    Ok(JacProduct::new(leading, v, factors))
}

struct JacAccum {
    leading: Rat,
    q_power: Rat,
    factors: BTreeMap<(u32, u32), Rat>,
}

impl JacAccum {
    fn one() -> Self {
        Self { leading: Rat::one(), q_power: Rat::zero(), factors: BTreeMap::new() }
    }

    fn merge(&mut self, other: JacAccum, exponent: &Rat) {
        if exponent.is_integer() {
            if let Ok(k) = i64::try_from(exponent.to_integer()) {
                if let Some(l) = rat_pow(&other.leading, k) {
                    self.leading *= l;
                }
            }
        }
        self.q_power += &other.q_power * exponent;
        for ((a, b), e) in other.factors {
            let entry = self.factors.entry((a, b)).or_insert_with(Rat::zero);
            *entry += e * exponent;
        }
    }
}

fn rat_pow(r: &Rat, k: i64) -> Option<Rat> {
    if k >= 0 {
        let mut acc = Rat::one();
        for _ in 0..k {
            acc *= r;
        }
        Some(acc)
    } else if r.is_zero() {
        None
    } else {
        rat_pow(r, -k).map(|x| x.recip())
    }
}

fn parse_jac_expr(lx: &mut Lexer) -> EvalResult<JacAccum> {
    let mut acc = JacAccum::one();
    let first = parse_jac_term(lx)?;
    acc.merge(first, &Rat::one());
    loop {
        if lx.eat(&Tok::Star) {
            let t = parse_jac_term(lx)?;
            acc.merge(t, &Rat::one());
        } else if lx.eat(&Tok::Slash) {
            let t = parse_jac_term(lx)?;
            acc.merge(t, &rat(-1));
        } else {
            return Ok(acc);
        }
    }
}

fn parse_jac_term(lx: &mut Lexer) -> EvalResult<JacAccum> {
    let base = parse_jac_factor(lx)?;
    if lx.peek().0 == Tok::Caret {
        let (_, pos) = lx.next();
        let paren = lx.eat(&Tok::LParen);
        let neg = lx.eat(&Tok::Minus);
        let (tok, npos) = lx.next();
        let Tok::Num(n) = tok else {
            return Err(npos.usage("expected an integer exponent"));
        };
        if paren {
            lx.expect(&Tok::RParen, "')'")?;
        }
        let mut e = Rat::from_integer(n);
        if neg {
            e = -e;
        }
        let _ = pos;
        let mut acc = JacAccum::one();
        acc.merge(base, &e);
        Ok(acc)
    } else {
        Ok(base)
    }
}

fn parse_jac_factor(lx: &mut Lexer) -> EvalResult<JacAccum> {
    let (tok, pos) = lx.next();
    match tok {
        Tok::LParen => {
            let inner = parse_jac_expr(lx)?;
            lx.expect(&Tok::RParen, "')'")?;
            Ok(inner)
        }
        Tok::Num(n) => {
            let mut acc = JacAccum::one();
            acc.leading = Rat::from_integer(n);
            Ok(acc)
        }
        Tok::Ident(name) if name == "q" => {
            let mut acc = JacAccum::one();
            if lx.eat(&Tok::Caret) {
                let (tok, npos) = lx.next();
                let Tok::Num(n) = tok else {
                    return Err(npos.usage("expected an integer after 'q^'"));
                };
                acc.q_power = Rat::from_integer(n);
            } else {
                acc.q_power = Rat::one();
            }
            Ok(acc)
        }
        Tok::Ident(name) if name == "sqrt" => {
            lx.expect(&Tok::LParen, "'('")?;
            let inner = parse_jac_expr(lx)?;
            lx.expect(&Tok::RParen, "')'")?;
            if !inner.leading.is_one() {
                return Err(pos.usage("sqrt of a Jacobi product needs leading coefficient 1"));
            }
            let mut acc = JacAccum::one();
            acc.merge(inner, &ratio(1, 2));
            Ok(acc)
        }
        Tok::Ident(name) if name == "JAC" => {
            lx.expect(&Tok::LParen, "'('")?;
            let (tok, apos) = lx.next();
            let Tok::Num(a) = tok else {
                return Err(apos.usage("expected an integer"));
            };
            lx.expect(&Tok::Comma, "','")?;
            let (tok, bpos) = lx.next();
            let Tok::Num(b) = tok else {
                return Err(bpos.usage("expected an integer"));
            };
            if lx.eat(&Tok::Comma) {
                let (tok, ipos) = lx.next();
                match tok {
                    Tok::Ident(s) if s == "infinity" || s == "inf" => {}
                    _ => return Err(ipos.usage("expected 'infinity'")),
                }
            }
            lx.expect(&Tok::RParen, "')'")?;
            let a = u32::try_from(a).map_err(|_| apos.usage("a out of range"))?;
            let b = u32::try_from(b).map_err(|_| bpos.usage("b out of range"))?;
            if a >= b {
                return Err(apos.usage("JAC(a,b) requires 0 <= a < b"));
            }
            let mut acc = JacAccum::one();
            acc.factors.insert((a, b), Rat::one());
            Ok(acc)
        }
        _ => Err(pos.usage("expected JAC(a,b,infinity), sqrt(...), a constant, or '('")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_str(text: &str, trunc: usize) -> EvalResult<QSeries> {
        let ast = parse_expression(text)?;
        let mut ctx = EvalCtx::new(trunc);
        evaluate(&ast, &mut ctx)?.into_series(trunc)
    }

    #[test]
    fn arithmetic_and_literals() {
        let s = eval_str("1/(1-q)", 5).unwrap();
        assert_eq!(qseries::text::series_to_text(&s), "1 + q + q^2 + q^3 + q^4 + O(q^5)");
        let s = eval_str("(1+q)^2 - q^2", 6).unwrap();
        assert_eq!(qseries::text::series_to_text(&s), "1 + 2*q + O(q^6)");
        let s = eval_str("3/2 + q", 4).unwrap();
        assert_eq!(qseries::text::series_to_text(&s), "3/2 + q + O(q^4)");
    }

    #[test]
    fn rational_q_powers() {
        let s = eval_str("q^(1/4) * (2 + 2*q^2)", 5).unwrap();
        assert_eq!(s.prefactor(), &ratio(1, 4));
        // theta2 divided by its prefactor is an ordinary series.
        let s = eval_str("theta2(30)/q^(1/4)", 30).unwrap();
        assert_eq!(s.prefactor(), &rat(0));
        assert_eq!(s.coeff(0).unwrap(), &rat(2));
    }

    #[test]
    fn sum_loops_and_builders() {
        // Rogers-Ramanujan sum.
        let s = eval_str("1 + sum(q^(n*n)/aqprod(q,q,n,50), n, 1, 8)", 50).unwrap();
        assert_eq!(s.coeff(49).unwrap(), &rat(961));
        // q^(n*n) keeps knowledge via the prefactor: the n=8 term starts at
        // q^64 and simply does not pollute the window.
        assert_eq!(s.trunc_order(), 50);
    }

    #[test]
    fn o_terms_truncate() {
        let s = eval_str("1 + q + O(q^3)", 10).unwrap();
        assert_eq!(s.trunc_order(), 3);
    }

    #[test]
    fn monomial_and_base_arguments() {
        let a = eval_str("aqprod(-q, q, 1, 10)", 10).unwrap();
        assert_eq!(qseries::text::series_to_text(&a), "1 + q + O(q^10)");
        let t = eval_str("tripleprod(q, q^3, 60)", 60).unwrap();
        let e = eval_str("etaq(1, 60)", 60).unwrap();
        assert_eq!(t, e);
        // Integer base also accepted.
        let t2 = eval_str("tripleprod(q, 3, 60)", 60).unwrap();
        assert_eq!(t2, t);
    }

    #[test]
    fn aqprod_infinity() {
        let inf = eval_str("aqprod(q, q, infinity, 30)", 30).unwrap();
        let e = eval_str("etaq(1, 30)", 30).unwrap();
        assert_eq!(inf, e);
    }

    #[test]
    fn theta_substitution() {
        let t = eval_str("theta3(q^25, 60)", 60).unwrap();
        assert_eq!(
            qseries::text::series_to_text(&t),
            "1 + 2*q^25 + O(q^60)"
        );
        let u = eval_str(
            "2*q*theta(q^10, q^25, 5, 700)/theta3(q^25, 700)",
            700,
        )
        .unwrap();
        // U = 2q(1 + q^15 + q^35 + ...) / (1 + 2q^25 + ...)
        assert_eq!(u.prefactor(), &rat(1));
        assert_eq!(u.coeff(0).unwrap(), &rat(2));
    }

    #[test]
    fn positioned_errors() {
        let err = parse_expression("1 + (2").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("1:"), "{msg}");
        let err = eval_str("nosuch(1)", 10).unwrap_err();
        assert!(matches!(err, EvalError::Usage { .. }));
        let err = eval_str("1/(q)", 10);
        // 1/q is fine: it is q^(-1).
        let s = err.unwrap();
        assert_eq!(s.prefactor(), &rat(-1));
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_symbol(1, 5), 1);
        assert_eq!(legendre_symbol(2, 5), -1);
        assert_eq!(legendre_symbol(3, 5), -1);
        assert_eq!(legendre_symbol(4, 5), 1);
        assert_eq!(legendre_symbol(5, 5), 0);
        assert_eq!(legendre_symbol(-1, 5), 1);
    }

    #[test]
    fn jac_expressions() {
        let j = parse_jac("JAC(0,5,infinity)/JAC(1,5,infinity)").unwrap();
        assert_eq!(j.factors.get(&(0, 5)), Some(&rat(1)));
        assert_eq!(j.factors.get(&(1, 5)), Some(&rat(-1)));
        let j = parse_jac(
            "JAC(0,14,infinity)^6/(JAC(1,14,infinity)^2*sqrt(JAC(7,14,infinity)/JAC(0,14,infinity)))",
        )
        .unwrap();
        assert_eq!(j.factors.get(&(7, 14)), Some(&ratio(-1, 2)));
        assert_eq!(j.factors.get(&(0, 14)), Some(&ratio(13, 2)));
        assert!(parse_jac("JAC(5,5,infinity)").is_err());
        // Round trip with the renderer.
        let j = parse_jac("JAC(0,5,infinity) * JAC(1,5,infinity)^(-1)").unwrap();
        assert_eq!(j.to_string(), "JAC(0,5,infinity) * JAC(1,5,infinity)^(-1)");
    }

    #[test]
    fn division_by_series_with_zero_constant_is_domain_error() {
        let err = eval_str("1/(etaq(1,10)-1)", 10).unwrap_err();
        assert!(matches!(err, EvalError::Domain(qseries::Error::ZeroConstantTerm)));
    }
}
