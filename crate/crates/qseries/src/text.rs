//! Canonical text renderings and the series grammar parser.
//!
//! The series rendering is `c0 + c1*q + c2*q^2 + ... + O(q^T)` with exact
//! rationals written `p/r`; a nonzero prefactor wraps the body as
//! `q^(r) * (...)`. [`parse_series`] accepts the same grammar,
//! whitespace-insensitively.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::QPoly;
use crate::rat::{fmt_rat, rat, Rat};
use crate::series::QSeries;

/// Exponent rendering shared by the product forms: `^2`, `^(-1)`, `^(3/2)`;
/// an exponent of 1 renders as the empty string.
pub fn exponent_suffix(e: &Rat) -> String {
    if e.is_one() {
        String::new()
    } else if e.is_integer() && e.is_positive() {
        format!("^{}", e.numer())
    } else {
        format!("^({})", fmt_rat(e))
    }
}

fn term_text(c: &Rat, exp: usize, first: bool) -> String {
    let mag = c.abs();
    let body = if exp == 0 {
        fmt_rat(&mag)
    } else {
        let qpart = if exp == 1 { "q".to_string() } else { format!("q^{exp}") };
        if mag.is_one() {
            qpart
        } else {
            format!("{}*{}", fmt_rat(&mag), qpart)
        }
    };
    if first {
        if c.is_negative() {
            format!("-{body}")
        } else {
            body
        }
    } else if c.is_negative() {
        format!(" - {body}")
    } else {
        format!(" + {body}")
    }
}

/// Canonical rendering of a truncated series.
pub fn series_to_text(s: &QSeries) -> String {
    let mut body = String::new();
    let mut first = true;
    for (n, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        body.push_str(&term_text(c, n, first));
        first = false;
    }
    if first {
        body.push('0');
    }
    body.push_str(&format!(" + O(q^{})", s.trunc_order()));
    if s.prefactor().is_zero() {
        body
    } else {
        format!("q^({}) * ({body})", fmt_rat(s.prefactor()))
    }
}

/// Polynomial rendering: like the series body, without the `O` term.
pub fn poly_to_text(p: &QPoly) -> String {
    let mut body = String::new();
    let mut first = true;
    for (n, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        body.push_str(&term_text(c, n, first));
        first = false;
    }
    if first {
        body.push('0');
    }
    body
}

struct Scanner<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Self { text: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::InvalidArgument(format!("series parse error at byte {}: {msg}", self.pos))
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    fn rational(&mut self) -> Result<Rat> {
        let n = self.integer()?;
        if self.eat(b'/') {
            let d = self.integer()?;
            if d == 0 {
                return Err(self.error("zero denominator"));
            }
            Ok(crate::rat::ratio(n, d))
        } else {
            Ok(rat(n))
        }
    }
}

/// Parse the canonical series grammar (see [`series_to_text`]). The
/// truncation order comes from the trailing `O(q^T)` term; without one it is
/// one more than the largest exponent mentioned.
pub fn parse_series(text: &str) -> Result<QSeries> {
    let mut sc = Scanner::new(text);
    // Prefactor form: q^(r) * ( body )
    let save = sc.pos;
    if sc.eat(b'q') {
        if sc.eat(b'^') && sc.peek() == Some(b'(') {
            sc.expect(b'(')?;
            let pre = sc.rational()?;
            sc.expect(b')')?;
            sc.expect(b'*')?;
            sc.expect(b'(')?;
            let body = parse_body(&mut sc)?;
            sc.expect(b')')?;
            sc.skip_ws();
            if sc.pos != sc.text.len() {
                return Err(sc.error("trailing input"));
            }
            return Ok(body.shift_prefactor(&pre));
        }
        sc.pos = save;
    }
    let body = parse_body(&mut sc)?;
    sc.skip_ws();
    if sc.pos != sc.text.len() {
        return Err(sc.error("trailing input"));
    }
    Ok(body)
}

fn parse_body(sc: &mut Scanner<'_>) -> Result<QSeries> {
    let mut terms: Vec<(usize, Rat)> = Vec::new();
    let mut trunc: Option<usize> = None;
    let mut first = true;
    loop {
        let sign = if first {
            first = false;
            if sc.eat(b'-') {
                -1
            } else {
                if sc.peek() == Some(b'+') {
                    sc.pos += 1;
                }
                1
            }
        } else {
            match sc.peek() {
                Some(b'+') => {
                    sc.pos += 1;
                    1
                }
                Some(b'-') => {
                    sc.pos += 1;
                    -1
                }
                _ => break,
            }
        };
        if trunc.is_some() {
            return Err(sc.error("O(q^T) must be the final term"));
        }
        match sc.peek() {
            Some(b'O') => {
                sc.pos += 1;
                sc.expect(b'(')?;
                sc.expect(b'q')?;
                sc.expect(b'^')?;
                let t = sc.integer()?;
                sc.expect(b')')?;
                if sign < 0 || t < 1 {
                    return Err(sc.error("invalid O(q^T) term"));
                }
                trunc = Some(t as usize);
            }
            Some(b'q') => {
                sc.pos += 1;
                let exp = if sc.eat(b'^') { sc.integer()? } else { 1 };
                if exp < 0 {
                    return Err(sc.error("negative exponent in series body"));
                }
                terms.push((exp as usize, rat(sign)));
            }
            Some(c) if c.is_ascii_digit() => {
                let coeff = sc.rational()?;
                let exp = if sc.eat(b'*') {
                    sc.expect(b'q')?;
                    if sc.eat(b'^') {
                        let e = sc.integer()?;
                        if e < 0 {
                            return Err(sc.error("negative exponent in series body"));
                        }
                        e as usize
                    } else {
                        1
                    }
                } else {
                    0
                };
                terms.push((exp, coeff * rat(sign)));
            }
            _ => return Err(sc.error("expected a term")),
        }
    }
    let trunc = match trunc {
        Some(t) => t,
        None => terms.iter().map(|(e, _)| e + 1).max().unwrap_or(1),
    };
    let mut coeffs = vec![Rat::zero(); trunc];
    for (e, c) in terms {
        if e >= trunc {
            return Err(Error::BeyondTruncation { index: e, trunc });
        }
        coeffs[e] += c;
    }
    Ok(QSeries::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn render_basic() {
        let s = QSeries::from_coeffs(vec![rat(1), rat(-1), rat(0), ratio(1, 2)]);
        assert_eq!(series_to_text(&s), "1 - q + 1/2*q^3 + O(q^4)");
        assert_eq!(series_to_text(&QSeries::zero(3)), "0 + O(q^3)");
        let t = QSeries::with_prefactor(vec![rat(2), rat(0), rat(2)], ratio(1, 4));
        assert_eq!(series_to_text(&t), "q^(1/4) * (2 + 2*q^2 + O(q^3))");
    }

    #[test]
    fn parse_round_trip() {
        let cases = [
            QSeries::from_coeffs(vec![rat(1), rat(-1), rat(0), ratio(1, 2)]),
            QSeries::zero(7),
            QSeries::with_prefactor(vec![rat(2), rat(0), rat(2)], ratio(1, 4)),
            QSeries::with_prefactor(vec![rat(1), rat(5)], rat(-1)),
        ];
        for s in cases {
            assert_eq!(parse_series(&series_to_text(&s)).unwrap(), s);
        }
    }

    #[test]
    fn parse_is_whitespace_insensitive() {
        let a = parse_series("1-q+2*q^3+O(q^5)").unwrap();
        let b = parse_series(" 1 - q + 2*q^3 + O(q^5) ").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trunc_order(), 5);
    }

    #[test]
    fn parse_errors_are_positioned() {
        let err = parse_series("1 + ?").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("byte"), "{msg}");
        assert!(parse_series("O(q^3) + 1").is_err());
        assert!(parse_series("q^7 + O(q^3)").is_err());
    }

    #[test]
    fn omitted_o_term_uses_degree() {
        let s = parse_series("1 + q^4").unwrap();
        assert_eq!(s.trunc_order(), 5);
    }
}
