//! Text form of (3,2,2) Bell expressions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! inequality := sum [ ("<=" | "≤") signed_number ]
//! sum        := [sign] product { sign product }
//! product    := factor { ["*"] factor }
//! factor     := number | setting | "(" sum ")"
//! setting    := ("A" | "B" | "C") ("1" | "2")
//! number     := digits ["." digits] | digits "/" digits
//! ```
//!
//! Products are expanded; a monomial may contain at most one setting per
//! party.

use super::BellExpression322;
use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

type Tensor = [[[Rational64; 3]; 3]; 3];

fn zero_tensor() -> Tensor {
    [[[Rational64::zero(); 3]; 3]; 3]
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational64),
    Setting(usize, usize),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Le,
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn number(text: &str, pos: usize) -> Result<Rational64> {
    let overflow = || parse_err(pos, format!("number {text:?} out of range"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.parse().map_err(|_| overflow())?;
        let d: i64 = d.parse().map_err(|_| overflow())?;
        if d == 0 {
            return Err(parse_err(pos, "zero denominator"));
        }
        return Ok(Rational64::new(n, d));
    }
    match text.split_once('.') {
        None => Ok(Rational64::from_integer(text.parse().map_err(|_| overflow())?)),
        Some((int, frac)) => {
            if frac.len() > 18 {
                return Err(overflow());
            }
            let den = 10i64.pow(frac.len() as u32);
            let digits = format!("{int}{frac}");
            let num: i64 = digits.parse().map_err(|_| overflow())?;
            Ok(Rational64::new(num, den))
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, ch) = bytes[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((pos, Tok::Plus));
                i += 1
            }
            '-' | '\u{2212}' => {
                out.push((pos, Tok::Minus));
                i += 1
            }
            '*' | '\u{00b7}' => {
                out.push((pos, Tok::Star));
                i += 1
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1
            }
            '\u{2264}' => {
                out.push((pos, Tok::Le));
                i += 1
            }
            '<' => {
                if bytes.get(i + 1).map(|b| b.1) == Some('=') {
                    out.push((pos, Tok::Le));
                    i += 2
                } else {
                    return Err(parse_err(pos, "expected '<='"));
                }
            }
            'A' | 'B' | 'C' => {
                let party = (ch as u8 - b'A') as usize;
                match bytes.get(i + 1).map(|b| b.1) {
                    Some('1') => out.push((pos, Tok::Setting(party, 1))),
                    Some('2') => out.push((pos, Tok::Setting(party, 2))),
                    _ => return Err(parse_err(pos, format!("setting {ch} must be followed by 1 or 2"))),
                }
                i += 2;
                if bytes.get(i).is_some_and(|b| b.1.is_ascii_alphanumeric()) {
                    return Err(parse_err(bytes[i].0, "unexpected character after setting"));
                }
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut seen_sep = false;
                while i < bytes.len() {
                    let c = bytes[i].1;
                    if c.is_ascii_digit() {
                        i += 1;
                    } else if (c == '.' || c == '/') && !seen_sep {
                        seen_sep = true;
                        i += 1;
                    } else {
                        break;
                    }
                }
                let end = bytes.get(i).map_or(src.len(), |b| b.0);
                let text = &src[pos..end];
                let last = bytes[i - 1].1;
                if text.starts_with('.') || last == '.' || last == '/' {
                    return Err(parse_err(bytes[start].0, format!("malformed number {text:?}")));
                }
                out.push((pos, Tok::Num(number(text, pos)?)));
            }
            other => return Err(parse_err(pos, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// Sparse multilinear polynomial: monomial index (a, b, c) -> coefficient.
#[derive(Clone)]
struct Poly(Tensor);

impl Poly {
    fn constant(x: Rational64) -> Self {
        let mut t = zero_tensor();
        t[0][0][0] = x;
        Poly(t)
    }

    fn setting(party: usize, k: usize) -> Self {
        let mut idx = [0; 3];
        idx[party] = k;
        let mut t = zero_tensor();
        t[idx[0]][idx[1]][idx[2]] = Rational64::one();
        Poly(t)
    }

    fn terms(&self) -> impl Iterator<Item = ([usize; 3], Rational64)> + '_ {
        (0..27).filter_map(move |n| {
            let idx = [n / 9, (n / 3) % 3, n % 3];
            let v = self.0[idx[0]][idx[1]][idx[2]];
            (!v.is_zero()).then_some((idx, v))
        })
    }

    fn add(&mut self, other: &Poly, sign: Rational64) {
        for (i, v) in other.terms() {
            self.0[i[0]][i[1]][i[2]] += v * sign;
        }
    }

    fn mul(&self, other: &Poly, pos: usize) -> Result<Poly> {
        let mut t = zero_tensor();
        for (i, x) in self.terms() {
            for (j, y) in other.terms() {
                let mut k = [0; 3];
                for p in 0..3 {
                    if i[p] != 0 && j[p] != 0 {
                        return Err(Error::Degree { party: (b'A' + p as u8) as char, pos });
                    }
                    k[p] = i[p] + j[p];
                }
                t[k[0]][k[1]][k[2]] += x * y;
            }
        }
        Ok(Poly(t))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = Poly::constant(Rational64::zero());
        let mut sign = Rational64::one();
        match self.peek() {
            Some(Tok::Plus) => self.at += 1,
            Some(Tok::Minus) => {
                sign = -sign;
                self.at += 1
            }
            _ => {}
        }
        loop {
            let p = self.product()?;
            acc.add(&p, sign);
            match self.peek() {
                Some(Tok::Plus) => sign = Rational64::one(),
                Some(Tok::Minus) => sign = -Rational64::one(),
                _ => return Ok(acc),
            }
            self.at += 1;
        }
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                }
                Some(Tok::Num(_)) | Some(Tok::Setting(..)) | Some(Tok::LParen) => {}
                _ => return Ok(acc),
            }
            let pos = self.pos();
            let f = self.factor()?;
            acc = acc.mul(&f, pos)?;
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let pos = self.pos();
        match self.toks.get(self.at).map(|t| t.1.clone()) {
            Some(Tok::Num(x)) => {
                self.at += 1;
                Ok(Poly::constant(x))
            }
            Some(Tok::Setting(p, k)) => {
                self.at += 1;
                Ok(Poly::setting(p, k))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(parse_err(self.pos(), "expected ')'"));
                }
                self.at += 1;
                Ok(inner)
            }
            Some(t) => Err(parse_err(pos, format!("unexpected token {t:?}"))),
            None => Err(parse_err(pos, "unexpected end of input")),
        }
    }

    fn signed_number(&mut self) -> Result<Rational64> {
        let mut sign = Rational64::one();
        match self.peek() {
            Some(Tok::Minus) => {
                sign = -sign;
                self.at += 1;
            }
            Some(Tok::Plus) => self.at += 1,
            _ => {}
        }
        match self.toks.get(self.at).map(|t| t.1.clone()) {
            Some(Tok::Num(x)) => {
                self.at += 1;
                Ok(sign * x)
            }
            _ => Err(parse_err(self.pos(), "expected a number after '<='")),
        }
    }
}

/// Parses an expression such as `"(A1 B1 + A2 B2) C1 + (A2 B1 - A1 B2) C2 <= 2"`.
pub fn parse_expression(text: &str) -> Result<BellExpression322<Rational64>> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(parse_err(0, "empty expression"));
    }
    let mut p = Parser { toks, at: 0, end: text.len() };
    let poly = p.sum()?;
    let mut local_bound = None;
    if p.peek() == Some(&Tok::Le) {
        p.at += 1;
        local_bound = Some(p.signed_number()?);
    }
    if p.at != p.toks.len() {
        return Err(parse_err(p.pos(), "trailing input"));
    }
    Ok(BellExpression322 { coeff: poly.0, local_bound })
}

/// Parses a file with one inequality per line. Blank lines and text after
/// `#` are ignored. Errors carry the byte offset within the whole file.
pub fn parse_expression_file(text: &str) -> Result<Vec<BellExpression322<Rational64>>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            let shift = |e: Error| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
                Error::Degree { party, pos } => Error::Degree { party, pos: pos + offset },
                other => other,
            };
            out.push(parse_expression(body).map_err(shift)?);
        }
        offset += line.len();
    }
    Ok(out)
}

fn format_rational(x: Rational64) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Canonical text: monomials in lexicographic `(a, b, c)` order, explicit
/// coefficients only where they differ from 1.
pub fn render(expr: &BellExpression322<Rational64>) -> String {
    let poly = Poly(expr.coeff);
    let mut out = String::new();
    for (idx, v) in poly.terms() {
        let names: Vec<String> = idx
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(p, k)| format!("{}{}", (b'A' + p as u8) as char, k))
            .collect();
        let mag = v.abs();
        let sign = if v.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if v.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mut parts = Vec::new();
        if names.is_empty() || !mag.is_one() {
            parts.push(format_rational(mag));
        }
        parts.extend(names);
        out.push_str(&parts.join(" "));
    }
    if out.is_empty() {
        out.push('0');
    }
    if let Some(b) = expr.local_bound {
        out.push_str(&format!(" <= {}", format_rational(b)));
    }
    out
}
