//! Plain-text grammar for rational functions.
//!
//! Printing produces sums of monomials in descending degree,
//! `(1/2+0i)*z^2 + (0+1i)`, and `(NUM) / (DEN)` when the denominator is not
//! one. Parsing accepts those forms plus general expressions:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power (('*'|'/')? power)*          -- juxtaposition multiplies
//! power  := atom ('^' ['-'] integer)?
//! atom   := number | complex | 'z' | 'i' | '(' expr ')'
//! complex:= '(' real ('+'|'-') real 'i' ')'    -- real is p, p/q or a.b
//! ```
//!
//! `over` is accepted as a low-precedence division: `z over z^3 - 2`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Zero;
use regex::Regex;

use super::poly::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::scalar::{cx_literal, Real};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Complex(String, char, String),
    Z,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn complex_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        let real = r"\d+(?:\.\d+)?(?:/\d+)?";
        Regex::new(&format!(r"^\(\s*([+-]?{real})\s*([+-])\s*({real})\s*i\s*\)")).unwrap()
    })
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                if let Some(cap) = complex_re().captures(&src[i..]) {
                    let whole = cap.get(0).unwrap().end();
                    out.push((
                        i,
                        Tok::Complex(cap[1].to_string(), cap[2].chars().next().unwrap(), cap[3].to_string()),
                    ));
                    i += whole;
                } else {
                    out.push((i, Tok::LParen));
                    i += 1;
                }
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            'z' => {
                out.push((i, Tok::Z));
                i += 1;
            }
            'i' => {
                out.push((i, Tok::I));
                i += 1;
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                out.push((start, Tok::Num(src[start..i].to_string())));
            }
            other => {
                return Err(Error::Parse { pos: i, msg: format!("unexpected character {other:?}") });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.here(), msg: msg.to_string() })
    }

    fn expr<R: Real>(&mut self) -> Result<RationalFunction<R>> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.pos += 1,
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            _ => {}
        }
        let mut acc = self.term::<R>()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term::<R>()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term::<R>()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<R: Real>(&mut self) -> Result<RationalFunction<R>> {
        let mut acc = self.power::<R>()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.power::<R>()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let rhs = self.power::<R>()?;
                    acc = acc
                        .checked_div(&rhs)
                        .map_err(|_| Error::Parse { pos: at, msg: "division by zero".into() })?;
                }
                Some(Tok::Num(_)) | Some(Tok::Complex(..)) | Some(Tok::Z) | Some(Tok::I) | Some(Tok::LParen) => {
                    acc = &acc * &self.power::<R>()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power<R: Real>(&mut self) -> Result<RationalFunction<R>> {
        let base = self.atom::<R>()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.here();
        let k: i32 = match self.peek() {
            Some(Tok::Num(s)) => s
                .parse()
                .map_err(|_| Error::Parse { pos: at, msg: "exponent must be an integer".into() })?,
            _ => return self.err("expected integer exponent"),
        };
        self.pos += 1;
        base.powi(if neg { -k } else { k })
            .map_err(|_| Error::Parse { pos: at, msg: "negative power of zero".into() })
    }

    fn atom<R: Real>(&mut self) -> Result<RationalFunction<R>> {
        let at = self.here();
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        self.pos += 1;
        match tok {
            Tok::Num(s) => {
                let v = R::parse_literal(&s).ok_or(Error::Parse { pos: at, msg: format!("bad number {s:?}") })?;
                Ok(RationalFunction::constant(Complex::new(v, R::zero())))
            }
            Tok::Complex(re, sign, im) => {
                let bad = || Error::Parse { pos: at, msg: "bad complex literal".into() };
                let re = R::parse_literal(&re).ok_or_else(bad)?;
                let mut im = R::parse_literal(&im).ok_or_else(bad)?;
                if sign == '-' {
                    im = -im;
                }
                Ok(RationalFunction::constant(Complex::new(re, im)))
            }
            Tok::Z => Ok(RationalFunction::z()),
            Tok::I => Ok(RationalFunction::constant(Complex::new(R::zero(), R::one()))),
            Tok::LParen => {
                let inner = self.expr::<R>()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Minus => Ok(-self.power::<R>()?),
            _ => Err(Error::Parse { pos: at, msg: "unexpected token".into() }),
        }
    }
}

fn parse_expr<R: Real>(src: &str, offset: usize) -> Result<RationalFunction<R>> {
    let toks = lex(src).map_err(|e| shift(e, offset))?;
    let mut p = Parser { toks: &toks, pos: 0, len: src.len() };
    let r = p.expr::<R>().map_err(|e| shift(e, offset))?;
    if p.pos != toks.len() {
        return Err(shift(Error::Parse { pos: p.here(), msg: "trailing input".into() }, offset));
    }
    Ok(r)
}

fn shift(e: Error, offset: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
        other => other,
    }
}

pub fn parse_rational<R: Real>(src: &str) -> Result<RationalFunction<R>> {
    if let Some(idx) = src.find(" over ") {
        let num = parse_expr::<R>(&src[..idx], 0)?;
        let den = parse_expr::<R>(&src[idx + 6..], idx + 6)?;
        return num
            .checked_div(&den)
            .map_err(|_| Error::Parse { pos: idx, msg: "division by zero".into() });
    }
    parse_expr(src, 0)
}

/// Parses a constant expression (no `z`) into a complex scalar.
pub fn parse_complex<R: Real>(src: &str) -> Result<Complex<R>> {
    let r = parse_rational::<R>(src)?;
    if !r.is_constant() {
        return Err(Error::Parse { pos: 0, msg: "expected a constant".into() });
    }
    Ok(r.num().coeff(0) / r.den().coeff(0))
}

impl<R: Real> fmt::Display for Polynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "(0+0i)");
        }
        let parts: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| match n {
                0 => cx_literal(c),
                1 => format!("{}*z", cx_literal(c)),
                _ => format!("{}*z^{}", cx_literal(c), n),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: Real> fmt::Display for RationalFunction<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den().degree() == 0 && self.den().coeff(0) == Complex::new(R::one(), R::zero()) {
            write!(f, "{}", self.num())
        } else {
            write!(f, "({}) / ({})", self.num(), self.den())
        }
    }
}

impl<R: Real> FromStr for RationalFunction<R> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}
