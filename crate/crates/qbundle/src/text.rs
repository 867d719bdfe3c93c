//! Text syntax for scalars, polynomials, forms and tensors.
//!
//! Expressions use generator names, `^` with an integer exponent, `*` for
//! products, `/\` for the wedge product (the same product on forms), `+`
//! and `-`, parenthesized scalars such as `(3/2*q^-2*l^1 + 1)`, and `d(...)`
//! for the differential. The names `q` and `l` denote the parameters unless
//! the alphabet declares generators with those names. Tensors are sums of
//! terms `(c)*(w1 | w2 | ...)`.

use std::collections::HashMap;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::calculus::{Calculus, CalculusError};
use crate::coeff::Scalar;
use crate::freealg::{Alphabet, Poly, Tensor, Word};
use crate::rewrite::Presentation;
use std::sync::Arc;

/// Errors raised while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// Malformed input at a byte offset.
    #[error("syntax error at {pos}: {msg}")]
    Syntax {
        /// Byte offset into the source.
        pos: usize,
        /// What went wrong.
        msg: String,
    },
    /// A name that is neither a generator, a binding nor a parameter.
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    /// The differential failed on the parsed argument.
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Wedge,
    Slash,
    Caret,
    LParen,
    RParen,
    Bar,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '|' => out.push((start, Tok::Bar)),
            '/' => {
                if bytes.get(i + 1) == Some(&b'\\') {
                    out.push((start, Tok::Wedge));
                    i += 1;
                } else {
                    out.push((start, Tok::Slash));
                }
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i]
                    .parse()
                    .map_err(|_| syntax(start, "bad number"))?;
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

/// Parsing context: the target presentation, an optional calculus for
/// `d(...)`, and named bindings.
pub struct Context<'a> {
    alphabet: &'a Alphabet,
    pres: Option<&'a Presentation>,
    calc: Option<&'a Calculus>,
    bindings: Option<&'a HashMap<String, Poly>>,
}

impl<'a> Context<'a> {
    /// Polynomials over a presentation.
    pub fn new(pres: &'a Presentation) -> Self {
        Context {
            alphabet: pres.alphabet(),
            pres: Some(pres),
            calc: None,
            bindings: None,
        }
    }

    /// Polynomials over a bare alphabet, left unreduced.
    pub fn raw(alphabet: &'a Alphabet) -> Self {
        Context {
            alphabet,
            pres: None,
            calc: None,
            bindings: None,
        }
    }

    /// Forms of a calculus, with `d(...)` available.
    pub fn forms(calc: &'a Calculus) -> Self {
        Context {
            alphabet: calc.omega().alphabet(),
            pres: Some(calc.omega()),
            calc: Some(calc),
            bindings: None,
        }
    }

    /// Adds named bindings, looked up before generator names.
    pub fn with_bindings(mut self, bindings: &'a HashMap<String, Poly>) -> Self {
        self.bindings = Some(bindings);
        self
    }

    /// Parses and normalizes an expression.
    pub fn parse(&self, src: &str) -> Result<Poly, ParseError> {
        let toks = lex(src)?;
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            end: src.len(),
            ctx: self,
        };
        let v = p.expr()?;
        if p.pos < toks.len() {
            return Err(syntax(toks[p.pos].0, "unexpected token"));
        }
        Ok(self.normalize(&v))
    }

    fn normalize(&self, p: &Poly) -> Poly {
        match self.pres {
            Some(pres) => pres.nf(p),
            None => p.clone(),
        }
    }
}

struct Parser<'t, 'c> {
    toks: &'t [(usize, Tok)],
    pos: usize,
    end: usize,
    ctx: &'c Context<'c>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(syntax(self.here(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.signed_term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc + self.signed_term()?;
            } else if self.eat(&Tok::Minus) {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn signed_term(&mut self) -> Result<Poly, ParseError> {
        if self.eat(&Tok::Minus) {
            Ok(-self.signed_term()?)
        } else {
            self.term()
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        while self.eat(&Tok::Star) || self.eat(&Tok::Wedge) {
            let rhs = if self.eat(&Tok::Minus) {
                -self.power()?
            } else {
                self.power()?
            };
            acc = acc.concat_mul(&rhs);
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(&Tok::Minus);
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v: i64 = n.try_into().map_err(|_| syntax(at, "exponent too large"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(syntax(at, "expected an integer exponent")),
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let at = self.here();
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let e = self.exponent()?;
        self.raise(base, e, at)
    }

    fn raise(&self, base: Poly, e: i64, at: usize) -> Result<Poly, ParseError> {
        let base = if e < 0 { self.invert(&base, at)? } else { base };
        let mut out = Poly::one();
        for _ in 0..e.unsigned_abs() {
            out = out.concat_mul(&base);
        }
        Ok(out)
    }

    fn invert(&self, p: &Poly, at: usize) -> Result<Poly, ParseError> {
        let alphabet = self.ctx.alphabet;
        if p.len() == 1 {
            let (w, c) = p.terms().next().expect("one term");
            let ci = c
                .inverse()
                .map_err(|_| syntax(at, "only monomial scalars are invertible"))?;
            let mut inv = Word::new();
            for &x in w.iter().rev() {
                inv.push(alphabet.inverse(x).ok_or_else(|| {
                    syntax(at, format!("{} is not invertible", alphabet.letter_name(x)))
                })?);
            }
            return Ok(Poly::term(inv, ci));
        }
        Err(syntax(at, "only monomials can be inverted"))
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut r = BigRational::from_integer(n);
                if self.eat(&Tok::Slash) {
                    let dat = self.here();
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.pos += 1;
                            r /= BigRational::from_integer(d);
                        }
                        _ => return Err(syntax(dat, "expected a nonzero denominator")),
                    }
                }
                Ok(Poly::scalar(Scalar::monomial(r, 0, 0)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(p) = self.ctx.bindings.and_then(|b| b.get(&name)) {
                    return Ok(p.clone());
                }
                if let Ok(x) = self.ctx.alphabet.letter(&name) {
                    return Ok(Poly::letter(x));
                }
                match name.as_str() {
                    "q" => Ok(Poly::scalar(Scalar::q(1))),
                    "l" => Ok(Poly::scalar(Scalar::l(1))),
                    "d" if self.peek() == Some(&Tok::LParen) => {
                        let calc = self
                            .ctx
                            .calc
                            .ok_or_else(|| syntax(at, "d(...) needs a calculus"))?;
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect(&Tok::RParen, "`)`")?;
                        Ok(calc.d(&self.ctx.normalize(&arg))?)
                    }
                    _ => Err(ParseError::UnknownGenerator(name)),
                }
            }
            _ => Err(syntax(at, "expected a term")),
        }
    }
}

/// Parses a scalar such as `3/2*q^-2*l^1 + 1`.
pub fn parse_scalar(src: &str) -> Result<Scalar, ParseError> {
    let ground = Presentation::ground();
    let p = Context::new(&ground).parse(src)?;
    Ok(p.constant())
}

/// Parses a polynomial over a presentation.
pub fn parse_poly(src: &str, pres: &Presentation) -> Result<Poly, ParseError> {
    Context::new(pres).parse(src)
}

/// Parses a form, with `d(...)` evaluated by the calculus.
pub fn parse_form(src: &str, calc: &Calculus) -> Result<Poly, ParseError> {
    Context::forms(calc).parse(src)
}

/// Splits `src` at top-level occurrences of `sep` (outside parentheses).
fn split_top(src: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &src[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &src[start..]));
    out
}

/// Parses a tensor `(c)*(w1 | w2) + ...` over the given components. A
/// parenthesized group with `|` separators is a tuple of legs; any other
/// factor is a scalar.
pub fn parse_tensor(src: &str, comps: &[Arc<Presentation>]) -> Result<Tensor, ParseError> {
    let trimmed = src.trim();
    if trimmed == "0" {
        return Ok(Tensor::zero(comps.to_vec()));
    }
    let mut out = Tensor::zero(comps.to_vec());
    for (offset, chunk, sign) in split_sum(trimmed) {
        let mut term = Tensor::one(comps.to_vec()).scale(&sign);
        for (foff, factor) in split_top(chunk, '*') {
            let pos = offset + foff;
            let f = factor.trim();
            let inner = f.strip_prefix('(').and_then(|x| x.strip_suffix(')'));
            let legs = inner.map(|x| split_top(x, '|'));
            match legs {
                Some(legs) if legs.len() > 1 || comps.len() == 1 => {
                    if legs.len() != comps.len() {
                        return Err(syntax(
                            pos,
                            format!("expected {} legs, found {}", comps.len(), legs.len()),
                        ));
                    }
                    let mut polys = Vec::new();
                    for ((_, leg), pres) in legs.iter().zip(comps) {
                        polys.push(parse_poly(leg, pres).map_err(|e| shift(e, pos + 1))?);
                    }
                    term = term
                        .mul(&Tensor::from_polys(comps.to_vec(), &polys))
                        .map_err(|e| syntax(pos, e.to_string()))?;
                }
                _ => {
                    let c = parse_scalar(f).map_err(|e| shift(e, pos))?;
                    term = term.scale(&c);
                }
            }
        }
        out = out.add(&term);
    }
    Ok(out)
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + by, msg },
        other => other,
    }
}

/// Splits at top-level `+` and binary `-`, returning offsets and signs.
fn split_sum(src: &str) -> Vec<(usize, &str, Scalar)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = Scalar::one();
    let bytes = src.as_bytes();
    let mut prev_sig: Option<u8> = None;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let binary =
                    matches!(prev_sig, Some(p) if p != b'*' && p != b'^' && p != b'+' && p != b'-');
                if binary {
                    out.push((start, &src[start..i], sign.clone()));
                    sign = if c == b'-' {
                        -Scalar::one()
                    } else {
                        Scalar::one()
                    };
                    start = i + 1;
                } else if c == b'-' && src[start..i].trim().is_empty() {
                    sign = -sign;
                    start = i + 1;
                }
            }
            _ => {}
        }
        if !c.is_ascii_whitespace() {
            prev_sig = Some(c);
        }
    }
    out.push((start, &src[start..], sign));
    out
}

/// Renders a polynomial so that [`parse_poly`] reads it back.
pub fn render_poly(p: &Poly, pres: &Presentation) -> String {
    pres.render(p)
}

/// A rational number as `n` or `n/m`.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
