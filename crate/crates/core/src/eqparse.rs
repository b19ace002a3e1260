//! Text format for Clunie-type equations `U·P = Q`.
//!
//! ```text
//! equation := poly "=" rhs
//! rhs      := poly | "(" poly ")" "/" "(" poly ")"
//! poly     := ["+"|"-"] term (("+"|"-") term)*
//! term     := factor ("*" factor)*
//! factor   := atom ("^" nat)?
//! atom     := "w" | "w(z" sign shift ")" | ident ["!=0"] | "{" ratfun "}" | "(" poly ")"
//! ```
//!
//! A left side of the form `(U)*(P)` with a shift-free `U` is read as
//! `U·P`. Parsing expands products eagerly into sparse term maps.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffpoly::{Coefficient, DiffPolynomial, MultiIndex, Symbol, Term};
use crate::exact::{
    parse_decimal, parse_rational_literal, ExactComplex, Poly, RatFun, Rational,
};

const MAX_DEPTH: usize = 64;
const MAX_TERMS: usize = 4096;
const MAX_Z_DEGREE: usize = 1000;
const MAX_COEFF_BITS: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("zero shift at byte {pos}: shifts must be non-zero")]
    ZeroShift { pos: usize },
    #[error("mixed symbolic and numeric coefficients (byte {pos})")]
    MixedMode { pos: usize },
    #[error("U and Q must not contain shifted variables (byte {pos})")]
    ShiftInUQ { pos: usize },
    #[error("two symbolic coefficients land on the same monomial (byte {pos})")]
    SymbolicDuplicate { pos: usize },
    #[error("product of symbolic coefficients at byte {pos}")]
    SymbolicProduct { pos: usize },
    #[error("symbol `{name}` used more than once")]
    DuplicateSymbol { name: String },
    #[error("{part} is identically zero")]
    Degenerate { part: String },
    #[error("size limit exceeded at byte {pos}: {msg}")]
    Limit { pos: usize, msg: String },
    #[error("U and Q share the factor {gcd}")]
    CommonFactor { gcd: String },
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        pos,
        msg: msg.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coprimality {
    Verified,
    Asserted { caveat: String },
    Unchecked,
}

/// `U·P = Q` with `U`, `Q` polynomials in the unshifted w only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClunieEquation {
    pub u: DiffPolynomial,
    pub p: DiffPolynomial,
    pub q: DiffPolynomial,
    pub coprimality: Coprimality,
}

impl ClunieEquation {
    /// Validates the structural invariants and normalizes all parts.
    pub fn new(u: DiffPolynomial, p: DiffPolynomial, q: DiffPolynomial) -> Result<Self, ParseError> {
        let norm = |d: &DiffPolynomial, part: &str| {
            d.normalize().map_err(|_| ParseError::SymbolicDuplicate { pos: 0 }).and_then(|n| {
                if n.is_empty() {
                    Err(ParseError::Degenerate { part: part.into() })
                } else {
                    Ok(n)
                }
            })
        };
        let (u, p, q) = (norm(&u, "U")?, norm(&p, "P")?, norm(&q, "Q")?);
        if !u.is_w_only() || !q.is_w_only() {
            return Err(ParseError::ShiftInUQ { pos: 0 });
        }
        let u = flatten_w_only(&u);
        let q = flatten_w_only(&q);
        let eq = ClunieEquation {
            u,
            p,
            q,
            coprimality: Coprimality::Unchecked,
        };
        eq.check_coefficients(0)?;
        Ok(eq)
    }

    fn all_terms(&self) -> impl Iterator<Item = &Term> {
        self.u.terms().iter().chain(self.p.terms()).chain(self.q.terms())
    }

    pub fn is_symbolic(&self) -> bool {
        self.all_terms().any(|t| t.coeff.is_symbolic())
    }

    fn check_coefficients(&self, pos: usize) -> Result<(), ParseError> {
        let symbolic = self.is_symbolic();
        let mut names = BTreeSet::new();
        for t in self.all_terms() {
            match &t.coeff {
                Coefficient::Symbolic(s) => {
                    if !names.insert(s.name.clone()) {
                        return Err(ParseError::DuplicateSymbol {
                            name: s.name.clone(),
                        });
                    }
                }
                c @ Coefficient::Rational(_) => {
                    if symbolic && !c.is_unit() {
                        return Err(ParseError::MixedMode { pos });
                    }
                }
            }
        }
        Ok(())
    }

    /// The canonical text; parses back to an equal equation.
    pub fn to_canonical_text(&self) -> String {
        let p = poly_text(&self.p);
        let q = poly_text(&self.q);
        let u_is_one = self.u.terms().len() == 1
            && self.u.terms()[0].index.total() == 0
            && matches!(&self.u.terms()[0].coeff, Coefficient::Rational(r) if r.is_one());
        if u_is_one {
            format!("{p} = {q}")
        } else {
            format!("{p} = ({q})/({})", poly_text(&self.u))
        }
    }
}

/// Drops the (all-zero) shift columns of a shift-free polynomial.
fn flatten_w_only(d: &DiffPolynomial) -> DiffPolynomial {
    let terms = d
        .terms()
        .iter()
        .map(|t| Term {
            coeff: t.coeff.clone(),
            index: MultiIndex(vec![t.index.unshifted()]),
        })
        .collect();
    DiffPolynomial::new(Vec::new(), terms)
        .and_then(|x| x.normalize())
        .expect("flattened shift-free polynomial")
}

fn term_text(t: &Term, d: &DiffPolynomial, columns: &[usize]) -> (bool, String) {
    let (neg, coeff) = match &t.coeff {
        Coefficient::Rational(r) => {
            if r.is_one() {
                (false, String::new())
            } else if r.is_minus_one() {
                (true, String::new())
            } else if r.is_negative() {
                (true, format!("{{{}}}", r.neg().to_text()))
            } else {
                (false, format!("{{{}}}", r.to_text()))
            }
        }
        Coefficient::Symbolic(s) => (
            s.negated,
            format!("{}{}", s.name, if s.nonzero { "!=0" } else { "" }),
        ),
    };
    let mut factors = Vec::new();
    if !coeff.is_empty() {
        factors.push(coeff);
    }
    let exps = t.index.exponents();
    for &j in columns {
        let e = exps[j];
        if e == 0 {
            continue;
        }
        let var = if j == 0 {
            "w".to_string()
        } else {
            format!("w(z{})", d.shifts()[j - 1].value.to_signed_text())
        };
        factors.push(if e == 1 { var } else { format!("{var}^{e}") });
    }
    if factors.is_empty() {
        factors.push("{1}".into());
    }
    (neg, factors.join("*"))
}

/// Column order for printing: w first, then shifts by descending real part,
/// ties broken by descending imaginary part.
fn canonical_columns(d: &DiffPolynomial) -> Vec<usize> {
    let mut shifted: Vec<usize> = (1..=d.shifts().len()).collect();
    shifted.sort_by(|&a, &b| {
        let (x, y) = (&d.shifts()[a - 1].value, &d.shifts()[b - 1].value);
        y.re.cmp(&x.re).then_with(|| y.im.cmp(&x.im))
    });
    std::iter::once(0).chain(shifted).collect()
}

fn poly_text(d: &DiffPolynomial) -> String {
    let columns = canonical_columns(d);
    let key = |t: &Term| -> Vec<u64> { columns.iter().map(|&j| t.index.exponents()[j]).collect() };
    let mut terms: Vec<&Term> = d.terms().iter().collect();
    terms.sort_by_cached_key(|t| std::cmp::Reverse(key(t)));
    let mut s = String::new();
    for (k, t) in terms.into_iter().enumerate() {
        let (neg, body) = term_text(t, d, &columns);
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}

pub fn to_canonical_text(eq: &ClunieEquation) -> String {
    eq.to_canonical_text()
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Brace(String),
    NonZero,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'=' => Tok::Eq,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'!' => {
                let rest: String = text[i..]
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .take(3)
                    .collect();
                if !rest.starts_with("!=0") {
                    return syntax(i, "expected `!=0`");
                }
                // consume `!`, `=`, `0` skipping blanks
                let mut seen = 0;
                while seen < 3 {
                    if !b[i].is_ascii_whitespace() {
                        seen += 1;
                    }
                    i += 1;
                }
                out.push((Tok::NonZero, start));
                continue;
            }
            b'{' => {
                let close = match text[i + 1..].find('}') {
                    Some(k) => i + 1 + k,
                    None => return syntax(i, "unterminated `{`"),
                };
                let body = text[i + 1..close].to_string();
                i = close + 1;
                out.push((Tok::Brace(body), start));
                continue;
            }
            c if c.is_ascii_digit() || c == b'.' => {
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                out.push((Tok::Number(text[start..i].to_string()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return syntax(i, format!("unexpected character `{ch}`"));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

// --------------------------------------------------------- sparse terms

/// Sparse polynomial keyed by exponent vectors with trailing zeros trimmed.
#[derive(Clone, Debug)]
struct Sparse {
    terms: BTreeMap<Vec<u64>, Coefficient>,
    shift_pos: Option<usize>,
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn coeff_mul(a: &Coefficient, b: &Coefficient, pos: usize) -> Result<Coefficient, ParseError> {
    use Coefficient::*;
    match (a, b) {
        (Rational(x), Rational(y)) => {
            if x.bits() + y.bits() > MAX_COEFF_BITS || x.z_degree() + y.z_degree() > MAX_Z_DEGREE {
                return Err(ParseError::Limit {
                    pos,
                    msg: "coefficient too large".into(),
                });
            }
            Ok(Rational(x.mul(y)))
        }
        (Symbolic(_), Symbolic(_)) => Err(ParseError::SymbolicProduct { pos }),
        (Rational(r), s @ Symbolic(_)) | (s @ Symbolic(_), Rational(r)) => {
            if r.is_one() {
                Ok(s.clone())
            } else if r.is_minus_one() {
                Ok(s.neg())
            } else {
                Err(ParseError::MixedMode { pos })
            }
        }
    }
}

impl Sparse {
    fn constant(c: Coefficient) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Sparse {
            terms,
            shift_pos: None,
        }
    }

    fn var(k: usize, pos: usize) -> Self {
        let mut e = vec![0; k + 1];
        e[k] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Coefficient::one());
        Sparse {
            terms,
            shift_pos: (k > 0).then_some(pos),
        }
    }

    fn merge_pos(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    fn add_term(&mut self, e: Vec<u64>, c: Coefficient, pos: usize) -> Result<(), ParseError> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(Coefficient::Rational(a)) => match c {
                Coefficient::Rational(b) => {
                    let s = a.add(&b);
                    if !s.is_zero() {
                        self.terms.insert(e, Coefficient::Rational(s));
                    }
                }
                Coefficient::Symbolic(_) => return Err(ParseError::SymbolicDuplicate { pos }),
            },
            Some(Coefficient::Symbolic(_)) => return Err(ParseError::SymbolicDuplicate { pos }),
        }
        if self.terms.len() > MAX_TERMS {
            return Err(ParseError::Limit {
                pos,
                msg: "too many terms".into(),
            });
        }
        Ok(())
    }

    fn add(mut self, o: Sparse, negate: bool, pos: usize) -> Result<Sparse, ParseError> {
        self.shift_pos = Self::merge_pos(self.shift_pos, o.shift_pos);
        for (e, c) in o.terms {
            let c = if negate { c.neg() } else { c };
            self.add_term(e, c, pos)?;
        }
        Ok(self)
    }

    fn mul(&self, o: &Sparse, pos: usize) -> Result<Sparse, ParseError> {
        if self.terms.len().saturating_mul(o.terms.len()) > MAX_TERMS * 16 {
            return Err(ParseError::Limit {
                pos,
                msg: "expansion too large".into(),
            });
        }
        let mut out = Sparse {
            terms: BTreeMap::new(),
            shift_pos: Self::merge_pos(self.shift_pos, o.shift_pos),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let n = ea.len().max(eb.len());
                let mut e = Vec::with_capacity(n);
                for k in 0..n {
                    let x = ea.get(k).copied().unwrap_or(0);
                    let y = eb.get(k).copied().unwrap_or(0);
                    e.push(x.checked_add(y).ok_or_else(|| ParseError::Limit {
                        pos,
                        msg: "exponent overflow".into(),
                    })?);
                }
                out.add_term(trim(e), coeff_mul(ca, cb, pos)?, pos)?;
            }
        }
        Ok(out)
    }

    fn pow(&self, mut e: u64, pos: usize) -> Result<Sparse, ParseError> {
        let mut acc = Sparse::constant(Coefficient::one());
        acc.shift_pos = self.shift_pos;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, pos)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, pos)?;
            }
        }
        Ok(acc)
    }
}

// --------------------------------------------------------------- parser

#[derive(Debug)]
enum Shape {
    Plain,
    /// `(poly)` alone.
    Group(Box<Sparse>),
    /// `(a)*(b)`.
    TwoGroups(Box<Sparse>, Box<Sparse>),
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    depth: usize,
    shifts: Vec<ExactComplex>,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<usize, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            syntax(self.pos(), format!("expected {what}"))
        }
    }

    fn poly(&mut self) -> Result<(Sparse, Shape), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::Limit {
                pos: self.pos(),
                msg: "nesting too deep".into(),
            });
        }
        let mut negate = false;
        let lead_sign = matches!(self.peek(), Tok::Plus | Tok::Minus);
        if lead_sign {
            negate = self.bump().0 == Tok::Minus;
        }
        let pos = self.pos();
        let (first, mut shape) = self.term()?;
        if lead_sign {
            shape = Shape::Plain;
        }
        let mut acc = Sparse::constant(Coefficient::Rational(RatFun::zero())).add(first, negate, pos)?;
        while matches!(self.peek(), Tok::Plus | Tok::Minus) {
            let neg = self.bump().0 == Tok::Minus;
            let pos = self.pos();
            let (t, _) = self.term()?;
            acc = acc.add(t, neg, pos)?;
            shape = Shape::Plain;
        }
        self.depth -= 1;
        Ok((acc, shape))
    }

    fn term(&mut self) -> Result<(Sparse, Shape), ParseError> {
        let mut groups = Vec::new();
        let mut all_groups = true;
        let (mut acc, g) = self.factor()?;
        match g {
            Some(g) => groups.push(g),
            None => all_groups = false,
        }
        while *self.peek() == Tok::Star {
            self.bump();
            let pos = self.pos();
            let (f, g) = self.factor()?;
            match g {
                Some(g) => groups.push(g),
                None => all_groups = false,
            }
            acc = acc.mul(&f, pos)?;
        }
        let shape = if !all_groups {
            Shape::Plain
        } else if groups.len() == 1 {
            Shape::Group(Box::new(groups.pop().unwrap()))
        } else if groups.len() == 2 {
            let b = groups.pop().unwrap();
            let a = groups.pop().unwrap();
            Shape::TwoGroups(Box::new(a), Box::new(b))
        } else {
            Shape::Plain
        };
        Ok((acc, shape))
    }

    /// Returns the factor and, for a bare parenthesized group, its content.
    fn factor(&mut self) -> Result<(Sparse, Option<Sparse>), ParseError> {
        let (base, group) = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            let e = match self.bump() {
                (Tok::Number(n), _) if n.bytes().all(|b| b.is_ascii_digit()) => {
                    n.parse::<u64>().map_err(|_| ParseError::Limit {
                        pos,
                        msg: "exponent too large".into(),
                    })?
                }
                _ => return syntax(pos, "expected a non-negative integer exponent"),
            };
            return Ok((base.pow(e, pos)?, None));
        }
        Ok((base, group))
    }

    fn atom(&mut self) -> Result<(Sparse, Option<Sparse>), ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Ident(name) if name == "w" => {
                let is_call = *self.peek() == Tok::LParen
                    && matches!(self.toks.get(self.at + 1), Some((Tok::Ident(z), _)) if z == "z");
                if !is_call {
                    return Ok((Sparse::var(0, pos), None));
                }
                self.bump();
                self.bump();
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok((Sparse::var(0, pos), None));
                }
                let lit_pos = self.pos();
                let c = self.shift_literal()?;
                self.expect(Tok::RParen, "`)` closing the shift")?;
                if c.is_zero() {
                    return Err(ParseError::ZeroShift { pos: lit_pos });
                }
                let k = match self.shifts.iter().position(|s| *s == c) {
                    Some(k) => k + 1,
                    None => {
                        self.shifts.push(c);
                        self.shifts.len()
                    }
                };
                Ok((Sparse::var(k, pos), None))
            }
            Tok::Ident(name) if name == "z" || name == "i" => {
                syntax(pos, format!("`{name}` may only appear inside a shift or a brace literal"))
            }
            Tok::Ident(name) => {
                let nonzero = if *self.peek() == Tok::NonZero {
                    self.bump();
                    true
                } else {
                    false
                };
                Ok((
                    Sparse::constant(Coefficient::Symbolic(Symbol {
                        name,
                        nonzero,
                        negated: false,
                    })),
                    None,
                ))
            }
            Tok::Brace(body) => {
                let r = parse_ratfun_at(&body, pos + 1)?;
                if r.is_zero() {
                    return Ok((Sparse::constant(Coefficient::Rational(r)), None));
                }
                Ok((Sparse::constant(Coefficient::Rational(r)), None))
            }
            Tok::LParen => {
                let (inner, _) = self.poly()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok((inner.clone(), Some(inner)))
            }
            Tok::Number(_) => syntax(pos, "numeric coefficients must be brace-delimited, e.g. {2}"),
            Tok::End => syntax(pos, "unexpected end of input"),
            _ => syntax(pos, "expected a term"),
        }
    }

    /// After `w(z`: sign, then a real part, an imaginary part, or both.
    fn shift_literal(&mut self) -> Result<ExactComplex, ParseError> {
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        let mut parts = 0;
        loop {
            let pos = self.pos();
            let neg = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ if parts == 0 => return syntax(pos, "expected `+` or `-` after `w(z`"),
                _ => break,
            };
            self.bump();
            let (value, imaginary) = self.shift_component()?;
            let value = if neg { -value } else { value };
            match (imaginary, parts) {
                (false, 0) => re = value,
                (true, 0) | (true, 1) => {
                    im = value;
                    break;
                }
                _ => return syntax(pos, "malformed shift constant"),
            }
            parts += 1;
            if parts == 2 {
                break;
            }
        }
        Ok(ExactComplex::new(re, im))
    }

    fn shift_component(&mut self) -> Result<(Rational, bool), ParseError> {
        let pos = self.pos();
        match self.bump() {
            (Tok::Ident(i), _) if i == "i" => Ok((Rational::one(), true)),
            (Tok::Number(n), _) => {
                let mut v = parse_decimal(&n).ok_or(ParseError::Syntax {
                    pos,
                    msg: format!("bad number `{n}`"),
                })?;
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        (Tok::Number(d), _) => {
                            let d = parse_decimal(&d).ok_or(ParseError::Syntax {
                                pos: dpos,
                                msg: "bad denominator".into(),
                            })?;
                            if d.is_zero() {
                                return syntax(dpos, "zero denominator");
                            }
                            v /= d;
                        }
                        _ => return syntax(dpos, "expected a denominator"),
                    }
                }
                if *self.peek() == Tok::Star {
                    self.bump();
                    let ipos = self.pos();
                    match self.bump() {
                        (Tok::Ident(i), _) if i == "i" => return Ok((v, true)),
                        _ => return syntax(ipos, "expected `i`"),
                    }
                }
                Ok((v, false))
            }
            _ => syntax(pos, "expected a shift constant"),
        }
    }
}

/// Parses one equation.
pub fn parse_equation(text: &str) -> Result<ClunieEquation, ParseError> {
    let toks = lex(text)?;
    let mut ps = Parser {
        toks,
        at: 0,
        depth: 0,
        shifts: Vec::new(),
        text,
    };
    let (lhs, lhs_shape) = ps.poly()?;
    ps.expect(Tok::Eq, "`=`")?;
    let rhs_pos = ps.pos();
    let (rhs, rhs_shape) = ps.poly()?;
    let (q_sparse, mut u_sparse) = if *ps.peek() == Tok::Slash {
        let num = match rhs_shape {
            Shape::Group(g) => *g,
            _ => return syntax(ps.pos(), "division is only allowed as `(Q)/(U)`"),
        };
        ps.bump();
        ps.expect(Tok::LParen, "`(` opening the denominator")?;
        let (den, _) = ps.poly()?;
        ps.expect(Tok::RParen, "`)` closing the denominator")?;
        (num, Some(den))
    } else {
        (rhs, None)
    };
    if *ps.peek() != Tok::End {
        return syntax(ps.pos(), "trailing input");
    }
    let _ = ps.text;

    let mut p_sparse = lhs;
    if let Shape::TwoGroups(a, b) = lhs_shape {
        if a.shift_pos.is_none() && b.shift_pos.is_some() {
            if u_sparse.is_some() {
                return syntax(rhs_pos, "a `(U)*(P)` left side cannot be combined with `(Q)/(U)`");
            }
            u_sparse = Some(*a);
            p_sparse = *b;
        }
    }
    let u_sparse = u_sparse.unwrap_or_else(|| Sparse::constant(Coefficient::one()));
    for part in [&u_sparse, &q_sparse] {
        if part.terms.keys().any(|e| e.len() > 1) {
            return Err(ParseError::ShiftInUQ {
                pos: part.shift_pos.unwrap_or(rhs_pos),
            });
        }
    }

    let n_vars = ps.shifts.len() + 1;
    let used: Vec<usize> = (1..n_vars)
        .filter(|&k| p_sparse.terms.keys().any(|e| e.get(k).copied().unwrap_or(0) > 0))
        .collect();
    let build = |s: &Sparse, keep: &[usize], shifts: Vec<ExactComplex>| {
        let terms = s
            .terms
            .iter()
            .map(|(e, c)| {
                let mut full = e.clone();
                full.resize(n_vars, 0);
                let mut idx = vec![full[0]];
                idx.extend(keep.iter().map(|&k| full[k]));
                Term {
                    coeff: c.clone(),
                    index: MultiIndex(idx),
                }
            })
            .collect();
        DiffPolynomial::new(shifts, terms).expect("parser keeps shapes consistent")
    };
    let p_shifts = used.iter().map(|&k| ps.shifts[k - 1].clone()).collect();
    let p = build(&p_sparse, &used, p_shifts);
    let u = build(&u_sparse, &[], Vec::new());
    let q = build(&q_sparse, &[], Vec::new());
    for (d, part) in [(&u, "U"), (&p, "P"), (&q, "Q")] {
        if d.is_empty() {
            return Err(ParseError::Degenerate { part: part.into() });
        }
    }
    let eq = ClunieEquation {
        u: u.normalize().expect("merged during expansion"),
        p: p.normalize().expect("merged during expansion"),
        q: q.normalize().expect("merged during expansion"),
        coprimality: Coprimality::Unchecked,
    };
    eq.check_coefficients(0)?;
    Ok(eq)
}

// ------------------------------------------------- brace literal parser

/// Parses a rational function in `z`, e.g. `(z^2+1)/(z-2)` or `0.5`.
pub fn parse_ratfun(text: &str) -> Result<RatFun, ParseError> {
    parse_ratfun_at(text, 0)
}

fn parse_ratfun_at(text: &str, offset: usize) -> Result<RatFun, ParseError> {
    let mut rp = RatParser {
        b: text.as_bytes(),
        text,
        i: 0,
        offset,
        depth: 0,
    };
    let r = rp.expr()?;
    rp.skip_ws();
    if rp.i != rp.b.len() {
        return syntax(offset + rp.i, "unexpected input in numeric literal");
    }
    Ok(r)
}

struct RatParser<'a> {
    b: &'a [u8],
    text: &'a str,
    i: usize,
    offset: usize,
    depth: usize,
}

impl RatParser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.b.len() && self.b[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.b.get(self.i).copied()
    }

    fn pos(&self) -> usize {
        self.offset + self.i
    }

    fn limit(&self, msg: &str) -> ParseError {
        ParseError::Limit {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn checked_mul(&self, a: &RatFun, b: &RatFun) -> Result<RatFun, ParseError> {
        if a.bits() + b.bits() > MAX_COEFF_BITS || a.z_degree() + b.z_degree() > MAX_Z_DEGREE {
            return Err(self.limit("numeric literal too large"));
        }
        Ok(a.mul(b))
    }

    fn expr(&mut self) -> Result<RatFun, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.limit("nesting too deep"));
        }
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let t = self.term()?;
            if acc.bits() + t.bits() > MAX_COEFF_BITS * 2 {
                return Err(self.limit("numeric literal too large"));
            }
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFun, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let pos = self.pos();
            let f = self.unary()?;
            if c == b'*' {
                acc = self.checked_mul(&acc, &f)?;
            } else {
                if f.is_zero() {
                    return syntax(pos, "division by zero");
                }
                let inv = RatFun::new(f.den().clone(), f.num().clone()).unwrap();
                acc = self.checked_mul(&acc, &inv)?;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFun, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return Err(self.limit("nesting too deep"));
                }
                let v = self.unary()?.neg();
                self.depth -= 1;
                Ok(v)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFun, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.skip_ws();
            let start = self.i;
            while self.i < self.b.len() && self.b[self.i].is_ascii_digit() {
                self.i += 1;
            }
            if start == self.i {
                return syntax(self.offset + start, "expected an integer exponent");
            }
            let e: u64 = self.text[start..self.i]
                .parse()
                .map_err(|_| self.limit("exponent too large"))?;
            let deg = base.z_degree() as u64;
            if deg.saturating_mul(e) > MAX_Z_DEGREE as u64
                || base.bits().saturating_mul(e) > MAX_COEFF_BITS
            {
                return Err(self.limit("power too large"));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFun, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(b'z') => {
                self.i += 1;
                Ok(RatFun::from_poly(Poly::x()))
            }
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return syntax(self.pos(), "expected `)`");
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.b.len() && (self.b[self.i].is_ascii_digit() || self.b[self.i] == b'.') {
                    self.i += 1;
                }
                let lit = &self.text[start..self.i];
                if lit.len() > 4096 {
                    return Err(self.limit("number too long"));
                }
                let v = parse_rational_literal(lit).map_err(|m| ParseError::Syntax { pos, msg: m })?;
                Ok(RatFun::from_rational(v))
            }
            Some(_) => syntax(pos, "expected a number, `z` or `(`"),
            None => syntax(pos, "unexpected end of numeric literal"),
        }
    }
}

// --------------------------------------------------- coprimality check

fn numeric_w_poly(d: &DiffPolynomial) -> Option<Poly<RatFun>> {
    let deg = d.total_degree().ok()? as usize;
    let mut v = vec![RatFun::zero(); deg + 1];
    for t in d.terms() {
        match &t.coeff {
            Coefficient::Rational(r) => v[t.index.unshifted() as usize] = r.clone(),
            Coefficient::Symbolic(_) => return None,
        }
    }
    Some(Poly::from_coeffs(v))
}

fn w_poly_text(g: &Poly<RatFun>) -> String {
    let terms = g
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (Coefficient::Rational(c.clone()), k as u64))
        .collect();
    let d = DiffPolynomial::w_only(terms).expect("gcd is a w-polynomial");
    poly_text(&d)
}

/// Upgrades the coprimality state of `eq`, or rejects a common factor.
pub fn validate_no_common_factors(eq: &ClunieEquation) -> Result<ClunieEquation, ParseError> {
    let mut out = eq.clone();
    let deg_u = eq.u.total_degree().unwrap_or(0);
    let deg_q = eq.q.total_degree().unwrap_or(0);
    if deg_u == 0 || deg_q == 0 {
        out.coprimality = Coprimality::Verified;
        return Ok(out);
    }
    if eq.u.ord0().unwrap_or(0) >= 1 && eq.q.ord0().unwrap_or(0) >= 1 {
        return Err(ParseError::CommonFactor { gcd: "w".into() });
    }
    match (numeric_w_poly(&eq.u), numeric_w_poly(&eq.q)) {
        (Some(u), Some(q)) => {
            let g = u.gcd(&q);
            if g.degree().unwrap_or(0) >= 1 {
                return Err(ParseError::CommonFactor { gcd: w_poly_text(&g) });
            }
            out.coprimality = Coprimality::Verified;
        }
        _ => {
            out.coprimality = Coprimality::Asserted {
                caveat: "U and Q have symbolic coefficients; coprimality assumed".into(),
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAMILY: &str =
        "w(z+1)*w(z-1)+w(z+1)*w+w*w(z-1) = (a2*w^2+a1*w+a0)/(w^2+b1*w+b0)";

    #[test]
    fn parses_family_example() {
        let eq = parse_equation(FAMILY).unwrap();
        assert_eq!(eq.u.total_degree().unwrap(), 2);
        assert_eq!(eq.q.total_degree().unwrap(), 2);
        assert_eq!(eq.q.ord0().unwrap(), 0);
        assert_eq!(eq.p, DiffPolynomial::benchmark());
        assert_eq!(eq.p.shifts().len(), 2);
    }

    #[test]
    fn simple_forms() {
        let eq = parse_equation("w(z+1) = w").unwrap();
        assert_eq!(eq.u, DiffPolynomial::w_only(vec![(Coefficient::one(), 0)]).unwrap());
        assert_eq!(eq.q, DiffPolynomial::w_only(vec![(Coefficient::one(), 1)]).unwrap());
        assert_eq!(eq.p.total_degree().unwrap(), 1);
        assert_eq!(eq.to_canonical_text(), "w(z+1) = w");

        let eq = parse_equation("(w+b0)*(w(z+1)*w) = a1*w").unwrap();
        assert_eq!(eq.u.total_degree().unwrap(), 1);
        assert_eq!(eq.p.total_degree().unwrap(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_equation("w(z+0)*w = 1").unwrap_err(),
            ParseError::ZeroShift { pos: 3 }
        );
        assert!(matches!(
            parse_equation("w(z+1) = w(z-1)"),
            Err(ParseError::ShiftInUQ { pos: 9 })
        ));
        assert!(matches!(parse_equation("w(z+1) = a*w + {2}"), Err(ParseError::MixedMode { .. })));
        assert!(matches!(parse_equation("w(z+1) = a*b*w"), Err(ParseError::SymbolicProduct { .. })));
        assert!(matches!(parse_equation("w(z+1) = a*w + a"), Err(ParseError::DuplicateSymbol { .. })));
        assert!(matches!(parse_equation("w(z+1) = 2*w"), Err(ParseError::Syntax { pos: 9, .. })));
        assert!(matches!(parse_equation("w(z+1) = w - w"), Err(ParseError::Degenerate { .. })));
        assert!(matches!(parse_equation("w(z+1) ="), Err(ParseError::Syntax { pos: 8, .. })));
        assert!(matches!(parse_equation("w(z+1) = wé"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn shift_literals() {
        for (s, re, im) in [
            ("w(z+1)", (1, 1), (0, 1)),
            ("w(z-1/2)", (-1, 2), (0, 1)),
            ("w(z+0.5)", (1, 2), (0, 1)),
            ("w(z+2+i)", (2, 1), (1, 1)),
            ("w(z-3/2*i)", (0, 1), (-3, 2)),
            ("w(z+i)", (0, 1), (1, 1)),
        ] {
            let eq = parse_equation(&format!("{s} = w")).unwrap();
            let c = &eq.p.shifts()[0].value;
            assert_eq!(*c, ExactComplex::new(crate::exact::rat(re.0, re.1), crate::exact::rat(im.0, im.1)), "{s}");
        }
        let eq = parse_equation("w(z)*w(z+1) = w").unwrap();
        assert_eq!(eq.p.terms()[0].index.exponents(), &[1, 1]);
    }

    #[test]
    fn round_trips() {
        let eq = parse_equation(FAMILY).unwrap();
        let t1 = eq.to_canonical_text();
        let eq2 = parse_equation(&t1).unwrap();
        assert_eq!(eq, eq2);
        assert_eq!(eq2.to_canonical_text(), t1);

        let eq = parse_equation("{(z^2+1)/(z-2)}*w(z+1) = {1}*w^1 - {3/2}").unwrap();
        let t = eq.to_canonical_text();
        assert_eq!(t, "{(z^2 + 1)/(z - 2)}*w(z+1) = w - {3/2}");
        assert_eq!(parse_equation(&t).unwrap(), eq);
    }

    #[test]
    fn ratfun_literals() {
        let r = parse_ratfun("(z^2+1)/(z-2)").unwrap();
        assert_eq!(r.to_text(), "(z^2 + 1)/(z - 2)");
        assert_eq!(parse_ratfun("(2*z+2)/(z+1)").unwrap().to_text(), "2");
        assert!(parse_ratfun("1/(z-z)").is_err());
        assert!(matches!(parse_ratfun("z^100000"), Err(ParseError::Limit { .. })));
    }

    #[test]
    fn coprimality() {
        let eq = parse_equation("w(z+1) = ({1}*w^2 - {1})/(w + {1})").unwrap();
        assert!(matches!(validate_no_common_factors(&eq), Err(ParseError::CommonFactor { .. })));
        let eq = parse_equation("w(z+1) = (w + {1})/(w^2)").unwrap();
        assert_eq!(validate_no_common_factors(&eq).unwrap().coprimality, Coprimality::Verified);
        let eq = parse_equation("w(z+1) = (w*(a1*w+a0))/(w + b0)").unwrap();
        assert!(matches!(
            validate_no_common_factors(&eq).unwrap().coprimality,
            Coprimality::Asserted { .. }
        ));
        let eq = parse_equation("w(z+1) = (w^2 + {z}*w)/(w + {z})").unwrap();
        assert!(matches!(validate_no_common_factors(&eq), Err(ParseError::CommonFactor { .. })));
    }

    #[test]
    fn limits_hold() {
        assert!(parse_equation("w(z+1) = (w+{1})^100000").is_err());
        let deep = format!("w(z+1) = {}w{}", "(".repeat(200), ")".repeat(200));
        assert!(matches!(parse_equation(&deep), Err(ParseError::Limit { .. })));
        assert!(parse_equation("w(z+1) = {2}^64^64").is_err());
    }
}
