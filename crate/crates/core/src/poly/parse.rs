//! Polynomial text syntax.
//!
//! ```text
//! poly   := sign? term (sign term)*
//! sign   := '+' | '-'
//! term   := factor ('*' factor)*
//! factor := number | '$' ident | ident ('^' uint)?
//! number := digits ('.' digits)? (('e'|'E') sign? digits)? | digits '/' digits
//! ```
//!
//! Identifiers must be declared variables. A term may carry at most one
//! `$slot`; numeric factors multiply into its scale. Whitespace is ignored.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{parse_rational, ArithError, Scalar};

use super::{Monomial, MonomialOrdering, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    Unexpected { ch: char, pos: usize },
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("bad number `{0}`")]
    BadNumber(String),
    #[error("term has more than one slot")]
    TwoSlots,
    #[error("monomial {0} appears more than once alongside a slot coefficient")]
    DuplicateMonomial(String),
    #[error("slot `${0}` not allowed here")]
    SlotNotAllowed(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Coefficient of a problem polynomial: `scale` or `scale * $slot`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coef {
    pub scale: BigRational,
    pub slot: Option<String>,
}

impl Coef {
    pub fn literal(r: BigRational) -> Self {
        Coef { scale: r, slot: None }
    }

    pub fn is_literal(&self) -> bool {
        self.slot.is_none()
    }

    /// Evaluates with slot values from `slots`.
    pub fn eval<S: Scalar>(&self, slots: &HashMap<String, S>) -> Result<S, EvalError> {
        let scale = S::from_rational(&self.scale)?;
        match &self.slot {
            None => Ok(scale),
            Some(name) => slots
                .get(name)
                .map(|v| *v * scale)
                .ok_or_else(|| EvalError::MissingSlot(name.clone())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value for slot `${0}`")]
    MissingSlot(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Polynomial whose coefficients may reference named data slots.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotPoly {
    pub terms: Vec<(Monomial, Coef)>,
}

impl SlotPoly {
    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter().map(|t| &t.0)
    }

    pub fn slots(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|t| t.1.slot.as_deref())
    }

    pub fn is_literal(&self) -> bool {
        self.terms.iter().all(|t| t.1.is_literal())
    }

    pub fn instantiate<S: Scalar>(
        &self,
        slots: &HashMap<String, S>,
        ord: &MonomialOrdering,
    ) -> Result<Poly<S>, EvalError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.clone(), c.eval(slots)?));
        }
        Ok(Poly::from_terms(terms, ord))
    }

    /// Canonical text: terms sorted descending by `ord`.
    pub fn to_text(&self, names: &[String], ord: &MonomialOrdering) -> String {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.scale.is_negative();
            let mag = c.scale.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let unit = mag.is_one();
            if !unit || (c.slot.is_none() && m.is_one()) {
                factors.push(format_rational(&mag));
            }
            if let Some(s) = &c.slot {
                factors.push(format!("${s}"));
            }
            if !m.is_one() {
                factors.push(m.display(names).to_string());
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Decimal when the expansion terminates, `n/d` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut digits = 0usize;
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    digits += twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (ip, fp) = s.split_at(s.len() - digits);
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).map(|&b| b as char)
    }
    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }
    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos] as char;
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
    fn number(&mut self) -> Result<BigRational, ParseError> {
        let start = self.pos;
        let mut prev = ' ';
        while self.pos < self.src.len() {
            let c = self.src[self.pos] as char;
            let sign_in_exp = (c == '+' || c == '-') && (prev == 'e' || prev == 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || c == '/' || sign_in_exp {
                prev = c;
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        parse_rational(&text).ok_or(ParseError::BadNumber(text))
    }
}

/// Parses a polynomial that may contain `$slot` coefficients.
pub fn parse_slot_poly(text: &str, vars: &[String]) -> Result<SlotPoly, ParseError> {
    let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
    let mut raw: Vec<(Monomial, Coef)> = Vec::new();
    let mut first = true;
    loop {
        let mut sign = BigRational::one();
        match lx.peek() {
            None if first => return Err(ParseError::Eof),
            None => break,
            Some('+') => {
                lx.bump();
            }
            Some('-') => {
                lx.bump();
                sign = -sign;
            }
            Some(c) if !first => return Err(ParseError::Unexpected { ch: c, pos: lx.pos }),
            Some(_) => {}
        }
        first = false;
        let mut exps = vec![0u32; vars.len()];
        let mut scale = sign;
        let mut slot: Option<String> = None;
        loop {
            match lx.peek() {
                None => return Err(ParseError::Eof),
                Some('$') => {
                    lx.bump();
                    let name = lx.ident();
                    if name.is_empty() {
                        return Err(ParseError::Unexpected { ch: '$', pos: lx.pos });
                    }
                    if slot.replace(name).is_some() {
                        return Err(ParseError::TwoSlots);
                    }
                }
                Some(c) if c.is_ascii_digit() || c == '.' => {
                    scale *= lx.number()?;
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let name = lx.ident();
                    let v = *index
                        .get(name.as_str())
                        .ok_or(ParseError::UnknownVariable(name.clone()))?;
                    let mut e = 1u32;
                    if lx.peek() == Some('^') {
                        lx.bump();
                        lx.skip_ws();
                        let start = lx.pos;
                        while lx.pos < lx.src.len() && (lx.src[lx.pos] as char).is_ascii_digit() {
                            lx.pos += 1;
                        }
                        let t = String::from_utf8_lossy(&lx.src[start..lx.pos]).into_owned();
                        e = t.parse().map_err(|_| ParseError::BadNumber(t))?;
                    }
                    exps[v] += e;
                }
                Some(c) => return Err(ParseError::Unexpected { ch: c, pos: lx.pos }),
            }
            if lx.peek() == Some('*') {
                lx.bump();
            } else {
                break;
            }
        }
        raw.push((Monomial::new(&exps), Coef { scale, slot }));
    }
    // Merge literal duplicates; refuse duplicates involving slots.
    let mut terms: Vec<(Monomial, Coef)> = Vec::new();
    for (m, c) in raw {
        if let Some(existing) = terms.iter_mut().find(|t| t.0 == m) {
            if existing.1.slot.is_some() || c.slot.is_some() {
                return Err(ParseError::DuplicateMonomial(m.display(vars).to_string()));
            }
            existing.1.scale += c.scale;
        } else {
            terms.push((m, c));
        }
    }
    terms.retain(|t| !t.1.scale.is_zero());
    Ok(SlotPoly { terms })
}

/// Parses a polynomial with literal coefficients only.
pub fn parse_poly<S: Scalar>(text: &str, vars: &[String], ord: &MonomialOrdering) -> Result<Poly<S>, ParseError> {
    let sp = parse_slot_poly(text, vars)?;
    if let Some(s) = sp.slots().next() {
        return Err(ParseError::SlotNotAllowed(s.to_string()));
    }
    let mut terms = Vec::new();
    for (m, c) in sp.terms {
        terms.push((m, S::from_rational(&c.scale)?));
    }
    Ok(Poly::from_terms(terms, ord))
}

/// Default variable names `x1..xk`.
pub fn default_var_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.slot {
            Some(s) if self.scale.is_one() => write!(f, "${s}"),
            Some(s) => write!(f, "{}*${s}", format_rational(&self.scale)),
            None => write!(f, "{}", format_rational(&self.scale)),
        }
    }
}
