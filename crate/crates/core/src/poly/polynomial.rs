use std::cmp::Ordering;
use std::collections::HashMap;

use crate::arith::Scalar;

use super::{Monomial, MonomialOrdering};

/// Sparse polynomial with terms sorted descending by the ordering it was
/// built with. No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    terms: Vec<(Monomial, S)>,
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::monomial(Monomial::one(nvars), c)
    }

    pub fn monomial(m: Monomial, c: S) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary terms: combines duplicates, drops zeros, sorts.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, S)>, ord: &MonomialOrdering) -> Self {
        let mut acc: HashMap<Monomial, S> = HashMap::new();
        let mut order: Vec<Monomial> = Vec::new();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(v) => *v = *v + c,
                None => {
                    order.push(m.clone());
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<(Monomial, S)> = order
            .into_iter()
            .filter_map(|m| {
                let c = acc[&m];
                (!c.is_zero()).then_some((m, c))
            })
            .collect();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, S)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, S)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coefficient(&self) -> Option<S> {
        self.terms.first().map(|t| t.1)
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms
            .iter()
            .find(|t| &t.0 == m)
            .map(|t| t.1)
            .unwrap_or_else(S::zero)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter().map(|t| &t.0)
    }

    /// Everything but the leading term.
    pub fn tail(&self) -> Self {
        Poly {
            terms: self.terms.iter().skip(1).cloned().collect(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), *v * c)).collect(),
        }
    }

    /// Multiplication by `c * m`; monomial orderings are multiplicative so the
    /// term order is preserved.
    pub fn mul_term(&self, m: &Monomial, c: S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(t, v)| (t.mul(m), *v * c)).collect(),
        }
    }

    pub fn make_monic(&self) -> Self {
        match self.leading_coefficient() {
            Some(lc) => self.scale(lc.inv().expect("leading coefficient is nonzero")),
            None => Self::zero(),
        }
    }

    /// `self + c * m * other`, the workhorse of reductions.
    pub fn add_scaled(&self, other: &Self, m: &Monomial, c: S, ord: &MonomialOrdering) -> Self {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let mut bj: Option<Monomial> = b.first().map(|t| t.0.mul(m));
        while i < a.len() || j < b.len() {
            let ord_ij = match (a.get(i), &bj) {
                (Some(ta), Some(mb)) => ord.cmp(&ta.0, mb),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => break,
            };
            match ord_ij {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((bj.take().unwrap(), b[j].1 * c));
                    j += 1;
                    bj = b.get(j).map(|t| t.0.mul(m));
                }
                Ordering::Equal => {
                    let v = a[i].1 + b[j].1 * c;
                    if !v.is_zero() {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                    bj = b.get(j).map(|t| t.0.mul(m));
                }
            }
        }
        Poly { terms: out }
    }

    pub fn add(&self, other: &Self, ord: &MonomialOrdering) -> Self {
        let nv = self
            .terms
            .first()
            .or(other.terms.first())
            .map(|t| t.0.nvars())
            .unwrap_or(0);
        self.add_scaled(other, &Monomial::one(nv), S::one(), ord)
    }

    pub fn sub(&self, other: &Self, ord: &MonomialOrdering) -> Self {
        let nv = self
            .terms
            .first()
            .or(other.terms.first())
            .map(|t| t.0.nvars())
            .unwrap_or(0);
        self.add_scaled(other, &Monomial::one(nv), -S::one(), ord)
    }

    pub fn mul(&self, other: &Self, ord: &MonomialOrdering) -> Self {
        match (self.terms.len(), other.terms.len()) {
            (0, _) | (_, 0) => Self::zero(),
            (1, _) => other.mul_term(&self.terms[0].0, self.terms[0].1),
            (_, 1) => self.mul_term(&other.terms[0].0, other.terms[0].1),
            _ => Self::from_terms(
                self.terms
                    .iter()
                    .flat_map(|(ma, ca)| other.terms.iter().map(move |(mb, cb)| (ma.mul(mb), *ca * *cb))),
                ord,
            ),
        }
    }

    /// Re-sorts under another ordering.
    pub fn reorder(&self, ord: &MonomialOrdering) -> Self {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        Poly { terms }
    }

    pub fn map_coefficients<T: Scalar>(&self, f: impl Fn(S) -> T) -> Poly<T> {
        Poly {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let v = f(*c);
                    (!v.is_zero()).then(|| (m.clone(), v))
                })
                .collect(),
        }
    }

    pub fn eval(&self, point: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |acc, (m, c)| {
            let mut v = *c;
            for (e, x) in m.exponents().iter().zip(point) {
                for _ in 0..*e {
                    v = v * *x;
                }
            }
            acc + v
        })
    }

    /// Human-readable rendering with the given variable names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&mag);
            } else if mag == "1" {
                s.push_str(&m.display(names).to_string());
            } else {
                s.push_str(&format!("{mag}*{}", m.display(names)));
            }
        }
        s
    }
}
