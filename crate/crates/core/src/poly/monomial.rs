use std::fmt;

use smallvec::SmallVec;

/// Dense exponent vector. Variable count is implicit in the length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn new(exponents: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exponents))
    }

    /// The monomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[var] = 1;
        m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(
            other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// All monomials in `nvars` variables of total degree `<= max_degree`.
    pub fn all_up_to_degree(nvars: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == cur.len() {
                out.push(Monomial::new(cur));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if nvars == 0 {
            out.push(Monomial::new(&[]));
        } else {
            rec(0, max_degree, &mut cur, &mut out);
        }
        out
    }

    /// Renders with variable names, e.g. `x^2*y`; `1` for the unit monomial.
    pub fn display<'a>(&'a self, names: &'a [String]) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, names }
    }

    /// Compact exponent form used in plan files: `2,0,1`.
    pub fn to_exponent_string(&self) -> String {
        self.0
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_exponent_string(s: &str) -> Option<Monomial> {
        let exps: Option<SmallVec<[u32; 6]>> = s.split(',').map(|t| t.trim().parse().ok()).collect();
        exps.map(Monomial)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_exponent_string())
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = self.names.get(i).map(String::as_str).unwrap_or("?");
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_arithmetic() {
        let a = Monomial::new(&[2, 1]);
        let b = Monomial::new(&[0, 3]);
        assert_eq!(a.mul(&b), Monomial::new(&[2, 4]));
        assert_eq!(a.lcm(&b), Monomial::new(&[2, 3]));
        assert!(Monomial::new(&[1, 1]).divides(&a));
        assert!(!b.divides(&a));
        assert_eq!(Monomial::new(&[1, 0]).quotient_of(&a), Some(Monomial::new(&[1, 1])));
        assert!(Monomial::new(&[1, 0]).is_coprime(&b));
    }

    #[test]
    fn enumerates_by_degree() {
        assert_eq!(Monomial::all_up_to_degree(3, 3).len(), 20);
        assert_eq!(Monomial::all_up_to_degree(2, 0), vec![Monomial::one(2)]);
    }

    #[test]
    fn exponent_string_round_trip() {
        let m = Monomial::new(&[3, 0, 12]);
        assert_eq!(Monomial::from_exponent_string(&m.to_exponent_string()), Some(m));
    }
}
