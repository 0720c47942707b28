use std::cmp::Ordering;

use rand::Rng;
use thiserror::Error;

use super::Monomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("monomials have {0} and {1} variables")]
    Mismatch(usize, usize),
    #[error("weight vector has length {0}, expected {1}")]
    WeightLength(usize, usize),
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("variable priority is not a permutation of 0..{0}")]
    BadPriority(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Grevlex,
    /// Positive integer weights, indexed by variable.
    Weighted(Vec<u64>),
}

/// Grevlex or weighted-degree ordering with reverse-lex tie breaking.
///
/// `priority[0]` is the largest variable; ties are broken by the smallest
/// exponent of `priority[k-1]`, then `priority[k-2]`, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrdering {
    kind: OrderKind,
    priority: Vec<usize>,
}

impl MonomialOrdering {
    pub fn grevlex(nvars: usize) -> Self {
        MonomialOrdering {
            kind: OrderKind::Grevlex,
            priority: (0..nvars).collect(),
        }
    }

    pub fn weighted(weights: Vec<u64>) -> Result<Self, OrderingError> {
        let n = weights.len();
        Self::new(OrderKind::Weighted(weights), (0..n).collect())
    }

    pub fn new(kind: OrderKind, priority: Vec<usize>) -> Result<Self, OrderingError> {
        let n = priority.len();
        let mut seen = vec![false; n];
        for &p in &priority {
            if p >= n || seen[p] {
                return Err(OrderingError::BadPriority(n));
            }
            seen[p] = true;
        }
        if let OrderKind::Weighted(w) = &kind {
            if w.len() != n {
                return Err(OrderingError::WeightLength(w.len(), n));
            }
            if w.iter().any(|&x| x == 0) {
                return Err(OrderingError::NonPositiveWeight);
            }
        }
        Ok(MonomialOrdering { kind, priority })
    }

    /// Random weighted ordering with weights in `[lo, hi]`; the priority stays
    /// the natural variable order.
    pub fn random_weighted<R: Rng + ?Sized>(nvars: usize, lo: u64, hi: u64, rng: &mut R) -> Self {
        let w = (0..nvars).map(|_| rng.gen_range(lo..=hi)).collect();
        MonomialOrdering {
            kind: OrderKind::Weighted(w),
            priority: (0..nvars).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    pub fn kind(&self) -> &OrderKind {
        &self.kind
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    fn weighted_degree(&self, m: &Monomial) -> u64 {
        match &self.kind {
            OrderKind::Grevlex => m.degree() as u64,
            OrderKind::Weighted(w) => m
                .exponents()
                .iter()
                .zip(w)
                .map(|(&e, &wi)| e as u64 * wi)
                .sum(),
        }
    }

    /// Total-order comparison; panics in debug builds on mismatched lengths.
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.nvars(), b.nvars());
        let (da, db) = (self.weighted_degree(a), self.weighted_degree(b));
        if da != db {
            return da.cmp(&db);
        }
        let (ea, eb) = (a.exponents(), b.exponents());
        for &v in self.priority.iter().rev() {
            if ea[v] != eb[v] {
                // Smaller exponent in the trailing variable wins.
                return eb[v].cmp(&ea[v]);
            }
        }
        Ordering::Equal
    }

    pub fn try_cmp(&self, a: &Monomial, b: &Monomial) -> Result<Ordering, OrderingError> {
        if a.nvars() != b.nvars() || a.nvars() != self.nvars() {
            return Err(OrderingError::Mismatch(a.nvars(), b.nvars()));
        }
        Ok(self.cmp(a, b))
    }

    /// Sorts descending (largest first).
    pub fn sort_desc(&self, monos: &mut [Monomial]) {
        monos.sort_by(|a, b| self.cmp(b, a));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e)
    }

    #[test]
    fn grevlex_examples() {
        let g = MonomialOrdering::grevlex(2);
        assert_eq!(g.cmp(&m(&[2, 0]), &m(&[1, 1])), Ordering::Greater);
        assert_eq!(g.cmp(&m(&[1, 0]), &m(&[0, 3])), Ordering::Less);
        // Three variables: x*z < y^2 because x*z has larger z-degree.
        let g3 = MonomialOrdering::grevlex(3);
        assert_eq!(g3.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let g = MonomialOrdering::grevlex(2);
        assert!(g.try_cmp(&m(&[1, 0]), &m(&[1, 0, 0])).is_err());
    }

    #[test]
    fn weighted_ordering_five_variables() {
        // Variables (f^-2, F32, F13, F23, lambda) with tie-break priority in
        // that order and weights 135, 81, 98, 107, 68.
        let w = MonomialOrdering::weighted(vec![135, 81, 98, 107, 68]).unwrap();
        let mut vars: Vec<Monomial> = (0..5).map(|i| Monomial::var(5, i)).collect();
        w.sort_desc(&mut vars);
        let order: Vec<usize> = vars.iter().map(|v| v.exponents().iter().position(|&e| e == 1).unwrap()).collect();
        assert_eq!(order, vec![0, 3, 2, 1, 4]);
        // Equal weighted degree falls back to reverse lex: the variable with
        // lower priority loses.
        let eq = MonomialOrdering::weighted(vec![1, 1, 1, 1, 1]).unwrap();
        let mut vars: Vec<Monomial> = (0..5).map(|i| Monomial::var(5, i)).collect();
        eq.sort_desc(&mut vars);
        assert_eq!(vars[0], Monomial::var(5, 0));
        assert_eq!(vars[4], Monomial::var(5, 4));
    }

    #[test]
    fn priority_permutation_validated() {
        assert!(MonomialOrdering::new(OrderKind::Grevlex, vec![0, 0]).is_err());
        assert!(MonomialOrdering::new(OrderKind::Weighted(vec![1, 0]), vec![0, 1]).is_err());
        let g = MonomialOrdering::new(OrderKind::Grevlex, vec![1, 0]).unwrap();
        // y > x now.
        assert_eq!(g.cmp(&m(&[0, 1]), &m(&[1, 0])), Ordering::Greater);
    }

    fn mono3() -> impl Strategy<Value = Monomial> {
        prop::collection::vec(0u32..5, 3).prop_map(|v| Monomial::new(&v))
    }

    fn ordering3() -> impl Strategy<Value = MonomialOrdering> {
        prop_oneof![
            Just(MonomialOrdering::grevlex(3)),
            prop::collection::vec(1u64..200, 3)
                .prop_map(|w| MonomialOrdering::weighted(w).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn ordering_axioms(ord in ordering3(), p in mono3(), q in mono3(), s in mono3()) {
            let one = Monomial::one(3);
            prop_assert!(ord.cmp(&p, &one) != Ordering::Less);
            if ord.cmp(&p, &q) == Ordering::Greater {
                prop_assert_eq!(ord.cmp(&p.mul(&s), &q.mul(&s)), Ordering::Greater);
            }
            prop_assert_eq!(ord.cmp(&p, &q) == Ordering::Equal, p == q);
            prop_assert_eq!(ord.cmp(&p, &q), ord.cmp(&q, &p).reverse());
        }
    }
}
