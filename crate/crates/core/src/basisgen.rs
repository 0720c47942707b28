//! Quotient-ring bases and action matrices in arbitrary monomial bases.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::Scalar;
use crate::groebner::GroebnerResult;
use crate::linalg::Mat;
use crate::poly::{Monomial, MonomialOrdering, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("candidate monomials do not span the quotient ring")]
    SingularBasis,
    #[error("basis has {0} monomials but the quotient ring has dimension {1}")]
    WrongSize(usize, usize),
    #[error("action monomial must not be 1")]
    TrivialAction,
    #[error("basis monomial {0:?} is not divisible by the reciprocal action variable")]
    NotDivisible(Monomial),
}

/// Multiplication operator used to build the action matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    /// Multiplication by a monomial `a ≠ 1`.
    Mul(Monomial),
    /// Multiplication by `1 / x_v`; every basis monomial must contain `x_v`.
    Recip(usize),
}

impl Action {
    pub fn var(nvars: usize, v: usize) -> Self {
        Action::Mul(Monomial::var(nvars, v))
    }

    /// Image of a basis monomial under the action.
    pub fn apply(&self, b: &Monomial) -> Option<Monomial> {
        match self {
            Action::Mul(a) => Some(a.mul(b)),
            Action::Recip(v) => {
                let x = Monomial::var(b.nvars(), *v);
                x.quotient_of(b)
            }
        }
    }

    pub fn display(&self, names: &[String]) -> String {
        match self {
            Action::Mul(a) => a.display(names).to_string(),
            Action::Recip(v) => format!("1/{}", names[*v]),
        }
    }

    /// Variable whose values the eigenvalues represent, when there is one.
    pub fn variable(&self) -> Option<usize> {
        match self {
            Action::Mul(a) if a.degree() == 1 => a.exponents().iter().position(|&e| e == 1),
            Action::Recip(v) => Some(*v),
            _ => None,
        }
    }
}

/// A monomial basis of the quotient ring (or a redundant spanning set).
#[derive(Clone, Debug)]
pub struct QuotientBasis<S> {
    /// Sorted descending.
    pub monomials: Vec<Monomial>,
    pub is_standard: bool,
    /// Row `i`: coordinates of `NF(b_i)` in the standard basis.
    pub s: Mat<S>,
    pub action: Action,
    /// `action · vect(B) ≡ T · vect(B)` modulo the ideal.
    pub t: Mat<S>,
}

impl<S: Scalar> QuotientBasis<S> {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn is_redundant(&self) -> bool {
        self.s.nrows() > self.s.ncols()
    }

    /// Polynomials `action(b_i) − Σ_j t_ij b_j`, all in the ideal.
    pub fn v_polys(&self, ord: &MonomialOrdering) -> Vec<Poly<S>> {
        self.monomials
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let img = self.action.apply(b).expect("action defined on basis");
                let mut terms = vec![(img, S::one())];
                for (j, bj) in self.monomials.iter().enumerate() {
                    terms.push((bj.clone(), -self.t[(i, j)]));
                }
                Poly::from_terms(terms, ord)
            })
            .collect()
    }
}

fn check_action(action: &Action, monomials: &[Monomial]) -> Result<(), BasisError> {
    match action {
        Action::Mul(a) if a.is_one() => Err(BasisError::TrivialAction),
        Action::Mul(_) => Ok(()),
        Action::Recip(_) => match monomials.iter().find(|b| action.apply(b).is_none()) {
            Some(b) => Err(BasisError::NotDivisible(b.clone())),
            None => Ok(()),
        },
    }
}

fn coords<S: Scalar>(g: &GroebnerResult<S>, m: &Monomial) -> Vec<S> {
    g.std_coordinates(&Poly::monomial(m.clone(), S::one()))
}

/// The standard basis with `S = I`.
pub fn standard_basis<S: Scalar>(g: &GroebnerResult<S>, action: &Action) -> Result<QuotientBasis<S>, BasisError> {
    nonstandard_basis(g, &g.std_basis, action)
}

/// A basis given by arbitrary monomials; `|candidate| ≥ d` with a rank-`d`
/// change-of-basis matrix. More than `d` monomials gives a redundant basis.
pub fn nonstandard_basis<S: Scalar>(
    g: &GroebnerResult<S>,
    candidate: &[Monomial],
    action: &Action,
) -> Result<QuotientBasis<S>, BasisError> {
    let d = g.dim();
    let mut monomials = candidate.to_vec();
    g.ordering.sort_desc(&mut monomials);
    monomials.dedup();
    if monomials.len() < d {
        return Err(BasisError::WrongSize(monomials.len(), d));
    }
    check_action(action, &monomials)?;
    let rows: Vec<Vec<S>> = monomials.iter().map(|b| coords(g, b)).collect();
    let s = Mat::from_fn(rows.len(), d, |i, j| rows[i][j]);
    // Left inverse from d independent rows of S: L·S = I.
    let rr = s.transpose().rref(1e-12);
    if rr.pivots.len() < d {
        return Err(BasisError::SingularBasis);
    }
    let sub = s.select_rows(&rr.pivots);
    let sub_inv = sub.inverse().ok_or(BasisError::SingularBasis)?;
    let mut left = Mat::zeros(d, monomials.len());
    for (k, &r) in rr.pivots.iter().enumerate() {
        for i in 0..d {
            left[(i, r)] = sub_inv[(i, k)];
        }
    }
    let images: Vec<Vec<S>> = monomials
        .iter()
        .map(|b| coords(g, &action.apply(b).expect("checked")))
        .collect();
    let n = Mat::from_fn(monomials.len(), d, |i, j| images[i][j]);
    let t = n.mul(&left);
    let is_standard = monomials == g.std_basis;
    Ok(QuotientBasis {
        monomials,
        is_standard,
        s,
        action: action.clone(),
        t,
    })
}

/// Monomials of degree `≤ max deg(std_basis) + 1`, the sampling pool.
pub fn default_pool<S: Scalar>(g: &GroebnerResult<S>) -> Vec<Monomial> {
    let top = g.std_basis.iter().map(Monomial::degree).max().unwrap_or(0);
    let mut pool = Monomial::all_up_to_degree(g.nvars(), top + 1);
    g.ordering.sort_desc(&mut pool);
    pool
}

/// Random bases drawn from `pool` with weight `2^(-deg)`, distinct and
/// invertible. May return fewer than `count` if the pool runs dry.
pub fn sample_bases<S: Scalar>(
    g: &GroebnerResult<S>,
    pool: &[Monomial],
    count: usize,
    seed: u64,
    action: &Action,
) -> Vec<QuotientBasis<S>> {
    let d = g.dim();
    let pool: Vec<Monomial> = pool
        .iter()
        .filter(|m| action.apply(m).is_some())
        .cloned()
        .collect();
    let mut out = Vec::new();
    if pool.len() < d || d == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<Vec<Monomial>> = HashSet::new();
    let weights: Vec<f64> = pool.iter().map(|m| 0.5f64.powi(m.degree() as i32)).collect();
    let attempts = 50 * count + 100;
    for _ in 0..attempts {
        if out.len() == count {
            break;
        }
        let mut pick: Vec<Monomial> = Vec::with_capacity(d);
        let mut w = weights.clone();
        for _ in 0..d {
            let total: f64 = w.iter().sum();
            let mut r = rng.gen::<f64>() * total;
            let mut k = 0;
            while k + 1 < w.len() && (w[k] == 0.0 || r >= w[k]) {
                r -= w[k];
                k += 1;
            }
            pick.push(pool[k].clone());
            w[k] = 0.0;
        }
        g.ordering.sort_desc(&mut pick);
        if !seen.insert(pick.clone()) {
            continue;
        }
        if let Ok(b) = nonstandard_basis(g, &pick, action) {
            out.push(b);
        }
    }
    if out.len() < count {
        log::warn!("basis sampler produced {} of {} requested bases", out.len(), count);
    }
    out
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Mul(a) => write!(f, "{}", a.to_exponent_string()),
            Action::Recip(v) => write!(f, "recip {v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Fp;
    use crate::groebner::buchberger;
    use crate::poly::parse_poly;

    fn conics() -> GroebnerResult<Fp> {
        let ord = MonomialOrdering::grevlex(2);
        let names = vec!["x".to_string(), "y".to_string()];
        let f: Vec<Poly<Fp>> = ["x^2 + y^2 - 1", "x^2 + x*y + y^2 - 1"]
            .iter()
            .map(|s| parse_poly(s, &names, &ord).unwrap())
            .collect();
        buchberger(&f, &ord).unwrap()
    }

    #[test]
    fn standard_basis_has_identity_change() {
        let g = conics();
        let b = standard_basis(&g, &Action::var(2, 0)).unwrap();
        assert!(b.is_standard);
        assert_eq!(b.s, Mat::identity(4));
        assert_eq!(b.t, g.action_matrix_std(&Monomial::var(2, 0)));
    }

    #[test]
    fn dependent_candidate_is_rejected() {
        let g = conics();
        // x*y is zero in the quotient ring.
        let cand = [Monomial::new(&[1, 1]), Monomial::new(&[1, 0]), Monomial::new(&[0, 1]), Monomial::one(2)];
        assert_eq!(nonstandard_basis(&g, &cand, &Action::var(2, 0)).unwrap_err(), BasisError::SingularBasis);
    }

    #[test]
    fn trivial_action_is_rejected() {
        let g = conics();
        assert_eq!(standard_basis(&g, &Action::Mul(Monomial::one(2))).unwrap_err(), BasisError::TrivialAction);
    }

    #[test]
    fn sampled_bases_are_distinct_and_invertible() {
        let g = conics();
        let pool = default_pool(&g);
        let bases = sample_bases(&g, &pool, 20, 5, &Action::var(2, 0));
        assert!(!bases.is_empty());
        let mut seen = HashSet::new();
        for b in &bases {
            assert!(seen.insert(b.monomials.clone()));
            assert_eq!(b.s.rank(), 4);
        }
        let again = sample_bases(&g, &pool, 20, 5, &Action::var(2, 0));
        let a: Vec<_> = bases.iter().map(|b| b.monomials.clone()).collect();
        let c: Vec<_> = again.iter().map(|b| b.monomials.clone()).collect();
        assert_eq!(a, c);
        // Restricting the pool to the standard monomials leaves one choice.
        let only = sample_bases(&g, &g.std_basis, 1, 9, &Action::var(2, 0));
        assert_eq!(only.len(), 1);
        assert!(only[0].is_standard);
    }
}
