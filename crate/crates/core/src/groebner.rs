//! Buchberger's algorithm with cofactor tracking.
//!
//! Every basis element carries its expression `g = Σ q_j f_j` in terms of the
//! input polynomials. S-pairs reducing to zero leave a syzygy behind; these
//! are kept and later combined with Koszul and Schreyer syzygies.

use std::collections::{HashSet, VecDeque};

use log::{debug, warn};
use thiserror::Error;

use crate::arith::Scalar;
use crate::linalg::Mat;
use crate::poly::{Monomial, MonomialOrdering, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("no input polynomials")]
    EmptyInput,
    #[error("ideal is not zero-dimensional: no leading monomial is a pure power of variable {0}")]
    NotZeroDimensional(usize),
}

/// Row vector of polynomials, one entry per input polynomial.
pub type PolyRow<S> = Vec<Poly<S>>;

#[derive(Clone, Debug)]
pub struct GroebnerResult<S> {
    pub ordering: MonomialOrdering,
    pub inputs: Vec<Poly<S>>,
    /// Reduced, monic, sorted ascending by leading monomial.
    pub basis: Vec<Poly<S>>,
    /// `basis[i] = Σ_j cofactors[i][j] * inputs[j]`.
    pub cofactors: Vec<PolyRow<S>>,
    /// Standard monomials, sorted descending.
    pub std_basis: Vec<Monomial>,
    /// Syzygies left behind by S-pairs that reduced to zero.
    pub traced_syzygies: Vec<PolyRow<S>>,
}

struct Elem<S> {
    poly: Poly<S>,
    cof: PolyRow<S>,
}

fn zero_row<S: Scalar>(s: usize) -> PolyRow<S> {
    vec![Poly::zero(); s]
}

fn row_add_scaled<S: Scalar>(
    dst: &PolyRow<S>,
    src: &PolyRow<S>,
    m: &Monomial,
    c: S,
    ord: &MonomialOrdering,
) -> PolyRow<S> {
    dst.iter()
        .zip(src)
        .map(|(a, b)| a.add_scaled(b, m, c, ord))
        .collect()
}

fn row_is_zero<S: Scalar>(row: &PolyRow<S>) -> bool {
    row.iter().all(Poly::is_zero)
}

/// `Σ_k row[k] * rows[k]`, i.e. a row vector times a polynomial matrix.
pub fn row_times<S: Scalar>(row: &[Poly<S>], rows: &[PolyRow<S>], width: usize, ord: &MonomialOrdering) -> PolyRow<S> {
    let mut out = zero_row(width);
    for (r, m) in row.iter().zip(rows) {
        if r.is_zero() {
            continue;
        }
        for (o, q) in out.iter_mut().zip(m) {
            if !q.is_zero() {
                *o = o.add(&r.mul(q, ord), ord);
            }
        }
    }
    out
}

/// `Σ_j row[j] * polys[j]`.
pub fn dot<S: Scalar>(row: &[Poly<S>], polys: &[Poly<S>], ord: &MonomialOrdering) -> Poly<S> {
    row.iter()
        .zip(polys)
        .fold(Poly::zero(), |acc, (a, b)| acc.add(&a.mul(b, ord), ord))
}

/// Full reduction of `p` by `divisors`, also updating the cofactor row.
fn reduce_tracked<S: Scalar>(
    mut p: Poly<S>,
    mut cof: PolyRow<S>,
    divisors: &[&Elem<S>],
    ord: &MonomialOrdering,
) -> (Poly<S>, PolyRow<S>) {
    let mut rem: Vec<(Monomial, S)> = Vec::new();
    while let Some((m, c)) = p.terms().first().cloned() {
        let hit = divisors.iter().find_map(|e| {
            let lm = e.poly.leading_monomial()?;
            lm.quotient_of(&m).map(|t| (*e, t))
        });
        match hit {
            Some((e, t)) => {
                let f = -(c.div(e.poly.leading_coefficient().unwrap()).expect("nonzero lc"));
                p = p.add_scaled(&e.poly, &t, f, ord);
                cof = row_add_scaled(&cof, &e.cof, &t, f, ord);
            }
            None => {
                rem.push((m, c));
                p = p.tail();
            }
        }
    }
    (Poly::from_terms(rem, ord), cof)
}

fn s_poly_parts(a: &Monomial, b: &Monomial) -> (Monomial, Monomial, Monomial) {
    let l = a.lcm(b);
    let ta = a.quotient_of(&l).unwrap();
    let tb = b.quotient_of(&l).unwrap();
    (l, ta, tb)
}

/// Computes a reduced Gröbner basis of `⟨inputs⟩` with cofactors.
///
/// Intended for exact fields; over `f64` the zero tests are meaningless.
pub fn buchberger<S: Scalar>(inputs: &[Poly<S>], ord: &MonomialOrdering) -> Result<GroebnerResult<S>, GroebnerError> {
    if inputs.is_empty() {
        return Err(GroebnerError::EmptyInput);
    }
    let s = inputs.len();
    let nv = ord.nvars();
    let mut elems: Vec<Elem<S>> = Vec::new();
    let mut traced = Vec::new();
    for (j, f) in inputs.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let inv = f.leading_coefficient().unwrap().inv().expect("nonzero lc");
        let mut cof = zero_row(s);
        cof[j] = Poly::constant(nv, inv);
        elems.push(Elem { poly: f.scale(inv), cof });
    }

    let mut queue: Vec<(usize, usize)> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..elems.len() {
        for i in 0..j {
            queue.push((i, j));
            pending.insert((i, j));
        }
    }

    let lm = |e: &Elem<S>| e.poly.leading_monomial().unwrap().clone();
    while !queue.is_empty() {
        // Normal strategy: smallest lcm first.
        let pick = (0..queue.len())
            .min_by(|&x, &y| {
                let (a, b) = queue[x];
                let (c, d) = queue[y];
                let lx = lm(&elems[a]).lcm(&lm(&elems[b]));
                let ly = lm(&elems[c]).lcm(&lm(&elems[d]));
                ord.cmp(&lx, &ly)
            })
            .unwrap();
        let (i, j) = queue.swap_remove(pick);
        pending.remove(&(i, j));
        let (mi, mj) = (lm(&elems[i]), lm(&elems[j]));
        if mi.is_coprime(&mj) {
            continue;
        }
        let (l, ti, tj) = s_poly_parts(&mi, &mj);
        let chain = (0..elems.len()).any(|k| {
            k != i
                && k != j
                && lm(&elems[k]).divides(&l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let one = S::one();
        let h = Poly::zero()
            .add_scaled(&elems[i].poly, &ti, one, ord)
            .add_scaled(&elems[j].poly, &tj, -one, ord);
        let hcof = row_add_scaled(&zero_row(s), &elems[i].cof, &ti, one, ord);
        let hcof = row_add_scaled(&hcof, &elems[j].cof, &tj, -one, ord);
        let divisors: Vec<&Elem<S>> = elems.iter().collect();
        let (r, rcof) = reduce_tracked(h, hcof, &divisors, ord);
        if r.is_zero() {
            if !row_is_zero(&rcof) {
                traced.push(rcof);
            }
            continue;
        }
        let inv = r.leading_coefficient().unwrap().inv().expect("nonzero lc");
        let n = elems.len();
        elems.push(Elem {
            poly: r.scale(inv),
            cof: rcof.iter().map(|q| q.scale(inv)).collect(),
        });
        for k in 0..n {
            queue.push((k, n));
            pending.insert((k, n));
        }
    }

    // Minimal basis: drop elements whose leading monomial is a multiple of another's.
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..elems.len() {
        let mi = lm(&elems[i]);
        let redundant = (0..elems.len()).any(|k| {
            let mk = lm(&elems[k]);
            k != i && mk.divides(&mi) && (mk != mi || k < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    // Interreduce tails against the other minimal elements.
    let mut reduced: Vec<Elem<S>> = Vec::with_capacity(keep.len());
    for &i in &keep {
        let others: Vec<&Elem<S>> = keep.iter().filter(|&&k| k != i).map(|&k| &elems[k]).collect();
        let (p, cof) = reduce_tracked(elems[i].poly.clone(), elems[i].cof.clone(), &others, ord);
        reduced.push(Elem { poly: p, cof });
    }
    reduced.sort_by(|a, b| ord.cmp(a.poly.leading_monomial().unwrap(), b.poly.leading_monomial().unwrap()));

    let lms: Vec<Monomial> = reduced.iter().map(|e| lm(e)).collect();
    if !lms.iter().any(Monomial::is_one) {
        for v in 0..nv {
            let pure = lms.iter().any(|m| {
                m.exponents()
                    .iter()
                    .enumerate()
                    .all(|(k, &e)| if k == v { e > 0 } else { e == 0 })
            });
            if !pure {
                return Err(GroebnerError::NotZeroDimensional(v));
            }
        }
    }
    let std_basis = standard_monomials(&lms, nv, ord);
    debug!("gröbner basis: {} elements, d = {}", reduced.len(), std_basis.len());
    let (basis, cofactors) = reduced.into_iter().map(|e| (e.poly, e.cof)).unzip();
    Ok(GroebnerResult {
        ordering: ord.clone(),
        inputs: inputs.to_vec(),
        basis,
        cofactors,
        std_basis,
        traced_syzygies: traced,
    })
}

/// Monomials divisible by none of `lms`, sorted descending. Assumes finiteness.
fn standard_monomials(lms: &[Monomial], nv: usize, ord: &MonomialOrdering) -> Vec<Monomial> {
    let in_lt = |m: &Monomial| lms.iter().any(|l| l.divides(m));
    let one = Monomial::one(nv);
    if in_lt(&one) {
        return Vec::new();
    }
    let mut seen: HashSet<Monomial> = HashSet::from([one.clone()]);
    let mut todo = VecDeque::from([one]);
    while let Some(m) = todo.pop_front() {
        for v in 0..nv {
            let n = m.mul(&Monomial::var(nv, v));
            if !in_lt(&n) && seen.insert(n.clone()) {
                todo.push_back(n);
            }
        }
    }
    let mut out: Vec<Monomial> = seen.into_iter().collect();
    ord.sort_desc(&mut out);
    out
}

impl<S: Scalar> GroebnerResult<S> {
    /// Quotient-ring dimension (number of roots with multiplicity).
    pub fn dim(&self) -> usize {
        self.std_basis.len()
    }

    pub fn nvars(&self) -> usize {
        self.ordering.nvars()
    }

    /// Division by the basis: `f = Σ q_i g_i + r`, `r` reduced.
    pub fn divide(&self, f: &Poly<S>) -> (Vec<Poly<S>>, Poly<S>) {
        let ord = &self.ordering;
        let mut p = f.clone();
        let mut q: Vec<Vec<(Monomial, S)>> = vec![Vec::new(); self.basis.len()];
        let mut rem = Vec::new();
        while let Some((m, c)) = p.terms().first().cloned() {
            let hit = self
                .basis
                .iter()
                .enumerate()
                .find_map(|(i, g)| g.leading_monomial().unwrap().quotient_of(&m).map(|t| (i, t)));
            match hit {
                Some((i, t)) => {
                    // Basis elements are monic.
                    p = p.add_scaled(&self.basis[i], &t, -c, ord);
                    q[i].push((t, c));
                }
                None => {
                    rem.push((m, c));
                    p = p.tail();
                }
            }
        }
        let q = q.into_iter().map(|t| Poly::from_terms(t, ord)).collect();
        (q, Poly::from_terms(rem, ord))
    }

    pub fn normal_form(&self, f: &Poly<S>) -> Poly<S> {
        self.divide(f).1
    }

    /// Coordinates of `NF(f)` in `std_basis`.
    pub fn std_coordinates(&self, f: &Poly<S>) -> Vec<S> {
        let nf = self.normal_form(f);
        self.std_basis.iter().map(|b| nf.coefficient(b)).collect()
    }

    /// Expresses `f ∈ ⟨F⟩` as `Σ h_j f_j`; `None` when `f` is not in the ideal.
    pub fn express_in_inputs(&self, f: &Poly<S>) -> Option<PolyRow<S>> {
        let (q, r) = self.divide(f);
        if !r.is_zero() {
            return None;
        }
        Some(row_times(&q, &self.cofactors, self.inputs.len(), &self.ordering))
    }

    /// Matrix of multiplication by `a` in the standard basis; row `i` holds
    /// the coordinates of `NF(a * b_i)`.
    pub fn action_matrix_std(&self, a: &Monomial) -> Mat<S> {
        let d = self.dim();
        let rows: Vec<Vec<S>> = self
            .std_basis
            .iter()
            .map(|b| self.std_coordinates(&Poly::monomial(a.mul(b), S::one())))
            .collect();
        if d == 0 {
            return Mat::zeros(0, 0);
        }
        Mat::from_rows(&rows)
    }

    /// True when `cofactors` reproduce every basis element exactly.
    pub fn check_cofactors(&self) -> bool {
        self.basis
            .iter()
            .zip(&self.cofactors)
            .all(|(g, q)| dot(q, &self.inputs, &self.ordering) == *g)
    }

    /// Buchberger's criterion: every S-polynomial reduces to zero.
    pub fn check_s_pairs(&self) -> bool {
        let ord = &self.ordering;
        for j in 0..self.basis.len() {
            for i in 0..j {
                let (gi, gj) = (&self.basis[i], &self.basis[j]);
                let (_, ti, tj) = s_poly_parts(gi.leading_monomial().unwrap(), gj.leading_monomial().unwrap());
                let s = Poly::zero()
                    .add_scaled(gi, &ti, S::one(), ord)
                    .add_scaled(gj, &tj, -S::one(), ord);
                if !self.normal_form(&s).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// True when the basis is reduced: monic, and no term of any element is
    /// divisible by the leading monomial of another.
    pub fn is_reduced(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, g)| {
            g.leading_coefficient() == Some(S::one())
                && self.basis.iter().enumerate().all(|(k, h)| {
                    k == i || !g.monomials().any(|m| h.leading_monomial().unwrap().divides(m))
                })
        })
    }

    /// Generators of the first syzygy module of the inputs.
    ///
    /// Collected from: Koszul pairs of the inputs, zero reductions traced
    /// during Buchberger, rows of `I − P·Q` (inputs re-expressed through the
    /// basis), and Schreyer syzygies of the final basis lifted through `Q`.
    /// Each row is checked to annihilate the inputs; duplicates are removed.
    pub fn syzygy_generators(&self) -> Vec<PolyRow<S>> {
        let ord = &self.ordering;
        let s = self.inputs.len();
        let nv = self.nvars();
        let mut rows: Vec<PolyRow<S>> = Vec::new();

        for j in 0..s {
            for i in 0..j {
                if self.inputs[i].is_zero() || self.inputs[j].is_zero() {
                    continue;
                }
                let mut r = zero_row(s);
                r[i] = self.inputs[j].clone();
                r[j] = self.inputs[i].scale(-S::one());
                rows.push(r);
            }
        }
        rows.extend(self.traced_syzygies.iter().cloned());
        for k in 0..s {
            let (q, rem) = self.divide(&self.inputs[k]);
            debug_assert!(rem.is_zero());
            let lifted = row_times(&q, &self.cofactors, s, ord);
            let mut r: PolyRow<S> = lifted.iter().map(|p| p.scale(-S::one())).collect();
            r[k] = r[k].add(&Poly::constant(nv, S::one()), ord);
            rows.push(r);
        }
        let n = self.basis.len();
        for j in 0..n {
            for i in 0..j {
                let (gi, gj) = (&self.basis[i], &self.basis[j]);
                let (_, ti, tj) = s_poly_parts(gi.leading_monomial().unwrap(), gj.leading_monomial().unwrap());
                let sp = Poly::zero()
                    .add_scaled(gi, &ti, S::one(), ord)
                    .add_scaled(gj, &tj, -S::one(), ord);
                let (u, _) = self.divide(&sp);
                let mut sigma: Vec<Poly<S>> = u.iter().map(|p| p.scale(-S::one())).collect();
                sigma[i] = sigma[i].add(&Poly::monomial(ti, S::one()), ord);
                sigma[j] = sigma[j].sub(&Poly::monomial(tj, S::one()), ord);
                rows.push(row_times(&sigma, &self.cofactors, s, ord));
            }
        }

        let mut out: Vec<PolyRow<S>> = Vec::new();
        for r in rows {
            if row_is_zero(&r) {
                continue;
            }
            if !dot(&r, &self.inputs, ord).is_zero() {
                warn!("discarding a generated row that is not a syzygy");
                continue;
            }
            let r = normalize_row(r);
            if !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }
}

/// Scales a row so its first nonzero entry has leading coefficient one.
fn normalize_row<S: Scalar>(r: PolyRow<S>) -> PolyRow<S> {
    let lc = r.iter().find_map(|p| p.leading_coefficient()).unwrap();
    let inv = lc.inv().expect("nonzero");
    r.into_iter().map(|p| p.scale(inv)).collect()
}
