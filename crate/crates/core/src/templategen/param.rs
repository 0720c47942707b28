//! The parameterized template `H = H0 + ΘH1` and the greedy searches.
//!
//! Column `(j, m)` of `W` has, in row `i`, the affine form
//! `c(H0_ij, m) + Σ_k θ_ik c(H1_kj, m)`. The θ-coefficients do not depend on
//! `i`, only the constants do, so a column is stored as one sparse vector:
//! indices `0..l` hold the θ-coefficients and `l + i` the constant of row `i`.
//! Committed equations are kept in reduced echelon form and every column is
//! kept reduced against them, so "identically zero on the solution set" is
//! simply "empty vector".

use std::collections::{HashMap, HashSet};

use crate::arith::{Fp, Scalar};
use crate::groebner::PolyRow;
use crate::poly::{Monomial, MonomialOrdering, Poly};

use super::{sort_rows, Row};

type SVec = Vec<(u32, Fp)>;

/// `v + c·w`.
fn axpy(v: &SVec, c: Fp, w: &SVec) -> SVec {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        match (v.get(i), w.get(j)) {
            (Some(a), Some(b)) if a.0 == b.0 => {
                let s = a.1 + c * b.1;
                if !s.is_zero() {
                    out.push((a.0, s));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a.0 < b.0 => {
                out.push(*a);
                i += 1;
            }
            (Some(a), None) => {
                out.push(*a);
                i += 1;
            }
            (_, Some(b)) => {
                out.push((b.0, c * b.1));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn coef(v: &SVec, idx: u32) -> Fp {
    v.binary_search_by_key(&idx, |t| t.0).map_or(Fp::zero(), |k| v[k].1)
}

fn normalized(v: &SVec) -> SVec {
    let inv = v[0].1.inv().expect("nonzero");
    v.iter().map(|&(k, c)| (k, c * inv)).collect()
}

/// Eliminates the pivot entry of `pv` (normalized, pivot = leading index) from `v`.
/// Returns whether `v` changed.
fn reduce_one(v: &mut SVec, pv: &SVec) -> bool {
    let p = pv[0].0;
    let c = coef(v, p);
    if c.is_zero() {
        return false;
    }
    *v = axpy(v, -c, pv);
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    RowWise,
    ColumnWise,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::RowWise => "row-wise",
            Strategy::ColumnWise => "column-wise",
        })
    }
}

#[derive(Clone, Debug)]
pub struct GreedyResult {
    pub strategy: Strategy,
    /// `d × l` parameter values; free parameters are set to zero.
    pub theta: Vec<Vec<Fp>>,
    /// Shifts whose `W` column is nonzero at `theta`.
    pub rows: Vec<Row>,
    pub commits: usize,
    /// Columns made identically zero by the committed equations.
    pub zeroed: usize,
}

#[derive(Clone, Debug)]
pub struct ParamTemplate {
    pub d: usize,
    pub l: usize,
    pub columns: Vec<Row>,
    forms: Vec<SVec>,
}

struct State {
    l: u32,
    cols: Vec<SVec>,
    pivots: Vec<SVec>,
}

impl State {
    /// Adds a pivot and reduces everything by it; marks changed columns.
    fn commit(&mut self, pv: SVec, changed: &mut [bool]) {
        debug_assert!(pv[0].0 < self.l && pv[0].1 == Fp::one());
        for (c, flag) in self.cols.iter_mut().zip(changed.iter_mut()) {
            if reduce_one(c, &pv) {
                *flag = true;
            }
        }
        for q in self.pivots.iter_mut() {
            reduce_one(q, &pv);
        }
        self.pivots.push(pv);
    }

    fn eliminable(&self, c: usize) -> bool {
        self.cols[c].first().is_some_and(|t| t.0 < self.l)
    }

    fn fixed(&self, c: usize) -> bool {
        self.cols[c].first().is_some_and(|t| t.0 >= self.l)
    }
}

impl ParamTemplate {
    pub fn new(h0: &[PolyRow<Fp>], h1: &[PolyRow<Fp>], ord: &MonomialOrdering) -> Self {
        let d = h0.len();
        let l = h1.len();
        let mut index: HashMap<Row, usize> = HashMap::new();
        let mut columns: Vec<Row> = Vec::new();
        let mut entries: Vec<Vec<(u32, Fp)>> = Vec::new();
        let mut add = |row: Row, idx: u32, c: Fp, columns: &mut Vec<Row>, entries: &mut Vec<SVec>| {
            let k = *index.entry(row.clone()).or_insert_with(|| {
                columns.push(row);
                entries.push(Vec::new());
                columns.len() - 1
            });
            entries[k].push((idx, c));
        };
        for (k, row) in h1.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for (m, c) in p.terms() {
                    add(Row { poly: j, shift: m.clone() }, k as u32, *c, &mut columns, &mut entries);
                }
            }
        }
        for (i, row) in h0.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                for (m, c) in p.terms() {
                    add(Row { poly: j, shift: m.clone() }, (l + i) as u32, *c, &mut columns, &mut entries);
                }
            }
        }
        // Deterministic column order: the template row order.
        let mut order: Vec<usize> = (0..columns.len()).collect();
        let mut sorted = columns.clone();
        sort_rows(&mut sorted, ord);
        let pos: HashMap<&Row, usize> = sorted.iter().enumerate().map(|(i, r)| (r, i)).collect();
        order.sort_by_key(|&k| pos[&columns[k]]);
        let forms = order
            .iter()
            .map(|&k| {
                let mut v = entries[k].clone();
                v.sort_by_key(|t| t.0);
                v
            })
            .collect();
        ParamTemplate { d, l, columns: sorted, forms }
    }

    /// Columns with a nonzero constant and no parameter: never eliminable.
    pub fn fixed_count(&self) -> usize {
        self.forms.iter().filter(|v| v.first().is_some_and(|t| t.0 as usize >= self.l)).count()
    }

    /// Rows of the template at `Θ = 0`, i.e. the support of `H0`.
    pub fn rows_at_origin(&self) -> Vec<Row> {
        self.rows_at(&vec![vec![Fp::zero(); self.l]; self.d])
    }

    /// Shifts whose column is nonzero at the given `Θ`.
    pub fn rows_at(&self, theta: &[Vec<Fp>]) -> Vec<Row> {
        let l = self.l as u32;
        self.forms
            .iter()
            .zip(&self.columns)
            .filter(|(v, _)| {
                (0..self.d).any(|i| {
                    let mut s = coef(v, l + i as u32);
                    for &(k, c) in v.iter().take_while(|t| t.0 < l) {
                        s = s + theta[i][k as usize] * c;
                    }
                    !s.is_zero()
                })
            })
            .map(|(_, r)| r.clone())
            .collect()
    }

    fn state(&self) -> State {
        State {
            l: self.l as u32,
            cols: self.forms.clone(),
            pivots: Vec::new(),
        }
    }

    fn finish(&self, st: &State, strategy: Strategy) -> GreedyResult {
        let mut theta = vec![vec![Fp::zero(); self.l]; self.d];
        for pv in &st.pivots {
            let p = pv[0].0 as usize;
            for (i, th) in theta.iter_mut().enumerate() {
                th[p] = -coef(pv, (self.l + i) as u32);
            }
        }
        GreedyResult {
            strategy,
            rows: self.rows_at(&theta),
            commits: st.pivots.len(),
            zeroed: st.cols.iter().filter(|v| v.is_empty()).count(),
            theta,
        }
    }

    fn degree(&self, c: usize) -> u32 {
        self.columns[c].shift.degree()
    }

    /// Repeatedly zeroes the column whose equation `w_k = 0` zeroes the most
    /// columns. Two columns vanish together exactly when their reduced forms
    /// are proportional, so scoring is a grouping by normalized form.
    pub fn rowwise(&self) -> GreedyResult {
        let mut st = self.state();
        loop {
            // key -> (score, degree sum, first column)
            let mut groups: HashMap<Vec<(u32, u64)>, (usize, u64, usize)> = HashMap::new();
            for c in 0..st.cols.len() {
                if !st.eliminable(c) {
                    continue;
                }
                let key: Vec<(u32, u64)> = normalized(&st.cols[c]).iter().map(|t| (t.0, t.1.value())).collect();
                let e = groups.entry(key).or_insert((0, 0, c));
                e.0 += 1;
                e.1 += self.degree(c) as u64;
            }
            let best = groups
                .values()
                .max_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(b.2.cmp(&a.2)));
            let Some(&(_, _, c)) = best else { break };
            let pv = normalized(&st.cols[c]);
            let mut changed = vec![false; st.cols.len()];
            st.commit(pv, &mut changed);
        }
        self.finish(&st, Strategy::RowWise)
    }

    /// For each excessive monomial `e`, zeroes jointly every column whose
    /// shift contains `e`; commits the `e` zeroing the most columns.
    ///
    /// `polys` is a generic instance (for shift supports) and `keep` the
    /// reducible and basic monomials, which are never excessive.
    pub fn columnwise(&self, polys: &[Poly<Fp>], keep: &HashSet<Monomial>, ord: &MonomialOrdering) -> GreedyResult {
        let n = self.columns.len();
        let mut by_mono: HashMap<Monomial, Vec<usize>> = HashMap::new();
        for (c, r) in self.columns.iter().enumerate() {
            for m in polys[r.poly].monomials() {
                let s = m.mul(&r.shift);
                if !keep.contains(&s) {
                    by_mono.entry(s).or_default().push(c);
                }
            }
        }
        let mut excessive: Vec<Monomial> = by_mono.keys().cloned().collect();
        ord.sort_desc(&mut excessive);

        let mut st = self.state();
        let l = st.l;
        let z = projection(l as usize + self.d);
        let mut masks: Vec<Mask> = st.cols.iter().map(|v| theta_mask(v, l)).collect();
        let mut dots: Vec<Fp> = st.cols.iter().map(|v| dot(v, &z)).collect();
        // Per excessive monomial: its joint basis and the columns it zeroes.
        // Reused across rounds unless one of its own columns changed; other
        // changed columns only update the member list.
        let mut cache: Vec<Option<Scored>> = vec![None; excessive.len()];
        let mut changed = vec![true; n];
        loop {
            let dirty: Vec<usize> = (0..n).filter(|&c| changed[c]).collect();
            for &c in &dirty {
                masks[c] = theta_mask(&st.cols[c], l);
                dots[c] = dot(&st.cols[c], &z);
            }
            let mut best: Option<(usize, u64, usize)> = None;
            for (ei, e) in excessive.iter().enumerate() {
                let own = &by_mono[e];
                if cache[ei].is_none() || own.iter().any(|&c| changed[c]) {
                    cache[ei] = Some(self.score(&st, &masks, &dots, &z, own));
                } else if let Some(sc) = cache[ei].as_mut() {
                    if let Some(span) = &sc.basis {
                        for &c in &dirty {
                            let now = span.zeroes(&st.cols[c], &masks[c], dots[c], l);
                            match (sc.members.binary_search(&c), now) {
                                (Ok(k), false) => {
                                    sc.members.remove(k);
                                    sc.degsum -= self.degree(c) as u64;
                                }
                                (Err(k), true) => {
                                    sc.members.insert(k, c);
                                    sc.degsum += self.degree(c) as u64;
                                }
                                _ => {}
                            }
                        }
                    }
                }
                let sc = cache[ei].as_ref().unwrap();
                if sc.basis.is_none() {
                    continue;
                }
                let (score, degsum) = (sc.members.len(), sc.degsum);
                let better = match &best {
                    None => score > 0,
                    Some((s, ds, _)) => score > *s || (score == *s && degsum > *ds),
                };
                if better {
                    best = Some((score, degsum, ei));
                }
            }
            changed.iter_mut().for_each(|f| *f = false);
            let Some((_, _, ei)) = best else { break };
            let basis = cache[ei].as_ref().unwrap().basis.clone().unwrap().basis;
            for pv in basis {
                let mut v = pv;
                for q in &st.pivots {
                    reduce_one(&mut v, q);
                }
                if !v.is_empty() {
                    st.commit(normalized(&v), &mut changed);
                }
            }
        }
        self.finish(&st, Strategy::ColumnWise)
    }

    /// Joint basis of the columns containing one excessive monomial, and
    /// every column it zeroes.
    fn score(&self, st: &State, masks: &[Mask], dots: &[Fp], z: &[Fp], own: &[usize]) -> Scored {
        let l = st.l;
        let none = Scored { basis: None, members: Vec::new(), degsum: 0 };
        let we: Vec<usize> = own.iter().copied().filter(|&c| !st.cols[c].is_empty()).collect();
        if we.is_empty() || we.iter().any(|&c| st.fixed(c)) {
            return none;
        }
        let Some(basis) = joint_basis(we.iter().map(|&c| &st.cols[c]), l) else {
            return none;
        };
        let span = Span::new(basis, l, z);
        let mut members = Vec::new();
        let mut degsum = 0u64;
        for (c, v) in st.cols.iter().enumerate() {
            if span.zeroes(v, &masks[c], dots[c], l) {
                members.push(c);
                degsum += self.degree(c) as u64;
            }
        }
        Scored { basis: Some(span), members, degsum }
    }
}

type Mask = Vec<u64>;

/// Bitset of the θ-indices present in `v`.
fn theta_mask(v: &SVec, l: u32) -> Mask {
    let mut m = vec![0u64; (l as usize).div_ceil(64)];
    for &(k, _) in v.iter().take_while(|t| t.0 < l) {
        m[k as usize / 64] |= 1 << (k % 64);
    }
    m
}

/// Fixed pseudo-random vector for span membership hashing.
fn projection(len: usize) -> Vec<Fp> {
    (0..len as u64).map(|k| Fp::rand_nonzero(0x5eed ^ k)).collect()
}

fn dot(v: &SVec, z: &[Fp]) -> Fp {
    v.iter().fold(Fp::zero(), |s, &(k, c)| s + c * z[k as usize])
}

/// A reduced echelon basis with what is needed to test membership fast.
#[derive(Clone, Debug)]
struct Span {
    basis: Vec<SVec>,
    /// Union of the θ-supports.
    union: Mask,
    /// `b·z` stored at the pivot index of each basis vector `b`, else zero.
    hash: Vec<Fp>,
}

impl Span {
    fn new(basis: Vec<SVec>, l: u32, z: &[Fp]) -> Self {
        let mut union = vec![0u64; (l as usize).div_ceil(64)];
        let mut hash = vec![Fp::zero(); l as usize];
        for pv in &basis {
            for (u, w) in union.iter_mut().zip(theta_mask(pv, l)) {
                *u |= w;
            }
            hash[pv[0].0 as usize] = dot(pv, z);
        }
        Span { basis, union, hash }
    }

    /// Whether a column with θ-entries vanishes once the basis is
    /// committed. In reduced echelon form that means `v = Σ v[p]·b_p` over
    /// the pivots `p`; the support and hash tests reject most columns, and
    /// survivors are confirmed exactly.
    fn zeroes(&self, v: &SVec, mask: &Mask, vz: Fp, l: u32) -> bool {
        if v.first().map_or(true, |t| t.0 >= l) || mask.iter().zip(&self.union).any(|(m, u)| m & !u != 0) {
            return false;
        }
        let h = v.iter().take_while(|t| t.0 < l).fold(Fp::zero(), |s, &(k, c)| s + c * self.hash[k as usize]);
        if h != vz {
            return false;
        }
        let mut r = v.clone();
        for pv in &self.basis {
            reduce_one(&mut r, pv);
            if r.is_empty() {
                return true;
            }
        }
        false
    }
}

#[derive(Clone, Debug)]
struct Scored {
    /// `None` when the monomial cannot be zeroed (fixed column or
    /// inconsistent joint system).
    basis: Option<Span>,
    /// Sorted columns that vanish once the basis is committed.
    members: Vec<usize>,
    degsum: u64,
}

/// Reduced echelon basis of the given forms; `None` if the joint system is
/// inconsistent (a pivot lands on a constant).
fn joint_basis<'a>(vecs: impl Iterator<Item = &'a SVec>, l: u32) -> Option<Vec<SVec>> {
    let mut basis: Vec<SVec> = Vec::new();
    for v in vecs {
        let mut r = v.clone();
        for b in &basis {
            reduce_one(&mut r, b);
        }
        if r.is_empty() {
            continue;
        }
        if r[0].0 >= l {
            return None;
        }
        let r = normalized(&r);
        for b in basis.iter_mut() {
            reduce_one(b, &r);
        }
        basis.push(r);
    }
    Some(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(&[u32], i64)], ord: &MonomialOrdering) -> Poly<Fp> {
        Poly::from_terms(terms.iter().map(|(e, c)| (Monomial::new(e), Fp::from_i64(*c))), ord)
    }

    #[test]
    fn axpy_merges_and_cancels() {
        let v: SVec = vec![(0, Fp::from_i64(1)), (2, Fp::from_i64(3))];
        let w: SVec = vec![(1, Fp::from_i64(1)), (2, Fp::from_i64(1))];
        assert_eq!(axpy(&v, Fp::from_i64(-3), &w), vec![(0, Fp::from_i64(1)), (1, Fp::from_i64(-3))]);
    }

    #[test]
    fn origin_is_the_h0_template() {
        let ord = MonomialOrdering::grevlex(1);
        let h0 = vec![vec![poly(&[(&[1], 1)], &ord), Poly::zero()]];
        let h1 = vec![vec![poly(&[(&[2], 1)], &ord), poly(&[(&[0], 1)], &ord)]];
        let pt = ParamTemplate::new(&h0, &h1, &ord);
        assert_eq!(pt.columns.len(), 3);
        assert_eq!(pt.rows_at_origin(), vec![Row { poly: 0, shift: Monomial::new(&[1]) }]);
        assert_eq!(pt.fixed_count(), 1);
    }

    #[test]
    fn proportional_columns_vanish_together() {
        // One row, one parameter: columns a = 1 + θ and b = 2 + 2θ; c = 5 fixed.
        let ord = MonomialOrdering::grevlex(1);
        let h0 = vec![vec![poly(&[(&[1], 1), (&[0], 2)], &ord), poly(&[(&[0], 5)], &ord)]];
        let h1 = vec![vec![poly(&[(&[1], 1), (&[0], 2)], &ord), Poly::zero()]];
        let pt = ParamTemplate::new(&h0, &h1, &ord);
        let r = pt.rowwise();
        assert_eq!(r.commits, 1);
        assert_eq!(r.zeroed, 2);
        assert_eq!(r.theta[0][0], Fp::from_i64(-1));
        assert_eq!(r.rows, vec![Row { poly: 1, shift: Monomial::one(1) }]);
    }

    #[test]
    fn no_parameters_means_no_change() {
        let ord = MonomialOrdering::grevlex(1);
        let h0 = vec![vec![poly(&[(&[1], 1)], &ord)]];
        let pt = ParamTemplate::new(&h0, &[], &ord);
        let r = pt.rowwise();
        assert_eq!(r.commits, 0);
        assert_eq!(r.rows, pt.rows_at_origin());
        let f = vec![poly(&[(&[1], 1), (&[0], -1)], &ord)];
        let c = pt.columnwise(&f, &HashSet::new(), &ord);
        assert_eq!(c.commits, 0);
    }

    #[test]
    fn inconsistent_joint_system_scores_zero() {
        // Two columns sharing monomial x^2 in their shifts: 1 + θ and 2 + θ
        // cannot vanish together.
        let ord = MonomialOrdering::grevlex(1);
        let h0 = vec![vec![poly(&[(&[1], 1)], &ord), poly(&[(&[1], 2)], &ord)]];
        let h1 = vec![vec![poly(&[(&[1], 1)], &ord), poly(&[(&[1], 1)], &ord)]];
        let pt = ParamTemplate::new(&h0, &h1, &ord);
        let f = vec![poly(&[(&[1], 1)], &ord), poly(&[(&[1], 1)], &ord)];
        let c = pt.columnwise(&f, &HashSet::new(), &ord);
        assert_eq!(c.commits, 0);
        let r = pt.rowwise();
        assert_eq!(r.commits, 1);
        assert_eq!(r.zeroed, 1);
    }
}
