//! Elimination templates: construction from `V = H·F`, greedy reduction of
//! the parameterized `H = H0 + ΘH1`, Schur complement reduction, pruning, and
//! validity checks.

mod generate;
mod param;
mod prune;
mod schur;

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::{ArithError, Scalar};
use crate::basisgen::{Action, QuotientBasis};
use crate::groebner::{GroebnerResult, PolyRow};
use crate::linalg::Mat;
use crate::poly::{ColumnPartition, Monomial, MonomialOrdering, Poly};

pub use generate::{generate, generate_candidate, Candidate, CandidateReport, Context, GenerateError, GenerateOptions, StageSizes};
pub use param::{GreedyResult, ParamTemplate, Strategy};
pub use prune::prune_rows_cols;
pub use schur::{schur_reduce, SchurError};

/// A template row: `shift * f_poly`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    pub poly: usize,
    pub shift: Monomial,
}

/// Precomputed Schur complement fill-in: the template is `D − C·K` where `C`
/// holds the row coefficients in the eliminated columns `a_cols` and `K` is
/// the constant `A⁻¹B`, stored sparsely as `(k, j, K_kj)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurProgram {
    pub a_rows: Vec<Row>,
    pub a_cols: Vec<Monomial>,
    pub fill: Vec<(usize, usize, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub rows: Vec<Row>,
    pub partition: ColumnPartition,
    /// Columns removed by pruning; their entries are ignored.
    pub dropped: Vec<Monomial>,
    /// Full basis `B` (descending), possibly larger than `B̄`.
    pub basis: Vec<Monomial>,
    /// Quotient-ring dimension; less than `basis.len()` for redundant bases.
    pub dim: usize,
    pub action: Action,
    pub schur: Option<SchurProgram>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TemplateError {
    #[error("reducible monomial {0:?} does not occur in the shifts (condition 1)")]
    MissingReducible(Monomial),
    #[error("reducible column {0:?} has no pivot in the reduced row echelon form (condition 2)")]
    ReducibleNotPivot(Monomial),
    #[error("basic column {0:?} has a pivot: the bottom block of the echelon form is not zero (condition 2)")]
    BasicPivot(Monomial),
    #[error("row {1} contains monomial {0:?} outside the column partition")]
    Uncovered(Monomial, usize),
    #[error("polynomial index {0} out of range")]
    BadPolyIndex(usize),
    #[error("action is undefined on basis monomial {0:?}")]
    ActionUndefined(Monomial),
    #[error("V_{0} is not in the ideal")]
    NotInIdeal(usize),
    #[error("template action matrix disagrees with the normal-form action matrix")]
    OracleMismatch,
    #[error("a Schur-reduced template cannot be expanded")]
    ExpandSchur,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Result of reading an action matrix off an echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadOff<S> {
    /// `M̃'_B`: rows follow `partition.reducible`, columns follow the basis.
    pub m_tilde_b: Mat<S>,
    pub t: Mat<S>,
}

impl Template {
    /// Builds a template from a row set; the partition is derived from the
    /// support of the shifts of `polys` (a generic instance).
    pub fn from_rows<S: Scalar>(
        mut rows: Vec<Row>,
        polys: &[Poly<S>],
        basis: &[Monomial],
        dim: usize,
        action: &Action,
        ord: &MonomialOrdering,
    ) -> Result<Template, TemplateError> {
        sort_rows(&mut rows, ord);
        rows.dedup();
        let mut support: HashSet<Monomial> = HashSet::new();
        for r in &rows {
            let f = polys.get(r.poly).ok_or(TemplateError::BadPolyIndex(r.poly))?;
            support.extend(f.monomials().map(|m| m.mul(&r.shift)));
        }
        let bset: HashSet<&Monomial> = basis.iter().collect();
        let mut reducible = Vec::new();
        for b in basis {
            let img = action.apply(b).ok_or_else(|| TemplateError::ActionUndefined(b.clone()))?;
            if !bset.contains(&img) && !reducible.contains(&img) {
                reducible.push(img);
            }
        }
        if let Some(r) = reducible.iter().find(|r| !support.contains(*r)) {
            return Err(TemplateError::MissingReducible(r.clone()));
        }
        let rset: HashSet<&Monomial> = reducible.iter().collect();
        let basic: Vec<Monomial> = basis.iter().filter(|b| support.contains(*b)).cloned().collect();
        let excessive: Vec<Monomial> = support
            .iter()
            .filter(|m| !rset.contains(m) && !bset.contains(m))
            .cloned()
            .collect();
        let mut basis = basis.to_vec();
        ord.sort_desc(&mut basis);
        Ok(Template {
            rows,
            partition: ColumnPartition { excessive, reducible, basic }.normalized(ord),
            dropped: Vec::new(),
            basis,
            dim,
            action: action.clone(),
            schur: None,
        })
    }

    /// Adds every shift of every row by monomials of degree `1..=degree` and
    /// re-derives the partition. The result has a larger permissible set,
    /// which is what column pivoting needs.
    pub fn expand<S: Scalar>(&self, polys: &[Poly<S>], degree: u32, ord: &MonomialOrdering) -> Result<Template, TemplateError> {
        if self.schur.is_some() {
            return Err(TemplateError::ExpandSchur);
        }
        let nvars = self.basis.first().map_or(0, Monomial::nvars);
        let ups = Monomial::all_up_to_degree(nvars, degree);
        let mut rows: Vec<Row> = Vec::new();
        let mut seen = HashSet::new();
        for r in &self.rows {
            for u in &ups {
                let row = Row { poly: r.poly, shift: r.shift.mul(u) };
                if seen.insert(row.clone()) {
                    rows.push(row);
                }
            }
        }
        Template::from_rows(rows, polys, &self.basis, self.dim, &self.action, ord)
    }

    /// `(s, n)`: rows and columns.
    pub fn size(&self) -> (usize, usize) {
        (self.rows.len(), self.partition.len())
    }

    /// Scalar size objective `s·n`.
    pub fn area(&self) -> usize {
        let (s, n) = self.size();
        s * n
    }

    pub fn columns(&self) -> Vec<Monomial> {
        self.partition.columns()
    }

    /// Ordering key for choosing among templates: area, then columns, then rows.
    pub fn size_key(&self) -> (usize, usize, Vec<(usize, Vec<u32>)>) {
        (
            self.area(),
            self.partition.len(),
            self.rows.iter().map(|r| (r.poly, r.shift.exponents().to_vec())).collect(),
        )
    }

    /// Fills the template with the coefficients of `polys`.
    pub fn instantiate<S: Scalar>(&self, polys: &[Poly<S>]) -> Result<Mat<S>, TemplateError> {
        let cols = self.columns();
        let a_cols: &[Monomial] = self.schur.as_ref().map_or(&[], |s| &s.a_cols);
        let mut index: HashMap<&Monomial, usize> = HashMap::with_capacity(cols.len() + a_cols.len());
        for (k, m) in cols.iter().enumerate() {
            index.insert(m, k);
        }
        let n = cols.len();
        for (k, m) in a_cols.iter().enumerate() {
            index.insert(m, n + k);
        }
        let dropped: HashSet<&Monomial> = self.dropped.iter().collect();
        let width = n + a_cols.len();
        let mut m = Mat::zeros(self.rows.len(), width);
        for (i, r) in self.rows.iter().enumerate() {
            let f = polys.get(r.poly).ok_or(TemplateError::BadPolyIndex(r.poly))?;
            for (mono, c) in f.terms() {
                let shifted = mono.mul(&r.shift);
                match index.get(&shifted) {
                    Some(&k) => m[(i, k)] = m[(i, k)] + *c,
                    None if dropped.contains(&shifted) => {}
                    None => return Err(TemplateError::Uncovered(shifted, i)),
                }
            }
        }
        let Some(prog) = &self.schur else {
            return Ok(m);
        };
        let mut out = Mat::from_fn(self.rows.len(), n, |i, j| m[(i, j)]);
        for (k, j, kv) in &prog.fill {
            let kv = S::from_rational(kv)?;
            for i in 0..self.rows.len() {
                let c = m[(i, n + k)];
                if !c.is_zero() {
                    out[(i, *j)] = out[(i, *j)] - c * kv;
                }
            }
        }
        Ok(out)
    }

    /// Checks that every reducible column gets a pivot and no basic column
    /// does, on an instantiated matrix, and reads off the action
    /// matrix `T = [−M̃'_B; P]` (rows in basis order).
    pub fn read_off<S: Scalar>(&self, m: &Mat<S>, rel_tol: f64) -> Result<ReadOff<S>, TemplateError> {
        let p = &self.partition;
        let (ne, nr) = (p.excessive.len(), p.reducible.len());
        for (k, r) in p.reducible.iter().enumerate() {
            if (0..m.nrows()).all(|i| m[(i, ne + k)].is_zero()) {
                return Err(TemplateError::MissingReducible(r.clone()));
            }
        }
        let rr = m.rref(rel_tol);
        let pivot_row: HashMap<usize, usize> = rr.pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let bindex: HashMap<&Monomial, usize> = self.basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut mt = Mat::zeros(nr, self.basis.len());
        for (k, r) in p.reducible.iter().enumerate() {
            let Some(&row) = pivot_row.get(&(ne + k)) else {
                return Err(TemplateError::ReducibleNotPivot(r.clone()));
            };
            for (q, b) in p.basic.iter().enumerate() {
                mt[(k, bindex[b])] = rr.matrix[(row, ne + nr + q)];
            }
        }
        // With a redundant basis the basic columns may be dependent.
        if self.dim == self.basis.len() {
            if let Some(q) = (0..p.basic.len()).find(|q| pivot_row.contains_key(&(ne + nr + q))) {
                return Err(TemplateError::BasicPivot(p.basic[q].clone()));
            }
        }
        let rindex: HashMap<&Monomial, usize> = p.reducible.iter().enumerate().map(|(k, r)| (r, k)).collect();
        let d = self.basis.len();
        let mut t = Mat::zeros(d, d);
        for (i, b) in self.basis.iter().enumerate() {
            let img = self.action.apply(b).ok_or_else(|| TemplateError::ActionUndefined(b.clone()))?;
            if let Some(&j) = bindex.get(&img) {
                t[(i, j)] = S::one();
            } else {
                let k = *rindex.get(&img).ok_or(TemplateError::MissingReducible(img.clone()))?;
                for j in 0..d {
                    t[(i, j)] = -mt[(k, j)];
                }
            }
        }
        Ok(ReadOff { m_tilde_b: mt, t })
    }

    /// Instantiates over `Z/p` and checks the template conditions.
    pub fn verify(&self, polys: &[Poly<crate::Fp>]) -> Result<ReadOff<crate::Fp>, TemplateError> {
        let m = self.instantiate(polys)?;
        self.read_off(&m, 0.0)
    }

    /// The template conditions plus the oracle `T·S = N`: the template action matrix
    /// must agree with normal-form coordinates from a Gröbner basis of the
    /// same instance (equivalently `T = S·T̂·S⁻¹` for a square basis).
    pub fn verify_with_oracle(
        &self,
        polys: &[Poly<crate::Fp>],
        g: &GroebnerResult<crate::Fp>,
    ) -> Result<ReadOff<crate::Fp>, TemplateError> {
        let ro = self.verify(polys)?;
        let qb = crate::basisgen::nonstandard_basis(g, &self.basis, &self.action)
            .map_err(|_| TemplateError::OracleMismatch)?;
        let n = qb.t.mul(&qb.s);
        if ro.t.mul(&qb.s) != n {
            return Err(TemplateError::OracleMismatch);
        }
        Ok(ro)
    }
}

/// Rows sorted by shift descending, then polynomial index.
pub fn sort_rows(rows: &mut [Row], ord: &MonomialOrdering) {
    rows.sort_by(|a, b| ord.cmp(&b.shift, &a.shift).then(a.poly.cmp(&b.poly)));
}

/// `V = action·vect(B) − T·vect(B)`.
pub fn build_v<S: Scalar>(basis: &QuotientBasis<S>, ord: &MonomialOrdering) -> Vec<Poly<S>> {
    basis.v_polys(ord)
}

/// A matrix `H0` with `H0·vect(F) = V`, from division by the Gröbner basis
/// and its cofactors.
pub fn build_h0<S: Scalar>(v: &[Poly<S>], g: &GroebnerResult<S>) -> Result<Vec<PolyRow<S>>, TemplateError> {
    v.iter()
        .enumerate()
        .map(|(i, vi)| g.express_in_inputs(vi).ok_or(TemplateError::NotInIdeal(i)))
        .collect()
}

/// Rows `(j, m)` for every monomial `m` in the support of `H[i][j]`.
pub fn rows_of_h<S: Scalar>(h: &[PolyRow<S>]) -> Vec<Row> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in h {
        for (j, p) in row.iter().enumerate() {
            for m in p.monomials() {
                if seen.insert((j, m.clone())) {
                    out.push(Row { poly: j, shift: m.clone() });
                }
            }
        }
    }
    out
}
