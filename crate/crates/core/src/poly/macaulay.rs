use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::arith::Scalar;
use crate::linalg::Mat;

use super::{Monomial, MonomialOrdering, Poly};

/// A shifted input polynomial `shift * f_{poly_index}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Shift<S> {
    pub poly_index: usize,
    pub shift: Monomial,
    pub poly: Poly<S>,
}

/// `A·F = { m·f_j : m ∈ A_j }`, deduplicated on `(j, m)`.
pub fn shift_set<S: Scalar>(polys: &[Poly<S>], shifts: &[Vec<Monomial>]) -> Vec<Shift<S>> {
    assert_eq!(polys.len(), shifts.len(), "one shift set per polynomial");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (j, (f, a)) in polys.iter().zip(shifts).enumerate() {
        for m in a {
            if seen.insert((j, m.clone())) {
                out.push(Shift {
                    poly_index: j,
                    shift: m.clone(),
                    poly: f.mul_term(m, S::one()),
                });
            }
        }
    }
    out
}

/// Column blocks of a template: excessive, reducible, basic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColumnPartition {
    pub excessive: Vec<Monomial>,
    pub reducible: Vec<Monomial>,
    pub basic: Vec<Monomial>,
}

impl ColumnPartition {
    /// Sorts each block descending.
    pub fn normalized(mut self, ord: &MonomialOrdering) -> Self {
        ord.sort_desc(&mut self.excessive);
        ord.sort_desc(&mut self.reducible);
        ord.sort_desc(&mut self.basic);
        self
    }

    pub fn columns(&self) -> Vec<Monomial> {
        self.excessive
            .iter()
            .chain(&self.reducible)
            .chain(&self.basic)
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.excessive.len() + self.reducible.len() + self.basic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MacaulayError {
    #[error("monomial {0:?} of row {1} is not covered by the column partition")]
    Uncovered(Monomial, usize),
    #[error("column partition blocks overlap at {0:?}")]
    Overlap(Monomial),
}

/// Coefficient matrix of a list of shifts over ordered column blocks.
#[derive(Clone, Debug)]
pub struct MacaulayMatrix<S> {
    pub rows: Vec<(Monomial, usize)>,
    pub partition: ColumnPartition,
    pub entries: Mat<S>,
}

impl<S: Scalar> MacaulayMatrix<S> {
    pub fn columns(&self) -> Vec<Monomial> {
        self.partition.columns()
    }

    pub fn block_sizes(&self) -> (usize, usize, usize) {
        (
            self.partition.excessive.len(),
            self.partition.reducible.len(),
            self.partition.basic.len(),
        )
    }

    /// Reconstructs the row polynomials from the matrix.
    pub fn row_polys(&self, ord: &MonomialOrdering) -> Vec<Poly<S>> {
        let cols = self.columns();
        (0..self.entries.nrows())
            .map(|i| {
                Poly::from_terms(
                    cols.iter()
                        .cloned()
                        .zip(self.entries.row(i).iter().copied()),
                    ord,
                )
            })
            .collect()
    }
}

/// Builds the Macaulay matrix with columns ordered `E | R | B̄`.
///
/// `dropped` lists monomials that may appear in shifts but whose columns are
/// deliberately omitted (pruned templates).
pub fn build_macaulay<S: Scalar>(
    shifts: &[Shift<S>],
    partition: &ColumnPartition,
    dropped: &[Monomial],
) -> Result<MacaulayMatrix<S>, MacaulayError> {
    let cols = partition.columns();
    let mut index: HashMap<&Monomial, usize> = HashMap::with_capacity(cols.len());
    for (k, m) in cols.iter().enumerate() {
        if index.insert(m, k).is_some() {
            return Err(MacaulayError::Overlap(m.clone()));
        }
    }
    let dropped: HashSet<&Monomial> = dropped.iter().collect();
    let mut entries = Mat::zeros(shifts.len(), cols.len());
    for (i, sh) in shifts.iter().enumerate() {
        for (m, c) in sh.poly.terms() {
            match index.get(m) {
                Some(&k) => entries[(i, k)] = entries[(i, k)] + *c,
                None if dropped.contains(m) => {}
                None => return Err(MacaulayError::Uncovered(m.clone(), i)),
            }
        }
    }
    Ok(MacaulayMatrix {
        rows: shifts.iter().map(|s| (s.shift.clone(), s.poly_index)).collect(),
        partition: partition.clone(),
        entries,
    })
}

/// Union of all monomials of a shift list.
pub fn support_of<S: Scalar>(shifts: &[Shift<S>]) -> HashSet<Monomial> {
    shifts
        .iter()
        .flat_map(|s| s.poly.monomials().cloned())
        .collect()
}
