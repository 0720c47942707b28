//! Schur complement reduction: rows of constant sparse polynomials are
//! eliminated offline against excessive columns, leaving `D − C·A⁻¹B`.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::Monomial;

use super::{SchurProgram, Template};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchurError {
    #[error("template already carries a Schur program")]
    AlreadyReduced,
    #[error("polynomial {0} is not fully literal")]
    NotConstant(usize),
    #[error("no constant row has a nonzero excessive entry")]
    NotApplicable,
    #[error("a constant row contains {0:?}, which is outside the template columns")]
    Uncovered(Monomial),
}

type QMat = Vec<Vec<BigRational>>;

/// Eliminates the shifts of the constant polynomials in `literal`
/// (`poly index -> coefficient terms`) against excessive columns.
///
/// A maximal set of constant rows independent on the excessive block forms
/// `A`; its pivot columns are removed together with those rows.
pub fn schur_reduce(t: &Template, literal: &HashMap<usize, Vec<(Monomial, BigRational)>>) -> Result<Template, SchurError> {
    if t.schur.is_some() {
        return Err(SchurError::AlreadyReduced);
    }
    let cols = t.columns();
    let ne = t.partition.excessive.len();
    let index: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let const_rows: Vec<usize> = (0..t.rows.len()).filter(|&i| literal.contains_key(&t.rows[i].poly)).collect();
    if const_rows.is_empty() {
        return Err(SchurError::NotApplicable);
    }
    // Rational rows of the constant shifts.
    let mut rows: QMat = Vec::new();
    for &i in &const_rows {
        let r = &t.rows[i];
        let mut v = vec![BigRational::zero(); cols.len()];
        for (m, c) in &literal[&r.poly] {
            let s = m.mul(&r.shift);
            match index.get(&s) {
                Some(&k) => v[k] += c,
                None if t.dropped.contains(&s) => {}
                None => return Err(SchurError::Uncovered(s)),
            }
        }
        rows.push(v);
    }
    // Gauss–Jordan restricted to pivots in the excessive block.
    let mut work = rows.clone();
    let mut a_rows: Vec<usize> = Vec::new();
    let mut a_cols: Vec<usize> = Vec::new();
    let mut used = vec![false; work.len()];
    for c in 0..ne {
        let Some(p) = (0..work.len()).find(|&i| !used[i] && !work[i][c].is_zero()) else {
            continue;
        };
        used[p] = true;
        let inv = BigRational::one() / work[p][c].clone();
        for v in work[p].iter_mut() {
            *v *= &inv;
        }
        let pivot = work[p].clone();
        for (i, row) in work.iter_mut().enumerate() {
            if i == p || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        a_rows.push(p);
        a_cols.push(c);
    }
    if a_rows.is_empty() {
        return Err(SchurError::NotApplicable);
    }
    // After elimination, row p reads [A⁻¹A | A⁻¹B] on (a_cols | rest), i.e.
    // the rows of K in pivot order.
    let rest: Vec<usize> = (0..cols.len()).filter(|c| !a_cols.contains(c)).collect();
    let mut fill = Vec::new();
    for (k, &p) in a_rows.iter().enumerate() {
        for (j, &c) in rest.iter().enumerate() {
            if !work[p][c].is_zero() {
                fill.push((k, j, work[p][c].clone()));
            }
        }
    }
    let removed: Vec<usize> = a_rows.iter().map(|&p| const_rows[p]).collect();
    let a_col_monos: Vec<Monomial> = a_cols.iter().map(|&c| cols[c].clone()).collect();
    let mut out = t.clone();
    out.rows = t
        .rows
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, r)| r.clone())
        .collect();
    out.partition.excessive.retain(|m| !a_col_monos.contains(m));
    out.schur = Some(SchurProgram {
        a_rows: removed.iter().map(|&i| t.rows[i].clone()).collect(),
        a_cols: a_col_monos,
        fill,
    });
    Ok(out)
}
