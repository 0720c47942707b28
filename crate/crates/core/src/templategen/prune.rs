//! Removal of dependent rows and non-pivot excessive columns.

use crate::arith::Fp;
use crate::poly::Poly;

use super::{Template, TemplateError};

/// Keeps a maximal independent row set (first rows win), then drops the
/// excessive columns that carry no pivot. Afterwards `n − s = |B̄|` holds on
/// the instance used.
pub fn prune_rows_cols(t: &Template, polys: &[Poly<Fp>]) -> Result<Template, TemplateError> {
    let m = t.instantiate(polys)?;
    let keep_rows = m.transpose().rref(0.0).pivots;
    let mut out = t.clone();
    out.rows = keep_rows.iter().map(|&i| t.rows[i].clone()).collect();
    let kept = m.select_rows(&keep_rows);
    let pivots = kept.rref(0.0).pivots;
    let ne = t.partition.excessive.len();
    let mut excessive = Vec::new();
    let mut dropped_idx = Vec::new();
    for (c, e) in t.partition.excessive.iter().enumerate() {
        if pivots.contains(&c) {
            excessive.push(e.clone());
        } else {
            dropped_idx.push(c);
            out.dropped.push(e.clone());
        }
    }
    out.partition.excessive = excessive;
    if let Some(prog) = out.schur.as_mut() {
        // Re-index fill targets past the removed columns.
        let n = t.partition.len();
        let mut map = vec![None; n];
        let mut k = 0;
        for (j, slot) in map.iter_mut().enumerate() {
            if j < ne && dropped_idx.contains(&j) {
                continue;
            }
            *slot = Some(k);
            k += 1;
        }
        prog.fill = prog
            .fill
            .iter()
            .filter_map(|(a, j, v)| map[*j].map(|nj| (*a, nj, v.clone())))
            .collect();
    }
    Ok(out)
}
