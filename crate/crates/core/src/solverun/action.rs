//! Action matrices from an instantiated real template.

use std::collections::HashMap;

use crate::basisgen::Action;
use crate::linalg::real::{col_piv_qr, rcond};
use crate::linalg::Mat;
use crate::plan::SolverPlan;
use crate::poly::Monomial;

use super::SolveError;

/// Below this reciprocal condition number the reducible block is rejected.
pub const RCOND_MIN: f64 = 1e-14;

/// An action matrix in some monomial basis, with the values of further
/// monomials expressed through the basis: `vect(extra) = extra_coeffs·vect(B)`.
#[derive(Clone, Debug)]
pub struct ActionMatrix {
    pub t: Mat<f64>,
    pub basis: Vec<Monomial>,
    pub extra: Vec<Monomial>,
    pub extra_coeffs: Mat<f64>,
    /// Reciprocal condition number of the inverted triangular block(s).
    pub rcond: f64,
}

struct Eliminated {
    /// Rows with pivots in the reducible block: `[U_R | rest]`.
    upper: Mat<f64>,
    /// Leftover rows restricted to the trailing columns.
    lower: Mat<f64>,
}

/// Partial-pivot elimination of the first `ne` columns (dependent ones are
/// skipped) and then of `nr` columns that must all carry pivots.
fn eliminate(m: &Mat<f64>, ne: usize, nr: usize) -> Result<Eliminated, SolveError> {
    let (s, n) = (m.nrows(), m.ncols());
    let mut w = m.clone();
    let tiny = 1e-12 * m.max_abs();
    let mut r = 0;
    let mut r_start = 0;
    for c in 0..ne + nr {
        if c == ne {
            r_start = r;
        }
        let p = (r..s).max_by(|&a, &b| w[(a, c)].abs().total_cmp(&w[(b, c)].abs()));
        let Some(p) = p.filter(|&p| w[(p, c)].abs() > tiny) else {
            if c < ne {
                continue;
            }
            return Err(SolveError::IllConditioned(0.0));
        };
        w.swap_rows(p, r);
        let piv = w[(r, c)];
        for i in r + 1..s {
            let f = w[(i, c)] / piv;
            if f == 0.0 {
                continue;
            }
            for j in c..n {
                w[(i, j)] -= f * w[(r, j)];
            }
        }
        r += 1;
    }
    if nr == 0 {
        r_start = r;
    }
    let tail: Vec<usize> = (ne..n).collect();
    let upper_rows: Vec<usize> = (r_start..r).collect();
    let lower_rows: Vec<usize> = (r..s).collect();
    let trailing: Vec<usize> = (ne + nr..n).collect();
    Ok(Eliminated {
        upper: w.select(&upper_rows, &tail),
        lower: w.select(&lower_rows, &trailing),
    })
}

/// Solves `U·X = B` for upper-triangular `U`.
fn back_substitute(u: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let n = u.nrows();
    let mut x = b.clone();
    for c in (0..n).rev() {
        for j in 0..x.ncols() {
            let mut v = x[(c, j)];
            for k in c + 1..n {
                v -= u[(c, k)] * x[(k, j)];
            }
            x[(c, j)] = v / u[(c, c)];
        }
    }
    x
}

fn checked_rcond(u: &Mat<f64>) -> Result<f64, SolveError> {
    let rc = rcond(u);
    if rc.is_nan() || rc < RCOND_MIN {
        return Err(SolveError::IllConditioned(rc));
    }
    Ok(rc)
}

/// Builds `T` from the values of reducible monomials: `vect(R) = C·vect(B)`.
fn assemble(action: &Action, basis: &[Monomial], reducible: &[Monomial], c: &Mat<f64>) -> Mat<f64> {
    let d = basis.len();
    let bindex: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let rindex: HashMap<&Monomial, usize> = reducible.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut t = Mat::zeros(d, d);
    for (i, b) in basis.iter().enumerate() {
        let img = action.apply(b).expect("plan structure checked");
        if let Some(&j) = bindex.get(&img) {
            t[(i, j)] = 1.0;
        } else {
            let k = rindex[&img];
            for j in 0..d {
                t[(i, j)] = c[(k, j)];
            }
        }
    }
    t
}

/// `T_a = [−M̃'_B; P]` via elimination of the excessive block and a
/// triangular solve with the reducible block. Basis monomials without a
/// column (`B ∖ B̄`) get zero coefficients.
pub fn action_from_template(plan: &SolverPlan, m: &Mat<f64>) -> Result<ActionMatrix, SolveError> {
    let t = &plan.template;
    let p = &t.partition;
    let (ne, nr) = (p.excessive.len(), p.reducible.len());
    let el = eliminate(m, ne, nr)?;
    let u = el.upper.select_cols(&(0..nr).collect::<Vec<_>>());
    let rc = checked_rcond(&u)?;
    let mb = el.upper.select_cols(&(nr..nr + p.basic.len()).collect::<Vec<_>>());
    let x = back_substitute(&u, &mb);
    let bindex: HashMap<&Monomial, usize> = t.basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut c = Mat::zeros(nr, t.basis.len());
    for k in 0..nr {
        for (q, b) in p.basic.iter().enumerate() {
            c[(k, bindex[b])] = -x[(k, q)];
        }
    }
    Ok(ActionMatrix {
        t: assemble(&t.action, &t.basis, &p.reducible, &c),
        basis: t.basis.clone(),
        extra: p.reducible.clone(),
        extra_coeffs: c,
        rcond: rc,
    })
}

/// Column-pivoted variant: the basis is chosen per instance among the
/// permissible monomials by a pivoted QR of the leftover block.
pub fn action_with_pivoting(plan: &SolverPlan, m: &Mat<f64>) -> Result<ActionMatrix, SolveError> {
    let t = &plan.template;
    let perm_set = plan.permissible.as_ref().ok_or(SolveError::PivotingUnavailable)?;
    let d = t.dim;
    if perm_set.len() == t.basis.len() {
        return action_from_template(plan, m);
    }
    let cols = t.columns();
    let in_p: HashMap<&Monomial, usize> = perm_set.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut reducible: Vec<Monomial> = Vec::new();
    for p in perm_set {
        let ap = t.action.apply(p).ok_or(SolveError::PivotingUnavailable)?;
        if !in_p.contains_key(&ap) && !reducible.contains(&ap) {
            reducible.push(ap);
        }
    }
    let rset: HashMap<&Monomial, usize> = reducible.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let col_of: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut order: Vec<usize> = (0..cols.len())
        .filter(|&k| !in_p.contains_key(&cols[k]) && !rset.contains_key(&cols[k]))
        .collect();
    let ne = order.len();
    for r in &reducible {
        order.push(*col_of.get(r).ok_or(SolveError::PivotingUnavailable)?);
    }
    for p in perm_set {
        order.push(col_of[p]);
    }
    let nr = reducible.len();
    let np = perm_set.len();
    let el = eliminate(&m.select_cols(&order), ne, nr)?;
    let rows = el.lower.nrows();
    if rows + d != np || el.upper.nrows() != nr {
        return Err(SolveError::PivotingUnavailable);
    }
    let u_r = el.upper.select_cols(&(0..nr).collect::<Vec<_>>());
    let rc_r = checked_rcond(&u_r)?;
    let qr = col_piv_qr(&el.lower);
    let head: Vec<usize> = (0..rows).collect();
    let tail: Vec<usize> = (rows..np).collect();
    let u_pb = qr.r.select_cols(&head);
    let rc_p = checked_rcond(&u_pb)?;
    let n_b = qr.r.select_cols(&tail);
    let y = back_substitute(&u_pb, &n_b);
    let m_p = el.upper.select_cols(&(nr..nr + np).collect::<Vec<_>>());
    let m_pb = m_p.select_cols(&qr.perm[..rows]);
    let m_b = m_p.select_cols(&qr.perm[rows..]);
    let rhs = {
        let prod = m_pb.mul(&y);
        Mat::from_fn(nr, d, |i, j| m_b[(i, j)] - prod[(i, j)])
    };
    let x_r = back_substitute(&u_r, &rhs);

    // Basis chosen by the pivoting, re-sorted descending.
    let chosen: Vec<Monomial> = qr.perm[rows..].iter().map(|&k| perm_set[k].clone()).collect();
    let mut basis = chosen.clone();
    plan.ordering.sort_desc(&mut basis);
    let to_sorted: Vec<usize> = chosen.iter().map(|b| basis.iter().position(|x| x == b).unwrap()).collect();
    let mut extra: Vec<Monomial> = reducible.clone();
    extra.extend(qr.perm[..rows].iter().map(|&k| perm_set[k].clone()));
    let mut c = Mat::zeros(nr + rows, d);
    for j in 0..d {
        for k in 0..nr {
            c[(k, to_sorted[j])] = -x_r[(k, j)];
        }
        for k in 0..rows {
            c[(nr + k, to_sorted[j])] = -y[(k, j)];
        }
    }
    Ok(ActionMatrix {
        t: assemble(&t.action, &basis, &extra, &c),
        basis,
        extra,
        extra_coeffs: c,
        rcond: rc_r.min(rc_p),
    })
}
