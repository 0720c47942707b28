//! Double-precision kernels for the online phase.
//!
//! Column-pivoted QR and the LU solve are written here; eigenvalues and
//! complex null spaces are delegated to `nalgebra`.

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;

use super::Mat;

pub fn to_nalgebra(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Householder QR with column pivoting: `A·Π = Q·R`.
pub struct ColPivQr {
    /// Upper-trapezoidal factor (rows = min(m, n)).
    pub r: Mat<f64>,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
}

pub fn col_piv_qr(a: &Mat<f64>) -> ColPivQr {
    let (m, n) = (a.nrows(), a.ncols());
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)] * w[(i, j)]).sum())
        .collect();
    let steps = m.min(n);
    for k in 0..steps {
        // Pivot: remaining column of largest norm (recomputed to avoid drift).
        for (j, nj) in norms.iter_mut().enumerate().skip(k) {
            *nj = (k..m).map(|i| w[(i, j)] * w[(i, j)]).sum();
        }
        let p = (k..n)
            .max_by(|&x, &y| norms[x].partial_cmp(&norms[y]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if p != k {
            for i in 0..m {
                let t = w[(i, k)];
                w[(i, k)] = w[(i, p)];
                w[(i, p)] = t;
            }
            norms.swap(k, p);
            perm.swap(k, p);
        }
        let alpha: f64 = (k..m).map(|i| w[(i, k)] * w[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let sign = if w[(k, k)] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = (k..m).map(|i| w[(i, k)]).collect();
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * w[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                w[(i, j)] -= f * v[i - k];
            }
        }
        for i in k + 1..m {
            w[(i, k)] = 0.0;
        }
    }
    let r = Mat::from_fn(steps, n, |i, j| if j < i { 0.0 } else { w[(i, j)] });
    ColPivQr { r, perm }
}

/// Solution of `A·X = B` for square `A` by LU with partial pivoting, plus a
/// reciprocal 2-norm condition estimate of `A`.
pub struct Solve {
    pub x: Mat<f64>,
    pub rcond: f64,
}

pub fn lu_solve(a: &Mat<f64>, b: &Mat<f64>) -> Option<Solve> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.nrows(), n);
    let rcond = rcond(a);
    let mut lu = a.clone();
    let mut x = b.clone();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| {
            lu[(i, c)].abs().partial_cmp(&lu[(j, c)].abs()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if lu[(p, c)] == 0.0 {
            return None;
        }
        lu.swap_rows(p, c);
        x.swap_rows(p, c);
        let piv = lu[(c, c)];
        for i in c + 1..n {
            let f = lu[(i, c)] / piv;
            if f == 0.0 {
                continue;
            }
            for j in c..n {
                lu[(i, j)] -= f * lu[(c, j)];
            }
            for j in 0..x.ncols() {
                x[(i, j)] -= f * x[(c, j)];
            }
        }
    }
    for c in (0..n).rev() {
        let piv = lu[(c, c)];
        for j in 0..x.ncols() {
            let mut v = x[(c, j)];
            for k in c + 1..n {
                v -= lu[(c, k)] * x[(k, j)];
            }
            x[(c, j)] = v / piv;
        }
    }
    Some(Solve { x, rcond })
}

/// `σ_min / σ_max`; 0 for empty or zero matrices.
pub fn rcond(a: &Mat<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 1.0;
    }
    let sv = SVD::new(to_nalgebra(a), false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0.0;
    }
    sv.min() / max
}

/// Eigenvalues of a real square matrix (real Schur form).
pub fn eigenvalues(a: &Mat<f64>) -> Option<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Some(Vec::new());
    }
    let schur = Schur::try_new(to_nalgebra(a), f64::EPSILON, 10_000)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

pub type CMat = DMatrix<Complex64>;

pub fn complexify(a: &Mat<f64>) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| Complex64::new(a[(i, j)], 0.0))
}

/// Right singular vectors of `a` for the `k` smallest singular values, along
/// with all singular values in ascending order.
pub fn smallest_right_singular(a: &CMat, k: usize) -> (CMat, Vec<f64>) {
    let n = a.ncols();
    // Pad to square so the full right singular basis is available.
    let rows = a.nrows().max(n);
    let mut padded = CMat::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| {
        svd.singular_values[x]
            .partial_cmp(&svd.singular_values[y])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sv: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let k = k.min(n);
    let basis = CMat::from_fn(n, k, |i, j| v_t[(idx[j], i)].conj());
    (basis, sv)
}

/// Moore–Penrose pseudo-inverse of a complex matrix.
pub fn pinv(a: &CMat) -> CMat {
    let svd = SVD::new(a.clone(), true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1e-300);
    svd.pseudo_inverse(eps)
        .expect("SVD computed with U and V")
}

/// Eigen-decomposition of a small complex matrix: eigenvalues from the
/// complex Schur form, eigenvectors from null spaces.
pub fn complex_eigenpairs(a: &CMat) -> Vec<(Complex64, nalgebra::DVector<Complex64>)> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let vals: Vec<Complex64> = match Schur::try_new(a.clone(), f64::EPSILON, 10_000) {
        Some(s) => s.eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default(),
        None => Vec::new(),
    };
    vals.into_iter()
        .map(|lam| {
            let shifted = a - CMat::identity(n, n) * lam;
            let (basis, _) = smallest_right_singular(&shifted, 1);
            (lam, basis.column(0).into_owned())
        })
        .collect()
}
