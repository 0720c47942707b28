use std::fmt;

use crate::arith::{ArithError, Scalar};

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Result of a reduced row echelon computation.
#[derive(Clone, Debug)]
pub struct Rref<S> {
    pub matrix: Mat<S>,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -*v).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    /// Reduced row echelon form with partial pivoting. For inexact scalars an
    /// entry is treated as zero when below `rel_tol` times the largest
    /// magnitude of its (original) row; exact fields ignore the tolerance.
    pub fn rref(&self, rel_tol: f64) -> Rref<S> {
        let mut m = self.clone();
        let mut row_scale: Vec<f64> = (0..m.rows)
            .map(|i| m.row(i).iter().map(S::magnitude).fold(0.0, f64::max))
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // Pick the largest relative entry at or below row r.
            let mut best: Option<(usize, f64)> = None;
            for i in r..m.rows {
                let v = m[(i, c)];
                if v.is_zero() {
                    continue;
                }
                let mag = v.magnitude();
                if !S::EXACT && mag <= rel_tol * row_scale[i] {
                    continue;
                }
                let score = if S::EXACT { 1.0 } else { mag / row_scale[i].max(f64::MIN_POSITIVE) };
                if best.map_or(true, |(_, s)| score > s) {
                    best = Some((i, score));
                    if S::EXACT {
                        break;
                    }
                }
            }
            let Some((p, _)) = best else {
                if !S::EXACT {
                    for i in r..m.rows {
                        m[(i, c)] = S::zero();
                    }
                }
                continue;
            };
            m.swap_rows(p, r);
            row_scale.swap(p, r);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)] * inv;
            }
            m[(r, c)] = S::one();
            // Template rows are sparse; only the pivot row's nonzeros matter.
            let nz: Vec<(usize, S)> = (c + 1..m.cols).map(|j| (j, m[(r, j)])).filter(|(_, v)| !v.is_zero()).collect();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for &(j, v) in &nz {
                    m[(i, j)] = m[(i, j)] - f * v;
                }
                m[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref(1e-12).pivots.len()
    }

    /// Exact inverse via Gauss–Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)]
            } else if j - n == i {
                S::one()
            } else {
                S::zero()
            }
        });
        let r = aug.rref(1e-14);
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.matrix.select(&rows, &cols))
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> Result<S, ArithError> {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).max_by(|&a, &b| {
                m[(a, c)]
                    .magnitude()
                    .partial_cmp(&m[(b, c)].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            }) else {
                return Ok(S::zero());
            };
            if m[(p, c)].is_zero() {
                return Ok(S::zero());
            }
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)];
            det = det * piv;
            let inv = piv.inv()?;
            for i in c + 1..n {
                let f = m[(i, c)] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    m[(i, j)] = m[(i, j)] - f * m[(c, j)];
                }
            }
        }
        Ok(det)
    }

    /// Characteristic polynomial coefficients `[c0, …, cn]` of `det(tI − A)`
    /// via the Faddeev–LeVerrier-free Hessenberg recurrence (exact fields).
    pub fn charpoly(&self) -> Vec<S> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        // Reduce to upper Hessenberg form by similarity (Gaussian elimination).
        let mut h = self.clone();
        for c in 0..n.saturating_sub(2) {
            let Some(p) = (c + 1..n).find(|&i| !h[(i, c)].is_zero()) else {
                continue;
            };
            if p != c + 1 {
                h.swap_rows(p, c + 1);
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + c + 1);
                }
            }
            let inv = h[(c + 1, c)].inv().expect("nonzero pivot");
            for i in c + 2..n {
                let f = h[(i, c)] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    h[(i, j)] = h[(i, j)] - f * h[(c + 1, j)];
                }
                for k in 0..n {
                    h[(k, c + 1)] = h[(k, c + 1)] + f * h[(k, i)];
                }
            }
        }
        // p_k(t) = det(tI − H[0..k, 0..k]) by the standard Hessenberg recurrence.
        let mut polys: Vec<Vec<S>> = vec![vec![S::one()]];
        for k in 1..=n {
            let hk = k - 1;
            let prev = &polys[k - 1];
            let mut p = vec![S::zero(); k + 1];
            for (i, &c) in prev.iter().enumerate() {
                p[i + 1] = p[i + 1] + c;
                p[i] = p[i] - h[(hk, hk)] * c;
            }
            let mut prod = S::one();
            for i in (1..k).rev() {
                prod = prod * h[(i, i - 1)];
                let t = prod * h[(i - 1, hk)];
                let q = &polys[i - 1];
                for (j, &c) in q.iter().enumerate() {
                    p[j] = p[j] - t * c;
                }
            }
            polys.push(p);
        }
        polys.pop().unwrap()
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.data[i * self.cols..(i + 1) * self.cols].iter().map(|v| format!("{v:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Fp;

    fn fp(rows: &[&[i64]]) -> Mat<Fp> {
        Mat::from_rows(&rows.iter().map(|r| r.iter().map(|&v| Fp::from_i64(v)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn rref_of_two_conics_template() {
        // Rows y*f2, y*f1, f2, f1 with columns x^2y, y^3, xy^2, xy, x^2, y^2, y, 1.
        let m = fp(&[
            &[1, 1, 1, 0, 0, 0, -1, 0],
            &[1, 1, 0, 0, 0, 0, -1, 0],
            &[0, 0, 0, 1, 1, 1, 0, -1],
            &[0, 0, 0, 0, 1, 1, 0, -1],
        ]);
        let r = m.rref(0.0);
        assert_eq!(r.pivots, vec![0, 2, 3, 4]);
        let expected = fp(&[
            &[1, 1, 0, 0, 0, 0, -1, 0],
            &[0, 0, 1, 0, 0, 0, 0, 0],
            &[0, 0, 0, 1, 0, 0, 0, 0],
            &[0, 0, 0, 0, 1, 1, 0, -1],
        ]);
        assert_eq!(r.matrix, expected);
    }

    #[test]
    fn inverse_and_determinant() {
        let s = fp(&[&[1, 2, 1], &[0, 1, 0], &[1, 0, 0]]);
        let inv = s.inverse().unwrap();
        assert_eq!(s.mul(&inv), Mat::identity(3));
        assert_eq!(s.determinant().unwrap(), Fp::from_i64(-1));
        assert!(fp(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn charpoly_matches_known() {
        // [[1,1,0],[0,1,1],[0,-3,-3]] has eigenvalues {-2, 0, 1}:
        // t^3 + t^2 - 2t.
        let t = fp(&[&[1, 1, 0], &[0, 1, 1], &[0, -3, -3]]);
        let cp = t.charpoly();
        let expect: Vec<Fp> = [0, -2, 1, 1].iter().map(|&v| Fp::from_i64(v)).collect();
        assert_eq!(cp, expect);
    }

    #[test]
    fn charpoly_is_similarity_invariant() {
        let a = fp(&[&[2, 0, 1, 5], &[3, 1, 0, 0], &[0, 7, 2, 1], &[1, 1, 1, 1]]);
        let s = fp(&[&[1, 2, 0, 0], &[0, 1, 3, 0], &[4, 0, 1, 0], &[0, 0, 2, 1]]);
        let b = s.mul(&a).mul(&s.inverse().unwrap());
        assert_eq!(a.charpoly(), b.charpoly());
        // Leading coefficient 1, constant term (-1)^n det.
        let cp = a.charpoly();
        assert_eq!(cp[4], Fp::from_i64(1));
        assert_eq!(cp[0], a.determinant().unwrap());
    }

    #[test]
    fn real_rref_uses_tolerance() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0 + 1e-15]]);
        assert_eq!(m.rref(1e-12).pivots.len(), 1);
    }
}
