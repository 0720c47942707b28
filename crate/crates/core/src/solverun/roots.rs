//! Roots from the eigenvectors of an action matrix.
//!
//! The eigenvector for a root `p` is `vect(B)(p)` up to scale. Variable
//! values are read as monomial ratios `(x_l·m)(p) / m(p)` over the basis and
//! the extra monomials the action matrix carries.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::basisgen::Action;
use crate::linalg::real::{complex_eigenpairs, complexify, eigenvalues, pinv, smallest_right_singular, CMat};
use crate::poly::{Monomial, MonomialOrdering};

use super::action::ActionMatrix;
use super::SolveError;

/// Relative distance below which eigenvalues are treated as one.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub values: Vec<Complex64>,
    pub eigenvalue: Complex64,
    /// Size of the eigenvalue cluster this root came from.
    pub algebraic: usize,
    /// Dimension of that cluster's eigenspace.
    pub geometric: usize,
    /// Eigenvector normalized at the minimal basis monomial (or its largest
    /// entry when that one vanishes).
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

impl Root {
    /// The eigenvalue is defective when its eigenspace is too small.
    pub fn is_defective(&self) -> bool {
        self.geometric < self.algebraic
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs() / (1.0 + v.re.abs())).fold(0.0, f64::max)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

/// Groups eigenvalues that agree to `CLUSTER_TOL` (relative).
fn clusters(vals: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut used = vec![false; vals.len()];
    let mut out = Vec::new();
    for i in 0..vals.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![i];
        used[i] = true;
        for j in i + 1..vals.len() {
            if !used[j] && (vals[i] - vals[j]).norm() <= CLUSTER_TOL * (1.0 + vals[i].norm()) {
                used[j] = true;
                members.push(j);
            }
        }
        let mean = members.iter().map(|&k| vals[k]).sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

struct Reader<'a> {
    monos: Vec<Monomial>,
    /// Maps the basis coordinates to all known monomial values.
    expand: CMat,
    index: HashMap<Monomial, usize>,
    nvars: usize,
    action: &'a Action,
}

impl<'a> Reader<'a> {
    fn new(am: &ActionMatrix, action: &'a Action, nvars: usize) -> Self {
        let d = am.basis.len();
        let mut monos = am.basis.clone();
        monos.extend(am.extra.iter().cloned());
        let expand = CMat::from_fn(monos.len(), d, |i, j| {
            if i < d {
                Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
            } else {
                Complex64::new(am.extra_coeffs[(i - d, j)], 0.0)
            }
        });
        let mut index = HashMap::new();
        for (i, m) in monos.iter().enumerate() {
            index.entry(m.clone()).or_insert(i);
        }
        Reader { monos, expand, index, nvars, action }
    }

    /// `(m, x_l·m)` index pairs among the known monomials.
    fn pairs(&self, l: usize) -> Vec<(usize, usize)> {
        let x = Monomial::var(self.nvars, l);
        self.monos
            .iter()
            .enumerate()
            .filter_map(|(i, m)| self.index.get(&m.mul(&x)).map(|&j| (i, j)))
            .collect()
    }

    fn values(&self, v: &DVector<Complex64>, eigenvalue: Complex64) -> Result<Vec<Complex64>, SolveError> {
        let w = &self.expand * v;
        let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut out = Vec::with_capacity(self.nvars);
        for l in 0..self.nvars {
            let direct = match self.action {
                Action::Mul(a) if a == &Monomial::var(self.nvars, l) => Some(eigenvalue),
                Action::Recip(r) if *r == l && eigenvalue.norm() > 0.0 => Some(eigenvalue.inv()),
                _ => None,
            };
            if let Some(val) = direct {
                out.push(val);
                continue;
            }
            let best = self
                .pairs(l)
                .into_iter()
                .max_by(|a, b| w[a.0].norm().total_cmp(&w[b.0].norm()))
                .filter(|&(i, _)| w[i].norm() > 1e-12 * scale);
            match best {
                Some((i, j)) => out.push(w[j] / w[i]),
                None => return Err(SolveError::Unreadable(l)),
            }
        }
        Ok(out)
    }

    /// Splits a `k`-dimensional eigenspace `W` into root vectors using the
    /// multiplication-by-variable operators it admits.
    fn split(&self, w: &CMat, action_var: Option<usize>) -> Option<Vec<DVector<Complex64>>> {
        let k = w.ncols();
        let we = &self.expand * w;
        let mut combo = CMat::zeros(k, k);
        let mut used = 0;
        for l in 0..self.nvars {
            if Some(l) == action_var {
                continue;
            }
            let pairs = self.pairs(l);
            if pairs.len() < k {
                continue;
            }
            let a1 = CMat::from_fn(pairs.len(), k, |i, j| we[(pairs[i].0, j)]);
            let a2 = CMat::from_fn(pairs.len(), k, |i, j| we[(pairs[i].1, j)]);
            if smallest_right_singular(&a1, 1).1[0] < 1e-8 * a1.norm() {
                continue;
            }
            let y = pinv(&a1) * &a2;
            if (&a1 * &y - &a2).norm() > 1e-6 * (1.0 + a2.norm()) {
                continue;
            }
            // Fixed pseudo-random weights keep the output deterministic.
            let weight = 1.0 + 0.618_033_988_75 * (l as f64 + 1.0);
            combo += y * Complex64::new(weight, 0.0);
            used += 1;
        }
        if used == 0 {
            return None;
        }
        let pairs = complex_eigenpairs(&combo);
        let vals: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
        if clusters(&vals).len() < k {
            return None;
        }
        Some(pairs.into_iter().map(|(_, c)| w * c).collect())
    }
}

/// Normalizes at the coordinate of the ordering-minimal monomial, falling
/// back to the largest entry.
fn normalize(v: &DVector<Complex64>, basis: &[Monomial], ord: &MonomialOrdering) -> Vec<Complex64> {
    let min = (0..basis.len()).min_by(|&a, &b| ord.cmp(&basis[a], &basis[b])).unwrap_or(0);
    let largest = (0..v.len()).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap_or(0);
    let k = if v[min].norm() >= 1e-12 * v[largest].norm().max(f64::MIN_POSITIVE) { min } else { largest };
    let s = v[k];
    v.iter().map(|z| z / s).collect()
}

/// All roots encoded by the action matrix. Defective eigenvalues yield one
/// root flagged by `algebraic > geometric`.
pub fn extract_roots(am: &ActionMatrix, action: &Action, ord: &MonomialOrdering) -> Result<Vec<Root>, SolveError> {
    let nvars = ord.nvars();
    let vals = eigenvalues(&am.t).ok_or(SolveError::Eigen)?;
    let tc = complexify(&am.t);
    let n = tc.nrows();
    let tnorm = tc.norm().max(1.0);
    let reader = Reader::new(am, action, nvars);
    let mut out = Vec::new();
    for (lam, alg) in clusters(&vals) {
        let shifted = &tc - CMat::identity(n, n) * lam;
        let (basis, sv) = smallest_right_singular(&shifted, alg);
        let geo = if alg == 1 {
            1
        } else {
            sv.iter().take(alg).filter(|&&s| s <= 1e-6 * tnorm).count().max(1)
        };
        let w = basis.columns(0, geo).into_owned();
        let vectors: Vec<DVector<Complex64>> = if geo == 1 {
            vec![w.column(0).into_owned()]
        } else {
            let action_var = match action {
                Action::Mul(a) if a.degree() == 1 => action.variable(),
                _ => None,
            };
            reader
                .split(&w, action_var)
                .unwrap_or_else(|| vec![w.column(0).into_owned()])
        };
        let count = vectors.len();
        for v in vectors {
            let values = reader.values(&v, lam)?;
            out.push(Root {
                values,
                eigenvalue: lam,
                algebraic: if count > 1 { alg / count } else { alg },
                geometric: if count > 1 { 1 } else { geo },
                vector: normalize(&v, &am.basis, ord),
                residual: f64::NAN,
            });
        }
    }
    Ok(out)
}
