//! Accuracy metric: `‖M(F)·[U_1/‖U_1‖ … U_d/‖U_d‖]‖_F` with `M(F)` the
//! row-normalized Macaulay matrix of the instance and `U_i` its monomial
//! vector at root `i`.

use num_complex::Complex64;

use crate::poly::{Monomial, Poly};

pub struct ResidualMetric {
    monos: Vec<Monomial>,
    /// Row-normalized coefficients, one row per polynomial.
    rows: Vec<Vec<f64>>,
}

impl ResidualMetric {
    pub fn new(polys: &[Poly<f64>]) -> Self {
        let mut monos: Vec<Monomial> = Vec::new();
        for p in polys {
            for m in p.monomials() {
                if !monos.contains(m) {
                    monos.push(m.clone());
                }
            }
        }
        let rows = polys
            .iter()
            .map(|p| {
                let mut r: Vec<f64> = monos.iter().map(|m| p.coefficient(m)).collect();
                let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 0.0 {
                    r.iter_mut().for_each(|x| *x /= n);
                }
                r
            })
            .collect();
        ResidualMetric { monos, rows }
    }

    /// `‖M(F)·U/‖U‖‖₂` for one root.
    pub fn column(&self, root: &[Complex64]) -> f64 {
        let u: Vec<Complex64> = self
            .monos
            .iter()
            .map(|m| {
                m.exponents()
                    .iter()
                    .zip(root)
                    .fold(Complex64::new(1.0, 0.0), |acc, (&e, &x)| acc * x.powu(e))
            })
            .collect();
        let un = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if un == 0.0 || !un.is_finite() {
            return f64::INFINITY;
        }
        self.rows
            .iter()
            .map(|r| {
                let s: Complex64 = r.iter().zip(&u).map(|(a, z)| z * *a).sum();
                (s / un).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius norm over all roots.
    pub fn total(&self, roots: &[Vec<Complex64>]) -> f64 {
        roots.iter().map(|r| self.column(r).powi(2)).sum::<f64>().sqrt()
    }
}

pub fn residual_error(polys: &[Poly<f64>], roots: &[Vec<Complex64>]) -> f64 {
    ResidualMetric::new(polys).total(roots)
}
