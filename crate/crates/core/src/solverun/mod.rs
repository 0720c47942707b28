//! Online phase: fill a plan with real data, compute the action matrix,
//! and recover, score and filter the roots.

mod action;
mod filter;
mod residual;
mod roots;

use thiserror::Error;

use crate::plan::SolverPlan;
use crate::poly::Poly;
use crate::templategen::TemplateError;

pub use action::{action_from_template, action_with_pivoting, ActionMatrix, RCOND_MIN};
pub use filter::{filter_roots, Cmp, Filter, FilterError, Predicate};
pub use residual::{residual_error, ResidualMetric};
pub use roots::{extract_roots, Root, CLUSTER_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("reducible block is numerically singular (rcond {0:.3e})")]
    IllConditioned(f64),
    #[error("plan has no usable permissible set for column pivoting")]
    PivotingUnavailable,
    #[error("eigenvalue iteration did not converge")]
    Eigen,
    #[error("no monomial pair determines variable {0}")]
    Unreadable(usize),
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub pivoting: bool,
}

#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub roots: Vec<Root>,
    pub action: ActionMatrix,
    /// Whether the pivoting path produced `action`.
    pub pivoted: bool,
}

impl SolutionSet {
    pub fn points(&self) -> Vec<Vec<num_complex::Complex64>> {
        self.roots.iter().map(|r| r.values.clone()).collect()
    }
}

/// Solves one instance. Residuals are filled in per root; redundant bases
/// produce more than `dim` roots, to be cut down by [`filter_roots`].
pub fn solve(plan: &SolverPlan, polys: &[Poly<f64>], opts: &SolveOptions) -> Result<SolutionSet, SolveError> {
    let m = plan.template.instantiate(polys)?;
    let (am, pivoted) = if opts.pivoting && plan.permissible.is_some() {
        (action_with_pivoting(plan, &m)?, true)
    } else {
        (action_from_template(plan, &m)?, false)
    };
    let mut roots = extract_roots(&am, &plan.template.action, &plan.ordering)?;
    let metric = ResidualMetric::new(polys);
    for r in roots.iter_mut() {
        r.residual = metric.column(&r.values);
    }
    Ok(SolutionSet { roots, action: am, pivoted })
}
