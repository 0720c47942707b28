//! The offline pipeline for one `(basis, action)` candidate and the search
//! over candidates.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::Fp;
use crate::basisgen::{default_pool, nonstandard_basis, sample_bases, standard_basis, Action, QuotientBasis};
use crate::groebner::{buchberger, GroebnerResult};
use crate::poly::{Monomial, MonomialOrdering, Poly};
use crate::problems::{ProblemError, ProblemSpec};

use super::param::ParamTemplate;
use super::{build_h0, build_v, prune_rows_cols, schur_reduce, Template, TemplateError};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("Gröbner basis: {0}")]
    Groebner(#[from] crate::groebner::GroebnerError),
    #[error("quotient ring has dimension {got}, problem declares {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("basis: {0}")]
    Basis(#[from] crate::basisgen::BasisError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("no verified template among {} candidates:\n{}", .0.len(), render(.0))]
    GenerationFailed(Vec<CandidateReport>),
}

fn render(reports: &[CandidateReport]) -> String {
    reports
        .iter()
        .map(|r| format!("  {}: {}", r.label, r.error.as_deref().unwrap_or("ok")))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Clone, Debug)]
pub struct GenerateOptions {
    pub seed: u64,
    pub schur: bool,
    /// Fresh `Z/p` instances the final template must pass.
    pub verify_instances: usize,
    /// Random non-standard bases to try besides the standard one.
    pub bases: usize,
    /// Use exactly this basis instead.
    pub basis: Option<Vec<Monomial>>,
    /// Extra shift degree added after pruning to give column pivoting room;
    /// exclusive with `schur`.
    pub expand: u32,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { seed: 1, schur: false, verify_instances: 3, bases: 0, basis: None, expand: 0 }
    }
}

pub type Size = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSizes {
    /// Template of `H0` (all parameters zero).
    pub initial: Size,
    pub rowwise: Option<Size>,
    pub columnwise: Option<Size>,
    /// Smallest of the three above.
    pub greedy: Size,
    pub schur: Option<Size>,
    pub pruned: Size,
    pub expanded: Option<Size>,
}

#[derive(Clone, Debug)]
pub struct CandidateReport {
    pub label: String,
    pub basis: Vec<Monomial>,
    pub action: Action,
    pub sizes: Option<StageSizes>,
    /// Which template won the greedy stage.
    pub chosen: Option<String>,
    pub verified: bool,
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub template: Template,
    /// `(stage name, template)` in pipeline order, starting with `initial`.
    pub stages: Vec<(String, Template)>,
    pub report: CandidateReport,
}

/// Everything shared by the candidates of one problem and ordering: a
/// generic instance over `Z/p` and its traced Gröbner basis.
pub struct Context<'a> {
    pub problem: &'a ProblemSpec,
    pub ordering: MonomialOrdering,
    pub polys: Vec<Poly<Fp>>,
    pub groebner: GroebnerResult<Fp>,
    pub literal: HashMap<usize, Vec<(Monomial, BigRational)>>,
    seed: u64,
}

impl<'a> Context<'a> {
    pub fn new(problem: &'a ProblemSpec, ordering: &MonomialOrdering, seed: u64) -> Result<Self, GenerateError> {
        let polys = problem.random_instance_fp(seed, ordering)?;
        let groebner = buchberger(&polys, ordering)?;
        if let Some(d) = problem.expected_dim {
            if d != groebner.dim() {
                return Err(GenerateError::DimensionMismatch { got: groebner.dim(), expected: d });
            }
        }
        Ok(Context {
            problem,
            ordering: ordering.clone(),
            polys,
            groebner,
            literal: problem.literal_polys(),
            seed,
        })
    }

    /// Checks a template on `count` fresh instances, each against its own
    /// normal-form action matrix.
    pub fn verify_fresh(&self, t: &Template, count: usize) -> Result<(), String> {
        for k in 0..count {
            let seed = self.seed.wrapping_add(7919 * (k as u64 + 1));
            let polys = self.problem.random_instance_fp(seed, &self.ordering).map_err(|e| e.to_string())?;
            let g = buchberger(&polys, &self.ordering).map_err(|e| e.to_string())?;
            if g.dim() != self.groebner.dim() {
                return Err(format!("instance {seed} is not generic (d = {})", g.dim()));
            }
            t.verify_with_oracle(&polys, &g).map_err(|e| format!("instance {seed}: {e}"))?;
        }
        Ok(())
    }

    /// Bases to try: the given one, or the standard basis plus samples.
    pub fn bases(&self, action: &Action, opts: &GenerateOptions) -> Result<Vec<QuotientBasis<Fp>>, GenerateError> {
        if let Some(b) = &opts.basis {
            return Ok(vec![nonstandard_basis(&self.groebner, b, action)?]);
        }
        let mut out = Vec::new();
        match standard_basis(&self.groebner, action) {
            Ok(b) => out.push(b),
            Err(e) if opts.bases == 0 => return Err(e.into()),
            Err(_) => {}
        }
        if opts.bases > 0 {
            let pool = default_pool(&self.groebner);
            for b in sample_bases(&self.groebner, &pool, opts.bases, opts.seed, action) {
                if !out.iter().any(|o| o.monomials == b.monomials) {
                    out.push(b);
                }
            }
        }
        Ok(out)
    }
}

fn label(basis: &QuotientBasis<Fp>, names: &[String]) -> String {
    let b: Vec<String> = basis.monomials.iter().map(|m| m.display(names).to_string()).collect();
    format!("{} on [{}]", basis.action.display(names), b.join(" "))
}

/// Runs the full pipeline for one basis. Failures are recorded in the
/// report rather than returned.
pub fn generate_candidate(ctx: &Context, basis: &QuotientBasis<Fp>, opts: &GenerateOptions) -> Result<Candidate, CandidateReport> {
    let start = Instant::now();
    let mut report = CandidateReport {
        label: label(basis, &ctx.problem.vars),
        basis: basis.monomials.clone(),
        action: basis.action.clone(),
        sizes: None,
        chosen: None,
        verified: false,
        error: None,
        seconds: 0.0,
    };
    match pipeline(ctx, basis, opts, &mut report) {
        Ok((template, stages)) => {
            report.verified = true;
            report.seconds = start.elapsed().as_secs_f64();
            Ok(Candidate { template, stages, report })
        }
        Err(e) => {
            report.error = Some(e);
            report.seconds = start.elapsed().as_secs_f64();
            Err(report)
        }
    }
}

fn pipeline(
    ctx: &Context,
    basis: &QuotientBasis<Fp>,
    opts: &GenerateOptions,
    report: &mut CandidateReport,
) -> Result<(Template, Vec<(String, Template)>), String> {
    let ord = &ctx.ordering;
    let g = &ctx.groebner;
    let polys = &ctx.polys;
    let v = build_v(basis, ord);
    let h0 = build_h0(&v, g).map_err(|e| e.to_string())?;
    let h1 = g.syzygy_generators();
    let pt = ParamTemplate::new(&h0, &h1, ord);
    let make = |rows| Template::from_rows(rows, polys, &basis.monomials, g.dim(), &basis.action, ord);

    let initial = make(pt.rows_at_origin()).map_err(|e| format!("initial template: {e}"))?;
    initial.verify(polys).map_err(|e| format!("initial template: {e}"))?;
    let mut stages = vec![("initial".to_string(), initial.clone())];
    let mut best = ("initial".to_string(), initial.clone());

    let mut keep: HashSet<Monomial> = basis.monomials.iter().cloned().collect();
    keep.extend(initial.partition.reducible.iter().cloned());
    let greedy_size = |res: crate::templategen::GreedyResult, best: &mut (String, Template)| -> Option<Size> {
        let name = res.strategy.to_string();
        match make(res.rows).and_then(|t| t.verify(polys).map(|_| t)) {
            Ok(t) => {
                let size = t.size();
                if t.size_key() < best.1.size_key() {
                    *best = (name, t);
                }
                Some(size)
            }
            Err(e) => {
                log::warn!("{} template rejected: {e}", name);
                None
            }
        }
    };
    let rowwise = greedy_size(pt.rowwise(), &mut best);
    let columnwise = greedy_size(pt.columnwise(polys, &keep, ord), &mut best);
    report.chosen = Some(best.0.clone());
    let greedy = best.1.clone();
    stages.push(("greedy".into(), greedy.clone()));

    let mut current = greedy.clone();
    let mut schur_size = None;
    if opts.schur && !ctx.literal.is_empty() {
        match schur_reduce(&current, &ctx.literal) {
            Ok(t) => match t.verify(polys) {
                Ok(_) => {
                    schur_size = Some(t.size());
                    stages.push(("schur".into(), t.clone()));
                    current = t;
                }
                Err(e) => log::warn!("Schur-reduced template rejected: {e}"),
            },
            Err(e) => log::info!("Schur reduction skipped: {e}"),
        }
    }
    let pruned = prune_rows_cols(&current, polys).map_err(|e| format!("prune: {e}"))?;
    pruned.verify(polys).map_err(|e| format!("pruned template: {e}"))?;
    stages.push(("pruned".into(), pruned.clone()));
    let mut expanded = None;
    let mut last = pruned.clone();
    if opts.expand > 0 {
        if opts.schur {
            return Err("expansion and Schur reduction are exclusive".into());
        }
        let t = pruned.expand(polys, opts.expand, ord).map_err(|e| format!("expand: {e}"))?;
        let t = prune_rows_cols(&t, polys).map_err(|e| format!("prune after expand: {e}"))?;
        t.verify(polys).map_err(|e| format!("expanded template: {e}"))?;
        expanded = Some(t.size());
        stages.push(("expanded".into(), t.clone()));
        last = t;
    }
    report.sizes = Some(StageSizes {
        initial: initial.size(),
        rowwise,
        columnwise,
        greedy: greedy.size(),
        schur: schur_size,
        pruned: pruned.size(),
        expanded,
    });
    ctx.verify_fresh(&last, opts.verify_instances)?;
    Ok((last, stages))
}

/// Tries every basis for every action under one ordering and returns the
/// smallest verified template together with all reports.
pub fn generate(
    problem: &ProblemSpec,
    ordering: &MonomialOrdering,
    actions: &[Action],
    opts: &GenerateOptions,
) -> Result<(Candidate, Vec<CandidateReport>), GenerateError> {
    let ctx = Context::new(problem, ordering, opts.seed)?;
    let mut reports = Vec::new();
    let mut best: Option<Candidate> = None;
    for action in actions {
        let bases = match ctx.bases(action, opts) {
            Ok(b) => b,
            Err(e) => {
                reports.push(CandidateReport {
                    label: action.display(&problem.vars),
                    basis: Vec::new(),
                    action: action.clone(),
                    sizes: None,
                    chosen: None,
                    verified: false,
                    error: Some(e.to_string()),
                    seconds: 0.0,
                });
                continue;
            }
        };
        for b in &bases {
            match generate_candidate(&ctx, b, opts) {
                Ok(c) => {
                    reports.push(c.report.clone());
                    if best.as_ref().map_or(true, |o| c.template.size_key() < o.template.size_key()) {
                        best = Some(c);
                    }
                }
                Err(r) => reports.push(r),
            }
        }
    }
    match best {
        Some(c) => Ok((c, reports)),
        None => Err(GenerateError::GenerationFailed(reports)),
    }
}
