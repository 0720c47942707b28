//! Solver plans: a frozen template plus what the online phase needs to use
//! it, and a line-oriented text format for them.
//!
//! ```text
//! elimgen-plan 1
//! problem two_conics
//! vars x y
//! ordering grevlex            # or: ordering weighted 2 1
//! priority 0 1
//! action mul 1,0              # or: action recip 0
//! dim 4
//! basis 0,2 1,0 0,1 0,0       # exponent vectors, descending
//! excessive 2,1 0,3
//! reducible 1,2 1,1 2,0
//! basic 0,2 0,1 0,0
//! dropped
//! permissible                 # optional
//! rows 4
//! row 2 0,1                   # poly index (1-based) and shift
//! ...
//! schur                       # optional
//! arow 1 0,0
//! acol 2,0
//! fill 1 3 -1/2               # k j value (1-based)
//! end
//! ```

use std::fmt::Write as _;

use num_rational::BigRational;
use thiserror::Error;

use crate::arith::{parse_rational, Fp};
use crate::basisgen::Action;
use crate::poly::parse::format_rational;
use crate::poly::{ColumnPartition, Monomial, MonomialOrdering, OrderKind, Poly};
use crate::templategen::{Row, SchurProgram, Template};

pub const PLAN_HEADER: &str = "elimgen-plan 1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("plan is inconsistent: {0}")]
    Structure(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> PlanError {
    PlanError::Syntax { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverPlan {
    pub problem: String,
    pub vars: Vec<String>,
    pub ordering: MonomialOrdering,
    pub template: Template,
    /// Permissible monomials for column pivoting, when usable.
    pub permissible: Option<Vec<Monomial>>,
}

impl SolverPlan {
    pub fn new(problem: &str, vars: &[String], ordering: &MonomialOrdering, template: Template) -> Self {
        SolverPlan {
            problem: problem.to_string(),
            vars: vars.to_vec(),
            ordering: ordering.clone(),
            template,
            permissible: None,
        }
    }

    /// Computes the permissible set `{p ∈ X : a·p ∈ X}` and shrinks it until
    /// the eliminated block `[M_E M_R]` has full column rank on `polys`.
    /// Leaves `permissible` empty when pivoting cannot help.
    pub fn with_permissible(mut self, polys: &[Poly<Fp>]) -> Self {
        self.permissible = permissible_set(&self.template, &self.ordering, polys);
        self
    }

    pub fn to_text(&self) -> String {
        let t = &self.template;
        let ex = |ms: &[Monomial]| ms.iter().map(Monomial::to_exponent_string).collect::<Vec<_>>().join(" ");
        let line = |out: &mut String, key: &str, ms: &[Monomial]| {
            if ms.is_empty() {
                writeln!(out, "{key}").unwrap();
            } else {
                writeln!(out, "{key} {}", ex(ms)).unwrap();
            }
        };
        let mut out = String::new();
        writeln!(out, "{PLAN_HEADER}").unwrap();
        writeln!(out, "problem {}", self.problem).unwrap();
        writeln!(out, "vars {}", self.vars.join(" ")).unwrap();
        match self.ordering.kind() {
            OrderKind::Grevlex => writeln!(out, "ordering grevlex").unwrap(),
            OrderKind::Weighted(w) => {
                let w: Vec<String> = w.iter().map(u64::to_string).collect();
                writeln!(out, "ordering weighted {}", w.join(" ")).unwrap();
            }
        }
        let pr: Vec<String> = self.ordering.priority().iter().map(usize::to_string).collect();
        writeln!(out, "priority {}", pr.join(" ")).unwrap();
        match &t.action {
            Action::Mul(a) => writeln!(out, "action mul {}", a.to_exponent_string()).unwrap(),
            Action::Recip(v) => writeln!(out, "action recip {v}").unwrap(),
        }
        writeln!(out, "dim {}", t.dim).unwrap();
        line(&mut out, "basis", &t.basis);
        line(&mut out, "excessive", &t.partition.excessive);
        line(&mut out, "reducible", &t.partition.reducible);
        line(&mut out, "basic", &t.partition.basic);
        line(&mut out, "dropped", &t.dropped);
        if let Some(p) = &self.permissible {
            line(&mut out, "permissible", p);
        }
        writeln!(out, "rows {}", t.rows.len()).unwrap();
        for r in &t.rows {
            writeln!(out, "row {} {}", r.poly + 1, r.shift.to_exponent_string()).unwrap();
        }
        if let Some(s) = &t.schur {
            writeln!(out, "schur").unwrap();
            for r in &s.a_rows {
                writeln!(out, "arow {} {}", r.poly + 1, r.shift.to_exponent_string()).unwrap();
            }
            line(&mut out, "acol", &s.a_cols);
            for (k, j, v) in &s.fill {
                writeln!(out, "fill {} {} {}", k + 1, j + 1, format_rational(v)).unwrap();
            }
        }
        writeln!(out, "end").unwrap();
        out
    }

    pub fn parse(text: &str) -> Result<Self, PlanError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l == PLAN_HEADER => {}
            Some((n, l)) => return Err(syntax(n, format!("expected `{PLAN_HEADER}`, found `{l}`"))),
            None => return Err(syntax(0, "empty plan")),
        }
        let mut problem = String::new();
        let mut vars: Vec<String> = Vec::new();
        let mut kind = None;
        let mut priority: Option<Vec<usize>> = None;
        let mut action = None;
        let mut dim = None;
        let mut lists: std::collections::HashMap<&str, Vec<Monomial>> = Default::default();
        let mut permissible = None;
        let mut rows = Vec::new();
        let mut declared_rows = None;
        let mut schur: Option<SchurProgram> = None;
        let mut ended = false;
        let monos = |n: usize, rest: &str| -> Result<Vec<Monomial>, PlanError> {
            rest.split_whitespace()
                .map(|t| Monomial::from_exponent_string(t).ok_or_else(|| syntax(n, format!("bad monomial `{t}`"))))
                .collect()
        };
        let row = |n: usize, rest: &str| -> Result<Row, PlanError> {
            let (p, m) = rest.split_once(' ').ok_or_else(|| syntax(n, "expected `poly shift`"))?;
            let poly: usize = p.parse().map_err(|_| syntax(n, format!("bad index `{p}`")))?;
            if poly == 0 {
                return Err(syntax(n, "polynomial indices start at 1"));
            }
            let shift = Monomial::from_exponent_string(m.trim()).ok_or_else(|| syntax(n, format!("bad monomial `{m}`")))?;
            Ok(Row { poly: poly - 1, shift })
        };
        for (n, l) in lines.by_ref() {
            let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let rest = rest.trim();
            match head {
                "problem" => problem = rest.to_string(),
                "vars" => vars = rest.split_whitespace().map(String::from).collect(),
                "ordering" => {
                    let mut it = rest.split_whitespace();
                    kind = Some(match it.next() {
                        Some("grevlex") => OrderKind::Grevlex,
                        Some("weighted") => OrderKind::Weighted(
                            it.map(|w| w.parse().map_err(|_| syntax(n, format!("bad weight `{w}`"))))
                                .collect::<Result<_, _>>()?,
                        ),
                        _ => return Err(syntax(n, "expected `grevlex` or `weighted`")),
                    });
                }
                "priority" => {
                    priority = Some(
                        rest.split_whitespace()
                            .map(|w| w.parse().map_err(|_| syntax(n, format!("bad variable index `{w}`"))))
                            .collect::<Result<_, _>>()?,
                    )
                }
                "action" => {
                    let (k, v) = rest.split_once(' ').ok_or_else(|| syntax(n, "expected `mul m` or `recip v`"))?;
                    action = Some(match k {
                        "mul" => Action::Mul(Monomial::from_exponent_string(v).ok_or_else(|| syntax(n, "bad monomial"))?),
                        "recip" => Action::Recip(v.trim().parse().map_err(|_| syntax(n, "bad variable index"))?),
                        _ => return Err(syntax(n, format!("unknown action `{k}`"))),
                    });
                }
                "dim" => dim = Some(rest.parse::<usize>().map_err(|_| syntax(n, "bad dimension"))?),
                "basis" | "excessive" | "reducible" | "basic" | "dropped" => {
                    lists.insert(head, monos(n, rest)?);
                }
                "permissible" => permissible = Some(monos(n, rest)?),
                "rows" => declared_rows = Some(rest.parse::<usize>().map_err(|_| syntax(n, "bad row count"))?),
                "row" => rows.push(row(n, rest)?),
                "schur" => schur = Some(SchurProgram { a_rows: Vec::new(), a_cols: Vec::new(), fill: Vec::new() }),
                "arow" | "acol" | "fill" => {
                    let s = schur.as_mut().ok_or_else(|| syntax(n, format!("`{head}` outside a schur section")))?;
                    match head {
                        "arow" => s.a_rows.push(row(n, rest)?),
                        "acol" => s.a_cols = monos(n, rest)?,
                        _ => {
                            let parts: Vec<&str> = rest.split_whitespace().collect();
                            let [k, j, v] = parts[..] else {
                                return Err(syntax(n, "expected `fill k j value`"));
                            };
                            let k: usize = k.parse().map_err(|_| syntax(n, "bad index"))?;
                            let j: usize = j.parse().map_err(|_| syntax(n, "bad index"))?;
                            let v: BigRational = parse_rational(v).ok_or_else(|| syntax(n, format!("bad value `{v}`")))?;
                            if k == 0 || j == 0 {
                                return Err(syntax(n, "fill indices start at 1"));
                            }
                            s.fill.push((k - 1, j - 1, v));
                        }
                    }
                }
                "end" => {
                    ended = true;
                    break;
                }
                _ => return Err(syntax(n, format!("unknown key `{head}`"))),
            }
        }
        if let Some((n, l)) = lines.next() {
            return Err(syntax(n, format!("text after `end`: `{l}`")));
        }
        if !ended {
            return Err(syntax(0, "missing `end`"));
        }
        let nv = vars.len();
        if nv == 0 {
            return Err(PlanError::Structure("no variables".into()));
        }
        let kind = kind.ok_or_else(|| PlanError::Structure("missing ordering".into()))?;
        let ordering = MonomialOrdering::new(kind, priority.unwrap_or_else(|| (0..nv).collect()))
            .map_err(|e| PlanError::Structure(e.to_string()))?;
        let action = action.ok_or_else(|| PlanError::Structure("missing action".into()))?;
        let mut take = |k: &str| lists.remove(k).unwrap_or_default();
        let basis = take("basis");
        let partition = ColumnPartition {
            excessive: take("excessive"),
            reducible: take("reducible"),
            basic: take("basic"),
        };
        let dropped = take("dropped");
        let template = Template {
            rows,
            partition,
            dropped,
            dim: dim.unwrap_or(basis.len()),
            basis,
            action,
            schur,
        };
        if let Some(d) = declared_rows {
            if d != template.rows.len() {
                return Err(PlanError::Structure(format!("declares {d} rows, lists {}", template.rows.len())));
            }
        }
        let plan = SolverPlan { problem, vars, ordering, template, permissible };
        plan.check_structure()?;
        Ok(plan)
    }

    /// Checks that every monomial has the right arity, the partition is
    /// consistent with the basis and action, and Schur indices are in range.
    pub fn check_structure(&self) -> Result<(), PlanError> {
        let t = &self.template;
        let nv = self.vars.len();
        let bad = |what: &str| Err(PlanError::Structure(what.to_string()));
        let all = t
            .basis
            .iter()
            .chain(t.partition.columns().iter())
            .chain(&t.dropped)
            .chain(t.rows.iter().map(|r| &r.shift))
            .chain(self.permissible.iter().flatten())
            .all(|m| m.nvars() == nv);
        if !all {
            return bad("monomial with the wrong number of variables");
        }
        if t.basis.is_empty() || t.dim == 0 || t.dim > t.basis.len() {
            return bad("basis size and dimension disagree");
        }
        let cols = t.partition.columns();
        let mut seen = std::collections::HashSet::new();
        if !cols.iter().chain(&t.dropped).all(|m| seen.insert(m)) {
            return bad("a monomial appears in two column blocks");
        }
        for b in &t.basis {
            let Some(img) = t.action.apply(b) else {
                return bad("action undefined on a basis monomial");
            };
            if !t.basis.contains(&img) && !t.partition.reducible.contains(&img) {
                return Err(PlanError::Structure(format!("image {img:?} of a basis monomial is not reducible")));
            }
        }
        if t.partition.basic.iter().any(|m| !t.basis.contains(m)) {
            return bad("basic column outside the basis");
        }
        if let Some(s) = &t.schur {
            let n = t.partition.len();
            if s.fill.iter().any(|(k, j, _)| *k >= s.a_cols.len() || *j >= n) {
                return bad("Schur fill index out of range");
            }
        }
        Ok(())
    }
}

fn permissible_set(t: &Template, ord: &MonomialOrdering, polys: &[Poly<Fp>]) -> Option<Vec<Monomial>> {
    if t.dim != t.basis.len() || t.partition.basic.len() != t.basis.len() {
        return None;
    }
    let cols = t.columns();
    let set: std::collections::HashSet<&Monomial> = cols.iter().collect();
    let mut perm: Vec<Monomial> = cols
        .iter()
        .filter(|p| t.action.apply(p).is_some_and(|ap| set.contains(&ap)))
        .cloned()
        .collect();
    ord.sort_desc(&mut perm);
    if perm.len() <= t.basis.len() {
        return None;
    }
    let m = t.instantiate(polys).ok()?;
    loop {
        if perm.len() <= t.basis.len() {
            return None;
        }
        let pset: std::collections::HashSet<&Monomial> = perm.iter().collect();
        let elim: Vec<usize> = (0..cols.len()).filter(|&k| !pset.contains(&cols[k])).collect();
        let rank = m.select_cols(&elim).rank();
        if rank == elim.len() && m.nrows() - rank == perm.len() - t.dim {
            return Some(perm);
        }
        // Drop the smallest permissible monomial outside the basis and retry.
        let k = perm.iter().rposition(|p| !t.basis.contains(p))?;
        perm.remove(k);
    }
}
