//! Feasibility filtering of roots.

use std::fmt;

use thiserror::Error;

use super::roots::Root;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("bad filter `{0}`: expected `real` or `<var> <op> <number>` with op one of < <= > >=")]
pub struct FilterError(pub String);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    Real,
    Compare { var: usize, op: Cmp, value: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filter {
    pub imag_tol: f64,
    pub predicates: Vec<Predicate>,
    /// Keep at most this many roots, best residual first (redundant bases).
    pub keep_best: Option<usize>,
}

impl Default for Filter {
    fn default() -> Self {
        Filter { imag_tol: 1e-6, predicates: Vec::new(), keep_best: None }
    }
}

impl Predicate {
    /// Parses `real` or e.g. `x > 0`, `y<=1.5`.
    pub fn parse(text: &str, vars: &[String]) -> Result<Self, FilterError> {
        let t = text.trim();
        if t == "real" {
            return Ok(Predicate::Real);
        }
        let err = || FilterError(t.to_string());
        let pos = t.find(['<', '>']).ok_or_else(err)?;
        let (name, rest) = t.split_at(pos);
        let (op, num) = if let Some(r) = rest.strip_prefix("<=") {
            (Cmp::Le, r)
        } else if let Some(r) = rest.strip_prefix(">=") {
            (Cmp::Ge, r)
        } else if let Some(r) = rest.strip_prefix('<') {
            (Cmp::Lt, r)
        } else {
            (Cmp::Gt, &rest[1..])
        };
        let var = vars.iter().position(|v| v == name.trim()).ok_or_else(err)?;
        let value: f64 = num.trim().parse().map_err(|_| err())?;
        Ok(Predicate::Compare { var, op, value })
    }

    fn holds(&self, r: &Root, imag_tol: f64) -> bool {
        match self {
            Predicate::Real => r.max_imag() <= imag_tol,
            Predicate::Compare { var, op, value } => {
                let v = r.values[*var];
                if v.im.abs() / (1.0 + v.re.abs()) > imag_tol {
                    return false;
                }
                match op {
                    Cmp::Lt => v.re < *value,
                    Cmp::Le => v.re <= *value,
                    Cmp::Gt => v.re > *value,
                    Cmp::Ge => v.re >= *value,
                }
            }
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        })
    }
}

/// Drops roots that fail a predicate, then keeps the `keep_best` roots of
/// smallest residual when set.
pub fn filter_roots(roots: &[Root], filter: &Filter) -> Vec<Root> {
    let mut out: Vec<Root> = roots
        .iter()
        .filter(|r| filter.predicates.iter().all(|p| p.holds(r, filter.imag_tol)))
        .cloned()
        .collect();
    if let Some(k) = filter.keep_best {
        if out.len() > k {
            out.sort_by(|a, b| a.residual.total_cmp(&b.residual));
            out.truncate(k);
        }
    }
    out
}
