//! Problem descriptions: polynomial structure with `$slot` coefficients,
//! an optional slot program over raw data, and built-in fixtures.
//!
//! ```text
//! problem two_conics
//! vars x y
//! dim 4                      # optional expected quotient dimension
//! poly x^2 + y^2 - 1
//! poly $a*x^2 + x*y + $b
//! constant 1                 # 1-based indices of data-independent polys
//! slotmap                    # optional; see `slotmap`
//! input u v
//! let $a = u*v
//! let $b = u - v
//! end
//! ```

mod fixtures;
pub mod scene;
pub mod slotmap;

use std::collections::HashMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{ArithError, Fp, Scalar};
use crate::poly::parse::{parse_slot_poly, EvalError, SlotPoly};
use crate::poly::{Monomial, MonomialOrdering, Poly};

pub use fixtures::{builtin_fixtures, fixture, five_point_problem, Fixture};
pub use slotmap::SlotMap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("slot `${0}` is used by a polynomial but never assigned by the slot map")]
    UndefinedSlot(String),
    #[error("no value for `{0}`")]
    MissingValue(String),
    #[error("null space `{0}` has dimension {1}, expected {2}")]
    Nullity(String, usize, usize),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ProblemError {
    ProblemError::Syntax { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub vars: Vec<String>,
    pub polys: Vec<SlotPoly>,
    /// 0-based indices of polynomials whose coefficients never change.
    pub constant: Vec<usize>,
    pub expected_dim: Option<usize>,
    pub slotmap: Option<SlotMap>,
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let mut name = None;
        let mut vars: Option<Vec<String>> = None;
        let mut polys = Vec::new();
        let mut constant_lines: Vec<(usize, String)> = Vec::new();
        let mut expected_dim = None;
        let mut slotmap: Option<SlotMap> = None;
        let mut in_map: Option<SlotMap> = None;
        let mut map_started = false;
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if let Some(sm) = in_map.as_mut() {
                match head {
                    "end" => slotmap = in_map.take(),
                    "input" if !map_started => {
                        let inputs = rest.split_whitespace().map(String::from).collect();
                        *sm = SlotMap::new(inputs).map_err(|m| syntax(ln, m))?;
                    }
                    _ => sm.push_line(line).map_err(|m| syntax(ln, m))?,
                }
                map_started = true;
                continue;
            }
            match head {
                "problem" => name = Some(rest.to_string()),
                "vars" => {
                    let v: Vec<String> = rest.split_whitespace().map(String::from).collect();
                    if v.is_empty() {
                        return Err(syntax(ln, "no variables"));
                    }
                    vars = Some(v);
                }
                "dim" => expected_dim = Some(rest.parse().map_err(|_| syntax(ln, format!("bad dimension `{rest}`")))?),
                "poly" => {
                    let v = vars.as_ref().ok_or_else(|| syntax(ln, "`poly` before `vars`"))?;
                    polys.push(parse_slot_poly(rest, v).map_err(|e| syntax(ln, e.to_string()))?);
                }
                "constant" => constant_lines.push((ln, rest.to_string())),
                "slotmap" => {
                    if slotmap.is_some() {
                        return Err(syntax(ln, "second slotmap section"));
                    }
                    in_map = Some(SlotMap::new(Vec::new()).unwrap());
                    map_started = false;
                }
                _ => return Err(syntax(ln, format!("unknown directive `{head}`"))),
            }
        }
        if in_map.is_some() {
            return Err(syntax(text.lines().count(), "slotmap without `end`"));
        }
        let vars = vars.ok_or_else(|| syntax(0, "missing `vars`"))?;
        if polys.is_empty() {
            return Err(syntax(0, "no polynomials"));
        }
        let mut constant = Vec::new();
        for (ln, rest) in constant_lines {
            for tok in rest.split_whitespace() {
                let i: usize = tok.parse().map_err(|_| syntax(ln, format!("bad index `{tok}`")))?;
                if i == 0 || i > polys.len() {
                    return Err(syntax(ln, format!("polynomial {i} does not exist")));
                }
                if !polys[i - 1].is_literal() {
                    return Err(syntax(ln, format!("polynomial {i} has slot coefficients")));
                }
                if !constant.contains(&(i - 1)) {
                    constant.push(i - 1);
                }
            }
        }
        constant.sort_unstable();
        let spec = ProblemSpec {
            name: name.unwrap_or_else(|| "problem".into()),
            vars,
            polys,
            constant,
            expected_dim,
            slotmap,
        };
        if let Some(sm) = &spec.slotmap {
            let assigned: Vec<&str> = sm.slots().collect();
            if let Some(s) = spec.slot_names().into_iter().find(|s| !assigned.contains(&s.as_str())) {
                return Err(ProblemError::UndefinedSlot(s));
            }
        }
        Ok(spec)
    }

    /// Canonical text; `parse(to_text())` reproduces the spec.
    pub fn to_text(&self) -> String {
        let ord = MonomialOrdering::grevlex(self.nvars());
        let mut out = String::new();
        writeln!(out, "problem {}", self.name).unwrap();
        writeln!(out, "vars {}", self.vars.join(" ")).unwrap();
        if let Some(d) = self.expected_dim {
            writeln!(out, "dim {d}").unwrap();
        }
        for p in &self.polys {
            writeln!(out, "poly {}", p.to_text(&self.vars, &ord)).unwrap();
        }
        if !self.constant.is_empty() {
            let idx: Vec<String> = self.constant.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(out, "constant {}", idx.join(" ")).unwrap();
        }
        if let Some(sm) = &self.slotmap {
            writeln!(out, "{sm}").unwrap();
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Slots in order of first use.
    pub fn slot_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.polys {
            for s in p.slots() {
                if !out.iter().any(|o| o == s) {
                    out.push(s.to_string());
                }
            }
        }
        out
    }

    /// Names a data file must provide: slot-map inputs, or the slots.
    pub fn data_names(&self) -> Vec<String> {
        match &self.slotmap {
            Some(sm) => sm.inputs.clone(),
            None => self.slot_names(),
        }
    }

    /// Slot values from raw data (keys as in `data_names`).
    pub fn slots_from_data<S: Scalar>(&self, data: &HashMap<String, S>) -> Result<HashMap<String, S>, ProblemError> {
        match &self.slotmap {
            Some(sm) => Ok(sm
                .run(data)?
                .into_iter()
                .filter_map(|(k, v)| k.strip_prefix('$').map(|s| (s.to_string(), v)))
                .collect()),
            None => {
                if let Some(s) = self.slot_names().into_iter().find(|s| !data.contains_key(s)) {
                    return Err(ProblemError::MissingValue(format!("${s}")));
                }
                Ok(data.clone())
            }
        }
    }

    pub fn instantiate<S: Scalar>(&self, slots: &HashMap<String, S>, ord: &MonomialOrdering) -> Result<Vec<Poly<S>>, ProblemError> {
        self.polys
            .iter()
            .map(|p| p.instantiate(slots, ord).map_err(ProblemError::from))
            .collect()
    }

    /// Polynomials from raw data in one step.
    pub fn instance_from_data<S: Scalar>(&self, data: &HashMap<String, S>, ord: &MonomialOrdering) -> Result<Vec<Poly<S>>, ProblemError> {
        self.instantiate(&self.slots_from_data(data)?, ord)
    }

    pub fn random_data_fp(&self, seed: u64) -> HashMap<String, Fp> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.data_names().into_iter().map(|n| (n, Fp::sample_nonzero(&mut rng))).collect()
    }

    /// Uniform in `[-1, 1]`.
    pub fn random_data_real(&self, seed: u64) -> HashMap<String, f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.data_names().into_iter().map(|n| (n, rng.gen_range(-1.0..=1.0))).collect()
    }

    /// A random instance over `Z/p`; literal coefficients are kept.
    pub fn random_instance_fp(&self, seed: u64, ord: &MonomialOrdering) -> Result<Vec<Poly<Fp>>, ProblemError> {
        self.instance_from_data(&self.random_data_fp(seed), ord)
    }

    pub fn random_instance_real(&self, seed: u64, ord: &MonomialOrdering) -> Result<Vec<Poly<f64>>, ProblemError> {
        self.instance_from_data(&self.random_data_real(seed), ord)
    }

    /// Exact coefficients of the constant polynomials, for Schur reduction.
    pub fn literal_polys(&self) -> HashMap<usize, Vec<(Monomial, BigRational)>> {
        self.constant
            .iter()
            .map(|&i| (i, self.polys[i].terms.iter().map(|(m, c)| (m.clone(), c.scale.clone())).collect()))
            .collect()
    }
}

/// Parses `name = value` lines; `#` starts a comment and a leading `$` on
/// names is dropped.
pub fn parse_data(text: &str) -> Result<HashMap<String, f64>, ProblemError> {
    let mut out = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (name, value) = line.split_once('=').ok_or_else(|| syntax(k + 1, "expected `name = value`"))?;
        let name = name.trim().trim_start_matches('$');
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| syntax(k + 1, format!("bad value `{}`", value.trim())))?;
        if out.insert(name.to_string(), value).is_some() {
            return Err(syntax(k + 1, format!("`{name}` given twice")));
        }
    }
    Ok(out)
}
