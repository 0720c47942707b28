//! A small straight-line program that computes coefficient slots from raw
//! input data. The same program runs over `Z/p` and over the reals.
//!
//! ```text
//! input  name name ...
//! let    name  = expr
//! let    $slot = expr
//! nullspace N rows cols = a11 a12 ... (row-major names or numbers)
//! ```
//!
//! `nullspace` defines `N_k_j`, the `j`-th entry of the `k`-th null vector
//! (1-based). Over `Z/p` null vectors come from Gauss–Jordan with unit free
//! columns; over the reals they are orthonormal.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;

use crate::arith::{parse_rational, Scalar};
use crate::linalg::Mat;
use crate::poly::parse::format_rational;

use super::ProblemError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    fn prec(self) -> u8 {
        match self {
            Op::Add | Op::Sub => 1,
            Op::Mul | Op::Div => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Add => " + ",
            Op::Sub => " - ",
            Op::Mul => "*",
            Op::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    /// Register index and the name it was written as.
    Ref(usize, String),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.prec(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }

    fn eval<S: Scalar>(&self, regs: &[Option<S>]) -> Result<S, ProblemError> {
        Ok(match self {
            Expr::Num(r) => S::from_rational(r)?,
            Expr::Ref(i, name) => regs[*i].ok_or_else(|| ProblemError::MissingValue(name.clone()))?,
            Expr::Neg(e) => -e.eval(regs)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(regs)?, b.eval(regs)?);
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a.div(b)?,
                }
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{}", format_rational(r)),
            Expr::Ref(_, name) => f.write_str(name),
            Expr::Neg(e) => {
                if e.prec() < 3 {
                    write!(f, "-({e})")
                } else {
                    write!(f, "-{e}")
                }
            }
            Expr::Bin(op, a, b) => {
                let p = op.prec();
                if a.prec() < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(op.symbol())?;
                if b.prec() <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Let { target: usize, name: String, expr: Expr },
    Nullspace { prefix: String, rows: usize, cols: usize, args: Vec<Expr>, first_out: usize },
}

/// Compiled slot program. Registers: inputs, then definitions in order.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotMap {
    pub inputs: Vec<String>,
    pub stmts: Vec<Stmt>,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl SlotMap {
    pub fn new(inputs: Vec<String>) -> Result<Self, String> {
        let mut sm = SlotMap { inputs: Vec::new(), stmts: Vec::new(), names: Vec::new(), index: HashMap::new() };
        for name in inputs {
            sm.define(&name)?;
            sm.inputs.push(name);
        }
        Ok(sm)
    }

    fn define(&mut self, name: &str) -> Result<usize, String> {
        if self.index.contains_key(name) {
            return Err(format!("`{name}` is assigned twice"));
        }
        let k = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), k);
        Ok(k)
    }

    fn lookup(&self, name: &str) -> Result<usize, String> {
        self.index.get(name).copied().ok_or_else(|| format!("`{name}` is used before it is defined"))
    }

    /// Parses and appends one `let` or `nullspace` line.
    pub fn push_line(&mut self, line: &str) -> Result<(), String> {
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "let" => {
                let (lhs, rhs) = rest.split_once('=').ok_or("expected `let name = expr`")?;
                let name = lhs.trim();
                check_name(name)?;
                let expr = ExprParser { src: rhs.as_bytes(), pos: 0, map: self }.parse()?;
                let target = self.define(name)?;
                self.stmts.push(Stmt::Let { target, name: name.to_string(), expr });
                Ok(())
            }
            "nullspace" => {
                let (lhs, rhs) = rest.split_once('=').ok_or("expected `nullspace N rows cols = entries`")?;
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                let [prefix, rows, cols] = parts[..] else {
                    return Err("expected `nullspace N rows cols = entries`".into());
                };
                check_name(prefix)?;
                let rows: usize = rows.parse().map_err(|_| format!("bad row count `{rows}`"))?;
                let cols: usize = cols.parse().map_err(|_| format!("bad column count `{cols}`"))?;
                if rows >= cols {
                    return Err("null space needs more columns than rows".into());
                }
                let args: Vec<Expr> = rhs
                    .split_whitespace()
                    .map(|a| ExprParser { src: a.as_bytes(), pos: 0, map: self }.parse())
                    .collect::<Result<_, _>>()?;
                if args.len() != rows * cols {
                    return Err(format!("nullspace needs {} entries, got {}", rows * cols, args.len()));
                }
                let first_out = self.names.len();
                for k in 1..=cols - rows {
                    for j in 1..=cols {
                        self.define(&format!("{prefix}_{k}_{j}"))?;
                    }
                }
                self.stmts.push(Stmt::Nullspace { prefix: prefix.to_string(), rows, cols, args, first_out });
                Ok(())
            }
            _ => Err(format!("unknown slot map statement `{head}`")),
        }
    }

    /// Names of the slots (`$name`) assigned by the program, without `$`.
    pub fn slots(&self) -> impl Iterator<Item = &str> {
        self.stmts.iter().filter_map(|s| match s {
            Stmt::Let { name, .. } => name.strip_prefix('$'),
            _ => None,
        })
    }

    /// Runs the program; returns every named value (slots keep their `$`).
    pub fn run<S: Scalar>(&self, inputs: &HashMap<String, S>) -> Result<HashMap<String, S>, ProblemError> {
        let mut regs: Vec<Option<S>> = vec![None; self.names.len()];
        for (k, name) in self.inputs.iter().enumerate() {
            regs[k] = Some(*inputs.get(name).ok_or_else(|| ProblemError::MissingValue(name.clone()))?);
        }
        for st in &self.stmts {
            match st {
                Stmt::Let { target, expr, .. } => regs[*target] = Some(expr.eval(&regs)?),
                Stmt::Nullspace { prefix, rows, cols, args, first_out } => {
                    let vals: Vec<S> = args.iter().map(|a| a.eval(&regs)).collect::<Result<_, _>>()?;
                    let m = Mat::from_fn(*rows, *cols, |i, j| vals[i * cols + j]);
                    let null = S::null_basis(&m).ok_or_else(|| {
                        let rank = m.rank().min(*rows);
                        ProblemError::Nullity(prefix.clone(), cols - rank, cols - rows)
                    })?;
                    for (k, v) in null.into_iter().enumerate() {
                        for (j, x) in v.into_iter().enumerate() {
                            regs[first_out + k * cols + j] = Some(x);
                        }
                    }
                }
            }
        }
        Ok(self
            .names
            .iter()
            .zip(regs)
            .filter_map(|(n, v)| v.map(|v| (n.clone(), v)))
            .collect())
    }
}

impl fmt::Display for SlotMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "slotmap")?;
        if !self.inputs.is_empty() {
            writeln!(f, "input {}", self.inputs.join(" "))?;
        }
        for st in &self.stmts {
            match st {
                Stmt::Let { name, expr, .. } => writeln!(f, "let {name} = {expr}")?,
                Stmt::Nullspace { prefix, rows, cols, args, .. } => {
                    let names: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                    writeln!(f, "nullspace {prefix} {rows} {cols} = {}", names.join(" "))?;
                }
            }
        }
        write!(f, "end")
    }
}

fn check_name(name: &str) -> Result<(), String> {
    let body = name.strip_prefix('$').unwrap_or(name);
    let ok = body.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && body.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(format!("bad name `{name}`"))
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    map: &'a SlotMap,
}

impl ExprParser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Expr, String> {
        let e = self.sum()?;
        match self.peek() {
            None => Ok(e),
            Some(c) => Err(format!("unexpected `{}`", c as char)),
        }
    }

    fn sum(&mut self) -> Result<Expr, String> {
        let mut acc = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(acc),
            };
            self.pos += 1;
            acc = Expr::Bin(op, Box::new(acc), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, String> {
        let mut acc = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(acc),
            };
            self.pos += 1;
            acc = Expr::Bin(op, Box::new(acc), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, String> {
        match self.peek() {
            None => Err("unexpected end of expression".into()),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                let mut prev = b' ';
                while let Some(&c) = self.src.get(self.pos) {
                    let exp_sign = (c == b'+' || c == b'-') && (prev == b'e' || prev == b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        prev = c;
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                parse_rational(text).map(Expr::Num).ok_or_else(|| format!("bad number `{text}`"))
            }
            Some(c) if c == b'$' || c == b'_' || c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.pos += 1;
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Expr::Ref(self.map.lookup(name)?, name.to_string()))
            }
            Some(c) => Err(format!("unexpected `{}`", c as char)),
        }
    }
}
