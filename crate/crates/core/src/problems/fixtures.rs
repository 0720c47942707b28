//! Built-in problems. The five-point file is produced by
//! [`five_point_problem`]; the shipped copy must match it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::poly::{Monomial, MonomialOrdering};

use super::ProblemSpec;

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

impl Fixture {
    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec::parse(self.text).expect("built-in fixture parses")
    }
}

const FIXTURES: &[Fixture] = &[
    Fixture { name: "two_conics", text: include_str!("../../fixtures/two_conics.problem") },
    Fixture { name: "cubic_line", text: include_str!("../../fixtures/cubic_line.problem") },
    Fixture { name: "nonradical", text: include_str!("../../fixtures/nonradical.problem") },
    Fixture { name: "quaternion", text: include_str!("../../fixtures/quaternion.problem") },
    Fixture { name: "five_point", text: include_str!("../../fixtures/five_point.problem") },
];

pub fn builtin_fixtures() -> &'static [Fixture] {
    FIXTURES
}

pub fn fixture(name: &str) -> Option<ProblemSpec> {
    FIXTURES.iter().find(|f| f.name == name).map(Fixture::spec)
}

/// Polynomial in `x, y, z` whose coefficients are program names.
type Sym = BTreeMap<Vec<u32>, String>;

struct Emitter {
    out: String,
    next: usize,
}

impl Emitter {
    /// Emits `Σ c·a·b` one monomial at a time; returns the new coefficients.
    fn sum_of_products(&mut self, terms: &[(i64, &Sym, &Sym)], names: Option<&dyn Fn(&[u32]) -> String>) -> Sym {
        let mut acc: BTreeMap<Vec<u32>, Vec<String>> = BTreeMap::new();
        for &(c, a, b) in terms {
            for (ma, na) in a {
                for (mb, nb) in b {
                    let m: Vec<u32> = ma.iter().zip(mb).map(|(p, q)| p + q).collect();
                    let prod = if nb == "1" { na.clone() } else { format!("{na}*{nb}") };
                    let term = match c {
                        1 => format!(" + {prod}"),
                        -1 => format!(" - {prod}"),
                        c if c < 0 => format!(" - {}*{prod}", -c),
                        c => format!(" + {c}*{prod}"),
                    };
                    acc.entry(m).or_default().push(term);
                }
            }
        }
        let mut res = Sym::new();
        for (m, parts) in acc {
            let name = match names {
                Some(f) => f(&m),
                None => {
                    self.next += 1;
                    format!("t{}", self.next)
                }
            };
            let body = parts.concat();
            let body = body.strip_prefix(" + ").map(String::from).unwrap_or_else(|| format!("-{}", &body[3..]));
            writeln!(self.out, "let {name} = {body}").unwrap();
            res.insert(m, name);
        }
        res
    }
}

/// Five-point relative pose: `E = x·N1 + y·N2 + z·N3 + N4` from the null
/// space of the 5×9 epipolar matrix, constrained by `det E = 0` and
/// `2·E·Eᵀ·E − tr(E·Eᵀ)·E = 0`. Ten cubics with 200 coefficient slots.
pub fn five_point_problem() -> String {
    let vars = ["x", "y", "z"];
    let mut text = String::new();
    writeln!(text, "# Five-point relative pose; generated, do not edit by hand.").unwrap();
    writeln!(text, "problem five_point").unwrap();
    writeln!(text, "vars {}", vars.join(" ")).unwrap();
    writeln!(text, "dim 10").unwrap();

    let ord = MonomialOrdering::grevlex(3);
    let mut cubic = Monomial::all_up_to_degree(3, 3);
    ord.sort_desc(&mut cubic);
    let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    for i in 1..=10 {
        let terms: Vec<String> = cubic
            .iter()
            .enumerate()
            .map(|(k, m)| {
                if m.is_one() {
                    format!("$c{i}_{}", k + 1)
                } else {
                    format!("$c{i}_{}*{}", k + 1, m.display(&names))
                }
            })
            .collect();
        writeln!(text, "poly {}", terms.join(" + ")).unwrap();
    }

    let mut em = Emitter { out: String::new(), next: 0 };
    writeln!(em.out, "slotmap").unwrap();
    let inputs: Vec<String> = (1..=5)
        .flat_map(|k| [format!("x1_{k}"), format!("y1_{k}"), format!("x2_{k}"), format!("y2_{k}")])
        .collect();
    writeln!(em.out, "input {}", inputs.join(" ")).unwrap();
    // Rows of q2ᵀ E q1 = 0 with E row-major.
    for k in 1..=5 {
        let q1 = [format!("x1_{k}"), format!("y1_{k}"), "1".to_string()];
        let q2 = [format!("x2_{k}"), format!("y2_{k}"), "1".to_string()];
        for a in 0..3 {
            for b in 0..3 {
                let v = match (q2[a].as_str(), q1[b].as_str()) {
                    ("1", "1") => "1".to_string(),
                    ("1", s) | (s, "1") => s.to_string(),
                    (s, t) => format!("{s}*{t}"),
                };
                writeln!(em.out, "let a{k}_{} = {v}", 3 * a + b + 1).unwrap();
            }
        }
    }
    let entries: Vec<String> = (1..=5).flat_map(|k| (1..=9).map(move |j| format!("a{k}_{j}"))).collect();
    writeln!(em.out, "nullspace N 5 9 = {}", entries.join(" ")).unwrap();

    let unit = |v: usize| {
        let mut e = vec![0u32; 3];
        if v < 3 {
            e[v] = 1;
        }
        e
    };
    let e: Vec<Sym> = (1..=9)
        .map(|j| (0..4).map(|v| (unit(v), format!("N_{}_{j}", v + 1))).collect())
        .collect();
    let at = |r: usize, c: usize| &e[3 * r + c];
    let mut q: Vec<Vec<Sym>> = vec![vec![Sym::new(); 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let terms: Vec<(i64, &Sym, &Sym)> = (0..3).map(|k| (1, at(a, k), at(b, k))).collect();
            q[a][b] = em.sum_of_products(&terms, None);
            q[b][a] = q[a][b].clone();
        }
    }
    let one: Sym = [(vec![0, 0, 0], "1".to_string())].into();
    let trace = em.sum_of_products(&[(1, &q[0][0], &one), (1, &q[1][1], &one), (1, &q[2][2], &one)], None);
    let index = |m: &[u32]| cubic.iter().position(|c| c.exponents() == m).unwrap() + 1;
    // Equation 1: the determinant, by cofactors of the first row.
    let c0 = em.sum_of_products(&[(1, at(1, 1), at(2, 2)), (-1, at(1, 2), at(2, 1))], None);
    let c1 = em.sum_of_products(&[(1, at(1, 0), at(2, 2)), (-1, at(1, 2), at(2, 0))], None);
    let c2 = em.sum_of_products(&[(1, at(1, 0), at(2, 1)), (-1, at(1, 1), at(2, 0))], None);
    let name1 = |m: &[u32]| format!("$c1_{}", index(m));
    let det = em.sum_of_products(&[(1, at(0, 0), &c0), (-1, at(0, 1), &c1), (1, at(0, 2), &c2)], Some(&name1));
    let mut eqs = vec![det];
    // Equations 2..10: the trace constraint, row-major.
    for a in 0..3 {
        for b in 0..3 {
            let i = eqs.len() + 1;
            let namer = move |m: &[u32]| format!("$c{i}_{}", index(m));
            let terms = [
                (2, &q[a][0], at(0, b)),
                (2, &q[a][1], at(1, b)),
                (2, &q[a][2], at(2, b)),
                (-1, &trace, at(a, b)),
            ];
            eqs.push(em.sum_of_products(&terms, Some(&namer)));
        }
    }
    // Cubic equations are homogeneous in (x, y, z, 1); every slot exists.
    debug_assert!(eqs.iter().all(|s| s.len() == 20));
    writeln!(em.out, "end").unwrap();
    text.push_str(&em.out);
    text
}
