use std::collections::HashMap;

use elimgen::basisgen::Action;
use elimgen::plan::SolverPlan;
use elimgen::poly::{MonomialOrdering, Poly};
use elimgen::problems::{fixture, ProblemSpec};
use elimgen::solverun::{filter_roots, residual_error, solve, Filter, Predicate, SolveOptions};
use elimgen::templategen::{generate, GenerateOptions};
use num_complex::Complex64;

fn plan_for(problem: &ProblemSpec, action: Action, opts: &GenerateOptions) -> SolverPlan {
    let ord = MonomialOrdering::grevlex(problem.nvars());
    let (best, _) = generate(problem, &ord, &[action], opts).unwrap();
    let polys = problem.random_instance_fp(opts.seed, &ord).unwrap();
    SolverPlan::new(&problem.name, &problem.vars, &ord, best.template).with_permissible(&polys)
}

fn instance(problem: &ProblemSpec, slots: &[(&str, f64)]) -> Vec<Poly<f64>> {
    let ord = MonomialOrdering::grevlex(problem.nvars());
    let map: HashMap<String, f64> = slots.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    problem.instantiate(&map, &ord).unwrap()
}

/// Every expected point is matched by some computed root.
fn assert_roots(got: &[Vec<Complex64>], want: &[Vec<Complex64>], tol: f64) {
    assert_eq!(got.len(), want.len(), "got {got:?}");
    for w in want {
        let hit = got.iter().any(|g| g.iter().zip(w).all(|(a, b)| (a - b).norm() < tol));
        assert!(hit, "missing root {w:?} in {got:?}");
    }
}

fn re(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[test]
fn two_conics_roots_including_a_derogatory_eigenvalue() {
    let p = fixture("two_conics").unwrap();
    let plan = plan_for(&p, Action::var(2, 0), &GenerateOptions::default());
    let polys = instance(&p, &[]);
    let sol = solve(&plan, &polys, &SolveOptions::default()).unwrap();
    let want = [re(&[0.0, 1.0]), re(&[0.0, -1.0]), re(&[1.0, 0.0]), re(&[-1.0, 0.0])];
    assert_roots(&sol.points(), &want, 1e-9);
    // x = 0 at two roots, and T_x is diagonalizable there.
    let zero: Vec<_> = sol.roots.iter().filter(|r| r.eigenvalue.norm() < 1e-9).collect();
    assert_eq!(zero.len(), 2);
    assert!(zero.iter().all(|r| !r.is_defective()));
    assert!(residual_error(&polys, &sol.points()) < 1e-12);
}

#[test]
fn cubic_line_action_matrix_in_a_chosen_basis() {
    let p = fixture("cubic_line").unwrap();
    let b = |s: &str| elimgen::poly::Monomial::from_exponent_string(s).unwrap();
    let opts = GenerateOptions { basis: Some(vec![b("2,0"), b("0,1"), b("0,0")]), ..Default::default() };
    let plan = plan_for(&p, Action::var(2, 0), &opts);
    let polys = instance(&p, &[("c1", 1.0), ("c2", -1.0), ("c3", -1.0), ("c4", -1.0)]);
    let sol = solve(&plan, &polys, &SolveOptions::default()).unwrap();
    // x·vect(B) = T·vect(B) over the roots (1,0), (0,-1), (-2,-3).
    let want = [[-1.0, 2.0, 2.0], [1.0, -1.0, -1.0], [0.0, 1.0, 1.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((sol.action.t[(i, j)] - want[i][j]).abs() < 1e-12, "{:?}", sol.action.t);
        }
    }
    assert_roots(&sol.points(), &[re(&[1.0, 0.0]), re(&[0.0, -1.0]), re(&[-2.0, -3.0])], 1e-10);
}

#[test]
fn cubic_line_complex_pair() {
    let p = fixture("cubic_line").unwrap();
    let plan = plan_for(&p, Action::var(2, 0), &GenerateOptions::default());
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    let polys = instance(&p, &[("c1", -s2), ("c2", -3.0), ("c3", -s3), ("c4", 4.0)]);
    let sol = solve(&plan, &polys, &SolveOptions::default()).unwrap();
    assert_eq!(sol.roots.len(), 3);
    // Oracle: eliminate x = √3·y − 4 and solve the cubic in y by Newton from
    // the real root, then deflate.
    let f = |y: f64| (s3 * y - 4.0).powi(3) - s2 * y * y - 3.0;
    let df = |y: f64| 3.0 * s3 * (s3 * y - 4.0).powi(2) - 2.0 * s2 * y;
    let mut y = 4.0;
    for _ in 0..50 {
        y -= f(y) / df(y);
    }
    let real = re(&[s3 * y - 4.0, y]);
    assert_roots(&filter_roots(&sol.roots, &Filter { predicates: vec![Predicate::Real], ..Default::default() })
        .iter()
        .map(|r| r.values.clone())
        .collect::<Vec<_>>(), &[real.clone()], 1e-9);
    assert!((real[0].re - 2.955).abs() < 1e-3 && (real[1].re - 4.015).abs() < 1e-3);
    let cx: Vec<_> = sol.roots.iter().filter(|r| r.max_imag() > 1e-3).collect();
    assert_eq!(cx.len(), 2);
    for r in cx {
        assert!((r.values[0].re + 1.242).abs() < 1e-3 && (r.values[0].im.abs() - 1.423).abs() < 1e-3);
        assert!((r.values[1].re - 1.592).abs() < 1e-3 && (r.values[1].im.abs() - 0.822).abs() < 1e-3);
    }
    assert!(residual_error(&polys, &sol.points()) < 1e-10);
}

#[test]
fn nonradical_double_root_is_defective() {
    let p = fixture("nonradical").unwrap();
    let plan = plan_for(&p, Action::var(2, 1), &GenerateOptions::default());
    let polys = instance(&p, &[]);
    let sol = solve(&plan, &polys, &SolveOptions::default()).unwrap();
    let origin: Vec<_> = sol.roots.iter().filter(|r| r.eigenvalue.norm() < 1e-4).collect();
    assert_eq!(origin.len(), 1);
    assert_eq!(origin[0].algebraic, 2);
    assert_eq!(origin[0].geometric, 1);
    let simple: Vec<Vec<Complex64>> =
        sol.roots.iter().filter(|r| r.algebraic == 1).map(|r| r.values.clone()).collect();
    assert_roots(&simple, &[re(&[1.0, 1.0]), re(&[1.0, -1.0])], 1e-9);
}

#[test]
fn filters_by_sign() {
    let p = fixture("two_conics").unwrap();
    let plan = plan_for(&p, Action::var(2, 0), &GenerateOptions::default());
    let sol = solve(&plan, &instance(&p, &[]), &SolveOptions::default()).unwrap();
    let f = Filter { predicates: vec![Predicate::parse("y > 0.5", &p.vars).unwrap()], ..Default::default() };
    let kept = filter_roots(&sol.roots, &f);
    assert_eq!(kept.len(), 1);
    assert!((kept[0].values[1].re - 1.0).abs() < 1e-9);
    assert!(Predicate::parse("w > 0", &p.vars).is_err());
    assert!(Predicate::parse("x >", &p.vars).is_err());
}
