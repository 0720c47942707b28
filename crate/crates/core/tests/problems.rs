use std::collections::HashMap;

use elimgen::arith::Scalar;
use elimgen::basisgen::Action;
use elimgen::plan::SolverPlan;
use elimgen::poly::MonomialOrdering;
use elimgen::problems::scene::{SceneInstance, SceneParams};
use elimgen::problems::{builtin_fixtures, fixture, parse_data, ProblemError, ProblemSpec};
use elimgen::solverun::{solve, SolveOptions};
use elimgen::templategen::{generate, GenerateOptions};
use elimgen::Fp;
use nalgebra::Matrix3;

const MAPPED: &str = "\
problem mapped
vars x y
poly $a*x^2 + $b*y - 1
poly x - $c*y
slotmap
input u v
let s = u + v
let $a = s*s
let $b = u/v - 2
let $c = -(u - 3*v)/2
end
";

#[test]
fn every_fixture_round_trips() {
    for f in builtin_fixtures() {
        let spec = f.spec();
        let text = spec.to_text();
        let again = ProblemSpec::parse(&text).unwrap();
        assert_eq!(again.to_text(), text, "{}", spec.name);
        assert_eq!(again.slot_names(), spec.slot_names());
        assert_eq!(again.expected_dim, spec.expected_dim);
    }
}

#[test]
fn syntax_errors_carry_line_numbers() {
    let bad = "problem p\nvars x\npoly x^2 +\n";
    assert!(matches!(ProblemSpec::parse(bad), Err(ProblemError::Syntax { line: 3, .. })));
    let unknown = "problem p\nvars x\nfoo bar\n";
    assert!(matches!(ProblemSpec::parse(unknown), Err(ProblemError::Syntax { line: 3, .. })));
    let not_literal = "vars x\npoly $a*x - 1\nconstant 1\n";
    assert!(matches!(ProblemSpec::parse(not_literal), Err(ProblemError::Syntax { line: 3, .. })));
}

#[test]
fn slot_without_assignment_is_rejected() {
    let text = MAPPED.replace("let $c = -(u - 3*v)/2\n", "");
    assert_eq!(ProblemSpec::parse(&text), Err(ProblemError::UndefinedSlot("c".into())));
}

#[test]
fn missing_data_is_reported() {
    let spec = ProblemSpec::parse(MAPPED).unwrap();
    let data: HashMap<String, f64> = [("u".to_string(), 1.0)].into();
    let ord = MonomialOrdering::grevlex(2);
    assert_eq!(spec.instance_from_data(&data, &ord), Err(ProblemError::MissingValue("v".into())));
}

#[test]
fn slot_map_agrees_over_both_fields() {
    let spec = ProblemSpec::parse(MAPPED).unwrap();
    let ord = MonomialOrdering::grevlex(2);
    let (u, v) = (5i64, 2i64);
    let real = spec
        .instance_from_data(&[("u".to_string(), u as f64), ("v".to_string(), v as f64)].into(), &ord)
        .unwrap();
    let modp = spec
        .instance_from_data(&[("u".to_string(), Fp::from_i64(u)), ("v".to_string(), Fp::from_i64(v))].into(), &ord)
        .unwrap();
    // a = 49, b = 1/2, c = 1/2.
    let half = Fp::from_i64(2).inv().unwrap();
    let x2 = elimgen::poly::Monomial::new(&[2, 0]);
    let y = elimgen::poly::Monomial::new(&[0, 1]);
    assert_eq!(real[0].coefficient(&x2), 49.0);
    assert_eq!(real[0].coefficient(&y), 0.5);
    assert_eq!(real[1].coefficient(&y), -0.5);
    assert_eq!(modp[0].coefficient(&x2), Fp::from_i64(49));
    assert_eq!(modp[0].coefficient(&y), half);
    assert_eq!(modp[1].coefficient(&y), -half);
}

#[test]
fn data_files() {
    let d = parse_data("# scene\n$c1 = 1.5\nc2=-2e-3\n").unwrap();
    assert_eq!(d["c1"], 1.5);
    assert_eq!(d["c2"], -2e-3);
    assert!(matches!(parse_data("c1 = 1\nc1 = 2\n"), Err(ProblemError::Syntax { line: 2, .. })));
    assert!(matches!(parse_data("c1 1\n"), Err(ProblemError::Syntax { line: 1, .. })));
}

/// `E = x·N1 + y·N2 + z·N3 + N4` from the slot map's null vectors.
fn essential_of(spec: &ProblemSpec, data: &HashMap<String, f64>, root: &[f64]) -> Matrix3<f64> {
    let regs = spec.slotmap.as_ref().unwrap().run(data).unwrap();
    let coef = [root[0], root[1], root[2], 1.0];
    Matrix3::from_fn(|r, c| (0..4).map(|k| coef[k] * regs[&format!("N_{}_{}", k + 1, 3 * r + c + 1)]).sum())
}

fn same_up_to_scale(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let (a, b) = (a / a.norm(), b / b.norm());
    (a - b).norm().min((a + b).norm())
}

#[test]
fn five_point_recovers_the_true_essential_matrix() {
    let spec = fixture("five_point").unwrap();
    let ord = MonomialOrdering::grevlex(3);
    let (best, _) = generate(&spec, &ord, &[Action::var(3, 0)], &GenerateOptions::default()).unwrap();
    assert_eq!(best.template.size(), (10, 20));
    let plan = SolverPlan::new(&spec.name, &spec.vars, &ord, best.template);
    for seed in 0..5 {
        let scene = SceneInstance::random(&SceneParams::default(), seed);
        let data = scene.data();
        let polys = spec.instance_from_data(&data, &ord).unwrap();
        let sol = solve(&plan, &polys, &SolveOptions::default()).unwrap();
        assert_eq!(sol.roots.len(), 10);
        let best = sol
            .roots
            .iter()
            .filter(|r| r.max_imag() < 1e-6)
            .map(|r| same_up_to_scale(&essential_of(&spec, &data, &r.real_values()), &scene.essential()))
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-8, "seed {seed}: {best:e}");
    }
}
