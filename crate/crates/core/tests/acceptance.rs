//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --release --test acceptance`.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use elimgen::basisgen::Action;
use elimgen::groebner::buchberger;
use elimgen::plan::SolverPlan;
use elimgen::poly::{parse_poly, Monomial, MonomialOrdering, Poly};
use elimgen::problems::scene::{SceneInstance, SceneParams};
use elimgen::problems::{builtin_fixtures, fixture, ProblemSpec};
use elimgen::solverun::{residual_error, solve, SolutionSet, SolveOptions};
use elimgen::templategen::{generate, Context, GenerateOptions};
use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EX1_RESIDUAL: f64 = 1e-12;
const REUSE_MATRIX_TOL: f64 = 1e-10;
const REUSE_ROOT_TOL: f64 = 5e-4;
const ORACLE_CANDIDATES: usize = 20;
const FIVE_POINT_SCENES: u64 = 1000;
const FIVE_POINT_MEDIAN: f64 = 1e-10;
const FIVE_POINT_FAILURES: f64 = 0.01;
const E_MATCH_TOL: f64 = 1e-6;
const PIVOT_SCENES: u64 = 100;
const PLANAR_DEPTH: f64 = 1e-5;
const EIGEN_AGREE: f64 = 1e-8;
const WELL_CONDITIONED: f64 = 1e-6;

type Outcome = Result<String, String>;

fn m(s: &str) -> Monomial {
    Monomial::from_exponent_string(s).unwrap()
}

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn plan_for(p: &ProblemSpec, ord: &MonomialOrdering, action: Action, opts: &GenerateOptions) -> Result<(SolverPlan, elimgen::templategen::Candidate), String> {
    let (best, _) = generate(p, ord, &[action], opts).map_err(|e| e.to_string())?;
    let polys = p.random_instance_fp(opts.seed, ord).map_err(|e| e.to_string())?;
    let plan = SolverPlan::new(&p.name, &p.vars, ord, best.template.clone()).with_permissible(&polys);
    Ok((plan, best))
}

fn polys(text: &[&str], ord: &MonomialOrdering) -> Vec<Poly<f64>> {
    let vars = vec!["x".to_string(), "y".to_string()];
    text.iter().map(|t| parse_poly(t, &vars, ord).unwrap()).collect()
}

fn matched(got: &[Vec<Complex64>], want: &[Vec<Complex64>], tol: f64) -> bool {
    got.len() == want.len() && want.iter().all(|w| got.iter().any(|g| g.iter().zip(w).all(|(a, b)| (a - b).norm() < tol)))
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let p = fixture("two_conics").unwrap();
    let ord = MonomialOrdering::grevlex(2);
    let fp = p.random_instance_fp(1, &ord).map_err(|e| e.to_string())?;
    let g = buchberger(&fp, &ord).map_err(|e| e.to_string())?;
    let lead: Vec<Monomial> = g.basis.iter().filter_map(|f| f.leading_monomial().cloned()).collect();
    let gb_ok = g.dim() == 4 && {
        let mut l = lead.clone();
        l.sort();
        let mut w = vec![m("1,1"), m("2,0"), m("0,3")];
        w.sort();
        l == w
    };
    let (plan, best) = plan_for(&p, &ord, Action::var(2, 0), &GenerateOptions::default())?;
    let greedy = &best.stages.iter().find(|(n, _)| n == "greedy").unwrap().1;
    let part = &greedy.partition;
    let part_ok = greedy.size() == (4, 8)
        && part.excessive == vec![m("2,1"), m("0,3")]
        && part.reducible == vec![m("1,2"), m("2,0"), m("1,1")]
        && part.basic == vec![m("0,2"), m("0,1"), m("0,0")];
    let inst = polys(&["x^2 + y^2 - 1", "x^2 + x*y + y^2 - 1"], &ord);
    let sol = solve(&plan, &inst, &SolveOptions::default()).map_err(|e| e.to_string())?;
    // T_x in the basis (y², x, y, 1).
    let want = [[0.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]];
    let t_ok = (0..4).all(|i| (0..4).all(|j| (sol.action.t[(i, j)] - want[i][j]).abs() < 1e-12));
    let roots = [[0.0, -1.0], [0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]];
    let want_roots: Vec<Vec<Complex64>> = roots.iter().map(|r| vec![c(r[0], 0.0), c(r[1], 0.0)]).collect();
    let worst = sol.roots.iter().map(|r| r.residual).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    check(
        gb_ok && part_ok && t_ok && matched(&sol.points(), &want_roots, 1e-9) && worst < EX1_RESIDUAL && secs < 1.0,
        format!(
            "GB ok {gb_ok}, greedy 4x8 partition {part_ok}, final {:?}, T_x {t_ok}, max residual {worst:.1e} (< {EX1_RESIDUAL:e}), {secs:.2}s",
            plan.template.size()
        ),
    )
}

fn criterion_2() -> Outcome {
    let p = fixture("cubic_line").unwrap();
    let ord = MonomialOrdering::grevlex(2);
    let opts = GenerateOptions { basis: Some(vec![m("2,0"), m("0,1"), m("0,0")]), ..Default::default() };
    let (plan, _) = plan_for(&p, &ord, Action::var(2, 0), &opts)?;
    let int_inst = polys(&["x^3 + y^2 - 1", "x - y - 1"], &ord);
    let t2 = solve(&plan, &int_inst, &SolveOptions::default()).map_err(|e| e.to_string())?.action.t;
    let want2 = [[-1.0, 2.0, 2.0], [1.0, -1.0, -1.0], [0.0, 1.0, 1.0]];
    let int_err = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (t2[(i, j)] - want2[i][j]).abs()).fold(0.0, f64::max);

    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let inst = |sign: f64| {
        let slots: HashMap<String, f64> =
            [("c1", sign * s2), ("c2", -3.0), ("c3", -s3), ("c4", 4.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        p.instantiate(&slots, &ord).unwrap()
    };
    // The reference matrix is −T_x of the system with +√2 at y².
    let reference = [
        [s2 / 3.0, 8.0 * s6 / 3.0, -16.0 * s2 / 3.0 - 3.0],
        [-s3 / 3.0, -4.0, 16.0 * s3 / 3.0],
        [0.0, -s3, 4.0],
    ];
    let t3 = solve(&plan, &inst(1.0), &SolveOptions::default()).map_err(|e| e.to_string())?.action.t;
    let irr_err = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (t3[(i, j)] + reference[i][j]).abs()).fold(0.0, f64::max);
    // The reference roots belong to the system with −√2.
    let sol = solve(&plan, &inst(-1.0), &SolveOptions::default()).map_err(|e| e.to_string())?;
    let want = vec![
        vec![c(2.955, 0.0), c(4.015, 0.0)],
        vec![c(-1.242, 1.423), c(1.592, 0.822)],
        vec![c(-1.242, -1.423), c(1.592, -0.822)],
    ];
    let roots_ok = matched(&sol.points(), &want, REUSE_ROOT_TOL * 2f64.sqrt() * 2.0);
    check(
        int_err < REUSE_MATRIX_TOL && irr_err < REUSE_MATRIX_TOL && roots_ok,
        format!(
            "one {:?} plan: integer instance T_x err {int_err:.1e}, irrational instance -T_x err {irr_err:.1e} (< {REUSE_MATRIX_TOL:e}), roots to 3 decimals {roots_ok}",
            plan.template.size()
        ),
    )
}

fn criterion_3() -> Outcome {
    let p = fixture("nonradical").unwrap();
    let ord = MonomialOrdering::grevlex(2);
    let (plan, _) = plan_for(&p, &ord, Action::var(2, 1), &GenerateOptions::default())?;
    let inst = polys(&["x^2 - y^2", "y^2 - x"], &ord);
    let sol = solve(&plan, &inst, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let zero: Vec<_> = sol.roots.iter().filter(|r| r.eigenvalue.norm() < 1e-4).collect();
    let defect_ok = zero.len() == 1 && zero[0].algebraic == 2 && zero[0].geometric == 1;
    let with_mult: Vec<Vec<Complex64>> = sol
        .roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.values.clone()).take(r.algebraic))
        .collect();
    let want: Vec<Vec<Complex64>> = [[0.0, 0.0], [0.0, 0.0], [1.0, -1.0], [1.0, 1.0]]
        .iter()
        .map(|r| vec![c(r[0], 0.0), c(r[1], 0.0)])
        .collect();
    let roots_ok = matched(&with_mult, &want, 1e-6);
    check(
        plan.template.dim == 4 && defect_ok && roots_ok,
        format!("d = {}, eigenvalue 0 algebraic 2 / geometric 1 {defect_ok}, roots (0,0)x2 (1,-1) (1,1) {roots_ok}", plan.template.dim),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for f in builtin_fixtures() {
        let p = f.spec();
        let n = p.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let t0 = Instant::now();
        let (mut tried, mut checked, mut bad) = (0, 0, 0);
        while checked < ORACLE_CANDIDATES && tried < 5 * ORACLE_CANDIDATES {
            tried += 1;
            let ord = if tried == 1 { MonomialOrdering::grevlex(n) } else { MonomialOrdering::random_weighted(n, 1, 4, &mut rng) };
            let k = rng.gen_range(0..2 * n);
            let action = if k < n { Action::var(n, k) } else { Action::Recip(k - n) };
            let opts = GenerateOptions { seed: rng.gen_range(1..1_000_000), bases: 0, verify_instances: 0, ..Default::default() };
            // Rejected candidates (e.g. 1/x on an ideal with a root at x = 0)
            // are replaced by fresh draws.
            let Ok((best, _)) = generate(&p, &ord, &[action], &opts) else { continue };
            checked += 1;
            let fresh = p.random_instance_fp(opts.seed + 17, &ord).map_err(|e| e.to_string())?;
            let g = buchberger(&fresh, &ord).map_err(|e| e.to_string())?;
            if best.template.verify_with_oracle(&fresh, &g).is_err() {
                bad += 1;
            }
        }
        ok &= checked >= ORACLE_CANDIDATES && bad == 0;
        lines.push(format!("{} {checked} exact of {tried} drawn in {:.1}s", p.name, t0.elapsed().as_secs_f64()));
        if bad > 0 {
            lines.push(format!("{bad} MISMATCHES"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(ok && secs < 60.0, format!("{} candidates per fixture: {}; {secs:.1}s", ORACLE_CANDIDATES, lines.join(", ")))
}

fn criterion_5() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for f in builtin_fixtures() {
        let p = f.spec();
        let ord = MonomialOrdering::grevlex(p.nvars());
        let schur = !p.constant.is_empty();
        let opts = GenerateOptions { schur, ..Default::default() };
        let (best, reports) = generate(&p, &ord, &[Action::var(p.nvars(), 0)], &opts).map_err(|e| e.to_string())?;
        let ctx = Context::new(&p, &ord, 4242).map_err(|e| e.to_string())?;
        let mut prev = (usize::MAX, usize::MAX);
        let mut m_tilde = None;
        let mut fixture_ok = true;
        for (stage, t) in &best.stages {
            let (s, n) = t.size();
            fixture_ok &= ctx.verify_fresh(t, 3).is_ok() && s <= prev.0 && n <= prev.1;
            prev = (s, n);
            let ro = t.verify(&ctx.polys).map_err(|e| format!("{}/{stage}: {e}", p.name))?;
            match &m_tilde {
                None => m_tilde = Some(ro.m_tilde_b),
                Some(m0) => fixture_ok &= *m0 == ro.m_tilde_b,
            }
        }
        // Row-wise and column-wise candidates, whichever won, also verify.
        let sizes = reports[0].sizes.clone().unwrap();
        fixture_ok &= sizes.rowwise.is_some() && sizes.columnwise.is_some();
        let (s, n) = best.template.size();
        fixture_ok &= n - s == best.template.partition.basic.len();
        if schur {
            fixture_ok &= sizes.schur.is_some();
        }
        let chain: Vec<String> = best.stages.iter().map(|(n, t)| format!("{n} {}x{}", t.size().0, t.size().1)).collect();
        notes.push(format!("{} [{}]", p.name, chain.join(" > ")));
        ok &= fixture_ok;
    }
    check(ok, notes.join("; "))
}

fn essential_of(regs: &HashMap<String, f64>, root: &[f64]) -> Matrix3<f64> {
    let coef = [root[0], root[1], root[2], 1.0];
    Matrix3::from_fn(|r, c| (0..4).map(|k| coef[k] * regs[&format!("N_{}_{}", k + 1, 3 * r + c + 1)]).sum())
}

fn e_distance(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let (a, b) = (a / a.norm(), b / b.norm());
    (a - b).norm().min((a + b).norm())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn total_residual(sol: &SolutionSet) -> f64 {
    sol.roots.iter().map(|r| r.residual.powi(2)).sum::<f64>().sqrt()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let p = fixture("five_point").unwrap();
    let ord = MonomialOrdering::grevlex(3);
    let (plan, _) = plan_for(&p, &ord, Action::var(3, 0), &GenerateOptions::default())?;
    let sm = p.slotmap.as_ref().unwrap();
    let mut residuals = Vec::new();
    let mut failures = 0;
    for seed in 0..FIVE_POINT_SCENES {
        let scene = SceneInstance::random(&SceneParams::default(), seed);
        let data = scene.data();
        let inst = p.instance_from_data(&data, &ord).map_err(|e| e.to_string())?;
        let regs = sm.run(&data).map_err(|e| e.to_string())?;
        match solve(&plan, &inst, &SolveOptions::default()) {
            Ok(sol) => {
                residuals.push(residual_error(&inst, &sol.points()));
                let found = sol
                    .roots
                    .iter()
                    .filter(|r| r.max_imag() < 1e-6)
                    .any(|r| e_distance(&essential_of(&regs, &r.real_values()), &scene.essential()) < E_MATCH_TOL);
                if !found {
                    failures += 1;
                }
            }
            Err(_) => {
                failures += 1;
                residuals.push(f64::INFINITY);
            }
        }
    }
    let med = median(residuals);
    let rate = failures as f64 / FIVE_POINT_SCENES as f64;
    let secs = start.elapsed().as_secs_f64();
    check(
        med < FIVE_POINT_MEDIAN && rate < FIVE_POINT_FAILURES && secs < 300.0,
        format!(
            "{:?} template, {FIVE_POINT_SCENES} scenes: median residual {med:.2e} (< {FIVE_POINT_MEDIAN:e}), true E missed in {failures} ({:.1}% < {:.0}%), {secs:.1}s",
            plan.template.size(),
            100.0 * rate,
            100.0 * FIVE_POINT_FAILURES
        ),
    )
}

fn sorted_eigs(sol: &SolutionSet) -> Vec<Complex64> {
    let mut e: Vec<Complex64> = sol
        .roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.eigenvalue).take(r.algebraic))
        .collect();
    e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    e
}

fn criterion_7() -> Outcome {
    let p = fixture("five_point").unwrap();
    let ord = MonomialOrdering::grevlex(3);
    let opts = GenerateOptions { expand: 1, ..Default::default() };
    let (plan, _) = plan_for(&p, &ord, Action::var(3, 0), &opts)?;
    let np = plan.permissible.as_ref().map_or(0, Vec::len);
    if np <= plan.template.dim {
        return Err("no pivoting freedom in the expanded template".into());
    }
    let mut plain = Vec::new();
    let mut pivoted = Vec::new();
    for seed in 0..PIVOT_SCENES {
        let scene = SceneInstance::random(&SceneParams::near_planar(PLANAR_DEPTH), seed);
        let inst = p.instance_from_data(&scene.data(), &ord).map_err(|e| e.to_string())?;
        for (piv, out) in [(false, &mut plain), (true, &mut pivoted)] {
            out.push(solve(&plan, &inst, &SolveOptions { pivoting: piv }).map_or(f64::INFINITY, |s| total_residual(&s)));
        }
    }
    let (m0, m1) = (median(plain), median(pivoted));
    // Well-conditioned: the plain path's triangular block has
    // rcond >= WELL_CONDITIONED. Scenes are drawn until enough qualify.
    let mut worst: f64 = 0.0;
    let (mut kept, mut skipped, mut seed) = (0, 0, 10_000u64);
    while kept < PIVOT_SCENES {
        let scene = SceneInstance::random(&SceneParams::default(), seed);
        seed += 1;
        let inst = p.instance_from_data(&scene.data(), &ord).map_err(|e| e.to_string())?;
        let a = solve(&plan, &inst, &SolveOptions { pivoting: false }).map_err(|e| e.to_string())?;
        if a.action.rcond < WELL_CONDITIONED {
            skipped += 1;
            continue;
        }
        kept += 1;
        let b = solve(&plan, &inst, &SolveOptions { pivoting: true }).map_err(|e| e.to_string())?;
        let (ea, eb) = (sorted_eigs(&a), sorted_eigs(&b));
        if ea.len() != eb.len() {
            worst = f64::INFINITY;
            continue;
        }
        // Match each eigenvalue to its nearest partner; sorting alone can
        // interleave conjugate pairs.
        for x in &ea {
            let d = eb.iter().map(|y| (x - y).norm() / (1.0 + x.norm())).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    check(
        m1 <= m0 && worst < EIGEN_AGREE,
        format!(
            "{:?} template with |P| = {np}: near-planar (depth {PLANAR_DEPTH:e}) median residual pivoted {m1:.2e} <= plain {m0:.2e}; {PIVOT_SCENES} well-conditioned scenes (rcond >= {WELL_CONDITIONED:e}, {skipped} skipped) eigenvalue gap {worst:.1e} (< {EIGEN_AGREE:e})",
            plan.template.size()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 two conics end-to-end", criterion_1),
        ("2 template reuse, cubic and line", criterion_2),
        ("3 non-radical ideal", criterion_3),
        ("4 oracle equivalence over Z/p", criterion_4),
        ("5 reduction soundness", criterion_5),
        ("6 five-point scenes", criterion_6),
        ("7 column pivoting", criterion_7),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    println!("SKIP 8 large-benchmark numbers: not reproduced at this scale (34-problem size tables, cross-generator plots, focal/distortion histograms, runtime comparisons)");
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
