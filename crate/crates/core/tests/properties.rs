use elimgen::basisgen::Action;
use elimgen::groebner::buchberger;
use elimgen::plan::SolverPlan;
use elimgen::poly::MonomialOrdering;
use elimgen::problems::fixture;
use elimgen::solverun::{residual_error, solve, SolveOptions};
use elimgen::templategen::{generate, GenerateOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn action_for(nvars: usize, k: usize) -> Action {
    if k < nvars {
        Action::var(nvars, k)
    } else {
        Action::Recip(k - nvars)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// The template path and the normal-form path give the same action
    /// matrix on fresh `Z/p` instances, for any ordering and action.
    #[test]
    fn template_matches_normal_form(
        name in prop::sample::select(vec!["two_conics", "cubic_line", "nonradical", "quaternion"]),
        ord_seed in 0u64..1000,
        act in 0usize..6,
        seed in 1u64..1000,
    ) {
        let p = fixture(name).unwrap();
        let n = p.nvars();
        let ord = if ord_seed % 3 == 0 {
            MonomialOrdering::grevlex(n)
        } else {
            MonomialOrdering::random_weighted(n, 1, 4, &mut ChaCha8Rng::seed_from_u64(ord_seed))
        };
        let action = action_for(n, act % (2 * n));
        let opts = GenerateOptions { seed, bases: 2, ..Default::default() };
        if let Ok((best, _)) = generate(&p, &ord, &[action], &opts) {
            for k in 0..2 {
                let polys = p.random_instance_fp(seed + 1000 * (k + 1), &ord).unwrap();
                let g = buchberger(&polys, &ord).unwrap();
                prop_assert!(best.template.verify_with_oracle(&polys, &g).is_ok());
            }
        }
    }

    /// Residuals vanish at exact roots and grow linearly with a perturbation.
    #[test]
    fn residual_is_first_order(eps in 1e-8f64..1e-4) {
        let p = fixture("two_conics").unwrap();
        let ord = MonomialOrdering::grevlex(2);
        let polys = p.random_instance_real(0, &ord).unwrap();
        let c = |x: f64, y: f64| vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0)];
        let exact = [c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0), c(-1.0, 0.0)];
        prop_assert!(residual_error(&polys, &exact) < 1e-15);
        let mut moved = exact.to_vec();
        moved[0] = c(0.0, 1.0 + eps);
        let r = residual_error(&polys, &moved);
        prop_assert!(r > 0.1 * eps && r < 10.0 * eps, "{r:e} for {eps:e}");
    }
}

#[test]
fn pivoting_agrees_on_well_conditioned_instances() {
    for (name, expand) in [("quaternion", 1), ("two_conics", 1), ("cubic_line", 2)] {
        let p = fixture(name).unwrap();
        let ord = MonomialOrdering::grevlex(p.nvars());
        let opts = GenerateOptions { expand, ..Default::default() };
        let (best, _) = generate(&p, &ord, &[Action::var(p.nvars(), 0)], &opts).unwrap();
        let polys = p.random_instance_fp(1, &ord).unwrap();
        let plan = SolverPlan::new(&p.name, &p.vars, &ord, best.template).with_permissible(&polys);
        assert!(plan.permissible.is_some(), "{name}");
        for seed in 0..20 {
            let inst = p.random_instance_real(500 + seed, &ord).unwrap();
            let a = solve(&plan, &inst, &SolveOptions { pivoting: false }).unwrap();
            let b = solve(&plan, &inst, &SolveOptions { pivoting: true }).unwrap();
            assert!(b.pivoted);
            let mut ea: Vec<Complex64> = a.roots.iter().map(|r| r.eigenvalue).collect();
            let mut eb: Vec<Complex64> = b.roots.iter().map(|r| r.eigenvalue).collect();
            let key = |z: &Complex64| (z.re, z.im);
            ea.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            eb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            assert_eq!(ea.len(), eb.len());
            for (x, y) in ea.iter().zip(&eb) {
                assert!((x - y).norm() <= 1e-8 * (1.0 + x.norm()), "{name} seed {seed}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn pivoting_without_freedom_is_the_plain_path() {
    let p = fixture("cubic_line").unwrap();
    let ord = MonomialOrdering::grevlex(2);
    let (best, _) = generate(&p, &ord, &[Action::var(2, 0)], &GenerateOptions::default()).unwrap();
    let mut plan = SolverPlan::new(&p.name, &p.vars, &ord, best.template.clone());
    plan.permissible = Some(best.template.basis.clone());
    let inst = p.random_instance_real(3, &ord).unwrap();
    let a = solve(&plan, &inst, &SolveOptions { pivoting: false }).unwrap();
    let b = solve(&plan, &inst, &SolveOptions { pivoting: true }).unwrap();
    assert_eq!(a.action.t, b.action.t);
}
