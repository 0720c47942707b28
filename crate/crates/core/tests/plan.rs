use elimgen::basisgen::Action;
use elimgen::plan::{PlanError, SolverPlan};
use elimgen::poly::MonomialOrdering;
use elimgen::problems::fixture;
use elimgen::templategen::{generate, GenerateOptions};

fn plan(name: &str, action: Action, opts: &GenerateOptions, ord: MonomialOrdering) -> SolverPlan {
    let p = fixture(name).unwrap();
    let (best, _) = generate(&p, &ord, &[action], opts).unwrap();
    let polys = p.random_instance_fp(opts.seed, &ord).unwrap();
    SolverPlan::new(&p.name, &p.vars, &ord, best.template).with_permissible(&polys)
}

#[test]
fn plans_round_trip() {
    let plans = [
        plan("two_conics", Action::var(2, 0), &GenerateOptions::default(), MonomialOrdering::grevlex(2)),
        plan("cubic_line", Action::Recip(1), &GenerateOptions { bases: 3, ..Default::default() }, MonomialOrdering::grevlex(2)),
        plan("nonradical", Action::var(2, 1), &GenerateOptions::default(), MonomialOrdering::weighted(vec![2, 3]).unwrap()),
        plan("quaternion", Action::var(3, 2), &GenerateOptions { schur: true, ..Default::default() }, MonomialOrdering::grevlex(3)),
        plan("two_conics", Action::var(2, 1), &GenerateOptions { expand: 1, ..Default::default() }, MonomialOrdering::grevlex(2)),
    ];
    assert!(plans[3].template.schur.is_some());
    assert!(plans[4].permissible.is_some());
    for p in &plans {
        let text = p.to_text();
        let back = SolverPlan::parse(&text).unwrap();
        assert_eq!(&back, p);
        assert_eq!(back.to_text(), text);
        back.check_structure().unwrap();
    }
}

#[test]
fn malformed_plans() {
    let good = plan("two_conics", Action::var(2, 0), &GenerateOptions::default(), MonomialOrdering::grevlex(2)).to_text();
    assert!(matches!(SolverPlan::parse("elimgen-plan 2\n"), Err(PlanError::Syntax { line: 1, .. })));
    let no_end = good.replace("end\n", "");
    assert!(SolverPlan::parse(&no_end).is_err());
    let bad_row = good.replacen("row 1 ", "row 0 ", 1);
    assert!(matches!(SolverPlan::parse(&bad_row), Err(PlanError::Syntax { .. })));
    // A basis monomial whose image is neither basic nor reducible.
    let broken = good.replace("reducible 1,2 2,0 1,1", "reducible 1,2 2,0");
    assert!(SolverPlan::parse(&broken).is_err());
}
