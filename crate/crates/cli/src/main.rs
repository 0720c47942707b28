use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use elimgen::basisgen::Action;
use elimgen::groebner::buchberger;
use elimgen::plan::SolverPlan;
use elimgen::poly::{Monomial, MonomialOrdering, OrderKind};
use elimgen::problems::{fixture, parse_data, ProblemSpec};
use elimgen::solverun::{filter_roots, solve, Filter, Predicate, SolveOptions};
use elimgen::templategen::{generate, Candidate, CandidateReport, GenerateOptions};

#[derive(Parser)]
#[command(name = "elimgen", version, about = "Elimination-template generator and polynomial solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search orderings, actions and bases for the smallest template.
    Generate {
        #[command(flatten)]
        search: Search,
        /// Write the plan here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance with a plan.
    Solve {
        plan: PathBuf,
        problem: String,
        /// `name = value` lines with the problem's inputs; random data if absent.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        pivoting: bool,
        /// `real`, or `<var> <op> <number>` with op one of < <= > >=; repeatable.
        #[arg(long)]
        filter: Vec<String>,
        /// Relative imaginary-part tolerance for real roots.
        #[arg(long, default_value_t = 1e-6)]
        imag_tol: f64,
    },
    /// Report template sizes for every candidate of a sweep as CSV.
    Bench {
        #[command(flatten)]
        search: Search,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a plan over Z/p against Gröbner bases and solve random real instances.
    Verify {
        plan: PathBuf,
        problem: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        pivoting: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingArg {
    Grevlex,
    Weighted,
}

#[derive(Args)]
struct Search {
    /// Fixture name or problem file.
    problem: String,
    #[arg(long, value_enum, default_value_t = OrderingArg::Grevlex)]
    ordering: OrderingArg,
    /// Comma-separated weights for `--ordering weighted`.
    #[arg(long, value_delimiter = ',')]
    weights: Vec<u64>,
    /// Also try this many random weighted orderings.
    #[arg(long, default_value_t = 0)]
    orderings: usize,
    /// Random non-standard bases per (ordering, action).
    #[arg(long, default_value_t = 0)]
    bases: usize,
    /// Exact basis as exponent vectors, e.g. `2,0 0,1 0,0`.
    #[arg(long, num_args = 1.., value_delimiter = ' ')]
    basis: Vec<String>,
    /// `<var>`, `all`, or `recip:<var>`.
    #[arg(long, default_value = "all")]
    action: String,
    #[arg(long)]
    schur: bool,
    /// Extra shift degree that gives column pivoting room.
    #[arg(long, default_value_t = 0)]
    expand: u32,
    /// Record the permissible set for column pivoting in the plan.
    #[arg(long)]
    pivoting: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    /// Fresh Z/p instances each final template must pass.
    #[arg(long, default_value_t = 3)]
    trials: usize,
}

fn load_problem(arg: &str) -> Result<ProblemSpec> {
    if let Some(p) = fixture(arg) {
        return Ok(p);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("`{arg}` is neither a fixture nor a readable file"))?;
    ProblemSpec::parse(&text).with_context(|| format!("parsing {arg}"))
}

fn load_plan(path: &Path) -> Result<SolverPlan> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SolverPlan::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn ordering_label(o: &MonomialOrdering) -> String {
    match o.kind() {
        OrderKind::Grevlex => "grevlex".into(),
        OrderKind::Weighted(w) => {
            let w: Vec<String> = w.iter().map(u64::to_string).collect();
            format!("weighted:{}", w.join("/"))
        }
    }
}

fn parse_actions(spec: &str, vars: &[String]) -> Result<Vec<Action>> {
    let n = vars.len();
    let var = |name: &str| vars.iter().position(|v| v == name).ok_or_else(|| anyhow!("unknown variable `{name}`"));
    if spec == "all" {
        return Ok((0..n).map(|v| Action::var(n, v)).collect());
    }
    if let Some(v) = spec.strip_prefix("recip:") {
        return Ok(vec![Action::Recip(var(v)?)]);
    }
    Ok(vec![Action::var(n, var(spec)?)])
}

fn orderings(s: &Search, nvars: usize) -> Result<Vec<MonomialOrdering>> {
    let mut out = vec![match s.ordering {
        OrderingArg::Grevlex => MonomialOrdering::grevlex(nvars),
        OrderingArg::Weighted => {
            if s.weights.len() != nvars {
                bail!("--weights needs {nvars} values");
            }
            MonomialOrdering::weighted(s.weights.clone())?
        }
    }];
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut tries = 0;
    while out.len() < 1 + s.orderings && tries < 100 * (s.orderings + 1) {
        tries += 1;
        let o = MonomialOrdering::random_weighted(nvars, 1, 9, &mut rng);
        if !out.contains(&o) {
            out.push(o);
        }
    }
    Ok(out)
}

struct Job {
    ordering: MonomialOrdering,
    action: Action,
}

struct Outcome {
    ordering: MonomialOrdering,
    best: Option<Candidate>,
    reports: Vec<CandidateReport>,
    error: Option<String>,
}

/// Runs every (ordering, action) pair, in parallel, and collects results in
/// job order so output does not depend on scheduling.
fn sweep(problem: &ProblemSpec, s: &Search) -> Result<Vec<Outcome>> {
    let basis = if s.basis.is_empty() {
        None
    } else {
        Some(
            s.basis
                .iter()
                .map(|t| Monomial::from_exponent_string(t).ok_or_else(|| anyhow!("bad monomial `{t}`")))
                .collect::<Result<Vec<_>>>()?,
        )
    };
    let opts = GenerateOptions {
        seed: s.seed,
        schur: s.schur,
        verify_instances: s.trials,
        bases: s.bases,
        basis,
        expand: s.expand,
    };
    let actions = parse_actions(&s.action, &problem.vars)?;
    let jobs: Vec<Job> = orderings(s, problem.nvars())?
        .into_iter()
        .flat_map(|o| actions.iter().map(move |a| Job { ordering: o.clone(), action: a.clone() }))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(s.jobs.unwrap_or(0)).build()?;
    Ok(pool.install(|| {
        jobs.par_iter()
            .map(|j| match generate(problem, &j.ordering, std::slice::from_ref(&j.action), &opts) {
                Ok((c, reports)) => Outcome { ordering: j.ordering.clone(), best: Some(c), reports, error: None },
                Err(e) => Outcome { ordering: j.ordering.clone(), best: None, reports: Vec::new(), error: Some(e.to_string()) },
            })
            .collect()
    }))
}

fn cmd_generate(s: &Search, out: Option<&Path>) -> Result<ExitCode> {
    let problem = load_problem(&s.problem)?;
    let outcomes = sweep(&problem, s)?;
    let mut winner: Option<(&MonomialOrdering, &Candidate)> = None;
    for o in &outcomes {
        if let Some(e) = &o.error {
            log::warn!("{}: {e}", ordering_label(&o.ordering));
        }
        if let Some(c) = &o.best {
            if winner.map_or(true, |(_, w)| c.template.size_key() < w.template.size_key()) {
                winner = Some((&o.ordering, c));
            }
        }
    }
    let Some((ord, best)) = winner else {
        eprintln!("no verified template");
        for o in &outcomes {
            if let Some(e) = &o.error {
                eprintln!("{}: {e}", ordering_label(&o.ordering));
            }
        }
        return Ok(ExitCode::FAILURE);
    };
    let mut plan = SolverPlan::new(&problem.name, &problem.vars, ord, best.template.clone());
    if s.pivoting {
        let polys = problem.random_instance_fp(s.seed, ord)?;
        plan = plan.with_permissible(&polys);
        if plan.permissible.is_none() {
            eprintln!("note: template leaves no pivoting freedom; try --expand 1");
        }
    }
    let (rows, cols) = plan.template.size();
    let basis: Vec<String> = plan.template.basis.iter().map(|m| m.display(&problem.vars).to_string()).collect();
    eprintln!(
        "{}: {rows}x{cols} template, ordering {}, action {}, basis [{}], stages {}",
        problem.name,
        ordering_label(ord),
        plan.template.action.display(&problem.vars),
        basis.join(" "),
        best.stages.iter().map(|(n, t)| format!("{n} {}x{}", t.size().0, t.size().1)).collect::<Vec<_>>().join(", "),
    );
    write_out(out, &plan.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn quantiles(mut v: Vec<f64>) -> Option<(f64, f64, f64)> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some((v[0], v[v.len() / 2], v[v.len() - 1]))
}

fn cmd_bench(s: &Search, out: Option<&Path>) -> Result<ExitCode> {
    let problem = load_problem(&s.problem)?;
    let outcomes = sweep(&problem, s)?;
    let size = |x: Option<(usize, usize)>| x.map_or(String::new(), |(r, c)| format!("{r}x{c}"));
    let mut csv = String::from("ordering,action,basis,initial,rowwise,columnwise,schur,pruned,area,chosen,verified,seconds,error\n");
    let mut areas = Vec::new();
    for o in &outcomes {
        let ord = ordering_label(&o.ordering);
        if let Some(e) = &o.error {
            if o.reports.is_empty() {
                csv.push_str(&format!("{ord},,,,,,,,,,false,,\"{}\"\n", e.replace('"', "'").replace('\n', " ")));
            }
        }
        for r in &o.reports {
            let basis: Vec<String> = r.basis.iter().map(|m| m.display(&problem.vars).to_string()).collect();
            let st = r.sizes.as_ref();
            let area = st.map(|s| s.pruned.0 * s.pruned.1);
            if r.verified {
                areas.extend(area.map(|a| a as f64));
            }
            csv.push_str(&format!(
                "{ord},{},{},{},{},{},{},{},{},{},{},{:.4},\"{}\"\n",
                r.action.display(&problem.vars),
                basis.join(" "),
                size(st.map(|s| s.initial)),
                size(st.and_then(|s| s.rowwise)),
                size(st.and_then(|s| s.columnwise)),
                size(st.and_then(|s| s.schur)),
                size(st.map(|s| s.pruned)),
                area.map_or(String::new(), |a| a.to_string()),
                r.chosen.as_deref().unwrap_or(""),
                r.verified,
                r.seconds,
                r.error.as_deref().unwrap_or("").replace('"', "'").replace('\n', " "),
            ));
        }
    }
    write_out(out, &csv)?;
    match quantiles(areas.clone()) {
        Some((lo, med, hi)) => eprintln!("{} verified candidates; s*n min {lo} median {med} max {hi}", areas.len()),
        None => eprintln!("no verified candidates"),
    }
    Ok(ExitCode::SUCCESS)
}

fn check_compatible(plan: &SolverPlan, problem: &ProblemSpec) -> Result<()> {
    plan.check_structure()?;
    if plan.vars != problem.vars {
        bail!("plan variables {:?} differ from the problem's {:?}", plan.vars, problem.vars);
    }
    if let Some(r) = plan.template.rows.iter().find(|r| r.poly >= problem.polys.len()) {
        bail!("plan uses polynomial {} but the problem has {}", r.poly + 1, problem.polys.len());
    }
    Ok(())
}

fn cmd_solve(
    plan_path: &Path,
    problem: &str,
    data: Option<&Path>,
    seed: u64,
    pivoting: bool,
    filters: &[String],
    imag_tol: f64,
) -> Result<ExitCode> {
    let plan = load_plan(plan_path)?;
    let problem = load_problem(problem)?;
    check_compatible(&plan, &problem)?;
    let ord = &plan.ordering;
    let polys = match data {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            problem.instance_from_data(&parse_data(&text)?, ord)?
        }
        None => problem.random_instance_real(seed, ord)?,
    };
    let sol = solve(&plan, &polys, &SolveOptions { pivoting })?;
    let predicates = filters
        .iter()
        .map(|f| Predicate::parse(f, &problem.vars))
        .collect::<Result<Vec<_>, _>>()?;
    let keep_best = (plan.template.basis.len() > plan.template.dim).then_some(plan.template.dim);
    let filter = Filter { imag_tol, predicates, keep_best };
    let roots = filter_roots(&sol.roots, &filter);
    println!("# {} of {} roots; rcond {:.3e}{}", roots.len(), sol.roots.len(), sol.action.rcond, if sol.pivoted { "; pivoted" } else { "" });
    println!("{},residual,multiplicity", problem.vars.join(","));
    for r in &roots {
        let vals: Vec<String> = r
            .values
            .iter()
            .map(|v| if v.im == 0.0 { format!("{}", v.re) } else { format!("{}{:+}i", v.re, v.im) })
            .collect();
        let mult = if r.is_defective() { format!("{} (defective)", r.algebraic) } else { r.algebraic.to_string() };
        println!("{},{:.3e},{mult}", vals.join(","), r.residual);
    }
    if roots.is_empty() {
        eprintln!("no feasible roots");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(plan_path: &Path, problem: &str, trials: usize, seed: u64, pivoting: bool) -> Result<ExitCode> {
    let plan = load_plan(plan_path)?;
    let problem = load_problem(problem)?;
    check_compatible(&plan, &problem)?;
    let ord = &plan.ordering;
    let mut residuals = Vec::new();
    for k in 0..trials as u64 {
        let s = seed + k;
        let polys = problem.random_instance_fp(s, ord)?;
        let g = buchberger(&polys, ord)?;
        if let Err(e) = plan.template.verify_with_oracle(&polys, &g) {
            eprintln!("seed {s}: Z/p check failed: {e}");
            return Ok(ExitCode::FAILURE);
        }
        let real = problem.random_instance_real(s, ord)?;
        match solve(&plan, &real, &SolveOptions { pivoting }) {
            Ok(sol) => residuals.push(sol.roots.iter().map(|r| r.residual.powi(2)).sum::<f64>().sqrt()),
            Err(e) => {
                eprintln!("seed {s}: solve failed: {e}");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    match quantiles(residuals) {
        Some((_, med, max)) => println!("ok: {trials} trials, residual median {med:.3e} max {max:.3e}"),
        None => println!("ok: structure only"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Generate { search, out } => cmd_generate(search, out.as_deref()),
        Cmd::Bench { search, out } => cmd_bench(search, out.as_deref()),
        Cmd::Solve { plan, problem, data, seed, pivoting, filter, imag_tol } => {
            cmd_solve(plan, problem, data.as_deref(), *seed, *pivoting, filter, *imag_tol)
        }
        Cmd::Verify { plan, problem, trials, seed, pivoting } => cmd_verify(plan, problem, *trials, *seed, *pivoting),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
