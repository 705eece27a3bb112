use std::fmt::Write as _;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use lobswitch::accounting::TraderKind;
use lobswitch::config::{InitialState, ModelKind, RunConfig};
use lobswitch::evaluator::{
    curve_from_points, diff_report, exhaustive_oracle, fair_premium, random_tiny_problem,
    run_policy, uniform_weights, DIFF_BIN_EDGES,
};
use lobswitch::market::{simulate_book, ModelParams};
use lobswitch::solver::{solve, Action, Problem, Solution};
use lobswitch::{policy_io, Error};

const EXIT_RUNTIME: u8 = 1;
const EXIT_MISSING_FILE: u8 = 2;
const EXIT_BAD_CONFIG: u8 = 3;
const EXIT_USAGE: u8 = 64;

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\npolicy file format: v1",
    "\ntarget: ",
    env!("LOBSWITCH_BUILD_TARGET"),
    "\nprofile: ",
    env!("LOBSWITCH_BUILD_PROFILE")
);

#[derive(Parser)]
#[command(name = "lobswitch", version, long_version = LONG_VERSION)]
#[command(about = "Limit order book switching control: simulation, solver and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the continuous book model and write the path as CSV.
    BookSim(BookSimArgs),
    /// Solve the control problem by backward induction and write the policy.
    Solve(SolveArgs),
    /// Run a stored policy by Monte Carlo and log trajectories.
    Evaluate(EvaluateArgs),
    /// Compare regular and internalizing values over a premium ladder.
    Premium(PremiumArgs),
    /// Check the solver against exhaustive enumeration on random tiny instances.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct BookSimArgs {
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Config file; keys override the defaults (sigma 10, delta 5, theta linear:0.5).
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Config files applied in order: params, grid, reward.
#[derive(Args)]
struct ConfigFiles {
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    reward: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    files: ConfigFiles,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    trader: Option<TraderKind>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long, env = "LOBSWITCH_THREADS")]
    threads: Option<usize>,
    /// Policy file; `.bin` selects the binary format, anything else CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    policy: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start state `qa,qb,z,pa,pb`; defaults to the x0 stored with the policy.
    #[arg(long)]
    x0: Option<String>,
    /// Number of paths written in full to the trajectory file.
    #[arg(long, default_value_t = 100)]
    log_paths: usize,
    #[arg(long, env = "LOBSWITCH_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PremiumArgs {
    #[command(flatten)]
    files: ConfigFiles,
    /// Comma separated premiums.
    #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
    epsilon_ladder: String,
    /// `uniform` or a file with one weight per grid node.
    #[arg(long, default_value = "uniform")]
    weights: String,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long, env = "LOBSWITCH_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 24)]
    instances: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000_000)]
    cap: u128,
}

/// An error with the exit status it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            err,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::PolicyFormat(_) | Error::UnnormalizedWeights(_) => {
                EXIT_BAD_CONFIG
            }
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            err: e.into(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn bad_config(err: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_BAD_CONFIG,
        err,
    }
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure {
        code: if e.kind() == std::io::ErrorKind::NotFound {
            EXIT_MISSING_FILE
        } else {
            EXIT_RUNTIME
        },
        err: anyhow!(e).context(format!("cannot read {}", path.display())),
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read_bytes(path)?)
        .map_err(|_| bad_config(anyhow!("{} is not UTF-8 text", path.display())))
}

fn apply_file(cfg: &mut RunConfig, path: &Path) -> CliResult<()> {
    let text = read_text(path)?;
    cfg.apply_text(&text)
        .map_err(|e| bad_config(anyhow!(e).context(format!("in {}", path.display()))))
}

/// Writes next to `path` and renames into place, so a failed run leaves
/// nothing behind.
fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| {
            let _ = std::fs::remove_file(&tmp);
            anyhow!(e).context(format!("cannot write {}", path.display()))
        })?;
    Ok(())
}

fn thread_count(requested: Option<usize>) -> CliResult<usize> {
    match requested {
        Some(0) => Err(bad_config(anyhow!("--threads must be at least 1"))),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn load_config(files: &ConfigFiles) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    for path in [&files.params, &files.grid, &files.reward].into_iter().flatten() {
        apply_file(&mut cfg, path)?;
    }
    Ok(cfg)
}

fn build_problem(cfg: &RunConfig) -> CliResult<Problem> {
    cfg.validate().map_err(|e| bad_config(anyhow!(e)))?;
    Ok(cfg.problem()?)
}

fn run_solve(cfg: &RunConfig, threads: usize) -> CliResult<Solution> {
    let problem = build_problem(cfg)?;
    info!(
        "{} admissible points, {} steps, trader {}, epsilon {}, {} threads",
        problem.grid.len(),
        problem.grid.steps(),
        cfg.trader,
        cfg.params.epsilon,
        threads
    );
    let solution = solve(&problem, threads)?;
    let total: f64 = solution.stats.layer_seconds.iter().sum();
    info!(
        "solved in {total:.2} s; {} interior decisions at the inventory bound",
        solution.stats.inventory_clamped
    );
    Ok(solution)
}

fn book_sim(args: BookSimArgs) -> CliResult<()> {
    let mut cfg = RunConfig {
        params: ModelParams::book_figure(),
        x0: InitialState {
            qa: 5.0,
            qb: 5.0,
            z: 0.0,
            pa: 20,
            pb: 15,
        },
        ..RunConfig::default()
    };
    if let Some(path) = &args.params {
        apply_file(&mut cfg, path)?;
    }
    cfg.params.validate().map_err(|e| bad_config(anyhow!(e)))?;
    let t_end = args.t_end.unwrap_or(cfg.params.horizon);
    let path = simulate_book(&cfg.params, cfg.x0.book(), t_end, args.dt, args.seed)?;

    let mut out = String::new();
    writeln!(out, "# config_hash: {}", cfg.hash()).unwrap();
    writeln!(out, "# seed: {} dt: {} t_end: {}", args.seed, args.dt, t_end).unwrap();
    out.push_str("t,qa,qb,pa,pb,La,Lb,Na,Nb\n");
    for p in &path {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.t, p.qa, p.qb, p.pa, p.pb, p.la, p.lb, p.na, p.nb
        )
        .unwrap();
    }
    write_output(&args.out, out.as_bytes())?;
    info!("{} rows written to {}", path.len(), args.out.display());
    Ok(())
}

fn solve_cmd(args: SolveArgs) -> CliResult<()> {
    let mut cfg = load_config(&args.files)?;
    if let Some(m) = args.model {
        cfg.model = m;
    }
    if let Some(t) = args.trader {
        cfg.trader = t;
    }
    if let Some(e) = args.epsilon {
        cfg.params.epsilon = e;
    }
    if let Some(n) = args.mc_samples {
        cfg.mc_samples = n;
    }
    let threads = thread_count(args.threads)?;
    let solution = run_solve(&cfg, threads)?;

    let mut bytes = Vec::new();
    let binary = args.out.extension().is_some_and(|e| e == "bin");
    if binary {
        policy_io::write_binary(&mut bytes, &cfg, &solution.table)?;
    } else {
        policy_io::write_csv(BufWriter::new(&mut bytes), &cfg, &solution.table)?;
    }
    write_output(&args.out, &bytes)?;
    info!("policy written to {} (config {})", args.out.display(), cfg.hash());
    Ok(())
}

fn action_label(kind: lobswitch::accounting::EventKind, action: Action) -> &'static str {
    use lobswitch::accounting::EventKind as E;
    match (action, kind) {
        (Action::Wait, _) => "wait",
        (Action::Trade(_), E::AskArrival) => "ask_arrival",
        (Action::Trade(_), E::BidArrival) => "bid_arrival",
        (Action::Trade(_), E::Terminal) => "terminal",
        (Action::Trade(_), _) => "trade",
    }
}

fn evaluate(args: EvaluateArgs) -> CliResult<()> {
    let bytes = read_bytes(&args.policy)?;
    let (cfg, table) = policy_io::read_any(&bytes)?;
    let problem = build_problem(&cfg)?;
    let x0 = match &args.x0 {
        Some(text) => InitialState::parse(text).map_err(|e| bad_config(anyhow!(e)))?,
        None => cfg.x0,
    };
    let threads = thread_count(args.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("thread pool")?;
    let run = pool.install(|| run_policy(&problem, &table, &x0, args.seed, args.paths, args.log_paths))?;

    let mut out = String::new();
    writeln!(out, "# config_hash: {}", cfg.hash()).unwrap();
    writeln!(
        out,
        "# paths: {} seed: {} mean: {} std_err: {}",
        run.n_paths, args.seed, run.mean, run.std_err
    )
    .unwrap();
    out.push_str("path,t,qa,qb,pa,pb,action,ua,ub,ha,hb,inventory,cash\n");
    for (i, ep) in run.episodes.iter().enumerate() {
        for s in &ep.steps {
            let u = match s.action {
                Action::Wait => lobswitch::accounting::SwitchDecision::ZERO,
                Action::Trade(u) => u,
            };
            writeln!(
                out,
                "{i},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.t,
                s.node.qa,
                s.node.qb,
                s.node.pa,
                s.node.pb,
                action_label(s.kind, s.action),
                u.ua,
                u.ub,
                u8::from(s.hidden.ha),
                u8::from(s.hidden.hb),
                s.position.inventory,
                s.position.cash
            )
            .unwrap();
        }
    }
    write_output(&args.out, out.as_bytes())?;
    println!(
        "{}",
        json!({
            "config_hash": cfg.hash(),
            "paths": run.n_paths,
            "seed": args.seed,
            "mean": run.mean,
            "std_err": run.std_err,
        })
    );
    Ok(())
}

fn parse_ladder(text: &str) -> CliResult<Vec<f64>> {
    let ladder: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad_config(anyhow!("malformed --epsilon-ladder '{text}'")))?;
    if ladder.is_empty() || ladder.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(bad_config(anyhow!("premiums must be finite and >= 0")));
    }
    Ok(ladder)
}

fn load_weights(spec: &str, n: usize) -> CliResult<Vec<f64>> {
    if spec == "uniform" {
        return Ok(uniform_weights(n));
    }
    let text = read_text(Path::new(spec))?;
    let weights: Vec<f64> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad_config(anyhow!("malformed weight in {spec}")))?;
    if weights.len() != n {
        return Err(bad_config(anyhow!("{spec}: {} weights for {n} nodes", weights.len())));
    }
    Ok(weights)
}

fn premium(args: PremiumArgs) -> CliResult<()> {
    let mut base = load_config(&args.files)?;
    if let Some(m) = args.model {
        base.model = m;
    }
    if let Some(n) = args.mc_samples {
        base.mc_samples = n;
    }
    let ladder = parse_ladder(&args.epsilon_ladder)?;
    let threads = thread_count(args.threads)?;

    let mut reg_cfg = base.clone();
    reg_cfg.trader = TraderKind::Regular;
    let reg_problem = build_problem(&reg_cfg)?;
    let weights = load_weights(&args.weights, reg_problem.grid.len())?;
    let (x0_node, _) = reg_problem
        .grid
        .snap(base.x0.qa, base.x0.qb, base.x0.z, base.x0.pa, base.x0.pb);

    let mut reports = Vec::with_capacity(ladder.len());
    let mut points = Vec::with_capacity(ladder.len());
    let mut hashes = Vec::with_capacity(ladder.len());
    for &eps in &ladder {
        let mut cfg = base.clone();
        cfg.params.epsilon = eps;
        cfg.trader = TraderKind::Regular;
        let reg = run_solve(&cfg, threads)?;
        cfg.trader = TraderKind::Internalizing;
        let int = run_solve(&cfg, threads)?;
        hashes.push(cfg.hash());

        let v_reg = &reg.table.layers[0].v0;
        let v_int = &int.table.layers[0].v0;
        let report = diff_report(v_reg, v_int, &weights)?;
        points.push((eps, report.weighted_avg));
        reports.push(json!({
            "epsilon": eps,
            "weighted_avg": report.weighted_avg,
            "share_0.01_0.15": report.share_in(0.01, 0.15),
            "excluded": report.excluded,
            "floor": report.floor,
            "histogram": report.histogram,
            "v_reg_x0": v_reg[x0_node],
            "v_int_x0": v_int[x0_node],
        }));
    }
    let curve = curve_from_points(points);
    let fair = fair_premium(&curve, args.delta);
    let report = json!({
        "config_hash": base.hash(),
        "solve_hashes": hashes,
        "nodes": reg_problem.grid.len(),
        "weights": args.weights,
        "delta": args.delta,
        "bin_edges": DIFF_BIN_EDGES,
        "curve": curve.points,
        "monotonicity_violations": curve.monotonicity_violations,
        "fair_premium": fair,
        "ladder": reports,
    });
    let text = serde_json::to_string_pretty(&report).context("serializing report")?;
    write_output(&args.out, text.as_bytes())?;
    match fair {
        Some(e) => info!("fair premium {e} at delta {}", args.delta),
        None => info!("no premium on the ladder reaches delta {}", args.delta),
    }
    Ok(())
}

fn oracle_check(args: OracleArgs) -> CliResult<()> {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..args.instances {
        let seed = args.seed.wrapping_add(i);
        let problem = random_tiny_problem(seed);
        let oracle = exhaustive_oracle(&problem, args.cap)?;
        let solved = solve(&problem, 1)?;
        let layer = &solved.table.layers[0];
        let diff = [
            (&layer.v0, &oracle.v0),
            (&layer.va, &oracle.va),
            (&layer.vb, &oracle.vb),
        ]
        .iter()
        .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
        .fold(0.0f64, f64::max);
        let ok = diff <= args.tol;
        if !ok {
            failures += 1;
        }
        worst = worst.max(diff);
        println!(
            "instance seed={seed} nodes={} steps={} max_abs_diff={diff:.3e} {}",
            problem.grid.len(),
            problem.grid.steps(),
            if ok { "ok" } else { "MISMATCH" }
        );
    }
    println!("{} instances, worst {worst:.3e}, {failures} mismatches", args.instances);
    if failures > 0 {
        return Err(anyhow!("{failures} instances disagree with the oracle").into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = match cli.command {
        Command::BookSim(a) => book_sim(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Premium(a) => premium(a),
        Command::OracleCheck(a) => oracle_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
