use lobswitch::accounting::TraderKind;
use lobswitch::config::RunConfig;
use lobswitch::evaluator::{exhaustive_oracle, random_tiny_problem, replay, run_policy};
use lobswitch::market::{simulate_book, BookState, ModelParams};
use lobswitch::policy_io;
use lobswitch::solver::{solve, Problem};
use lobswitch::Error;
use proptest::prelude::*;

fn small_config(trader: TraderKind, epsilon: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.apply_text(
        "grid.q_max = 3\ngrid.i_min = -4\ngrid.i_max = 4\n\
         grid.pa_min = 14\ngrid.pa_max = 16\ngrid.pb_min = 12\ngrid.pb_max = 14\n\
         grid.steps = 3\nx0.qa = 2\nx0.qb = 2\nx0.pa = 15\nx0.pb = 13\n",
    )
    .unwrap();
    cfg.trader = trader;
    cfg.params.epsilon = epsilon;
    cfg
}

fn small_problem(trader: TraderKind, epsilon: f64) -> Problem {
    small_config(trader, epsilon).problem().unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solver_matches_oracle(seed in any::<u64>()) {
        let problem = random_tiny_problem(seed);
        let oracle = exhaustive_oracle(&problem, 1_000_000_000).unwrap();
        let layer = &solve(&problem, 1).unwrap().table.layers[0];
        prop_assert!(max_abs_diff(&layer.v0, &oracle.v0) < 1e-9);
        prop_assert!(max_abs_diff(&layer.va, &oracle.va) < 1e-9);
        prop_assert!(max_abs_diff(&layer.vb, &oracle.vb) < 1e-9);
    }

    #[test]
    fn solve_is_thread_count_invariant(seed in any::<u64>(), threads in 2usize..5) {
        let problem = random_tiny_problem(seed);
        let one = solve(&problem, 1).unwrap().table;
        let many = solve(&problem, threads).unwrap().table;
        prop_assert_eq!(one, many);
    }

    #[test]
    fn book_paths_stay_uncrossed(seed in any::<u64>()) {
        let params = ModelParams::book_figure();
        let path = simulate_book(&params, BookState::new(5.0, 5.0, 20, 15), 30.0, 0.05, seed).unwrap();
        prop_assert_eq!(path.len(), 601);
        for w in path.windows(2) {
            prop_assert!(w[1].pa > w[1].pb);
            prop_assert!(w[1].qa > 0.0 && w[1].qb > 0.0);
            prop_assert!(w[1].la >= w[0].la && w[1].lb >= w[0].lb);
            prop_assert!(w[1].na >= w[0].na && w[1].nb >= w[0].nb);
        }
    }
}

#[test]
fn internalizing_never_worse_than_regular() {
    let reg = solve(&small_problem(TraderKind::Regular, 0.0), 1).unwrap().table;
    let int = solve(&small_problem(TraderKind::Internalizing, 0.0), 1).unwrap().table;
    for (r, i) in reg.layers.iter().zip(&int.layers) {
        for (a, b) in r.v0.iter().zip(&i.v0) {
            assert!(b >= &(a - 1e-9), "int {b} < reg {a}");
        }
    }
}

#[test]
fn internalizing_value_falls_with_premium() {
    let mut prev: Option<Vec<f64>> = None;
    for eps in [0.0, 0.25, 0.5, 1.0] {
        let v = solve(&small_problem(TraderKind::Internalizing, eps), 1)
            .unwrap()
            .table
            .layers[0]
            .v0
            .clone();
        if let Some(p) = &prev {
            for (a, b) in p.iter().zip(&v) {
                assert!(b <= &(a + 1e-9), "value rose with the premium: {a} -> {b}");
            }
        }
        prev = Some(v);
    }
}

#[test]
fn monte_carlo_agrees_with_value_and_replays() {
    let cfg = small_config(TraderKind::Internalizing, 0.25);
    let problem = cfg.problem().unwrap();
    let table = solve(&problem, 2).unwrap().table;
    let (start, _) = problem.grid.snap(cfg.x0.qa, cfg.x0.qb, cfg.x0.z, cfg.x0.pa, cfg.x0.pb);
    let run = run_policy(&problem, &table, &cfg.x0, 11, 40_000, 50).unwrap();
    let v = table.layers[0].v0[start];
    assert!(
        (run.mean - v).abs() < 4.0 * run.std_err + 1e-9,
        "mean {} value {v} se {}",
        run.mean,
        run.std_err
    );
    for ep in &run.episodes {
        replay(&problem, ep).unwrap();
    }
    let again = run_policy(&problem, &table, &cfg.x0, 11, 40_000, 50).unwrap();
    assert_eq!(run, again);
}

#[test]
fn policy_files_round_trip_through_disk() {
    let cfg = small_config(TraderKind::Regular, 0.0);
    let table = solve(&cfg.problem().unwrap(), 1).unwrap().table;
    let dir = tempfile::tempdir().unwrap();

    let csv_path = dir.path().join("p.csv");
    policy_io::write_csv(std::fs::File::create(&csv_path).unwrap(), &cfg, &table).unwrap();
    let bin_path = dir.path().join("p.bin");
    policy_io::write_binary(std::fs::File::create(&bin_path).unwrap(), &cfg, &table).unwrap();

    for path in [&csv_path, &bin_path] {
        let bytes = std::fs::read(path).unwrap();
        let (cfg2, table2) = policy_io::read_any(&bytes).unwrap();
        assert_eq!(cfg2.hash(), cfg.hash());
        assert_eq!(table2, table);
    }

    let mut bytes = std::fs::read(&bin_path).unwrap();
    bytes.truncate(bytes.len() - 10);
    assert!(matches!(policy_io::read_any(&bytes), Err(Error::PolicyFormat(_))));
}

#[test]
fn config_hash_tracks_every_key() {
    let base = RunConfig::default();
    let mut other = base.clone();
    assert_eq!(base.hash(), other.hash());
    other.set("binomial.fill_sell", "0.2").unwrap();
    assert_ne!(base.hash(), other.hash());
    let reparsed = RunConfig::parse(&base.canonical()).unwrap();
    assert_eq!(reparsed, base);
}
