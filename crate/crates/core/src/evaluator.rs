//! Forward simulation of policies, an exhaustive small-instance oracle, and
//! the regular-versus-internalizing comparison.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::accounting::{
    admissible_controls, apply_hidden_fills, apply_switch, net_cash_flow, ControlMesh, EventKind,
    HiddenFlags, SwitchDecision, TraderKind, TraderPosition,
};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec, Node};
use crate::market::{
    binomial_transitions, continuous_outcome, stream_rng, Arrival, BinomialKernel, BookState,
    HiddenFills, ModelParams, StepDraws,
};
use crate::reward::{terminal_reward, RewardSpec, RewardVariant};
use crate::solver::{Action, Decision, MarketModel, Problem, ValueTable};

/// Anything that prescribes a decision at `(k, node, arrival)`.
pub trait TradingPolicy: Sync {
    fn decide(&self, problem: &Problem, k: usize, node: usize, arrival: Arrival) -> Decision;
}

impl TradingPolicy for ValueTable {
    fn decide(&self, _problem: &Problem, k: usize, node: usize, arrival: Arrival) -> Decision {
        self.extract_policy(k, node, arrival)
    }
}

/// One decision along a path and its effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeStep {
    pub k: usize,
    pub t: f64,
    /// Grid node the decision was taken at.
    pub node: Node,
    pub kind: EventKind,
    pub action: Action,
    pub hidden: HiddenFlags,
    /// Dark-pool events during the following step.
    pub fills: HiddenFills,
    /// Position after the trade and the dark-pool fills.
    pub position: TraderPosition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub steps: Vec<EpisodeStep>,
    /// Unprojected inventory after the final trade.
    pub final_inventory: f64,
    pub final_pa: i32,
    pub final_pb: i32,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub n_paths: usize,
    pub mean: f64,
    pub std_err: f64,
    /// The first few paths in full.
    pub episodes: Vec<EpisodeRecord>,
}

fn check_decision(problem: &Problem, node: &Node, k: usize, d: &Decision) -> Result<()> {
    let steps = problem.grid.steps();
    let expected = if k == steps {
        EventKind::Terminal
    } else {
        d.kind
    };
    if d.kind != expected {
        return Err(Error::InvalidControl(format!(
            "decision kind {:?} at the last instant",
            d.kind
        )));
    }
    match d.action {
        Action::Wait => {
            if d.kind != EventKind::Interior {
                return Err(Error::InvalidControl(format!("cannot wait at {:?}", d.kind)));
            }
        }
        Action::Trade(u) => {
            let set = admissible_controls(
                d.kind,
                node.pa,
                node.pb,
                problem.trader,
                &problem.params,
                &problem.mesh,
            )?;
            if !set.contains(&u) {
                return Err(Error::InvalidControl(format!(
                    "{u:?} not admissible at {:?} with quotes {}/{}",
                    d.kind, node.pa, node.pb
                )));
            }
        }
    }
    Ok(())
}

/// Draws the book outcome and dark-pool events of one step from the
/// post-decision book.
fn sample_step(problem: &Problem, book: &BookState, rng: &mut ChaCha8Rng) -> (BookState, HiddenFills) {
    let p = &problem.params;
    match problem.model {
        MarketModel::Binomial(kernel) => {
            let o = kernel.sample_outcome(book, p.delta_a, p.delta_b, rng);
            (o.next, o.hidden_fills)
        }
        MarketModel::Continuous { .. } => {
            let draws = StepDraws::sample(rng);
            let o = continuous_outcome(book, p, problem.grid.spec().dt, &draws);
            (o.next, o.hidden_fills)
        }
    }
}

/// Simulates one path from `start` following the same projected dynamics
/// the solver uses. Cash is the realized cash; the reward weights it by
/// `r_c`.
pub fn simulate_episode<P: TradingPolicy + ?Sized>(
    problem: &Problem,
    policy: &P,
    start: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EpisodeRecord> {
    let grid = &problem.grid;
    let steps = grid.steps();
    let p = &problem.params;
    let mut node = start;
    let mut arrival = Arrival::None;
    let mut cash = 0.0;
    let mut log = Vec::with_capacity(2 * steps + 1);

    for k in 0..steps {
        if arrival != Arrival::None {
            let d = policy.decide(problem, k, node, arrival);
            let n = grid.node(node);
            check_decision(problem, &n, k, &d)?;
            let u = match d.action {
                Action::Trade(u) => u,
                Action::Wait => unreachable!("checked above"),
            };
            let (j, c, _) = problem.post_decision(d.kind, node, u);
            cash += c;
            node = j;
            log.push(EpisodeStep {
                k,
                t: grid.time(k),
                node: n,
                kind: d.kind,
                action: d.action,
                hidden: HiddenFlags::NONE,
                fills: HiddenFills::default(),
                position: TraderPosition {
                    inventory: grid.node(node).z as f64,
                    cash,
                },
            });
        }
        let d = policy.decide(problem, k, node, Arrival::None);
        let n = grid.node(node);
        check_decision(problem, &n, k, &d)?;
        if d.kind != EventKind::Interior {
            return Err(Error::InvalidControl(format!("expected an interior decision, got {:?}", d.kind)));
        }
        let post = match d.action {
            Action::Wait => node,
            Action::Trade(u) => {
                let (j, c, _) = problem.post_decision(EventKind::Interior, node, u);
                cash += c;
                j
            }
        };
        let y = grid.node(post);
        d.hidden.validate(y.pa, y.pb, p)?;
        let book = BookState::new(y.qa as f64, y.qb as f64, y.pa, y.pb);
        let (next, fills) = sample_step(problem, &book, rng);
        let mut position = TraderPosition {
            inventory: y.z as f64,
            cash,
        };
        position = apply_hidden_fills(position, y.pa, y.pb, d.hidden, fills, p);
        cash = position.cash;
        let (j, _) = grid.snap(next.qa, next.qb, position.inventory, next.pa, next.pb);
        log.push(EpisodeStep {
            k,
            t: grid.time(k),
            node: n,
            kind: EventKind::Interior,
            action: d.action,
            hidden: d.hidden,
            fills,
            position: TraderPosition {
                inventory: grid.node(j).z as f64,
                cash,
            },
        });
        node = j;
        arrival = problem.arrival_at(next.arrival, j);
    }

    let d = policy.decide(problem, steps, node, arrival);
    let n = grid.node(node);
    check_decision(problem, &n, steps, &d)?;
    let u = match d.action {
        Action::Trade(u) => u,
        Action::Wait => unreachable!("checked above"),
    };
    let book = BookState::new(n.qa as f64, n.qb as f64, n.pa, n.pb);
    let (final_book, final_inventory) = apply_switch(EventKind::Terminal, &book, n.z as f64, u, p)?;
    cash += net_cash_flow(EventKind::Terminal, &book, u, p)?;
    log.push(EpisodeStep {
        k: steps,
        t: grid.time(steps),
        node: n,
        kind: EventKind::Terminal,
        action: d.action,
        hidden: HiddenFlags::NONE,
        fills: HiddenFills::default(),
        position: TraderPosition {
            inventory: final_inventory,
            cash,
        },
    });
    let reward = terminal_reward(
        &problem.reward,
        final_inventory,
        cash,
        final_book.pa,
        final_book.pb,
    );
    Ok(EpisodeRecord {
        steps: log,
        final_inventory,
        final_pa: final_book.pa,
        final_pb: final_book.pb,
        reward,
    })
}

/// Mean realized reward over `n_paths` paths from `x0` (projected onto the
/// grid). Path `i` uses random stream `i` of `seed`.
pub fn run_policy<P: TradingPolicy + ?Sized>(
    problem: &Problem,
    policy: &P,
    x0: &crate::config::InitialState,
    seed: u64,
    n_paths: usize,
    keep: usize,
) -> Result<PolicyRun> {
    if n_paths == 0 {
        return Err(Error::InvalidParams("n_paths must be > 0".into()));
    }
    x0.book().validate()?;
    let (start, _) = problem.grid.snap(x0.qa, x0.qb, x0.z, x0.pa, x0.pb);
    let episodes: Vec<Result<EpisodeRecord>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            simulate_episode(problem, policy, start, &mut rng)
        })
        .collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut kept = Vec::with_capacity(keep.min(n_paths));
    for (i, e) in episodes.into_iter().enumerate() {
        let e = e?;
        sum += e.reward;
        sum_sq += e.reward * e.reward;
        if i < keep {
            kept.push(e);
        }
    }
    let n = n_paths as f64;
    let mean = sum / n;
    let var = if n_paths > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(PolicyRun {
        n_paths,
        mean,
        std_err: (var / n).sqrt(),
        episodes: kept,
    })
}

/// Recomputes every logged position from the logged decisions with the
/// accounting operations, and checks the logs agree exactly.
pub fn replay(problem: &Problem, record: &EpisodeRecord) -> Result<()> {
    let grid = &problem.grid;
    let p = &problem.params;
    let mut cash = 0.0;
    let mismatch = |what: &str, k: usize| Err(Error::InvalidState(format!("replay mismatch in {what} at k = {k}")));
    for s in &record.steps {
        let book = BookState::new(s.node.qa as f64, s.node.qb as f64, s.node.pa, s.node.pb);
        let z = s.node.z as f64;
        let (post, inventory) = match s.action {
            Action::Wait => (book, z),
            Action::Trade(u) => {
                cash += net_cash_flow(s.kind, &book, u, p)?;
                apply_switch(s.kind, &book, z, u, p)?
            }
        };
        let expected = match s.kind {
            EventKind::Terminal => inventory,
            EventKind::Interior => {
                let (j, _) = grid.snap(post.qa, post.qb, inventory, post.pa, post.pb);
                let y = grid.node(j);
                let after = apply_hidden_fills(
                    TraderPosition {
                        inventory: y.z as f64,
                        cash,
                    },
                    y.pa,
                    y.pb,
                    s.hidden,
                    s.fills,
                    p,
                );
                cash = after.cash;
                grid.node(grid.snap(0.0, 0.0, after.inventory, y.pa, y.pb).0).z as f64
            }
            _ => {
                let (j, _) = grid.snap(post.qa, post.qb, inventory, post.pa, post.pb);
                grid.node(j).z as f64
            }
        };
        if expected != s.position.inventory {
            return mismatch("inventory", s.k);
        }
        if cash != s.position.cash {
            return mismatch("cash", s.k);
        }
    }
    let last = record.steps.last().ok_or_else(|| Error::InvalidState("empty episode".into()))?;
    let reward = terminal_reward(
        &problem.reward,
        last.position.inventory,
        last.position.cash,
        record.final_pa,
        record.final_pb,
    );
    if reward != record.reward {
        return mismatch("reward", last.k);
    }
    Ok(())
}

/// Values of the exhaustive oracle at `t_0` for every node and event.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleValues {
    pub v0: Vec<f64>,
    pub va: Vec<f64>,
    pub vb: Vec<f64>,
}

/// Exact expected-reward maximum by enumerating every decision and every
/// Binomial outcome branch, memoized on `(k, node, event)`. Uses only the
/// validated accounting and transition operations and realized dark-pool
/// cash on each branch.
pub fn exhaustive_oracle(problem: &Problem, cap: u128) -> Result<OracleValues> {
    let kernel = match problem.model {
        MarketModel::Binomial(kernel) => kernel,
        MarketModel::Continuous { .. } => {
            return Err(Error::InvalidParams("the oracle needs the Binomial model".into()))
        }
    };
    let grid = &problem.grid;
    let steps = grid.steps();
    let mut widest = 1u128;
    for &(pa, pb) in grid.price_pairs() {
        for kind in [
            EventKind::Interior,
            EventKind::AskArrival,
            EventKind::BidArrival,
            EventKind::Terminal,
        ] {
            let n = admissible_controls(kind, pa, pb, problem.trader, &problem.params, &problem.mesh)?.len();
            widest = widest.max(n as u128 + 1);
        }
    }
    // every (k, node, event) is expanded at most once: decisions x flags x branches
    let estimated = (steps as u128 + 1) * grid.len() as u128 * 3 * widest * 3 * 36;
    if estimated > cap {
        return Err(Error::CapExceeded { estimated, cap });
    }
    let mut oracle = Oracle {
        problem,
        kernel,
        memo: HashMap::new(),
    };
    let mut out = OracleValues {
        v0: Vec::with_capacity(grid.len()),
        va: Vec::with_capacity(grid.len()),
        vb: Vec::with_capacity(grid.len()),
    };
    for i in 0..grid.len() {
        out.v0.push(oracle.value(0, i, Arrival::None)?);
        out.va.push(oracle.value(0, i, Arrival::Ask)?);
        out.vb.push(oracle.value(0, i, Arrival::Bid)?);
    }
    Ok(out)
}

struct Oracle<'a> {
    problem: &'a Problem,
    kernel: BinomialKernel,
    memo: HashMap<(usize, usize, Arrival), f64>,
}

impl Oracle<'_> {
    fn controls(&self, kind: EventKind, n: &Node) -> Result<Vec<SwitchDecision>> {
        let p = self.problem;
        admissible_controls(kind, n.pa, n.pb, p.trader, &p.params, &p.mesh)
    }

    fn value(&mut self, k: usize, i: usize, arrival: Arrival) -> Result<f64> {
        if let Some(&v) = self.memo.get(&(k, i, arrival)) {
            return Ok(v);
        }
        let p = self.problem;
        let params = &p.params;
        let grid = &p.grid;
        let n = grid.node(i);
        let book = BookState::new(n.qa as f64, n.qb as f64, n.pa, n.pb);
        let z = n.z as f64;
        let mut best = f64::NEG_INFINITY;
        if k == grid.steps() {
            for u in self.controls(EventKind::Terminal, &n)? {
                let (after, inv) = apply_switch(EventKind::Terminal, &book, z, u, params)?;
                let cash = net_cash_flow(EventKind::Terminal, &book, u, params)?;
                best = best.max(terminal_reward(&p.reward, inv, cash, after.pa, after.pb));
            }
        } else if p.arrival_at(arrival, i) != Arrival::None {
            let kind = if arrival == Arrival::Ask {
                EventKind::AskArrival
            } else {
                EventKind::BidArrival
            };
            for u in self.controls(kind, &n)? {
                let (after, inv) = apply_switch(kind, &book, z, u, params)?;
                let cash = net_cash_flow(kind, &book, u, params)?;
                let (j, _) = grid.snap(after.qa, after.qb, inv, after.pa, after.pb);
                best = best.max(p.reward.r_c * cash + self.value(k, j, Arrival::None)?);
            }
        } else {
            let mut options = vec![None];
            options.extend(self.controls(EventKind::Interior, &n)?.into_iter().map(Some));
            for u in options {
                let (post, immediate) = match u {
                    None => (i, 0.0),
                    Some(u) => {
                        let (after, inv) = apply_switch(EventKind::Interior, &book, z, u, params)?;
                        let cash = net_cash_flow(EventKind::Interior, &book, u, params)?;
                        (grid.snap(after.qa, after.qb, inv, after.pa, after.pb).0, p.reward.r_c * cash)
                    }
                };
                let y = grid.node(post);
                let y_book = BookState::new(y.qa as f64, y.qb as f64, y.pa, y.pb);
                for h in [HiddenFlags::NONE, HiddenFlags::BUY, HiddenFlags::SELL] {
                    let outcomes = match binomial_transitions(&y_book, h, &self.kernel, params) {
                        Ok(o) => o,
                        Err(Error::InvalidHidden(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    let mut expected = 0.0;
                    for o in outcomes {
                        let start = TraderPosition {
                            inventory: y.z as f64,
                            cash: 0.0,
                        };
                        let filled = apply_hidden_fills(start, y.pa, y.pb, h, o.hidden_fills, params);
                        let (j, _) = grid.snap(o.next.qa, o.next.qb, filled.inventory, o.next.pa, o.next.pb);
                        let arrival = p.arrival_at(o.next.arrival, j);
                        expected += o.prob * (p.reward.r_c * filled.cash + self.value(k + 1, j, arrival)?);
                    }
                    best = best.max(immediate + expected);
                }
            }
        }
        self.memo.insert((k, i, arrival), best);
        Ok(best)
    }
}

/// Random small Binomial instance (at most 200 nodes, at most 3 steps) for
/// checking the solver against the oracle.
pub fn random_tiny_problem(seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pa_min = rng.random_range(13..=15);
        let pb_min = pa_min - rng.random_range(1..=2);
        let spec = GridSpec {
            q_max: rng.random_range(1..=3),
            i_min: -rng.random_range(1..=4),
            i_max: rng.random_range(1..=4),
            pa_min,
            pa_max: pa_min + rng.random_range(0..=2),
            pb_min,
            pb_max: pb_min + rng.random_range(0..=2),
            t0: 0.0,
            dt: 1.0,
            steps: rng.random_range(1..=3),
        };
        if spec.count_admissible() == 0 || spec.count_admissible() > 200 {
            continue;
        }
        let mut params = ModelParams::binomial_reference();
        params.delta_a = rng.random_range(1..=2) as f64;
        params.delta_b = rng.random_range(1..=2) as f64;
        params.pa_bar = spec.pa_max + rng.random_range(0..=1);
        params.pb_under = spec.pb_min - rng.random_range(0..=1);
        params.epsilon = [0.0, 0.25, 0.5][rng.random_range(0..3)];
        let fill_buy = rng.random_range(0.0..0.4);
        let kernel = BinomialKernel {
            arrival_coef: rng.random_range(0.0..0.6),
            fill_buy,
            fill_sell: rng.random_range(0.0..0.4),
        };
        let variant = match rng.random_range(0..4) {
            0 => RewardVariant::Linear,
            1 => RewardVariant::TargetAbs(rng.random_range(-2..=2) as f64),
            2 => RewardVariant::TargetQuad(rng.random_range(-2..=2) as f64),
            _ => RewardVariant::LiquidationPenalty { ua: 2.0, ub: 2.0 },
        };
        let reward = RewardSpec {
            r_c: rng.random_range(0.5..1.5),
            r_i: if matches!(variant, RewardVariant::TargetAbs(_) | RewardVariant::TargetQuad(_)) {
                -rng.random_range(0.1..1.0)
            } else {
                rng.random_range(0.5..1.5)
            },
            variant,
        };
        let trader = if rng.random::<bool>() {
            TraderKind::Internalizing
        } else {
            TraderKind::Regular
        };
        let mesh = ControlMesh {
            fraction_step: [0.25, 0.5, 1.0][rng.random_range(0..3)],
        };
        return Problem::new(
            params,
            MarketModel::Binomial(kernel),
            Grid::build(spec).expect("non-empty grid"),
            reward,
            trader,
            mesh,
        )
        .expect("valid tiny instance");
    }
}

/// Relative gain `(v_int - v_reg) / v_reg` of internalizing.
pub fn v_diff(v_int: f64, v_reg: f64, floor: f64) -> Result<f64> {
    if v_reg.abs() < floor || v_reg == 0.0 {
        return Err(Error::BelowFloor {
            value: v_reg,
            floor,
        });
    }
    Ok((v_int - v_reg) / v_reg)
}

/// Upper edges of the histogram bins of [`DiffReport::histogram`]; the last
/// bin collects everything above.
pub const DIFF_BIN_EDGES: [f64; 8] = [0.0, 0.01, 0.05, 0.10, 0.15, 0.25, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    /// `None` where the denominator is below the floor.
    pub diff: Vec<Option<f64>>,
    pub floor: f64,
    pub excluded: usize,
    /// Counts per bin: `(-inf, 0)`, `[0, 0.01)`, ..., `[1, inf)`.
    pub histogram: Vec<usize>,
    /// Weighted mean over included nodes, weights renormalized to them.
    pub weighted_avg: f64,
}

impl DiffReport {
    /// Fraction of all nodes with a difference inside `[lo, hi]`.
    pub fn share_in(&self, lo: f64, hi: f64) -> f64 {
        let n = self
            .diff
            .iter()
            .filter(|d| matches!(d, Some(x) if *x >= lo && *x <= hi))
            .count();
        n as f64 / self.diff.len() as f64
    }
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::InvalidParams(format!(
            "{} weights for {n} nodes",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParams("weights must be finite and >= 0".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::UnnormalizedWeights(sum));
    }
    Ok(())
}

pub fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Relative differences node by node. Nodes with `|v_reg|` below
/// `1e-6 * max |v_reg|` are excluded.
pub fn diff_report(v_reg: &[f64], v_int: &[f64], weights: &[f64]) -> Result<DiffReport> {
    if v_reg.len() != v_int.len() {
        return Err(Error::InvalidParams("value tables differ in size".into()));
    }
    check_weights(weights, v_reg.len())?;
    let scale = v_reg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-6 * scale;
    let mut histogram = vec![0usize; DIFF_BIN_EDGES.len() + 1];
    let mut excluded = 0;
    let mut wsum = 0.0;
    let mut acc = 0.0;
    let diff: Vec<Option<f64>> = v_reg
        .iter()
        .zip(v_int)
        .zip(weights)
        .map(|((&r, &i), &w)| match v_diff(i, r, floor) {
            Ok(d) => {
                let bin = DIFF_BIN_EDGES
                    .iter()
                    .position(|&e| d < e)
                    .unwrap_or(DIFF_BIN_EDGES.len());
                histogram[bin] += 1;
                wsum += w;
                acc += w * d;
                Some(d)
            }
            Err(_) => {
                excluded += 1;
                None
            }
        })
        .collect();
    Ok(DiffReport {
        diff,
        floor,
        excluded,
        histogram,
        weighted_avg: if wsum > 0.0 { acc / wsum } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PremiumCurve {
    /// `(epsilon, weighted average difference)` in ladder order.
    pub points: Vec<(f64, f64)>,
    /// Consecutive ladder pairs where the average went up.
    pub monotonicity_violations: Vec<(f64, f64)>,
}

/// Weighted average difference for each premium on the ladder.
pub fn premium_curve(
    v_reg: &[f64],
    ladder: &[(f64, Vec<f64>)],
    weights: &[f64],
) -> Result<PremiumCurve> {
    let mut points = Vec::with_capacity(ladder.len());
    for (eps, v_int) in ladder {
        points.push((*eps, diff_report(v_reg, v_int, weights)?.weighted_avg));
    }
    Ok(curve_from_points(points))
}

pub fn curve_from_points(mut points: Vec<(f64, f64)>) -> PremiumCurve {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotonicity_violations = points
        .windows(2)
        .filter(|w| w[1].1 > w[0].1)
        .map(|w| (w[0].0, w[1].0))
        .collect();
    PremiumCurve {
        points,
        monotonicity_violations,
    }
}

/// Largest positive ladder premium whose weighted average difference is at
/// least `delta`.
pub fn fair_premium(curve: &PremiumCurve, delta: f64) -> Option<f64> {
    curve
        .points
        .iter()
        .filter(|(eps, avg)| *eps > 0.0 && *avg >= delta)
        .map(|(eps, _)| *eps)
        .fold(None, |best: Option<f64>, e| Some(best.map_or(e, |b| b.max(e))))
}
