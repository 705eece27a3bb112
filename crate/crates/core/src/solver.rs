//! Backward induction on the state grid.
//!
//! Each layer `k` stores three values per node: `v0` when nothing arrived at
//! `t_k`, and `va` / `vb` when a limit sell / buy order arrived inside the
//! spread. The terminal layer forces a final trade. Interior layers are
//! computed in three passes, each parallel over nodes:
//!
//! 1. `W[j]`: expected `k + 1` value reached from a post-decision node `j`
//!    over book moves and arrivals.
//! 2. `v0`: best of waiting or trading, combined with a dark-pool choice.
//! 3. `va`, `vb`: best response to an arrival, continuing at `v0` of the
//!    post-trade node at the same instant.
//!
//! States leaving the grid are projected with [`Grid::snap`] after every
//! trade and every transition; the solver, the forward simulator and the
//! oracle share this convention.

use std::time::Instant;

use rayon::prelude::*;

use crate::accounting::{
    admissible_controls, trade_effect, ControlMesh, EventKind, HiddenFlags, SwitchDecision,
    TraderKind,
};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec, Node, SnapInfo};
use crate::market::{
    continuous_outcome, stream_rng, Arrival, BinomialKernel, BookState, ModelParams, StepDraws,
};
use crate::reward::RewardSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarketModel {
    /// Exact expectations over the enumerated one-step outcomes.
    Binomial(BinomialKernel),
    /// Euler steps of the diffusion-plus-Poisson model, averaged over
    /// `samples` draws from per-node random streams.
    Continuous { samples: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub params: ModelParams,
    pub model: MarketModel,
    pub grid: Grid,
    pub reward: RewardSpec,
    pub trader: TraderKind,
    pub mesh: ControlMesh,
}

impl Problem {
    pub fn new(
        params: ModelParams,
        model: MarketModel,
        grid: Grid,
        reward: RewardSpec,
        trader: TraderKind,
        mesh: ControlMesh,
    ) -> Result<Problem> {
        params.validate()?;
        reward.validate()?;
        mesh.validate()?;
        match model {
            MarketModel::Binomial(kernel) => kernel.validate()?,
            MarketModel::Continuous { samples, .. } => {
                if samples == 0 {
                    return Err(Error::InvalidParams("mc samples must be > 0".into()));
                }
            }
        }
        Ok(Problem {
            params,
            model,
            grid,
            reward,
            trader,
            mesh,
        })
    }

    /// Binomial reference setup on the default grid.
    pub fn reference(trader: TraderKind, epsilon: f64) -> Result<Problem> {
        let mut params = ModelParams::binomial_reference();
        params.epsilon = epsilon;
        Problem::new(
            params,
            MarketModel::Binomial(BinomialKernel::default()),
            Grid::build(GridSpec::default())?,
            RewardSpec::default(),
            trader,
            ControlMesh::default(),
        )
    }

    pub fn book(&self, node: usize) -> BookState {
        let n = self.grid.node(node);
        BookState::new(n.qa as f64, n.qb as f64, n.pa, n.pb)
    }

    /// Applies a switch at a node and projects the result onto the grid.
    /// Returns the post-decision node, the cash change and the projection
    /// flags. `u` must be admissible for `kind`.
    pub fn post_decision(
        &self,
        kind: EventKind,
        node: usize,
        u: SwitchDecision,
    ) -> (usize, f64, SnapInfo) {
        let n = self.grid.node(node);
        let book = BookState::new(n.qa as f64, n.qb as f64, n.pa, n.pb);
        let eff = trade_effect(kind, &book, u, &self.params);
        let (j, info) = self.grid.snap(
            eff.book.qa,
            eff.book.qb,
            n.z as f64 + eff.shares,
            eff.book.pa,
            eff.book.pb,
        );
        (j, eff.cash, info)
    }

    /// Terminal value of a final switch from a node: cash plus valuation of
    /// the (unprojected) final inventory at the post-trade quotes.
    pub fn terminal_value(&self, node: usize, u: SwitchDecision) -> f64 {
        let n = self.grid.node(node);
        let book = BookState::new(n.qa as f64, n.qb as f64, n.pa, n.pb);
        let eff = trade_effect(EventKind::Terminal, &book, u, &self.params);
        self.reward.r_c * eff.cash
            + self
                .reward
                .inventory_term(n.z as f64 + eff.shares, eff.book.pa, eff.book.pb)
    }

    /// Arrival as seen at a grid node: a book projected onto a one-tick
    /// spread has no room for it, so it is dropped.
    #[inline]
    pub fn arrival_at(&self, arrival: Arrival, node: usize) -> Arrival {
        if arrival != Arrival::None {
            let n = self.grid.node(node);
            if n.pa - n.pb < 2 {
                return Arrival::None;
            }
        }
        arrival
    }

    /// Per-step dark-pool fill probabilities after a decision at `(pa, pb)`.
    pub fn fill_probs(&self, pa: i32, pb: i32) -> (f64, f64) {
        match self.model {
            MarketModel::Binomial(kernel) => (kernel.fill_buy, kernel.fill_sell),
            MarketModel::Continuous { .. } => {
                self.params.fill_probs(pa - pb, self.grid.spec().dt)
            }
        }
    }
}

/// Interior decision at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Wait,
    Trade(SwitchDecision),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePolicy {
    /// Decision when nothing arrived (the forced trade at the last instant).
    pub interior: Action,
    /// Dark-pool orders posted with the interior decision.
    pub hidden: HiddenFlags,
    /// Response to an ask-side arrival. Nodes with a one-tick spread never
    /// see arrivals and hold zero here.
    pub ask: SwitchDecision,
    /// Response to a bid-side arrival.
    pub bid: SwitchDecision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub v0: Vec<f64>,
    pub va: Vec<f64>,
    pub vb: Vec<f64>,
    pub policy: Vec<NodePolicy>,
}

impl Layer {
    #[inline]
    pub fn value(&self, arrival: Arrival, node: usize) -> f64 {
        match arrival {
            Arrival::None => self.v0[node],
            Arrival::Ask => self.va[node],
            Arrival::Bid => self.vb[node],
        }
    }
}

/// Decision prescribed at one `(k, node, event)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub kind: EventKind,
    pub action: Action,
    pub hidden: HiddenFlags,
}

/// Values and policies for `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub layers: Vec<Layer>,
}

impl ValueTable {
    pub fn steps(&self) -> usize {
        self.layers.len() - 1
    }

    /// Optimal decision at `(k, node)` given what arrived at `t_k`.
    /// Arrival responses are followed by the interior decision at the
    /// post-trade node; the last instant ignores arrivals.
    pub fn extract_policy(&self, k: usize, node: usize, arrival: Arrival) -> Decision {
        let p = &self.layers[k].policy[node];
        if k == self.steps() {
            return Decision {
                kind: EventKind::Terminal,
                action: p.interior,
                hidden: HiddenFlags::NONE,
            };
        }
        match arrival {
            Arrival::None => Decision {
                kind: EventKind::Interior,
                action: p.interior,
                hidden: p.hidden,
            },
            Arrival::Ask => Decision {
                kind: EventKind::AskArrival,
                action: Action::Trade(p.ask),
                hidden: HiddenFlags::NONE,
            },
            Arrival::Bid => Decision {
                kind: EventKind::BidArrival,
                action: Action::Trade(p.bid),
                hidden: HiddenFlags::NONE,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub threads: usize,
    /// Wall time per layer in seconds, indexed by `k`.
    pub layer_seconds: Vec<f64>,
    /// `(k, node)` pairs whose optimal interior decision hit the inventory
    /// bound of the grid.
    pub inventory_clamped: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub table: ValueTable,
    pub stats: SolveStats,
}

/// Admissible control lists per price pair.
struct Candidates {
    interior: Vec<Vec<SwitchDecision>>,
    ask: Vec<Vec<SwitchDecision>>,
    bid: Vec<Vec<SwitchDecision>>,
    terminal: Vec<Vec<SwitchDecision>>,
}

impl Candidates {
    fn build(problem: &Problem) -> Result<Candidates> {
        let make = |kind| -> Result<Vec<Vec<SwitchDecision>>> {
            problem
                .grid
                .price_pairs()
                .iter()
                .map(|&(pa, pb)| {
                    admissible_controls(kind, pa, pb, problem.trader, &problem.params, &problem.mesh)
                })
                .collect()
        };
        Ok(Candidates {
            interior: make(EventKind::Interior)?,
            ask: make(EventKind::AskArrival)?,
            bid: make(EventKind::BidArrival)?,
            terminal: make(EventKind::Terminal)?,
        })
    }
}

/// Best switch among `candidates` by `score`, first maximum wins.
fn argmax(
    candidates: &[SwitchDecision],
    mut score: impl FnMut(SwitchDecision) -> f64,
) -> (f64, SwitchDecision) {
    let mut best = f64::NEG_INFINITY;
    let mut best_u = SwitchDecision::ZERO;
    for &u in candidates {
        let v = score(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    (best, best_u)
}

/// Intervention operator at one node for a forced-trade event: the best
/// immediate cash plus `continuation` at the projected post-trade node.
/// At [`EventKind::Done`] nothing happens and the continuation at the same
/// node is returned.
pub fn intervention_max(
    problem: &Problem,
    kind: EventKind,
    node: usize,
    continuation: &[f64],
) -> Result<(f64, SwitchDecision)> {
    let n = problem.grid.node(node);
    if kind == EventKind::Done {
        return Ok((continuation[node], SwitchDecision::ZERO));
    }
    let candidates =
        admissible_controls(kind, n.pa, n.pb, problem.trader, &problem.params, &problem.mesh)?;
    if kind == EventKind::Terminal {
        return Ok(argmax(&candidates, |u| problem.terminal_value(node, u)));
    }
    Ok(argmax(&candidates, |u| {
        let (j, cash, _) = problem.post_decision(kind, node, u);
        problem.reward.r_c * cash + continuation[j]
    }))
}

fn run<T: Send>(pool: Option<&rayon::ThreadPool>, n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    match pool {
        Some(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        None => (0..n).map(f).collect(),
    }
}

pub fn terminal_layer(problem: &Problem) -> Result<Layer> {
    let cands = Candidates::build(problem)?;
    Ok(terminal_with(problem, &cands, None))
}

fn terminal_with(problem: &Problem, cands: &Candidates, pool: Option<&rayon::ThreadPool>) -> Layer {
    let block = problem.grid.block_len();
    let rows = run(pool, problem.grid.len(), |i| {
        argmax(&cands.terminal[i / block], |u| problem.terminal_value(i, u))
    });
    let v0: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let policy = rows
        .iter()
        .map(|&(_, u)| NodePolicy {
            interior: Action::Trade(u),
            hidden: HiddenFlags::NONE,
            ask: u,
            bid: u,
        })
        .collect();
    Layer {
        va: v0.clone(),
        vb: v0.clone(),
        v0,
        policy,
    }
}

/// Expected `k + 1` value from post-decision node `j`, before the dark pool.
fn book_expectation(problem: &Problem, k: usize, next: &Layer, j: usize) -> f64 {
    let n = problem.grid.node(j);
    let book = BookState::new(n.qa as f64, n.qb as f64, n.pa, n.pb);
    let z = n.z as f64;
    let p = &problem.params;
    match problem.model {
        MarketModel::Binomial(kernel) => {
            let mut acc = 0.0;
            kernel.for_each_book_outcome(&book, p.delta_a, p.delta_b, |prob, s| {
                let (i, _) = problem.grid.snap(s.qa, s.qb, z, s.pa, s.pb);
                acc += prob * next.value(problem.arrival_at(s.arrival, i), i);
            });
            acc
        }
        MarketModel::Continuous { samples, seed } => {
            let dt = problem.grid.spec().dt;
            let mut rng = stream_rng(seed, (k * problem.grid.len() + j) as u64);
            let mut acc = 0.0;
            for _ in 0..samples {
                let draws = StepDraws::sample(&mut rng);
                let s = continuous_outcome(&book, p, dt, &draws).next;
                let (i, _) = problem.grid.snap(s.qa, s.qb, z, s.pa, s.pb);
                acc += next.value(problem.arrival_at(s.arrival, i), i);
            }
            acc / samples as f64
        }
    }
}

/// Continuation of posting `h` at post-decision node `j`, given the book
/// expectations `w` of layer `k`: hidden fills shift inventory by one limit
/// and settle at the mid.
fn hidden_continuation(problem: &Problem, w: &[f64], j: usize, h: HiddenFlags) -> f64 {
    if !h.ha && !h.hb {
        return w[j];
    }
    let n = problem.grid.node(j);
    let mid = 0.5 * (n.pa as f64 + n.pb as f64);
    let (p_buy, p_sell) = problem.fill_probs(n.pa, n.pb);
    let p = &problem.params;
    let r_c = problem.reward.r_c;
    let shifted = |dz: f64| {
        problem
            .grid
            .snap(n.qa as f64, n.qb as f64, n.z as f64 + dz, n.pa, n.pb)
            .0
    };
    if h.ha {
        (1.0 - p_buy) * w[j] + p_buy * (w[shifted(p.delta_a)] - r_c * p.delta_a * mid)
    } else {
        (1.0 - p_sell) * w[j] + p_sell * (w[shifted(-p.delta_b)] + r_c * p.delta_b * mid)
    }
}

/// Expected continuation from post-decision node `j` at layer `k` with
/// dark-pool flags `h`, including the expected hidden-order cash.
pub fn expectation_estimate(
    problem: &Problem,
    k: usize,
    next: &Layer,
    j: usize,
    h: HiddenFlags,
) -> Result<f64> {
    let n: Node = problem.grid.node(j);
    h.validate(n.pa, n.pb, &problem.params)?;
    let shifted = |dz: f64| {
        problem
            .grid
            .snap(n.qa as f64, n.qb as f64, n.z as f64 + dz, n.pa, n.pb)
            .0
    };
    // Only the entries touched by `h` are needed.
    let mut w = vec![0.0; problem.grid.len()];
    w[j] = book_expectation(problem, k, next, j);
    for j2 in [shifted(problem.params.delta_a), shifted(-problem.params.delta_b)] {
        w[j2] = book_expectation(problem, k, next, j2);
    }
    Ok(hidden_continuation(problem, &w, j, h))
}

struct InteriorRow {
    v0: f64,
    action: Action,
    hidden: HiddenFlags,
    clamped: bool,
}

fn interior_row(problem: &Problem, cands: &Candidates, w: &[f64], i: usize) -> InteriorRow {
    let block = problem.grid.block_len();
    let r_c = problem.reward.r_c;
    let mut best = InteriorRow {
        v0: f64::NEG_INFINITY,
        action: Action::Wait,
        hidden: HiddenFlags::NONE,
        clamped: false,
    };
    let mut consider = |action: Action, j: usize, immediate: f64, clamped: bool| {
        let n = problem.grid.node(j);
        for h in HiddenFlags::admissible(n.pa, n.pb, &problem.params) {
            let v = immediate + hidden_continuation(problem, w, j, h);
            if v > best.v0 {
                best = InteriorRow {
                    v0: v,
                    action,
                    hidden: h,
                    clamped,
                };
            }
        }
    };
    consider(Action::Wait, i, 0.0, false);
    for &u in &cands.interior[i / block] {
        let (j, cash, info) = problem.post_decision(EventKind::Interior, i, u);
        consider(Action::Trade(u), j, r_c * cash, info.inventory_clamped);
    }
    best
}

fn layer_with(
    problem: &Problem,
    cands: &Candidates,
    k: usize,
    next: &Layer,
    pool: Option<&rayon::ThreadPool>,
) -> (Layer, usize) {
    let len = problem.grid.len();
    let block = problem.grid.block_len();
    let r_c = problem.reward.r_c;

    let w = run(pool, len, |j| book_expectation(problem, k, next, j));
    let rows = run(pool, len, |i| interior_row(problem, cands, &w, i));
    let v0: Vec<f64> = rows.iter().map(|r| r.v0).collect();
    let responses = run(pool, len, |i| {
        let pair = i / block;
        let (pa, pb) = problem.grid.price_pairs()[pair];
        if pa - pb < 2 {
            // unreachable: arrivals need two ticks of room
            let stay = (v0[i], SwitchDecision::ZERO);
            return (stay, stay);
        }
        let respond = |kind, list: &[SwitchDecision]| {
            argmax(list, |u| {
                let (j, cash, _) = problem.post_decision(kind, i, u);
                r_c * cash + v0[j]
            })
        };
        (
            respond(EventKind::AskArrival, &cands.ask[pair]),
            respond(EventKind::BidArrival, &cands.bid[pair]),
        )
    });

    let clamped = rows.iter().filter(|r| r.clamped).count();
    let policy = rows
        .iter()
        .zip(&responses)
        .map(|(r, &((_, ua), (_, ub)))| NodePolicy {
            interior: r.action,
            hidden: r.hidden,
            ask: ua,
            bid: ub,
        })
        .collect();
    let layer = Layer {
        v0,
        va: responses.iter().map(|r| r.0 .0).collect(),
        vb: responses.iter().map(|r| r.1 .0).collect(),
        policy,
    };
    (layer, clamped)
}

/// Layer `k < K` from layer `k + 1`.
pub fn backward_step(problem: &Problem, k: usize, next: &Layer) -> Result<Layer> {
    if k >= problem.grid.steps() {
        return Err(Error::InvalidParams(format!(
            "layer {k} is not before the last layer {}",
            problem.grid.steps()
        )));
    }
    let cands = Candidates::build(problem)?;
    Ok(layer_with(problem, &cands, k, next, None).0)
}

/// Full backward induction on `threads` workers. The result does not depend
/// on `threads`.
pub fn solve(problem: &Problem, threads: usize) -> Result<Solution> {
    if threads == 0 {
        return Err(Error::InvalidParams("threads must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    let cands = Candidates::build(problem)?;
    let steps = problem.grid.steps();
    let mut layer_seconds = vec![0.0; steps + 1];
    let mut layers = Vec::with_capacity(steps + 1);

    let start = Instant::now();
    layers.push(terminal_with(problem, &cands, Some(&pool)));
    layer_seconds[steps] = start.elapsed().as_secs_f64();

    let mut inventory_clamped = 0;
    for k in (0..steps).rev() {
        let start = Instant::now();
        let (layer, clamped) = layer_with(problem, &cands, k, layers.last().unwrap(), Some(&pool));
        layer_seconds[k] = start.elapsed().as_secs_f64();
        inventory_clamped += clamped;
        layers.push(layer);
    }
    layers.reverse();
    Ok(Solution {
        table: ValueTable { layers },
        stats: SolveStats {
            threads,
            layer_seconds,
            inventory_clamped,
        },
    })
}
