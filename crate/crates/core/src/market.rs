//! Order book state and its transition laws.
//!
//! Two kernels are provided. The continuous kernel discretizes the
//! diffusion-plus-Poisson dynamics with one Euler step per `dt`; the Binomial
//! kernel enumerates every outcome of one step exactly. Both return the book
//! *before* a within-spread arrival is absorbed: the arrival is reported in
//! [`BookState::arrival`] so that a controlled trader can react to it, and
//! [`BookState::settle_arrival`] applies the uncontrolled market response.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::accounting::HiddenFlags;
use crate::error::{Error, Result};

/// Within-spread arrival recorded at an instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Arrival {
    #[default]
    None,
    Ask,
    Bid,
}

/// Best-quote volumes and prices. Prices are integer ticks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BookState {
    pub qa: f64,
    pub qb: f64,
    pub pa: i32,
    pub pb: i32,
    pub arrival: Arrival,
}

impl BookState {
    pub fn new(qa: f64, qb: f64, pa: i32, pb: i32) -> Self {
        BookState {
            qa,
            qb,
            pa,
            pb,
            arrival: Arrival::None,
        }
    }

    pub fn spread(&self) -> i32 {
        self.pa - self.pb
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.pa as f64 + self.pb as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pa <= self.pb {
            return Err(Error::InvalidState(format!(
                "ask {} must exceed bid {}",
                self.pa, self.pb
            )));
        }
        if !(self.qa >= 0.0 && self.qb >= 0.0) || !self.qa.is_finite() || !self.qb.is_finite() {
            return Err(Error::InvalidState(format!(
                "volumes must be finite and non-negative, got ({}, {})",
                self.qa, self.qb
            )));
        }
        if self.arrival != Arrival::None && self.spread() <= 1 {
            return Err(Error::InvalidState(
                "within-spread arrival flagged on a one-tick spread".into(),
            ));
        }
        Ok(())
    }

    /// Uncontrolled response to a flagged arrival: the arriving limit becomes
    /// the new best quote one tick inside and holds the full depth.
    pub fn settle_arrival(&self, delta_a: f64, delta_b: f64) -> BookState {
        let mut next = *self;
        match self.arrival {
            Arrival::None => {}
            Arrival::Ask => {
                next.pa -= 1;
                next.qa = delta_a;
            }
            Arrival::Bid => {
                next.pb += 1;
                next.qb = delta_b;
            }
        }
        next.arrival = Arrival::None;
        next
    }
}

/// Intensity of an event process as a function of the spread in ticks.
#[derive(Debug, Clone, PartialEq)]
pub enum Intensity {
    /// `c * spread`.
    Linear(f64),
    /// Entry `i` is the intensity at spread `i + 1`; the last entry extends to
    /// wider spreads, an empty table is identically zero.
    Table(Vec<f64>),
}

impl Intensity {
    pub fn zero() -> Self {
        Intensity::Table(Vec::new())
    }

    pub fn rate(&self, spread: i32) -> f64 {
        match self {
            Intensity::Linear(c) => c * spread as f64,
            Intensity::Table(values) => {
                if values.is_empty() || spread < 1 {
                    return 0.0;
                }
                let i = ((spread - 1) as usize).min(values.len() - 1);
                values[i]
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(c) = text.strip_prefix("linear:") {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad linear coefficient in '{text}'")))?;
            return Ok(Intensity::Linear(c));
        }
        if let Some(body) = text.strip_prefix("table:") {
            let body = body.trim();
            let inner = body
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Config(format!("table must be bracketed: '{text}'")))?;
            let mut values = Vec::new();
            for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                values.push(
                    part.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad table entry '{part}'")))?,
                );
            }
            return Ok(Intensity::Table(values));
        }
        Err(Error::Config(format!(
            "intensity must be 'linear:c' or 'table:[...]', got '{text}'"
        )))
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            Intensity::Linear(c) => c.is_finite() && *c >= 0.0,
            Intensity::Table(v) => v.iter().all(|x| x.is_finite() && *x >= 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "{name} must be finite and non-negative"
            )))
        }
    }
}

impl std::fmt::Display for Intensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Intensity::Linear(c) => write!(f, "linear:{c}"),
            Intensity::Table(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "table:[{}]", parts.join(","))
            }
        }
    }
}

/// Market and trading-limit parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub theta_a: Intensity,
    pub theta_b: Intensity,
    pub lambda_a: Intensity,
    pub lambda_b: Intensity,
    /// Highest price the trader may buy at (exclusive for new quotes).
    pub pa_bar: i32,
    /// Lowest price the trader may sell at.
    pub pb_under: i32,
    /// Premium paid per internalized share.
    pub epsilon: f64,
    pub horizon: f64,
}

impl ModelParams {
    /// Depth 5, trading limits 12 and 18, no premium.
    pub fn binomial_reference() -> Self {
        ModelParams {
            sigma_a: 1.0,
            sigma_b: 1.0,
            delta_a: 5.0,
            delta_b: 5.0,
            theta_a: Intensity::zero(),
            theta_b: Intensity::zero(),
            lambda_a: Intensity::zero(),
            lambda_b: Intensity::zero(),
            pa_bar: 18,
            pb_under: 12,
            epsilon: 0.0,
            horizon: 9.0,
        }
    }

    /// Uncontrolled book with volatility 10, depth 5 and arrivals at rate
    /// `0.5 * spread`, over 600 time units.
    pub fn book_figure() -> Self {
        ModelParams {
            sigma_a: 10.0,
            sigma_b: 10.0,
            delta_a: 5.0,
            delta_b: 5.0,
            theta_a: Intensity::Linear(0.5),
            theta_b: Intensity::Linear(0.5),
            lambda_a: Intensity::zero(),
            lambda_b: Intensity::zero(),
            pa_bar: 1_000,
            pb_under: 0,
            epsilon: 0.0,
            horizon: 600.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("sigma_a", self.sigma_a), ("sigma_b", self.sigma_b)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be >= 0")));
            }
        }
        for (name, v) in [("delta_a", self.delta_a), ("delta_b", self.delta_b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0")));
            }
        }
        self.theta_a.validate("theta_a")?;
        self.theta_b.validate("theta_b")?;
        self.lambda_a.validate("lambda_a")?;
        self.lambda_b.validate("lambda_b")?;
        if self.pb_under >= self.pa_bar {
            return Err(Error::InvalidParams(format!(
                "pb_under {} must be below pa_bar {}",
                self.pb_under, self.pa_bar
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParams("epsilon must be finite and >= 0".into()));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParams("horizon must be > 0".into()));
        }
        Ok(())
    }

    /// Per-step arrival probabilities. Arrivals need at least two ticks of room.
    pub fn arrival_probs(&self, spread: i32, dt: f64) -> (f64, f64) {
        if spread <= 1 {
            return (0.0, 0.0);
        }
        (
            (self.theta_a.rate(spread) * dt).clamp(0.0, 1.0),
            (self.theta_b.rate(spread) * dt).clamp(0.0, 1.0),
        )
    }

    /// Per-step dark-pool fill probabilities.
    pub fn fill_probs(&self, spread: i32, dt: f64) -> (f64, f64) {
        (
            (self.lambda_a.rate(spread) * dt).clamp(0.0, 1.0),
            (self.lambda_b.rate(spread) * dt).clamp(0.0, 1.0),
        )
    }
}

/// Dark-pool liquidity events in one step: `buy` consumes a hidden buy order,
/// `sell` a hidden sell order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HiddenFills {
    pub buy: bool,
    pub sell: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionOutcome {
    pub prob: f64,
    pub next: BookState,
    pub hidden_fills: HiddenFills,
}

/// Counter-based stream: the same `(seed, stream)` always yields the same
/// sequence regardless of which thread draws it.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random inputs of one continuous step. Every step consumes all seven draws
/// so streams stay aligned whatever happens in the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDraws {
    pub z_a: f64,
    pub z_b: f64,
    pub arrive_a: f64,
    pub arrive_b: f64,
    pub tie: f64,
    pub fill_a: f64,
    pub fill_b: f64,
}

impl StepDraws {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StepDraws {
            z_a: rng.sample(StandardNormal),
            z_b: rng.sample(StandardNormal),
            arrive_a: rng.random(),
            arrive_b: rng.random(),
            tie: rng.random(),
            fill_a: rng.random(),
            fill_b: rng.random(),
        }
    }
}

/// Deterministic core of the continuous step. Depletion is processed before
/// arrivals; if both sides draw an arrival, `tie` keeps exactly one of them.
pub fn continuous_outcome(
    state: &BookState,
    params: &ModelParams,
    dt: f64,
    draws: &StepDraws,
) -> TransitionOutcome {
    let spread = state.spread();
    let sd = dt.sqrt();
    let mut next = BookState::new(state.qa, state.qb, state.pa, state.pb);

    let qa = state.qa + params.sigma_a * sd * draws.z_a;
    if qa <= 0.0 {
        next.pa += 1;
        next.qa = params.delta_a;
    } else {
        next.qa = qa;
    }
    let qb = state.qb + params.sigma_b * sd * draws.z_b;
    if qb <= 0.0 {
        next.pb -= 1;
        next.qb = params.delta_b;
    } else {
        next.qb = qb;
    }

    let (p_ask, p_bid) = params.arrival_probs(spread, dt);
    let ask = draws.arrive_a < p_ask;
    let bid = draws.arrive_b < p_bid;
    next.arrival = match (ask, bid) {
        (false, false) => Arrival::None,
        (true, false) => Arrival::Ask,
        (false, true) => Arrival::Bid,
        (true, true) => {
            if draws.tie < 0.5 {
                Arrival::Ask
            } else {
                Arrival::Bid
            }
        }
    };

    let (f_buy, f_sell) = params.fill_probs(spread, dt);
    TransitionOutcome {
        prob: 1.0,
        next,
        hidden_fills: HiddenFills {
            buy: draws.fill_a < f_buy,
            sell: draws.fill_b < f_sell,
        },
    }
}

/// One Euler step of the uncontrolled continuous model.
pub fn step_continuous<R: Rng + ?Sized>(
    state: &BookState,
    params: &ModelParams,
    dt: f64,
    rng: &mut R,
) -> Result<TransitionOutcome> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    state.validate()?;
    let draws = StepDraws::sample(rng);
    Ok(continuous_outcome(state, params, dt, &draws))
}

/// One row of a simulated book path with the depletion (`l*`) and arrival
/// (`n*`) counters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BookPathPoint {
    pub t: f64,
    pub qa: f64,
    pub qb: f64,
    pub pa: i32,
    pub pb: i32,
    pub la: u64,
    pub lb: u64,
    pub na: u64,
    pub nb: u64,
}

pub fn simulate_book(
    params: &ModelParams,
    initial: BookState,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<Vec<BookPathPoint>> {
    params.validate()?;
    initial.validate()?;
    if !(dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParams("t_end and dt must be > 0".into()));
    }
    let steps = (t_end / dt).round();
    if (steps * dt - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "dt {dt} does not divide t_end {t_end}"
        )));
    }
    let steps = steps as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = BookState::new(initial.qa, initial.qb, initial.pa, initial.pb);
    let (mut la, mut lb, mut na, mut nb) = (0u64, 0u64, 0u64, 0u64);
    let mut path = Vec::with_capacity(steps + 1);
    let point = |t: f64, s: &BookState, la, lb, na, nb| BookPathPoint {
        t,
        qa: s.qa,
        qb: s.qb,
        pa: s.pa,
        pb: s.pb,
        la,
        lb,
        na,
        nb,
    };
    path.push(point(0.0, &state, 0, 0, 0, 0));
    for i in 1..=steps {
        let out = step_continuous(&state, params, dt, &mut rng)?;
        la += (out.next.pa - state.pa) as u64;
        lb += (state.pb - out.next.pb) as u64;
        match out.next.arrival {
            Arrival::Ask => na += 1,
            Arrival::Bid => nb += 1,
            Arrival::None => {}
        }
        state = out.next.settle_arrival(params.delta_a, params.delta_b);
        path.push(point(i as f64 * dt, &state, la, lb, na, nb));
    }
    Ok(path)
}

/// Per-step Binomial kernel: volumes move by one share either way, a
/// within-spread arrival happens with probability `arrival_coef * min(spread - 1, 1)`
/// split evenly between the sides, and one dark-pool liquidity event (buy or
/// sell, never both) happens with the stated probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialKernel {
    pub arrival_coef: f64,
    pub fill_buy: f64,
    pub fill_sell: f64,
}

impl Default for BinomialKernel {
    fn default() -> Self {
        BinomialKernel {
            arrival_coef: 0.3,
            fill_buy: 0.25,
            fill_sell: 0.25,
        }
    }
}

impl BinomialKernel {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.arrival_coef)
            && self.fill_buy >= 0.0
            && self.fill_sell >= 0.0
            && self.fill_buy + self.fill_sell <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "binomial probabilities must lie in [0,1] and fills sum to <= 1".into(),
            ))
        }
    }

    pub fn arrival_prob(&self, spread: i32) -> f64 {
        self.arrival_coef * ((spread - 1).clamp(0, 1) as f64)
    }

    /// Visits the book outcomes of one step, ignoring the dark pool, in a
    /// fixed order: ask move, bid move, arrival.
    #[inline]
    pub fn for_each_book_outcome<F>(&self, state: &BookState, delta_a: f64, delta_b: f64, mut visit: F)
    where
        F: FnMut(f64, BookState),
    {
        let p_n = self.arrival_prob(state.spread());
        let arrivals = [
            (Arrival::None, 1.0 - p_n),
            (Arrival::Ask, 0.5 * p_n),
            (Arrival::Bid, 0.5 * p_n),
        ];
        for ra in [-1.0, 1.0] {
            let (qa, pa) = deplete(state.qa + ra, state.pa, 1, delta_a);
            for rb in [-1.0, 1.0] {
                let (qb, pb) = deplete(state.qb + rb, state.pb, -1, delta_b);
                for &(arrival, p_arr) in &arrivals {
                    if p_arr <= 0.0 {
                        continue;
                    }
                    let next = BookState {
                        qa,
                        qb,
                        pa,
                        pb,
                        arrival,
                    };
                    visit(0.25 * p_arr, next);
                }
            }
        }
    }

    /// Dark-pool events with their probabilities: none, buy fill, sell fill.
    pub fn fill_outcomes(&self) -> [(HiddenFills, f64); 3] {
        [
            (HiddenFills::default(), 1.0 - self.fill_buy - self.fill_sell),
            (
                HiddenFills {
                    buy: true,
                    sell: false,
                },
                self.fill_buy,
            ),
            (
                HiddenFills {
                    buy: false,
                    sell: true,
                },
                self.fill_sell,
            ),
        ]
    }

    /// Visits every positive-probability outcome: book outcomes in
    /// [`Self::for_each_book_outcome`] order, each split by dark-pool event.
    pub fn for_each_outcome<F>(&self, state: &BookState, delta_a: f64, delta_b: f64, mut visit: F)
    where
        F: FnMut(f64, BookState, HiddenFills),
    {
        let fills = self.fill_outcomes();
        self.for_each_book_outcome(state, delta_a, delta_b, |p_book, next| {
            for &(fill, p_fill) in &fills {
                if p_fill > 0.0 {
                    visit(p_book * p_fill, next, fill);
                }
            }
        });
    }

    /// Draws one outcome of the step.
    pub fn sample_outcome<R: Rng + ?Sized>(
        &self,
        state: &BookState,
        delta_a: f64,
        delta_b: f64,
        rng: &mut R,
    ) -> TransitionOutcome {
        let ra = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let rb = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let u_arr: f64 = rng.random();
        let u_fill: f64 = rng.random();
        let p_n = self.arrival_prob(state.spread());
        let (qa, pa) = deplete(state.qa + ra, state.pa, 1, delta_a);
        let (qb, pb) = deplete(state.qb + rb, state.pb, -1, delta_b);
        let arrival = if u_arr < 1.0 - p_n {
            Arrival::None
        } else if u_arr < 1.0 - 0.5 * p_n {
            Arrival::Ask
        } else {
            Arrival::Bid
        };
        let hidden_fills = if u_fill < self.fill_buy {
            HiddenFills {
                buy: true,
                sell: false,
            }
        } else if u_fill < self.fill_buy + self.fill_sell {
            HiddenFills {
                buy: false,
                sell: true,
            }
        } else {
            HiddenFills::default()
        };
        TransitionOutcome {
            prob: 1.0,
            next: BookState {
                qa,
                qb,
                pa,
                pb,
                arrival,
            },
            hidden_fills,
        }
    }
}

#[inline]
fn deplete(q: f64, p: i32, step: i32, delta: f64) -> (f64, i32) {
    if q <= 0.0 {
        (delta, p + step)
    } else {
        (q, p)
    }
}

/// Exact one-step outcome list of the Binomial kernel from a post-decision
/// book, with the hidden flags checked for admissibility.
pub fn binomial_transitions(
    state: &BookState,
    h: HiddenFlags,
    kernel: &BinomialKernel,
    params: &ModelParams,
) -> Result<Vec<TransitionOutcome>> {
    state.validate()?;
    h.validate(state.pa, state.pb, params)?;
    kernel.validate()?;
    let mut out = Vec::with_capacity(36);
    kernel.for_each_outcome(state, params.delta_a, params.delta_b, |prob, next, fills| {
        out.push(TransitionOutcome {
            prob,
            next,
            hidden_fills: fills,
        })
    });
    Ok(out)
}
