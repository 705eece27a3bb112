//! Admissible switching controls and the bookkeeping of each switch.
//!
//! A control component `u` is split as `u = [u] + {u}` with `[u] = floor(u)`
//! and `{u}` in `[0, 1)`. Integer parts move the quotes; fractional parts
//! encode partial fills at the terminal time and internalized fills when a
//! limit arrives inside the spread.

use crate::error::{Error, Result};
use crate::market::{BookState, HiddenFills, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraderKind {
    Regular,
    Internalizing,
}

impl std::str::FromStr for TraderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "regular" | "reg" => Ok(TraderKind::Regular),
            "internalizing" | "int" => Ok(TraderKind::Internalizing),
            other => Err(Error::Config(format!("unknown trader kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for TraderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TraderKind::Regular => "regular",
            TraderKind::Internalizing => "internalizing",
        })
    }
}

/// What kind of decision instant the trader faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// No arrival; the trader may trade or wait.
    Interior,
    AskArrival,
    BidArrival,
    /// Last trading instant; fractional limits allowed.
    Terminal,
    /// After the horizon.
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Ask,
    Bid,
}

impl EventKind {
    pub fn arrival_on(self, side: Side) -> bool {
        matches!(
            (self, side),
            (EventKind::AskArrival, Side::Ask) | (EventKind::BidArrival, Side::Bid)
        )
    }
}

/// Numbers of limits taken on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchDecision {
    pub ua: f64,
    pub ub: f64,
}

impl SwitchDecision {
    pub const ZERO: SwitchDecision = SwitchDecision { ua: 0.0, ub: 0.0 };

    pub fn new(ua: f64, ub: f64) -> Self {
        SwitchDecision { ua, ub }
    }

    pub fn get(&self, side: Side) -> f64 {
        match side {
            Side::Ask => self.ua,
            Side::Bid => self.ub,
        }
    }
}

#[inline]
pub fn int_part(u: f64) -> f64 {
    u.floor()
}

#[inline]
pub fn frac_part(u: f64) -> f64 {
    u - u.floor()
}

#[inline]
fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Dark-pool participation: `ha` posts a hidden buy, `hb` a hidden sell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HiddenFlags {
    pub ha: bool,
    pub hb: bool,
}

impl HiddenFlags {
    pub const NONE: HiddenFlags = HiddenFlags {
        ha: false,
        hb: false,
    };
    pub const BUY: HiddenFlags = HiddenFlags {
        ha: true,
        hb: false,
    };
    pub const SELL: HiddenFlags = HiddenFlags {
        ha: false,
        hb: true,
    };

    pub fn validate(&self, pa: i32, pb: i32, params: &ModelParams) -> Result<()> {
        if self.ha && self.hb {
            return Err(Error::InvalidHidden("cannot post both a hidden buy and sell".into()));
        }
        if self.ha && pb >= params.pa_bar {
            return Err(Error::InvalidHidden(format!(
                "hidden buy not allowed with bid {pb} >= buy limit {}",
                params.pa_bar
            )));
        }
        if self.hb && pa <= params.pb_under {
            return Err(Error::InvalidHidden(format!(
                "hidden sell not allowed with ask {pa} <= sell limit {}",
                params.pb_under
            )));
        }
        Ok(())
    }

    /// Admissible flags at the given quotes, in lexicographic `(ha, hb)` order.
    pub fn admissible(pa: i32, pb: i32, params: &ModelParams) -> Vec<HiddenFlags> {
        let mut out = vec![HiddenFlags::NONE];
        if pa > params.pb_under {
            out.push(HiddenFlags::SELL);
        }
        if pb < params.pa_bar {
            out.push(HiddenFlags::BUY);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraderPosition {
    pub inventory: f64,
    pub cash: f64,
}

/// Discretization of the fractional part of controls where the admissible
/// set is a continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlMesh {
    pub fraction_step: f64,
}

impl Default for ControlMesh {
    fn default() -> Self {
        ControlMesh {
            fraction_step: 0.25,
        }
    }
}

impl ControlMesh {
    pub fn validate(&self) -> Result<()> {
        let n = 1.0 / self.fraction_step;
        if !(self.fraction_step > 0.0 && self.fraction_step <= 1.0 && (n - n.round()).abs() < 1e-9)
        {
            return Err(Error::InvalidParams(format!(
                "fraction step {} must be 1/n for a positive integer n",
                self.fraction_step
            )));
        }
        Ok(())
    }

    /// Mesh points of `[lo, hi]`, both ends included.
    pub fn points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = ((hi - lo) / self.fraction_step).round() as i64;
        (0..=n.max(0))
            .map(|i| lo + i as f64 * self.fraction_step)
            .collect()
    }
}

/// Options on the arrival side: `D^j(room)` together with `{2, ..., room}`.
fn arrival_side_values(room: i32, trader: TraderKind, mesh: &ControlMesh) -> Vec<f64> {
    let mut values = if room >= 1 {
        match trader {
            TraderKind::Internalizing => mesh.points(-1.0, 1.0),
            TraderKind::Regular => vec![-1.0, 0.0, 1.0],
        }
    } else if room == 0 {
        vec![-1.0, 0.0]
    } else {
        vec![-1.0]
    };
    values.extend((2..=room).map(|k| k as f64));
    values
}

fn integer_values(room: i32) -> Vec<f64> {
    (0..=room.max(0)).map(|k| k as f64).collect()
}

/// Enumerates the admissible controls for a trader at quotes `(pa, pb)`, in
/// lexicographic `(ua, ub)` order.
///
/// At interior instants the pair `(0, 0)` is excluded; not trading is a
/// separate wait action in the solver.
pub fn admissible_controls(
    kind: EventKind,
    pa: i32,
    pb: i32,
    trader: TraderKind,
    params: &ModelParams,
    mesh: &ControlMesh,
) -> Result<Vec<SwitchDecision>> {
    if pa <= pb {
        return Err(Error::InvalidState(format!("ask {pa} must exceed bid {pb}")));
    }
    let room_a = params.pa_bar - pa;
    let room_b = pb - params.pb_under;
    let (ask_values, bid_values) = match kind {
        EventKind::Done => return Ok(vec![SwitchDecision::ZERO]),
        EventKind::Interior => (integer_values(room_a), integer_values(room_b)),
        EventKind::AskArrival => (
            arrival_side_values(room_a, trader, mesh),
            integer_values(room_b),
        ),
        EventKind::BidArrival => (
            integer_values(room_a),
            arrival_side_values(room_b, trader, mesh),
        ),
        EventKind::Terminal => (
            mesh.points(0.0, room_a.max(0) as f64),
            mesh.points(0.0, room_b.max(0) as f64),
        ),
    };
    let mut out = Vec::with_capacity(ask_values.len() * bid_values.len());
    for &ua in &ask_values {
        for &ub in &bid_values {
            if kind == EventKind::Interior && ua == 0.0 && ub == 0.0 {
                continue;
            }
            out.push(SwitchDecision { ua, ub });
        }
    }
    Ok(out)
}

fn check_component(kind: EventKind, side: Side, u: f64) -> Result<()> {
    let bad = |why: &str| {
        Err(Error::InvalidControl(format!(
            "{side:?} control {u} at {kind:?}: {why}"
        )))
    };
    if !u.is_finite() {
        return bad("not finite");
    }
    match kind {
        EventKind::Done => {
            if u != 0.0 {
                return bad("no trading after the horizon");
            }
        }
        EventKind::Terminal => {
            if u < 0.0 {
                return bad("must be non-negative");
            }
        }
        _ if kind.arrival_on(side) => {
            if u < -1.0 {
                return bad("must be at least -1");
            }
            if u > 1.0 && frac_part(u) != 0.0 {
                return bad("must be an integer above 1");
            }
        }
        _ => {
            if u < 0.0 || frac_part(u) != 0.0 {
                return bad("must be a non-negative integer");
            }
        }
    }
    Ok(())
}

#[inline]
fn shares_unchecked(kind: EventKind, arrival: bool, q: f64, u: f64, delta: f64) -> f64 {
    let whole = ind(u >= 1.0) * (q + (u - 1.0) * delta);
    match kind {
        EventKind::Done => 0.0,
        EventKind::Terminal => whole + ind(int_part(u) == 0.0) * u * q,
        _ => {
            if arrival {
                whole + ind(u >= 0.0) * delta + ind(int_part(u) <= 0.0) * frac_part(u) * q
            } else {
                whole
            }
        }
    }
}

/// Shares bought (ask side) or sold (bid side) by taking `u` limits.
pub fn shares_traded(side: Side, kind: EventKind, q: f64, u: f64, delta: f64) -> Result<f64> {
    check_component(kind, side, u)?;
    if q < 0.0 {
        return Err(Error::InvalidState(format!("negative volume {q}")));
    }
    Ok(shares_unchecked(kind, kind.arrival_on(side), q, u, delta))
}

/// Cash paid on the ask side or received on the bid side. Each level beyond
/// the best quote is one tick further away from the mid: higher on the ask,
/// lower on the bid.
#[inline]
fn cash_unchecked(
    side: Side,
    kind: EventKind,
    arrival: bool,
    q: f64,
    p: f64,
    u: f64,
    delta: f64,
    epsilon: f64,
) -> f64 {
    let away = match side {
        Side::Ask => 1.0,
        Side::Bid => -1.0,
    };
    match kind {
        EventKind::Done => 0.0,
        EventKind::Terminal => {
            let n = int_part(u);
            let ladder = 0.5 * n * (n - 1.0) + n * frac_part(u);
            ind(u >= 1.0) * (p * (q + (u - 1.0) * delta) + away * ladder * delta)
                + ind(n == 0.0) * p * u * q
        }
        _ => {
            let whole = ind(u >= 1.0) * (p * (q + (u - 1.0) * delta) + away * 0.5 * u * (u - 1.0) * delta);
            if arrival {
                whole
                    + ind(u >= 0.0) * (p - away) * delta
                    + ind(int_part(u) <= 0.0) * (p + away * epsilon) * frac_part(u) * q
            } else {
                whole
            }
        }
    }
}

pub fn cash_flow(
    side: Side,
    kind: EventKind,
    q: f64,
    p: i32,
    u: f64,
    delta: f64,
    epsilon: f64,
) -> Result<f64> {
    check_component(kind, side, u)?;
    if q < 0.0 {
        return Err(Error::InvalidState(format!("negative volume {q}")));
    }
    Ok(cash_unchecked(
        side,
        kind,
        kind.arrival_on(side),
        q,
        p as f64,
        u,
        delta,
        epsilon,
    ))
}

/// Everything a switch does to the book and the trader's account.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeEffect {
    /// Change in cash: received on the bid minus paid on the ask.
    pub cash: f64,
    /// Change in inventory: bought minus sold.
    pub shares: f64,
    pub book: BookState,
}

/// Unvalidated switch; `u` must come from [`admissible_controls`].
#[inline]
pub(crate) fn trade_effect(
    kind: EventKind,
    state: &BookState,
    u: SwitchDecision,
    params: &ModelParams,
) -> TradeEffect {
    let arr_a = kind.arrival_on(Side::Ask);
    let arr_b = kind.arrival_on(Side::Bid);
    let pay = cash_unchecked(
        Side::Ask,
        kind,
        arr_a,
        state.qa,
        state.pa as f64,
        u.ua,
        params.delta_a,
        params.epsilon,
    );
    let receive = cash_unchecked(
        Side::Bid,
        kind,
        arr_b,
        state.qb,
        state.pb as f64,
        u.ub,
        params.delta_b,
        params.epsilon,
    );
    let bought = shares_unchecked(kind, arr_a, state.qa, u.ua, params.delta_a);
    let sold = shares_unchecked(kind, arr_b, state.qb, u.ub, params.delta_b);
    let volume = |q: f64, u: f64, delta: f64| {
        let n = int_part(u);
        if kind == EventKind::Terminal {
            (1.0 - frac_part(u)) * (ind(u >= 1.0) * delta + ind(n == 0.0) * q)
        } else if n != 0.0 {
            delta
        } else {
            (1.0 - frac_part(u)) * q
        }
    };
    TradeEffect {
        cash: receive - pay,
        shares: bought - sold,
        book: BookState::new(
            volume(state.qa, u.ua, params.delta_a),
            volume(state.qb, u.ub, params.delta_b),
            state.pa + int_part(u.ua) as i32,
            state.pb - int_part(u.ub) as i32,
        ),
    }
}

/// Net cash change `-f^a + f^b` of a switch.
pub fn net_cash_flow(
    kind: EventKind,
    state: &BookState,
    u: SwitchDecision,
    params: &ModelParams,
) -> Result<f64> {
    check_component(kind, Side::Ask, u.ua)?;
    check_component(kind, Side::Bid, u.ub)?;
    Ok(trade_effect(kind, state, u, params).cash)
}

/// Book and inventory immediately after a switch.
pub fn apply_switch(
    kind: EventKind,
    state: &BookState,
    inventory: f64,
    u: SwitchDecision,
    params: &ModelParams,
) -> Result<(BookState, f64)> {
    check_component(kind, Side::Ask, u.ua)?;
    check_component(kind, Side::Bid, u.ub)?;
    let effect = trade_effect(kind, state, u, params);
    if effect.book.pa <= effect.book.pb {
        return Err(Error::InvalidControl(format!(
            "switch {u:?} crosses the book: ask {} bid {}",
            effect.book.pa, effect.book.pb
        )));
    }
    Ok((effect.book, inventory + effect.shares))
}

/// Expected cash per unit time from resting hidden orders, given per-unit
/// fill rates on each side.
#[inline]
pub fn hidden_drift_with_rates(
    pa: i32,
    pb: i32,
    h: HiddenFlags,
    delta_a: f64,
    delta_b: f64,
    rate_buy: f64,
    rate_sell: f64,
) -> f64 {
    let mid = 0.5 * (pa as f64 + pb as f64);
    -delta_a * ind(h.ha) * mid * rate_buy + delta_b * ind(h.hb) * mid * rate_sell
}

/// Finite-variation part of the hidden-order cash process.
pub fn hidden_drift(pa: i32, pb: i32, h: HiddenFlags, params: &ModelParams) -> Result<f64> {
    h.validate(pa, pb, params)?;
    let spread = pa - pb;
    Ok(hidden_drift_with_rates(
        pa,
        pb,
        h,
        params.delta_a,
        params.delta_b,
        params.lambda_a.rate(spread),
        params.lambda_b.rate(spread),
    ))
}

/// Settles dark-pool liquidity events against the posted hidden orders at
/// the mid price.
pub fn apply_hidden_fills(
    position: TraderPosition,
    pa: i32,
    pb: i32,
    h: HiddenFlags,
    fills: HiddenFills,
    params: &ModelParams,
) -> TraderPosition {
    let mid = 0.5 * (pa as f64 + pb as f64);
    let mut out = position;
    if h.ha && fills.buy {
        out.inventory += params.delta_a;
        out.cash -= params.delta_a * mid;
    }
    if h.hb && fills.sell {
        out.inventory -= params.delta_b;
        out.cash += params.delta_b * mid;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> ModelParams {
        ModelParams::binomial_reference()
    }

    #[test]
    fn interior_rectangle_has_eleven_elements() {
        let set = admissible_controls(
            EventKind::Interior,
            16,
            15,
            TraderKind::Regular,
            &params(),
            &ControlMesh::default(),
        )
        .unwrap();
        assert_eq!(set.len(), 11);
        assert!(!set.contains(&SwitchDecision::ZERO));
        assert_eq!(set[0], SwitchDecision::new(0.0, 1.0));
        assert_eq!(*set.last().unwrap(), SwitchDecision::new(2.0, 3.0));
    }

    #[test]
    fn done_allows_only_zero() {
        let set = admissible_controls(
            EventKind::Done,
            16,
            15,
            TraderKind::Internalizing,
            &params(),
            &ControlMesh::default(),
        )
        .unwrap();
        assert_eq!(set, vec![SwitchDecision::ZERO]);
    }

    #[test]
    fn arrival_sets_at_and_below_the_buy_limit() {
        let mesh = ControlMesh::default();
        let at_limit = admissible_controls(
            EventKind::AskArrival,
            18,
            15,
            TraderKind::Internalizing,
            &params(),
            &mesh,
        )
        .unwrap();
        let mut asks: Vec<f64> = at_limit.iter().map(|u| u.ua).collect();
        asks.dedup();
        assert_eq!(asks, vec![-1.0, 0.0]);

        let one_below = admissible_controls(
            EventKind::AskArrival,
            17,
            15,
            TraderKind::Regular,
            &params(),
            &mesh,
        )
        .unwrap();
        let mut asks: Vec<f64> = one_below.iter().map(|u| u.ua).collect();
        asks.dedup();
        assert_eq!(asks, vec![-1.0, 0.0, 1.0]);

        let inter = admissible_controls(
            EventKind::AskArrival,
            16,
            15,
            TraderKind::Internalizing,
            &params(),
            &mesh,
        )
        .unwrap();
        let mut asks: Vec<f64> = inter.iter().map(|u| u.ua).collect();
        asks.dedup();
        assert_eq!(
            asks,
            vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0]
        );
    }

    #[test]
    fn crossed_quotes_rejected() {
        assert!(admissible_controls(
            EventKind::Interior,
            15,
            15,
            TraderKind::Regular,
            &params(),
            &ControlMesh::default()
        )
        .is_err());
    }

    #[test]
    fn shares_examples() {
        let s = |kind, q, u| shares_traded(Side::Ask, kind, q, u, 5.0).unwrap();
        assert_eq!(s(EventKind::Interior, 5.0, 0.0), 0.0);
        assert_eq!(s(EventKind::Interior, 5.0, 3.0), 15.0);
        assert!((s(EventKind::AskArrival, 5.0, -0.4) - 3.0).abs() < 1e-12);
        assert_eq!(s(EventKind::Terminal, 5.0, 0.5), 2.5);
        assert!(shares_traded(Side::Ask, EventKind::Interior, 5.0, 0.5, 5.0).is_err());
        assert!(shares_traded(Side::Ask, EventKind::AskArrival, 5.0, -1.5, 5.0).is_err());
    }

    #[test]
    fn cash_examples() {
        let f = |kind, q, p, u, eps| cash_flow(Side::Ask, kind, q, p, u, 5.0, eps).unwrap();
        assert_eq!(f(EventKind::Interior, 5.0, 16, 2.0, 0.0), 165.0);
        assert_eq!(f(EventKind::AskArrival, 5.0, 16, 0.0, 0.0), 75.0);
        assert!((f(EventKind::AskArrival, 5.0, 16, -0.4, 0.1) - 48.3).abs() < 1e-9);
        let state = BookState::new(5.0, 5.0, 16, 15);
        // skipping a trade costs nothing
        assert_eq!(
            net_cash_flow(EventKind::Interior, &state, SwitchDecision::ZERO, &params()).unwrap(),
            0.0
        );
    }

    #[test]
    fn bid_side_mirrors_ask_ladder() {
        // selling two limits at bid 15: 5 shares at 15 and 5 at 14
        let f = cash_flow(Side::Bid, EventKind::Interior, 5.0, 15, 2.0, 5.0, 0.0).unwrap();
        assert_eq!(f, 15.0 * 5.0 + 14.0 * 5.0);
        // selling to a newly arrived bid one tick above
        let f = cash_flow(Side::Bid, EventKind::BidArrival, 5.0, 15, 0.0, 5.0, 0.0).unwrap();
        assert_eq!(f, 16.0 * 5.0);
        // terminal 1.5 limits: 4 at 15, then half of 5 at 14
        let f = cash_flow(Side::Bid, EventKind::Terminal, 4.0, 15, 1.5, 5.0, 0.0).unwrap();
        assert_eq!(f, 60.0 + 14.0 * 2.5);
    }

    #[test]
    fn apply_switch_examples() {
        let p = params();
        let s = BookState::new(5.0, 5.0, 16, 15);
        let (next, inv) =
            apply_switch(EventKind::Interior, &s, 0.0, SwitchDecision::new(2.0, 0.0), &p).unwrap();
        assert_eq!((next.qa, next.qb, next.pa, next.pb, inv), (5.0, 5.0, 18, 15, 10.0));

        let (next, inv) =
            apply_switch(EventKind::Interior, &s, 3.0, SwitchDecision::ZERO, &p).unwrap();
        assert_eq!(next, s);
        assert_eq!(inv, 3.0);

        let s4 = BookState::new(4.0, 5.0, 16, 15);
        let (next, inv) =
            apply_switch(EventKind::Terminal, &s4, 1.0, SwitchDecision::new(0.5, 0.0), &p)
                .unwrap();
        assert_eq!(next.qa, 2.0);
        assert_eq!(inv, 3.0);
    }

    #[test]
    fn arrival_pass_through_moves_ask_inward() {
        let p = params();
        let s = BookState::new(3.0, 5.0, 17, 15);
        let (next, inv) =
            apply_switch(EventKind::AskArrival, &s, 0.0, SwitchDecision::new(-1.0, 0.0), &p)
                .unwrap();
        assert_eq!((next.pa, next.qa, inv), (16, 5.0, 0.0));
        let (next, inv) =
            apply_switch(EventKind::AskArrival, &s, 0.0, SwitchDecision::new(0.0, 0.0), &p)
                .unwrap();
        assert_eq!((next.pa, next.qa, inv), (17, 3.0, 5.0));
    }

    #[test]
    fn hidden_drift_examples() {
        let mut p = params();
        p.lambda_a = crate::market::Intensity::Table(vec![0.5]);
        p.lambda_b = crate::market::Intensity::Table(vec![0.5]);
        assert_eq!(hidden_drift(16, 15, HiddenFlags::NONE, &p).unwrap(), 0.0);
        assert_eq!(hidden_drift(16, 15, HiddenFlags::BUY, &p).unwrap(), -38.75);
        assert_eq!(hidden_drift(16, 15, HiddenFlags::SELL, &p).unwrap(), 38.75);
        assert!(hidden_drift(16, 15, HiddenFlags { ha: true, hb: true }, &p).is_err());
    }

    #[test]
    fn hidden_fill_examples() {
        let p = params();
        let start = TraderPosition {
            inventory: 0.0,
            cash: 0.0,
        };
        let both = HiddenFills {
            buy: true,
            sell: true,
        };
        let bought = apply_hidden_fills(start, 16, 15, HiddenFlags::BUY, both, &p);
        assert_eq!((bought.inventory, bought.cash), (5.0, -77.5));
        let sold = apply_hidden_fills(start, 16, 15, HiddenFlags::SELL, both, &p);
        assert_eq!((sold.inventory, sold.cash), (-5.0, 77.5));
        assert_eq!(apply_hidden_fills(start, 16, 15, HiddenFlags::NONE, both, &p), start);
    }

    #[test]
    fn hidden_admissible_order() {
        let p = params();
        assert_eq!(
            HiddenFlags::admissible(16, 15, &p),
            vec![HiddenFlags::NONE, HiddenFlags::SELL, HiddenFlags::BUY]
        );
        assert_eq!(
            HiddenFlags::admissible(19, 18, &p),
            vec![HiddenFlags::NONE, HiddenFlags::SELL]
        );
    }

    fn all_kinds() -> [EventKind; 5] {
        [
            EventKind::Interior,
            EventKind::AskArrival,
            EventKind::BidArrival,
            EventKind::Terminal,
            EventKind::Done,
        ]
    }

    proptest! {
        #[test]
        fn ladder_sum_matches_closed_form(u in 1i32..8, q in 0u32..12, p in 10i32..20) {
            let delta = 5.0;
            let mut ladder = q as f64 * p as f64;
            for k in 1..u {
                ladder += delta * (p + k) as f64;
            }
            let f = cash_flow(Side::Ask, EventKind::Interior, q as f64, p, u as f64, delta, 0.0).unwrap();
            prop_assert_eq!(f, ladder);
        }

        #[test]
        fn regular_controls_subset_of_internalizing(pa in 12i32..20, spread in 1i32..6, k in 0usize..5) {
            let pb = pa - spread;
            let kind = all_kinds()[k];
            let mesh = ControlMesh::default();
            let reg = admissible_controls(kind, pa, pb, TraderKind::Regular, &params(), &mesh).unwrap();
            let int = admissible_controls(kind, pa, pb, TraderKind::Internalizing, &params(), &mesh).unwrap();
            for u in &reg {
                prop_assert!(int.contains(u));
            }
        }

        #[test]
        fn switches_only_widen_except_arrival_pass_through(pa in 13i32..19, spread in 1i32..5, k in 0usize..4, idx in 0usize..200) {
            let pb = pa - spread;
            prop_assume!(pb >= 12);
            let kind = all_kinds()[k];
            let p = params();
            let set = admissible_controls(kind, pa, pb, TraderKind::Internalizing, &p, &ControlMesh::default()).unwrap();
            prop_assume!(!set.is_empty());
            let u = set[idx % set.len()];
            let s = BookState::new(3.0, 4.0, pa, pb);
            if let Ok((next, _)) = apply_switch(kind, &s, 0.0, u, &p) {
                if kind == EventKind::AskArrival && int_part(u.ua) == -1.0 {
                    prop_assert_eq!(next.pa, pa - 1);
                } else {
                    prop_assert!(next.pa >= pa);
                }
                if kind == EventKind::BidArrival && int_part(u.ub) == -1.0 {
                    prop_assert_eq!(next.pb, pb + 1);
                } else {
                    prop_assert!(next.pb <= pb);
                }
            }
        }

        #[test]
        fn net_cash_non_increasing_in_premium(k in 0usize..4, idx in 0usize..200, e1 in 0.0f64..2.0, de in 0.0f64..2.0) {
            let kind = all_kinds()[k];
            let mut p = params();
            let set = admissible_controls(kind, 16, 14, TraderKind::Internalizing, &p, &ControlMesh::default()).unwrap();
            let u = set[idx % set.len()];
            let s = BookState::new(3.0, 4.0, 16, 14);
            p.epsilon = e1;
            let low = net_cash_flow(kind, &s, u, &p).unwrap();
            let pay_low = cash_flow(Side::Ask, kind, s.qa, s.pa, u.ua, p.delta_a, e1).unwrap();
            p.epsilon = e1 + de;
            let high = net_cash_flow(kind, &s, u, &p).unwrap();
            let pay_high = cash_flow(Side::Ask, kind, s.qa, s.pa, u.ua, p.delta_a, e1 + de).unwrap();
            prop_assert!(high <= low);
            prop_assert!(pay_high >= pay_low);
        }

        #[test]
        fn shares_match_cash_per_share_at_best_quote(q in 0.0f64..10.0, u in 0.0f64..1.0) {
            // a terminal partial fill at the best quote costs exactly p per share
            let g = shares_traded(Side::Ask, EventKind::Terminal, q, u, 5.0).unwrap();
            let f = cash_flow(Side::Ask, EventKind::Terminal, q, 16, u, 5.0, 0.0).unwrap();
            prop_assert!((f - 16.0 * g).abs() < 1e-9);
        }
    }
}
