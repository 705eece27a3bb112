//! Flat `key = value` run configuration with a canonical form and hash.
//!
//! Lines may carry `#` comments. Unset keys keep the defaults of the
//! Binomial reference setup. The canonical form lists every key in sorted
//! order, and the hash is the first 16 hex digits of its SHA-256.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::accounting::{ControlMesh, TraderKind};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::market::{BinomialKernel, BookState, Intensity, ModelParams};
use crate::reward::{RewardSpec, RewardVariant};
use crate::solver::{MarketModel, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Binomial,
    Continuous,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "binomial" => Ok(ModelKind::Binomial),
            "continuous" => Ok(ModelKind::Continuous),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Binomial => "binomial",
            ModelKind::Continuous => "continuous",
        })
    }
}

/// Initial state for simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub qa: f64,
    pub qb: f64,
    pub z: f64,
    pub pa: i32,
    pub pb: i32,
}

impl InitialState {
    pub fn book(&self) -> BookState {
        BookState::new(self.qa, self.qb, self.pa, self.pb)
    }

    /// Parses `qa,qb,z,pa,pb`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Config(format!("x0 needs 'qa,qb,z,pa,pb', got '{text}'")));
        }
        Ok(InitialState {
            qa: num(parts[0])?,
            qb: num(parts[1])?,
            z: num(parts[2])?,
            pa: int(parts[3])?,
            pb: int(parts[4])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    pub kernel: BinomialKernel,
    pub mc_samples: usize,
    pub mc_seed: u64,
    pub grid: GridSpec,
    pub reward: RewardSpec,
    pub trader: TraderKind,
    pub fraction_step: f64,
    pub x0: InitialState,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::Binomial,
            params: ModelParams::binomial_reference(),
            kernel: BinomialKernel::default(),
            mc_samples: 512,
            mc_seed: 0,
            grid: GridSpec::default(),
            reward: RewardSpec::default(),
            trader: TraderKind::Regular,
            fraction_step: ControlMesh::default().fraction_step,
            x0: InitialState {
                qa: 5.0,
                qb: 5.0,
                z: 0.0,
                pa: 16,
                pb: 15,
            },
        }
    }
}

fn num(v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("expected a number, got '{v}'")))
}

fn int(v: &str) -> Result<i32> {
    v.trim()
        .parse::<i32>()
        .map_err(|_| Error::Config(format!("expected an integer, got '{v}'")))
}

fn uint(v: &str) -> Result<u64> {
    v.trim()
        .parse::<u64>()
        .map_err(|_| Error::Config(format!("expected a non-negative integer, got '{v}'")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies every `key = value` line of `text` on top of the current
    /// values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| {
                let msg = match e {
                    Error::Config(m) => m,
                    other => other.to_string(),
                };
                Error::Config(format!("line {}: {msg}", lineno + 1))
            })?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let p = &mut self.params;
        let g = &mut self.grid;
        match key {
            "model" => self.model = v.parse()?,
            "trader" => self.trader = v.parse()?,
            "sigma_a" => p.sigma_a = num(v)?,
            "sigma_b" => p.sigma_b = num(v)?,
            "delta_a" => p.delta_a = num(v)?,
            "delta_b" => p.delta_b = num(v)?,
            "theta_a" => p.theta_a = Intensity::parse(v)?,
            "theta_b" => p.theta_b = Intensity::parse(v)?,
            "lambda_a" => p.lambda_a = Intensity::parse(v)?,
            "lambda_b" => p.lambda_b = Intensity::parse(v)?,
            "pa_bar" => p.pa_bar = int(v)?,
            "pb_under" => p.pb_under = int(v)?,
            "epsilon" => p.epsilon = num(v)?,
            "horizon" => p.horizon = num(v)?,
            "binomial.arrival_coef" => self.kernel.arrival_coef = num(v)?,
            "binomial.fill_buy" => self.kernel.fill_buy = num(v)?,
            "binomial.fill_sell" => self.kernel.fill_sell = num(v)?,
            "mc_samples" => self.mc_samples = uint(v)? as usize,
            "mc_seed" => self.mc_seed = uint(v)?,
            "grid.q_max" => g.q_max = int(v)?,
            "grid.i_min" => g.i_min = int(v)?,
            "grid.i_max" => g.i_max = int(v)?,
            "grid.pa_min" => g.pa_min = int(v)?,
            "grid.pa_max" => g.pa_max = int(v)?,
            "grid.pb_min" => g.pb_min = int(v)?,
            "grid.pb_max" => g.pb_max = int(v)?,
            "grid.t0" => g.t0 = num(v)?,
            "grid.dt" => g.dt = num(v)?,
            "grid.steps" => g.steps = uint(v)? as usize,
            "reward.r_c" => self.reward.r_c = num(v)?,
            "reward.r_i" => self.reward.r_i = num(v)?,
            "reward.variant" => self.reward.variant = v.parse::<RewardVariant>()?,
            "fraction_step" => self.fraction_step = num(v)?,
            "x0.qa" => self.x0.qa = num(v)?,
            "x0.qb" => self.x0.qb = num(v)?,
            "x0.z" => self.x0.z = num(v)?,
            "x0.pa" => self.x0.pa = int(v)?,
            "x0.pb" => self.x0.pb = int(v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    fn entries(&self) -> BTreeMap<&'static str, String> {
        let p = &self.params;
        let g = &self.grid;
        let mut m = BTreeMap::new();
        m.insert("model", self.model.to_string());
        m.insert("trader", self.trader.to_string());
        m.insert("sigma_a", p.sigma_a.to_string());
        m.insert("sigma_b", p.sigma_b.to_string());
        m.insert("delta_a", p.delta_a.to_string());
        m.insert("delta_b", p.delta_b.to_string());
        m.insert("theta_a", p.theta_a.to_string());
        m.insert("theta_b", p.theta_b.to_string());
        m.insert("lambda_a", p.lambda_a.to_string());
        m.insert("lambda_b", p.lambda_b.to_string());
        m.insert("pa_bar", p.pa_bar.to_string());
        m.insert("pb_under", p.pb_under.to_string());
        m.insert("epsilon", p.epsilon.to_string());
        m.insert("horizon", p.horizon.to_string());
        m.insert("binomial.arrival_coef", self.kernel.arrival_coef.to_string());
        m.insert("binomial.fill_buy", self.kernel.fill_buy.to_string());
        m.insert("binomial.fill_sell", self.kernel.fill_sell.to_string());
        m.insert("mc_samples", self.mc_samples.to_string());
        m.insert("mc_seed", self.mc_seed.to_string());
        m.insert("grid.q_max", g.q_max.to_string());
        m.insert("grid.i_min", g.i_min.to_string());
        m.insert("grid.i_max", g.i_max.to_string());
        m.insert("grid.pa_min", g.pa_min.to_string());
        m.insert("grid.pa_max", g.pa_max.to_string());
        m.insert("grid.pb_min", g.pb_min.to_string());
        m.insert("grid.pb_max", g.pb_max.to_string());
        m.insert("grid.t0", g.t0.to_string());
        m.insert("grid.dt", g.dt.to_string());
        m.insert("grid.steps", g.steps.to_string());
        m.insert("reward.r_c", self.reward.r_c.to_string());
        m.insert("reward.r_i", self.reward.r_i.to_string());
        m.insert("reward.variant", self.reward.variant.to_string());
        m.insert("fraction_step", self.fraction_step.to_string());
        m.insert("x0.qa", self.x0.qa.to_string());
        m.insert("x0.qb", self.x0.qb.to_string());
        m.insert("x0.z", self.x0.z.to_string());
        m.insert("x0.pa", self.x0.pa.to_string());
        m.insert("x0.pb", self.x0.pb.to_string());
        m
    }

    /// Every key in sorted order, one `key = value` per line.
    pub fn canonical(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        hex::encode(digest)[..16].to_string()
    }

    pub fn mesh(&self) -> ControlMesh {
        ControlMesh {
            fraction_step: self.fraction_step,
        }
    }

    pub fn market_model(&self) -> MarketModel {
        match self.model {
            ModelKind::Binomial => MarketModel::Binomial(self.kernel),
            ModelKind::Continuous => MarketModel::Continuous {
                samples: self.mc_samples,
                seed: self.mc_seed,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.kernel.validate()?;
        self.grid.validate()?;
        self.reward.validate()?;
        self.mesh().validate()?;
        if self.model == ModelKind::Continuous && self.mc_samples == 0 {
            return Err(Error::InvalidParams("mc_samples must be > 0".into()));
        }
        self.x0.book().validate()?;
        Ok(())
    }

    /// Builds and validates the control problem.
    pub fn problem(&self) -> Result<Problem> {
        self.validate()?;
        Problem::new(
            self.params.clone(),
            self.market_model(),
            Grid::build(self.grid)?,
            self.reward,
            self.trader,
            self.mesh(),
        )
    }
}
