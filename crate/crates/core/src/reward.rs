//! Terminal reward `xi = r_c * C + r_i * F(I, pa, pb)`.

use crate::error::{Error, Result};

/// Terminal inventory valuation `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardVariant {
    /// `F = I`.
    Linear,
    /// `F = |I - z0|`, usually with `r_i < 0`.
    TargetAbs(f64),
    /// `F = (I - z0)^2`, usually with `r_i < 0`.
    TargetQuad(f64),
    /// Long inventory sold at `pb - U^b`, short inventory bought back at
    /// `pa + U^a`.
    LiquidationPenalty { ua: f64, ub: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSpec {
    pub r_c: f64,
    pub r_i: f64,
    pub variant: RewardVariant,
}

impl Default for RewardSpec {
    fn default() -> Self {
        RewardSpec {
            r_c: 1.0,
            r_i: 1.0,
            variant: RewardVariant::LiquidationPenalty { ua: 2.0, ub: 2.0 },
        }
    }
}

impl RewardSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_c.is_finite() && self.r_c > 0.0) {
            return Err(Error::InvalidParams(format!("r_c must be > 0, got {}", self.r_c)));
        }
        if !self.r_i.is_finite() {
            return Err(Error::InvalidParams("r_i must be finite".into()));
        }
        let finite = match self.variant {
            RewardVariant::Linear => true,
            RewardVariant::TargetAbs(z0) | RewardVariant::TargetQuad(z0) => z0.is_finite(),
            RewardVariant::LiquidationPenalty { ua, ub } => ua.is_finite() && ub.is_finite(),
        };
        if !finite {
            return Err(Error::InvalidParams("reward variant parameters must be finite".into()));
        }
        Ok(())
    }

    /// Inventory valuation `F(I, pa, pb)`.
    #[inline]
    pub fn valuation(&self, inventory: f64, pa: i32, pb: i32) -> f64 {
        match self.variant {
            RewardVariant::Linear => inventory,
            RewardVariant::TargetAbs(z0) => (inventory - z0).abs(),
            RewardVariant::TargetQuad(z0) => (inventory - z0) * (inventory - z0),
            RewardVariant::LiquidationPenalty { ua, ub } => {
                if inventory > 0.0 {
                    (pb as f64 - ub) * inventory
                } else if inventory < 0.0 {
                    (pa as f64 + ua) * inventory
                } else {
                    0.0
                }
            }
        }
    }

    /// Part of the reward not carried by cash: `r_i * F`.
    #[inline]
    pub fn inventory_term(&self, inventory: f64, pa: i32, pb: i32) -> f64 {
        self.r_i * self.valuation(inventory, pa, pb)
    }
}

impl std::fmt::Display for RewardVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RewardVariant::Linear => write!(f, "linear"),
            RewardVariant::TargetAbs(z0) => write!(f, "target_abs:{z0}"),
            RewardVariant::TargetQuad(z0) => write!(f, "target_quad:{z0}"),
            RewardVariant::LiquidationPenalty { ua, ub } => write!(f, "liquidation:{ua},{ub}"),
        }
    }
}

impl std::str::FromStr for RewardVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{t}' in reward variant '{s}'")))
        };
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("linear", None) => Ok(RewardVariant::Linear),
            ("target_abs", Some(a)) => Ok(RewardVariant::TargetAbs(num(a)?)),
            ("target_quad", Some(a)) => Ok(RewardVariant::TargetQuad(num(a)?)),
            ("liquidation", Some(a)) => {
                let (ua, ub) = a
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("liquidation needs 'ua,ub', got '{a}'")))?;
                Ok(RewardVariant::LiquidationPenalty {
                    ua: num(ua)?,
                    ub: num(ub)?,
                })
            }
            _ => Err(Error::Config(format!("unknown reward variant '{s}'"))),
        }
    }
}

pub fn terminal_reward(spec: &RewardSpec, inventory: f64, cash: f64, pa: i32, pb: i32) -> f64 {
    spec.r_c * cash + spec.inventory_term(inventory, pa, pb)
}

/// Empirical constants of the growth and local Lipschitz bounds on `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    /// `max |F| / (z^2 + pa^2 + pb^2 + 1)`.
    pub growth: f64,
    /// `max |F(z1) - F(z2)| / ((|pa| + |pb| + 1)(|z1| + |z2| + 1)|z1 - z2|)`
    /// over sample pairs sharing the same prices.
    pub lipschitz: f64,
    pub samples: usize,
}

impl GrowthReport {
    /// Smallest `r^F` consistent with the sample.
    pub fn r_f(&self) -> f64 {
        self.growth.max(self.lipschitz)
    }

    pub fn holds_with(&self, r_f: f64) -> bool {
        self.r_f().is_finite() && self.r_f() <= r_f
    }
}

pub fn check_growth(spec: &RewardSpec, samples: &[(f64, i32, i32)]) -> Result<GrowthReport> {
    let mut growth = 0.0f64;
    let mut lipschitz = 0.0f64;
    for (i, &(z, pa, pb)) in samples.iter().enumerate() {
        if pb > pa {
            return Err(Error::InvalidState(format!("sample with pb {pb} > pa {pa}")));
        }
        let f = spec.valuation(z, pa, pb);
        let (paf, pbf) = (pa as f64, pb as f64);
        growth = growth.max(f.abs() / (z * z + paf * paf + pbf * pbf + 1.0));
        for &(z2, pa2, pb2) in &samples[i + 1..] {
            if pa2 != pa || pb2 != pb || z2 == z {
                continue;
            }
            let f2 = spec.valuation(z2, pa, pb);
            let scale = (paf.abs() + pbf.abs() + 1.0) * (z.abs() + z2.abs() + 1.0) * (z - z2).abs();
            lipschitz = lipschitz.max((f - f2).abs() / scale);
        }
    }
    Ok(GrowthReport {
        growth,
        lipschitz,
        samples: samples.len(),
    })
}
