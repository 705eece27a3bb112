//! Discrete state grid `(qa, qb, z, pa, pb)` with `pa > pb`, and the
//! nearest-node projection of off-grid states.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub q_max: i32,
    pub i_min: i32,
    pub i_max: i32,
    pub pa_min: i32,
    pub pa_max: i32,
    pub pb_min: i32,
    pub pb_max: i32,
    pub t0: f64,
    pub dt: f64,
    /// Number of time steps `K`; the mesh is `t0, t0 + dt, ..., t0 + K dt`.
    pub steps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            q_max: 10,
            i_min: -20,
            i_max: 20,
            pa_min: 12,
            pa_max: 18,
            pb_min: 12,
            pb_max: 18,
            t0: 1.0,
            dt: 1.0,
            steps: 9,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if self.q_max < 0 {
            return bad(format!("q_max {} < 0", self.q_max));
        }
        if self.i_min > self.i_max {
            return bad(format!("inventory range {}..{} is empty", self.i_min, self.i_max));
        }
        if self.pa_min > self.pa_max || self.pb_min > self.pb_max {
            return bad("price range is empty".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.t0.is_finite()) {
            return bad(format!("bad time mesh t0 {} dt {}", self.t0, self.dt));
        }
        Ok(())
    }

    fn price_pairs(&self) -> Vec<(i32, i32)> {
        let mut pairs = Vec::new();
        for pa in self.pa_min..=self.pa_max {
            for pb in self.pb_min..=self.pb_max {
                if pa > pb {
                    pairs.push((pa, pb));
                }
            }
        }
        pairs
    }

    /// Number of admissible nodes, possibly zero.
    pub fn count_admissible(&self) -> usize {
        let nq = (self.q_max.max(-1) + 1) as usize;
        let nz = (self.i_max - self.i_min + 1).max(0) as usize;
        self.price_pairs().len() * nz * nq * nq
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Integer coordinates of a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub qa: i32,
    pub qb: i32,
    pub z: i32,
    pub pa: i32,
    pub pb: i32,
}

/// Which coordinates the projection had to clamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SnapInfo {
    pub volume_clamped: bool,
    pub inventory_clamped: bool,
    pub price_clamped: bool,
}

/// Admissible nodes, ordered by price pair `(pa, pb)` ascending, then `z`,
/// `qb`, `qa`.
#[derive(Debug, Clone)]
pub struct Grid {
    spec: GridSpec,
    pairs: Vec<(i32, i32)>,
    pair_lookup: Vec<u32>,
    nq: usize,
    nz: usize,
    n_pb: usize,
}

const NO_PAIR: u32 = u32::MAX;

impl Grid {
    pub fn build(spec: GridSpec) -> Result<Grid> {
        spec.validate()?;
        let pairs = spec.price_pairs();
        if pairs.is_empty() {
            return Err(Error::InvalidGrid("no price pair with pa > pb".into()));
        }
        let n_pa = (spec.pa_max - spec.pa_min + 1) as usize;
        let n_pb = (spec.pb_max - spec.pb_min + 1) as usize;
        let mut pair_lookup = vec![NO_PAIR; n_pa * n_pb];
        for (i, &(pa, pb)) in pairs.iter().enumerate() {
            pair_lookup[(pa - spec.pa_min) as usize * n_pb + (pb - spec.pb_min) as usize] = i as u32;
        }
        Ok(Grid {
            spec,
            pairs,
            pair_lookup,
            nq: (spec.q_max + 1) as usize,
            nz: (spec.i_max - spec.i_min + 1) as usize,
            n_pb,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.pairs.len() * self.nz * self.nq * self.nq
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> usize {
        self.spec.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        self.spec.t0 + k as f64 * self.spec.dt
    }

    pub fn price_pairs(&self) -> &[(i32, i32)] {
        &self.pairs
    }

    /// Nodes sharing one price pair.
    pub fn block_len(&self) -> usize {
        self.nz * self.nq * self.nq
    }

    pub fn node(&self, index: usize) -> Node {
        let qa = index % self.nq;
        let rest = index / self.nq;
        let qb = rest % self.nq;
        let rest = rest / self.nq;
        let z = rest % self.nz;
        let (pa, pb) = self.pairs[rest / self.nz];
        Node {
            qa: qa as i32,
            qb: qb as i32,
            z: z as i32 + self.spec.i_min,
            pa,
            pb,
        }
    }

    fn pair_index(&self, pa: i32, pb: i32) -> Option<usize> {
        let s = &self.spec;
        if pa < s.pa_min || pa > s.pa_max || pb < s.pb_min || pb > s.pb_max {
            return None;
        }
        let i = self.pair_lookup[(pa - s.pa_min) as usize * self.n_pb + (pb - s.pb_min) as usize];
        (i != NO_PAIR).then_some(i as usize)
    }

    /// First pair in grid order minimizing `|pa - pa'| + |pb - pb'|`.
    fn nearest_pair(&self, pa: i32, pb: i32) -> usize {
        let mut best = 0;
        let mut best_d = i64::MAX;
        for (i, &(qa, qb)) in self.pairs.iter().enumerate() {
            let d = (qa as i64 - pa as i64).abs() + (qb as i64 - pb as i64).abs();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    #[inline]
    fn compose(&self, pair: usize, z: i32, qb: i32, qa: i32) -> usize {
        ((pair * self.nz + (z - self.spec.i_min) as usize) * self.nq + qb as usize) * self.nq
            + qa as usize
    }

    pub fn index_of(&self, node: Node) -> Option<usize> {
        let s = &self.spec;
        let in_q = |q: i32| (0..=s.q_max).contains(&q);
        if !in_q(node.qa) || !in_q(node.qb) || node.z < s.i_min || node.z > s.i_max {
            return None;
        }
        let pair = self.pair_index(node.pa, node.pb)?;
        Some(self.compose(pair, node.z, node.qb, node.qa))
    }

    /// Nearest admissible node: volumes and inventory are rounded half away
    /// from zero and clamped, prices are clamped to their ranges.
    pub fn snap(&self, qa: f64, qb: f64, z: f64, pa: i32, pb: i32) -> (usize, SnapInfo) {
        let s = &self.spec;
        let mut info = SnapInfo::default();
        let clamp_round = |x: f64, lo: i32, hi: i32, flag: &mut bool| {
            let r = x.round();
            if r < lo as f64 {
                *flag = true;
                lo
            } else if r > hi as f64 {
                *flag = true;
                hi
            } else {
                r as i32
            }
        };
        let mut vflag = false;
        let qa_i = clamp_round(qa, 0, s.q_max, &mut vflag);
        let qb_i = clamp_round(qb, 0, s.q_max, &mut vflag);
        let mut zflag = false;
        let z_i = clamp_round(z, s.i_min, s.i_max, &mut zflag);
        info.volume_clamped = vflag;
        info.inventory_clamped = zflag;

        let pa_c = pa.clamp(s.pa_min, s.pa_max);
        let pb_c = pb.clamp(s.pb_min, s.pb_max);
        let pair = match self.pair_index(pa_c, pb_c) {
            Some(i) => i,
            None => self.nearest_pair(pa, pb),
        };
        let (pa_s, pb_s) = self.pairs[pair];
        info.price_clamped = pa_s != pa || pb_s != pb;
        (self.compose(pair, z_i, qb_i, qa_i), info)
    }
}
