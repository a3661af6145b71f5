//! Time-grid sweeps of all measures and verification of the two bounds
//! `P-I <= 2 NM1 + d` and `NM2 <= CP-I / 2 + 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{free_family, FreeFamily, JCParams};
use crate::error::{Error, Result};
use crate::measures::{measure_record, MeasureRecord, OptConfig};

/// Slack added to the right-hand side of every verdict.
pub const VERDICT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub gamma0: f64,
    pub lambda: f64,
    pub tau: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub dt: f64,
    pub family_lambda: f64,
    pub family_min: f64,
    pub family_max: f64,
    /// Bloch grid, refinement and family grid size (`gamma0_grid`).
    pub opt: OptConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gamma0: 2.0,
            lambda: 2.0,
            tau: 0.01,
            t_min: 0.0,
            t_max: 5.0,
            dt: 0.01,
            family_lambda: 2.0,
            family_min: 0.01,
            family_max: 0.99,
            opt: OptConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn params(&self) -> Result<JCParams> {
        JCParams::new(self.gamma0, self.lambda).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn family(&self) -> Result<FreeFamily> {
        free_family(
            self.family_lambda,
            self.family_min,
            self.family_max,
            self.opt.gamma0_grid,
        )
        .map_err(|e| Error::Config(format!("family: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.family()?;
        self.opt.validate()?;
        if !(self.t_min >= 0.0 && self.t_min.is_finite()) {
            return Err(Error::Config(format!("t_min = {} must be >= 0", self.t_min)));
        }
        if !(self.t_max >= self.t_min && self.t_max.is_finite()) {
            return Err(Error::Config(format!(
                "t_max = {} must be >= t_min = {}",
                self.t_max, self.t_min
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau = {} must be positive", self.tau)));
        }
        Ok(())
    }

    /// `t_min + i dt` for every `i` with the point not past `t_max`.
    pub fn times(&self) -> Vec<f64> {
        let n = ((self.t_max - self.t_min) / self.dt + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.t_min + i as f64 * self.dt).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    #[serde(flatten)]
    pub measures: MeasureRecord,
    pub lhs_p: Option<f64>,
    pub rhs_p: Option<f64>,
    pub ok_p: Option<bool>,
    pub ok_p_strict: Option<bool>,
    pub lhs_cp: Option<f64>,
    pub rhs_cp: Option<f64>,
    pub ok_cp: Option<bool>,
}

impl VerdictRecord {
    pub fn from_measures(m: MeasureRecord) -> Self {
        let lhs_p = m.p_i;
        let rhs_p = match (m.nm1, m.d) {
            (Some(n), Some(d)) => Some(2.0 * n + d),
            _ => None,
        };
        let ok_p = lhs_p.zip(rhs_p).map(|(l, r)| l <= r + VERDICT_SLACK);
        let ok_p_strict = lhs_p.zip(m.nm1).map(|(l, n)| l <= 2.0 * n + VERDICT_SLACK);
        let lhs_cp = m.nm2;
        let rhs_cp = m.cp_i.map(|c| 0.5 * c + 1.0);
        let ok_cp = lhs_cp.zip(rhs_cp).map(|(l, r)| l <= r + VERDICT_SLACK);
        Self {
            measures: m,
            lhs_p,
            rhs_p,
            ok_p,
            ok_p_strict,
            lhs_cp,
            rhs_cp,
            ok_cp,
        }
    }

    pub fn t(&self) -> f64 {
        self.measures.t
    }
}

/// Evaluates every grid point. Records come back in grid order regardless of
/// how the work is scheduled.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<VerdictRecord>> {
    cfg.validate()?;
    let p = cfg.params()?;
    let family = cfg.family()?;
    cfg.times()
        .par_iter()
        .map(|&t| measure_record(&p, &family, t, cfg.tau, &cfg.opt).map(VerdictRecord::from_measures))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InequalitySummary {
    pub pass: usize,
    pub fail: usize,
    pub null: usize,
    /// Smallest `rhs - lhs` over non-null records.
    pub worst_margin: Option<f64>,
    pub worst_t: Option<f64>,
    pub failures: Vec<f64>,
}

impl InequalitySummary {
    fn add(&mut self, t: f64, sides: Option<(f64, f64)>) {
        let Some((lhs, rhs)) = sides else {
            self.null += 1;
            return;
        };
        let margin = rhs - lhs;
        if lhs <= rhs + VERDICT_SLACK {
            self.pass += 1;
        } else {
            self.fail += 1;
            self.failures.push(t);
        }
        if self.worst_margin.is_none_or(|w| margin < w) {
            self.worst_margin = Some(margin);
            self.worst_t = Some(t);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub singular: usize,
    pub p_inequality: InequalitySummary,
    pub p_strict: InequalitySummary,
    pub cp_inequality: InequalitySummary,
}

impl Summary {
    /// No failures of either acceptance inequality.
    pub fn all_pass(&self) -> bool {
        self.p_inequality.fail == 0 && self.cp_inequality.fail == 0
    }
}

/// Recomputes each verdict from the recorded sides and tallies them.
pub fn verify(records: &[VerdictRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut s = Summary {
        records: records.len(),
        singular: 0,
        p_inequality: InequalitySummary::default(),
        p_strict: InequalitySummary::default(),
        cp_inequality: InequalitySummary::default(),
    };
    for r in records {
        let t = r.t();
        if r.measures.singular {
            s.singular += 1;
        }
        s.p_inequality.add(t, r.lhs_p.zip(r.rhs_p));
        s.p_strict.add(t, r.lhs_p.zip(r.measures.nm1.map(|n| 2.0 * n)));
        s.cp_inequality.add(t, r.lhs_cp.zip(r.rhs_cp));
    }
    Ok(s)
}
