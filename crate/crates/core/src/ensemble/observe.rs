//! Streaming observables fed one configuration per recorded step.

use serde::{Deserialize, Serialize};

use super::EmpiricalHistogram;
use crate::circle::wrap;
use crate::classify::{classify_component, min_gap, ComponentLabel};
use crate::error::{Error, Result};
use crate::finite::{conserved_sum_defect, step_finite, CouplingParams, TorusConfig};

/// Recorded points above this need an explicit opt-in.
pub const TRAJECTORY_LIMIT: u64 = 10_000_000;

pub trait Observer: Send {
    fn name(&self) -> &'static str;

    /// Called with the state at recorded step `step` (0 is the first state
    /// after burn-in).
    fn observe(&mut self, step: u64, cfg: &TorusConfig) -> std::result::Result<(), String>;

    fn finish(self: Box<Self>) -> Observation;
}

/// Summary produced by an observer at the end of an orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observation {
    /// Histogram of every site position over every step: the time average.
    Positions {
        histogram: EmpiricalHistogram,
    },
    /// Visits per label, indexed like `ComponentLabel::STRICT` with the
    /// boundary count last.
    Labels {
        visits: [u64; 7],
        first: ComponentLabel,
        last: ComponentLabel,
        changes: u64,
    },
    Gaps {
        min: f64,
        mean: f64,
        q01: f64,
        median: f64,
    },
    Diameter {
        min: f64,
        max: f64,
        last: f64,
    },
    Trajectory {
        sites: usize,
        positions: Vec<f64>,
    },
    ConservedSum {
        checks: u64,
        max_defect: f64,
    },
    /// `v = x_0 - x_1 mod 1` at every step.
    Difference {
        values: Vec<f64>,
    },
}

impl Observation {
    /// Number of distinct strict labels visited.
    pub fn labels_visited(&self) -> Option<usize> {
        match self {
            Observation::Labels { visits, .. } => {
                Some(visits[..6].iter().filter(|&&c| c > 0).count())
            }
            _ => None,
        }
    }
}

pub struct PositionHistogram(EmpiricalHistogram);

impl PositionHistogram {
    pub fn new(bins: usize) -> Result<Self> {
        Ok(PositionHistogram(EmpiricalHistogram::new(bins)?))
    }
}

impl Observer for PositionHistogram {
    fn name(&self) -> &'static str {
        "positions"
    }

    fn observe(&mut self, _: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        for x in cfg.values() {
            self.0.add(x);
        }
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        Observation::Positions { histogram: self.0 }
    }
}

#[derive(Default)]
pub struct LabelVisits {
    visits: [u64; 7],
    first: Option<ComponentLabel>,
    last: Option<ComponentLabel>,
    changes: u64,
}

impl LabelVisits {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Observer for LabelVisits {
    fn name(&self) -> &'static str {
        "labels"
    }

    fn observe(&mut self, _: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        let label = classify_component(cfg).map_err(|e| e.to_string())?;
        self.visits[label.index().unwrap_or(6)] += 1;
        if self.first.is_none() {
            self.first = Some(label);
        }
        if self.last.is_some_and(|l| l != label) {
            self.changes += 1;
        }
        self.last = Some(label);
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        Observation::Labels {
            visits: self.visits,
            first: self.first.unwrap_or(ComponentLabel::Boundary),
            last: self.last.unwrap_or(ComponentLabel::Boundary),
            changes: self.changes,
        }
    }
}

#[derive(Default)]
pub struct GapStats(Vec<f64>);

impl GapStats {
    pub fn new() -> Self {
        Self::default()
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

impl Observer for GapStats {
    fn name(&self) -> &'static str {
        "gaps"
    }

    fn observe(&mut self, _: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        self.0.push(min_gap(cfg).map_err(|e| e.to_string())?);
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        let mut g = self.0;
        let mean = g.iter().sum::<f64>() / g.len().max(1) as f64;
        g.sort_by(f64::total_cmp);
        Observation::Gaps {
            min: g.first().copied().unwrap_or(f64::NAN),
            mean,
            q01: quantile(&g, 0.01),
            median: quantile(&g, 0.5),
        }
    }
}

pub struct DiameterStats {
    min: f64,
    max: f64,
    last: f64,
}

impl DiameterStats {
    pub fn new() -> Self {
        DiameterStats {
            min: f64::INFINITY,
            max: 0.0,
            last: f64::NAN,
        }
    }
}

impl Default for DiameterStats {
    fn default() -> Self {
        Self::new()
    }
}

impl Observer for DiameterStats {
    fn name(&self) -> &'static str {
        "diameter"
    }

    fn observe(&mut self, _: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        let d = cfg.diameter();
        self.min = self.min.min(d);
        self.max = self.max.max(d);
        self.last = d;
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        Observation::Diameter {
            min: self.min,
            max: self.max,
            last: self.last,
        }
    }
}

/// Full record of positions, row-major by step.
pub struct Trajectory {
    sites: usize,
    positions: Vec<f64>,
}

impl Trajectory {
    pub fn new(sites: usize, steps: u64, allow_large: bool) -> Result<Self> {
        let points = steps.saturating_mul(sites as u64);
        if points > TRAJECTORY_LIMIT && !allow_large {
            return Err(Error::InvalidArgument(format!(
                "trajectory of {points} points exceeds {TRAJECTORY_LIMIT}; opt in to store it"
            )));
        }
        Ok(Trajectory {
            sites,
            positions: Vec::with_capacity(points.min(TRAJECTORY_LIMIT) as usize),
        })
    }
}

impl Observer for Trajectory {
    fn name(&self) -> &'static str {
        "trajectory"
    }

    fn observe(&mut self, _: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        self.positions.extend(cfg.values());
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        Observation::Trajectory {
            sites: self.sites,
            positions: self.positions,
        }
    }
}

/// Checks `sum F(x) = 2 sum x mod 1` every `every` steps.
pub struct ConservedSum {
    params: CouplingParams,
    every: u64,
    tol: f64,
    checks: u64,
    max_defect: f64,
}

impl ConservedSum {
    pub const DEFAULT_EVERY: u64 = 1000;
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn new(params: CouplingParams) -> Self {
        ConservedSum {
            params,
            every: Self::DEFAULT_EVERY,
            tol: Self::DEFAULT_TOL,
            checks: 0,
            max_defect: 0.0,
        }
    }
}

impl Observer for ConservedSum {
    fn name(&self) -> &'static str {
        "conserved_sum"
    }

    fn observe(&mut self, step: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        if !step.is_multiple_of(self.every) {
            return Ok(());
        }
        let next = step_finite(cfg, &self.params).map_err(|e| e.to_string())?;
        let defect = conserved_sum_defect(cfg, &next);
        self.checks += 1;
        self.max_defect = self.max_defect.max(defect);
        if defect > self.tol {
            return Err(format!("sum defect {defect:e} exceeds {:e}", self.tol));
        }
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        Observation::ConservedSum {
            checks: self.checks,
            max_defect: self.max_defect,
        }
    }
}

/// Records `v = x_0 - x_1 mod 1`; meaningful for two sites.
#[derive(Default)]
pub struct DifferenceSeries(Vec<f64>);

impl DifferenceSeries {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Observer for DifferenceSeries {
    fn name(&self) -> &'static str {
        "difference"
    }

    fn observe(&mut self, _: u64, cfg: &TorusConfig) -> std::result::Result<(), String> {
        if cfg.len() < 2 {
            return Err("difference needs at least two sites".into());
        }
        self.0.push(wrap(cfg.get(0).value() - cfg.get(1).value()));
        Ok(())
    }

    fn finish(self: Box<Self>) -> Observation {
        Observation::Difference { values: self.0 }
    }
}
