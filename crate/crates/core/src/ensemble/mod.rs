//! Orbits of the finite system at scale: streaming observers, time
//! averages, deterministic parallel ensembles and parameter scans.

mod histogram;
mod observe;
mod scan;
mod seed;

pub use histogram::EmpiricalHistogram;
pub use observe::{
    ConservedSum, DiameterStats, DifferenceSeries, GapStats, LabelVisits, Observation, Observer,
    PositionHistogram, Trajectory, TRAJECTORY_LIMIT,
};
pub use scan::{epsilon_scan, ScanObservable, ScanRow, ScanSpec};
pub use seed::{derive_seed, random_config, stream_rng};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{step_into, CouplingParams, TorusConfig};

pub const DEFAULT_BINS: usize = 1024;

/// Everything needed to replay an orbit besides its initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub params: CouplingParams,
    pub seed: u64,
    pub burn_in: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub spec: OrbitSpec,
    pub initial: TorusConfig,
    /// State after the last recorded step.
    pub last: TorusConfig,
    pub observations: Vec<Observation>,
}

impl OrbitRecord {
    pub fn find<T>(&self, pick: impl Fn(&Observation) -> Option<T>) -> Option<T> {
        self.observations.iter().find_map(pick)
    }
}

/// Runs `burn_in` unobserved steps, then shows `steps` consecutive states to
/// every observer.
pub fn simulate_orbit(
    cfg0: &TorusConfig,
    spec: OrbitSpec,
    mut observers: Vec<Box<dyn Observer>>,
) -> Result<OrbitRecord> {
    if spec.steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if cfg0.len() != spec.params.n_sites() {
        return Err(Error::SizeMismatch {
            expected: spec.params.n_sites(),
            got: cfg0.len(),
        });
    }
    let eps = spec.params.epsilon();
    let mut cur = cfg0.clone();
    let mut next = cfg0.clone();
    let advance = |cur: &mut TorusConfig, next: &mut TorusConfig| {
        step_into(cur.sites(), eps, next.as_mut_slice());
        std::mem::swap(cur, next);
    };
    for _ in 0..spec.burn_in {
        advance(&mut cur, &mut next);
    }
    for t in 0..spec.steps {
        if t > 0 {
            advance(&mut cur, &mut next);
        }
        for obs in observers.iter_mut() {
            obs.observe(t, &cur).map_err(|reason| Error::Observer {
                name: obs.name(),
                step: t,
                reason,
            })?;
        }
    }
    Ok(OrbitRecord {
        spec,
        initial: cfg0.clone(),
        last: cur,
        observations: observers.into_iter().map(|o| o.finish()).collect(),
    })
}

/// The time average `A(T)` of an orbit as a histogram of all site positions.
pub fn time_average(orbit: &OrbitRecord, bin_count: usize) -> Result<EmpiricalHistogram> {
    for obs in &orbit.observations {
        match obs {
            Observation::Trajectory { positions, .. } => {
                let mut h = EmpiricalHistogram::new(bin_count)?;
                for &x in positions {
                    h.add(x);
                }
                return Ok(h);
            }
            Observation::Positions { histogram } if histogram.bin_count() == bin_count => {
                return Ok(histogram.clone());
            }
            _ => {}
        }
    }
    Err(Error::InvalidArgument(
        "orbit has no recorded positions at this resolution".into(),
    ))
}

/// `orbits` independent orbits from uniform random initial states, run in
/// parallel. Orbit `i` is keyed by `(master_seed, i)` and results come back in
/// index order, so the output does not depend on the worker count.
pub fn run_ensemble<F>(
    params: CouplingParams,
    master_seed: u64,
    orbits: u64,
    burn_in: u64,
    steps: u64,
    make_observers: F,
) -> Result<Vec<OrbitRecord>>
where
    F: Fn(u64) -> Result<Vec<Box<dyn Observer>>> + Sync,
{
    (0..orbits)
        .into_par_iter()
        .map(|i| {
            let cfg0 = random_config(master_seed, i, params.n_sites());
            let spec = OrbitSpec {
                params,
                seed: master_seed,
                burn_in,
                steps,
            };
            simulate_orbit(&cfg0, spec, make_observers(i)?)
        })
        .collect()
}

/// Merges the position histograms of an ensemble in index order.
pub fn pooled_positions(records: &[OrbitRecord], bin_count: usize) -> Result<EmpiricalHistogram> {
    let mut pooled = EmpiricalHistogram::new(bin_count)?;
    for r in records {
        pooled.merge(&time_average(r, bin_count)?)?;
    }
    Ok(pooled)
}

/// Occupied bins of `series[t]` for each residue class `t mod period`.
pub fn residue_supports(series: &[f64], bins: usize, period: usize) -> Result<Vec<Vec<bool>>> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    let mut hists = vec![EmpiricalHistogram::new(bins)?; period];
    for (t, &x) in series.iter().enumerate() {
        hists[t % period].add(x);
    }
    Ok(hists.iter().map(|h| h.support()).collect())
}

pub fn supports_disjoint(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !(x && y))
}

fn residues_disjoint(series: &[f64], bins: usize, period: usize) -> Result<bool> {
    let s = residue_supports(series, bins, period)?;
    for i in 0..period {
        for j in i + 1..period {
            if !supports_disjoint(&s[i], &s[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Largest `p <= max_period` for which the residue classes `t mod p` of the
/// series occupy pairwise disjoint sets of bins. A series cycling through `K`
/// separated pieces gives `K`: multiples of `K` put two classes on the same
/// piece and other periods mix pieces.
pub fn cyclic_period(series: &[f64], bins: usize, max_period: usize) -> Result<usize> {
    if series.len() < 2 * max_period.max(1) {
        return Err(Error::InvalidArgument(
            "series too short for the requested period range".into(),
        ));
    }
    let mut best = 1;
    for p in 2..=max_period {
        if residues_disjoint(series, bins, p)? {
            best = p;
        }
    }
    Ok(best)
}
