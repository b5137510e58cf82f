use serde::{Deserialize, Serialize};

use super::{
    pooled_positions, random_config, run_ensemble, GapStats, LabelVisits, Observation, Observer,
    PositionHistogram, DEFAULT_BINS,
};
use crate::classify::{detect_limit_state, LimitKind, DEFAULT_LIMIT_STEPS, DEFAULT_LIMIT_TOL};
use crate::error::Result;
use crate::finite::{renormalization_depth, CouplingParams, RenormDepth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanObservable {
    /// Largest number of distinct labels any single orbit visits.
    Labels,
    /// Quantiles of the minimum gap, pooled over orbits.
    MinGap,
    /// Fractions of orbits ending synchronised, splayed or undecided.
    SyncOutcome,
    /// Renormalization depth and component count of the two-site factor.
    Renorm,
    /// KS distance of the pooled time average to Lebesgue measure.
    Uniformity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub observables: Vec<ScanObservable>,
    pub n_sites: usize,
    pub orbits: u64,
    pub burn_in: u64,
    pub steps: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanRow {
    pub epsilon: f64,
    pub labels_visited: Option<usize>,
    pub min_gap: Option<f64>,
    pub min_gap_q01: Option<f64>,
    pub min_gap_median: Option<f64>,
    pub sync_fraction: Option<f64>,
    pub splay_fraction: Option<f64>,
    pub undecided_fraction: Option<f64>,
    pub renorm: Option<RenormDepth>,
    pub ks_uniform: Option<f64>,
    /// First failure for this epsilon; other columns keep what succeeded.
    pub error: Option<String>,
}

/// One row per epsilon. Failures are recorded in the row and the scan moves
/// on.
pub fn epsilon_scan(grid: &[f64], spec: &ScanSpec) -> Vec<ScanRow> {
    grid.iter()
        .map(|&eps| {
            let mut row = ScanRow {
                epsilon: eps,
                ..ScanRow::default()
            };
            fill_row(&mut row, spec);
            row
        })
        .collect()
}

/// Fills each requested column independently so one failing column does not
/// blank the others.
fn fill_row(row: &mut ScanRow, spec: &ScanSpec) {
    let wants = |o| spec.observables.contains(&o);
    let note = |r: Result<()>, row: &mut ScanRow| {
        if let Err(e) = r {
            row.error.get_or_insert(e.to_string());
        }
    };
    let params = match CouplingParams::new(row.epsilon, spec.n_sites) {
        Ok(p) => p,
        Err(e) => return note(Err(e), row),
    };
    if wants(ScanObservable::Renorm) {
        let r = renormalization_depth(row.epsilon).map(|d| row.renorm = Some(d));
        note(r, row);
    }
    let r = fill_orbit_columns(row, spec, params);
    note(r, row);
    if wants(ScanObservable::SyncOutcome) {
        let r = fill_sync_columns(row, spec);
        note(r, row);
    }
}

fn fill_orbit_columns(row: &mut ScanRow, spec: &ScanSpec, params: CouplingParams) -> Result<()> {
    let wants = |o| spec.observables.contains(&o);

    let labels = wants(ScanObservable::Labels);
    let gaps = wants(ScanObservable::MinGap);
    let uniform = wants(ScanObservable::Uniformity);
    if labels || gaps || uniform {
        let records = run_ensemble(
            params,
            spec.seed,
            spec.orbits,
            spec.burn_in,
            spec.steps,
            |_| {
                let mut obs: Vec<Box<dyn Observer>> = Vec::new();
                if labels {
                    obs.push(Box::new(LabelVisits::new()));
                }
                if gaps {
                    obs.push(Box::new(GapStats::new()));
                }
                if uniform {
                    obs.push(Box::new(PositionHistogram::new(DEFAULT_BINS)?));
                }
                Ok(obs)
            },
        )?;
        if labels {
            row.labels_visited = records
                .iter()
                .filter_map(|r| r.find(|o| o.labels_visited()))
                .max();
        }
        if gaps {
            // per-orbit quantiles, summarised by the worst orbit
            for r in &records {
                if let Some((min, q01, median)) = r.find(|o| match o {
                    Observation::Gaps {
                        min, q01, median, ..
                    } => Some((*min, *q01, *median)),
                    _ => None,
                }) {
                    let lower = |a: Option<f64>, b: f64| Some(a.map_or(b, |a| a.min(b)));
                    row.min_gap = lower(row.min_gap, min);
                    row.min_gap_q01 = lower(row.min_gap_q01, q01);
                    row.min_gap_median = lower(row.min_gap_median, median);
                }
            }
        }
        if uniform {
            row.ks_uniform =
                Some(pooled_positions(&records, DEFAULT_BINS)?.ks_distance_to_uniform()?);
        }
    }
    Ok(())
}

fn fill_sync_columns(row: &mut ScanRow, spec: &ScanSpec) -> Result<()> {
    let eps = row.epsilon;
    let n = spec.orbits.max(1);
    let mut counts = [0u64; 3];
    for i in 0..n {
        let cfg0 = random_config(spec.seed, i, spec.n_sites);
        let state = detect_limit_state(&cfg0, eps, DEFAULT_LIMIT_STEPS, DEFAULT_LIMIT_TOL)?;
        counts[match state.kind {
            LimitKind::Sync => 0,
            LimitKind::Splay => 1,
            LimitKind::Undecided => 2,
        }] += 1;
    }
    let f = |c: u64| Some(c as f64 / n as f64);
    row.sync_fraction = f(counts[0]);
    row.splay_fraction = f(counts[1]);
    row.undecided_fraction = f(counts[2]);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(observables: Vec<ScanObservable>, n_sites: usize) -> ScanSpec {
        ScanSpec {
            observables,
            n_sites,
            orbits: 2,
            burn_in: 1000,
            steps: 20_000,
            seed: 11,
        }
    }

    #[test]
    fn empty_grid_gives_empty_table() {
        assert!(epsilon_scan(&[], &spec(vec![ScanObservable::Labels], 3)).is_empty());
    }

    #[test]
    fn renorm_column() {
        let rows = epsilon_scan(&[1.0 / 3.0], &spec(vec![ScanObservable::Renorm], 2));
        assert_eq!(rows[0].renorm, Some(RenormDepth { n: 1, k: 2 }));
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let rows = epsilon_scan(&[0.7, 0.2], &spec(vec![ScanObservable::Renorm], 2));
        assert!(rows[0].error.is_some());
        assert_eq!(rows[1].renorm, Some(RenormDepth { n: 0, k: 1 }));
        let rows = epsilon_scan(&[1.5], &spec(vec![ScanObservable::Labels], 3));
        assert!(rows[0]
            .error
            .as_deref()
            .unwrap()
            .contains("epsilon out of range"));
    }
}
