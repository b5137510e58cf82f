//! Quantitative laws for densities: total-variation contraction in the weak
//! coupling regime and the one-step collapse of wide supports under strong
//! coupling.

use serde::{Deserialize, Serialize};

use super::{build_map, total_variation, transfer_step_detailed, GridDensity, TransferOutcome};
use crate::error::{Error, Result};

/// `c = (1 + eps) / (2 (1 - eps delta)^2)` for an initial total variation
/// `delta`.
pub fn contraction_constant(epsilon: f64, tv: f64) -> f64 {
    (1.0 + epsilon) / (2.0 * (1.0 - epsilon * tv).powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// Total variation before each step and after the last, `steps + 1`
    /// values.
    pub tv: Vec<f64>,
    pub constant: f64,
    /// `c^steps * TV(f_0)`.
    pub bound: f64,
}

impl ContractionReport {
    /// Largest ratio of consecutive total variations among steps whose
    /// starting value is above `floor`.
    pub fn worst_ratio(&self, floor: f64) -> Option<f64> {
        self.tv
            .windows(2)
            .filter(|w| w[0] > floor)
            .map(|w| w[1] / w[0])
            .reduce(f64::max)
    }
}

/// Iterates the transfer operator and records total variation. Requires
/// `eps < 1 / (1 + 4 TV(f_0))`.
pub fn verify_contraction(
    f0: &GridDensity,
    epsilon: f64,
    steps: usize,
) -> Result<ContractionReport> {
    let delta = total_variation(f0);
    let limit = 1.0 / (1.0 + 4.0 * delta);
    if epsilon.is_nan() || epsilon >= limit {
        return Err(Error::OutsideScope(format!(
            "contraction needs epsilon < 1/(1 + 4 TV) = {limit:.6}, got {epsilon}"
        )));
    }
    let constant = contraction_constant(epsilon, delta);
    let mut tv = Vec::with_capacity(steps + 1);
    tv.push(delta);
    let mut f = f0.clone();
    for _ in 0..steps {
        f = transfer_step_detailed(&f, epsilon)?.density;
        tv.push(total_variation(&f));
    }
    Ok(ContractionReport {
        tv,
        constant,
        bound: constant.powi(steps as i32) * delta,
    })
}

/// Wing mass `C`: the mass on `[b1 + 1/2, b2 + 1/2]` for a tracked support
/// `[b1, b2]`. With `0 <= b1 < b2 <= 1` these are the wings `[0, b2 - 1/2]`
/// and `[b1 + 1/2, 1]`.
pub fn wing_mass(f: &GridDensity) -> Result<f64> {
    let arc = f.support().ok_or(Error::NoSupport)?;
    let map = build_map(f, 0.0)?;
    let (b1, b2) = arc.chart();
    Ok(map.cumulative_mass(b2 + 0.5) - map.cumulative_mass(b1 + 0.5))
}

/// Smallest coupling for which a support of `length` with wing mass `wing`
/// collapses to at most 1/2 in one step: `(length - 1/4) / (length - wing)`.
pub fn collapse_threshold(length: f64, wing: f64) -> f64 {
    (length - 0.25) / (length - wing)
}

/// Support length after one step: `2 (1 - eps) length + 2 eps wing`.
pub fn collapsed_length(length: f64, wing: f64, epsilon: f64) -> f64 {
    2.0 * (1.0 - epsilon) * length + 2.0 * epsilon * wing
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseOutcome {
    pub step: TransferOutcome,
    pub wing_mass: f64,
    pub threshold: f64,
    pub predicted_length: f64,
}

/// One transfer step for a density whose support is longer than 1/2, after
/// checking that the wing mass is below 1/4 and the coupling is above the
/// collapse threshold.
pub fn one_step_collapse(f0: &GridDensity, epsilon: f64) -> Result<CollapseOutcome> {
    let arc = f0.support().ok_or(Error::NoSupport)?;
    let len = arc.length();
    if !(len > 0.5 && len < 1.0) {
        return Err(Error::CollapsePreconditions(format!(
            "support length {len} is not in (1/2, 1)"
        )));
    }
    let wing = wing_mass(f0)?;
    if wing.is_nan() || wing >= 0.25 {
        return Err(Error::CollapsePreconditions(format!(
            "wing mass {wing} is not below 1/4"
        )));
    }
    let threshold = collapse_threshold(len, wing);
    if epsilon < threshold {
        return Err(Error::CollapsePreconditions(format!(
            "epsilon {epsilon} is below the collapse threshold {threshold}"
        )));
    }
    let step = transfer_step_detailed(f0, epsilon)?;
    Ok(CollapseOutcome {
        step,
        wing_mass: wing,
        threshold,
        predicted_length: collapsed_length(len, wing, epsilon),
    })
}
