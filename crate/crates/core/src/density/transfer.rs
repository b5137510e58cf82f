use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_map, grid::snap_outward, DensityMap, GridDensity};
use crate::circle::{ArcInterval, CirclePoint};
use crate::error::{Error, Result};

/// One application of the transfer operator with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferOutcome {
    pub density: GridDensity,
    /// Exact image of the previous support arc under `F_f`, before widening
    /// to grid points. `None` when the support was untracked or the image
    /// wraps the whole circle.
    pub image_arc: Option<ArcInterval>,
    /// `integral f_1 - 1` before renormalisation.
    pub mass_defect: f64,
}

/// `f_1(x) = sum over F_f(y) = x of f(y) / F_f'(y)`, sampled at the grid.
pub fn transfer_step(f: &GridDensity, epsilon: f64) -> Result<GridDensity> {
    Ok(transfer_step_detailed(f, epsilon)?.density)
}

pub fn transfer_step_detailed(f: &GridDensity, epsilon: f64) -> Result<TransferOutcome> {
    let map = build_map(f, epsilon)?;
    let m = f.grid_size();
    let h = 1.0 / m as f64;
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| pushforward_at(&map, j as f64 * h))
        .collect::<Result<_>>()?;

    let mass = values.iter().sum::<f64>() * h;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidDensity(format!("pushforward mass {mass}")));
    }
    let values: Vec<f64> = if mass == 1.0 {
        values
    } else {
        values.into_iter().map(|v| v / mass).collect()
    };

    let (image_arc, support) = match f.support() {
        Some(arc) if !arc.is_full() => image_of_arc(&map, arc, m)?,
        Some(_) => (None, Some(ArcInterval::full())),
        None => (None, None),
    };
    let density = GridDensity::new(values, support)?;
    Ok(TransferOutcome {
        density,
        image_arc,
        mass_defect: mass - 1.0,
    })
}

fn pushforward_at(map: &DensityMap<'_>, x: f64) -> Result<f64> {
    let f = map.density();
    let mut acc = 0.0;
    for y in map.preimages(x)? {
        let fy = f.eval(y);
        if fy != 0.0 {
            acc += fy / map.derivative(y);
        }
    }
    Ok(acc)
}

/// Image of a support arc: the exact chart image `[lift(a), lift(b)]` and the
/// same arc widened to grid points, which contains the support of the new
/// interpolant.
fn image_of_arc(
    map: &DensityMap<'_>,
    arc: ArcInterval,
    m: usize,
) -> Result<(Option<ArcInterval>, Option<ArcInterval>)> {
    let (a, b) = arc.chart();
    let (la, lb) = (map.lift(a), map.lift(b));
    let len = lb - la;
    if len >= 1.0 {
        return Ok((None, Some(ArcInterval::full())));
    }
    let exact = ArcInterval::new(CirclePoint::new(la)?, len)?;
    Ok((Some(exact), Some(snap_outward(m, la, lb)?)))
}
