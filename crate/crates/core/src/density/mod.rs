//! Evolution of a continuum of sites: a density `f` on the circle moves
//! every site by the map `F_f` it induces, and the density is pushed forward
//! by the transfer operator of that map.

mod grid;
mod laws;
mod map;
mod monte_carlo;
mod stats;
mod transfer;

pub use grid::{bump_arc, snap_outward, GridDensity, DEFAULT_GRID, MASS_TOL, ZERO_TOL};
pub use laws::{
    collapse_threshold, collapsed_length, contraction_constant, one_step_collapse,
    verify_contraction, wing_mass, CollapseOutcome, ContractionReport,
};
pub use map::{build_map, DensityMap};
pub use monte_carlo::{monte_carlo_pushforward, MIN_SAMPLES};
pub use stats::{center_of_mass, total_variation};
pub use transfer::{transfer_step, transfer_step_detailed, TransferOutcome};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circle::ArcInterval;

/// Metadata written next to a density's CSV samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityHeader {
    pub grid_size: usize,
    pub support: Option<ArcInterval>,
    pub epsilon: f64,
    pub step: u64,
}

impl GridDensity {
    pub fn header(&self, epsilon: f64, step: u64) -> DensityHeader {
        DensityHeader {
            grid_size: self.grid_size(),
            support: self.support(),
            epsilon,
            step,
        }
    }

    /// `grid_point,value` rows with a header line; values at 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let m = self.grid_size() as f64;
        let mut out = String::with_capacity(self.grid_size() * 48);
        out.push_str("grid_point,value\n");
        for (i, v) in self.values().iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", i as f64 / m, v);
        }
        out
    }
}
