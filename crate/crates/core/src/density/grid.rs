use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::{wrap, ArcInterval, CirclePoint};
use crate::error::{Error, Result};

pub const DEFAULT_GRID: usize = 1 << 14;
pub const MASS_TOL: f64 = 1e-9;
pub const ZERO_TOL: f64 = 1e-12;

/// A probability density on the circle sampled at `i / M`, read between grid
/// points by linear interpolation. The quadrature `(1/M) sum f_i` is the
/// exact integral of the interpolant.
///
/// `support`, when present, is a closed arc outside of which the interpolant
/// vanishes. `None` means the support is not tracked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    values: Vec<f64>,
    support: Option<ArcInterval>,
}

fn check_grid_size(m: usize) -> Result<()> {
    if m >= 4 && m.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidDensity(format!(
            "grid size {m} is not a power of two >= 4"
        )))
    }
}

impl GridDensity {
    /// Validates and wraps sampled values.
    pub fn new(values: Vec<f64>, support: Option<ArcInterval>) -> Result<Self> {
        check_grid_size(values.len())?;
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDensity(format!(
                "value {v} at grid point {i}"
            )));
        }
        let f = GridDensity { values, support };
        let mass = f.integral();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized(mass));
        }
        if let Some(arc) = support {
            let m = f.grid_size() as f64;
            for (i, &v) in f.values.iter().enumerate() {
                if v > ZERO_TOL && !arc.contains(CirclePoint::wrap(i as f64 / m)) {
                    return Err(Error::InvalidDensity(format!(
                        "value {v} at grid point {i} lies outside the support arc"
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Rescales nonnegative values to unit mass, then validates.
    pub fn normalized(mut values: Vec<f64>, support: Option<ArcInterval>) -> Result<Self> {
        check_grid_size(values.len())?;
        let mass = values.iter().sum::<f64>() / values.len() as f64;
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidDensity(format!("total mass {mass}")));
        }
        for v in values.iter_mut() {
            *v /= mass;
        }
        Self::new(values, support)
    }

    pub fn uniform(m: usize) -> Result<Self> {
        check_grid_size(m)?;
        Self::new(vec![1.0; m], None)
    }

    /// `1 + amplitude * sin(2 pi x)`, requiring `|amplitude| <= 1`.
    pub fn sine(m: usize, amplitude: f64) -> Result<Self> {
        check_grid_size(m)?;
        if amplitude.is_nan() || amplitude.abs() > 1.0 {
            return Err(Error::InvalidDensity(format!(
                "sine amplitude {amplitude} would make the density negative"
            )));
        }
        let values = (0..m)
            .map(|i| 1.0 + amplitude * (2.0 * PI * i as f64 / m as f64).sin())
            .collect();
        Self::new(values, None)
    }

    /// Raised-cosine bump `cos^2(pi (x - center) / width)` on the arc of the
    /// given width around `center`, normalised. The tracked support is that
    /// arc widened to the enclosing grid cells.
    pub fn bump(m: usize, center: f64, width: f64) -> Result<Self> {
        check_grid_size(m)?;
        Self::normalized(
            bump_values(m, center, width)?,
            Some(bump_arc(m, center, width)?),
        )
    }

    /// Unnormalised bump samples, for building mixtures.
    pub fn bump_values_for(m: usize, center: f64, width: f64) -> Result<Vec<f64>> {
        check_grid_size(m)?;
        bump_values(m, center, width)
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Option<ArcInterval> {
        self.support
    }

    /// Interpolated value at any real `x`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.values.len();
        let s = wrap(x) * m as f64;
        let i = (s as usize).min(m - 1);
        let t = s - i as f64;
        let a = self.values[i];
        let b = self.values[(i + 1) & (m - 1)];
        a + t * (b - a)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest grid-aligned arc outside of which the interpolant is at most
    /// `threshold`. `None` when every grid value is below it.
    pub fn numeric_support(&self, threshold: f64) -> Option<ArcInterval> {
        let m = self.values.len();
        let above: Vec<usize> = (0..m).filter(|&i| self.values[i] > threshold).collect();
        let (&first, &last) = (above.first()?, above.last()?);
        // largest cyclic run of grid points at or below the threshold
        let mut gap = (first + m - last, last);
        for w in above.windows(2) {
            if w[1] - w[0] > gap.0 {
                gap = (w[1] - w[0], w[0]);
            }
        }
        if gap.0 <= 2 {
            return Some(ArcInterval::full());
        }
        // the interpolant reaches zero one cell beyond the outermost nonzero
        // grid points
        let start = (gap.1 + gap.0 - 1) % m;
        let cells = m - gap.0 + 2;
        let h = 1.0 / m as f64;
        ArcInterval::new(CirclePoint::wrap(start as f64 * h), cells as f64 * h).ok()
    }

    /// Mass of the interpolant in each of `bins` equal bins; `bins` must
    /// divide the grid size.
    pub fn bin_masses(&self, bins: usize) -> Result<Vec<f64>> {
        let m = self.values.len();
        if bins == 0 || !m.is_multiple_of(bins) {
            return Err(Error::InvalidArgument(format!(
                "{bins} bins do not divide the grid of {m} points"
            )));
        }
        let per = m / bins;
        let h = 1.0 / m as f64;
        Ok((0..bins)
            .map(|b| {
                (b * per..(b + 1) * per)
                    .map(|i| 0.5 * h * (self.values[i] + self.values[(i + 1) % m]))
                    .sum()
            })
            .collect())
    }

    /// Mass of the interpolant on each grid cell `[i/M, (i+1)/M]`.
    pub(crate) fn cell_masses(&self) -> Vec<f64> {
        let m = self.values.len();
        let h = 1.0 / m as f64;
        (0..m)
            .map(|i| 0.5 * h * (self.values[i] + self.values[(i + 1) & (m - 1)]))
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn from_parts_unchecked(values: Vec<f64>, support: Option<ArcInterval>) -> Self {
        GridDensity { values, support }
    }
}

fn bump_values(m: usize, center: f64, width: f64) -> Result<Vec<f64>> {
    if !(width > 0.0 && width <= 1.0) || !center.is_finite() {
        return Err(Error::InvalidDensity(format!(
            "bump of width {width} at {center}"
        )));
    }
    Ok((0..m)
        .map(|i| {
            // offset in [-1/2, 1/2); g would fold the antipode onto 0
            let d = wrap(i as f64 / m as f64 - center + 0.5) - 0.5;
            if d.abs() < 0.5 * width {
                (PI * d / width).cos().powi(2)
            } else {
                0.0
            }
        })
        .collect())
}

/// The arc `[center - width/2, center + width/2]` widened outward to grid
/// points.
pub fn bump_arc(m: usize, center: f64, width: f64) -> Result<ArcInterval> {
    snap_outward(m, center - 0.5 * width, center + 0.5 * width)
}

/// Chart interval `[a, b]` widened outward to grid points, as an arc.
pub fn snap_outward(m: usize, a: f64, b: f64) -> Result<ArcInterval> {
    let mf = m as f64;
    let lo = (a * mf).floor();
    let hi = (b * mf).ceil();
    let len = (hi - lo) / mf;
    if len >= 1.0 {
        return Ok(ArcInterval::full());
    }
    ArcInterval::new(CirclePoint::new(lo / mf)?, len)
}
