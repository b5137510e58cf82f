//! The site map `F_f` induced by a density `f`:
//!
//! ```text
//! F_f(x) = 2 (x + eps * integral g(y - x) f(y) dy)  mod 1
//! ```
//!
//! Writing `phi = f - 1` and `Phi(s) = integral_0^s phi`, which is 1-periodic
//! because `phi` has zero mean, the lift is
//!
//! ```text
//! lift(x) = 2x + 2 eps (Z + Phi(x + 1/2)),   Z = integral_0^1 y phi(y) dy
//! ```
//!
//! so `lift(x + 1) = lift(x) + 2`, `lift' = 2 (1 - eps + eps f(x + 1/2))`,
//! and `f = 1` gives exactly `2x`.

use crate::circle::{wrap, CirclePoint};
use crate::error::{Error, Result};
use crate::finite::check_epsilon;

use super::GridDensity;

const BISECTION_STEPS: usize = 50;
/// Rounding slack when checking that the lift is increasing.
const MONOTONE_SLACK: f64 = 1e-12;

/// Evaluator for `F_f`, its lift and derivative. Borrows the density.
#[derive(Debug, Clone)]
pub struct DensityMap<'a> {
    f: &'a GridDensity,
    epsilon: f64,
    /// `Phi` at grid points, `prefix[i] = Phi(i / M)`.
    prefix: Vec<f64>,
    first_moment: f64,
}

/// Builds the evaluator. Quadrature is exact for the piecewise-linear
/// interpolant, so everything below is exact up to rounding.
pub fn build_map(f: &GridDensity, epsilon: f64) -> Result<DensityMap<'_>> {
    check_epsilon(epsilon)?;
    let mass = f.integral();
    if (mass - 1.0).abs() > super::MASS_TOL {
        return Err(Error::NotNormalized(mass));
    }
    let m = f.grid_size();
    let h = 1.0 / m as f64;
    let v = f.values();
    let mut prefix = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    let mut z = 0.0;
    prefix.push(0.0);
    for i in 0..m {
        let a = v[i] - 1.0;
        let b = v[(i + 1) & (m - 1)] - 1.0;
        acc += 0.5 * h * (a + b);
        prefix.push(acc);
        // integral of y * phi(y) over the cell, phi linear from a to b
        let x = i as f64 * h;
        z += a * (x * h + 0.5 * h * h) + (b - a) * (0.5 * x * h + h * h / 3.0);
    }
    Ok(DensityMap {
        f,
        epsilon,
        prefix,
        first_moment: z,
    })
}

impl DensityMap<'_> {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn density(&self) -> &GridDensity {
        self.f
    }

    /// `integral_0^1 y f(y) dy`.
    pub fn first_moment(&self) -> f64 {
        self.first_moment + 0.5
    }

    /// `Phi(s)` for any real `s`.
    #[inline]
    pub fn centered_cumulative(&self, s: f64) -> f64 {
        let v = self.f.values();
        let m = v.len();
        let x = wrap(s) * m as f64;
        let i = (x as usize).min(m - 1);
        let t = x - i as f64;
        let h = 1.0 / m as f64;
        let a = v[i] - 1.0;
        let b = v[(i + 1) & (m - 1)] - 1.0;
        self.prefix[i] + h * t * (a + 0.5 * t * (b - a))
    }

    /// Cumulative mass `integral_0^s f` for real `s`, counting whole turns.
    pub fn cumulative_mass(&self, s: f64) -> f64 {
        s + self.centered_cumulative(s)
    }

    /// The lift of `F_f` to `R`; increasing, with `lift(x + 1) = lift(x) + 2`.
    #[inline]
    pub fn lift(&self, x: f64) -> f64 {
        2.0 * x + 2.0 * self.epsilon * (self.first_moment + self.centered_cumulative(x + 0.5))
    }

    pub fn eval(&self, x: f64) -> CirclePoint {
        CirclePoint::wrap(self.lift(x))
    }

    /// `F_f'(x) = 2 (1 - eps + eps f(x + 1/2))`.
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        2.0 + 2.0 * self.epsilon * (self.f.eval(x + 0.5) - 1.0)
    }

    /// The two preimages of `x` in `[0, 1)`, in increasing order.
    pub fn preimages(&self, x: f64) -> Result<[f64; 2]> {
        let l0 = self.lift(0.0);
        let k = (l0 - x).ceil();
        let t1 = x + k;
        Ok([self.invert(t1, x)?, self.invert(t1 + 1.0, x)?])
    }

    /// Solves `lift(y) = target` for `y` in `[0, 1]` by bisection.
    fn invert(&self, target: f64, x: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let (mut flo, mut fhi) = (self.lift(lo), self.lift(hi));
        if !(flo - MONOTONE_SLACK <= target && target <= fhi + MONOTONE_SLACK) {
            return Err(Error::BisectionFailed {
                x,
                reason: "target outside the lift's range over one period",
            });
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let fm = self.lift(mid);
            if !(flo - MONOTONE_SLACK <= fm && fm <= fhi + MONOTONE_SLACK) {
                return Err(Error::BisectionFailed {
                    x,
                    reason: "lift is not monotone",
                });
            }
            if fm <= target {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
