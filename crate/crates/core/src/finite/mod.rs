//! The finite system of `N` mean-field coupled doubling maps on the torus
//! `T^N`, with its low-dimensional factors.

mod factor;
mod renorm;

pub use factor::{
    diagonal_map_n3, map_h, map_l, step_factor_n2, step_factor_n3, to_factor_n2, to_factor_n3,
    FactorCoordsN2, FactorCoordsN3,
};
pub use renorm::{renormalization_depth, RenormDepth};

use serde::{Deserialize, Serialize};

use crate::circle::{signed_distance, wrap, CirclePoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `epsilon < 1/2`: every Jacobian eigenvalue exceeds one.
    Expanding,
    /// `epsilon == 1/2`: the transverse eigenvalue is exactly one.
    Critical,
    /// `epsilon > 1/2`: transverse contraction at rate `2(1 - epsilon)`.
    Contracting,
}

/// Coupling strength and number of sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    epsilon: f64,
    n_sites: usize,
}

impl CouplingParams {
    pub fn new(epsilon: f64, n_sites: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        Ok(CouplingParams { epsilon, n_sites })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn regime(&self) -> Regime {
        regime(self.epsilon)
    }
}

pub fn regime(epsilon: f64) -> Regime {
    if epsilon < 0.5 {
        Regime::Expanding
    } else if epsilon > 0.5 {
        Regime::Contracting
    } else {
        Regime::Critical
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

/// Positions of the labelled sites, `x = (x_1, ..., x_N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusConfig(Vec<CirclePoint>);

impl TorusConfig {
    pub fn new(sites: Vec<CirclePoint>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::NoSites);
        }
        Ok(TorusConfig(sites))
    }

    /// Builds a configuration from raw reals, reducing each mod 1.
    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        let sites = xs
            .iter()
            .map(|&x| CirclePoint::new(x))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sites(&self) -> &[CirclePoint] {
        &self.0
    }

    pub fn get(&self, s: usize) -> CirclePoint {
        self.0[s]
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|p| p.value())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.values().collect()
    }

    /// Sum of the coordinates mod 1.
    pub fn coordinate_sum(&self) -> CirclePoint {
        CirclePoint::wrap(self.values().sum())
    }

    /// Sup-norm distance on the torus.
    pub fn torus_distance(&self, other: &TorusConfig) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.distance(*b))
            .fold(0.0, f64::max)
    }

    /// Site permutation: site `i` of the result is site `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> TorusConfig {
        TorusConfig(perm.iter().map(|&i| self.0[i]).collect())
    }

    /// The reflected configuration `-x`.
    pub fn reflected(&self) -> TorusConfig {
        TorusConfig(self.0.iter().map(|p| p.reflected()).collect())
    }

    /// Consecutive gaps between the sorted site positions; they sum to one.
    pub fn sorted_gaps(&self) -> Vec<f64> {
        let mut xs = self.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    xs[i + 1] - xs[i]
                } else {
                    1.0 - xs[n - 1] + xs[0]
                }
            })
            .collect()
    }

    /// Length of the shortest arc containing every site.
    pub fn diameter(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        let max_gap = self.sorted_gaps().into_iter().fold(0.0, f64::max);
        (1.0 - max_gap).max(0.0)
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [CirclePoint] {
        &mut self.0
    }
}

/// One step of `F_{eps,N}`:
/// `x_s -> 2 (x_s + eps/N * sum_r g(x_r - x_s)) mod 1`.
pub fn step_finite(cfg: &TorusConfig, params: &CouplingParams) -> Result<TorusConfig> {
    if cfg.len() != params.n_sites {
        return Err(Error::SizeMismatch {
            expected: params.n_sites,
            got: cfg.len(),
        });
    }
    let mut out = cfg.clone();
    step_into(cfg.sites(), params.epsilon, out.as_mut_slice());
    Ok(out)
}

/// Allocation-free step; `out` must have the same length as `x`.
#[inline]
pub fn step_into(x: &[CirclePoint], epsilon: f64, out: &mut [CirclePoint]) {
    debug_assert_eq!(x.len(), out.len());
    let k = epsilon / x.len() as f64;
    for (s, o) in out.iter_mut().enumerate() {
        let xs = x[s].value();
        let pull: f64 = x.iter().map(|r| signed_distance(r.value() - xs)).sum();
        *o = CirclePoint::wrap(2.0 * (xs + k * pull));
    }
}

/// Advances a configuration in place by `steps` iterations.
pub fn iterate(cfg: &mut TorusConfig, epsilon: f64, steps: u64) {
    let mut scratch = cfg.clone();
    for _ in 0..steps {
        step_into(cfg.sites(), epsilon, scratch.as_mut_slice());
        std::mem::swap(cfg, &mut scratch);
    }
}

/// Deviation of `sum F(x)_s` from `2 sum x_s` on the circle; zero up to
/// rounding because `g` is odd.
pub fn conserved_sum_defect(before: &TorusConfig, after: &TorusConfig) -> f64 {
    let lhs: f64 = after.values().sum();
    let rhs: f64 = 2.0 * before.values().sum::<f64>();
    signed_distance(lhs - rhs).abs()
}

/// Smallest distance from any pair difference `x_r - x_s` to the singular
/// value `1/2`.
pub fn distance_to_singularity(cfg: &TorusConfig) -> f64 {
    let xs = cfg.sites();
    let mut best = f64::INFINITY;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            let d = wrap(a.value() - b.value());
            best = best.min((d - 0.5).abs());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(xs: &[f64]) -> TorusConfig {
        TorusConfig::from_reals(xs).unwrap()
    }

    #[test]
    fn diagonal_is_uncoupled() {
        for eps in [0.0, 0.3, 0.7] {
            let p = CouplingParams::new(eps, 2).unwrap();
            let out = step_finite(&cfg(&[0.3, 0.3]), &p).unwrap();
            assert!((out.get(0).value() - 0.6).abs() < 1e-15);
            assert!((out.get(1).value() - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coupling_is_doubling() {
        let p = CouplingParams::new(0.0, 2).unwrap();
        let out = step_finite(&cfg(&[0.3, 0.7]), &p).unwrap();
        assert!((out.get(0).value() - 0.6).abs() < 1e-15);
        assert!((out.get(1).value() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn hand_evaluated_two_site_step() {
        // g(0.4) = 0.4, eps/N = 0.15: 2(0.2 + 0.06) = 0.52, 2(0.6 - 0.06) = 1.08.
        let p = CouplingParams::new(0.3, 2).unwrap();
        let before = cfg(&[0.2, 0.6]);
        let out = step_finite(&before, &p).unwrap();
        assert!((out.get(0).value() - 0.52).abs() < 1e-12);
        assert!((out.get(1).value() - 0.08).abs() < 1e-12);
        assert!(conserved_sum_defect(&before, &out) < 1e-12);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let p = CouplingParams::new(0.3, 3).unwrap();
        assert_eq!(
            step_finite(&cfg(&[0.1, 0.2]), &p),
            Err(Error::SizeMismatch {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn params_validation() {
        assert!(CouplingParams::new(1.0, 2).is_err());
        assert!(CouplingParams::new(-0.1, 2).is_err());
        assert!(CouplingParams::new(f64::NAN, 2).is_err());
        assert!(CouplingParams::new(0.2, 0).is_err());
        assert_eq!(
            CouplingParams::new(0.2, 2).unwrap().regime(),
            Regime::Expanding
        );
        assert_eq!(
            CouplingParams::new(0.7, 2).unwrap().regime(),
            Regime::Contracting
        );
        assert_eq!(regime(0.5), Regime::Critical);
    }

    #[test]
    fn gaps_and_diameter() {
        let c = cfg(&[0.0, 0.1, 0.4]);
        let gaps = c.sorted_gaps();
        assert!((gaps.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((c.diameter() - 0.4).abs() < 1e-15);
        let wrapped = cfg(&[0.95, 0.05, 0.0]);
        assert!((wrapped.diameter() - 0.1).abs() < 1e-12);
    }
}
