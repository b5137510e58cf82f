use serde::{Deserialize, Serialize};

use super::check_epsilon;
use crate::error::{Error, Result};

/// How many times the two-site Lorenz map renormalises, and the resulting
/// number `K = 2^n` of cyclically permuted mixing components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenormDepth {
    pub n: u32,
    pub k: u64,
}

const GUARD: f64 = 1e-12;

/// Inverts `2^(2^-(n+1)) < 2(1 - eps) < 2^(2^-n)` for `n`.
///
/// Slopes above `sqrt 2` give `n = 0`. The countable set of slopes
/// `2^(2^-m)`, `m >= 1`, where the map has a Markov partition instead, is
/// reported as [`Error::MarkovBoundary`].
pub fn renormalization_depth(epsilon: f64) -> Result<RenormDepth> {
    check_epsilon(epsilon)?;
    if epsilon >= 0.5 {
        return Err(Error::Regime("0 <= epsilon < 1/2 for renormalization"));
    }
    let slope = 2.0 * (1.0 - epsilon);
    let t = -(slope.log2()).log2();
    if t <= GUARD {
        // slope = 2 (epsilon = 0) or within the guard band of it
        return Ok(RenormDepth { n: 0, k: 1 });
    }
    let nearest = t.round();
    if nearest >= 1.0 && (t - nearest).abs() < GUARD {
        return Err(Error::MarkovBoundary {
            epsilon,
            m: nearest as u32,
        });
    }
    let n = t.floor() as u32;
    if n >= 63 {
        return Err(Error::InvalidArgument(format!(
            "renormalization depth {n} overflows K at epsilon = {epsilon}"
        )));
    }
    Ok(RenormDepth { n, k: 1u64 << n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_depths() {
        assert_eq!(
            renormalization_depth(1.0 / 3.0).unwrap(),
            RenormDepth { n: 1, k: 2 }
        );
        assert_eq!(
            renormalization_depth(0.2).unwrap(),
            RenormDepth { n: 0, k: 1 }
        );
        assert_eq!(
            renormalization_depth(0.0).unwrap(),
            RenormDepth { n: 0, k: 1 }
        );
    }

    #[test]
    fn markov_boundaries_are_errors() {
        let first = 1.0 - std::f64::consts::SQRT_2 / 2.0;
        assert!(matches!(
            renormalization_depth(first),
            Err(Error::MarkovBoundary { m: 1, .. })
        ));
        let second = 1.0 - 2f64.powf(0.25) / 2.0;
        assert!(matches!(
            renormalization_depth(second),
            Err(Error::MarkovBoundary { m: 2, .. })
        ));
    }

    #[test]
    fn depth_brackets_the_slope() {
        for eps in [0.05, 0.3, 0.31, 0.4, 0.45, 0.46, 0.49, 0.499] {
            let RenormDepth { n, k } = renormalization_depth(eps).unwrap();
            let slope = 2.0 * (1.0 - eps);
            let lo = 2f64.powf(2f64.powi(-(n as i32 + 1)));
            let hi = 2f64.powf(2f64.powi(-(n as i32)));
            assert!(lo < slope && slope < hi, "eps = {eps}, n = {n}");
            assert_eq!(k, 1 << n);
        }
    }

    #[test]
    fn outside_expanding_regime() {
        assert!(renormalization_depth(0.5).is_err());
        assert!(renormalization_depth(0.7).is_err());
        assert!(renormalization_depth(1.2).is_err());
    }
}
