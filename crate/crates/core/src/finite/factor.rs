use serde::{Deserialize, Serialize};

use super::{check_epsilon, TorusConfig};
use crate::circle::{signed_distance, CirclePoint};
use crate::error::{Error, Result};

/// Factor coordinates for two sites: `u = x + y`, `v = x - y` (mod 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorCoordsN2 {
    pub u: CirclePoint,
    pub v: CirclePoint,
}

/// Factor coordinates for three sites: `w = x + y + z`, `u = x - y`,
/// `v = y - z` (mod 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorCoordsN3 {
    pub w: CirclePoint,
    pub u: CirclePoint,
    pub v: CirclePoint,
}

fn expect_sites(cfg: &TorusConfig, n: usize) -> Result<()> {
    if cfg.len() == n {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            expected: n,
            got: cfg.len(),
        })
    }
}

pub fn to_factor_n2(cfg: &TorusConfig) -> Result<FactorCoordsN2> {
    expect_sites(cfg, 2)?;
    let (x, y) = (cfg.get(0).value(), cfg.get(1).value());
    Ok(FactorCoordsN2 {
        u: CirclePoint::wrap(x + y),
        v: CirclePoint::wrap(x - y),
    })
}

/// `G_{eps,2}(u, v) = (2u, H(v))`.
pub fn step_factor_n2(fc: FactorCoordsN2, epsilon: f64) -> FactorCoordsN2 {
    FactorCoordsN2 {
        u: CirclePoint::wrap(2.0 * fc.u.value()),
        v: map_h(fc.v, epsilon),
    }
}

/// The difference dynamics for two sites, `v -> 2v - 2 eps g(v) mod 1`, with
/// the value at the discontinuity fixed to `H(1/2) = eps`.
pub fn map_h(v: CirclePoint, epsilon: f64) -> CirclePoint {
    let v = v.value();
    let slope = 2.0 * (1.0 - epsilon);
    let out = if v < 0.5 {
        slope * v
    } else if v > 0.5 {
        slope * v + 2.0 * epsilon - 1.0
    } else {
        epsilon
    };
    CirclePoint::wrap(out)
}

/// The centrally symmetric Lorenz map on `[0, 1]` obtained by restricting `H`
/// to `[eps, 1 - eps]` and rescaling. Right-continuous at `w = 1/2`.
pub fn map_l(w: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if epsilon >= 0.5 {
        return Err(Error::Regime("0 <= epsilon < 1/2 for the Lorenz map"));
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidArgument(format!(
            "Lorenz map argument {w} outside [0, 1]"
        )));
    }
    let slope = 2.0 * (1.0 - epsilon);
    Ok(if w < 0.5 {
        slope * w + epsilon
    } else {
        slope * w + epsilon - 1.0
    })
}

pub fn to_factor_n3(cfg: &TorusConfig) -> Result<FactorCoordsN3> {
    expect_sites(cfg, 3)?;
    let (x, y, z) = (cfg.get(0).value(), cfg.get(1).value(), cfg.get(2).value());
    Ok(FactorCoordsN3 {
        w: CirclePoint::wrap(x + y + z),
        u: CirclePoint::wrap(x - y),
        v: CirclePoint::wrap(y - z),
    })
}

/// `G_{eps,3}`: doubling in `w`, and on the difference plane
///
/// ```text
/// u' = 2u + (2 eps / 3) (g(v) - g(u + v) - 2 g(u))
/// v' = 2v + (2 eps / 3) (g(u) - g(u + v) - 2 g(v))
/// ```
pub fn step_factor_n3(fc: FactorCoordsN3, epsilon: f64) -> FactorCoordsN3 {
    let (u, v) = (fc.u.value(), fc.v.value());
    let (gu, gv, guv) = (
        signed_distance(u),
        signed_distance(v),
        signed_distance(u + v),
    );
    let k = 2.0 * epsilon / 3.0;
    FactorCoordsN3 {
        w: CirclePoint::wrap(2.0 * fc.w.value()),
        u: CirclePoint::wrap(2.0 * u + k * (gv - guv - 2.0 * gu)),
        v: CirclePoint::wrap(2.0 * v + k * (gu - guv - 2.0 * gv)),
    }
}

/// The three-site difference dynamics restricted to the invariant line
/// `u = v`: `u -> 2u - (2 eps / 3)(g(u) + g(2u)) mod 1`.
pub fn diagonal_map_n3(u: CirclePoint, epsilon: f64) -> CirclePoint {
    let u = u.value();
    CirclePoint::wrap(
        2.0 * u - 2.0 * epsilon / 3.0 * (signed_distance(u) + signed_distance(2.0 * u)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> CirclePoint {
        CirclePoint::new(x).unwrap()
    }

    #[test]
    fn factor_n2_examples() {
        let fc = FactorCoordsN2 {
            u: p(0.3),
            v: p(0.4),
        };
        let out = step_factor_n2(fc, 0.25);
        assert!((out.u.value() - 0.6).abs() < 1e-15);
        assert!((out.v.value() - 0.6).abs() < 1e-15);
        assert_eq!(map_h(p(0.0), 0.37).value(), 0.0);
    }

    #[test]
    fn map_h_examples() {
        for eps in [0.1, 0.3, 0.45, 0.8] {
            assert_eq!(map_h(p(0.5), eps).value(), eps);
        }
        assert!((map_h(p(0.25), 0.25).value() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn map_l_examples() {
        for eps in [0.0, 0.2, 0.3, 0.49] {
            assert!((map_l(0.0, eps).unwrap() - eps).abs() < 1e-15);
        }
        assert!((map_l(1.0, 0.3).unwrap() - 0.7).abs() < 1e-15);
        assert!((map_l(0.5, 0.3).unwrap() - 0.0).abs() < 1e-15);
        assert!(map_l(0.2, 0.5).is_err());
        assert!(map_l(0.2, 0.7).is_err());
        assert!(map_l(1.2, 0.3).is_err());
    }

    #[test]
    fn factor_n3_examples() {
        let fc = FactorCoordsN3 {
            w: p(0.0),
            u: p(0.1),
            v: p(0.2),
        };
        let out = step_factor_n3(fc, 0.3);
        assert!((out.u.value() - 0.14).abs() < 1e-12);
        assert!((out.v.value() - 0.28).abs() < 1e-12);

        let third = FactorCoordsN3 {
            w: p(0.0),
            u: p(1.0 / 3.0),
            v: p(1.0 / 3.0),
        };
        let once = step_factor_n3(third, 0.37);
        assert!((once.u.value() - 2.0 / 3.0).abs() < 1e-12);
        assert!((once.v.value() - 2.0 / 3.0).abs() < 1e-12);
        let twice = step_factor_n3(once, 0.37);
        assert!((twice.u.value() - 1.0 / 3.0).abs() < 1e-12);
        assert!((twice.v.value() - 1.0 / 3.0).abs() < 1e-12);

        let origin = FactorCoordsN3 {
            w: p(0.0),
            u: p(0.0),
            v: p(0.0),
        };
        let o = step_factor_n3(origin, 0.6);
        assert_eq!((o.u.value(), o.v.value()), (0.0, 0.0));
    }

    #[test]
    fn diagonal_map_examples() {
        assert_eq!(diagonal_map_n3(p(0.0), 0.3).value(), 0.0);
        assert!((diagonal_map_n3(p(0.2), 0.3).value() - 0.28).abs() < 1e-12);
    }

    #[test]
    fn factor_requires_site_count() {
        let three = TorusConfig::from_reals(&[0.1, 0.2, 0.3]).unwrap();
        assert!(to_factor_n2(&three).is_err());
        let two = TorusConfig::from_reals(&[0.1, 0.2]).unwrap();
        assert!(to_factor_n3(&two).is_err());
    }
}
