use super::GridDensity;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};

/// `sum_i |f_{i+1} - f_i|` over the cyclic grid, which is the total
/// variation of the interpolant.
pub fn total_variation(f: &GridDensity) -> f64 {
    let v = f.values();
    let m = v.len();
    (0..m).map(|i| (v[(i + 1) % m] - v[i]).abs()).sum()
}

/// Mean position over the tracked support arc, computed in the chart where
/// the arc is an ordinary interval and reduced mod 1.
pub fn center_of_mass(f: &GridDensity) -> Result<CirclePoint> {
    let arc = f.support().ok_or(Error::NoSupport)?;
    if arc.length() > 0.5 {
        return Err(Error::SupportTooWide(arc.length()));
    }
    let v = f.values();
    let m = v.len();
    let h = 1.0 / m as f64;
    let (a, b) = arc.chart();
    let first = (a * m as f64).floor() as i64;
    let last = (b * m as f64).ceil() as i64;
    let (mut mass, mut moment) = (0.0, 0.0);
    for k in first..last {
        let i = k.rem_euclid(m as i64) as usize;
        let (fa, fb) = (v[i], v[(i + 1) % m]);
        let x = k as f64 * h;
        mass += 0.5 * h * (fa + fb);
        moment += fa * (x * h + 0.5 * h * h) + (fb - fa) * (0.5 * x * h + h * h / 3.0);
    }
    if mass <= 0.0 {
        return Err(Error::InvalidDensity("no mass on the support arc".into()));
    }
    CirclePoint::new(moment / mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        assert_eq!(total_variation(&GridDensity::uniform(64).unwrap()), 0.0);
        let f = GridDensity::sine(1 << 14, 0.025).unwrap();
        assert!((total_variation(&f) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn center_of_symmetric_bumps() {
        let m = 1 << 14;
        let f = GridDensity::bump(m, 0.3, 0.2).unwrap();
        assert!((center_of_mass(&f).unwrap().value() - 0.3).abs() < 1e-9);
        let w = GridDensity::bump(m, 0.0, 0.2).unwrap();
        assert!(center_of_mass(&w).unwrap().distance(CirclePoint::ZERO) < 1e-9);
    }

    #[test]
    fn center_needs_a_short_support() {
        assert_eq!(
            center_of_mass(&GridDensity::uniform(64).unwrap()),
            Err(Error::NoSupport)
        );
        let wide = GridDensity::bump(1 << 10, 0.5, 0.8).unwrap();
        assert!(matches!(
            center_of_mass(&wide),
            Err(Error::SupportTooWide(_))
        ));
    }
}
