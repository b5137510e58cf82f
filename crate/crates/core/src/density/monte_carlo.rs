use rand::Rng;

use super::{build_map, GridDensity};
use crate::ensemble::{stream_rng, EmpiricalHistogram};
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 10_000;

/// Draws `samples` points from `f` by inverting its piecewise-quadratic CDF,
/// maps each through `F_f` and histograms the images. An independent check
/// on the transfer operator.
pub fn monte_carlo_pushforward(
    f: &GridDensity,
    epsilon: f64,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<EmpiricalHistogram> {
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples,
            min: MIN_SAMPLES,
        });
    }
    let map = build_map(f, epsilon)?;
    let cells = f.cell_masses();
    let mut cdf = Vec::with_capacity(cells.len() + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for c in &cells {
        acc += c;
        cdf.push(acc);
    }
    let total = acc;
    let v = f.values();
    let m = v.len();
    let h = 1.0 / m as f64;

    let mut rng = stream_rng(seed, "monte-carlo", 0);
    let mut hist = EmpiricalHistogram::new(bins)?;
    for _ in 0..samples {
        let u = rng.gen::<f64>() * total;
        // last cell whose left cumulative mass is at most u, skipping empty cells
        let i = (cdf.partition_point(|&c| c <= u) - 1).min(m - 1);
        let (a, b) = (v[i], v[(i + 1) % m]);
        let r = (u - cdf[i]) / h;
        let t = solve_cell(a, b, r).clamp(0.0, 1.0);
        hist.add(map.eval((i as f64 + t) * h).value());
    }
    Ok(hist)
}

/// `t` in `[0, 1]` with `a t + (b - a) t^2 / 2 = r`.
fn solve_cell(a: f64, b: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let d = b - a;
    if d.abs() < 1e-14 * (a.abs() + b.abs()).max(1e-300) {
        return if a > 0.0 { r / a } else { 0.5 };
    }
    // stable root of (d/2) t^2 + a t - r = 0
    let disc = (a * a + 2.0 * d * r).max(0.0);
    2.0 * r / (a + disc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_samples() {
        let f = GridDensity::uniform(64).unwrap();
        assert!(matches!(
            monte_carlo_pushforward(&f, 0.3, 0, 16, 1),
            Err(Error::TooFewSamples { got: 0, .. })
        ));
    }

    #[test]
    fn uniform_stays_uniform() {
        let f = GridDensity::uniform(1 << 10).unwrap();
        let h = monte_carlo_pushforward(&f, 0.6, 200_000, 64, 3).unwrap();
        assert!(h.ks_distance_to_uniform().unwrap() < 0.01);
    }

    #[test]
    fn cell_inversion() {
        for (a, b) in [(1.0, 1.0), (0.0, 2.0), (2.0, 0.0), (0.5, 1.5)] {
            for t in [0.0, 0.3, 0.9, 1.0] {
                let r = a * t + 0.5 * (b - a) * t * t;
                assert!((solve_cell(a, b, r) - t).abs() < 1e-12, "{a} {b} {t}");
            }
        }
    }
}
