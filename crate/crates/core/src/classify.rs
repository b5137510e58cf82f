//! Geometry of three-site configurations: which of the six arc orderings a
//! configuration lies in, its minimum gap, and the limit states of the
//! contracting regime.

use serde::{Deserialize, Serialize};

use crate::circle::{ccw_arc, CirclePoint};
use crate::error::{Error, Result};
use crate::finite::{step_into, TorusConfig};

pub const TIE_TOL: f64 = 1e-12;
pub const DEFAULT_LIMIT_TOL: f64 = 1e-6;
pub const DEFAULT_LIMIT_STEPS: u64 = 10_000;

/// Ordering of the three counterclockwise arcs `d1 = d(x,y)`, `d2 = d(y,z)`,
/// `d3 = d(z,x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentLabel {
    /// `d1 < d3 < d2`
    I,
    /// `d1 < d2 < d3`
    II,
    /// `d2 < d1 < d3`
    III,
    /// `d2 < d3 < d1`
    IV,
    /// `d3 < d2 < d1`
    V,
    /// `d3 < d1 < d2`
    VI,
    Boundary,
}

impl ComponentLabel {
    pub const STRICT: [ComponentLabel; 6] = [
        ComponentLabel::I,
        ComponentLabel::II,
        ComponentLabel::III,
        ComponentLabel::IV,
        ComponentLabel::V,
        ComponentLabel::VI,
    ];

    /// Rank (0 = smallest) of `d1, d2, d3` for a strict label.
    pub fn ranks(self) -> Option<[u8; 3]> {
        use ComponentLabel::*;
        Some(match self {
            I => [0, 2, 1],
            II => [0, 1, 2],
            III => [1, 0, 2],
            IV => [2, 0, 1],
            V => [2, 1, 0],
            VI => [1, 2, 0],
            Boundary => return None,
        })
    }

    pub fn from_ranks(ranks: [u8; 3]) -> ComponentLabel {
        Self::STRICT
            .into_iter()
            .find(|l| l.ranks() == Some(ranks))
            .unwrap_or(ComponentLabel::Boundary)
    }

    /// Odd labels are I, III, V.
    pub fn is_odd(self) -> bool {
        matches!(
            self,
            ComponentLabel::I | ComponentLabel::III | ComponentLabel::V
        )
    }

    pub fn index(self) -> Option<usize> {
        Self::STRICT.iter().position(|&l| l == self)
    }

    /// Label of `cfg.permuted(perm)` given that `cfg` has label `self`.
    pub fn permuted(self, perm: [usize; 3]) -> ComponentLabel {
        let Some(ranks) = self.ranks() else {
            return ComponentLabel::Boundary;
        };
        let mut out = [0u8; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let (a, b) = (perm[k], perm[(k + 1) % 3]);
            // arc k of the old configuration runs from site k to site k+1
            *slot = if (a + 1) % 3 == b {
                ranks[a]
            } else {
                2 - ranks[b]
            };
        }
        ComponentLabel::from_ranks(out)
    }

    /// Label of the reflected configuration `-cfg`.
    pub fn reflected(self) -> ComponentLabel {
        match self.ranks() {
            Some(r) => ComponentLabel::from_ranks(r.map(|x| 2 - x)),
            None => ComponentLabel::Boundary,
        }
    }
}

impl std::fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ComponentLabel::I => "I",
            ComponentLabel::II => "II",
            ComponentLabel::III => "III",
            ComponentLabel::IV => "IV",
            ComponentLabel::V => "V",
            ComponentLabel::VI => "VI",
            ComponentLabel::Boundary => "boundary",
        };
        f.write_str(s)
    }
}

fn three(cfg: &TorusConfig) -> Result<[CirclePoint; 3]> {
    match cfg.sites() {
        &[x, y, z] => Ok([x, y, z]),
        s => Err(Error::SizeMismatch {
            expected: 3,
            got: s.len(),
        }),
    }
}

/// `(d(x,y), d(y,z), d(z,x))`.
pub fn pair_arcs(cfg: &TorusConfig) -> Result<[f64; 3]> {
    let [x, y, z] = three(cfg)?;
    Ok([ccw_arc(x, y), ccw_arc(y, z), ccw_arc(z, x)])
}

pub fn classify_component(cfg: &TorusConfig) -> Result<ComponentLabel> {
    Ok(classify_arcs(pair_arcs(cfg)?))
}

pub fn classify_arcs(d: [f64; 3]) -> ComponentLabel {
    if (d[0] - d[1]).abs() <= TIE_TOL
        || (d[1] - d[2]).abs() <= TIE_TOL
        || (d[2] - d[0]).abs() <= TIE_TOL
    {
        return ComponentLabel::Boundary;
    }
    let mut ranks = [0u8; 3];
    for i in 0..3 {
        ranks[i] = (0..3).filter(|&j| d[j] < d[i]).count() as u8;
    }
    ComponentLabel::from_ranks(ranks)
}

pub fn min_gap(cfg: &TorusConfig) -> Result<f64> {
    let d = pair_arcs(cfg)?;
    Ok(d[0].min(d[1]).min(d[2]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitKind {
    Sync,
    Splay,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitStateN3 {
    pub kind: LimitKind,
    /// Diameter for `Sync`, largest deviation of a gap from 1/3 for `Splay`,
    /// and the smaller of the two for `Undecided`.
    pub residual: f64,
    /// Steps taken before the decision.
    pub steps: u64,
}

fn splay_residual(cfg: &TorusConfig) -> f64 {
    cfg.sorted_gaps()
        .into_iter()
        .map(|g| (g - 1.0 / 3.0).abs())
        .fold(0.0, f64::max)
}

/// Iterates a three-site configuration in the contracting regime until it is
/// synchronised or evenly spread to within `tol`.
pub fn detect_limit_state(
    cfg: &TorusConfig,
    epsilon: f64,
    max_steps: u64,
    tol: f64,
) -> Result<LimitStateN3> {
    crate::finite::CouplingParams::new(epsilon, 3)?;
    if epsilon <= 0.5 {
        return Err(Error::Regime("epsilon > 1/2 for limit-state detection"));
    }
    three(cfg)?;
    let mut cur = cfg.clone();
    let mut next = cfg.clone();
    for step in 0..=max_steps {
        let diameter = cur.diameter();
        if diameter < tol {
            return Ok(LimitStateN3 {
                kind: LimitKind::Sync,
                residual: diameter,
                steps: step,
            });
        }
        let splay = splay_residual(&cur);
        if splay < tol {
            return Ok(LimitStateN3 {
                kind: LimitKind::Splay,
                residual: splay,
                steps: step,
            });
        }
        if step == max_steps {
            return Ok(LimitStateN3 {
                kind: LimitKind::Undecided,
                residual: diameter.min(splay),
                steps: step,
            });
        }
        step_into(cur.sites(), epsilon, next.as_mut_slice());
        std::mem::swap(&mut cur, &mut next);
    }
    unreachable!("loop returns at step == max_steps")
}

/// A circle `x -> (x + a_1, x + a_2, x + a_3)` in the three-torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorCircle {
    pub offsets: [f64; 3],
}

impl AttractorCircle {
    pub fn point(&self, x: f64) -> TorusConfig {
        let sites = self.offsets.map(|a| CirclePoint::wrap(x + a));
        TorusConfig::new(sites.to_vec()).expect("three sites")
    }

    /// Sup-norm distance from `cfg` to the circle.
    pub fn distance(&self, cfg: &TorusConfig) -> Result<f64> {
        let s = three(cfg)?;
        let shifted: Vec<CirclePoint> =
            s.iter().zip(self.offsets).map(|(p, a)| p.shifted(-a)).collect();
        Ok(0.5 * TorusConfig::new(shifted)?.diameter())
    }
}

/// The diagonal and the two evenly spread circles whose union attracts
/// almost every orbit when `epsilon > 1/2`. The second and third are swapped
/// by the dynamics.
pub fn contracting_attractor_circles() -> [AttractorCircle; 3] {
    [
        AttractorCircle {
            offsets: [0.0, 0.0, 0.0],
        },
        AttractorCircle {
            offsets: [0.0, 2.0 / 3.0, 1.0 / 3.0],
        },
        AttractorCircle {
            offsets: [0.0, 1.0 / 3.0, 2.0 / 3.0],
        },
    ]
}

/// Distance from `cfg` to the union of the attractor circles.
pub fn distance_to_attractor(cfg: &TorusConfig) -> Result<f64> {
    let mut best = f64::INFINITY;
    for c in contracting_attractor_circles() {
        best = best.min(c.distance(cfg)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{step_finite, CouplingParams};

    fn cfg(xs: &[f64]) -> TorusConfig {
        TorusConfig::from_reals(xs).unwrap()
    }

    #[test]
    fn labels_of_examples() {
        assert_eq!(
            classify_component(&cfg(&[0.0, 0.1, 0.4])).unwrap(),
            ComponentLabel::II
        );
        assert_eq!(
            classify_component(&cfg(&[0.0, 0.6, 0.9])).unwrap(),
            ComponentLabel::V
        );
        assert_eq!(
            classify_component(&cfg(&[0.0, 1.0 / 3.0, 2.0 / 3.0])).unwrap(),
            ComponentLabel::Boundary
        );
        assert!(classify_component(&cfg(&[0.0, 0.5])).is_err());
    }

    #[test]
    fn min_gap_examples() {
        assert!((min_gap(&cfg(&[0.0, 1.0 / 3.0, 2.0 / 3.0])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((min_gap(&cfg(&[0.0, 0.1, 0.4])).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rank_tables_are_permutations() {
        for l in ComponentLabel::STRICT {
            let mut r = l.ranks().unwrap();
            r.sort();
            assert_eq!(r, [0, 1, 2]);
            assert_eq!(ComponentLabel::from_ranks(l.ranks().unwrap()), l);
        }
    }

    #[test]
    fn permutations_keep_parity_reflection_flips_it() {
        for l in ComponentLabel::STRICT {
            assert_eq!(l.permuted([1, 2, 0]).is_odd(), l.is_odd());
            assert_eq!(l.permuted([1, 0, 2]).is_odd(), l.is_odd());
            assert_ne!(l.reflected().is_odd(), l.is_odd());
        }
    }

    #[test]
    fn limit_state_examples() {
        let s = detect_limit_state(&cfg(&[0.10, 0.12, 0.14]), 0.7, 10_000, 1e-6).unwrap();
        assert_eq!(s.kind, LimitKind::Sync);
        let s = detect_limit_state(&cfg(&[0.01, 0.34, 0.67]), 0.7, 10_000, 1e-6).unwrap();
        assert_eq!(s.kind, LimitKind::Splay);
        let s = detect_limit_state(&cfg(&[0.3, 0.3, 0.3]), 0.9, 10_000, 1e-6).unwrap();
        assert_eq!((s.kind, s.steps), (LimitKind::Sync, 0));
        assert!(detect_limit_state(&cfg(&[0.1, 0.2, 0.3]), 0.5, 10, 1e-6).is_err());
    }

    #[test]
    fn circle_points() {
        let [diag, second, _] = contracting_attractor_circles();
        let p = second.point(0.2).to_vec();
        assert!((p[1] - (0.2 + 2.0 / 3.0)).abs() < 1e-15);
        assert!((p[2] - (0.2 + 1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(diag.point(0.5).to_vec(), vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn companion_circles_swap() {
        let [_, second, third] = contracting_attractor_circles();
        let params = CouplingParams::new(0.7, 3).unwrap();
        for i in 0..100 {
            let x = i as f64 / 100.0 + 0.003;
            let a = step_finite(&second.point(x), &params).unwrap();
            assert!(third.distance(&a).unwrap() < 1e-9);
            let b = step_finite(&third.point(x), &params).unwrap();
            assert!(second.distance(&b).unwrap() < 1e-9);
        }
    }
}
