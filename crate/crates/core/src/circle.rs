//! Arithmetic on the circle `T = R/Z`.
//!
//! Points are stored as `f64` in `[0, 1)`. The coupling kernel is the signed
//! distance [`signed_distance`], and orientation-dependent quantities use the
//! counterclockwise arc length [`ccw_arc`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the circle, always in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0.0);

    /// Reduces a finite real mod 1.
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        Ok(CirclePoint(wrap(x)))
    }

    /// Reduction without the finiteness check, for hot loops whose inputs are
    /// finite by construction.
    #[inline]
    pub fn wrap(x: f64) -> Self {
        debug_assert!(x.is_finite());
        CirclePoint(wrap(x))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Reflection `x -> -x`.
    #[inline]
    pub fn reflected(self) -> Self {
        CirclePoint(wrap(-self.0))
    }

    #[inline]
    pub fn shifted(self, t: f64) -> Self {
        CirclePoint(wrap(self.0 + t))
    }

    /// Distance on the circle, `|g(self - other)|`, in `[0, 1/2]`.
    #[inline]
    pub fn distance(self, other: CirclePoint) -> f64 {
        signed_distance(self.0 - other.0).abs()
    }
}

impl From<CirclePoint> for f64 {
    fn from(p: CirclePoint) -> f64 {
        p.0
    }
}

/// `x mod 1` in `[0, 1)`. Outputs that round to `1.0` are folded back to `0.0`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        // `+ 0.0` turns a negative zero into a positive one.
        r + 0.0
    }
}

/// Checked reduction mod 1.
pub fn reduce(x: f64) -> Result<CirclePoint> {
    CirclePoint::new(x)
}

/// The signed distance `g`: the 1-periodic odd function equal to `u` on
/// `(-1/2, 1/2)` and to `0` at `±1/2`.
#[inline]
pub fn signed_distance(u: f64) -> f64 {
    let r = wrap(u);
    if r < 0.5 {
        r
    } else if r > 0.5 {
        r - 1.0
    } else {
        0.0
    }
}

/// Counterclockwise arc length from `x` to `y`, `(y - x) mod 1`.
#[inline]
pub fn ccw_arc(x: CirclePoint, y: CirclePoint) -> f64 {
    wrap(y.0 - x.0)
}

/// A closed arc `{start + t : 0 <= t <= length}` of the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcInterval {
    start: CirclePoint,
    length: f64,
}

impl ArcInterval {
    pub fn new(start: CirclePoint, length: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&length) {
            return Err(Error::InvalidArgument(format!(
                "arc length {length} outside [0, 1]"
            )));
        }
        Ok(ArcInterval { start, length })
    }

    /// The arc from `a` counterclockwise to `b`.
    pub fn between(a: CirclePoint, b: CirclePoint) -> Self {
        ArcInterval {
            start: a,
            length: ccw_arc(a, b),
        }
    }

    pub fn full() -> Self {
        ArcInterval {
            start: CirclePoint::ZERO,
            length: 1.0,
        }
    }

    pub fn start(&self) -> CirclePoint {
        self.start
    }

    pub fn end(&self) -> CirclePoint {
        self.start.shifted(self.length)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= 1.0
    }

    /// Closed membership, `d(start, p) <= length`. Full arcs contain everything.
    pub fn contains(&self, p: CirclePoint) -> bool {
        if self.is_full() {
            return true;
        }
        ccw_arc(self.start, p) <= self.length
    }

    /// Lift of the arc into `R` as `[a, a + length]` with `a = start`.
    pub fn chart(&self) -> (f64, f64) {
        let a = self.start.value();
        (a, a + self.length)
    }

    pub fn midpoint(&self) -> CirclePoint {
        self.start.shifted(0.5 * self.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> CirclePoint {
        CirclePoint::new(x).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(1.25).unwrap().value(), 0.25);
        assert_eq!(reduce(-0.25).unwrap().value(), 0.75);
        assert_eq!(reduce(0.0).unwrap().value(), 0.0);
        assert!(reduce(f64::NAN).is_err());
        assert!(reduce(f64::INFINITY).is_err());
    }

    #[test]
    fn reduce_never_returns_one_or_negative_zero() {
        let tiny = -1e-20;
        let r = reduce(tiny).unwrap().value();
        assert!((0.0..1.0).contains(&r));
        let z = reduce(-0.0).unwrap().value();
        assert!(z.is_sign_positive());
        assert!(reduce(1.0 - f64::EPSILON / 4.0).unwrap().value() < 1.0);
    }

    #[test]
    fn signed_distance_examples() {
        assert_eq!(signed_distance(0.25), 0.25);
        assert_eq!(signed_distance(0.5), 0.0);
        assert_eq!(signed_distance(-0.5), 0.0);
        assert_eq!(signed_distance(0.75), -0.25);
        assert_eq!(signed_distance(1.5), 0.0);
    }

    #[test]
    fn ccw_arc_examples() {
        assert!((ccw_arc(p(0.1), p(0.4)) - 0.3).abs() < 1e-15);
        assert!((ccw_arc(p(0.4), p(0.1)) - 0.7).abs() < 1e-15);
        assert_eq!(ccw_arc(p(0.3), p(0.3)), 0.0);
    }

    #[test]
    fn arc_membership() {
        let arc = ArcInterval::new(p(0.9), 0.2).unwrap();
        assert!(arc.contains(p(0.95)));
        assert!(arc.contains(p(0.05)));
        assert!(arc.contains(p(0.9)));
        assert!(!arc.contains(p(0.5)));
        assert!((arc.end().value() - 0.1).abs() < 1e-15);
        assert!(ArcInterval::full().contains(p(0.123)));
        assert!(ArcInterval::new(p(0.0), 1.5).is_err());
    }
}
