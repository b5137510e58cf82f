//! Mean-field coupled doubling maps on the circle: finite-site dynamics,
//! their low-dimensional factors, ensemble statistics and the evolution of
//! site densities under the continuum model.

pub mod acceptance;
pub mod circle;
pub mod classify;
pub mod density;
pub mod ensemble;
pub mod error;
pub mod finite;

pub use circle::{ArcInterval, CirclePoint};
pub use error::{Error, Result};
pub use finite::{CouplingParams, TorusConfig};
