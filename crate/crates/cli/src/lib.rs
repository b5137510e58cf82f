//! Command-line runner for coupled doubling map experiments: configuration,
//! run modes, CSV/JSON output and reproducibility manifests.

pub mod config;
pub mod output;
pub mod run;

use anyhow::{bail, Context, Result};

/// Environment variable that sets the worker count. Results never depend on
/// it.
pub const WORKERS_ENV: &str = "CDLAB_WORKERS";

/// Sizes the global worker pool from `CDLAB_WORKERS` when set.
pub fn configure_workers() -> Result<Option<usize>> {
    let Ok(text) = std::env::var(WORKERS_ENV) else {
        return Ok(None);
    };
    let n: usize = text
        .trim()
        .parse()
        .with_context(|| format!("{WORKERS_ENV}: '{text}' is not a worker count"))?;
    if n == 0 {
        bail!("{WORKERS_ENV}: must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(Some(n))
}
