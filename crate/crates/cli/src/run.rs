//! The five run modes. Each writes its data files through an `OutputSet`;
//! the manifest goes last, after every data file is in place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{SecondsFormat, Utc};
use serde_json::json;

use coupled_doubling::acceptance;
use coupled_doubling::classify::{classify_component, min_gap};
use coupled_doubling::density::{center_of_mass, total_variation, transfer_step, GridDensity};
use coupled_doubling::ensemble::{
    epsilon_scan, random_config, simulate_orbit, ConservedSum, DiameterStats, GapStats,
    LabelVisits, Observation, Observer, OrbitSpec, ScanObservable, ScanSpec, Trajectory,
};
use coupled_doubling::finite::{renormalization_depth, CouplingParams, TorusConfig};

use crate::config::{ExperimentConfig, InitSpec, Mode, Observable};
use crate::output::{csv_field, fmt_f64, fmt_opt, OutputSet, RunManifest, RunStatus};

pub const TOOL: &str = "cdlab";

/// What a run produced, for the caller to report.
#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    /// Human-readable summary for stdout.
    pub report: String,
    /// False when the run failed or, in verify mode, when a criterion failed.
    pub success: bool,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Runs `config`. Module errors do not abort: they are recorded in the
/// manifest as a failed run. Only I/O trouble with the output directory
/// itself is returned as `Err`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let started = now();
    let mut outputs = OutputSet::create(&config.out_dir)?;
    let result = match config.mode {
        Mode::Finite => run_finite(config, &mut outputs),
        Mode::Density => run_density(config, &mut outputs),
        Mode::Scan => run_scan(config, &mut outputs),
        Mode::Renorm => run_renorm(config, &mut outputs),
        Mode::Verify => run_verify(&mut outputs),
    };
    let (status, error, report, success) = match result {
        Ok((report, passed)) => (RunStatus::Ok, None, report, passed),
        Err(e) => {
            let msg = format!("{} run ({}) failed: {e:#}", config.mode, context(config));
            (RunStatus::Failed, Some(msg.clone()), msg, false)
        }
    };
    let manifest = RunManifest {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.to_raw(),
        seed: config.seed,
        started,
        finished: now(),
        status,
        error,
        outputs: outputs.into_digests(),
    };
    manifest.write(&config.out_dir)?;
    Ok(RunOutcome {
        manifest,
        report,
        success,
    })
}

fn context(c: &ExperimentConfig) -> String {
    let mut s = String::new();
    if let Some(e) = c.epsilon {
        let _ = write!(s, "epsilon={e}, ");
    }
    if let Some(g) = &c.epsilon_grid {
        let _ = write!(s, "epsilon_grid of {}, ", g.len());
    }
    let _ = write!(s, "sites={}, steps={}, seed={}", c.sites, c.steps, c.seed);
    s
}

fn epsilon(c: &ExperimentConfig) -> f64 {
    c.epsilon
        .expect("validated configs carry epsilon in this mode")
}

/// `orbit.csv`: one row per recorded step with the positions of every site
/// and the requested per-step observables. `summary.json` holds the
/// streaming summaries.
fn run_finite(c: &ExperimentConfig, out: &mut OutputSet) -> Result<(String, bool)> {
    let params = CouplingParams::new(epsilon(c), c.sites)?;
    let cfg0 = match &c.init {
        InitSpec::Explicit(xs) => TorusConfig::from_reals(xs)?,
        _ => random_config(c.seed, 0, c.sites),
    };
    let spec = OrbitSpec {
        params,
        seed: c.seed,
        burn_in: c.burn_in,
        steps: c.steps,
    };
    let mut observers: Vec<Box<dyn Observer>> = vec![
        Box::new(Trajectory::new(c.sites, c.steps, c.allow_large)?),
        Box::new(ConservedSum::new(params)),
    ];
    if c.has(Observable::Labels) {
        observers.push(Box::new(LabelVisits::new()));
    }
    if c.has(Observable::MinGap) {
        observers.push(Box::new(GapStats::new()));
    }
    if c.has(Observable::Diameter) {
        observers.push(Box::new(DiameterStats::new()));
    }
    let record = simulate_orbit(&cfg0, spec, observers)?;
    let positions = record
        .observations
        .iter()
        .find_map(|o| match o {
            Observation::Trajectory { positions, .. } => Some(positions),
            _ => None,
        })
        .context("trajectory missing from the orbit record")?;

    let mut csv = String::from("step");
    for s in 0..c.sites {
        let _ = write!(csv, ",x_{s}");
    }
    for o in [Observable::Labels, Observable::MinGap, Observable::Diameter] {
        if c.has(o) {
            let _ = write!(
                csv,
                ",{}",
                if o == Observable::Labels {
                    "label"
                } else {
                    o.name()
                }
            );
        }
    }
    csv.push('\n');
    for (t, row) in positions.chunks_exact(c.sites).enumerate() {
        let _ = write!(csv, "{}", c.burn_in + t as u64);
        for &x in row {
            let _ = write!(csv, ",{}", fmt_f64(x));
        }
        let cfg = TorusConfig::from_reals(row)?;
        if c.has(Observable::Labels) {
            let _ = write!(csv, ",{}", classify_component(&cfg)?);
        }
        if c.has(Observable::MinGap) {
            let _ = write!(csv, ",{}", fmt_f64(min_gap(&cfg)?));
        }
        if c.has(Observable::Diameter) {
            let _ = write!(csv, ",{}", fmt_f64(cfg.diameter()));
        }
        csv.push('\n');
    }
    out.write("orbit.csv", csv.as_bytes())?;

    let summaries: Vec<&Observation> = record
        .observations
        .iter()
        .filter(|o| !matches!(o, Observation::Trajectory { .. }))
        .collect();
    let summary = json!({
        "initial": record.initial,
        "last": record.last,
        "observations": summaries,
    });
    out.write("summary.json", pretty(&summary)?.as_bytes())?;

    let mut report = format!(
        "finite: {} steps of {} sites after {} burn-in steps",
        c.steps, c.sites, c.burn_in
    );
    if let Some(n) = record.find(|o| o.labels_visited()) {
        let _ = write!(report, "; {n} distinct labels visited");
    }
    Ok((report, true))
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn write_density(
    out: &mut OutputSet,
    stem: &str,
    f: &GridDensity,
    eps: f64,
    step: u64,
) -> Result<()> {
    out.write(&format!("{stem}.csv"), f.to_csv().as_bytes())?;
    out.write(
        &format!("{stem}.json"),
        pretty(&f.header(eps, step))?.as_bytes(),
    )
}

/// `density_steps.csv`: one row per recorded step with the mass and the
/// requested statistics. The last density is always written in full.
fn run_density(c: &ExperimentConfig, out: &mut OutputSet) -> Result<(String, bool)> {
    let eps = epsilon(c);
    let mut f = match c.init {
        InitSpec::Bump { center, width } => GridDensity::bump(c.grid_size, center, width)?,
        InitSpec::Sine { amplitude } => GridDensity::sine(c.grid_size, amplitude)?,
        _ => unreachable!("validation restricts density initial conditions"),
    };
    let mut csv = String::from("step,mass");
    if c.has(Observable::Support) {
        csv.push_str(",support_start,support_length");
    }
    if c.has(Observable::CenterOfMass) {
        csv.push_str(",center_of_mass");
    }
    if c.has(Observable::TotalVariation) {
        csv.push_str(",total_variation");
    }
    csv.push('\n');

    let total = c.burn_in + c.steps;
    for step in 0..=total {
        if step >= c.burn_in {
            let _ = write!(csv, "{step},{}", fmt_f64(f.integral()));
            if c.has(Observable::Support) {
                let arc = f.support();
                let _ = write!(
                    csv,
                    ",{},{}",
                    fmt_opt(arc.map(|a| a.start().value())),
                    fmt_opt(arc.map(|a| a.length()))
                );
            }
            if c.has(Observable::CenterOfMass) {
                // undefined once the support is too wide to pick a chart
                let com = center_of_mass(&f).ok().map(|p| p.value());
                let _ = write!(csv, ",{}", fmt_opt(com));
            }
            if c.has(Observable::TotalVariation) {
                let _ = write!(csv, ",{}", fmt_f64(total_variation(&f)));
            }
            csv.push('\n');
            if c.has(Observable::Densities) {
                write_density(out, &format!("density_{step:05}"), &f, eps, step)?;
            }
        }
        if step < total {
            f = transfer_step(&f, eps).with_context(|| format!("transfer step {step}"))?;
        }
    }
    out.write("density_steps.csv", csv.as_bytes())?;
    write_density(out, "density_final", &f, eps, total)?;
    Ok((
        format!(
            "density: {} transfer steps on a grid of {}",
            total, c.grid_size
        ),
        true,
    ))
}

const SCAN_HEADER: &str = "epsilon,labels_visited,min_gap,min_gap_q01,min_gap_median,\
sync_fraction,splay_fraction,undecided_fraction,renorm_n,renorm_k,ks_uniform,error";

/// `scan.csv`: one row per epsilon. Per-row failures land in the `error`
/// column and the scan carries on.
fn run_scan(c: &ExperimentConfig, out: &mut OutputSet) -> Result<(String, bool)> {
    let observables = c
        .observables
        .iter()
        .filter_map(|o| match o {
            Observable::Labels => Some(ScanObservable::Labels),
            Observable::MinGap => Some(ScanObservable::MinGap),
            Observable::SyncOutcome => Some(ScanObservable::SyncOutcome),
            Observable::Renorm => Some(ScanObservable::Renorm),
            Observable::Uniformity => Some(ScanObservable::Uniformity),
            _ => None,
        })
        .collect();
    let spec = ScanSpec {
        observables,
        n_sites: c.sites,
        orbits: c.orbits,
        burn_in: c.burn_in,
        steps: c.steps,
        seed: c.seed,
    };
    let grid = c.epsilon_grid.as_deref().unwrap_or_default();
    let rows = epsilon_scan(grid, &spec);
    let mut csv = format!("{SCAN_HEADER}\n");
    let mut failures = 0;
    for r in &rows {
        let count = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.epsilon),
            count(r.labels_visited.map(|v| v as u64)),
            fmt_opt(r.min_gap),
            fmt_opt(r.min_gap_q01),
            fmt_opt(r.min_gap_median),
            fmt_opt(r.sync_fraction),
            fmt_opt(r.splay_fraction),
            fmt_opt(r.undecided_fraction),
            count(r.renorm.map(|d| d.n as u64)),
            count(r.renorm.map(|d| d.k)),
            fmt_opt(r.ks_uniform),
            csv_field(r.error.as_deref().unwrap_or_default()),
        );
        failures += r.error.is_some() as usize;
    }
    out.write("scan.csv", csv.as_bytes())?;
    Ok((
        format!("scan: {} rows, {failures} with errors", rows.len()),
        true,
    ))
}

fn run_renorm(c: &ExperimentConfig, out: &mut OutputSet) -> Result<(String, bool)> {
    let eps = epsilon(c);
    let depth = renormalization_depth(eps)?;
    let doc = json!({ "epsilon": eps, "n": depth.n, "k": depth.k });
    out.write("renorm.json", pretty(&doc)?.as_bytes())?;
    Ok((format!("n={}, K={}", depth.n, depth.k), true))
}

/// Runs the acceptance suite. `verify.csv` leaves out timings so replays
/// stay digest-stable; the printed report has them.
fn run_verify(out: &mut OutputSet) -> Result<(String, bool)> {
    let reports = acceptance::run_all();
    let mut csv = String::from("criterion,name,passed,detail\n");
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.id,
            r.name,
            r.passed,
            csv_field(&r.detail)
        );
        let _ = writeln!(text, "{r}");
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let _ = write!(text, "{passed} of {} criteria passed", reports.len());
    out.write("verify.csv", csv.as_bytes())?;
    Ok((text, passed == reports.len()))
}

/// Result of re-running a manifest.
#[derive(Debug)]
pub struct ReplayReport {
    pub outcome: RunOutcome,
    /// Output names whose digest differs or that exist on only one side.
    pub mismatches: Vec<String>,
}

/// Re-runs the configuration recorded in `manifest_path`, optionally into a
/// different directory, and compares output digests.
pub fn replay(manifest_path: &Path, out_dir: Option<PathBuf>) -> Result<ReplayReport> {
    let recorded = RunManifest::read(manifest_path)?;
    let mut raw = recorded.config.clone();
    if let Some(dir) = out_dir {
        raw.out_dir = Some(dir);
    }
    let config = ExperimentConfig::validate(raw).context("manifest config")?;
    let outcome = run(&config)?;
    let mismatches = diff_digests(&recorded.outputs, &outcome.manifest.outputs);
    Ok(ReplayReport {
        outcome,
        mismatches,
    })
}

fn diff_digests(a: &BTreeMap<String, String>, b: &BTreeMap<String, String>) -> Vec<String> {
    a.keys()
        .chain(b.keys())
        .filter(|k| a.get(*k) != b.get(*k))
        .cloned()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}
