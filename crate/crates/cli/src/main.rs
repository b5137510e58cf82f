use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use coupled_doubling_cli::config::{self, Count, ExperimentConfig, Mode, RawConfig};
use coupled_doubling_cli::output::MANIFEST_NAME;
use coupled_doubling_cli::{configure_workers, run};

const MODES_HELP: &str = "\
Modes:
  finite   iterate one orbit of N diffusively coupled doubling maps and write
           positions plus per-step label, minimum gap and diameter (orbit.csv)
  density  push a density forward under the self-consistent transfer operator
           and track mass, support, center of mass and total variation
           (density_steps.csv, density_final.csv/json)
  scan     sweep epsilon over a grid of ensembles: labels visited, minimum gaps,
           sync/splay outcomes, renormalization depth, uniformity (scan.csv)
  renorm   print the renormalization depth n and component count K = 2^n of
           the two-site difference map
  verify   run the bundled acceptance suite; exit status 0 iff all pass

Every run writes manifest.json with the full config, seed, timestamps and
SHA-256 digests of its outputs. CDLAB_WORKERS sets the worker count.";

/// Experiments with mean-field coupled doubling maps.
#[derive(Debug, Parser)]
#[command(name = "cdlab", version, after_help = MODES_HELP)]
struct Cli {
    /// TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Re-run the config recorded in a manifest and compare digests.
    #[arg(long, value_name = "MANIFEST", conflicts_with_all = ["config", "mode"])]
    replay: Option<PathBuf>,
    /// Print the merged, validated config as TOML and exit.
    #[arg(long)]
    print_config: bool,

    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Coupling strength in [0, 1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Comma list `0.1,0.2` or evenly spaced `start:stop:count`.
    #[arg(long, value_parser = parse_grid)]
    epsilon_grid: Option<Grid>,
    /// Number of sites N (at least 2).
    #[arg(long)]
    sites: Option<Count>,
    /// Density grid points (a power of two).
    #[arg(long)]
    grid_size: Option<Count>,
    #[arg(long)]
    steps: Option<Count>,
    #[arg(long)]
    burn_in: Option<Count>,
    /// Master seed; every random stream derives from it.
    #[arg(long)]
    seed: Option<Count>,
    /// uniform-random | x0,x1,... | bump(center,width) | sine(amplitude)
    #[arg(long)]
    init: Option<String>,
    /// Comma list of observables for the chosen mode.
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<String>>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Orbits per epsilon in scan mode.
    #[arg(long)]
    orbits: Option<Count>,
    /// Allow trajectories above 10^7 stored points.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    grid_values(s).map(Grid)
}

fn grid_values(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{t}' is not a number"))
    };
    if let [a, b, n] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| format!("'{n}' is not a count"))?;
        return match n {
            0 => Err("count must be at least 1".into()),
            1 => Ok(vec![a]),
            _ => Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect()),
        };
    }
    s.split(',').map(num).collect()
}

impl Cli {
    fn flags(&self) -> RawConfig {
        RawConfig {
            mode: self.mode,
            epsilon: self.epsilon,
            epsilon_grid: self.epsilon_grid.as_ref().map(|g| g.0.clone()),
            sites: self.sites,
            grid_size: self.grid_size,
            steps: self.steps,
            burn_in: self.burn_in,
            seed: self.seed,
            init: self.init.clone(),
            observables: self.observables.clone(),
            out_dir: self.out_dir.clone(),
            orbits: self.orbits,
            allow_large: self.allow_large.then_some(true),
        }
    }

    fn experiment(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                config::parse_raw(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => RawConfig::default(),
        };
        ExperimentConfig::validate(file.overlay(self.flags()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    configure_workers()?;
    if let Some(manifest) = &cli.replay {
        let report = run::replay(manifest, cli.out_dir.clone())?;
        println!("{}", report.outcome.report);
        if report.mismatches.is_empty() {
            println!(
                "replay matches: {} output digests identical",
                report.outcome.manifest.outputs.len()
            );
            return Ok(report.outcome.success);
        }
        eprintln!("replay differs in: {}", report.mismatches.join(", "));
        return Ok(false);
    }
    let config = cli.experiment()?;
    if cli.print_config {
        print!("{}", config::emit(&config));
        return Ok(true);
    }
    let outcome = run::run(&config)?;
    if outcome.success {
        println!("{}", outcome.report);
    } else {
        eprintln!("{}", outcome.report);
    }
    println!("manifest: {}", config.out_dir.join(MANIFEST_NAME).display());
    Ok(outcome.success)
}
