//! Experiment configuration: a flat TOML document whose keys mirror the
//! command-line flags. Everything is validated before any computation runs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Deserializer, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Iterate one orbit of the finite-N system.
    Finite,
    /// Push a density forward with the transfer operator.
    Density,
    /// Sweep epsilon over a grid of ensembles.
    Scan,
    /// Print the renormalization depth of the two-site factor.
    Renorm,
    /// Run the bundled acceptance suite.
    Verify,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Finite => "finite",
            Mode::Density => "density",
            Mode::Scan => "scan",
            Mode::Renorm => "renorm",
            Mode::Verify => "verify",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Labels,
    MinGap,
    Diameter,
    Support,
    CenterOfMass,
    TotalVariation,
    Densities,
    SyncOutcome,
    Renorm,
    Uniformity,
}

impl Observable {
    const ALL: [(Observable, &'static str); 10] = [
        (Observable::Labels, "labels"),
        (Observable::MinGap, "min_gap"),
        (Observable::Diameter, "diameter"),
        (Observable::Support, "support"),
        (Observable::CenterOfMass, "center_of_mass"),
        (Observable::TotalVariation, "total_variation"),
        (Observable::Densities, "densities"),
        (Observable::SyncOutcome, "sync_outcome"),
        (Observable::Renorm, "renorm"),
        (Observable::Uniformity, "uniformity"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(o, _)| *o == self).unwrap().1
    }

    fn allowed_in(mode: Mode) -> &'static [Observable] {
        use Observable::*;
        match mode {
            Mode::Finite => &[Labels, MinGap, Diameter],
            Mode::Density => &[Support, CenterOfMass, TotalVariation, Densities],
            Mode::Scan => &[Labels, MinGap, SyncOutcome, Renorm, Uniformity],
            Mode::Renorm | Mode::Verify => &[],
        }
    }

    fn defaults(mode: Mode, sites: usize) -> Vec<Observable> {
        use Observable::*;
        match mode {
            Mode::Finite if sites == 3 => vec![Labels, MinGap, Diameter],
            Mode::Finite => vec![Diameter],
            Mode::Density => vec![Support, CenterOfMass, TotalVariation],
            Mode::Scan if sites == 3 => vec![Labels, MinGap],
            Mode::Scan => vec![Uniformity],
            Mode::Renorm | Mode::Verify => vec![],
        }
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key = s.trim().replace('-', "_");
        Self::ALL
            .iter()
            .find(|(_, n)| *n == key)
            .map(|(o, _)| *o)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|(_, n)| *n).collect();
                format!("'{s}' is not one of {}", names.join(", "))
            })
    }
}

/// Initial condition. Text forms: `uniform-random`, an explicit list
/// `0.1,0.4,0.7`, `bump(center,width)` or `sine(amplitude)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    UniformRandom,
    Explicit(Vec<f64>),
    Bump { center: f64, width: f64 },
    Sine { amplitude: f64 },
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?
        .trim_start()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        })
        .collect()
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "uniform-random" {
            return Ok(InitSpec::UniformRandom);
        }
        if let Some(args) = call_args(s, "bump") {
            if let [center, width] = parse_floats(args)?[..] {
                return Ok(InitSpec::Bump { center, width });
            }
            return Err("bump takes two arguments: bump(center,width)".into());
        }
        if let Some(args) = call_args(s, "sine") {
            if let [amplitude] = parse_floats(args)?[..] {
                return Ok(InitSpec::Sine { amplitude });
            }
            return Err("sine takes one argument: sine(amplitude)".into());
        }
        parse_floats(s).map(InitSpec::Explicit).map_err(|e| {
            format!("{e}; expected uniform-random, a comma list, bump(c,w) or sine(a)")
        })
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // f64 Display is the shortest text that parses back to the same value
        match self {
            InitSpec::UniformRandom => f.write_str("uniform-random"),
            InitSpec::Explicit(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            InitSpec::Bump { center, width } => write!(f, "bump({center},{width})"),
            InitSpec::Sine { amplitude } => write!(f, "sine({amplitude})"),
        }
    }
}

/// A step count that also accepts whole floats such as `1e5`. Capped at
/// `i64::MAX` so every value can be written back as a TOML integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Count(pub u64);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Ok(n) = s.parse::<i64>() {
            return u64::try_from(n)
                .map(Count)
                .map_err(|_| format!("'{s}' is negative"));
        }
        s.parse::<f64>()
            .ok()
            .and_then(whole)
            .map(Count)
            .ok_or_else(|| format!("'{s}' is not a nonnegative whole number"))
    }
}

fn whole(x: f64) -> Option<u64> {
    (x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(63)).then_some(x as u64)
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Count;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative whole number")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Count, E> {
                i64::try_from(v)
                    .map(|_| Count(v))
                    .map_err(|_| E::custom(format!("{v} is too large")))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Count, E> {
                u64::try_from(v)
                    .map(Count)
                    .map_err(|_| E::custom(format!("{v} is negative")))
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Count, E> {
                whole(v)
                    .map(Count)
                    .ok_or_else(|| E::custom(format!("{v} is not a nonnegative whole number")))
            }
        }
        d.deserialize_any(Visitor)
    }
}

/// The document as written: every key optional, unknown keys rejected.
/// Flags produce the same shape and are layered over the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sites: Option<Count>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<Count>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Count>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<Count>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Count>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<Count>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_large: Option<bool>,
}

impl RawConfig {
    /// Keys set in `over` win.
    pub fn overlay(self, over: RawConfig) -> RawConfig {
        RawConfig {
            mode: over.mode.or(self.mode),
            epsilon: over.epsilon.or(self.epsilon),
            epsilon_grid: over.epsilon_grid.or(self.epsilon_grid),
            sites: over.sites.or(self.sites),
            grid_size: over.grid_size.or(self.grid_size),
            steps: over.steps.or(self.steps),
            burn_in: over.burn_in.or(self.burn_in),
            seed: over.seed.or(self.seed),
            init: over.init.or(self.init),
            observables: over.observables.or(self.observables),
            out_dir: over.out_dir.or(self.out_dir),
            orbits: over.orbits.or(self.orbits),
            allow_large: over.allow_large.or(self.allow_large),
        }
    }
}

/// A fully validated experiment with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub epsilon: Option<f64>,
    pub epsilon_grid: Option<Vec<f64>>,
    pub sites: usize,
    pub grid_size: usize,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub init: InitSpec,
    pub observables: Vec<Observable>,
    pub out_dir: PathBuf,
    pub orbits: u64,
    pub allow_large: bool,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT_DIR: &str = "cdlab-out";

fn check_epsilon(key: &str, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        bail!("epsilon out of range: {key} = {eps} (expected 0 <= epsilon < 1)");
    }
    Ok(eps)
}

impl ExperimentConfig {
    pub fn validate(raw: RawConfig) -> Result<Self> {
        let mode = raw
            .mode
            .context("mode: missing (finite, density, scan, renorm or verify)")?;
        let count = |c: Option<Count>, default: u64| c.map_or(default, |c| c.0);

        let epsilon = raw
            .epsilon
            .map(|e| check_epsilon("epsilon", e))
            .transpose()?;
        let epsilon_grid = match raw.epsilon_grid {
            Some(grid) => {
                if grid.is_empty() {
                    bail!("epsilon_grid: must not be empty");
                }
                for &e in &grid {
                    check_epsilon("epsilon_grid", e)?;
                }
                Some(grid)
            }
            None => None,
        };
        match mode {
            Mode::Finite | Mode::Density | Mode::Renorm if epsilon.is_none() => {
                bail!("epsilon: required in {mode} mode")
            }
            Mode::Scan if epsilon_grid.is_none() => bail!("epsilon_grid: required in scan mode"),
            _ => {}
        }

        let sites = count(raw.sites, 3);
        if sites < 2 {
            bail!("sites: need at least 2, got {sites}");
        }
        let sites = usize::try_from(sites).context("sites: too large")?;
        let grid_size = count(raw.grid_size, 1 << 14);
        if grid_size < 4 || !grid_size.is_power_of_two() {
            bail!("grid_size: must be a power of two and at least 4, got {grid_size}");
        }
        let grid_size = usize::try_from(grid_size).context("grid_size: too large")?;

        let (default_steps, default_burn_in) = match mode {
            Mode::Density => (8, 0),
            Mode::Scan => (20_000, 1_000),
            _ => (10_000, 1_000),
        };
        let steps = count(raw.steps, default_steps);
        if steps == 0 && matches!(mode, Mode::Finite | Mode::Scan) {
            bail!("steps: must be at least 1");
        }
        let burn_in = count(raw.burn_in, default_burn_in);
        let orbits = count(raw.orbits, 8);
        if orbits == 0 {
            bail!("orbits: must be at least 1");
        }

        let init = match raw.init {
            Some(text) => text
                .parse::<InitSpec>()
                .map_err(|e| anyhow::anyhow!("init: {e}"))?,
            None if mode == Mode::Density => InitSpec::Bump {
                center: 0.3,
                width: 0.2,
            },
            None => InitSpec::UniformRandom,
        };
        match (&init, mode) {
            (InitSpec::Explicit(xs), Mode::Finite) if xs.len() != sites => {
                bail!("init: {} positions given for {sites} sites", xs.len())
            }
            (InitSpec::UniformRandom | InitSpec::Explicit(_), Mode::Finite) => {}
            (InitSpec::Bump { .. } | InitSpec::Sine { .. }, Mode::Density) => {}
            (InitSpec::UniformRandom, Mode::Scan | Mode::Renorm | Mode::Verify) => {}
            (_, Mode::Finite) => bail!("init: finite mode takes uniform-random or a position list"),
            (_, Mode::Density) => bail!("init: density mode takes bump(c,w) or sine(a)"),
            (_, _) => bail!("init: {mode} mode only takes uniform-random"),
        }

        let observables = match raw.observables {
            Some(names) => {
                let mut out = Vec::new();
                for n in &names {
                    let o = n
                        .parse::<Observable>()
                        .map_err(|e| anyhow::anyhow!("observables: {e}"))?;
                    if !Observable::allowed_in(mode).contains(&o) {
                        bail!(
                            "observables: '{}' is not available in {mode} mode",
                            o.name()
                        );
                    }
                    if !out.contains(&o) {
                        out.push(o);
                    }
                }
                out
            }
            None => Observable::defaults(mode, sites),
        };
        if sites != 3
            && observables.iter().any(|o| {
                matches!(
                    o,
                    Observable::Labels | Observable::MinGap | Observable::SyncOutcome
                )
            })
        {
            bail!("observables: labels, min_gap and sync_outcome need sites = 3");
        }

        let seed = count(raw.seed, DEFAULT_SEED);
        if seed > i64::MAX as u64 {
            bail!("seed: must be at most {} to fit a TOML integer", i64::MAX);
        }

        Ok(ExperimentConfig {
            mode,
            epsilon,
            epsilon_grid,
            sites,
            grid_size,
            steps,
            burn_in,
            seed,
            init,
            observables,
            out_dir: raw
                .out_dir
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            orbits,
            allow_large: raw.allow_large.unwrap_or(false),
        })
    }

    /// The raw form with every key present, so that validation is the
    /// identity on it.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            mode: Some(self.mode),
            epsilon: self.epsilon,
            epsilon_grid: self.epsilon_grid.clone(),
            sites: Some(Count(self.sites as u64)),
            grid_size: Some(Count(self.grid_size as u64)),
            steps: Some(Count(self.steps)),
            burn_in: Some(Count(self.burn_in)),
            seed: Some(Count(self.seed)),
            init: Some(self.init.to_string()),
            observables: Some(
                self.observables
                    .iter()
                    .map(|o| o.name().to_string())
                    .collect(),
            ),
            out_dir: Some(self.out_dir.clone()),
            orbits: Some(Count(self.orbits)),
            allow_large: Some(self.allow_large),
        }
    }

    pub fn has(&self, o: Observable) -> bool {
        self.observables.contains(&o)
    }
}

/// Reads a TOML document. Unknown keys and bad values are reported with the
/// key name.
pub fn parse_raw(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| anyhow::anyhow!("config: {}", e.message().trim()).context(e))
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::validate(parse_raw(text)?)
}

pub fn emit(config: &ExperimentConfig) -> String {
    toml::to_string(&config.to_raw()).expect("config serializes to TOML")
}
