//! The acceptance suite: twelve end-to-end checks of the library against
//! known behaviour of the system, each with a tolerance and a wall-clock
//! budget. Shared by the integration tests and the `verify` CLI mode.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::circle::{signed_distance, wrap, CirclePoint};
use crate::classify::{
    detect_limit_state, distance_to_attractor, LimitKind, DEFAULT_LIMIT_STEPS, DEFAULT_LIMIT_TOL,
};
use crate::density::{
    build_map, center_of_mass, monte_carlo_pushforward, one_step_collapse, snap_outward,
    transfer_step, transfer_step_detailed, verify_contraction, GridDensity, DEFAULT_GRID, ZERO_TOL,
};
use crate::ensemble::{
    cyclic_period, random_config, residue_supports, run_ensemble, simulate_orbit, stream_rng,
    supports_disjoint, time_average, DifferenceSeries, GapStats, LabelVisits, Observation,
    Observer, OrbitSpec, PositionHistogram,
};
use crate::error::{Error, Result};
use crate::finite::{
    conserved_sum_defect, renormalization_depth, step_factor_n2, step_factor_n3, step_finite,
    to_factor_n2, to_factor_n3, CouplingParams, RenormDepth, TorusConfig,
};

const SEED: u64 = 20_240_917;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {} ({:.2} s of {:.0} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64(),
            self.detail
        )
    }
}

/// Collects named sub-checks into one verdict.
struct Checks(Vec<(bool, String)>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn check(&mut self, ok: bool, what: String) {
        self.0.push((ok, what));
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|(ok, _)| *ok)
    }

    fn detail(&self) -> String {
        self.0
            .iter()
            .map(|(ok, s)| {
                if *ok {
                    s.clone()
                } else {
                    format!("FAILED {s}")
                }
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn timed(
    id: u8,
    name: &'static str,
    budget_secs: u64,
    body: impl FnOnce() -> Result<Checks>,
) -> CriterionReport {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (mut passed, mut detail) = match outcome {
        Ok(c) => (c.passed(), c.detail()),
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > budget {
        passed = false;
        detail.push_str("; FAILED over the time budget");
    }
    CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed,
        budget,
    }
}

fn random_reals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

pub fn conserved_sum() -> CriterionReport {
    timed(1, "conserved sum", 1, || {
        let mut worst = 0.0f64;
        let mut index = 0;
        for n in [2usize, 3, 5] {
            for eps in [0.1, 0.3, 0.42, 0.7] {
                let params = CouplingParams::new(eps, n)?;
                let mut rng = stream_rng(SEED, "conserved-sum", index);
                index += 1;
                for _ in 0..10_000 {
                    let x = TorusConfig::from_reals(&random_reals(&mut rng, n))?;
                    let y = step_finite(&x, &params)?;
                    worst = worst.max(conserved_sum_defect(&x, &y));
                }
            }
        }
        let mut c = Checks::new();
        c.check(
            worst < 1e-12,
            format!("max defect {worst:.2e} < 1e-12 over 12 x 10^4 configurations"),
        );
        Ok(c)
    })
}

pub fn factor_commutation() -> CriterionReport {
    timed(2, "factor commutation", 1, || {
        let d = |a: CirclePoint, b: CirclePoint| a.distance(b);
        let mut worst2 = 0.0f64;
        let mut worst3 = 0.0f64;
        for (k, eps) in [0.2, 0.42, 0.7].into_iter().enumerate() {
            let p2 = CouplingParams::new(eps, 2)?;
            let p3 = CouplingParams::new(eps, 3)?;
            let mut rng = stream_rng(SEED, "factor", k as u64);
            for _ in 0..10_000 {
                let x = TorusConfig::from_reals(&random_reals(&mut rng, 2))?;
                let a = to_factor_n2(&step_finite(&x, &p2)?)?;
                let b = step_factor_n2(to_factor_n2(&x)?, eps);
                worst2 = worst2.max(d(a.u, b.u)).max(d(a.v, b.v));

                let x = TorusConfig::from_reals(&random_reals(&mut rng, 3))?;
                let a = to_factor_n3(&step_finite(&x, &p3)?)?;
                let b = step_factor_n3(to_factor_n3(&x)?, eps);
                worst3 = worst3.max(d(a.w, b.w)).max(d(a.u, b.u)).max(d(a.v, b.v));
            }
        }
        let mut c = Checks::new();
        c.check(worst2 < 1e-9, format!("two sites: max error {worst2:.2e}"));
        c.check(
            worst3 < 1e-9,
            format!("three sites: max error {worst3:.2e}"),
        );
        Ok(c)
    })
}

fn difference_series(eps: f64, seed: u64, burn_in: u64, steps: u64) -> Result<Vec<f64>> {
    let spec = OrbitSpec {
        params: CouplingParams::new(eps, 2)?,
        seed,
        burn_in,
        steps,
    };
    let rec = simulate_orbit(
        &random_config(seed, 0, 2),
        spec,
        vec![Box::new(DifferenceSeries::new())],
    )?;
    match rec.observations.into_iter().next() {
        Some(Observation::Difference { values }) => Ok(values),
        _ => Err(Error::InvalidArgument("difference series missing".into())),
    }
}

pub fn cyclic_components() -> CriterionReport {
    timed(3, "two-site cyclic components", 5, || {
        let mut c = Checks::new();
        let bins = 1 << 10;

        let v = difference_series(1.0 / 3.0, SEED, 1000, 100_000)?;
        let parity = residue_supports(&v, bins, 2)?;
        c.check(
            supports_disjoint(&parity[0], &parity[1]),
            "eps = 1/3: even and odd steps occupy disjoint bins".into(),
        );
        let depth = renormalization_depth(1.0 / 3.0)?;
        c.check(
            depth == RenormDepth { n: 1, k: 2 },
            format!("depth(1/3) = ({}, {}), expected (1, 2)", depth.n, depth.k),
        );

        let depth = renormalization_depth(0.45)?;
        c.check(
            depth == RenormDepth { n: 3, k: 8 },
            format!("depth(0.45) = ({}, {}), expected (3, 8)", depth.n, depth.k),
        );
        let v = difference_series(0.45, SEED, 1000, 100_000)?;
        let period = cyclic_period(&v, bins, 16)?;
        c.check(
            period == 8,
            format!("eps = 0.45: binned period {period}, expected 8"),
        );
        c.check(
            period as u64 == depth.k,
            format!("eps = 0.45: binned period {period} matches K = {}", depth.k),
        );
        Ok(c)
    })
}

fn label_records(eps: f64, orbits: u64, burn_in: u64) -> Result<Vec<Observation>> {
    let params = CouplingParams::new(eps, 3)?;
    let records = run_ensemble(params, SEED, orbits, burn_in, 100_000, |_| {
        Ok(vec![Box::new(LabelVisits::new()) as Box<dyn Observer>])
    })?;
    Ok(records
        .into_iter()
        .filter_map(|r| r.observations.into_iter().next())
        .collect())
}

pub fn ergodic_components() -> CriterionReport {
    timed(4, "three-site ergodic components", 30, || {
        let mut c = Checks::new();
        let weak = label_records(0.2, 1, 0)?;
        let visited = weak.first().and_then(|o| o.labels_visited()).unwrap_or(0);
        c.check(
            visited == 6,
            format!("eps = 0.2: one orbit visits {visited} of 6 labels"),
        );

        let strong = label_records(0.42, 60, 1000)?;
        let mut constant = 0;
        let mut seen = [false; 6];
        for o in &strong {
            if let Observation::Labels {
                first,
                changes,
                visits,
                ..
            } = o
            {
                if *changes == 0 && visits[6] == 0 {
                    constant += 1;
                }
                if let Some(i) = first.index() {
                    seen[i] = true;
                }
            }
        }
        let distinct = seen.iter().filter(|&&s| s).count();
        c.check(
            constant == 60,
            format!("eps = 0.42: label constant on {constant} of 60 orbits"),
        );
        c.check(
            distinct == 6,
            format!("eps = 0.42: {distinct} of 6 labels occur across seeds"),
        );
        Ok(c)
    })
}

pub fn minimum_gap() -> CriterionReport {
    timed(5, "minimum gap", 5, || {
        let eps = 0.45;
        let params = CouplingParams::new(eps, 3)?;
        let records = run_ensemble(params, SEED, 4, 1000, 100_000, |_| {
            Ok(vec![Box::new(GapStats::new()) as Box<dyn Observer>])
        })?;
        let worst = records
            .iter()
            .filter_map(|r| {
                r.find(|o| match o {
                    Observation::Gaps { min, .. } => Some(*min),
                    _ => None,
                })
            })
            .fold(f64::INFINITY, f64::min);
        let bound = eps / 3.0 - 1e-3;
        let mut c = Checks::new();
        c.check(
            worst >= bound,
            format!("min gap {worst:.6} >= {bound:.6} over 4 orbits"),
        );
        Ok(c)
    })
}

pub fn contracting_regime() -> CriterionReport {
    timed(6, "contracting regime", 1, || {
        let mut c = Checks::new();
        let eps = 0.7;
        let near = TorusConfig::from_reals(&[0.10, 0.12, 0.14])?;
        let s = detect_limit_state(&near, eps, 40, 1e-6)?;
        c.check(
            s.kind == LimitKind::Sync,
            format!(
                "concentrated start: {:?} after {} steps, diameter {:.2e}",
                s.kind, s.steps, s.residual
            ),
        );
        let spread = TorusConfig::from_reals(&[0.01, 0.34, 0.67])?;
        let s = detect_limit_state(&spread, eps, DEFAULT_LIMIT_STEPS, DEFAULT_LIMIT_TOL)?;
        c.check(
            s.kind == LimitKind::Splay,
            format!(
                "spread start: {:?} after {} steps, arc deviation {:.2e}",
                s.kind, s.steps, s.residual
            ),
        );
        let mut end = spread.clone();
        crate::finite::iterate(&mut end, eps, s.steps);
        let off = distance_to_attractor(&end)?;
        c.check(
            off < 1e-6,
            format!("splay limit lies {off:.2e} from the attractor circles"),
        );

        // two sites at eps = 3/4: the difference halves on both branches
        let v = difference_series(0.75, SEED, 0, 60)?;
        let mut worst_abs = 0.0f64;
        let mut worst_rel = 0.0f64;
        for w in v.windows(2) {
            let (g0, g1) = (signed_distance(w[0]), signed_distance(w[1]));
            worst_abs = worst_abs.max((g1 - 0.5 * g0).abs());
            if g0.abs() >= 1e-3 {
                worst_rel = worst_rel.max((g1 / g0 - 0.5).abs());
            }
        }
        c.check(
            worst_abs <= 1e-12 && worst_rel <= 1e-12,
            format!(
                "eps = 0.75: |g(v)| ratio 0.5, abs error {worst_abs:.1e}, ratio error {worst_rel:.1e}"
            ),
        );
        Ok(c)
    })
}

pub fn time_averages() -> CriterionReport {
    timed(7, "time averages", 5, || {
        let params = CouplingParams::new(0.3, 3)?;
        let records = run_ensemble(params, SEED, 1, 0, 100_000, |_| {
            Ok(vec![
                Box::new(PositionHistogram::new(1024)?) as Box<dyn Observer>
            ])
        })?;
        let ks = time_average(&records[0], 1024)?.ks_distance_to_uniform()?;
        let mut c = Checks::new();
        c.check(
            ks <= 0.02,
            format!("KS distance to uniform {ks:.4} <= 0.02"),
        );
        Ok(c)
    })
}

pub fn uniform_fixed_point() -> CriterionReport {
    timed(8, "uniform fixed point", 1, || {
        let mut c = Checks::new();
        let f = GridDensity::uniform(DEFAULT_GRID)?;
        for eps in [0.2, 0.6] {
            let g = transfer_step(&f, eps)?;
            let off = g.values().iter().filter(|&&v| v != 1.0).count();
            let map = build_map(&f, eps)?;
            let m = DEFAULT_GRID as f64;
            let bent = (0..DEFAULT_GRID)
                .filter(|&i| {
                    let x = i as f64 / m;
                    map.eval(x).value() != wrap(2.0 * x)
                })
                .count();
            c.check(
                off == 0 && bent == 0,
                format!(
                    "eps = {eps}: {off} grid values differ from 1, {bent} points where F is not 2x"
                ),
            );
        }
        Ok(c)
    })
}

pub fn total_variation_contraction() -> CriterionReport {
    timed(9, "total variation contraction", 10, || {
        let eps = 0.5;
        let f0 = GridDensity::sine(DEFAULT_GRID, 0.025)?;
        let report = verify_contraction(&f0, eps, 20)?;
        let tv0 = report.tv[0];
        let c0 = report.constant;
        // below this, total variation is rounding noise of order M * ulp
        let floor = 1e-10;
        let worst = report.worst_ratio(floor).unwrap_or(0.0);
        let last = *report.tv.last().unwrap_or(&f64::NAN);
        let bound = c0.powi(20) * tv0 * 1.05;
        let mut c = Checks::new();
        c.check((tv0 - 0.1).abs() < 1e-9, format!("TV(f0) = {tv0:.6}"));
        c.check(
            worst <= c0 + 0.01,
            format!(
                "worst step ratio {worst:.4} <= c + 0.01 = {:.4} (steps with TV > {floor:e})",
                c0 + 0.01
            ),
        );
        c.check(
            last <= bound,
            format!("TV after 20 steps {last:.2e} <= {bound:.2e}"),
        );
        Ok(c)
    })
}

pub fn concentrated_scaling() -> CriterionReport {
    timed(10, "concentrated density scaling", 10, || {
        let m = DEFAULT_GRID;
        let h = 1.0 / m as f64;
        let mut c = Checks::new();

        let eps = 0.75;
        let rate = 2.0 * (1.0 - eps);
        let mut f = GridDensity::bump(m, 0.3, 0.4)?;
        let (mut len_err, mut num_err, mut sup_err, mut com_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..5 {
            let out = transfer_step_detailed(&f, eps)?;
            let g = &out.density;
            let old = f.support().ok_or(Error::NoSupport)?.length();
            let new = g.support().ok_or(Error::NoSupport)?.length();
            let image = out.image_arc.ok_or(Error::NoSupport)?.length();
            len_err = len_err
                .max((image - rate * old).abs())
                .max((new - rate * old).abs());
            let n0 = f
                .numeric_support(ZERO_TOL)
                .ok_or(Error::NoSupport)?
                .length();
            let n1 = g
                .numeric_support(ZERO_TOL)
                .ok_or(Error::NoSupport)?
                .length();
            num_err = num_err.max((n1 - rate * n0).abs());
            sup_err = sup_err.max((g.sup() / f.sup() * rate - 1.0).abs());
            let (c0, c1) = (center_of_mass(&f)?, center_of_mass(g)?);
            com_err = com_err.max(c1.distance(CirclePoint::wrap(2.0 * c0.value())));
            f = out.density;
        }
        c.check(
            len_err <= 2.0 * h && num_err <= 2.0 * h,
            format!(
                "eps = 0.75, 5 steps: support ratio 0.5 within {:.2} cells (numeric {:.2})",
                len_err / h,
                num_err / h
            ),
        );
        c.check(
            sup_err <= 0.01,
            format!("sup ratio 2 within {:.1e}", sup_err),
        );
        c.check(
            com_err <= 1e-3,
            format!("center of mass doubles within {com_err:.1e}"),
        );

        let f = GridDensity::bump(m, 0.3, 0.4)?;
        let out = transfer_step_detailed(&f, 0.5)?;
        let old = f.support().ok_or(Error::NoSupport)?.length();
        let image = out.image_arc.ok_or(Error::NoSupport)?.length();
        let shift = center_of_mass(&f)?.value();
        let drift = (0..m)
            .map(|i| (out.density.values()[i] - f.eval(i as f64 * h - shift)).abs())
            .fold(0.0, f64::max)
            / f.sup();
        c.check(
            (image - old).abs() <= 2.0 * h && drift <= 1e-3,
            format!(
                "eps = 1/2: support length change {:.2} cells, shape off a pure shift by {drift:.1e}",
                (image - old).abs() / h
            ),
        );
        Ok(c)
    })
}

/// Ninety percent of the mass on `[0.4, 0.7]` and five percent on each of
/// `[0.2, 0.4]` and `[0.7, 0.9]`.
fn winged_density(m: usize) -> Result<GridDensity> {
    let mut v = vec![0.0; m];
    for (mass, center, width) in [(0.9, 0.55, 0.3), (0.05, 0.3, 0.2), (0.05, 0.8, 0.2)] {
        let b = GridDensity::bump(m, center, width)?;
        for (acc, x) in v.iter_mut().zip(b.values()) {
            *acc += mass * x;
        }
    }
    GridDensity::normalized(v, Some(snap_outward(m, 0.2, 0.9)?))
}

pub fn one_step_collapse_check() -> CriterionReport {
    timed(11, "one-step collapse", 5, || {
        let m = DEFAULT_GRID;
        let h = 1.0 / m as f64;
        let f = winged_density(m)?;
        let out = one_step_collapse(&f, 0.8)?;
        let image = out.step.image_arc.ok_or(Error::NoSupport)?.length();
        let mut c = Checks::new();
        c.check(
            (out.wing_mass - 0.1).abs() < 1e-6,
            format!("wing mass {:.6}", out.wing_mass),
        );
        c.check(
            (image - 0.44).abs() <= 2.0 * h && image <= 0.5,
            format!(
                "eps = 0.8: support length {image:.6} (0.44 within {:.2} cells)",
                (image - 0.44).abs() / h
            ),
        );
        let rejected = matches!(
            one_step_collapse(&f, 0.7),
            Err(Error::CollapsePreconditions(_))
        );
        c.check(
            rejected,
            format!("eps = 0.7 rejected below threshold {:.4}", out.threshold),
        );
        Ok(c)
    })
}

pub fn monte_carlo_oracle() -> CriterionReport {
    timed(12, "transfer operator vs Monte Carlo", 10, || {
        let bins = 128;
        let eps = 0.75;
        let f = GridDensity::bump(DEFAULT_GRID, 0.3, 0.4)?;
        let g = transfer_step(&f, eps)?;
        let hist = monte_carlo_pushforward(&f, eps, 1_000_000, bins, SEED)?;
        let l1: f64 = hist
            .probabilities()?
            .iter()
            .zip(g.bin_masses(bins)?)
            .map(|(p, q)| (p - q).abs())
            .sum();
        let mut c = Checks::new();
        c.check(
            l1 <= 0.01,
            format!("L1 distance {l1:.4} <= 0.01 ({bins} bins, 10^6 samples)"),
        );
        Ok(c)
    })
}

pub type Criterion = fn() -> CriterionReport;

pub const CRITERIA: [Criterion; 12] = [
    conserved_sum,
    factor_commutation,
    cyclic_components,
    ergodic_components,
    minimum_gap,
    contracting_regime,
    time_averages,
    uniform_fixed_point,
    total_variation_contraction,
    concentrated_scaling,
    one_step_collapse_check,
    monte_carlo_oracle,
];

/// Runs every criterion in order, one at a time so the budgets are fair.
pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| c()).collect()
}
