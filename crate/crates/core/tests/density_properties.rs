use coupled_doubling::circle::{signed_distance, CirclePoint};
use coupled_doubling::density::*;
use proptest::prelude::*;

/// Positive smooth densities: a cosine series with small coefficients.
fn smooth_density(m: usize) -> impl Strategy<Value = GridDensity> {
    prop::collection::vec(-0.15f64..0.15, 4).prop_map(move |c| {
        let values = (0..m)
            .map(|i| {
                let x = i as f64 / m as f64;
                1.0 + c
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (std::f64::consts::TAU * (k + 1) as f64 * x).cos())
                    .sum::<f64>()
            })
            .collect();
        GridDensity::normalized(values, None).unwrap()
    })
}

fn bump_density(m: usize) -> impl Strategy<Value = GridDensity> {
    (0.0f64..1.0, 0.05f64..0.45).prop_map(move |(c, w)| GridDensity::bump(m, c, w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transfer_keeps_mass_and_sign(f in smooth_density(1 << 10), eps in 0.0f64..0.95) {
        let out = transfer_step_detailed(&f, eps).unwrap();
        prop_assert!((out.density.integral() - 1.0).abs() < 1e-9);
        prop_assert!(out.mass_defect.abs() < 1e-6);
        prop_assert!(out.density.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn transfer_keeps_mass_of_bumps(f in bump_density(1 << 10), eps in 0.0f64..0.95) {
        let g = transfer_step(&f, eps).unwrap();
        prop_assert!((g.integral() - 1.0).abs() < 1e-9);
        prop_assert!(g.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn lift_has_degree_two(f in smooth_density(1 << 10), eps in 0.0f64..0.99, x in 0.0f64..1.0) {
        let map = build_map(&f, eps).unwrap();
        prop_assert!((map.lift(x + 1.0) - map.lift(x) - 2.0).abs() < 1e-12);
        prop_assert!(map.lift(x + 1e-6) > map.lift(x));
    }

    #[test]
    fn derivative_matches_finite_differences(f in smooth_density(1 << 14), eps in 0.0f64..0.99, x in 0.0f64..1.0) {
        let map = build_map(&f, eps).unwrap();
        let h = 1e-6;
        let fd = (map.lift(x + h) - map.lift(x - h)) / (2.0 * h);
        prop_assert!((fd - map.derivative(x)).abs() < 1e-4);
    }

    #[test]
    fn preimages_are_preimages(f in bump_density(1 << 12), eps in 0.0f64..0.95, x in 0.0f64..1.0) {
        let map = build_map(&f, eps).unwrap();
        let [a, b] = map.preimages(x).unwrap();
        prop_assert!(a < b);
        for y in [a, b] {
            prop_assert!(signed_distance(map.lift(y) - x).abs() < 1e-10);
        }
    }

    #[test]
    fn concentrated_center_doubles(c in 0.0f64..1.0, w in 0.02f64..0.2, eps in 0.5f64..0.95) {
        let f = GridDensity::bump(1 << 12, c, w).unwrap();
        let g = transfer_step(&f, eps).unwrap();
        let before = center_of_mass(&f).unwrap();
        let after = center_of_mass(&g).unwrap();
        prop_assert!(after.distance(CirclePoint::wrap(2.0 * before.value())) < 1e-3);
    }
}

#[test]
fn uniform_is_fixed() {
    let f = GridDensity::uniform(1 << 12).unwrap();
    for eps in [0.0, 0.3, 0.7, 0.99] {
        let g = transfer_step(&f, eps).unwrap();
        let err = g
            .values()
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "eps {eps}: {err}");
    }
}

#[test]
fn csv_round_trips_values() {
    let f = GridDensity::sine(16, 0.4).unwrap();
    let csv = f.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("grid_point,value"));
    let parsed: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(parsed, f.values());
}
