use coupled_doubling::classify::*;
use coupled_doubling::finite::{step_finite, CouplingParams, TorusConfig};
use proptest::prelude::*;

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 2, 0],
    [2, 0, 1],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
];

fn generic(xs: &[f64]) -> Option<TorusConfig> {
    let c = TorusConfig::from_reals(xs).unwrap();
    let d = pair_arcs(&c).unwrap();
    let spread = (d[0] - d[1])
        .abs()
        .min((d[1] - d[2]).abs())
        .min((d[2] - d[0]).abs());
    (spread > 1e-9).then_some(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn relabelling_permutes_labels(xs in prop::collection::vec(0.0f64..1.0, 3)) {
        let Some(c) = generic(&xs) else { return Ok(()) };
        let label = classify_component(&c).unwrap();
        prop_assert_ne!(label, ComponentLabel::Boundary);
        for p in PERMS {
            let moved = classify_component(&c.permuted(&p)).unwrap();
            prop_assert_eq!(moved, label.permuted(p));
            prop_assert_eq!(moved.is_odd(), label.is_odd());
        }
    }

    #[test]
    fn reflection_swaps_parity(xs in prop::collection::vec(0.0f64..1.0, 3)) {
        let Some(c) = generic(&xs) else { return Ok(()) };
        let label = classify_component(&c).unwrap();
        let mirrored = classify_component(&c.reflected()).unwrap();
        prop_assert_eq!(mirrored, label.reflected());
        prop_assert_ne!(mirrored.is_odd(), label.is_odd());
    }

    #[test]
    fn arcs_sum_to_whole_turns(xs in prop::collection::vec(0.0f64..1.0, 3)) {
        let c = TorusConfig::from_reals(&xs).unwrap();
        let d = pair_arcs(&c).unwrap();
        let s: f64 = d.iter().sum();
        prop_assert!((s - s.round()).abs() < 1e-12);
        let g = min_gap(&c).unwrap();
        prop_assert!(g >= 0.0 && d.iter().all(|&x| x >= g));
    }

    #[test]
    fn boundary_only_on_ties(x in 0.0f64..1.0, a in 0.01f64..0.49) {
        // d(x,y) = d(y,z) = a forces a tie
        let c = TorusConfig::from_reals(&[x, x + a, x + 2.0 * a]).unwrap();
        prop_assert_eq!(classify_component(&c).unwrap(), ComponentLabel::Boundary);
    }

    #[test]
    fn contracting_limits_are_on_the_circles(xs in prop::collection::vec(0.0f64..1.0, 3), eps in 0.55f64..0.95) {
        let c = TorusConfig::from_reals(&xs).unwrap();
        let s = detect_limit_state(&c, eps, DEFAULT_LIMIT_STEPS, DEFAULT_LIMIT_TOL).unwrap();
        prop_assert_ne!(s.kind, LimitKind::Undecided);
        prop_assert!(s.residual < DEFAULT_LIMIT_TOL);
    }

    #[test]
    fn companion_circles_map_onto_each_other(x in 0.0f64..1.0, eps in 0.5f64..0.99) {
        let [diag, second, third] = contracting_attractor_circles();
        let params = CouplingParams::new(eps, 3).unwrap();
        let img = step_finite(&second.point(x), &params).unwrap();
        prop_assert!(third.distance(&img).unwrap() < 1e-9);
        let img = step_finite(&third.point(x), &params).unwrap();
        prop_assert!(second.distance(&img).unwrap() < 1e-9);
        let img = step_finite(&diag.point(x), &params).unwrap();
        prop_assert!(diag.distance(&img).unwrap() < 1e-12);
    }
}
