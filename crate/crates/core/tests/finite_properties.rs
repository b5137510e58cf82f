use coupled_doubling::circle::{reduce, signed_distance, wrap, CirclePoint};
use coupled_doubling::finite::*;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn config(xs: &[f64]) -> TorusConfig {
    TorusConfig::from_reals(xs).unwrap()
}

fn sites(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n)
}

proptest! {
    #[test]
    fn reduce_lands_in_unit_interval(x in -1e6f64..1e6) {
        let r = reduce(x).unwrap().value();
        prop_assert!((0.0..1.0).contains(&r));
        prop_assert!(signed_distance(r - x).abs() < 1e-9);
    }

    #[test]
    fn signed_distance_is_odd_and_periodic(u in -10.0f64..10.0) {
        prop_assume!((wrap(u) - 0.5).abs() > 1e-9);
        prop_assert!((signed_distance(-u) + signed_distance(u)).abs() < 1e-12);
        prop_assert!((signed_distance(u + 3.0) - signed_distance(u)).abs() < 1e-9);
        prop_assert!(signed_distance(u).abs() <= 0.5);
    }

    #[test]
    fn sum_doubles(n in 1usize..8, eps in 0.0f64..0.999, seed in prop::collection::vec(0.0f64..1.0, 8)) {
        let x = config(&seed[..n]);
        let y = step_finite(&x, &CouplingParams::new(eps, n).unwrap()).unwrap();
        prop_assert!(conserved_sum_defect(&x, &y) < 1e-12);
    }

    #[test]
    fn step_commutes_with_relabelling(eps in 0.0f64..0.999, xs in sites(4), rot in 0usize..4) {
        let x = config(&xs);
        prop_assume!(distance_to_singularity(&x) > 1e-9);
        let params = CouplingParams::new(eps, 4).unwrap();
        let perm: Vec<usize> = (0..4).map(|i| (i + rot) % 4).collect();
        let swap = [1, 0, 3, 2];
        for p in [perm.as_slice(), swap.as_slice()] {
            let a = step_finite(&x.permuted(p), &params).unwrap();
            let b = step_finite(&x, &params).unwrap().permuted(p);
            prop_assert!(a.torus_distance(&b) < 1e-12);
        }
    }

    #[test]
    fn step_commutes_with_reflection(eps in 0.0f64..0.999, xs in sites(3)) {
        let x = config(&xs);
        prop_assume!(distance_to_singularity(&x) > 1e-9);
        let params = CouplingParams::new(eps, 3).unwrap();
        let a = step_finite(&x.reflected(), &params).unwrap();
        let b = step_finite(&x, &params).unwrap().reflected();
        prop_assert!(a.torus_distance(&b) < 1e-12);
    }

    #[test]
    fn diagonal_is_invariant(eps in 0.0f64..0.999, x in 0.0f64..1.0, n in 1usize..6) {
        let c = config(&vec![x; n]);
        let y = step_finite(&c, &CouplingParams::new(eps, n).unwrap()).unwrap();
        prop_assert!(y.diameter() == 0.0);
        prop_assert!(y.get(0).distance(CirclePoint::wrap(2.0 * x)) < 1e-15);
    }

    #[test]
    fn two_site_factor_commutes(eps in 0.0f64..0.999, xs in sites(2)) {
        let x = config(&xs);
        prop_assume!(distance_to_singularity(&x) > 1e-9);
        let a = to_factor_n2(&step_finite(&x, &CouplingParams::new(eps, 2).unwrap()).unwrap()).unwrap();
        let b = step_factor_n2(to_factor_n2(&x).unwrap(), eps);
        prop_assert!(a.u.distance(b.u) < 1e-9 && a.v.distance(b.v) < 1e-9);
    }

    #[test]
    fn three_site_factor_commutes(eps in 0.0f64..0.999, xs in sites(3)) {
        let x = config(&xs);
        prop_assume!(distance_to_singularity(&x) > 1e-9);
        let a = to_factor_n3(&step_finite(&x, &CouplingParams::new(eps, 3).unwrap()).unwrap()).unwrap();
        let b = step_factor_n3(to_factor_n3(&x).unwrap(), eps);
        prop_assert!(a.w.distance(b.w) < 1e-9);
        prop_assert!(a.u.distance(b.u) < 1e-9 && a.v.distance(b.v) < 1e-9);
    }

    /// On each of the six domains cut out by `u = 1/2`, `v = 1/2` and
    /// `u + v in {1/2, 3/2}`, the difference map is `2(1 - eps)` times the
    /// identity plus one of six constant offsets.
    #[test]
    fn difference_map_is_piecewise_affine(eps in 0.0f64..0.999, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        prop_assume!((u - 0.5).abs() > 1e-9 && (v - 0.5).abs() > 1e-9);
        prop_assume!((u + v - 0.5).abs() > 1e-9 && (u + v - 1.5).abs() > 1e-9);
        let a = (u > 0.5) as i32;
        let b = (v > 0.5) as i32;
        let k = (u + v).round() as i32;
        let (ou, ov) = (k + 2 * a - b, k + 2 * b - a);
        prop_assert!([(0, 0), (1, 1), (0, 3), (2, 2), (3, 3), (3, 0)].contains(&(ou, ov)));
        let fc = FactorCoordsN3 {
            w: CirclePoint::ZERO,
            u: CirclePoint::wrap(u),
            v: CirclePoint::wrap(v),
        };
        let out = step_factor_n3(fc, eps);
        let s = 2.0 * (1.0 - eps);
        let third = 2.0 * eps / 3.0;
        prop_assert!(out.u.distance(CirclePoint::wrap(s * u + third * ou as f64)) < 1e-12);
        prop_assert!(out.v.distance(CirclePoint::wrap(s * v + third * ov as f64)) < 1e-12);
    }

    #[test]
    fn diagonal_map_is_the_factor_on_the_line(eps in 0.0f64..0.999, u in 0.0f64..1.0) {
        let fc = FactorCoordsN3 { w: CirclePoint::ZERO, u: CirclePoint::wrap(u), v: CirclePoint::wrap(u) };
        prop_assume!((wrap(u) - 0.5).abs() > 1e-9 && (wrap(2.0 * u) - 0.5).abs() > 1e-9);
        let out = step_factor_n3(fc, eps);
        let d = diagonal_map_n3(CirclePoint::wrap(u), eps);
        prop_assert!(out.u.distance(d) < 1e-12 && out.v.distance(d) < 1e-12);
    }

    #[test]
    fn lorenz_map_is_rescaled_h(eps in 0.0f64..0.499, w in 0.0f64..1.0) {
        prop_assume!((w - 0.5).abs() > 1e-9);
        let scale = 1.0 - 2.0 * eps;
        let h = map_h(CirclePoint::wrap(eps + scale * w), eps).value();
        let expect = (h - eps) / scale;
        prop_assert!((map_l(w, eps).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn lorenz_map_stays_in_unit_interval(eps in 0.0f64..0.499, w in 0.0f64..=1.0) {
        let l = map_l(w, eps).unwrap();
        prop_assert!((0.0..=1.0).contains(&l));
    }

    #[test]
    fn depth_is_monotone(a in 0.0f64..0.4999, b in 0.0f64..0.4999) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if let (Ok(x), Ok(y)) = (renormalization_depth(lo), renormalization_depth(hi)) {
            prop_assert!(x.n <= y.n);
            prop_assert_eq!(x.k, 1 << x.n);
        }
    }

    #[test]
    fn jacobian_spectrum(eps in 0.0f64..0.999, n in 2usize..6, seed in prop::collection::vec(0.0f64..1.0, 6)) {
        let x = config(&seed[..n]);
        prop_assume!(distance_to_singularity(&x) > 1e-4);
        let params = CouplingParams::new(eps, n).unwrap();
        let base = step_finite(&x, &params).unwrap();
        let h = 1e-7;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut shifted = x.to_vec();
            shifted[j] += h;
            let y = step_finite(&config(&shifted), &params).unwrap();
            for i in 0..n {
                jac[(i, j)] = signed_distance(y.get(i).value() - base.get(i).value()) / h;
            }
        }
        let expect = DMatrix::from_fn(n, n, |i, j| {
            2.0 * (if i == j { 1.0 - eps } else { 0.0 } + eps / n as f64)
        });
        prop_assert!((&jac - &expect).amax() < 1e-5);
        let mut eig: Vec<f64> = SymmetricEigen::new(expect).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for e in &eig[..n - 1] {
            prop_assert!((e - 2.0 * (1.0 - eps)).abs() < 1e-12);
        }
        prop_assert!((eig[n - 1] - 2.0).abs() < 1e-12);
    }
}

#[test]
fn regimes_split_at_one_half() {
    assert_eq!(regime(0.49), Regime::Expanding);
    assert_eq!(regime(0.5), Regime::Critical);
    assert_eq!(regime(0.51), Regime::Contracting);
}
