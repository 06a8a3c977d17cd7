use isohyp_core::functionals::{
    ball_quantities, ball_radius_for_volume, profile_functionals, symmetrize, OccupancyGrid, PolarProfile,
};
use isohyp_core::generating_curve::{lambda_for_ball, shoot, ShootingConfig};
use isohyp_core::hopf::{hopf_density, Field, SpaceParams};
use isohyp_core::hyperbolic::{
    comparison_curvature, curvature_convert, direction_at_angle, dist, frame_at, metric_dot,
    translate_along_axis, DiskPoint, FermiCoords,
};
use isohyp_core::lemma_lab::leaf_angle;
use isohyp_core::optimizer::random_perturbation;
use isohyp_core::RadialDensity;
use proptest::prelude::*;
use std::f64::consts::PI;

fn point() -> impl Strategy<Value = DiskPoint> {
    (0.0f64..0.95, 0.0f64..2.0 * PI).prop_map(|(r, a)| DiskPoint::new(r * a.cos(), r * a.sin()).unwrap())
}

fn density() -> impl Strategy<Value = RadialDensity> {
    prop_oneof![
        (1u32..8).prop_map(RadialDensity::CoshPower),
        (0.01f64..1.0).prop_map(RadialDensity::ScaledQuadratic),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distance_is_isometry_invariant(p in point(), q in point(), c in -3.0f64..3.0) {
        let d = dist(&p, &q);
        let t = translate_along_axis(c);
        prop_assert!((dist(&t.apply(&p), &t.apply(&q)) - d).abs() < 1e-10 * (1.0 + d));
        prop_assert!((dist(&p.reflect_e1(), &q.reflect_e1()) - d).abs() < 1e-10 * (1.0 + d));
        prop_assert!((dist(&p.reflect_e2(), &q.reflect_e2()) - d).abs() < 1e-10 * (1.0 + d));
    }

    #[test]
    fn distance_to_origin_in_fermi_coordinates(p in point()) {
        let f = p.fermi();
        let rho = dist(&DiskPoint::new(0.0, 0.0).unwrap(), &p);
        prop_assert!((rho.cosh() - f.s.cosh() * f.t.cosh()).abs() < 1e-10 * rho.cosh());
    }

    #[test]
    fn frames_are_orthonormal(p in point()) {
        let f = frame_at(&p);
        prop_assert!((metric_dot(&p, f.x, f.x) - 1.0).abs() < 1e-12);
        prop_assert!((metric_dot(&p, f.x_perp, f.x_perp) - 1.0).abs() < 1e-12);
        prop_assert!(metric_dot(&p, f.x, f.x_perp).abs() < 1e-12);
        prop_assert!((f.k1 - p.fermi().s.tanh()).abs() < 1e-12);
        if let Some(n) = f.n {
            prop_assert!((metric_dot(&p, n, n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_curvature_follows_trig_law(s in 0.05f64..2.5, t in -2.5f64..2.5, alpha in -1.5f64..1.5) {
        let p = FermiCoords::new(s, t).to_disk();
        let k = comparison_curvature(&p, direction_at_angle(&p, alpha)).unwrap();
        let expected = alpha.cos() / s.tanh();
        prop_assert!((k - expected).abs() < 1e-9 * (1.0 + expected.abs()), "{} vs {}", k, expected);
    }

    #[test]
    fn euclidean_circles_on_the_axis(c in -0.9f64..0.9, frac in 0.01f64..0.99) {
        let r = frac * (1.0 - c.abs()).min(0.95);
        let radius = (2.0 * (c + r).atanh() - 2.0 * (c - r).atanh()) / 2.0;
        let top = DiskPoint::new(c, r).unwrap();
        let k = curvature_convert(1.0 / r, &top, [0.0, 1.0]).unwrap();
        let expected = 1.0 / radius.tanh();
        prop_assert!((k - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn density_derivatives_match_differences(d in density(), s in 0.1f64..5.0) {
        let h = 1e-5;
        let fd1 = (d.h(s + h) - d.h(s - h)) / (2.0 * h);
        let fd2 = (d.dh(s + h) - d.dh(s - h)) / (2.0 * h);
        prop_assert!((fd1 - d.dh(s)).abs() < 1e-6 * d.dh(s).abs().max(1.0));
        prop_assert!((fd2 - d.d2h(s)).abs() < 1e-6 * d.d2h(s).abs().max(1.0));
    }

    #[test]
    fn leaf_angle_is_reflection_symmetric(height in 0.01f64..3.0, t in 0.01f64..4.0) {
        let a = leaf_angle(height, t).unwrap();
        let b = leaf_angle(height, -t).unwrap();
        prop_assert!((a + b - PI).abs() < 1e-10);
        // moving along X⊥ decreases t and the angle
        prop_assert!(leaf_angle(height, t + 0.01).unwrap() > a);
    }

    #[test]
    fn radial_identity(s in 0.01f64..3.0, t in -3.0f64..3.0) {
        let beta = (PI / 2.0 - leaf_angle(s, t).unwrap()).abs();
        let rho = FermiCoords::new(s, t).radius();
        prop_assert!((rho.tanh() * beta.cos() - s.tanh()).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_profiles_match_balls(n in prop::sample::select(vec![2u32, 3, 4, 8, 16]), tau in 0.1f64..3.0, d in density()) {
        let b = ball_quantities(n, &d, tau).unwrap();
        let p = profile_functionals(&PolarProfile::constant(tau, n).unwrap(), &d).unwrap();
        prop_assert!((p.pf - b.pf).abs() < 1e-10 * b.pf);
        prop_assert!((p.vf - b.vf).abs() < 1e-10 * b.vf);
    }

    #[test]
    fn coarea_at_the_ball(n in 2u32..9, tau in 0.1f64..3.0, d in density()) {
        let h = 1e-5;
        let vp = ball_quantities(n, &d, tau + h).unwrap().vf;
        let vm = ball_quantities(n, &d, tau - h).unwrap().vf;
        let b = ball_quantities(n, &d, tau).unwrap();
        prop_assert!(vp > b.vf && b.vf > vm);
        prop_assert!(((vp - vm) / (2.0 * h) - b.pf).abs() < 1e-6 * b.pf);
    }

    #[test]
    fn perimeter_increases_with_exponent(n in 2u32..6, tau in 0.1f64..3.0, p in 1u32..7) {
        let a = ball_quantities(n, &RadialDensity::CoshPower(p), tau).unwrap().pf;
        let b = ball_quantities(n, &RadialDensity::CoshPower(p + 1), tau).unwrap().pf;
        prop_assert!(b > a);
    }

    #[test]
    fn symmetrize_is_idempotent(seed in any::<u64>(), n in 2u32..5) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = OccupancyGrid::new(10, 24, 2.0).unwrap();
        for i in 0..10 {
            for j in 0..24 {
                if rng.gen_bool(0.4) {
                    g.set(i, j, rng.gen::<f64>()).unwrap();
                }
            }
        }
        g.set(0, 0, 1.0).unwrap();
        let d = RadialDensity::CoshPower(1);
        let s = symmetrize(&g, &d, n).unwrap();
        prop_assert_eq!(symmetrize(&s, &d, n).unwrap(), s.clone());
        let (a, b) = (g.weighted_volume(n, &d), s.weighted_volume(n, &d));
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn hopf_density_is_strictly_convex(
        space in prop::sample::select(vec![(Field::C, 2u32), (Field::C, 3), (Field::H, 2), (Field::H, 3), (Field::O, 2)]),
        s in 0.0f64..6.0,
    ) {
        let sp = SpaceParams::new(space.0, space.1).unwrap();
        let d = hopf_density(&sp).unwrap();
        let expected = (sp.d - 1) as f64 / s.cosh().powi(2);
        prop_assert!(expected > 0.0);
        prop_assert!((d.d2h(s) - expected).abs() < 1e-12);
    }

    #[test]
    fn ball_beats_perturbed_profiles(seed in any::<u64>(), tau in 0.3f64..2.0, amp in 0.01f64..0.4, modes in 1usize..10) {
        let d = RadialDensity::CoshPower(1);
        let p = random_perturbation(3, tau, modes, amp * tau, seed).unwrap();
        let f = profile_functionals(&p, &d).unwrap();
        let r = ball_radius_for_volume(3, &d, f.vf).unwrap();
        prop_assert!(f.pf >= ball_quantities(3, &d, r).unwrap().pf - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shooting_conserves_the_constraint(n in 2u32..5, tau in 0.5f64..2.0, rel in 0.9f64..1.1) {
        let d = RadialDensity::CoshPower(1);
        let cfg = ShootingConfig::new(n, d.clone(), rel * lambda_for_ball(n, &d, tau), tau).unwrap();
        let traj = shoot(&cfg).unwrap();
        let within = traj.states.iter().take_while(|s| s.rho() < 6.0);
        for (st, b) in within.zip(&traj.breakdowns) {
            prop_assert!((b.hf - cfg.lambda).abs() < 1e-8, "{:?} {:?}", st, b);
        }
    }
}
