//! Randomized invariants across modules.

use droplet_probe::eigensys::{mu_root, root_bracket, transcendental};
use droplet_probe::forward::helmholtz_ball_volume;
use droplet_probe::grid::{Geometry, ScalarGrid3};
use droplet_probe::invert::{noise_factor, reconstruct_k0, refine, SplineEnd, DEFAULT_XI_FLOOR};
use droplet_probe::mollify::mollified_deriv_1d;
use droplet_probe::quad::{ball_rule, gauss_legendre};
use droplet_probe::{Vec3, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(n in 1usize..30, coeffs in prop::collection::vec(-2.0f64..2.0, 60)) {
        let r = gauss_legendre(n);
        let deg = 2 * n - 1;
        let p = |t: f64| coeffs[..=deg].iter().rev().fold(0.0, |acc, c| acc * t + c);
        let exact: f64 = coeffs[..=deg]
            .iter()
            .enumerate()
            .map(|(d, c)| if d % 2 == 0 { 2.0 * c / (d as f64 + 1.0) } else { 0.0 })
            .sum();
        prop_assert!((r.integrate(p) - exact).abs() < 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn roots_sit_inside_their_brackets(n in 1usize..200) {
        let mu = mu_root(n).unwrap();
        let (lo, hi) = root_bracket(n);
        prop_assert!(mu > lo && mu < hi);
        prop_assert!(transcendental(mu).abs() < 1e-10 * mu.max(1.0));
    }

    #[test]
    fn noise_is_bounded_and_keyed(seed in any::<u64>(), i in 0usize..500, j in 0usize..500, k in 0usize..500, tau in 0.0f64..0.5) {
        let a = noise_factor(seed, [i, j, k], tau);
        prop_assert!(a.abs() <= tau);
        prop_assert_eq!(a, noise_factor(seed, [i, j, k], tau));
    }

    #[test]
    fn reconstruction_ignores_the_contrast_scale(re in -5.0f64..5.0, im in -5.0f64..5.0, freq in 1.0f64..3.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let g = Geometry::spanning([0.0; 3], [0.1; 3], [21; 3]).unwrap();
        let theta = Vec3::new(1.0, 2.0, 1.0).normalize();
        let xi = |c: C64| ScalarGrid3::from_fn(g, |z: &Vec3| c * C64::from_polar(1.0, 2.0 * freq * theta.dot(z)));
        let a = reconstruct_k0(&xi(C64::new(1.0, 0.0)), 0.03, 1.8366, DEFAULT_XI_FLOOR).unwrap();
        let b = reconstruct_k0(&xi(C64::new(re, im)), 0.03, 1.8366, DEFAULT_XI_FLOOR).unwrap();
        for (x, y) in a.k0_num.values.iter().zip(&b.k0_num.values) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn mollified_derivatives_reproduce_quadratics(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let h = 0.0025;
        let s: Vec<C64> = (0..80).map(|i| { let x = i as f64 * h; C64::new(a + b * x + c * x * x, 0.0) }).collect();
        let d1 = mollified_deriv_1d(&s, h, 0.03, 1).unwrap();
        let d2 = mollified_deriv_1d(&s, h, 0.03, 2).unwrap();
        for (n, (v1, v2)) in d1.values.iter().zip(&d2.values).enumerate() {
            let x = (n + d1.offset) as f64 * h;
            prop_assert!((v1.re - (b + 2.0 * c * x)).abs() < 1e-7);
            prop_assert!((v2.re - 2.0 * c).abs() < 2e-3 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn refinement_keeps_the_nodes(vals in prop::collection::vec(-1.0f64..1.0, 125)) {
        let g = Geometry::new([0.0; 3], [0.1; 3], [5; 3]).unwrap();
        let xi = ScalarGrid3::new(g, vals.iter().map(|v| C64::new(*v, -v)).collect()).unwrap();
        let fine = refine(&xi, 2.0, SplineEnd::NotAKnot).unwrap();
        prop_assert_eq!(fine.geometry().dims, [9; 3]);
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    prop_assert!((fine.get(2 * i, 2 * j, 2 * k) - xi.get(i, j, k)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn grids_round_trip_through_bytes(vals in prop::collection::vec(any::<f64>(), 24)) {
        let g = Geometry::new([0.5, -1.0, 2.0], [0.25, 0.5, 1.0], [2, 3, 2]).unwrap();
        let grid = ScalarGrid3::new(g, vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect()).unwrap();
        let back = ScalarGrid3::from_bytes(&grid.to_bytes()).unwrap();
        prop_assert_eq!(grid.to_bytes(), back.to_bytes());
    }

    #[test]
    fn ball_volume_matches_quadrature(eps in 0.005f64..0.5, omega in 0.5f64..5.0) {
        let rule = ball_rule(16, 16, Vec3::zeros(), eps);
        let theta = Vec3::z();
        let got: C64 = rule.integrate(|y| C64::from_polar(1.0, omega * theta.dot(y)));
        let want = helmholtz_ball_volume(omega, eps);
        prop_assert!((got - want).norm() < 1e-9 * want.abs().max(1e-12) + 1e-15);
    }
}
