//! Quadrature rules against closed-form integrals.

use std::f64::consts::PI;

use droplet_probe::quad::{ball_rule, gauss_legendre, sphere_rule};
use droplet_probe::Vec3;

fn main() {
    for n in [2, 4, 8, 16] {
        let err = (gauss_legendre(n).integrate(f64::exp) - (1f64.exp() - (-1f64).exp())).abs();
        println!("GL{n:<3} int_-1^1 e^t dt   error {err:.2e}");
    }
    for n in [4, 8, 16] {
        let s = sphere_rule(n, Vec3::zeros(), 1.0);
        let err = (s.integrate(|y, _| y.x.powi(4)) - 4.0 * PI / 5.0).abs();
        println!("sphere N={n:<3} ({:>4} pts) int x^4   error {err:.2e}", s.len());
    }
    let b = ball_rule(16, 16, Vec3::new(0.2, 0.1, -0.3), 0.5);
    let vol = b.integrate(|_| 1.0);
    println!("ball r=0.5 volume {vol:.12} (exact {:.12})", 4.0 * PI / 3.0 * 0.125);
}
