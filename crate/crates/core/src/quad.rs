//! Deterministic quadrature rules. Everything is built from Gauss–Legendre:
//! spheres get a Gauss–trapezoid product rule, balls a radial × sphere one.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::Vec3;

/// Gauss–Legendre rule on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `(a, b)`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Legendre polynomials `(P_n(t), P_{n-1}(t))` by the three-term recurrence.
fn legendre_pair(n: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * t * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `n`-point Gauss–Legendre rule. Nodes come from Newton iteration on `P_n`
/// started at Chebyshev-like guesses; weights are `2(1-t²)/[n P_{n-1}(t)]²`.
pub fn gauss_legendre(n: usize) -> Rule1D {
    assert!(n >= 1, "Gauss-Legendre order must be >= 1");
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut t = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, t);
            let dp = nf * (t * p - p_prev) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        let (_, p_prev) = legendre_pair(n, t);
        let w = 2.0 * (1.0 - t * t) / (nf * p_prev).powi(2);
        // descending cosines: mirror into ascending order
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule1D { nodes, weights }
}

/// Quadrature on the sphere `∂B(center, radius)`. `normals[i]` is the outward
/// unit normal at `points[i]`; weights already include the `radius²` factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub points: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub center: Vec3,
    pub radius: f64,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<T>(&self, f: impl Fn(&Vec3, &Vec3) -> T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        self.points
            .iter()
            .zip(&self.normals)
            .zip(&self.weights)
            .map(|((y, nu), &w)| f(y, nu) * w)
            .sum()
    }

    /// Same nodes translated and scaled onto another sphere.
    pub fn transported(&self, center: Vec3, radius: f64) -> SphereRule {
        let scale = radius / self.radius;
        SphereRule {
            points: self.normals.iter().map(|nu| center + nu * radius).collect(),
            normals: self.normals.clone(),
            weights: self.weights.iter().map(|w| w * scale * scale).collect(),
            center,
            radius,
        }
    }

    /// Distance from `x` to the sphere surface.
    pub fn distance_to(&self, x: &Vec3) -> f64 {
        ((x - self.center).norm() - self.radius).abs()
    }
}

/// Gauss–trapezoid product rule with `2N²` nodes: Gauss–Legendre in
/// `t = cos θ` and the trapezoid rule in `φ = πm/N`, weight `(π/N) μⱼ r²`.
pub fn sphere_rule(n: usize, center: Vec3, radius: f64) -> SphereRule {
    assert!(n >= 1 && radius > 0.0);
    let gl = gauss_legendre(n);
    let mut points = Vec::with_capacity(2 * n * n);
    let mut normals = Vec::with_capacity(2 * n * n);
    let mut weights = Vec::with_capacity(2 * n * n);
    let dphi = PI / n as f64;
    for (&t, &mu) in gl.nodes.iter().zip(&gl.weights) {
        let sin_theta = (1.0 - t * t).sqrt();
        for m in 0..2 * n {
            let phi = dphi * m as f64;
            let nu = Vec3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), t);
            points.push(center + nu * radius);
            normals.push(nu);
            weights.push(dphi * mu * radius * radius);
        }
    }
    SphereRule {
        points,
        normals,
        weights,
        center,
        radius,
    }
}

/// Product rule whose pole is aligned with `pole` and whose polar nodes are
/// Gauss–Legendre in the angle `θ ∈ (0, π)` (Jacobian `sin θ`). Nodes cluster
/// near the pole, which resolves integrands with a (near-)singularity there.
pub fn sphere_rule_about_pole(n: usize, center: Vec3, radius: f64, pole: &Vec3) -> SphereRule {
    assert!(n >= 1 && radius > 0.0);
    let e3 = pole.try_normalize(1e-300).unwrap_or(Vec3::z());
    let helper = if e3.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - e3 * helper.dot(&e3)).normalize();
    let e2 = e3.cross(&e1);

    let gl = gauss_legendre(n);
    let dphi = PI / n as f64;
    let mut points = Vec::with_capacity(2 * n * n);
    let mut normals = Vec::with_capacity(2 * n * n);
    let mut weights = Vec::with_capacity(2 * n * n);
    for (theta, w_theta) in gl.mapped(0.0, PI) {
        let (st, ct) = theta.sin_cos();
        for m in 0..2 * n {
            let (sp, cp) = (dphi * m as f64).sin_cos();
            let nu = e1 * (st * cp) + e2 * (st * sp) + e3 * ct;
            points.push(center + nu * radius);
            normals.push(nu);
            weights.push(dphi * w_theta * st * radius * radius);
        }
    }
    SphereRule {
        points,
        normals,
        weights,
        center,
        radius,
    }
}

/// Volume rule on a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<T>(&self, f: impl Fn(&Vec3) -> T) -> T
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(y, &w)| f(y) * w)
            .sum()
    }
}

/// Gauss–Legendre radial rule on `(0, radius)` with Jacobian `r²`, times
/// [`sphere_rule`] of order `ns`.
pub fn ball_rule(nr: usize, ns: usize, center: Vec3, radius: f64) -> BallRule {
    assert!(nr >= 1 && ns >= 1 && radius > 0.0);
    let radial = gauss_legendre(nr);
    let unit = sphere_rule(ns, Vec3::zeros(), 1.0);
    let mut points = Vec::with_capacity(nr * unit.len());
    let mut weights = Vec::with_capacity(nr * unit.len());
    for (r, wr) in radial.mapped(0.0, radius) {
        for (nu, &ws) in unit.normals.iter().zip(&unit.weights) {
            points.push(center + nu * r);
            weights.push(wr * r * r * ws);
        }
    }
    BallRule { points, weights }
}

/// Polar rule for `∫_{B(center, radius)} g(y) dy` centred at an interior
/// point `pole`: rays from `pole` in every direction of a sphere rule, each
/// integrated by Gauss–Legendre up to the ball surface. The `ρ²` Jacobian
/// absorbs a `1/|y - pole|` singularity, so weakly singular volume
/// potentials evaluated at `pole` converge spectrally.
pub fn ball_rule_about(nr: usize, ns: usize, center: Vec3, radius: f64, pole: Vec3) -> Result<BallRule> {
    let p = pole - center;
    let p2 = p.norm_squared();
    if p2 >= radius * radius {
        return Err(Error::domain("polar ball rule requires an interior pole"));
    }
    let radial = gauss_legendre(nr);
    let dirs = sphere_rule(ns, Vec3::zeros(), 1.0);
    let mut points = Vec::with_capacity(nr * dirs.len());
    let mut weights = Vec::with_capacity(nr * dirs.len());
    for (s, &ws) in dirs.normals.iter().zip(&dirs.weights) {
        let ps = p.dot(s);
        let rho_max = -ps + (ps * ps + radius * radius - p2).sqrt();
        for (rho, wr) in radial.mapped(0.0, rho_max) {
            points.push(pole + s * rho);
            weights.push(ws * wr * rho * rho);
        }
    }
    Ok(BallRule { points, weights })
}
