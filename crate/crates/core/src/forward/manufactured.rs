//! Manufactured sources for checking both solvers against known fields.

use std::f64::consts::PI;

use serde::Serialize;

use super::unperturbed::UnperturbedSolver;
use super::{
    sample_collocation_with, CollocationSet, Droplet, DropletContrast, DrmSolution, Exclusion, Layout, MediumField, PerturbedBase,
    QuadOrders, COMPLEX_RATIONAL_B,
};
use crate::error::Result;
use crate::kernels::{BoundarySurface, HelmKernel};
use crate::quad::{ball_rule, ball_rule_about, sphere_rule};
use crate::{C64, Vec3};

pub const X1_STAR: [f64; 3] = [1.0, -1.5, 1.5];
pub const X2_STAR: [f64; 3] = [1.5, 0.0, 1.5];

/// Droplet centre used by the perturbed check.
pub const PERTURBED_CENTER: [f64; 3] = [0.2, 0.3, 0.6];

/// `v*_ass(x) = |x - x₁*|² + i|x - x₂*|²`.
pub fn v_star_assumed(x: &Vec3) -> C64 {
    C64::new(
        (x - Vec3::from(X1_STAR)).norm_squared(),
        (x - Vec3::from(X2_STAR)).norm_squared(),
    )
}

/// `Θ` for the unperturbed check with `k₀ = 2/(1 + |x|²)`:
///
/// `Θ = (|x|²+1)/2 · v*_ass - (|x|²-1)(3+3i)/ω² + (|x|²-1)/2 · (ℱ₁ - ℱ₂)`
///
/// with `ℱ₁ = ∮ ∂_νΦ (v*_ass - (6+6i)/ω²)` and `ℱ₂ = ∮ Φ ∂_ν v*_ass`.
pub fn manufactured_theta_unperturbed(x: &Vec3, omega: f64) -> Result<C64> {
    let surface = BoundarySurface::new(QuadOrders::default().sphere, Vec3::zeros(), 1.0);
    manufactured_theta_unperturbed_on(x, omega, &surface)
}

pub fn manufactured_theta_unperturbed_on(x: &Vec3, omega: f64, surface: &BoundarySurface) -> Result<C64> {
    surface.check_target(x)?;
    let kernel = HelmKernel::new(omega);
    let w2 = omega * omega;
    let lap = C64::new(6.0, 6.0) / w2;
    let x1 = Vec3::from(X1_STAR);
    let x2 = Vec3::from(X2_STAR);
    let rule = surface.rule_for(x);
    let (f1, f2) = rule.integrate(|y, nu| {
        let d = y - x;
        let (phi, dphi) = kernel.phi_and_normal_deriv(d.norm(), d.dot(nu));
        let dv = C64::new(2.0 * (y - x1).dot(nu), 2.0 * (y - x2).dot(nu));
        Pair(dphi * (v_star_assumed(y) - lap), phi * dv)
    })
    .into();
    let r2 = x.norm_squared();
    Ok(0.5 * (r2 + 1.0) * v_star_assumed(x) - (r2 - 1.0) * C64::new(3.0, 3.0) / w2 + 0.5 * (r2 - 1.0) * (f1 - f2))
}

#[derive(Clone, Copy)]
struct Pair(C64, C64);

impl std::ops::Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, w: f64) -> Pair {
        Pair(self.0 * w, self.1 * w)
    }
}

impl std::iter::Sum for Pair {
    fn sum<I: Iterator<Item = Pair>>(iter: I) -> Pair {
        iter.fold(Pair(C64::new(0.0, 0.0), C64::new(0.0, 0.0)), |a, b| Pair(a.0 + b.0, a.1 + b.1))
    }
}

impl From<Pair> for (C64, C64) {
    fn from(p: Pair) -> Self {
        (p.0, p.1)
    }
}

/// `u_ass(x) = |x|² + b·x + 3` with `b = (1, 2, 3)`.
pub fn u_assumed_perturbed(x: &Vec3) -> C64 {
    C64::new(x.norm_squared() + Vec3::from(COMPLEX_RATIONAL_B).dot(x) + 3.0, 0.0)
}

/// Orders of the brute-force volume rules behind the perturbed source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRules {
    pub polar_radial: usize,
    pub polar_angular: usize,
    pub droplet_radial: usize,
    pub droplet_angular: usize,
}

impl Default for ThetaRules {
    fn default() -> Self {
        Self {
            polar_radial: 32,
            polar_angular: 24,
            droplet_radial: 12,
            droplet_angular: 12,
        }
    }
}

/// `Θ = u - ω²∫_B Φ(1/k₀ - 1)u + ω²∫_{D_z} Φ(1/k₀ - 1/k₁)u` for a known `u`,
/// both volume integrals by direct quadrature. `x` must lie outside `D̄_z`.
pub fn manufactured_theta_perturbed(
    x: &Vec3,
    omega: f64,
    medium: &MediumField,
    droplet: &Droplet,
    u: impl Fn(&Vec3) -> C64,
    rules: ThetaRules,
) -> Result<C64> {
    let kernel = HelmKernel::new(omega);
    let w2 = omega * omega;
    let bulk = ball_rule_about(rules.polar_radial, rules.polar_angular, Vec3::zeros(), 1.0, *x)?;
    let vol = bulk.integrate(|y| kernel.phi_r((y - x).norm()) * medium.contrast(y) * u(y));
    let drop_rule = ball_rule(rules.droplet_radial, rules.droplet_angular, droplet.center, droplet.eps);
    let inv_k1 = droplet.inv_k1();
    let drop = drop_rule.integrate(|y| kernel.phi_r((y - x).norm()) * (medium.inv_k0(y) - inv_k1) * u(y));
    Ok(u(x) - w2 * vol + w2 * drop)
}

/// Error summary of a manufactured-solution run.
#[derive(Debug, Clone, Serialize)]
pub struct ManufacturedReport {
    pub n: usize,
    pub seed: u64,
    pub l2_error: f64,
    pub spheres: Vec<SphereError>,
    /// Relative far-field error against direct quadrature of the known field.
    pub far_field_rel: Option<f64>,
}

/// Pointwise error statistics over one probe sphere.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SphereError {
    pub center: [f64; 3],
    pub radius: f64,
    pub max: f64,
    /// Root-mean-square over the sphere (area-weighted).
    pub rms: f64,
}

/// L² error over `B(0,1)` by a product ball rule.
pub fn l2_error(a: impl Fn(&Vec3) -> C64, b: impl Fn(&Vec3) -> C64, nr: usize, ns: usize) -> f64 {
    let rule = ball_rule(nr, ns, Vec3::zeros(), 1.0);
    rule.integrate(|y| (a(y) - b(y)).norm_sqr()).sqrt()
}

/// Max and RMS error over the nodes of a product sphere rule.
pub fn sphere_error(a: impl Fn(&Vec3) -> C64, b: impl Fn(&Vec3) -> C64, center: Vec3, radius: f64) -> SphereError {
    let rule = sphere_rule(24, center, radius);
    let max = rule.points.iter().map(|y| (a(y) - b(y)).norm()).fold(0.0, f64::max);
    let mean_sq = rule.integrate(|y, _| (a(y) - b(y)).norm_sqr()) / (4.0 * PI * radius * radius);
    SphereError {
        center: center.into(),
        radius,
        max,
        rms: mean_sq.sqrt(),
    }
}

/// Unperturbed check: `k₀ = 2/(1+|x|²)`, source `Θ` from `v*_ass`.
pub fn run_unperturbed(
    n: usize,
    seed: u64,
    layout: &Layout,
    omega: f64,
    theta: &Vec3,
    orders: QuadOrders,
) -> Result<(ManufacturedReport, DrmSolution)> {
    let colloc = sample_collocation_with(n, seed, layout, &[])?;
    run_unperturbed_on(&colloc, seed, omega, theta, orders)
}

pub fn run_unperturbed_on(
    colloc: &CollocationSet,
    seed: u64,
    omega: f64,
    theta: &Vec3,
    orders: QuadOrders,
) -> Result<(ManufacturedReport, DrmSolution)> {
    let medium = MediumField::rational2();
    let solver = UnperturbedSolver::new(&medium, colloc, omega, orders)?;
    let thetas: Vec<C64> = colloc
        .points
        .iter()
        .map(|x| manufactured_theta_unperturbed_on(x, omega, &solver.surface))
        .collect::<Result<_>>()?;
    let lookup = |x: &Vec3| {
        let i = colloc.points.iter().position(|p| p == x).expect("collocation node");
        thetas[i]
    };
    let sol = solver.solve(theta, Some(&lookup))?;
    let num = |x: &Vec3| sol.expansion(x);
    let l2 = l2_error(v_star_assumed, num, 24, 24);
    let spheres = [0.3, 0.6]
        .iter()
        .map(|&r| sphere_error(v_star_assumed, num, Vec3::zeros(), r))
        .collect();

    let xhat = -theta.normalize();
    let far_num = super::far_field_unperturbed(&sol, &xhat, orders);
    let rule = ball_rule(orders.ball_radial, orders.ball_angular, Vec3::zeros(), 1.0);
    let far_ass = omega * omega / (4.0 * PI)
        * rule.integrate(|y| C64::from_polar(1.0, -omega * xhat.dot(y)) * v_star_assumed(y));
    let report = ManufacturedReport {
        n: colloc.len(),
        seed,
        l2_error: l2,
        spheres,
        far_field_rel: Some((far_num - far_ass).norm() / far_ass.norm()),
    };
    Ok((report, sol))
}

/// Perturbed check: complex-rational `k₀`, droplet at `(0.2, 0.3, 0.6)`,
/// source `Θ` from `u_ass`.
#[allow(clippy::too_many_arguments)]
pub fn run_perturbed(
    n: usize,
    seed: u64,
    layout: &Layout,
    omega: f64,
    theta: &Vec3,
    eps: f64,
    orders: QuadOrders,
) -> Result<(ManufacturedReport, DrmSolution)> {
    let medium = MediumField::complex_rational();
    let droplet = Droplet::new(Vec3::from(PERTURBED_CENTER), eps)?;
    let colloc = sample_collocation_with(n, seed, layout, &[Exclusion::around(&droplet)])?;
    let base = PerturbedBase::new(&medium, &colloc, omega, theta, orders)?;
    let rules = ThetaRules::default();
    let thetas: Vec<C64> = colloc
        .points
        .iter()
        .map(|x| manufactured_theta_perturbed(x, omega, &medium, &droplet, u_assumed_perturbed, rules))
        .collect::<Result<_>>()?;
    let lookup = |x: &Vec3| {
        let i = colloc.points.iter().position(|p| p == x).expect("collocation node");
        thetas[i]
    };
    let sol = base.solve(&droplet, DropletContrast::Physical, Some(&lookup))?;
    let num = |x: &Vec3| sol.expansion(x);
    let l2 = l2_error(u_assumed_perturbed, num, 24, 24);
    let probe = Vec3::new(0.1, 0.0, 0.0);
    let spheres = [0.2, 0.4]
        .iter()
        .map(|&r| sphere_error(u_assumed_perturbed, num, probe, r))
        .collect();
    let report = ManufacturedReport {
        n,
        seed,
        l2_error: l2,
        spheres,
        far_field_rel: None,
    };
    Ok((report, sol))
}
