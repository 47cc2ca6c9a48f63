use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{linalg, plane_wave, CollocationSet, DrmSolution, Interpolator, MediumField, QuadOrders};
use crate::error::{Error, Result};
use crate::kernels::{particular_radial, BoundarySurface, RbfAtom};
use crate::quad::{ball_rule, BallRule};
use crate::{C64, Vec3};

/// Contrast magnitude below which `v = v*/(1/k₀ - 1)` is not trusted.
pub const CONTRAST_FLOOR: f64 = 1e-8;

/// `F̂[i][k] = f̂_k(x_i)`.
pub(crate) fn particular_matrix(targets: &[Vec3], centers: &[Vec3], omega: f64) -> DMatrix<f64> {
    DMatrix::from_fn(targets.len(), centers.len(), |i, k| {
        particular_radial(omega, (targets[i] - centers[k]).norm()).0
    })
}

/// Shared pieces of the unperturbed system on one collocation set.
#[derive(Debug, Clone)]
pub struct UnperturbedSolver {
    pub medium: MediumField,
    pub colloc: CollocationSet,
    pub omega: f64,
    pub orders: QuadOrders,
    pub surface: BoundarySurface,
    /// `J_B[i][k] = 𝒥_k(x_i)` over `∂B(0,1)`.
    pub j_ball: DMatrix<C64>,
    /// `F̂[i][k] = f̂_k(x_i)`.
    pub f_hat: DMatrix<f64>,
    pub interp: Interpolator,
}

impl UnperturbedSolver {
    pub fn new(medium: &MediumField, colloc: &CollocationSet, omega: f64, orders: QuadOrders) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::domain("frequency must be positive"));
        }
        let surface = BoundarySurface::new(orders.sphere, Vec3::zeros(), 1.0);
        let j_ball = surface.matrix(&colloc.points, &colloc.points, omega)?;
        let f_hat = particular_matrix(&colloc.points, &colloc.points, omega);
        let interp = Interpolator::new(colloc)?;
        Ok(Self {
            medium: medium.clone(),
            colloc: colloc.clone(),
            omega,
            orders,
            surface,
            j_ball,
            f_hat,
            interp,
        })
    }

    /// `c_i = 1/k₀(x_i) - 1` at the nodes.
    pub fn contrast(&self) -> DVector<C64> {
        DVector::from_iterator(self.colloc.len(), self.colloc.points.iter().map(|x| self.medium.contrast(x)))
    }

    /// `A_ik = f_k(x_i) - ω² c_i (𝒥_k(x_i) - f̂_k(x_i))`.
    pub fn matrix(&self) -> DMatrix<C64> {
        let w2 = self.omega * self.omega;
        let c = self.contrast();
        let f = self.interp.matrix();
        DMatrix::from_fn(f.nrows(), f.ncols(), |i, k| {
            f[(i, k)] - c[i] * w2 * (self.j_ball[(i, k)] - self.f_hat[(i, k)])
        })
    }

    /// Solve with right-hand side `(1/k₀ - 1) e^{iωx·θ}` or an override.
    pub fn solve(&self, theta: &Vec3, rhs_override: Option<&dyn Fn(&Vec3) -> C64>) -> Result<DrmSolution> {
        let theta = unit(theta)?;
        let rhs = DVector::from_iterator(
            self.colloc.len(),
            self.colloc.points.iter().map(|x| match rhs_override {
                Some(g) => g(x),
                None => self.medium.contrast(x) * plane_wave(self.omega, &theta, x),
            }),
        );
        let coeffs = linalg::solve_checked(&self.matrix(), &rhs, 1e-10)?;
        Ok(DrmSolution {
            collocation: self.colloc.clone(),
            coeffs,
            omega: self.omega,
            theta,
        })
    }

    /// `∫_B Φ_ω(x,y) v*(y) dy` through the Green reduction. For `x` outside
    /// the ball only the surface part remains.
    pub fn volume_potential(&self, sol: &DrmSolution, x: &Vec3) -> Result<C64> {
        let inside = x.norm() < 1.0;
        let mut acc = C64::new(0.0, 0.0);
        for (c, a) in sol.collocation.points.iter().zip(sol.coeffs.iter()) {
            let atom = RbfAtom::new(*c, self.omega);
            let mut v = self.surface.integral(&atom, x)?;
            if inside {
                v -= atom.particular(x);
            }
            acc += a * v;
        }
        Ok(acc)
    }

    /// Total field `v`: `v*/(1/k₀ - 1)` where the contrast is usable, the
    /// Lippmann–Schwinger representation elsewhere.
    pub fn total_field(&self, sol: &DrmSolution, x: &Vec3) -> Result<C64> {
        let c = if x.norm() < 1.0 {
            self.medium.contrast(x)
        } else {
            C64::new(0.0, 0.0)
        };
        if c.norm() >= CONTRAST_FLOOR {
            return Ok(sol.expansion(x) / c);
        }
        let w2 = self.omega * self.omega;
        Ok(plane_wave(self.omega, &sol.theta, x) + w2 * self.volume_potential(sol, x)?)
    }
}

fn unit(theta: &Vec3) -> Result<Vec3> {
    let n = theta.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain("incident direction must be a nonzero vector"));
    }
    Ok(theta / n)
}

pub fn assemble_unperturbed(
    medium: &MediumField,
    colloc: &CollocationSet,
    omega: f64,
    orders: QuadOrders,
) -> Result<DMatrix<C64>> {
    Ok(UnperturbedSolver::new(medium, colloc, omega, orders)?.matrix())
}

pub fn solve_unperturbed(
    medium: &MediumField,
    colloc: &CollocationSet,
    omega: f64,
    theta: &Vec3,
    rhs_override: Option<&dyn Fn(&Vec3) -> C64>,
    orders: QuadOrders,
) -> Result<DrmSolution> {
    UnperturbedSolver::new(medium, colloc, omega, orders)?.solve(theta, rhs_override)
}

/// `m_k = ∫_B e^{-iω x̂·y} w(y) f_k(y) dy` for every atom, by `rule`.
pub fn plane_wave_moments(
    rule: &BallRule,
    centers: &[Vec3],
    omega: f64,
    xhat: &Vec3,
    weight: impl Fn(&Vec3) -> C64,
) -> DVector<C64> {
    let mut m = DVector::<C64>::zeros(centers.len());
    for (y, &w) in rule.points.iter().zip(&rule.weights) {
        let g = weight(y) * C64::from_polar(w, -omega * xhat.dot(y));
        for (k, c) in centers.iter().enumerate() {
            m[k] += g * (1.0 + (y - c).norm());
        }
    }
    m
}

/// `v^∞(x̂) = ω²/(4π) Σ_k α_k ∫_B e^{-iω x̂·y} f_k(y) dy`.
pub fn far_field_unperturbed(sol: &DrmSolution, xhat: &Vec3, orders: QuadOrders) -> C64 {
    let rule = ball_rule(orders.ball_radial, orders.ball_angular, Vec3::zeros(), 1.0);
    let m = plane_wave_moments(&rule, &sol.collocation.points, sol.omega, xhat, |_| C64::new(1.0, 0.0));
    let w2 = sol.omega * sol.omega;
    w2 / (4.0 * PI) * sol.coeffs.dot(&m)
}

/// `∫_B e^{-iω x̂·y} v*(y) dy` evaluated with the expansion at every node;
/// used to cross-check the moment form.
#[cfg(test)]
pub(crate) fn far_field_direct(sol: &DrmSolution, xhat: &Vec3, rule: &BallRule) -> C64 {
    let w2 = sol.omega * sol.omega;
    w2 / (4.0 * PI)
        * rule.integrate(|y| C64::from_polar(1.0, -sol.omega * xhat.dot(y)) * super::expand(&sol.collocation.points, &sol.coeffs, y))
}
