//! Droplet closed by its collocated centre value.
//!
//! The expansion model reads the field inside `D_z` off the atoms, which
//! also have to carry the droplet's own near field. The value they return
//! at `z` then depends on how the nodes sit around `z`, and that dependence
//! dominates the second derivatives of `ξ`. Here the droplet instead gets one
//! extra unknown `a = u(z)` that satisfies the Lippmann–Schwinger equation
//! at its centre:
//!
//! ```text
//! A₀ β + ω² q Φ(x_i - z) a = e^{iωθ·x_i}
//! a (1 + ω² w S) - ω² V[C¹β](z) = e^{iωθ·z}
//! ```
//!
//! where `w = 1/k₀(z) - 1/k₁`, `q = w |D|_ω` with the Helmholtz ball
//! volume `|D|_ω = 4π(sin ωε - ωε cos ωε)/ω³`, `S = ∫_D Φ(z - y) dy`, and
//! `V` is the bulk volume potential. `A₀` does not depend on `z`, so a Schur
//! complement against one factorization costs `O(n²)` per position. The
//! back-scattered contrast follows by reciprocity,
//! `v^∞ - u_z^∞ = ω²/(4π) · q · a · v(z)`.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::linalg::ComplexLu;
use super::{plane_wave, Droplet, PerturbedBase};
use crate::error::{Error, Result};
use crate::kernels::{particular_radial, HelmKernel};
use crate::{Vec3, C64};

/// `∫_{|y| < ε} e^{iωθ·y} dy`, equal to `∫_{|y|<ε} Φ(x - y) dy / Φ(x)` for
/// any `|x| > ε` by the mean-value property.
pub fn helmholtz_ball_volume(omega: f64, eps: f64) -> f64 {
    let t = omega * eps;
    4.0 * PI * (t.sin() - t * t.cos()) / omega.powi(3)
}

/// `∫_{|y| < ε} Φ(y) dy`.
pub fn ball_self_potential(omega: f64, eps: f64) -> C64 {
    let t = omega * eps;
    (C64::from_polar(1.0, t) * C64::new(1.0, -t) - 1.0) / (omega * omega)
}

/// Field values of one collocated-droplet solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollocatedSolution {
    /// `u_z(z)`.
    pub interior: C64,
    /// `v(z)` from the integral representation of the droplet-free field.
    pub background: C64,
    /// `v^∞(-θ) - u_z^∞(-θ)`.
    pub contrast: C64,
}

/// Droplet-independent factorization shared by every position.
#[derive(Debug, Clone)]
pub struct CollocatedDroplet {
    lu: ComplexLu,
    /// `C¹β₀`: density coefficients of the droplet-free solution.
    density0: DVector<C64>,
}

impl CollocatedDroplet {
    pub fn new(base: &PerturbedBase) -> Result<Self> {
        let lu = ComplexLu::new(base.base.clone())?;
        let rhs = DVector::from_iterator(
            base.colloc().len(),
            base.colloc().points.iter().map(|x| plane_wave(base.omega(), &base.theta, x)),
        );
        let beta0 = lu.solve(&rhs)?;
        Ok(Self {
            density0: &base.c1 * beta0,
            lu,
        })
    }

    /// `f̂_k(z) - 𝒥_k(∂B; z)`, so that `g · C¹β = -V[C¹β](z)`.
    fn potential_row(base: &PerturbedBase, z: &Vec3) -> Result<DVector<C64>> {
        let pts = &base.colloc().points;
        let omega = base.omega();
        let jb = base.solver.surface.matrix(std::slice::from_ref(z), pts, omega)?;
        Ok(DVector::from_iterator(
            pts.len(),
            pts.iter()
                .enumerate()
                .map(|(k, x)| particular_radial(omega, (z - x).norm()).0 - jb[(0, k)]),
        ))
    }

    pub fn solve(&self, base: &PerturbedBase, droplet: &Droplet) -> Result<CollocatedSolution> {
        let at = |e: Error| Error::AtPosition {
            center: droplet.center.into(),
            source: Box::new(e),
        };
        let z = droplet.center;
        let omega = base.omega();
        let w2 = omega * omega;
        let pts = &base.colloc().points;
        if let Some(p) = pts.iter().find(|p| droplet.contains(p)) {
            return Err(Error::Droplet {
                center: z.into(),
                eps: droplet.eps,
                reason: format!("collocation point {:?} lies inside the droplet", [p.x, p.y, p.z]),
            });
        }
        let g = Self::potential_row(base, &z).map_err(at)?;
        let background = plane_wave(omega, &base.theta, &z) - g.dot(&self.density0) * w2;

        let w = base.solver.medium.inv_k0(&z) - droplet.inv_k1();
        let q = w * helmholtz_ball_volume(omega, droplet.eps);
        let kernel = HelmKernel::new(omega);
        let source = DVector::from_iterator(pts.len(), pts.iter().map(|x| kernel.phi_r((x - z).norm()) * q));
        let response = self.lu.solve(&source).map_err(at)?;
        let coupling = g.dot(&(&base.c1 * response));
        let den = 1.0 + w2 * w * ball_self_potential(omega, droplet.eps) - w2 * w2 * coupling;
        if !(den.norm() > 1e-12) {
            return Err(at(Error::Singular("collocated droplet equation is singular".into())));
        }
        let interior = background / den;
        Ok(CollocatedSolution {
            interior,
            background,
            contrast: w2 / (4.0 * PI) * q * interior * background,
        })
    }
}
