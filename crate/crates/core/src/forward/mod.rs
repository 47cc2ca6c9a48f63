//! Dual reciprocity collocation solvers for the Lippmann–Schwinger equation
//! with and without an injected droplet.
//!
//! Both solvers expand the unknown in the atoms `f_k = 1 + |x - x_k|`
//! centred at the collocation points and turn every volume potential into
//! surface integrals over `∂B(0,1)` (and `∂D_z`) through the particular
//! solutions `f̂_k`.

mod collocated;
mod collocation;
pub mod linalg;
pub mod manufactured;
mod medium;
mod perturbed;
mod unperturbed;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use collocated::{ball_self_potential, helmholtz_ball_volume, CollocatedDroplet, CollocatedSolution};
pub use collocation::{
    sample_collocation, sample_collocation_in, sample_collocation_with, CollocationSet, Exclusion, Layout,
    DEFAULT_SAMPLING_RADIUS,
};
pub use medium::{MediumField, MediumPreset, COMPLEX_RATIONAL_B};
pub use perturbed::{
    assemble_perturbed, far_field_perturbed, solve_perturbed, DropletContrast, PerturbedBase, PerturbedParts,
};
pub use unperturbed::{
    assemble_unperturbed, far_field_unperturbed, plane_wave_moments, solve_unperturbed, UnperturbedSolver,
};

use crate::error::{Error, Result};
use crate::{C64, Vec3};

/// Small ball `D_z = z + εB(0,1)` of normalized bulk `k̄₁`, so `k₁ = k̄₁ε²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Droplet {
    pub center: Vec3,
    pub eps: f64,
    pub h: f64,
    pub kbar1: f64,
}

impl Droplet {
    pub fn new(center: Vec3, eps: f64) -> Result<Self> {
        Self::with_params(center, eps, 0.95, 1.0)
    }

    pub fn with_params(center: Vec3, eps: f64, h: f64, kbar1: f64) -> Result<Self> {
        let fail = |reason: &str| Error::Droplet {
            center: [center.x, center.y, center.z],
            eps,
            reason: reason.to_string(),
        };
        if !(eps > 0.0 && eps < 0.5) {
            return Err(fail("radius must lie in (0, 0.5)"));
        }
        if !(h > 0.5 && h < 1.0) {
            return Err(fail("h must lie in (1/2, 1)"));
        }
        if !(kbar1 > 0.0) {
            return Err(fail("normalized bulk must be positive"));
        }
        if center.norm() + eps >= 1.0 {
            return Err(fail("droplet leaves the unit ball"));
        }
        Ok(Self { center, eps, h, kbar1 })
    }

    /// `1/k₁ = 1/(k̄₁ε²)`.
    pub fn inv_k1(&self) -> f64 {
        1.0 / (self.kbar1 * self.eps * self.eps)
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        (x - self.center).norm() < self.eps
    }
}

/// Quadrature orders shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadOrders {
    /// Product-rule order `N` on `∂B(0,1)`.
    pub sphere: usize,
    /// Product-rule order on the droplet boundary.
    pub droplet_sphere: usize,
    pub ball_radial: usize,
    pub ball_angular: usize,
    pub droplet_ball_radial: usize,
    pub droplet_ball_angular: usize,
}

impl Default for QuadOrders {
    fn default() -> Self {
        Self {
            sphere: 20,
            droplet_sphere: 20,
            ball_radial: 16,
            ball_angular: 20,
            droplet_ball_radial: 8,
            droplet_ball_angular: 8,
        }
    }
}

/// Expansion coefficients of a solved field over the collocation atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DrmSolution {
    pub collocation: CollocationSet,
    pub coeffs: DVector<C64>,
    pub omega: f64,
    pub theta: Vec3,
}

impl DrmSolution {
    /// `Σ_k c_k f_k(x)`.
    pub fn expansion(&self, x: &Vec3) -> C64 {
        expand(&self.collocation.points, &self.coeffs, x)
    }
}

pub(crate) fn expand(centers: &[Vec3], coeffs: &DVector<C64>, x: &Vec3) -> C64 {
    centers
        .iter()
        .zip(coeffs.iter())
        .map(|(c, a)| a * (1.0 + (x - c).norm()))
        .sum()
}

/// `F[i][k] = f_k(x_i)` for atoms centred at the targets' own points.
pub fn interpolation_matrix(points: &[Vec3]) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, k| 1.0 + (points[i] - points[k]).norm())
}

/// Factorized RBF interpolation on a collocation set.
#[derive(Debug, Clone)]
pub struct Interpolator {
    matrix: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Interpolator {
    pub fn new(colloc: &CollocationSet) -> Result<Self> {
        let matrix = interpolation_matrix(&colloc.points);
        linalg::check_conditioning(&matrix, "change the collocation seed or count")?;
        let lu = matrix.clone().lu();
        Ok(Self { matrix, lu })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Coefficients reproducing `values` at the nodes.
    pub fn coeffs(&self, values: &DVector<C64>) -> Result<DVector<C64>> {
        let cols = DMatrix::from_column_slice(values.len(), 1, values.as_slice());
        let d = self.coeffs_mat(&cols)?;
        Ok(d.column(0).into_owned())
    }

    /// Column-wise coefficients for a block of right-hand sides.
    pub fn coeffs_mat(&self, values: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let (re, im) = linalg::split(values);
        let fail = || Error::Singular("interpolation matrix".into());
        let re = self.lu.solve(&re).ok_or_else(fail)?;
        let im = self.lu.solve(&im).ok_or_else(fail)?;
        Ok(linalg::join(&re, &im))
    }
}

/// Coefficients `d` with `Σ_ℓ d_ℓ f_ℓ(x_i) = g(x_i)` at every node.
pub fn rbf_interp_coeffs(g: impl Fn(&Vec3) -> C64, colloc: &CollocationSet) -> Result<DVector<C64>> {
    let values = DVector::from_iterator(colloc.len(), colloc.points.iter().map(g));
    Interpolator::new(colloc)?.coeffs(&values)
}

/// Default incident direction `(1, 2, 1)/√6`.
pub fn default_theta() -> Vec3 {
    Vec3::new(1.0, 2.0, 1.0).normalize()
}

pub(crate) fn plane_wave(omega: f64, theta: &Vec3, x: &Vec3) -> C64 {
    C64::from_polar(1.0, omega * theta.dot(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn droplet_validation() {
        assert!(Droplet::new(Vec3::new(0.2, 0.3, 0.6), 0.01).is_ok());
        assert!(Droplet::new(Vec3::new(0.0, 0.0, 0.995), 0.01).is_err());
        assert!(Droplet::with_params(Vec3::zeros(), 0.01, 0.4, 1.0).is_err());
        let d = Droplet::new(Vec3::zeros(), 0.01).unwrap();
        assert!((d.inv_k1() - 1e4).abs() < 1e-8);
    }

    #[test]
    fn interpolation_reproduces_constants_and_atoms() {
        let colloc = sample_collocation(60, 2, None).unwrap();
        let d = rbf_interp_coeffs(|_| C64::new(2.5, -1.0), &colloc).unwrap();
        for x in &colloc.points {
            let v = expand(&colloc.points, &d, x);
            assert!((v - C64::new(2.5, -1.0)).norm() < 1e-10);
        }
        let c3 = colloc.points[3];
        let d = rbf_interp_coeffs(|x| C64::new(1.0 + (x - c3).norm(), 0.0), &colloc).unwrap();
        for (k, v) in d.iter().enumerate() {
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-9, "k={k} {v}");
        }
    }

    #[test]
    fn interpolation_of_contrast_weighted_atom() {
        let colloc = sample_collocation(120, 5, None).unwrap();
        let m = MediumField::rational2();
        let ck = colloc.points[7];
        let g = |x: &Vec3| m.inv_k0(x) * (1.0 + (x - ck).norm());
        let d = rbf_interp_coeffs(g, &colloc).unwrap();
        let scale = colloc.points.iter().map(|x| g(x).norm()).fold(0.0, f64::max);
        for x in &colloc.points {
            assert!((expand(&colloc.points, &d, x) - g(x)).norm() <= 1e-10 * scale);
        }
    }
}
