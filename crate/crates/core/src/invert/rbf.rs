use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward::linalg::check_conditioning;
use crate::Vec3;

/// `k₀(x) = Σ γ_j f_j(x)` with `f_j(x) = 1 + |x − z_j|`, interpolating
/// reconstructed point values.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfModulus {
    pub centers: Vec<Vec3>,
    pub gamma: DVector<f64>,
}

impl RbfModulus {
    pub fn eval(&self, x: &Vec3) -> f64 {
        self.centers
            .iter()
            .zip(self.gamma.iter())
            .map(|(z, g)| g * (1.0 + (x - z).norm()))
            .sum()
    }
}

pub fn fit_k0_rbf(points: &[(Vec3, f64)]) -> Result<RbfModulus> {
    if points.is_empty() {
        return Err(Error::domain("no points to fit"));
    }
    if points.iter().any(|(z, k)| !k.is_finite() || !z.iter().all(|c| c.is_finite())) {
        return Err(Error::domain("non-finite point or value in fit data"));
    }
    let centers: Vec<Vec3> = points.iter().map(|p| p.0).collect();
    let f = crate::forward::interpolation_matrix(&centers);
    check_conditioning(&f, "drop duplicate or nearly coincident fit points")?;
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let gamma = f
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("RBF fit matrix".into()))?;
    Ok(RbfModulus { centers, gamma })
}

/// Interpolation matrix of the fit, exposed for residual checks.
pub fn fit_matrix(centers: &[Vec3]) -> DMatrix<f64> {
    crate::forward::interpolation_matrix(centers)
}
