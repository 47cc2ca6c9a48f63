use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::unperturbed::UnperturbedSolver;
use super::{expand, linalg, plane_wave, plane_wave_moments, CollocationSet, Droplet, DrmSolution, MediumField, QuadOrders};
use crate::error::{Error, Result};
use crate::kernels::BoundarySurface;
use crate::quad::{ball_rule, BallRule};
use crate::{C64, Vec3};

/// How the droplet's bulk modulus enters the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropletContrast {
    /// `1/k = 1/(k̄₁ε²)` inside `D_z`.
    Physical,
    /// `1/k = 1/k₀` inside `D_z`: the droplet is invisible and only its
    /// exclusion from the collocation set remains.
    Neutralized,
}

/// Terms of the perturbed system kept separate for inspection.
#[derive(Debug, Clone)]
pub struct PerturbedParts {
    /// `D` with `F D = diag(1/k₀(x_i)) F`.
    pub d: DMatrix<C64>,
    /// `C¹ = D - I`.
    pub c1: DMatrix<C64>,
    /// `C^ε = D - (1/k₁) I`, zero when neutralized.
    pub c_eps: DMatrix<C64>,
    /// `J_D[i][ℓ] = 𝒥_ℓ(∂D_z; x_i)`.
    pub j_droplet: DMatrix<C64>,
}

/// Droplet-independent part of the perturbed system on one collocation set
/// and incident direction. Scanning many droplet positions reuses it.
#[derive(Debug, Clone)]
pub struct PerturbedBase {
    pub solver: UnperturbedSolver,
    pub theta: Vec3,
    pub d: DMatrix<C64>,
    d_real: Option<DMatrix<f64>>,
    pub c1: DMatrix<C64>,
    /// `F + ω²(F̂ - J_B) C¹`.
    pub base: DMatrix<C64>,
    /// `∫_B e^{iωθ·y} (1/k₀ - 1) f_k dy`.
    pub bulk_moments: DVector<C64>,
    droplet_ball: BallRule,
}

impl PerturbedBase {
    pub fn new(
        medium: &MediumField,
        colloc: &CollocationSet,
        omega: f64,
        theta: &Vec3,
        orders: QuadOrders,
    ) -> Result<Self> {
        let solver = UnperturbedSolver::new(medium, colloc, omega, orders)?;
        let theta = theta.normalize();
        let n = colloc.len();
        let f = solver.interp.matrix();
        let scaled = DMatrix::from_fn(n, n, |i, k| medium.inv_k0(&colloc.points[i]) * f[(i, k)]);
        let d = solver.interp.coeffs_mat(&scaled)?;
        let d_real = d.iter().all(|z| z.im == 0.0).then(|| d.map(|z| z.re));
        let c1 = &d - DMatrix::<C64>::identity(n, n);

        let w2 = omega * omega;
        let diff = solver.f_hat.map(|v| C64::new(v, 0.0)) - &solver.j_ball;
        let mut base = linalg::cmul(&diff, &c1) * C64::new(w2, 0.0);
        for (b, fv) in base.iter_mut().zip(f.iter()) {
            *b += fv;
        }

        let rule = ball_rule(orders.ball_radial, orders.ball_angular, Vec3::zeros(), 1.0);
        let bulk_moments = plane_wave_moments(&rule, &colloc.points, omega, &-theta, |y| medium.contrast(y));
        let droplet_ball = ball_rule(orders.droplet_ball_radial, orders.droplet_ball_angular, Vec3::zeros(), 1.0);
        Ok(Self {
            solver,
            theta,
            d,
            d_real,
            c1,
            base,
            bulk_moments,
            droplet_ball,
        })
    }

    pub fn omega(&self) -> f64 {
        self.solver.omega
    }

    pub fn colloc(&self) -> &CollocationSet {
        &self.solver.colloc
    }

    fn check_droplet(&self, droplet: &Droplet) -> Result<()> {
        if let Some(p) = self.colloc().points.iter().find(|p| droplet.contains(p)) {
            return Err(Error::Droplet {
                center: droplet.center.into(),
                eps: droplet.eps,
                reason: format!("collocation point {:?} lies inside the droplet", [p.x, p.y, p.z]),
            });
        }
        Ok(())
    }

    /// `J_D[i][ℓ]` over `∂D_z`.
    pub fn droplet_surface_matrix(&self, droplet: &Droplet) -> Result<DMatrix<C64>> {
        self.check_droplet(droplet)?;
        let surface = BoundarySurface::new(self.solver.orders.droplet_sphere, droplet.center, droplet.eps);
        let pts = &self.colloc().points;
        surface.matrix(pts, pts, self.omega()).map_err(|e| Error::Droplet {
            center: droplet.center.into(),
            eps: droplet.eps,
            reason: e.to_string(),
        })
    }

    fn c_eps(&self, droplet: &Droplet, contrast: DropletContrast) -> DMatrix<C64> {
        let n = self.colloc().len();
        match contrast {
            DropletContrast::Physical => &self.d - DMatrix::<C64>::identity(n, n) * C64::new(droplet.inv_k1(), 0.0),
            DropletContrast::Neutralized => DMatrix::zeros(n, n),
        }
    }

    pub fn parts(&self, droplet: &Droplet, contrast: DropletContrast) -> Result<PerturbedParts> {
        Ok(PerturbedParts {
            d: self.d.clone(),
            c1: self.c1.clone(),
            c_eps: self.c_eps(droplet, contrast),
            j_droplet: self.droplet_surface_matrix(droplet)?,
        })
    }

    /// Full system matrix `F + ω²(F̂ - J_B)C¹ + ω² J_D C^ε`.
    pub fn matrix(&self, droplet: &Droplet, contrast: DropletContrast) -> Result<DMatrix<C64>> {
        self.check_droplet(droplet)?;
        if contrast == DropletContrast::Neutralized {
            return Ok(self.base.clone());
        }
        let jd = self.droplet_surface_matrix(droplet)?;
        let w2 = self.omega() * self.omega();
        // J_D C^ε = J_D D - J_D / k₁
        let jdd = match &self.d_real {
            Some(d) => linalg::cmul_real(&jd, d),
            None => linalg::cmul(&jd, &self.d),
        };
        let inv_k1 = droplet.inv_k1();
        let mut a = self.base.clone();
        for ((a, x), j) in a.iter_mut().zip(jdd.iter()).zip(jd.iter()) {
            *a += (x - j * inv_k1) * w2;
        }
        Ok(a)
    }

    /// Solve with right-hand side `e^{iωx·θ}` or an override.
    pub fn solve(
        &self,
        droplet: &Droplet,
        contrast: DropletContrast,
        rhs_override: Option<&dyn Fn(&Vec3) -> C64>,
    ) -> Result<DrmSolution> {
        let a = self.matrix(droplet, contrast)?;
        self.solve_with_matrix(a, rhs_override).map_err(|e| Error::AtPosition {
            center: droplet.center.into(),
            source: Box::new(e),
        })
    }

    /// Solve an already assembled system on this collocation set.
    pub fn solve_with_matrix(
        &self,
        a: DMatrix<C64>,
        rhs_override: Option<&dyn Fn(&Vec3) -> C64>,
    ) -> Result<DrmSolution> {
        let rhs = DVector::from_iterator(
            self.colloc().len(),
            self.colloc().points.iter().map(|x| match rhs_override {
                Some(g) => g(x),
                None => plane_wave(self.omega(), &self.theta, x),
            }),
        );
        let coeffs = linalg::solve_checked(&a, &rhs, 1e-10)?;
        Ok(DrmSolution {
            collocation: self.colloc().clone(),
            coeffs,
            omega: self.omega(),
            theta: self.theta,
        })
    }

    /// Back-scattered far field `u_z^∞(-θ)`.
    pub fn far_field(&self, sol: &DrmSolution, droplet: &Droplet, contrast: DropletContrast) -> C64 {
        let w = self.omega();
        let bulk = sol.coeffs.dot(&self.bulk_moments);
        let drop = match contrast {
            DropletContrast::Neutralized => C64::new(0.0, 0.0),
            DropletContrast::Physical => {
                let medium = &self.solver.medium;
                let eps3 = droplet.eps.powi(3);
                let inv_k1 = droplet.inv_k1();
                self.droplet_ball
                    .points
                    .iter()
                    .zip(&self.droplet_ball.weights)
                    .map(|(p, &wt)| {
                        let y = droplet.center + p * droplet.eps;
                        let weight = (medium.inv_k0(&y) - inv_k1) * plane_wave(w, &self.theta, &y);
                        weight * sol.expansion(&y) * (wt * eps3)
                    })
                    .sum()
            }
        };
        w * w / (4.0 * PI) * (bulk - drop)
    }
}

pub fn assemble_perturbed(
    medium: &MediumField,
    droplet: &Droplet,
    colloc: &CollocationSet,
    omega: f64,
    contrast: DropletContrast,
    orders: QuadOrders,
) -> Result<DMatrix<C64>> {
    PerturbedBase::new(medium, colloc, omega, &super::default_theta(), orders)?.matrix(droplet, contrast)
}

#[allow(clippy::too_many_arguments)]
pub fn solve_perturbed(
    medium: &MediumField,
    droplet: &Droplet,
    colloc: &CollocationSet,
    omega: f64,
    theta: &Vec3,
    contrast: DropletContrast,
    rhs_override: Option<&dyn Fn(&Vec3) -> C64>,
    orders: QuadOrders,
) -> Result<DrmSolution> {
    PerturbedBase::new(medium, colloc, omega, theta, orders)?.solve(droplet, contrast, rhs_override)
}

/// Back-scattered far field of a perturbed solution, with both volume
/// integrals taken by ball rules.
pub fn far_field_perturbed(
    sol: &DrmSolution,
    droplet: &Droplet,
    medium: &MediumField,
    orders: QuadOrders,
) -> C64 {
    let w = sol.omega;
    let theta = sol.theta;
    let bulk_rule = ball_rule(orders.ball_radial, orders.ball_angular, Vec3::zeros(), 1.0);
    let drop_rule = ball_rule(orders.droplet_ball_radial, orders.droplet_ball_angular, droplet.center, droplet.eps);
    let pts = &sol.collocation.points;
    let bulk = bulk_rule.integrate(|y| plane_wave(w, &theta, y) * medium.contrast(y) * expand(pts, &sol.coeffs, y));
    let drop = drop_rule.integrate(|y| {
        plane_wave(w, &theta, y) * (medium.inv_k0(y) - droplet.inv_k1()) * expand(pts, &sol.coeffs, y)
    });
    w * w / (4.0 * PI) * (bulk - drop)
}
