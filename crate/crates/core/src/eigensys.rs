//! Eigensystem of the Newtonian volume potential on the unit ball.
//!
//! The eigenvalues are `λₙ = μₙ⁻²` where `μₙ` is the n-th positive root of
//! `sin μ + 2μ cos μ = 0`. The resonance frequency of a droplet with
//! normalized bulk `k̄₁` is `ωₙ² = k̄₁ λₙ⁻¹`, and the droplet-to-far-field
//! coupling is governed by `∫_B eₙ dx = 6√(2π) μₙ^(-5/2) sin μₙ`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// One Newtonian-potential eigen triple plus the eigenfunction integral.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EigenMode {
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
    pub omega_sq: f64,
    pub e_integral: f64,
}

impl EigenMode {
    /// Resonance frequency `ωₙ = √(ωₙ²)`.
    pub fn omega(&self) -> f64 {
        self.omega_sq.sqrt()
    }

    /// `ωₙ² = k̄₁ / λₙ` for a droplet of normalized bulk `k̄₁`.
    pub fn omega_sq_for(&self, kbar1: f64) -> f64 {
        kbar1 / self.lambda
    }
}

/// `sin μ + 2μ cos μ`, whose positive roots are the `μₙ`.
pub fn transcendental(mu: f64) -> f64 {
    mu.sin() + 2.0 * mu * mu.cos()
}

fn transcendental_deriv(mu: f64) -> f64 {
    3.0 * mu.cos() - 2.0 * mu * mu.sin()
}

/// Bracket `((n - ½)π, nπ)` that contains exactly one root.
pub fn root_bracket(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (nf * PI - FRAC_PI_2, nf * PI)
}

/// The n-th positive root of `sin μ + 2μ cos μ = 0`.
///
/// Bisection on the analytic bracket, finished with Newton steps that are
/// rejected whenever they leave the current bracket.
pub fn mu_root(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("mode index must be >= 1"));
    }
    let (mut lo, mut hi) = root_bracket(n);
    let f_lo = transcendental(lo);
    let f_hi = transcendental(hi);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { n, f_lo, f_hi });
    }
    let lo_positive = f_lo > 0.0;

    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if (transcendental(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut mu = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = transcendental(mu);
        if f == 0.0 {
            break;
        }
        if (f > 0.0) == lo_positive {
            lo = mu;
        } else {
            hi = mu;
        }
        let step = f / transcendental_deriv(mu);
        if step.abs() < 1e-16 * mu || hi - lo < 4.0 * f64::EPSILON * mu {
            break;
        }
        let candidate = mu - step;
        mu = if candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(mu)
}

/// `∫_B eₙ(x) dx` from the root `μₙ`.
pub fn eigenfunction_integral(mu: f64) -> f64 {
    6.0 * (2.0 * PI).sqrt() * mu.powf(-2.5) * mu.sin()
}

pub fn eigen_mode(n: usize) -> Result<EigenMode> {
    let mu = mu_root(n)?;
    let lambda = mu.powi(-2);
    Ok(EigenMode {
        n,
        mu,
        lambda,
        omega_sq: 1.0 / lambda,
        e_integral: eigenfunction_integral(mu),
    })
}

/// First `n_max` modes, in order.
pub fn eigen_table(n_max: usize) -> Result<Vec<EigenMode>> {
    (1..=n_max).map(eigen_mode).collect()
}

/// Far-field contrast constant
/// `Cₙ = (1/4π) λₙ⁻² (∫_B eₙ)² ε^(1-h)` for a droplet of radius `eps`
/// driven at the n-th resonance with detuning exponent `h`.
pub fn contrast_constant(n: usize, eps: f64, h: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(h > 0.5 && h < 1.0) {
        return Err(Error::domain(format!("h must lie in (1/2, 1), got {h}")));
    }
    let mode = eigen_mode(n)?;
    Ok(mode.lambda.powi(-2) * mode.e_integral.powi(2) * eps.powf(1.0 - h) / (4.0 * PI))
}

/// Resonance frequency `ω₁` used throughout the inversion pipeline.
pub fn omega_1() -> f64 {
    // the first bracket is fixed and valid, so this cannot fail
    eigen_mode(1).map(|m| m.omega()).unwrap_or(f64::NAN)
}
