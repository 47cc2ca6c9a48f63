//! Dense complex kernels built on real products, so the heavy lifting goes
//! through the cache-blocked real GEMM.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Condition-number threshold above which interpolation systems are refused.
pub const COND_LIMIT: f64 = 1e12;

pub(crate) fn split(a: &DMatrix<C64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

pub(crate) fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<C64> {
    re.zip_map(im, C64::new)
}

/// `a · b` for complex matrices.
pub fn cmul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// `a · b` for a complex `a` and real `b`.
pub fn cmul_real(a: &DMatrix<C64>, b: &DMatrix<f64>) -> DMatrix<C64> {
    let (ar, ai) = split(a);
    join(&(&ar * b), &(&ai * b))
}

/// 2-norm condition number of a real matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Refuse a real interpolation matrix whose condition exceeds [`COND_LIMIT`].
pub fn check_conditioning(a: &DMatrix<f64>, hint: &str) -> Result<()> {
    let cond = condition_number(a);
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(Error::IllConditioned {
            cond,
            hint: hint.to_string(),
        });
    }
    Ok(())
}

/// LU factorization with partial pivoting of a complex square matrix.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl ComplexLu {
    pub fn new(a: DMatrix<C64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::domain("LU needs a square matrix"));
        }
        let lu = a.lu();
        // a zero pivot means exact singularity
        let u = lu.u();
        if (0..u.nrows()).any(|i| u[(i, i)].norm() == 0.0 || !u[(i, i)].norm().is_finite()) {
            return Err(Error::Singular("zero pivot in LU factorization".into()));
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &DVector<C64>) -> Result<DVector<C64>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }

    pub fn solve_mat(&self, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }
}

/// Solve `a x = b` and verify the residual `‖a x - b‖ ≤ tol ‖b‖`.
pub fn solve_checked(a: &DMatrix<C64>, b: &DVector<C64>, tol: f64) -> Result<DVector<C64>> {
    let x = ComplexLu::new(a.clone())?.solve(b)?;
    let res = (a * &x - b).norm();
    let scale = b.norm();
    if res > tol * scale.max(f64::MIN_POSITIVE) && scale > 0.0 {
        return Err(Error::IllConditioned {
            cond: f64::NAN,
            hint: format!("collocation residual {res:e} exceeds {tol:e}·‖rhs‖"),
        });
    }
    Ok(x)
}
