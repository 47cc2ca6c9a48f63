use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::MediumField;
use crate::grid::{Geometry, RealGrid3, ScalarGrid3};
use crate::mollify::grad_laplace;
use crate::C64;

/// Relative floor below which `|ξ|` is treated as zero.
pub const DEFAULT_XI_FLOOR: f64 = 1e-14;

/// Reconstructed bulk modulus on the δ-interior of the data grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// `Re(1/q)` where `q` estimates `1/k₀`; NaN at invalid nodes.
    pub k0_num: RealGrid3,
    /// `|Im q|`, a consistency diagnostic; NaN at invalid nodes.
    pub k0_imag_residual: RealGrid3,
    pub valid: Vec<bool>,
}

impl Reconstruction {
    pub fn geometry(&self) -> Geometry {
        self.k0_num.geometry()
    }

    pub fn valid_fraction(&self) -> f64 {
        self.valid.iter().filter(|v| **v).count() as f64 / self.valid.len() as f64
    }
}

/// `1/k₀ ≈ −ω⁻² (Δξ^δ/(2ξ) − (∇ξ^δ·∇ξ^δ)/(4ξ²))` on the δ-interior.
///
/// The gradient is squared component-wise (no conjugation): the formula is
/// `−ω⁻² Δ√ξ/√ξ` and is exactly invariant under `ξ → cξ`.
pub fn reconstruct_k0(xi: &ScalarGrid3, delta: f64, omega: f64, floor: f64) -> Result<Reconstruction> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("frequency {omega} must be positive")));
    }
    let d = grad_laplace(xi, delta)?;
    let inner = d.geometry();
    let centre = xi.restrict(&inner)?;
    let cutoff = floor * xi.max_abs();
    let w2 = omega * omega;
    let mut k0 = Vec::with_capacity(inner.len());
    let mut imag = Vec::with_capacity(inner.len());
    let mut valid = Vec::with_capacity(inner.len());
    for n in 0..inner.len() {
        let x = centre.values[n];
        let g2: C64 = (0..3).map(|a| d.grad[a].values[n] * d.grad[a].values[n]).sum();
        let q = -(d.laplacian.values[n] / (2.0 * x) - g2 / (4.0 * x * x)) / w2;
        let ok = x.norm() > cutoff && x.norm() > 0.0 && q.norm() > 0.0 && q.is_finite();
        valid.push(ok);
        k0.push(if ok { q.inv().re } else { f64::NAN });
        imag.push(if ok { q.im.abs() } else { f64::NAN });
    }
    Ok(Reconstruction {
        k0_num: RealGrid3::new(inner, k0)?,
        k0_imag_residual: RealGrid3::new(inner, imag)?,
        valid,
    })
}

/// Errors against the exact modulus over the valid nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub gre: f64,
    pub pre_max: f64,
    pub pre_mean: f64,
    pub n_valid: usize,
    pub n_total: usize,
}

/// GRE (ℓ²-relative) and the pointwise relative error grid (NaN where
/// invalid).
pub fn metrics(rec: &Reconstruction, exact: &RealGrid3) -> Result<(Metrics, RealGrid3)> {
    if exact.geometry() != rec.geometry() {
        return Err(Error::Grid("exact and reconstructed grids differ in geometry".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut pre = Vec::with_capacity(exact.values.len());
    let (mut pmax, mut psum, mut count) = (0.0f64, 0.0, 0usize);
    for ((e, k), ok) in exact.values.iter().zip(&rec.k0_num.values).zip(&rec.valid) {
        if *ok {
            let diff = (e - k).abs();
            num += diff * diff;
            den += e * e;
            let p = diff / e.abs();
            pmax = pmax.max(p);
            psum += p;
            count += 1;
            pre.push(p);
        } else {
            pre.push(f64::NAN);
        }
    }
    if count == 0 || den == 0.0 {
        return Err(Error::Grid("no valid nodes to compare".into()));
    }
    let m = Metrics {
        gre: (num / den).sqrt(),
        pre_max: pmax,
        pre_mean: psum / count as f64,
        n_valid: count,
        n_total: pre.len(),
    };
    Ok((m, RealGrid3::new(exact.geometry(), pre)?))
}

/// Real part of the medium's `k₀` sampled on a geometry.
pub fn exact_k0(medium: &MediumField, geometry: Geometry) -> RealGrid3 {
    RealGrid3::from_fn(geometry, |x| medium.k0(x).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensys::omega_1;
    use crate::forward::default_theta;
    use crate::Vec3;

    fn plane_wave_xi(freq: f64, c: C64) -> ScalarGrid3 {
        let g = Geometry::spanning([-0.1, -0.1, 0.05], [0.1, 0.1, 0.2], [81, 81, 61]).unwrap();
        let theta = default_theta();
        ScalarGrid3::from_fn(g, |z: &Vec3| c * C64::from_polar(1.0, 2.0 * freq * theta.dot(z)))
    }

    #[test]
    fn plane_wave_squared_gives_unit_modulus() {
        let w = omega_1();
        let rec = reconstruct_k0(&plane_wave_xi(w, C64::new(-7.2, 0.3)), 0.03, w, DEFAULT_XI_FLOOR).unwrap();
        assert!(rec.valid.iter().all(|v| *v));
        let worst = rec.k0_num.values.iter().map(|k| (k - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 5e-2, "{worst}");
        let half = reconstruct_k0(&plane_wave_xi(w * 2f64.sqrt(), C64::new(1.0, 0.0)), 0.03, w, DEFAULT_XI_FLOOR)
            .unwrap();
        let worst = half.k0_num.values.iter().map(|k| (k - 0.5).abs()).fold(0.0, f64::max);
        assert!(worst < 5e-2, "{worst}");
    }

    #[test]
    fn invariant_under_scaling() {
        let w = omega_1();
        let a = reconstruct_k0(&plane_wave_xi(w, C64::new(1.0, 0.0)), 0.03, w, DEFAULT_XI_FLOOR).unwrap();
        let b = reconstruct_k0(&plane_wave_xi(w, C64::new(-3e-4, 2e-3)), 0.03, w, DEFAULT_XI_FLOOR).unwrap();
        for (x, y) in a.k0_num.values.iter().zip(&b.k0_num.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_data_is_flagged() {
        let mut xi = plane_wave_xi(omega_1(), C64::new(1.0, 0.0));
        let g = xi.geometry();
        let n = g.index(40, 40, 30);
        xi.values[n] = C64::new(0.0, 0.0);
        let rec = reconstruct_k0(&xi, 0.03, omega_1(), DEFAULT_XI_FLOOR).unwrap();
        let inner = rec.geometry();
        let k = inner.index(40 - 12, 40 - 12, 30 - 12);
        assert!(!rec.valid[k] && rec.k0_num.values[k].is_nan());
        assert!(rec.valid_fraction() < 1.0);
    }

    #[test]
    fn metric_homogeneity() {
        let g = Geometry::new([0.0; 3], [0.1; 3], [3, 3, 3]).unwrap();
        let exact = RealGrid3::from_fn(g, |x| 2.0 / (1.0 + x.norm_squared()));
        let rec = |f: f64| Reconstruction {
            k0_num: exact.map(|v| v * f),
            k0_imag_residual: exact.map(|_| 0.0),
            valid: vec![true; 27],
        };
        let (m, pre) = metrics(&rec(1.0), &exact).unwrap();
        assert_eq!(m.gre, 0.0);
        assert!(pre.values.iter().all(|p| *p == 0.0));
        let (m, pre) = metrics(&rec(1.1), &exact).unwrap();
        assert!((m.gre - 0.1).abs() < 1e-14);
        assert!(pre.values.iter().all(|p| (p - 0.1).abs() < 1e-14));
        let mut none = rec(1.0);
        none.valid = vec![false; 27];
        assert!(metrics(&none, &exact).is_err());
    }
}
