use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Geometry, ScalarGrid3};
use crate::C64;

/// End conditions of the per-axis cubic spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplineEnd {
    /// Zero second derivative at both ends.
    #[default]
    Natural,
    /// Continuous third derivative at the second and second-to-last knots.
    /// Reproduces cubics exactly.
    NotAKnot,
}

/// Linear map from `n` uniform samples to the cubic spline through them,
/// evaluated at `m` uniformly spaced points over the same extent.
pub fn spline_matrix(n: usize, m: usize, end: SplineEnd) -> Result<DMatrix<f64>> {
    if n < 4 {
        return Err(Error::Grid(format!("cubic spline needs at least 4 samples, got {n}")));
    }
    if m < 2 {
        return Err(Error::Grid(format!("cannot resample onto {m} points")));
    }
    // Unit spacing; second derivatives M solve A M = B y.
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 1..n - 1 {
        a[(i, i - 1)] = 1.0;
        a[(i, i)] = 4.0;
        a[(i, i + 1)] = 1.0;
        b[(i, i - 1)] = 6.0;
        b[(i, i)] = -12.0;
        b[(i, i + 1)] = 6.0;
    }
    match end {
        SplineEnd::Natural => {
            a[(0, 0)] = 1.0;
            a[(n - 1, n - 1)] = 1.0;
        }
        SplineEnd::NotAKnot => {
            a[(0, 0)] = 1.0;
            a[(0, 1)] = -2.0;
            a[(0, 2)] = 1.0;
            a[(n - 1, n - 1)] = 1.0;
            a[(n - 1, n - 2)] = -2.0;
            a[(n - 1, n - 3)] = 1.0;
        }
    }
    let second = a.lu().solve(&b).ok_or_else(|| Error::Singular("spline system".into()))?;

    let scale = (n - 1) as f64 / (m - 1) as f64;
    let mut out = DMatrix::<f64>::zeros(m, n);
    for r in 0..m {
        let x = r as f64 * scale;
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        if t.abs() < 1e-12 {
            out[(r, i)] = 1.0;
            continue;
        }
        if (1.0 - t).abs() < 1e-12 {
            out[(r, i + 1)] = 1.0;
            continue;
        }
        let s = 1.0 - t;
        let (ci, cj) = ((s * s * s - s) / 6.0, (t * t * t - t) / 6.0);
        for c in 0..n {
            out[(r, c)] = ci * second[(i, c)] + cj * second[(i + 1, c)];
        }
        out[(r, i)] += s;
        out[(r, i + 1)] += t;
    }
    Ok(out)
}

/// Number of refined points for `factor`: `(dims − 1)·factor + 1`, which must
/// be an integer up to rounding.
pub fn refined_len(dims: usize, factor: f64) -> Result<usize> {
    if !(factor >= 1.0 && factor.is_finite()) {
        return Err(Error::domain(format!("refinement factor {factor} must be at least 1")));
    }
    let target = (dims - 1) as f64 * factor + 1.0;
    let m = target.round();
    if (target - m).abs() > 1e-6 * target {
        return Err(Error::domain(format!(
            "factor {factor} maps {dims} points to {target}, which is not a whole number"
        )));
    }
    Ok(m as usize)
}

/// Separable cubic-spline resampling onto `dims` points per axis over the
/// same extent. Axes with a single point are left alone.
pub fn refine_to(xi: &ScalarGrid3, dims: [usize; 3], end: SplineEnd) -> Result<ScalarGrid3> {
    let mut cur = xi.clone();
    for axis in 0..3 {
        let n = cur.dims[axis];
        if n == 1 && dims[axis] == 1 {
            continue;
        }
        cur = resample_axis(&cur, axis, dims[axis], end)?;
    }
    Ok(cur)
}

/// `(dims − 1)·factor + 1` points per axis (single-point axes untouched).
pub fn refine(xi: &ScalarGrid3, factor: f64, end: SplineEnd) -> Result<ScalarGrid3> {
    let mut dims = xi.dims;
    for d in dims.iter_mut() {
        if *d > 1 {
            *d = refined_len(*d, factor)?;
        }
    }
    refine_to(xi, dims, end)
}

fn resample_axis(g: &ScalarGrid3, axis: usize, m: usize, end: SplineEnd) -> Result<ScalarGrid3> {
    let n = g.dims[axis];
    let w = spline_matrix(n, m, end)?;
    let mut dims = g.dims;
    dims[axis] = m;
    let mut spacing = g.spacing;
    spacing[axis] = g.spacing[axis] * (n - 1) as f64 / (m - 1) as f64;
    let geo = Geometry::new(g.origin, spacing, dims)?;
    let src = g.geometry();
    let mut values = vec![C64::new(0.0, 0.0); geo.len()];
    for (slot, v) in values.iter_mut().enumerate() {
        let mut idx = geo.unravel(slot);
        let r = idx[axis];
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..n {
            let wc = w[(r, c)];
            if wc != 0.0 {
                idx[axis] = c;
                acc += g.values[src.index(idx[0], idx[1], idx[2])] * wc;
            }
        }
        *v = acc;
    }
    ScalarGrid3::new(geo, values)
}
