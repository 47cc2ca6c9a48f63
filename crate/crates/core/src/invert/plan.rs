use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Geometry;

/// Droplet positions on the cube `[−half, half]³` with `n` points per axis,
/// optionally restricted to a slab of planes around one `x₃` slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CubePlan {
    pub half: f64,
    pub n: usize,
    /// `x₃` of the reported slice; `None` scans the whole cube.
    pub slice_x3: Option<f64>,
    /// Planes on each side of the slice. The mollified `∂²/∂x₃²` needs the
    /// refined slab to be wider than `2δ`.
    pub slab_half_planes: usize,
    /// Refinement factor so that `(n − 1)·factor + 1` points span each axis.
    pub refine_factor: f64,
}

impl Default for CubePlan {
    fn default() -> Self {
        Self {
            half: 0.25,
            n: 61,
            slice_x3: Some(0.125),
            slab_half_planes: 6,
            refine_factor: 10.0 / 3.0,
        }
    }
}

impl CubePlan {
    pub fn cube(&self) -> Result<Geometry> {
        if self.n < 4 {
            return Err(Error::domain(format!("{} points per axis is too few", self.n)));
        }
        Geometry::spanning([-self.half; 3], [self.half; 3], [self.n; 3])
    }

    /// Index of the slice plane along `x₃`.
    pub fn slice_index(&self) -> Result<Option<usize>> {
        let Some(x3) = self.slice_x3 else { return Ok(None) };
        let cube = self.cube()?;
        let k = cube
            .nearest(2, x3)
            .filter(|&k| (cube.coord(2, k) - x3).abs() < 1e-9)
            .ok_or_else(|| Error::domain(format!("x3 = {x3} is not a node of the scan grid")))?;
        Ok(Some(k))
    }

    /// Scanned droplet positions.
    pub fn scan_geometry(&self) -> Result<Geometry> {
        let cube = self.cube()?;
        match self.slice_index()? {
            None => Ok(cube),
            Some(k) => {
                let m = self.slab_half_planes;
                if k < m || k + m >= self.n {
                    return Err(Error::domain(format!(
                        "slab of {m} planes around plane {k} leaves the cube"
                    )));
                }
                cube.crop([0, 0, k - m], [self.n, self.n, 2 * m + 1])
            }
        }
    }

    /// Bounding box of the scan, used to keep collocation points away.
    pub fn region(&self) -> Result<[[f64; 3]; 2]> {
        let g = self.scan_geometry()?;
        Ok([g.origin, g.upper()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cube_nodes() {
        let plan = CubePlan::default();
        let cube = plan.cube().unwrap();
        assert!((cube.spacing[0] - 1.0 / 120.0).abs() < 1e-15);
        assert_eq!(plan.slice_index().unwrap(), Some(45));
        let slab = plan.scan_geometry().unwrap();
        assert_eq!(slab.dims, [61, 61, 13]);
        assert!((slab.coord(2, 6) - 0.125).abs() < 1e-12);
        let full = CubePlan { slice_x3: None, ..plan };
        assert_eq!(full.scan_geometry().unwrap().dims, [61; 3]);
        assert!(CubePlan { slice_x3: Some(0.124), ..plan }.slice_index().is_err());
        assert!(CubePlan { slice_x3: Some(0.24), ..plan }.scan_geometry().is_err());
    }
}
