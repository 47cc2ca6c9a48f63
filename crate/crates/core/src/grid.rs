//! Regular axis-aligned 3-D grids and the `XIG1` binary format.
//!
//! Values are stored row-major with the third axis fastest. An `XIG1` file is
//! the magic `XIG1`, then little-endian `3×u32` dims, `3×f64` origin,
//! `3×f64` spacing, a `u8` flag (0 real, 1 complex) and the values as `f64`
//! (`re, im` pairs when complex).

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::{Vec3, C64};

const MAGIC: &[u8; 4] = b"XIG1";

/// Sample value stored in a grid file.
pub trait GridValue: Copy + Send + Sync + 'static {
    const FLAG: u8;
    fn write_to(&self, out: &mut Vec<u8>);
    fn read_from(bytes: &[u8]) -> Self;
    fn width() -> usize {
        8 * (Self::FLAG as usize + 1)
    }
}

impl GridValue for f64 {
    const FLAG: u8 = 0;
    fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_from(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}

impl GridValue for C64 {
    const FLAG: u8 = 1;
    fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.re.to_le_bytes());
        out.extend_from_slice(&self.im.to_le_bytes());
    }
    fn read_from(bytes: &[u8]) -> Self {
        C64::new(f64::read_from(bytes), f64::read_from(&bytes[8..]))
    }
}

/// Field sampled at `origin + (i, j, k) ∘ spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3<T> {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub dims: [usize; 3],
    pub values: Vec<T>,
}

/// Complex field such as the contrast data ξ.
pub type ScalarGrid3 = Grid3<C64>;
pub type RealGrid3 = Grid3<f64>;

/// Geometry shared by every grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub dims: [usize; 3],
}

impl Geometry {
    pub fn new(origin: [f64; 3], spacing: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            if dims[a] < 1 {
                return Err(Error::Grid(format!("axis {a} has no points")));
            }
            if !(spacing[a] > 0.0 && spacing[a].is_finite()) {
                return Err(Error::Grid(format!("axis {a} spacing {} must be positive", spacing[a])));
            }
            if !origin[a].is_finite() {
                return Err(Error::Grid(format!("axis {a} origin is not finite")));
            }
        }
        Ok(Self { origin, spacing, dims })
    }

    /// Grid with `dims[a]` points spanning `[lo[a], hi[a]]`.
    pub fn spanning(lo: [f64; 3], hi: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let mut spacing = [1.0; 3];
        for a in 0..3 {
            if dims[a] > 1 {
                spacing[a] = (hi[a] - lo[a]) / (dims[a] - 1) as f64;
            }
        }
        Self::new(lo, spacing, dims)
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let ij = idx / self.dims[2];
        [ij / self.dims[1], ij % self.dims[1], k]
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    pub fn point(&self, idx: [usize; 3]) -> Vec3 {
        Vec3::new(self.coord(0, idx[0]), self.coord(1, idx[1]), self.coord(2, idx[2]))
    }

    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |n| self.point(self.unravel(n)))
    }

    /// Far corner `origin + (dims − 1)·spacing`.
    pub fn upper(&self) -> [f64; 3] {
        std::array::from_fn(|a| self.coord(a, self.dims[a] - 1))
    }

    /// Sub-grid `lo[a] .. lo[a] + dims[a]` in index space.
    pub fn crop(&self, lo: [usize; 3], dims: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            if dims[a] == 0 || lo[a] + dims[a] > self.dims[a] {
                return Err(Error::Grid(format!(
                    "crop {}..{} outside axis {a} of length {}",
                    lo[a],
                    lo[a] + dims[a],
                    self.dims[a]
                )));
            }
        }
        Self::new(std::array::from_fn(|a| self.coord(a, lo[a])), self.spacing, dims)
    }

    /// Nearest index to `x` along `axis`, if within half a cell of a node.
    pub fn nearest(&self, axis: usize, x: f64) -> Option<usize> {
        let t = (x - self.origin[axis]) / self.spacing[axis];
        let i = t.round();
        (i >= 0.0 && (i as usize) < self.dims[axis] && (t - i).abs() < 0.5).then_some(i as usize)
    }
}

impl<T: GridValue> Grid3<T> {
    pub fn new(geometry: Geometry, values: Vec<T>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::Grid(format!(
                "{} values for dims {:?} ({} expected)",
                values.len(),
                geometry.dims,
                geometry.len()
            )));
        }
        let Geometry { origin, spacing, dims } = geometry;
        Ok(Self {
            origin,
            spacing,
            dims,
            values,
        })
    }

    pub fn from_fn(geometry: Geometry, f: impl Fn(&Vec3) -> T) -> Self {
        let values = geometry.points().map(|x| f(&x)).collect();
        Self::new(geometry, values).expect("value count matches geometry")
    }

    pub fn geometry(&self) -> Geometry {
        Geometry {
            origin: self.origin,
            spacing: self.spacing,
            dims: self.dims,
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.values[self.geometry().index(i, j, k)]
    }

    pub fn map<U: GridValue>(&self, f: impl Fn(T) -> U) -> Grid3<U> {
        Grid3 {
            origin: self.origin,
            spacing: self.spacing,
            dims: self.dims,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Values of the sub-grid described by `crop` (which must come from
    /// [`Geometry::crop`] on this grid).
    pub fn restrict(&self, crop: &Geometry) -> Result<Self> {
        let g = self.geometry();
        let mut lo = [0usize; 3];
        for a in 0..3 {
            lo[a] = g
                .nearest(a, crop.origin[a])
                .filter(|&i| i + crop.dims[a] <= g.dims[a])
                .ok_or_else(|| Error::Grid(format!("axis {a} of the crop is not aligned with this grid")))?;
        }
        let mut values = Vec::with_capacity(crop.len());
        for i in 0..crop.dims[0] {
            for j in 0..crop.dims[1] {
                let start = g.index(lo[0] + i, lo[1] + j, lo[2]);
                values.extend_from_slice(&self.values[start..start + crop.dims[2]]);
            }
        }
        Grid3::new(*crop, values)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(61 + self.values.len() * T::width());
        out.extend_from_slice(MAGIC);
        for d in self.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in self.origin.iter().chain(&self.spacing) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(T::FLAG);
        for v in &self.values {
            v.write_to(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (geometry, flag, body) = parse_header(bytes)?;
        if flag != T::FLAG {
            return Err(Error::Format(format!("value flag {flag}, expected {}", T::FLAG)));
        }
        let w = T::width();
        if body.len() != geometry.len() * w {
            return Err(Error::Format(format!(
                "payload of {} bytes, expected {} for dims {:?}",
                body.len(),
                geometry.len() * w,
                geometry.dims
            )));
        }
        Grid3::new(geometry, body.chunks_exact(w).map(T::read_from).collect())
    }

    /// Writes to a fresh path; existing files are never overwritten.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_file(path)?)
    }
}

impl ScalarGrid3 {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn re(&self) -> RealGrid3 {
        self.map(|v| v.re)
    }

    pub fn im(&self) -> RealGrid3 {
        self.map(|v| v.im)
    }
}

/// A grid file whose value type is only known after reading the header.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGrid {
    Real(RealGrid3),
    Complex(ScalarGrid3),
}

impl AnyGrid {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let (_, flag, _) = parse_header(&bytes)?;
        match flag {
            0 => RealGrid3::from_bytes(&bytes).map(AnyGrid::Real),
            _ => ScalarGrid3::from_bytes(&bytes).map(AnyGrid::Complex),
        }
    }

    /// Complex view (real grids get a zero imaginary part).
    pub fn into_complex(self) -> ScalarGrid3 {
        match self {
            AnyGrid::Real(g) => g.map(|v| C64::new(v, 0.0)),
            AnyGrid::Complex(g) => g,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

fn parse_header(bytes: &[u8]) -> Result<(Geometry, u8, &[u8])> {
    const HEADER: usize = 4 + 12 + 48 + 1;
    if bytes.len() < HEADER || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing XIG1 header".into()));
    }
    let u = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let f = |o: usize| f64::read_from(&bytes[o..]);
    let dims = [u(4), u(8), u(12)];
    let origin = [f(16), f(24), f(32)];
    let spacing = [f(40), f(48), f(56)];
    let flag = bytes[64];
    if flag > 1 {
        return Err(Error::Format(format!("unknown value flag {flag}")));
    }
    let geometry = Geometry::new(origin, spacing, dims).map_err(|e| Error::Format(e.to_string()))?;
    Ok((geometry, flag, &bytes[HEADER..]))
}
