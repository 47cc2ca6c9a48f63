use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Droplet;
use crate::error::{Error, Result};
use crate::Vec3;

/// Default radius of the ball the collocation points are drawn from. It keeps
/// every point at least the near-singular threshold away from `∂B(0,1)`.
pub const DEFAULT_SAMPLING_RADIUS: f64 = 0.95;

/// Region kept free of collocation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exclusion {
    /// Ball around a droplet centre.
    Ball { center: Vec3, radius: f64 },
    /// Axis-aligned box, typically a scan region dilated by the droplet size.
    Box { min: Vec3, max: Vec3 },
}

impl Exclusion {
    /// Ball of twice the droplet radius, so that the droplet boundary rule sees
    /// no collocation point closer than one radius.
    pub fn around(droplet: &Droplet) -> Self {
        Exclusion::Ball {
            center: droplet.center,
            radius: 2.0 * droplet.eps,
        }
    }

    /// Box containing every droplet position of a scan, dilated so each
    /// droplet keeps the same clearance as [`Exclusion::around`].
    pub fn scan_box(min: Vec3, max: Vec3, eps: f64) -> Self {
        let pad = Vec3::repeat(2.0 * eps);
        Exclusion::Box {
            min: min - pad,
            max: max + pad,
        }
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        match self {
            Exclusion::Ball { center, radius } => (x - center).norm() <= *radius,
            Exclusion::Box { min, max } => (0..3).all(|k| x[k] >= min[k] && x[k] <= max[k]),
        }
    }
}

/// Collocation points, which double as the RBF centres.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    pub points: Vec<Vec3>,
}

impl CollocationSet {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("collocation set must not be empty"));
        }
        if let Some(p) = points.iter().find(|p| p.norm() >= 1.0) {
            return Err(Error::domain(format!("collocation point {p:?} outside the unit ball")));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Placement of collocation points: a Fibonacci shell on the sampling sphere
/// plus Halton points filling a slightly smaller ball. Concentrating part of
/// the set on the outer sphere keeps the `1 + r` interpolant from
/// extrapolating into the boundary layer.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Layout {
    /// Sampling radius; the shell sits here.
    pub radius: f64,
    /// Fraction of points placed on the shell.
    pub shell_fraction: f64,
    /// Interior points fill `B(0, interior_ratio · radius)`.
    pub interior_ratio: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            radius: DEFAULT_SAMPLING_RADIUS,
            shell_fraction: 0.4,
            interior_ratio: 0.9,
        }
    }
}

impl Layout {
    /// Plain Halton fill of `B(0, radius)` without a shell.
    pub fn uniform(radius: f64) -> Self {
        Self {
            radius,
            shell_fraction: 0.0,
            interior_ratio: 1.0,
        }
    }

    /// Thinner shell used around an injected droplet. The coefficient
    /// expansion of `1/k₀` interpolates better with more interior nodes.
    pub fn perturbed() -> Self {
        Self {
            shell_fraction: 0.25,
            ..Self::default()
        }
    }
}

/// Random rotation from three uniforms (Shoemake's quaternion method).
fn rotation(u: [f64; 3]) -> nalgebra::Rotation3<f64> {
    use std::f64::consts::TAU;
    let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
    let q = nalgebra::Quaternion::new(
        b * (TAU * u[2]).cos(),
        a * (TAU * u[1]).sin(),
        a * (TAU * u[1]).cos(),
        b * (TAU * u[2]).sin(),
    );
    nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

fn fibonacci_sphere(n: usize, radius: f64) -> impl Iterator<Item = Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n).map(move |k| {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
        let s = (1.0 - z * z).sqrt();
        let phi = golden * k as f64;
        Vec3::new(s * phi.cos(), s * phi.sin(), z) * radius
    })
}

/// Collocation points per `layout`, skipping any point inside an exclusion
/// region. The seed rotates the shell and shifts the Halton sequence
/// (Cranley–Patterson), so each seed gives a different but equally
/// well-spread set.
pub fn sample_collocation_with(n: usize, seed: u64, layout: &Layout, exclude: &[Exclusion]) -> Result<CollocationSet> {
    if n == 0 {
        return Err(Error::domain("collocation count must be >= 1"));
    }
    let radius = layout.radius;
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::domain(format!("sampling radius must lie in (0, 1), got {radius}")));
    }
    if !(0.0..1.0).contains(&layout.shell_fraction) || !(layout.interior_ratio > 0.0 && layout.interior_ratio <= 1.0) {
        return Err(Error::domain("shell fraction must lie in [0, 1) and interior ratio in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let rot = rotation([rng.gen(), rng.gen(), rng.gen()]);

    let n_shell = (layout.shell_fraction * n as f64).round() as usize;
    let mut points: Vec<Vec3> = fibonacci_sphere(n_shell, radius)
        .map(|p| rot * p)
        .filter(|p| !exclude.iter().any(|e| e.contains(p)))
        .collect();

    let inner = radius * layout.interior_ratio;
    let max_attempts = 200 * n + 10_000;
    let mut i = 1u64;
    while points.len() < n {
        if i as usize > max_attempts {
            return Err(Error::SamplingExhausted {
                attempts: max_attempts,
                accepted: points.len(),
            });
        }
        let u = [
            (radical_inverse(i, 2) + shift[0]).fract(),
            (radical_inverse(i, 3) + shift[1]).fract(),
            (radical_inverse(i, 5) + shift[2]).fract(),
        ];
        i += 1;
        let x = Vec3::new(2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, 2.0 * u[2] - 1.0) * inner;
        if x.norm() >= inner || exclude.iter().any(|e| e.contains(&x)) {
            continue;
        }
        points.push(x);
    }
    CollocationSet::new(points)
}

/// Uniform Halton fill of `B(0, radius)`.
pub fn sample_collocation_in(n: usize, seed: u64, radius: f64, exclude: &[Exclusion]) -> Result<CollocationSet> {
    sample_collocation_with(n, seed, &Layout::uniform(radius), exclude)
}

/// `n` collocation points with the default layout, keeping clear of
/// `exclude` when given.
pub fn sample_collocation(n: usize, seed: u64, exclude: Option<&Droplet>) -> Result<CollocationSet> {
    let ex: Vec<Exclusion> = exclude.map(Exclusion::around).into_iter().collect();
    sample_collocation_with(n, seed, &Layout::default(), &ex)
}
