use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{C64, Vec3};

/// Named presets for the background bulk modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediumPreset {
    Homogeneous,
    /// `k₀ = 2 / (1 + |x|²)`
    Rational2,
    /// `k₀ = (|x|² + i b·x + 3) / (4|x|² + i b·x)` with `b = (1, 2, 3)`
    ComplexRational,
    Custom,
}

type Eval = Arc<dyn Fn(&Vec3) -> C64 + Send + Sync>;

/// Complex bulk modulus `k₀(x)` on the unit ball.
#[derive(Clone)]
pub struct MediumField {
    pub preset: MediumPreset,
    eval: Eval,
}

impl fmt::Debug for MediumField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MediumField").field("preset", &self.preset).finish()
    }
}

pub const COMPLEX_RATIONAL_B: [f64; 3] = [1.0, 2.0, 3.0];

impl MediumField {
    pub fn homogeneous() -> Self {
        Self {
            preset: MediumPreset::Homogeneous,
            eval: Arc::new(|_| C64::new(1.0, 0.0)),
        }
    }

    pub fn rational2() -> Self {
        Self {
            preset: MediumPreset::Rational2,
            eval: Arc::new(|x| C64::new(2.0 / (1.0 + x.norm_squared()), 0.0)),
        }
    }

    pub fn complex_rational() -> Self {
        let b = Vec3::from(COMPLEX_RATIONAL_B);
        Self {
            preset: MediumPreset::ComplexRational,
            eval: Arc::new(move |x| {
                let r2 = x.norm_squared();
                let bx = b.dot(x);
                C64::new(r2 + 3.0, bx) / C64::new(4.0 * r2, bx)
            }),
        }
    }

    pub fn custom(f: impl Fn(&Vec3) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            preset: MediumPreset::Custom,
            eval: Arc::new(f),
        }
    }

    pub fn from_preset(preset: MediumPreset) -> Option<Self> {
        match preset {
            MediumPreset::Homogeneous => Some(Self::homogeneous()),
            MediumPreset::Rational2 => Some(Self::rational2()),
            MediumPreset::ComplexRational => Some(Self::complex_rational()),
            MediumPreset::Custom => None,
        }
    }

    pub fn k0(&self, x: &Vec3) -> C64 {
        (self.eval)(x)
    }

    pub fn inv_k0(&self, x: &Vec3) -> C64 {
        1.0 / self.k0(x)
    }

    /// Contrast `1/k₀(x) - 1`.
    pub fn contrast(&self, x: &Vec3) -> C64 {
        self.inv_k0(x) - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let m = MediumField::rational2();
        assert_eq!(m.k0(&Vec3::zeros()), C64::new(2.0, 0.0));
        assert!((m.k0(&Vec3::new(1.0, 0.0, 0.0)).re - 1.0).abs() < 1e-15);
        assert_eq!(MediumField::homogeneous().contrast(&Vec3::new(0.3, 0.1, 0.2)), C64::new(0.0, 0.0));
        let c = MediumField::complex_rational();
        let x = Vec3::new(0.1, 0.2, 0.3);
        let r2 = x.norm_squared();
        let bx = 0.1 + 0.4 + 0.9;
        let expect = C64::new(r2 + 3.0, bx) / C64::new(4.0 * r2, bx);
        assert!((c.k0(&x) - expect).norm() < 1e-15);
    }
}
