//! Declarative run configuration.
//!
//! Configs are JSON with a strict schema: unknown keys are rejected and
//! every omitted key takes the value printed by `--print-config`. The
//! resolved config (defaults filled in) is what gets hashed and echoed into
//! every report, so re-running from an echo reproduces the artifacts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eigensys::eigen_mode;
use crate::error::{Error, Result};
use crate::forward::{Layout, MediumField, MediumPreset, QuadOrders};
use crate::invert::{CubePlan, DropletModel, DropletTemplate, Reference, ScanSettings, SplineEnd, DEFAULT_XI_FLOOR};
use crate::mollify::DEFAULT_DELTA;
use crate::{Vec3, C64};

/// Background medium: a preset, or for `custom` the real rational profile
/// `k₀(x) = (a₀ + a₂|x|²) / (b₀ + b₂|x|²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub preset: MediumPreset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<[f64; 4]>,
}

impl Default for MediumSpec {
    fn default() -> Self {
        Self {
            preset: MediumPreset::Rational2,
            rational: None,
        }
    }
}

impl MediumSpec {
    pub fn build(&self) -> Result<MediumField> {
        match (self.preset, self.rational) {
            (MediumPreset::Custom, Some([a0, a2, b0, b2])) => {
                // the denominator must stay away from zero on the closed ball
                let (lo, hi) = (b0, b0 + b2);
                if lo * hi <= 0.0 || !(a0.is_finite() && a2.is_finite()) {
                    return Err(Error::Domain(format!(
                        "custom medium denominator {b0} + {b2}|x|² vanishes on the unit ball"
                    )));
                }
                if (a0 / b0) <= 0.0 || ((a0 + a2) / (b0 + b2)) <= 0.0 || a0 * (a0 + a2) <= 0.0 {
                    return Err(Error::Domain("custom medium k₀ must stay positive on the unit ball".into()));
                }
                Ok(MediumField::custom(move |x: &Vec3| {
                    let r2 = x.norm_squared();
                    C64::new((a0 + a2 * r2) / (b0 + b2 * r2), 0.0)
                }))
            }
            (MediumPreset::Custom, None) => Err(Error::Domain("custom medium needs `rational` coefficients".into())),
            (p, Some(_)) => Err(Error::Domain(format!("`rational` is only valid with the custom preset, not {p:?}"))),
            (p, None) => Ok(MediumField::from_preset(p).expect("non-custom preset")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollocationSpec {
    pub n: usize,
    pub seed: u64,
    /// Layout for the unperturbed solves.
    pub layout: Layout,
    /// Layout for solves with a droplet.
    pub perturbed_layout: Layout,
}

impl Default for CollocationSpec {
    fn default() -> Self {
        Self {
            n: 200,
            seed: 7,
            layout: Layout::default(),
            perturbed_layout: Layout::perturbed(),
        }
    }
}

/// Every parameter any subcommand reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub medium: MediumSpec,
    pub droplet: DropletTemplate,
    /// Resonance index `n₀`; the probing frequency is `ω_{n₀}`.
    pub mode: usize,
    /// Incident direction (normalized on use).
    pub theta: [f64; 3],
    pub collocation: CollocationSpec,
    pub orders: QuadOrders,
    pub plan: CubePlan,
    pub reference: Reference,
    pub droplet_model: DropletModel,
    /// Noise levels for `invert`, processed in ascending order.
    pub taus: Vec<f64>,
    pub noise_seed: u64,
    pub delta: f64,
    pub spline_end: SplineEnd,
    /// `|ξ|` below `xi_floor · max|ξ|` marks a node invalid.
    pub xi_floor: f64,
    /// Contrast grid read by `invert`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            medium: MediumSpec::default(),
            droplet: DropletTemplate::default(),
            mode: 1,
            theta: [1.0, 2.0, 1.0],
            collocation: CollocationSpec::default(),
            orders: QuadOrders::default(),
            plan: CubePlan::default(),
            reference: Reference::NeutralizedDroplet,
            droplet_model: DropletModel::Collocated,
            taus: vec![0.0, 0.01, 0.05],
            noise_seed: 1,
            delta: DEFAULT_DELTA,
            spline_end: SplineEnd::Natural,
            xi_floor: DEFAULT_XI_FLOOR,
            input: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Pretty JSON of the resolved config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact resolved JSON.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn theta_vec(&self) -> Vec3 {
        Vec3::from(self.theta).normalize()
    }

    pub fn omega(&self) -> Result<f64> {
        Ok(eigen_mode(self.mode)?.omega())
    }

    pub fn scan_settings(&self) -> Result<ScanSettings> {
        Ok(ScanSettings {
            n_colloc: self.collocation.n,
            seed: self.collocation.seed,
            layout: self.collocation.perturbed_layout,
            orders: self.orders,
            reference: self.reference,
            droplet_model: self.droplet_model,
            exclusion_box: Some(self.plan.region()?),
        })
    }

    /// Checks every precondition that can be checked without solving.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        self.medium.build()?;
        self.droplet.at(Vec3::zeros())?;
        if self.mode == 0 {
            return bad("mode index starts at 1".into());
        }
        let t = Vec3::from(self.theta);
        if !(t.norm() > 0.0 && t.iter().all(|c| c.is_finite())) {
            return bad("theta must be a nonzero finite vector".into());
        }
        if self.collocation.n < 4 {
            return bad(format!("{} collocation points is too few", self.collocation.n));
        }
        for o in [
            self.orders.sphere,
            self.orders.droplet_sphere,
            self.orders.ball_radial,
            self.orders.ball_angular,
            self.orders.droplet_ball_radial,
            self.orders.droplet_ball_angular,
        ] {
            if o < 2 {
                return bad(format!("quadrature order {o} is below 2"));
            }
        }
        let scan = self.plan.scan_geometry()?;
        crate::invert::check_scan_grid(&scan, &self.droplet)?;
        for d in scan.dims {
            if d > 1 {
                crate::invert::refined_len(d, self.plan.refine_factor)?;
            }
        }
        if self.taus.is_empty() || self.taus.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("taus must be a non-empty list of non-negative levels".into());
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta {} must be positive", self.delta));
        }
        if !(self.xi_floor >= 0.0) {
            return bad("xi_floor must be non-negative".into());
        }
        Ok(())
    }

    /// Noise levels in ascending order without duplicates.
    pub fn sorted_taus(&self) -> Vec<f64> {
        let mut t = self.taus.clone();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }
}

/// Number of worker threads: flag, then environment, then all cores.
pub const WORKERS_ENV: &str = "DROPLET_PROBE_WORKERS";

/// Output directory that refuses to overwrite anything.
#[derive(Debug, Clone)]
pub struct OutDir {
    pub root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self { root: root.to_path_buf() })
    }

    /// Path for a new artifact; fails if it already exists.
    pub fn fresh(&self, name: &str) -> Result<PathBuf> {
        let p = self.root.join(name);
        if p.exists() {
            return Err(Error::Io {
                path: p,
                source: std::io::Error::new(std::io::ErrorKind::AlreadyExists, "refusing to overwrite"),
            });
        }
        Ok(p)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        use std::io::Write;
        let p = self.fresh(name)?;
        let mut f = std::fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&p)
            .map_err(|e| Error::io(&p, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&p, e))?;
        Ok(p)
    }
}
