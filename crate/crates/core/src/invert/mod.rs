//! From droplet scans to a bulk-modulus map.
//!
//! [`scan_contrast`] collects `ξ(z) = v^∞(−θ) − u_z^∞(−θ)` over a grid of
//! droplet positions. After optional [`synth_noise`], [`refine()`] resamples
//! it by cubic splines. [`reconstruct_k0`] then applies
//! `1/k₀ = −ω⁻² Δ√ξ/√ξ` through mollified derivatives.

mod noise;
mod plan;
mod rbf;
mod reconstruct;
mod refine;
mod scan;

pub use noise::{noise_factor, synth_noise};
pub use plan::CubePlan;
pub use rbf::{fit_k0_rbf, fit_matrix, RbfModulus};
pub use reconstruct::{exact_k0, metrics, reconstruct_k0, Metrics, Reconstruction, DEFAULT_XI_FLOOR};
pub use refine::{refine, refine_to, refined_len, spline_matrix, SplineEnd};
pub use scan::{check_scan_grid, scan_contrast, ContrastScanner, DropletModel, DropletTemplate, Reference, ScanSettings};
