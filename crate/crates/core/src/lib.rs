//! Acoustic scattering with an injected micro-droplet and reconstruction of
//! the background bulk modulus from back-scattered far fields.
//!
//! The pipeline runs bottom-up. [`eigensys`] fixes the droplet resonance and
//! [`forward`] solves the Lippmann–Schwinger equations by dual reciprocity
//! collocation. [`invert`] then turns a scan of far-field differences into a
//! bulk-modulus map via [`mollify`]-regularized derivatives.

pub mod config;
pub mod eigensys;
pub mod error;
pub mod forward;
pub mod grid;
pub mod invert;
pub mod kernels;
pub mod mollify;
pub mod quad;
pub mod run;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type C64 = num_complex::Complex64;
