//! Fractional-order moments in Radon space.
//!
//! Images are projected with a full-turn Radon transform and the resulting
//! sinograms are expanded on harmonic or Jacobi-polynomial fractional-order
//! bases. The core is generic over the [`Scalar`] type; `f64` aliases are
//! exported for convenience.

pub mod degrade;
pub mod error;
pub mod harness;
pub mod explicit;
pub mod image;
pub mod invariants;
pub mod io;
pub mod metrics;
pub mod moments;
pub mod basis;
pub mod quadrature;
pub mod radon;
pub mod scalar;
pub mod special;
pub mod synth;
pub mod watermark;

pub use error::{FmrError, Result};
pub use image::{disk_mask, DiskDomain, GrayImage};
pub use radon::{radon_forward, radon_inverse, Sinogram};
pub use scalar::Scalar;

pub type GrayImage64 = GrayImage<f64>;
pub type GrayImage32 = GrayImage<f32>;
pub type Sinogram64 = Sinogram<f64>;
pub type Sinogram32 = Sinogram<f32>;
pub type BasisSpec64 = basis::BasisSpec<f64>;
pub type BasisSpec32 = basis::BasisSpec<f32>;
pub type MomentSet64 = moments::MomentSet<f64>;
pub type MomentSet32 = moments::MomentSet<f32>;
pub type FeatureVector64 = invariants::FeatureVector<f64>;
pub type FeatureVector32 = invariants::FeatureVector<f32>;
