//! Permutation entropy and ordinal-pattern analysis of time series, plus a
//! small synthetic RF modulation lab for testing multi-scale entropy features.
//!
//! Analysis routines are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiations.

pub mod classify;
pub mod dataset_io;
pub mod entropy;
pub mod error;
pub mod features;
pub mod ordinal;
pub mod scalar;
pub mod synth;
pub mod windowing;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Version tag written into every JSON document.
pub const FORMAT_TAG: &str = "1.0";

pub type MspeMatrixF64 = entropy::MspeMatrix<f64>;
pub type MspeMatrixF32 = entropy::MspeMatrix<f32>;
pub type FeatureVectorF64 = features::FeatureVector<f64>;
pub type FeatureVectorF32 = features::FeatureVector<f32>;
pub type ScanResultF64 = entropy::ScanResult<f64>;
pub type ExampleF64 = classify::Example<f64>;
