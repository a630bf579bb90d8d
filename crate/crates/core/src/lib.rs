//! Infinite uniform matrix product states: transfer spectra, support-projection
//! entropies, conditional mutual information and its decay bound.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod mps;
pub mod numerics;

pub use error::{Error, Result};
