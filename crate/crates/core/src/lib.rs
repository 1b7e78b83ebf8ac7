//! Invertible low-divergence coding: codebooks, distribution matchers,
//! one-to-many partition encoders, resolution codes and the accompanying
//! divergence bounds.
//!
//! Probability arithmetic is generic over [`scalar::Real`] (`f32`, `f64`);
//! the `*64` aliases below fix the scalar to `f64`.

pub mod analysis;
pub mod bounds;
pub mod codebook;
pub mod combin;
pub mod dm;
pub mod error;
pub mod info;
pub mod partition;
pub mod resolution;
pub mod scalar;

pub use codebook::{BookDoc, BookSpec, Codebook, StringRank};
pub use error::{IldError, Result};
pub use info::{Pmf, SymbolString, TypeVector};
pub use scalar::Real;

pub type Pmf64 = Pmf<f64>;
pub type Pmf32 = Pmf<f32>;
pub type Codebook64 = Codebook<f64>;
