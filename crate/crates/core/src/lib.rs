//! Numerical laboratory for the Lempert function, the Kobayashi distance
//! and the Kobayashi–Royden metric on smooth planar domains and on complex
//! balls.
//!
//! The pieces build on each other:
//!
//! * [`domain`]: planar Jordan domains, boundary distances, normals, the
//!   comparison cones and a sampled regularity check;
//! * [`conformal`]: normalized Riemann maps onto the unit disc (exact where
//!   possible, Szegő kernel or Theodorsen iteration otherwise);
//! * [`metrics`]: invariant metrics by conformal pullback and the ratios
//!   that control their boundary behaviour;
//! * [`disc`]: explicit analytic discs through two given points and the
//!   upper bounds for the Lempert function they certify;
//! * [`experiments`]: configurable sweeps producing CSV, JSON and SVG.

// `!(x < y)` is how NaN is made to fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod conformal;
pub mod disc;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod numeric;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
