//! Stable phase retrieval of complex polynomials from 6d-3 noisy
//! magnitude measurements.
//!
//! A polynomial `p` of dimension `d` is measured through `|p(ω^j)|²`,
//! `|p(ω^j) - p(ω^j ν)|²` and `|p(ω^j) - i p(ω^j ν)|²` at the powers of
//! the (2d-1)-st root of unity `ω`, with `ν` the d-th root of unity.
//! Recovery, up to the inherently unknowable global phase, proceeds in
//! three steps:
//!
//! 1. interpolate the three sample families to trigonometric polynomials
//!    on the whole circle ([`interpolation`]);
//! 2. pick a sampling point `z₀` whose orbit `{ν^j z₀}` keeps all samples
//!    away from zero, by a max-min grid search ([`recovery::select_z0`]);
//! 3. recover the coordinates with respect to the orthonormal kernel basis
//!    of the orbit, either sequentially (phase propagation) or through the
//!    null space of a bidiagonal operator (kernel method).
//!
//! [`bounds`] carries the full chain of analytic constants: the separation
//! radius `r`, the floor constant `β`, admissible-noise thresholds, and the
//! final error bound, all usable far past the range where their values
//! overflow `f64`. [`harness`] adds reproducible noise sweeps and the
//! worst-case random-walk search.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod interpolation;
pub mod measurement;
pub mod polyspace;
pub mod recovery;

pub use bounds::{BetaVariant, BoundReport, TruncationFloor};
pub use error::{Error, Result};
pub use harness::{PolySource, SweepConfig, SweepRow};
pub use interpolation::TrigPolynomial;
pub use measurement::{MeasurementKind, MeasurementVector, NoiseModel, NoiseVector};
pub use polyspace::{rho, Polynomial, UnitPoint};
pub use recovery::{BasisMeasurements, Method, RecoveryResult};
