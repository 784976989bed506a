//! Two-photon (biphoton) double-slit interference.
//!
//! A momentum-entangled Gaussian pair state is carried from the source to a
//! double slit, truncated by the slit apertures, and carried on to the
//! detector plane. Every stage exists twice: once in closed form (complex
//! Gaussian widths, the four-term screen state and its interference laws) and
//! once on a grid (spectral free propagation, hard-edged masking and direct
//! Fresnel quadrature), so the closed forms can be checked against an
//! independent numeric oracle.
//!
//! Lengths share one arbitrary unit and `c = 1`, so only distances appear.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN falls into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
mod fft;
pub mod fields;
pub mod model;
pub mod optics;
pub mod params;
pub mod pipeline;
pub mod propagation;

pub use analysis::{compare, fringe_metrics, Comparison, FringeMetrics, Pattern, Provenance};
pub use error::Error;
pub use fields::{ComplexField2D, Grid1D, Moments, SpectralMoments};
pub use model::FinalStateTerms;
pub use optics::{DoubleSlitMask, SlitCaseWeights};
pub use params::{ExperimentParams, Geometry, RegimeReport};
pub use pipeline::{run, run_keeping_screen, run_with_plan, GridPlan, PipelineError, Report, ScenarioKind};
pub use propagation::GaussianBiphoton;

pub use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;
