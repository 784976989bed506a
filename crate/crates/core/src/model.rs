//! Closed-form screen state and the two fringe laws derived from it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(feature = "serde")]
use serde::Serialize;

use crate::analysis::{Pattern, Provenance};
use crate::fields::Grid1D;
use crate::params::ExperimentParams;
use crate::propagation::propagate_analytic;
use crate::Result;

/// Slit-plane and screen geometry carried alongside the term weights.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct TermGeometry {
    pub slit_sep: f64,
    pub slit_width: f64,
    pub lambda: f64,
    pub dist_slit_screen: f64,
}

/// Weights and prefactor of the four-term screen state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct FinalStateTerms {
    /// Weight of the two terms where both photons pass one slit.
    pub weight_same: f64,
    /// Weight of the two terms where the photons pass different slits.
    pub weight_diff: f64,
    /// `C / (iλD)`.
    pub prefactor: Complex64,
    pub alpha: f64,
    pub geometry: TermGeometry,
}

impl FinalStateTerms {
    fn scale(&self) -> f64 {
        self.geometry.lambda * self.geometry.dist_slit_screen
    }

    fn f(&self, x: f64) -> f64 {
        sinc_envelope(x, self.geometry.slit_width, self.scale())
    }

    fn chirp(&self, u: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI * u * u / self.scale()).exp()
    }
}

fn sinc_envelope(x: f64, eps: f64, lambda_d: f64) -> f64 {
    let k = 2.0 * PI / lambda_d;
    let theta = k * x * eps;
    if libm::fabs(theta) < 1e-8 {
        eps * (1.0 - theta * theta / 6.0)
    } else {
        libm::sin(theta) / (k * x)
    }
}

/// `f(x) = sin(2πxε/λD) / (2πx/λD)`, equal to `ε` at the origin.
pub fn envelope_f(x: f64, params: &ExperimentParams) -> f64 {
    sinc_envelope(x, params.slit_width, params.lambda * params.dist_slit_screen)
}

pub fn term_weights(params: &ExperimentParams) -> Result<FinalStateTerms> {
    let gb = propagate_analytic(params, params.dist_source_slit)?;
    let lambda_d = params.lambda * params.dist_slit_screen;
    Ok(FinalStateTerms {
        weight_same: params.weight_same(),
        weight_diff: params.weight_diff(),
        prefactor: gb.norm / Complex64::new(0.0, lambda_d),
        alpha: params.alpha(),
        geometry: TermGeometry {
            slit_sep: params.slit_sep,
            slit_width: params.slit_width,
            lambda: params.lambda,
            dist_slit_screen: params.dist_slit_screen,
        },
    })
}

/// All four terms of the screen state at centre-of-mass `r` and relative
/// coordinate `q`, without dropping any of them.
pub fn final_state_amplitude(r: f64, q: f64, terms: &FinalStateTerms) -> Complex64 {
    let h = 0.5 * terms.geometry.slit_sep;
    let same = (terms.chirp(r - h) * terms.f(r - h) + terms.chirp(r + h) * terms.f(r + h))
        * terms.chirp(q)
        * terms.f(q)
        * terms.weight_same;
    let diff = (terms.chirp(q + h) * terms.f(q + h) + terms.chirp(q - h) * terms.f(q - h))
        * terms.chirp(r)
        * terms.f(r)
        * terms.weight_diff;
    terms.prefactor * (same + diff)
}

/// Pair density at a common screen position: `|C_t|² ε² f²(x) [1 + cos(4πxd/λD)]`.
pub fn coincidence_law(x: f64, terms: &FinalStateTerms) -> f64 {
    let g = &terms.geometry;
    let eps = g.slit_width;
    let f = terms.f(x);
    terms.prefactor.norm_sqr() * eps * eps * f * f
        * (1.0 + libm::cos(4.0 * PI * x * g.slit_sep / terms.scale()))
}

/// Single-photon density with the partner held at `x2 = 0`:
/// `|C_t|² ε² f²(x1/2) [1 + cos(2πx1d/λD)]`.
pub fn conditional_law(x1: f64, terms: &FinalStateTerms) -> f64 {
    let g = &terms.geometry;
    let eps = g.slit_width;
    let f = terms.f(0.5 * x1);
    terms.prefactor.norm_sqr() * eps * eps * f * f
        * (1.0 + libm::cos(2.0 * PI * x1 * g.slit_sep / terms.scale()))
}

fn law_pattern(
    axis: Grid1D,
    terms: &FinalStateTerms,
    law: fn(f64, &FinalStateTerms) -> f64,
    label: &str,
) -> Result<Pattern> {
    let density: Vec<f64> = axis.nodes().map(|x| law(x, terms)).collect();
    Pattern::new(axis, density, Provenance::Analytic, label)
}

pub fn coincidence_pattern(axis: Grid1D, terms: &FinalStateTerms) -> Result<Pattern> {
    law_pattern(axis, terms, coincidence_law, "coincidence law")
}

pub fn conditional_pattern(axis: Grid1D, terms: &FinalStateTerms) -> Result<Pattern> {
    law_pattern(axis, terms, conditional_law, "conditional law")
}
