//! Uniform axes and two-photon amplitudes `Ψ(x1, x2)` sampled on them.
//!
//! Nodes sit at `x_min + j·Δx` for `j < n`. Integrals are plain sums times
//! the cell size, i.e. the midpoint rule for cells centred on the nodes; the
//! same rule is used everywhere in the crate.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::analysis::{Pattern, Provenance};
use crate::fft::fft2;
use crate::params::ExperimentParams;
use crate::{Error, Result};

/// Amplitude floor, relative to the peak, that counts as "negligible" at grid
/// boundaries and at the spectral band edge.
pub const NEGLIGIBLE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(try_from = "RawGrid", deny_unknown_fields)
)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

#[cfg(feature = "serde")]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

#[cfg(feature = "serde")]
impl TryFrom<RawGrid> for Grid1D {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Grid1D::new(raw.x_min, raw.x_max, raw.n)
    }
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid {
                reason: "bounds must be finite",
            });
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid {
                reason: "x_min must be below x_max",
            });
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid {
                reason: "node count must be a power of two and at least 2",
            });
        }
        Ok(Self { x_min, x_max, n })
    }

    /// `[-half_width, half_width)` with a node at the origin.
    pub fn centered(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Same spacing as [`Grid1D::centered`] but shifted by half a cell, so the
    /// nodes are mirror-symmetric about the origin without touching it.
    pub fn staggered(half_width: f64, n: usize) -> Result<Self> {
        let dx = 2.0 * half_width / n as f64;
        Self::new(-half_width + 0.5 * dx, half_width + 0.5 * dx, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Angular wave number of FFT bin `m`, with bins above `n/2` mapped to
    /// negative frequencies.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let signed = if m < self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        };
        2.0 * PI * signed / (self.x_max - self.x_min)
    }

    /// Index of the node closest to `x`.
    pub fn nearest_index(&self, x: f64) -> Result<usize> {
        if !(x >= self.x_min && x < self.x_max) {
            return Err(Error::OutOfRange {
                value: x,
                min: self.x_min,
                max: self.x_max,
            });
        }
        let j = libm::round((x - self.x_min) / self.spacing()) as usize;
        Ok(j.min(self.n - 1))
    }

    /// Index of the node at `-node(j)`, if the node set contains it.
    pub fn mirror_index(&self, j: usize) -> Option<usize> {
        let total = -2.0 * self.x_min / self.spacing();
        let rounded = libm::round(total);
        if libm::fabs(total - rounded) > 1e-9 || rounded < 0.0 {
            return None;
        }
        let k = rounded as i64 - j as i64;
        (0..self.n as i64).contains(&k).then_some(k as usize)
    }

    pub(crate) fn same_as(&self, other: &Grid1D) -> bool {
        self.n == other.n
            && libm::fabs(self.x_min - other.x_min) <= 1e-12 * self.spacing()
            && libm::fabs(self.x_max - other.x_max) <= 1e-12 * self.spacing()
    }
}

/// Complex two-photon amplitude on a product grid, row-major in `x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid1: Grid1D,
    grid2: Grid1D,
    amp: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Moments {
    pub mean_x1: f64,
    pub mean_x2: f64,
    pub var_x1: f64,
    pub var_x2: f64,
    pub cov: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SpectralMoments {
    pub mean_k1: f64,
    pub mean_k2: f64,
    pub var_k1: f64,
    pub var_k2: f64,
}

impl ComplexField2D {
    pub fn zeros(grid1: Grid1D, grid2: Grid1D) -> Self {
        Self {
            grid1,
            grid2,
            amp: alloc::vec![Complex64::new(0.0, 0.0); grid1.len() * grid2.len()],
        }
    }

    pub fn from_fn(grid1: Grid1D, grid2: Grid1D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut amp = Vec::with_capacity(grid1.len() * grid2.len());
        for x1 in grid1.nodes() {
            for x2 in grid2.nodes() {
                amp.push(f(x1, x2));
            }
        }
        Self { grid1, grid2, amp }
    }

    pub fn from_vec(grid1: Grid1D, grid2: Grid1D, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid1.len() * grid2.len() {
            return Err(Error::GridMismatch);
        }
        let field = Self { grid1, grid2, amp };
        field.ensure_finite()?;
        Ok(field)
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.amp.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { what: "field" })
        }
    }

    pub fn grid1(&self) -> &Grid1D {
        &self.grid1
    }

    pub fn grid2(&self) -> &Grid1D {
        &self.grid2
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn at(&self, i1: usize, i2: usize) -> Complex64 {
        self.amp[i1 * self.grid2.len() + i2]
    }

    pub fn row(&self, i1: usize) -> &[Complex64] {
        let n2 = self.grid2.len();
        &self.amp[i1 * n2..(i1 + 1) * n2]
    }

    pub fn cell_area(&self) -> f64 {
        self.grid1.spacing() * self.grid2.spacing()
    }

    /// `∫∫ |Ψ|² dx1 dx2`.
    pub fn norm2(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm2();
        if !(n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let mut out = self.clone();
        out.scale(1.0 / libm::sqrt(n));
        Ok(out)
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.amp {
            *a *= factor;
        }
    }

    pub fn peak_abs(&self) -> f64 {
        self.amp.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest amplitude on the outermost rows and columns, relative to the peak.
    pub fn boundary_ratio(&self) -> f64 {
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let mut edge = 0.0f64;
        for i2 in 0..n2 {
            edge = edge.max(self.at(0, i2).norm()).max(self.at(n1 - 1, i2).norm());
        }
        for i1 in 0..n1 {
            edge = edge.max(self.at(i1, 0).norm()).max(self.at(i1, n2 - 1).norm());
        }
        let peak = self.peak_abs();
        if peak > 0.0 {
            edge / peak
        } else {
            0.0
        }
    }

    pub(crate) fn ensure_contained(&self) -> Result<()> {
        let edge_ratio = self.boundary_ratio();
        if edge_ratio > NEGLIGIBLE {
            Err(Error::GridTooNarrow { edge_ratio })
        } else {
            Ok(())
        }
    }

    /// Largest nodewise difference between two fields on the same grids.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if !(self.grid1.same_as(&other.grid1) && self.grid2.same_as(&other.grid2)) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// First and second moments of `|Ψ|²`.
    pub fn moments(&self) -> Result<Moments> {
        let total = self.norm2();
        if !(total > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let w = self.cell_area() / total;
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i1, x1) in self.grid1.nodes().enumerate() {
            for (i2, x2) in self.grid2.nodes().enumerate() {
                let p = self.at(i1, i2).norm_sqr() * w;
                m1 += p * x1;
                m2 += p * x2;
            }
        }
        let (mut v1, mut v2, mut c) = (0.0, 0.0, 0.0);
        for (i1, x1) in self.grid1.nodes().enumerate() {
            for (i2, x2) in self.grid2.nodes().enumerate() {
                let p = self.at(i1, i2).norm_sqr() * w;
                v1 += p * (x1 - m1) * (x1 - m1);
                v2 += p * (x2 - m2) * (x2 - m2);
                c += p * (x1 - m1) * (x2 - m2);
            }
        }
        Ok(Moments {
            mean_x1: m1,
            mean_x2: m2,
            var_x1: v1,
            var_x2: v2,
            cov: c,
        })
    }

    /// Second moments of `|Ψ̃(k1, k2)|²` with the `e^{-ikx}` forward transform.
    pub fn spectral_moments(&self) -> Result<SpectralMoments> {
        if !(self.norm2() > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let mut spec = self.amp.clone();
        fft2(&mut spec, n1, n2, false);
        let total: f64 = spec.iter().map(|s| s.norm_sqr()).sum();
        let (mut m1, mut m2) = (0.0, 0.0);
        for i1 in 0..n1 {
            let k1 = self.grid1.wavenumber(i1);
            for i2 in 0..n2 {
                let p = spec[i1 * n2 + i2].norm_sqr() / total;
                m1 += p * k1;
                m2 += p * self.grid2.wavenumber(i2);
            }
        }
        let (mut v1, mut v2) = (0.0, 0.0);
        for i1 in 0..n1 {
            let k1 = self.grid1.wavenumber(i1) - m1;
            for i2 in 0..n2 {
                let k2 = self.grid2.wavenumber(i2) - m2;
                let p = spec[i1 * n2 + i2].norm_sqr() / total;
                v1 += p * k1 * k1;
                v2 += p * k2 * k2;
            }
        }
        Ok(SpectralMoments {
            mean_k1: m1,
            mean_k2: m2,
            var_k1: v1,
            var_k2: v2,
        })
    }

    /// Density of both photons arriving at the same position, `|Ψ(x, x)|²`.
    pub fn diagonal_slice(&self) -> Result<Pattern> {
        if !self.grid1.same_as(&self.grid2) {
            return Err(Error::GridMismatch);
        }
        let density = (0..self.grid1.len())
            .map(|i| self.at(i, i).norm_sqr())
            .collect();
        Pattern::new(self.grid1, density, Provenance::NumericOracle, "coincidence x1 = x2")
    }

    /// Density of photon 1 with photon 2 pinned to the node nearest `x2`.
    pub fn conditional_slice(&self, x2: f64) -> Result<Pattern> {
        let i2 = self.grid2.nearest_index(x2)?;
        let density = (0..self.grid1.len())
            .map(|i1| self.at(i1, i2).norm_sqr())
            .collect();
        let label = format!("conditional x2 = {}", self.grid2.node(i2));
        Pattern::new(self.grid1, density, Provenance::NumericOracle, label)
    }
}

/// Amplitude of the entangled Gaussian pair state at the source,
/// `(πσΩ)^{-1/2} exp(-(x1-x2)²/4σ²) exp(-(x1+x2)²/4Ω²)`.
pub fn gepr_amplitude(params: &ExperimentParams, x1: f64, x2: f64) -> f64 {
    let (s, w) = (params.sigma, params.omega_big);
    let d = x1 - x2;
    let m = x1 + x2;
    libm::exp(-d * d / (4.0 * s * s) - m * m / (4.0 * w * w)) / libm::sqrt(PI * s * w)
}

/// Samples the source pair state. Fails if the grids clip it.
pub fn sample_gepr(params: &ExperimentParams, grid1: Grid1D, grid2: Grid1D) -> Result<ComplexField2D> {
    let field = ComplexField2D::from_fn(grid1, grid2, |x1, x2| {
        Complex64::new(gepr_amplitude(params, x1, x2), 0.0)
    });
    field.ensure_contained()?;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(sigma: f64, omega_big: f64) -> ExperimentParams {
        ExperimentParams {
            sigma,
            omega_big,
            ..Default::default()
        }
    }

    /// Plain trapezoid rule, independent of the field quadrature.
    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (inner + 0.5 * (f(a) + f(b)))
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 3).is_err());
        assert!(Grid1D::new(1.0, 1.0, 4).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        let g = Grid1D::centered(8.0, 16).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.node(8), 0.0);
        assert_eq!(g.mirror_index(3), Some(13));
        assert_eq!(g.mirror_index(0), None);
        let s = Grid1D::staggered(8.0, 16).unwrap();
        assert_eq!(s.node(0), -7.5);
        assert_eq!(s.mirror_index(0), Some(15));
    }

    #[test]
    fn nearest_index_and_range() {
        let g = Grid1D::centered(4.0, 8).unwrap();
        assert_eq!(g.nearest_index(0.0).unwrap(), 4);
        assert_eq!(g.nearest_index(0.49).unwrap(), 4);
        assert_eq!(g.nearest_index(0.51).unwrap(), 5);
        assert_eq!(g.nearest_index(3.9).unwrap(), 7);
        assert!(matches!(g.nearest_index(4.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(g.nearest_index(-4.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn source_amplitude_at_origin() {
        let g = Grid1D::centered(8.0, 64).unwrap();
        let field = sample_gepr(&params(1.0, 1.0), g, g).unwrap();
        let centre = field.at(32, 32);
        assert!((centre.re - 0.564_189_583_547_756_3).abs() < 1e-12);
        assert_eq!(centre.im, 0.0);
    }

    #[test]
    fn source_state_is_normalized() {
        let p = params(0.5, 50.0);
        let g = Grid1D::centered(200.0, 1024).unwrap();
        let field = sample_gepr(&p, g, g).unwrap();
        assert!((field.norm2() - 1.0).abs() < 1e-6);
        // Convergence: halving the spacing over the same window changes nothing.
        let fine = Grid1D::centered(200.0, 2048).unwrap();
        let f2 = sample_gepr(&p, fine, fine).unwrap();
        assert!((field.norm2() - f2.norm2()).abs() < 1e-8);
    }

    #[test]
    fn clipped_source_is_rejected() {
        let g = Grid1D::centered(20.0, 64).unwrap();
        assert!(matches!(
            sample_gepr(&params(0.5, 50.0), g, g),
            Err(Error::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn norm_scales_quadratically_and_zero_is_rejected() {
        let g = Grid1D::centered(8.0, 64).unwrap();
        let field = sample_gepr(&params(1.0, 1.5), g, g).unwrap();
        let mut doubled = field.clone();
        doubled.scale(2.0);
        assert!((doubled.norm2() - 4.0 * field.norm2()).abs() < 1e-12);
        assert!((doubled.normalize().unwrap().norm2() - 1.0).abs() < 1e-12);
        let zero = ComplexField2D::zeros(g, g);
        assert_eq!(zero.normalize(), Err(Error::ZeroNorm));
        assert_eq!(zero.moments(), Err(Error::ZeroNorm));
        assert_eq!(zero.spectral_moments(), Err(Error::ZeroNorm));
        assert_eq!(zero.diagonal_slice().unwrap_err(), Error::ZeroNorm);
    }

    #[test]
    fn moments_of_the_source_state() {
        let g = Grid1D::centered(8.0, 128).unwrap();
        let field = sample_gepr(&params(1.0, 1.0), g, g).unwrap();
        let m = field.moments().unwrap();
        assert!(m.mean_x1.abs() < 1e-8 && m.mean_x2.abs() < 1e-8);
        assert!((m.var_x1 - m.var_x2).abs() < 1e-6);
        assert!(m.cov.abs() < 1e-6);
        // σ = Ω = 1 gives |Ψ|² ∝ exp(-x1² - x2²): variance 1/2 per photon.
        assert!((m.var_x1 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn entangled_moments_against_one_dimensional_marginal() {
        let p = params(0.5, 50.0);
        let g = Grid1D::centered(200.0, 1024).unwrap();
        let m = sample_gepr(&p, g, g).unwrap().moments().unwrap();
        // Marginal of |Ψ|² in x1 is a Gaussian with variance (σ²+Ω²)/4; check
        // by integrating x² against it on an independent 1D trapezoid grid.
        let var = (p.sigma * p.sigma + p.omega_big * p.omega_big) / 4.0;
        let density = |x: f64| libm::exp(-x * x / (2.0 * var)) / libm::sqrt(2.0 * PI * var);
        let oracle = trapezoid(|x| x * x * density(x), -200.0, 200.0, 200_000);
        assert!((m.var_x1 - oracle).abs() < 1e-6 * oracle);
        assert!((m.var_x2 - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn spectral_width_of_product_state() {
        let s = 1.5;
        let g = Grid1D::centered(16.0, 256).unwrap();
        let field = sample_gepr(&params(s, s), g, g).unwrap();
        let k = field.spectral_moments().unwrap();
        let expected = 1.0 / (s * libm::sqrt(2.0));
        assert!((libm::sqrt(k.var_k1) - expected).abs() < 1e-4);
        assert!((k.var_k1 - k.var_k2).abs() < 1e-8);
    }

    #[test]
    fn spectral_widths_of_entangled_state_are_equal() {
        let g = Grid1D::centered(200.0, 1024).unwrap();
        let field = sample_gepr(&params(0.5, 50.0), g, g).unwrap();
        let k = field.spectral_moments().unwrap();
        assert!((libm::sqrt(k.var_k1) - libm::sqrt(k.var_k2)).abs() < 1e-8);
        // var k1 = (1/σ² + 1/Ω²)/4 for this state.
        let expected = (1.0 / 0.25 + 1.0 / 2500.0) / 4.0;
        assert!((k.var_k1 - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn diagonal_slice_of_source_is_gaussian() {
        let p = params(0.5, 50.0);
        let g = Grid1D::centered(200.0, 1024).unwrap();
        let pattern = sample_gepr(&p, g, g).unwrap().diagonal_slice().unwrap();
        // |Ψ(x,x)|² ∝ exp(-2x²/Ω²): variance Ω²/4.
        let var: f64 = pattern
            .axis()
            .nodes()
            .zip(pattern.density())
            .map(|(x, p)| x * x * p)
            .sum::<f64>()
            * g.spacing();
        assert!((var - 625.0).abs() < 1e-6 * 625.0, "{var}");
        assert!(pattern.symmetry_error().unwrap() < 1e-14);
    }

    #[test]
    fn conditional_slice_picks_nearest_node() {
        let p = params(1.0, 3.0);
        let g = Grid1D::centered(16.0, 128).unwrap();
        let field = sample_gepr(&p, g, g).unwrap();
        let pattern = field.conditional_slice(0.0).unwrap();
        assert!(pattern.symmetry_error().unwrap() < 1e-14);
        assert!(matches!(field.conditional_slice(100.0), Err(Error::OutOfRange { .. })));
        let h = Grid1D::centered(8.0, 128).unwrap();
        let other = ComplexField2D::zeros(g, h);
        assert_eq!(other.diagonal_slice().unwrap_err(), Error::GridMismatch);
    }

    proptest! {
        #[test]
        fn source_state_is_exchange_symmetric(sigma in 0.3f64..3.0, omega in 0.3f64..3.0) {
            let g = Grid1D::centered(24.0, 64).unwrap();
            let p = params(sigma, omega);
            let f = ComplexField2D::from_fn(g, g, |a, b| Complex64::new(gepr_amplitude(&p, a, b), 0.0));
            for i in 0..64 {
                for j in 0..64 {
                    prop_assert_eq!(f.at(i, j), f.at(j, i));
                }
            }
        }
    }
}
