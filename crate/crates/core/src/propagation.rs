//! Free paraxial propagation of the pair state.
//!
//! Two independent routes are provided. The closed form tracks the complex
//! widths of the Gaussian factors in the centre-of-mass coordinate
//! `r = (x1+x2)/2` and the relative coordinate `q = (x1-x2)/2`. The grid route
//! works in particle coordinates `(x1, x2)`: a quadratic spectral phase for
//! band-limited fields, and direct Fresnel quadrature between different grids
//! for hard-edged fields that are not band-limited.
//!
//! The common phase `e^{-i k0 z}` per photon is dropped everywhere; densities
//! do not depend on it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(feature = "serde")]
use serde::Serialize;

use crate::fft::fft2;
use crate::fields::{ComplexField2D, Grid1D, NEGLIGIBLE};
use crate::params::ExperimentParams;
use crate::{Error, Result};

/// Spectral coefficients below this fraction of the largest one are skipped
/// during band-limited resampling.
const SPECTRAL_FLOOR: f64 = 1e-15;

/// Closed-form pair state `C exp(-q²/cq) exp(-r²/cr)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct GaussianBiphoton {
    /// Complex width of the relative-coordinate factor, `σ² + iα`.
    pub cq: Complex64,
    /// Complex width of the centre-of-mass factor, `Ω² + iα`.
    pub cr: Complex64,
    /// Normalization prefactor `C`.
    pub norm: Complex64,
}

impl GaussianBiphoton {
    pub fn amplitude(&self, x1: f64, x2: f64) -> Complex64 {
        let r = 0.5 * (x1 + x2);
        let q = 0.5 * (x1 - x2);
        self.norm * (-(q * q) / self.cq - (r * r) / self.cr).exp()
    }

    /// Half-width in `q` at which `|exp(-q²/cq)|` falls to `1/e`:
    /// `√(|cq|² / Re cq)`, i.e. `√((σ⁴ + α²)/σ²)`.
    pub fn q_halfwidth(&self) -> f64 {
        libm::sqrt(self.cq.norm_sqr() / self.cq.re)
    }

    /// Same as [`GaussianBiphoton::q_halfwidth`] for the `r` factor.
    pub fn r_halfwidth(&self) -> f64 {
        libm::sqrt(self.cr.norm_sqr() / self.cr.re)
    }
}

/// Evolves the source state over `distance` in closed form.
///
/// Each Gaussian factor `exp(-u²/a)` spreads to `√(a/(a + iα)) exp(-u²/(a + iα))`
/// with `α = λ·distance/2π`, which fixes `C = [π(σ + iα/σ)(Ω + iα/Ω)]^{-1/2}`.
pub fn propagate_analytic(params: &ExperimentParams, distance: f64) -> Result<GaussianBiphoton> {
    if !(distance >= 0.0) {
        return Err(Error::NegativeDistance { distance });
    }
    let alpha = params.alpha_at(distance);
    let (s, w) = (params.sigma, params.omega_big);
    let i_alpha = Complex64::new(0.0, alpha);
    let cq = s * s + i_alpha;
    let cr = w * w + i_alpha;
    let denom = PI * (s + i_alpha / s) * (w + i_alpha / w);
    Ok(GaussianBiphoton {
        cq,
        cr,
        norm: denom.sqrt().inv(),
    })
}

/// Samples a closed-form state. Fails if the grids clip it.
pub fn sample_gaussian(gb: &GaussianBiphoton, grid1: Grid1D, grid2: Grid1D) -> Result<ComplexField2D> {
    let field = ComplexField2D::from_fn(grid1, grid2, |x1, x2| gb.amplitude(x1, x2));
    field.ensure_contained()?;
    Ok(field)
}

fn band_edge_ratio(spec: &[Complex64], n1: usize, n2: usize) -> f64 {
    let peak = spec.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let row = (0..n2).map(|i2| spec[(n1 / 2) * n2 + i2].norm());
    let col = (0..n1).map(|i1| spec[i1 * n2 + n2 / 2].norm());
    row.chain(col).fold(0.0, f64::max) / peak
}

fn ensure_band_limited(spec: &[Complex64], n1: usize, n2: usize) -> Result<()> {
    let band_edge_ratio = band_edge_ratio(spec, n1, n2);
    if band_edge_ratio > NEGLIGIBLE {
        Err(Error::AliasingRisk { band_edge_ratio })
    } else {
        Ok(())
    }
}

/// Applies `exp(-i·distance·k²/2k0)` along each axis in Fourier space.
///
/// The field must vanish at the grid boundary and have negligible spectrum at
/// the band edge, before and after propagation.
pub fn propagate_numeric(
    field: &ComplexField2D,
    params: &ExperimentParams,
    distance: f64,
) -> Result<ComplexField2D> {
    if !(distance >= 0.0) {
        return Err(Error::NegativeDistance { distance });
    }
    field.ensure_finite()?;
    field.ensure_contained()?;
    let (g1, g2) = (*field.grid1(), *field.grid2());
    let (n1, n2) = (g1.len(), g2.len());
    let mut out = field.clone();
    let data = out.amplitudes_mut();
    fft2(data, n1, n2, false);
    ensure_band_limited(data, n1, n2)?;
    if distance == 0.0 {
        return Ok(field.clone());
    }

    let coeff = -distance / (2.0 * params.k0());
    let phase2: Vec<Complex64> = (0..n2)
        .map(|m| Complex64::cis(coeff * g2.wavenumber(m) * g2.wavenumber(m)))
        .collect();
    let scale = 1.0 / (n1 * n2) as f64;
    for (m1, row) in data.chunks_exact_mut(n2).enumerate() {
        let k1 = g1.wavenumber(m1);
        let p1 = Complex64::cis(coeff * k1 * k1) * scale;
        for (s, p2) in row.iter_mut().zip(&phase2) {
            *s *= p1 * p2;
        }
    }
    fft2(data, n1, n2, true);
    out.ensure_contained()?;
    Ok(out)
}

/// One-photon paraxial kernel `exp(iπu²/λz) / √(iλz)`.
fn fresnel_kernel(lambda: f64, distance: f64, u: f64) -> Complex64 {
    let lz = lambda * distance;
    let prefactor = Complex64::new(0.0, lz).sqrt().inv();
    prefactor * Complex64::cis(PI * u * u / lz)
}

/// Propagates by direct quadrature of the Fresnel integral, sampling the
/// result on arbitrary output grids.
///
/// `Ψ(x1, x2) = Σ K(x1 - x1') K(x2 - x2') Ψ(x1', x2') Δx1' Δx2'`, evaluated
/// separably and skipping all-zero rows and columns of the input, so masked
/// fields cost only as much as their open area.
pub fn fresnel_direct(
    field: &ComplexField2D,
    params: &ExperimentParams,
    distance: f64,
    out1: Grid1D,
    out2: Grid1D,
) -> Result<ComplexField2D> {
    if !(distance > 0.0) {
        return Err(Error::NonPositiveDistance { distance });
    }
    field.ensure_finite()?;
    let (g1, g2) = (*field.grid1(), *field.grid2());
    let n2 = g2.len();
    let rows: Vec<usize> = (0..g1.len())
        .filter(|&i1| field.row(i1).iter().any(|a| a.norm_sqr() > 0.0))
        .collect();
    let cols: Vec<usize> = (0..n2)
        .filter(|&i2| rows.iter().any(|&i1| field.at(i1, i2).norm_sqr() > 0.0))
        .collect();
    if rows.is_empty() {
        return Ok(ComplexField2D::zeros(out1, out2));
    }

    let lz = params.lambda * distance;
    let reach = |g: &Grid1D, out: &Grid1D, idx: &[usize]| {
        let lo = g.node(idx[0]);
        let hi = g.node(idx[idx.len() - 1]);
        let far = (out.x_max() - lo).max(hi - out.x_min());
        far * g.spacing() / lz
    };
    let phase_step = reach(&g1, &out1, &rows).max(reach(&g2, &out2, &cols));
    if phase_step >= 0.5 {
        return Err(Error::KernelUnderSampled { phase_step });
    }

    let m2 = out2.len();
    // T[r][t2] = Σ_c Ψ[r][c] K(x2_t - x2_c) Δx2
    let b2: Vec<Complex64> = out2
        .nodes()
        .flat_map(|x| {
            cols.iter()
                .map(move |&c| fresnel_kernel(params.lambda, distance, x - g2.node(c)) * g2.spacing())
        })
        .collect();
    let mut partial = vec![Complex64::new(0.0, 0.0); rows.len() * m2];
    for (ri, &r) in rows.iter().enumerate() {
        let src: Vec<Complex64> = cols.iter().map(|&c| field.at(r, c)).collect();
        for (t2, dst) in partial[ri * m2..(ri + 1) * m2].iter_mut().enumerate() {
            let k = &b2[t2 * cols.len()..(t2 + 1) * cols.len()];
            *dst = src.iter().zip(k).map(|(a, b)| a * b).sum();
        }
    }

    let mut out = vec![Complex64::new(0.0, 0.0); out1.len() * m2];
    for (t1, x1) in out1.nodes().enumerate() {
        let dst = &mut out[t1 * m2..(t1 + 1) * m2];
        for (ri, &r) in rows.iter().enumerate() {
            let k = fresnel_kernel(params.lambda, distance, x1 - g1.node(r)) * g1.spacing();
            for (d, p) in dst.iter_mut().zip(&partial[ri * m2..(ri + 1) * m2]) {
                *d += k * p;
            }
        }
    }
    ComplexField2D::from_vec(out1, out2, out)
}

/// Basis values `e^{i k_m (x - x_min)}` of the trigonometric interpolant on
/// `source`, evaluated at every node of `target`. The Nyquist bin uses the
/// real `cos` form so real band-limited data interpolate to real values.
fn interpolation_basis(source: &Grid1D, target: &Grid1D) -> Vec<Complex64> {
    let n = source.len();
    let mut basis = Vec::with_capacity(target.len() * n);
    for x in target.nodes() {
        let u = x - source.x_min();
        for m in 0..n {
            let k = source.wavenumber(m);
            if n > 1 && m == n / 2 {
                basis.push(Complex64::new(libm::cos(k * u), 0.0));
            } else {
                basis.push(Complex64::cis(k * u));
            }
        }
    }
    basis
}

/// Evaluates the band-limited (trigonometric) interpolant of `field` at the
/// nodes of new grids lying inside the old ones.
pub fn resample_bandlimited(
    field: &ComplexField2D,
    target1: Grid1D,
    target2: Grid1D,
) -> Result<ComplexField2D> {
    field.ensure_finite()?;
    field.ensure_contained()?;
    let (g1, g2) = (*field.grid1(), *field.grid2());
    for (t, g) in [(&target1, &g1), (&target2, &g2)] {
        let last = t.node(t.len() - 1);
        if t.x_min() < g.x_min() || last > g.node(g.len() - 1) {
            let value = if t.x_min() < g.x_min() { t.x_min() } else { last };
            return Err(Error::OutOfRange {
                value,
                min: g.x_min(),
                max: g.x_max(),
            });
        }
    }
    let (n1, n2) = (g1.len(), g2.len());
    let mut spec = field.amplitudes().to_vec();
    fft2(&mut spec, n1, n2, false);
    ensure_band_limited(&spec, n1, n2)?;
    let scale = 1.0 / (n1 * n2) as f64;
    let floor = SPECTRAL_FLOOR * spec.iter().map(|s| s.norm()).fold(0.0, f64::max);

    let (t1n, t2n) = (target1.len(), target2.len());
    let e2 = interpolation_basis(&g2, &target2);
    // Along x2: partial[m1][t2] = Σ_m2 S[m1][m2] e2[t2][m2]
    let mut partial = vec![Complex64::new(0.0, 0.0); n1 * t2n];
    let mut live_rows = vec![false; n1];
    for m1 in 0..n1 {
        let row = &spec[m1 * n2..(m1 + 1) * n2];
        let sparse: Vec<(usize, Complex64)> = row
            .iter()
            .enumerate()
            .filter(|(_, s)| s.norm() > floor)
            .map(|(m2, s)| (m2, s * scale))
            .collect();
        if sparse.is_empty() {
            continue;
        }
        live_rows[m1] = true;
        for (t2, dst) in partial[m1 * t2n..(m1 + 1) * t2n].iter_mut().enumerate() {
            let basis = &e2[t2 * n2..(t2 + 1) * n2];
            *dst = sparse.iter().map(|&(m2, s)| s * basis[m2]).sum();
        }
    }

    let e1 = interpolation_basis(&g1, &target1);
    let mut out = vec![Complex64::new(0.0, 0.0); t1n * t2n];
    for t1 in 0..t1n {
        let dst = &mut out[t1 * t2n..(t1 + 1) * t2n];
        for m1 in (0..n1).filter(|&m| live_rows[m]) {
            let b = e1[t1 * n1 + m1];
            for (d, p) in dst.iter_mut().zip(&partial[m1 * t2n..(m1 + 1) * t2n]) {
                *d += b * p;
            }
        }
    }
    ComplexField2D::from_vec(target1, target2, out)
}
