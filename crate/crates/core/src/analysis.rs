//! Detection patterns and the numbers read off them: fringe spacing, local
//! visibility, envelope width, and pattern-to-pattern agreement.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::Serialize;

use crate::fields::Grid1D;
use crate::{Error, Result};

/// Peaks lower than this fraction of the global maximum are ignored.
pub const PEAK_FLOOR: f64 = 0.05;
/// Number of central fringes averaged for the spacing.
pub const CENTRAL_PEAKS: usize = 5;
pub const MIN_NODES_PER_PERIOD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize), serde(rename_all = "snake_case"))]
pub enum Provenance {
    Analytic,
    NumericOracle,
}

/// One-dimensional detection density with unit integral over its axis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Pattern {
    axis: Grid1D,
    density: Vec<f64>,
    provenance: Provenance,
    label: String,
}

impl Pattern {
    /// Normalizes `density` to unit integral over `axis`.
    pub fn new(
        axis: Grid1D,
        mut density: Vec<f64>,
        provenance: Provenance,
        label: impl Into<String>,
    ) -> Result<Self> {
        if density.len() != axis.len() {
            return Err(Error::GridMismatch);
        }
        if density.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "density" });
        }
        if let Some(&value) = density.iter().find(|&&v| v < 0.0) {
            return Err(Error::NegativeDensity { value });
        }
        let integral: f64 = density.iter().sum::<f64>() * axis.spacing();
        if !(integral > 0.0) {
            return Err(Error::ZeroNorm);
        }
        for v in &mut density {
            *v /= integral;
        }
        Ok(Self {
            axis,
            density,
            provenance,
            label: label.into(),
        })
    }

    pub fn axis(&self) -> &Grid1D {
        &self.axis
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.axis.spacing()
    }

    pub fn max(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }

    /// `max |P(x) - P(-x)| / max P` over node pairs mirrored about the origin.
    /// `None` if the axis has no mirrored pairs.
    pub fn symmetry_error(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for j in 0..self.axis.len() {
            if let Some(k) = self.axis.mirror_index(j) {
                let d = libm::fabs(self.density[j] - self.density[k]);
                worst = Some(worst.map_or(d, |w| w.max(d)));
            }
        }
        worst.map(|w| w / self.max())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct FringeMetrics {
    /// Mean distance between adjacent central maxima.
    pub spacing: f64,
    /// `(max - min) / (max + min)` of the central fringe and its neighbouring minima.
    pub visibility: f64,
    pub n_peaks_used: usize,
    /// Distance from the central maximum at which the fringe maxima fall to
    /// half its height; `None` if they never do inside the window.
    pub envelope_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Extremum {
    index: usize,
    x: f64,
    value: f64,
}

/// Vertex of the parabola through three equally spaced samples, as an offset
/// in nodes from the middle one, plus its height.
fn parabolic_vertex(left: f64, mid: f64, right: f64) -> (f64, f64) {
    let curvature = left - 2.0 * mid + right;
    if curvature == 0.0 {
        return (0.0, mid);
    }
    let offset = (0.5 * (left - right) / curvature).clamp(-0.5, 0.5);
    (offset, mid - 0.25 * (left - right) * offset)
}

fn find_peaks(p: &Pattern) -> Vec<Extremum> {
    let d = &p.density;
    let floor = PEAK_FLOOR * p.max();
    let dx = p.axis.spacing();
    (1..d.len().saturating_sub(1))
        .filter(|&i| d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] >= floor)
        .map(|i| {
            let (offset, value) = parabolic_vertex(d[i - 1], d[i], d[i + 1]);
            Extremum {
                index: i,
                x: p.axis.node(i) + offset * dx,
                value,
            }
        })
        .collect()
}

fn minimum_between(p: &Pattern, from: usize, to: usize) -> f64 {
    let d = &p.density;
    let i = (from..=to)
        .min_by(|&a, &b| d[a].total_cmp(&d[b]))
        .expect("non-empty range");
    let value = if i > 0 && i + 1 < d.len() {
        parabolic_vertex(d[i - 1], d[i], d[i + 1]).1
    } else {
        d[i]
    };
    value.max(0.0)
}

fn half_height_crossing<'a>(
    centre: &Extremum,
    outward: impl Iterator<Item = &'a Extremum>,
) -> Option<f64> {
    let half = 0.5 * centre.value;
    let mut prev = centre;
    for peak in outward {
        if peak.value < half {
            let t = (prev.value - half) / (prev.value - peak.value);
            let x = prev.x + t * (peak.x - prev.x);
            return Some(libm::fabs(x - centre.x));
        }
        prev = peak;
    }
    None
}

pub fn fringe_metrics(p: &Pattern) -> Result<FringeMetrics> {
    let peaks = find_peaks(p);
    if peaks.len() < 3 {
        return Err(Error::TooFewPeaks { found: peaks.len() });
    }
    let centre = peaks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|(i, _)| i)
        .expect("at least three peaks");

    let count = CENTRAL_PEAKS.min(peaks.len());
    let first = centre
        .saturating_sub(count / 2)
        .min(peaks.len() - count);
    let used = &peaks[first..first + count];
    let spacing = (used[count - 1].x - used[0].x) / (count - 1) as f64;

    let nodes_per_period = spacing / p.axis.spacing();
    if nodes_per_period < MIN_NODES_PER_PERIOD {
        return Err(Error::UnderResolved { nodes_per_period });
    }

    let c = &peaks[centre];
    let mut minima = Vec::with_capacity(2);
    if centre > 0 {
        minima.push(minimum_between(p, peaks[centre - 1].index, c.index));
    }
    if centre + 1 < peaks.len() {
        minima.push(minimum_between(p, c.index, peaks[centre + 1].index));
    }
    let i_min = minima.iter().sum::<f64>() / minima.len() as f64;
    let visibility = ((c.value - i_min) / (c.value + i_min)).clamp(0.0, 1.0);

    let right = half_height_crossing(c, peaks[centre + 1..].iter());
    let left = half_height_crossing(c, peaks[..centre].iter().rev());
    let envelope_halfwidth = match (left, right) {
        (Some(l), Some(r)) => Some(0.5 * (l + r)),
        (one, other) => one.or(other),
    };

    Ok(FringeMetrics {
        spacing,
        visibility,
        n_peaks_used: count,
        envelope_halfwidth,
    })
}

/// Agreement between two patterns on the same axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Comparison {
    /// `‖p1 - p2‖₂ / ‖p1‖₂`; normalized by the first pattern, so not symmetric.
    pub l2_err: f64,
    /// `max |p1 - p2| / max p1`.
    pub max_err: f64,
    /// Fringe spacing of `p1` over that of `p2`, when both can be measured.
    pub spacing_ratio: Option<f64>,
    /// Visibility of `p1` minus that of `p2`, when both can be measured.
    pub visibility_diff: Option<f64>,
    /// Half-width of the window the errors were computed over, if restricted.
    pub window: Option<f64>,
}

pub fn compare(p1: &Pattern, p2: &Pattern) -> Result<Comparison> {
    compare_impl(p1, p2, None)
}

/// Like [`compare`], with both patterns renormalized over `|x| <= half_width`
/// before the errors are taken. Fringe metrics still use the full patterns.
pub fn compare_within(p1: &Pattern, p2: &Pattern, half_width: f64) -> Result<Comparison> {
    compare_impl(p1, p2, Some(half_width))
}

fn compare_impl(p1: &Pattern, p2: &Pattern, window: Option<f64>) -> Result<Comparison> {
    if !p1.axis.same_as(&p2.axis) {
        return Err(Error::GridMismatch);
    }
    let keep: Vec<usize> = (0..p1.axis.len())
        .filter(|&j| window.is_none_or(|w| libm::fabs(p1.axis.node(j)) <= w))
        .collect();
    let sum1: f64 = keep.iter().map(|&j| p1.density[j]).sum();
    let sum2: f64 = keep.iter().map(|&j| p2.density[j]).sum();
    if !(sum1 > 0.0 && sum2 > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let (mut diff2, mut ref2, mut max_diff, mut max_ref) = (0.0, 0.0, 0.0f64, 0.0f64);
    for &j in &keep {
        let a = p1.density[j] / sum1;
        let b = p2.density[j] / sum2;
        diff2 += (a - b) * (a - b);
        ref2 += a * a;
        max_diff = max_diff.max(libm::fabs(a - b));
        max_ref = max_ref.max(a);
    }
    let (m1, m2) = (fringe_metrics(p1).ok(), fringe_metrics(p2).ok());
    let both = m1.zip(m2);
    Ok(Comparison {
        l2_err: libm::sqrt(diff2 / ref2),
        max_err: max_diff / max_ref,
        spacing_ratio: both.map(|(a, b)| a.spacing / b.spacing),
        visibility_diff: both.map(|(a, b)| a.visibility - b.visibility),
        window,
    })
}
