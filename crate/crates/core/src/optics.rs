//! Hard-edged double-slit truncation and the same-slit / different-slit
//! bookkeeping of the surviving probability.

#[cfg(feature = "serde")]
use serde::Serialize;

use crate::fields::ComplexField2D;
use crate::params::ExperimentParams;
use crate::{Error, Result};

pub const MIN_NODES_PER_SLIT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slit {
    Lower,
    Upper,
}

/// Two slits of width `slit_width` centred at `±slit_sep / 2`, fully open
/// inside (edges included) and opaque elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct DoubleSlitMask {
    slit_sep: f64,
    slit_width: f64,
}

impl DoubleSlitMask {
    pub fn new(slit_sep: f64, slit_width: f64) -> Result<Self> {
        for (name, value) in [("slit_sep", slit_sep), ("slit_width", slit_width)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveLength { name, value });
            }
        }
        if slit_width >= slit_sep {
            return Err(Error::OverlappingSlits {
                slit_sep,
                slit_width,
            });
        }
        Ok(Self {
            slit_sep,
            slit_width,
        })
    }

    pub fn from_params(p: &ExperimentParams) -> Result<Self> {
        Self::new(p.slit_sep, p.slit_width)
    }

    pub fn slit_sep(&self) -> f64 {
        self.slit_sep
    }

    pub fn slit_width(&self) -> f64 {
        self.slit_width
    }

    pub fn slit_of(&self, x: f64) -> Option<Slit> {
        // Closed intervals; the slack absorbs rounding in node positions.
        let half = 0.5 * self.slit_width * (1.0 + 1e-9);
        let centre = 0.5 * self.slit_sep;
        if libm::fabs(x - centre) <= half {
            Some(Slit::Upper)
        } else if libm::fabs(x + centre) <= half {
            Some(Slit::Lower)
        } else {
            None
        }
    }

    pub fn transmission(&self, x: f64) -> f64 {
        if self.slit_of(x).is_some() {
            1.0
        } else {
            0.0
        }
    }
}

fn ensure_resolved(field: &ComplexField2D, mask: &DoubleSlitMask) -> Result<()> {
    let coarsest = field.grid1().spacing().max(field.grid2().spacing());
    let nodes_per_slit = mask.slit_width / coarsest;
    if nodes_per_slit < MIN_NODES_PER_SLIT {
        Err(Error::UnderResolvedSlit { nodes_per_slit })
    } else {
        Ok(())
    }
}

/// Multiplies the amplitude by `T(x1)·T(x2)`.
pub fn apply_mask(field: &ComplexField2D, mask: &DoubleSlitMask) -> Result<ComplexField2D> {
    ensure_resolved(field, mask)?;
    let t2: alloc::vec::Vec<f64> = field.grid2().nodes().map(|x| mask.transmission(x)).collect();
    let g1 = *field.grid1();
    let mut out = field.clone();
    let n2 = t2.len();
    for (i1, row) in out.amplitudes_mut().chunks_exact_mut(n2).enumerate() {
        let t1 = mask.transmission(g1.node(i1));
        for (a, t) in row.iter_mut().zip(&t2) {
            *a *= t1 * t;
        }
    }
    Ok(out)
}

/// Partition of the pair probability at the slit plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct SlitCaseWeights {
    /// Both photons inside the same slit.
    pub p_same: f64,
    /// The photons inside different slits.
    pub p_diff: f64,
    /// At least one photon absorbed.
    pub p_blocked: f64,
}

impl SlitCaseWeights {
    /// `p_diff / p_same`, or infinity when nothing passes through a single slit.
    pub fn diff_to_same(&self) -> f64 {
        if self.p_same > 0.0 {
            self.p_diff / self.p_same
        } else {
            f64::INFINITY
        }
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        libm::fabs(self.p_same - other.p_same)
            .max(libm::fabs(self.p_diff - other.p_diff))
            .max(libm::fabs(self.p_blocked - other.p_blocked))
    }
}

fn partition(
    field: &ComplexField2D,
    total: f64,
    classify: impl Fn(f64, f64) -> Option<bool>,
) -> Result<SlitCaseWeights> {
    if !(total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let (mut same, mut diff) = (0.0, 0.0);
    for (i1, x1) in field.grid1().nodes().enumerate() {
        for (i2, x2) in field.grid2().nodes().enumerate() {
            match classify(x1, x2) {
                Some(true) => same += field.at(i1, i2).norm_sqr(),
                Some(false) => diff += field.at(i1, i2).norm_sqr(),
                None => {}
            }
        }
    }
    let area = field.cell_area();
    let (p_same, p_diff) = (same * area / total, diff * area / total);
    Ok(SlitCaseWeights {
        p_same,
        p_diff,
        p_blocked: 1.0 - p_same - p_diff,
    })
}

/// Case weights as fractions of the field's own norm.
pub fn case_weights(field: &ComplexField2D, mask: &DoubleSlitMask) -> Result<SlitCaseWeights> {
    case_weights_with_total(field, mask, field.norm2())
}

/// Case weights as fractions of `total_norm2`, for fields sampled on a window
/// that holds only part of the state.
pub fn case_weights_with_total(
    field: &ComplexField2D,
    mask: &DoubleSlitMask,
    total_norm2: f64,
) -> Result<SlitCaseWeights> {
    partition(field, total_norm2, |x1, x2| {
        match (mask.slit_of(x1), mask.slit_of(x2)) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        }
    })
}

/// Case weights over the approximate regions written in centre-of-mass and
/// relative coordinates: same slit is `|r ∓ d/2| ≤ ε/2, |q| ≤ ε/2`, different
/// slits `|q ∓ d/2| ≤ ε/2, |r| ≤ ε/2`.
pub fn case_weights_rq(
    field: &ComplexField2D,
    mask: &DoubleSlitMask,
    total_norm2: f64,
) -> Result<SlitCaseWeights> {
    let half = 0.5 * mask.slit_width * (1.0 + 1e-9);
    let centre = 0.5 * mask.slit_sep;
    partition(field, total_norm2, |x1, x2| {
        let r = 0.5 * (x1 + x2);
        let q = 0.5 * (x1 - x2);
        if libm::fabs(libm::fabs(r) - centre) <= half && libm::fabs(q) <= half {
            Some(true)
        } else if libm::fabs(libm::fabs(q) - centre) <= half && libm::fabs(r) <= half {
            Some(false)
        } else {
            None
        }
    })
}

/// The `(r, q)` partition, returned only if it differs from the exact one by
/// more than `1e-3` in any probability.
pub fn rq_partition_if_different(
    field: &ComplexField2D,
    mask: &DoubleSlitMask,
    total_norm2: f64,
    exact: &SlitCaseWeights,
) -> Result<Option<SlitCaseWeights>> {
    let rq = case_weights_rq(field, mask, total_norm2)?;
    Ok((rq.max_abs_diff(exact) > 1e-3).then_some(rq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid1D;
    use crate::propagation::{propagate_analytic, sample_gaussian};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn window() -> Grid1D {
        Grid1D::staggered(3.2, 512).unwrap()
    }

    fn slit_plane_state(sigma: f64, omega_big: f64, dist: f64) -> ComplexField2D {
        let p = ExperimentParams {
            sigma,
            omega_big,
            dist_source_slit: dist,
            ..Default::default()
        };
        let gb = propagate_analytic(&p, dist).unwrap();
        ComplexField2D::from_fn(window(), window(), |a, b| gb.amplitude(a, b))
    }

    #[test]
    fn mask_geometry() {
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        assert_eq!(m.transmission(0.0), 0.0);
        assert_eq!(m.transmission(2.5), 1.0);
        assert_eq!(m.transmission(-2.6), 1.0);
        assert_eq!(m.transmission(2.4), 1.0);
        assert_eq!(m.transmission(2.61), 0.0);
        assert!(matches!(DoubleSlitMask::new(1.0, 1.0), Err(Error::OverlappingSlits { .. })));
    }

    #[test]
    fn masked_nodes() {
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        let g = Grid1D::centered(3.2, 512).unwrap();
        let f = ComplexField2D::from_fn(g, g, |_, _| Complex64::new(1.0, 0.5));
        let out = apply_mask(&f, &m).unwrap();
        let origin = g.nearest_index(0.0).unwrap();
        let slit = g.nearest_index(2.5).unwrap();
        assert_eq!(out.at(origin, origin), Complex64::new(0.0, 0.0));
        assert_eq!(out.at(slit, slit), Complex64::new(1.0, 0.5));
        assert_eq!(out.at(slit, origin), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn uniform_field_survives_in_proportion_to_open_area() {
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        let g = window();
        let f = ComplexField2D::from_fn(g, g, |_, _| Complex64::new(1.0, 0.0));
        let out = apply_mask(&f, &m).unwrap();
        let expected = (2.0 * 0.2 / 6.4) * (2.0 * 0.2 / 6.4);
        assert!((out.norm2() / f.norm2() - expected).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        let g = Grid1D::centered(3.2, 128).unwrap();
        let f = ComplexField2D::zeros(g, g);
        assert!(matches!(apply_mask(&f, &m), Err(Error::UnderResolvedSlit { .. })));
    }

    #[test]
    fn tight_correlation_suppresses_different_slits() {
        // σ = d/50, Ω = 10d, short arm.
        let f = slit_plane_state(0.1, 50.0, 0.01);
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        let w = case_weights_with_total(&f, &m, 1.0).unwrap();
        assert!(w.p_same > 0.0);
        assert!(w.diff_to_same() < 1e-6, "{w:?}");
    }

    #[test]
    fn product_state_makes_all_four_squares_equal() {
        let f = slit_plane_state(50.0, 50.0, 0.01);
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        let w = case_weights_with_total(&f, &m, 1.0).unwrap();
        assert!((w.p_diff / w.p_same - 1.0).abs() < 0.02, "{w:?}");
    }

    #[test]
    fn weights_partition_the_plane() {
        let f = slit_plane_state(0.5, 50.0, 0.1);
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        for w in [
            case_weights(&f, &m).unwrap(),
            case_weights_with_total(&f, &m, 1.0).unwrap(),
        ] {
            assert!((w.p_same + w.p_diff + w.p_blocked - 1.0).abs() < 1e-8);
            assert!((0.0..=1.0).contains(&w.p_same) && (0.0..=1.0).contains(&w.p_diff));
        }
        let zero = ComplexField2D::zeros(window(), window());
        assert_eq!(case_weights(&zero, &m), Err(Error::ZeroNorm));
    }

    #[test]
    fn different_slit_share_falls_with_sigma() {
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        let sigmas = [50.0, 10.0, 3.0, 1.0, 0.5, 0.2];
        let ratios: alloc::vec::Vec<f64> = sigmas
            .iter()
            .map(|&s| {
                let f = slit_plane_state(s, 50.0, 0.01);
                case_weights_with_total(&f, &m, 1.0).unwrap().diff_to_same()
            })
            .collect();
        for pair in ratios.windows(2) {
            assert!(pair[1] <= pair[0], "{ratios:?}");
        }
    }

    #[test]
    fn rotated_partition_is_reported_only_when_it_differs() {
        let m = DoubleSlitMask::new(5.0, 0.2).unwrap();
        // Uniform over the window: the (r,q) squares have twice the area.
        let g = window();
        let flat = ComplexField2D::from_fn(g, g, |_, _| Complex64::new(1.0, 0.0));
        let exact = case_weights(&flat, &m).unwrap();
        let rq = rq_partition_if_different(&flat, &m, flat.norm2(), &exact).unwrap();
        assert!(rq.is_some());
        let rq = rq.unwrap();
        // Nodes on the rotated edges add O(Δx/ε) to the continuum ratio of 2.
        assert!((rq.p_same / exact.p_same - 2.0).abs() < 0.15, "{rq:?} {exact:?}");
    }

    proptest! {
        #[test]
        fn masking_is_idempotent_and_never_adds_norm(seed in 0u64..1000) {
            let g = Grid1D::staggered(3.2, 256).unwrap();
            let m = DoubleSlitMask::new(5.0, 0.4).unwrap();
            let f = ComplexField2D::from_fn(g, g, |a, b| {
                let t = (seed as f64) * 0.37 + a * 1.3 - b * 0.7;
                Complex64::new(libm::sin(t), libm::cos(3.0 * t))
            });
            let once = apply_mask(&f, &m).unwrap();
            let twice = apply_mask(&once, &m).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(once.norm2() <= f.norm2());
        }
    }

    #[test]
    fn sampled_state_helper_is_unused_elsewhere() {
        // sample_gaussian rejects the slit window: the state extends far beyond it.
        let p = ExperimentParams::default();
        let gb = propagate_analytic(&p, 0.1).unwrap();
        assert!(matches!(
            sample_gaussian(&gb, window(), window()),
            Err(Error::GridTooNarrow { .. })
        ));
    }
}
