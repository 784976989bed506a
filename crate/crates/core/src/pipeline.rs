//! End-to-end scenario runs: closed-form laws next to the grid oracle.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::analysis::{compare, compare_within, fringe_metrics, Comparison, FringeMetrics, Pattern};
use crate::fields::{sample_gepr, ComplexField2D, Grid1D};
use crate::model::{self, FinalStateTerms};
use crate::optics::{self, DoubleSlitMask, SlitCaseWeights};
use crate::params::{ExperimentParams, Geometry, RegimeReport};
use crate::propagation::{fresnel_direct, propagate_analytic, propagate_numeric, resample_bandlimited};
use crate::Error;

pub const SCREEN_NODES: usize = 1024;
/// Screen nodes per coincidence fringe.
pub const NODES_PER_FRINGE: f64 = 20.0;
pub const APERTURE_NODES_PER_SLIT: f64 = 16.0;
/// Largest source grid (per axis) the oracle will allocate.
pub const MAX_SOURCE_NODES: usize = 2048;
const MIN_SOURCE_NODES: usize = 128;
/// Squared margin, in e-folds, of the source grid in both position and
/// wavenumber.
const SOURCE_MARGIN2: f64 = 15.0;
/// Half-width of the central comparison window, in fringes.
pub const CENTRAL_FRINGES: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum ScenarioKind {
    BiphotonCoincidence,
    NonlocalCoincidence,
    ConditionalSingle,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::BiphotonCoincidence,
        ScenarioKind::NonlocalCoincidence,
        ScenarioKind::ConditionalSingle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::BiphotonCoincidence => "biphoton_coincidence",
            ScenarioKind::NonlocalCoincidence => "nonlocal_coincidence",
            ScenarioKind::ConditionalSingle => "conditional_single",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_coincidence(self) -> bool {
        !matches!(self, ScenarioKind::ConditionalSingle)
    }

    pub fn geometry(self) -> Geometry {
        match self {
            ScenarioKind::NonlocalCoincidence => Geometry::Nonlocal,
            _ => Geometry::Colocated,
        }
    }

    /// Expected fringe period of the observed pattern.
    pub fn fringe(self, p: &ExperimentParams) -> f64 {
        if self.is_coincidence() {
            p.coincidence_fringe()
        } else {
            p.conditional_fringe()
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where things sit along the beam, for the report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct ScenarioLayout {
    pub geometry: Geometry,
    /// Positions of the slit planes along the beam, source at 0.
    pub slit_planes: Vec<f64>,
    pub detector_planes: Vec<f64>,
    pub detection: &'static str,
    pub analytic_label: &'static str,
    pub oracle_label: &'static str,
}

impl ScenarioLayout {
    pub fn new(kind: ScenarioKind, p: &ExperimentParams) -> Self {
        let (l, far) = (p.dist_source_slit, p.dist_source_slit + p.dist_slit_screen);
        match kind {
            ScenarioKind::BiphotonCoincidence => Self {
                geometry: Geometry::Colocated,
                slit_planes: alloc::vec![l],
                detector_planes: alloc::vec![far],
                detection: "both photons detected at the same screen position",
                analytic_label: "coincidence law",
                oracle_label: "oracle |psi(x, x)|^2",
            },
            ScenarioKind::NonlocalCoincidence => Self {
                geometry: Geometry::Nonlocal,
                slit_planes: alloc::vec![-l, l],
                detector_planes: alloc::vec![-far, far],
                detection: "detectors D1 and D2 on opposite sides move in synchrony along x and count in coincidence",
                analytic_label: "coincidence law, D1 and D2 in synchrony",
                oracle_label: "oracle |psi(x1 = x, x2 = x)|^2, opposite arms",
            },
            ScenarioKind::ConditionalSingle => Self {
                geometry: Geometry::Colocated,
                slit_planes: alloc::vec![l],
                detector_planes: alloc::vec![far],
                detection: "photon 1 scanned with photon 2 held at x2 = 0",
                analytic_label: "conditional law",
                oracle_label: "oracle |psi(x1, 0)|^2",
            },
        }
    }
}

/// The three grids of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct GridPlan {
    /// Source grid for the oracle; `None` when it would exceed
    /// [`MAX_SOURCE_NODES`].
    pub source: Option<Grid1D>,
    /// Nodes per axis the source grid would need.
    pub source_nodes: usize,
    pub aperture: Grid1D,
    pub screen: Grid1D,
}

impl GridPlan {
    pub fn auto(p: &ExperimentParams) -> Result<Self, Error> {
        let (source_nodes, source) = source_grid(p)?;
        Ok(Self {
            source,
            source_nodes,
            aperture: aperture_grid(p)?,
            screen: Grid1D::centered(
                0.5 * SCREEN_NODES as f64 * p.coincidence_fringe() / NODES_PER_FRINGE,
                SCREEN_NODES,
            )?,
        })
    }
}

/// Picks `N` and `Δx` so that the half-width `NΔx/2` is `M` widths `W` of the
/// state at the slit plane and the Nyquist wavenumber `π/Δx` is `M` times the
/// spectral width `1/s`, with `M² = πsN/2W` at least [`SOURCE_MARGIN2`].
fn source_grid(p: &ExperimentParams) -> Result<(usize, Option<Grid1D>), Error> {
    let (s2, w2, a) = (p.sigma * p.sigma, p.omega_big * p.omega_big, p.alpha());
    let s = libm::sqrt(s2 * w2 / (s2 + w2));
    let w = libm::sqrt((s2 * s2 + a * a) / s2 + (w2 * w2 + a * a) / w2);
    let needed = 2.0 * w * SOURCE_MARGIN2 / (core::f64::consts::PI * s);
    let n = if needed > (1u64 << 40) as f64 {
        usize::MAX
    } else {
        (libm::ceil(needed) as usize).next_power_of_two().max(MIN_SOURCE_NODES)
    };
    if n > MAX_SOURCE_NODES {
        return Ok((n, None));
    }
    let dx = libm::sqrt(2.0 * core::f64::consts::PI * s * w / n as f64);
    Ok((n, Some(Grid1D::centered(0.5 * n as f64 * dx, n)?)))
}

/// Window just holding both slits, with slit edges kept off the nodes when the
/// half-cell layout allows it.
fn aperture_grid(p: &ExperimentParams) -> Result<Grid1D, Error> {
    let dx = p.slit_width / APERTURE_NODES_PER_SLIT;
    let span = p.slit_sep + p.slit_width + APERTURE_NODES_PER_SLIT * dx;
    let n = (libm::ceil(span / dx) as usize).next_power_of_two();
    let half = 0.5 * n as f64 * dx;
    let staggered = Grid1D::staggered(half, n)?;
    let (h, e) = (0.5 * p.slit_sep, 0.5 * p.slit_width);
    let edges_off_nodes = [-h - e, -h + e, h - e, h + e].iter().all(|&edge| {
        let t = (edge - staggered.x_min()) / dx;
        libm::fabs(t - libm::round(t)) > 1e-6
    });
    if edges_off_nodes {
        Ok(staggered)
    } else {
        Grid1D::centered(half, n)
    }
}

/// Numeric position and wavenumber spreads of the sampled source state next
/// to the closed forms `√(Ω² + σ²)` and `¼√(1/σ² + 1/Ω²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct UncertaintyAudit {
    pub dx_numeric: f64,
    pub dx_closed_form: f64,
    pub dx_ratio: f64,
    pub dk_numeric: f64,
    pub dk_closed_form: f64,
    pub dk_ratio: f64,
}

pub fn uncertainty_audit(source: &ComplexField2D, p: &ExperimentParams) -> Result<UncertaintyAudit, Error> {
    let m = source.moments()?;
    let k = source.spectral_moments()?;
    let (s2, w2) = (p.sigma * p.sigma, p.omega_big * p.omega_big);
    let dx_numeric = libm::sqrt(m.var_x1);
    let dx_closed_form = libm::sqrt(w2 + s2);
    let dk_numeric = libm::sqrt(k.var_k1);
    let dk_closed_form = 0.25 * libm::sqrt(1.0 / s2 + 1.0 / w2);
    Ok(UncertaintyAudit {
        dx_numeric,
        dx_closed_form,
        dx_ratio: dx_numeric / dx_closed_form,
        dk_numeric,
        dk_closed_form,
        dk_ratio: dk_numeric / dk_closed_form,
    })
}

/// Four-term amplitude at the screen centre against the oracle node there.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct CenterCheck {
    pub analytic: Complex64,
    pub oracle: Complex64,
    /// `|oracle| / |analytic|`.
    pub modulus_ratio: f64,
    /// `|oracle - analytic| / |analytic|`.
    pub relative_diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct CaseWeightReport {
    /// From the closed-form state at the slit plane.
    pub analytic: SlitCaseWeights,
    /// From the spectrally propagated oracle field.
    pub oracle: Option<SlitCaseWeights>,
    /// Partition over the `(r, q)` squares, when it differs from `analytic`.
    pub rq: Option<SlitCaseWeights>,
    /// `weight_diff / weight_same` of the four-term state, for comparison
    /// with `p_diff / p_same`.
    pub term_weight_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct Report {
    pub kind: ScenarioKind,
    pub params: ExperimentParams,
    pub regime: RegimeReport,
    pub plan: GridPlan,
    pub layout: ScenarioLayout,
    pub terms: FinalStateTerms,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub analytic: Pattern,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub numeric: Option<Pattern>,
    pub analytic_metrics: Option<FringeMetrics>,
    pub numeric_metrics: Option<FringeMetrics>,
    pub analytic_symmetry: Option<f64>,
    pub numeric_symmetry: Option<f64>,
    pub comparison: Option<Comparison>,
    pub comparison_central: Option<Comparison>,
    pub case_weights: CaseWeightReport,
    pub uncertainty: Option<UncertaintyAudit>,
    pub center: Option<CenterCheck>,
    pub oracle_skipped: Option<String>,
    /// Metrics or comparisons that could not be formed.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

fn at(stage: &'static str) -> impl FnOnce(Error) -> PipelineError {
    move |source| PipelineError { stage, source }
}

fn note<T>(warnings: &mut Vec<String>, what: &str, r: Result<T, Error>) -> Option<T> {
    r.map_err(|e| warnings.push(alloc::format!("{what}: {e}"))).ok()
}

pub fn run(kind: ScenarioKind, params: &ExperimentParams) -> Result<Report, PipelineError> {
    params.validate().map_err(at("params"))?;
    let plan = GridPlan::auto(params).map_err(at("plan"))?;
    run_with_plan(kind, params, &plan)
}

struct Oracle {
    pattern: Pattern,
    case_weights: SlitCaseWeights,
    uncertainty: UncertaintyAudit,
    center: Complex64,
    screen: ComplexField2D,
}

fn run_oracle(
    kind: ScenarioKind,
    p: &ExperimentParams,
    source: Grid1D,
    plan: &GridPlan,
    mask: &DoubleSlitMask,
    label: &str,
) -> Result<Oracle, PipelineError> {
    let psi0 = sample_gepr(p, source, source).map_err(at("sample"))?;
    let uncertainty = uncertainty_audit(&psi0, p).map_err(at("audit"))?;
    let psi_l = propagate_numeric(&psi0, p, p.dist_source_slit).map_err(at("propagate_source_slit"))?;
    let total = psi_l.norm2();
    let at_slits =
        resample_bandlimited(&psi_l, plan.aperture, plan.aperture).map_err(at("resample"))?;
    let case_weights =
        optics::case_weights_with_total(&at_slits, mask, total).map_err(at("case_weights"))?;
    let masked = optics::apply_mask(&at_slits, mask).map_err(at("mask"))?;
    let screen = fresnel_direct(&masked, p, p.dist_slit_screen, plan.screen, plan.screen)
        .map_err(at("propagate_slit_screen"))?;
    let slice = if kind.is_coincidence() {
        screen.diagonal_slice()
    } else {
        screen.conditional_slice(0.0)
    };
    let pattern = slice.map_err(at("slice"))?.with_label(label);
    let origin = plan.screen.nearest_index(0.0).map_err(at("slice"))?;
    Ok(Oracle {
        pattern,
        case_weights,
        uncertainty,
        center: screen.at(origin, origin),
        screen,
    })
}

pub fn run_with_plan(
    kind: ScenarioKind,
    params: &ExperimentParams,
    plan: &GridPlan,
) -> Result<Report, PipelineError> {
    run_keeping_screen(kind, params, plan).map(|(r, _)| r)
}

/// Like [`run_with_plan`], also returning the oracle field on the screen grid.
pub fn run_keeping_screen(
    kind: ScenarioKind,
    params: &ExperimentParams,
    plan: &GridPlan,
) -> Result<(Report, Option<ComplexField2D>), PipelineError> {
    let mut p = *params;
    p.scenario = kind.geometry();
    let regime = p.validate().map_err(at("params"))?;
    let layout = ScenarioLayout::new(kind, &p);
    let mut warnings = Vec::new();

    let terms = model::term_weights(&p).map_err(at("terms"))?;
    let analytic = if kind.is_coincidence() {
        model::coincidence_pattern(plan.screen, &terms)
    } else {
        model::conditional_pattern(plan.screen, &terms)
    }
    .map_err(at("analytic"))?
    .with_label(layout.analytic_label);

    let mask = DoubleSlitMask::from_params(&p).map_err(at("mask"))?;
    let gb = propagate_analytic(&p, p.dist_source_slit).map_err(at("analytic"))?;
    let closed = ComplexField2D::from_fn(plan.aperture, plan.aperture, |a, b| gb.amplitude(a, b));
    let analytic_weights =
        optics::case_weights_with_total(&closed, &mask, 1.0).map_err(at("case_weights"))?;
    let rq = optics::rq_partition_if_different(&closed, &mask, 1.0, &analytic_weights)
        .map_err(at("case_weights"))?;

    let (oracle, oracle_skipped) = match plan.source {
        Some(source) => (
            Some(run_oracle(kind, &p, source, plan, &mask, layout.oracle_label)?),
            None,
        ),
        None => (
            None,
            Some(alloc::format!(
                "source grid would need {}^2 nodes (limit {}^2)",
                plan.source_nodes, MAX_SOURCE_NODES
            )),
        ),
    };

    let analytic_metrics = note(&mut warnings, "analytic metrics", fringe_metrics(&analytic));
    let numeric = oracle.as_ref().map(|o| o.pattern.clone());
    let numeric_metrics = numeric
        .as_ref()
        .and_then(|n| note(&mut warnings, "oracle metrics", fringe_metrics(n)));
    let comparison = numeric
        .as_ref()
        .and_then(|n| note(&mut warnings, "comparison", compare(&analytic, n)));
    let central = CENTRAL_FRINGES * kind.fringe(&p);
    let comparison_central = numeric.as_ref().and_then(|n| {
        note(&mut warnings, "central comparison", compare_within(&analytic, n, central))
    });
    let center = oracle.as_ref().map(|o| {
        let a = model::final_state_amplitude(0.0, 0.0, &terms);
        CenterCheck {
            analytic: a,
            oracle: o.center,
            modulus_ratio: o.center.norm() / a.norm(),
            relative_diff: (o.center - a).norm() / a.norm(),
        }
    });

    let report = Report {
        kind,
        params: p,
        regime,
        plan: *plan,
        layout,
        terms,
        analytic_symmetry: analytic.symmetry_error(),
        numeric_symmetry: numeric.as_ref().and_then(Pattern::symmetry_error),
        analytic,
        numeric,
        analytic_metrics,
        numeric_metrics,
        comparison,
        comparison_central,
        case_weights: CaseWeightReport {
            analytic: analytic_weights,
            oracle: oracle.as_ref().map(|o| o.case_weights),
            rq,
            term_weight_ratio: terms.weight_diff / terms.weight_same,
        },
        uncertainty: oracle.as_ref().map(|o| o.uncertainty),
        center,
        oracle_skipped,
        warnings,
    };
    Ok((report, oracle.map(|o| o.screen)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan() {
        let plan = GridPlan::auto(&ExperimentParams::default()).unwrap();
        assert_eq!(plan.source.unwrap().len(), 1024);
        assert_eq!(plan.aperture.len(), 512);
        assert!((plan.aperture.spacing() - 0.0125).abs() < 1e-15);
        // Half-cell layout: no node at the origin.
        assert!(plan.aperture.nearest_index(0.0).map_or(true, |j| plan.aperture.node(j).abs() > 1e-3));
        assert_eq!(plan.screen.len(), SCREEN_NODES);
        assert!((plan.screen.spacing() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tight_correlation_skips_the_oracle() {
        let p = ExperimentParams {
            sigma: 0.1,
            ..Default::default()
        };
        let plan = GridPlan::auto(&p).unwrap();
        assert!(plan.source.is_none());
        assert!(plan.source_nodes > MAX_SOURCE_NODES);
    }

    #[test]
    fn names_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(ScenarioKind::from_name(k.name()), Some(k));
        }
        assert_eq!(ScenarioKind::from_name("young"), None);
    }

    #[test]
    fn invalid_params_name_the_stage() {
        let p = ExperimentParams {
            slit_width: 6.0,
            ..Default::default()
        };
        let err = run(ScenarioKind::BiphotonCoincidence, &p).unwrap_err();
        assert_eq!(err.stage, "params");
    }

    #[test]
    fn skipped_oracle_still_reports_the_analytic_side() {
        let p = ExperimentParams {
            sigma: 0.1,
            ..Default::default()
        };
        let r = run(ScenarioKind::BiphotonCoincidence, &p).unwrap();
        assert!(r.numeric.is_none() && r.oracle_skipped.is_some());
        assert!(r.case_weights.analytic.diff_to_same() < 1e-3);
        let m = r.analytic_metrics.unwrap();
        assert!((m.spacing / p.coincidence_fringe() - 1.0).abs() < 1e-2);
    }
}
