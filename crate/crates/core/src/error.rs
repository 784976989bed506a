use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length `{name}` must be strictly positive and finite, got {value}")]
    NonPositiveLength { name: &'static str, value: f64 },

    #[error("slit width {slit_width} must be smaller than slit separation {slit_sep}")]
    OverlappingSlits { slit_sep: f64, slit_width: f64 },

    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: &'static str },

    #[error("grid too narrow: boundary amplitude is {edge_ratio:.3e} of peak")]
    GridTooNarrow { edge_ratio: f64 },

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("grids do not match")]
    GridMismatch,

    #[error("coordinate {value} outside grid range [{min}, {max})")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("aliasing risk: band-edge spectrum is {band_edge_ratio:.3e} of peak")]
    AliasingRisk { band_edge_ratio: f64 },

    #[error("propagation distance must be non-negative, got {distance}")]
    NegativeDistance { distance: f64 },

    #[error("direct Fresnel quadrature needs a strictly positive distance, got {distance}")]
    NonPositiveDistance { distance: f64 },

    #[error("Fresnel kernel under-sampled: phase step {phase_step:.3} cycles per input node")]
    KernelUnderSampled { phase_step: f64 },

    #[error("slit resolved by only {nodes_per_slit:.2} grid nodes (need at least 8)")]
    UnderResolvedSlit { nodes_per_slit: f64 },

    #[error("found {found} fringe peaks, need at least 3")]
    TooFewPeaks { found: usize },

    #[error("fringes sampled with {nodes_per_period:.2} nodes per period (need at least 10)")]
    UnderResolved { nodes_per_period: f64 },

    #[error("negative value {value} in a probability density")]
    NegativeDensity { value: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },
}
