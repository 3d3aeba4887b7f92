//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GtomoError {
    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("deterministic grids only for n <= 3; use Monte Carlo")]
    NoDeterministicGrid { n: usize },

    #[error("subsphere is two antipodal points; handled directly")]
    SubsphereDegenerate,

    #[error("deterministic subsphere grids only for 3 <= n <= 4, got n = {n}")]
    SubsphereUnsupported { n: usize },

    #[error("subspace dimension k = {k} out of range 1..={max} for n = {n}")]
    SubspaceDimension { n: usize, k: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eps too large: convexity fails with margin {margin:.3e} near {location}")]
    EpsTooLarge { margin: f64, location: String },

    #[error("body is not convex: curvature margin {margin:.3e} near {location}")]
    NotConvex { margin: f64, location: String },

    #[error("radial function is not strictly positive (found {value:.3e})")]
    NonPositiveRadial { value: f64 },

    #[error("malformed body: ray from slice center never exits the body")]
    RayNeverExits,

    #[error("body too thin for rejection sampling")]
    RejectionTooThin,

    #[error("quadrature grid too coarse: exact through degree {have}, need {need}")]
    GridTooCoarse { have: usize, need: usize },

    #[error("odd-degree content in an even-function transform (norm {norm:.3e})")]
    OddContent { norm: f64 },

    #[error("target is not the intersection body of a star body at this eps (min inverted value {min:.3e})")]
    NotAnIntersectionBody { min: f64 },

    #[error("odd q = {q} excluded: the fractional derivative vanishes identically there")]
    OddOrderExcluded { q: f64 },

    #[error("order q = {q} outside the admissible range ({lo}, {hi})")]
    OrderOutOfRange { q: f64, lo: f64, hi: f64 },

    #[error("samples exceed the stated bound R = {bound} (max sample {max})")]
    SamplesExceedBound { bound: f64, max: f64 },

    #[error("empty sample set")]
    EmptySamples,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GtomoError>;
