//! Equivariant boundary homeomorphisms of the real line, their
//! quasi-symmetry constants, Douady-Earle extensions and the induced maps
//! between round annuli.

mod annulus;
mod barycenter;
mod boundary;
mod extension;

pub use annulus::{
    annulus_moduli, annulus_modulus, cover, glue_annulus_map, quotient_modulus, AnnulusPair, AnnulusReport,
    AnnulusSample, TraceCheck,
};
pub use barycenter::{
    cayley, cayley_inverse, conformal_barycenter, douady_earle, douady_earle_half_plane, half_plane_barycenter, half_plane_nodes, DeOptions,
    DeValue, SampledCircleMap, MIN_NODES,
};
pub use boundary::{
    build_boundary_map, qs_constants, qs_ratio, BoundaryMap, BoundaryMapSpec, CaseReport, Extremum, Fundamental,
    MonotoneCubic, QsGrid, QsReport,
};
pub use extension::{
    beltrami_central, dilatation, extend_equivariant, fundamental_grid, ExtensionGrid, ExtensionOptions, GridPoint,
    BREACH_LEVEL,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QcError {
    #[error("samples are not strictly increasing at index {index}")]
    Monotonicity { index: usize },
    #[error("equivariance seam violated: Ψ(k)/Ψ(1) = {found}, expected κ = {expected}")]
    Seam { expected: f64, found: f64 },
    #[error("{name} must be finite and greater than 1, got {value}")]
    InvalidMultiplier { name: &'static str, value: f64 },
    #[error("barycenter solver stopped after {iterations} iterations with residual {residual:e}")]
    SolverDivergence { iterations: usize, residual: f64 },
    #[error("quadrature needs at least {min} nodes, got {nodes}")]
    TooFewNodes { nodes: usize, min: usize },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid point: {0}")]
    BadPoint(String),
    #[error("{0}")]
    Mismatch(String),
}
