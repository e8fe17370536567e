//! Error type shared by every solver module.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown material `{0}` (catalog: aluminum, dragontrail glass, copper)")]
    UnknownMaterial(String),

    #[error("damping ratio given but bolt mass is zero; a mass is required to resolve a coefficient")]
    MissingMass,

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("position {position} m is outside the beam [0, {length} m]")]
    PositionOutOfRange { position: f64, length: f64 },

    #[error("attachment at {position} m does not coincide with any mesh node")]
    AttachmentNodeMissing { position: f64 },

    #[error("no attachment of the assembled system matches position {position} m")]
    UnknownAttachment { position: f64 },

    #[error("node index {node} out of range for a mesh with {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },

    #[error("mass matrix is singular or not positive definite")]
    SingularMass,

    #[error("eigensolver failed to converge within the iteration cap")]
    EigenNoConvergence,

    #[error("system is in resonance at {frequency_hz} Hz: the harmonic block system is numerically singular and no steady state exists")]
    ResonanceSingular { frequency_hz: f64 },

    #[error("modal eigenvector matrix is numerically rank-deficient; initial-condition coefficients are not determined")]
    EigenbasisSingular,

    #[error("trajectories have mismatched time grids")]
    GridMismatch,

    #[error("quantile group `{0}` is empty")]
    EmptyGroup(String),

    #[error("no sweep records at a node within half an element length of position {position} m")]
    NoSamplesAtPosition { position: f64 },

    #[error("effective stiffness factorization failed in the time integrator")]
    FactorizationFailure,

    #[error("invalid sweep specification: {0}")]
    SpecInvalid(String),

    #[error("invalid quantity `{input}`: {reason}")]
    InvalidQuantity { input: String, reason: String },

    #[error("invalid study configuration: {0}")]
    ConfigInvalid(String),
}
