//! Finite-element simulator for beam-type haptic touch bars driven by
//! electrostatic resonating actuators.
//!
//! The bar is a thin Euler-Bernoulli beam discretized with two-node Hermite
//! elements; actuators appear as grounded spring-damper-mass attachments
//! that transmit sinusoidal base displacements. The crate computes exact
//! multi-frequency steady-state response, damped modes, complete transient
//! solutions, peak-acceleration fields in g-units, and runs the placement /
//! frequency / stiffness parameter studies behind the published figures.
//!
//! Modules mirror the pipeline:
//! - [`model`]: validated physical records and unit parsing
//! - [`fem`]: meshing and global M, C, K assembly
//! - [`modal`]: state-space damped modes and analytical references
//! - [`response`]: steady-state, complete response, peak fields
//! - [`oracle`]: Newmark time integration for cross-validation
//! - [`sweep`]: deterministic (optionally rayon-parallel) study engine

pub mod error;
pub mod fem;
pub mod modal;
pub mod model;
pub mod oracle;
pub mod response;
pub mod sweep;

pub use error::{Error, Result};
pub use fem::{assemble, constrain_pinned, generate_mesh, AssembledSystem, Mesh};
pub use modal::{analytical_pinned_frequencies, modes, state_matrix, ModalResult};
pub use model::{
    material_catalog, resolve_damping, ActuatorAttachment, BeamGeometry, DampingSpec,
    ExcitationCommand, Material, StudyConfig, STANDARD_GRAVITY,
};
pub use oracle::{compare_trajectories, newmark_integrate};
pub use response::{
    acceleration_series, base_excitation_forces, complete_response, direct_force_excitation,
    excitations_from_config, peak_acceleration_field, steady_state, HarmonicExcitation,
    PeakAccelerationField, SteadyState, Trajectory,
};
pub use sweep::{
    bucket_fractions, dead_zones, nullification_union, preset_configurations, quantile_summary,
    run_sweep, run_sweep_serial, BucketSummary, FrequencyAssignment, PresetCase, SampleRecord,
    SampleSet, SweepSpec,
};
