//! Line-of-sight MIMO channel modelling and array placement design.
//!
//! The crate builds exact spherical-wave channel matrices between planar
//! antenna arrays, their quartic-wavefront factorizations, and closed-form
//! placements (inter-element spacings and sub-array centers) that make the
//! channel matrix orthogonal in paraxial and non-paraxial deployments.
//! Every closed-form design can be checked against an exhaustive grid search
//! on the exact channel.
//!
//! Lengths are SI meters internally. Configuration files and CSV outputs
//! express lengths as multiples of the wavelength.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod cubic;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod nonparaxial;
pub mod paraxial;
pub mod spectral;
pub mod table;

pub use channel::{exact_channel, quartic_channel, subarray_channel, ChannelMatrix, ChannelModel, QuarticFactors};
pub use error::{Error, Result};
pub use geometry::{
    classify_paraxial, expand_partition, expand_uniform, ArrayGeometry, Deployment, ElementLayout, Flattening,
    Point3, SubArrayPartition, SubArraySpec, Waveband,
};
pub use grid::{grid_search, GridAxis, GridResult, GridSpec, ObjectiveChannel, SpacingTemplate};
pub use nonparaxial::{
    nonparaxial_orthogonality_residual, paraxial_limit_check, solve_chain, solve_four_subarrays, solve_two_subarrays,
    EtaGamma, NonParaxialSolution,
};
pub use paraxial::{
    compute_tau_gamma, solve_spacings, verify_orthogonality_condition, OrthogonalityVerdict, ParaxialCoefficients,
    ParaxialSolution,
};
pub use spectral::{
    capacity, effective_rank, gram, orthogonality_ratio, PowerPolicy, SpectralReport,
};
