//! Nonlinear spatial games.
//!
//! Players on a torus each hold strategy 0 or 1. Every step, each player is
//! ranked by a [`RankMatrix`] lookup on its own strategy and its count of
//! type-1 neighbors, then imitates according to an [`UpdateRule`]. When the
//! rank matrix is derived from the payoff sums of a 2x2 game this is the
//! classic spatial imitation game; arbitrary rank matrices give a much larger
//! family of cellular automata.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix the two
//! instantiations used in practice.

pub mod analysis;
pub mod engine;
pub mod lattice;
pub mod rankmodel;
pub mod rng;
pub mod scalar;

pub use analysis::{
    activity, classify, count_rank_matrices, density, estimate_linear_proportion, explore,
    ClassKind, Classification, ExploreConfig, ExploreHit, LinearCensus,
};
pub use engine::{
    ca_local_next, imitation_phase, run, score_phase, step, Cycle, EngineError, Patch, RankField,
    RunRecord, StepMetrics, UpdateRule,
};
pub use lattice::{
    count_type1_neighbors, make_grid, neighbors, Grid, Init, LatticeError, Topology, TopologyKind,
};
pub use rankmodel::{
    complement_transform, derive_rank_matrix, is_linear_realizable, is_linear_realizable_with,
    parse_rank_matrix, payoff, random_rank_matrix, rows_monotone, serialize_rank_matrix,
    GameMatrix, RankError, RankMatrix, RealizabilityResult,
};
pub use rng::PortableRng;
pub use scalar::Scalar;

pub use num_rational::BigRational;

/// A game with floating-point payoffs.
pub type Game = GameMatrix<f64>;
/// A game with exact rational payoffs.
pub type ExactGame = GameMatrix<BigRational>;
/// Realizability result with an exact witness.
pub type ExactRealizability = RealizabilityResult<BigRational>;
