//! Compile bounded-degree graphs into 3D neutral-atom registers whose
//! Rydberg ground state encodes a maximum independent set, and check the
//! result classically and by state-vector simulation.

// Symmetric pair loops and NaN-rejecting `!(x > 0.0)` guards are deliberate.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod anneal;
pub mod embed;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod rydberg;
pub mod scaling;
pub mod solvers;

pub use anneal::{
    evolve, k33_plus_register, measure, mis_probability, reference_schedule, spam_correct,
    spam_corrupt, ConfusionMatrix, MeasurementDistribution, QuantumState, Schedule,
};
pub use embed::{
    augmented_graph, check_embedding, embed, overhead_stats, read_embedding, write_embedding,
    AugmentedEmbedding, EmbedParams, OverheadStats,
};
pub use error::{Error, Result};
pub use geometry::{Point3, Site};
pub use graph::{
    cost, default_penalty, erdos_renyi_bounded, is_independent, k33_plus, max_degree, read_graph,
    write_graph, Assignment, Graph, IndependentSet,
};
pub use rydberg::{
    blockade_radius, detuning_window_scan, diagonal_energy, ground_states_diagonal, induced_graph,
    verify_encoding, AtomRegister, DiagonalReport, InteractionModel, RegisterParams, VerifyReport,
    C6_DEFAULT, DEFAULT_DELTA_OVER_U,
};
pub use scaling::{
    fit_power_law, run_scaling, PowerLawFit, ScalingConfig, ScalingRecord, ScalingReport,
};
pub use solvers::{
    approximation_ratio, exact_mis, exact_mis_with, greedy_min_degree, greedy_random, ExactConfig,
    Method, SolverResult, TieBreak,
};
