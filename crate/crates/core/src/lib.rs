//! Exact simulation of a quantum walk that places a walker in a superposition
//! of every walk from a chosen vertex of a simple, regular, bipartite graph,
//! then post-selects the branches that visited each vertex exactly once.
//!
//! The pieces, bottom-up:
//!
//! * [`graph`]: parsing, validation, built-in and random test graphs.
//! * [`signing`]: signed single-bit-flip matrices (the per-step operator)
//!   and exact unitarity checks.
//! * [`state`]: sparse superpositions keyed by (α mask, walk history), with
//!   exact `±d^{-k/2}` amplitudes.
//! * [`evolution`]: one step of the walk, whole runs, and gate counting.
//! * [`postselect`]: projection onto α = all-ones, the closure filter, and
//!   seeded measurement.
//! * [`oracle`]: classical Hamiltonian path/cycle enumeration used to check
//!   every simulated result.
//! * [`pipeline`]: end-to-end runs and their serialised records.
//!
//! Matrix checks are generic over the entry type (`i8`, `i64`, rationals)
//! and amplitudes/probabilities convert to any `num_traits::Float`.

pub mod evolution;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod postselect;
pub mod probability;
pub mod signing;
pub mod state;

pub use evolution::{apply_step, gate_count, run_walk, StepOptions, StepStats, WalkRun};
pub use graph::{builtin_graph, parse_graph, random_regular_bipartite, validate_graph, Graph, Vertex};
pub use oracle::{compare_with_quantum, count_walks, enumerate_hamiltonian, EnumerationResult};
pub use postselect::{
    apply_closure_filter, project_alpha_all_ones, sample_measurement, FilterMode, ProjectionResult,
};
pub use probability::ExactProbability;
pub use signing::{build_flip_unitary, search_signings, verify_flip_unitary, FlipUnitary, SignedMatrix};
pub use state::{initial_state, Amplitude, BranchKey, Superposition};

/// Sign matrices as stored by [`FlipUnitary`].
pub type SignMatrix = signing::SignedMatrix<i8>;
/// Wide integer matrices for products and audits.
pub type IntMatrix = signing::SignedMatrix<i64>;
/// Exact rational matrices.
pub type RationalMatrix = signing::SignedMatrix<num_rational::Rational64>;
/// Scaled operator in double precision.
pub type FloatMatrix = signing::SignedMatrix<f64>;
