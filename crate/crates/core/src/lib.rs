//! Equitable decompositions of automorphism-compatible graph matrices.
//!
//! Given a matrix `M` that respects a graph automorphism `φ`, the decomposer
//! produces a similarity `T⁻¹MT = M_φ ⊕ B₁ ⊕ B₂ ⊕ …` where `M_φ` is the
//! divisor matrix of the orbit partition of `φ`. Automorphisms of any order
//! are handled: the order is factored into prime powers and each prime is
//! processed in turn, with roots-of-unity transforms per round.
//!
//! The [`spectral`] module is an independent eigenvalue oracle used to check
//! that the spectra of the pieces recombine into the spectrum of `M`.

pub mod cli;
pub mod decomposer;
pub mod error;
pub mod gallery;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod partition;
pub mod permutation;
pub mod spectral;

pub use decomposer::{
    general_decompose, general_decompose_with, prime_power_decompose, BlockTag, DecomposeOptions,
    DecompositionResult, RoundReport, TaggedBlock,
};
pub use error::{Error, Result};
pub use graph::{build_matrix, permutation_matrix, MatrixKind, WeightedDigraph};
pub use matrix::{MatrixC, C64};
pub use partition::{
    divisor_matrix, is_equitable, plan_transversals, TransversalPlan, VertexPartition,
};
pub use permutation::{bezout_exponents, prime_factorization, OrbitPartition, Permutation};
pub use spectral::{multiset_equal, spectral_radius, spectrum, SpectrumMultiset};
