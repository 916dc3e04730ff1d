//! Fixed-point evaluation of quantum history measures on the Keldysh contour.
//!
//! A history is a sequence of fixed points (states pinned on both contour
//! branches at a given time). Its unnormalized weight, the constrained
//! wavefunction change ΔΨ, is the product of forward- and backward-branch
//! transition amplitudes between consecutive fixed points. Normalizing ΔΨ
//! over the outcomes compatible with the boundary fixed points yields the
//! measure of existence, which reproduces the Born rule for two fixed points
//! and the ABL rule for three.
//!
//! [`oracle`] holds independent textbook implementations used to verify
//! every number produced by [`measure`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod dynamics;
pub mod error;
pub mod histories;
pub mod measure;
pub mod oracle;
pub mod statespace;
pub mod tolerance;

#[cfg(test)]
mod testutil;

pub use contour::{build_path, contour_compare, Branch, ContourPath, ContourTime, Segment};
pub use dynamics::{apply, compose_check, propagate, HamiltonianSchedule, Piece};
pub use error::{Error, Result};
pub use histories::{
    build_network, make_history, stack_state, Channel, Edge, FixedPoint, FixedPointNetwork,
    NodeId, QuantumHistory, StackPart, UniversalStack,
};
pub use measure::{
    abl_measure, born_measure, branch_amplitude, chain_measure, delta_psi_pair, ChainMeasure,
    MeasureResult,
};
pub use statespace::{
    check_basis, expm_hermitian, inner, tensor, Basis, HermitianOperator, StateVector,
    UnitaryMatrix, C64,
};
pub use tolerance::Tolerances;
