//! Circuits over local fermionic modes (LFMs), their qubit encodings, and a
//! dense Fock-space reference simulator.
//!
//! The crate is organised around one loop: build a circuit over fermionic or
//! Majorana generators, transpile it to a qubit circuit under one of several
//! encodings, and check the two sides against each other by dense evaluation.
//!
//! * [`fock`] - occupation-number states, ladder operators, and the sign
//!   bookkeeping that makes fermionic gate application different from tensor
//!   application.
//! * [`pauli`] - phase-tracked Pauli strings in binary-symplectic form, and
//!   the Majorana operators `c_0, ..., c_{2m-1}` as strings.
//! * [`circuit`] - the gate library, circuits, dense evaluation, and the
//!   rotation action of quadratic circuits on Majorana generators.
//! * [`encodings`] - the mode <-> qubit compilers: swap-defect conjugation,
//!   the partial-sum tree encoding with logarithmic extraction circuits, and
//!   the two-modes-per-qubit simulation of qubit circuits by LFMs.
//! * [`superfast`] - the edge-operator encoding on an interaction graph,
//!   with stabilizers from fundamental cycles and local-gate transpilation.
//! * [`protocols`] - parity-preserving extension of qubit operators, the
//!   odd-sector construction, rewriting to the fixed fermionic gate basis,
//!   and the adaptive four-branch measurement protocol.
//! * [`codes`] - Majorana pair codes: stabilizers from a pairing of the
//!   `2m` generators, and brute-force code distance.
//!
//! Basis convention used everywhere: a computational basis state of `m`
//! modes or qubits is indexed by the integer whose bit `s` is the occupation
//! `n_s`, so mode 0 is the least significant bit.

pub mod circuit;
pub mod cli;
pub mod codes;
pub mod encodings;
pub mod fock;
pub mod linalg;
pub mod pauli;
pub mod protocols;
pub mod superfast;
#[cfg(test)]
pub mod testkit;
pub mod verify;

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode or qubit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("duplicate target index {0}")]
    DuplicateTarget(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dense operations are capped at {cap} qubits, requested {requested}")]
    WidthCap { requested: usize, cap: usize },
    #[error("matrix is not parity-preserving (commutator norm {deviation:.3e})")]
    NotParityPreserving { deviation: f64 },
    #[error("unknown gate {0:?}")]
    UnknownGate(String),
    #[error("gate {name}: {reason}")]
    BadGate { name: String, reason: String },
    #[error("circuit kind {circuit:?} cannot contain application of {gate:?}")]
    KindMismatch { circuit: String, gate: String },
    #[error("conjugation leaves the span of Majorana generators (residual {residual:.3e})")]
    NotQuadratic { residual: f64 },
    #[error("graph error: {0}")]
    BadGraph(String),
    #[error("stabilizer set is inconsistent: {0}")]
    InconsistentStabilizers(String),
    #[error("state has weight {weight:.3e} outside the code subspace")]
    OutsideCode { weight: f64 },
    #[error("branch ({z}, {y}) has probability {probability:.3e}, cannot condition on it")]
    ImprobableBranch { z: String, y: String, probability: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no logical operator found up to weight {max_weight}")]
    DistanceSearchExhausted { max_weight: usize },
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Dense state vectors and operators refuse to materialise above this width.
pub const DENSE_WIDTH_CAP: usize = 14;

/// Default tolerance for parity and unitarity checks on dense matrices.
pub const PARITY_TOL: f64 = 1e-10;
