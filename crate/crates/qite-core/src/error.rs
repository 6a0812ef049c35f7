//! Error type shared by all kernels.
//!
//! Recoverable, caller-visible failure modes only: invalid input text,
//! mismatched dimensions, resource caps, out-of-domain arguments, and
//! numerical breakdown in the solvers. Conditions that merely degrade a
//! result (orthogonal starts, non-convergence with a usable best iterate)
//! are reported through result types instead, so callers can decide.

use alloc::boxed::Box;

use crate::homotopy::PathDiagnostics;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of parsing, validation, simulation, and solving.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A Pauli string contained a character outside `IXYZ`.
    #[error("invalid Pauli character {found:?} at position {position}")]
    InvalidPauliChar {
        /// Zero-based offset of the offending character.
        position: usize,
        /// The character found.
        found: char,
    },

    /// A Pauli string or operator list was empty.
    #[error("Pauli string must act on at least one qubit")]
    EmptyPauliString,

    /// Two objects that must share a dimension did not.
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch {
        /// Qubit count required by the receiving object.
        expected: usize,
        /// Qubit count actually supplied.
        got: usize,
    },

    /// A term exceeded the declared interaction order bound.
    #[error("term weight {weight} exceeds declared order bound {bound}")]
    OrderBoundExceeded {
        /// Weight (number of non-identity factors) of the offending term.
        weight: usize,
        /// Declared maximum weight.
        bound: usize,
    },

    /// A Hamiltonian carried more terms than a weight-`B` operator on `Q`
    /// qubits can have.
    #[error("term count {terms} exceeds the order-{bound} budget of {limit}")]
    TermCountExceeded {
        /// Number of terms supplied.
        terms: usize,
        /// Declared order bound.
        bound: usize,
        /// Loose admissible maximum `C(Q,B)·4^B`.
        limit: u128,
    },

    /// A dense-matrix operation was requested above the dense qubit cap.
    #[error("dense operation on {qubits} qubits exceeds cap of {cap}")]
    DenseCapExceeded {
        /// Requested qubit count.
        qubits: usize,
        /// Configured cap.
        cap: usize,
    },

    /// A state allocation was requested above the state-vector qubit cap.
    #[error("state vector on {qubits} qubits exceeds cap of {cap}")]
    StateCapExceeded {
        /// Requested qubit count.
        qubits: usize,
        /// Configured cap.
        cap: usize,
    },

    /// A coefficient or derived quantity was not a finite real number.
    #[error("{what} must be finite, got {value}")]
    NonFinite {
        /// Name of the offending quantity.
        what: &'static str,
        /// The non-finite value.
        value: f64,
    },

    /// A dense operator that must be Hermitian was not.
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitian {
        /// Largest entrywise deviation `max |M - M†|`.
        deviation: f64,
    },

    /// A scalar argument was outside its mathematical domain.
    #[error("{name} out of domain: {value} ({requirement})")]
    OutOfDomain {
        /// Name of the argument.
        name: &'static str,
        /// Value supplied.
        value: f64,
        /// Human-readable constraint, e.g. `"requires 0 < f0 <= 1"`.
        requirement: &'static str,
    },

    /// A state or coefficient vector had (numerically) zero norm.
    #[error("vector norm below 1e-300; cannot normalise")]
    ZeroNorm,

    /// An operation requiring a normalised state received an unnormalised
    /// one.
    #[error("state is not normalised (norm {norm})")]
    NotNormalised {
        /// Actual Euclidean norm of the state.
        norm: f64,
    },

    /// Bit-string text (basis-state labels, sampler keys) was malformed.
    #[error("invalid bit string: expected {expected} characters of 0/1, got {got:?}")]
    InvalidBitString {
        /// Required length.
        expected: usize,
        /// The offending text.
        got: alloc::string::String,
    },

    /// The Newton corrector met a Jacobian with condition estimate above
    /// the singularity threshold.
    #[error("Jacobian numerically singular (condition estimate {cond:.3e})")]
    SingularJacobian {
        /// Estimated 2-norm condition number.
        cond: f64,
    },

    /// Homotopy continuation could not reach the target parameter before
    /// the sub-step floor.
    #[error("continuation stalled at delta = {reached} (sub-step floor {floor})")]
    ContinuationStalled {
        /// Last parameter value with a converged solution.
        reached: f64,
        /// Sub-step floor that was undercut.
        floor: f64,
        /// Accepted sub-steps and failure count up to the stall.
        diagnostics: Box<PathDiagnostics>,
    },
}
