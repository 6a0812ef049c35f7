//! Simulation and compilation kernels for quantum imaginary time evolution
//! (QITE) on bounded-order Pauli Hamiltonians.
//!
//! Imaginary time evolution drives a state `ψ(0)` towards the lowest
//! eigenspace of a Hamiltonian `H` that it overlaps:
//!
//! ```text
//! ψ(t) = exp(-t H) ψ(0) / ‖exp(-t H) ψ(0)‖
//! ```
//!
//! For Hamiltonians expressed as real combinations of Pauli strings of
//! bounded weight, the evolution converges at an explicit exponential rate
//! governed by the spectral gap and the initial ground-space overlap, and
//! each Trotter factor `exp(-δ a S)` can be compiled into a shallow circuit
//! of Pauli rotations. This crate implements both views:
//!
//! * **Simulation** — exact eigenbasis propagation ([`ite_exact`]) and
//!   first-order Trotterised propagation ([`ite_trotter`]) of dense state
//!   vectors ([`state`]) under sparse Pauli-sum Hamiltonians ([`pauli`]),
//!   with spectral diagnostics ([`spectral`]) and convergence traces
//!   ([`trace`]).
//! * **Compilation** — variational normalisation of individual Trotter
//!   factors into Pauli-rotation circuits ([`varqite`]), backed by a damped
//!   Newton corrector and a homotopy continuation fallback ([`homotopy`]).
//! * **Application** — QUBO ground-state search with success-probability
//!   bounds and shot estimates ([`combopt`]).
//!
//! The crate is `no_std` (with `alloc`) so the kernels can be embedded in
//! constrained or foreign runtimes; file formats, serialisation, and the
//! command line live in the companion `qite` crate.
//!
//! # Example
//!
//! ```
//! use qite_core::pauli::Hamiltonian;
//! use qite_core::state::StateVector;
//! use qite_core::ite_exact::exact_evolve;
//!
//! // H = Z on one qubit, started from |+>.
//! let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
//! let psi0 = StateVector::equal_superposition(1).unwrap();
//! let run = exact_evolve(&psi0, &h, 3.0, 16).unwrap();
//! let f = run.trace.fidelity.last().unwrap();
//! assert!((f - 1.0 / (1.0 + (-12.0f64).exp())).abs() < 1e-12);
//! ```

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod combopt;
pub mod error;
pub mod homotopy;
pub mod ite_exact;
pub mod ite_trotter;
pub mod pauli;
pub mod spectral;
pub mod state;
pub mod trace;
pub mod varqite;

pub use error::{Error, Result};

/// A double-precision complex amplitude.
pub type Complex64 = num_complex::Complex<f64>;
