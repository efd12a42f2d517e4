//! Synthesis toolkit for parallelized fourth-order Trotter-Suzuki phase
//! estimation circuits over Jordan-Wigner encoded molecular Hamiltonians.
//!
//! The pipeline is: [`hamiltonian`] coefficients are grouped by support,
//! [`schedule`] arranges supports into stages of adjacent wires joined by
//! fermionic swap networks, [`templates`] emits rank-2 circuits for each
//! block, [`trotter`] assembles product formulas and phase estimation, and
//! [`passes`] rewrites controlled rotations into parallel uncontrolled ones.
//! [`fermion`] and [`sim`] are the dense oracles everything is checked
//! against.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod accounting;
pub mod circuit;
pub mod error;
pub mod fermion;
pub mod hamiltonian;
pub mod linalg;
pub mod mobius;
pub mod passes;
pub mod schedule;
pub mod sim;
pub mod templates;
pub mod trotter;

pub use circuit::{Circuit, CostModel, Gate, GateKind, Metrics, Role};
pub use error::Error;
pub use hamiltonian::{MolecularHamiltonian, Term, TermClass};
pub use schedule::{Schedule, Stage, StageKind};

/// Absolute tolerance used by every oracle comparison.
pub const TOLERANCE: f64 = 1e-10;

/// Default qubit cap for dense unitaries.
pub const DEFAULT_SIM_CAP: usize = 12;
