//! Brute-force state-vector simulation of the repeated-interaction process.
//!
//! Independent of the closed forms it checks: the full step Hamiltonians are
//! built from mode operators and exponentiated densely, and observables come
//! from the reduced density matrix of the system mode.

mod boson;
mod fermion;
mod linalg;
mod report;
mod state;

pub use boson::{
    boson_algebra_defect, boson_simulate, poisson_tail, truncated_coherent, BOSON_BLOCK_CAP,
    BOSON_TAIL_TOL,
};
pub use fermion::{fermion_simulate, FermionModes, FERMION_MAX_BATH_MODES};
pub use linalg::{expm_hermitian, hermiticity_defect, BlockUnitary, CMatrix, CVector, SparseHamiltonian};
pub use report::{Check, OracleKind, OracleReport, OracleStep};
pub use state::{density_spectrum, partial_trace_system, purity, von_neumann_entropy, StateVector};
