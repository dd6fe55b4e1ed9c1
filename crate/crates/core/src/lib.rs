//! Chaos-game dynamics and their quantum realizations by repeated interactions.
//!
//! * [`ifs`]: the classical chaos game, seeded vertex streams and prefractals.
//! * [`fermion`]: closed-form fermionic occupation dynamics and entropy.
//! * [`measure`]: stationary densities, moments and entropy averages of the 1d game.
//! * [`boson`]: coherent-state eigenvalue dynamics and regime classification.
//! * [`oracle`]: brute-force state-vector simulation used to check the closed forms.
//! * [`io`]: CSV/JSON emission with a fixed float format.

pub mod boson;
pub mod error;
pub mod exec;
pub mod fermion;
pub mod ifs;
pub mod io;
pub mod measure;
pub mod oracle;

pub use error::{Error, Result};
pub use exec::Execution;
pub use ifs::{ClassicalConfig, Point, Trajectory, VertexSet};
