//! Entropic and cutoff times for random walks on random Cayley graphs of finite Abelian
//! and nilpotent groups, exact mixing-distance curves at desk scale, and numerical checks
//! of the associated bound machinery.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod groups;
pub mod entropic;
pub mod lattice_walk;
pub mod mixing;
pub mod regime;
pub mod verify;

pub use error::{Error, Result};

/// Library version, embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
