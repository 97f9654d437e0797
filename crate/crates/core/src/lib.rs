//! Exact simulation substrate and protocol machinery for one-round non-local
//! quantum computation over prime-dimensional qudits.
//!
//! Qudit 0 is always the most significant tensor factor, in memory and in every
//! file format.

pub mod circuit;
pub mod code_routing;
pub mod error;
pub mod garden_hose;
pub mod linalg;
pub mod pauli;
pub mod protocol;
pub mod qudit;
pub mod surgery;
pub mod tableau;
pub mod teleport;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
