//! Dense pure states, density operators, channels and the generalized Bell basis.

mod bell;
mod channel;
mod density;
pub mod gates;
pub(crate) mod kernel;
mod state;

pub use bell::{
    bell_kraus, bell_state, bell_teleport_correction, measure_generalized_bell,
    measure_generalized_bell_forced, BellOutcome,
};
pub use channel::{choi_of, Channel};
pub use density::{fidelity, mutual_information, partial_trace, trace_distance, DensityOperator, Entropy};
pub use state::{apply_gate, DenseState};

/// Global numerical tolerance for exact identities.
pub const TOL: f64 = 1e-9;
