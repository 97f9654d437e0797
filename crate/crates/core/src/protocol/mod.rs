//! One-round non-local computation: representation, execution, resource
//! accounting, the Clifford and port-teleportation constructions, and the
//! product-replacement check.

mod bk;
mod bound;
mod clifford;
pub mod exec;
mod one_round;

pub use bk::{bk_protocol, bk_protocol_with_ports, bk_report, BkReport};
pub use bound::{
    max_mutual_information, product_replacement_check, random_instance, random_sweep, success_probability, BoundReport,
    OutcomePredicate, SweepSummary, Task,
};
pub use clifford::{clifford_protocol, DecompositionSummary, InteractionDecomposition};
pub use exec::{Branch, Init, Instr, LowRank, Owner, Program, Record, RecordEntry, RunOutput, Stage};
pub use one_round::{
    execute, execute_low_rank, verify_implements, worst_branch_distance, OneRoundProtocol, Resource,
    ResourceAccount, VerifyReport,
};
