//! Real block-diagonal LMI problems: realification of relaxations, SDPA
//! sparse I/O and independent evaluation of candidate points.

mod lmi;
mod realize;
mod sdpa;
mod solution;

pub use lmi::{BlockKind, LinearEquality, LmiBlock, LmiProblem, SymSparse};
pub use realize::{moment_lookup, realify_hermitian, realize, Part, Slot, VariableMap};
pub use sdpa::{export_sdpa, import_sdpa, parse_sdpa, to_sdpa_string};
pub use solution::{evaluate, import_solution_vector, Solution, Status};
