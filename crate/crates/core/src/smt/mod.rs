//! SMT-LIB extraction, solver execution and solver-output parsing.

mod lookup;
mod outcome;
mod script;
pub mod sexp;
mod solver;

pub use lookup::{parse_lookup_table, LookupTable};
pub use outcome::{parse_outcome, DefineFun, ModelValue, SatStatus, SolverError, SolverOutcome, Sort};
pub use script::{extract_smt, ExtractError, Provenance, SmtScript};
pub use solver::{prepare_input, run_raw, run_solver, SolverConfig, SolverFailure};
