//! Solvers for the interception constraint system.

mod lowdisc;
mod newton;
mod nlp;
mod oracle;
mod pattern;
mod plan;
mod settings;

pub use nlp::{solve_full_nlp, solve_full_nlp_warm};
pub use oracle::{grid_oracle, grid_oracle_with, MIN_RESOLUTION};
pub use pattern::{enumerate_patterns, solve_pattern, SolveDiagnostics, SolveOutcome, SolveStatus};
pub use plan::{compare_solutions, plan, PlanReport};
pub use settings::{SolveMode, SolverSettings};
