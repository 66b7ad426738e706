use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which solvers `plan` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMode {
    /// Pattern-reduced square systems only.
    PatternNewton,
    /// Both-arc formulation only.
    FullNlp,
    /// Both; the best of all candidates wins.
    Both,
}

impl SolveMode {
    pub fn runs_patterns(self) -> bool {
        matches!(self, SolveMode::PatternNewton | SolveMode::Both)
    }

    pub fn runs_full_nlp(self) -> bool {
        matches!(self, SolveMode::FullNlp | SolveMode::Both)
    }
}

impl std::str::FromStr for SolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pattern" | "pattern-newton" | "newton" => Ok(SolveMode::PatternNewton),
            "nlp" | "full-nlp" | "full" => Ok(SolveMode::FullNlp),
            "both" => Ok(SolveMode::Both),
            other => Err(Error::parse("solve mode", format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub newton_max_iter: usize,
    /// Backtracking factor applied to the Newton step, in `(0, 1)`.
    pub newton_damping: f64,
    /// Max-norm residual accepted as converged.
    pub residual_tol: f64,
    pub multistart_count: usize,
    pub seed: u64,
    pub mode: SolveMode,
    /// Run independent solves on the rayon pool when the crate is built with
    /// the `parallel` feature. Results do not depend on this flag.
    pub parallel: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            newton_max_iter: 100,
            newton_damping: 0.5,
            residual_tol: 1e-10,
            multistart_count: 32,
            seed: 0x5eed_c0de,
            mode: SolveMode::Both,
            parallel: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol.is_finite() && self.residual_tol > 0.0) {
            return Err(Error::invalid("residual_tol must be positive"));
        }
        if self.multistart_count == 0 {
            return Err(Error::invalid("multistart_count must be at least 1"));
        }
        if !(self.newton_damping > 0.0 && self.newton_damping < 1.0) {
            return Err(Error::invalid("newton_damping must lie in (0, 1)"));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::invalid("newton_max_iter must be at least 1"));
        }
        Ok(())
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn with_mode(mut self, mode: SolveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
