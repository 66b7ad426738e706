use std::cmp::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::nlp::solve_full_nlp_warm;
use super::pattern::{enumerate_patterns, solve_pattern, SolveDiagnostics};
use super::settings::SolverSettings;
use crate::error::Result;
use crate::exec;
use crate::solution::PathSolution;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanReport {
    pub best: Option<PathSolution>,
    /// One entry per pattern that converged, in pattern order, followed by
    /// the full-NLP solution when it differs from all of them.
    pub all_feasible: Vec<PathSolution>,
    pub diagnostics: Vec<SolveDiagnostics>,
    pub wall_time_s: f64,
}

impl PartialEq for PlanReport {
    fn eq(&self, other: &Self) -> bool {
        self.best == other.best
            && self.all_feasible == other.all_feasible
            && self.diagnostics == other.diagnostics
    }
}

impl PlanReport {
    pub fn is_feasible(&self) -> bool {
        self.best.is_some()
    }
}

/// Ranking used to pick the best solution: objective (equal within 1e-9),
/// then pattern in lexicographic order, then smaller total arc length.
pub fn compare_solutions(a: &PathSolution, b: &PathSolution) -> Ordering {
    let (fa, fb) = (a.objective(), b.objective());
    if (fa - fb).abs() > 1e-9 {
        return fa.total_cmp(&fb);
    }
    a.pattern
        .compact()
        .cmp(&b.pattern.compact())
        .then_with(|| a.lengths.arc_total().total_cmp(&b.lengths.arc_total()))
}

fn same_lengths(a: &PathSolution, b: &PathSolution) -> bool {
    a.lengths
        .iter()
        .zip(b.lengths.iter())
        .all(|(x, y)| (x - y).abs() <= 1e-6)
}

/// Solves every turn pattern (and the both-arc problem when the mode asks
/// for it) and keeps the shortest feasible path.
pub fn plan(config: &crate::model::ScenarioConfig, settings: &SolverSettings) -> Result<PlanReport> {
    settings.validate()?;
    let started = Instant::now();
    let mut all_feasible = Vec::new();
    let mut diagnostics = Vec::new();

    if settings.mode.runs_patterns() {
        let patterns = enumerate_patterns(config.obstacle_count());
        let inner = settings.clone().sequential();
        let outcomes = exec::map_collect(&patterns, settings.parallel, |p| {
            solve_pattern(config, p, &inner)
        });
        for outcome in outcomes {
            let outcome = outcome?;
            diagnostics.push(outcome.diagnostics);
            all_feasible.extend(outcome.solution);
        }
    }

    if settings.mode.runs_full_nlp() {
        let warm: Vec<_> = all_feasible.iter().map(|s| s.lengths.clone()).collect();
        let outcome = solve_full_nlp_warm(config, settings, &warm)?;
        diagnostics.push(outcome.diagnostics);
        if let Some(sol) = outcome.solution {
            if !all_feasible.iter().any(|s| same_lengths(s, &sol)) {
                all_feasible.push(sol);
            }
        }
    }

    let best = all_feasible.iter().min_by(|a, b| compare_solutions(a, b)).cloned();
    Ok(PlanReport {
        best,
        all_feasible,
        diagnostics,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
