use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lowdisc::{mix_seed, ShiftedHalton};
use super::newton::{self, NewtonParams, SquareSystem};
use super::settings::SolverSettings;
use crate::error::Result;
use crate::model::{self, LengthVector, ScenarioConfig, Turn, TurnPattern};
use crate::solution::{PathSolution, SolutionSource};

/// How a single pattern (or the full NLP) solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    /// Some start converged, but only to points with a negative length or an
    /// arc at or beyond one full revolution.
    RejectedOnly,
    NoConvergence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    /// Pattern label, or `full-nlp`.
    pub label: String,
    pub status: SolveStatus,
    pub starts: usize,
    pub converged_starts: usize,
    pub rejected_starts: usize,
    pub iterations: usize,
    /// Smallest residual max-norm seen over all starts.
    pub best_residual: f64,
    pub wall_time_s: f64,
}

impl PartialEq for SolveDiagnostics {
    // Wall time is excluded so reports compare equal across runs.
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.status == other.status
            && self.starts == other.starts
            && self.converged_starts == other.converged_starts
            && self.rejected_starts == other.rejected_starts
            && self.iterations == other.iterations
            && self.best_residual.to_bits() == other.best_residual.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: Option<PathSolution>,
    pub diagnostics: SolveDiagnostics,
}

/// All `2^(n+1)` turn patterns in lexicographic order with `L < R`.
pub fn enumerate_patterns(n: usize) -> Vec<TurnPattern> {
    let circles = n + 1;
    assert!(circles < usize::BITS as usize, "too many obstacles to enumerate");
    (0..1usize << circles)
        .map(|code| {
            TurnPattern::new(
                (0..circles)
                    .map(|pos| {
                        if code >> (circles - 1 - pos) & 1 == 1 {
                            Turn::Right
                        } else {
                            Turn::Left
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

struct PatternSystem<'a> {
    config: &'a ScenarioConfig,
    pattern: &'a TurnPattern,
}

impl SquareSystem for PatternSystem<'_> {
    fn residual(&self, z: &[f64]) -> Vec<f64> {
        let l = model::expand_pattern(self.pattern, z);
        model::residuals(self.config, &l).expect("dimension checked")
    }

    fn residual_and_jacobian(&self, z: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let l = model::expand_pattern(self.pattern, z);
        let (r, full) = model::residuals_and_jacobian(self.config, &l).expect("dimension checked");
        let m = z.len();
        let j = DMatrix::from_fn(full.nrows(), m, |row, col| {
            full[(row, model::reduced_column(self.pattern, col))]
        });
        (r, j)
    }
}

/// Straight-line distances between consecutive anchors minus the radii;
/// used to scale initial straight lengths.
pub(crate) fn anchor_gaps(config: &ScenarioConfig) -> Vec<f64> {
    let p = config.pursuer().position();
    let mut pts = vec![(p, 0.0)];
    pts.extend(config.obstacles().iter().map(|o| (o.center(), o.radius())));
    pts.push((config.target().position(), 0.0));
    pts.windows(2)
        .map(|w| (w[0].0.distance(w[1].0) - w[0].1 - w[1].1).max(0.0) + 1e-3)
        .collect()
}

/// Characteristic length of the scenario.
pub(crate) fn length_scale(config: &ScenarioConfig) -> f64 {
    let gaps: f64 = anchor_gaps(config).iter().sum();
    let caps: f64 = config.circle_curvatures().iter().map(|k| TAU / k).sum();
    gaps + caps
}

/// Arc-length caps `2π/κ` per circle.
pub(crate) fn arc_caps(config: &ScenarioConfig) -> Vec<f64> {
    config.circle_curvatures().iter().map(|k| TAU / k).collect()
}

pub(crate) fn negative_tolerance(config: &ScenarioConfig) -> f64 {
    1e-12 * (1.0 + length_scale(config))
}

pub(crate) fn timing_target(config: &ScenarioConfig, pursuer_total: f64) -> f64 {
    config.target_speed() / config.pursuer_speed() * pursuer_total
}

enum Check {
    Accept(Vec<f64>),
    /// An arc left `[0, cap)`; retry from the wrapped point.
    Rewrap(Vec<f64>),
    Reject,
}

fn check_reduced(z: &[f64], caps: &[f64], neg_tol: f64) -> Check {
    let circles = caps.len();
    if z[circles..].iter().any(|&v| v < -neg_tol) {
        return Check::Reject;
    }
    let mut out = z.to_vec();
    let mut wrapped = false;
    for (k, &cap) in caps.iter().enumerate() {
        let a = out[k];
        if a < -neg_tol || a >= cap {
            let w = a.rem_euclid(cap);
            out[k] = if cap - w < 1e-9 * cap { 0.0 } else { w };
            wrapped = true;
        }
    }
    if wrapped {
        return Check::Rewrap(out);
    }
    for v in out.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Check::Accept(out)
}

fn newton_params(settings: &SolverSettings, scale: f64) -> NewtonParams {
    NewtonParams {
        max_iter: settings.newton_max_iter,
        damping: settings.newton_damping,
        tol: settings.residual_tol,
        blowup: 1e4 * scale,
    }
}

struct Candidate {
    z: Vec<f64>,
    objective: f64,
    arc_total: f64,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    if (a.objective - b.objective).abs() > 1e-9 {
        a.objective < b.objective
    } else {
        a.arc_total < b.arc_total
    }
}

/// Solves the square system of one turn pattern from `multistart_count`
/// starts and keeps the shortest feasible result.
pub fn solve_pattern(
    config: &ScenarioConfig,
    pattern: &TurnPattern,
    settings: &SolverSettings,
) -> Result<SolveOutcome> {
    settings.validate()?;
    pattern.check_for(config)?;
    let circles = pattern.len();
    let started = Instant::now();
    let stream = pattern_stream(pattern);
    let sys = PatternSystem { config, pattern };
    let caps = arc_caps(config);
    let gaps = anchor_gaps(config);
    let scale = length_scale(config);
    let neg_tol = negative_tolerance(config);
    let params = newton_params(settings, scale);
    let mut halton = ShiftedHalton::new(2 * circles, mix_seed(settings.seed, stream));

    let mut best: Option<Candidate> = None;
    let mut diag = SolveDiagnostics {
        label: pattern.label(),
        status: SolveStatus::NoConvergence,
        starts: settings.multistart_count,
        converged_starts: 0,
        rejected_starts: 0,
        iterations: 0,
        best_residual: f64::INFINITY,
        wall_time_s: 0.0,
    };

    for _ in 0..settings.multistart_count {
        let u = halton.next_point();
        let mut z = Vec::with_capacity(2 * circles + 1);
        z.extend((0..circles).map(|k| u[k] * caps[k]));
        z.extend((0..circles).map(|k| 2.0 * u[circles + k] * gaps[k]));
        let pursuer: f64 = z.iter().sum();
        z.push(timing_target(config, pursuer));

        let mut outcome = newton::solve(&sys, z, &params);
        diag.iterations += outcome.iterations;
        let mut accepted = None;
        for _ in 0..3 {
            diag.best_residual = diag.best_residual.min(outcome.norm);
            if !outcome.converged {
                break;
            }
            match check_reduced(&outcome.x, &caps, neg_tol) {
                Check::Accept(zc) => {
                    accepted = Some(zc);
                    break;
                }
                Check::Reject => break,
                Check::Rewrap(zw) => {
                    outcome = newton::solve(&sys, zw, &params);
                    diag.iterations += outcome.iterations;
                }
            }
        }
        let was_converged = outcome.converged;
        match accepted {
            Some(zc) if model::max_norm(&sys.residual(&zc)) <= settings.residual_tol => {
                diag.converged_starts += 1;
                let cand = Candidate {
                    objective: zc.iter().sum(),
                    arc_total: zc[..circles].iter().sum(),
                    z: zc,
                };
                if best.as_ref().map_or(true, |b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            _ if was_converged => diag.rejected_starts += 1,
            _ => {}
        }
    }

    let solution = match best {
        Some(c) => {
            let lengths = LengthVector::new(model::expand_pattern(pattern, &c.z))?;
            Some(PathSolution::from_lengths(
                config,
                pattern.clone(),
                lengths,
                SolutionSource::Pattern,
            )?)
        }
        None => None,
    };
    diag.status = if solution.is_some() {
        SolveStatus::Converged
    } else if diag.rejected_starts > 0 {
        SolveStatus::RejectedOnly
    } else {
        SolveStatus::NoConvergence
    };
    diag.wall_time_s = started.elapsed().as_secs_f64();
    Ok(SolveOutcome { solution, diagnostics: diag })
}

/// Stable stream id for a pattern so its starts do not depend on which other
/// patterns are solved.
fn pattern_stream(pattern: &TurnPattern) -> u64 {
    pattern.turns().iter().fold(1u64, |acc, t| {
        acc.wrapping_mul(3).wrapping_add(match t {
            Turn::Left => 1,
            Turn::Right => 2,
        })
    })
}
