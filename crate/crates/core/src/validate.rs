//! Forward replay of a planned path under the unicycle kinematics, with
//! interception, clearance, tangency and time-accounting checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Pose, SignedCurvature};
use crate::model::{self, AlphaCoefficients, ScenarioConfig};
use crate::solution::PathSolution;

/// Replays never take more steps than this; the default step is widened to
/// respect it.
const MAX_DEFAULT_STEPS: f64 = 200_000.0;
const DT_FLOOR: f64 = 1e-6;
/// Every nonzero segment is integrated with at least this many steps.
const MIN_SEGMENT_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBreakdown {
    /// `ℓ_i / |V_P|` for the `3n + 3` pursuer segments.
    pub pursuer: Vec<f64>,
    /// `ℓ_T / |V_T|`; zero when the target does not move.
    pub target: f64,
    /// Sum of the pursuer times.
    pub total: f64,
}

/// Segment durations for a length vector.
pub fn time_breakdown_for(lengths: &[f64], pursuer_speed: f64, target_speed: f64) -> Result<TimeBreakdown> {
    let Some((&target_len, pursuer_lens)) = lengths.split_last() else {
        return Err(Error::invalid("empty length vector"));
    };
    let pursuer: Vec<f64> = pursuer_lens.iter().map(|l| l / pursuer_speed).collect();
    let target = if target_len == 0.0 {
        0.0
    } else if target_speed == 0.0 {
        return Err(Error::invalid("target length is nonzero but the target speed is zero"));
    } else {
        target_len / target_speed
    };
    let total = pursuer.iter().sum();
    Ok(TimeBreakdown { pursuer, target, total })
}

pub fn time_breakdown(config: &ScenarioConfig, solution: &PathSolution) -> Result<TimeBreakdown> {
    time_breakdown_for(&solution.lengths, config.pursuer_speed(), config.target_speed())
}

/// How junctions between blocks are replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReplayMode {
    /// After each straight that ends at an obstacle, jump to the pinned
    /// entry point (the model's own chaining) and record the jump.
    #[default]
    PaperExact,
    /// Never jump; the recorded gap is how far the replay ends up from the
    /// entry point.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub curvature: SignedCurvature,
    pub duration: f64,
    /// Entry point to pin to after this segment, with its obstacle index.
    pub pin: Option<(usize, Point)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub speed: f64,
    pub segments: Vec<ControlSegment>,
}

impl ControlSchedule {
    pub fn from_lengths(config: &ScenarioConfig, lengths: &[f64]) -> Result<Self> {
        let blocks = model::pursuer_chain(config, lengths)?;
        let alpha = AlphaCoefficients::new(config);
        let speed = config.pursuer_speed();
        let mut segments = Vec::with_capacity(lengths.len() - 1);
        for (k, block) in blocks.iter().enumerate() {
            for j in 0..3 {
                let i = 3 * k + j;
                let pin = if j == 2 { block.pinned_next.map(|p| (k, p)) } else { None };
                segments.push(ControlSegment {
                    curvature: alpha.curvature(i),
                    duration: lengths[i] / speed,
                    pin,
                });
            }
        }
        Ok(Self { speed, segments })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    fn min_nonzero_duration(&self) -> Option<f64> {
        self.segments
            .iter()
            .map(|s| s.duration)
            .filter(|&d| d > 0.0)
            .min_by(f64::total_cmp)
    }

    /// `max(min nonzero duration / 1000, 1e-6)`, widened so a replay stays
    /// under a fixed step budget.
    pub fn default_dt(&self) -> f64 {
        let total = self.total_duration();
        match self.min_nonzero_duration() {
            Some(d) => (d / 1000.0).max(DT_FLOOR).max(total / MAX_DEFAULT_STEPS),
            None => DT_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub pursuer: Pose,
    pub target: Pose,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinEvent {
    pub obstacle: usize,
    /// Sample index right after the pin.
    pub sample: usize,
    pub jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub mode: ReplayMode,
    pub samples: Vec<Sample>,
    pub pins: Vec<PinEvent>,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

fn rk4_step(p: Pose, speed: f64, curvature: f64, h: f64) -> Pose {
    let f = |th: f64| (speed * th.cos(), speed * th.sin(), speed * curvature);
    let k1 = f(p.theta);
    let k2 = f(p.theta + 0.5 * h * k1.2);
    let k3 = f(p.theta + 0.5 * h * k2.2);
    let k4 = f(p.theta + h * k3.2);
    Pose {
        x: p.x + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y: p.y + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        theta: p.theta + h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2),
    }
}

/// Fixed-step RK4 replay of both agents under `ReplayMode::PaperExact`.
pub fn integrate(config: &ScenarioConfig, schedule: &ControlSchedule, dt: f64) -> Result<Trajectory> {
    integrate_with(config, schedule, dt, ReplayMode::PaperExact)
}

/// Requires `0 < dt ≤ (smallest nonzero duration) / 10`. Steps are shortened
/// so segment boundaries fall exactly on samples.
pub fn integrate_with(
    config: &ScenarioConfig,
    schedule: &ControlSchedule,
    dt: f64,
    mode: ReplayMode,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if let Some(d) = schedule.min_nonzero_duration() {
        if dt > d / 10.0 * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "time step {dt} exceeds a tenth of the shortest segment duration {d}"
            )));
        }
    }
    Ok(replay(config, schedule, dt, mode))
}

fn replay(config: &ScenarioConfig, schedule: &ControlSchedule, dt: f64, mode: ReplayMode) -> Trajectory {
    let start = config.pursuer();
    let tgt0 = config.target();
    let vt = config.target_speed();
    let mut pursuer = Pose { x: start.x, y: start.y, theta: start.theta };
    let mut target = tgt0;
    let mut t = 0.0;
    let mut samples = vec![Sample { t, pursuer, target }];
    let mut pins = Vec::new();

    for seg in &schedule.segments {
        if seg.duration > 0.0 {
            let steps = ((seg.duration / dt).ceil() as usize).max(MIN_SEGMENT_STEPS);
            let h = seg.duration / steps as f64;
            let t0 = t;
            for s in 1..=steps {
                pursuer = rk4_step(pursuer, schedule.speed, seg.curvature.value(), h);
                target = rk4_step(target, vt, 0.0, h);
                t = t0 + seg.duration * s as f64 / steps as f64;
                samples.push(Sample { t, pursuer, target });
            }
        }
        if let Some((obstacle, entry)) = seg.pin {
            let jump = pursuer.position().distance(entry);
            if mode == ReplayMode::PaperExact {
                pursuer.x = entry.x;
                pursuer.y = entry.y;
                let last = samples.last_mut().expect("nonempty");
                last.pursuer = pursuer;
            }
            pins.push(PinEvent { obstacle, sample: samples.len() - 1, jump });
        }
    }
    Trajectory { dt, mode, samples, pins }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClearanceViolation {
    pub obstacle: usize,
    /// Deepest penetration into the obstacle interior.
    pub depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionCheck {
    pub obstacle: usize,
    /// `|dist(approach line, centre) − R_b|`.
    pub line_gap: f64,
    /// Distance between the replayed position and the pinned entry point.
    pub pin_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub mode: ReplayMode,
    pub dt: f64,
    pub miss_distance: f64,
    pub clearance_violations: Vec<ClearanceViolation>,
    pub junctions: Vec<JunctionCheck>,
    /// Largest `line_gap` over all junctions.
    pub tangency_gap: f64,
    /// Largest `pin_jump` over all junctions.
    pub max_pin_jump: f64,
    pub length_error: f64,
    pub time_error: f64,
    pub final_pursuer: Pose,
    pub final_target: Pose,
}

impl ValidationReport {
    pub fn max_penetration(&self) -> f64 {
        self.clearance_violations.iter().map(|v| v.depth).fold(0.0, f64::max)
    }

    /// Interception within `miss_tol` and no interior penetration.
    pub fn passes(&self, miss_tol: f64) -> bool {
        self.miss_distance <= miss_tol && self.clearance_violations.is_empty()
    }
}

/// Replays `solution` with entry-point pinning at the default step.
pub fn validate(config: &ScenarioConfig, solution: &PathSolution) -> Result<ValidationReport> {
    validate_lengths(config, &solution.lengths, None, ReplayMode::PaperExact)
}

pub fn validate_with(
    config: &ScenarioConfig,
    solution: &PathSolution,
    dt: Option<f64>,
    mode: ReplayMode,
) -> Result<ValidationReport> {
    validate_lengths(config, &solution.lengths, dt, mode)
}

pub fn validate_lengths(
    config: &ScenarioConfig,
    lengths: &[f64],
    dt: Option<f64>,
    mode: ReplayMode,
) -> Result<ValidationReport> {
    let schedule = ControlSchedule::from_lengths(config, lengths)?;
    let dt = match dt {
        Some(dt) if dt.is_finite() && dt > 0.0 => dt,
        Some(dt) => return Err(Error::invalid(format!("time step must be positive, got {dt}"))),
        None => schedule.default_dt(),
    };
    let traj = replay(config, &schedule, dt, mode);
    let last = *traj.final_sample();
    let miss_distance = last.pursuer.position().distance(last.target.position());

    let mut deepest = vec![0.0_f64; config.obstacle_count()];
    for s in &traj.samples {
        let p = s.pursuer.position();
        for (b, obs) in config.obstacles().iter().enumerate() {
            let depth = obs.radius() - p.distance(obs.center());
            deepest[b] = deepest[b].max(depth);
        }
    }
    let clearance_violations = config
        .obstacles()
        .iter()
        .zip(&deepest)
        .enumerate()
        .filter(|(_, (obs, d))| **d > 1e-6 * obs.radius())
        .map(|(obstacle, (_, &depth))| ClearanceViolation { obstacle, depth })
        .collect();

    let headings = model::junction_headings(config, lengths)?;
    let th = headings.cumulative();
    let junctions: Vec<JunctionCheck> = traj
        .pins
        .iter()
        .map(|pin| {
            let obs = &config.obstacles()[pin.obstacle];
            let heading = th[3 * pin.obstacle + 3];
            let entry = model::pinned_entry(config, pin.obstacle, heading);
            let (s, c) = heading.sin_cos();
            let (vx, vy) = (obs.center().x - entry.x, obs.center().y - entry.y);
            let line_dist = (c * vy - s * vx).abs();
            JunctionCheck {
                obstacle: pin.obstacle,
                line_gap: (line_dist - obs.radius()).abs(),
                pin_jump: pin.jump,
            }
        })
        .collect();
    let tangency_gap = junctions.iter().map(|j| j.line_gap).fold(0.0, f64::max);
    let max_pin_jump = junctions.iter().map(|j| j.pin_jump).fold(0.0, f64::max);

    let mut travelled = 0.0;
    let mut jumps_at = traj.pins.iter().map(|p| p.sample).peekable();
    for (i, w) in traj.samples.windows(2).enumerate() {
        // Pins move the sample without travel; skip the jump itself.
        while jumps_at.peek().map_or(false, |&s| s < i + 1) {
            jumps_at.next();
        }
        let pinned_here = jumps_at.peek() == Some(&(i + 1)) && traj.mode == ReplayMode::PaperExact;
        let seg = w[0].pursuer.position().distance(w[1].pursuer.position());
        travelled += if pinned_here {
            // Integrated step length before the pin equals speed × h.
            (w[1].t - w[0].t) * config.pursuer_speed()
        } else {
            seg
        };
    }
    let planned: f64 = lengths[..lengths.len() - 1].iter().sum();
    let length_error = (travelled - planned).abs();
    let times = time_breakdown_for(lengths, config.pursuer_speed(), config.target_speed())?;
    let time_error = (last.t - times.total).abs();

    Ok(ValidationReport {
        mode,
        dt,
        miss_distance,
        clearance_violations,
        junctions,
        tangency_gap,
        max_pin_jump,
        length_error,
        time_error,
        final_pursuer: last.pursuer,
        final_target: last.target,
    })
}
