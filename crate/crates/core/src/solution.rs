use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Point;
use crate::model::{self, LengthVector, ScenarioConfig, TurnPattern};
use crate::validate::{time_breakdown_for, TimeBreakdown};

/// Which solver produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SolutionSource {
    /// Square Newton system for a fixed turn pattern.
    Pattern,
    /// Augmented-Lagrangian solve with both arc variables free.
    FullNlp,
    /// Brute-force grid search.
    Oracle,
    /// Lengths supplied by the caller.
    Given,
}

/// A candidate interception path with everything derived from its lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSolution {
    /// Turn per circle. For solutions with both arcs active on a circle this
    /// records the longer arc; see `mixed_circles`.
    pub pattern: TurnPattern,
    /// Circles (zero-based) where both the left and the right arc are
    /// nonzero.
    pub mixed_circles: Vec<usize>,
    pub lengths: LengthVector,
    /// Unwrapped junction headings `θ(t_0) .. θ(t_{3n+3})`.
    pub headings: Vec<f64>,
    pub intercept: Point,
    pub times: TimeBreakdown,
    /// Residual max-norm at these lengths.
    pub residual_norm: f64,
    pub source: SolutionSource,
}

impl PathSolution {
    /// Derives headings, intercept point, timing and residual for a length
    /// vector.
    pub fn from_lengths(
        config: &ScenarioConfig,
        pattern: TurnPattern,
        lengths: LengthVector,
        source: SolutionSource,
    ) -> Result<Self> {
        let headings = model::junction_headings(config, &lengths)?.cumulative().to_vec();
        let residual_norm = model::max_norm(&model::residuals(config, &lengths)?);
        let intercept = model::target_position(config, lengths.target());
        let times = time_breakdown_for(&lengths, config.pursuer_speed(), config.target_speed())?;
        let mixed_circles = (0..=lengths.obstacle_count())
            .filter(|&k| lengths.left(k) > 0.0 && lengths.right(k) > 0.0)
            .collect();
        Ok(Self {
            pattern,
            mixed_circles,
            lengths,
            headings,
            intercept,
            times,
            residual_norm,
            source,
        })
    }

    /// Labels each circle by its longer arc.
    pub fn dominant_pattern(lengths: &LengthVector) -> TurnPattern {
        use crate::model::Turn;
        TurnPattern::new(
            (0..=lengths.obstacle_count())
                .map(|k| {
                    if lengths.right(k) > lengths.left(k) {
                        Turn::Right
                    } else {
                        Turn::Left
                    }
                })
                .collect(),
        )
    }

    /// Total length `f`, recomputed from the lengths.
    pub fn objective(&self) -> f64 {
        model::objective(&self.lengths)
    }

    pub fn total_time(&self) -> f64 {
        self.times.total
    }

    pub fn pursuer_distance(&self) -> f64 {
        self.lengths.pursuer_total()
    }

    pub fn target_distance(&self) -> f64 {
        self.lengths.target()
    }
}
