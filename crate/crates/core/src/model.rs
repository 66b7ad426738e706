//! The interception model: segment-length variables, junction headings, and
//! the equality-constraint residuals whose zeros are interception paths.
//!
//! A scenario with `n` obstacles has `n + 1` turning circles (the pursuer's
//! own circle, then each obstacle boundary in visiting order). Circle `k`
//! owns three consecutive length variables: a left arc, a right arc and the
//! straight that leaves the circle. The last variable is the distance the
//! target travels before interception, giving `3n + 4` lengths in all.
//!
//! After each straight the pursuer position is pinned to the obstacle entry
//! point `(x_c − R cos θ, y_c + R sin θ)`, where `θ` is the heading at the end
//! of the straight. Residual layout, for `j = 1..=n` (one-based):
//!
//! | rows            | meaning                                     |
//! |-----------------|---------------------------------------------|
//! | `2j−1`, `2j`    | x / y closure of the CS block ending at obstacle `j` |
//! | `2n+1`, `2n+2`  | x / y coincidence of pursuer and target      |
//! | `2n+3`          | timing: `|V_T| Σ ℓ_pursuer − |V_P| ℓ_target` |

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    compose, obstacle_entry_point, ObstacleSpec, Point, Pose, SegmentSpec, SignedCurvature,
};

/// Max-norm feasibility tolerance for solver-produced solutions.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Max-norm tolerance when checking lengths printed to two decimals.
pub const TABLE_TOL: f64 = 0.05;

/// A fully validated problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pursuer: Pose,
    pursuer_speed: f64,
    min_turn_radius: f64,
    target: Pose,
    target_speed: f64,
    obstacles: Vec<ObstacleSpec>,
}

impl ScenarioConfig {
    /// Validates and builds a scenario. The obstacle list order is the
    /// visiting order.
    pub fn new(
        pursuer: Pose,
        pursuer_speed: f64,
        min_turn_radius: f64,
        target: Pose,
        target_speed: f64,
        obstacles: Vec<ObstacleSpec>,
    ) -> Result<Self> {
        if !pursuer.is_finite() {
            return Err(Error::scenario("pursuer", "position and heading must be finite"));
        }
        if !target.is_finite() {
            return Err(Error::scenario("target", "position and heading must be finite"));
        }
        if !(pursuer_speed.is_finite() && pursuer_speed > 0.0) {
            return Err(Error::scenario(
                "pursuer.speed",
                format!("must be positive, got {pursuer_speed}"),
            ));
        }
        if !(target_speed.is_finite() && target_speed >= 0.0) {
            return Err(Error::scenario(
                "target.speed",
                format!("must be nonnegative, got {target_speed}"),
            ));
        }
        if pursuer_speed <= target_speed {
            return Err(Error::scenario(
                "pursuer.speed",
                format!(
                    "pursuer speed {pursuer_speed} must exceed target speed {target_speed} \
                     for interception"
                ),
            ));
        }
        if !(min_turn_radius.is_finite() && min_turn_radius > 0.0) {
            return Err(Error::scenario(
                "pursuer.turn_radius",
                format!("must be positive, got {min_turn_radius}"),
            ));
        }
        Ok(Self {
            pursuer: Pose::new(pursuer.x, pursuer.y, pursuer.theta),
            pursuer_speed,
            min_turn_radius,
            target: Pose::new(target.x, target.y, target.theta),
            target_speed,
            obstacles,
        })
    }

    pub fn pursuer(&self) -> Pose {
        self.pursuer
    }

    pub fn pursuer_speed(&self) -> f64 {
        self.pursuer_speed
    }

    pub fn min_turn_radius(&self) -> f64 {
        self.min_turn_radius
    }

    /// Pursuer curvature bound `a = 1 / R_a`.
    pub fn pursuer_curvature(&self) -> f64 {
        1.0 / self.min_turn_radius
    }

    pub fn target(&self) -> Pose {
        self.target
    }

    pub fn target_speed(&self) -> f64 {
        self.target_speed
    }

    pub fn obstacles(&self) -> &[ObstacleSpec] {
        &self.obstacles
    }

    pub fn obstacle_count(&self) -> usize {
        self.obstacles.len()
    }

    /// Number of length variables, `3n + 4`.
    pub fn dimension(&self) -> usize {
        3 * self.obstacles.len() + 4
    }

    /// Number of equality constraints, `2n + 3`.
    pub fn residual_dimension(&self) -> usize {
        2 * self.obstacles.len() + 3
    }

    /// Curvature magnitude of each turning circle: the pursuer's own, then
    /// each obstacle's.
    pub fn circle_curvatures(&self) -> Vec<f64> {
        std::iter::once(self.pursuer_curvature())
            .chain(self.obstacles.iter().map(ObstacleSpec::curvature))
            .collect()
    }

    /// Same scenario shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Result<Self> {
        let shift = |p: Pose| Pose::new(p.x + dx, p.y + dy, p.theta);
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| ObstacleSpec::new(Point::new(o.center().x + dx, o.center().y + dy), o.radius()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            shift(self.pursuer),
            self.pursuer_speed,
            self.min_turn_radius,
            shift(self.target),
            self.target_speed,
            obstacles,
        )
    }

    /// Same scenario rotated by `phi` about the origin.
    pub fn rotated(&self, phi: f64) -> Result<Self> {
        let (s, c) = phi.sin_cos();
        let rot = |x: f64, y: f64| (c * x - s * y, s * x + c * y);
        let pose = |p: Pose| {
            let (x, y) = rot(p.x, p.y);
            Pose::new(x, y, p.theta + phi)
        };
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| {
                let (x, y) = rot(o.center().x, o.center().y);
                ObstacleSpec::new(Point::new(x, y), o.radius())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            pose(self.pursuer),
            self.pursuer_speed,
            self.min_turn_radius,
            pose(self.target),
            self.target_speed,
            obstacles,
        )
    }

    /// Same scenario with every position, radius and speed multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::invalid(format!("scale factor must be positive, got {s}")));
        }
        let pose = |p: Pose| Pose::new(p.x * s, p.y * s, p.theta);
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| ObstacleSpec::new(Point::new(o.center().x * s, o.center().y * s), o.radius() * s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            pose(self.pursuer),
            self.pursuer_speed * s,
            self.min_turn_radius * s,
            pose(self.target),
            self.target_speed * s,
            obstacles,
        )
    }

    fn check_dimension(&self, lengths: &[f64]) -> Result<()> {
        if lengths.len() != self.dimension() {
            return Err(Error::invalid(format!(
                "expected {} lengths for {} obstacle(s), got {}",
                self.dimension(),
                self.obstacle_count(),
                lengths.len()
            )));
        }
        Ok(())
    }
}

/// Turn direction on one turning circle. `Left < Right` gives the
/// lexicographic pattern order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Turn {
    Left,
    Right,
}

impl Turn {
    pub fn letter(self) -> char {
        match self {
            Turn::Left => 'L',
            Turn::Right => 'R',
        }
    }
}

/// One turn direction per turning circle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TurnPattern(Vec<Turn>);

impl TurnPattern {
    pub fn new(turns: Vec<Turn>) -> Self {
        Self(turns)
    }

    pub fn turns(&self) -> &[Turn] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Compact form such as `"LR"`.
    pub fn compact(&self) -> String {
        self.0.iter().map(|t| t.letter()).collect()
    }

    /// Path-type form such as `"LS+RS+S_T"`.
    pub fn label(&self) -> String {
        let mut s: String = self
            .0
            .iter()
            .map(|t| format!("{}S+", t.letter()))
            .collect();
        s.push_str("S_T");
        s
    }

    pub(crate) fn check_for(&self, config: &ScenarioConfig) -> Result<()> {
        if self.len() != config.obstacle_count() + 1 {
            return Err(Error::invalid(format!(
                "pattern {} has {} turns, scenario needs {}",
                self.compact(),
                self.len(),
                config.obstacle_count() + 1
            )));
        }
        Ok(())
    }
}

impl fmt::Display for TurnPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for TurnPattern {
    type Err = Error;

    /// Accepts `"LR"` or `"LS+RS+S_T"`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_end_matches("S_T").trim_end_matches('+');
        let mut turns = Vec::new();
        for part in body.split('+').flat_map(|p| p.chars()) {
            match part {
                'L' | 'l' => turns.push(Turn::Left),
                'R' | 'r' => turns.push(Turn::Right),
                'S' | 's' | ' ' => {}
                other => {
                    return Err(Error::parse("turn pattern", format!("unexpected `{other}` in {s:?}")))
                }
            }
        }
        if turns.is_empty() {
            return Err(Error::parse("turn pattern", format!("no turns in {s:?}")));
        }
        Ok(Self(turns))
    }
}

/// The `3n + 4` nonnegative segment lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthVector(Vec<f64>);

impl LengthVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 || (values.len() - 4) % 3 != 0 {
            return Err(Error::invalid(format!(
                "length vector dimension must be 3n+4, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::invalid(format!("length {} is {v}; lengths must be nonnegative", i + 1)));
        }
        Ok(Self(values))
    }

    pub fn zeros(obstacles: usize) -> Self {
        Self(vec![0.0; 3 * obstacles + 4])
    }

    pub fn obstacle_count(&self) -> usize {
        (self.0.len() - 4) / 3
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn left(&self, circle: usize) -> f64 {
        self.0[3 * circle]
    }

    pub fn right(&self, circle: usize) -> f64 {
        self.0[3 * circle + 1]
    }

    pub fn straight(&self, circle: usize) -> f64 {
        self.0[3 * circle + 2]
    }

    pub fn target(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn pursuer_total(&self) -> f64 {
        self.0[..self.0.len() - 1].iter().sum()
    }

    pub fn arc_total(&self) -> f64 {
        (0..=self.obstacle_count())
            .map(|k| self.left(k) + self.right(k))
            .sum()
    }
}

impl Deref for LengthVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Signed heading-rate coefficients: `(+a_k, −a_k, 0)` repeated for every
/// turning circle `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCoefficients {
    values: Vec<f64>,
}

impl AlphaCoefficients {
    pub fn new(config: &ScenarioConfig) -> Self {
        let values = config
            .circle_curvatures()
            .into_iter()
            .flat_map(|a| [a, -a, 0.0])
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Signed curvature applied along pursuer segment `i` (zero-based).
    pub fn curvature(&self, i: usize) -> SignedCurvature {
        SignedCurvature(self.values[i])
    }
}

/// Pursuer headings at every junction time `t_0 .. t_{3n+3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionHeadings {
    cumulative: Vec<f64>,
}

impl JunctionHeadings {
    /// Unwrapped headings, suitable for differentiation.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Headings wrapped into `[0, 2π)`.
    pub fn normalized(&self) -> Vec<f64> {
        self.cumulative
            .iter()
            .map(|&t| crate::geometry::normalize_angle(t))
            .collect()
    }
}

pub fn junction_headings(config: &ScenarioConfig, lengths: &[f64]) -> Result<JunctionHeadings> {
    config.check_dimension(lengths)?;
    Ok(JunctionHeadings {
        cumulative: headings_raw(config, lengths),
    })
}

fn headings_raw(config: &ScenarioConfig, lengths: &[f64]) -> Vec<f64> {
    let alpha = AlphaCoefficients::new(config);
    let mut th = Vec::with_capacity(lengths.len());
    th.push(config.pursuer.theta);
    for (a, l) in alpha.values.iter().zip(lengths) {
        let last = *th.last().unwrap();
        th.push(last + a * l);
    }
    th
}

/// Total length `Σ ℓ_i`.
pub fn objective(lengths: &[f64]) -> f64 {
    lengths.iter().sum()
}

/// Target position after it has travelled `target_len`.
pub fn target_position(config: &ScenarioConfig, target_len: f64) -> Point {
    let t = config.target;
    Point::new(
        t.x + target_len * t.theta.cos(),
        t.y + target_len * t.theta.sin(),
    )
}

/// Pinned entry point on obstacle `index` (zero-based) for the given heading.
pub fn pinned_entry(config: &ScenarioConfig, index: usize, heading: f64) -> Point {
    obstacle_entry_point(&config.obstacles[index], heading)
}

/// Equality-constraint residuals, `2n + 3` entries in the documented layout.
pub fn residuals(config: &ScenarioConfig, lengths: &[f64]) -> Result<Vec<f64>> {
    config.check_dimension(lengths)?;
    Ok(evaluate(config, lengths, false).0)
}

/// Residuals together with their analytic Jacobian (`(2n+3) × (3n+4)`).
pub fn residuals_and_jacobian(
    config: &ScenarioConfig,
    lengths: &[f64],
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    config.check_dimension(lengths)?;
    let (r, j) = evaluate(config, lengths, true);
    Ok((r, j.expect("jacobian requested")))
}

/// Max-norm of a residual vector.
pub fn max_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// True when all lengths are nonnegative and the residual max-norm is
/// within `tol`.
pub fn is_feasible(config: &ScenarioConfig, lengths: &[f64], tol: f64) -> Result<bool> {
    let r = residuals(config, lengths)?;
    Ok(lengths.iter().all(|&l| l >= 0.0) && max_norm(&r) <= tol)
}

fn evaluate(config: &ScenarioConfig, l: &[f64], want_jac: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
    let n = config.obstacle_count();
    let dim = l.len();
    let target_idx = dim - 1;
    let alpha = AlphaCoefficients::new(config).values;
    let curv = config.circle_curvatures();
    let th = headings_raw(config, l);
    // ∂θ(t_m)/∂ℓ_i = α_i for i < m
    let dth = |m: usize, i: usize| if i < m { alpha[i] } else { 0.0 };

    let mut r = vec![0.0; 2 * n + 3];
    let mut jac = want_jac.then(|| DMatrix::zeros(2 * n + 3, dim));
    let p0 = config.pursuer;
    let tgt = config.target;
    let (sin_t, cos_t) = tgt.theta.sin_cos();

    for k in 0..=n {
        let rows = (2 * k, 2 * k + 1);
        let inv = 1.0 / curv[k];
        let (m0, m1, m2, m3) = (3 * k, 3 * k + 1, 3 * k + 2, 3 * k + 3);
        let s_idx = 3 * k + 2;
        let (s0, c0) = th[m0].sin_cos();
        let (s1, c1) = th[m1].sin_cos();
        let (s2, c2) = th[m2].sin_cos();
        let (s3, c3) = th[m3].sin_cos();

        // Anchors first so large coordinates cancel before the small terms.
        let start_anchor = if k == 0 {
            Point::new(p0.x, p0.y)
        } else {
            config.obstacles[k - 1].center()
        };
        let end_anchor = if k < n {
            config.obstacles[k].center()
        } else {
            Point::new(tgt.x, tgt.y)
        };
        let mut rx = start_anchor.x - end_anchor.x;
        let mut ry = start_anchor.y - end_anchor.y;

        // start: pinned entry of the previous obstacle
        if k > 0 {
            let rad = config.obstacles[k - 1].radius();
            rx -= rad * c0;
            ry += rad * s0;
        }
        // end: pinned entry of this block's obstacle, or the target
        if k < n {
            let rad = config.obstacles[k].radius();
            rx += rad * c3;
            ry -= rad * s3;
        } else {
            rx -= l[target_idx] * cos_t;
            ry -= l[target_idx] * sin_t;
        }
        rx += inv * (-s0 + 2.0 * s1 - s2) + l[s_idx] * c3;
        ry += inv * (c0 - 2.0 * c1 + c2) + l[s_idx] * s3;
        r[rows.0] = rx;
        r[rows.1] = ry;

        if let Some(jac) = jac.as_mut() {
            for i in 0..dim {
                let (d0, d1, d2, d3) = (dth(m0, i), dth(m1, i), dth(m2, i), dth(m3, i));
                let mut jx = inv * (-c0 * d0 + 2.0 * c1 * d1 - c2 * d2) - l[s_idx] * s3 * d3;
                let mut jy = inv * (-s0 * d0 + 2.0 * s1 * d1 - s2 * d2) + l[s_idx] * c3 * d3;
                if k > 0 {
                    let rad = config.obstacles[k - 1].radius();
                    jx += rad * s0 * d0;
                    jy += rad * c0 * d0;
                }
                if k < n {
                    let rad = config.obstacles[k].radius();
                    jx -= rad * s3 * d3;
                    jy -= rad * c3 * d3;
                }
                if i == s_idx {
                    jx += c3;
                    jy += s3;
                }
                if k == n && i == target_idx {
                    jx -= cos_t;
                    jy -= sin_t;
                }
                jac[(rows.0, i)] = jx;
                jac[(rows.1, i)] = jy;
            }
        }
    }

    let pursuer_sum: f64 = l[..target_idx].iter().sum();
    r[2 * n + 2] = config.target_speed * pursuer_sum - config.pursuer_speed * l[target_idx];
    if let Some(jac) = jac.as_mut() {
        for i in 0..target_idx {
            jac[(2 * n + 2, i)] = config.target_speed;
        }
        jac[(2 * n + 2, target_idx)] = -config.pursuer_speed;
    }
    (r, jac)
}

/// Pattern-reduced unknowns: one arc per circle, one straight per circle,
/// and the target length.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedLengths {
    pub arcs: Vec<f64>,
    pub straights: Vec<f64>,
    pub target: f64,
}

impl ReducedLengths {
    /// Flat `[arcs.., straights.., target]` layout used by the solvers.
    pub fn from_flat(z: &[f64]) -> Self {
        let circles = (z.len() - 1) / 2;
        Self {
            arcs: z[..circles].to_vec(),
            straights: z[circles..2 * circles].to_vec(),
            target: z[2 * circles],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut z = self.arcs.clone();
        z.extend_from_slice(&self.straights);
        z.push(self.target);
        z
    }
}

/// Writes each arc into the left or right slot chosen by `pattern` and zero
/// into the other.
pub fn apply_pattern(pattern: &TurnPattern, reduced: &ReducedLengths) -> Result<LengthVector> {
    let circles = pattern.len();
    if reduced.arcs.len() != circles || reduced.straights.len() != circles {
        return Err(Error::invalid(format!(
            "pattern has {circles} circles but got {} arcs and {} straights",
            reduced.arcs.len(),
            reduced.straights.len()
        )));
    }
    let all = reduced
        .arcs
        .iter()
        .chain(&reduced.straights)
        .chain(std::iter::once(&reduced.target));
    for v in all {
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::invalid(format!("reduced length {v} is negative or not finite")));
        }
    }
    Ok(LengthVector(expand_pattern(pattern, &reduced.to_flat())))
}

/// Unchecked expansion of a flat reduced vector; used inside solver loops
/// where iterates may be negative.
pub(crate) fn expand_pattern(pattern: &TurnPattern, z: &[f64]) -> Vec<f64> {
    let circles = pattern.len();
    let mut out = vec![0.0; 3 * circles + 1];
    for (k, turn) in pattern.turns().iter().enumerate() {
        let slot = match turn {
            Turn::Left => 3 * k,
            Turn::Right => 3 * k + 1,
        };
        out[slot] = z[k];
        out[3 * k + 2] = z[circles + k];
    }
    out[3 * circles] = z[2 * circles];
    out
}

/// Column of the full layout that reduced unknown `idx` maps to.
pub(crate) fn reduced_column(pattern: &TurnPattern, idx: usize) -> usize {
    let circles = pattern.len();
    if idx < circles {
        match pattern.turns()[idx] {
            Turn::Left => 3 * idx,
            Turn::Right => 3 * idx + 1,
        }
    } else if idx < 2 * circles {
        3 * (idx - circles) + 2
    } else {
        3 * circles
    }
}

/// One CS block of the pursuer path: the block's start pose (the pursuer
/// start, or the pinned entry of the previous obstacle), its left arc,
/// right arc and straight, and the pose reached at its end.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBlock {
    pub start: Pose,
    pub segments: [SegmentSpec; 3],
    pub end: Pose,
    /// Entry point the next block is pinned to; `None` for the last block.
    pub pinned_next: Option<Point>,
}

/// Rebuilds the pursuer path block by block with the pinned junctions.
pub fn pursuer_chain(config: &ScenarioConfig, lengths: &[f64]) -> Result<Vec<ChainBlock>> {
    config.check_dimension(lengths)?;
    let n = config.obstacle_count();
    let th = headings_raw(config, lengths);
    let curv = config.circle_curvatures();
    let mut blocks = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let start = if k == 0 {
            config.pursuer
        } else {
            let e = pinned_entry(config, k - 1, th[3 * k]);
            Pose::new(e.x, e.y, th[3 * k])
        };
        let segments = [
            SegmentSpec::arc(SignedCurvature::left(curv[k]), lengths[3 * k]),
            SegmentSpec::arc(SignedCurvature::right(curv[k]), lengths[3 * k + 1]),
            SegmentSpec::straight(lengths[3 * k + 2]),
        ];
        let end = compose(start, &segments)?;
        let pinned_next = (k < n).then(|| pinned_entry(config, k, th[3 * k + 3]));
        blocks.push(ChainBlock {
            start,
            segments,
            end,
            pinned_next,
        });
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;

    fn single() -> ScenarioConfig {
        ScenarioConfig::new(
            Pose::new(0.0, 0.0, 1.5 * PI),
            6.0,
            1.0,
            Pose::new(20.0, 12.0, PI),
            1.0,
            vec![ObstacleSpec::new(Point::new(4.0, 8.0), 2.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn rejects_slow_pursuer() {
        let err = ScenarioConfig::new(
            Pose::default(),
            2.0,
            1.0,
            Pose::new(5.0, 0.0, 0.0),
            2.0,
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("must exceed target speed"));
        assert!(ScenarioConfig::new(Pose::default(), 2.0, 0.0, Pose::default(), 1.0, vec![]).is_err());
    }

    #[test]
    fn heading_recurrence() {
        let cfg = single();
        let h = junction_headings(&cfg, &[2.97, 0.0, 10.28, 0.0, 2.74, 10.13, 4.35]).unwrap();
        assert_abs_diff_eq!(h.cumulative()[2], 1.5 * PI + 2.97, epsilon = 1e-12);
        assert_abs_diff_eq!(h.cumulative()[5], 1.5 * PI + 2.97 - 0.5 * 2.74, epsilon = 1e-12);
        let zero = junction_headings(&cfg, &[0.0; 7]).unwrap();
        assert!(zero.cumulative().iter().all(|&t| t == 1.5 * PI));
        assert!(junction_headings(&cfg, &[0.0; 6]).is_err());
    }

    #[test]
    fn straights_keep_heading() {
        let cfg = single();
        let l = [0.3, 1.2, 4.0, 2.2, 0.1, 7.0, 3.0];
        let h = junction_headings(&cfg, &l).unwrap();
        for k in 1..=2 {
            assert_eq!(h.cumulative()[3 * k], h.cumulative()[3 * k - 1]);
        }
    }

    #[test]
    fn objective_examples() {
        assert_abs_diff_eq!(objective(&[2.97, 0.0, 10.28, 0.0, 2.74, 10.13, 4.35]), 30.47, epsilon = 1e-9);
        assert_eq!(objective(&[0.0; 7]), 0.0);
        let t5a = [0.0, 2.05, 11.37, 0.0, 2.02, 7.45, 0.0, 1.21, 20.40, 31.95];
        assert_abs_diff_eq!(objective(&t5a), 76.45, epsilon = 1e-9);
    }

    #[test]
    fn timing_residual_row() {
        let cfg = single();
        let l = [2.97, 0.0, 10.28, 0.0, 2.74, 10.13, 26.12 / 6.0];
        let r = residuals(&cfg, &l).unwrap();
        assert!(r[4].abs() <= 0.01);
        let zero = residuals(&cfg, &[0.0; 7]).unwrap();
        assert_eq!(zero[4], 0.0);
    }

    #[test]
    fn zero_lengths_reduce_to_offsets() {
        let cfg = single();
        let r = residuals(&cfg, &[0.0; 7]).unwrap();
        let th = 1.5 * PI;
        let e = obstacle_entry_point(&cfg.obstacles()[0], th);
        assert_abs_diff_eq!(r[0], 0.0 - e.x, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], 0.0 - e.y, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2], e.x - 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[3], e.y - 12.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_pattern_examples() {
        let p: TurnPattern = "LR".parse().unwrap();
        let red = ReducedLengths {
            arcs: vec![2.97, 2.74],
            straights: vec![10.28, 10.13],
            target: 4.35,
        };
        assert_eq!(
            apply_pattern(&p, &red).unwrap().as_slice(),
            &[2.97, 0.0, 10.28, 0.0, 2.74, 10.13, 4.35]
        );
        let p: TurnPattern = "RS+RS+RS+S_T".parse().unwrap();
        let red = ReducedLengths {
            arcs: vec![2.05, 2.02, 1.21],
            straights: vec![11.37, 7.45, 20.40],
            target: 31.95,
        };
        assert_eq!(
            apply_pattern(&p, &red).unwrap().as_slice(),
            &[0.0, 2.05, 11.37, 0.0, 2.02, 7.45, 0.0, 1.21, 20.40, 31.95]
        );
        let zero = ReducedLengths {
            arcs: vec![0.0; 3],
            straights: vec![0.0; 3],
            target: 0.0,
        };
        assert_eq!(apply_pattern(&p, &zero).unwrap().as_slice(), &[0.0; 10]);
        let neg = ReducedLengths {
            target: -1.0,
            ..zero
        };
        assert!(apply_pattern(&p, &neg).is_err());
    }

    #[test]
    fn pattern_strings() {
        let p: TurnPattern = "RS+RS+LS+S_T".parse().unwrap();
        assert_eq!(p.compact(), "RRL");
        assert_eq!(p.label(), "RS+RS+LS+S_T");
        assert!("XS+S_T".parse::<TurnPattern>().is_err());
    }

    #[test]
    fn target_position_examples() {
        let cfg = single();
        let p = target_position(&cfg, 4.35);
        assert_abs_diff_eq!(p.x, 15.65, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 12.0, epsilon = 1e-12);
        let p0 = target_position(&cfg, 0.0);
        assert_eq!((p0.x, p0.y), (20.0, 12.0));
    }

    #[test]
    fn alpha_pattern_repeats() {
        let cfg = single();
        let a = AlphaCoefficients::new(&cfg);
        assert_eq!(a.values(), &[1.0, -1.0, 0.0, 0.5, -0.5, 0.0]);
    }

    #[test]
    fn length_vector_validation() {
        assert!(LengthVector::new(vec![0.0; 5]).is_err());
        assert!(LengthVector::new(vec![0.0, -1.0, 0.0, 0.0]).is_err());
        let l = LengthVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(l.obstacle_count(), 0);
        assert_eq!(l.pursuer_total(), 6.0);
        assert_eq!(l.arc_total(), 3.0);
    }
}
