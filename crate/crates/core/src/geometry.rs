//! Planar poses, circular arcs and straight segments.
//!
//! Every operation here is a pure function. Headings leaving an operation are
//! normalized into `[0, 2π)`; trigonometry inside an operation works on the
//! unnormalized accumulated angle.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Position plus heading, measured counterclockwise from the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    /// Builds a pose with its heading normalized into `[0, 2π)`.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

/// Path curvature with its sign encoding turn direction: positive turns
/// left (counterclockwise), negative turns right, zero is straight.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct SignedCurvature(pub f64);

impl SignedCurvature {
    pub const STRAIGHT: SignedCurvature = SignedCurvature(0.0);

    pub fn left(magnitude: f64) -> Self {
        Self(magnitude.abs())
    }

    pub fn right(magnitude: f64) -> Self {
        Self(-magnitude.abs())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn magnitude(self) -> f64 {
        self.0.abs()
    }

    pub fn is_straight(self) -> bool {
        self.0 == 0.0
    }
}

/// One constant-curvature piece of a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub curvature: SignedCurvature,
    pub length: f64,
}

impl SegmentSpec {
    pub fn straight(length: f64) -> Self {
        Self {
            curvature: SignedCurvature::STRAIGHT,
            length,
        }
    }

    pub fn arc(curvature: SignedCurvature, length: f64) -> Self {
        Self { curvature, length }
    }

    /// Checks `length >= 0` and, for arcs, that the turn stays below one
    /// full revolution.
    pub fn validate(&self) -> Result<()> {
        if !self.length.is_finite() || self.length < 0.0 {
            return Err(Error::invalid(format!(
                "segment length must be finite and nonnegative, got {}",
                self.length
            )));
        }
        if !self.curvature.0.is_finite() {
            return Err(Error::invalid("segment curvature must be finite"));
        }
        if self.length * self.curvature.magnitude() >= TAU {
            return Err(Error::invalid(format!(
                "arc of length {} at curvature {} makes a full revolution",
                self.length, self.curvature.0
            )));
        }
        Ok(())
    }

    /// Heading change produced by this segment.
    pub fn turn_angle(&self) -> f64 {
        self.curvature.0 * self.length
    }

    pub fn propagate(&self, start: Pose) -> Result<Pose> {
        if self.curvature.is_straight() {
            propagate_straight(start, self.length)
        } else {
            propagate_arc(start, self.curvature, self.length)
        }
    }
}

/// A static circular obstacle; its boundary doubles as a turning circle of
/// curvature `1 / radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSpec {
    center: Point,
    radius: f64,
}

impl ObstacleSpec {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid("obstacle center must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!(
                "obstacle radius must be positive, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.radius
    }
}

fn check_pose(p: &Pose) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("pose components must be finite"))
    }
}

/// Pose after travelling `arc_length` along a circle of signed curvature
/// `curvature`.
pub fn propagate_arc(start: Pose, curvature: SignedCurvature, arc_length: f64) -> Result<Pose> {
    check_pose(&start)?;
    let u = curvature.0;
    if !u.is_finite() || u == 0.0 {
        return Err(Error::invalid("arc curvature must be finite and nonzero"));
    }
    if !arc_length.is_finite() || arc_length < 0.0 {
        return Err(Error::invalid(format!(
            "arc length must be finite and nonnegative, got {arc_length}"
        )));
    }
    let (x, y) = arc_displacement(start.theta, u, arc_length);
    Ok(Pose::new(start.x + x, start.y + y, start.theta + u * arc_length))
}

/// Displacement `((sin θ' − sin θ)/u, −(cos θ' − cos θ)/u)` written with
/// half-angle products so it stays accurate for small turns.
pub(crate) fn arc_displacement(theta: f64, u: f64, arc_length: f64) -> (f64, f64) {
    let half = 0.5 * u * arc_length;
    let mid = theta + half;
    let chord = 2.0 * half.sin() / u;
    (chord * mid.cos(), chord * mid.sin())
}

pub fn propagate_straight(start: Pose, length: f64) -> Result<Pose> {
    check_pose(&start)?;
    if !length.is_finite() || length < 0.0 {
        return Err(Error::invalid(format!(
            "straight length must be finite and nonnegative, got {length}"
        )));
    }
    Ok(Pose {
        x: start.x + length * start.theta.cos(),
        y: start.y + length * start.theta.sin(),
        theta: normalize_angle(start.theta),
    })
}

/// Entry point on an obstacle for a given approach heading:
/// `(x_b − R cos θ, y_b + R sin θ)`.
///
/// This is the pinned junction used by the interception model. It lies on
/// the obstacle circle but is not in general where a line of heading `θ`
/// touches it; see [`tangency_point`].
pub fn obstacle_entry_point(obstacle: &ObstacleSpec, heading: f64) -> Point {
    let r = obstacle.radius;
    Point::new(
        obstacle.center.x - r * heading.cos(),
        obstacle.center.y + r * heading.sin(),
    )
}

/// Point where a line of the given heading touches the obstacle circle,
/// on the side selected by `turn` (the circle lies to the left of the line
/// for a left turn).
pub fn tangency_point(obstacle: &ObstacleSpec, heading: f64, left: bool) -> Point {
    let r = obstacle.radius;
    let s = if left { 1.0 } else { -1.0 };
    Point::new(
        obstacle.center.x + s * r * heading.sin(),
        obstacle.center.y - s * r * heading.cos(),
    )
}

/// Center of the turning circle entered from `pose` with the given signed
/// curvature.
pub fn turn_center(pose: Pose, curvature: SignedCurvature) -> Option<Point> {
    if curvature.is_straight() {
        return None;
    }
    let r = 1.0 / curvature.0;
    Some(Point::new(
        pose.x - r * pose.theta.sin(),
        pose.y + r * pose.theta.cos(),
    ))
}

/// Folds a segment chain through [`SegmentSpec::propagate`].
pub fn compose(start: Pose, segments: &[SegmentSpec]) -> Result<Pose> {
    segments.iter().try_fold(start, |pose, seg| seg.propagate(pose))
}

/// Samples a segment chain with spacing at most `step` in arc length.
///
/// Each segment contributes its endpoint exactly, so the last sample is the
/// composed endpoint rather than a multiple of `step`.
pub fn sample_path(start: Pose, segments: &[SegmentSpec], step: f64) -> Result<Vec<Pose>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(format!("sample step must be positive, got {step}")));
    }
    check_pose(&start)?;
    let mut out = vec![Pose::new(start.x, start.y, start.theta)];
    let mut seg_start = start;
    for seg in segments {
        seg.validate()?;
        if seg.length == 0.0 {
            continue;
        }
        let pieces = (seg.length / step).ceil().max(1.0) as usize;
        for i in 1..pieces {
            let s = seg.length * i as f64 / pieces as f64;
            out.push(SegmentSpec { length: s, ..*seg }.propagate(seg_start)?);
        }
        let end = seg.propagate(seg_start)?;
        out.push(end);
        seg_start = end;
    }
    Ok(out)
}
