//! Latitude/longitude ingestion and the per-point equirectangular projection
//! used for the geographic scenario.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    latitude: f64,
    longitude: f64,
    reference_radius: f64,
}

impl GeoPoint {
    /// Degrees, north and east positive.
    pub fn new(latitude: f64, longitude: f64) -> Result<Self> {
        Self::with_radius(latitude, longitude, EARTH_RADIUS_KM)
    }

    pub fn with_radius(latitude: f64, longitude: f64, reference_radius: f64) -> Result<Self> {
        if !(latitude.is_finite() && latitude.abs() <= 90.0) {
            return Err(Error::invalid(format!("latitude {latitude} outside [-90, 90]")));
        }
        if !(longitude.is_finite() && longitude.abs() <= 180.0) {
            return Err(Error::invalid(format!("longitude {longitude} outside [-180, 180]")));
        }
        if !(reference_radius.is_finite() && reference_radius > 0.0) {
            return Err(Error::invalid(format!("reference radius {reference_radius} must be positive")));
        }
        Ok(Self { latitude, longitude, reference_radius })
    }

    /// Parses two coordinate strings, each either decimal degrees or
    /// degrees-minutes-seconds such as `22°44'15.66"N`.
    pub fn parse(lat: &str, lon: &str) -> Result<Self> {
        Self::new(parse_angle(lat, Axis::Lat)?, parse_angle(lon, Axis::Lon)?)
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn reference_radius(&self) -> f64 {
        self.reference_radius
    }
}

/// `x = R cos(lat) lon`, `y = R lat`, angles in radians.
pub fn project(p: &GeoPoint) -> Point {
    let lat = p.latitude.to_radians();
    let lon = p.longitude.to_radians();
    Point::new(p.reference_radius * lat.cos() * lon, p.reference_radius * lat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Lat,
    Lon,
}

/// Parses decimal degrees (`-23.5`, `23.5S`) or DMS (`23°30'0"S`,
/// `23 30 0 S`, `23d30m0s`) into signed decimal degrees.
pub fn parse_angle(text: &str, axis: Axis) -> Result<f64> {
    let ctx = match axis {
        Axis::Lat => "latitude",
        Axis::Lon => "longitude",
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::parse(ctx, "empty coordinate"));
    }
    let (body, hemi) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some(c @ ('N' | 'S' | 'E' | 'W')) => (&s[..s.len() - 1], Some(c)),
        _ => (s, None),
    };
    let sign = match (axis, hemi) {
        (_, None) => 1.0,
        (Axis::Lat, Some('N')) | (Axis::Lon, Some('E')) => 1.0,
        (Axis::Lat, Some('S')) | (Axis::Lon, Some('W')) => -1.0,
        (_, Some(h)) => return Err(Error::parse(ctx, format!("hemisphere `{h}` does not fit a {ctx}"))),
    };

    let parts: Vec<&str> = body
        .split(|c: char| matches!(c, '°' | '\'' | '"' | '′' | '″' | 'd' | 'm' | 's' | ' ' | ','))
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() || parts.len() > 3 {
        return Err(Error::parse(ctx, format!("cannot read `{text}`")));
    }
    let nums = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| Error::parse(ctx, format!("`{p}` in `{text}`: {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    if nums.len() > 1 {
        if nums[0] < 0.0 && hemi.is_some() {
            return Err(Error::parse(ctx, "negative degrees together with a hemisphere letter"));
        }
        if nums[1..].iter().any(|v| !(0.0..60.0).contains(v)) {
            return Err(Error::parse(ctx, format!("minutes/seconds out of range in `{text}`")));
        }
    }
    let deg_sign = if nums[0] < 0.0 { -1.0 } else { 1.0 };
    let mut value = nums[0].abs();
    if let Some(m) = nums.get(1) {
        value += m / 60.0;
    }
    if let Some(sec) = nums.get(2) {
        value += sec / 3600.0;
    }
    Ok(sign * deg_sign * value)
}
