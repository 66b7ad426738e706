//! Scenario documents (JSON) and the bundled fixtures.
//!
//! Lengths are in scenario units (kilometres for geographic scenarios),
//! speeds in units per time unit, headings in radians counterclockwise from
//! the x-axis. Headings may be written as numbers or as `pi` fractions such
//! as `"5pi/6"`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{self, Axis, GeoPoint, EARTH_RADIUS_KM};
use crate::geometry::{ObstacleSpec, Point, Pose};
use crate::model::ScenarioConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Text(String),
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        Number::Value(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<Number>,
    pub theta: Number,
    pub speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<Number>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoSettings {
    pub reference_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub pursuer: AgentEntry,
    pub target: AgentEntry,
    #[serde(default)]
    pub obstacles: Vec<ObstacleEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo: Option<GeoSettings>,
}

/// Parses `1.5`, `pi`, `-pi/2`, `5pi/6`, `5*pi/6`, `2π/3`.
pub fn parse_heading(text: &str) -> Result<f64> {
    let ctx = "heading";
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let lower = s.to_ascii_lowercase().replace('π', "pi");
    let Some(pos) = lower.find("pi") else {
        return Err(Error::parse(ctx, format!("cannot read `{text}`")));
    };
    let coef_text = lower[..pos].trim_end_matches('*');
    let coef = match coef_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c
            .parse::<f64>()
            .map_err(|e| Error::parse(ctx, format!("coefficient `{c}` in `{text}`: {e}")))?,
    };
    let rest = &lower[pos + 2..];
    let den = if rest.is_empty() {
        1.0
    } else if let Some(d) = rest.strip_prefix('/') {
        d.parse::<f64>()
            .map_err(|e| Error::parse(ctx, format!("denominator `{d}` in `{text}`: {e}")))?
    } else {
        return Err(Error::parse(ctx, format!("unexpected `{rest}` in `{text}`")));
    };
    if den == 0.0 {
        return Err(Error::parse(ctx, format!("zero denominator in `{text}`")));
    }
    Ok(coef * PI / den)
}

fn number(v: &Number, field: &str) -> Result<f64> {
    match v {
        Number::Value(x) => Ok(*x),
        Number::Text(t) => parse_heading(t).map_err(|e| Error::scenario(field, e.to_string())),
    }
}

fn geo_coord(v: &Number, axis: Axis, field: &str) -> Result<f64> {
    match v {
        Number::Value(x) => Ok(*x),
        Number::Text(t) => geo::parse_angle(t, axis).map_err(|e| Error::scenario(field, e.to_string())),
    }
}

fn position(
    field: &str,
    x: Option<f64>,
    y: Option<f64>,
    lat: Option<&Number>,
    lon: Option<&Number>,
    radius: f64,
) -> Result<Point> {
    match (x, y, lat, lon) {
        (Some(x), Some(y), None, None) => Ok(Point::new(x, y)),
        (None, None, Some(lat), Some(lon)) => {
            let lat = geo_coord(lat, Axis::Lat, &format!("{field}.lat"))?;
            let lon = geo_coord(lon, Axis::Lon, &format!("{field}.lon"))?;
            let g = GeoPoint::with_radius(lat, lon, radius)
                .map_err(|e| Error::scenario(field, e.to_string()))?;
            Ok(geo::project(&g))
        }
        _ => Err(Error::scenario(field, "give either both x and y or both lat and lon")),
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("scenario", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    /// Projects geographic positions and validates everything.
    pub fn to_config(&self) -> Result<ScenarioConfig> {
        let radius = self.geo.as_ref().map_or(EARTH_RADIUS_KM, |g| g.reference_radius);
        let agent = |name: &str, a: &AgentEntry| -> Result<Pose> {
            let p = position(name, a.x, a.y, a.lat.as_ref(), a.lon.as_ref(), radius)?;
            let theta = number(&a.theta, &format!("{name}.theta"))?;
            Ok(Pose { x: p.x, y: p.y, theta })
        };
        let pursuer = agent("pursuer", &self.pursuer)?;
        let target = agent("target", &self.target)?;
        if self.target.turn_radius.is_some() {
            return Err(Error::scenario("target.turn_radius", "the target moves in a straight line"));
        }
        let turn_radius = self
            .pursuer
            .turn_radius
            .ok_or_else(|| Error::scenario("pursuer.turn_radius", "missing"))?;
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let field = format!("obstacles[{i}]");
                let c = position(&field, o.x, o.y, o.lat.as_ref(), o.lon.as_ref(), radius)?;
                ObstacleSpec::new(c, o.radius).map_err(|e| Error::scenario(format!("{field}.radius"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        ScenarioConfig::new(
            pursuer,
            self.pursuer.speed,
            turn_radius,
            target,
            self.target.speed,
            obstacles,
        )
    }

    /// Planar dump of a validated config; loading it gives the same config.
    pub fn canonical(config: &ScenarioConfig, name: Option<&str>) -> Self {
        let agent = |p: Pose, speed: f64, turn_radius: Option<f64>| AgentEntry {
            x: Some(p.x),
            y: Some(p.y),
            lat: None,
            lon: None,
            theta: Number::Value(p.theta),
            speed,
            turn_radius,
        };
        Self {
            name: name.map(str::to_string),
            description: None,
            pursuer: agent(config.pursuer(), config.pursuer_speed(), Some(config.min_turn_radius())),
            target: agent(config.target(), config.target_speed(), None),
            obstacles: config
                .obstacles()
                .iter()
                .map(|o| ObstacleEntry {
                    x: Some(o.center().x),
                    y: Some(o.center().y),
                    lat: None,
                    lon: None,
                    radius: o.radius(),
                })
                .collect(),
            geo: None,
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    ScenarioFile::from_json(text)?.to_config()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text)
}

/// Canonical JSON text for a config.
pub fn dump_scenario(config: &ScenarioConfig, name: Option<&str>) -> String {
    ScenarioFile::canonical(config, name).to_json()
}

const BUNDLED: &[(&str, &str)] = &[
    ("table1a", include_str!("../scenarios/table1a.json")),
    ("table1a_printed", include_str!("../scenarios/table1a_printed.json")),
    ("table1b", include_str!("../scenarios/table1b.json")),
    ("table1c", include_str!("../scenarios/table1c.json")),
    ("table1c_printed", include_str!("../scenarios/table1c_printed.json")),
    ("table4a", include_str!("../scenarios/table4a.json")),
    ("table4b", include_str!("../scenarios/table4b.json")),
    ("table4c", include_str!("../scenarios/table4c.json")),
    ("table4d", include_str!("../scenarios/table4d.json")),
    ("realworld", include_str!("../scenarios/realworld.json")),
];

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled(name: &str) -> Result<ScenarioConfig> {
    let text = bundled_text(name)
        .ok_or_else(|| Error::invalid(format!("no bundled scenario named `{name}`")))?;
    parse_scenario(text)
}
