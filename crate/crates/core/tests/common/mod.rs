//! Reference values shared by the integration tests. Values marked "table"
//! are the published two-decimal numbers; values marked "model" were
//! computed independently (outside this crate) from the same constraint
//! system and are frozen here.

#![allow(dead_code)]

use std::f64::consts::PI;

use intercept_core::{ObstacleSpec, Point, Pose, ScenarioConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct TableRow {
    pub lengths: &'static [f64],
    pub f: f64,
}

// Single obstacle, segment lengths (l1..l7) and totals.
pub const T2A_OPT: TableRow = TableRow { lengths: &[2.97, 0.0, 10.28, 0.0, 2.74, 10.13, 4.35], f: 30.47 };
pub const T2A_FEAS: TableRow = TableRow { lengths: &[0.0, 3.64, 10.57, 0.0, 1.93, 11.04, 4.53], f: 31.71 };
pub const T2B_OPT: TableRow = TableRow { lengths: &[0.0, 1.24, 12.96, 0.0, 6.30, 10.55, 10.35], f: 41.40 };
pub const T2B_FEAS: TableRow = TableRow { lengths: &[5.10, 0.0, 13.93, 0.0, 7.25, 8.35, 11.54], f: 46.17 };
pub const T2C_OPT: TableRow = TableRow { lengths: &[0.0, 2.59, 11.56, 0.0, 2.60, 10.71, 13.73], f: 41.19 };

// Segment times (t1..t7) and totals.
pub const T3A_OPT: (&[f64], f64) = (&[0.50, 0.0, 1.72, 0.0, 0.46, 1.67, 4.35], 4.35);
pub const T3A_FEAS: (&[f64], f64) = (&[0.0, 0.61, 1.76, 0.0, 0.32, 1.84, 4.53], 4.53);
pub const T3B_OPT: (&[f64], f64) = (&[0.0, 0.21, 2.16, 0.0, 1.05, 1.76, 5.18], 5.18);
pub const T3B_FEAS: (&[f64], f64) = (&[0.85, 0.0, 2.32, 0.0, 1.21, 1.39, 5.77], 5.77);
pub const T3C_OPT: (&[f64], f64) = (&[0.0, 0.43, 1.93, 0.0, 0.43, 1.78, 4.57], 4.57);

// Two obstacles.
pub const T5A: TableRow = TableRow { lengths: &[0.0, 2.05, 11.37, 0.0, 2.02, 7.45, 0.0, 1.21, 20.40, 31.95], f: 76.45 };
pub const T5B: TableRow = TableRow { lengths: &[0.0, 2.60, 11.61, 0.0, 0.57, 13.93, 0.0, 3.29, 9.74, 20.88], f: 62.62 };
pub const T5C: TableRow = TableRow { lengths: &[0.0, 2.04, 11.33, 0.0, 5.85, 2.07, 1.24, 0.0, 12.66, 10.20], f: 45.39 };
pub const T5D: TableRow = TableRow { lengths: &[0.0, 1.48, 11.39, 0.0, 5.96, 1.94, 1.27, 0.0, 17.01, 11.25], f: 50.30 };
pub const T5D_FEAS1: TableRow = TableRow { lengths: &[4.92, 0.0, 13.67, 0.0, 5.75, 1.83, 1.45, 0.0, 15.98, 12.60], f: 56.20 };
pub const T5D_FEAS2: TableRow = TableRow { lengths: &[0.0, 1.48, 11.39, 0.0, 2.23, 7.07, 0.0, 3.11, 14.90, 11.48], f: 51.66 };

/// (pattern, intercept, f, t) per two-obstacle case.
pub const T6: [(&str, (f64, f64), f64, f64); 4] = [
    ("RS+RS+RS+S_T", (31.9, 25.0), 76.45, 6.39),
    ("RS+RS+RS+S_T", (25.0, 25.85), 62.62, 6.96),
    ("RS+RS+LS+S_T", (25.0, 14.8), 45.39, 5.10),
    ("RS+RS+LS+S_T", (29.38, 14.73), 50.30, 5.58),
];

/// City, latitude, longitude, planar (x, y) in km.
pub const T7: [(&str, &str, &str, (f64, f64)); 4] = [
    ("Satkhira", "22°44'15.66\"N", "89°3'25.65\"E", (9133.10, 2528.32)),
    ("Narail", "23°11'44.15\"N", "89°29'49.47\"E", (9147.19, 2579.23)),
    ("Narayanganj", "23°38'35.46\"N", "90°28'55.86\"E", (9216.63, 2629.00)),
    ("Feni", "23°1'34.54\"N", "91°22'43.76\"E", (9351.30, 2560.40)),
];
pub const REALWORLD_INTERCEPT: (f64, f64) = (9291.3, 2664.32);
pub const T8: TableRow = TableRow {
    lengths: &[0.0, 12.82, 61.05, 0.0, 16.13, 55.03, 0.0, 5.36, 89.98, 120.18],
    f: 360.55,
};
pub const T8_PURSUER: f64 = 240.37;
pub const T8_TARGET: f64 = 120.18;

/// Model optima (four decimals) for the bundled scenarios.
pub const MODEL_OPTIMA: [(&str, &str, f64); 8] = [
    ("table1a", "LR", 30.4264),
    ("table1b", "RR", 41.3933),
    ("table1c", "RR", 41.1826),
    ("table4a", "RRR", 75.6935),
    ("table4b", "RRR", 62.4403),
    ("table4c", "RRL", 45.9013),
    ("table4d", "RRL", 50.6242),
    ("realworld", "RRR", 360.5539),
];

/// Model optima of the as-printed variants, which differ from the tables.
pub const PRINTED_OPTIMA: [(&str, f64); 2] = [("table1a_printed", 25.63), ("table1c_printed", 43.31)];

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Same zero pattern within `tol`.
pub fn same_signature(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (*x > tol) == (*y > tol))
}

/// Random single-obstacle scenario: positions in [-20, 20]², radii in
/// [1, 5], speed ratio in [1.5, 6].
pub fn random_single_obstacle(seed: u64) -> ScenarioConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = |rng: &mut ChaCha8Rng| (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
    let (px, py) = pos(&mut rng);
    let (tx, ty) = pos(&mut rng);
    let (ox, oy) = pos(&mut rng);
    let vt: f64 = rng.gen_range(0.5..3.0);
    let ratio: f64 = rng.gen_range(1.5..6.0);
    let ra: f64 = rng.gen_range(1.0..5.0);
    let rb: f64 = rng.gen_range(1.0..5.0);
    ScenarioConfig::new(
        Pose::new(px, py, rng.gen_range(0.0..2.0 * PI)),
        ratio * vt,
        ra,
        Pose::new(tx, ty, rng.gen_range(0.0..2.0 * PI)),
        vt,
        vec![ObstacleSpec::new(Point::new(ox, oy), rb).unwrap()],
    )
    .unwrap()
}
