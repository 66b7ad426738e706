//! Brute-force reference solver. For a fixed pattern and fixed arc lengths
//! the residuals are affine in the straights and the target length, so each
//! grid point over the arcs reduces to a small least-squares problem.

use nalgebra::{DMatrix, DVector};

use super::pattern::{anchor_gaps, arc_caps, enumerate_patterns, length_scale};
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{self, LengthVector, ScenarioConfig, TurnPattern};
use crate::solution::{PathSolution, SolutionSource};

pub const MIN_RESOLUTION: usize = 8;
/// Refinements per pattern, lowest grid residual first.
const MAX_CANDIDATES: usize = 32;
const MAX_SWEEPS: usize = 400;

struct Affine<'a> {
    config: &'a ScenarioConfig,
    pattern: &'a TurnPattern,
    circles: usize,
}

#[derive(Clone)]
struct Fit {
    /// Reduced vector `[arcs, straights, target]`.
    z: Vec<f64>,
    norm: f64,
}

impl Affine<'_> {
    fn residual(&self, z: &[f64]) -> Vec<f64> {
        let l = model::expand_pattern(self.pattern, z);
        model::residuals(self.config, &l).expect("dimension checked")
    }

    /// Best straights/target for the given arcs, by least squares on the
    /// affine map sampled from residual evaluations.
    fn fit(&self, arcs: &[f64]) -> Fit {
        let c = self.circles;
        let mut z = arcs.to_vec();
        z.extend(std::iter::repeat(0.0).take(c + 1));
        let r0 = self.residual(&z);
        let m = r0.len();
        let mut a = DMatrix::zeros(m, c + 1);
        for k in 0..=c {
            let mut zk = z.clone();
            zk[c + k] = 1.0;
            let rk = self.residual(&zk);
            for row in 0..m {
                a[(row, k)] = rk[row] - r0[row];
            }
        }
        let b = -DVector::from_column_slice(&r0);
        let sol = a
            .svd(true, true)
            .solve(&b, 1e-14)
            .unwrap_or_else(|_| DVector::zeros(c + 1));
        for k in 0..=c {
            z[c + k] = sol[k];
        }
        let norm = model::max_norm(&self.residual(&z));
        Fit { z, norm }
    }
}

fn neg_part(fit: &Fit, circles: usize) -> f64 {
    fit.z[circles..].iter().fold(0.0_f64, |m, v| m.max(-v))
}

fn half_sq(aff: &Affine, arcs: &[f64]) -> (f64, Fit) {
    let f = aff.fit(arcs);
    let r = aff.residual(&f.z);
    (0.5 * r.iter().map(|v| v * v).sum::<f64>(), f)
}

/// Cyclic coordinate descent on the arcs, minimising the squared fitted
/// residual with a parabolic step along each axis.
fn refine(aff: &Affine, start: &[f64], caps: &[f64], step0: f64) -> Fit {
    let c = aff.circles;
    let mut arcs = start.to_vec();
    let (mut g, mut best) = half_sq(aff, &arcs);
    let mut steps = vec![step0; c];
    let min_step = 1e-15 * caps.iter().cloned().fold(1.0, f64::max);
    for _ in 0..MAX_SWEEPS {
        let before = g;
        for k in 0..c {
            let h = steps[k];
            let x0 = arcs[k];
            let trial = |x: f64| {
                let mut a = arcs.clone();
                a[k] = x.clamp(0.0, caps[k]);
                let (v, f) = half_sq(aff, &a);
                (a, v, f)
            };
            let (ap, gp, fp) = trial(x0 + h);
            let (am, gm, fm) = trial(x0 - h);
            let curv = gp + gm - 2.0 * g;
            let mut moved = false;
            if curv > 0.0 {
                let shift = (0.5 * h * (gm - gp) / curv).clamp(-2.0 * h, 2.0 * h);
                let (av, gv, fv) = trial(x0 + shift);
                if gv < g && gv <= gp && gv <= gm {
                    arcs = av;
                    g = gv;
                    best = fv;
                    steps[k] = (shift.abs()).max(min_step);
                    moved = true;
                }
            }
            if !moved {
                if gp < g && gp <= gm {
                    arcs = ap;
                    g = gp;
                    best = fp;
                    steps[k] = 2.0 * h;
                } else if gm < g {
                    arcs = am;
                    g = gm;
                    best = fm;
                    steps[k] = 2.0 * h;
                } else {
                    steps[k] = (0.25 * h).max(min_step);
                }
            }
        }
        if g == 0.0 || (before - g <= 1e-16 * before && steps.iter().all(|&h| h <= min_step)) {
            break;
        }
    }
    best
}

fn solve_one(config: &ScenarioConfig, pattern: &TurnPattern, resolution: usize, parallel: bool) -> Option<Fit> {
    let circles = pattern.len();
    let aff = Affine { config, pattern, circles };
    let caps = arc_caps(config);
    let steps: Vec<f64> = caps.iter().map(|c| c / resolution as f64).collect();
    let total = resolution.pow(circles as u32);
    let index_to_arcs = |mut idx: usize| {
        let mut arcs = vec![0.0; circles];
        for k in (0..circles).rev() {
            arcs[k] = (idx % resolution) as f64 * steps[k];
            idx /= resolution;
        }
        arcs
    };

    let slabs: Vec<usize> = (0..resolution).collect();
    let per_slab = total / resolution;
    let norms: Vec<f64> = exec::map_collect(&slabs, parallel, |&s| {
        (0..per_slab)
            .map(|i| {
                let f = aff.fit(&index_to_arcs(s * per_slab + i));
                f.norm.max(neg_part(&f, circles))
            })
            .collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .collect();

    // Residual can move by about (lever arm × arc step) between grid points.
    let reach: f64 = anchor_gaps(config).iter().sum::<f64>()
        + config.obstacles().iter().map(|o| o.radius()).sum::<f64>();
    let kmax = config.circle_curvatures().iter().cloned().fold(0.0, f64::max);
    let lever = 4.0 + kmax * reach;
    let hmax = steps.iter().cloned().fold(0.0, f64::max);
    let grid_tol = 2.0 * lever * hmax;

    let mut candidates = Vec::new();
    for idx in 0..total {
        let v = norms[idx];
        if v > grid_tol {
            continue;
        }
        let mut coords = vec![0usize; circles];
        let mut t = idx;
        for k in (0..circles).rev() {
            coords[k] = t % resolution;
            t /= resolution;
        }
        let mut is_min = true;
        for code in 0..3usize.pow(circles as u32) {
            let mut nb = 0usize;
            let mut c = code;
            let mut inside = true;
            let mut zero = true;
            for &ck in &coords {
                let off = (c % 3) as isize - 1;
                c /= 3;
                if off != 0 {
                    zero = false;
                }
                let v = ck as isize + off;
                if v < 0 || v >= resolution as isize {
                    inside = false;
                    break;
                }
                nb = nb * resolution + v as usize;
            }
            if zero || !inside {
                continue;
            }
            if norms[nb] < v || (norms[nb] == v && nb < idx) {
                is_min = false;
                break;
            }
        }
        if is_min {
            candidates.push(idx);
        }
    }
    candidates.sort_by(|a, b| norms[*a].total_cmp(&norms[*b]).then(a.cmp(b)));
    candidates.truncate(MAX_CANDIDATES);

    let scale = length_scale(config);
    let accept_tol = 1e-6 * (1.0 + scale);
    let refined = exec::map_collect(&candidates, parallel, |&idx| {
        refine(&aff, &index_to_arcs(idx), &caps, 0.5 * hmax)
    });
    let mut best: Option<Fit> = None;
    for f in refined {
        if f.norm > accept_tol || neg_part(&f, circles) > accept_tol {
            continue;
        }
        if f.z[..circles].iter().zip(&caps).any(|(a, c)| *a >= *c) {
            continue;
        }
        let obj: f64 = f.z.iter().sum();
        let replace = match &best {
            None => true,
            Some(b) => {
                let bo: f64 = b.z.iter().sum();
                if (obj - bo).abs() > 1e-9 {
                    obj < bo
                } else {
                    f.z[..circles].iter().sum::<f64>() < b.z[..circles].iter().sum::<f64>()
                }
            }
        };
        if replace {
            best = Some(f);
        }
    }
    best
}

/// Grid search over the arc lengths of every pattern; `resolution` points per
/// arc axis. Cost grows as `resolution^(n+1)`, so this is meant for `n ≤ 2`.
pub fn grid_oracle(config: &ScenarioConfig, resolution: usize) -> Result<Option<PathSolution>> {
    grid_oracle_with(config, resolution, true)
}

pub fn grid_oracle_with(
    config: &ScenarioConfig,
    resolution: usize,
    parallel: bool,
) -> Result<Option<PathSolution>> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::invalid(format!(
            "oracle resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let mut best: Option<(f64, PathSolution)> = None;
    for pattern in enumerate_patterns(config.obstacle_count()) {
        let Some(fit) = solve_one(config, &pattern, resolution, parallel) else {
            continue;
        };
        let z: Vec<f64> = fit.z.iter().map(|v| v.max(0.0)).collect();
        let lengths = LengthVector::new(model::expand_pattern(&pattern, &z))?;
        let obj = model::objective(&lengths);
        if best.as_ref().map_or(true, |(bo, _)| obj < bo - 1e-9) {
            let sol = PathSolution::from_lengths(config, pattern, lengths, SolutionSource::Oracle)?;
            best = Some((obj, sol));
        }
    }
    Ok(best.map(|(_, s)| s))
}
