//! Both-arc formulation: minimise `Σ ℓ_i` subject to the `2n + 3` equalities
//! and `0 ≤ ℓ_i`, arcs below one revolution. Augmented Lagrangian outer loop,
//! projected Newton inner loop, then a min-norm Newton polish on the free
//! variables so the result meets the same residual tolerance as the pattern
//! solver.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::lowdisc::{mix_seed, ShiftedHalton};
use super::pattern::{
    anchor_gaps, arc_caps, negative_tolerance, timing_target, SolveDiagnostics,
    SolveOutcome, SolveStatus,
};
use super::settings::SolverSettings;
use crate::error::Result;
use crate::exec;
use crate::model::{self, LengthVector, ScenarioConfig};
use crate::solution::{PathSolution, SolutionSource};

/// Lengths below this are snapped to zero before the feasibility polish.
const SNAP: f64 = 1e-7;
/// Relative objective increase accepted to return a single-arc solution.
const PURIFY_SLACK: f64 = 1e-6;
const NLP_STREAM: u64 = 0xf011_a110;

struct Problem<'a> {
    config: &'a ScenarioConfig,
    upper: Vec<f64>,
    timing_scale: f64,
}

impl<'a> Problem<'a> {
    fn new(config: &'a ScenarioConfig) -> Self {
        let n = config.obstacle_count();
        let caps = arc_caps(config);
        let mut upper = vec![f64::INFINITY; 3 * n + 4];
        for (k, cap) in caps.iter().enumerate() {
            upper[3 * k] = cap * (1.0 - 1e-9);
            upper[3 * k + 1] = cap * (1.0 - 1e-9);
        }
        Self {
            config,
            upper,
            timing_scale: 1.0 / config.pursuer_speed(),
        }
    }

    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        let mut c = model::residuals(self.config, x).expect("dimension checked");
        *c.last_mut().unwrap() *= self.timing_scale;
        c
    }

    fn constraints_and_jacobian(&self, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let (mut c, mut j) = model::residuals_and_jacobian(self.config, x).expect("dimension checked");
        let last = c.len() - 1;
        c[last] *= self.timing_scale;
        for col in 0..j.ncols() {
            j[(last, col)] *= self.timing_scale;
        }
        (c, j)
    }

    fn project(&self, x: &mut [f64]) {
        for (v, hi) in x.iter_mut().zip(&self.upper) {
            *v = v.clamp(0.0, *hi);
        }
    }

    /// Clears tolerated negatives; a static target never moves.
    fn clamp(&self, x: &mut [f64]) {
        for v in x.iter_mut() {
            *v = v.max(0.0);
        }
        if self.config.target_speed() == 0.0 {
            *x.last_mut().expect("nonempty") = 0.0;
        }
    }

    fn lagrangian(&self, x: &[f64], lam: &[f64], rho: f64) -> f64 {
        let c = self.constraints(x);
        let obj: f64 = x.iter().sum();
        obj + c
            .iter()
            .zip(lam)
            .map(|(ci, li)| li * ci + 0.5 * rho * ci * ci)
            .sum::<f64>()
    }

    /// `Jᵀ w` at `x`.
    fn jt_w(&self, x: &[f64], w: &DVector<f64>) -> DVector<f64> {
        let (_, j) = self.constraints_and_jacobian(x);
        j.transpose() * w
    }
}

fn projected_gradient_norm(x: &[f64], g: &DVector<f64>, upper: &[f64]) -> f64 {
    x.iter()
        .zip(g.iter())
        .zip(upper)
        .map(|((xi, gi), hi)| (xi - (xi - gi).clamp(0.0, *hi)).abs())
        .fold(0.0, f64::max)
}

/// Approximately minimises the augmented Lagrangian over the box.
fn inner(p: &Problem, x: &mut Vec<f64>, lam: &[f64], rho: f64, omega: f64) -> (f64, usize) {
    let dim = x.len();
    let mut pg = f64::INFINITY;
    let mut iters = 0;
    for _ in 0..200 {
        iters += 1;
        let (c, j) = p.constraints_and_jacobian(x);
        let w = DVector::from_iterator(c.len(), c.iter().zip(lam).map(|(ci, li)| li + rho * ci));
        let g = DVector::from_element(dim, 1.0) + j.transpose() * &w;
        pg = projected_gradient_norm(x, &g, &p.upper);
        if pg <= omega {
            break;
        }

        let eps = 1e-12;
        let free: Vec<usize> = (0..dim)
            .filter(|&i| !((x[i] <= eps && g[i] > 0.0) || (x[i] >= p.upper[i] - eps && g[i] < 0.0)))
            .collect();
        if free.is_empty() {
            break;
        }

        // Hessian: Gauss–Newton part plus curvature of the weighted residuals.
        let mut h = (j.transpose() * &j) * rho;
        for &i in &free {
            let step = 1e-6 * x[i].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            let col = (p.jt_w(&xp, &w) - p.jt_w(&xm, &w)) / (2.0 * step);
            for r in 0..dim {
                h[(r, i)] += col[r];
            }
        }
        let hf = DMatrix::from_fn(free.len(), free.len(), |a, b| {
            0.5 * (h[(free[a], free[b])] + h[(free[b], free[a])])
        });
        let gf = DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]));
        let eig = hf.symmetric_eigen();
        let emax = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let delta = 1e-8 * emax.max(1.0);
        let vtg = eig.eigenvectors.transpose() * &gf;
        let scaled = DVector::from_iterator(
            vtg.len(),
            vtg.iter()
                .zip(eig.eigenvalues.iter())
                .map(|(v, e)| v / e.abs().max(delta)),
        );
        let mut df = -(&eig.eigenvectors * scaled);
        if !df.iter().all(|v| v.is_finite()) || df.dot(&gf) >= 0.0 {
            df = -gf.clone();
        }
        let mut d = vec![0.0; dim];
        for (a, &i) in free.iter().enumerate() {
            d[i] = df[a];
        }

        let l0 = p.lagrangian(x, lam, rho);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-12 {
            let mut xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            p.project(&mut xt);
            let decrease: f64 = g.iter().zip(xt.iter().zip(x.iter())).map(|(gi, (a, b))| gi * (a - b)).sum();
            let lt = p.lagrangian(&xt, lam, rho);
            if lt.is_finite() && lt <= l0 + 1e-4 * decrease.min(0.0) {
                moved = xt != *x;
                *x = xt;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (pg, iters)
}

/// Newton steps on the equalities restricted to the free variables, taking
/// the minimum-norm correction each time.
fn polish(p: &Problem, x: &mut Vec<f64>, tol: f64) -> bool {
    for v in x.iter_mut() {
        if *v < SNAP {
            *v = 0.0;
        }
    }
    // The target length stays free even at zero: with a static target the
    // timing row only involves it.
    let last = x.len() - 1;
    let free: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0 || i == last).collect();
    let check = |x: &[f64]| model::max_norm(&model::residuals(p.config, x).expect("dimension checked"));
    for _ in 0..30 {
        if check(x) <= tol {
            return true;
        }
        let (c, j) = p.constraints_and_jacobian(x);
        if free.len() < c.len() {
            return false;
        }
        let jf = DMatrix::from_fn(c.len(), free.len(), |r, a| j[(r, free[a])]);
        let cv = DVector::from_column_slice(&c);
        let Some(y) = (&jf * jf.transpose()).lu().solve(&cv) else {
            return false;
        };
        let d = jf.transpose() * y;
        for (a, &i) in free.iter().enumerate() {
            x[i] -= d[a];
        }
        if !x.iter().all(|v| v.is_finite()) {
            return false;
        }
    }
    check(x) <= tol
}

struct Run {
    x: Option<Vec<f64>>,
    iterations: usize,
    residual: f64,
    rejected: bool,
}

fn run_from(p: &Problem, x0: Vec<f64>, settings: &SolverSettings, neg_tol: f64) -> Run {
    let m = p.config.residual_dimension();
    let mut x = x0;
    p.project(&mut x);
    let mut lam = vec![0.0; m];
    let mut rho = 10.0;
    let ctol = 1e-9;
    let gtol = 1e-8;
    let mut eta = 0.1;
    let mut omega = 1e-2;
    let mut iterations = 0;
    let scale = 1.0 + x.iter().sum::<f64>();
    for _ in 0..60 {
        let (pg, it) = inner(p, &mut x, &lam, rho, omega);
        iterations += it;
        let c = p.constraints(&x);
        let cn = model::max_norm(&c);
        if !cn.is_finite() {
            break;
        }
        // Stuck at a local minimiser of the infeasibility: give up early.
        if rho >= 1e5 && cn > 1e-4 * scale {
            return Run { x: None, iterations, residual: cn, rejected: false };
        }
        if cn <= eta {
            for (l, ci) in lam.iter_mut().zip(&c) {
                *l += rho * ci;
            }
            if cn <= ctol && pg <= gtol {
                break;
            }
            eta = (eta / rho.powf(0.9)).max(0.1 * ctol);
            omega = (omega / rho).max(0.1 * gtol);
        } else {
            rho = (rho * 10.0).min(1e10);
            eta = 0.1 / rho.powf(0.1);
            omega = 1.0 / rho;
        }
    }

    let ok = polish(p, &mut x, settings.residual_tol);
    let residual = model::max_norm(&model::residuals(p.config, &x).expect("dimension checked"));
    if !ok {
        return Run { x: None, iterations, residual, rejected: false };
    }
    let in_bounds = x
        .iter()
        .zip(&p.upper)
        .all(|(v, hi)| *v >= -neg_tol && *v <= *hi);
    if !in_bounds {
        return Run { x: None, iterations, residual, rejected: true };
    }
    p.clamp(&mut x);
    let residual = model::max_norm(&model::residuals(p.config, &x).expect("dimension checked"));
    if residual > settings.residual_tol {
        return Run { x: None, iterations, residual, rejected: true };
    }
    purify(p, &mut x, settings.residual_tol, neg_tol);
    let residual = model::max_norm(&model::residuals(p.config, &x).expect("dimension checked"));
    Run { x: Some(x), iterations, residual, rejected: false }
}

/// The objective is nearly flat along "turn left then right by the same
/// amount" on one circle, so the NLP can land on a mixed point that beats the
/// single-arc solution by ~1e-5. Cancel the shorter arc against the longer one
/// wherever that stays feasible and costs at most `PURIFY_SLACK` relative.
fn purify(p: &Problem, x: &mut Vec<f64>, tol: f64, neg_tol: f64) {
    let circles = p.config.obstacle_count() + 1;
    for k in 0..circles {
        let (l, r) = (x[3 * k], x[3 * k + 1]);
        if l == 0.0 || r == 0.0 {
            continue;
        }
        let mut y = x.clone();
        let m = l.min(r);
        y[3 * k] -= m;
        y[3 * k + 1] -= m;
        if !polish(p, &mut y, tol) {
            continue;
        }
        if y.iter().zip(&p.upper).any(|(v, hi)| *v < -neg_tol || *v > *hi) {
            continue;
        }
        p.clamp(&mut y);
        let before: f64 = x.iter().sum();
        let after: f64 = y.iter().sum();
        let ok = model::max_norm(&model::residuals(p.config, &y).expect("dimension checked")) <= tol;
        if ok && after <= before * (1.0 + PURIFY_SLACK) {
            *x = y;
        }
    }
}

/// Full-dimensional solve from `multistart_count` low-discrepancy starts.
pub fn solve_full_nlp(config: &ScenarioConfig, settings: &SolverSettings) -> Result<SolveOutcome> {
    solve_full_nlp_warm(config, settings, &[])
}

/// As [`solve_full_nlp`], additionally starting from each of `warm`.
pub fn solve_full_nlp_warm(
    config: &ScenarioConfig,
    settings: &SolverSettings,
    warm: &[LengthVector],
) -> Result<SolveOutcome> {
    settings.validate()?;
    let started = Instant::now();
    let p = Problem::new(config);
    let circles = config.obstacle_count() + 1;
    let caps = arc_caps(config);
    let gaps = anchor_gaps(config);
    let neg_tol = negative_tolerance(config);

    let mut starts: Vec<Vec<f64>> = warm.iter().map(|w| w.as_slice().to_vec()).collect();
    let mut halton = ShiftedHalton::new(3 * circles, mix_seed(settings.seed, NLP_STREAM));
    for _ in 0..settings.multistart_count {
        let u = halton.next_point();
        let mut x = Vec::with_capacity(3 * circles + 1);
        for k in 0..circles {
            x.push(u[3 * k] * caps[k]);
            x.push(u[3 * k + 1] * caps[k]);
            x.push(2.0 * u[3 * k + 2] * gaps[k]);
        }
        let total: f64 = x.iter().sum();
        x.push(timing_target(config, total));
        starts.push(x);
    }

    let runs = exec::map_collect(&starts, settings.parallel, |x0| {
        run_from(&p, x0.clone(), settings, neg_tol)
    });

    let mut diag = SolveDiagnostics {
        label: "full-nlp".to_string(),
        status: SolveStatus::NoConvergence,
        starts: starts.len(),
        converged_starts: 0,
        rejected_starts: 0,
        iterations: 0,
        best_residual: f64::INFINITY,
        wall_time_s: 0.0,
    };
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for run in runs {
        diag.iterations += run.iterations;
        diag.best_residual = diag.best_residual.min(run.residual);
        if run.rejected {
            diag.rejected_starts += 1;
        }
        let Some(x) = run.x else { continue };
        diag.converged_starts += 1;
        let obj: f64 = x.iter().sum();
        let arcs: f64 = (0..circles).map(|k| x[3 * k] + x[3 * k + 1]).sum();
        let replace = match &best {
            None => true,
            Some((bo, ba, _)) => {
                if (obj - bo).abs() > 1e-9 {
                    obj < *bo
                } else {
                    arcs < *ba
                }
            }
        };
        if replace {
            best = Some((obj, arcs, x));
        }
    }

    let solution = match best {
        Some((_, _, x)) => {
            let lengths = LengthVector::new(x)?;
            let pattern = PathSolution::dominant_pattern(&lengths);
            Some(PathSolution::from_lengths(config, pattern, lengths, SolutionSource::FullNlp)?)
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
