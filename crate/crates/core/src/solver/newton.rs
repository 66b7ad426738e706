//! Damped Newton for square systems with a Levenberg–Marquardt fallback.

use nalgebra::{DMatrix, DVector};

use crate::model::max_norm;

pub(crate) trait SquareSystem {
    fn residual(&self, x: &[f64]) -> Vec<f64>;
    fn residual_and_jacobian(&self, x: &[f64]) -> (Vec<f64>, DMatrix<f64>);
}

#[derive(Debug, Clone)]
pub(crate) struct NewtonOutcome {
    pub x: Vec<f64>,
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonParams {
    pub max_iter: usize,
    pub damping: f64,
    pub tol: f64,
    /// Iterates with any |x_i| beyond this are treated as diverged.
    pub blowup: f64,
}

fn half_sq(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|v| v * v).sum::<f64>()
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn lm_step(j: &DMatrix<f64>, r: &DVector<f64>, mu_scale: f64) -> Option<DVector<f64>> {
    let jtj = j.transpose() * j;
    let diag_max = jtj.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mu = mu_scale * diag_max.max(1e-12);
    let mut a = jtj;
    for i in 0..a.nrows() {
        a[(i, i)] += mu;
    }
    let g = j.transpose() * r;
    a.cholesky().map(|c| -c.solve(&g))
}

/// Backtracking search along `d`; returns the accepted iterate.
fn backtrack<S: SquareSystem>(
    sys: &S,
    x: &[f64],
    d: &DVector<f64>,
    phi0: f64,
    p: &NewtonParams,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut t = 1.0;
    while t > 1e-10 {
        let xn: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + t * b).collect();
        if all_finite(&xn) && xn.iter().all(|v| v.abs() < p.blowup) {
            let rn = sys.residual(&xn);
            if all_finite(&rn) && half_sq(&rn) <= (1.0 - 1e-4 * t) * phi0 {
                return Some((xn, rn));
            }
        }
        t *= p.damping;
    }
    None
}

pub(crate) fn solve<S: SquareSystem>(sys: &S, x0: Vec<f64>, p: &NewtonParams) -> NewtonOutcome {
    let mut x = x0;
    let (mut r, mut j) = sys.residual_and_jacobian(&x);
    let mut iterations = 0;
    loop {
        let norm = max_norm(&r);
        if !norm.is_finite() {
            return NewtonOutcome { x, norm, iterations, converged: false };
        }
        if norm <= p.tol {
            return NewtonOutcome { x, norm, iterations, converged: true };
        }
        if iterations >= p.max_iter {
            return NewtonOutcome { x, norm, iterations, converged: false };
        }
        iterations += 1;

        let rv = DVector::from_column_slice(&r);
        let phi0 = half_sq(&r);
        let newton = j
            .clone()
            .lu()
            .solve(&(-&rv))
            .filter(|d| d.iter().all(|v| v.is_finite()));
        let mut accepted = newton.and_then(|d| backtrack(sys, &x, &d, phi0, p));
        if accepted.is_none() {
            for mu in [1e-6, 1e-3, 1.0] {
                if let Some(d) = lm_step(&j, &rv, mu) {
                    accepted = backtrack(sys, &x, &d, phi0, p);
                    if accepted.is_some() {
                        break;
                    }
                }
            }
        }
        match accepted {
            Some((xn, _)) => {
                x = xn;
                let (rn, jn) = sys.residual_and_jacobian(&x);
                r = rn;
                j = jn;
            }
            None => {
                let norm = max_norm(&r);
                return NewtonOutcome { x, norm, iterations, converged: norm <= p.tol };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Circle;
    impl SquareSystem for Circle {
        fn residual(&self, x: &[f64]) -> Vec<f64> {
            vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]]
        }
        fn residual_and_jacobian(&self, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
            let j = DMatrix::from_row_slice(2, 2, &[2.0 * x[0], 2.0 * x[1], 1.0, -1.0]);
            (self.residual(x), j)
        }
    }

    #[test]
    fn converges_on_small_system() {
        let p = NewtonParams { max_iter: 50, damping: 0.5, tol: 1e-12, blowup: 1e6 };
        let out = solve(&Circle, vec![3.0, 0.5], &p);
        assert!(out.converged);
        let s = 2.0_f64.sqrt();
        assert!((out.x[0] - s).abs() < 1e-10 && (out.x[1] - s).abs() < 1e-10);
    }

    #[test]
    fn singular_start_falls_back() {
        let p = NewtonParams { max_iter: 50, damping: 0.5, tol: 1e-12, blowup: 1e6 };
        // Jacobian is singular at the origin.
        let out = solve(&Circle, vec![0.0, 0.0], &p);
        assert!(out.norm.is_finite());
    }
}
