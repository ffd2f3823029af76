//! Damped Newton iteration with a forward-difference Jacobian.
//!
//! Square systems are solved by LU, over-determined ones by SVD least
//! squares (Gauss-Newton).

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Converged once the residual max-norm is at most this ...
    pub f_tol: f64,
    /// ... and the last accepted step is at most this (relative to max(1, |x|)).
    pub x_tol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
    /// Lower bound on |x_i| used when sizing the difference step.
    pub fd_floor: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iter: 100, f_tol: 1e-9, x_tol: 1e-12, fd_step: 1e-6, fd_floor: 1e-3, max_halvings: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub last_step: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Forward-difference Jacobian of `f` at `x`, given `fx = f(x)`.
pub fn fd_jacobian<F, E>(f: &mut F, x: &[f64], fx: &[f64], rel: f64, floor: f64) -> Result<DMatrix<f64>, E>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, E>,
{
    let mut jac = DMatrix::zeros(fx.len(), x.len());
    let mut xt = x.to_vec();
    for j in 0..x.len() {
        let h = rel * x[j].abs().max(floor);
        xt[j] = x[j] + h;
        let h = xt[j] - x[j];
        let ft = f(&xt)?;
        for i in 0..fx.len() {
            jac[(i, j)] = (ft[i] - fx[i]) / h;
        }
        xt[j] = x[j];
    }
    Ok(jac)
}

fn linear_step(jac: DMatrix<f64>, rhs: DVector<f64>) -> Option<DVector<f64>> {
    if jac.is_square() {
        if let Some(s) = jac.clone().lu().solve(&rhs) {
            if s.iter().all(|v| v.is_finite()) {
                return Some(s);
            }
        }
    }
    jac.svd(true, true).solve(&rhs, 1e-14).ok().filter(|s| s.iter().all(|v| v.is_finite()))
}

/// Damped Newton from `x0`. Evaluation errors at trial points count as a
/// residual increase; an error at `x0` is returned.
pub fn damped_newton<F, E>(mut f: F, x0: Vec<f64>, opts: &NewtonOptions) -> Result<NewtonOutcome, E>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, E>,
{
    let mut x = x0;
    let mut fx = f(&x)?;
    let mut r = inf_norm(&fx);
    let mut last_step = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let jac = fd_jacobian(&mut f, &x, &fx, opts.fd_step, opts.fd_floor)?;
        let rhs = -DVector::from_column_slice(&fx);
        let Some(dx) = linear_step(jac, rhs) else {
            return Ok(NewtonOutcome { converged: false, x, residual: r, iterations: it, last_step });
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let xt: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Ok(ft) = f(&xt) {
                let rt = inf_norm(&ft);
                if rt.is_finite() && (rt < r || (rt <= r && r <= opts.f_tol)) {
                    accepted = Some((xt, ft, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((xt, ft, rt)) = accepted else {
            // No decrease possible: we are at the noise floor or stuck.
            let converged = r <= opts.f_tol;
            return Ok(NewtonOutcome { converged, x, residual: r, iterations: it, last_step });
        };
        last_step = lambda * inf_norm(dx.as_slice());
        x = xt;
        fx = ft;
        r = rt;
        let scale = inf_norm(&x).max(1.0);
        if r <= opts.f_tol && last_step <= opts.x_tol * scale {
            return Ok(NewtonOutcome { converged: true, x, residual: r, iterations: it, last_step });
        }
    }
    Ok(NewtonOutcome { converged: false, x, residual: r, iterations: opts.max_iter, last_step })
}
