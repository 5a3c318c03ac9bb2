//! Damped Newton iteration for square nonlinear systems `F(a) = 0`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{Lu, Matrix};

/// A residual together with its Jacobian.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn residual(&self, a: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, a: &[f64]) -> Result<Matrix>;

    /// Magnitude of the terms summed into the residual at `a`, which sets
    /// its round-off floor. Defaults to `‖a‖_∞`.
    fn residual_scale(&self, a: &[f64]) -> Result<f64> {
        Ok(max_norm(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried when the residual norm does not decrease.
    pub max_damping: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_iter: 100, max_damping: 30 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `‖F(solution)‖_∞`.
    pub residual_norm: f64,
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn finite_norm(v: &[f64]) -> f64 {
    if v.iter().all(|x| x.is_finite()) {
        max_norm(v)
    } else {
        f64::INFINITY
    }
}

/// Runs Newton from `initial` until `‖F(a)‖_∞ <= tol (1 + s(a))`, with `s`
/// the system's [`residual_scale`](NonlinearSystem::residual_scale), or the
/// full Newton step satisfies `‖Δa‖_∞ <= tol max(1, ‖a‖_∞)`.
///
/// At least one step is always taken. A step whose residual norm does not
/// decrease is halved up to `max_damping` times; if none of the halved steps
/// helps, the shortest one is taken anyway.
pub fn newton_solve<S: NonlinearSystem + ?Sized>(
    system: &S,
    initial: &[f64],
    opts: NewtonOptions,
) -> Result<NewtonOutcome> {
    let n = system.dim();
    if initial.len() != n {
        return Err(invalid(format!("initial guess has length {}, expected {n}", initial.len())));
    }
    if let Some(x) = initial.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "initial Newton iterate", x: *x });
    }
    let mut a = initial.to_vec();
    let mut f = system.residual(&a)?;
    let mut f_norm = finite_norm(&f);
    if !f_norm.is_finite() {
        return Err(Error::Computation("residual is not finite at the initial iterate".into()));
    }
    let mut best = (a.clone(), f_norm);

    for iteration in 1..=opts.max_iter {
        let lu = Lu::factor(system.jacobian(&a)?)?;
        let delta = lu.solve(&f);
        let step_norm = max_norm(&delta);

        let mut lambda = 1.0;
        let mut trial_a;
        let mut trial_f;
        let mut trial_norm;
        let mut halvings = 0;
        loop {
            trial_a = a.iter().zip(&delta).map(|(x, d)| x - lambda * d).collect::<Vec<_>>();
            trial_f = system.residual(&trial_a);
            trial_norm = match &trial_f {
                Ok(v) => finite_norm(v),
                Err(_) => f64::INFINITY,
            };
            if trial_norm < f_norm || halvings >= opts.max_damping {
                break;
            }
            halvings += 1;
            lambda *= 0.5;
        }
        if !trial_norm.is_finite() {
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual: best.1,
                best: best.0,
            });
        }
        a = trial_a;
        f = trial_f?;
        f_norm = trial_norm;
        if f_norm < best.1 {
            best = (a.clone(), f_norm);
        }

        let a_norm = max_norm(&a);
        let converged = step_norm <= opts.tol * a_norm.max(1.0)
            || f_norm <= opts.tol * (1.0 + system.residual_scale(&a)?);
        if converged {
            return Ok(NewtonOutcome { solution: a, iterations: iteration, residual_norm: f_norm });
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, residual: best.1, best: best.0 })
}
