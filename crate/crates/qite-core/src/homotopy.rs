//! Generic damped-Newton corrector and δ-path tracker for smooth
//! nonlinear systems `h(δ, x) = 0`.
//!
//! The variational compiler needs to follow the stationarity system of
//! its overlap objective from the trivial solution at `δ = 0` to a
//! target step size. That is a textbook homotopy continuation: correct
//! with Newton at a fixed δ, step δ forward, warm-start from the
//! previous solution, and halve the δ sub-step whenever the corrector
//! fails. This module implements the two pieces generically (callers
//! supply residual and Jacobian closures) so they can be tested on
//! polynomial systems with known roots.
//!
//! # Damping
//!
//! The corrector backtracks by halving the Newton step up to
//! [`MAX_BACKTRACKS`] times whenever the residual norm would increase.
//! If no damping level helps, the most-damped candidate is accepted
//! anyway (*bounded damping*): a stalled iterate at a flat spot of the
//! merit function otherwise deadlocks paths that start at singular
//! folds, such as `x³ = δ` from `x = 0`. Divergence stays bounded by
//! `max_iter`, and the best iterate seen is what a non-converged result
//! carries.

use alloc::boxed::Box;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default residual tolerance for the Newton corrector.
pub const DEFAULT_NEWTON_TOL: f64 = 1e-9;

/// Default iteration cap for the Newton corrector.
pub const DEFAULT_MAX_ITER: usize = 50;

/// Maximum step-halvings per Newton iteration before bounded damping
/// accepts the most-damped candidate.
pub const MAX_BACKTRACKS: usize = 20;

/// Jacobian condition estimate above which the corrector reports a
/// singularity instead of solving.
pub const SINGULARITY_COND_LIMIT: f64 = 1e12;

/// Finite-difference step for [`fd_jacobian`], the testing fallback for
/// callers without an analytic Jacobian.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Tuning knobs for [`newton_correct`].
#[derive(Debug, Clone)]
pub struct NewtonOptions {
    /// Residual norm below which the corrector stops.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Step-halving cap per iteration.
    pub max_backtracks: usize,
    /// Condition-estimate threshold for the singularity error.
    pub cond_limit: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_NEWTON_TOL,
            max_iter: DEFAULT_MAX_ITER,
            max_backtracks: MAX_BACKTRACKS,
            cond_limit: SINGULARITY_COND_LIMIT,
        }
    }
}

/// Result of a Newton correction, converged or not.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    /// Final iterate: the solution when `converged`, otherwise the best
    /// iterate seen (smallest residual norm).
    pub x: DVector<f64>,
    /// Residual norm at `x`.
    pub residual_norm: f64,
    /// Newton iterations consumed.
    pub iterations: usize,
    /// Whether `residual_norm <= tol`.
    pub converged: bool,
    /// Residual norms at the start of each iteration plus the final one;
    /// lets callers verify monotone decrease and quadratic tails.
    pub residual_history: Vec<f64>,
}

/// Damped Newton iteration on `residual(x) = 0`.
///
/// Non-convergence within `max_iter` is not an error: the outcome
/// carries the best iterate and `converged = false` so callers (the
/// path tracker) can shrink their continuation step instead.
///
/// # Errors
///
/// [`Error::SingularJacobian`] when the Jacobian's condition estimate
/// exceeds `opts.cond_limit` or the linear solve breaks down.
pub fn newton_correct<R, J>(
    mut residual: R,
    mut jacobian: J,
    x0: &DVector<f64>,
    opts: &NewtonOptions,
) -> Result<NewtonOutcome>
where
    R: FnMut(&DVector<f64>) -> DVector<f64>,
    J: FnMut(&DVector<f64>) -> DMatrix<f64>,
{
    let mut x = x0.clone();
    let mut r = residual(&x);
    let mut rnorm = r.norm();
    let mut best_x = x.clone();
    let mut best_norm = rnorm;
    let mut history = Vec::with_capacity(opts.max_iter + 1);
    history.push(rnorm);

    for iteration in 0..opts.max_iter {
        if rnorm <= opts.tol {
            return Ok(NewtonOutcome {
                x,
                residual_norm: rnorm,
                iterations: iteration,
                converged: true,
                residual_history: history,
            });
        }
        let j = jacobian(&x);
        let cond = condition_estimate(&j);
        if !cond.is_finite() || cond > opts.cond_limit {
            return Err(Error::SingularJacobian { cond });
        }
        let step = j
            .lu()
            .solve(&(-&r))
            .ok_or(Error::SingularJacobian { cond })?;

        // Backtracking line search on the residual norm; bounded damping
        // accepts the most-damped candidate if nothing decreases.
        let mut scale = 1.0;
        let mut cand_x = &x + &step * scale;
        let mut cand_r = residual(&cand_x);
        let mut cand_norm = cand_r.norm();
        let mut halvings = 0;
        while cand_norm > rnorm && halvings < opts.max_backtracks {
            scale *= 0.5;
            halvings += 1;
            cand_x = &x + &step * scale;
            cand_r = residual(&cand_x);
            cand_norm = cand_r.norm();
        }

        x = cand_x;
        r = cand_r;
        rnorm = cand_norm;
        history.push(rnorm);
        if rnorm < best_norm {
            best_x = x.clone();
            best_norm = rnorm;
        }
    }

    if rnorm <= opts.tol {
        Ok(NewtonOutcome {
            x,
            residual_norm: rnorm,
            iterations: opts.max_iter,
            converged: true,
            residual_history: history,
        })
    } else {
        Ok(NewtonOutcome {
            x: best_x,
            residual_norm: best_norm,
            iterations: opts.max_iter,
            converged: false,
            residual_history: history,
        })
    }
}

/// One accepted continuation sub-step.
#[derive(Debug, Clone, PartialEq)]
pub struct SubStep {
    /// The δ value at which the corrector converged.
    pub delta: f64,
    /// Newton iterations spent at this δ.
    pub iterations: usize,
    /// Residual norm of the accepted solution.
    pub residual_norm: f64,
}

/// Trace of a continuation run: accepted sub-steps (δ strictly
/// increasing) and the number of sub-step halvings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathDiagnostics {
    /// Accepted sub-steps in order.
    pub sub_steps: Vec<SubStep>,
    /// Corrector failures, each of which halved the δ sub-step.
    pub failures: usize,
}

/// Tuning knobs for [`track_path`].
#[derive(Debug, Clone)]
pub struct TrackOptions {
    /// Corrector settings per sub-step.
    pub newton: NewtonOptions,
    /// Use a first-order Euler tangent predictor instead of warm-starting
    /// at the previous solution. Zero-order is the robust default for the
    /// `O(δ)` parameter paths this crate produces.
    pub euler_predictor: bool,
    /// Forward-difference step in δ for the Euler predictor's `∂h/∂δ`.
    pub predictor_fd_step: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            euler_predictor: false,
            predictor_fd_step: DEFAULT_FD_STEP,
        }
    }
}

/// Result of a path-tracking run.
#[derive(Debug, Clone)]
pub struct PathOutcome {
    /// Solution at `delta_target`.
    pub x: DVector<f64>,
    /// Accepted sub-steps and failure count.
    pub diagnostics: PathDiagnostics,
}

/// Tracks the solution of `residual(δ, x) = 0` from `(0, x_at_zero)` to
/// `δ = delta_target` by monotone δ sub-steps with Newton correction.
///
/// Sub-steps start at the full remaining distance, double after each
/// success, and halve on corrector failure (non-convergence or a
/// singular Jacobian). A sub-step below `delta_min` is a hard failure
/// carrying the path diagnostics.
///
/// # Errors
///
/// [`Error::OutOfDomain`] for invalid parameters or a start residual
/// above tolerance; [`Error::ContinuationStalled`] when the sub-step
/// undercuts `delta_min`.
pub fn track_path<R, J>(
    mut residual: R,
    mut jacobian: J,
    x_at_zero: &DVector<f64>,
    delta_target: f64,
    delta_min: f64,
    opts: &TrackOptions,
) -> Result<PathOutcome>
where
    R: FnMut(f64, &DVector<f64>) -> DVector<f64>,
    J: FnMut(f64, &DVector<f64>) -> DMatrix<f64>,
{
    if !delta_target.is_finite() || delta_target < 0.0 {
        return Err(Error::OutOfDomain {
            name: "delta_target",
            value: delta_target,
            requirement: "requires a finite delta_target >= 0",
        });
    }
    let start_residual = residual(0.0, x_at_zero).norm();
    if start_residual > opts.newton.tol {
        return Err(Error::OutOfDomain {
            name: "x_at_zero",
            value: start_residual,
            requirement: "residual(0, x_at_zero) must vanish within tol",
        });
    }
    if delta_target == 0.0 {
        return Ok(PathOutcome {
            x: x_at_zero.clone(),
            diagnostics: PathDiagnostics::default(),
        });
    }
    if !(delta_min > 0.0 && delta_min <= delta_target) {
        return Err(Error::OutOfDomain {
            name: "delta_min",
            value: delta_min,
            requirement: "requires 0 < delta_min <= delta_target",
        });
    }

    let mut x = x_at_zero.clone();
    let mut delta = 0.0f64;
    let mut step = delta_target;
    let mut diagnostics = PathDiagnostics::default();

    while delta < delta_target {
        let next = (delta + step).min(delta_target);
        let predicted = if opts.euler_predictor {
            euler_predict(
                &mut residual,
                &mut jacobian,
                delta,
                &x,
                next,
                opts.predictor_fd_step,
            )
        } else {
            x.clone()
        };
        let attempt = newton_correct(
            |y| residual(next, y),
            |y| jacobian(next, y),
            &predicted,
            &opts.newton,
        );
        match attempt {
            Ok(out) if out.converged => {
                diagnostics.sub_steps.push(SubStep {
                    delta: next,
                    iterations: out.iterations,
                    residual_norm: out.residual_norm,
                });
                x = out.x;
                delta = next;
                step *= 2.0;
            }
            Ok(_) | Err(Error::SingularJacobian { .. }) => {
                diagnostics.failures += 1;
                step *= 0.5;
                if step < delta_min {
                    return Err(Error::ContinuationStalled {
                        reached: delta,
                        floor: delta_min,
                        diagnostics: Box::new(diagnostics),
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }

    Ok(PathOutcome { x, diagnostics })
}

/// First-order predictor: `x + (next − δ)·dx/dδ` with
/// `dx/dδ = −J⁻¹·∂h/∂δ` (forward difference in δ). Falls back to the
/// zero-order predictor when the tangent solve fails.
fn euler_predict<R, J>(
    residual: &mut R,
    jacobian: &mut J,
    delta: f64,
    x: &DVector<f64>,
    next: f64,
    fd_step: f64,
) -> DVector<f64>
where
    R: FnMut(f64, &DVector<f64>) -> DVector<f64>,
    J: FnMut(f64, &DVector<f64>) -> DMatrix<f64>,
{
    let r0 = residual(delta, x);
    let r1 = residual(delta + fd_step, x);
    let dh_ddelta = (r1 - r0) / fd_step;
    match jacobian(delta, x).lu().solve(&(-dh_ddelta)) {
        Some(tangent) => x + tangent * (next - delta),
        None => x.clone(),
    }
}

/// Central-difference Jacobian of `f` at `x` — the testing fallback for
/// callers without an analytic Jacobian (step documented as
/// [`DEFAULT_FD_STEP`]).
pub fn fd_jacobian<F>(f: &mut F, x: &DVector<f64>, step: f64) -> DMatrix<f64>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let n = x.len();
    let probe = f(x);
    let m = probe.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.clone();
    for col in 0..n {
        xp[col] = x[col] + step;
        let plus = f(&xp);
        xp[col] = x[col] - step;
        let minus = f(&xp);
        xp[col] = x[col];
        for row in 0..m {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * step);
        }
    }
    jac
}

/// 2-norm condition estimate via singular values (`∞` for a rank-
/// deficient matrix).
fn condition_estimate(j: &DMatrix<f64>) -> f64 {
    let sv = j.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
