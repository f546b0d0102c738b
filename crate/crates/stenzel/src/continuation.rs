//! Pseudo-arclength continuation for one-dimensional implicit solution sets:
//! Euler predictor along the Jacobian null direction, Newton corrector on the
//! system augmented with the arclength constraint, adaptive step control and
//! rank-drop detection.

use crate::exterior::solve;
use crate::scalar::Real;
use crate::{Error, Result};

/// A system of `dim - 1` equations in `dim` unknowns with analytic Jacobian.
pub trait ImplicitCurve<T: Real> {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[T], out: &mut [T]);
    /// Row-major `(dim - 1) x dim` Jacobian.
    fn jacobian(&self, x: &[T], out: &mut [Vec<T>]);
    /// Whether `x` has left the valid chart (tracing stops there).
    fn out_of_chart(&self, _x: &[T]) -> bool {
        false
    }
}

#[derive(Clone, Debug)]
pub struct TraceOptions<T> {
    pub initial_step: T,
    pub min_step: T,
    pub max_step: T,
    pub max_steps: usize,
    pub newton_tol: T,
    pub max_newton_iters: usize,
    pub rank_tol: T,
}

impl<T: Real> Default for TraceOptions<T> {
    fn default() -> Self {
        TraceOptions {
            initial_step: T::of(1e-2),
            min_step: T::of(1e-9),
            max_step: T::of(5e-2),
            max_steps: 1_000_000,
            newton_tol: T::of(1e-12),
            max_newton_iters: 12,
            rank_tol: T::of(1e-10),
        }
    }
}

/// Why a trace direction terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    ChartBoundary,
    MaxSteps,
    ClosedLoop,
    RankDrop,
    StepUnderflow,
}

/// An ordered polyline along the solution set, with the continuation tangent
/// at each vertex.
#[derive(Clone, Debug)]
pub struct TracedCurve<T> {
    pub points: Vec<Vec<T>>,
    pub tangents: Vec<Vec<T>>,
    pub stop_forward: StopReason,
    pub stop_backward: StopReason,
    /// Indices of vertices where the Jacobian lost rank.
    pub branch_points: Vec<usize>,
}

/// Null direction of a `(d-1) x d` Jacobian through signed maximal minors
/// (the generalized cross product). Returns `None` on rank drop.
pub fn null_direction<T: Real>(jac: &[Vec<T>], rank_tol: T) -> Option<Vec<T>> {
    let d = jac.first().map_or(0, |r| r.len());
    let m = jac.len();
    debug_assert_eq!(m + 1, d);
    let mut null = vec![T::zero(); d];
    let mut row_scale = T::one();
    for row in jac {
        let norm: T = row.iter().map(|&v| v * v).sum::<T>().sqrt();
        row_scale = row_scale * norm.max(T::of(1e-300));
    }
    for skip in 0..d {
        let mut minor: Vec<Vec<T>> = jac
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let det = crate::exterior::det_real(&mut minor);
        null[skip] = if skip % 2 == 0 { det } else { -det };
    }
    let norm: T = null.iter().map(|&v| v * v).sum::<T>().sqrt();
    if norm <= rank_tol * row_scale {
        return None;
    }
    Some(null.iter().map(|&v| v / norm).collect())
}

/// Newton-corrects `x` onto the solution set, keeping the correction
/// orthogonal to `tangent` (pseudo-arclength constraint).
fn correct<T: Real>(
    system: &impl ImplicitCurve<T>,
    x: &mut [T],
    tangent: &[T],
    opts: &TraceOptions<T>,
) -> bool {
    let d = system.dim();
    let mut f = vec![T::zero(); d - 1];
    let mut jac = vec![vec![T::zero(); d]; d - 1];
    for _ in 0..opts.max_newton_iters {
        system.residual(x, &mut f);
        let norm = f.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm <= opts.newton_tol {
            return true;
        }
        system.jacobian(x, &mut jac);
        let mut a: Vec<Vec<T>> = jac.clone();
        a.push(tangent.to_vec());
        let mut b: Vec<T> = f.iter().map(|&v| -v).collect();
        b.push(T::zero());
        match solve(&mut a, &mut b) {
            Some(delta) => {
                for (xi, di) in x.iter_mut().zip(&delta) {
                    *xi = *xi + *di;
                }
            }
            None => return false,
        }
    }
    let mut f = vec![T::zero(); d - 1];
    system.residual(x, &mut f);
    f.iter().map(|&v| v * v).sum::<T>().sqrt() <= opts.newton_tol
}

/// Full Newton (no arclength constraint) used to land the seed point; the
/// correction is the minimal-norm solution of the underdetermined system.
pub fn refine_seed<T: Real>(
    system: &impl ImplicitCurve<T>,
    x: &mut Vec<T>,
    opts: &TraceOptions<T>,
) -> bool {
    let d = system.dim();
    let mut f = vec![T::zero(); d - 1];
    let mut jac = vec![vec![T::zero(); d]; d - 1];
    for _ in 0..60 {
        system.residual(x, &mut f);
        let norm = f.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm <= opts.newton_tol {
            return true;
        }
        system.jacobian(x, &mut jac);
        // delta = J^T (J J^T)^{-1} (-f)
        let m = d - 1;
        let mut jjt = vec![vec![T::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                jjt[i][j] = jac[i].iter().zip(&jac[j]).map(|(&a, &b)| a * b).sum();
            }
        }
        let mut rhs: Vec<T> = f.iter().map(|&v| -v).collect();
        let lam = match solve(&mut jjt, &mut rhs) {
            Some(l) => l,
            None => return false,
        };
        let mut delta = vec![T::zero(); d];
        for (i, row) in jac.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                delta[k] = delta[k] + v * lam[i];
            }
        }
        // Damped update: halve while the residual refuses to decrease.
        let mut scale = T::one();
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<T> = x.iter().zip(&delta).map(|(&xi, &di)| xi + di * scale).collect();
            let mut ft = vec![T::zero(); d - 1];
            system.residual(&trial, &mut ft);
            let tnorm = ft.iter().map(|&v| v * v).sum::<T>().sqrt();
            if tnorm < norm {
                *x = trial;
                improved = true;
                break;
            }
            scale = scale * T::of(0.5);
        }
        if !improved {
            return false;
        }
    }
    let mut f = vec![T::zero(); d - 1];
    system.residual(x, &mut f);
    f.iter().map(|&v| v * v).sum::<T>().sqrt() <= opts.newton_tol
}

/// Traces the solution branch through `seed` in both directions.
pub fn trace<T: Real>(
    system: &impl ImplicitCurve<T>,
    seed: &[T],
    opts: &TraceOptions<T>,
) -> Result<TracedCurve<T>> {
    let d = system.dim();
    let mut start = seed.to_vec();
    if !refine_seed(system, &mut start, opts) {
        return Err(Error::NoSolution);
    }
    let mut jac = vec![vec![T::zero(); d]; d - 1];
    system.jacobian(&start, &mut jac);
    let t0 = null_direction(&jac, opts.rank_tol)
        .ok_or_else(|| Error::Degenerate("rank drop at the seed point".into()))?;

    let (forward_pts, forward_tans, stop_forward, mut branch_fwd) =
        march(system, &start, &t0, opts);
    let neg_t0: Vec<T> = t0.iter().map(|&v| -v).collect();
    let (backward_pts, backward_tans, stop_backward, branch_bwd) =
        march(system, &start, &neg_t0, opts);

    // Stitch: reversed backward tail + seed + forward tail.
    let mut points: Vec<Vec<T>> = backward_pts.into_iter().rev().collect();
    let mut tangents: Vec<Vec<T>> = backward_tans
        .into_iter()
        .rev()
        .map(|t| t.iter().map(|&v| -v).collect())
        .collect();
    let offset = points.len();
    points.push(start.clone());
    tangents.push(t0.clone());
    points.extend(forward_pts);
    tangents.extend(forward_tans);

    let mut branch_points: Vec<usize> = branch_bwd
        .iter()
        .map(|&i| offset - 1 - i)
        .collect();
    for b in branch_fwd.drain(..) {
        branch_points.push(offset + 1 + b);
    }
    branch_points.sort_unstable();

    Ok(TracedCurve { points, tangents, stop_forward, stop_backward, branch_points })
}

fn march<T: Real>(
    system: &impl ImplicitCurve<T>,
    start: &[T],
    tangent0: &[T],
    opts: &TraceOptions<T>,
) -> (Vec<Vec<T>>, Vec<Vec<T>>, StopReason, Vec<usize>) {
    let d = system.dim();
    let mut points = Vec::new();
    let mut tangents = Vec::new();
    let mut branch_points = Vec::new();
    let mut x = start.to_vec();
    let mut tangent = tangent0.to_vec();
    let mut h = opts.initial_step;
    let mut jac = vec![vec![T::zero(); d]; d - 1];
    let mut steps_taken = 0usize;

    let stop = loop {
        if steps_taken >= opts.max_steps {
            break StopReason::MaxSteps;
        }
        let mut trial: Vec<T> = x.iter().zip(&tangent).map(|(&xi, &ti)| xi + ti * h).collect();
        let converged = correct(system, &mut trial, &tangent, opts);
        if !converged {
            h = h * T::of(0.5);
            if h < opts.min_step {
                break StopReason::StepUnderflow;
            }
            continue;
        }
        if system.out_of_chart(&trial) {
            break StopReason::ChartBoundary;
        }
        system.jacobian(&trial, &mut jac);
        let new_tangent = match null_direction(&jac, opts.rank_tol) {
            Some(t) => t,
            None => {
                points.push(trial);
                tangents.push(tangent.clone());
                branch_points.push(points.len() - 1);
                break StopReason::RankDrop;
            }
        };
        let align: T = new_tangent.iter().zip(&tangent).map(|(&a, &b)| a * b).sum();
        let new_tangent: Vec<T> = if align < T::zero() {
            new_tangent.iter().map(|&v| -v).collect()
        } else {
            new_tangent
        };
        // Loop closure against the march origin.
        let dist: T = trial
            .iter()
            .zip(start)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        points.push(trial.clone());
        tangents.push(new_tangent.clone());
        steps_taken += 1;
        if steps_taken > 10 && dist < h * T::of(0.75) {
            break StopReason::ClosedLoop;
        }
        x = trial;
        tangent = new_tangent;
        h = (h * T::of(1.3)).min(opts.max_step);
    };
    (points, tangents, stop, branch_points)
}
