//! Riemannian descent on a product of `S³ × ℝ³` blocks.
//!
//! Each restart runs projected gradient descent with Armijo backtracking
//! and a normalization retraction. When `refine` is set, descent hands over
//! to a damped Gauss–Newton (Levenberg–Marquardt) iteration on the tangent
//! space once the projected gradient norm drops below `refine_switch_tol`.
//! Refinement is what drives zero-residual instances down to roundoff.

use nalgebra::{DMatrix, DVector, SMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::augmented::{AugmentedQuaternion, AugmentedUnitQuaternion};
use crate::error::SolveError;
use crate::quaternion::{random_unit_from, Quaternion};

use super::{
    check_feasible, gradient_ambient, objective_ambient, project_to_tangent, AuqProblem, AuqVector,
};

/// Relative decrease in the objective below which a rejected refinement step
/// counts as convergence.
const ROUNDOFF_DECREASE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Cap on accepted iterates per restart, descent and refinement together.
    pub max_iters: usize,
    /// Stop once the projected gradient norm falls to this value, or once
    /// refinement cannot decrease the objective by more than roundoff.
    pub gradient_tol: f64,
    /// Sufficient-decrease constant of the Armijo rule.
    pub armijo_c: f64,
    /// Step shrink factor per backtracking trial.
    pub backtrack: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Finish each restart with tangent-space Gauss–Newton.
    pub refine: bool,
    /// Projected gradient norm at which descent hands over to refinement.
    pub refine_switch_tol: f64,
    pub refine_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            gradient_tol: 1e-10,
            armijo_c: 1e-4,
            backtrack: 0.5,
            initial_step: 1.0,
            min_step: 1e-16,
            restarts: 10,
            seed: 0,
            refine: true,
            refine_switch_tol: 1.0,
            refine_iters: 200,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<(), SolveError> {
        let positive = [
            self.gradient_tol,
            self.armijo_c,
            self.backtrack,
            self.initial_step,
            self.min_step,
            self.refine_switch_tol,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0))
            || self.backtrack >= 1.0
            || self.armijo_c >= 1.0
            || self.restarts == 0
        {
            return Err(SolveError::InvalidProblem(format!(
                "invalid solver configuration {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Stalled,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIters => "MaxIters",
            SolveStatus::Stalled => "Stalled",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Converged" => Ok(Self::Converged),
            "MaxIters" => Ok(Self::MaxIters),
            "Stalled" => Ok(Self::Stalled),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartRecord {
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Objective after every accepted iterate, starting with the initial one.
    pub objective_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub solution: AuqVector,
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub restarts: Vec<RestartRecord>,
    pub best_restart: usize,
}

fn retract(
    x: &[AugmentedQuaternion],
    step: &DVector<f64>,
    scale: f64,
    fixed: &[usize],
) -> Vec<AugmentedQuaternion> {
    x.iter()
        .enumerate()
        .map(|(b, xb)| {
            if fixed.contains(&b) {
                return *xb;
            }
            let mut a = xb.to_array();
            for (i, c) in a.iter_mut().enumerate() {
                *c += scale * step[7 * b + i];
            }
            let mut y = AugmentedQuaternion::from_array(a);
            y.p = y.p.scale(1.0 / y.p.norm());
            y
        })
        .collect()
}

struct Run<'a, P: ?Sized> {
    problem: &'a P,
    config: &'a SolverConfig,
    fixed: Vec<usize>,
    x: Vec<AugmentedQuaternion>,
    f: f64,
    trace: Vec<f64>,
    iterations: usize,
}

impl<P: AuqProblem + ?Sized> Run<'_, P> {
    fn eval(&self, x: &[AugmentedQuaternion]) -> Result<f64, SolveError> {
        let f = objective_ambient(self.problem, x);
        if f.is_finite() {
            Ok(f)
        } else {
            Err(SolveError::NonFiniteObjective)
        }
    }

    fn projected_gradient(&self) -> DVector<f64> {
        project_to_tangent(
            &gradient_ambient(self.problem, &self.x),
            &self.x,
            &self.fixed,
        )
    }

    fn accept(&mut self, x: Vec<AugmentedQuaternion>, f: f64) {
        self.x = x;
        self.f = f;
        self.trace.push(f);
        self.iterations += 1;
    }

    /// Armijo-backtracked descent until the gradient drops below `stop_at`.
    fn descend(&mut self, stop_at: f64) -> Result<(SolveStatus, f64), SolveError> {
        let c = self.config;
        let mut step = c.initial_step;
        loop {
            let g = self.projected_gradient();
            let gn = g.norm();
            if gn <= stop_at {
                return Ok((SolveStatus::Converged, gn));
            }
            if self.iterations >= c.max_iters {
                return Ok((SolveStatus::MaxIters, gn));
            }
            let mut alpha = step;
            loop {
                let cand = retract(&self.x, &g, -alpha, &self.fixed);
                let fc = self.eval(&cand)?;
                if fc <= self.f - c.armijo_c * alpha * gn * gn {
                    self.accept(cand, fc);
                    step = alpha * 2.0;
                    break;
                }
                alpha *= c.backtrack;
                if alpha < c.min_step {
                    return Ok((SolveStatus::Stalled, gn));
                }
            }
        }
    }

    /// Orthonormal tangent basis of one block: `p [0, e_k]` for the
    /// rotation, the identity for the translation.
    fn block_basis(x: &AugmentedQuaternion) -> SMatrix<f64, 7, 6> {
        let mut basis = SMatrix::<f64, 7, 6>::zeros();
        for k in 0..3 {
            let mut e = nalgebra::Vector3::zeros();
            e[k] = 1.0;
            let d = (x.p * Quaternion::pure(e)).to_array();
            for (i, v) in d.iter().enumerate() {
                basis[(i, k)] = *v;
            }
            basis[(4 + k, 3 + k)] = 1.0;
        }
        basis
    }

    /// Levenberg–Marquardt on the tangent space with the same retraction.
    fn refine(&mut self) -> Result<(SolveStatus, f64), SolveError> {
        let c = self.config;
        let n = self.problem.num_blocks();
        let free: Vec<usize> = (0..n).filter(|b| !self.fixed.contains(b)).collect();
        let mut col = vec![usize::MAX; n];
        for (k, &b) in free.iter().enumerate() {
            col[b] = 6 * k;
        }
        let dim = 6 * free.len();
        let sigma = self.problem.sigma().value();
        let w = [1.0, 1.0, 1.0, 1.0, sigma, sigma, sigma];
        let mut lambda = 1e-6;
        let mut budget = c.refine_iters;

        loop {
            let gn = self.projected_gradient().norm();
            if gn <= c.gradient_tol {
                return Ok((SolveStatus::Converged, gn));
            }
            if budget == 0 || self.iterations >= c.max_iters {
                return Ok((SolveStatus::MaxIters, gn));
            }
            if dim == 0 {
                return Ok((SolveStatus::Stalled, gn));
            }

            let bases: Vec<_> = self.x.iter().map(Self::block_basis).collect();
            let mut h = DMatrix::<f64>::zeros(dim, dim);
            let mut g = DVector::<f64>::zeros(dim);
            for k in 0..self.problem.num_residuals() {
                let z = self.problem.residual(k, &self.x).to_array();
                let blocks: Vec<(usize, SMatrix<f64, 7, 6>)> = self
                    .problem
                    .residual_jacobians(k, &self.x)
                    .into_iter()
                    .filter(|(b, _)| col[*b] != usize::MAX)
                    .map(|(b, j)| (b, j * bases[b]))
                    .collect();
                for (b, jb) in &blocks {
                    let wj = SMatrix::<f64, 7, 6>::from_fn(|r, cc| w[r] * jb[(r, cc)]);
                    let wz = nalgebra::SVector::<f64, 7>::from_fn(|r, _| w[r] * z[r]);
                    let mut gr = g.fixed_rows_mut::<6>(col[*b]);
                    gr += jb.transpose() * wz;
                    for (b2, jb2) in &blocks {
                        let mut hv = h.fixed_view_mut::<6, 6>(col[*b], col[*b2]);
                        hv += wj.transpose() * jb2;
                    }
                }
            }

            loop {
                budget = budget.saturating_sub(1);
                let mut damped = h.clone();
                for d in 0..dim {
                    damped[(d, d)] += lambda * (1.0 + h[(d, d)]);
                }
                let Some(chol) = damped.cholesky() else {
                    lambda *= 10.0;
                    if lambda > 1e12 {
                        return Ok((SolveStatus::Stalled, gn));
                    }
                    continue;
                };
                let delta = chol.solve(&(-&g));
                let mut ambient = DVector::<f64>::zeros(7 * n);
                for &b in &free {
                    let step = bases[b] * delta.fixed_rows::<6>(col[b]);
                    ambient.fixed_rows_mut::<7>(7 * b).copy_from(&step);
                }
                let cand = retract(&self.x, &ambient, 1.0, &self.fixed);
                let fc = self.eval(&cand)?;
                if fc < self.f {
                    self.accept(cand, fc);
                    lambda = (lambda * 0.1).max(1e-12);
                    break;
                }
                // The model cannot beat roundoff in f: nothing left to gain.
                let predicted = -g.dot(&delta) - 0.5 * delta.dot(&(&h * &delta));
                if predicted <= ROUNDOFF_DECREASE * self.f {
                    return Ok((SolveStatus::Converged, gn));
                }
                lambda *= 10.0;
                if lambda > 1e12 {
                    return Ok((SolveStatus::Stalled, gn));
                }
                if budget == 0 {
                    return Ok((SolveStatus::MaxIters, gn));
                }
            }
        }
    }
}

fn random_start(n: usize, fixed: &[usize], rng: &mut ChaCha8Rng) -> Vec<AugmentedQuaternion> {
    (0..n)
        .map(|b| {
            // Draw for every block so the stream does not depend on the anchor.
            let p = random_unit_from(rng);
            if fixed.contains(&b) {
                AugmentedQuaternion::identity()
            } else {
                AugmentedUnitQuaternion::from_rotation(p).aq()
            }
        })
        .collect()
}

/// Minimizes `problem` over `AUⁿ`.
///
/// With `init` the first restart starts there; the remaining restarts (and
/// all of them without `init`) start from uniformly random rotations with
/// zero translations. Fixed blocks are held at the identity. The restart
/// with the lowest objective is returned.
pub fn solve<P: AuqProblem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    init: Option<&AuqVector>,
) -> Result<SolveResult, SolveError> {
    problem.validate()?;
    config.validate()?;
    let n = problem.num_blocks();
    let fixed = problem.fixed_blocks();
    if let Some(x) = init {
        check_feasible(x, n)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(config.restarts);
    let mut best: Option<(usize, Vec<AugmentedQuaternion>)> = None;

    for r in 0..config.restarts {
        let mut x0 = match (r, init) {
            (0, Some(x)) => x.as_aq(),
            _ => random_start(n, &fixed, &mut rng),
        };
        for &b in &fixed {
            x0[b] = AugmentedQuaternion::identity();
        }
        let f0 = objective_ambient(problem, &x0);
        if !f0.is_finite() {
            return Err(SolveError::NonFiniteObjective);
        }
        let mut run = Run {
            problem,
            config,
            fixed: fixed.clone(),
            x: x0,
            f: f0,
            trace: vec![f0],
            iterations: 0,
        };
        let stop = if config.refine {
            config.refine_switch_tol.max(config.gradient_tol)
        } else {
            config.gradient_tol
        };
        let (mut status, mut gn) = run.descend(stop)?;
        if config.refine {
            if gn <= config.gradient_tol {
                status = SolveStatus::Converged;
            } else {
                (status, gn) = run.refine()?;
            }
        }
        records.push(RestartRecord {
            objective: run.f,
            gradient_norm: gn,
            iterations: run.iterations,
            status,
            objective_trace: run.trace,
        });
        let better = best
            .as_ref()
            .is_none_or(|(i, _)| run.f < records[*i].objective);
        if better {
            best = Some((r, run.x));
        }
    }

    let (best_restart, x) = best.expect("at least one restart");
    let rec = &records[best_restart];
    Ok(SolveResult {
        solution: AuqVector::try_from_aq(&x)?,
        objective: rec.objective,
        gradient_norm: rec.gradient_norm,
        iterations: rec.iterations,
        status: rec.status,
        best_restart,
        restarts: records,
    })
}
