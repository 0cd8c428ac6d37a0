use std::collections::VecDeque;

use crate::augmented::{AugmentedQuaternion, AugmentedUnitQuaternion, SigmaNorm};
use crate::error::SolveError;

use super::jacobian::{compose_jacobians, inverse_jacobian, Matrix7};
use super::AuqProblem;

/// `[p*, −R(p) t]`: the unit-quaternion inverse formula, extended as a
/// polynomial to the whole ambient space.
///
/// On the sphere this is the group inverse. Off the sphere it keeps the
/// pose-graph objective polynomial, which is what finite-difference checks
/// probe.
pub fn unit_inverse_extension(x: &AugmentedQuaternion) -> AugmentedQuaternion {
    AugmentedQuaternion::new(x.p.conj(), -(x.p.rot_matrix() * x.t))
}

/// `z = (a ∘ x) − (x ∘ b)`.
pub fn residual_handeye(
    x: &AugmentedUnitQuaternion,
    a: &AugmentedUnitQuaternion,
    b: &AugmentedUnitQuaternion,
) -> AugmentedQuaternion {
    handeye_ambient(&x.aq(), &a.aq(), &b.aq())
}

/// `z = (a ∘ x) − (y ∘ b)`.
pub fn residual_handeye_world(
    x: &AugmentedUnitQuaternion,
    y: &AugmentedUnitQuaternion,
    a: &AugmentedUnitQuaternion,
    b: &AugmentedUnitQuaternion,
) -> AugmentedQuaternion {
    a.aq().compose(&x.aq()) - y.aq().compose(&b.aq())
}

/// `z = x_i⁻¹ ∘ x_j − y_ij`.
pub fn residual_slam(
    xi: &AugmentedUnitQuaternion,
    xj: &AugmentedUnitQuaternion,
    yij: &AugmentedUnitQuaternion,
) -> AugmentedQuaternion {
    slam_ambient(&xi.aq(), &xj.aq(), &yij.aq())
}

fn handeye_ambient(
    x: &AugmentedQuaternion,
    a: &AugmentedQuaternion,
    b: &AugmentedQuaternion,
) -> AugmentedQuaternion {
    a.compose(x) - x.compose(b)
}

fn slam_ambient(
    xi: &AugmentedQuaternion,
    xj: &AugmentedQuaternion,
    yij: &AugmentedQuaternion,
) -> AugmentedQuaternion {
    unit_inverse_extension(xi).compose(xj) - *yij
}

/// Hand-eye calibration `a_i ∘ x = x ∘ b_i` with one unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct HandEyeProblem {
    pub pairs: Vec<(AugmentedUnitQuaternion, AugmentedUnitQuaternion)>,
    pub sigma: SigmaNorm,
}

impl AuqProblem for HandEyeProblem {
    fn num_blocks(&self) -> usize {
        1
    }

    fn num_residuals(&self) -> usize {
        self.pairs.len()
    }

    fn sigma(&self) -> SigmaNorm {
        self.sigma
    }

    fn residual(&self, k: usize, x: &[AugmentedQuaternion]) -> AugmentedQuaternion {
        let (a, b) = &self.pairs[k];
        handeye_ambient(&x[0], &a.aq(), &b.aq())
    }

    fn residual_jacobians(&self, k: usize, x: &[AugmentedQuaternion]) -> Vec<(usize, Matrix7)> {
        let (a, b) = &self.pairs[k];
        let (_, d_ax) = compose_jacobians(&a.aq(), &x[0]);
        let (d_xb, _) = compose_jacobians(&x[0], &b.aq());
        vec![(0, d_ax - d_xb)]
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.pairs.is_empty() {
            return Err(SolveError::InvalidProblem("no measurement pairs".into()));
        }
        Ok(())
    }
}

/// Robot-world/hand-eye calibration `a_i ∘ x = y ∘ b_i`; blocks are `[x, y]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HandEyeWorldProblem {
    pub pairs: Vec<(AugmentedUnitQuaternion, AugmentedUnitQuaternion)>,
    pub sigma: SigmaNorm,
}

impl AuqProblem for HandEyeWorldProblem {
    fn num_blocks(&self) -> usize {
        2
    }

    fn num_residuals(&self) -> usize {
        self.pairs.len()
    }

    fn sigma(&self) -> SigmaNorm {
        self.sigma
    }

    fn residual(&self, k: usize, x: &[AugmentedQuaternion]) -> AugmentedQuaternion {
        let (a, b) = &self.pairs[k];
        a.aq().compose(&x[0]) - x[1].compose(&b.aq())
    }

    fn residual_jacobians(&self, k: usize, x: &[AugmentedQuaternion]) -> Vec<(usize, Matrix7)> {
        let (a, b) = &self.pairs[k];
        let (_, d_x) = compose_jacobians(&a.aq(), &x[0]);
        let (d_y, _) = compose_jacobians(&x[1], &b.aq());
        vec![(0, d_x), (1, -d_y)]
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.pairs.is_empty() {
            return Err(SolveError::InvalidProblem("no measurement pairs".into()));
        }
        Ok(())
    }
}

/// A directed relative-pose measurement `y_ij ≈ x_i⁻¹ ∘ x_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub y: AugmentedUnitQuaternion,
}

/// Pose-graph SLAM over `n` vertices (indexed from 0). The anchor vertex is
/// held at the identity to remove the global gauge freedom.
#[derive(Clone, Debug, PartialEq)]
pub struct PoseGraphProblem {
    pub n: usize,
    pub edges: Vec<Edge>,
    pub sigma: SigmaNorm,
    pub anchor: usize,
}

impl PoseGraphProblem {
    /// Whether the underlying undirected graph is connected. Without it the
    /// poses are only determined up to one gauge per component.
    pub fn is_weakly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl AuqProblem for PoseGraphProblem {
    fn num_blocks(&self) -> usize {
        self.n
    }

    fn num_residuals(&self) -> usize {
        self.edges.len()
    }

    fn sigma(&self) -> SigmaNorm {
        self.sigma
    }

    fn residual(&self, k: usize, x: &[AugmentedQuaternion]) -> AugmentedQuaternion {
        let e = &self.edges[k];
        slam_ambient(&x[e.i], &x[e.j], &e.y.aq())
    }

    fn residual_jacobians(&self, k: usize, x: &[AugmentedQuaternion]) -> Vec<(usize, Matrix7)> {
        let e = &self.edges[k];
        let inv = unit_inverse_extension(&x[e.i]);
        let (d_inv, d_j) = compose_jacobians(&inv, &x[e.j]);
        vec![(e.i, d_inv * inverse_jacobian(&x[e.i])), (e.j, d_j)]
    }

    fn fixed_blocks(&self) -> Vec<usize> {
        vec![self.anchor]
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.n == 0 {
            return Err(SolveError::InvalidProblem(
                "pose graph has no vertices".into(),
            ));
        }
        if self.anchor >= self.n {
            return Err(SolveError::InvalidProblem(format!(
                "anchor {} out of range for {} vertices",
                self.anchor, self.n
            )));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.i >= self.n || e.j >= self.n {
                return Err(SolveError::InvalidProblem(format!(
                    "edge {k} ({}, {}) references a missing vertex",
                    e.i, e.j
                )));
            }
            if e.i == e.j {
                return Err(SolveError::InvalidProblem(format!(
                    "edge {k} is a self-loop"
                )));
            }
        }
        Ok(())
    }
}

/// Any of the three problem kinds, as read from a problem file.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    HandEye(HandEyeProblem),
    HandEyeWorld(HandEyeWorldProblem),
    PoseGraph(PoseGraphProblem),
}

impl Problem {
    pub fn sigma(&self) -> SigmaNorm {
        match self {
            Problem::HandEye(p) => p.sigma,
            Problem::HandEyeWorld(p) => p.sigma,
            Problem::PoseGraph(p) => p.sigma,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Problem::HandEye(_) => "handeye",
            Problem::HandEyeWorld(_) => "handeye-world",
            Problem::PoseGraph(_) => "posegraph",
        }
    }
}
