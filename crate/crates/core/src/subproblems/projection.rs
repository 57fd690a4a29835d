//! Pointwise projection onto `σ = {(q, μ) : q·μ = |q|, |μ| ≤ 1}`.
//!
//! `σ` splits into `σ₀` (`q = 0`, `|μ| ≤ 1`) and `σ₁` (`q = θμ`, `θ ≥ 0`,
//! `|μ| = 1`). The `σ₀` minimizer is a projection onto the unit disk; on `σ₁`
//! the problem reduces to the scalar `min_{θ≥0} ½θ² - |θx + γy|`, solved by a
//! fixed-point iteration. The cheaper of the two candidates wins.

use super::{FixedPointConfig, GammaField};
use crate::grid::{ScalarField, StaggeredField};
use crate::Real;

#[inline]
fn norm<T: Real>(v: [T; 2]) -> T {
    v[0].hypot(v[1])
}

#[inline]
fn dot<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn combine<T: Real>(theta: T, x: [T; 2], gamma: T, y: [T; 2]) -> [T; 2] {
    [theta * x[0] + gamma * y[0], theta * x[1] + gamma * y[1]]
}

/// Result of the scalar fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSolution<T> {
    pub theta: T,
    /// Updates performed.
    pub iterations: usize,
    /// Last update moved `θ` by at most the tolerance.
    pub converged: bool,
    /// `θx + γy` vanished, leaving the update undefined.
    pub degenerate: bool,
    /// The iterate was replaced by the boundary point `θ = 0`, which had
    /// lower energy.
    pub at_boundary: bool,
}

/// `E(θ) = ½θ² - |θx + γy|`.
pub fn theta_energy<T: Real>(theta: T, x: [T; 2], y: [T; 2], gamma: T) -> T {
    T::lit(0.5) * theta * theta - norm(combine(theta, x, gamma, y))
}

/// Minimizes `E(θ) = ½θ² - |θx + γy|` over `θ ≥ 0` by iterating
/// `θ ← max(0, x·(θx + γy)/|θx + γy|)` from `θ = |x|`.
///
/// `E` can have a second local minimum at `θ = 0` (when `x` and `y` point
/// apart) that the iteration never reaches, so the final iterate is compared
/// against `θ = 0` and the lower one returned.
pub fn fixed_point_theta<T: Real>(
    x: [T; 2],
    y: [T; 2],
    gamma: T,
    cfg: &FixedPointConfig<T>,
) -> ThetaSolution<T> {
    let mut theta = norm(x);
    let mut iterations = cfg.max_iter;
    let mut converged = false;
    for k in 0..cfg.max_iter {
        let v = combine(theta, x, gamma, y);
        let len = norm(v);
        if len == T::zero() {
            return ThetaSolution {
                theta,
                iterations: k,
                converged: false,
                degenerate: true,
                at_boundary: false,
            };
        }
        let next = (dot(x, v) / len).max(T::zero());
        let step = (next - theta).abs();
        theta = next;
        if step <= cfg.tol {
            iterations = k + 1;
            converged = true;
            break;
        }
    }
    let at_boundary = theta > T::zero()
        && theta_energy(T::zero(), x, y, gamma) < theta_energy(theta, x, y, gamma);
    ThetaSolution {
        theta: if at_boundary { T::zero() } else { theta },
        iterations,
        converged,
        degenerate: false,
        at_boundary,
    }
}

/// `j(q, μ) = |q - x|² + γ|μ - y|²`.
pub fn projection_objective<T: Real>(q: [T; 2], mu: [T; 2], x: [T; 2], y: [T; 2], gamma: T) -> T {
    let dq = [q[0] - x[0], q[1] - x[1]];
    let dm = [mu[0] - y[0], mu[1] - y[1]];
    dot(dq, dq) + gamma * dot(dm, dm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `q = 0`, `|μ| ≤ 1`
    Zero,
    /// `q = θμ`, `|μ| = 1`
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeProjection<T> {
    pub q: [T; 2],
    pub mu: [T; 2],
    pub branch: Branch,
    pub objective: T,
}

/// Projects one node pair `(x, y)` with weight `γ`. Ties go to `σ₀`.
pub fn project_node<T: Real>(
    x: [T; 2],
    y: [T; 2],
    gamma: T,
    cfg: &FixedPointConfig<T>,
) -> NodeProjection<T> {
    let shrink = norm(y).max(T::one());
    let mu0 = [y[0] / shrink, y[1] / shrink];
    let q0 = [T::zero(); 2];
    let mut best = NodeProjection {
        q: q0,
        mu: mu0,
        branch: Branch::Zero,
        objective: projection_objective(q0, mu0, x, y, gamma),
    };

    let solution = fixed_point_theta(x, y, gamma, cfg);
    if solution.degenerate {
        return best;
    }
    let theta = solution.theta;
    let v = combine(theta, x, gamma, y);
    let len = norm(v);
    if len == T::zero() {
        return best;
    }
    let mu1 = [v[0] / len, v[1] / len];
    let q1 = [theta * mu1[0], theta * mu1[1]];
    let j1 = projection_objective(q1, mu1, x, y, gamma);
    if j1 < best.objective {
        best = NodeProjection {
            q: q1,
            mu: mu1,
            branch: Branch::Unit,
            objective: j1,
        };
    }
    best
}

/// Projects `(p^{n+1/3}, λ^{n+1/3})` node by node, pairing the components
/// stored at the same index.
pub fn project_constraint<T: Real>(
    p_third: &StaggeredField<T>,
    lambda_third: &StaggeredField<T>,
    gamma: &GammaField<T>,
    cfg: &FixedPointConfig<T>,
) -> (StaggeredField<T>, StaggeredField<T>) {
    let (w, h) = p_third.dims();
    let n = w * h;
    let (mut q1, mut q2, mut m1, mut m2) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for j in 0..h {
        for i in 0..w {
            let node = project_node(
                p_third.pair(i, j),
                lambda_third.pair(i, j),
                gamma.pointwise[(i, j)],
                cfg,
            );
            q1.push(node.q[0]);
            q2.push(node.q[1]);
            m1.push(node.mu[0]);
            m2.push(node.mu[1]);
        }
    }
    let field = |v| ScalarField::from_vec(w, h, v).expect("dimensions of the input");
    (
        StaggeredField::new(field(q1), field(q2)).expect("matching components"),
        StaggeredField::new(field(m1), field(m2)).expect("matching components"),
    )
}
