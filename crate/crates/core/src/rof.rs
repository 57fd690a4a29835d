//! Independent ROF solver used to cross-check the `b = 0` case.
//!
//! Minimizes `a·Σ|∇⁺u|h² + ½Σ(u - f)²h²` with the dual projection iteration
//! `ξ ← (ξ + s∇⁺(div⁻ξ - f/a)) / (1 + s|∇⁺(div⁻ξ - f/a)|)`, `u = f - a·div⁻ξ`,
//! where `|·|` pairs the components stored at the same index.

use crate::error::{ensure_positive, ElasticaError, Result};
use crate::grid::{div_minus, grad_plus, ScalarField, StaggeredField};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RofConfig<T> {
    /// TV weight `a`.
    pub weight: T,
    /// Dual step for a unit grid; scaled by `h²` internally.
    pub step: T,
    /// Stop when no dual component moves more than this.
    pub tol: T,
    pub max_iter: usize,
    pub h: T,
}

impl<T: Real> Default for RofConfig<T> {
    fn default() -> Self {
        Self {
            weight: T::lit(0.1),
            step: T::lit(0.25),
            tol: T::lit(1e-6),
            max_iter: 100_000,
            h: T::one(),
        }
    }
}

impl<T: Real> RofConfig<T> {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("ROF weight", self.weight)?;
        ensure_positive("ROF step", self.step)?;
        ensure_positive("ROF tol", self.tol)?;
        ensure_positive("mesh size h", self.h)?;
        if self.step > T::lit(0.25) {
            return Err(ElasticaError::InvalidParameter(format!(
                "ROF step must not exceed 0.25, got {}",
                self.step
            )));
        }
        if self.max_iter == 0 {
            return Err(ElasticaError::InvalidParameter(
                "ROF max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RofOutcome<T> {
    pub u: ScalarField<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Isotropic total variation `Σ|∇⁺u|h²` with index-paired components.
pub fn total_variation<T: Real>(u: &ScalarField<T>, h: T) -> T {
    grad_plus(u, h).paired_magnitude().sum() * h * h
}

/// `a·TV(u) + ½Σ(u - f)²h²`.
pub fn rof_objective<T: Real>(u: &ScalarField<T>, f: &ScalarField<T>, weight: T, h: T) -> T {
    let diff = u - f;
    weight * total_variation(u, h) + T::lit(0.5) * diff.dot(&diff) * h * h
}

pub struct RofIter<'a, T: Real> {
    f: &'a ScalarField<T>,
    cfg: RofConfig<T>,
    dual: StaggeredField<T>,
}

impl<'a, T: Real> RofIter<'a, T> {
    pub fn new(f: &'a ScalarField<T>, cfg: RofConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            f,
            cfg,
            dual: StaggeredField::zeros(f.width(), f.height())?,
        })
    }

    pub fn primal(&self) -> ScalarField<T> {
        let a = self.cfg.weight;
        self.f
            .zip_map(&div_minus(&self.dual, self.cfg.h), |fv, d| fv - a * d)
    }

    /// One projection step; returns the largest dual change.
    pub fn advance(&mut self) -> T {
        let h = self.cfg.h;
        let inv_a = T::one() / self.cfg.weight;
        let s = self.cfg.step * h * h;
        let inner = div_minus(&self.dual, h).zip_map(self.f, |d, fv| d - fv * inv_a);
        let g = grad_plus(&inner, h);
        let mag = g.paired_magnitude();
        let update = |xi: &ScalarField<T>, gc: &ScalarField<T>| {
            let num = xi.zip_map(gc, |x, gv| x + s * gv);
            num.zip_map(&mag, |n, m| n / (T::one() + s * m))
        };
        let next = StaggeredField::new(
            update(self.dual.first(), g.first()),
            update(self.dual.second(), g.second()),
        )
        .expect("components share dimensions");
        let change = next.zip_map(&self.dual, |a, b| a - b);
        let delta = change.first().max_abs().max(change.second().max_abs());
        self.dual = next;
        delta
    }
}

pub fn solve_rof<T: Real>(f: &ScalarField<T>, cfg: &RofConfig<T>) -> Result<RofOutcome<T>> {
    let mut it = RofIter::new(f, *cfg)?;
    for k in 1..=cfg.max_iter {
        if it.advance() <= cfg.tol {
            return Ok(RofOutcome {
                u: it.primal(),
                iterations: k,
                converged: true,
            });
        }
    }
    Ok(RofOutcome {
        u: it.primal(),
        iterations: cfg.max_iter,
        converged: false,
    })
}
