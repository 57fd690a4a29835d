//! The fractional-step kernels of one outer iteration.
//!
//! Per iteration the solver runs, in order: [`shrink_p`], [`compute_gamma`],
//! [`solve_lambda_diffusion`], [`project_constraint`] and [`update_u`].

mod diffusion;
mod projection;
mod shrink;
mod update;

pub use diffusion::{
    frozen_coefficient, lambda_rhs, solve_lambda_diffusion, solve_lambda_diffusion_with,
};
pub use projection::{
    fixed_point_theta, project_constraint, project_node, projection_objective, theta_energy,
    Branch, NodeProjection, ThetaSolution,
};
pub use shrink::{centered_divergence, compute_gamma, shrink_p, GammaField};
pub use update::{update_rhs, update_u, update_u_with};

use crate::error::{ensure_nonnegative, ensure_positive, ElasticaError, Result};
use crate::Real;

/// Model weights and discretization steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Length weight.
    pub a: T,
    /// Curvature weight.
    pub b: T,
    /// Time step.
    pub tau: T,
    /// Mesh size.
    pub h: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(a: T, b: T, tau: T, h: T) -> Result<Self> {
        let params = Self { a, b, tau, h };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_nonnegative("a", self.a)?;
        ensure_nonnegative("b", self.b)?;
        ensure_positive("tau", self.tau)?;
        ensure_positive("mesh size h", self.h)?;
        if self.a == T::zero() && self.b == T::zero() {
            return Err(ElasticaError::InvalidParameter(
                "a and b cannot both be zero".into(),
            ));
        }
        Ok(())
    }
}

impl<T: Real> Default for ModelParams<T> {
    /// `a = b = τ = 0.1`, `h = 1`.
    fn default() -> Self {
        Self {
            a: T::lit(0.1),
            b: T::lit(0.1),
            tau: T::lit(0.1),
            h: T::one(),
        }
    }
}

/// Which power of `|p|` sets the projection weight `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaExponent {
    /// `γ = max(|p|, √τ)`
    Linear,
    /// `γ = max(|p|², √τ)`
    #[default]
    Squared,
}

impl GammaExponent {
    pub fn from_power(power: u32) -> Result<Self> {
        match power {
            1 => Ok(Self::Linear),
            2 => Ok(Self::Squared),
            other => Err(ElasticaError::InvalidParameter(format!(
                "gamma exponent must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn power(self) -> u32 {
        match self {
            Self::Linear => 1,
            Self::Squared => 2,
        }
    }
}

/// Stopping rule for the scalar fixed-point iteration in the projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointConfig<T> {
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> FixedPointConfig<T> {
    pub fn new(tol: T, max_iter: usize) -> Result<Self> {
        ensure_positive("fixed-point tol", tol)?;
        if max_iter == 0 {
            return Err(ElasticaError::InvalidParameter(
                "fixed-point iteration cap must be at least 1".into(),
            ));
        }
        Ok(Self { tol, max_iter })
    }
}

impl<T: Real> Default for FixedPointConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-3),
            max_iter: 100,
        }
    }
}
