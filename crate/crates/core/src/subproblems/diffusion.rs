//! Frozen-coefficient diffusion step for `λ`.
//!
//! The variable coefficient `2τb|p̃|` is replaced on the left by its maximum
//! `c*`; the difference is lagged onto the right-hand side so that the system
//! keeps constant coefficients and diagonalizes under the FFT.

use super::ModelParams;
use crate::error::Result;
use crate::grid::{divergence_at_bullet, magnitude_at_bullet, ScalarField, StaggeredField};
use crate::spectral::Fft2;
use crate::Real;

/// `c* = max over •-nodes of 2τb|A|•(p̃)`.
pub fn frozen_coefficient<T: Real>(p_third: &StaggeredField<T>, params: &ModelParams<T>) -> T {
    let scale = T::lit(2.0) * params.tau * params.b;
    magnitude_at_bullet(p_third).max() * scale
}

/// Right-hand sides `(g₁, g₂)` of the frozen-coefficient λ-system.
///
/// With `κ = (c*h - 2τbh|A|•(p̃))·div•λ̃` at the •-nodes,
/// `g₁(i,j) = γh²λ̃₁(i,j) - [κ(i+1,j) - κ(i,j)]` and
/// `g₂(i,j) = γh²λ̃₂(i,j) - [κ(i,j+1) - κ(i,j)]`.
pub fn lambda_rhs<T: Real>(
    lambda: &StaggeredField<T>,
    p_third: &StaggeredField<T>,
    gamma: T,
    c_star: T,
    params: &ModelParams<T>,
) -> (ScalarField<T>, ScalarField<T>) {
    let h = params.h;
    let two_tau_b_h = T::lit(2.0) * params.tau * params.b * h;
    let weight = magnitude_at_bullet(p_third).map(|m| c_star * h - two_tau_b_h * m);
    let kappa = weight.zip_map(&divergence_at_bullet(lambda, h), |w, d| w * d);
    let gh2 = gamma * h * h;
    let jump1 = kappa.shifted(1, 0).zip_map(&kappa, |e, c| e - c);
    let jump2 = kappa.shifted(0, 1).zip_map(&kappa, |n, c| n - c);
    let g1 = lambda.first().zip_map(&jump1, |l, d| gh2 * l - d);
    let g2 = lambda.second().zip_map(&jump2, |l, d| gh2 * l - d);
    (g1, g2)
}

/// `λ^{n+1/3}` from `λ̃ = λⁿ` and `p̃ = p^{n+1/3}`, reusing an FFT plan.
pub fn solve_lambda_diffusion_with<T: Real>(
    plan: &Fft2<T>,
    lambda: &StaggeredField<T>,
    p_third: &StaggeredField<T>,
    gamma_fft: T,
    params: &ModelParams<T>,
) -> Result<StaggeredField<T>> {
    crate::error::ensure_positive("gamma", gamma_fft)?;
    let c_star = frozen_coefficient(p_third, params);
    if c_star == T::zero() {
        // b = 0 or p̃ = 0: the diffusion term vanishes identically
        return Ok(lambda.clone());
    }
    let (g1, g2) = lambda_rhs(lambda, p_third, gamma_fft, c_star, params);
    plan.solve_lambda_system(&g1, &g2, gamma_fft, c_star, params.h)
        .map(|(solution, _)| solution)
}

pub fn solve_lambda_diffusion<T: Real>(
    lambda: &StaggeredField<T>,
    p_third: &StaggeredField<T>,
    gamma_fft: T,
    params: &ModelParams<T>,
) -> Result<StaggeredField<T>> {
    let plan = Fft2::new(lambda.width(), lambda.height());
    solve_lambda_diffusion_with(&plan, lambda, p_third, gamma_fft, params)
}
