//! Fidelity step: a periodic Helmholtz solve for `u`, then `p = ∇⁺u`.

use super::ModelParams;
use crate::error::Result;
use crate::grid::{div_minus, grad_plus, ScalarField, StaggeredField};
use crate::spectral::Fft2;
use crate::Real;

/// `g = h·div⁻p̃ - τh²f`.
pub fn update_rhs<T: Real>(
    p_twothirds: &StaggeredField<T>,
    f: &ScalarField<T>,
    params: &ModelParams<T>,
) -> ScalarField<T> {
    let h = params.h;
    let th2 = params.tau * h * h;
    div_minus(p_twothirds, h).zip_map(f, |d, fv| h * d - th2 * fv)
}

pub fn update_u_with<T: Real>(
    plan: &Fft2<T>,
    p_twothirds: &StaggeredField<T>,
    f: &ScalarField<T>,
    params: &ModelParams<T>,
) -> Result<(ScalarField<T>, StaggeredField<T>)> {
    f.same_dims(p_twothirds.first())?;
    let g = update_rhs(p_twothirds, f, params);
    let (u, _) = plan.solve_helmholtz(&g, params.tau, params.h)?;
    let p = grad_plus(&u, params.h);
    Ok((u, p))
}

/// Returns `(u^{n+1}, p^{n+1})`.
pub fn update_u<T: Real>(
    p_twothirds: &StaggeredField<T>,
    f: &ScalarField<T>,
    params: &ModelParams<T>,
) -> Result<(ScalarField<T>, StaggeredField<T>)> {
    let plan = Fft2::new(f.width(), f.height());
    update_u_with(&plan, p_twothirds, f, params)
}
