//! Soft shrinkage of `p` and the projection weight `γ`.

use super::{GammaExponent, ModelParams};
use crate::grid::{
    avg_to_circle, avg_to_square, divergence_at_bullet, ScalarField, StaggeredField,
};
use crate::Real;

/// Centered divergence of `λ` at the ○- and □-nodes, i.e. the mean of the two
/// •-node divergences each face separates.
pub fn centered_divergence<T: Real>(
    lambda: &StaggeredField<T>,
    h: T,
) -> (ScalarField<T>, ScalarField<T>) {
    let half = T::lit(0.5);
    let div = divergence_at_bullet(lambda, h);
    let circle = div.zip_map(&div.shifted(1, 0), |a, b| (a + b) * half);
    let square = div.zip_map(&div.shifted(0, 1), |a, b| (a + b) * half);
    (circle, square)
}

fn shrink_component<T: Real>(
    own: &ScalarField<T>,
    other: &ScalarField<T>,
    curvature: &ScalarField<T>,
    params: &ModelParams<T>,
) -> ScalarField<T> {
    let (w, h) = own.dims();
    let data = own
        .as_slice()
        .iter()
        .zip(other.as_slice())
        .zip(curvature.as_slice())
        .map(|((&p, &q), &d)| {
            let threshold = params.tau * (params.a + params.b * d * d);
            let magnitude = p.hypot(q);
            if magnitude > T::zero() {
                (T::one() - threshold / magnitude).max(T::zero()) * p
            } else {
                T::zero()
            }
        })
        .collect();
    ScalarField::from_vec(w, h, data).expect("same dimensions as input")
}

/// Closed-form minimizer of `½|q - p|² + τ(a + b|∇·λ|²)|q|`, evaluated per
/// node family.
///
/// At a ○-node the vector is `(p₁, A○(p₂))`, at a □-node `(A□(p₁), p₂)`; each
/// keeps only its own component after scaling by `max(0, 1 - c/|p|)`.
pub fn shrink_p<T: Real>(
    p: &StaggeredField<T>,
    lambda: &StaggeredField<T>,
    params: &ModelParams<T>,
) -> StaggeredField<T> {
    let (div_circle, div_square) = centered_divergence(lambda, params.h);
    let first = shrink_component(p.first(), &avg_to_circle(p.second()), &div_circle, params);
    let second = shrink_component(p.second(), &avg_to_square(p.first()), &div_square, params);
    StaggeredField::new(first, second).expect("same dimensions as input")
}

/// Projection weights: one `γ` per index plus the single value used by the
/// FFT λ-solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaField<T> {
    pub pointwise: ScalarField<T>,
    pub fft: T,
}

/// `γ(i, j) = max(|p(i, j)|^e, √τ)` on the index-paired magnitude; the FFT
/// value is the largest pointwise one.
pub fn compute_gamma<T: Real>(
    p_third: &StaggeredField<T>,
    tau: T,
    exponent: GammaExponent,
) -> GammaField<T> {
    let floor = tau.sqrt();
    let pointwise = p_third.paired_magnitude().map(|m| {
        let scaled = match exponent {
            GammaExponent::Linear => m,
            GammaExponent::Squared => m * m,
        };
        scaled.max(floor)
    });
    let fft = pointwise.max();
    GammaField { pointwise, fft }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_staggered(rng: &mut ChaCha8Rng, w: usize, h: usize) -> StaggeredField<f64> {
        let mut f = || ScalarField::from_fn(w, h, |_, _| rng.random_range(-1.0..1.0)).unwrap();
        StaggeredField::new(f(), f()).unwrap()
    }

    fn params(a: f64, b: f64, tau: f64, h: f64) -> ModelParams<f64> {
        ModelParams { a, b, tau, h }
    }

    #[test]
    fn zero_p_stays_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lam = random_staggered(&mut rng, 5, 4);
        let p = StaggeredField::zeros(5, 4).unwrap();
        assert_eq!(
            shrink_p(&p, &lam, &params(0.1, 0.1, 0.1, 1.0)).norm_l2(),
            0.0
        );
    }

    #[test]
    fn no_threshold_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_staggered(&mut rng, 5, 4);
        let lam = StaggeredField::new(
            ScalarField::filled(5, 4, 0.3).unwrap(),
            ScalarField::filled(5, 4, -0.8).unwrap(),
        )
        .unwrap();
        let out = shrink_p(&p, &lam, &params(0.0, 0.5, 0.1, 1.0));
        assert_eq!(out, p);
    }

    #[test]
    fn uniform_unit_vector_scales_by_099() {
        // collocated vector (0.6, 0.8) has magnitude 1 at both node families
        let p = StaggeredField::new(
            ScalarField::filled(4, 4, 0.6).unwrap(),
            ScalarField::filled(4, 4, 0.8).unwrap(),
        )
        .unwrap();
        let lam = StaggeredField::zeros(4, 4).unwrap();
        let out = shrink_p(&p, &lam, &params(0.1, 0.1, 0.1, 1.0));
        for &v in out.first().as_slice() {
            assert_relative_eq!(v, 0.99 * 0.6, epsilon = 1e-15);
        }
        for &v in out.second().as_slice() {
            assert_relative_eq!(v, 0.99 * 0.8, epsilon = 1e-15);
        }
    }

    #[test]
    fn curvature_stencils_match_hand_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 0.8;
        let lam = random_staggered(&mut rng, 6, 5);
        let (dc, ds) = centered_divergence(&lam, h);
        let l1 = lam.first();
        let l2 = lam.second();
        for j in 0..5isize {
            for i in 0..6isize {
                let circle = (l1.at(i + 1, j) - l1.at(i - 1, j)) / (2.0 * h)
                    + (l2.at(i + 1, j) + l2.at(i, j)) / (2.0 * h)
                    - (l2.at(i, j - 1) + l2.at(i + 1, j - 1)) / (2.0 * h);
                // the □-node stencil with λ₁ on both backward terms
                let square = (l1.at(i, j) + l1.at(i, j + 1)) / (2.0 * h)
                    - (l1.at(i - 1, j) + l1.at(i - 1, j + 1)) / (2.0 * h)
                    + (l2.at(i, j + 1) - l2.at(i, j - 1)) / (2.0 * h);
                assert_relative_eq!(dc.at(i, j), circle, epsilon = 1e-12);
                assert_relative_eq!(ds.at(i, j), square, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shrinkage_matches_nodewise_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let prm = params(0.3, 0.2, 0.5, 1.0);
        let p = random_staggered(&mut rng, 5, 5);
        let lam = random_staggered(&mut rng, 5, 5);
        let out = shrink_p(&p, &lam, &prm);
        let (dc, _) = centered_divergence(&lam, 1.0);
        for j in 0..5isize {
            for i in 0..5isize {
                let p1 = p.first().at(i, j);
                let p2 = (p.second().at(i + 1, j)
                    + p.second().at(i, j)
                    + p.second().at(i + 1, j - 1)
                    + p.second().at(i, j - 1))
                    / 4.0;
                let c = prm.tau * (prm.a + prm.b * dc.at(i, j).powi(2));
                let factor = (1.0 - c / (p1 * p1 + p2 * p2).sqrt()).max(0.0);
                assert_relative_eq!(out.first().at(i, j), factor * p1, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn gamma_floor_and_power() {
        let zero = StaggeredField::<f64>::zeros(3, 3).unwrap();
        let g = compute_gamma(&zero, 0.1, GammaExponent::Squared);
        for &v in g.pointwise.as_slice() {
            assert_relative_eq!(v, 0.1f64.sqrt());
        }
        assert_relative_eq!(g.fft, 0.316_227_766_016_837_94);

        let mut p = StaggeredField::<f64>::zeros(3, 3).unwrap();
        p.first_mut()[(1, 2)] = 2.0;
        p.first_mut()[(0, 0)] = 0.1;
        let g = compute_gamma(&p, 0.1, GammaExponent::Squared);
        assert_relative_eq!(g.pointwise[(1, 2)], 4.0);
        assert_relative_eq!(g.fft, 4.0);

        let g = compute_gamma(&p, 0.01, GammaExponent::Squared);
        // max(0.01, √0.01)
        assert_relative_eq!(g.pointwise[(0, 0)], 0.1);
        let g = compute_gamma(&p, 0.1, GammaExponent::Linear);
        assert_relative_eq!(g.pointwise[(1, 2)], 2.0);
    }
}
