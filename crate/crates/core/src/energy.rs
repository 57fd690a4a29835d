//! Discrete energies and the per-iteration trace.
//!
//! The elastica term is assembled at •-nodes from `|A|•` and `div•`, each
//! node weighted by the cell measure `h²`.

use crate::grid::{divergence_at_bullet, magnitude_at_bullet, ScalarField, StaggeredField};
use crate::subproblems::{GammaField, ModelParams};
use crate::Real;

/// `Σ (a + b(div•λ)²)·|A|•(p)·h²`.
pub fn elastica_energy<T: Real>(
    p: &StaggeredField<T>,
    lambda: &StaggeredField<T>,
    params: &ModelParams<T>,
) -> T {
    let h2 = params.h * params.h;
    let mag = magnitude_at_bullet(p);
    let div = divergence_at_bullet(lambda, params.h);
    mag.as_slice()
        .iter()
        .zip(div.as_slice())
        .map(|(&m, &d)| (params.a + params.b * d * d) * m)
        .sum::<T>()
        * h2
}

/// `½ Σ (u - f)²·h²`.
pub fn fidelity_energy<T: Real>(u: &ScalarField<T>, f: &ScalarField<T>, h: T) -> T {
    let diff = u - f;
    T::lit(0.5) * diff.dot(&diff) * h * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown<T> {
    pub total: T,
    pub elastica: T,
    pub fidelity: T,
}

pub fn total_energy<T: Real>(
    u: &ScalarField<T>,
    p: &StaggeredField<T>,
    lambda: &StaggeredField<T>,
    f: &ScalarField<T>,
    params: &ModelParams<T>,
) -> EnergyBreakdown<T> {
    let elastica = elastica_energy(p, lambda, params);
    let fidelity = fidelity_energy(u, f, params.h);
    EnergyBreakdown {
        total: elastica + fidelity,
        elastica,
        fidelity,
    }
}

fn half_dist_sq<T: Real>(a: &StaggeredField<T>, b: &StaggeredField<T>, h: T) -> T {
    let d = a.zip_map(b, |x, y| x - y);
    T::lit(0.5) * d.dot(&d) * h * h
}

/// Shrinkage objective `½|q - pⁿ|² + τ(a + b|div λⁿ|²)|q|` at `q = p^{n+1/3}`.
pub fn shrink_objective<T: Real>(
    p_third: &StaggeredField<T>,
    p_old: &StaggeredField<T>,
    lambda_old: &StaggeredField<T>,
    params: &ModelParams<T>,
) -> T {
    half_dist_sq(p_third, p_old, params.h)
        + params.tau * elastica_energy(p_third, lambda_old, params)
}

/// λ-step objective `γ|μ - λⁿ|²/(2τ) + J₁(p^{n+1/3}, μ)` at `μ = λ^{n+1/3}`.
pub fn lambda_objective<T: Real>(
    lambda_third: &StaggeredField<T>,
    lambda_old: &StaggeredField<T>,
    p_third: &StaggeredField<T>,
    gamma_fft: T,
    params: &ModelParams<T>,
) -> T {
    gamma_fft / params.tau * half_dist_sq(lambda_third, lambda_old, params.h)
        + elastica_energy(p_third, lambda_third, params)
}

/// Projection objective `Σ |q - p^{n+1/3}|² + γ|μ - λ^{n+1/3}|²` (times `h²`).
pub fn projection_energy<T: Real>(
    p_twothirds: &StaggeredField<T>,
    lambda_twothirds: &StaggeredField<T>,
    p_third: &StaggeredField<T>,
    lambda_third: &StaggeredField<T>,
    gamma: &GammaField<T>,
    h: T,
) -> T {
    let dp = p_twothirds.zip_map(p_third, |a, b| a - b);
    let dl = lambda_twothirds.zip_map(lambda_third, |a, b| a - b);
    let mut acc = T::zero();
    for j in 0..dp.height() {
        for i in 0..dp.width() {
            let [p1, p2] = dp.pair(i, j);
            let [l1, l2] = dl.pair(i, j);
            acc = acc + p1 * p1 + p2 * p2 + gamma.pointwise[(i, j)] * (l1 * l1 + l2 * l2);
        }
    }
    acc * h * h
}

/// Fidelity-step objective `½|p^{n+1} - p^{n+2/3}|² + (τ/2)|u^{n+1} - f|²`.
pub fn update_objective<T: Real>(
    p_new: &StaggeredField<T>,
    p_twothirds: &StaggeredField<T>,
    u_new: &ScalarField<T>,
    f: &ScalarField<T>,
    params: &ModelParams<T>,
) -> T {
    half_dist_sq(p_new, p_twothirds, params.h) + params.tau * fidelity_energy(u_new, f, params.h)
}

/// One row of the energy trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord<T> {
    pub iter: usize,
    pub total: T,
    pub elastica: T,
    pub fidelity: T,
    pub shrink: T,
    pub lambda: T,
    pub projection: T,
    pub update: T,
    pub rel_err: T,
}

/// Records in strictly increasing iteration order.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace<T> {
    records: Vec<EnergyRecord<T>>,
}

impl<T> Default for EnergyTrace<T> {
    fn default() -> Self {
        Self {
            records: Vec::new(),
        }
    }
}

impl<T: Real> EnergyTrace<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; panics if its iteration does not advance.
    pub fn push(&mut self, record: EnergyRecord<T>) {
        if let Some(last) = self.records.last() {
            assert!(record.iter > last.iter, "trace iterations must increase");
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[EnergyRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&EnergyRecord<T>> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&EnergyRecord<T>> {
        self.records.last()
    }

    /// Fraction of consecutive record pairs where `E_total` did not grow.
    pub fn non_increasing_fraction(&self) -> f64 {
        let steps = self.records.len().saturating_sub(1);
        if steps == 0 {
            return 1.0;
        }
        let ok = self
            .records
            .windows(2)
            .filter(|w| w[1].total <= w[0].total)
            .count();
        ok as f64 / steps as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ScalarField<f64> {
        ScalarField::from_fn(w, h, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn zero_gradient_and_exact_fit_has_zero_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_field(&mut rng, 5, 5);
        let p = StaggeredField::zeros(5, 5).unwrap();
        let lam = StaggeredField::new(random_field(&mut rng, 5, 5), random_field(&mut rng, 5, 5))
            .unwrap();
        let e = total_energy(&f, &p, &lam, &f, &ModelParams::default());
        assert_eq!(e.total, 0.0);
    }

    #[test]
    fn curvature_free_energy_is_total_variation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = StaggeredField::new(random_field(&mut rng, 6, 4), random_field(&mut rng, 6, 4))
            .unwrap();
        let lam = StaggeredField::new(random_field(&mut rng, 6, 4), random_field(&mut rng, 6, 4))
            .unwrap();
        let prm = ModelParams {
            a: 0.3,
            b: 0.0,
            tau: 0.1,
            h: 0.5,
        };
        let tv = magnitude_at_bullet(&p).sum() * 0.25;
        assert_relative_eq!(elastica_energy(&p, &lam, &prm), 0.3 * tv, epsilon = 1e-13);
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (w, hh) = (4usize, 3usize);
        let prm = ModelParams {
            a: 0.2,
            b: 0.7,
            tau: 0.1,
            h: 0.8,
        };
        let u = random_field(&mut rng, w, hh);
        let f = random_field(&mut rng, w, hh);
        let p = StaggeredField::new(random_field(&mut rng, w, hh), random_field(&mut rng, w, hh))
            .unwrap();
        let lam = StaggeredField::new(random_field(&mut rng, w, hh), random_field(&mut rng, w, hh))
            .unwrap();
        let mut el = 0.0;
        let mut fid = 0.0;
        for j in 0..hh as isize {
            for i in 0..w as isize {
                let m1 = (p.first().at(i, j) + p.first().at(i - 1, j)) / 2.0;
                let m2 = (p.second().at(i, j) + p.second().at(i, j - 1)) / 2.0;
                let d = (lam.first().at(i, j) - lam.first().at(i - 1, j) + lam.second().at(i, j)
                    - lam.second().at(i, j - 1))
                    / prm.h;
                el += (prm.a + prm.b * d * d) * (m1 * m1 + m2 * m2).sqrt() * prm.h * prm.h;
                fid += 0.5 * (u.at(i, j) - f.at(i, j)).powi(2) * prm.h * prm.h;
            }
        }
        let e = total_energy(&u, &p, &lam, &f, &prm);
        assert_relative_eq!(e.elastica, el, max_relative = 1e-13);
        assert_relative_eq!(e.fidelity, fid, max_relative = 1e-13);
        assert_relative_eq!(e.total, el + fid, max_relative = 1e-13);
    }

    #[test]
    fn trace_rejects_non_increasing_iterations() {
        let rec = |iter, total| EnergyRecord {
            iter,
            total,
            elastica: 0.0,
            fidelity: 0.0,
            shrink: 0.0,
            lambda: 0.0,
            projection: 0.0,
            update: 0.0,
            rel_err: 0.0,
        };
        let mut t = EnergyTrace::new();
        t.push(rec(1, 3.0));
        t.push(rec(2, 2.0));
        t.push(rec(4, 2.5));
        t.push(rec(5, 1.0));
        assert_relative_eq!(t.non_increasing_fraction(), 2.0 / 3.0);
        let r = std::panic::catch_unwind(move || {
            let mut t = t;
            t.push(rec(5, 0.0));
        });
        assert!(r.is_err());
    }
}
