//! Outer iteration: initialization, fractional-step sequencing, stopping and
//! energy bookkeeping.

use crate::energy::{
    lambda_objective, projection_energy, shrink_objective, total_energy, update_objective,
    EnergyBreakdown, EnergyRecord, EnergyTrace,
};
use crate::error::{ensure_positive, ElasticaError, Result};
use crate::grid::{grad_plus, ScalarField, StaggeredField};
use crate::spectral::Fft2;
use crate::subproblems::{
    compute_gamma, project_constraint, shrink_p, solve_lambda_diffusion_with, update_u_with,
    FixedPointConfig, GammaExponent, GammaField, ModelParams,
};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub params: ModelParams<T>,
    /// Stop once the relative change of `u` drops below this.
    pub tol: T,
    pub max_iter: usize,
    pub fixed_point: FixedPointConfig<T>,
    pub gamma_exponent: GammaExponent,
    /// Record energies every this many iterations (the last one is always kept).
    pub trace_every: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            tol: T::lit(1e-5),
            max_iter: 30_000,
            fixed_point: FixedPointConfig::default(),
            gamma_exponent: GammaExponent::Squared,
            trace_every: 1,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        ensure_positive("tol", self.tol)?;
        FixedPointConfig::new(self.fixed_point.tol, self.fixed_point.max_iter)?;
        if self.max_iter == 0 {
            return Err(ElasticaError::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        if self.trace_every == 0 {
            return Err(ElasticaError::InvalidParameter(
                "trace_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Iterate `(uⁿ, pⁿ, λⁿ)` and bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub u: ScalarField<T>,
    pub p: StaggeredField<T>,
    pub lambda: StaggeredField<T>,
    pub iter: usize,
    pub last_rel_err: T,
}

/// `u⁰ = f`, `p⁰ = ∇⁺f`, `λ⁰ = p⁰/|p⁰|` where `p⁰ ≠ 0` and `0` elsewhere,
/// normalizing the index-paired components.
pub fn init_state<T: Real>(f: &ScalarField<T>, cfg: &SolverConfig<T>) -> SolverState<T> {
    let p = grad_plus(f, cfg.params.h);
    let mag = p.paired_magnitude();
    let unit =
        |c: &ScalarField<T>| c.zip_map(&mag, |v, m| if m > T::zero() { v / m } else { T::zero() });
    let lambda = StaggeredField::new(unit(p.first()), unit(p.second()))
        .expect("components share dimensions");
    SolverState {
        u: f.clone(),
        p,
        lambda,
        iter: 0,
        last_rel_err: T::zero(),
    }
}

/// `‖u_new - u_old‖₂ / ‖u_new‖₂`, or `+∞` when `u_new` vanishes.
pub fn rel_err<T: Real>(u_new: &ScalarField<T>, u_old: &ScalarField<T>) -> T {
    let denom = u_new.norm_l2();
    if denom == T::zero() {
        return T::infinity();
    }
    (u_new - u_old).norm_l2() / denom
}

/// The fractional iterates produced inside one outer step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport<T> {
    pub p_third: StaggeredField<T>,
    pub lambda_third: StaggeredField<T>,
    pub gamma: GammaField<T>,
    pub p_twothirds: StaggeredField<T>,
    pub lambda_twothirds: StaggeredField<T>,
}

/// Solver bound to one grid size; holds the FFT plans.
#[derive(Debug, Clone)]
pub struct Solver<T: Real> {
    cfg: SolverConfig<T>,
    plan: Fft2<T>,
}

/// Output of [`Solver::run`].
#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub u: ScalarField<T>,
    pub state: SolverState<T>,
    pub trace: EnergyTrace<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Energies of the initial state.
    pub initial_energy: EnergyBreakdown<T>,
}

impl<T: Real> Solver<T> {
    pub fn new(cfg: SolverConfig<T>, width: usize, height: usize) -> Result<Self> {
        cfg.validate()?;
        ScalarField::<T>::zeros(width, height)?;
        Ok(Self {
            cfg,
            plan: Fft2::new(width, height),
        })
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.cfg
    }

    fn check_image(&self, f: &ScalarField<T>) -> Result<()> {
        let dims = self.plan.dims();
        if f.dims() != dims {
            return Err(ElasticaError::DimensionMismatch {
                left: f.dims(),
                right: dims,
            });
        }
        Ok(())
    }

    /// One outer iteration: shrink, γ, λ-diffusion, projection, u-update.
    pub fn step(
        &self,
        state: &SolverState<T>,
        f: &ScalarField<T>,
    ) -> Result<(SolverState<T>, StepReport<T>)> {
        self.check_image(f)?;
        let params = &self.cfg.params;
        let p_third = shrink_p(&state.p, &state.lambda, params);
        let gamma = compute_gamma(&p_third, params.tau, self.cfg.gamma_exponent);
        let lambda_third =
            solve_lambda_diffusion_with(&self.plan, &state.lambda, &p_third, gamma.fft, params)?;
        let (p_twothirds, lambda_twothirds) =
            project_constraint(&p_third, &lambda_third, &gamma, &self.cfg.fixed_point);
        let (u, p) = update_u_with(&self.plan, &p_twothirds, f, params)?;
        let last_rel_err = rel_err(&u, &state.u);
        let next = SolverState {
            u,
            p,
            lambda: lambda_twothirds.clone(),
            iter: state.iter + 1,
            last_rel_err,
        };
        let report = StepReport {
            p_third,
            lambda_third,
            gamma,
            p_twothirds,
            lambda_twothirds,
        };
        Ok((next, report))
    }

    /// Energies of a completed step.
    pub fn record(
        &self,
        prev: &SolverState<T>,
        next: &SolverState<T>,
        report: &StepReport<T>,
        f: &ScalarField<T>,
    ) -> EnergyRecord<T> {
        let params = &self.cfg.params;
        let e = total_energy(&next.u, &next.p, &next.lambda, f, params);
        EnergyRecord {
            iter: next.iter,
            total: e.total,
            elastica: e.elastica,
            fidelity: e.fidelity,
            shrink: shrink_objective(&report.p_third, &prev.p, &prev.lambda, params),
            lambda: lambda_objective(
                &report.lambda_third,
                &prev.lambda,
                &report.p_third,
                report.gamma.fft,
                params,
            ),
            projection: projection_energy(
                &report.p_twothirds,
                &report.lambda_twothirds,
                &report.p_third,
                &report.lambda_third,
                &report.gamma,
                params.h,
            ),
            update: update_objective(&next.p, &report.p_twothirds, &next.u, f, params),
            rel_err: next.last_rel_err,
        }
    }

    pub fn run(&self, f: &ScalarField<T>) -> Result<RunOutcome<T>> {
        self.run_observed(f, |_, _, _| {})
    }

    /// Runs to convergence or the iteration cap, calling `observer` with the
    /// previous state, the new state and the fractional iterates of every step.
    pub fn run_observed(
        &self,
        f: &ScalarField<T>,
        mut observer: impl FnMut(&SolverState<T>, &SolverState<T>, &StepReport<T>),
    ) -> Result<RunOutcome<T>> {
        self.check_image(f)?;
        let params = &self.cfg.params;
        let mut state = init_state(f, &self.cfg);
        let initial_energy = total_energy(&state.u, &state.p, &state.lambda, f, params);
        let mut trace = EnergyTrace::new();
        let mut converged = false;
        while state.iter < self.cfg.max_iter {
            let (next, report) = self.step(&state, f)?;
            observer(&state, &next, &report);
            converged = next.last_rel_err < self.cfg.tol;
            let last = converged || next.iter == self.cfg.max_iter;
            if last || next.iter % self.cfg.trace_every == 0 {
                trace.push(self.record(&state, &next, &report, f));
            }
            state = next;
            if converged {
                break;
            }
        }
        Ok(RunOutcome {
            u: state.u.clone(),
            iterations: state.iter,
            state,
            trace,
            converged,
            initial_energy,
        })
    }
}

/// One outer iteration with a freshly planned solver.
pub fn step<T: Real>(
    state: &SolverState<T>,
    f: &ScalarField<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverState<T>> {
    Solver::new(*cfg, f.width(), f.height())?
        .step(state, f)
        .map(|(next, _)| next)
}

pub fn run<T: Real>(f: &ScalarField<T>, cfg: &SolverConfig<T>) -> Result<RunOutcome<T>> {
    Solver::new(*cfg, f.width(), f.height())?.run(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subproblems::{solve_lambda_diffusion, update_u};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(seed: u64, w: usize, h: usize) -> ScalarField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ScalarField::from_fn(w, h, |_, _| rng.random_range(0.0..1.0)).unwrap()
    }

    #[test]
    fn constant_image_is_a_fixed_point() {
        let f = ScalarField::filled(6, 6, 0.5).unwrap();
        let cfg = SolverConfig::default();
        let s0 = init_state(&f, &cfg);
        assert_eq!(s0.p.norm_l2(), 0.0);
        assert_eq!(s0.lambda.norm_l2(), 0.0);
        let out = run(&f, &cfg).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.trace.last().unwrap().rel_err, 0.0);
        for &v in out.u.as_slice() {
            assert_relative_eq!(v, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn step_edge_initializes_unit_directions() {
        let f = ScalarField::from_fn(6, 4, |i, _| if i < 3 { 0.0 } else { 1.0 }).unwrap();
        let s = init_state(&f, &SolverConfig::default());
        for j in 0..4 {
            for i in 0..6 {
                let [l1, l2] = s.lambda.pair(i, j);
                // jumps up at i = 2 -> 3 and down across the wrap 5 -> 0
                let want = match i {
                    2 => 1.0,
                    5 => -1.0,
                    _ => 0.0,
                };
                assert_eq!((l1, l2), (want, 0.0), "({i},{j})");
            }
        }
    }

    #[test]
    fn initial_directions_are_unit_or_zero() {
        let f = random_image(3, 7, 5);
        let s = init_state(&f, &SolverConfig::default());
        for &m in s.lambda.paired_magnitude().as_slice() {
            assert!(m == 0.0 || (m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rel_err_cases() {
        let a = ScalarField::from_fn(3, 3, |i, j| (i + j) as f64).unwrap();
        assert_eq!(rel_err(&a, &a), 0.0);
        let zero = ScalarField::zeros(3, 3).unwrap();
        assert_eq!(rel_err(&a, &zero), 1.0);
        let mut e = zero.clone();
        e[(0, 0)] = 1.0;
        assert_eq!(rel_err(&e, &zero), 1.0);
        assert!(rel_err(&zero, &a).is_infinite());
    }

    #[test]
    fn step_is_the_kernel_composition() {
        let f = random_image(4, 4, 4);
        let cfg = SolverConfig::default();
        let s0 = init_state(&f, &cfg);
        let s1 = step(&s0, &f, &cfg).unwrap();

        let prm = &cfg.params;
        let p13 = shrink_p(&s0.p, &s0.lambda, prm);
        let g = compute_gamma(&p13, prm.tau, cfg.gamma_exponent);
        let l13 = solve_lambda_diffusion(&s0.lambda, &p13, g.fft, prm).unwrap();
        let (p23, l23) = project_constraint(&p13, &l13, &g, &cfg.fixed_point);
        let (u, p) = update_u(&p23, &f, prm).unwrap();
        assert_eq!(s1.u, u);
        assert_eq!(s1.p, p);
        assert_eq!(s1.lambda, l23);
        assert_eq!(s1.iter, 1);
        assert_eq!(s1.last_rel_err, rel_err(&u, &f));
    }

    #[test]
    fn mean_is_conserved_and_runs_are_deterministic() {
        let f = random_image(5, 10, 8);
        let cfg = SolverConfig {
            max_iter: 25,
            ..SolverConfig::default()
        };
        let solver = Solver::new(cfg, 10, 8).unwrap();
        let mut means = Vec::new();
        let a = solver
            .run_observed(&f, |_, s, _| means.push(s.u.mean()))
            .unwrap();
        for m in means {
            assert!((m - f.mean()).abs() < 1e-12);
        }
        let b = solver.run(&f).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.u, b.u);
        assert_eq!(a.iterations, 25);
        assert!(!a.converged);
    }

    #[test]
    fn trace_stride_keeps_last_iteration() {
        let f = random_image(6, 6, 6);
        let cfg = SolverConfig {
            max_iter: 10,
            trace_every: 4,
            ..SolverConfig::default()
        };
        let out = run(&f, &cfg).unwrap();
        let iters: Vec<_> = out.trace.records().iter().map(|r| r.iter).collect();
        assert_eq!(iters, vec![4, 8, 10]);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let f = random_image(7, 4, 4);
        let bad = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(run(&f, &bad).is_err());
        let bad = SolverConfig {
            max_iter: 0,
            ..SolverConfig::<f64>::default()
        };
        assert!(run(&f, &bad).is_err());
        let solver = Solver::new(SolverConfig::default(), 5, 4).unwrap();
        assert!(solver.run(&f).is_err());
    }

    #[test]
    fn single_precision_run() {
        let f = random_image(8, 8, 8).cast::<f32>();
        let cfg = SolverConfig::<f32> {
            max_iter: 5,
            ..SolverConfig::default()
        };
        let out = run(&f, &cfg).unwrap();
        assert!((out.u.mean() - f.mean()).abs() < 1e-5);
    }
}
