//! Operator-splitting solver for Euler's elastica image smoothing.
//!
//! The model minimizes
//!
//! ```text
//! ∫ (a + b|∇·(∇u/|∇u|)|²)|∇u| dx + ½∫|u - f|² dx
//! ```
//!
//! over periodic images. It is rewritten in terms of `p = ∇u` and a unit
//! direction field `λ` with `p·λ = |p|`, `|λ| ≤ 1`, and advanced with a Lie
//! splitting: shrinkage of `p` with an FFT diffusion step for `λ`, a
//! pointwise projection onto the constraint set, and a periodic Helmholtz
//! solve returning `u`. Setting `b = 0` gives the ROF model, which [`rof`]
//! solves independently for cross-checking.
//!
//! All kernels are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below name the double precision instantiation used by the CLI.

pub mod energy;
pub mod error;
pub mod grid;
pub mod rof;
mod scalar;
pub mod solver;
pub mod spectral;
pub mod subproblems;

pub use energy::{total_energy, EnergyBreakdown, EnergyRecord, EnergyTrace};
pub use error::{ElasticaError, Result};
pub use grid::{GridGeometry, ScalarField, StaggeredField};
pub use rof::{rof_objective, solve_rof, RofConfig, RofOutcome};
pub use scalar::Real;
pub use solver::{
    init_state, rel_err, run, step, RunOutcome, Solver, SolverConfig, SolverState, StepReport,
};
pub use spectral::{ComplexField, Fft2};
pub use subproblems::{FixedPointConfig, GammaExponent, GammaField, ModelParams};

pub type ScalarField64 = ScalarField<f64>;
pub type ScalarField32 = ScalarField<f32>;
pub type StaggeredField64 = StaggeredField<f64>;
pub type StaggeredField32 = StaggeredField<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type Solver64 = Solver<f64>;
pub type Solver32 = Solver<f32>;
pub type RunOutcome64 = RunOutcome<f64>;
pub type EnergyTrace64 = EnergyTrace<f64>;
pub type RofConfig64 = RofConfig<f64>;
