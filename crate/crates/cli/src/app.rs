//! Subcommands of the `elastica` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use elastica_core::rof::{rof_objective, solve_rof, RofConfig};
use elastica_core::{GammaExponent, ModelParams, RunOutcome, ScalarField64, Solver, SolverConfig};

use crate::error::{CliError, Result};
use crate::image_io::{format_for_path, load_image, save_image};
use crate::noise::{add_noise, NoiseSpec};
use crate::synth::{generate, TestShape};
use crate::trace::write_trace;

#[derive(Debug, Parser)]
#[command(name = "elastica", version, about = "Euler's elastica image smoothing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smooth an image with the elastica model.
    Smooth(SmoothArgs),
    /// Solve the ROF case (b = 0) with the elastica solver and an independent
    /// ROF solver, and compare their objectives.
    Rof(RofArgs),
    /// Add seeded Gaussian noise to an image.
    Noise(NoiseArgs),
    /// Write a synthetic test image.
    GenTestImage(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SmoothArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Length weight.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub a: f64,
    /// Curvature weight.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub b: f64,
    /// Time step.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub tau: f64,
    /// Stop once the relative change of u drops below this.
    #[arg(long, default_value_t = 1e-5, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 30_000)]
    pub max_iter: usize,
    /// Write the per-iteration energies as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Exponent e in γ = max(|p|^e, √τ), 1 or 2.
    #[arg(long, default_value_t = 2)]
    pub gamma_exponent: u32,
    /// Mesh size.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub h: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RofArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Result of the elastica solver.
    #[arg(long)]
    pub output: PathBuf,
    /// Result of the independent ROF solver.
    #[arg(long)]
    pub oracle_output: Option<PathBuf>,
    /// TV weight.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 1e-5, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 30_000)]
    pub max_iter: usize,
    /// Stopping tolerance of the ROF solver on the dual variable.
    #[arg(long, default_value_t = 1e-5, allow_negative_numbers = true)]
    pub oracle_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Standard deviation on the [0, 1] intensity scale (20 grey levels = 0.0784).
    #[arg(long, allow_negative_numbers = true)]
    pub std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub shape: TestShape,
    #[arg(long, default_value_t = 60)]
    pub size: usize,
    #[arg(long)]
    pub output: PathBuf,
    /// Optional noise, on the [0, 1] intensity scale.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub noise_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// How a command finished when it did not fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::MaxIterations => 2,
        }
    }

    fn of(converged: bool) -> Self {
        if converged {
            Status::Converged
        } else {
            Status::MaxIterations
        }
    }
}

pub fn solver_config(args: &SmoothArgs) -> Result<SolverConfig<f64>> {
    let cfg = SolverConfig {
        params: ModelParams {
            a: args.a,
            b: args.b,
            tau: args.tau,
            h: args.h,
        },
        tol: args.tol,
        max_iter: args.max_iter,
        gamma_exponent: GammaExponent::from_power(args.gamma_exponent)?,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn solve(f: &ScalarField64, cfg: SolverConfig<f64>) -> Result<RunOutcome<f64>> {
    Ok(Solver::new(cfg, f.width(), f.height())?.run(f)?)
}

pub fn smooth(args: &SmoothArgs, log: &mut impl Write) -> Result<Status> {
    let cfg = solver_config(args)?;
    format_for_path(&args.output)?;
    let f = load_image(&args.input)?;
    let out = solve(&f, cfg)?;
    save_image(&out.u, &args.output)?;
    if let Some(path) = &args.trace {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        write_trace(BufWriter::new(file), &out.trace).map_err(|e| CliError::io(path, e))?;
    }
    let last = out
        .trace
        .last()
        .map(|r| r.total)
        .unwrap_or(out.initial_energy.total);
    let verdict = if out.converged {
        "converged"
    } else {
        "stopped at the iteration cap"
    };
    writeln!(
        log,
        "{verdict} after {} iterations; E_total {:.6e} -> {:.6e}",
        out.iterations, out.initial_energy.total, last
    )
    .ok();
    Ok(Status::of(out.converged))
}

/// Objectives reached by the two solvers on the same input.
#[derive(Debug, Clone)]
pub struct RofComparison {
    pub elastica: RunOutcome<f64>,
    pub oracle_u: ScalarField64,
    pub oracle_converged: bool,
    pub elastica_objective: f64,
    pub oracle_objective: f64,
}

impl RofComparison {
    /// `|E(u_elastica) - E(u_oracle)| / E(u_oracle)`.
    pub fn relative_gap(&self) -> f64 {
        (self.elastica_objective - self.oracle_objective).abs() / self.oracle_objective
    }
}

pub fn compare_rof(f: &ScalarField64, args: &RofArgs) -> Result<RofComparison> {
    let cfg = SolverConfig {
        params: ModelParams {
            a: args.a,
            b: 0.0,
            tau: args.tau,
            h: 1.0,
        },
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    let oracle_cfg = RofConfig {
        weight: args.a,
        tol: args.oracle_tol,
        ..RofConfig::default()
    };
    oracle_cfg.validate()?;
    let elastica = solve(f, cfg)?;
    let oracle = solve_rof(f, &oracle_cfg)?;
    Ok(RofComparison {
        elastica_objective: rof_objective(&elastica.u, f, args.a, 1.0),
        oracle_objective: rof_objective(&oracle.u, f, args.a, 1.0),
        elastica,
        oracle_u: oracle.u,
        oracle_converged: oracle.converged,
    })
}

pub fn rof(args: &RofArgs, log: &mut impl Write) -> Result<Status> {
    for (name, value) in [("tau", args.tau), ("tol", args.tol), ("a", args.a)] {
        if value.is_nan() || value <= 0.0 {
            return Err(CliError::Argument(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    format_for_path(&args.output)?;
    if let Some(path) = &args.oracle_output {
        format_for_path(path)?;
    }
    let f = load_image(&args.input)?;
    let cmp = compare_rof(&f, args)?;
    save_image(&cmp.elastica.u, &args.output)?;
    if let Some(path) = &args.oracle_output {
        save_image(&cmp.oracle_u, path)?;
    }
    writeln!(
        log,
        "elastica (b = 0): {} iterations{}, ROF objective {:.10e}",
        cmp.elastica.iterations,
        if cmp.elastica.converged { "" } else { " (cap)" },
        cmp.elastica_objective
    )
    .ok();
    writeln!(
        log,
        "ROF solver:       {}, ROF objective {:.10e}",
        if cmp.oracle_converged {
            "converged"
        } else {
            "stopped at the cap"
        },
        cmp.oracle_objective
    )
    .ok();
    writeln!(log, "relative gap: {:.4e}", cmp.relative_gap()).ok();
    Ok(Status::of(cmp.elastica.converged))
}

pub fn noise(args: &NoiseArgs) -> Result<Status> {
    let spec = NoiseSpec::new(args.std, args.seed)?;
    format_for_path(&args.output)?;
    let f = load_image(&args.input)?;
    save_image(&add_noise(&f, &spec), &args.output)?;
    Ok(Status::Converged)
}

pub fn gen_test_image(args: &GenArgs) -> Result<Status> {
    let spec = NoiseSpec::new(args.noise_std, args.seed)?;
    format_for_path(&args.output)?;
    let f = add_noise(&generate(args.shape, args.size)?, &spec);
    save_image(&f, &args.output)?;
    Ok(Status::Converged)
}

pub fn run(cli: &Cli, log: &mut impl Write) -> Result<Status> {
    match &cli.command {
        Command::Smooth(args) => smooth(args, log),
        Command::Rof(args) => rof(args, log),
        Command::Noise(args) => noise(args),
        Command::GenTestImage(args) => gen_test_image(args),
    }
}
