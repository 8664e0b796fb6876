//! `bqp`: command-line front end for the quasi-potential solvers.

mod commands;
mod config;
mod density;
mod error;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use commands::{DensityInput, Geometry};
use config::{Overrides, RunConfig};
use error::CliError;
use output::{write_manifest, Output};

#[derive(Parser, Debug)]
#[command(name = "bqp", version, about = "Quasi-potential of the boundary-driven viscous Burgers equation")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rho0: Option<f64>,
    #[arg(long, global = true)]
    rho1: Option<f64>,
    /// Absolute viscosity.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Viscosity relative to eps0 = 1/(phi1 - phi0).
    #[arg(long, global = true)]
    eps_factor: Option<f64>,
    /// Number of grid nodes.
    #[arg(long, short = 'n', global = true)]
    grid_n: Option<usize>,
    /// Largest Burgers time step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    picard_tol: Option<f64>,
    #[arg(long, global = true)]
    a_tol: Option<f64>,
    #[arg(long, global = true)]
    gf_tol: Option<f64>,
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    /// Enables seed-bank jitter keyed by this seed.
    #[arg(long, global = true)]
    rng_seed: Option<u64>,
    #[arg(long, global = true)]
    jitter_amp: Option<f64>,
    #[arg(long, short = 'o', global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Run every map sequentially.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Args, Debug, Clone)]
struct DensityArgs {
    /// `stationary`, `constant:<v>`, `sine:<mean>:<amp>:<k>` or `mina:<y->:<y0>:<y+>:<amp>`.
    #[arg(long, default_value = "stationary")]
    density: String,
    /// Density CSV (`x,value`); overrides `--density` and fixes the grid.
    #[arg(long)]
    density_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct GeometryArgs {
    #[arg(long, default_value_t = 0.25)]
    y_minus: f64,
    #[arg(long, default_value_t = 0.5)]
    y0: f64,
    #[arg(long, default_value_t = 0.75)]
    y_plus: f64,
    /// Amplitude as a fraction of min(A - A-, A+ - A).
    #[arg(long, default_value_t = 0.6)]
    amplitude_factor: f64,
    /// Half-width of the alpha bracket (default: half the admissible range).
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stationary profile and current.
    Stationary,
    /// Seed-bank enumeration of critical points of the trial functional.
    FixedPoints(DensityArgs),
    /// S_eps(rho) with all minimizers.
    Quasipotential(DensityArgs),
    /// Optimal excursion path and its action.
    Path {
        #[command(flatten)]
        density: DensityArgs,
        /// Which minimizer to follow.
        #[arg(long, default_value_t = 0)]
        minimizer: usize,
    },
    /// Recomputes the action of a `path` directory via the elliptic route.
    ActionCheck {
        #[arg(long)]
        path_dir: PathBuf,
    },
    /// Inviscid thresholds and minimization over step positions.
    Inviscid(DensityArgs),
    /// Coexistence point alpha0 of the two-minimizer construction.
    Transition(GeometryArgs),
    /// Transition search over a list of viscosities.
    BifurcationScan {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.04, 0.06, 0.08, 0.1, 0.2, 0.5, 0.9])]
        eps_factors: Vec<f64>,
    },
    /// Convergence of S_eps to the inviscid S.
    GammaScan {
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.4, 0.2, 0.1, 0.05])]
        eps_factors: Vec<f64>,
    },
    /// Closed-form oracle suite.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Stationary => "stationary",
            Command::FixedPoints(_) => "fixed-points",
            Command::Quasipotential(_) => "quasipotential",
            Command::Path { .. } => "path",
            Command::ActionCheck { .. } => "action-check",
            Command::Inviscid(_) => "inviscid",
            Command::Transition(_) => "transition",
            Command::BifurcationScan { .. } => "bifurcation-scan",
            Command::GammaScan { .. } => "gamma-scan",
            Command::Selftest => "selftest",
        }
    }
}

fn overrides(g: &GlobalArgs) -> Overrides {
    Overrides {
        rho0: g.rho0,
        rho1: g.rho1,
        eps: g.eps,
        eps_factor: g.eps_factor,
        grid_n: g.grid_n,
        dt: g.dt,
        picard_tol: g.picard_tol,
        a_tol: g.a_tol,
        gf_tol: g.gf_tol,
        root_tol: g.root_tol,
        rng_seed: g.rng_seed,
        jitter_amp: g.jitter_amp,
        output_dir: g.output_dir.clone(),
        jobs: g.jobs,
        sequential: g.sequential,
    }
}

fn input(d: &DensityArgs) -> DensityInput {
    DensityInput { generator: d.density.clone(), file: d.density_file.clone() }
}

fn geometry(g: &GeometryArgs) -> Geometry {
    Geometry { y_minus: g.y_minus, y0: g.y0, y_plus: g.y_plus, amplitude_factor: g.amplitude_factor, delta: g.delta }
}

fn dispatch(command: &Command, cfg: &mut RunConfig, out: &mut Output) -> Result<Value, CliError> {
    match command {
        Command::Stationary => commands::stationary(cfg, out),
        Command::FixedPoints(d) => {
            let rho = commands::load_density(cfg, &input(d))?;
            commands::fixed_points(cfg, &rho, out)
        }
        Command::Quasipotential(d) => {
            let rho = commands::load_density(cfg, &input(d))?;
            commands::quasipotential(cfg, &rho, out)
        }
        Command::Path { density, minimizer } => {
            let rho = commands::load_density(cfg, &input(density))?;
            commands::path(cfg, &rho, *minimizer, out)
        }
        Command::ActionCheck { path_dir } => commands::action_check(cfg, path_dir, out),
        Command::Inviscid(d) => {
            let rho = commands::load_density(cfg, &input(d))?;
            commands::inviscid(cfg, &rho, out)
        }
        Command::Transition(g) => commands::transition(cfg, &geometry(g), out),
        Command::BifurcationScan { geometry: g, eps_factors } => {
            commands::bifurcation(cfg, &geometry(g), eps_factors, out)
        }
        Command::GammaScan { density, eps_factors } => {
            let rho = commands::load_density(cfg, &input(density))?;
            commands::gamma(cfg, &rho, eps_factors, out)
        }
        Command::Selftest => {
            let checks = selftest::run(cfg.execution);
            for c in &checks {
                println!(
                    "{} {:<32} error {:.3e} (tol {:.1e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.error,
                    c.tolerance
                );
            }
            out.json("selftest.json", &checks)?;
            let failures = checks.iter().filter(|c| !c.pass).count();
            if failures > 0 {
                return Err(CliError::SelfTest(failures));
            }
            Ok(json!({ "checks": checks.len() }))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.global.config.as_deref(), &overrides(&cli.global))?;
    let mut out = Output::create(&cfg.output_dir)?;
    let jobs = cfg.jobs;
    let result = burgers_qp::exec::with_jobs(jobs, || dispatch(&cli.command, &mut cfg, &mut out));
    let diagnostics = result.as_ref().cloned().unwrap_or(Value::Null);
    write_manifest(&out, cli.command.name(), &cfg, &diagnostics, result.as_ref().err())?;
    result.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bqp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
