//! Run configuration: defaults, optional JSON file, command-line overrides.

use std::path::{Path, PathBuf};

use burgers_qp::minimization::{EnumerateOptions, FlowOptions, PicardOptions};
use burgers_qp::{Execution, Grid, Params};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub picard_tol: f64,
    pub a_tol: f64,
    /// Dissipation threshold of the gradient flow.
    pub gf_tol: f64,
    pub root_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { picard_tol: 1e-10, a_tol: 1e-13, gf_tol: 1e-16, root_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SeedBankConfig {
    /// Jitter is applied only when `rng_seed` is set.
    pub rng_seed: Option<u64>,
    pub jitter_amp: f64,
    pub dedup_tol: f64,
    pub tie_tol: f64,
    pub margin: f64,
}

impl Default for SeedBankConfig {
    fn default() -> Self {
        SeedBankConfig { rng_seed: None, jitter_amp: 0.05, dedup_tol: 1e-4, tie_tol: 1e-6, margin: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub rho0: f64,
    pub rho1: f64,
    pub eps: Option<f64>,
    pub eps_factor: Option<f64>,
    pub grid_n: usize,
    /// Largest Burgers time step.
    pub dt: f64,
    pub tolerances: Tolerances,
    pub seed_bank: SeedBankConfig,
    pub output_dir: PathBuf,
    pub jobs: Option<usize>,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rho0: 0.25,
            rho1: 0.75,
            eps: None,
            eps_factor: None,
            grid_n: 201,
            dt: 5e-3,
            tolerances: Tolerances::default(),
            seed_bank: SeedBankConfig::default(),
            output_dir: PathBuf::from("out"),
            jobs: None,
            execution: Execution::Parallel,
        }
    }
}

/// Values given on the command line; `None` leaves the file/default value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub rho0: Option<f64>,
    pub rho1: Option<f64>,
    pub eps: Option<f64>,
    pub eps_factor: Option<f64>,
    pub grid_n: Option<usize>,
    pub dt: Option<f64>,
    pub picard_tol: Option<f64>,
    pub a_tol: Option<f64>,
    pub gf_tol: Option<f64>,
    pub root_tol: Option<f64>,
    pub rng_seed: Option<u64>,
    pub jitter_amp: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub sequential: bool,
}

impl RunConfig {
    pub fn load(file: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut c = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if c.eps.is_some() && c.eps_factor.is_some() {
            return Err(CliError::Config("config sets both eps and eps_factor".into()));
        }
        if o.eps.is_some() && o.eps_factor.is_some() {
            return Err(CliError::Config("--eps and --eps-factor are mutually exclusive".into()));
        }
        if o.eps.is_some() {
            c.eps = o.eps;
            c.eps_factor = None;
        }
        if o.eps_factor.is_some() {
            c.eps_factor = o.eps_factor;
            c.eps = None;
        }
        if c.eps.is_none() && c.eps_factor.is_none() {
            c.eps_factor = Some(0.5);
        }
        macro_rules! take {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        take!(c.rho0, o.rho0);
        take!(c.rho1, o.rho1);
        take!(c.grid_n, o.grid_n);
        take!(c.dt, o.dt);
        take!(c.tolerances.picard_tol, o.picard_tol);
        take!(c.tolerances.a_tol, o.a_tol);
        take!(c.tolerances.gf_tol, o.gf_tol);
        take!(c.tolerances.root_tol, o.root_tol);
        take!(c.seed_bank.jitter_amp, o.jitter_amp);
        take!(c.output_dir, o.output_dir);
        if o.rng_seed.is_some() {
            c.seed_bank.rng_seed = o.rng_seed;
        }
        if o.jobs.is_some() {
            c.jobs = o.jobs;
        }
        if o.sequential {
            c.execution = Execution::Sequential;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(0.0 < self.rho0 && self.rho0 < self.rho1 && self.rho1 < 1.0) {
            return bad(format!("need 0 < rho0 < rho1 < 1, got {} and {}", self.rho0, self.rho1));
        }
        if self.grid_n < 11 {
            return bad(format!("grid_n must be at least 11, got {}", self.grid_n));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("picard_tol", t.picard_tol),
            ("a_tol", t.a_tol),
            ("gf_tol", t.gf_tol),
            ("root_tol", t.root_tol),
            ("dedup_tol", self.seed_bank.dedup_tol),
            ("tie_tol", self.seed_bank.tie_tol),
            ("margin", self.seed_bank.margin),
            ("dt", self.dt),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("eps must be positive, got {e}"));
            }
        }
        if let Some(f) = self.eps_factor {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("eps_factor must be positive, got {f}"));
            }
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn params(&self) -> Result<Params, CliError> {
        let p = match (self.eps, self.eps_factor) {
            (Some(e), _) => Params::new(self.rho0, self.rho1, e),
            (None, Some(f)) => Params::with_eps_factor(self.rho0, self.rho1, f),
            (None, None) => Params::with_eps_factor(self.rho0, self.rho1, 0.5),
        };
        p.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid_n).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn enumerate_options(&self) -> EnumerateOptions {
        let t = &self.tolerances;
        let s = &self.seed_bank;
        EnumerateOptions {
            picard: PicardOptions { tol: t.picard_tol, a_tol: t.a_tol, ..Default::default() },
            flow: FlowOptions { tol: t.gf_tol, ..Default::default() },
            dedup_tol: s.dedup_tol,
            tie_tol: s.tie_tol,
            margin: s.margin,
            exec: self.execution,
            jitter: s.rng_seed.map(|seed| (seed, s.jitter_amp)),
        }
    }
}
