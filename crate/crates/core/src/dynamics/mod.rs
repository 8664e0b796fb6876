//! Time-dependent side: the viscous Burgers solver, the `ψ`-path, the optimal excursion
//! and the action functional `ε‖H‖²_{1,σ(u)}`.

mod action;
mod burgers;
mod excursion;

pub use action::{
    action_of_controlled_path, action_via_elliptic, elliptic_control, slice_rate, slice_rate_from_residual,
    ActionReport,
};
pub use burgers::{
    burgers_relax, burgers_solve, burgers_solve_times, discrete_steady_state, graded_times, RelaxOptions,
};
pub use excursion::{
    excursion_path, psi_path, verify_static_dynamic, Excursion, ExcursionCheck, PathOptions, PsiPath,
    StaticDynamicReport, DELTA_GUARD,
};

use crate::error::{Error, Result};
use crate::grid::{Grid, Profile};

/// Time slices of a profile on a fixed grid.
///
/// `times` is strictly increasing; `dt` is the nominal (largest) step. Uniform paths
/// have `frames.len() = round((t1-t0)/dt) + 1`.
#[derive(Clone, Debug)]
pub struct TimePath {
    pub grid: Grid,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    pub times: Vec<f64>,
    pub frames: Vec<Profile>,
}

impl TimePath {
    pub fn new(grid: Grid, times: Vec<f64>, frames: Vec<Profile>) -> Result<Self> {
        if times.len() != frames.len() || times.is_empty() {
            return Err(Error::Domain("time path needs one frame per time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("time path times must increase".into()));
        }
        if frames.iter().any(|f| f.grid != grid) {
            return Err(Error::Domain("time path frames must share the grid".into()));
        }
        let dt = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(TimePath { grid, dt, t0: times[0], t1: *times.last().unwrap(), times, frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.times.windows(2).all(|w| ((w[1] - w[0]) - self.dt).abs() <= 1e-9 * self.dt)
    }

    /// `t ↦ path(-t)`.
    pub fn reversed(&self) -> TimePath {
        let times: Vec<f64> = self.times.iter().rev().map(|t| -t).collect();
        let frames: Vec<Profile> = self.frames.iter().rev().cloned().collect();
        TimePath { grid: self.grid, dt: self.dt, t0: times[0], t1: *times.last().unwrap(), times, frames }
    }

    pub fn last(&self) -> &Profile {
        self.frames.last().expect("non-empty path")
    }

    /// `max_k sup_x |frame_k - other_k|` over common frames.
    pub fn sup_distance(&self, other: &TimePath) -> f64 {
        self.frames.iter().zip(&other.frames).map(|(a, b)| a.sup_distance(b)).fold(0.0, f64::max)
    }
}

/// Trapezoid rule on a non-uniform abscissa.
pub fn trapezoid_in_time(times: &[f64], values: &[f64]) -> f64 {
    times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
}
