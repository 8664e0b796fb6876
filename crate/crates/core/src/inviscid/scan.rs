//! Sweeps in `ε`: convergence of `S_ε` to the inviscid `S`, and the observed
//! coexistence threshold of the transition construction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::grid::{trapezoid, Params, Profile};
use crate::minimization::{quasi_potential, EnumerateOptions};
use crate::profiles::{DensityProfile, PhiProfile};

use super::transition::{bisect, bracket};
use super::{inviscid_quasi_potential, minimize_inviscid, InviscidOptions, TestDensity, TransitionOptions};

#[derive(Clone, Debug, Serialize)]
pub struct GammaRow {
    pub eps: f64,
    pub eps_factor: f64,
    pub s_eps: f64,
    pub s_inviscid: f64,
    /// `|S_ε(ρ) - S(ρ)|`.
    pub gap: f64,
    /// Distances from the `ε`-minimizer to the nearest inviscid step minimizer.
    pub sup_distance: f64,
    pub l1_distance: f64,
    /// Position of that nearest step.
    pub y_star: f64,
}

/// Rows for each `ε = factor·ε₀`, in the order given.
pub fn gamma_scan(
    rho: &DensityProfile,
    params: &Params,
    eps_factors: &[f64],
    opts: &EnumerateOptions,
    inviscid: &InviscidOptions,
) -> Result<Vec<GammaRow>> {
    let grid = rho.grid();
    let s_inviscid = inviscid_quasi_potential(rho, params, inviscid)?;
    let argmins = minimize_inviscid(rho, params, inviscid).argmins;
    let inner = EnumerateOptions { exec: Execution::Sequential, ..*opts };
    let rows = exec::map(opts.exec, eps_factors, |&f| -> Result<GammaRow> {
        let p = Params::with_eps_factor(params.rho0, params.rho1, f)?;
        let rep = quasi_potential(rho, &p, &inner)?;
        let phi = &rep.fixed_points[0].phi;
        let (mut sup, mut l1, mut y_star) = (f64::INFINITY, f64::INFINITY, f64::NAN);
        for &y in &argmins {
            let step = PhiProfile::step(p, grid, y);
            let diff: Vec<f64> = phi.values().iter().zip(step.values()).map(|(a, b)| (a - b).abs()).collect();
            let d1 = trapezoid(&diff, grid.h());
            if d1 < l1 {
                l1 = d1;
                sup = diff.iter().cloned().fold(0.0, f64::max);
                y_star = y;
            }
        }
        Ok(GammaRow {
            eps: p.eps,
            eps_factor: f,
            s_eps: rep.s_eps,
            s_inviscid,
            gap: (rep.s_eps - s_inviscid).abs(),
            sup_distance: sup,
            l1_distance: l1,
            y_star,
        })
    });
    rows.into_iter().collect()
}

/// Number of `k` with `values[k+1] >= values[k]`.
pub fn inversions(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] >= w[0]).count()
}

#[derive(Clone, Debug, Serialize)]
pub struct BifurcationRow {
    pub eps: f64,
    pub eps_factor: f64,
    /// `transition`, `bracket_failure`, `coincident` or `error`.
    pub status: String,
    pub alpha0: Option<f64>,
    pub n_minimizers_at_alpha0: Option<usize>,
    pub separation: Option<f64>,
    pub g_minus_delta: Option<f64>,
    pub g_plus_delta: Option<f64>,
    pub message: Option<String>,
}

/// Runs the transition search at each `ε = factor·ε₀` with a fixed test density and bump.
pub fn bifurcation_scan(
    test: &TestDensity,
    lambda: &Profile,
    delta: f64,
    eps_factors: &[f64],
    opts: &TransitionOptions,
) -> Vec<BifurcationRow> {
    let inner = TransitionOptions { exec: Execution::Sequential, ..*opts };
    exec::map(opts.exec, eps_factors, |&f| {
        let eps = f * test.params.eps0;
        let mut row = BifurcationRow {
            eps,
            eps_factor: f,
            status: "error".into(),
            alpha0: None,
            n_minimizers_at_alpha0: None,
            separation: None,
            g_minus_delta: None,
            g_plus_delta: None,
            message: None,
        };
        let (lo, hi) = match bracket(test, lambda, delta, eps, &inner) {
            Ok(b) => b,
            Err(e) => {
                row.message = Some(e.to_string());
                return row;
            }
        };
        row.g_minus_delta = Some(lo.value);
        row.g_plus_delta = Some(hi.value);
        match bisect(test, lambda, delta, eps, &inner, lo, hi) {
            Ok(rep) => {
                row.status = "transition".into();
                row.alpha0 = Some(rep.alpha0);
                row.separation = Some(rep.separation);
                row.n_minimizers_at_alpha0 = Some(rep.n_minimizers(inner.dedup_tol));
            }
            Err(e) => {
                row.status = match e {
                    Error::Bracket(_) => "bracket_failure",
                    Error::Invariant(_) => "coincident",
                    _ => "error",
                }
                .into();
                row.message = Some(e.to_string());
            }
        }
        row
    })
}
