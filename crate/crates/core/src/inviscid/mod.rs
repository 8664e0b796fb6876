//! Inviscid limit: the thresholds `A`, `A±`, minimization of `𝒢̃(ρ,·)` over step
//! positions, the two-minimizer test densities, the coexistence function `g_ε(α)`
//! and the scans in `ε`.

mod scan;
mod transition;

pub use scan::{bifurcation_scan, gamma_scan, inversions, BifurcationRow, GammaRow};
pub use transition::{
    build_test_density, default_delta, find_transition, g_alpha, raised_cosine, restricted_minimum, GAlpha, Half,
    RestrictedMinimum, TestDensity, TransitionOptions, TransitionReport,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::g_tilde;
use crate::grid::{Grid, Params};
use crate::pointwise::log1pexp;
use crate::profiles::DensityProfile;
use crate::stationary::inviscid_stationary;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub a: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub phibar: f64,
}

/// `1 - [log(1+e^q) - log(1+e^p)]/(q-p)`.
fn secant_threshold(p: f64, q: f64) -> f64 {
    1.0 - (log1pexp(q) - log1pexp(p)) / (q - p)
}

pub fn thresholds(params: &Params) -> Thresholds {
    let (p0, p1) = (params.phi0, params.phi1);
    let phibar = 0.5 * (p0 + p1);
    Thresholds {
        a: secant_threshold(p0, p1),
        a_plus: secant_threshold(p0, phibar),
        a_minus: secant_threshold(phibar, p1),
        phibar,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct InviscidOptions {
    /// Mesh points per grid node.
    pub refine: usize,
    /// Values within this distance of the minimum count as minimal.
    pub arg_tol: f64,
    /// Golden-section stopping width.
    pub y_tol: f64,
}

impl Default for InviscidOptions {
    fn default() -> Self {
        InviscidOptions { refine: 10, arg_tol: 1e-9, y_tol: 1e-12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InviscidMinimum {
    pub value: f64,
    /// Step positions attaining `value` within `arg_tol`, increasing.
    pub argmins: Vec<f64>,
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let y = 0.5 * (a + b);
    (y, f(y))
}

/// `inf_y 𝒢̃(ρ,y)` on a mesh of `refine·n` points with golden-section refinement of
/// every mesh-local minimum.
pub fn minimize_inviscid(rho: &DensityProfile, params: &Params, opts: &InviscidOptions) -> InviscidMinimum {
    let m = (opts.refine * rho.grid().n()).max(3);
    let f = |y: f64| g_tilde(rho, params, y);
    let ys: Vec<f64> = (0..m).map(|k| k as f64 / (m - 1) as f64).collect();
    let vals: Vec<f64> = ys.iter().map(|&y| f(y)).collect();
    let flat = opts.arg_tol;
    let mut cands: Vec<(f64, f64)> = Vec::new();
    for k in 0..m {
        let left_ok = k == 0 || vals[k] <= vals[k - 1] + flat;
        let right_ok = k == m - 1 || vals[k] <= vals[k + 1] + flat;
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = ys[k.saturating_sub(1)];
        let hi = ys[(k + 1).min(m - 1)];
        let (y, v) = golden_section(f, lo, hi, opts.y_tol);
        let gain = vals[k] - v;
        cands.push(if gain > 64.0 * f64::EPSILON * vals[k].abs() { (y, v) } else { (ys[k], vals[k]) });
    }
    let value = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let spacing = 1.0 / (m - 1) as f64;
    let mut argmins: Vec<f64> = Vec::new();
    for (y, v) in cands {
        if v <= value + opts.arg_tol && argmins.last().is_none_or(|&last| y - last > 0.5 * spacing) {
            argmins.push(y);
        }
    }
    InviscidMinimum { value, argmins }
}

/// Inviscid quasi-potential `S(ρ) = inf 𝒢(ρ,·) - inf 𝒢(ρ̄,·)`.
pub fn inviscid_quasi_potential(rho: &DensityProfile, params: &Params, opts: &InviscidOptions) -> Result<f64> {
    let grid = rho.grid();
    let reference = minimize_inviscid(&inviscid_stationary(params, grid), params, opts).value;
    if (params.rho0 + params.rho1 - 1.0).abs() <= 1e-12 {
        for y in [0.25, 0.75] {
            let shifted = shock_at(params, grid, y);
            let v = minimize_inviscid(&shifted, params, opts).value;
            if (v - reference).abs() > 1e-9 {
                return Err(Error::Invariant(format!(
                    "inviscid stationary value depends on the shock position: {v} vs {reference}"
                )));
            }
        }
    }
    Ok(minimize_inviscid(rho, params, opts).value - reference)
}

fn shock_at(params: &Params, grid: Grid, y: f64) -> DensityProfile {
    DensityProfile::from_fn_clipped(grid, |x| if x < y { params.rho0 } else { params.rho1 })
}
