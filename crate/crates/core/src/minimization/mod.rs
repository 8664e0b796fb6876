//! The static variational problem: `K_{ρ,ε}`, Picard iteration, the two contraction
//! maps, the gradient flow, seed-bank enumeration of critical points and `S_ε(ρ)`.

mod contraction;
mod enumerate;
mod flow;
mod kop;
mod picard;

pub use contraction::{contraction_k1, contraction_k2, ContractionOptions, ContractionResult};
pub use enumerate::{
    enumerate_fixed_points, quasi_potential, stationary_minimum_closed, EnumerateOptions, MinimizationReport,
    MinimizationSummary, SeedBank, STEP_POSITIONS,
};
pub use flow::{dissipation_rate, gradient_flow, FlowOptions, FlowTrace};
pub use kop::{apply_k, apply_k_tol, k_exponents, solve_a, KOutput, EPS0_SLACK};
pub use picard::{picard, PicardOptions};

use serde::Serialize;

use crate::error::Result;
use crate::functionals::{g_eps, second_variation_min_eig};
use crate::grid::{cell_slopes, d2dx2_values, ddx_values};
use crate::pointwise::{entropy_prime_diff, g_of_phi};
use crate::profiles::{DensityProfile, PhiProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Minimizer,
    Saddle,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    ContractionK1,
    ContractionK2,
    GradientFlow,
    Constrained,
}

/// A converged critical point of `𝒢_ε(ρ,·)` with its diagnostics.
#[derive(Clone, Debug)]
pub struct FixedPointResult {
    pub phi: PhiProfile,
    pub a_const: f64,
    /// Sup of the nodal defect `εφ_xx - φ_x(1-εφ_x)(g-ρ)` (finite differences).
    pub el_residual: f64,
    /// Sup of the staggered defect `ε Δs'(εφ_x)/h - g + ρ` at interior nodes.
    pub discrete_residual: f64,
    /// `|Kφ - φ|_sup`.
    pub fixed_point_defect: f64,
    pub g_value: f64,
    pub min_eig: f64,
    pub eig_scale: f64,
    pub kind: FixedPointKind,
    /// Observed `min(εφ_x, 1-εφ_x)` over cells.
    pub delta: f64,
    pub iterations: usize,
    pub method: Method,
}

/// Serializable digest of a [`FixedPointResult`].
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointSummary {
    pub a_const: f64,
    pub el_residual: f64,
    pub discrete_residual: f64,
    pub fixed_point_defect: f64,
    pub g_value: f64,
    pub min_eig: f64,
    pub kind: FixedPointKind,
    pub delta: f64,
    pub iterations: usize,
    pub method: Method,
    pub phi_at_half: f64,
}

impl FixedPointResult {
    pub fn summary(&self) -> FixedPointSummary {
        FixedPointSummary {
            a_const: self.a_const,
            el_residual: self.el_residual,
            discrete_residual: self.discrete_residual,
            fixed_point_defect: self.fixed_point_defect,
            g_value: self.g_value,
            min_eig: self.min_eig,
            kind: self.kind,
            delta: self.delta,
            iterations: self.iterations,
            method: self.method,
            phi_at_half: self.phi.at(0.5),
        }
    }
}

/// Nodal Euler–Lagrange defect with the denominator cleared.
pub fn el_residual(rho: &DensityProfile, phi: &PhiProfile, eps: f64) -> f64 {
    let h = phi.grid().h();
    let v = phi.values();
    let d1 = ddx_values(v, h);
    let d2 = d2dx2_values(v, h);
    let r = rho.values();
    (1..v.len() - 1)
        .map(|i| (eps * d2[i] - d1[i] * (1.0 - eps * d1[i]) * (g_of_phi(v[i]) - r[i])).abs())
        .fold(0.0, f64::max)
}

/// Staggered Euler–Lagrange defect, zero exactly at critical points of the discrete `𝒢_ε`.
pub fn discrete_el_residual(rho: &DensityProfile, phi: &PhiProfile, eps: f64) -> Vec<f64> {
    let h = phi.grid().h();
    let v = phi.values();
    let d = cell_slopes(v, h);
    let r = rho.values();
    let mut out = vec![0.0; v.len()];
    for i in 1..v.len() - 1 {
        out[i] = eps * entropy_prime_diff(eps * d[i - 1], eps * d[i]) / h - g_of_phi(v[i]) + r[i];
    }
    out
}

/// Relative threshold for the minimizer/saddle classification.
pub const EIG_REL_TOL: f64 = 1e-8;

/// Packages a converged profile: one more `K` application for `A` and the defect,
/// residuals, `𝒢_ε`, second-variation eigenvalue and classification.
pub fn finalize(
    rho: &DensityProfile,
    phi: PhiProfile,
    eps: f64,
    method: Method,
    iterations: usize,
) -> Result<FixedPointResult> {
    let k = apply_k(rho, &phi, eps)?;
    let fixed_point_defect = k.phi.sup_distance(&phi);
    let (lo, hi) = phi.eps_slope_range(eps);
    let delta = lo.min(1.0 - hi);
    let discrete_residual = if k.a_const.is_infinite() {
        0.0
    } else {
        discrete_el_residual(rho, &phi, eps).iter().map(|x| x.abs()).fold(0.0, f64::max)
    };
    let (min_eig, eig_scale, kind) = match second_variation_min_eig(&phi, eps) {
        Ok((lam, scale)) => {
            let tol = EIG_REL_TOL * scale;
            let kind = if lam > tol {
                FixedPointKind::Minimizer
            } else if lam < -tol {
                FixedPointKind::Saddle
            } else {
                FixedPointKind::Undetermined
            };
            (lam, scale, kind)
        }
        // εφ_x ≡ 1: the admissible set is a single point, the form is +∞ off zero.
        Err(_) if k.a_const.is_infinite() => (f64::INFINITY, f64::INFINITY, FixedPointKind::Minimizer),
        Err(_) => (f64::NAN, f64::NAN, FixedPointKind::Undetermined),
    };
    Ok(FixedPointResult {
        a_const: k.a_const,
        el_residual: el_residual(rho, &phi, eps),
        discrete_residual,
        fixed_point_defect,
        g_value: g_eps(rho, &phi, eps),
        min_eig,
        eig_scale,
        kind,
        delta,
        iterations,
        method,
        phi,
    })
}
