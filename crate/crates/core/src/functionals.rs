//! Static functionals: the trial functional `𝒢_ε`, `Λ`, the inviscid `𝒢` and `𝒢̃`,
//! the second variation and the Hamiltonians `ℍ` and `Ĥ`.
//!
//! Potentials are discretized on a staggered layout: `φ` lives on nodes, `φ_x` on cells.
//! Nodal integrands use the trapezoid rule and `s(εφ_x)` the midpoint rule on cells,
//! which makes the fixed points of the discrete `K` operator exactly the critical
//! points of the discrete `𝒢_ε`.

use crate::error::{Error, Result};
use crate::grid::{cell_slopes, ddx_values, partial_integral, Params, Profile};
use crate::linalg::smallest_eigenvalue;
use crate::pointwise::{entropy, log1pexp, logistic_density, sigma_mean};
use crate::profiles::{DensityProfile, MomentumProfile, PhiProfile};

/// Slack on `εφ_x ∈ [0,1]` before a profile is declared out of domain.
pub const SLOPE_TOL: f64 = 1e-10;

fn cell_entropy(phi: &PhiProfile, eps: f64) -> f64 {
    let h = phi.grid().h();
    let mut acc = 0.0;
    for d in phi.slopes() {
        let a = eps * d;
        if !(-SLOPE_TOL..=1.0 + SLOPE_TOL).contains(&a) {
            return f64::INFINITY;
        }
        acc += h * entropy(a.clamp(0.0, 1.0));
    }
    acc
}

fn nodal_part(rho: &DensityProfile, phi: &PhiProfile) -> f64 {
    let g = rho.grid();
    rho.values()
        .iter()
        .zip(phi.values())
        .enumerate()
        .map(|(i, (&r, &p))| g.weight(i) * (entropy(r) + (1.0 - r) * p - log1pexp(p)))
        .sum()
}

/// `𝒢_ε(ρ,φ) = ∫ s(ρ) + s(εφ_x) + (1-ρ)φ - log(1+e^φ)`; `+∞` unless `0 ≤ εφ_x ≤ 1`.
pub fn g_eps(rho: &DensityProfile, phi: &PhiProfile, eps: f64) -> f64 {
    let c = cell_entropy(phi, eps);
    if c.is_infinite() {
        return c;
    }
    c + nodal_part(rho, phi)
}

/// `Λ(φ) = ∫ s(εφ_x) + φ - log(1+e^φ)`.
pub fn lambda_functional(phi: &PhiProfile, eps: f64) -> f64 {
    let c = cell_entropy(phi, eps);
    if c.is_infinite() {
        return c;
    }
    let g = phi.grid();
    c + phi.values().iter().enumerate().map(|(i, &p)| g.weight(i) * (p - log1pexp(p))).sum::<f64>()
}

/// `∫ s(ρ)`.
pub fn entropy_integral(rho: &DensityProfile) -> f64 {
    let g = rho.grid();
    rho.values().iter().enumerate().map(|(i, &r)| g.weight(i) * entropy(r)).sum()
}

/// Trapezoid `⟨ρ,φ⟩`.
pub fn pairing(rho: &DensityProfile, phi: &PhiProfile) -> f64 {
    let g = rho.grid();
    rho.values().iter().zip(phi.values()).enumerate().map(|(i, (&r, &p))| g.weight(i) * r * p).sum()
}

/// Inviscid functional `𝒢(ρ,φ) = ∫ s(ρ) + (1-ρ)φ - log(1+e^φ)`.
pub fn g_inviscid(rho: &DensityProfile, phi: &PhiProfile) -> f64 {
    nodal_part(rho, phi)
}

/// `𝒢̃(ρ,y)`: the inviscid functional on the step `φ^{(y)}`, with exact
/// partial integrals of the piecewise-linear interpolant of `ρ`.
pub fn g_tilde(rho: &DensityProfile, params: &Params, y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    let one_minus = Profile { grid: rho.grid(), values: rho.values().iter().map(|r| 1.0 - r).collect() };
    let total = partial_integral(&one_minus, 1.0);
    let left = partial_integral(&one_minus, y);
    entropy_integral(rho) + params.phi0 * left + params.phi1 * (total - left)
        - y * log1pexp(params.phi0)
        - (1.0 - y) * log1pexp(params.phi1)
}

/// Cell stiffness weights `ε/(φ_x(1-εφ_x))`; errors when `εφ_x ∉ (0,1)`.
fn stiffness_weights(phi: &PhiProfile, eps: f64) -> Result<Vec<f64>> {
    phi.slopes()
        .iter()
        .map(|&d| {
            let a = eps * d;
            let w = eps / (d * (1.0 - a));
            if a > 0.0 && a < 1.0 && w.is_finite() {
                Ok(w)
            } else {
                Err(Error::Degenerate(format!("stiffness weight undefined for eps*phi_x = {a}")))
            }
        })
        .collect()
}

/// Second variation `∫ εh_x²/(φ_x(1-εφ_x)) - e^φ h²/(1+e^φ)²` for a nodal `h`.
pub fn second_variation_form(phi: &PhiProfile, eps: f64, h: &[f64]) -> Result<f64> {
    let k = stiffness_weights(phi, eps)?;
    let g = phi.grid();
    let dx = g.h();
    let stiff: f64 = cell_slopes(h, dx).iter().zip(&k).map(|(s, w)| dx * w * s * s).sum();
    let mass: f64 =
        phi.values().iter().zip(h).enumerate().map(|(i, (&p, &v))| g.weight(i) * logistic_density(p) * v * v).sum();
    Ok(stiff - mass)
}

/// Smallest eigenvalue of the second variation relative to the lumped mass matrix,
/// together with the scale of the form used for classification thresholds.
pub fn second_variation_min_eig(phi: &PhiProfile, eps: f64) -> Result<(f64, f64)> {
    let k = stiffness_weights(phi, eps)?;
    let n = phi.grid().n();
    let h = phi.grid().h();
    let h2 = h * h;
    let m: Vec<f64> = phi.values().iter().map(|&p| logistic_density(p)).collect();
    let diag: Vec<f64> = (1..n - 1).map(|i| (k[i - 1] + k[i]) / h2 - m[i]).collect();
    let off: Vec<f64> = (1..n - 2).map(|i| -k[i] / h2).collect();
    let mean_k = k.iter().sum::<f64>() / k.len() as f64;
    let scale = std::f64::consts::PI.powi(2) * mean_k + m.iter().cloned().fold(0.0, f64::max);
    if diag.len() == 1 {
        return Ok((diag[0], scale));
    }
    Ok((smallest_eigenvalue(&diag, &off, 1e-12 * scale), scale))
}

/// `ℍ(ρ,h) = ε⟨h_x,σ(ρ)h_x⟩ - ⟨ερ_x - f(ρ), h_x⟩` with cell mobilities
/// `σ̃ = Δρ/Δs'(ρ)` standing for both `σ(ρ)` and `f(ρ)` on each cell.
pub fn hamiltonian(rho: &DensityProfile, h: &MomentumProfile, eps: f64) -> f64 {
    let r = rho.values();
    let dx = rho.grid().h();
    let dh = cell_slopes(h.values(), dx);
    (0..r.len() - 1)
        .map(|c| {
            let s = sigma_mean(r[c], r[c + 1]);
            let dr = (r[c + 1] - r[c]) / dx;
            dx * (eps * s * dh[c] * dh[c] - (eps * dr - s) * dh[c])
        })
        .sum()
}

/// `Ĥ(ρ,w) = -ε⟨w_x,σ(ρ)w_x⟩ - ε⟨ρ,w_xx⟩ + ⟨σ(ρ),w_x⟩ - ρ₁[1-εw_x(1)] + ρ₀[1-εw_x(0)]`.
///
/// `⟨ρ,w_xx⟩` is the summation-by-parts dual of the cell gradient, closed with
/// second-order one-sided boundary slopes.
pub fn hamiltonian_hat(rho: &DensityProfile, w: &MomentumProfile, params: &Params, eps: f64) -> f64 {
    let r = rho.values();
    let n = r.len();
    let dx = rho.grid().h();
    let dw = cell_slopes(w.values(), dx);
    let wx = ddx_values(w.values(), dx);
    let (wx0, wx1) = (wx[0], wx[n - 1]);
    let mut quad = 0.0;
    let mut lin = 0.0;
    for c in 0..n - 1 {
        let s = sigma_mean(r[c], r[c + 1]);
        quad += dx * s * dw[c] * dw[c];
        lin += dx * s * dw[c];
    }
    let mut rw = r[0] * (dw[0] - wx0) + r[n - 1] * (wx1 - dw[n - 2]);
    for i in 1..n - 1 {
        rw += r[i] * (dw[i] - dw[i - 1]);
    }
    -eps * quad - eps * rw + lin - params.rho1 * (1.0 - eps * wx1) + params.rho0 * (1.0 - eps * wx0)
}
