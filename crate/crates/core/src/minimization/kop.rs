//! The operator `K_{ρ,ε}` and its normalization constant `A`.
//!
//! On the staggered grid the fixed-point relation reads
//! `s'(εφ_x|_c) = log A + (h/ε) Σ_{j=1..c} (g_j - ρ_j)` on every cell `c`,
//! with `g = 1/(1+e^φ)`; `A` is fixed by `(Kφ)(1) = φ₁`.

use crate::error::{Error, Result};
use crate::grid::Profile;
use crate::pointwise::{g_of_phi, logistic};
use crate::profiles::{DensityProfile, PhiProfile};

/// Output of one application of `K`.
#[derive(Clone, Debug)]
pub struct KOutput {
    pub phi: PhiProfile,
    /// `A`; `+∞` in the degenerate case `ε = ε₀`.
    pub a_const: f64,
    pub log_a: f64,
    /// `|(Kφ)(1) - φ₁|` before the final node is pinned.
    pub boundary_defect: f64,
}

/// Relative slack for treating `ε` as equal to `ε₀`.
pub const EPS0_SLACK: f64 = 1e-12;

/// Cell exponents `L_c = (h/ε) Σ_{j=1..c} (g_j - ρ_j)`.
pub fn k_exponents(rho: &DensityProfile, phi: &PhiProfile, eps: f64) -> Vec<f64> {
    let n = phi.grid().n();
    let c = phi.grid().h() / eps;
    let (r, p) = (rho.values(), phi.values());
    let mut out = vec![0.0; n - 1];
    for j in 1..n - 1 {
        out[j] = out[j - 1] + c * (g_of_phi(p[j]) - r[j]);
    }
    out
}

fn target_fraction(phi: &PhiProfile, eps: f64) -> Result<f64> {
    let tau = eps * phi.params().dphi();
    if tau > 1.0 + EPS0_SLACK {
        return Err(Error::Bracket(format!("eps/eps0 = {tau} > 1: no admissible A")));
    }
    Ok(tau)
}

/// `log A` such that `(Kφ)(1) = φ₁` within `tol`, from exponents `L`.
fn solve_log_a(exps: &[f64], tau: f64, h: f64, eps: f64, tol: f64) -> f64 {
    let m = exps.len() as f64;
    let target = m * tau;
    let logit = tau.ln() - (-tau).ln_1p();
    let lmin = exps.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (logit - lmax, logit - lmin);
    let eval = |a: f64| {
        let mut f = -target;
        let mut df = 0.0;
        for &l in exps {
            let q = logistic(a + l);
            f += q;
            df += q * (1.0 - q);
        }
        (f, df)
    };
    let mut a = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, df) = eval(a);
        if (h / eps) * f.abs() <= tol {
            return a;
        }
        if f > 0.0 {
            hi = a;
        } else {
            lo = a;
        }
        if hi - lo <= 1e-15 * (1.0 + a.abs()) {
            return a;
        }
        let newton = a - f / df;
        a = if df > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    a
}

/// Normalization constant `A` of `K_{ρ,ε}φ`.
pub fn solve_a(rho: &DensityProfile, phi: &PhiProfile, eps: f64, tol: f64) -> Result<f64> {
    Ok(apply_k_tol(rho, phi, eps, tol)?.a_const)
}

/// One application of `K_{ρ,ε}` with the default normalization tolerance.
pub fn apply_k(rho: &DensityProfile, phi: &PhiProfile, eps: f64) -> Result<KOutput> {
    apply_k_tol(rho, phi, eps, 1e-13)
}

/// One application of `K_{ρ,ε}`; at `ε = ε₀` the only admissible output is affine.
pub fn apply_k_tol(rho: &DensityProfile, phi: &PhiProfile, eps: f64, tol: f64) -> Result<KOutput> {
    let tau = target_fraction(phi, eps)?;
    let params = phi.params();
    let grid = phi.grid();
    if tau >= 1.0 - EPS0_SLACK {
        return Ok(KOutput {
            phi: PhiProfile::affine(params, grid),
            a_const: f64::INFINITY,
            log_a: f64::INFINITY,
            boundary_defect: 0.0,
        });
    }
    let h = grid.h();
    let exps = k_exponents(rho, phi, eps);
    let log_a = solve_log_a(&exps, tau, h, eps, tol);
    let n = grid.n();
    let mut v = vec![params.phi0; n];
    for c in 0..n - 1 {
        v[c + 1] = v[c] + (h / eps) * logistic(log_a + exps[c]);
    }
    let boundary_defect = (v[n - 1] - params.phi1).abs();
    v[n - 1] = params.phi1;
    Ok(KOutput {
        phi: PhiProfile::new_unchecked(Profile { grid, values: v }, params),
        a_const: log_a.exp(),
        log_a,
        boundary_defect,
    })
}
