//! The contraction maps `𝒦⁽¹⁾` and `𝒦⁽²⁾`, iterated on cell slopes in the metric
//! `d(φ,ψ) = sup|φ_x - ψ_x|`.
//!
//! `𝒦⁽¹⁾` prescribes `log(1-εφ_x)` through `𝓡⁽¹⁾ = (ρ-g)φ_x` and `𝒦⁽²⁾` prescribes
//! `log φ_x` through `𝓡⁽²⁾ = ε⁻¹(g-ρ)(1-εφ_x)`. On the grid the factors `φ_x` and
//! `1-εφ_x` are replaced by their chain-rule means across each node, so both maps
//! share their fixed points with `K`.

use crate::error::{Error, Result};
use crate::grid::{cell_slopes, Profile};
use crate::pointwise::{g_of_phi, mean_for_log, mean_for_log_complement};
use crate::profiles::{DensityProfile, PhiProfile};

use super::{apply_k, finalize, FixedPointResult, Method};

#[derive(Clone, Copy, Debug)]
pub struct ContractionOptions {
    pub max_iter: usize,
    /// Stop when `sup|Δφ_x| ≤ tol`.
    pub tol: f64,
}

impl Default for ContractionOptions {
    fn default() -> Self {
        ContractionOptions { max_iter: 5000, tol: 1e-11 }
    }
}

#[derive(Clone, Debug)]
pub struct ContractionResult {
    pub fixed_point: FixedPointResult,
    /// Largest observed ratio `d(iter_{k+1})/d(iter_k)` while the changes were above noise.
    pub contraction_factor: f64,
}

#[derive(Clone, Copy)]
enum Variant {
    K1,
    K2,
}

fn phi_from_slopes(seed: &PhiProfile, d: &[f64]) -> PhiProfile {
    let params = seed.params();
    let grid = seed.grid();
    let h = grid.h();
    let n = grid.n();
    let mut v = vec![params.phi0; n];
    for c in 0..n - 1 {
        v[c + 1] = v[c] + h * d[c];
    }
    v[n - 1] = params.phi1;
    PhiProfile::new_unchecked(Profile { grid, values: v }, params)
}

fn step(variant: Variant, rho: &DensityProfile, phi: &PhiProfile, d: &[f64], eps: f64) -> Result<Vec<f64>> {
    let params = phi.params();
    let h = phi.grid().h();
    let n = d.len() + 1;
    let (r, p) = (rho.values(), phi.values());
    let mut big_r = vec![0.0; n - 1];
    for i in 1..n - 1 {
        let (a, b) = (eps * d[i - 1], eps * d[i]);
        let gi = g_of_phi(p[i]);
        let inc = match variant {
            Variant::K1 => mean_for_log_complement(a, b) * (h / eps) * (r[i] - gi),
            Variant::K2 => mean_for_log(a, b) * (h / eps) * (gi - r[i]),
        };
        big_r[i] = big_r[i - 1] + inc;
    }
    let shift = big_r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = big_r.iter().map(|x| (x - shift).exp()).collect();
    let sum: f64 = e.iter().sum::<f64>() * h;
    let out: Vec<f64> = match variant {
        Variant::K1 => {
            let kappa = (1.0 - eps * params.dphi()) / sum;
            e.iter().map(|x| (1.0 - kappa * x) / eps).collect()
        }
        Variant::K2 => e.iter().map(|x| params.dphi() * x / sum).collect(),
    };
    if out.iter().any(|&s| !(eps * s > 0.0 && eps * s < 1.0)) {
        return Err(Error::Domain("contraction iterate left 0 < eps*phi_x < 1".into()));
    }
    Ok(out)
}

fn iterate(
    variant: Variant,
    rho: &DensityProfile,
    seed: &PhiProfile,
    eps: f64,
    opts: &ContractionOptions,
) -> Result<ContractionResult> {
    if eps * seed.params().dphi() >= 1.0 {
        return Err(Error::Precondition("contraction maps need eps < eps0".into()));
    }
    let h = seed.grid().h();
    let mut d = cell_slopes(seed.values(), h);
    if d.iter().any(|&s| !(eps * s > 0.0 && eps * s < 1.0)) {
        // Seeds on the boundary of ℱ are moved inside by one application of K.
        d = cell_slopes(apply_k(rho, seed, eps)?.phi.values(), h);
    }
    let mut phi = phi_from_slopes(seed, &d);
    let mut prev_change = f64::NAN;
    let mut factor: f64 = 0.0;
    let what = match variant {
        Variant::K1 => "contraction_k1",
        Variant::K2 => "contraction_k2",
    };
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let next = step(variant, rho, &phi, &d, eps)?;
        change = next.iter().zip(&d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if prev_change.is_finite() && prev_change > 1e3 * opts.tol {
            factor = factor.max(change / prev_change);
        }
        prev_change = change;
        d = next;
        phi = phi_from_slopes(seed, &d);
        if change <= opts.tol {
            let method = match variant {
                Variant::K1 => Method::ContractionK1,
                Variant::K2 => Method::ContractionK2,
            };
            let fixed_point = finalize(rho, phi, eps, method, it)?;
            return Ok(ContractionResult { fixed_point, contraction_factor: factor });
        }
    }
    Err(Error::NonConvergence { what, iterations: opts.max_iter, residual: change })
}

/// `𝒦⁽¹⁾` iteration; contractive for `ε` close to `ε₀`.
pub fn contraction_k1(
    rho: &DensityProfile,
    seed: &PhiProfile,
    eps: f64,
    opts: &ContractionOptions,
) -> Result<ContractionResult> {
    iterate(Variant::K1, rho, seed, eps, opts)
}

/// `𝒦⁽²⁾` iteration; contractive for small `φ₁ - φ₀`.
pub fn contraction_k2(
    rho: &DensityProfile,
    seed: &PhiProfile,
    eps: f64,
    opts: &ContractionOptions,
) -> Result<ContractionResult> {
    iterate(Variant::K2, rho, seed, eps, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Params};
    use crate::minimization::{picard, PicardOptions};
    use std::f64::consts::PI;

    #[test]
    fn k1_matches_picard_near_eps0() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.95).unwrap();
        let g = Grid::new(201).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.15 * (2.0 * PI * x).sin() + 0.1 * x);
        let seed = PhiProfile::mollified_step(p, g, 0.4, 0.3, p.eps);
        let k1 = contraction_k1(&rho, &seed, p.eps, &ContractionOptions::default()).unwrap();
        assert!(k1.contraction_factor < 1.0, "{}", k1.contraction_factor);
        let pc = picard(&rho, &seed, p.eps, &PicardOptions::default()).unwrap();
        assert!(k1.fixed_point.phi.sup_distance(&pc.phi) < 1e-6);
    }

    #[test]
    fn k2_unique_for_small_jump() {
        let p = Params::new(0.487_502_6, 0.512_497_4, 2.0).unwrap();
        assert!((p.eps0 - 10.0).abs() < 1e-4);
        assert!((p.dphi() - 0.1).abs() < 1e-6);
        let g = Grid::new(101).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.3 * (3.0 * PI * x).sin());
        let mut sols = Vec::new();
        for y in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let seed = PhiProfile::mollified_step(p, g, y, 0.2, p.eps);
            let r = contraction_k2(&rho, &seed, p.eps, &ContractionOptions::default()).unwrap();
            assert!(r.contraction_factor < 1.0);
            sols.push(r.fixed_point.phi);
        }
        for s in &sols[1..] {
            assert!(s.sup_distance(&sols[0]) < 1e-8);
        }
    }
}
