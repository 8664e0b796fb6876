//! Gradient flow `v_t = εv_xx + v_x(1-εv_x)[ρ - g(v)]` of `𝒢_ε(ρ,·)`.
//!
//! The discrete mobility at node `i` is the chain-rule mean of `v_x(1-εv_x)` over the two
//! adjacent cells, so the semi-discrete flow is `-m_i ∂𝒢_h/∂φ_i / h` exactly and the
//! dissipation rate is `Σ h m_i (EL_i)²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::g_eps;
use crate::grid::{cell_slopes, Profile};
use crate::linalg::solve_tridiagonal;
use crate::pointwise::{g_of_phi, sigma_mean};
use crate::profiles::{DensityProfile, PhiProfile};

use super::{discrete_el_residual, finalize, picard, FixedPointResult, Method, PicardOptions};

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    /// Initial time step.
    pub dt: f64,
    pub dt_max: f64,
    pub t_max: f64,
    /// Stop when the dissipation rate falls below this value.
    pub tol: f64,
    /// Accepted increase of `𝒢_ε` per step.
    pub slack: f64,
    /// Polish the terminal state with Picard.
    pub polish: bool,
    /// Pin the node nearest to this abscissa at the given value (constrained flow).
    pub pin: Option<(f64, f64)>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { dt: 1e-3, dt_max: 0.5, t_max: 2.0e4, tol: 1e-16, slack: 1e-12, polish: true, pin: None }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub g_values: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub rejected_steps: usize,
    /// Largest accepted per-step increase of `𝒢_ε` (non-positive for a monotone run).
    pub max_increase: f64,
}

fn mobility(slopes: &[f64], eps: f64) -> Vec<f64> {
    let n = slopes.len() + 1;
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        m[i] = sigma_mean(eps * slopes[i - 1], eps * slopes[i]) / eps;
    }
    m
}

/// `Σ_i h m_i EL_i²` over interior nodes.
pub fn dissipation_rate(rho: &DensityProfile, phi: &PhiProfile, eps: f64) -> f64 {
    let h = phi.grid().h();
    let m = mobility(&phi.slopes(), eps);
    let el = discrete_el_residual(rho, phi, eps);
    (1..el.len() - 1).map(|i| h * m[i] * el[i] * el[i]).sum()
}

fn admissible(v: &[f64], h: f64, eps: f64) -> bool {
    v.windows(2).all(|w| {
        let a = eps * (w[1] - w[0]) / h;
        a > 0.0 && a < 1.0
    })
}

/// Runs the flow from `seed`; returns the terminal critical point and the monitored trace.
pub fn gradient_flow(
    rho: &DensityProfile,
    seed: &PhiProfile,
    eps: f64,
    opts: &FlowOptions,
) -> Result<(FixedPointResult, FlowTrace)> {
    let params = seed.params();
    let grid = seed.grid();
    let n = grid.n();
    let h = grid.h();
    let pin = opts.pin.map(|(y, val)| (grid.nearest(y).clamp(1, n - 2), val));
    let mut v = seed.values().to_vec();
    v[0] = params.phi0;
    v[n - 1] = params.phi1;
    if let Some((k, val)) = pin {
        v[k] = val;
    }
    let wrap = |vals: Vec<f64>| PhiProfile::new_unchecked(Profile { grid, values: vals }, params);
    let mut phi = wrap(v.clone());
    let mut g_now = g_eps(rho, &phi, eps);
    let mut trace = FlowTrace { max_increase: f64::NEG_INFINITY, ..Default::default() };
    let mut t = 0.0;
    let mut dt = opts.dt;
    let r = rho.values();
    loop {
        let diss = dissipation_rate(rho, &phi, eps);
        trace.times.push(t);
        trace.g_values.push(g_now);
        trace.dissipation.push(diss);
        if diss <= opts.tol || t >= opts.t_max {
            break;
        }
        let slopes = cell_slopes(phi.values(), h);
        let m = mobility(&slopes, eps);
        let force: Vec<f64> = (0..n).map(|i| m[i] * (r[i] - g_of_phi(v[i]))).collect();
        let mut rejections = 0;
        loop {
            let c = eps * dt / (h * h);
            let mut a = vec![-c; n - 2];
            let mut b = vec![1.0 + 2.0 * c; n - 2];
            let mut cc = vec![-c; n - 2];
            let mut rhs: Vec<f64> = (1..n - 1).map(|i| v[i] + dt * force[i]).collect();
            rhs[0] += c * params.phi0;
            rhs[n - 3] += c * params.phi1;
            if let Some((k, val)) = pin {
                let row = k - 1;
                a[row] = 0.0;
                cc[row] = 0.0;
                b[row] = 1.0;
                rhs[row] = val;
                if row > 0 {
                    rhs[row - 1] += c * val;
                    cc[row - 1] = 0.0;
                }
                if row + 1 < n - 2 {
                    rhs[row + 1] += c * val;
                    a[row + 1] = 0.0;
                }
            }
            let inner = solve_tridiagonal(&a, &b, &cc, &rhs)?;
            let mut cand = Vec::with_capacity(n);
            cand.push(params.phi0);
            cand.extend_from_slice(&inner);
            cand.push(params.phi1);
            let ok_domain = admissible(&cand, h, eps);
            let cand_phi = wrap(cand.clone());
            let g_new = if ok_domain { g_eps(rho, &cand_phi, eps) } else { f64::INFINITY };
            if ok_domain && g_new <= g_now + opts.slack {
                trace.max_increase = trace.max_increase.max(g_new - g_now);
                v = cand;
                phi = cand_phi;
                g_now = g_new;
                t += dt;
                dt = (dt * 1.25).min(opts.dt_max);
                break;
            }
            trace.rejected_steps += 1;
            rejections += 1;
            dt *= 0.5;
            if rejections > 20 {
                return Err(Error::StepRejection { t, dt });
            }
        }
    }
    if trace.max_increase == f64::NEG_INFINITY {
        trace.max_increase = 0.0;
    }
    let last = *trace.dissipation.last().unwrap_or(&f64::INFINITY);
    let iterations = trace.times.len();
    if pin.is_some() {
        return Ok((finalize(rho, phi, eps, Method::Constrained, iterations)?, trace));
    }
    if opts.polish {
        if let Ok(mut fp) =
            picard(rho, &phi, eps, &PicardOptions { theta: 1.0, max_iter: 2000, tol: 1e-11, ..Default::default() })
        {
            fp.method = Method::GradientFlow;
            fp.iterations += iterations;
            return Ok((fp, trace));
        }
        if last > opts.tol {
            return Err(Error::NonConvergence { what: "gradient_flow", iterations, residual: last });
        }
    }
    Ok((finalize(rho, phi, eps, Method::GradientFlow, iterations)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Params};
    use crate::stationary::stationary_profile;
    use std::f64::consts::PI;

    #[test]
    fn flow_reaches_unique_fixed_point_monotonically() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        let g = Grid::new(101).unwrap();
        let st = stationary_profile(&p, g).unwrap();
        let seed = PhiProfile::mollified_step(p, g, 0.7, 0.3, p.eps);
        let (fp, trace) = gradient_flow(&st.profile, &seed, p.eps, &FlowOptions::default()).unwrap();
        assert!(trace.g_values.windows(2).all(|w| w[1] <= w[0] + 1e-10));
        assert!(trace.max_increase <= 1e-10);
        let pc = picard(&st.profile, &seed, p.eps, &PicardOptions::default()).unwrap();
        assert!(fp.phi.sup_distance(&pc.phi) < 1e-8);
    }

    #[test]
    fn fixed_point_seed_is_stationary() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.4).unwrap();
        let g = Grid::new(101).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.1 * (PI * x).sin());
        let pc = picard(&rho, &PhiProfile::affine(p, g), p.eps, &PicardOptions { tol: 1e-13, ..Default::default() })
            .unwrap();
        let opts = FlowOptions { polish: false, t_max: 5.0, tol: 0.0, ..Default::default() };
        let (fp, _) = gradient_flow(&rho, &pc.phi, p.eps, &opts).unwrap();
        assert!(fp.phi.sup_distance(&pc.phi) <= 1e-9);
    }

    #[test]
    fn dissipation_matches_energy_decay() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.3).unwrap();
        let g = Grid::new(101).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.2 * (2.0 * PI * x).sin());
        let seed = PhiProfile::mollified_step(p, g, 0.5, 0.3, p.eps);
        let opts = FlowOptions { dt: 1e-5, dt_max: 1e-5, t_max: 2e-3, tol: 0.0, polish: false, ..Default::default() };
        let (_, tr) = gradient_flow(&rho, &seed, p.eps, &opts).unwrap();
        let k = tr.times.len() / 2;
        let slope = (tr.g_values[k + 1] - tr.g_values[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
        assert!((slope + tr.dissipation[k]).abs() < 2e-2 * tr.dissipation[k], "{slope} {}", tr.dissipation[k]);
    }
}
