//! Viscous Burgers solver: IMEX SBDF2 (variable step) with implicit diffusion and an
//! explicit centered flux difference, Dirichlet data `ρ₀`, `ρ₁`.

use crate::error::{Error, Result};
use crate::grid::{Grid, Params, Profile};
use crate::linalg::solve_tridiagonal;
use crate::pointwise::flux;
use crate::profiles::DensityProfile;
use crate::stationary::stationary_profile;

use super::TimePath;

/// Slack of the maximum-principle assertion.
const RANGE_SLACK: f64 = 1e-10;

/// `-(f(u_{i+1}) - f(u_{i-1}))/(2h)` at interior nodes, zero at the ends.
fn advection(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = -(flux(u[i + 1]) - flux(u[i - 1])) / (2.0 * h);
    }
    out
}

/// Solves `a0 u - dt ε Δ_h u = rhs` on interior nodes with the boundary values of `u_bc`.
fn implicit_solve(a0: f64, dt: f64, eps: f64, h: f64, rhs: &[f64], rho0: f64, rho1: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    let m = n - 2;
    let c = eps * dt / (h * h);
    let a = vec![-c; m];
    let b = vec![a0 + 2.0 * c; m];
    let cc = vec![-c; m];
    let mut d: Vec<f64> = rhs[1..n - 1].to_vec();
    d[0] += c * rho0;
    d[m - 1] += c * rho1;
    let inner = solve_tridiagonal(&a, &b, &cc, &d)?;
    let mut u = Vec::with_capacity(n);
    u.push(rho0);
    u.extend(inner);
    u.push(rho1);
    Ok(u)
}

struct Stepper {
    params: Params,
    h: f64,
    lo: f64,
    hi: f64,
    prev: Option<(Vec<f64>, Vec<f64>, f64)>,
}

impl Stepper {
    fn new(params: Params, grid: Grid, init: &[f64]) -> Self {
        let lo = init.iter().cloned().fold(params.rho0, f64::min);
        let hi = init.iter().cloned().fold(params.rho1, f64::max);
        Stepper { params, h: grid.h(), lo, hi, prev: None }
    }

    /// Advances `u` by `dt`; the first step is IMEX Euler.
    fn step(&mut self, u: &[f64], dt: f64, t: f64) -> Result<Vec<f64>> {
        if dt > self.h * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, h: self.h });
        }
        let eps = self.params.eps;
        let nu = advection(u, self.h);
        let euler = |u: &[f64], nu: &[f64], dt: f64| -> Result<Vec<f64>> {
            let rhs: Vec<f64> = u.iter().zip(nu).map(|(a, b)| a + dt * b).collect();
            implicit_solve(1.0, dt, eps, self.h, &rhs, self.params.rho0, self.params.rho1)
        };
        let next = match &self.prev {
            // Start-up: Richardson extrapolation of IMEX Euler, second-order accurate.
            None => {
                let full = euler(u, &nu, dt)?;
                let mid = euler(u, &nu, 0.5 * dt)?;
                let half = euler(&mid, &advection(&mid, self.h), 0.5 * dt)?;
                half.iter().zip(&full).map(|(a, b)| 2.0 * a - b).collect()
            }
            Some((u_old, nu_old, dt_old)) => {
                let w = dt / dt_old;
                let a0 = (1.0 + 2.0 * w) / (1.0 + w);
                let a1 = 1.0 + w;
                let a2 = w * w / (1.0 + w);
                let rhs: Vec<f64> = (0..u.len())
                    .map(|i| a1 * u[i] - a2 * u_old[i] + dt * ((1.0 + w) * nu[i] - w * nu_old[i]))
                    .collect();
                implicit_solve(a0, dt, eps, self.h, &rhs, self.params.rho0, self.params.rho1)?
            }
        };
        if let Some(i) = next.iter().position(|&v| !(v >= self.lo - RANGE_SLACK && v <= self.hi + RANGE_SLACK)) {
            return Err(Error::RangeEscape(format!(
                "u = {} at node {i}, t = {:.6e} outside [{}, {}]",
                next[i],
                t + dt,
                self.lo,
                self.hi
            )));
        }
        self.prev = Some((u.to_vec(), nu, dt));
        Ok(next)
    }
}

fn initial_values(rho_init: &DensityProfile, params: &Params) -> Vec<f64> {
    let mut u = rho_init.values().to_vec();
    let n = u.len();
    u[0] = params.rho0;
    u[n - 1] = params.rho1;
    u
}

/// Solution at the prescribed strictly increasing `times` (one step per interval).
pub fn burgers_solve_times(rho_init: &DensityProfile, params: &Params, times: &[f64]) -> Result<TimePath> {
    let grid = rho_init.grid();
    let mut u = initial_values(rho_init, params);
    let mut stepper = Stepper::new(*params, grid, &u);
    let mut frames = vec![Profile { grid, values: u.clone() }];
    for w in times.windows(2) {
        u = stepper.step(&u, w[1] - w[0], w[0])?;
        frames.push(Profile { grid, values: u.clone() });
    }
    TimePath::new(grid, times.to_vec(), frames)
}

/// Uniform-step solution on `[0, t_end]`.
pub fn burgers_solve(rho_init: &DensityProfile, params: &Params, t_end: f64, dt: f64) -> Result<TimePath> {
    let h = rho_init.grid().h();
    if dt > h * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, h });
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    burgers_solve_times(rho_init, params, &times)
}

/// Steps growing geometrically from `dt0` to `dt_max`, covering `[0, t_end]`.
pub fn graded_times(dt0: f64, dt_max: f64, growth: f64, t_end: f64) -> Vec<f64> {
    let mut times = vec![0.0];
    let mut dt = dt0;
    let mut t = 0.0;
    while t < t_end {
        t += dt;
        times.push(t);
        dt = (dt * growth).min(dt_max);
    }
    times
}

/// Zero of the semi-discrete right-hand side (Newton from the RK4 stationary profile).
pub fn discrete_steady_state(params: &Params, grid: Grid) -> Result<DensityProfile> {
    let st = stationary_profile(params, grid)?;
    let mut u = st.profile.values().to_vec();
    let n = grid.n();
    let h = grid.h();
    let eps = params.eps;
    let c = eps / (h * h);
    let mut norm = f64::INFINITY;
    let mut converged = 0;
    for _ in 0..50 {
        let adv = advection(&u, h);
        let res: Vec<f64> = (1..n - 1).map(|i| adv[i] + c * (u[i + 1] - 2.0 * u[i] + u[i - 1])).collect();
        norm = res.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        if norm <= 1e-14 * c {
            converged += 1;
        }
        // One extra Newton step once at rounding level.
        if converged == 2 {
            return DensityProfile::new(Profile::new(grid, u)?);
        }
        let a: Vec<f64> = (1..n - 1).map(|i| c + (1.0 - 2.0 * u[i - 1]) / (2.0 * h)).collect();
        let b = vec![-2.0 * c; n - 2];
        let cc: Vec<f64> = (1..n - 1).map(|i| c - (1.0 - 2.0 * u[i + 1]) / (2.0 * h)).collect();
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let du = solve_tridiagonal(&a, &b, &cc, &rhs)?;
        for i in 1..n - 1 {
            u[i] += du[i - 1];
        }
    }
    Err(Error::NonConvergence { what: "discrete_steady_state", iterations: 50, residual: norm })
}

#[derive(Clone, Copy, Debug)]
pub struct RelaxOptions {
    pub dt0: f64,
    /// Capped at `h` by the CFL condition.
    pub dt_max: f64,
    pub growth: f64,
    /// Stop once `‖u - ū_h‖_sup ≤ tol`.
    pub tol: f64,
    pub t_max: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions { dt0: 1e-5, dt_max: 5e-3, growth: 1.02, tol: 1e-6, t_max: 1e3 }
    }
}

/// Graded-step solution until the discrete steady state `ū_h` is reached within `tol`;
/// `ū_h` is appended as the final frame, one diffusive time `1/(επ²)` later.
pub fn burgers_relax(
    rho_init: &DensityProfile,
    params: &Params,
    opts: &RelaxOptions,
) -> Result<(TimePath, DensityProfile)> {
    let grid = rho_init.grid();
    let steady = discrete_steady_state(params, grid)?;
    let dt_max = opts.dt_max.min(grid.h());
    let mut u = initial_values(rho_init, params);
    let mut stepper = Stepper::new(*params, grid, &u);
    let mut times = vec![0.0];
    let mut frames = vec![Profile { grid, values: u.clone() }];
    let mut t = 0.0;
    let mut dt = opts.dt0.min(dt_max);
    loop {
        let dist = crate::grid::sup_distance(&u, steady.values());
        if dist <= opts.tol && times.len() >= 3 {
            break;
        }
        if t >= opts.t_max {
            return Err(Error::NonConvergence { what: "burgers_relax", iterations: times.len(), residual: dist });
        }
        u = stepper.step(&u, dt, t)?;
        t += dt;
        times.push(t);
        frames.push(Profile { grid, values: u.clone() });
        dt = (dt * opts.growth).min(dt_max);
    }
    // The remaining deviation decays on the slowest diffusive time scale 1/(επ²).
    let gap = (1.0 / (params.eps * std::f64::consts::PI.powi(2))).max(dt);
    times.push(t + gap);
    frames.push(steady.base().clone());
    Ok((TimePath::new(grid, times, frames)?, steady))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(n: usize, f: f64) -> (Params, Grid) {
        (Params::with_eps_factor(0.25, 0.75, f).unwrap(), Grid::new(n).unwrap())
    }

    #[test]
    fn discrete_steady_state_is_preserved() {
        let (p, g) = setup(201, 0.3);
        let ss = discrete_steady_state(&p, g).unwrap();
        let path = burgers_solve(&ss, &p, 1.0, 2e-3).unwrap();
        assert!(path.frames.iter().all(|f| f.sup_distance(ss.base()) <= 1e-10));
        let st = stationary_profile(&p, g).unwrap();
        let h = g.h();
        assert!(ss.base().sup_distance(st.profile.base()) <= 10.0 * h * h);
        let path = burgers_solve(&st.profile, &p, 1.0, 2e-3).unwrap();
        assert!(path.frames.iter().all(|f| f.sup_distance(st.profile.base()) <= 10.0 * h * h));
    }

    #[test]
    fn relaxes_exponentially_to_stationary() {
        let (p, g) = setup(101, 0.5);
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.2 * (2.0 * PI * x).sin());
        let ss = discrete_steady_state(&p, g).unwrap();
        let path = burgers_solve(&rho, &p, 12.0, 1e-2).unwrap();
        let dist: Vec<f64> = path.frames.iter().map(|f| f.sup_distance(ss.base())).collect();
        assert!(*dist.last().unwrap() <= 1e-6);
        let tail: Vec<(f64, f64)> = path
            .times
            .iter()
            .zip(&dist)
            .filter(|(t, d)| **t >= 1.0 && **d > 1e-11)
            .map(|(t, d)| (*t, d.ln()))
            .collect();
        let m = tail.len() as f64;
        let (st, sy) = tail.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
        let (tm, ym) = (st / m, sy / m);
        let slope = tail.iter().map(|(t, y)| (t - tm) * (y - ym)).sum::<f64>()
            / tail.iter().map(|(t, _)| (t - tm).powi(2)).sum::<f64>();
        assert!(slope < -0.1, "{slope}");
        let windows: Vec<f64> = dist.chunks(100).map(|c| c.iter().cloned().fold(0.0, f64::max)).collect();
        assert!(windows.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn second_order_in_time() {
        let (p, g) = setup(81, 0.4);
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.2 * (PI * x).sin());
        let run = |dt: f64| burgers_solve(&rho, &p, 0.5, dt).unwrap().last().clone();
        let (a, b, c) = (run(1e-2), run(5e-3), run(2.5e-3));
        let ratio = a.sup_distance(&b) / b.sup_distance(&c);
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn cfl_and_range_checks() {
        let (p, g) = setup(101, 0.5);
        let rho = DensityProfile::constant(g, 0.5).unwrap();
        assert!(matches!(burgers_solve(&rho, &p, 1.0, 0.02), Err(Error::Cfl { .. })));
    }

    #[test]
    fn relax_appends_steady_frame() {
        let (p, g) = setup(101, 0.5);
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.3 + 0.4 * x * x);
        let (path, ss) = burgers_relax(&rho, &p, &RelaxOptions::default()).unwrap();
        assert_eq!(path.last(), ss.base());
        let prev = &path.frames[path.len() - 2];
        assert!(prev.sup_distance(ss.base()) <= 1e-6);
    }
}
