//! Stationary current `J_ε` and stationary profile `ρ̄_ε` of the viscous Burgers equation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, Params, Profile};
use crate::pointwise::flux;
use crate::profiles::DensityProfile;

#[derive(Clone, Debug)]
pub struct StationaryResult {
    pub params: Params,
    pub j_eps: f64,
    pub j0: f64,
    pub profile: DensityProfile,
}

/// Summary written next to the profile CSV.
#[derive(Clone, Debug, Serialize)]
pub struct StationarySummary {
    pub j_eps: f64,
    pub j0: f64,
    pub eps: f64,
    pub eps0: f64,
    pub eps_factor: f64,
    pub endpoint_defect: f64,
}

impl StationaryResult {
    pub fn endpoint_defect(&self) -> f64 {
        (self.profile.base().last() - self.params.rho1).abs()
    }

    pub fn summary(&self) -> StationarySummary {
        StationarySummary {
            j_eps: self.j_eps,
            j0: self.j0,
            eps: self.params.eps,
            eps0: self.params.eps0,
            eps_factor: self.params.eps_factor(),
            endpoint_defect: self.endpoint_defect(),
        }
    }

    /// `max_i |f(ρ̄) - ε ddx(ρ̄) - J_ε|`.
    pub fn residual(&self) -> f64 {
        let d = crate::grid::ddx(self.profile.base());
        self.profile
            .values()
            .iter()
            .zip(&d.values)
            .map(|(&r, &dr)| (flux(r) - self.params.eps * dr - self.j_eps).abs())
            .fold(0.0, f64::max)
    }
}

/// `J₀ = min_{[ρ₀,ρ₁]} f`, attained at an endpoint by concavity.
pub fn current_bound(params: &Params) -> f64 {
    flux(params.rho0).min(flux(params.rho1))
}

/// `∫_{ρ₀}^{ρ₁} ε/(f(r) - J) dr` with `J = J₀ - δ`, in closed form.
///
/// `f(r) - J = D - (r-½)²` with `D = ¼ - J`, so the integral is
/// `(ε/2√D)[log((√D+a)/(√D-a))]` over `a = r - ½`.
pub fn current_integral(params: &Params, delta: f64) -> f64 {
    let j0 = current_bound(params);
    let d = 0.25 - j0 + delta;
    let sd = d.sqrt();
    let term = |r: f64| {
        let a = r - 0.5;
        let gap = (flux(r) - j0) + delta;
        if a >= 0.0 {
            ((sd + a) * (sd + a) / gap).ln()
        } else {
            (gap / ((sd - a) * (sd - a))).ln()
        }
    };
    params.eps / (2.0 * sd) * (term(params.rho1) - term(params.rho0))
}

/// `J_ε` with `|∫ ε/(f-J) - 1| ≤ tol`, by bisection on `log(J₀ - J)`.
pub fn solve_current(params: &Params, tol: f64) -> Result<f64> {
    Ok(current_bound(params) - solve_current_gap(params, tol)?)
}

/// `J₀ - J_ε`, kept separately because it can be far below the resolution of `J₀`.
pub fn solve_current_gap(params: &Params, tol: f64) -> Result<f64> {
    let mut lo = 1e-300f64.ln();
    if current_integral(params, lo.exp()) < 1.0 {
        return Err(Error::Bracket(format!(
            "viscosity {} too small: integral stays below 1 at J0 - 1e-300",
            params.eps
        )));
    }
    let mut hi = (params.eps * (params.rho1 - params.rho0) * 1e3).ln();
    let mut expansions = 0;
    while current_integral(params, hi.exp()) >= 1.0 {
        hi += 10f64.ln();
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Bracket("could not bracket the stationary current".into()));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let val = current_integral(params, mid.exp()) - 1.0;
        if val.abs() <= tol || hi - lo < 1e-15 {
            break;
        }
        if val > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid.exp())
}

/// Default tolerance for the current equation.
pub const CURRENT_TOL: f64 = 1e-13;

/// Integrates `ρ' = (f(ρ) - J_ε)/ε` from `ρ(0) = ρ₀` with RK4.
pub fn stationary_profile(params: &Params, grid: Grid) -> Result<StationaryResult> {
    let j0 = current_bound(params);
    let delta = solve_current_gap(params, CURRENT_TOL)?;
    let j = j0 - delta;
    let eps = params.eps;
    let rhs = |r: f64| ((flux(r) - j0) + delta) / eps;
    let h = grid.h();
    let sub = ((h / (10.0 * eps)).ceil() as usize).max(4);
    let dx = h / sub as f64;
    let n = grid.n();
    let mut values = vec![params.rho0; n];
    let mut r = params.rho0;
    for (i, slot) in values.iter_mut().enumerate().skip(1) {
        for _ in 0..sub {
            let k1 = rhs(r);
            let k2 = rhs(r + 0.5 * dx * k1);
            let k3 = rhs(r + 0.5 * dx * k2);
            let k4 = rhs(r + dx * k3);
            r += dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if !(0.0..=1.0).contains(&r) || !r.is_finite() {
            return Err(Error::BlowUp(format!("stationary profile left [0,1] at node {i}")));
        }
        *slot = r;
    }
    let profile = DensityProfile::new(Profile::new(grid, values)?)?;
    Ok(StationaryResult { params: *params, j_eps: j, j0, profile })
}

/// Inviscid stationary profile: constant `ρ₀`, constant `ρ₁`, or a shock at `x = 1/2`.
pub fn inviscid_stationary(params: &Params, grid: Grid) -> DensityProfile {
    let drift = 1.0 - (params.rho0 + params.rho1);
    let values = if drift.abs() <= 1e-12 {
        grid.nodes().iter().map(|&x| if x < 0.5 { params.rho0 } else { params.rho1 }).collect()
    } else if drift > 0.0 {
        vec![params.rho0; grid.n()]
    } else {
        vec![params.rho1; grid.n()]
    };
    DensityProfile::new(Profile { grid, values }).expect("boundary data lie in (0,1)")
}
