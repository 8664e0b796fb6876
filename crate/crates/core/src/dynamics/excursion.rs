//! Optimal excursion from `ρ̄_ε` to `ρ`.
//!
//! `F` solves the forward Burgers equation from `F₀ = e^φ/(1+e^φ)`, `ψ = s'(F)`, and
//! `v = 1/(1+e^ψ) - εψ_xx/(ψ_x(1-εψ_x))`. The excursion is `u(t) = v(-t)` on `[-T,0]`
//! with control `H(t) = s'(u(t)) - ψ(-t)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{cell_slopes, d2dx2_values, ddx_values, Params, Profile};
use crate::minimization::{quasi_potential, EnumerateOptions, FixedPointResult};
use crate::pointwise::{entropy_prime, g_of_phi, logistic};
use crate::profiles::{DensityProfile, PhiProfile};

use super::{action_of_controlled_path, action_via_elliptic, burgers_relax, RelaxOptions, TimePath};

/// Frames with `ψ_x(1-εψ_x)` below this value are rejected.
pub const DELTA_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct PathOptions {
    pub relax: RelaxOptions,
    /// Largest accepted `el_residual` of the originating fixed point.
    pub el_tol: f64,
    pub exec: Execution,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { relax: RelaxOptions::default(), el_tol: 1e-2, exec: Execution::default() }
    }
}

#[derive(Clone, Debug)]
pub struct PsiPath {
    pub f: TimePath,
    pub psi: TimePath,
    /// Discrete steady state reached by `F`.
    pub steady: DensityProfile,
}

/// `ψ = s'(F)` with `F` the Burgers solution from `e^φ/(1+e^φ)`, run until `F` reaches the
/// discrete steady state.
pub fn psi_path(phi: &PhiProfile, eps: f64, opts: &RelaxOptions) -> Result<PsiPath> {
    let params = phi.params().with_eps(eps)?;
    let f0 = DensityProfile::new(phi.base().map(logistic))?;
    let (f, steady) = burgers_relax(&f0, &params, opts)?;
    let h = f.grid.h();
    let mut frames = Vec::with_capacity(f.len());
    for (k, fr) in f.frames.iter().enumerate() {
        if fr.values.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(Error::Domain(format!("F left (0,1) in frame {k}")));
        }
        let psi = fr.map(entropy_prime);
        if k > 0 {
            let bad = cell_slopes(&psi.values, h).iter().any(|d| !(eps * d > 0.0 && eps * d < 1.0));
            if bad {
                return Err(Error::RangeEscape(format!("eps*psi_x left (0,1) at t = {:.6e}", f.times[k])));
            }
        }
        frames.push(psi);
    }
    let psi = TimePath::new(f.grid, f.times.clone(), frames)?;
    Ok(PsiPath { f, psi, steady })
}

/// `v` of one `ψ` frame, with `v = ρ₀, ρ₁` at the ends; also returns the boundary values
/// the formula itself produces with one-sided differences.
fn reversed_profile(psi: &[f64], params: &Params, eps: f64, h: f64) -> Result<(Vec<f64>, f64)> {
    let d1 = ddx_values(psi, h);
    let d2 = d2dx2_values(psi, h);
    let n = psi.len();
    let formula = |i: usize| -> Result<f64> {
        let den = d1[i] * (1.0 - eps * d1[i]);
        if !(den >= DELTA_GUARD) {
            return Err(Error::RangeEscape(format!("psi_x(1-eps psi_x) = {den:.3e} at node {i}")));
        }
        Ok(g_of_phi(psi[i]) - eps * d2[i] / den)
    };
    let mut v = vec![0.0; n];
    v[0] = params.rho0;
    v[n - 1] = params.rho1;
    for (i, slot) in v.iter_mut().enumerate().take(n - 1).skip(1) {
        *slot = formula(i)?;
    }
    let bdef = match (formula(0), formula(n - 1)) {
        (Ok(a), Ok(b)) => (a - params.rho0).abs().max((b - params.rho1).abs()),
        _ => f64::INFINITY,
    };
    Ok((v, bdef))
}

#[derive(Clone, Debug)]
pub struct Excursion {
    /// `u` on `[-T, 0]`; `u(0)` is the input `ρ` at interior nodes.
    pub u: TimePath,
    /// `H = s'(u) - ψ(-t)`.
    pub control: TimePath,
    /// `‖v(0) - ρ‖_sup` before the final frame is replaced by `ρ`.
    pub reconstruction_error: f64,
    /// Largest `|v(t,x) - ρ_x|` at `x = 0, 1`, `t > 0`, from one-sided differences.
    pub boundary_defect: f64,
    /// `‖ψ(T) - s'(ρ̄_ε)‖_sup` against the RK4 stationary profile before the final frame.
    pub psi_terminal_error: f64,
}

/// Builds the excursion ending at `ρ` from the fixed point `fp` of `K_{ρ,ε}`.
pub fn excursion_path(rho: &DensityProfile, fp: &FixedPointResult, eps: f64, opts: &PathOptions) -> Result<Excursion> {
    if !(fp.el_residual <= opts.el_tol) {
        return Err(Error::Precondition(format!(
            "fixed point el_residual {:.3e} exceeds {:.3e}",
            fp.el_residual, opts.el_tol
        )));
    }
    let params = fp.phi.params().with_eps(eps)?;
    let pp = psi_path(&fp.phi, eps, &opts.relax)?;
    let grid = pp.psi.grid;
    let h = grid.h();
    let m = pp.psi.len();
    let st = crate::stationary::stationary_profile(&params, grid)?;
    let sp: Vec<f64> = st.profile.values().iter().map(|&r| entropy_prime(r)).collect();
    let psi_terminal_error = crate::grid::sup_distance(&pp.psi.frames[m.saturating_sub(2)].values, &sp);

    let mut v_frames = Vec::with_capacity(m);
    let mut boundary_defect: f64 = 0.0;
    for (k, psi) in pp.psi.frames.iter().enumerate() {
        let (v, bdef) = reversed_profile(&psi.values, &params, eps, h)?;
        if let Some(i) = v.iter().position(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::RangeEscape(format!("v = {} at node {i}, frame {k}", v[i])));
        }
        if k > 0 {
            boundary_defect = boundary_defect.max(bdef);
        }
        v_frames.push(Profile { grid, values: v });
    }
    let n = grid.n();
    let r = rho.values();
    let reconstruction_error = crate::grid::sup_distance(&v_frames[0].values[1..n - 1], &r[1..n - 1]);
    // Only the interior is replaced: the path keeps the Dirichlet data at x = 0, 1.
    v_frames[0].values[1..n - 1].copy_from_slice(&r[1..n - 1]);

    let v_path = TimePath::new(grid, pp.psi.times.clone(), v_frames)?;
    let u = v_path.reversed();
    let psi_rev = pp.psi.reversed();
    let mut controls = Vec::with_capacity(m);
    for (k, (uf, pf)) in u.frames.iter().zip(&psi_rev.frames).enumerate() {
        let mut hv: Vec<f64> = uf.values.iter().zip(&pf.values).map(|(&a, &b)| entropy_prime(a) - b).collect();
        let n = hv.len();
        if hv[0].abs() > 1e-9 || hv[n - 1].abs() > 1e-9 {
            return Err(Error::Invariant(format!("control does not vanish at the boundary in frame {k}")));
        }
        hv[0] = 0.0;
        hv[n - 1] = 0.0;
        controls.push(Profile { grid, values: hv });
    }
    let control = TimePath::new(grid, u.times.clone(), controls)?;
    Ok(Excursion { u, control, reconstruction_error, boundary_defect, psi_terminal_error })
}

/// Static/dynamic comparison for one minimizer.
#[derive(Clone, Debug, Serialize)]
pub struct ExcursionCheck {
    pub g_value: f64,
    /// `𝒢_ε(ρ,φ) - S°_ε(ρ̄_ε)`.
    pub static_value: f64,
    pub action_control: f64,
    pub action_elliptic: f64,
    /// `|action_control - S_ε| / max(1, S_ε)`.
    pub gap_control: f64,
    pub gap_elliptic: f64,
    /// Relative disagreement between the two action routes.
    pub control_vs_elliptic: f64,
    pub reconstruction_error: f64,
    pub boundary_defect: f64,
    pub frames: usize,
    pub horizon: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StaticDynamicReport {
    pub eps: f64,
    pub s_eps: f64,
    pub n_minimizers: usize,
    pub checks: Vec<ExcursionCheck>,
    pub max_rel_gap: f64,
}

/// Relative difference with an absolute floor of `1e-8` for near-zero actions.
pub(crate) fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale <= 1e-8 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Builds the excursion of every minimizer of `𝒢_ε(ρ,·)` and compares both action routes
/// with `S_ε(ρ)`.
pub fn verify_static_dynamic(
    rho: &DensityProfile,
    params: &Params,
    enum_opts: &EnumerateOptions,
    path_opts: &PathOptions,
) -> Result<StaticDynamicReport> {
    let qp = quasi_potential(rho, params, enum_opts)?;
    let eps = params.eps;
    let s_eps = qp.s_eps;
    let mut checks = Vec::new();
    for fp in qp.minimizers() {
        let ex = excursion_path(rho, fp, eps, path_opts)?;
        let static_value = fp.g_value - qp.s_naught_stationary;
        let ac = action_of_controlled_path(&ex.u, &ex.control, eps)?.with_static(static_value);
        let ae = action_via_elliptic(&ex.u, eps, path_opts.exec)?.with_static(static_value);
        let denom = s_eps.abs().max(1.0);
        checks.push(ExcursionCheck {
            g_value: fp.g_value,
            static_value,
            action_control: ac.action,
            action_elliptic: ae.action,
            gap_control: (ac.action - s_eps).abs() / denom,
            gap_elliptic: (ae.action - s_eps).abs() / denom,
            control_vs_elliptic: relative_difference(ac.action, ae.action),
            reconstruction_error: ex.reconstruction_error,
            boundary_defect: ex.boundary_defect,
            frames: ex.u.len(),
            horizon: ex.u.t1 - ex.u.t0,
        });
    }
    let max_rel_gap =
        checks.iter().map(|c| c.gap_control.max(c.gap_elliptic).max(c.control_vs_elliptic)).fold(0.0, f64::max);
    Ok(StaticDynamicReport { eps, s_eps, n_minimizers: qp.n_minimizers, checks, max_rel_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::minimization::{picard, PicardOptions};
    use std::f64::consts::PI;

    #[test]
    fn stationary_excursion_is_trivial() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        let g = Grid::new(401).unwrap();
        let rep = verify_static_dynamic(
            &crate::stationary::stationary_profile(&p, g).unwrap().profile,
            &p,
            &EnumerateOptions::default(),
            &PathOptions::default(),
        )
        .unwrap();
        assert!(rep.s_eps.abs() <= 1e-8);
        for c in &rep.checks {
            assert!(c.action_control <= 1e-8 && c.action_elliptic <= 1e-8, "{c:?}");
        }
    }

    #[test]
    fn psi_path_is_stationary_from_steady_state() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        let g = Grid::new(101).unwrap();
        let ss = crate::dynamics::discrete_steady_state(&p, g).unwrap();
        let phi = PhiProfile::new(ss.base().map(entropy_prime), p).unwrap();
        let pp = psi_path(&phi, p.eps, &RelaxOptions::default()).unwrap();
        assert!(pp.psi.frames.iter().all(|f| f.sup_distance(phi.base()) <= 1e-10));
    }

    #[test]
    fn excursion_reconstructs_density_to_second_order() {
        let errs: Vec<f64> = [101usize, 201]
            .iter()
            .map(|&n| {
                let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
                let g = Grid::new(n).unwrap();
                let rho = DensityProfile::from_fn_clipped(g, |x| 0.25 + 0.5 * x + 0.15 * (2.0 * PI * x).sin());
                let fp = picard(&rho, &PhiProfile::affine(p, g), p.eps, &PicardOptions::default()).unwrap();
                let ex = excursion_path(&rho, &fp, p.eps, &PathOptions::default()).unwrap();
                assert_eq!(&ex.u.last().values[1..n - 1], &rho.values()[1..n - 1]);
                assert!(ex.u.frames.iter().all(|f| f.first() == p.rho0 && f.last() == p.rho1));
                assert!(ex.psi_terminal_error <= 1e-4);
                assert!(ex.boundary_defect <= 0.1, "{}", ex.boundary_defect);
                ex.reconstruction_error
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((3.0..5.0).contains(&ratio), "{errs:?}");
    }
}
