//! Densities with two inviscid minimizers and the coexistence function
//! `g_ε(α) = inf_{ℱ⁺} 𝒢_ε(ρ + αλ,·) - inf_{ℱ⁻} 𝒢_ε(ρ + αλ,·)`.
//!
//! `ℱ⁻` holds the potentials with at least half of the increase on `[0,y₀]`, i.e.
//! `φ(y₀) ≥ φ̄`; `ℱ⁺` those with `φ(y₀) ≤ φ̄`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::grid::{partial_integral, trapezoid, Grid, Params, Profile};
use crate::minimization::{gradient_flow, FixedPointKind, FixedPointResult, FixedPointSummary, FlowOptions, Method};
use crate::profiles::{DensityProfile, PhiProfile};

use super::{thresholds, Thresholds};

/// Balanced density `A + amplitude·w` with `ρ(y₋) = ρ(y₀) = ρ(y₊) = A`.
#[derive(Clone, Debug)]
pub struct TestDensity {
    pub rho: DensityProfile,
    pub params: Params,
    pub thresholds: Thresholds,
    /// Node-snapped positions.
    pub y_minus: f64,
    pub y0: f64,
    pub y_plus: f64,
    pub amplitude: f64,
    /// Factor applied to the negative lobe on `(y₀,y₊)` to balance the integral.
    pub lobe_scale: f64,
    /// `∫_{y₋}^{y₊} ρ - A(y₊-y₋)`.
    pub balance_defect: f64,
}

fn lobe(x: f64, a: f64, b: f64) -> f64 {
    (std::f64::consts::PI * (x - a) / (b - a)).sin()
}

fn quarter(t: f64) -> f64 {
    (0.5 * std::f64::consts::PI * t).sin()
}

/// Builds the piecewise-sine test density on `grid`; the three positions are snapped to nodes.
pub fn build_test_density(
    params: &Params,
    grid: Grid,
    y_minus: f64,
    y0: f64,
    y_plus: f64,
    amplitude: f64,
) -> Result<TestDensity> {
    let th = thresholds(params);
    let cap = (th.a - th.a_minus).min(th.a_plus - th.a);
    if !(amplitude > 0.0 && amplitude < cap) {
        return Err(Error::Domain(format!("amplitude {amplitude} must lie in (0, {cap})")));
    }
    if !(0.0 <= y_minus && y_minus < y0 && y0 < y_plus && y_plus <= 1.0) {
        return Err(Error::Domain("need 0 <= y- < y0 < y+ <= 1".into()));
    }
    let (km, k0, kp) = (grid.nearest(y_minus), grid.nearest(y0), grid.nearest(y_plus));
    if !(km < k0 && k0 < kp) {
        return Err(Error::Domain("grid too coarse to separate y-, y0, y+".into()));
    }
    let (ym, yz, yp) = (grid.x(km), grid.x(k0), grid.x(kp));
    let n = grid.n();
    let mut w: Vec<f64> = (0..n)
        .map(|i| {
            let x = grid.x(i);
            if i < km {
                -quarter((ym - x) / ym)
            } else if i < k0 {
                lobe(x, ym, yz)
            } else if i < kp {
                -lobe(x, yz, yp)
            } else {
                quarter((x - yp) / (1.0 - yp))
            }
        })
        .collect();
    for k in [km, k0, kp] {
        w[k] = 0.0;
    }
    let h = grid.h();
    let pos = trapezoid(&w[km..=k0], h);
    let neg = -trapezoid(&w[k0..=kp], h);
    let lobe_scale = pos / neg;
    for v in &mut w[k0..=kp] {
        *v *= lobe_scale;
    }
    let values: Vec<f64> = w.iter().map(|v| th.a + amplitude * v).collect();
    for (i, &r) in values.iter().enumerate().take(kp + 1).skip(km) {
        if !(r > th.a_minus && r < th.a_plus) {
            return Err(Error::Domain(format!("balanced density leaves (A-, A+) at x = {}: {r}", grid.x(i))));
        }
    }
    let rho = DensityProfile::new(Profile { grid, values })?;
    let balance_defect = partial_integral(rho.base(), yp) - partial_integral(rho.base(), ym) - th.a * (yp - ym);
    let out = TestDensity {
        rho,
        params: *params,
        thresholds: th,
        y_minus: ym,
        y0: yz,
        y_plus: yp,
        amplitude,
        lobe_scale,
        balance_defect,
    };
    check_sign_pattern(&out)?;
    Ok(out)
}

fn check_sign_pattern(t: &TestDensity) -> Result<()> {
    let g = t.rho.grid();
    let a = t.thresholds.a;
    for (i, &r) in t.rho.values().iter().enumerate() {
        let x = g.x(i);
        let ok = if x == t.y_minus || x == t.y0 || x == t.y_plus {
            (r - a).abs() <= 1e-12
        } else if x < t.y_minus || (x > t.y0 && x < t.y_plus) {
            r < a
        } else {
            r > a
        };
        if !ok {
            return Err(Error::Invariant(format!("sign pattern violated at x = {x}: rho = {r}")));
        }
    }
    Ok(())
}

/// `1 - cos` bump on `(a,b)` with unit trapezoid integral.
pub fn raised_cosine(grid: Grid, a: f64, b: f64) -> Profile {
    let raw = Profile::from_fn(grid, |x| {
        if x > a && x < b {
            1.0 - (2.0 * std::f64::consts::PI * (x - a) / (b - a)).cos()
        } else {
            0.0
        }
    });
    let mass = trapezoid(&raw.values, grid.h());
    raw.map(|v| v / mass)
}

/// Half of the largest `|α|` keeping `ρ + αλ` inside the sign pattern and the `A±` band.
pub fn default_delta(test: &TestDensity, lambda: &Profile) -> f64 {
    let th = &test.thresholds;
    let mut amax = f64::INFINITY;
    for (&r, &l) in test.rho.values().iter().zip(&lambda.values) {
        if l > 0.0 {
            amax = amax.min((r - th.a) / l).min((th.a_plus - r) / l);
        }
    }
    0.5 * amax
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Half {
    Minus,
    Plus,
}

impl Half {
    fn contains(self, phi: &PhiProfile, y0: f64, phibar: f64) -> bool {
        let v = phi.at(y0);
        match self {
            Half::Minus => v >= phibar - 1e-12,
            Half::Plus => v <= phibar + 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransitionOptions {
    pub flow: FlowOptions,
    /// Sup-distance under which the two restricted minimizers are declared equal.
    pub dedup_tol: f64,
    /// Target `|g_ε(α₀)|`.
    pub root_tol: f64,
    pub max_bisections: usize,
    /// Seed mollification width in units of `ε`.
    pub seed_width: f64,
    /// Re-solve with `φ(y₀) = φ̄` pinned when a seeded run leaves its half.
    pub fallback: bool,
    pub exec: Execution,
}

impl Default for TransitionOptions {
    fn default() -> Self {
        TransitionOptions {
            flow: FlowOptions::default(),
            dedup_tol: 1e-4,
            root_tol: 1e-8,
            max_bisections: 200,
            seed_width: 2.0,
            fallback: true,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestrictedMinimum {
    pub half: Half,
    pub fp: FixedPointResult,
    /// The seeded run left its half and the pinned fallback was used.
    pub escaped: bool,
}

/// `inf_{ℱ±} 𝒢_ε(ρ,·)` by a gradient flow seeded at the mollified step `φ*±`.
pub fn restricted_minimum(
    rho: &DensityProfile,
    test: &TestDensity,
    half: Half,
    eps: f64,
    opts: &TransitionOptions,
) -> Result<RestrictedMinimum> {
    let p = test.params;
    let grid = rho.grid();
    let y = match half {
        Half::Minus => test.y_minus,
        Half::Plus => test.y_plus,
    };
    let seed = PhiProfile::mollified_step(p, grid, y, opts.seed_width * eps, eps);
    let (fp, _) = gradient_flow(rho, &seed, eps, &opts.flow)?;
    if half.contains(&fp.phi, test.y0, test.thresholds.phibar) {
        return Ok(RestrictedMinimum { half, fp, escaped: false });
    }
    if !opts.fallback {
        return Err(Error::BasinEscape(format!(
            "{half:?} seed converged to phi(y0) = {} on the other side of {}",
            fp.phi.at(test.y0),
            test.thresholds.phibar
        )));
    }
    let pinned_seed = PhiProfile::mollified_step(p, grid, test.y0, opts.seed_width * eps, eps);
    let flow = FlowOptions { pin: Some((test.y0, test.thresholds.phibar)), ..opts.flow };
    let (fp, _) = gradient_flow(rho, &pinned_seed, eps, &flow)?;
    Ok(RestrictedMinimum { half, fp, escaped: true })
}

#[derive(Clone, Debug)]
pub struct GAlpha {
    pub alpha: f64,
    pub value: f64,
    pub plus: RestrictedMinimum,
    pub minus: RestrictedMinimum,
}

/// `g_ε(α)` for `ρ^{(α)} = ρ + αλ`.
pub fn g_alpha(test: &TestDensity, lambda: &Profile, alpha: f64, eps: f64, opts: &TransitionOptions) -> Result<GAlpha> {
    let rho = DensityProfile::new(test.rho.base().zip_map(lambda, |r, l| r + alpha * l))?;
    let halves = [Half::Plus, Half::Minus];
    let mut runs = exec::map(opts.exec, &halves, |&h| restricted_minimum(&rho, test, h, eps, opts)).into_iter();
    let plus = runs.next().expect("two halves")?;
    let minus = runs.next().expect("two halves")?;
    Ok(GAlpha { alpha, value: plus.fp.g_value - minus.fp.g_value, plus, minus })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub eps: f64,
    pub eps_factor: f64,
    pub delta: f64,
    pub alpha0: f64,
    /// Width of the final bisection bracket around `alpha0`.
    pub alpha_bracket: f64,
    pub g_at_alpha0: f64,
    pub g_minus_delta: f64,
    pub g_plus_delta: f64,
    /// `(α, g_ε(α))` for every evaluation, sorted by `α`.
    pub g_trace: Vec<(f64, f64)>,
    #[serde(skip)]
    pub minimizer_pair: (FixedPointResult, FixedPointResult),
    pub pair_summary: (FixedPointSummary, FixedPointSummary),
    /// Sup-distance between the `ℱ⁺` and `ℱ⁻` minimizers at `alpha0`.
    pub separation: f64,
    /// Number of restricted solves that needed the pinned fallback.
    pub escapes: usize,
}

impl TransitionReport {
    /// Members of the pair that are genuine local minimizers (not pinned, not saddles).
    pub fn n_minimizers(&self, dedup_tol: f64) -> usize {
        let good = |f: &FixedPointResult| f.method != Method::Constrained && f.kind != FixedPointKind::Saddle;
        let (a, b) = &self.minimizer_pair;
        match (good(a), good(b)) {
            (true, true) if self.separation >= dedup_tol => 2,
            (false, false) => 0,
            _ => 1,
        }
    }
}

pub(crate) fn bracket(
    test: &TestDensity,
    lambda: &Profile,
    delta: f64,
    eps: f64,
    opts: &TransitionOptions,
) -> Result<(GAlpha, GAlpha)> {
    let inner = TransitionOptions { exec: Execution::Sequential, ..*opts };
    let mut ends = exec::map(opts.exec, &[-delta, delta], |&a| g_alpha(test, lambda, a, eps, &inner)).into_iter();
    let lo = ends.next().expect("two ends")?;
    let hi = ends.next().expect("two ends")?;
    Ok((lo, hi))
}

pub(crate) fn bisect(
    test: &TestDensity,
    lambda: &Profile,
    delta: f64,
    eps: f64,
    opts: &TransitionOptions,
    lo: GAlpha,
    hi: GAlpha,
) -> Result<TransitionReport> {
    if !(lo.value < 0.0 && hi.value > 0.0) {
        return Err(Error::Bracket(format!("g(-{delta:.3e}) = {:.3e}, g({delta:.3e}) = {:.3e}", lo.value, hi.value)));
    }
    let (g_lo, g_hi) = (lo.value, hi.value);
    let mut escapes = [&lo, &hi].iter().map(|g| g.plus.escaped as usize + g.minus.escaped as usize).sum();
    let mut trace = vec![(lo.alpha, lo.value), (hi.alpha, hi.value)];
    let (mut a, mut b) = (lo.alpha, hi.alpha);
    let mut best = if g_hi.abs() < g_lo.abs() { hi } else { lo };
    let mut iterations = 0;
    while best.value.abs() > opts.root_tol {
        if iterations >= opts.max_bisections || b - a <= 4.0 * f64::EPSILON * delta {
            return Err(Error::NonConvergence { what: "find_transition", iterations, residual: best.value.abs() });
        }
        let mid = 0.5 * (a + b);
        let gm = g_alpha(test, lambda, mid, eps, opts)?;
        escapes += gm.plus.escaped as usize + gm.minus.escaped as usize;
        trace.push((mid, gm.value));
        if gm.value < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        best = gm;
        iterations += 1;
    }
    trace.sort_by(|x, y| x.0.total_cmp(&y.0));
    let separation = best.plus.fp.phi.sup_distance(&best.minus.fp.phi);
    if separation < opts.dedup_tol {
        return Err(Error::Invariant(format!(
            "restricted minimizers coincide at alpha0 = {} (separation {separation:.3e})",
            best.alpha
        )));
    }
    let params = test.params;
    Ok(TransitionReport {
        eps,
        eps_factor: eps / params.eps0,
        delta,
        alpha0: best.alpha,
        alpha_bracket: b - a,
        g_at_alpha0: best.value,
        g_minus_delta: g_lo,
        g_plus_delta: g_hi,
        g_trace: trace,
        pair_summary: (best.plus.fp.summary(), best.minus.fp.summary()),
        minimizer_pair: (best.plus.fp, best.minus.fp),
        separation,
        escapes,
    })
}

/// Bisection for `g_ε(α₀) = 0` on `[-δ, δ]`.
pub fn find_transition(
    test: &TestDensity,
    lambda: &Profile,
    delta: f64,
    eps: f64,
    opts: &TransitionOptions,
) -> Result<TransitionReport> {
    let (lo, hi) = bracket(test, lambda, delta, eps, opts)?;
    bisect(test, lambda, delta, eps, opts, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inviscid::{minimize_inviscid, InviscidOptions};

    fn default_test(p: &Params, n: usize) -> TestDensity {
        let th = thresholds(p);
        let amp = 0.6 * (th.a - th.a_minus).min(th.a_plus - th.a);
        build_test_density(p, Grid::new(n).unwrap(), 0.25, 0.5, 0.75, amp).unwrap()
    }

    #[test]
    fn test_density_is_pinned_and_balanced() {
        let p = Params::new(0.25, 0.75, 0.1).unwrap();
        let t = default_test(&p, 201);
        for y in [t.y_minus, t.y0, t.y_plus] {
            assert!((t.rho.base().interpolate(y) - t.thresholds.a).abs() <= 1e-12);
        }
        assert!(t.balance_defect.abs() <= 1e-12);
        let m = minimize_inviscid(&t.rho, &p, &InviscidOptions::default());
        assert_eq!(m.argmins.len(), 2, "{:?}", m.argmins);
        assert!((m.argmins[0] - t.y_minus).abs() < 1e-6);
        assert!((m.argmins[1] - t.y_plus).abs() < 1e-6);
    }

    #[test]
    fn extremal_dominance() {
        let p = Params::new(0.3, 0.8, 0.1).unwrap();
        let t = default_test(&p, 201);
        let gv = |y: f64| crate::functionals::g_tilde(&t.rho, &p, y);
        let floor = gv(t.y_minus).max(gv(t.y_plus));
        for k in 0..=2000 {
            let y = k as f64 / 2000.0;
            if (y - t.y_minus).abs() > 1e-3 && (y - t.y_plus).abs() > 1e-3 {
                assert!(gv(y) > floor, "y = {y}");
            }
        }
    }

    #[test]
    fn perturbation_selects_one_minimizer() {
        let p = Params::new(0.25, 0.75, 0.1).unwrap();
        let t = default_test(&p, 201);
        let g = t.rho.grid();
        let bump = Profile::from_fn(g, |x| if x > t.y_minus && x < t.y0 { 0.01 } else { 0.0 });
        let rho = DensityProfile::new(t.rho.base().zip_map(&bump, |a, b| a + b)).unwrap();
        let m = minimize_inviscid(&rho, &p, &InviscidOptions::default());
        assert_eq!(m.argmins.len(), 1);
        assert!((m.argmins[0] - t.y_minus).abs() < 1e-6);
    }

    #[test]
    fn infeasible_amplitude_rejected() {
        let p = Params::new(0.25, 0.75, 0.1).unwrap();
        let g = Grid::new(101).unwrap();
        assert!(build_test_density(&p, g, 0.25, 0.5, 0.75, 0.2).is_err());
        // A short negative lobe is pushed below A- by the balance.
        assert!(build_test_density(&p, g, 0.05, 0.5, 0.55, 0.12).is_err());
    }

    #[test]
    fn bump_is_normalized_and_supported() {
        let g = Grid::new(101).unwrap();
        let l = raised_cosine(g, 0.25, 0.5);
        assert!((trapezoid(&l.values, g.h()) - 1.0).abs() < 1e-14);
        assert!(l.values.iter().zip(g.nodes()).all(|(v, x)| (*v > 0.0) == (x > 0.25 && x < 0.5)));
    }

    #[test]
    fn g_alpha_signs_and_slope_at_small_eps() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.05).unwrap();
        let t = default_test(&p, 201);
        let lam = raised_cosine(t.rho.grid(), t.y_minus, t.y0);
        let d = default_delta(&t, &lam);
        let opts = TransitionOptions { fallback: false, ..Default::default() };
        let gp = g_alpha(&t, &lam, d, p.eps, &opts).unwrap();
        let gm = g_alpha(&t, &lam, -d, p.eps, &opts).unwrap();
        assert!(gp.value > 0.0 && gm.value < 0.0, "{} {}", gp.value, gm.value);
        let slope = (gp.value - gm.value) / (2.0 * d);
        assert!(slope > 0.5 * p.dphi() && slope < 1.01 * p.dphi(), "{slope}");
        // Lipschitz bound |dg/dα| <= (φ₁-φ₀)·|λ|₁.
        let g0 = g_alpha(&t, &lam, 0.0, p.eps, &opts).unwrap();
        assert!((gp.value - g0.value).abs() <= p.dphi() * d * (1.0 + 1e-9));
        assert!((g0.value - gm.value).abs() <= p.dphi() * d * (1.0 + 1e-9));
    }

    #[test]
    fn restricted_values_bound_the_global_minimum() {
        let p = Params::with_eps_factor(0.3, 0.8, 0.05).unwrap();
        let t = default_test(&p, 201);
        let lam = raised_cosine(t.rho.grid(), t.y_minus, t.y0);
        let a = 0.5 * default_delta(&t, &lam);
        let ga = g_alpha(&t, &lam, a, p.eps, &TransitionOptions::default()).unwrap();
        let rho = DensityProfile::new(t.rho.base().zip_map(&lam, |r, l| r + a * l)).unwrap();
        let bank = crate::minimization::SeedBank::standard(&p, &rho, 1e-6).unwrap();
        let fps = crate::minimization::enumerate_fixed_points(&rho, p.eps, &bank, &Default::default()).unwrap();
        let restricted = ga.plus.fp.g_value.min(ga.minus.fp.g_value);
        assert!((restricted - fps[0].g_value).abs() <= 1e-4, "{restricted} {}", fps[0].g_value);
    }

    #[test]
    fn transition_found_in_bistable_regime() {
        let p = Params::with_eps_factor(0.3, 0.8, 0.05).unwrap();
        let t = default_test(&p, 201);
        let lam = raised_cosine(t.rho.grid(), t.y_minus, t.y0);
        let d = default_delta(&t, &lam);
        let rep = find_transition(&t, &lam, d, p.eps, &TransitionOptions::default()).unwrap();
        assert!(rep.g_at_alpha0.abs() <= 1e-8);
        assert!(rep.alpha0.abs() < d);
        let (a, b) = &rep.minimizer_pair;
        assert!((a.g_value - b.g_value).abs() <= 1e-8);
        assert!(rep.separation >= 0.1 * p.dphi());
        assert_eq!(rep.n_minimizers(1e-4), 2);
        assert!(rep.g_trace.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn symmetric_construction_has_root_at_zero() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.05).unwrap();
        let t = default_test(&p, 201);
        let lam = raised_cosine(t.rho.grid(), t.y_minus, t.y0);
        let rep = find_transition(&t, &lam, default_delta(&t, &lam), p.eps, &TransitionOptions::default()).unwrap();
        assert!(rep.alpha0.abs() <= 1e-8, "{}", rep.alpha0);
    }

    #[test]
    fn single_minimizer_regime_reports_coincidence() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.1).unwrap();
        let t = default_test(&p, 101);
        let lam = raised_cosine(t.rho.grid(), t.y_minus, t.y0);
        let r = find_transition(&t, &lam, default_delta(&t, &lam), p.eps, &TransitionOptions::default());
        assert!(matches!(r, Err(Error::Invariant(_))), "{r:?}");
        let strict = TransitionOptions { fallback: false, ..Default::default() };
        let r = g_alpha(&t, &lam, default_delta(&t, &lam), p.eps, &strict);
        assert!(matches!(r, Err(Error::BasinEscape(_))));
    }
}
