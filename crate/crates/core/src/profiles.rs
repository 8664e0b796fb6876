//! Typed grid functions: densities `ρ ∈ M`, potentials `φ ∈ ℱ` and momenta.

use crate::error::{Error, Result};
use crate::grid::{cell_slopes, Grid, Params, Profile};
use crate::pointwise::{entropy_prime, logistic};

/// Density with values in [0,1].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile(Profile);

impl DensityProfile {
    pub fn new(base: Profile) -> Result<Self> {
        if let Some((i, v)) = base.values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("density value {v} at node {i} is outside [0,1]")));
        }
        Ok(DensityProfile(base))
    }

    /// Evaluates `f` on the grid and clips into [0,1].
    pub fn from_fn_clipped(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        DensityProfile(Profile::from_fn(grid, |x| f(x).clamp(0.0, 1.0)))
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        DensityProfile::new(Profile::constant(grid, c))
    }

    pub fn base(&self) -> &Profile {
        &self.0
    }

    pub fn into_base(self) -> Profile {
        self.0
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn grid(&self) -> Grid {
        self.0.grid
    }

    /// True when every value lies in `[margin, 1 - margin]`.
    pub fn is_interior(&self, margin: f64) -> bool {
        self.values().iter().all(|&v| v >= margin && v <= 1.0 - margin)
    }
}

/// Monotone potential with `φ(0) ≥ φ₀`, `φ(1) = φ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiProfile {
    base: Profile,
    params: Params,
}

/// Tolerance used when validating boundary values and monotonicity.
pub const PHI_TOL: f64 = 1e-8;

impl PhiProfile {
    pub fn new(base: Profile, params: Params) -> Result<Self> {
        let v = &base.values;
        let n = v.len();
        if (v[n - 1] - params.phi1).abs() > PHI_TOL {
            return Err(Error::Domain(format!("phi(1) = {} differs from phi1 = {}", v[n - 1], params.phi1)));
        }
        if v[0] < params.phi0 - PHI_TOL {
            return Err(Error::Domain(format!("phi(0) = {} is below phi0 = {}", v[0], params.phi0)));
        }
        if let Some(i) = (0..n - 1).find(|&i| v[i + 1] < v[i] - PHI_TOL) {
            return Err(Error::Domain(format!("phi decreases between nodes {i} and {}", i + 1)));
        }
        Ok(PhiProfile { base, params })
    }

    pub(crate) fn new_unchecked(base: Profile, params: Params) -> Self {
        PhiProfile { base, params }
    }

    /// `φ₀ + x/ε₀`.
    pub fn affine(params: Params, grid: Grid) -> Self {
        let dphi = params.dphi();
        let mut base = Profile::from_fn(grid, |x| params.phi0 + dphi * x);
        let n = grid.n();
        base.values[n - 1] = params.phi1;
        PhiProfile { base, params }
    }

    /// Extremal step `φ^{(y)} = φ₀ 1_{[0,y)} + φ₁ 1_{[y,1]}` sampled at nodes.
    pub fn step(params: Params, grid: Grid, y: f64) -> Self {
        let mut base = Profile::from_fn(grid, |x| if x < y { params.phi0 } else { params.phi1 });
        let n = grid.n();
        base.values[n - 1] = params.phi1;
        PhiProfile { base, params }
    }

    /// `s'(ρ)` for an interior density, projected into the admissible set for `eps`.
    pub fn from_density(params: Params, rho: &DensityProfile, margin: f64, eps: f64) -> Self {
        let v: Vec<f64> = rho.values().iter().map(|&r| entropy_prime(r.clamp(margin, 1.0 - margin))).collect();
        project_admissible(params, rho.grid(), &v, eps)
    }

    /// Step at `y` convolved with a C² bump of half-width `width`, boundary values re-pinned
    /// and projected onto `0 ≤ εφ_x ≤ 1`.
    pub fn mollified_step(params: Params, grid: Grid, y: f64, width: f64, eps: f64) -> Self {
        let raw: Vec<f64> =
            grid.nodes().iter().map(|&x| params.phi0 + params.dphi() * smooth_heaviside((x - y) / width)).collect();
        project_admissible(params, grid, &raw, eps)
    }

    pub fn base(&self) -> &Profile {
        &self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.base.values
    }

    pub fn grid(&self) -> Grid {
        self.base.grid
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// Cell slopes `φ_x` on the `n-1` cells.
    pub fn slopes(&self) -> Vec<f64> {
        cell_slopes(&self.base.values, self.base.grid.h())
    }

    /// Range of `εφ_x` over the cells.
    pub fn eps_slope_range(&self, eps: f64) -> (f64, f64) {
        self.slopes()
            .iter()
            .map(|d| eps * d)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Evaluates `φ` at `y` by linear interpolation.
    pub fn at(&self, y: f64) -> f64 {
        self.base.interpolate(y)
    }

    pub fn sup_distance(&self, other: &PhiProfile) -> f64 {
        self.base.sup_distance(&other.base)
    }
}

/// Integral of the normalized C² bump `(35/32)(1-t²)³` from `-1` to `t`.
fn smooth_heaviside(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let t2 = t * t;
        0.5 + (35.0 / 32.0) * (t - t * t2 + 0.6 * t2 * t2 * t - t2 * t2 * t2 * t / 7.0)
    }
}

const INTERIOR_BLEND: f64 = 1e-9;

/// Maps raw nodal values to an element of ℱ with `φ(0) = φ₀`, `φ(1) = φ₁` and
/// cell slopes in `[0, 1/ε]`: slopes are clamped, then blended toward 0 or `1/ε`
/// so that they sum to `φ₁ - φ₀`. For `ε < ε₀` a `1e-9` blend toward the affine slope
/// keeps every slope strictly inside.
pub fn project_admissible(params: Params, grid: Grid, raw: &[f64], eps: f64) -> PhiProfile {
    let h = grid.h();
    let cap = 1.0 / eps;
    let target = params.dphi();
    let mut d: Vec<f64> = cell_slopes(raw, h).iter().map(|s| s.clamp(0.0, cap)).collect();
    let total: f64 = d.iter().sum::<f64>() * h;
    if total > target {
        let r = target / total;
        d.iter_mut().for_each(|s| *s *= r);
    } else if total < target {
        let room = cap - total;
        let r = if room > 0.0 { (cap - target) / room } else { 0.0 };
        d.iter_mut().for_each(|s| *s = cap - (cap - *s) * r);
    }
    if target < cap {
        d.iter_mut().for_each(|s| *s = (1.0 - INTERIOR_BLEND) * *s + INTERIOR_BLEND * target);
    }
    let n = grid.n();
    let mut v = vec![params.phi0; n];
    for c in 0..n - 1 {
        v[c + 1] = v[c] + h * d[c];
    }
    v[n - 1] = params.phi1;
    PhiProfile::new_unchecked(Profile { grid, values: v }, params)
}

/// Momentum `h` (for ℍ) or `w` (for Ĥ).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumProfile(Profile);

impl MomentumProfile {
    /// Momentum vanishing at both ends.
    pub fn new_h(base: Profile) -> Result<Self> {
        if base.first().abs() > PHI_TOL || base.last().abs() > PHI_TOL {
            return Err(Error::Domain("momentum h must vanish at both ends".into()));
        }
        Ok(MomentumProfile(base))
    }

    /// Momentum with `w(0) = φ₀`, `w(1) = φ₁`.
    pub fn new_w(base: Profile, params: Params) -> Result<Self> {
        if (base.first() - params.phi0).abs() > PHI_TOL || (base.last() - params.phi1).abs() > PHI_TOL {
            return Err(Error::Domain("momentum w must satisfy w(0)=phi0, w(1)=phi1".into()));
        }
        Ok(MomentumProfile(base))
    }

    /// No boundary constraint.
    pub fn free(base: Profile) -> Self {
        MomentumProfile(base)
    }

    pub fn base(&self) -> &Profile {
        &self.0
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }
}

/// `ρ = e^φ/(1+e^φ)` nodewise.
pub fn density_from_phi(phi: &PhiProfile) -> DensityProfile {
    DensityProfile(phi.base().map(logistic))
}
