//! Multistart exploration of the fixed points of `K_{ρ,ε}` and the quasi-potential
//! `S_ε(ρ) = S°_ε(ρ) - S°_ε(ρ̄_ε)`.
//!
//! Counts of fixed points are lower bounds: the seed bank is a heuristic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::grid::{Grid, Params};
use crate::pointwise::entropy_prime;
use crate::profiles::{project_admissible, DensityProfile, PhiProfile};
use crate::stationary::stationary_profile;

use super::{gradient_flow, picard, FixedPointKind, FixedPointResult, FixedPointSummary, FlowOptions, PicardOptions};

/// Labelled starting profiles.
#[derive(Clone, Debug, Default)]
pub struct SeedBank {
    pub seeds: Vec<(String, PhiProfile)>,
}

/// Step positions of the default bank.
pub const STEP_POSITIONS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

impl SeedBank {
    pub fn new() -> Self {
        SeedBank::default()
    }

    pub fn push(&mut self, label: impl Into<String>, phi: PhiProfile) {
        self.seeds.push((label.into(), phi));
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Affine profile, `s'(ρ̄_ε)`, steps mollified at scale `2ε` and `s'(clip ρ)`.
    pub fn standard(params: &Params, rho: &DensityProfile, margin: f64) -> Result<Self> {
        let grid = rho.grid();
        let eps = params.eps;
        let mut bank = SeedBank::new();
        bank.push("affine", PhiProfile::affine(*params, grid));
        if params.in_regime() {
            let st = stationary_profile(params, grid)?;
            bank.push("stationary", PhiProfile::from_density(*params, &st.profile, margin, eps));
        }
        for y in STEP_POSITIONS {
            bank.push(format!("step_{y:.1}"), PhiProfile::mollified_step(*params, grid, y, 2.0 * eps, eps));
        }
        bank.push("density", PhiProfile::from_density(*params, rho, margin, eps));
        Ok(bank)
    }

    /// Appends one randomly perturbed copy of every seed; the perturbation is a
    /// combination of the first four sine modes with amplitude `amp·(φ₁-φ₀)`.
    pub fn with_jitter(mut self, rng_seed: u64, amp: f64, eps: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let extra: Vec<(String, PhiProfile)> = self
            .seeds
            .iter()
            .map(|(label, phi)| {
                let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let grid = phi.grid();
                let scale = amp * phi.params().dphi();
                let raw: Vec<f64> = grid
                    .nodes()
                    .iter()
                    .zip(phi.values())
                    .map(|(&x, &v)| {
                        let bump: f64 = coeffs
                            .iter()
                            .enumerate()
                            .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * x).sin())
                            .sum();
                        v + scale * bump
                    })
                    .collect();
                (format!("{label}_jitter"), project_admissible(phi.params(), grid, &raw, eps))
            })
            .collect();
        self.seeds.extend(extra);
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub picard: PicardOptions,
    pub flow: FlowOptions,
    /// Sup-norm distance under which two fixed points are identified.
    pub dedup_tol: f64,
    /// Fixed points within this distance of the minimal `𝒢_ε` count as minimizers.
    pub tie_tol: f64,
    /// Clip margin for `s'(ρ)` seeds.
    pub margin: f64,
    pub exec: Execution,
    /// Optional seed-bank jitter `(rng_seed, amplitude)`.
    pub jitter: Option<(u64, f64)>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            picard: PicardOptions::default(),
            flow: FlowOptions::default(),
            dedup_tol: 1e-4,
            tie_tol: 1e-6,
            margin: 1e-6,
            exec: Execution::default(),
            jitter: None,
        }
    }
}

fn solve_from(rho: &DensityProfile, seed: &PhiProfile, eps: f64, opts: &EnumerateOptions) -> Result<FixedPointResult> {
    match picard(rho, seed, eps, &opts.picard) {
        Ok(fp) => Ok(fp),
        Err(_) => gradient_flow(rho, seed, eps, &opts.flow).map(|(fp, _)| fp),
    }
}

/// Runs Picard (falling back to the gradient flow) from every seed, merges duplicates and
/// sorts by `𝒢_ε`.
pub fn enumerate_fixed_points(
    rho: &DensityProfile,
    eps: f64,
    bank: &SeedBank,
    opts: &EnumerateOptions,
) -> Result<Vec<FixedPointResult>> {
    if bank.is_empty() {
        return Err(Error::Precondition("empty seed bank".into()));
    }
    let runs = exec::map(opts.exec, &bank.seeds, |(_, seed)| solve_from(rho, seed, eps, opts));
    let mut first_err = None;
    let mut found: Vec<FixedPointResult> = Vec::new();
    for r in runs {
        match r {
            Ok(fp) => {
                if let Some(old) = found.iter_mut().find(|o| o.phi.sup_distance(&fp.phi) < opts.dedup_tol) {
                    if fp.fixed_point_defect < old.fixed_point_defect {
                        *old = fp;
                    }
                } else {
                    found.push(fp);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if found.is_empty() {
        return Err(first_err.unwrap_or_else(|| Error::Precondition("no seeds".into())));
    }
    found.sort_by(|a, b| a.g_value.total_cmp(&b.g_value));
    Ok(found)
}

#[derive(Clone, Debug)]
pub struct MinimizationReport {
    pub rho: DensityProfile,
    pub eps: f64,
    pub params: Params,
    pub fixed_points: Vec<FixedPointResult>,
    /// `S°_ε(ρ)`.
    pub s_naught: f64,
    /// `S°_ε(ρ̄_ε)`.
    pub s_naught_stationary: f64,
    /// `S_ε(ρ)`.
    pub s_eps: f64,
    pub n_minimizers: usize,
    pub tie_tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizationSummary {
    pub eps: f64,
    pub eps_factor: f64,
    pub n: usize,
    pub s_naught: f64,
    pub s_naught_stationary: f64,
    pub s_eps: f64,
    pub n_minimizers: usize,
    pub fixed_points: Vec<FixedPointSummary>,
}

impl MinimizationReport {
    /// Fixed points attaining `S°_ε(ρ)` within `tie_tol`.
    pub fn minimizers(&self) -> impl Iterator<Item = &FixedPointResult> {
        let cut = self.s_naught + self.tie_tol;
        self.fixed_points
            .iter()
            .enumerate()
            .filter(move |(i, f)| *i == 0 || (f.g_value <= cut && f.kind != FixedPointKind::Saddle))
            .map(|(_, f)| f)
    }

    pub fn summary(&self) -> MinimizationSummary {
        MinimizationSummary {
            eps: self.eps,
            eps_factor: self.eps / self.params.eps0,
            n: self.rho.grid().n(),
            s_naught: self.s_naught,
            s_naught_stationary: self.s_naught_stationary,
            s_eps: self.s_eps,
            n_minimizers: self.n_minimizers,
            fixed_points: self.fixed_points.iter().map(|f| f.summary()).collect(),
        }
    }
}

fn count_minimizers(fps: &[FixedPointResult], tie_tol: f64) -> usize {
    let best = fps[0].g_value;
    1 + fps[1..].iter().filter(|f| f.g_value <= best + tie_tol && f.kind != FixedPointKind::Saddle).count()
}

/// `S°_ε` on `ρ̄_ε`, where the minimizer is `s'(ρ̄_ε)`: a single Picard solve from that seed.
fn stationary_value(params: &Params, grid: Grid, opts: &EnumerateOptions) -> Result<f64> {
    let st = stationary_profile(params, grid)?;
    let bank = SeedBank::standard(params, &st.profile, opts.margin)?;
    let fps = enumerate_fixed_points(&st.profile, params.eps, &bank, opts)?;
    Ok(fps[0].g_value)
}

/// `S_ε(ρ)` with `ε = params.eps`, from the seed-bank minimum on `ρ` and on `ρ̄_ε`.
pub fn quasi_potential(rho: &DensityProfile, params: &Params, opts: &EnumerateOptions) -> Result<MinimizationReport> {
    let eps = params.eps;
    if eps > params.eps0 * (1.0 + super::EPS0_SLACK) {
        return Err(Error::Precondition(format!("eps = {eps} exceeds eps0 = {}", params.eps0)));
    }
    let grid = rho.grid();
    let mut bank = SeedBank::standard(params, rho, opts.margin)?;
    if let Some((seed, amp)) = opts.jitter {
        bank = bank.with_jitter(seed, amp, eps);
    }
    let fixed_points = enumerate_fixed_points(rho, eps, &bank, opts)?;
    let s_naught = fixed_points[0].g_value;
    let s_naught_stationary = stationary_value(params, grid, opts)?;
    let s_eps = s_naught - s_naught_stationary;
    if s_eps < -1e-8 {
        return Err(Error::Invariant(format!("negative quasi-potential {s_eps}")));
    }
    let n_minimizers = count_minimizers(&fixed_points, opts.tie_tol);
    Ok(MinimizationReport {
        rho: rho.clone(),
        eps,
        params: *params,
        fixed_points,
        s_naught,
        s_naught_stationary,
        s_eps,
        n_minimizers,
        tie_tol: opts.tie_tol,
    })
}

/// `S°_ε(ρ̄_ε)` evaluated directly at `φ = s'(ρ̄_ε)`.
pub fn stationary_minimum_closed(params: &Params, grid: Grid) -> Result<f64> {
    let st = stationary_profile(params, grid)?;
    let v: Vec<f64> = st.profile.values().iter().map(|&r| entropy_prime(r)).collect();
    let phi = project_admissible(*params, grid, &v, params.eps);
    Ok(crate::functionals::g_eps(&st.profile, &phi, params.eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn stationary_density_has_single_fixed_point_and_zero_cost() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        let g = Grid::new(101).unwrap();
        let st = stationary_profile(&p, g).unwrap();
        let rep = quasi_potential(&st.profile, &p, &EnumerateOptions::default()).unwrap();
        assert_eq!(rep.fixed_points.len(), 1);
        assert!(rep.s_eps.abs() <= 1e-8);
        let closed = stationary_minimum_closed(&p, g).unwrap();
        assert!((closed - rep.s_naught_stationary).abs() < 1e-4);
    }

    #[test]
    fn saddle_density_has_two_fixed_points_at_small_eps() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.1).unwrap();
        let g = Grid::new(201).unwrap();
        let rho = DensityProfile::new(PhiProfile::affine(p, g).base().map(crate::pointwise::g_of_phi)).unwrap();
        let bank = SeedBank::standard(&p, &rho, 1e-6).unwrap();
        let fps = enumerate_fixed_points(&rho, p.eps, &bank, &EnumerateOptions::default()).unwrap();
        assert!(fps.len() >= 2, "{}", fps.len());
        let aff = PhiProfile::affine(p, g);
        let saddle = fps.iter().find(|f| f.phi.sup_distance(&aff) < 1e-6).expect("affine saddle");
        assert_eq!(saddle.kind, FixedPointKind::Saddle);
        assert!(fps[0].g_value < saddle.g_value - 1e-6);
    }

    #[test]
    fn quasi_potential_nonnegative_and_jitter_deterministic() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.4).unwrap();
        let g = Grid::new(81).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.2 * (2.0 * PI * x).sin());
        let opts = EnumerateOptions { jitter: Some((7, 0.05)), ..Default::default() };
        let a = quasi_potential(&rho, &p, &opts).unwrap();
        let b = quasi_potential(&rho, &p, &EnumerateOptions { exec: Execution::Sequential, ..opts }).unwrap();
        assert!(a.s_eps >= -1e-8);
        assert!(a.n_minimizers >= 1);
        assert_eq!(a.s_eps.to_bits(), b.s_eps.to_bits());
    }
}
