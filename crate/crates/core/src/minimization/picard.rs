//! Damped Picard iteration `φ ← (1-θ)φ + θKφ`.

use crate::error::{Error, Result};
use crate::grid::Profile;
use crate::profiles::{DensityProfile, PhiProfile};

use super::{apply_k_tol, finalize, FixedPointResult, Method};

#[derive(Clone, Copy, Debug)]
pub struct PicardOptions {
    pub theta: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Tolerance of the normalization solve for `A`.
    pub a_tol: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { theta: 0.5, max_iter: 20_000, tol: 1e-10, a_tol: 1e-13 }
    }
}

pub fn picard(rho: &DensityProfile, seed: &PhiProfile, eps: f64, opts: &PicardOptions) -> Result<FixedPointResult> {
    let params = seed.params();
    let grid = seed.grid();
    let mut phi = seed.clone();
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let k = apply_k_tol(rho, &phi, eps, opts.a_tol)?;
        change = k.phi.sup_distance(&phi);
        if change <= opts.tol {
            return finalize(rho, k.phi, eps, Method::Picard, it);
        }
        if !change.is_finite() {
            break;
        }
        let mixed: Vec<f64> =
            phi.values().iter().zip(k.phi.values()).map(|(&a, &b)| (1.0 - opts.theta) * a + opts.theta * b).collect();
        phi = PhiProfile::new_unchecked(Profile { grid, values: mixed }, params);
    }
    Err(Error::NonConvergence { what: "picard", iterations: opts.max_iter, residual: change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Params};
    use crate::minimization::FixedPointKind;
    use crate::pointwise::{entropy_prime, g_of_phi};
    use crate::stationary::stationary_profile;

    #[test]
    fn stationary_density_recovers_entropy_derivative() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        let g = Grid::new(201).unwrap();
        let st = stationary_profile(&p, g).unwrap();
        let seed = PhiProfile::from_density(p, &st.profile, 1e-6, p.eps);
        let fp = picard(&st.profile, &seed, p.eps, &PicardOptions::default()).unwrap();
        let exact: Vec<f64> = st.profile.values().iter().map(|&r| entropy_prime(r)).collect();
        let err = crate::grid::sup_distance(fp.phi.values(), &exact);
        assert!(err < 1e-4, "{err}");
        assert!(fp.el_residual < 1e-4);
        assert_eq!(fp.kind, FixedPointKind::Minimizer);
        assert!(fp.fixed_point_defect <= 1e-10);
    }

    #[test]
    fn affine_seed_converges_in_one_iteration() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.3).unwrap();
        let g = Grid::new(101).unwrap();
        let phi = PhiProfile::affine(p, g);
        let rho = DensityProfile::new(phi.base().map(g_of_phi)).unwrap();
        let fp = picard(&rho, &phi, p.eps, &PicardOptions::default()).unwrap();
        assert_eq!(fp.iterations, 1);
        assert!(fp.phi.sup_distance(&phi) < 1e-12);
    }

    #[test]
    fn eps0_collapses_to_affine() {
        let p = Params::with_eps_factor(0.25, 0.75, 1.0).unwrap();
        let g = Grid::new(101).unwrap();
        let st = stationary_profile(&p, g).unwrap();
        for y in [0.2, 0.5, 0.8] {
            let seed = PhiProfile::mollified_step(p, g, y, 0.3, p.eps);
            let fp = picard(&st.profile, &seed, p.eps, &PicardOptions::default()).unwrap();
            assert!(fp.phi.sup_distance(&PhiProfile::affine(p, g)) < 1e-6);
            assert!(fp.min_eig > 0.0);
        }
    }
}
