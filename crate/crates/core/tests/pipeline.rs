use std::f64::consts::PI;

use burgers_qp::dynamics::{action_via_elliptic, burgers_solve, verify_static_dynamic, PathOptions};
use burgers_qp::functionals::g_eps;
use burgers_qp::inviscid::{gamma_scan, minimize_inviscid, thresholds, InviscidOptions};
use burgers_qp::minimization::{gradient_flow, picard, quasi_potential, EnumerateOptions, FlowOptions, PicardOptions};
use burgers_qp::stationary::stationary_profile;
use burgers_qp::{DensityProfile, Execution, Grid, Params, PhiProfile};
use proptest::prelude::*;

fn opts(exec: Execution) -> EnumerateOptions {
    EnumerateOptions { exec, ..Default::default() }
}

#[test]
fn sequential_and_parallel_enumeration_agree_bitwise() {
    let p = Params::with_eps_factor(0.25, 0.75, 0.2).unwrap();
    let g = Grid::new(121).unwrap();
    let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + 0.2 * (2.0 * PI * x).sin());
    let a = quasi_potential(&rho, &p, &opts(Execution::Sequential)).unwrap();
    let b = quasi_potential(&rho, &p, &opts(Execution::Parallel)).unwrap();
    assert_eq!(a.s_eps.to_bits(), b.s_eps.to_bits());
    assert_eq!(a.fixed_points.len(), b.fixed_points.len());
    for (x, y) in a.fixed_points.iter().zip(&b.fixed_points) {
        assert_eq!(x.phi.values(), y.phi.values());
    }
}

#[test]
fn jittered_bank_is_reproducible() {
    let p = Params::with_eps_factor(0.25, 0.75, 0.3).unwrap();
    let g = Grid::new(81).unwrap();
    let rho = DensityProfile::from_fn_clipped(g, |x| 0.3 + 0.4 * x + 0.1 * (3.0 * PI * x).sin());
    let o = EnumerateOptions { jitter: Some((42, 0.05)), ..Default::default() };
    let a = quasi_potential(&rho, &p, &o).unwrap();
    let b = quasi_potential(&rho, &p, &EnumerateOptions { exec: Execution::Sequential, ..o }).unwrap();
    assert_eq!(a.s_eps.to_bits(), b.s_eps.to_bits());
}

#[test]
fn stationary_density_costs_nothing_statically_and_dynamically() {
    let p = Params::with_eps_factor(0.25, 0.75, 0.6).unwrap();
    let g = Grid::new(201).unwrap();
    let rho = stationary_profile(&p, g).unwrap().profile;
    let rep = verify_static_dynamic(&rho, &p, &EnumerateOptions::default(), &PathOptions::default()).unwrap();
    assert!(rep.s_eps.abs() < 1e-8, "{}", rep.s_eps);
    for c in &rep.checks {
        assert!(c.action_control.abs() < 1e-7 && c.action_elliptic.abs() < 1e-7, "{c:?}");
    }
}

#[test]
fn viscous_minimum_approaches_inviscid_for_monotone_density() {
    let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
    let g = Grid::new(201).unwrap();
    let rho = DensityProfile::from_fn_clipped(g, |x| 0.3 + 0.4 * x);
    let rows =
        gamma_scan(&rho, &p, &[0.4, 0.2, 0.1], &EnumerateOptions::default(), &InviscidOptions::default()).unwrap();
    assert!(rows.windows(2).all(|w| w[1].gap < w[0].gap), "{rows:?}");
    let inv = minimize_inviscid(&rho, &p, &InviscidOptions::default());
    let a = thresholds(&p).a;
    // 0.3 + 0.4y = A at the single inviscid shock.
    assert!((inv.argmins[0] - (a - 0.3) / 0.4).abs() < 1e-6, "{:?}", inv.argmins);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flow_never_increases_the_functional(
        f in 0.1f64..0.95,
        a1 in -0.15f64..0.15,
        k in 1u32..4,
        y in 0.1f64..0.9,
    ) {
        let p = Params::with_eps_factor(0.25, 0.75, f).unwrap();
        let g = Grid::new(101).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.5 + a1 * (k as f64 * PI * x).sin());
        let seed = PhiProfile::mollified_step(p, g, y, 2.0 * p.eps, p.eps);
        let g_seed = g_eps(&rho, &seed, p.eps);
        let (fp, trace) = gradient_flow(&rho, &seed, p.eps, &FlowOptions::default()).unwrap();
        prop_assert!(trace.max_increase <= 1e-10);
        prop_assert!(fp.g_value <= g_seed + 1e-10);
    }

    #[test]
    fn picard_and_flow_reach_the_same_unique_fixed_point_near_eps0(
        a1 in -0.1f64..0.1,
        a2 in -0.05f64..0.05,
    ) {
        let p = Params::with_eps_factor(0.25, 0.75, 0.9).unwrap();
        let g = Grid::new(101).unwrap();
        let rho = DensityProfile::from_fn_clipped(g, |x| 0.25 + 0.5 * x + a1 * (PI * x).sin() + a2 * (2.0 * PI * x).sin());
        let seed = PhiProfile::affine(p, g);
        let a = picard(&rho, &seed, p.eps, &PicardOptions::default()).unwrap();
        let (b, _) = gradient_flow(&rho, &seed, p.eps, &FlowOptions::default()).unwrap();
        prop_assert!(a.phi.sup_distance(&b.phi) < 1e-6);
    }

    #[test]
    fn forward_relaxation_has_negligible_action(f in 0.2f64..1.2, amp in -0.2f64..0.2) {
        let p = Params::with_eps_factor(0.25, 0.75, f).unwrap();
        let g = Grid::new(81).unwrap();
        let init = DensityProfile::from_fn_clipped(g, |x| 0.25 + 0.5 * x + amp * (2.0 * PI * x).sin());
        let path = burgers_solve(&init, &p, 1.0, 2e-3).unwrap();
        let a = action_via_elliptic(&path, p.eps, Execution::Sequential).unwrap().action;
        prop_assert!(a.abs() < 1e-7, "{a}");
    }
}
