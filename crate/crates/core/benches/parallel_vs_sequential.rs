use std::f64::consts::PI;
use std::hint::black_box;

use burgers_qp::dynamics::{action_via_elliptic, burgers_solve};
use burgers_qp::inviscid::{gamma_scan, InviscidOptions};
use burgers_qp::minimization::{quasi_potential, EnumerateOptions};
use burgers_qp::{DensityProfile, Execution, Grid, Params};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn seed_bank(c: &mut Criterion) {
    let p = Params::with_eps_factor(0.25, 0.75, 0.3).unwrap();
    let mut group = c.benchmark_group("seed_bank_enumeration");
    group.sample_size(10);
    for n in [101, 201, 401] {
        let rho = DensityProfile::from_fn_clipped(Grid::new(n).unwrap(), |x| 0.5 + 0.2 * (2.0 * PI * x).sin());
        for (name, exec) in MODES {
            let opts = EnumerateOptions { exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &rho, |b, rho| {
                b.iter(|| quasi_potential(black_box(rho), &p, &opts).unwrap().s_eps)
            });
        }
    }
    group.finish();
}

fn gamma_sweep(c: &mut Criterion) {
    let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
    let rho = DensityProfile::from_fn_clipped(Grid::new(201).unwrap(), |x| 0.3 + 0.4 * x);
    let factors = [0.4, 0.2, 0.1, 0.05];
    let mut group = c.benchmark_group("gamma_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = EnumerateOptions { exec, ..Default::default() };
        group.bench_function(name, |b| {
            b.iter(|| gamma_scan(black_box(&rho), &p, &factors, &opts, &InviscidOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn elliptic_action(c: &mut Criterion) {
    let p = Params::with_eps_factor(0.25, 0.75, 0.4).unwrap();
    let init =
        DensityProfile::from_fn_clipped(Grid::new(401).unwrap(), |x| 0.25 + 0.5 * x + 0.2 * (2.0 * PI * x).sin());
    let path = burgers_solve(&init, &p, 1.0, 1e-3).unwrap();
    let mut group = c.benchmark_group("elliptic_action");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| action_via_elliptic(black_box(&path), p.eps, exec).unwrap().action));
    }
    group.finish();
}

criterion_group!(benches, seed_bank, gamma_sweep, elliptic_action);
criterion_main!(benches);
