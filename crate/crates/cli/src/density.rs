//! Density inputs: a CSV file or one of the builtin generators
//! `stationary`, `constant:<v>`, `sine:<mean>:<amp>:<k>`, `mina:<y->:<y0>:<y+>:<amp>`.
//!
//! `sine` is `clip(mean + amp·sin(kπx))`.

use std::path::Path;

use burgers_qp::inviscid::build_test_density;
use burgers_qp::stationary::stationary_profile;
use burgers_qp::{DensityProfile, Grid, Params, Profile};

use crate::error::CliError;

fn numbers(generator: &str, args: &[&str], want: usize) -> Result<Vec<f64>, CliError> {
    if args.len() != want {
        return Err(CliError::Config(format!("density `{generator}` expects {want} numeric fields")));
    }
    args.iter()
        .map(|a| a.parse::<f64>().map_err(|_| CliError::Config(format!("density `{generator}`: bad number `{a}`"))))
        .collect()
}

pub fn from_generator(generator: &str, params: &Params, grid: Grid) -> Result<DensityProfile, CliError> {
    let mut parts = generator.split(':');
    let kind = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    match kind {
        "stationary" if args.is_empty() => Ok(stationary_profile(params, grid)?.profile),
        "constant" => {
            let v = numbers(generator, &args, 1)?;
            DensityProfile::constant(grid, v[0]).map_err(|e| CliError::Config(e.to_string()))
        }
        "sine" => {
            let v = numbers(generator, &args, 3)?;
            let (mean, amp, k) = (v[0], v[1], v[2]);
            Ok(DensityProfile::from_fn_clipped(grid, |x| mean + amp * (k * std::f64::consts::PI * x).sin()))
        }
        "mina" => {
            let v = numbers(generator, &args, 4)?;
            build_test_density(params, grid, v[0], v[1], v[2], v[3])
                .map(|t| t.rho)
                .map_err(|e| CliError::Config(e.to_string()))
        }
        _ => Err(CliError::Config(format!("unknown density `{generator}`"))),
    }
}

pub fn from_file(path: &Path) -> Result<DensityProfile, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let profile = Profile::from_csv(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    DensityProfile::new(profile).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_generators() {
        let p = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        let g = Grid::new(21).unwrap();
        assert_eq!(from_generator("constant:0.3", &p, g).unwrap().values()[7], 0.3);
        let s = from_generator("sine:0.5:0.2:2", &p, g).unwrap();
        assert!((s.values()[5] - 0.7).abs() < 1e-12);
        let m = from_generator("mina:0.25:0.5:0.75:0.05", &p, g).unwrap();
        assert!((m.values()[10] - 0.5).abs() < 1e-12);
        assert!(from_generator("stationary", &p, g).is_ok());
        assert!(matches!(from_generator("sine:0.5", &p, g), Err(CliError::Config(_))));
        assert!(matches!(from_generator("wave", &p, g), Err(CliError::Config(_))));
    }
}
