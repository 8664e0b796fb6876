//! Subcommand bodies. Each writes its artifacts and returns diagnostics for the manifest.

use std::path::{Path, PathBuf};

use burgers_qp::dynamics::{action_of_controlled_path, action_via_elliptic, excursion_path, PathOptions, TimePath};
use burgers_qp::inviscid::{
    bifurcation_scan, build_test_density, default_delta, find_transition, gamma_scan, inviscid_quasi_potential,
    minimize_inviscid, raised_cosine, thresholds, InviscidOptions, TestDensity, TransitionOptions,
};
use burgers_qp::minimization::{enumerate_fixed_points, quasi_potential, FixedPointSummary, SeedBank};
use burgers_qp::stationary::stationary_profile;
use burgers_qp::{DensityProfile, Grid, Params, Profile};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::density;
use crate::error::CliError;
use crate::output::Output;

pub struct DensityInput {
    pub generator: String,
    pub file: Option<PathBuf>,
}

/// Resolves the density; a CSV file fixes the grid and updates `grid_n`.
pub fn load_density(cfg: &mut RunConfig, input: &DensityInput) -> Result<DensityProfile, CliError> {
    let params = cfg.params()?;
    match &input.file {
        Some(path) => {
            let rho = density::from_file(path)?;
            cfg.grid_n = rho.grid().n();
            Ok(rho)
        }
        None => density::from_generator(&input.generator, &params, cfg.grid()?),
    }
}

fn path_options(cfg: &RunConfig) -> PathOptions {
    let mut o = PathOptions { exec: cfg.execution, ..Default::default() };
    o.relax.dt_max = cfg.dt;
    o
}

pub fn stationary(cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let st = stationary_profile(&params, cfg.grid()?)?;
    out.profile("stationary.csv", st.profile.base())?;
    let summary = st.summary();
    out.json("stationary.json", &summary)?;
    Ok(json!({
        "summary": summary,
        "residual": st.residual(),
        "rho_at_half": st.profile.base().interpolate(0.5),
    }))
}

fn write_fixed_points<'a>(
    out: &mut Output,
    fps: impl Iterator<Item = &'a burgers_qp::minimization::FixedPointResult>,
) -> Result<(), CliError> {
    for (k, fp) in fps.enumerate() {
        out.profile(&format!("fixed_point_{k:02}.csv"), fp.phi.base())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FixedPointsReport {
    eps: f64,
    eps_factor: f64,
    n: usize,
    seeds: usize,
    fixed_points: Vec<FixedPointSummary>,
}

pub fn fixed_points(cfg: &RunConfig, rho: &DensityProfile, out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let opts = cfg.enumerate_options();
    let mut bank = SeedBank::standard(&params, rho, opts.margin)?;
    if let Some((seed, amp)) = opts.jitter {
        bank = bank.with_jitter(seed, amp, params.eps);
    }
    let fps = enumerate_fixed_points(rho, params.eps, &bank, &opts)?;
    out.profile("density.csv", rho.base())?;
    write_fixed_points(out, fps.iter())?;
    let report = FixedPointsReport {
        eps: params.eps,
        eps_factor: params.eps_factor(),
        n: rho.grid().n(),
        seeds: bank.len(),
        fixed_points: fps.iter().map(|f| f.summary()).collect(),
    };
    out.json("fixed_points.json", &report)?;
    Ok(json!({ "n_fixed_points": fps.len(), "seeds": bank.len() }))
}

pub fn quasipotential(cfg: &RunConfig, rho: &DensityProfile, out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let rep = quasi_potential(rho, &params, &cfg.enumerate_options())?;
    out.profile("density.csv", rho.base())?;
    write_fixed_points(out, rep.fixed_points.iter())?;
    let summary = rep.summary();
    out.json("quasipotential.json", &summary)?;
    Ok(json!({ "s_eps": rep.s_eps, "n_minimizers": rep.n_minimizers, "n_fixed_points": rep.fixed_points.len() }))
}

#[derive(Serialize, Deserialize)]
pub struct PathRecord {
    pub eps: f64,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub action: f64,
    pub static_value: Option<f64>,
    pub rel_gap: Option<f64>,
    pub reconstruction_error: f64,
    pub boundary_defect: f64,
    pub psi_terminal_error: f64,
}

fn frame_name(k: usize) -> String {
    format!("frame_{k:05}.csv")
}

pub fn path(cfg: &RunConfig, rho: &DensityProfile, minimizer: usize, out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let qp = quasi_potential(rho, &params, &cfg.enumerate_options())?;
    let mins: Vec<_> = qp.minimizers().collect();
    let fp = mins
        .get(minimizer)
        .ok_or_else(|| CliError::Config(format!("minimizer index {minimizer} out of range ({} found)", mins.len())))?;
    let ex = excursion_path(rho, fp, params.eps, &path_options(cfg))?;
    let static_value = fp.g_value - qp.s_naught_stationary;
    let action = action_of_controlled_path(&ex.u, &ex.control, params.eps)?.with_static(static_value);
    for (k, (u, h)) in ex.u.frames.iter().zip(&ex.control.frames).enumerate() {
        out.profile(&format!("path/u/{}", frame_name(k)), u)?;
        out.profile(&format!("path/control/{}", frame_name(k)), h)?;
    }
    let record = PathRecord {
        eps: params.eps,
        t0: ex.u.t0,
        t1: ex.u.t1,
        dt: ex.u.dt,
        times: ex.u.times.clone(),
        action: action.action,
        static_value: action.static_value,
        rel_gap: action.rel_gap,
        reconstruction_error: ex.reconstruction_error,
        boundary_defect: ex.boundary_defect,
        psi_terminal_error: ex.psi_terminal_error,
    };
    out.json("path/path.json", &record)?;
    Ok(json!({
        "s_eps": qp.s_eps,
        "n_minimizers": qp.n_minimizers,
        "frames": ex.u.len(),
        "action": action.action,
        "rel_gap": action.rel_gap,
    }))
}

/// Reads the `u` frames of a `path` output directory.
pub fn read_path(dir: &Path) -> Result<(PathRecord, TimePath), CliError> {
    let text = std::fs::read_to_string(dir.join("path.json"))
        .map_err(|e| CliError::Config(format!("cannot read {}/path.json: {e}", dir.display())))?;
    let record: PathRecord =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad path.json: {e}")))?;
    let mut frames = Vec::with_capacity(record.times.len());
    for k in 0..record.times.len() {
        let p = dir.join("u").join(frame_name(k));
        let text =
            std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
        frames.push(Profile::from_csv(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?);
    }
    let grid = frames.first().map(|f| f.grid).ok_or_else(|| CliError::Config("path has no frames".into()))?;
    let path = TimePath::new(grid, record.times.clone(), frames).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((record, path))
}

#[derive(Serialize)]
struct ActionCheck {
    eps: f64,
    frames: usize,
    action_recorded: f64,
    action_elliptic: f64,
    /// `|elliptic - recorded| / max(|elliptic|, |recorded|)`.
    relative_difference: f64,
    static_value: Option<f64>,
    rel_gap: Option<f64>,
}

pub fn action_check(cfg: &RunConfig, dir: &Path, out: &mut Output) -> Result<Value, CliError> {
    let (record, path) = read_path(dir)?;
    let rep = action_via_elliptic(&path, record.eps, cfg.execution)?;
    let rep = match record.static_value {
        Some(s) => rep.with_static(s),
        None => rep,
    };
    let scale = rep.action.abs().max(record.action.abs());
    let check = ActionCheck {
        eps: record.eps,
        frames: path.len(),
        action_recorded: record.action,
        action_elliptic: rep.action,
        relative_difference: if scale > 0.0 { (rep.action - record.action).abs() / scale } else { 0.0 },
        static_value: rep.static_value,
        rel_gap: rep.rel_gap,
    };
    out.json("action_check.json", &check)?;
    Ok(serde_json::to_value(&check)?)
}

pub fn inviscid(cfg: &RunConfig, rho: &DensityProfile, out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let opts = InviscidOptions::default();
    let th = thresholds(&params);
    let m = minimize_inviscid(rho, &params, &opts);
    let s = inviscid_quasi_potential(rho, &params, &opts)?;
    out.profile("density.csv", rho.base())?;
    let report = json!({ "thresholds": th, "minimum": m, "s_inviscid": s });
    out.json("inviscid.json", &report)?;
    Ok(json!({ "s_inviscid": s, "n_argmins": m.argmins.len() }))
}

pub struct Geometry {
    pub y_minus: f64,
    pub y0: f64,
    pub y_plus: f64,
    pub amplitude_factor: f64,
    pub delta: Option<f64>,
}

fn setup_transition(params: &Params, grid: Grid, geo: &Geometry) -> Result<(TestDensity, Profile, f64), CliError> {
    let th = thresholds(params);
    let amp = geo.amplitude_factor * (th.a - th.a_minus).min(th.a_plus - th.a);
    let test = build_test_density(params, grid, geo.y_minus, geo.y0, geo.y_plus, amp)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let lambda = raised_cosine(grid, test.y_minus, test.y0);
    let delta = geo.delta.unwrap_or_else(|| default_delta(&test, &lambda));
    Ok((test, lambda, delta))
}

fn transition_options(cfg: &RunConfig) -> TransitionOptions {
    let e = cfg.enumerate_options();
    TransitionOptions {
        flow: e.flow,
        dedup_tol: e.dedup_tol,
        root_tol: cfg.tolerances.root_tol,
        exec: cfg.execution,
        ..Default::default()
    }
}

pub fn transition(cfg: &RunConfig, geo: &Geometry, out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let (test, lambda, delta) = setup_transition(&params, cfg.grid()?, geo)?;
    out.profile("density.csv", test.rho.base())?;
    let rep = find_transition(&test, &lambda, delta, params.eps, &transition_options(cfg))?;
    out.json("transition.json", &rep)?;
    out.profile("minimizer_plus.csv", rep.minimizer_pair.0.phi.base())?;
    out.profile("minimizer_minus.csv", rep.minimizer_pair.1.phi.base())?;
    Ok(json!({
        "alpha0": rep.alpha0,
        "delta": delta,
        "separation": rep.separation,
        "g_at_alpha0": rep.g_at_alpha0,
        "evaluations": rep.g_trace.len(),
        "escapes": rep.escapes,
    }))
}

pub fn bifurcation(cfg: &RunConfig, geo: &Geometry, factors: &[f64], out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let (test, lambda, delta) = setup_transition(&params, cfg.grid()?, geo)?;
    let rows = bifurcation_scan(&test, &lambda, delta, factors, &transition_options(cfg));
    out.table("bifurcation.csv", &rows)?;
    let coexist: Vec<f64> = rows.iter().filter(|r| r.status == "transition").map(|r| r.eps_factor).collect();
    let observed = coexist.iter().cloned().fold(None, |m: Option<f64>, f| Some(m.map_or(f, |m| m.max(f))));
    Ok(json!({ "delta": delta, "largest_coexistence_eps_factor": observed, "rows": rows.len() }))
}

pub fn gamma(cfg: &RunConfig, rho: &DensityProfile, factors: &[f64], out: &mut Output) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let rows = gamma_scan(rho, &params, factors, &cfg.enumerate_options(), &InviscidOptions::default())?;
    out.profile("density.csv", rho.base())?;
    out.table("gamma.csv", &rows)?;
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    Ok(json!({ "gap_inversions": burgers_qp::inviscid::inversions(&gaps), "rows": rows.len() }))
}
