//! The action `I(u) = ε ∫ ⟨H_x, σ(u) H_x⟩ dt`, either from an explicit control `H`
//! or from the elliptic problem `-2ε(σ(u)H_x)_x = u_t + f(u)_x - εu_xx`.
//!
//! In space `σ(u)` is the chain-rule mean on each cell and `H_x` the cell difference.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::solve_tridiagonal;
use crate::pointwise::{flux, sigma_mean};

use super::{trapezoid_in_time, TimePath};

/// Below this cell mobility the elliptic operator is treated as degenerate.
const SIGMA_MIN: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct ActionReport {
    #[serde(skip)]
    pub times: Vec<f64>,
    /// Instantaneous rates `ε⟨H_x, σ(u)H_x⟩`.
    #[serde(skip)]
    pub per_slice: Vec<f64>,
    pub action: f64,
    /// `𝒢_ε(ρ,φ) - S°_ε(ρ̄_ε)` when the path comes from an excursion.
    pub static_value: Option<f64>,
    /// `|action - static_value| / max(1, static_value)`.
    pub rel_gap: Option<f64>,
}

impl ActionReport {
    fn from_rates(times: Vec<f64>, per_slice: Vec<f64>) -> Self {
        let action = trapezoid_in_time(&times, &per_slice);
        ActionReport { times, per_slice, action, static_value: None, rel_gap: None }
    }

    pub fn with_static(mut self, value: f64) -> Self {
        self.static_value = Some(value);
        self.rel_gap = Some((self.action - value).abs() / value.abs().max(1.0));
        self
    }
}

/// `ε Σ_c h σ̃_c (ΔH_c/h)²` on one time slice.
pub fn slice_rate(u: &[f64], hctl: &[f64], eps: f64, h: f64) -> f64 {
    (0..u.len() - 1)
        .map(|c| {
            let dh = (hctl[c + 1] - hctl[c]) / h;
            h * sigma_mean(u[c], u[c + 1]) * dh * dh
        })
        .sum::<f64>()
        * eps
}

/// Solves `-2ε(σ̃ H_x)_x = r` with `H = 0` at both ends.
pub fn elliptic_control(u: &[f64], r: &[f64], eps: f64, h: f64) -> Result<Vec<f64>> {
    let n = u.len();
    let sig: Vec<f64> = (0..n - 1).map(|c| sigma_mean(u[c], u[c + 1])).collect();
    if let Some(c) = sig.iter().position(|&s| !(s >= SIGMA_MIN)) {
        return Err(Error::Degenerate(format!("sigma(u) = {} on cell {c}", sig[c])));
    }
    let k = 2.0 * eps / (h * h);
    let a: Vec<f64> = (1..n - 1).map(|i| -k * sig[i - 1]).collect();
    let b: Vec<f64> = (1..n - 1).map(|i| k * (sig[i - 1] + sig[i])).collect();
    let c: Vec<f64> = (1..n - 1).map(|i| -k * sig[i]).collect();
    let inner = solve_tridiagonal(&a, &b, &c, &r[1..n - 1])?;
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    out.extend(inner);
    out.push(0.0);
    Ok(out)
}

/// Rate of one slice given the Burgers residual `r` at interior nodes.
pub fn slice_rate_from_residual(u: &[f64], r: &[f64], eps: f64, h: f64) -> Result<f64> {
    let hctl = elliptic_control(u, r, eps, h)?;
    Ok(slice_rate(u, &hctl, eps, h))
}

/// Action from the explicit control; requires `H = 0` at `x = 0, 1`.
pub fn action_of_controlled_path(u: &TimePath, control: &TimePath, eps: f64) -> Result<ActionReport> {
    if u.len() != control.len() {
        return Err(Error::Domain("path and control have different lengths".into()));
    }
    for (k, f) in control.frames.iter().enumerate() {
        if f.first().abs() > 1e-9 || f.last().abs() > 1e-9 {
            return Err(Error::Precondition(format!("control does not vanish at the boundary in frame {k}")));
        }
    }
    let h = u.grid.h();
    let per_slice: Vec<f64> =
        u.frames.iter().zip(&control.frames).map(|(uf, hf)| slice_rate(&uf.values, &hf.values, eps, h)).collect();
    Ok(ActionReport::from_rates(u.times.clone(), per_slice))
}

/// Three-point second-order time derivative at frame `k`.
fn time_derivative(path: &TimePath, k: usize) -> Vec<f64> {
    let t = &path.times;
    let f = |j: usize| &path.frames[j].values;
    let m = path.len();
    let (j0, j1, j2, at) = if k == 0 {
        (0, 1, 2, 0)
    } else if k == m - 1 {
        (m - 3, m - 2, m - 1, 2)
    } else {
        (k - 1, k, k + 1, 1)
    };
    let (x0, x1, x2) = (t[j0], t[j1], t[j2]);
    let x = [x0, x1, x2][at];
    // Derivatives of the Lagrange basis at x.
    let w0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    let w1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    let w2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    let (a, b, c) = (f(j0), f(j1), f(j2));
    (0..a.len()).map(|i| w0 * a[i] + w1 * b[i] + w2 * c[i]).collect()
}

/// Action from the per-slice elliptic solve; independent of any explicit control.
pub fn action_via_elliptic(u: &TimePath, eps: f64, execution: Execution) -> Result<ActionReport> {
    if u.len() < 3 {
        return Err(Error::Domain("elliptic action needs at least three frames".into()));
    }
    let h = u.grid.h();
    let rates = exec::map_range(execution, u.len(), |k| {
        let ut = time_derivative(u, k);
        let v = &u.frames[k].values;
        let n = v.len();
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            r[i] = ut[i] + (flux(v[i + 1]) - flux(v[i - 1])) / (2.0 * h)
                - eps * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
        }
        slice_rate_from_residual(v, &r, eps, h)
    });
    let per_slice = rates.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(ActionReport::from_rates(u.times.clone(), per_slice))
}
