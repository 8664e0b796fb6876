//! Uniform grid on [0,1], boundary data, trapezoid quadrature and finite differences.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid with `n` nodes `x_i = i/(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("grid needs at least 3 nodes, got {n}")));
        }
        Ok(Grid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    /// Node `i`; exact at both endpoints.
    pub fn x(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            1.0
        } else {
            i as f64 / (self.n - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index of the node nearest to `y` (clamped to the grid).
    pub fn nearest(&self, y: f64) -> usize {
        let k = (y.clamp(0.0, 1.0) * (self.n - 1) as f64).round() as usize;
        k.min(self.n - 1)
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5 * self.h()
        } else {
            self.h()
        }
    }
}

/// Grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Domain(format!("profile has {} values for a grid of {} nodes", values.len(), grid.n())));
        }
        Ok(Profile { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Profile { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Profile { grid, values: vec![c; grid.n()] }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Profile { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Profile, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Profile { grid: self.grid, values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sup_distance(&self, other: &Profile) -> f64 {
        sup_distance(&self.values, &other.values)
    }

    /// Piecewise-linear interpolation at `y ∈ [0,1]`.
    pub fn interpolate(&self, y: f64) -> f64 {
        let n = self.n();
        let t = y.clamp(0.0, 1.0) * (n - 1) as f64;
        let k = (t.floor() as usize).min(n - 2);
        let s = t - k as f64;
        self.values[k] * (1.0 - s) + self.values[k + 1] * s
    }

    /// CSV with header `x,value`, 17 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * self.n());
        out.push_str("x,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.grid.x(i), v);
        }
        out
    }

    /// Parses the CSV format written by [`Profile::to_csv`]. Nodes must be uniform.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        if header.trim() != "x,value" {
            return Err(Error::Parse(format!("expected header `x,value`, got `{header}`")));
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (k, line) in lines.enumerate() {
            let mut parts = line.split(',');
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("row {}: expected two columns", k + 1)));
            };
            let x: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("row {}: bad x", k + 1)))?;
            let v: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("row {}: bad value", k + 1)))?;
            xs.push(x);
            vs.push(v);
        }
        let grid = Grid::new(vs.len())?;
        for (i, &x) in xs.iter().enumerate() {
            if (x - grid.x(i)).abs() > 1e-9 {
                return Err(Error::Parse(format!("row {}: x = {x} is not on the uniform grid", i + 1)));
            }
        }
        Profile::new(grid, vs)
    }
}

/// Boundary data and viscosity with derived `φ₀, φ₁, ε₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub rho0: f64,
    pub rho1: f64,
    pub eps: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub eps0: f64,
}

impl Params {
    pub fn new(rho0: f64, rho1: f64, eps: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho1 < 1.0 && rho0 < rho1) {
            return Err(Error::Domain(format!("need 0 < rho0 < rho1 < 1, got {rho0}, {rho1}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("viscosity must be positive, got {eps}")));
        }
        let phi0 = (rho0 / (1.0 - rho0)).ln();
        let phi1 = (rho1 / (1.0 - rho1)).ln();
        Ok(Params { rho0, rho1, eps, phi0, phi1, eps0: 1.0 / (phi1 - phi0) })
    }

    /// Same boundary data with `ε = factor·ε₀`.
    pub fn with_eps_factor(rho0: f64, rho1: f64, factor: f64) -> Result<Self> {
        let p = Params::new(rho0, rho1, 1.0)?;
        p.with_eps(factor * p.eps0)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Params::new(self.rho0, self.rho1, eps)
    }

    pub fn eps_factor(&self) -> f64 {
        self.eps / self.eps0
    }

    /// `0 < ε < ε₀`.
    pub fn in_regime(&self) -> bool {
        self.eps < self.eps0
    }

    pub fn dphi(&self) -> f64 {
        self.phi1 - self.phi0
    }

    pub fn phibar(&self) -> f64 {
        0.5 * (self.phi0 + self.phi1)
    }
}

/// Trapezoid rule.
pub fn integrate(p: &Profile) -> f64 {
    trapezoid(&p.values, p.grid.h())
}

pub fn trapezoid(v: &[f64], h: f64) -> f64 {
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().sum();
    h * (inner + 0.5 * (v[0] + v[n - 1]))
}

/// `∫₀^y p dx` for the piecewise-linear interpolant of `p`.
pub fn partial_integral(p: &Profile, y: f64) -> f64 {
    let n = p.n();
    let h = p.grid.h();
    let t = y.clamp(0.0, 1.0) * (n - 1) as f64;
    let k = (t.floor() as usize).min(n - 2);
    let s = t - k as f64;
    let v = &p.values;
    let mut acc = 0.0;
    for i in 0..k {
        acc += 0.5 * h * (v[i] + v[i + 1]);
    }
    let vy = v[k] * (1.0 - s) + v[k + 1] * s;
    acc + 0.5 * s * h * (v[k] + vy)
}

/// First derivative: central in the interior, one-sided second order at the ends.
pub fn ddx(p: &Profile) -> Profile {
    Profile { grid: p.grid, values: ddx_values(&p.values, p.grid.h()) }
}

pub fn ddx_values(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d
}

/// Second derivative: three-point stencil, endpoints copied from their neighbours.
pub fn d2dx2(p: &Profile) -> Profile {
    Profile { grid: p.grid, values: d2dx2_values(&p.values, p.grid.h()) }
}

pub fn d2dx2_values(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h2;
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

/// Cell slopes `(v_{c+1} - v_c)/h`, `c = 0..n-2`.
pub fn cell_slopes(v: &[f64], h: f64) -> Vec<f64> {
    v.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn sup_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn grid_endpoints_exact() {
        for n in [3, 11, 101, 401, 1000] {
            let gr = g(n);
            assert_eq!(gr.x(0), 0.0);
            assert_eq!(gr.x(n - 1), 1.0);
            assert!((gr.h() * (n - 1) as f64 - 1.0).abs() < 1e-15);
        }
        assert!(Grid::new(2).is_err());
    }

    #[test]
    fn integrate_examples() {
        let gr = g(101);
        assert!((integrate(&Profile::constant(gr, 1.0)) - 1.0).abs() < 1e-14);
        assert!((integrate(&Profile::from_fn(gr, |x| x)) - 0.5).abs() < 1e-14);
        let q = integrate(&Profile::from_fn(gr, |x| x * x));
        assert!((q - 0.333350).abs() < 2e-5);
        assert!((q - (1.0 / 3.0 + 1.0 / 60000.0)).abs() < 1e-12);
    }

    #[test]
    fn ddx_examples() {
        let gr = g(201);
        assert!(sup_norm(&ddx(&Profile::constant(gr, 3.5)).values) == 0.0);
        let d = ddx(&Profile::from_fn(gr, |x| 2.0 - 3.0 * x));
        assert!(d.values.iter().all(|v| (v + 3.0).abs() < 1e-11));
        let d = ddx(&Profile::from_fn(gr, |x| (PI * x).sin()));
        let exact = Profile::from_fn(gr, |x| PI * (PI * x).cos());
        assert!(d.sup_distance(&exact) <= 5e-4);
    }

    #[test]
    fn d2dx2_examples() {
        let gr = g(101);
        let d = d2dx2(&Profile::from_fn(gr, |x| 1.0 + x));
        assert!(d.values[1..100].iter().all(|v| v.abs() < 1e-9));
        let d = d2dx2(&Profile::from_fn(gr, |x| x * x));
        assert!(d.values[1..100].iter().all(|v| (v - 2.0).abs() < 1e-9));
        let gr = g(201);
        let d = d2dx2(&Profile::from_fn(gr, |x| (PI * x).sin()));
        let err = (1..200).map(|i| (d.values[i] + PI * PI * (PI * gr.x(i)).sin()).abs()).fold(0.0, f64::max);
        assert!(err <= 2e-3);
    }

    #[test]
    fn telescoping_is_second_order() {
        let errs: Vec<f64> = [101, 201]
            .iter()
            .map(|&n| {
                let p = Profile::from_fn(g(n), |x| (3.0 * x).exp() * (2.0 * x).sin());
                (integrate(&ddx(&p)) - (p.last() - p.first())).abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
    }

    #[test]
    fn partial_integral_matches_trapezoid_on_nodes_and_splits_cells() {
        let gr = g(11);
        let p = Profile::from_fn(gr, |x| 1.0 + x * x);
        assert!((partial_integral(&p, 1.0) - integrate(&p)).abs() < 1e-14);
        assert_eq!(partial_integral(&p, 0.0), 0.0);
        let lin = Profile::from_fn(gr, |x| 2.0 * x);
        assert!((partial_integral(&lin, 0.37) - 0.37 * 0.37).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let p = Profile::from_fn(g(17), |x| (x * 7.0).sin() / 3.0);
        let text = p.to_csv();
        assert!(text.starts_with("x,value\n"));
        assert!(!text.contains('\r'));
        let q = Profile::from_csv(&text).unwrap();
        assert_eq!(p.values, q.values);
        assert!(Profile::from_csv("a,b\n0,1\n").is_err());
    }

    #[test]
    fn params_derived_values() {
        let p = Params::new(0.25, 0.75, 0.1).unwrap();
        assert!((p.phi1 - 3f64.ln()).abs() < 1e-15);
        assert!((p.phi0 + 3f64.ln()).abs() < 1e-15);
        assert!((p.eps0 - 1.0 / 9f64.ln()).abs() < 1e-15);
        assert!(p.in_regime());
        assert!(Params::new(0.7, 0.3, 0.1).is_err());
        assert!(Params::new(0.2, 0.3, 0.0).is_err());
        let q = Params::with_eps_factor(0.25, 0.75, 0.5).unwrap();
        assert!((q.eps_factor() - 0.5).abs() < 1e-15);
    }
}
