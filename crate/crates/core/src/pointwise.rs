//! Pointwise building blocks: entropy `s`, `s'`, mobility `σ`, flux `f`, logistic maps
//! and the chain-rule means used by the mimetic discretization.

/// `s(a) = a log a + (1-a) log(1-a)` on [0,1], `+∞` outside.
pub fn entropy(a: f64) -> f64 {
    if !(0.0..=1.0).contains(&a) {
        return f64::INFINITY;
    }
    xlogx(a) + xlogx(1.0 - a)
}

fn xlogx(a: f64) -> f64 {
    if a < 1e-300 {
        0.0
    } else {
        a * a.ln()
    }
}

/// `s'(a) = log(a/(1-a))`; infinite at the endpoints, NaN outside [0,1].
pub fn entropy_prime(a: f64) -> f64 {
    if !(0.0..=1.0).contains(&a) {
        return f64::NAN;
    }
    a.ln() - (-a).ln_1p()
}

/// Checked version of [`entropy_prime`] for strictly interior arguments.
pub fn entropy_prime_checked(a: f64) -> crate::Result<f64> {
    if a > 0.0 && a < 1.0 {
        Ok(entropy_prime(a))
    } else {
        Err(crate::Error::Domain(format!("entropy_prime needs a in (0,1), got {a}")))
    }
}

/// `σ(a) = a(1-a)`.
pub fn sigma(a: f64) -> f64 {
    a * (1.0 - a)
}

/// Flux `f(a) = a(1-a)`.
pub fn flux(a: f64) -> f64 {
    a * (1.0 - a)
}

/// `e^z/(1+e^z)`, overflow-free.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `1/(1+e^φ)`.
pub fn g_of_phi(phi: f64) -> f64 {
    logistic(-phi)
}

/// `log(1+e^φ)`, overflow-free.
pub fn log1pexp(phi: f64) -> f64 {
    if phi > 0.0 {
        phi + (-phi).exp().ln_1p()
    } else {
        phi.exp().ln_1p()
    }
}

/// `e^φ/(1+e^φ)²`.
pub fn logistic_density(phi: f64) -> f64 {
    let q = logistic(phi);
    q * (1.0 - q)
}

/// `s'(b) - s'(a)` without cancellation; `+∞` if either argument sits on {0,1}.
pub fn entropy_prime_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a <= 0.0 || a >= 1.0 || b <= 0.0 || b >= 1.0 {
        return (b - a).signum() * f64::INFINITY;
    }
    ((b - a) / a).ln_1p() - ((a - b) / (1.0 - a)).ln_1p()
}

/// Chain-rule mean of `σ` on `[a,b]`: `(b-a)/(s'(b)-s'(a))`, equal to `σ(a)` when `a = b`.
pub fn sigma_mean(a: f64, b: f64) -> f64 {
    if a == b {
        return sigma(a);
    }
    let ds = entropy_prime_diff(a, b);
    if ds.is_infinite() {
        0.0
    } else {
        (b - a) / ds
    }
}

/// `-(log(1-b) - log(1-a))/(s'(b)-s'(a))`, the mean of `a` weighted for `log(1-·)`.
pub fn mean_for_log_complement(a: f64, b: f64) -> f64 {
    if a == b {
        return a;
    }
    -((a - b) / (1.0 - a)).ln_1p() / entropy_prime_diff(a, b)
}

/// `(log b - log a)/(s'(b)-s'(a))`, the mean of `1-a` weighted for `log(·)`.
pub fn mean_for_log(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0 - a;
    }
    ((b - a) / a).ln_1p() / entropy_prime_diff(a, b)
}
