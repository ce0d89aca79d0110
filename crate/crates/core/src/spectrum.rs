//! Eigenpairs of `y'' + λ y = 0`, `y(0) = y'(1) = 0`, and closed-form
//! values or upper bounds for tails of the sums over them.
//!
//! With `k_n = (2n + 1) π / 2` the eigenvalues are `λ_n = k_n²` and the
//! eigenfunctions `y_n(x) = sin(k_n x)`. All tails below run over `n >= N`
//! (the modes left out when `N` modes are kept).

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    pub n: usize,
    pub lambda_hat: f64,
}

impl EigenMode {
    pub fn new(n: usize) -> Self {
        let k = wavenumber(n);
        Self { n, lambda_hat: k * k }
    }

    pub fn wavenumber(&self) -> f64 {
        wavenumber(self.n)
    }

    /// `(-1)^n`, which is also `y_n(1)`.
    pub fn parity(&self) -> f64 {
        parity(self.n)
    }

    pub fn eigenfunction(&self, x: f64) -> f64 {
        eigenfunction(self.n, x)
    }

    /// Relaxation rate `λ / (1 + η λ)` of this mode.
    pub fn rate(&self, eta_hat: f64) -> f64 {
        self.lambda_hat / (1.0 + eta_hat * self.lambda_hat)
    }
}

#[inline]
pub fn wavenumber(n: usize) -> f64 {
    (2 * n + 1) as f64 * PI / 2.0
}

#[inline]
pub fn eigenvalue(n: usize) -> f64 {
    let k = wavenumber(n);
    k * k
}

#[inline]
pub fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `sin(π y)` with exact reduction of the argument, so that integer and
/// half-integer `y` give exactly 0 and ±1.
pub fn sin_pi(y: f64) -> f64 {
    let r = y.rem_euclid(2.0);
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

/// `y_n(x) = sin((2n + 1) π x / 2)`.
#[inline]
pub fn eigenfunction(n: usize, x: f64) -> f64 {
    sin_pi((2 * n + 1) as f64 * x * 0.5)
}

/// `sin(k_n (1 - x)) = (-1)^n cos(k_n x)`; vanishes exactly at `x = 1`.
#[inline]
pub fn reflected_eigenfunction(n: usize, x: f64) -> f64 {
    sin_pi((2 * n + 1) as f64 * (1.0 - x) * 0.5)
}

/// Trigamma function `ψ'(z) = Σ_{k>=0} 1/(z + k)²` for `z > 0`.
pub fn trigamma(mut z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut acc = 0.0;
    while z < 20.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    // asymptotic expansion with Bernoulli coefficients
    let series = 1.0 / z
        + w / 2.0
        + w / z * (1.0 / 6.0 - w * (1.0 / 30.0 - w * (1.0 / 42.0 - w * (1.0 / 30.0 - w * 5.0 / 66.0))));
    acc + series
}

/// `Σ_{n>=N} 1/λ_n`, evaluated exactly as `ψ'(N + 1/2) / π²`.
pub fn inverse_eigenvalue_tail(n: usize) -> f64 {
    trigamma(n as f64 + 0.5) / (PI * PI)
}

/// Upper bound on `Σ_{n>=N} 1/λ_n²`.
pub fn inverse_square_eigenvalue_tail(n: usize) -> f64 {
    let m = (2 * n + 1) as f64;
    16.0 / PI.powi(4) * (1.0 / m.powi(4) + 1.0 / (6.0 * m.powi(3)))
}

/// Upper bound on `Σ_{n>=N} exp(-λ_n d)` for `d > 0`, using the eigenvalue
/// gaps `λ_{n+1} - λ_n = 2π²(n+1)`.
pub fn exponential_tail(n: usize, d: f64) -> f64 {
    if d <= 0.0 {
        return f64::INFINITY;
    }
    let lead = (-eigenvalue(n) * d).exp();
    if lead == 0.0 {
        return 0.0;
    }
    let ratio_gap = -(-2.0 * PI * PI * (n as f64 + 1.0) * d).exp_m1();
    lead / ratio_gap
}

/// Upper bound on `Σ_{n>=N} exp(-λ_n d) / λ_n` for `d >= 0`.
pub fn exponential_over_eigenvalue_tail(n: usize, d: f64) -> f64 {
    let s1 = inverse_eigenvalue_tail(n);
    if d <= 0.0 {
        return s1;
    }
    let lead = (-eigenvalue(n) * d).exp();
    (lead * s1).min(exponential_tail(n, d) / eigenvalue(n))
}
