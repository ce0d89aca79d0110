//! Finite-difference solver for the same boundary-value problem, used only to
//! cross-check the series.
//!
//! The equation is written as `∂t(u - η u_xx) = u_xx` on a uniform grid with
//! central second differences. The loaded end carries the flux
//! `q(t) = u_x(1, t)`, which obeys `q + η q_t = -P`; a ghost node
//! `u_{m+1} = u_{m-1} + 2h q` closes the last row. Each step is one
//! tridiagonal solve.

use crate::error::{Error, Result};
use crate::series::{SeriesConfig, TimeSlice};
use crate::signals::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    BackwardEuler,
    /// Trapezoidal rule in time.
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Grid nodes including both ends.
    pub nx: usize,
    pub dt_hat: f64,
    pub t_end_hat: f64,
    pub scheme: Scheme,
    /// Store every this many steps; the final step is always stored.
    pub save_every: usize,
}

impl FdConfig {
    pub fn new(nx: usize, dt_hat: f64, t_end_hat: f64) -> Self {
        Self { nx, dt_hat, t_end_hat, scheme: Scheme::BackwardEuler, save_every: 1 }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    pub fn with_save_every(self, save_every: usize) -> Self {
        Self { save_every, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 3 {
            return Err(Error::domain(format!("nx must be >= 3, got {}", self.nx)));
        }
        if !(self.dt_hat.is_finite() && self.dt_hat > 0.0) {
            return Err(Error::domain(format!("dt_hat must be > 0, got {}", self.dt_hat)));
        }
        if !(self.t_end_hat.is_finite() && self.t_end_hat > 0.0) {
            return Err(Error::domain(format!("t_end_hat must be > 0, got {}", self.t_end_hat)));
        }
        if self.save_every < 1 {
            return Err(Error::domain("save_every must be >= 1"));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    pub fn steps(&self) -> usize {
        ((self.t_end_hat / self.dt_hat) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone)]
pub struct FdSolution {
    pub eta_hat: f64,
    pub dt_hat: f64,
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// `u[k][i]` at `times[k]`, `x[i]`.
    pub u: Vec<Vec<f64>>,
    /// `-(u^k - u^{k-1}) / dt`, a midpoint approximation of `v` at
    /// `times[k] - dt/2`. Row 0 (the initial state) is zero.
    pub v: Vec<Vec<f64>>,
    /// Discrete boundary flux `q ≈ u_x(1, t)`.
    pub flux: Vec<f64>,
    /// `σ₀(1) = u_x + η u_tx` recovered from the grid with one-sided
    /// differences; should equal `-P` to `O(h²)`. Row 0 holds 0.
    pub boundary_stress: Vec<f64>,
}

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i` in place.
/// `a[0]` and `c[n-1]` are ignored.
pub fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
    let n = d.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut denom = b[0];
    if denom == 0.0 {
        return Err(Error::domain("singular tridiagonal system"));
    }
    scratch[0] = c[0] / denom;
    d[0] /= denom;
    for i in 1..n {
        denom = b[i] - a[i] * scratch[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::domain("singular tridiagonal system"));
        }
        scratch[i] = if i + 1 < n { c[i] / denom } else { 0.0 };
        d[i] = (d[i] - a[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= scratch[i] * d[i + 1];
    }
    Ok(())
}

/// `(A u)_i` for the unknowns `u_1..u_m` (stored at `u[0..m]`) with the
/// Dirichlet node `u_0 = 0` and ghost-node flux term excluded.
fn apply_d2(u: &[f64], h2: f64, out: &mut [f64]) {
    let m = u.len();
    for i in 0..m {
        let left = if i == 0 { 0.0 } else { u[i - 1] };
        out[i] = if i + 1 < m { (left - 2.0 * u[i] + u[i + 1]) / h2 } else { (2.0 * left - 2.0 * u[i]) / h2 };
    }
}

fn one_sided_gradient(full: &[f64], h: f64) -> f64 {
    let m = full.len() - 1;
    (3.0 * full[m] - 4.0 * full[m - 1] + full[m - 2]) / (2.0 * h)
}

pub fn solve_fd(eta_hat: f64, sig: &Signal, cfg: &FdConfig) -> Result<FdSolution> {
    cfg.validate()?;
    if !(eta_hat.is_finite() && eta_hat >= 0.0) {
        return Err(Error::domain(format!("eta_hat must be finite and >= 0, got {eta_hat}")));
    }
    let m = cfg.nx - 1;
    let h = cfg.h();
    let h2 = h * h;
    let dt = cfg.dt_hat;
    let steps = cfg.steps();

    // implicit and explicit weights on A
    let (imp, exp) = match cfg.scheme {
        Scheme::BackwardEuler => (eta_hat + dt, eta_hat),
        Scheme::CrankNicolson => (eta_hat + 0.5 * dt, eta_hat - 0.5 * dt),
    };
    let mut lower = vec![-imp / h2; m];
    let diag = vec![1.0 + 2.0 * imp / h2; m];
    let upper = vec![-imp / h2; m];
    lower[m - 1] = -2.0 * imp / h2;

    let x: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let mut u = vec![0.0; m];
    let mut q = 0.0;
    let mut au = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut scratch = Vec::with_capacity(m);
    let full = |u: &[f64]| -> Vec<f64> { std::iter::once(0.0).chain(u.iter().copied()).collect() };

    let mut sol = FdSolution {
        eta_hat,
        dt_hat: dt,
        x,
        times: vec![0.0],
        u: vec![vec![0.0; m + 1]],
        v: vec![vec![0.0; m + 1]],
        flux: vec![q],
        boundary_stress: vec![0.0],
    };
    let mut grad_prev = 0.0;
    for k in 1..=steps {
        let t_new = k as f64 * dt;
        let t_old = (k - 1) as f64 * dt;
        let q_new = match cfg.scheme {
            Scheme::BackwardEuler => (eta_hat * q - dt * sig.eval(t_new)) / (eta_hat + dt),
            Scheme::CrankNicolson if eta_hat == 0.0 => -sig.eval(t_new),
            Scheme::CrankNicolson => {
                let r = eta_hat / dt;
                (q * (r - 0.5) - 0.5 * (sig.eval(t_new) + sig.eval(t_old))) / (r + 0.5)
            }
        };
        apply_d2(&u, h2, &mut au);
        for i in 0..m {
            rhs[i] = u[i] - exp * au[i];
        }
        rhs[m - 1] += (imp * q_new - exp * q) * 2.0 / h;
        let prev = u.clone();
        thomas(&lower, &diag, &upper, &mut rhs, &mut scratch)?;
        u.copy_from_slice(&rhs);
        q = q_new;
        let grad = one_sided_gradient(&full(&u), h);
        let stress = grad + eta_hat * (grad - grad_prev) / dt;
        grad_prev = grad;

        if k % cfg.save_every == 0 || k == steps {
            let uf = full(&u);
            let vf: Vec<f64> = std::iter::once(0.0)
                .chain(u.iter().zip(&prev).map(|(a, b)| -(a - b) / dt))
                .collect();
            sol.times.push(t_new);
            sol.u.push(uf);
            sol.v.push(vf);
            sol.flux.push(q);
            sol.boundary_stress.push(stress);
        }
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeError {
    pub t_hat: f64,
    pub u_rel_l2: f64,
    pub u_linf: f64,
    /// Velocity errors against the series at `t_hat - dt/2`; NaN where the
    /// series has no pointwise value.
    pub v_rel_l2: f64,
    pub v_linf: f64,
    /// Within one time step of a load discontinuity.
    pub near_jump: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub eta_hat: f64,
    pub times: Vec<TimeError>,
}

impl ComparisonReport {
    /// Largest displacement error, skipping flagged times when `η̂ = 0`.
    pub fn max_u_rel_l2(&self) -> f64 {
        self.counted().map(|e| e.u_rel_l2).fold(0.0, f64::max)
    }

    pub fn max_v_rel_l2(&self) -> f64 {
        self.counted().map(|e| e.v_rel_l2).filter(|v| !v.is_nan()).fold(0.0, f64::max)
    }

    fn counted(&self) -> impl Iterator<Item = &TimeError> {
        let elastic = self.eta_hat == 0.0;
        self.times.iter().filter(move |e| !(elastic && e.near_jump))
    }

    pub fn at(&self, t_hat: f64) -> Option<&TimeError> {
        self.times.iter().find(|e| (e.t_hat - t_hat).abs() < 1e-9 * t_hat.max(1.0))
    }
}

/// Trapezoid-weighted discrete L² norm of `a - b` and of `b`, and `max |a - b|`.
fn norms(a: &[f64], b: &[f64], h: f64) -> (f64, f64, f64) {
    let n = a.len();
    let (mut diff, mut base, mut linf) = (0.0, 0.0, 0.0f64);
    for i in 0..n {
        let w = if i == 0 || i + 1 == n { 0.5 * h } else { h };
        let d = a[i] - b[i];
        diff += w * d * d;
        base += w * b[i] * b[i];
        linf = linf.max(d.abs());
    }
    (diff.sqrt(), base.sqrt(), linf)
}

fn relative(diff: f64, base: f64) -> f64 {
    if base > 0.0 {
        diff / base
    } else {
        diff
    }
}

/// Errors of the finite-difference solution against the series at every
/// stored time after the initial one, optionally restricted to `only`.
pub fn compare_with_series(
    fd: &FdSolution,
    sig: &Signal,
    cfg: &SeriesConfig,
    only: Option<&[f64]>,
) -> Result<ComparisonReport> {
    let h = fd.x[1] - fd.x[0];
    let jumps = sig.jump_times();
    let mut times = Vec::new();
    for (k, &t) in fd.times.iter().enumerate().skip(1) {
        if let Some(sel) = only {
            if !sel.iter().any(|s| (s - t).abs() < 1e-9 * t.max(1.0)) {
                continue;
            }
        }
        let slice = TimeSlice::new(t, fd.eta_hat, sig, cfg)?;
        let us: Vec<f64> = fd.x.iter().map(|&x| slice.displacement(x)).collect();
        let (ud, ub, ulinf) = norms(&fd.u[k], &us, h);

        let mid = t - 0.5 * fd.dt_hat;
        let vs = TimeSlice::new(mid, fd.eta_hat, sig, cfg)?;
        let vals: Result<Vec<f64>> = fd.x.iter().map(|&x| vs.velocity(x)).collect();
        let (v_rel_l2, v_linf) = match vals {
            Ok(vals) => {
                let (vd, vb, vlinf) = norms(&fd.v[k], &vals, h);
                (relative(vd, vb), vlinf)
            }
            Err(e) if e.is_divergent() => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        let near_jump = jumps.iter().any(|&j| t - j >= -1e-12 && t - j <= fd.dt_hat * (1.0 + 1e-9));
        times.push(TimeError { t_hat: t, u_rel_l2: relative(ud, ub), u_linf: ulinf, v_rel_l2, v_linf, near_jump });
    }
    Ok(ComparisonReport { eta_hat: fd.eta_hat, times })
}
