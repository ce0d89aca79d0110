//! Closed-form response maxima, the elastic blow-up diagnostic and the
//! `(η̂, ε̂)` design map.
//!
//! Under a unit step the surface velocity peaks at `t = 0⁺`, where
//! `v̂(1, 0) = 2 Σ 1/(1 + η̂ λ_n) = tanh(1/√η̂)/√η̂`. A trapezoidal pulse with
//! rise time `ε̂` peaks at `(1, ε̂)` with value `-û_step(1, ε̂)/ε̂`.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::{modal_rate, SeriesConfig, SeriesValue, TimeSlice};
use crate::signals::Signal;
use crate::spectrum::{eigenfunction, eigenvalue, inverse_eigenvalue_tail, inverse_square_eigenvalue_tail, EigenMode};
use crate::sum::CompensatedSum;

fn check_viscous(eta_hat: f64, what: &'static str) -> Result<()> {
    if eta_hat == 0.0 {
        return Err(Error::BlowUp(what));
    }
    if !(eta_hat.is_finite() && eta_hat > 0.0) {
        return Err(Error::domain(format!("eta_hat must be finite and > 0, got {eta_hat}")));
    }
    Ok(())
}

/// Peak surface velocity under a unit step, `tanh(1/√η̂)/√η̂`.
pub fn vmax_closed(eta_hat: f64) -> Result<f64> {
    check_viscous(eta_hat, "step-load surface velocity")?;
    let y = 1.0 / eta_hat.sqrt();
    Ok(y * y.tanh())
}

/// `sinh(z) - z` without cancellation for small `z`.
fn sinh_minus_id(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        return z.sinh() - z;
    }
    let z2 = z * z;
    let mut term = z * z2 / 6.0;
    let mut acc = 0.0f64;
    let mut k = 3.0;
    while term.abs() > 1e-18 * acc.abs() {
        acc += term;
        term *= z2 / ((k + 1.0) * (k + 2.0));
        k += 2.0;
    }
    acc
}

/// Peak fluid power density under a unit step,
/// `(tanh²(1/√η̂) + √η̂ tanh(1/√η̂) - 1) / (2η̂)`.
pub fn pmax_closed(eta_hat: f64) -> Result<f64> {
    check_viscous(eta_hat, "step-load power density")?;
    let y = 1.0 / eta_hat.sqrt();
    // tanh(y)/y - sech²(y), rewritten for small y
    let bracket = if y >= 1.0 {
        let sech = 1.0 / y.cosh();
        y.tanh() / y - sech * sech
    } else {
        let c = y.cosh();
        0.5 * sinh_minus_id(2.0 * y) / (y * c * c)
    };
    Ok(bracket / (2.0 * eta_hat))
}

/// Partial sum of a maximum series with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    /// Sum over the first `n_terms` modes.
    pub raw: f64,
    /// Bound on `|exact - raw|`.
    pub raw_bound: f64,
    /// `raw` plus the exact sum of the leading-order tail.
    pub corrected: f64,
    /// Bound on `|exact - corrected|`.
    pub corrected_bound: f64,
}

/// `2 Σ_{n<N} 1/(1 + η̂ λ_n)`. The tail differs from `2 Σ 1/(η̂ λ_n)` by at
/// most `2 Σ 1/(η̂ λ_n)²`, and that leading tail is summed exactly.
pub fn vmax_partial_sum(eta_hat: f64, n_terms: usize) -> Result<PartialSum> {
    check_viscous(eta_hat, "step-load surface velocity")?;
    let raw = 2.0 * crate::sum::sum((0..n_terms).map(|n| 1.0 / (1.0 + eta_hat * eigenvalue(n))));
    let s1 = inverse_eigenvalue_tail(n_terms);
    let s2 = inverse_square_eigenvalue_tail(n_terms);
    Ok(PartialSum {
        raw,
        raw_bound: 2.0 * s1 / eta_hat,
        corrected: raw + 2.0 * s1 / eta_hat,
        corrected_bound: 2.0 * s2 / (eta_hat * eta_hat),
    })
}

/// `2 Σ_{n<N} 1/(1 + η̂ λ_n)²`.
pub fn pmax_partial_sum(eta_hat: f64, n_terms: usize) -> Result<PartialSum> {
    check_viscous(eta_hat, "step-load power density")?;
    let raw = 2.0 * crate::sum::sum((0..n_terms).map(|n| (1.0 + eta_hat * eigenvalue(n)).powi(-2)));
    let bound = 2.0 * inverse_square_eigenvalue_tail(n_terms) / (eta_hat * eta_hat);
    Ok(PartialSum { raw, raw_bound: bound, corrected: raw, corrected_bound: bound })
}

/// Peak surface velocity under a trapezoidal pulse with rise time `ε̂`,
/// `(2/ε̂) Σ (1 - exp(-λ_n ε̂ / (1 + η̂ λ_n))) / λ_n`. Finite for every
/// `η̂ >= 0`. The tolerance in `cfg` applies to the returned value.
pub fn vmax_trapezoid(eta_hat: f64, eps_hat: f64, cfg: &SeriesConfig) -> Result<SeriesValue> {
    if !(eps_hat.is_finite() && eps_hat > 0.0) {
        return Err(Error::domain(format!("eps_hat must be finite and > 0, got {eps_hat}")));
    }
    let step = Signal::step(0.0)?;
    let sub = SeriesConfig { tol: cfg.tol * eps_hat, ..*cfg };
    let slice = TimeSlice::new(eps_hat, eta_hat, &step, &sub)?;
    let order = slice.displacement_order();
    Ok(SeriesValue {
        value: -slice.displacement(1.0) / eps_hat,
        n_used: order.n_used,
        tail_bound: order.tail_bound / eps_hat,
    })
}

/// Partial sums `S_0, ..., S_{n_terms-1}` of the elastic step-load velocity
/// series at `(x, t) = (1, 0)`. Every term equals 2, so `S_N = 2(N + 1)`.
pub fn divergence_diagnostic(n_terms: usize) -> Result<Vec<f64>> {
    if n_terms < 1 {
        return Err(Error::domain("divergence diagnostic needs at least one term"));
    }
    let step = Signal::step(0.0)?;
    let mut acc = 0.0;
    Ok((0..n_terms)
        .map(|n| {
            acc -= modal_rate(EigenMode::new(n), 0.0, &step, 0.0) * eigenfunction(n, 1.0);
            acc
        })
        .collect())
}

pub const CRITICAL_ETA_BRACKET: (f64, f64) = (1e-12, 1e6);

/// Smallest `η̂` whose step-load peak velocity does not exceed `v_th_hat`.
pub fn critical_eta(v_th_hat: f64) -> Result<f64> {
    if !(v_th_hat.is_finite() && v_th_hat > 0.0) {
        return Err(Error::domain(format!("threshold must be finite and > 0, got {v_th_hat}")));
    }
    let (mut lo, mut hi) = CRITICAL_ETA_BRACKET;
    let f = |eta: f64| vmax_closed(eta).map(|v| v - v_th_hat);
    if !(f(lo)? > 0.0 && f(hi)? < 0.0) {
        return Err(Error::domain(format!(
            "threshold {v_th_hat} is not bracketed by eta_hat in [{lo:e}, {hi:e}]"
        )));
    }
    // bisection on log η̂; vmax_closed is strictly decreasing
    while hi / lo - 1.0 > 1e-14 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo)?.abs() < f(hi)?.abs() { lo } else { hi })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VMax {
    Finite(f64),
    /// Elastic medium under an instantaneous load.
    Infinite,
}

impl VMax {
    pub fn value(self) -> f64 {
        match self {
            VMax::Finite(v) => v,
            VMax::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, VMax::Infinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignCell {
    pub eta_hat: f64,
    pub eps_hat: f64,
    pub v_max_hat: VMax,
    /// `V̂_th - V̂_max`; `-∞` for an infinite peak.
    pub margin: f64,
    pub feasible: bool,
}

/// Point on the curve `V̂_max(η̂, ε̂*) = V̂_th`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub eta_hat: f64,
    pub eps_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMap {
    /// Row-major: `eta_grid` outer, `eps_grid` inner.
    pub cells: Vec<DesignCell>,
    pub boundary: Vec<BoundaryPoint>,
    pub v_th_hat: f64,
}

/// Peak discharge velocity of a pulse with rise time `eps_hat`; `eps_hat = 0`
/// is the unit step.
pub fn peak_velocity(eta_hat: f64, eps_hat: f64, cfg: &SeriesConfig) -> Result<VMax> {
    if eps_hat == 0.0 {
        if eta_hat == 0.0 {
            return Ok(VMax::Infinite);
        }
        return vmax_closed(eta_hat).map(VMax::Finite);
    }
    vmax_trapezoid(eta_hat, eps_hat, cfg).map(|v| VMax::Finite(v.value))
}

pub fn design_cell(eta_hat: f64, eps_hat: f64, v_th_hat: f64, cfg: &SeriesConfig) -> Result<DesignCell> {
    let v = peak_velocity(eta_hat, eps_hat, cfg)?;
    let margin = match v {
        VMax::Finite(v) => v_th_hat - v,
        VMax::Infinite => f64::NEG_INFINITY,
    };
    Ok(DesignCell { eta_hat, eps_hat, v_max_hat: v, margin, feasible: margin > 0.0 })
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{name} grid is empty")));
    }
    if let Some(bad) = grid.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!("{name} grid values must be finite and >= 0, got {bad}")));
    }
    Ok(())
}

/// Root of the margin in `ε̂` between two rise times with opposite signs.
fn bisect_eps(eta_hat: f64, mut lo: f64, mut hi: f64, v_th_hat: f64, cfg: &SeriesConfig) -> Result<f64> {
    let margin = |eps: f64| design_cell(eta_hat, eps, v_th_hat, cfg).map(|c| c.margin);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        // once the lower end is tiny a geometric step wastes evaluations
        let mid = if lo > 0.0 && hi / lo < 4.0 { 0.5 * (lo + hi) } else { mid };
        if margin(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Feasibility of every `(η̂, ε̂)` pair against the threshold, plus the
/// boundary curve `ε̂*(η̂)` for every η̂ column whose margin changes sign. The
/// peak velocity decreases in `ε̂`, so each column has at most one crossing.
pub fn design_map(
    eta_grid: &[f64],
    eps_grid: &[f64],
    v_th_hat: f64,
    cfg: &SeriesConfig,
    exec: Execution,
) -> Result<DesignMap> {
    check_grid("eta", eta_grid)?;
    check_grid("eps", eps_grid)?;
    if !(v_th_hat.is_finite() && v_th_hat > 0.0) {
        return Err(Error::domain(format!("threshold must be finite and > 0, got {v_th_hat}")));
    }
    let points: Vec<(f64, f64)> =
        eta_grid.iter().flat_map(|&eta| eps_grid.iter().map(move |&eps| (eta, eps))).collect();
    let cells = exec.try_map(&points, |&(eta, eps)| design_cell(eta, eps, v_th_hat, cfg))?;

    let mut order: Vec<usize> = (0..eps_grid.len()).collect();
    order.sort_by(|&a, &b| eps_grid[a].total_cmp(&eps_grid[b]));
    let columns: Vec<usize> = (0..eta_grid.len()).collect();
    let boundary = exec.try_map(&columns, |&i| {
        let column = &cells[i * eps_grid.len()..(i + 1) * eps_grid.len()];
        for pair in order.windows(2) {
            let (a, b) = (&column[pair[0]], &column[pair[1]]);
            if a.margin <= 0.0 && b.margin > 0.0 {
                let eps_star = bisect_eps(a.eta_hat, a.eps_hat, b.eps_hat, v_th_hat, cfg)?;
                return Ok(Some(BoundaryPoint { eta_hat: a.eta_hat, eps_star }));
            }
        }
        Ok(None)
    })?;
    Ok(DesignMap { cells, boundary: boundary.into_iter().flatten().collect(), v_th_hat })
}

/// Neumaier sum of `2 Σ_{n<N} 1/λ_n (1 - exp(-λ_n ε / (1 + η λ_n))) / ε`,
/// the raw form of [`vmax_trapezoid`].
pub fn vmax_trapezoid_partial_sum(eta_hat: f64, eps_hat: f64, n_terms: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for n in 0..n_terms {
        let m = EigenMode::new(n);
        acc.add(-2.0 / m.lambda_hat * (-m.rate(eta_hat) * eps_hat).exp_m1());
    }
    acc.value() / eps_hat
}
