//! Eigenfunction-expansion solution of the dimensionless confined
//! compression problem
//!
//! ```text
//! u_t - u_xx - η u_txx = 0,   u(0,t) = 0,   u_x(1,t) + η u_tx(1,t) = -P(t),   u(x,0) = 0
//! ```
//!
//! with `v = -u_t`, `p = σ₀ + P = ∫_x^1 v`, `σ = -P`.
//!
//! Each modal coefficient is `u_n = -2(-1)^n (P - G_n) / λ_n` where
//! `G_n = P - a_n (e^{-a_n ·} * P)` and `a_n = λ_n / (1 + η λ_n)`. As
//! `n → ∞`, `G_n` tends to a mode-independent limit `G_∞` (the `a = 1/η`
//! relaxation, or zero for the purely elastic medium), and
//! `Σ 2(-1)^n y_n / λ_n = x`. Splitting that limit off gives
//!
//! ```text
//! u = -x (P - G_∞) + Σ 2(-1)^n (G_n - G_∞) y_n / λ_n
//! ```
//!
//! whose terms decay like `1/λ_n²`. Velocity and pressure are treated the
//! same way through `F_n = dG_n/dt`. Tail bounds are derived per load
//! primitive from `λ_n = (2n + 1)² π² / 4`; see [`ModalKernel::tail`].

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::signals::{phi1, PrimitiveKind, Signal};
use crate::spectrum::{
    eigenfunction, eigenvalue, exponential_over_eigenvalue_tail, exponential_tail,
    inverse_eigenvalue_tail, inverse_square_eigenvalue_tail, parity, reflected_eigenfunction,
    wavenumber, EigenMode,
};
use crate::sum::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Displacement,
    Velocity,
    Pressure,
    Power,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Displacement => "displacement",
            Field::Velocity => "velocity",
            Field::Pressure => "pressure",
            Field::Power => "power",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Smallest mode count whose certified tail bound is below `tol`.
    Auto,
    /// Exactly this many modes; the tail bound is reported, not enforced.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Absolute truncation tolerance.
    pub tol: f64,
    /// Cap on the number of modes in auto mode.
    pub n_max: usize,
    pub mode: Truncation,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { tol: 1e-10, n_max: 4_000_000, mode: Truncation::Auto }
    }
}

impl SeriesConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn fixed(n: usize) -> Self {
        Self { mode: Truncation::Fixed(n), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::domain(format!("series tolerance must be > 0, got {}", self.tol)));
        }
        if self.n_max < 1 {
            return Err(Error::domain("series mode cap must be >= 1"));
        }
        Ok(())
    }
}

/// Number of modes kept and the certified bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub n_used: usize,
    pub tail_bound: f64,
}

/// A truncated series value with its certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub n_used: usize,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x_hat: f64,
    pub t_hat: f64,
    pub u_hat: f64,
    pub v_hat: f64,
    pub p_hat: f64,
    pub sigma0_hat: f64,
    pub sigma_hat: f64,
    pub n_used: usize,
    pub tail_bound: f64,
}

/// `u_n(t) = -2(-1)^n / (1 + η λ_n) · (e^{-a_n ·} * P)(t)`.
pub fn modal_coeff(mode: EigenMode, eta_hat: f64, sig: &Signal, t_hat: f64) -> f64 {
    if !(t_hat > 0.0) {
        return 0.0;
    }
    let rate = mode.rate(eta_hat);
    let conv: f64 = crate::sum::sum(sig.primitives().iter().map(|p| p.exp_convolve(rate, t_hat)));
    -2.0 * mode.parity() / (1.0 + eta_hat * mode.lambda_hat) * conv
}

/// `u_n'(t) = -2(-1)^n / (1 + η λ_n) P(t) - a_n u_n(t)`.
pub fn modal_rate(mode: EigenMode, eta_hat: f64, sig: &Signal, t_hat: f64) -> f64 {
    if t_hat < 0.0 {
        return 0.0;
    }
    let forcing = -2.0 * mode.parity() / (1.0 + eta_hat * mode.lambda_hat) * sig.eval(t_hat);
    forcing - mode.rate(eta_hat) * modal_coeff(mode, eta_hat, sig, t_hat)
}

#[derive(Debug, Clone, Copy)]
struct Active {
    kind: PrimitiveKind,
    weight: f64,
    /// Time since the primitive switched on, `>= 0`.
    since: f64,
}

/// Load primitives active at one instant, with the per-mode relaxation
/// kernels and their tail bounds.
#[derive(Debug, Clone)]
pub(crate) struct ModalKernel {
    eta: f64,
    active: Vec<Active>,
    load: f64,
    slope: f64,
}

fn sanitize(bound: f64) -> f64 {
    if bound.is_nan() {
        f64::INFINITY
    } else {
        bound
    }
}

impl ModalKernel {
    pub(crate) fn new(eta: f64, sig: &Signal, t: f64) -> Self {
        // primitives of the same kind and shift are merged so that cancelling
        // jumps do not produce a spurious divergence
        let mut active: Vec<Active> = Vec::new();
        for p in sig.primitives().iter().filter(|p| t >= p.shift) {
            let since = t - p.shift;
            match active.iter_mut().find(|a| a.kind == p.kind && a.since == since) {
                Some(a) => a.weight += p.weight,
                None => active.push(Active { kind: p.kind, weight: p.weight, since }),
            }
        }
        active.retain(|a| a.weight != 0.0);
        Self { eta, active, load: sig.eval(t), slope: sig.slope(t) }
    }

    fn rate(&self, n: usize) -> f64 {
        let lambda = eigenvalue(n);
        lambda / (1.0 + self.eta * lambda)
    }

    /// `G(a) = P - a (e^{-a ·} * P)`.
    fn relaxed(&self, rate: f64) -> f64 {
        self.active
            .iter()
            .map(|p| {
                p.weight
                    * match p.kind {
                        PrimitiveKind::Step => (-rate * p.since).exp(),
                        PrimitiveKind::Ramp => p.since * phi1(rate * p.since),
                    }
            })
            .sum()
    }

    fn relaxed_limit(&self) -> f64 {
        if self.eta > 0.0 {
            return self.relaxed(1.0 / self.eta);
        }
        self.active
            .iter()
            .filter(|p| p.kind == PrimitiveKind::Step && p.since == 0.0)
            .map(|p| p.weight)
            .sum()
    }

    /// `F(a) = dG/dt` away from load jumps.
    fn flux(&self, rate: f64) -> f64 {
        self.active
            .iter()
            .map(|p| {
                let e = (-rate * p.since).exp();
                p.weight
                    * match p.kind {
                        PrimitiveKind::Step => -rate * e,
                        PrimitiveKind::Ramp => e,
                    }
            })
            .sum()
    }

    /// Mode-independent limit of `F`. For `η = 0` a step exactly at its
    /// switch-on instant has no limit; its part is taken as zero so the
    /// expansion reduces to the plain partial sums.
    fn flux_limit(&self) -> f64 {
        if self.eta > 0.0 {
            return self.flux(1.0 / self.eta);
        }
        self.active
            .iter()
            .filter(|p| p.kind == PrimitiveKind::Ramp && p.since == 0.0)
            .map(|p| p.weight)
            .sum()
    }

    /// Certified bound on the contribution of modes `n >= n0` to `field`,
    /// uniform in `x` (all eigenfunctions are bounded by one). With
    /// `β_n = 1/(η(1 + ηλ_n)) <= 1/(η² λ_n)` the per-primitive estimates are
    ///
    /// * step, `η > 0`: `0 <= e^{-a d} - e^{-d/η} <= e^{-a d} min(1, β d)`
    /// * ramp, `η > 0`: the same bound integrated over `[0, d]`
    /// * `η = 0`: the relaxation terms are `e^{-λ d}` times powers of `λ`,
    ///   summed with the eigenvalue gaps `2π²(n + 1)`
    ///
    /// The power density is squared, so there the per-primitive bounds on
    /// `|u_n'|` are combined with Cauchy–Schwarz over the active primitives.
    pub(crate) fn tail(&self, field: Field, n0: usize) -> f64 {
        let eta = self.eta;
        let s1 = inverse_eigenvalue_tail(n0);
        let s2 = inverse_square_eigenvalue_tail(n0);
        let a0 = self.rate(n0);
        let mut total = 0.0;
        let mut power = 0.0;
        for p in &self.active {
            let w = p.weight.abs();
            let d = p.since;
            let decay = (-a0 * d).exp();
            let b = match (field, p.kind, eta > 0.0) {
                (Field::Displacement, PrimitiveKind::Step, true) => {
                    2.0 * w * decay * s1.min(d / (eta * eta) * s2)
                }
                (Field::Displacement, PrimitiveKind::Step, false) => {
                    if d == 0.0 {
                        0.0
                    } else {
                        2.0 * w * exponential_over_eigenvalue_tail(n0, d)
                    }
                }
                (Field::Displacement, PrimitiveKind::Ramp, true) => {
                    2.0 * w * (s1 * d * phi1(a0 * d)).min(d * d / (2.0 * eta * eta) * s2)
                }
                (Field::Displacement, PrimitiveKind::Ramp, false) => 2.0 * w * s2.min(d * s1),
                (Field::Velocity | Field::Pressure, PrimitiveKind::Step, true) => {
                    let fine = (1.0f64).max(d / eta) * decay / (eta * eta) * s2;
                    let coarse = 2.0 * decay / eta * s1;
                    2.0 * w * fine.min(coarse)
                }
                (Field::Velocity | Field::Pressure, PrimitiveKind::Step, false) => {
                    if d == 0.0 {
                        f64::INFINITY
                    } else {
                        2.0 * w * exponential_tail(n0, d)
                    }
                }
                (Field::Velocity | Field::Pressure, PrimitiveKind::Ramp, true) => {
                    2.0 * w * decay * s1.min(d / (eta * eta) * s2)
                }
                (Field::Velocity | Field::Pressure, PrimitiveKind::Ramp, false) => {
                    if d == 0.0 {
                        0.0
                    } else {
                        2.0 * w * exponential_over_eigenvalue_tail(n0, d)
                    }
                }
                (Field::Power, PrimitiveKind::Step, true) => {
                    4.0 * w * w * decay * decay / (eta * eta) * s2
                }
                (Field::Power, PrimitiveKind::Step, false) => {
                    if d == 0.0 {
                        f64::INFINITY
                    } else {
                        4.0 * w * w * exponential_tail(n0, 2.0 * d)
                    }
                }
                (Field::Power, PrimitiveKind::Ramp, _) => 4.0 * w * w * s2,
            };
            match field {
                Field::Power => power += sanitize(b),
                _ => total += sanitize(b),
            }
        }
        match field {
            Field::Power => 0.5 * self.active.len() as f64 * power,
            Field::Pressure => total / wavenumber(n0),
            _ => total,
        }
    }
}

fn choose_order(kernel: &ModalKernel, field: Field, cfg: &SeriesConfig) -> Result<Truncated> {
    let tail = |n: usize| kernel.tail(field, n);
    match cfg.mode {
        Truncation::Fixed(n) => Ok(Truncated { n_used: n, tail_bound: tail(n) }),
        Truncation::Auto => {
            let at0 = tail(0);
            if at0 < cfg.tol {
                return Ok(Truncated { n_used: 0, tail_bound: at0 });
            }
            let at_cap = tail(cfg.n_max);
            if !(at_cap < cfg.tol) {
                return Err(Error::Truncation {
                    field: field.name(),
                    achieved: at_cap,
                    tol: cfg.tol,
                    n_max: cfg.n_max,
                });
            }
            // tail bounds are nonincreasing in the mode count
            let (mut lo, mut hi) = (0usize, cfg.n_max);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if tail(mid) < cfg.tol {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(Truncated { n_used: hi, tail_bound: tail(hi) })
        }
    }
}

fn check_inputs(eta_hat: f64, t_hat: f64, cfg: &SeriesConfig) -> Result<()> {
    cfg.validate()?;
    if !(eta_hat.is_finite() && eta_hat >= 0.0) {
        return Err(Error::domain(format!("eta_hat must be finite and >= 0, got {eta_hat}")));
    }
    if !(t_hat.is_finite() && t_hat >= 0.0) {
        return Err(Error::domain(format!("t_hat must be finite and >= 0, got {t_hat}")));
    }
    Ok(())
}

/// Number of modes needed for `field` at `t_hat` under `cfg`.
///
/// For `η = 0` velocity, pressure and power have no pointwise value at a
/// load jump; auto mode then fails with an infinite achieved bound.
pub fn truncation_order(
    eta_hat: f64,
    sig: &Signal,
    t_hat: f64,
    field: Field,
    cfg: &SeriesConfig,
) -> Result<Truncated> {
    check_inputs(eta_hat, t_hat, cfg)?;
    choose_order(&ModalKernel::new(eta_hat, sig, t_hat), field, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basis {
    /// `closed · x + Σ c_n sin(k_n x)`
    Odd,
    /// `closed · (1 - x²)/2 + Σ c_n sin(k_n (1 - x))`
    Reflected,
}

#[derive(Debug, Clone)]
struct Expansion {
    basis: Basis,
    closed: f64,
    coeffs: Vec<f64>,
    tail_bound: f64,
}

impl Expansion {
    fn eval(&self, x: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        match self.basis {
            Basis::Odd => {
                acc.add(self.closed * x);
                for (n, c) in self.coeffs.iter().enumerate() {
                    acc.add(c * eigenfunction(n, x));
                }
            }
            Basis::Reflected => {
                acc.add(self.closed * 0.5 * (1.0 - x) * (1.0 + x));
                for (n, c) in self.coeffs.iter().enumerate() {
                    acc.add(c * reflected_eigenfunction(n, x));
                }
            }
        }
        acc.value()
    }

    fn n_used(&self) -> usize {
        self.coeffs.len()
    }
}

/// All modal data at one instant, ready to be sampled at any `x`.
#[derive(Debug, Clone)]
pub struct TimeSlice {
    t_hat: f64,
    load: f64,
    displacement: Expansion,
    velocity: Result<Expansion>,
    pressure: Result<Expansion>,
}

impl TimeSlice {
    pub fn new(t_hat: f64, eta_hat: f64, sig: &Signal, cfg: &SeriesConfig) -> Result<Self> {
        check_inputs(eta_hat, t_hat, cfg)?;
        let kernel = ModalKernel::new(eta_hat, sig, t_hat);

        let order = choose_order(&kernel, Field::Displacement, cfg)?;
        let g_inf = kernel.relaxed_limit();
        let displacement = Expansion {
            basis: Basis::Odd,
            closed: -(kernel.load - g_inf),
            coeffs: (0..order.n_used)
                .map(|n| 2.0 * parity(n) / eigenvalue(n) * (kernel.relaxed(kernel.rate(n)) - g_inf))
                .collect(),
            tail_bound: order.tail_bound,
        };

        let f_inf = kernel.flux_limit();
        let closed = kernel.slope - f_inf;
        let velocity = choose_order(&kernel, Field::Velocity, cfg).map(|order| Expansion {
            basis: Basis::Odd,
            closed,
            coeffs: (0..order.n_used)
                .map(|n| -2.0 * parity(n) / eigenvalue(n) * (kernel.flux(kernel.rate(n)) - f_inf))
                .collect(),
            tail_bound: order.tail_bound,
        });
        let pressure = choose_order(&kernel, Field::Pressure, cfg).map(|order| Expansion {
            basis: Basis::Reflected,
            closed,
            coeffs: (0..order.n_used)
                .map(|n| -2.0 / (eigenvalue(n) * wavenumber(n)) * (kernel.flux(kernel.rate(n)) - f_inf))
                .collect(),
            tail_bound: order.tail_bound,
        });

        Ok(Self { t_hat, load: kernel.load, displacement, velocity, pressure })
    }

    pub fn t_hat(&self) -> f64 {
        self.t_hat
    }

    /// `P(t)` at this instant.
    pub fn load(&self) -> f64 {
        self.load
    }

    pub fn displacement(&self, x_hat: f64) -> f64 {
        self.displacement.eval(x_hat)
    }

    pub fn displacement_order(&self) -> Truncated {
        Truncated { n_used: self.displacement.n_used(), tail_bound: self.displacement.tail_bound }
    }

    pub fn velocity(&self, x_hat: f64) -> Result<f64> {
        self.velocity.as_ref().map(|e| e.eval(x_hat)).map_err(Clone::clone)
    }

    /// `p = ∫_x^1 v`; exactly zero at the drained boundary.
    pub fn pressure(&self, x_hat: f64) -> Result<f64> {
        self.pressure.as_ref().map(|e| e.eval(x_hat)).map_err(Clone::clone)
    }

    pub fn sample(&self, x_hat: f64) -> Result<FieldSample> {
        check_position(x_hat)?;
        let velocity = self.velocity.as_ref().map_err(Clone::clone)?;
        let pressure = self.pressure.as_ref().map_err(Clone::clone)?;
        let sigma0 = -self.load + pressure.eval(x_hat);
        Ok(FieldSample {
            x_hat,
            t_hat: self.t_hat,
            u_hat: self.displacement.eval(x_hat),
            v_hat: velocity.eval(x_hat),
            p_hat: sigma0 + self.load,
            sigma0_hat: sigma0,
            sigma_hat: -self.load,
            n_used: self.displacement.n_used().max(velocity.n_used()).max(pressure.n_used()),
            tail_bound: self.displacement.tail_bound.max(velocity.tail_bound).max(pressure.tail_bound),
        })
    }
}

fn check_position(x_hat: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x_hat) {
        return Err(Error::domain(format!("x_hat must lie in [0, 1], got {x_hat}")));
    }
    Ok(())
}

/// Displacement, velocity, pressure and stresses at one space-time point.
pub fn evaluate_fields(
    x_hat: f64,
    t_hat: f64,
    eta_hat: f64,
    sig: &Signal,
    cfg: &SeriesConfig,
) -> Result<FieldSample> {
    check_position(x_hat)?;
    TimeSlice::new(t_hat, eta_hat, sig, cfg)?.sample(x_hat)
}

/// One [`TimeSlice`] per requested instant, in input order.
pub fn time_slices(
    ts: &[f64],
    eta_hat: f64,
    sig: &Signal,
    cfg: &SeriesConfig,
    exec: Execution,
) -> Result<Vec<TimeSlice>> {
    exec.try_map(ts, |&t| TimeSlice::new(t, eta_hat, sig, cfg))
}

/// Fluid power density `∫_0^1 v² dx = ½ Σ (u_n')²`.
pub fn power_density(t_hat: f64, eta_hat: f64, sig: &Signal, cfg: &SeriesConfig) -> Result<SeriesValue> {
    check_inputs(eta_hat, t_hat, cfg)?;
    let kernel = ModalKernel::new(eta_hat, sig, t_hat);
    let order = choose_order(&kernel, Field::Power, cfg)?;
    let mut acc = CompensatedSum::new();
    for n in 0..order.n_used {
        let rate_n = 2.0 / eigenvalue(n) * (kernel.slope - kernel.flux(kernel.rate(n)));
        acc.add(0.5 * rate_n * rate_n);
    }
    Ok(SeriesValue { value: acc.value(), n_used: order.n_used, tail_bound: order.tail_bound })
}

/// Discharge velocity under the trapezoidal pulse, assembled from four
/// shifted step-load displacements `u_step`:
/// `V = (-u_step(t) + u_step(t-ε) + u_step(t-τ-ε) - u_step(t-τ-2ε)) / ε`.
pub fn trapezoid_velocity(
    x_hat: f64,
    t_hat: f64,
    eta_hat: f64,
    eps_hat: f64,
    tau_hat: f64,
    cfg: &SeriesConfig,
) -> Result<f64> {
    if !(eps_hat > 0.0) {
        return Err(Error::domain(format!("eps_hat must be > 0, got {eps_hat}")));
    }
    if !(tau_hat > 0.0) {
        return Err(Error::domain(format!("tau_hat must be > 0, got {tau_hat}")));
    }
    check_position(x_hat)?;
    let step = Signal::step(0.0)?;
    let sub = SeriesConfig { tol: cfg.tol * eps_hat / 4.0, ..*cfg };
    let shifts = [
        (0.0, -1.0),
        (eps_hat, 1.0),
        (tau_hat + eps_hat, 1.0),
        (tau_hat + 2.0 * eps_hat, -1.0),
    ];
    let mut acc = CompensatedSum::new();
    for (shift, sign) in shifts {
        let d = t_hat - shift;
        if d >= 0.0 {
            acc.add(sign * TimeSlice::new(d, eta_hat, &step, &sub)?.displacement(x_hat));
        }
    }
    Ok(acc.value() / eps_hat)
}
