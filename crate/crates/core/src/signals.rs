//! Boundary traction histories built from shifted steps and unit-slope ramps.
//!
//! Loads are kept symbolic so that convolution against `exp(-a t)` is exact
//! for every relaxation rate, including the very stiff high modes.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveKind {
    /// `weight * H(t - shift)`
    Step,
    /// `weight * (t - shift) * H(t - shift)`
    Ramp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub kind: PrimitiveKind,
    pub shift: f64,
    pub weight: f64,
}

impl Primitive {
    pub fn step(shift: f64, weight: f64) -> Result<Self> {
        Self::new(PrimitiveKind::Step, shift, weight)
    }

    pub fn ramp(shift: f64, weight: f64) -> Result<Self> {
        Self::new(PrimitiveKind::Ramp, shift, weight)
    }

    pub fn new(kind: PrimitiveKind, shift: f64, weight: f64) -> Result<Self> {
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(Error::domain(format!("primitive shift must be finite and >= 0, got {shift}")));
        }
        if !weight.is_finite() {
            return Err(Error::domain(format!("primitive weight must be finite, got {weight}")));
        }
        Ok(Self { kind, shift, weight })
    }

    /// Value at `t`; steps are right-continuous (`H(0) = 1`).
    pub fn eval(&self, t: f64) -> f64 {
        let d = t - self.shift;
        if d < 0.0 {
            return 0.0;
        }
        match self.kind {
            PrimitiveKind::Step => self.weight,
            PrimitiveKind::Ramp => self.weight * d,
        }
    }

    /// `∫_0^t exp(-rate (t - s)) p(s) ds` in closed form.
    pub fn exp_convolve(&self, rate: f64, t: f64) -> f64 {
        let d = t - self.shift;
        if d <= 0.0 {
            return 0.0;
        }
        let z = rate * d;
        match self.kind {
            PrimitiveKind::Step => self.weight * d * phi1(z),
            PrimitiveKind::Ramp => self.weight * d * d * phi2(z),
        }
    }
}

/// `(1 - e^{-z}) / z`, continuous at zero.
pub(crate) fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `(z - 1 + e^{-z}) / z^2`, continuous at zero.
pub(crate) fn phi2(z: f64) -> f64 {
    if z < 0.1 {
        // alternating Taylor series, sum_k (-z)^k / (k+2)!
        let mut term = 0.5;
        let mut acc = 0.0;
        for k in 0..12 {
            acc += term;
            term *= -z / (k as f64 + 3.0);
        }
        acc
    } else {
        (z + (-z).exp_m1()) / (z * z)
    }
}

/// Closed-form shape a signal was built with, used for exact pointwise
/// evaluation. Adding primitives turns a signal into `Custom`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
enum Shape {
    #[default]
    Custom,
    Trapezoid { eps: f64, tau: f64 },
}

/// Dimensionless boundary traction `P(t)` as a finite sum of primitives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Signal {
    primitives: Vec<Primitive>,
    label: String,
    shape: Shape,
}

impl Signal {
    pub fn new(label: impl Into<String>) -> Self {
        Self { primitives: Vec::new(), label: label.into(), shape: Shape::Custom }
    }

    pub fn with(mut self, p: Primitive) -> Self {
        self.push(p);
        self
    }

    pub fn push(&mut self, p: Primitive) {
        self.primitives.push(p);
        self.shape = Shape::Custom;
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Unit step switched on at `shift`.
    pub fn step(shift: f64) -> Result<Self> {
        if !(shift >= 0.0) {
            return Err(Error::domain(format!("step shift must be >= 0, got {shift}")));
        }
        Ok(Self::new(format!("step({shift})")).with(Primitive::step(shift, 1.0)?))
    }

    /// Unit-amplitude trapezoid with rise/fall time `eps` and plateau `tau`,
    /// written as four unit-slope ramps at `0, eps, eps + tau, 2 eps + tau`.
    pub fn trapezoid(eps: f64, tau: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::domain(format!("trapezoid rise time must be > 0, got {eps} (use a step for eps = 0)")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::domain(format!("trapezoid duration must be > 0, got {tau}")));
        }
        let w = 1.0 / eps;
        Ok(Self::new(format!("trapezoid({eps},{tau})"))
            .with(Primitive::ramp(0.0, w)?)
            .with(Primitive::ramp(eps, -w)?)
            .with(Primitive::ramp(eps + tau, -w)?)
            .with(Primitive::ramp(2.0 * eps + tau, w)?)
            .shaped(Shape::Trapezoid { eps, tau }))
    }

    fn shaped(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    /// Rectangular pulse of unit height on `[0, duration)`.
    pub fn rectangle(duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::domain(format!("pulse duration must be > 0, got {duration}")));
        }
        Ok(Self::new(format!("rectangle({duration})"))
            .with(Primitive::step(0.0, 1.0)?)
            .with(Primitive::step(duration, -1.0)?))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Trapezoid { eps, tau } => {
                if t < 0.0 {
                    0.0
                } else if t < eps {
                    t / eps
                } else if t < eps + tau {
                    1.0
                } else if t < 2.0 * eps + tau {
                    (tau - t) / eps + 2.0
                } else {
                    0.0
                }
            }
            Shape::Custom => self.primitives.iter().map(|p| p.eval(t)).sum(),
        }
    }

    /// Right derivative of `P` at `t`, ignoring the Dirac parts at jumps.
    pub fn slope(&self, t: f64) -> f64 {
        self.primitives
            .iter()
            .filter(|p| p.kind == PrimitiveKind::Ramp && t >= p.shift)
            .map(|p| p.weight)
            .sum()
    }

    /// `(exp(-rate ·) * P)(t) = ∫_0^t exp(-rate (t - s)) P(s) ds`.
    pub fn exp_convolve(&self, rate: f64, t: f64) -> Result<f64> {
        if !(rate > 0.0) {
            return Err(Error::domain(format!("convolution rate must be > 0, got {rate}")));
        }
        if !(t >= 0.0) {
            return Err(Error::domain(format!("convolution time must be >= 0, got {t}")));
        }
        Ok(crate::sum::sum(self.primitives.iter().map(|p| p.exp_convolve(rate, t))))
    }

    /// Instants where `P` is discontinuous.
    pub fn jump_times(&self) -> Vec<f64> {
        let mut shifts: Vec<f64> = self
            .primitives
            .iter()
            .filter(|p| p.kind == PrimitiveKind::Step)
            .map(|p| p.shift)
            .collect();
        shifts.sort_by(f64::total_cmp);
        shifts.dedup();
        shifts
            .into_iter()
            .filter(|&s| {
                let jump: f64 = self
                    .primitives
                    .iter()
                    .filter(|p| p.kind == PrimitiveKind::Step && p.shift == s)
                    .map(|p| p.weight)
                    .sum();
                jump != 0.0
            })
            .collect()
    }

    /// All primitive shifts, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.primitives.iter().map(|p| p.shift).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }

    pub fn is_jump(&self, t: f64) -> bool {
        self.jump_times().contains(&t)
    }

    pub fn onset(&self) -> Option<f64> {
        self.primitives.iter().map(|p| p.shift).min_by(f64::total_cmp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::convolution_by_quadrature;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn step_values() {
        let s = Signal::step(0.0).unwrap();
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(-0.5), 0.0);
        assert_eq!(s.eval(0.0), 1.0);
        assert_eq!(Signal::step(0.3).unwrap().eval(0.2), 0.0);
        assert!(Signal::step(-1.0).is_err());
    }

    #[test]
    fn trapezoid_values() {
        let s = Signal::trapezoid(0.2, 1.0).unwrap();
        assert!((s.eval(0.1) - 0.5).abs() < 1e-15);
        assert!((s.eval(0.5) - 1.0).abs() < 1e-15);
        assert!((s.eval(1.3) - 0.5).abs() < 1e-12);
        assert_eq!(s.eval(2.0), 0.0);
        assert!(Signal::trapezoid(0.0, 1.0).is_err());
        assert!(Signal::trapezoid(0.2, -1.0).is_err());
        let weights: Vec<f64> = s.primitives().iter().map(|p| p.weight).collect();
        assert_eq!(weights, vec![5.0, -5.0, -5.0, 5.0]);
        let shifts: Vec<f64> = s.primitives().iter().map(|p| p.shift).collect();
        assert_eq!(shifts, vec![0.0, 0.2, 1.2, 1.4]);
    }

    #[test]
    fn trapezoid_matches_piecewise_definition() {
        let (eps, tau) = (0.3, 0.7);
        let s = Signal::trapezoid(eps, tau).unwrap();
        let piecewise = |t: f64| {
            if t < 0.0 {
                0.0
            } else if t < eps {
                t / eps
            } else if t < eps + tau {
                1.0
            } else if t < 2.0 * eps + tau {
                (tau - t) / eps + 2.0
            } else {
                0.0
            }
        };
        for k in 0..=2000 {
            let t = -0.5 + 2.5 * k as f64 / 2000.0;
            assert!((s.eval(t) - piecewise(t)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn empty_signal_is_zero() {
        let s = Signal::new("empty");
        assert_eq!(s.eval(5.0), 0.0);
        assert_eq!(s.exp_convolve(1.0, 5.0).unwrap(), 0.0);
        assert_eq!(s.onset(), None);
    }

    #[test]
    fn step_convolution_closed_form() {
        let s = Signal::step(0.0).unwrap();
        for &(a, t) in &[(0.5f64, 2.0f64), (3.0, 0.1), (1e6, 1.0)] {
            let expect = (1.0 - (-a * t).exp()) / a;
            assert!((s.exp_convolve(a, t).unwrap() - expect).abs() <= 1e-15 * expect.abs().max(1e-300));
        }
        assert_eq!(s.exp_convolve(1.0, 0.0).unwrap(), 0.0);
        assert!(s.exp_convolve(0.0, 1.0).is_err());
        assert!(s.exp_convolve(-1.0, 1.0).is_err());
    }

    #[test]
    fn small_argument_branch_is_continuous() {
        for &z in &[0.0999999f64, 0.1, 0.1000001] {
            let direct = (z - 1.0 + (-z).exp()) / (z * z);
            assert!((phi2(z) - direct).abs() < 1e-9);
        }
        assert_eq!(phi2(0.0), 0.5);
        assert_eq!(phi1(0.0), 1.0);
    }

    #[test]
    fn jumps_and_breakpoints() {
        let r = Signal::rectangle(1.0).unwrap();
        assert_eq!(r.jump_times(), vec![0.0, 1.0]);
        assert!(r.is_jump(1.0));
        let t = Signal::trapezoid(0.2, 1.0).unwrap();
        assert!(t.jump_times().is_empty());
        assert_eq!(t.breakpoints().len(), 4);
        // cancelling steps produce no jump
        let c = Signal::new("c")
            .with(Primitive::step(0.5, 1.0).unwrap())
            .with(Primitive::step(0.5, -1.0).unwrap());
        assert!(c.jump_times().is_empty());
    }

    #[test]
    fn trapezoid_tends_to_rectangle() {
        let tau = 1.0;
        let rect = Signal::rectangle(tau).unwrap();
        let mut prev_support = f64::INFINITY;
        for &eps in &[1e-1, 1e-2, 1e-3] {
            let trap = Signal::trapezoid(eps, tau).unwrap();
            let mut support: f64 = 0.0;
            for k in 0..=30_000 {
                let t = 3.0 * k as f64 / 30_000.0;
                let diff = (trap.eval(t) - rect.eval(t)).abs();
                if diff > 1e-12 {
                    // differences only live in the two ramps of width eps
                    assert!(t < eps || (t >= tau && t < tau + 2.0 * eps), "eps {eps} t {t}");
                    support += 3.0 / 30_000.0;
                }
            }
            assert!(support < prev_support);
            prev_support = support;
        }
    }

    #[test]
    fn convolution_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let eps = 10f64.powf(rng.gen_range(-2.0..0.0));
            let tau = rng.gen_range(0.1..2.0);
            let a = 10f64.powf(rng.gen_range(-2.0..2.0));
            let t = rng.gen_range(0.0..4.0);
            let sig = if rng.gen_bool(0.5) {
                Signal::trapezoid(eps, tau).unwrap()
            } else {
                Signal::new("mixed")
                    .with(Primitive::step(rng.gen_range(0.0..1.0), rng.gen_range(-2.0..2.0)).unwrap())
                    .with(Primitive::ramp(rng.gen_range(0.0..1.0), rng.gen_range(-2.0..2.0)).unwrap())
            };
            let exact = sig.exp_convolve(a, t).unwrap();
            let quad = convolution_by_quadrature(&sig, a, t);
            // once the pulse is over the result is a cancellation between
            // primitives, so the error is measured against their magnitude
            let magnitude: f64 = sig.primitives().iter().map(|p| p.exp_convolve(a, t).abs()).sum();
            let scale = quad.abs().max(magnitude).max(1e-300);
            assert!((exact - quad).abs() / scale < 1e-10, "a {a} t {t} exact {exact} quad {quad}");
        }
    }

    proptest! {
        #[test]
        fn convolution_is_linear(
            s1 in 0.0f64..2.0, w1 in -3.0f64..3.0,
            s2 in 0.0f64..2.0, w2 in -3.0f64..3.0,
            a in 1e-3f64..1e3, t in 0.0f64..5.0,
        ) {
            let p1 = Primitive::step(s1, w1).unwrap();
            let p2 = Primitive::ramp(s2, w2).unwrap();
            let sig = Signal::new("sum").with(p1).with(p2);
            let whole = sig.exp_convolve(a, t).unwrap();
            let parts = p1.exp_convolve(a, t) + p2.exp_convolve(a, t);
            prop_assert!((whole - parts).abs() <= 1e-15 * (whole.abs() + parts.abs()).max(1e-300));
        }

        #[test]
        fn convolution_is_causal(shift in 0.0f64..5.0, back in 0.0f64..5.0, a in 1e-3f64..1e3) {
            let sig = Signal::new("late")
                .with(Primitive::step(shift, 1.0).unwrap())
                .with(Primitive::ramp(shift + 0.5, -2.0).unwrap());
            let t = (shift - back).max(0.0);
            prop_assert_eq!(sig.exp_convolve(a, t).unwrap(), 0.0);
            prop_assert_eq!(sig.eval(t - 1e-12), 0.0);
        }
    }
}
