//! Test-only oracles, independent of the closed-form code paths.

use crate::signals::Signal;
use crate::sum::CompensatedSum;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule with `pieces` equal panels on `[a, b]`.
pub fn composite_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / pieces as f64;
    let mut acc = CompensatedSum::new();
    for p in 0..pieces {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            acc.add(0.5 * h * wi * f(mid + 0.5 * h * xi));
        }
    }
    acc.value()
}

/// `∫_0^t exp(-a (t - s)) P(s) ds`, split at the load breakpoints, with
/// panels no wider than the kernel decay length `1/a`.
pub fn convolution_by_quadrature(sig: &Signal, a: f64, t: f64) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend(sig.breakpoints().into_iter().filter(|&s| s > 0.0 && s < t));
    cuts.push(t);
    let f = |s: f64| (-a * (t - s)).exp() * sig.eval(s);
    cuts.windows(2)
        .map(|w| {
            // Gauss nodes are interior, so jumps at the cuts are never sampled
            let (lo, hi) = (w[0], w[1]);
            let pieces = (a * (hi - lo)).ceil().max(1.0) as usize;
            composite_gauss(&f, lo, hi, pieces)
        })
        .sum()
}

/// Composite trapezoid rule for samples on a uniform grid of spacing `h`.
pub fn trapezoid_rule(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

#[test]
fn gauss_rule_is_exact_for_polynomials() {
    let (x, w) = gauss_legendre(20);
    assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    let i38: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
    assert!((i38 - 2.0 / 39.0).abs() < 1e-14);
}
