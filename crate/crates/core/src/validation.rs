//! Self-checks of the solver stack, reported as named pass/fail lines.

use std::fmt;

use crate::error::Result;
use crate::exec::Execution;
use crate::extremes::{
    critical_eta, divergence_diagnostic, pmax_closed, pmax_partial_sum, vmax_closed, vmax_partial_sum, vmax_trapezoid,
};
use crate::oracle::{compare_with_series, solve_fd, FdConfig};
use crate::scaling::{creep_eta_hat, threshold_hat, MaterialParams};
use crate::series::{modal_coeff, modal_rate, power_density, time_slices, SeriesConfig, TimeSlice};
use crate::signals::Signal;
use crate::spectrum::EigenMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `measured <= tolerance`
    AtMost,
    /// `measured < tolerance`
    Below,
    /// `measured > tolerance`
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &'static str, measured: f64, relation: Relation, tolerance: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => measured <= tolerance,
            Relation::Below => measured < tolerance,
            Relation::Above => measured > tolerance,
        };
        Self { name, measured, tolerance, relation, passed }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::Above => ">",
        };
        write!(
            f,
            "{},{:.6e},{}{:.6e},{}",
            self.name,
            self.measured,
            op,
            self.tolerance,
            if self.passed { "pass" } else { "fail" }
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Runs all checks. `fast` shrinks mode counts and grids.
pub fn run(fast: bool) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tight = SeriesConfig::with_tol(1e-10);
    let th = 1.0f64.tanh();

    let n_terms = if fast { 100_000 } else { 1_000_000 };
    let ps = vmax_partial_sum(1.0, n_terms)?;
    out.push(Check::new("vmax_closed_vs_partial_sum", (vmax_closed(1.0)? - ps.corrected).abs(), Relation::Below, 1e-8));
    out.push(Check::new("vmax_closed_unit_eta", (vmax_closed(1.0)? - th).abs(), Relation::Below, 1e-14));
    let pp = pmax_partial_sum(1.0, n_terms)?;
    out.push(Check::new("pmax_closed_vs_partial_sum", (pmax_closed(1.0)? - pp.raw).abs(), Relation::Below, 1e-8));

    let eta: f64 = 1e-8;
    out.push(Check::new("blow_up_rate", (1.0 - eta.sqrt() * vmax_closed(eta)?).abs(), Relation::AtMost, 1e-6));
    let n_div = if fast { 1_000 } else { 10_000 };
    let sums = divergence_diagnostic(n_div)?;
    let worst = sums.iter().enumerate().map(|(n, s)| (s - 2.0 * (n as f64 + 1.0)).abs()).fold(0.0, f64::max);
    out.push(Check::new("divergence_partial_sums_exact", worst, Relation::AtMost, 0.0));

    let table1 = MaterialParams::table1();
    out.push(Check::new("threshold_hat_table1", (threshold_hat(0.35e-6, &table1)? - 16.3).abs(), Relation::AtMost, 0.1));
    out.push(Check::new("creep_eta_hat_table1", rel(creep_eta_hat(&table1)?, 1.15e-8), Relation::AtMost, 0.01));

    out.push(Check::new("vmax_trapezoid_elastic_5e-3", vmax_trapezoid(0.0, 5e-3, &tight)?.value, Relation::Below, 16.3));
    out.push(Check::new("vmax_closed_4e-3", vmax_closed(4e-3)?, Relation::Below, 16.3));
    out.push(Check::new("vmax_closed_3e-3", vmax_closed(3e-3)?, Relation::Above, 16.3));
    let crit = critical_eta(16.3)?;
    out.push(Check::new("critical_eta_window", (crit - 3.75e-3).abs(), Relation::AtMost, 2.5e-4));

    let trap = Signal::trapezoid(0.2, 1.0)?;
    let fd_series = SeriesConfig::with_tol(1e-8);
    let mut worst_u: f64 = 0.0;
    for &eta in &[0.0, 0.1, 1.0] {
        let fd = solve_fd(eta, &trap, &FdConfig::new(401, 2.5e-4, 2.0).with_save_every(50))?;
        let rep = compare_with_series(&fd, &trap, &fd_series, Some(&[0.5, 1.0, 2.0]))?;
        worst_u = worst_u.max(rep.max_u_rel_l2());
    }
    out.push(Check::new("series_vs_oracle_u_rel_l2", worst_u, Relation::Below, 1e-3));

    let step = Signal::step(0.0)?;
    let mut steady: f64 = 0.0;
    let mut steady_fd: f64 = 0.0;
    let mut bc: f64 = 0.0;
    for &eta in &[0.0, 0.1, 1.0] {
        let slice = TimeSlice::new(20.0, eta, &step, &SeriesConfig::with_tol(1e-9))?;
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            steady = steady.max((slice.displacement(x) + x).abs());
            let s = slice.sample(x)?;
            if x == 1.0 {
                bc = bc.max(s.p_hat.abs());
            }
            bc = bc.max((s.sigma_hat + 1.0).abs());
        }
        let fd = solve_fd(eta, &step, &FdConfig::new(201, 1e-2, 20.0).with_save_every(2000))?;
        let last = fd.u.last().expect("final state");
        steady_fd = steady_fd.max(fd.x.iter().zip(last).map(|(x, u)| (u + x).abs()).fold(0.0, f64::max));
    }
    out.push(Check::new("steady_state_series", steady, Relation::Below, 1e-6));
    out.push(Check::new("steady_state_oracle", steady_fd, Relation::Below, 2e-3));
    out.push(Check::new("boundary_conditions_exact", bc, Relation::AtMost, 0.0));

    let (nxg, ntg) = if fast { (51, 151) } else { (201, 601) };
    let ts: Vec<f64> = (0..ntg).map(|k| k as f64 * 3.0 / (ntg - 1) as f64).collect();
    let slices = time_slices(&ts, 0.1, &trap, &tight, Execution::Parallel)?;
    let (mut bx, mut bt, mut bv) = (0.0, 0.0, f64::NEG_INFINITY);
    for s in &slices {
        for i in 0..nxg {
            let x = i as f64 / (nxg - 1) as f64;
            let v = s.velocity(x)?.abs();
            if v > bv {
                (bx, bt, bv) = (x, s.t_hat(), v);
            }
        }
    }
    let located = (bx - 1.0).abs() + (bt - 0.2).abs();
    out.push(Check::new("trapezoid_max_location", located, Relation::AtMost, 0.0));
    out.push(Check::new("trapezoid_max_value", (bv - vmax_trapezoid(0.1, 0.2, &tight)?.value).abs(), Relation::Below, 1e-6));

    let mut residual: f64 = 0.0;
    for (k, &eta) in [0.0, 0.05, 0.5, 3.0].iter().enumerate() {
        for n in [0usize, 1, 5, 30, 200] {
            let m = EigenMode::new(n);
            let t = 0.13 + 0.41 * k as f64 + 0.01 * n as f64;
            let r = (1.0 + eta * m.lambda_hat) * modal_rate(m, eta, &trap, t)
                + m.lambda_hat * modal_coeff(m, eta, &trap, t)
                + 2.0 * m.parity() * trap.eval(t);
            residual = residual.max(r.abs());
        }
    }
    out.push(Check::new("modal_ode_residual", residual, Relation::Below, 1e-10));

    let slice = TimeSlice::new(0.3, 0.5, &step, &SeriesConfig::with_tol(1e-12))?;
    let m = 2000;
    let v2: Vec<f64> = (0..=m).map(|i| slice.velocity(i as f64 / m as f64).map(|v| v * v)).collect::<Result<_>>()?;
    let quad = (v2[1..m].iter().sum::<f64>() + 0.5 * (v2[0] + v2[m])) / m as f64;
    let parseval = (quad - power_density(0.3, 0.5, &step, &SeriesConfig::with_tol(1e-12))?.value).abs();
    out.push(Check::new("parseval_power", parseval, Relation::Below, 1e-4));

    // truncation noise must stay far below the difference step
    let h = 1e-5;
    let fine = SeriesConfig::with_tol(1e-13);
    let mut kin: f64 = 0.0;
    for &eta in &[0.1, 1.0] {
        for j in 0..10 {
            let x = 0.05 + 0.09 * j as f64;
            let t = 0.1 + 0.27 * j as f64;
            let fwd = TimeSlice::new(t + h, eta, &trap, &fine)?.displacement(x);
            let bwd = TimeSlice::new(t - h, eta, &trap, &fine)?.displacement(x);
            let v = TimeSlice::new(t, eta, &trap, &fine)?.velocity(x)?;
            kin = kin.max((v + (fwd - bwd) / (2.0 * h)).abs());
        }
    }
    out.push(Check::new("kinematics_v_equals_minus_du_dt", kin, Relation::Below, 1e-6));

    let mut rises: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..100 {
        let p = power_density(k as f64 * 0.02, 0.1, &step, &tight)?.value;
        rises = rises.max(p - prev);
        prev = p;
    }
    out.push(Check::new("power_density_monotone_decay", rises, Relation::AtMost, 0.0));

    let mut v_rises: f64 = f64::NEG_INFINITY;
    let mut prev = f64::INFINITY;
    for k in 0..=200 {
        let v = vmax_closed(10f64.powf(-8.0 + 0.05 * k as f64))?;
        v_rises = v_rises.max(v - prev);
        prev = v;
    }
    out.push(Check::new("vmax_closed_monotone_decay", v_rises, Relation::AtMost, 0.0));

    let ng = if fast { 6 } else { 20 };
    let etas: Vec<f64> = (0..ng).map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / (ng - 1) as f64)).collect();
    let epss: Vec<f64> = (0..ng).map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / (ng - 1) as f64)).collect();
    let mut excess: f64 = f64::NEG_INFINITY;
    for &eps in &epss {
        let elastic = vmax_trapezoid(0.0, eps, &tight)?.value;
        for &eta in &etas {
            let v = vmax_trapezoid(eta, eps, &tight)?.value;
            excess = excess.max(v - vmax_closed(eta)?.min(elastic));
        }
    }
    out.push(Check::new("trapezoid_peak_dominance", excess, Relation::AtMost, 0.0));
    Ok(out)
}
