//! Dimensional parameters, characteristic values and unit conversion.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Dimensional material and loading parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Sample thickness, m.
    pub length: f64,
    /// Aggregated elastic modulus `λ_e + 2μ_e`, Pa.
    pub mu: f64,
    /// Aggregated viscoelastic modulus `λ_v + 2μ_v`, Pa·s.
    pub eta: f64,
    /// Permeability, m⁴·N⁻¹·s⁻¹.
    pub k0: f64,
    /// Reference traction magnitude, Pa.
    pub p_ref: f64,
    /// Fluid mass density, kg·m⁻³.
    pub rho: f64,
}

pub const DEFAULT_RHO: f64 = 1000.0;

const KEYS: [&str; 6] = ["L", "mu", "eta", "K0", "P_ref", "rho"];

impl MaterialParams {
    /// Parameters of the cartilage confined-compression example.
    pub fn table1() -> Self {
        Self { length: 0.81e-3, mu: 0.97e6, eta: 0.0, k0: 2.9e-16, p_ref: 6e4, rho: DEFAULT_RHO }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("L", self.length), ("mu", self.mu), ("K0", self.k0), ("P_ref", self.p_ref), ("rho", self.rho)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::domain(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        Ok(())
    }

    /// Parses a preset: one `key = value` per line, `#` starts a comment.
    /// Keys `L`, `mu`, `K0`, `P_ref` are required; `eta` defaults to 0 and
    /// `rho` to 1000.
    pub fn from_preset_str(text: &str) -> Result<Self> {
        let mut values: [Option<f64>; 6] = [None; 6];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                key: line.to_string(),
                reason: format!("line {}: expected `key = value`", lineno + 1),
            })?;
            let key = key.trim();
            let slot = KEYS.iter().position(|k| *k == key).ok_or_else(|| Error::Parse {
                key: key.to_string(),
                reason: format!("line {}: unknown key (expected one of {})", lineno + 1, KEYS.join(", ")),
            })?;
            if values[slot].is_some() {
                return Err(Error::Parse { key: key.to_string(), reason: format!("line {}: duplicate key", lineno + 1) });
            }
            let value = value.trim();
            let parsed: f64 = value.parse().map_err(|_| Error::Parse {
                key: key.to_string(),
                reason: format!("line {}: `{value}` is not a number", lineno + 1),
            })?;
            values[slot] = Some(parsed);
        }
        let required = |i: usize| {
            values[i].ok_or_else(|| Error::Parse { key: KEYS[i].to_string(), reason: "missing required key".into() })
        };
        let params = Self {
            length: required(0)?,
            mu: required(1)?,
            eta: values[2].unwrap_or(0.0),
            k0: required(3)?,
            p_ref: required(4)?,
            rho: values[5].unwrap_or(DEFAULT_RHO),
        };
        params.validate().map_err(|e| match e {
            Error::Domain(msg) => {
                let key = msg.split_whitespace().next().unwrap_or("").to_string();
                Error::Parse { key, reason: msg }
            }
            other => other,
        })?;
        Ok(params)
    }

    pub fn from_preset_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            key: path.display().to_string(),
            reason: format!("cannot read preset: {e}"),
        })?;
        Self::from_preset_str(&text)
    }

    pub fn to_preset_string(&self) -> String {
        format!(
            "L = {:e}\nmu = {:e}\neta = {:e}\nK0 = {:e}\nP_ref = {:e}\nrho = {:e}\n",
            self.length, self.mu, self.eta, self.k0, self.p_ref, self.rho
        )
    }
}

/// Characteristic values used to make the problem dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalings {
    pub x_c: f64,
    pub t_c: f64,
    pub u_c: f64,
    pub v_c: f64,
    pub p_c: f64,
    pub eta_c: f64,
    pub lambda_c: f64,
    pub power_c: f64,
}

pub fn characteristic_values(p: &MaterialParams) -> Result<Scalings> {
    p.validate()?;
    let l2 = p.length * p.length;
    let t_c = l2 / (p.k0 * p.mu);
    let u_c = p.p_ref * p.length / p.mu;
    Ok(Scalings {
        x_c: p.length,
        t_c,
        u_c,
        // [v] = [u]/[t] = K0 P_ref / L
        v_c: u_c / t_c,
        p_c: p.p_ref,
        eta_c: l2 / p.k0,
        lambda_c: 1.0 / l2,
        power_c: p.k0 * p.p_ref * p.p_ref / p.length,
    })
}

/// `η̂ = η K0 / L²`.
pub fn eta_hat(p: &MaterialParams) -> f64 {
    p.eta * p.k0 / (p.length * p.length)
}

/// Viscosity estimate from the elastic wave time of the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreepEstimate {
    /// `τ_e = L √(ρ/μ)`, s.
    pub tau_e: f64,
    /// `η = μ τ_e`, Pa·s.
    pub eta: f64,
    /// `η̂ = τ_e / [t] = (K0/L) √(ρ μ)`.
    pub eta_hat: f64,
}

pub fn creep(p: &MaterialParams) -> Result<CreepEstimate> {
    p.validate()?;
    let tau_e = p.length * (p.rho / p.mu).sqrt();
    Ok(CreepEstimate { tau_e, eta: p.mu * tau_e, eta_hat: p.k0 / p.length * (p.rho * p.mu).sqrt() })
}

pub fn creep_eta_hat(p: &MaterialParams) -> Result<f64> {
    creep(p).map(|c| c.eta_hat)
}

/// Dimensionless velocity threshold `V_th / [v]`.
pub fn threshold_hat(v_th: f64, p: &MaterialParams) -> Result<f64> {
    if !(v_th > 0.0) {
        return Err(Error::domain(format!("velocity threshold must be > 0, got {v_th}")));
    }
    Ok(v_th / characteristic_values(p)?.v_c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    Displacement,
    Velocity,
    Power,
    Time,
    Pressure,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 5] =
        [Self::Displacement, Self::Velocity, Self::Power, Self::Time, Self::Pressure];

    pub fn name(self) -> &'static str {
        match self {
            Self::Displacement => "displacement",
            Self::Velocity => "velocity",
            Self::Power => "power",
            Self::Time => "time",
            Self::Pressure => "pressure",
        }
    }

    pub fn scale(self, s: &Scalings) -> f64 {
        match self {
            Self::Displacement => s.u_c,
            Self::Velocity => s.v_c,
            Self::Power => s.power_c,
            Self::Time => s.t_c,
            Self::Pressure => s.p_c,
        }
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown quantity kind `{s}`")))
    }
}

pub fn redimensionalize(kind: QuantityKind, value_hat: f64, s: &Scalings) -> f64 {
    value_hat * kind.scale(s)
}

pub fn nondimensionalize(kind: QuantityKind, value: f64, s: &Scalings) -> f64 {
    value / kind.scale(s)
}
