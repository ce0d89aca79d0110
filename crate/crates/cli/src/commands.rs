use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use porovisc::extremes::{self, VMax};
use porovisc::scaling::{self, MaterialParams};
use porovisc::series::{self, SeriesConfig};
use porovisc::{validation, Execution, Signal};

use crate::{DesignMapArgs, FieldsArgs, MaximaArgs, Pulse, ScaleArgs, ValidateArgs};

pub const FIELDS_HEADER: &str = "x_hat,t_hat,u_hat,v_hat,p_hat,sigma0_hat,sigma_hat,n_used,tail_bound";
pub const DIVERGENT: &str = "divergent";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(porovisc::Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<porovisc::Error> for CliError {
    fn from(e: porovisc::Error) -> Self {
        match e {
            porovisc::Error::Domain(_) | porovisc::Error::Parse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CmdResult = Result<ExitCode, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Fixed 17-significant-digit formatting; infinities become `inf`/`-inf`.
pub fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_material(path: &Path) -> Result<MaterialParams, CliError> {
    Ok(MaterialParams::from_preset_file(path)?)
}

fn series_config(tol: f64) -> Result<SeriesConfig, CliError> {
    let cfg = SeriesConfig::with_tol(tol);
    cfg.validate()?;
    Ok(cfg)
}

fn signal_for(a: &FieldsArgs) -> Result<Signal, CliError> {
    match a.pulse {
        Pulse::Step => {
            if a.eps.is_some() || a.tau.is_some() {
                return Err(usage("--eps and --tau apply only to --pulse trapezoid"));
            }
            Ok(Signal::step(0.0)?)
        }
        Pulse::Trapezoid => {
            let (Some(eps), Some(tau)) = (a.eps, a.tau) else {
                return Err(usage("--pulse trapezoid needs --eps and --tau"));
            };
            Ok(Signal::trapezoid(eps, tau)?)
        }
    }
}

pub fn fields(a: FieldsArgs) -> CmdResult {
    if !(a.eta.is_finite() && a.eta >= 0.0) {
        return Err(usage(format!("--eta must be finite and >= 0, got {}", a.eta)));
    }
    if a.nx < 2 {
        return Err(usage("--nx must be >= 2"));
    }
    if a.nt < 1 {
        return Err(usage("--nt must be >= 1"));
    }
    if !(a.tmax.is_finite() && a.tmax > 0.0) {
        return Err(usage(format!("--tmax must be finite and > 0, got {}", a.tmax)));
    }
    let cfg = series_config(a.tol)?;
    let sig = signal_for(&a)?;

    let ts: Vec<f64> = if a.nt == 1 {
        vec![a.tmax]
    } else {
        (0..a.nt).map(|k| k as f64 * a.tmax / (a.nt - 1) as f64).collect()
    };
    let xs: Vec<f64> = (0..a.nx).map(|i| i as f64 / (a.nx - 1) as f64).collect();
    let slices = series::time_slices(&ts, a.eta, &sig, &cfg, Execution::Parallel)?;

    let mut out = open_out(a.out.as_deref())?;
    writeln!(out, "{FIELDS_HEADER}")?;
    let mut divergent = 0usize;
    for &x in &xs {
        for slice in &slices {
            match slice.sample(x) {
                Ok(s) => writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    num(s.x_hat),
                    num(s.t_hat),
                    num(s.u_hat),
                    num(s.v_hat),
                    num(s.p_hat),
                    num(s.sigma0_hat),
                    num(s.sigma_hat),
                    s.n_used,
                    num(s.tail_bound)
                )?,
                Err(e) if e.is_divergent() => {
                    divergent += 1;
                    let order = slice.displacement_order();
                    writeln!(
                        out,
                        "{},{},{},{DIVERGENT},{DIVERGENT},{DIVERGENT},{},{},inf",
                        num(x),
                        num(slice.t_hat()),
                        num(slice.displacement(x)),
                        num(-slice.load()),
                        order.n_used
                    )?
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    out.flush()?;
    if divergent > 0 {
        eprintln!(
            "warning: {divergent} rows marked `{DIVERGENT}`: with eta_hat = 0 the velocity series has no pointwise value at a load jump"
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn maxima(a: MaximaArgs) -> CmdResult {
    if let Some(bad) = a.eta_grid.0.iter().find(|v| **v < 0.0) {
        return Err(usage(format!("eta grid values must be >= 0, got {bad}")));
    }
    let scales = match &a.material {
        Some(p) => Some(scaling::characteristic_values(&load_material(p)?)?),
        None => None,
    };
    let mut out = open_out(a.out.as_deref())?;
    write!(out, "eta_hat,vmax_hat,pmax_hat")?;
    if scales.is_some() {
        write!(out, ",vmax_si,pmax_si")?;
    }
    writeln!(out)?;
    for &eta in &a.eta_grid.0 {
        let (v, p) = if eta == 0.0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            (extremes::vmax_closed(eta)?, extremes::pmax_closed(eta)?)
        };
        write!(out, "{},{},{}", num(eta), num(v), num(p))?;
        if let Some(s) = &scales {
            write!(out, ",{},{}", num(v * s.v_c), num(p * s.power_c))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn design_map(a: DesignMapArgs) -> CmdResult {
    let v_th_hat = match (a.vth_hat, a.vth_si, &a.material) {
        (Some(v), None, _) => v,
        (None, Some(v), Some(m)) => scaling::threshold_hat(v, &load_material(m)?)?,
        _ => return Err(usage("a threshold is required: --vth-hat or --vth-si with --material")),
    };
    let cfg = series_config(a.tol)?;
    let map = extremes::design_map(&a.eta_grid.0, &a.eps_grid.0, v_th_hat, &cfg, Execution::Parallel)?;

    let grid_path = with_suffix(&a.out_prefix, "_grid.csv");
    let mut out = open_out(Some(&grid_path))?;
    writeln!(out, "eta_hat,eps_hat,vmax_hat,margin,feasible")?;
    for c in &map.cells {
        let v = match c.v_max_hat {
            VMax::Finite(v) => num(v),
            VMax::Infinite => "inf".into(),
        };
        writeln!(out, "{},{},{},{},{}", num(c.eta_hat), num(c.eps_hat), v, num(c.margin), c.feasible)?;
    }
    out.flush()?;

    let curve_path = with_suffix(&a.out_prefix, "_curve.csv");
    let mut out = open_out(Some(&curve_path))?;
    writeln!(out, "eta_hat,eps_star")?;
    for b in &map.boundary {
        writeln!(out, "{},{}", num(b.eta_hat), num(b.eps_star))?;
    }
    out.flush()?;
    eprintln!("v_th_hat = {}", num(v_th_hat));
    Ok(ExitCode::SUCCESS)
}

pub fn scale(a: ScaleArgs) -> CmdResult {
    let p = load_material(&a.material)?;
    let s = scaling::characteristic_values(&p)?;
    let c = scaling::creep(&p)?;
    let rows: [(&str, f64, &str); 12] = [
        ("x_c", s.x_c, "m"),
        ("t_c", s.t_c, "s"),
        ("u_c", s.u_c, "m"),
        ("v_c", s.v_c, "m/s"),
        ("p_c", s.p_c, "Pa"),
        ("eta_c", s.eta_c, "Pa s"),
        ("lambda_c", s.lambda_c, "1/m^2"),
        ("power_c", s.power_c, "N/(m s)"),
        ("eta_hat", scaling::eta_hat(&p), "1"),
        ("eta_hat_creep", c.eta_hat, "1"),
        ("tau_e", c.tau_e, "s"),
        ("eta_creep", c.eta, "Pa s"),
    ];
    let mut out = open_out(a.out.as_deref())?;
    writeln!(out, "name,value,unit")?;
    for (name, value, unit) in rows {
        writeln!(out, "{name},{},{unit}", num(value))?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn validate(a: ValidateArgs) -> CmdResult {
    let checks = validation::run(a.fast)?;
    let mut out = io::stdout().lock();
    writeln!(out, "name,measured,tolerance,status")?;
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", checks.len());
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
