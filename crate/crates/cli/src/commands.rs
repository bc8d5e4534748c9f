//! Subcommand definitions and their implementations.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use respole_core::feshbach::{feshbach_pole_search, seeds_for, DEFAULT_MAX_ITER};
use respole_core::io::{fmt17, poles_json, to_json, write_sweep_csv, write_wavefunction_csv};
use respole_core::oracle::oracle_report;
use respole_core::scattering::transmission_sweep;
use respole_core::siegert::{max_pole_distance, solve_poles};
use respole_core::sweep::{linspace, sweep_point, transitions, SweepAxis, SweepPoint};
use respole_core::wavefunction::{evaluate, normalize_bound};
use respole_core::{Complex64, DeviceSpec, SpectralPole};
use serde::Serialize;

use crate::config::{resolve_model, resolve_tol, ConfigFile, ModelOverrides};
use crate::CliError;

/// Largest |dz| between the two pole sets still counted as agreement.
pub const AGREEMENT_TOL: f64 = 1e-9;
pub const MIN_ORACLE_SITES: usize = 10;
pub const THREADS_ENV: &str = "RESPOLE_THREADS";

const DEFAULT_KMIN: f64 = 0.01;
const DEFAULT_KMAX: f64 = PI - 0.01;
const DEFAULT_STEPS: usize = 291;
const DEFAULT_XMAX: usize = 20;
const DEFAULT_SITES: usize = 200;
const DEFAULT_SWEEP_STEPS: usize = 601;

/// S-matrix poles and scattering observables of a tight-binding dot on an infinite lead.
#[derive(Debug, Parser)]
#[command(name = "respole", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List all poles of the model.
    Poles {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Method::Siegert)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Convergence tolerance of the Newton pole search.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare the polynomial and effective-Hamiltonian pole sets.
    Equivalence {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Transmission and reflection over a grid of real k (CSV).
    Transmission {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        kmin: Option<f64>,
        #[arg(long)]
        kmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pole trajectories while one T-dot parameter is scanned (CSV).
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Scanned parameter: t1 or eps-d.
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice wavefunction of one pole (CSV).
    Wavefunction {
        #[command(flatten)]
        model: ModelArgs,
        /// Position in the pole list printed by `poles`.
        #[arg(long, default_value_t = 0)]
        pole_index: usize,
        #[arg(long)]
        xmax: Option<usize>,
        /// Scale a bound state to unit norm.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual checks and truncated-lattice comparison (JSON).
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        /// Lead sites kept on each side of the contact.
        #[arg(long)]
        sites: Option<usize>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lead hopping.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Dot-lead coupling.
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Dot level.
    #[arg(long = "eps-d", allow_hyphen_values = true)]
    pub eps_d: Option<f64>,
}

impl ModelArgs {
    fn load(&self) -> Result<(ConfigFile, DeviceSpec), CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let spec = resolve_model(
            &file,
            ModelOverrides {
                t: self.t,
                t1: self.t1,
                eps_d: self.eps_d,
            },
        )?;
        Ok((file, spec))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Siegert,
    Feshbach,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

pub fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Poles {
            model,
            method,
            format,
            tol,
        } => cmd_poles(&model, method, format, tol, out),
        Command::Equivalence { model, format, tol } => {
            cmd_poles(&model, Method::Both, format, tol, out)
        }
        Command::Transmission {
            model,
            kmin,
            kmax,
            steps,
            out: path,
        } => cmd_transmission(&model, kmin, kmax, steps, path.as_deref(), out),
        Command::Sweep {
            model,
            param,
            from,
            to,
            steps,
            out: path,
        } => cmd_sweep(&model, &param, from, to, steps, path.as_deref(), out, err),
        Command::Wavefunction {
            model,
            pole_index,
            xmax,
            normalize,
            out: path,
        } => cmd_wavefunction(&model, pole_index, xmax, normalize, path.as_deref(), out),
        Command::Oracle { model, sites } => cmd_oracle(&model, sites, out),
    }
}

/// Writes to `path` when given, otherwise to `out`.
fn with_sink(
    path: Option<&Path>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn cmd_poles(
    model: &ModelArgs,
    method: Method,
    format: Format,
    tol: Option<f64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (file, spec) = model.load()?;
    let tol = resolve_tol(&file, tol)?;
    let feshbach = || feshbach_pole_search(&spec, &seeds_for(&spec), tol, DEFAULT_MAX_ITER);
    match method {
        Method::Siegert => write_poles(out, format, &solve_poles(&spec)?),
        Method::Feshbach => write_poles(out, format, &feshbach()?),
        Method::Both => {
            let siegert = solve_poles(&spec)?;
            let fesh = feshbach()?;
            let dz = max_pole_distance(&siegert, &fesh);
            write_both(out, format, &siegert, &fesh, dz)?;
            match dz {
                Some(d) if d < AGREEMENT_TOL => Ok(()),
                Some(d) => Err(CliError::Numerical(format!(
                    "pole sets disagree: max |dz| = {d} >= {AGREEMENT_TOL}"
                ))),
                None => Err(CliError::Numerical(format!(
                    "pole counts differ: {} from the polynomial, {} from the effective Hamiltonian",
                    siegert.len(),
                    fesh.len()
                ))),
            }
        }
    }
}

fn write_poles(
    out: &mut dyn Write,
    format: Format,
    poles: &[SpectralPole],
) -> Result<(), CliError> {
    match format {
        Format::Table => write_table(out, poles)?,
        Format::Csv => {
            writeln!(out, "{POLE_CSV_HEADER}")?;
            for p in poles {
                writeln!(out, "{}", pole_csv_row(p))?;
            }
        }
        Format::Json => writeln!(out, "{}", poles_json(poles))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct BothReport {
    siegert: Vec<respole_core::siegert::PoleRecord>,
    feshbach: Vec<respole_core::siegert::PoleRecord>,
    max_abs_dz: Option<f64>,
}

fn write_both(
    out: &mut dyn Write,
    format: Format,
    siegert: &[SpectralPole],
    fesh: &[SpectralPole],
    dz: Option<f64>,
) -> Result<(), CliError> {
    match format {
        Format::Table => {
            writeln!(out, "siegert")?;
            write_table(out, siegert)?;
            writeln!(out, "feshbach")?;
            write_table(out, fesh)?;
            match dz {
                Some(d) => writeln!(out, "max |dz| = {}", shortest(d))?,
                None => writeln!(out, "max |dz| = undefined (pole counts differ)")?,
            }
        }
        Format::Csv => {
            writeln!(out, "method,{POLE_CSV_HEADER}")?;
            for (name, set) in [("siegert", siegert), ("feshbach", fesh)] {
                for p in set {
                    writeln!(out, "{name},{}", pole_csv_row(p))?;
                }
            }
            writeln!(out, "# max_abs_dz,{}", dz.map_or("NaN".to_string(), fmt17))?;
        }
        Format::Json => {
            let report = BothReport {
                siegert: respole_core::io::pole_records(siegert),
                feshbach: respole_core::io::pole_records(fesh),
                max_abs_dz: dz,
            };
            writeln!(out, "{}", to_json(&report))?;
        }
    }
    Ok(())
}

const POLE_CSV_HEADER: &str = "z_re,z_im,k_re,k_im,E_re,E_im,class,amp0_re,amp0_im,ampd_re,ampd_im";

fn pole_csv_row(p: &SpectralPole) -> String {
    let z = p.z.value();
    let k = p.k.value();
    let (a0, ad) = (p.amp0(), p.amp_d());
    let head = [z.re, z.im, k.re, k.im, p.energy.re, p.energy.im]
        .map(fmt17)
        .join(",");
    let tail = [a0.re, a0.im, ad.re, ad.im].map(fmt17).join(",");
    format!("{head},{},{tail}", p.class)
}

/// Shortest round-trip form, switching to exponent notation outside `[1e-4, 1e6)`.
fn shortest(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn complex(c: Complex64) -> String {
    let im = shortest(c.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", shortest(c.re))
}

fn write_table(out: &mut dyn Write, poles: &[SpectralPole]) -> Result<(), CliError> {
    writeln!(
        out,
        "{:>3}  {:<12}  {:<44}  {:<44}  E",
        "#", "class", "z", "k"
    )?;
    for (i, p) in poles.iter().enumerate() {
        let class = if p.flagged {
            format!("{}*", p.class)
        } else {
            p.class.to_string()
        };
        writeln!(
            out,
            "{:>3}  {:<12}  {:<44}  {:<44}  {}",
            i,
            class,
            complex(p.z.value()),
            complex(p.k.value()),
            complex(p.energy)
        )?;
    }
    Ok(())
}

fn cmd_transmission(
    model: &ModelArgs,
    kmin: Option<f64>,
    kmax: Option<f64>,
    steps: Option<usize>,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (file, spec) = model.load()?;
    let rows = transmission_sweep(
        &spec,
        kmin.or(file.kmin).unwrap_or(DEFAULT_KMIN),
        kmax.or(file.kmax).unwrap_or(DEFAULT_KMAX),
        steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
    )?;
    with_sink(path, out, |w| Ok(write_sweep_csv(w, &rows)?))
}

/// Thread count from the environment: unset or 0 means automatic.
fn thread_cap() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Validation(format!(
                "{THREADS_ENV} must be a non-negative integer, got '{v}'"
            ))
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    model: &ModelArgs,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let axis: SweepAxis = param.parse()?;
    let (_, spec) = model.load()?;
    let base = spec
        .tdot_params()
        .ok_or_else(|| CliError::Validation("sweep needs a T-dot model".into()))?;
    let values = linspace(from, to, steps)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap()?)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start thread pool: {e}")))?;
    let points: Vec<SweepPoint> = pool.install(|| {
        values
            .par_iter()
            .map(|&v| sweep_point(base, axis, v))
            .collect::<respole_core::Result<_>>()
    })?;

    with_sink(path, out, |w| {
        writeln!(w, "{axis},z_re,z_im,k_re,k_im,E_re,E_im,class")?;
        for pt in &points {
            for p in &pt.poles {
                let (z, k) = (p.z.value(), p.k.value());
                let nums = [z.re, z.im, k.re, k.im, p.energy.re, p.energy.im]
                    .map(fmt17)
                    .join(",");
                writeln!(w, "{},{nums},{}", fmt17(pt.value), p.class)?;
            }
        }
        Ok(())
    })?;

    let changes = transitions(&points);
    if changes.is_empty() {
        writeln!(err, "transitions: none")?;
    } else {
        let list: Vec<String> = changes.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        writeln!(err, "transitions: {}", list.join(" "))?;
    }
    Ok(())
}

fn cmd_wavefunction(
    model: &ModelArgs,
    pole_index: usize,
    xmax: Option<usize>,
    normalize: bool,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (file, spec) = model.load()?;
    let poles = solve_poles(&spec)?;
    let pole = poles.get(pole_index).ok_or_else(|| {
        CliError::Validation(format!(
            "pole index {pole_index} out of range: model has {} poles",
            poles.len()
        ))
    })?;
    let pole = if normalize {
        normalize_bound(pole)?
    } else {
        pole.clone()
    };
    let wf = evaluate(&pole, xmax.or(file.xmax).unwrap_or(DEFAULT_XMAX))?;
    with_sink(path, out, |w| Ok(write_wavefunction_csv(w, &wf)?))
}

fn cmd_oracle(
    model: &ModelArgs,
    sites: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (file, spec) = model.load()?;
    let n = sites.or(file.sites).unwrap_or(DEFAULT_SITES);
    if n < MIN_ORACLE_SITES {
        return Err(CliError::Validation(format!(
            "--sites must be at least {MIN_ORACLE_SITES}, got {n}"
        )));
    }
    let report = oracle_report(&spec, n)?;
    writeln!(out, "{}", to_json(&report))?;
    Ok(())
}
