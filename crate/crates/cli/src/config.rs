//! Layered run configuration: built-in defaults, then a `--config` JSON
//! document, then command-line flags.

use std::fs;
use std::path::Path;

use respole_core::{make_tdot, DeviceSpec};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_T: f64 = 1.0;
pub const DEFAULT_T1: f64 = 1.0;
pub const DEFAULT_EPS_D: f64 = 0.0;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Full device or `{"tdot": {...}}` shorthand.
    pub model: Option<DeviceSpec>,
    pub tol: Option<f64>,
    pub kmin: Option<f64>,
    pub kmax: Option<f64>,
    pub steps: Option<usize>,
    pub xmax: Option<usize>,
    pub sites: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("invalid config: {e}")))
    }
}

/// Model flags as given on the command line (absent = not overridden).
#[derive(Debug, Clone, Copy, Default)]
pub struct ModelOverrides {
    pub t: Option<f64>,
    pub t1: Option<f64>,
    pub eps_d: Option<f64>,
}

/// Resolves the device: flags override the config model, which overrides
/// the default T-dot `(1, 1, 0)`.
pub fn resolve_model(file: &ConfigFile, flags: ModelOverrides) -> Result<DeviceSpec, CliError> {
    let base = match &file.model {
        Some(spec) => spec.clone(),
        None => make_tdot(DEFAULT_T, DEFAULT_T1, DEFAULT_EPS_D)?,
    };
    if flags.t.is_none() && flags.t1.is_none() && flags.eps_d.is_none() {
        return Ok(base);
    }
    match base.tdot_params() {
        Some(p) => Ok(make_tdot(
            flags.t.unwrap_or(p.t),
            flags.t1.unwrap_or(p.t1),
            flags.eps_d.unwrap_or(p.eps_d),
        )?),
        None if flags.t1.is_none() && flags.eps_d.is_none() => Ok(DeviceSpec::new(
            base.n_sites(),
            base.onsite().to_vec(),
            base.hoppings().to_vec(),
            base.contact(),
            flags.t.unwrap_or(base.lead_t()),
        )?),
        None => Err(CliError::Validation(
            "--t1 and --eps-d only apply to a T-dot model".into(),
        )),
    }
}

pub fn resolve_tol(file: &ConfigFile, flag: Option<f64>) -> Result<f64, CliError> {
    let tol = flag.or(file.tol).unwrap_or(DEFAULT_TOL);
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(CliError::Validation(format!("tol must be > 0, got {tol}")))
    }
}
