//! Parameter scans of the T-dot pole set and detection of changes in the
//! pole classification along the scan.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::siegert::{solve_poles, PoleClass, SpectralPole};

/// T-dot parameter that a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    T1,
    EpsD,
}

impl SweepAxis {
    pub fn apply(self, base: ModelParams, value: f64) -> Result<ModelParams> {
        match self {
            SweepAxis::T1 => ModelParams::new(base.t, value, base.eps_d),
            SweepAxis::EpsD => ModelParams::new(base.t, base.t1, value),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::T1 => "t1",
            SweepAxis::EpsD => "eps_d",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" => Ok(SweepAxis::T1),
            "eps-d" | "eps_d" => Ok(SweepAxis::EpsD),
            other => Err(Error::Domain(format!(
                "unsupported sweep parameter '{other}' (expected t1 or eps-d)"
            ))),
        }
    }
}

/// Uniform grid from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !from.is_finite() || !to.is_finite() || from >= to {
        return Err(Error::Domain(format!(
            "need from < to and steps >= 2, got from = {from}, to = {to}, steps = {steps}"
        )));
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + h * i as f64
            }
        })
        .collect())
}

/// Pole set at one point of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub poles: Vec<SpectralPole>,
}

impl SweepPoint {
    /// Sorted multiset of pole classes.
    pub fn classes(&self) -> Vec<PoleClass> {
        let mut c: Vec<PoleClass> = self.poles.iter().map(|p| p.class).collect();
        c.sort();
        c
    }
}

pub fn sweep_point(base: ModelParams, axis: SweepAxis, value: f64) -> Result<SweepPoint> {
    let spec = axis.apply(base, value)?.device()?;
    Ok(SweepPoint {
        value,
        poles: solve_poles(&spec)?,
    })
}

/// Consecutive scan values `(before, after)` between which the class
/// multiset changes.
pub fn transitions(points: &[SweepPoint]) -> Vec<(f64, f64)> {
    points
        .windows(2)
        .filter(|w| w[0].classes() != w[1].classes())
        .map(|w| (w[0].value, w[1].value))
        .collect()
}
