//! Scattering states at real `k` and the retarded Green's function on the
//! device, both obtained from the same linear system `(E - H_eff(e^{ik})) x = b`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{group_velocity, BlochFactor};
use crate::error::{Error, Result};
use crate::feshbach::secular_matrix;
use crate::linalg::{solve, CVector};
use crate::model::DeviceSpec;

/// Scattering state for a wave of unit amplitude incident from the left.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub k: f64,
    pub energy: f64,
    /// Incoming amplitude, always 1.
    pub a: Complex64,
    /// Reflected amplitude.
    pub b: Complex64,
    /// Transmitted amplitude.
    pub c: Complex64,
    /// P-space amplitudes; the contact entry equals `c`.
    pub amplitudes: Vec<Complex64>,
    pub contact: usize,
    pub transmission: f64,
    pub reflection: f64,
}

impl ScatteringSolution {
    pub fn amp0(&self) -> Complex64 {
        self.amplitudes[self.contact]
    }

    pub fn amp_d(&self) -> Complex64 {
        (0..self.amplitudes.len())
            .find(|&i| i != self.contact)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }
}

/// Column of the retarded Green's function with its source on the contact.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenPair {
    pub k: f64,
    /// `G_{j0}` for every device site `j`.
    pub column: Vec<Complex64>,
    pub contact: usize,
}

impl GreenPair {
    pub fn g00(&self) -> Complex64 {
        self.column[self.contact]
    }

    pub fn gd0(&self) -> Complex64 {
        (0..self.column.len())
            .find(|&i| i != self.contact)
            .map_or(Complex64::new(0.0, 0.0), |i| self.column[i])
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("k must lie in (0, pi), got {k}")))
    }
}

fn solve_on_shell(spec: &DeviceSpec, k: f64, source: Complex64) -> Result<Vec<Complex64>> {
    check_k(k)?;
    let z = BlochFactor::new(Complex64::from_polar(1.0, k))?;
    let m = secular_matrix(spec, z);
    let mut rhs = CVector::zeros(spec.n_sites());
    rhs[spec.contact()] = source;
    Ok(solve(&m, &rhs)?.iter().copied().collect())
}

pub fn scattering_solve(spec: &DeviceSpec, k: f64) -> Result<ScatteringSolution> {
    let t = spec.lead_t();
    let source = Complex64::new(0.0, group_velocity(k, t));
    let amplitudes = solve_on_shell(spec, k, source)?;
    let c = amplitudes[spec.contact()];
    let a = Complex64::new(1.0, 0.0);
    let b = c - a;
    Ok(ScatteringSolution {
        k,
        energy: -2.0 * t * k.cos(),
        a,
        b,
        c,
        amplitudes,
        contact: spec.contact(),
        transmission: c.norm_sqr(),
        reflection: b.norm_sqr(),
    })
}

pub fn green_function(spec: &DeviceSpec, k: f64) -> Result<GreenPair> {
    let column = solve_on_shell(spec, k, Complex64::new(1.0, 0.0))?;
    Ok(GreenPair {
        k,
        column,
        contact: spec.contact(),
    })
}

/// Max deviation between the scattering amplitudes and `i v_g G_{j0}`.
pub fn verify_green_identity(spec: &DeviceSpec, k: f64) -> Result<f64> {
    let sol = scattering_solve(spec, k)?;
    let green = green_function(spec, k)?;
    let ivg = Complex64::new(0.0, group_velocity(k, spec.lead_t()));
    Ok(sol
        .amplitudes
        .iter()
        .zip(&green.column)
        .map(|(a, g)| (a - ivg * g).norm())
        .fold(0.0, f64::max))
}

/// One row of a transmission sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub energy: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub b: Complex64,
    pub c: Complex64,
}

/// Uniform grid in `k`, endpoints included.
pub fn k_grid(k_min: f64, k_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(k_min > 0.0 && k_min < k_max && k_max < PI) {
        return Err(Error::Domain(format!(
            "need 0 < k_min < k_max < pi, got k_min = {k_min}, k_max = {k_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::Domain(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    let h = (k_max - k_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                k_max
            } else {
                k_min + h * i as f64
            }
        })
        .collect())
}

pub fn transmission_sweep(
    spec: &DeviceSpec,
    k_min: f64,
    k_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    k_grid(k_min, k_max, steps)?
        .into_iter()
        .map(|k| sweep_row(spec, k))
        .collect()
}

pub fn sweep_row(spec: &DeviceSpec, k: f64) -> Result<SweepRow> {
    let s = scattering_solve(spec, k)?;
    Ok(SweepRow {
        k,
        energy: s.energy,
        transmission: s.transmission,
        reflection: s.reflection,
        b: s.b,
        c: s.c,
    })
}
