//! Conversions between energy `E`, wave number `k` and the Bloch factor
//! `z = e^{ik}` of the uniform lead, whose dispersion is `E = -t(z + 1/z)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative discriminant below which an energy counts as a band edge.
pub const BAND_EDGE_TOL: f64 = 1e-12;

/// Complex wave number with `Re k` wrapped into the first Brillouin zone `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveNumber(Complex64);

impl WaveNumber {
    pub fn new(k: Complex64) -> Self {
        Self(Complex64::new(wrap_bz(k.re), k.im))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }
}

/// Nonzero Bloch factor `z = e^{ik}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochFactor(Complex64);

impl BlochFactor {
    pub fn new(z: Complex64) -> Result<Self> {
        if z == Complex64::new(0.0, 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!(
                "Bloch factor must be finite and nonzero, got {z}"
            )));
        }
        Ok(Self(z))
    }

    pub fn from_k(k: WaveNumber) -> Self {
        Self((Complex64::i() * k.0).exp())
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn inv(self) -> Self {
        Self(self.0.inv())
    }
}

fn wrap_bz(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// `E = -t (z + 1/z)`; identical on both sheets `z` and `1/z`.
pub fn energy_from_z(z: BlochFactor, t: f64) -> Complex64 {
    -t * (z.0 + z.0.inv())
}

/// Principal `k = -i Log z`, with `k = -pi` mapped to `k = pi`.
pub fn k_from_z(z: BlochFactor) -> WaveNumber {
    let z = z.0;
    let arg = z.im.atan2(z.re);
    let arg = if arg <= -PI { PI } else { arg };
    WaveNumber(Complex64::new(arg, -z.norm().ln()))
}

/// The two Bloch factors sharing energy `E`: roots of `t z^2 + E z + t = 0`.
///
/// The first root is the physical-sheet one: `|z| < 1` when the moduli differ,
/// otherwise (real `E` inside the band) the retarded root with `Im z > 0`.
pub fn z_pair_from_energy(energy: Complex64, t: f64) -> Result<(BlochFactor, BlochFactor)> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "lead hopping t must be > 0, got {t}"
        )));
    }
    let disc = energy * energy - 4.0 * t * t;
    if disc.norm() < BAND_EDGE_TOL * t * t {
        return Err(Error::BandEdge { energy: energy.re });
    }
    let root = disc.sqrt();
    // pick the sign that avoids cancellation, then use z1 * z2 = 1
    let big = if (energy.conj() * root).re >= 0.0 {
        -(energy + root) / (2.0 * t)
    } else {
        (root - energy) / (2.0 * t)
    };
    let z1 = BlochFactor::new(big)?;
    let z2 = z1.inv();
    let (a, b) = (z1.0.norm(), z2.0.norm());
    let first_is_z1 = if (a - b).abs() > 1e-12 * a.max(b) {
        a < b
    } else {
        z1.0.im > 0.0
    };
    Ok(if first_is_z1 { (z1, z2) } else { (z2, z1) })
}

/// Group velocity `dE/dk = 2t sin k` of the lead.
pub fn group_velocity(k: f64, t: f64) -> f64 {
    2.0 * t * k.sin()
}
