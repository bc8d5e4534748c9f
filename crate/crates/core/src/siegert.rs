//! Siegert boundary-condition route.
//!
//! Imposing purely outgoing waves `<x|Phi> = z^{|x|} <0|Phi>` on the lead
//! closes the Schrödinger equation on the device, and clearing denominators
//! turns `det(E(z) - H_eff(z)) = 0` into a real polynomial of degree
//! `2 n_sites` in `z`. Every root is a pole of the S matrix.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{energy_from_z, k_from_z, BlochFactor, WaveNumber};
use crate::error::{Error, Result};
use crate::feshbach::secular_matrix;
use crate::linalg::null_vector;
use crate::model::{p_space_hamiltonian, DeviceSpec};
pub use crate::poly::poly_roots;

/// Tolerance for the unit-circle and `Re k in {0, pi}` tests.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Polishing tolerance handed to [`poly_roots`] by [`solve_poles`].
pub const ROOT_TOL: f64 = 1e-13;

/// Position of a pole in the complex `k` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PoleClass {
    /// `Re k = 0`, `Im k > 0`: below the band.
    BoundLower,
    /// `Re k = pi`, `Im k > 0`: above the band.
    BoundUpper,
    /// `Re k in {0, pi}`, `Im k < 0`.
    AntiBound,
    /// `Re k > 0`, `Im k < 0`.
    Resonant,
    /// `Re k < 0`, `Im k < 0`.
    AntiResonant,
    /// `z` on the unit circle or at `+-1`.
    Threshold,
    /// Device level with no path to the lead.
    Decoupled,
}

impl PoleClass {
    pub fn is_bound(self) -> bool {
        matches!(self, PoleClass::BoundLower | PoleClass::BoundUpper)
    }

    pub fn name(self) -> &'static str {
        match self {
            PoleClass::BoundLower => "BoundLower",
            PoleClass::BoundUpper => "BoundUpper",
            PoleClass::AntiBound => "AntiBound",
            PoleClass::Resonant => "Resonant",
            PoleClass::AntiResonant => "AntiResonant",
            PoleClass::Threshold => "Threshold",
            PoleClass::Decoupled => "Decoupled",
        }
    }
}

impl std::fmt::Display for PoleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One discrete eigenstate of the open system.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPole {
    pub z: BlochFactor,
    pub k: WaveNumber,
    pub energy: Complex64,
    pub class: PoleClass,
    /// P-space amplitudes, indexed like the device sites.
    pub amplitudes: Vec<Complex64>,
    pub contact: usize,
    /// Set when `<0|Phi>` vanished and another site was used for normalization.
    pub flagged: bool,
}

impl SpectralPole {
    /// `<0|Phi>`, the amplitude on the contact.
    pub fn amp0(&self) -> Complex64 {
        self.amplitudes[self.contact]
    }

    /// Amplitude on the first non-contact device site (the dot for the T-dot).
    pub fn amp_d(&self) -> Complex64 {
        (0..self.amplitudes.len())
            .find(|&i| i != self.contact)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    fn from_parts(
        z: Complex64,
        t: f64,
        class: PoleClass,
        amplitudes: Vec<Complex64>,
        contact: usize,
    ) -> Self {
        let z = BlochFactor::new(z).expect("pole z is nonzero");
        Self {
            z,
            k: k_from_z(z),
            energy: energy_from_z(z, t),
            class,
            amplitudes,
            contact,
            flagged: false,
        }
    }
}

/// Flat record used for JSON output of pole sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub z_re: f64,
    pub z_im: f64,
    pub k_re: f64,
    pub k_im: f64,
    #[serde(rename = "E_re")]
    pub e_re: f64,
    #[serde(rename = "E_im")]
    pub e_im: f64,
    pub class: PoleClass,
    pub amp0_re: f64,
    pub amp0_im: f64,
    pub ampd_re: f64,
    pub ampd_im: f64,
}

impl From<&SpectralPole> for PoleRecord {
    fn from(p: &SpectralPole) -> Self {
        let (z, k, e, a0, ad) = (p.z.value(), p.k.value(), p.energy, p.amp0(), p.amp_d());
        Self {
            z_re: z.re,
            z_im: z.im,
            k_re: k.re,
            k_im: k.im,
            e_re: e.re,
            e_im: e.im,
            class: p.class,
            amp0_re: a0.re,
            amp0_im: a0.im,
            ampd_re: ad.re,
            ampd_im: ad.im,
        }
    }
}

/// Closed-form poles of the T-dot at `eps_d = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEps0 {
    pub p: f64,
    pub q: f64,
    /// BoundLower, BoundUpper, Resonant, AntiResonant, in that order.
    pub poles: [SpectralPole; 4],
}

/// Secular polynomial in ascending powers of `z`.
///
/// For the T-dot this is `t^2 z^4 + t eps_d z^3 + t1^2 z^2 - t eps_d z - t^2`.
/// Other devices go through [`interpolated_secular_polynomial`].
pub fn secular_polynomial(spec: &DeviceSpec) -> Result<Vec<f64>> {
    match spec.tdot_params() {
        Some(m) => {
            let (t, t1, e) = (m.t, m.t1, m.eps_d);
            Ok(vec![-t * t, -t * e, t1 * t1, t * e, t * t])
        }
        None => interpolated_secular_polynomial(spec),
    }
}

/// `(-1)^{n-1} z^n det(E(z) - H_eff(z))` for an `n`-site device, sampled at
/// `2n + 1` points on the unit circle and interpolated.
///
/// The samples are the `(2n+1)`-th roots of unity rotated by half a step, so
/// `z = +-1` is never hit and the interpolation system is a scaled discrete
/// Fourier transform, inverted exactly by its adjoint. The sign makes the
/// leading coefficient `+t^n` for the T-dot layout.
pub fn interpolated_secular_polynomial(spec: &DeviceSpec) -> Result<Vec<f64>> {
    let n = spec.n_sites();
    let m = 2 * n + 1;
    let shift = PI / (2 * m) as f64;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let nodes: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64 + shift))
        .collect();
    let values: Vec<Complex64> = nodes
        .iter()
        .map(|&z| {
            let bf = BlochFactor::new(z).expect("unit-circle node");
            sign * z.powi(n as i32) * secular_matrix(spec, bf).determinant()
        })
        .collect();
    let coeffs: Vec<Complex64> = (0..m)
        .map(|power| {
            nodes
                .iter()
                .zip(&values)
                .map(|(z, v)| v * z.powi(-(power as i32)))
                .sum::<Complex64>()
                / m as f64
        })
        .collect();
    let scale = coeffs.iter().fold(1.0f64, |acc, c| acc.max(c.norm()));
    coeffs
        .iter()
        .map(|c| {
            if c.im.abs() <= 1e-10 * scale {
                Ok(c.re)
            } else {
                Err(Error::Internal(format!(
                    "interpolated secular polynomial has a non-real coefficient {c}"
                )))
            }
        })
        .collect()
}

/// Classifies a pole by where `k = -i Log z` falls.
pub fn classify(z: BlochFactor, tol: f64) -> Result<PoleClass> {
    let zv = z.value();
    if (zv.norm() - 1.0).abs() <= tol || (zv - 1.0).norm() <= tol || (zv + 1.0).norm() <= tol {
        return Ok(PoleClass::Threshold);
    }
    let k = k_from_z(z);
    let on_zero = k.re().abs() <= tol;
    // Re k in (-pi, pi], so both ends are near pi
    let on_pi = (k.re().abs() - PI).abs() <= tol;
    if k.im() > 0.0 {
        if on_zero {
            Ok(PoleClass::BoundLower)
        } else if on_pi {
            Ok(PoleClass::BoundUpper)
        } else {
            Err(Error::Classification {
                re: zv.re,
                im: zv.im,
            })
        }
    } else if on_zero || on_pi {
        Ok(PoleClass::AntiBound)
    } else if k.re() > 0.0 {
        Ok(PoleClass::Resonant)
    } else {
        Ok(PoleClass::AntiResonant)
    }
}

/// Evaluates the closed-form `eps_d = 0` solutions.
pub fn closed_form_eps0(t: f64, t1: f64) -> Result<ClosedFormEps0> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "lead hopping t must be > 0, got {t}"
        )));
    }
    if t1 == 0.0 || !t1.is_finite() {
        return Err(Error::Domain("closed form needs t1 != 0".into()));
    }
    let root = (4.0 * t.powi(4) + t1.powi(4)).sqrt();
    let p = ((t1 * t1 + root) / (2.0 * t * t)).sqrt();
    let q = 1.0 / p;
    let kappa = p.ln();
    let pole = |k: Complex64, energy: Complex64, class| {
        let k = WaveNumber::new(k);
        let z = BlochFactor::from_k(k);
        // second row of (E - H_eff) v = 0 with eps_d = 0: amp_d = -t1 amp0 / E
        let amplitudes = vec![Complex64::new(1.0, 0.0), Complex64::new(-t1, 0.0) / energy];
        SpectralPole {
            z,
            k,
            energy,
            class,
            amplitudes,
            contact: 0,
            flagged: false,
        }
    };
    let poles = [
        pole(
            Complex64::new(0.0, kappa),
            Complex64::new(-(p + q) * t, 0.0),
            PoleClass::BoundLower,
        ),
        pole(
            Complex64::new(PI, kappa),
            Complex64::new((p + q) * t, 0.0),
            PoleClass::BoundUpper,
        ),
        pole(
            Complex64::new(PI / 2.0, -kappa),
            Complex64::new(0.0, -(p - q) * t),
            PoleClass::Resonant,
        ),
        pole(
            Complex64::new(-PI / 2.0, -kappa),
            Complex64::new(0.0, (p - q) * t),
            PoleClass::AntiResonant,
        ),
    ];
    Ok(ClosedFormEps0 { p, q, poles })
}

/// Siegert route: secular polynomial, all its roots, classification and
/// P-space amplitudes, sorted by `(Re z, Im z)`.
pub fn solve_poles(spec: &DeviceSpec) -> Result<Vec<SpectralPole>> {
    let coeffs = secular_polynomial(spec)?;
    let roots = poly_roots(&coeffs, ROOT_TOL)?;
    assemble_poles(spec, roots, CLASSIFY_TOL)
}

/// Turns raw roots in `z` into classified poles with amplitudes.
///
/// Degenerate devices (sites with no path to the lead) get special handling:
/// roots whose energy matches an isolated-block level are `Decoupled`, and if
/// what remains attached to the lead is a bare lead site, its `z = +-1`
/// factor is dropped since a uniform lead has no discrete states.
pub(crate) fn assemble_poles(
    spec: &DeviceSpec,
    roots: Vec<Complex64>,
    tol: f64,
) -> Result<Vec<SpectralPole>> {
    let t = spec.lead_t();
    let decoupled = spec.decoupled_sites();
    let (isolated_levels, bare_lead) = if decoupled.is_empty() {
        (Vec::new(), false)
    } else {
        let h = p_space_hamiltonian(spec)
            .select_rows(&decoupled)
            .select_columns(&decoupled);
        let levels = SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .collect::<Vec<_>>();
        let attached = spec.n_sites() - decoupled.len();
        (
            levels,
            attached == 1 && spec.onsite()[spec.contact()] == 0.0,
        )
    };

    let mut poles = Vec::with_capacity(roots.len());
    for z in roots {
        let bf = BlochFactor::new(z)?;
        let energy = energy_from_z(bf, t);
        let is_decoupled = isolated_levels
            .iter()
            .any(|&lvl| (energy - lvl).norm() <= 1e-8 * lvl.abs().max(t));
        let class = if is_decoupled {
            PoleClass::Decoupled
        } else if bare_lead {
            continue;
        } else {
            classify(bf, tol)?
        };
        let z = if matches!(
            class,
            PoleClass::BoundLower | PoleClass::BoundUpper | PoleClass::AntiBound
        ) && z.im.abs() <= 1e-12 * z.norm()
        {
            Complex64::new(z.re, 0.0)
        } else {
            z
        };
        let bf = BlochFactor::new(z)?;
        let v = null_vector(&secular_matrix(spec, bf))?;
        let c = spec.contact();
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        let (pivot, flagged) = if v[c].norm() >= 1e-12 * vmax {
            (c, false)
        } else {
            let big = (0..v.len())
                .max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))
                .expect("nonempty vector");
            (big, true)
        };
        let scale = v[pivot];
        let mut amplitudes: Vec<Complex64> = v.iter().map(|x| x / scale).collect();
        amplitudes[pivot] = Complex64::new(1.0, 0.0);
        if flagged {
            amplitudes[c] = Complex64::new(0.0, 0.0);
        }
        let mut pole = SpectralPole::from_parts(z, t, class, amplitudes, c);
        pole.flagged = flagged;
        poles.push(pole);
    }
    poles.sort_by(|a, b| {
        let (a, b) = (a.z.value(), b.z.value());
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    Ok(poles)
}

/// Largest distance between matched poles of two sets, or `None` if the sets
/// differ in size. Matching is greedy nearest-neighbour, which is exact when
/// poles are separated by more than twice the distance being certified.
pub fn max_pole_distance(a: &[SpectralPole], b: &[SpectralPole]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for pa in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, pb)| (i, (pa.z.value() - pb.z.value()).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[idx] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
