//! Feshbach projection route.
//!
//! The lead is projected out exactly: its surface Green's function gives a
//! self-energy `-2t z` on the contact site, leaving a small energy-dependent,
//! non-Hermitian effective Hamiltonian on the device. Poles are the zeros of
//! `det(E(z) - H_eff(z))`, located here by Newton iteration in `z`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{energy_from_z, BlochFactor};
use crate::error::{Error, Result};
use crate::linalg::{hadamard_bound, to_complex, CMatrix};
use crate::model::{p_space_hamiltonian, DeviceSpec};
use crate::siegert::{assemble_poles, SpectralPole, CLASSIFY_TOL};

/// Distance in `z` below which two Newton limits are the same pole.
pub const DEDUP_DIST: f64 = 1e-8;

/// Lead self-energy on the contact site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergy {
    pub contact_value: Complex64,
}

/// `Sigma(z) = -2 t z`: one `-t z` from each half of the bisected lead.
pub fn self_energy(spec: &DeviceSpec, z: BlochFactor) -> SelfEnergy {
    SelfEnergy {
        contact_value: -2.0 * spec.lead_t() * z.value(),
    }
}

/// Effective Hamiltonian of the P space evaluated at a given `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    pub matrix: CMatrix,
    pub z: BlochFactor,
    /// Device site indices spanning the P space, in matrix order.
    pub basis: Vec<usize>,
}

/// Lead Green's function `<x|(E - QHQ)^{-1}|sgn(x)>` = `-z^{|x|} / t`.
pub fn surface_green(x: i64, z: BlochFactor, t: f64) -> Result<Complex64> {
    if x == 0 {
        return Err(Error::Domain("site 0 belongs to the P space".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "lead hopping t must be > 0, got {t}"
        )));
    }
    let power = i32::try_from(x.unsigned_abs())
        .map_err(|_| Error::Domain(format!("lead site {x} out of range")))?;
    Ok(-z.value().powi(power) / t)
}

pub fn build_h_eff(spec: &DeviceSpec, z: BlochFactor) -> EffectiveHamiltonian {
    let mut matrix = to_complex(&p_space_hamiltonian(spec));
    let c = spec.contact();
    matrix[(c, c)] += self_energy(spec, z).contact_value;
    EffectiveHamiltonian {
        matrix,
        z,
        basis: (0..spec.n_sites()).collect(),
    }
}

/// `E(z) I - H_eff(z)`.
pub(crate) fn secular_matrix(spec: &DeviceSpec, z: BlochFactor) -> CMatrix {
    let e = energy_from_z(z, spec.lead_t());
    let h = build_h_eff(spec, z).matrix;
    CMatrix::from_diagonal_element(h.nrows(), h.ncols(), e) - h
}

/// `det(E(z) I - H_eff(z))` with `E(z) = -t (z + 1/z)`.
pub fn secular_residual(spec: &DeviceSpec, z: BlochFactor) -> Complex64 {
    secular_matrix(spec, z).determinant()
}

const SEED_ANGLES: usize = 64;

fn seed_circles(radii: &[f64]) -> Vec<BlochFactor> {
    radii
        .iter()
        .flat_map(|&r| {
            (0..SEED_ANGLES).map(move |j| {
                let theta = (2.0 * j as f64 + 1.0) * PI / SEED_ANGLES as f64;
                BlochFactor::new(Complex64::from_polar(r, theta)).expect("nonzero seed")
            })
        })
        .collect()
}

/// Seed grid: three circles `|z| in {0.5, 0.999, 1.5}` with 64 angles each.
pub fn default_seeds() -> Vec<BlochFactor> {
    seed_circles(&[0.5, 0.999, 1.5])
}

/// Every pole satisfies `t | |z| - 1/|z| | <= 2 ||PHP||`, so all poles lie in
/// the annulus `1/R <= |z| <= R` with `R` returned here.
pub fn pole_radius_bound(spec: &DeviceSpec) -> f64 {
    let h = p_space_hamiltonian(spec);
    let norm = h
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = norm / spec.lead_t();
    s + (s * s + 1.0).sqrt()
}

/// [`default_seeds`] plus circles on both edges of the pole annulus.
pub fn seeds_for(spec: &DeviceSpec) -> Vec<BlochFactor> {
    let r = pole_radius_bound(spec);
    let mut seeds = default_seeds();
    if r > 1.5 {
        seeds.extend(seed_circles(&[1.0 / r, r]));
    }
    seeds
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100;

/// Newton iteration on `z^n det(E(z) - H_eff(z))`, which clears the order-`n`
/// pole at `z = 0`; `None` if the seed is abandoned.
///
/// The step uses Jacobi's formula, `f / f' = 1 / (n/z + tr(M^{-1} M'))`, with
/// `M' = E'(z) I + 2t e_c e_c^T` and `E'(z) = -t (1 - 1/z^2)`.
fn newton_from(
    spec: &DeviceSpec,
    seed: BlochFactor,
    tol: f64,
    max_iter: usize,
) -> Option<(Complex64, f64)> {
    let t = spec.lead_t();
    let c = spec.contact();
    let n = spec.n_sites() as f64;
    let mut z = seed.value();
    let converged = |m: &CMatrix| {
        let det = m.determinant();
        let scale = hadamard_bound(m).max(1.0);
        (det.norm(), det.norm() < tol * scale)
    };
    for _ in 0..max_iter {
        let bf = BlochFactor::new(z).ok()?;
        let m = secular_matrix(spec, bf);
        let (res, ok) = converged(&m);
        if res == 0.0 {
            return Some((z, res));
        }
        let inv = match m.clone().try_inverse() {
            Some(inv) => inv,
            None => return ok.then_some((z, res)),
        };
        let de = -t * (1.0 - (z * z).inv());
        let trace = n / z + de * inv.trace() + 2.0 * t * inv[(c, c)];
        if !(trace.norm() > 0.0) || !trace.re.is_finite() || !trace.im.is_finite() {
            // derivative underflow: give up on this seed
            return None;
        }
        let step = trace.inv();
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > 1e8 || z.norm() < 1e-8 {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    let bf = BlochFactor::new(z).ok()?;
    let (res, ok) = converged(&secular_matrix(spec, bf));
    ok.then_some((z, res))
}

/// Finds poles by Newton iteration from every seed, merging limits that lie
/// within [`DEDUP_DIST`] of each other.
pub fn feshbach_pole_search(
    spec: &DeviceSpec,
    seeds: &[BlochFactor],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<SpectralPole>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    if seeds.is_empty() {
        return Err(Error::Domain("seed list is empty".into()));
    }
    let mut found: Vec<(Complex64, f64)> = seeds
        .iter()
        .filter_map(|&s| newton_from(spec, s, tol, max_iter))
        .collect();
    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let mut clusters: Vec<(Complex64, f64)> = Vec::new();
    for (z, res) in found {
        match clusters
            .iter_mut()
            .find(|(rep, _)| (rep - z).norm() <= DEDUP_DIST)
        {
            Some(entry) => {
                if res < entry.1 {
                    *entry = (z, res);
                }
            }
            None => clusters.push((z, res)),
        }
    }
    if clusters.is_empty() {
        return Err(Error::NoPoles);
    }
    assemble_poles(
        spec,
        clusters.into_iter().map(|(z, _)| z).collect(),
        CLASSIFY_TOL,
    )
}

/// Pole search with the model-adapted seed grid, tolerance and iteration cap.
pub fn feshbach_poles(spec: &DeviceSpec) -> Result<Vec<SpectralPole>> {
    feshbach_pole_search(spec, &seeds_for(spec), DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Lead amplitude `<x|Phi> = z^{|x|} <0|Phi>`, i.e. `(E - QHQ)^{-1} QHP |Phi>`.
pub fn q_space_reconstruct(pole: &SpectralPole, x: i64) -> Complex64 {
    let power = i32::try_from(x.unsigned_abs()).expect("lead site index fits in i32");
    pole.z.value().powi(power) * pole.amp0()
}
