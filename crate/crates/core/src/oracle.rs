//! Brute-force checks that do not go through either pole solver: a hard-wall
//! truncated lattice diagonalized directly, and residuals of the full lattice
//! Schrödinger equation.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feshbach::{q_space_reconstruct, secular_residual};
use crate::model::{p_space_hamiltonian, DeviceSpec};
use crate::siegert::{solve_poles, SpectralPole};
use crate::wavefunction::Site;

/// Real symmetric Hamiltonian of the lead cut to `|x| <= n` plus the device.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedLattice {
    pub n: usize,
    pub matrix: DMatrix<f64>,
    /// Site of each row: lead sites `-n..=n` first, then off-lead device sites.
    pub sites: Vec<Site>,
}

pub fn finite_lattice_hamiltonian(spec: &DeviceSpec, n: usize) -> Result<TruncatedLattice> {
    if n < 1 {
        return Err(Error::Domain("need at least one lead site per side".into()));
    }
    let t = spec.lead_t();
    let lead = 2 * n + 1;
    let off_lead: Vec<usize> = (0..spec.n_sites())
        .filter(|&i| i != spec.contact())
        .collect();
    let dim = lead + off_lead.len();
    let row_of = |device_site: usize| {
        if device_site == spec.contact() {
            n
        } else {
            lead + off_lead.iter().position(|&s| s == device_site).unwrap()
        }
    };

    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..lead - 1 {
        h[(i, i + 1)] = -t;
        h[(i + 1, i)] = -t;
    }
    let hp = p_space_hamiltonian(spec);
    for a in 0..spec.n_sites() {
        for b in 0..spec.n_sites() {
            h[(row_of(a), row_of(b))] += hp[(a, b)];
        }
    }
    let n_i = n as i64;
    let single = off_lead.len() == 1;
    let sites = (-n_i..=n_i)
        .map(Site::Lead)
        .chain(off_lead.iter().map(|&index| Site::Device { index, single }))
        .collect();
    Ok(TruncatedLattice {
        n,
        matrix: h,
        sites,
    })
}

/// Eigenvalues of the truncated lattice outside the band `[-2t, 2t]`, sorted.
pub fn bound_energies_from_truncation(spec: &DeviceSpec, n: usize) -> Result<Vec<f64>> {
    let lattice = finite_lattice_hamiltonian(spec, n)?;
    let h = lattice.matrix;
    let dim = h.nrows();
    let h_max = h.amax();
    let eig = SymmetricEigen::new(h.clone());
    let edge = 2.0 * spec.lead_t() + 1e-12;
    let mut out = Vec::new();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        if e.abs() <= edge {
            continue;
        }
        let v = eig.eigenvectors.column(j);
        let residual = (&h * v - v * e).norm();
        if residual >= 1e-10 * h_max * dim as f64 {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual,
            });
        }
        out.push(e);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Largest residual of the full lattice equations at lead sites `|x| <= reach`
/// and at every off-lead device site, using `<x|Phi> = z^{|x|} <0|Phi>`.
pub fn lattice_row_deviation(spec: &DeviceSpec, pole: &SpectralPole, reach: i64) -> f64 {
    let t = spec.lead_t();
    let e = pole.energy;
    let c = spec.contact();
    let hp = p_space_hamiltonian(spec);
    let phi = |x: i64| q_space_reconstruct(pole, x);
    let device_row = |i: usize| -> Complex64 {
        (0..spec.n_sites())
            .map(|j| pole.amplitudes[j] * hp[(i, j)])
            .sum::<Complex64>()
            - e * pole.amplitudes[i]
    };

    let mut worst = 0.0f64;
    for x in -reach..=reach {
        let row = if x == 0 {
            -t * (phi(-1) + phi(1)) + device_row(c)
        } else {
            -t * (phi(x - 1) + phi(x + 1)) - e * phi(x)
        };
        worst = worst.max(row.norm());
    }
    for i in (0..spec.n_sites()).filter(|&i| i != c) {
        worst = worst.max(device_row(i).norm());
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleResidual {
    pub z: Complex64,
    pub residual: f64,
    pub lattice_row_dev: f64,
}

pub fn pole_residual_report(spec: &DeviceSpec, poles: &[SpectralPole]) -> Vec<PoleResidual> {
    poles
        .iter()
        .map(|p| PoleResidual {
            z: p.z.value(),
            residual: secular_residual(spec, p.z).norm(),
            lattice_row_dev: lattice_row_deviation(spec, p, 2),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCompare {
    pub siegert: Vec<f64>,
    pub lattice: Vec<f64>,
    /// `None` when the two lists differ in length.
    pub max_abs_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub poles: Vec<PoleResidual>,
    pub bound_compare: BoundCompare,
}

/// Bound-state energies of the Siegert route against the truncated lattice.
pub fn compare_bound_energies(
    spec: &DeviceSpec,
    poles: &[SpectralPole],
    n: usize,
) -> Result<BoundCompare> {
    let mut siegert: Vec<f64> = poles
        .iter()
        .filter(|p| p.class.is_bound())
        .map(|p| p.energy.re)
        .collect();
    siegert.sort_by(f64::total_cmp);
    let lattice = bound_energies_from_truncation(spec, n)?;
    let max_abs_diff = (siegert.len() == lattice.len()).then(|| {
        siegert
            .iter()
            .zip(&lattice)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    });
    Ok(BoundCompare {
        siegert,
        lattice,
        max_abs_diff,
    })
}

pub fn oracle_report(spec: &DeviceSpec, n: usize) -> Result<OracleReport> {
    let poles = solve_poles(spec)?;
    Ok(OracleReport {
        poles: pole_residual_report(spec, &poles),
        bound_compare: compare_bound_energies(spec, &poles, n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::BlochFactor;
    use crate::model::make_tdot;
    use crate::poly::horner;
    use crate::siegert::closed_form_eps0;

    #[test]
    fn tiny_lattice_assembly() {
        let lat = finite_lattice_hamiltonian(&make_tdot(1.0, 1.0, 0.0).unwrap(), 1).unwrap();
        // rows: x = -1, 0, 1, d
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -1.0, 0.0, 0.0, //
                -1.0, 0.0, -1.0, -1.0, //
                0.0, -1.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, 0.0,
            ],
        );
        assert_eq!(lat.matrix, expect);
        assert_eq!(lat.sites.len(), 4);
    }

    #[test]
    fn tiny_lattice_eigenvalues_solve_characteristic_polynomial() {
        // star graph with three leaves on one hub: lambda^2 (lambda^2 - 3)
        let lat = finite_lattice_hamiltonian(&make_tdot(1.0, 1.0, 0.0).unwrap(), 1).unwrap();
        let eig = SymmetricEigen::new(lat.matrix);
        let char_poly = [0.0, 0.0, -3.0, 0.0, 1.0];
        for &e in eig.eigenvalues.iter() {
            let (v, _) = horner(&char_poly, Complex64::new(e, 0.0));
            assert!(v.norm() < 1e-12);
        }
        let min = eig.eigenvalues.min();
        assert!((min + 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bound_energies_at_two_hundred() {
        let spec = make_tdot(1.0, 1.0, 0.0).unwrap();
        let e = bound_energies_from_truncation(&spec, 200).unwrap();
        let cf = closed_form_eps0(1.0, 1.0).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e[0] + (cf.p + cf.q)).abs() < 1e-8);
        assert!((e[1] - (cf.p + cf.q)).abs() < 1e-8);
        assert!((e[1] - 2.0581710).abs() < 5e-8);

        let spec = make_tdot(1.0, 1.0, 3.0).unwrap();
        let cmp = compare_bound_energies(&spec, &solve_poles(&spec).unwrap(), 200).unwrap();
        assert_eq!(cmp.lattice.len(), 2);
        assert!(cmp.max_abs_diff.unwrap() < 1e-8);

        let weak = make_tdot(1.0, 1e-12, 0.0).unwrap();
        assert!(bound_energies_from_truncation(&weak, 200)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn truncation_converges_with_size() {
        let spec = make_tdot(1.0, 1.0, 0.0).unwrap();
        let exact = closed_form_eps0(1.0, 1.0).unwrap();
        let err = |n| {
            let e = bound_energies_from_truncation(&spec, n).unwrap();
            (e[0] + exact.p + exact.q).abs()
        };
        let (e100, e200) = (err(100), err(200));
        assert!(e200 <= e100 && e100 < 1e-6);
    }

    #[test]
    fn residual_report() {
        let spec = make_tdot(1.0, 1.0, 0.0).unwrap();
        let cf = closed_form_eps0(1.0, 1.0).unwrap();
        for r in pole_residual_report(&spec, &cf.poles) {
            assert!(r.residual < 1e-12 && r.lattice_row_dev < 1e-12, "{r:?}");
        }
        assert!(pole_residual_report(&spec, &[]).is_empty());

        // z = 0.79 is not a pole: det = -(z^4 + z^2 - 1) / z^2
        let mut off = cf.poles[0].clone();
        off.z = BlochFactor::new(Complex64::new(0.79, 0.0)).unwrap();
        let r = &pole_residual_report(&spec, &[off])[0];
        let z: f64 = 0.79;
        let direct = (z.powi(4) + z * z - 1.0).abs() / (z * z);
        assert!((r.residual - direct).abs() < 1e-15);
        assert!((r.residual - 0.0217927).abs() < 5e-8);
    }

    #[test]
    fn report_serializes() {
        let report = oracle_report(&make_tdot(1.0, 1.0, 0.0).unwrap(), 50).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["poles"].as_array().unwrap().len(), 4);
        assert!(v["bound_compare"]["max_abs_diff"].as_f64().unwrap() < 1e-8);
        assert!(v["poles"][0].get("lattice_row_dev").is_some());
    }
}
