//! Lattice wavefunctions of discrete states: exponential decay for bound
//! states, exponential growth for resonances.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::feshbach::q_space_reconstruct;
use crate::siegert::{PoleClass, SpectralPole};

/// Lattice site label: a lead site `x` (the contact is `x = 0`) or a device
/// site off the lead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Lead(i64),
    /// Device index, plus whether it is the only off-lead site (printed `d`).
    Device {
        index: usize,
        single: bool,
    },
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Site::Lead(x) => write!(f, "{x}"),
            Site::Device { single: true, .. } => f.write_str("d"),
            Site::Device { index, .. } => write!(f, "d{index}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionSample {
    pub site: Site,
    pub value: Complex64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub samples: Vec<WavefunctionSample>,
    /// False for everything but bound states, which alone lie in the Hilbert space.
    pub normalizable: bool,
}

/// Samples `<x|Phi>` for `x in [-x_max, x_max]`, then the off-lead device sites.
pub fn evaluate(pole: &SpectralPole, x_max: usize) -> Result<Wavefunction> {
    if x_max < 1 {
        return Err(Error::Domain("x_max must be at least 1".into()));
    }
    let x_max = i64::try_from(x_max).map_err(|_| Error::Domain("x_max too large".into()))?;
    let sample = |site, value: Complex64| WavefunctionSample {
        site,
        value,
        magnitude: value.norm(),
    };
    let mut samples: Vec<WavefunctionSample> = (-x_max..=x_max)
        .map(|x| sample(Site::Lead(x), q_space_reconstruct(pole, x)))
        .collect();
    let off_lead: Vec<usize> = (0..pole.amplitudes.len())
        .filter(|&i| i != pole.contact)
        .collect();
    let single = off_lead.len() == 1;
    samples.extend(
        off_lead
            .iter()
            .map(|&index| sample(Site::Device { index, single }, pole.amplitudes[index])),
    );
    Ok(Wavefunction {
        samples,
        normalizable: pole.class.is_bound(),
    })
}

/// Rescales a bound state to unit norm over the whole lattice.
///
/// The lead tails are geometric, so `sum_x |z|^{2|x|} = 1 + 2|z|^2 / (1 - |z|^2)`
/// is summed exactly.
pub fn normalize_bound(pole: &SpectralPole) -> Result<SpectralPole> {
    if !pole.class.is_bound() {
        return Err(Error::Domain(format!(
            "{} state is not normalizable",
            pole.class
        )));
    }
    let r2 = pole.z.value().norm_sqr();
    let device: f64 = pole.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let tails = pole.amp0().norm_sqr() * 2.0 * r2 / (1.0 - r2);
    let norm = (device + tails).sqrt();
    let mut out = pole.clone();
    for a in &mut out.amplitudes {
        *a /= norm;
    }
    Ok(out)
}

/// `kappa = Im k`: positive for bound states, negative for the rest.
pub fn decay_rate(pole: &SpectralPole) -> f64 {
    pole.k.im()
}

/// True if this class has a wavefunction that grows away from the device.
pub fn is_divergent(class: PoleClass) -> bool {
    matches!(
        class,
        PoleClass::Resonant | PoleClass::AntiResonant | PoleClass::AntiBound
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::BlochFactor;
    use crate::model::make_tdot;
    use crate::siegert::solve_poles;

    fn poles() -> Vec<SpectralPole> {
        solve_poles(&make_tdot(1.0, 1.0, 0.0).unwrap()).unwrap()
    }

    fn find(class: PoleClass) -> SpectralPole {
        poles().into_iter().find(|p| p.class == class).unwrap()
    }

    fn q() -> f64 {
        ((5f64.sqrt() - 1.0) / 2.0).sqrt()
    }

    #[test]
    fn samples_and_labels() {
        let w = evaluate(&find(PoleClass::BoundLower), 20).unwrap();
        assert_eq!(w.samples.len(), 42);
        assert_eq!(w.samples[0].site, Site::Lead(-20));
        assert_eq!(w.samples[41].site.to_string(), "d");
        assert!(w.normalizable);
        assert!(
            !evaluate(&find(PoleClass::Resonant), 3)
                .unwrap()
                .normalizable
        );
        assert!(evaluate(&find(PoleClass::Resonant), 0).is_err());
    }

    #[test]
    fn magnitudes_at_five_sites() {
        let b = evaluate(&find(PoleClass::BoundLower), 5).unwrap();
        let at5 = b.samples.iter().find(|s| s.site == Site::Lead(5)).unwrap();
        assert!((at5.magnitude - q().powi(5)).abs() < 1e-14);
        assert!((at5.magnitude - 0.3002831).abs() < 5e-8);

        let r = evaluate(&find(PoleClass::Resonant), 5).unwrap();
        let at5 = r.samples.iter().find(|s| s.site == Site::Lead(5)).unwrap();
        assert!((at5.magnitude - q().powi(-5)).abs() < 1e-13);
        assert!((at5.magnitude - 3.3301906).abs() < 5e-7);

        for pole in poles() {
            let w = evaluate(&pole, 2).unwrap();
            assert_eq!(w.samples[2].value, pole.amp0());
        }
    }

    #[test]
    fn normalization_examples() {
        let pole = find(PoleClass::BoundLower);
        assert!((pole.amp_d().re - 0.4858683).abs() < 5e-8);
        let n2 = pole.amp_d().norm_sqr() + 1.0 + 2.0 * q() * q() / (1.0 - q() * q());
        assert!((n2 - 2.0 * 5f64.sqrt()).abs() < 1e-12);
        assert!((n2.sqrt() - 2.1147425).abs() < 5e-8);

        let normed = normalize_bound(&pole).unwrap();
        assert!((normed.amp0().re - 1.0 / n2.sqrt()).abs() < 1e-14);
        let w = evaluate(&normed, 200).unwrap();
        let total: f64 = w.samples.iter().map(|s| s.magnitude * s.magnitude).sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");

        assert!(matches!(
            normalize_bound(&find(PoleClass::Resonant)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn decay_rates() {
        let p = 1.0 / q();
        assert!((decay_rate(&find(PoleClass::BoundLower)) - p.ln()).abs() < 1e-14);
        assert!((decay_rate(&find(PoleClass::BoundLower)) - 0.2406059).abs() < 5e-8);
        assert!((decay_rate(&find(PoleClass::Resonant)) + 0.2406059).abs() < 5e-8);
        let mut thr = find(PoleClass::BoundLower);
        thr.z = BlochFactor::new(Complex64::new(1.0, 0.0)).unwrap();
        thr.k = crate::dispersion::k_from_z(thr.z);
        assert_eq!(decay_rate(&thr), 0.0);
    }
}
