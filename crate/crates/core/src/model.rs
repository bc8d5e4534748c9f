//! Physical model: a finite device (P space) attached to one infinite uniform
//! tight-binding lead that runs straight through the contact site.
//!
//! The T-type dot is the two-site special case: site `0` sits on the lead and
//! the dot `d` hangs off it with hopping `-t1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest device supported by the polynomial route (degree `2 * n_sites <= 16`).
pub const MAX_DEVICE_SITES: usize = 8;

/// Parameters of the side-coupled (T-type) dot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Lead hopping; sets the band `[-2t, 2t]`.
    pub t: f64,
    /// Dot-lead coupling.
    pub t1: f64,
    /// Dot onsite potential.
    pub eps_d: f64,
}

impl ModelParams {
    pub fn new(t: f64, t1: f64, eps_d: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "lead hopping t must be > 0, got {t}"
            )));
        }
        if !t1.is_finite() || !eps_d.is_finite() {
            return Err(Error::Domain("t1 and eps_d must be finite".into()));
        }
        Ok(Self { t, t1, eps_d })
    }

    pub fn device(&self) -> Result<DeviceSpec> {
        make_tdot(self.t, self.t1, self.eps_d)
    }
}

/// A hopping bond `(i, j, amplitude)`, applied symmetrically.
pub type Hopping = (usize, usize, f64);

/// Finite device coupled to the lead at a single contact site.
///
/// Fields are private so every value in circulation has passed validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceSpec {
    n_sites: usize,
    onsite: Vec<f64>,
    hoppings: Vec<Hopping>,
    contact: usize,
    lead_t: f64,
}

impl DeviceSpec {
    pub fn new(
        n_sites: usize,
        onsite: Vec<f64>,
        hoppings: Vec<Hopping>,
        contact: usize,
        lead_t: f64,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidDevice("n_sites must be at least 1".into()));
        }
        if n_sites > MAX_DEVICE_SITES {
            return Err(Error::InvalidDevice(format!(
                "n_sites = {n_sites} exceeds the supported maximum {MAX_DEVICE_SITES}"
            )));
        }
        if onsite.len() != n_sites {
            return Err(Error::InvalidDevice(format!(
                "onsite has {} entries, expected {n_sites}",
                onsite.len()
            )));
        }
        if onsite.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidDevice(
                "onsite energies must be finite".into(),
            ));
        }
        if contact >= n_sites {
            return Err(Error::InvalidDevice(format!(
                "contact index {contact} out of range for {n_sites} sites"
            )));
        }
        if !(lead_t > 0.0) || !lead_t.is_finite() {
            return Err(Error::Domain(format!(
                "lead hopping t must be > 0, got {lead_t}"
            )));
        }
        let mut seen = Vec::with_capacity(hoppings.len());
        for &(i, j, amp) in &hoppings {
            if i >= n_sites || j >= n_sites {
                return Err(Error::InvalidDevice(format!(
                    "hopping ({i}, {j}) references a site outside 0..{n_sites}"
                )));
            }
            if i == j {
                return Err(Error::InvalidDevice(format!(
                    "hopping ({i}, {j}) is a self loop; use onsite instead"
                )));
            }
            if !amp.is_finite() {
                return Err(Error::InvalidDevice(
                    "hopping amplitudes must be finite".into(),
                ));
            }
            let key = (i.min(j), i.max(j));
            if seen.contains(&key) {
                return Err(Error::InvalidDevice(format!(
                    "duplicate hopping between sites {} and {}",
                    key.0, key.1
                )));
            }
            seen.push(key);
        }
        Ok(Self {
            n_sites,
            onsite,
            hoppings,
            contact,
            lead_t,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn hoppings(&self) -> &[Hopping] {
        &self.hoppings
    }

    pub fn contact(&self) -> usize {
        self.contact
    }

    pub fn lead_t(&self) -> f64 {
        self.lead_t
    }

    /// Reads the T-dot parameters back if this device has the T-dot layout.
    pub fn tdot_params(&self) -> Option<ModelParams> {
        if self.n_sites != 2 || self.contact != 0 || self.onsite[0] != 0.0 {
            return None;
        }
        let t1 = match self.hoppings.as_slice() {
            [] => 0.0,
            [(i, j, amp)] if (*i, *j) == (0, 1) || (*i, *j) == (1, 0) => -amp,
            _ => return None,
        };
        Some(ModelParams {
            t: self.lead_t,
            t1,
            eps_d: self.onsite[1],
        })
    }

    /// Sites with no path of nonzero hoppings to the contact.
    ///
    /// Non-empty means the device is degenerate (for the T-dot: `t1 = 0`).
    pub fn decoupled_sites(&self) -> Vec<usize> {
        let mut reached = vec![false; self.n_sites];
        reached[self.contact] = true;
        let mut stack = vec![self.contact];
        while let Some(site) = stack.pop() {
            for &(i, j, amp) in &self.hoppings {
                if amp == 0.0 {
                    continue;
                }
                let other = if i == site {
                    j
                } else if j == site {
                    i
                } else {
                    continue;
                };
                if !reached[other] {
                    reached[other] = true;
                    stack.push(other);
                }
            }
        }
        (0..self.n_sites).filter(|&s| !reached[s]).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.decoupled_sites().is_empty()
    }
}

/// Builds the T-type dot: sites `{0, d}`, dot potential `eps_d`, bond `-t1`.
pub fn make_tdot(t: f64, t1: f64, eps_d: f64) -> Result<DeviceSpec> {
    ModelParams::new(t, t1, eps_d)?;
    DeviceSpec::new(2, vec![0.0, eps_d], vec![(0, 1, -t1)], 0, t)
}

/// Real symmetric P-space Hamiltonian `PHP` of the isolated device.
pub fn p_space_hamiltonian(spec: &DeviceSpec) -> DMatrix<f64> {
    let n = spec.n_sites;
    let mut h = DMatrix::zeros(n, n);
    for (i, &e) in spec.onsite.iter().enumerate() {
        h[(i, i)] = e;
    }
    for &(i, j, amp) in &spec.hoppings {
        h[(i, j)] = amp;
        h[(j, i)] = amp;
    }
    h
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    n_sites: usize,
    onsite: Vec<f64>,
    #[serde(default)]
    hoppings: Vec<Hopping>,
    contact: usize,
    lead_t: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TdotShorthand {
    tdot: ModelParams,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DeviceRepr {
    Tdot(TdotShorthand),
    Full(RawDevice),
}

impl<'de> Deserialize<'de> for DeviceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let spec = match DeviceRepr::deserialize(de)? {
            DeviceRepr::Tdot(TdotShorthand { tdot }) => make_tdot(tdot.t, tdot.t1, tdot.eps_d),
            DeviceRepr::Full(raw) => DeviceSpec::new(
                raw.n_sites,
                raw.onsite,
                raw.hoppings,
                raw.contact,
                raw.lead_t,
            ),
        };
        spec.map_err(serde::de::Error::custom)
    }
}
