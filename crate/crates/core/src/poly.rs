//! All-roots polynomial solver: Aberth-Ehrlich simultaneous iteration followed
//! by Newton polishing against the original coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ABERTH_ITER: usize = 500;
const MAX_POLISH_ITER: usize = 50;

/// Evaluates `sum c_i z^i` (ascending coefficients) and its derivative by Horner.
pub fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roundoff scale of a Horner evaluation: `sum |c_i| |z|^i`.
fn eval_scale(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
}

fn horner_complex(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of the real polynomial `coeffs` (ascending powers), with
/// multiplicity.
///
/// A root is accepted once `|P(z)| < tol * max|c_i|`, or once `|P(z)|` is down
/// at the roundoff floor of its own evaluation (relevant for clustered roots
/// and large `|z|`).
pub fn poly_roots(coeffs: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    if coeffs.len() < 2 {
        return Err(Error::Domain("polynomial degree must be at least 1".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(
            "polynomial coefficients must be finite".into(),
        ));
    }
    let lead = *coeffs.last().unwrap();
    if lead == 0.0 {
        return Err(Error::Domain("leading coefficient must be nonzero".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }

    let zeros = coeffs.iter().take_while(|&&c| c == 0.0).count();
    let reduced = &coeffs[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.len() > 1 {
        let mut found = aberth(reduced);
        for z in &mut found {
            *z = polish(coeffs, *z, tol);
        }
        roots.extend(found);
    }

    let cmax = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut worst = 0.0f64;
    let mut bad = false;
    for &z in &roots {
        let (p, _) = horner(coeffs, z);
        let r = p.norm();
        if !(r < tol * cmax || r <= 16.0 * f64::EPSILON * eval_scale(coeffs, z)) {
            bad = true;
        }
        worst = worst.max(r / cmax);
    }
    if bad {
        return Err(Error::NoConvergence {
            iterations: MAX_ABERTH_ITER,
            residual: worst,
        });
    }
    Ok(roots)
}

fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs
        .iter()
        .map(|&c| Complex64::new(c / lead, 0.0))
        .collect();
    if n == 1 {
        return vec![-monic[0]];
    }

    // start on a circle of radius |a_0|^{1/n}, rotated off the real axis
    let radius = monic[0].norm().powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ABERTH_ITER {
        let mut max_rel = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_complex(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let delta = w / (1.0 - w * repulsion);
            if !(delta.re.is_finite() && delta.im.is_finite()) {
                continue;
            }
            z[i] -= delta;
            max_rel = max_rel.max(delta.norm() / z[i].norm().max(f64::MIN_POSITIVE));
        }
        if max_rel <= 4.0 * f64::EPSILON {
            break;
        }
    }
    z
}

fn polish(coeffs: &[f64], mut z: Complex64, tol: f64) -> Complex64 {
    let cmax = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let (mut p, mut dp) = horner(coeffs, z);
    for _ in 0..MAX_POLISH_ITER {
        if p.norm() < tol * cmax * 1e-3 || dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (np, ndp) = horner(coeffs, next);
        if !(np.norm() < p.norm()) {
            break;
        }
        z = next;
        p = np;
        dp = ndp;
    }
    z
}
