//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use respole_cli::{run, EXIT_OK};
use respole_core::feshbach::{feshbach_poles, q_space_reconstruct, secular_residual};
use respole_core::oracle::{bound_energies_from_truncation, lattice_row_deviation};
use respole_core::scattering::{scattering_solve, verify_green_identity};
use respole_core::siegert::{max_pole_distance, solve_poles};
use respole_core::sweep::{linspace, sweep_point, transitions, SweepAxis};
use respole_core::wavefunction::{evaluate, normalize_bound, Site};
use respole_core::{make_tdot, Complex64, ModelParams, PoleClass, SpectralPole};
use serde_json::Value;

const GRID_T1: [f64; 5] = [0.25, 0.5, 1.0, 1.5, 2.0];
const GRID_EPS: [f64; 9] = [-3.0, -2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0, 3.0];
const SEED: u64 = 0x5eed_2024;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn grid() -> impl Iterator<Item = (f64, f64)> {
    GRID_T1
        .iter()
        .flat_map(|&t1| GRID_EPS.iter().map(move |&e| (t1, e)))
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

/// Closed form at `t = t1 = 1`, `eps_d = 0`: `q^2 = (sqrt 5 - 1) / 2`, `p = 1 / q`.
fn closed_pq() -> (f64, f64) {
    let q = ((5f64.sqrt() - 1.0) / 2.0).sqrt();
    (1.0 / q, q)
}

fn closed_form_reproduction() -> Verdict {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        [
            "respole", "poles", "--t", "1", "--t1", "1", "--eps-d", "0", "--method", "siegert",
            "--format", "json",
        ],
        &mut out,
        &mut err,
    );
    let elapsed = start.elapsed();
    if code != EXIT_OK {
        return verdict(
            false,
            format!("exit {code}: {}", String::from_utf8_lossy(&err)),
        );
    }
    let v: Value = serde_json::from_slice(&out).unwrap();
    let rows = v.as_array().unwrap();
    let got: Vec<(Complex64, Complex64)> = rows
        .iter()
        .map(|r| {
            let f = |k: &str| r[k].as_f64().unwrap();
            (
                Complex64::new(f("E_re"), f("E_im")),
                Complex64::new(f("k_re"), f("k_im")),
            )
        })
        .collect();

    let (p, q) = closed_pq();
    let kappa = p.ln();
    let pinned_ok = (p + q - 2.0581710).abs() < 5e-8
        && (p - q - 0.4858683).abs() < 5e-8
        && (kappa - 0.2406059).abs() < 5e-8;
    let expect = [
        (Complex64::new(-(p + q), 0.0), Complex64::new(0.0, kappa)),
        (Complex64::new(p + q, 0.0), Complex64::new(PI, kappa)),
        (
            Complex64::new(0.0, -(p - q)),
            Complex64::new(PI / 2.0, -kappa),
        ),
        (
            Complex64::new(0.0, p - q),
            Complex64::new(-PI / 2.0, -kappa),
        ),
    ];
    let mut worst = 0.0f64;
    let mut matched = [false; 4];
    for (e, k) in &expect {
        let best = got
            .iter()
            .enumerate()
            .filter(|(i, _)| !matched[*i])
            .map(|(i, (ge, gk))| (i, (ge - e).norm().max((gk - k).norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) => {
                matched[i] = true;
                worst = worst.max(d);
            }
            None => worst = f64::INFINITY,
        }
    }
    let pass = got.len() == 4 && pinned_ok && worst < 1e-8 && within(elapsed, 0.1);
    verdict(
        pass,
        format!(
            "{} poles, max |dE|,|dk| = {worst:.3e} (< 1e-8), runtime {elapsed:.2?} (< 0.1 s)",
            got.len()
        ),
    )
}

fn equivalence_theorem() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (t1, e) in grid() {
        let spec = make_tdot(1.0, t1, e).unwrap();
        let d = match (solve_poles(&spec), feshbach_poles(&spec)) {
            (Ok(a), Ok(b)) => max_pole_distance(&a, &b).unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        };
        worst = worst.max(d);
        if d.is_nan() || d >= 1e-9 {
            bad.push(format!("(t1={t1}, eps={e})"));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && within(elapsed, 5.0),
        format!(
            "max |dz| = {worst:.3e} (< 1e-9) over 45 points, runtime {elapsed:.2?} (< 5 s){}",
            if bad.is_empty() {
                String::new()
            } else {
                format!(", failing {}", bad.join(" "))
            }
        ),
    )
}

fn pole_residuals() -> Verdict {
    let (mut det_worst, mut row_worst, mut count) = (0.0f64, 0.0f64, 0usize);
    for (t1, e) in grid() {
        let spec = make_tdot(1.0, t1, e).unwrap();
        let sets = [solve_poles(&spec).unwrap(), feshbach_poles(&spec).unwrap()];
        for p in sets.iter().flatten() {
            det_worst = det_worst.max(secular_residual(&spec, p.z).norm());
            row_worst = row_worst.max(lattice_row_deviation(&spec, p, 2));
            count += 1;
        }
    }
    verdict(
        det_worst < 1e-10 && row_worst < 1e-10,
        format!("{count} poles, max |det| = {det_worst:.3e}, max row deviation = {row_worst:.3e} (< 1e-10)"),
    )
}

fn vieta_invariants() -> Verdict {
    let (mut prod_worst, mut sum_worst) = (0.0f64, 0.0f64);
    for (t1, e) in grid() {
        let poles = solve_poles(&make_tdot(1.0, t1, e).unwrap()).unwrap();
        let prod: Complex64 = poles.iter().map(|p| p.z.value()).product();
        let sum: Complex64 = poles.iter().map(|p| p.z.value()).sum();
        prod_worst = prod_worst.max((prod + 1.0).norm());
        sum_worst = sum_worst.max((sum + e).norm());
    }
    verdict(
        prod_worst < 1e-12 && sum_worst < 1e-12,
        format!(
            "max |prod + 1| = {prod_worst:.3e}, max |sum + eps_d/t| = {sum_worst:.3e} (< 1e-12)"
        ),
    )
}

/// Count of real roots of the T-dot quartic at `t = t1 = 1` from companion-matrix eigenvalues.
fn real_root_count(eps: f64) -> usize {
    // monic: z^4 + eps z^3 + z^2 - eps z - 1
    let c = [-1.0, -eps, 1.0, eps];
    let mut m = DMatrix::<f64>::zeros(4, 4);
    for i in 1..4 {
        m[(i, i - 1)] = 1.0;
    }
    for (i, &ci) in c.iter().enumerate() {
        m[(i, 3)] = -ci;
    }
    m.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * z.norm().max(1.0))
        .count()
}

fn region_structure() -> Verdict {
    let base = ModelParams::new(1.0, 1.0, 0.0).unwrap();
    let values = linspace(-3.0, 3.0, 601).unwrap();
    let mut points = Vec::with_capacity(values.len());
    let mut violations = Vec::new();
    for &v in &values {
        let pt = sweep_point(base, SweepAxis::EpsD, v).unwrap();
        let bound = pt.poles.iter().filter(|p| p.class.is_bound()).count();
        let rest: Vec<&SpectralPole> = pt.poles.iter().filter(|p| !p.class.is_bound()).collect();
        let pair_ok = rest.len() == 2 && {
            let mut cls = [rest[0].class, rest[1].class];
            cls.sort();
            match cls {
                [PoleClass::AntiBound, PoleClass::AntiBound] => true,
                [PoleClass::Resonant, PoleClass::AntiResonant] => {
                    (rest[0].z.value() - rest[1].z.value().conj()).norm() < 1e-9
                        && (rest[0].energy - rest[1].energy.conj()).norm() < 1e-9
                }
                _ => false,
            }
        };
        if pt.poles.len() != 4 || bound != 2 || !pair_ok {
            violations.push(v);
        }
        points.push(pt);
    }
    let detected = !transitions(&points).is_empty();
    let counts: Vec<usize> = values.iter().map(|&v| real_root_count(v)).collect();
    let exists = counts.windows(2).any(|w| w[0] != w[1]);
    verdict(
        violations.is_empty() && detected == exists,
        format!(
            "601 points, {} invariant violations, transition detected = {detected}, transition exists (companion-matrix oracle) = {exists}",
            violations.len()
        ),
    )
}

fn unitarity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t1 = 2.0 - rng.gen::<f64>() * 2.0; // (0, 2]
        let e = rng.gen_range(-3.0..=3.0);
        let spec = make_tdot(1.0, t1, e).unwrap();
        for _ in 0..1000 {
            let k = rng.gen_range(0.01..PI - 0.01);
            let s = scattering_solve(&spec, k).unwrap();
            worst = worst.max((s.transmission + s.reflection - 1.0).abs());
        }
    }
    verdict(
        worst < 1e-12,
        format!("20 x 1000 draws, max |R + T - 1| = {worst:.3e} (< 1e-12)"),
    )
}

fn fano_zero() -> Verdict {
    let spec = make_tdot(1.0, 1.0, 0.3).unwrap();
    let t_zero = scattering_solve(&spec, (-0.15f64).acos())
        .unwrap()
        .transmission;
    let t_mid = scattering_solve(&spec, PI / 2.0).unwrap().transmission;
    // independent 2x2 solve at k = pi/2: E = 0, z = i, source 2i on the contact
    let (m00, m01, m11) = (
        Complex64::new(0.0, 2.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-0.3, 0.0),
    );
    let c = Complex64::new(0.0, 2.0) * m11 / (m00 * m11 - m01 * m01);
    let oracle = c.norm_sqr();
    let pass =
        t_zero < 1e-20 && (t_mid - 9.0 / 34.0).abs() < 1e-12 && (oracle - 9.0 / 34.0).abs() < 1e-12;
    verdict(
        pass,
        format!("T(arccos(-eps_d/2t)) = {t_zero:.3e} (< 1e-20), T(pi/2) = {t_mid:.16} vs 9/34 (< 1e-12)"),
    )
}

fn green_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = rng.gen_range(0.5..2.0);
        let t1 = 2.0 - rng.gen::<f64>() * 2.0;
        let e = rng.gen_range(-3.0..=3.0);
        let k = rng.gen_range(0.01..PI - 0.01);
        worst = worst.max(verify_green_identity(&make_tdot(t, t1, e).unwrap(), k).unwrap());
    }
    verdict(
        worst < 1e-12,
        format!("100 draws, max deviation = {worst:.3e} (< 1e-12)"),
    )
}

fn truncated_lattice() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count_mismatch = Vec::new();
    let mut energy_miss = Vec::new();
    for (t1, e) in grid().filter(|(t1, _)| *t1 >= 0.25) {
        let spec = make_tdot(1.0, t1, e).unwrap();
        let mut bound: Vec<f64> = solve_poles(&spec)
            .unwrap()
            .iter()
            .filter(|p| p.class.is_bound())
            .map(|p| p.energy.re)
            .collect();
        bound.sort_by(f64::total_cmp);
        let lattice = bound_energies_from_truncation(&spec, 200).unwrap();
        if bound.len() != lattice.len() {
            count_mismatch.push(format!("(t1={t1}, eps={e})"));
            continue;
        }
        let d = bound
            .iter()
            .zip(&lattice)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(d);
        if d.is_nan() || d >= 1e-8 {
            energy_miss.push(format!("(t1={t1}, eps={e}: {d:.1e})"));
        }
    }
    let elapsed = start.elapsed();
    let mut detail =
        format!("N = 200, max |dE| = {worst:.3e} (< 1e-8), runtime {elapsed:.2?} (< 30 s)");
    if !count_mismatch.is_empty() {
        detail += &format!(", count mismatch at {}", count_mismatch.join(" "));
    }
    if !energy_miss.is_empty() {
        detail += &format!(
            ", {} points outside tolerance: {}",
            energy_miss.len(),
            energy_miss.join(" ")
        );
    }
    verdict(
        count_mismatch.is_empty() && energy_miss.is_empty() && within(elapsed, 30.0),
        detail,
    )
}

fn wavefunction_geometry() -> Verdict {
    let (p, q) = closed_pq();
    let poles = solve_poles(&make_tdot(1.0, 1.0, 0.0).unwrap()).unwrap();
    let lead = |pole: &SpectralPole| -> Vec<f64> {
        let w = evaluate(pole, 21).unwrap();
        (1..=21)
            .map(|x| {
                w.samples
                    .iter()
                    .find(|s| s.site == Site::Lead(x))
                    .unwrap()
                    .magnitude
            })
            .collect()
    };
    let mut ratio_worst = 0.0f64;
    for pole in &poles {
        let expect = match pole.class {
            PoleClass::BoundLower | PoleClass::BoundUpper => q,
            PoleClass::Resonant | PoleClass::AntiResonant => p,
            _ => continue,
        };
        let m = lead(pole);
        for w in m.windows(2) {
            ratio_worst = ratio_worst.max((w[1] / w[0] - expect).abs());
        }
    }

    // direct summation of |<x|Phi>|^2 over a long truncated lattice
    let mut norm_worst = 0.0f64;
    for pole in poles.iter().filter(|p| p.class.is_bound()) {
        let tails: f64 = (-2000i64..=2000)
            .filter(|&x| x != 0)
            .map(|x| q_space_reconstruct(pole, x).norm_sqr())
            .sum();
        let device: f64 = pole.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let n = (tails + device).sqrt();
        let normed = normalize_bound(pole).unwrap();
        for (a, b) in normed.amplitudes.iter().zip(&pole.amplitudes) {
            norm_worst = norm_worst.max((a - b / n).norm());
        }
    }
    verdict(
        ratio_worst < 1e-12 && norm_worst < 1e-12,
        format!("max ratio error = {ratio_worst:.3e}, max normalization error = {norm_worst:.3e} (< 1e-12)"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form reproduction", closed_form_reproduction),
        ("equivalence of the two routes", equivalence_theorem),
        ("pole residuals", pole_residuals),
        ("Vieta invariants", vieta_invariants),
        ("region structure", region_structure),
        ("unitarity", unitarity),
        ("Fano transmission zero", fano_zero),
        ("Green identity", green_identity),
        ("truncated-lattice oracle", truncated_lattice),
        ("wavefunction geometry", wavefunction_geometry),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
