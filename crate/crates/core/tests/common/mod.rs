//! Test-side oracles, computed without touching the engine.

#![allow(dead_code)]

use num_complex::Complex64;
use qvpath::symmetry::Lattice;

/// Amplitudes of `f(k)^N` applied to a point mass at the origin, summed
/// directly over the lattice's plane waves.
pub fn plane_wave_amplitudes(lattice: &Lattice, n: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let d = lattice.sites() as f64;
    let ks = lattice.wavenumbers();
    let weights: Vec<Complex64> = ks.iter().map(|&k| f(k).powu(n as u32)).collect();
    lattice
        .labels()
        .iter()
        .map(|&w| {
            ks.iter()
                .zip(&weights)
                .map(|(&k, &g)| Complex64::from_polar(1.0, k * w) * g)
                .sum::<Complex64>()
                / d
        })
        .collect()
}

/// Two-sector amplitudes (`site·2 + s`) of the T-violating model, normalized.
pub fn tviolating_oracle(lattice: &Lattice, lambda: f64, n: usize, step: f64) -> Vec<Complex64> {
    let plus = plane_wave_amplitudes(lattice, n, |k| Complex64::from_polar((k * step).cos(), -k * lambda * step));
    let minus = plane_wave_amplitudes(lattice, n, |k| Complex64::from_polar((k * step).cos(), k * lambda * step));
    let mut out: Vec<Complex64> = plus.iter().zip(&minus).flat_map(|(&a, &b)| [a, b]).collect();
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    out.iter_mut().for_each(|z| *z /= norm);
    out
}

/// Site probabilities from two-sector amplitudes.
pub fn site_masses(amplitudes: &[Complex64], internal: usize) -> Vec<f64> {
    amplitudes.chunks(internal).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
}

/// With `Δ = 2δw`, `S² = (2 + T + T⁻¹)/4`, so for even `N` the amplitude
/// at site `j` is `C(N, N/2 + j) / 2^N` before normalization.
pub fn binomial_masses(sites: usize, n: usize) -> Vec<f64> {
    assert!(n % 2 == 0);
    let half = (sites / 2) as i64;
    let log_choose = |k: i64| -> f64 {
        if k < 0 || k > n as i64 {
            return f64::NEG_INFINITY;
        }
        ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial(n as u64 - k as u64)
    };
    let amps: Vec<f64> = (-half..=half)
        .map(|j| (log_choose(n as i64 / 2 + j) - n as f64 * std::f64::consts::LN_2).exp())
        .collect();
    let total: f64 = amps.iter().map(|a| a * a).sum();
    amps.iter().map(|a| a * a / total).collect()
}

fn ln_factorial(n: u64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
