//! Browser bindings for three qvpath operations: a QVP distribution, its
//! peak summary, and a Lorentz boost. The plain functions return `String`
//! errors so they can be tested natively; the `#[wasm_bindgen]` wrappers
//! turn those into JS exceptions.

use qvpath::analysis::{detect_peaks, DEFAULT_MIN_HEIGHT_FRACTION};
use qvpath::engine::{distribution, Distribution};
use qvpath::lorentz::{boost_interval, Boost, Interval};
use qvpath::models::{build_symmetric, build_tviolating, ModelSpec};
use qvpath::symmetry::Lattice;
use wasm_bindgen::prelude::*;

/// Keeps a single call under a second or so in the browser.
pub const MAX_SITES: usize = 401;
pub const MAX_STEPS: usize = 20_000;

fn model(lambda: f64, sites: usize, spacing: f64) -> Result<ModelSpec, String> {
    if sites > MAX_SITES {
        return Err(format!("at most {MAX_SITES} sites in the demo"));
    }
    let lattice = Lattice::new(sites, spacing).map_err(|e| e.to_string())?;
    if lambda == 0.0 {
        Ok(build_symmetric(lattice))
    } else {
        build_tviolating(lattice, lambda).map_err(|e| e.to_string())
    }
}

fn run(lambda: f64, steps: usize, sigma: f64, sites: usize, spacing: f64) -> Result<Distribution, String> {
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps in the demo"));
    }
    let m = model(lambda, sites, spacing)?;
    let state = m.build_qvp(steps, sigma).map_err(|e| e.to_string())?;
    Ok(distribution(&state))
}

/// `[w_0, p_0, w_1, p_1, ...]`. `lambda = 0` selects the symmetric model.
pub fn distribution_points(lambda: f64, steps: usize, sigma: f64, sites: usize, spacing: f64) -> Result<Vec<f64>, String> {
    let dist = run(lambda, steps, sigma, sites, spacing)?;
    Ok(dist.points().flat_map(|(w, p)| [w, p]).collect())
}

/// `[measured separation, predicted separation, origin suppression, peak count]`
pub fn peak_summary(lambda: f64, steps: usize, sigma: f64, sites: usize, spacing: f64) -> Result<Vec<f64>, String> {
    let dist = run(lambda, steps, sigma, sites, spacing)?;
    let report = detect_peaks(&dist, DEFAULT_MIN_HEIGHT_FRACTION).map_err(|e| e.to_string())?;
    let predicted = 2.0 * lambda.abs() * (2.0 * steps as f64).sqrt() * sigma;
    Ok(vec![report.separation, predicted, report.origin_suppression, report.peaks.len() as f64])
}

/// `[dx', dt']`
pub fn boost(dx: f64, dt: f64, v: f64, c: f64) -> Result<Vec<f64>, String> {
    let b = Boost::new(v, c).map_err(|e| e.to_string())?;
    let out = boost_interval(Interval::new(dx, dt), b);
    Ok(vec![out.dx, out.dt])
}

#[wasm_bindgen(js_name = distributionPoints)]
pub fn js_distribution_points(lambda: f64, steps: usize, sigma: f64, sites: usize, spacing: f64) -> Result<Vec<f64>, JsValue> {
    distribution_points(lambda, steps, sigma, sites, spacing).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = peakSummary)]
pub fn js_peak_summary(lambda: f64, steps: usize, sigma: f64, sites: usize, spacing: f64) -> Result<Vec<f64>, JsValue> {
    peak_summary(lambda, steps, sigma, sites, spacing).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = lorentzBoost)]
pub fn js_boost(dx: f64, dt: f64, v: f64, c: f64) -> Result<Vec<f64>, JsValue> {
    boost(dx, dt, v, c).map_err(|e| JsValue::from_str(&e))
}
