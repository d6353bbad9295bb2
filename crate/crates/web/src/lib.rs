//! WebAssembly bindings for the single-qubit curves.
//!
//! `a = ẑ` and `b` lies in the x-z plane with the requested overlap `a·b`.
//! The plain functions are usable natively; the `wasm_bindgen` wrappers only
//! convert errors.

use qfi_disturb::qubit::{dithering_interval, linspace, sweep};
use qfi_disturb::BlochModel;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 100_000;

fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>, String> {
    if !from.is_finite() || !to.is_finite() || from >= to {
        return Err(format!("need a finite range with from < to, got [{from}, {to}]"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in [2, {MAX_POINTS}], got {points}"));
    }
    Ok(linspace(from, to, points))
}

fn directions(overlap: f64) -> Result<BlochModel, String> {
    BlochModel::with_overlap(overlap, 0.0, 0.0).map_err(|e| e.to_string())
}

/// `Q_max/4` on an even λ grid, followed by the located minimum: the
/// returned vector has `points + 2` entries, the last two being `λ_min` and
/// the value there.
pub fn curve(overlap: f64, eta: f64, from: f64, to: f64, points: usize) -> Result<Vec<f64>, String> {
    let bm = directions(overlap)?;
    let g = grid(from, to, points)?;
    let s = sweep(bm.a(), bm.b(), eta, &g).map_err(|e| e.to_string())?;
    let mut out = s.q_over_4;
    out.push(s.lambda_min_located);
    out.push(s.q_at_min);
    Ok(out)
}

/// `[λ_min, Q_max(λ_min)/4, -η a·b]`: the located minimum next to its
/// predicted position.
pub fn minimum(overlap: f64, eta: f64, from: f64, to: f64, points: usize) -> Result<Vec<f64>, String> {
    let c = curve(overlap, eta, from, to, points)?;
    let n = c.len();
    Ok(vec![c[n - 2], c[n - 1], -eta * overlap])
}

/// `[lo, hi]` of the λ interval where `η̃` beats `η`, or empty when there is
/// none.
pub fn dithering(overlap: f64, eta: f64, eta_tilde: f64) -> Result<Vec<f64>, String> {
    let bm = directions(overlap)?;
    let iv = dithering_interval(bm.a(), bm.b(), eta, eta_tilde).map_err(|e| e.to_string())?;
    Ok(iv.map(|i| vec![i.lo, i.hi]).unwrap_or_default())
}

#[wasm_bindgen(js_name = qubitCurve)]
pub fn qubit_curve(overlap: f64, eta: f64, from: f64, to: f64, points: usize) -> Result<Vec<f64>, JsError> {
    curve(overlap, eta, from, to, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = qubitMinimum)]
pub fn qubit_minimum(overlap: f64, eta: f64, from: f64, to: f64, points: usize) -> Result<Vec<f64>, JsError> {
    minimum(overlap, eta, from, to, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = ditheringInterval)]
pub fn dithering_js(overlap: f64, eta: f64, eta_tilde: f64) -> Result<Vec<f64>, JsError> {
    dithering(overlap, eta, eta_tilde).map_err(|e| JsError::new(&e))
}
