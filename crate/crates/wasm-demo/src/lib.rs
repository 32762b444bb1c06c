//! Browser bindings for a few star-core operations. Each export returns a JSON string.

use serde_json::json;
use star_core::estimator::{resource_report, DeviceSpec, FitResult, LayoutScheme};
use star_core::injection::{InjectionExperiment, VariantKind};
use wasm_bindgen::prelude::*;

/// Largest shot count accepted from the page; keeps the tab responsive.
pub const MAX_SHOTS: u32 = 200_000;

fn ratio(r: num_rational::Ratio<i64>) -> serde_json::Value {
    json!({ "numer": r.numer(), "denom": r.denom(), "value": *r.numer() as f64 / *r.denom() as f64 })
}

/// Resource report at distance `d` with the bundled reference fit.
pub fn report_json(
    n_phys: f64,
    p: f64,
    d: usize,
    scheme: &str,
    variant: &str,
) -> Result<String, String> {
    if !(n_phys >= 1.0 && n_phys.fract() == 0.0 && n_phys < 1e15) {
        return Err(format!(
            "physical qubit count must be a positive integer, got {n_phys}"
        ));
    }
    let scheme: LayoutScheme = scheme
        .parse()
        .map_err(|e: star_core::StarError| e.to_string())?;
    let variant: VariantKind = variant
        .parse()
        .map_err(|e: star_core::StarError| e.to_string())?;
    let c = InjectionExperiment::new(3, variant)
        .map_err(|e| e.to_string())?
        .leading_coefficients();
    let c_z = *c.c_z.numer() as f64 / *c.c_z.denom() as f64;
    let spec = DeviceSpec {
        n_phys: n_phys as u64,
        p,
    };
    let r = resource_report(&spec, d, scheme, &FitResult::reference(), c_z, 1.0)
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

/// Exact first-order coefficients of the injected state for one variant.
pub fn oracle_json(variant: &str, d: usize) -> Result<String, String> {
    let variant: VariantKind = variant
        .parse()
        .map_err(|e: star_core::StarError| e.to_string())?;
    let c = InjectionExperiment::new(d, variant)
        .map_err(|e| e.to_string())?
        .leading_coefficients();
    Ok(json!({
        "variant": variant.name(),
        "d": d,
        "c_Z": ratio(c.c_z),
        "c_X": ratio(c.c_x),
        "reject_stage1": ratio(c.reject_stage1),
        "reject_stage2": ratio(c.reject_stage2),
    })
    .to_string())
}

/// One Monte-Carlo injection point.
pub fn injection_json(
    variant: &str,
    d: usize,
    p: f64,
    shots: u32,
    seed: u32,
) -> Result<String, String> {
    if shots == 0 || shots > MAX_SHOTS {
        return Err(format!("shots must lie in 1..={MAX_SHOTS}"));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(format!("p must lie in [0, 0.5], got {p}"));
    }
    let variant: VariantKind = variant
        .parse()
        .map_err(|e: star_core::StarError| e.to_string())?;
    let exp = InjectionExperiment::new(d, variant).map_err(|e| e.to_string())?;
    let s = exp.stats(p, exp.run(p, shots as u64, seed as u64, Some(1)));
    Ok(json!({
        "variant": variant.name(),
        "d": d,
        "p": p,
        "shots": s.counts.shots,
        "accepted": s.counts.accepted,
        "acceptance_rate": s.acceptance_rate,
        "sigma_acceptance": s.sigma_acceptance,
        "failures_Z": s.counts.logical_z_errors,
        "P_Z": s.p_z,
        "sigma_Z": s.sigma_z,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn resource_report_json(
    n_phys: f64,
    p: f64,
    d: u32,
    scheme: &str,
    variant: &str,
) -> Result<String, JsValue> {
    report_json(n_phys, p, d as usize, scheme, variant).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn oracle_coefficients_json(variant: &str, d: u32) -> Result<String, JsValue> {
    oracle_json(variant, d as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn injection_point_json(
    variant: &str,
    d: u32,
    p: f64,
    shots: u32,
    seed: u32,
) -> Result<String, JsValue> {
    injection_json(variant, d as usize, p, shots, seed).map_err(|e| JsValue::from_str(&e))
}
