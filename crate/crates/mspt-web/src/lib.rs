//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page needs no exception handling.

use mspt::anomaly::{anomaly_matrix, flux_insertion, realizability, scenario, SCENARIO_NAMES};
use mspt::ensemble::{linear_correlator, EnsembleSpec, Operator, WindingRule};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest ring the page will diagonalize per sample.
pub const MAX_WEB_SITES: usize = 128;
pub const MAX_WEB_SAMPLES: usize = 400;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

pub fn spectral_flow_value(n: usize, m: f64, wilson: f64, w_min: i64, w_max: i64) -> Result<Value, String> {
    if n > MAX_WEB_SITES {
        return Err(format!("at most {MAX_WEB_SITES} sites"));
    }
    if w_min > w_max {
        return Err("w_min exceeds w_max".into());
    }
    let ws: Vec<i64> = (w_min..=w_max).collect();
    let rows = mspt::gaussian::spectral_flow(n, 1.0, m, wilson, &ws).map_err(|e| e.to_string())?;
    Ok(json!({ "n": n, "m": m, "wilson": wilson, "rows": rows }))
}

pub fn anomaly_value(name: &str) -> Result<Value, String> {
    let s = scenario(name).map_err(|e| e.to_string())?;
    let set = &s.set;
    let flux = set
        .generators
        .iter()
        .map(|g| flux_insertion(set, &g.name).map(|f| json!({ "generator": g.name, "totals": f.declared.totals })))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let generators: Vec<Value> = set
        .generators
        .iter()
        .map(|g| json!({ "name": g.name, "strong": g.is_strong() }))
        .collect();
    Ok(json!({
        "scenario": s.name,
        "description": s.description,
        "generators": generators,
        "anomaly_matrix": anomaly_matrix(set),
        "verdict": realizability(set),
        "expected": s.expected,
        "flux": flux,
    }))
}

pub fn correlator_value(operator: &str, n: usize, samples: usize, seed: u64, m: f64, g: f64) -> Result<Value, String> {
    let op = Operator::parse(operator).map_err(|e| e.to_string())?;
    if op == Operator::Renyi2 {
        return Err("the Rényi-2 estimator is too slow for the page; use the CLI".into());
    }
    if n > MAX_WEB_SITES || samples > MAX_WEB_SAMPLES {
        return Err(format!("at most {MAX_WEB_SITES} sites and {MAX_WEB_SAMPLES} samples"));
    }
    let spec = EnsembleSpec { mass: m, stiffness: g, winding: WindingRule::Fixed(0), ..EnsembleSpec::new(n, samples, seed) };
    let est = linear_correlator(&spec, op).map_err(|e| e.to_string())?;
    Ok(json!({
        "distances": est.distances,
        "magnitudes": est.magnitudes(),
        "stderr": est.stderr,
        "summary": est.summary_json(),
    }))
}

#[wasm_bindgen]
pub fn scenario_names() -> String {
    json!(SCENARIO_NAMES).to_string()
}

/// Ground-state charge of the edge ring for windings `w_min..=w_max`.
#[wasm_bindgen]
pub fn spectral_flow(n: usize, m: f64, wilson: f64, w_min: i32, w_max: i32) -> String {
    respond(spectral_flow_value(n, m, wilson, w_min.into(), w_max.into()))
}

/// Anomaly matrix, flux totals and realizability of a catalog scenario.
#[wasm_bindgen]
pub fn anomaly_scenario(name: &str) -> String {
    respond(anomaly_value(name))
}

/// Disorder-averaged G or S correlator with its decay fit.
#[wasm_bindgen]
pub fn edge_correlator(operator: &str, n: usize, samples: usize, seed: u32, m: f64, g: f64) -> String {
    respond(correlator_value(operator, n, samples, seed.into(), m, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn flow_rows_follow_winding() {
        let v = parse(spectral_flow(32, 0.5, 1.0, -1, 2));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert_eq!(r["delta_q"], r["winding"]);
        }
    }

    #[test]
    fn scenarios_report_verdicts() {
        let names: Vec<String> = serde_json::from_str(&scenario_names()).unwrap();
        for n in &names {
            let v = parse(anomaly_scenario(n));
            assert_eq!(v["verdict"]["open_realizable"], v["expected"]["open_realizable"], "{n}");
        }
        assert!(parse(anomaly_scenario("nope"))["error"].is_string());
    }

    #[test]
    fn correlator_curve() {
        let v = parse(edge_correlator("S", 48, 16, 3, 0.5, 0.5));
        assert_eq!(v["distances"].as_array().unwrap().len(), v["magnitudes"].as_array().unwrap().len());
        assert!(parse(edge_correlator("renyi2", 48, 16, 3, 0.5, 0.5))["error"].is_string());
        assert!(parse(edge_correlator("S", 4096, 16, 3, 0.5, 0.5))["error"].is_string());
    }
}
