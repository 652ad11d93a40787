//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain numbers or a JSON string and returns a
//! JSON string; the page draws the results on canvases. The `*_json`
//! functions carry the logic and run natively in tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use wignerkit::genmaps::GeneratorSpec;
use wignerkit::matrix::{haar_unitary, hermitian_eigenvalues, UnitaryMatrix};
use wignerkit::positivity::positivity_certificate;
use wignerkit::wigner::{classify, lemma1_projections, ClassifyConfig};

/// Lighter than the command-line defaults so the page stays interactive.
const DEMO_SAMPLES: usize = 40;
const DEMO_RESTARTS: usize = 12;
const DEMO_MAX_ITERS: usize = 200;

pub fn lemma_json(n: usize, k: usize, seed: Option<u64>, which: usize) -> Result<String, String> {
    if n == 0 {
        return Err("n must be positive".into());
    }
    let basis = match seed {
        Some(s) => haar_unitary(n, s),
        None => UnitaryMatrix::identity(n),
    };
    let d = lemma1_projections(n, k, &basis, which).map_err(|e| e.to_string())?;
    let mut out = d.to_json();
    out["max_commutator"] = json!(d.max_commutator());
    Ok(out.to_string())
}

/// Generates a map from a generator spec, classifies it and adds the Choi spectrum.
pub fn classify_json(spec: &str, k: usize, tol: Option<f64>) -> Result<String, String> {
    let spec: GeneratorSpec = serde_json::from_str(spec).map_err(|e| e.to_string())?;
    let (map, family) = spec.build(0).map_err(|e| e.to_string())?;
    let mut config = ClassifyConfig {
        samples: DEMO_SAMPLES,
        restarts: DEMO_RESTARTS,
        max_iters: DEMO_MAX_ITERS,
        ..ClassifyConfig::default().with_seed(spec.seed.unwrap_or(0))
    };
    if let Some(t) = tol {
        config = config.with_tolerance(t);
    }
    let report = classify(&map, k, &config).map_err(|e| e.to_string())?;
    let mut out = report.to_json();
    out["expected"] = serde_json::to_value(family.expected(k)).map_err(|e| e.to_string())?;
    out["choi_spectrum"] = json!(hermitian_eigenvalues(map.to_choi().matrix()));
    Ok(out.to_string())
}

/// Least eigenvalue of `φ(x x*)` found by the optimizer for the pseudo-depolarizing map
/// across `steps + 1` values of `μ` in `[0, mu_max]`, next to `(1 + μ)/n - μ`.
pub fn positivity_sweep_json(
    n: usize,
    mu_max: f64,
    steps: usize,
    seed: u64,
) -> Result<String, String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    if !(mu_max > 0.0 && mu_max.is_finite()) || steps == 0 {
        return Err("need mu_max > 0 and at least one step".into());
    }
    let nf = n as f64;
    let mut points = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let mu = mu_max * i as f64 / steps as f64;
        let map = wignerkit::genmaps::pseudo_depolarizing(n, mu).map_err(|e| e.to_string())?;
        let cert = positivity_certificate(&map, DEMO_RESTARTS, DEMO_MAX_ITERS, 1e-9, seed)
            .map_err(|e| e.to_string())?;
        points.push(json!({
            "mu": mu,
            "min_value": cert.min_value,
            "closed_form": (1.0 + mu) / nf - mu,
        }));
    }
    Ok(
        json!({ "n": n, "threshold": 1.0 / (nf - 1.0), "points": Value::Array(points) })
            .to_string(),
    )
}

fn js(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lemma(n: usize, k: usize, seed: Option<u32>, which: usize) -> Result<String, JsError> {
    js(lemma_json(n, k, seed.map(u64::from), which))
}

#[wasm_bindgen]
pub fn classify_family(spec: &str, k: usize, tol: Option<f64>) -> Result<String, JsError> {
    js(classify_json(spec, k, tol))
}

#[wasm_bindgen]
pub fn positivity_sweep(n: usize, mu_max: f64, steps: usize, seed: u32) -> Result<String, JsError> {
    js(positivity_sweep_json(n, mu_max, steps, u64::from(seed)))
}
