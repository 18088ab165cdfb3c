//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes set files as text (same format as the CLI) and returns
//! a JSON string; exact numbers are decimal strings. The plain `*_json`
//! functions carry the logic so they can be tested natively.

use serde_json::{json, Value};
use sidon_core::error::{INCIDENCE_BUDGET, MULTISET_BUDGET};
use sidon_core::extract::{extract_sidon, SamplingParams};
use sidon_core::incidence::{hyperbolic_count_fast, theorem_ratio, IncidenceInstance};
use sidon_core::representation::energy;
use sidon_core::sidon::{is_bhg, measure_g};
use sidon_core::{format_rational, parse_rational, parse_rational_set, parse_set, GroundSet, Mode};
use wasm_bindgen::prelude::*;

/// Interactive pages get a smaller budget than the CLI so the tab stays responsive.
pub const PAGE_BUDGET: u64 = MULTISET_BUDGET / 100;

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    items.into_iter().map(|x| x.to_string()).collect()
}

fn multisets(rows: &[Vec<sidon_core::Element>]) -> Value {
    rows.iter().map(strings).collect()
}

fn load(text: &str) -> Result<GroundSet, String> {
    parse_set(text.as_bytes())
        .map(|p| p.set)
        .map_err(|e| e.to_string())
}

fn mode(name: &str) -> Result<Mode, String> {
    name.parse::<Mode>().map_err(|e| e.to_string())
}

/// Energy of the set plus its `B_s[g]` verdict and measured `g`.
pub fn analyze_json(set: &str, s: u32, k: u32, g: u64, mode_name: &str) -> Result<String, String> {
    let a = load(set)?;
    let m = mode(mode_name)?;
    let e = energy(&a, s, k, m).map_err(|e| e.to_string())?;
    let mut out = json!({
        "size": a.len().to_string(),
        "mode": m.as_str(),
        "s": s.to_string(),
        "k": k.to_string(),
        "energy": e.value.to_string(),
    });
    if s >= 2 {
        let verdict = is_bhg(&a, s, g, m, PAGE_BUDGET).map_err(|e| e.to_string())?;
        out["holds"] = verdict.holds.into();
        if let Some(v) = verdict.violation {
            out["violation_value"] = v.value.to_string().into();
            out["violation_multisets"] = multisets(&v.multisets);
        }
        if !a.is_empty() {
            let cert = measure_g(&a, s, m, PAGE_BUDGET).map_err(|e| e.to_string())?;
            out["g_measured"] = cert.g_measured.to_string().into();
            out["witness"] = cert.witness.to_string().into();
        }
    }
    Ok(out.to_string())
}

/// Sampling with probability `p` (text, e.g. "1/2"), then deletion.
pub fn extract_json(
    set: &str,
    h: u32,
    g: u64,
    mode_name: &str,
    seed: u64,
    p: &str,
) -> Result<String, String> {
    let a = load(set)?;
    let m = mode(mode_name)?;
    let params = if p.trim().is_empty() {
        SamplingParams::derived(seed)
    } else {
        SamplingParams::with_p(parse_rational(p.trim())?, seed)
    };
    let o = extract_sidon(&a, h, g, m, &params, PAGE_BUDGET).map_err(|e| e.to_string())?;
    Ok(json!({
        "p": format_rational(&o.p),
        "sample_size": o.sample_size.to_string(),
        "deletions": o.deletions.to_string(),
        "passes": o.passes.to_string(),
        "subset": strings(o.subset.iter()),
        "g_measured": o.certificate.as_ref().map(|c| c.g_measured.to_string()),
    })
    .to_string())
}

/// `H_λ(X, Y)` with the sixth-power ratio report.
pub fn incidence_json(x: &str, y: &str, lambda: &str) -> Result<String, String> {
    let xs = parse_rational_set(x.as_bytes())
        .map_err(|e| e.to_string())?
        .set;
    let ys = parse_rational_set(y.as_bytes())
        .map_err(|e| e.to_string())?
        .set;
    let l = parse_rational(lambda.trim())?;
    let inst = IncidenceInstance::new(xs, ys, l).map_err(|e| e.to_string())?;
    let pairs = (inst.x.len() * inst.y.len()) as u64;
    if pairs > INCIDENCE_BUDGET {
        return Err(format!("{pairs} difference pairs exceed the page budget"));
    }
    let h = hyperbolic_count_fast(&inst);
    let r = theorem_ratio(&inst);
    Ok(json!({
        "h": h.to_string(),
        "x_size": inst.x.len().to_string(),
        "y_size": inst.y.len().to_string(),
        "bound": r.bound.to_string(),
        "k": r.k.map(|k| k.to_string()),
        "in_regime": r.in_regime,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn analyze(set: &str, s: u32, k: u32, g: u64, mode: &str) -> Result<String, JsError> {
    analyze_json(set, s, k, g, mode).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn extract(
    set: &str,
    h: u32,
    g: u64,
    mode: &str,
    seed: u64,
    p: &str,
) -> Result<String, JsError> {
    extract_json(set, h, g, mode, seed, p).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn incidence(x: &str, y: &str, lambda: &str) -> Result<String, JsError> {
    incidence_json(x, y, lambda).map_err(|e| JsError::new(&e))
}
