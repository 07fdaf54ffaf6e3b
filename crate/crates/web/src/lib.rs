//! Browser bindings for the static demo in `www/`.
//!
//! Every export returns `Result<_, String>`; the error text reaches
//! JavaScript as the thrown value.

use mcgs_core::analysis::akra_bazzi_exponent;
use mcgs_core::metrics::{config_for, Metric, MetricsRecord};
use mcgs_core::sim::{check_mcx_with, McxCheckOptions};
use mcgs_core::synth::synthesize;
use mcgs_core::{Method, SynthesisConfig};
use wasm_bindgen::prelude::*;

/// Largest control count the page may ask for.
pub const MAX_CONTROLS: u32 = 2048;
/// Largest circuit exported as text.
pub const MAX_QASM_CONTROLS: u32 = 128;
/// Points per curve.
pub const MAX_POINTS: u32 = 400;

fn config(method: &str) -> Result<SynthesisConfig, String> {
    let m: Method = method.parse().map_err(|e: mcgs_core::Error| e.to_string())?;
    Ok(config_for(m, &SynthesisConfig::default()))
}

fn check_n(n: u32, max: u32) -> Result<usize, String> {
    if n == 0 || n > max {
        return Err(format!("n must lie in 1..={max}, got {n}"));
    }
    Ok(n as usize)
}

/// Metrics of `C^nX` as `key=value` pairs separated by spaces.
#[wasm_bindgen]
pub fn metrics(n: u32, method: &str) -> Result<String, String> {
    let c = synthesize(check_n(n, MAX_CONTROLS)?, &config(method)?).map_err(|e| e.to_string())?;
    MetricsRecord::of(&c).map(|m| m.to_string()).map_err(|e| e.to_string())
}

/// OpenQASM 3 text of `C^nX`.
#[wasm_bindgen]
pub fn qasm(n: u32, method: &str) -> Result<String, String> {
    let c = synthesize(check_n(n, MAX_QASM_CONTROLS)?, &config(method)?).map_err(|e| e.to_string())?;
    Ok(c.to_qasm())
}

/// Verification report: exhaustive up to 20 wires, sampled above.
#[wasm_bindgen]
pub fn verify(n: u32, method: &str, samples: u32, seed: u32) -> Result<String, String> {
    let n = check_n(n, MAX_CONTROLS)?;
    let c = synthesize(n, &config(method)?).map_err(|e| e.to_string())?;
    let opts = McxCheckOptions { mode: None, samples: samples as usize, seed: u64::from(seed) };
    check_mcx_with(&c, n, opts).map(|r| r.to_string()).map_err(|e| e.to_string())
}

/// `metric` of `C^nX` for `n = start, start + step, ...` up to `end`.
#[wasm_bindgen]
pub fn curve(method: &str, metric: &str, start: u32, end: u32, step: u32) -> Result<Vec<u32>, String> {
    let cfg = config(method)?;
    let metric: Metric = metric.parse().map_err(|e: mcgs_core::Error| e.to_string())?;
    check_n(start, MAX_CONTROLS)?;
    check_n(end, MAX_CONTROLS)?;
    if step == 0 || start > end || (end - start) / step + 1 > MAX_POINTS {
        return Err(format!("need start <= end, step >= 1 and at most {MAX_POINTS} points"));
    }
    (start..=end)
        .step_by(step as usize)
        .map(|n| {
            let c = synthesize(n as usize, &cfg).map_err(|e| e.to_string())?;
            let v = MetricsRecord::of(&c).map_err(|e| e.to_string())?.get(metric);
            u32::try_from(v).map_err(|_| format!("{v} does not fit in 32 bits"))
        })
        .collect()
}

/// Exponent `alpha` with `sum a_i / b_i^alpha = 1` for terms `a:b,a:b,...`.
#[wasm_bindgen]
pub fn exponent(terms: &str) -> Result<f64, String> {
    let spec = terms.parse().map_err(|e: mcgs_core::Error| e.to_string())?;
    akra_bazzi_exponent(&spec).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_and_qasm() {
        assert!(metrics(2, "linear").unwrap().starts_with("abstract_depth=1 "));
        assert!(qasm(2, "linear").unwrap().contains("ccx q[0], q[1], q[2];"));
        assert!(qasm(MAX_QASM_CONTROLS + 1, "auto").is_err());
        assert!(metrics(0, "auto").is_err());
        assert!(metrics(5, "fastest").is_err());
    }

    #[test]
    fn verify_reports_pass() {
        assert!(verify(8, "optimized", 10, 1).unwrap().starts_with("PASS mode=exhaustive checked=1024"));
        assert!(verify(40, "original", 50, 1).unwrap().starts_with("PASS mode=sampled"));
    }

    #[test]
    fn curves() {
        let d = curve("linear", "abstract_depth", 10, 30, 10).unwrap();
        assert_eq!(d, [56, 136, 216]);
        assert!(curve("linear", "abstract_depth", 10, 5, 1).is_err());
        assert!(curve("linear", "abstract_depth", 1, 2000, 1).is_err());
        assert!(curve("linear", "width", 1, 5, 1).is_err());
    }

    #[test]
    fn exponents() {
        assert!((exponent("4:2,12:4,60:8").unwrap() - 2.799).abs() < 1e-3);
        assert!(exponent("4").is_err());
    }
}
