//! Wasm bindings for the browser demo. Everything returns JSON strings
//! the page renders directly:
//!
//! - [`options`]: available structures, methods and noise families.
//! - [`simulate`]: synthetic series plus its ground-truth summary graph.
//! - [`discover`]: run one hybrid method on a freshly simulated dataset
//!   and score it against the truth.
//! - [`sweep`]: repeat a discovery over many seeds and report the score
//!   distribution (serial, so it works without threads).
//!
//! Errors come back as `{"error": "..."}` so the page needs no exception
//! plumbing.

use hcd_core::bench::{f1_scg, MethodId};
use hcd_core::datagen::{self, NoiseKind, RickerParams, Structure};
use hcd_core::graph::SummaryGraph;
use hcd_core::hybrid::{self, DiscoveryConfig};
use hcd_core::stats::Dataset;
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(e: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

#[derive(Serialize)]
struct SimulationJson {
    names: Vec<String>,
    /// Column-major series values.
    series: Vec<Vec<f64>>,
    truth: hcd_core::graph::GraphJson,
}

fn generate(
    structure: &str,
    noise: &str,
    species: usize,
    seed: u64,
    t: usize,
) -> hcd_core::Result<(Dataset, SummaryGraph)> {
    if structure == "ricker" {
        let mut p = RickerParams::new(species.max(2), seed);
        p.t = t;
        return datagen::gen_ricker(&p);
    }
    let s = Structure::from_id(structure)?;
    let n = NoiseKind::from_id(noise)?;
    let (_, data, _, scg) = datagen::gen_structure_auto(s, n, t, seed)?;
    Ok((data, scg))
}

/// Selector contents for the page.
#[wasm_bindgen]
pub fn options() -> String {
    let structures: Vec<&str> = Structure::ALL
        .iter()
        .map(|s| s.id())
        .chain(std::iter::once("ricker"))
        .collect();
    let methods: Vec<&str> = MethodId::ALL.iter().map(|m| m.id()).collect();
    serde_json::json!({
        "structures": structures,
        "methods": methods,
        "noises": ["uniform", "gaussian"],
    })
    .to_string()
}

/// Synthetic dataset plus ground truth for plotting.
#[wasm_bindgen]
pub fn simulate(structure: &str, noise: &str, species: usize, seed: u32, t: usize) -> String {
    match generate(structure, noise, species, seed as u64, t) {
        Ok((data, truth)) => {
            let body = SimulationJson {
                names: data.names().to_vec(),
                series: (0..data.var_count())
                    .map(|v| data.col(hcd_core::graph::VarId(v)).to_vec())
                    .collect(),
                truth: truth.to_json(),
            };
            serde_json::to_string(&body).unwrap_or_else(err_json)
        }
        Err(e) => err_json(e),
    }
}

/// One full generate-discover-score round trip.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn discover(
    structure: &str,
    noise: &str,
    species: usize,
    seed: u32,
    t: usize,
    method: &str,
    gamma: usize,
    alpha: f64,
) -> String {
    let run = || -> hcd_core::Result<String> {
        let (data, truth) = generate(structure, noise, species, seed as u64, t)?;
        let method = MethodId::from_id(method)?;
        let cfg = DiscoveryConfig {
            gamma,
            alpha,
            variant: method.variant(),
        };
        let result = match method {
            MethodId::NbcbW | MethodId::NbcbE => hybrid::nbcb(&data, &cfg)?,
            MethodId::CbnbW | MethodId::CbnbE => hybrid::cbnb(&data, &cfg)?,
        };
        let score = f1_scg(&result.scg, &truth)?;
        let names = result.scg.var_names().to_vec();
        let body = serde_json::json!({
            "truth": truth.to_json(),
            "predicted": result.scg.to_json(),
            "detail": result.detail.to_json(),
            "order_log": result
                .order_log
                .iter()
                .map(|o| o.nodes().iter().map(|v| names[v.0].clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "f1": {
                "tp": score.true_positives,
                "fp": score.false_positives,
                "fn": score.false_negatives,
                "f1": score.f1,
            },
            "ci_tests": result.diagnostics.ci_tests,
            "warnings": result.diagnostics.warnings,
        });
        Ok(body.to_string())
    };
    run().unwrap_or_else(err_json)
}

/// Multi-seed score distribution for one method and structure.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    structure: &str,
    noise: &str,
    species: usize,
    seeds: usize,
    t: usize,
    method: &str,
    gamma: usize,
    alpha: f64,
) -> String {
    let run = || -> hcd_core::Result<String> {
        let method = MethodId::from_id(method)?;
        let cfg = DiscoveryConfig {
            gamma,
            alpha,
            variant: method.variant(),
        };
        let mut scores = Vec::new();
        for seed in 0..seeds.clamp(1, 50) as u64 {
            let (data, truth) = generate(structure, noise, species, seed, t)?;
            let f1 = match method {
                MethodId::NbcbW | MethodId::NbcbE => hybrid::nbcb(&data, &cfg),
                MethodId::CbnbW | MethodId::CbnbE => hybrid::cbnb(&data, &cfg),
            }
            .and_then(|r| f1_scg(&r.scg, &truth))
            .map(|r| r.f1)
            .unwrap_or(0.0);
            scores.push(f1);
        }
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let sd = (scores.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / n).sqrt();
        Ok(serde_json::json!({ "scores": scores, "mean": mean, "sd": sd }).to_string())
    };
    run().unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn options_lists_everything() {
        let v: serde_json::Value = serde_json::from_str(&options()).unwrap();
        assert_eq!(v["structures"].as_array().unwrap().len(), 7);
        assert_eq!(v["methods"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn simulate_returns_series_and_truth() {
        let v: serde_json::Value =
            serde_json::from_str(&simulate("fork", "uniform", 0, 3, 200)).unwrap();
        assert_eq!(v["names"].as_array().unwrap().len(), 3);
        assert_eq!(v["series"][0].as_array().unwrap().len(), 200);
        assert_eq!(v["truth"]["type"], "scg");
    }

    #[test]
    fn discover_round_trip_scores_fork() {
        let v: serde_json::Value =
            serde_json::from_str(&discover("fork", "uniform", 0, 0, 1000, "nbcb-w", 5, 0.05))
                .unwrap();
        assert!(v.get("error").is_none(), "{v}");
        assert!(v["f1"]["f1"].as_f64().unwrap() >= 0.5);
        assert_eq!(v["predicted"]["type"], "scg");
        assert_eq!(v["detail"]["type"], "wcg");
    }

    #[test]
    fn sweep_reports_the_score_distribution() {
        let v: serde_json::Value =
            serde_json::from_str(&sweep("fork", "uniform", 0, 5, 500, "cbnb-w", 3, 0.05)).unwrap();
        assert!(v.get("error").is_none(), "{v}");
        assert_eq!(v["scores"].as_array().unwrap().len(), 5);
        let mean = v["mean"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&mean));
        assert!(mean > 0.5);
    }

    #[test]
    fn bad_inputs_surface_as_error_fields() {
        let v: serde_json::Value =
            serde_json::from_str(&discover("fork", "uniform", 0, 0, 300, "nope", 5, 0.05)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("nope"));
    }
}
