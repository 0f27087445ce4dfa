//! Evaluation harness: F1 over summary-graph orientations (self causes
//! excluded) and a multi-seed benchmark runner with CSV and table output.

use crate::datagen::{self, NoiseKind, RickerParams, Structure};
use crate::graph::SummaryGraph;
use crate::hybrid::{self, DiscoveryConfig, DiscoveryResult, Variant};
use crate::{Error, Result};
use rayon::prelude::*;

/// Directed-pair confusion counts and their F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Report {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub f1: f64,
}

/// F1 of the predicted summary orientations against the truth. Each
/// directed pair scores separately, so a bidirected relation counts as
/// two and earns partial credit against a single true direction. Self
/// loops never enter the score.
pub fn f1_scg(pred: &SummaryGraph, truth: &SummaryGraph) -> Result<F1Report> {
    if pred.var_names() != truth.var_names() {
        return Err(Error::VariableMismatch);
    }
    let tp = pred.edges().intersection(truth.edges()).count();
    let fp = pred.edges().difference(truth.edges()).count();
    let fn_count = truth.edges().difference(pred.edges()).count();
    let denom = 2 * tp + fp + fn_count;
    let f1 = if denom == 0 {
        // Empty prediction against empty truth is perfect agreement.
        1.0
    } else {
        2.0 * tp as f64 / denom as f64
    };
    Ok(F1Report {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_count,
        f1,
    })
}

/// The four hybrid method ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodId {
    NbcbW,
    NbcbE,
    CbnbW,
    CbnbE,
}

impl MethodId {
    pub const ALL: [MethodId; 4] = [
        MethodId::NbcbW,
        MethodId::NbcbE,
        MethodId::CbnbW,
        MethodId::CbnbE,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            MethodId::NbcbW => "nbcb-w",
            MethodId::NbcbE => "nbcb-e",
            MethodId::CbnbW => "cbnb-w",
            MethodId::CbnbE => "cbnb-e",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.id() == id)
            .ok_or_else(|| Error::UnknownId {
                id: id.to_string(),
                noun: "method",
            })
    }

    pub fn variant(&self) -> Variant {
        match self {
            MethodId::NbcbW | MethodId::CbnbW => Variant::Window,
            MethodId::NbcbE | MethodId::CbnbE => Variant::Extended,
        }
    }

    fn noise_based_first(&self) -> bool {
        matches!(self, MethodId::NbcbW | MethodId::NbcbE)
    }
}

/// What the benchmark simulates per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchStructure {
    Scm(Structure),
    Ricker { species: usize },
}

impl BenchStructure {
    pub fn id(&self) -> String {
        match self {
            BenchStructure::Scm(s) => s.id().to_string(),
            BenchStructure::Ricker { species } => format!("ricker-{species}"),
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        if let Some(rest) = id.strip_prefix("ricker-") {
            let species: usize = rest.parse().map_err(|_| Error::UnknownId {
                id: id.to_string(),
                noun: "structure",
            })?;
            return Ok(BenchStructure::Ricker { species });
        }
        Ok(BenchStructure::Scm(Structure::from_id(id)?))
    }
}

/// Aggregated scores for one (method, structure) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub method: MethodId,
    pub structure: String,
    pub noise: String,
    pub n_datasets: usize,
    pub mean_f1: f64,
    pub sd_f1: f64,
    pub seconds: f64,
    pub failures: usize,
}

/// One generate-discover-score run. Ricker structures ignore the noise
/// family (their noise is part of the model).
pub fn run_once(
    method: MethodId,
    structure: BenchStructure,
    noise: NoiseKind,
    seed: u64,
    t: usize,
    cfg: &DiscoveryConfig,
) -> Result<(F1Report, DiscoveryResult)> {
    let run_cfg = DiscoveryConfig {
        variant: method.variant(),
        ..cfg.clone()
    };
    let (data, truth) = match structure {
        BenchStructure::Scm(s) => {
            let (_, data, _, scg) = datagen::gen_structure_auto(s, noise, t, seed)?;
            (data, scg)
        }
        BenchStructure::Ricker { species } => {
            let mut p = RickerParams::new(species, seed);
            p.t = t;
            datagen::gen_ricker(&p)?
        }
    };
    let result = if method.noise_based_first() {
        hybrid::nbcb(&data, &run_cfg)?
    } else {
        hybrid::cbnb(&data, &run_cfg)?
    };
    let report = f1_scg(&result.scg, &truth)?;
    Ok((report, result))
}

/// Multi-seed sweep over every (method, structure) cell, seeds
/// `0..n_seeds`, fanned out over a bounded worker pool. A failing run
/// scores zero and is counted, never aborting the sweep.
pub fn run_benchmark(
    methods: &[MethodId],
    structures: &[BenchStructure],
    noise: NoiseKind,
    n_seeds: usize,
    t: usize,
    cfg: &DiscoveryConfig,
    jobs: Option<usize>,
) -> Vec<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .expect("worker pool");

    let mut reports = Vec::new();
    for &method in methods {
        for &structure in structures {
            let start = std::time::Instant::now();
            let scores: Vec<(f64, Option<String>)> = pool.install(|| {
                (0..n_seeds as u64)
                    .into_par_iter()
                    .map(
                        |seed| match run_once(method, structure, noise, seed, t, cfg) {
                            Ok((r, _)) => (r.f1, None),
                            Err(e) => (0.0, Some(format!("seed {seed}: {e}"))),
                        },
                    )
                    .collect()
            });
            let n = scores.len();
            let mean = scores.iter().map(|(f, _)| f).sum::<f64>() / n.max(1) as f64;
            let var = scores
                .iter()
                .map(|(f, _)| (f - mean) * (f - mean))
                .sum::<f64>()
                / n.max(1) as f64;
            let failures = scores.iter().filter(|(_, e)| e.is_some()).count();
            for (_, e) in &scores {
                if let Some(msg) = e {
                    eprintln!(
                        "warning: {} on {} failed ({msg}); scored 0",
                        method.id(),
                        structure.id()
                    );
                }
            }
            reports.push(ExperimentReport {
                method,
                structure: structure.id(),
                noise: noise.id().to_string(),
                n_datasets: n,
                mean_f1: mean,
                sd_f1: var.sqrt(),
                seconds: start.elapsed().as_secs_f64(),
                failures,
            });
        }
    }
    reports
}

/// CSV emission: `method,structure,noise,n,mean_f1,sd_f1,seconds`.
pub fn report_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("method,structure,noise,n,mean_f1,sd_f1,seconds\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{:.4},{:.2}\n",
            r.method.id(),
            r.structure,
            r.noise,
            r.n_datasets,
            r.mean_f1,
            r.sd_f1,
            r.seconds
        ));
    }
    out
}

/// Fixed-width table for standard output.
pub fn report_table(reports: &[ExperimentReport]) -> String {
    let mut out = format!(
        "{:<8} {:<20} {:<9} {:>4} {:>8} {:>7} {:>9}\n",
        "method", "structure", "noise", "n", "mean_f1", "sd_f1", "seconds"
    );
    for r in reports {
        out.push_str(&format!(
            "{:<8} {:<20} {:<9} {:>4} {:>8.3} {:>7.3} {:>9.2}\n",
            r.method.id(),
            r.structure,
            r.noise,
            r.n_datasets,
            r.mean_f1,
            r.sd_f1,
            r.seconds
        ));
    }
    out
}
