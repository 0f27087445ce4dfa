//! The two hybrid discovery pipelines.
//!
//! NBCB orders first and prunes second: a noise-based causal order of the
//! whole present slice feeds the constraint-based pruner, which then only
//! has to delete edges from a fully oriented start.
//!
//! CBNB prunes first and orients second: the constraint-based pruner runs
//! without an order, the unoriented instantaneous remainder is split into
//! undirected cycle groups, and the noise-based ordering runs once per
//! group (deconfounded by the group's lagged parents) to orient it.
//!
//! Each pipeline comes in a window variant (`-w`, lag-resolved pruning)
//! and an extended variant (`-e`, past blocks collapsed to one component).

use crate::graph::{GraphJson, LaggedNode, SummaryGraph, VarId};
use crate::restcb::{self, ExtendedCi, PartialCorrExtendedCi, PartialCorrWindowCi, WindowCi};
use crate::restnb::{CausalOrder, NoiseOrderer, Orderer};
use crate::stats::Dataset;
use crate::Result;
use serde::Serialize;
use std::collections::BTreeSet;

/// Which graph abstraction the constraint-based side prunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Window,
    Extended,
}

/// Pipeline parameters. Defaults: `gamma = 5`, `alpha = 0.05`, window
/// variant.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryConfig {
    pub gamma: usize,
    pub alpha: f64,
    pub variant: Variant,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            gamma: 5,
            alpha: 0.05,
            variant: Variant::Window,
        }
    }
}

/// The lag-aware graph behind a summary result.
#[derive(Debug, Clone, PartialEq)]
pub enum DetailGraph {
    Window(crate::graph::PartialWindowGraph),
    Extended(crate::graph::PartialExtendedGraph),
}

impl DetailGraph {
    pub fn to_summary_graph(&self) -> SummaryGraph {
        match self {
            DetailGraph::Window(g) => g.to_summary_graph(),
            DetailGraph::Extended(g) => g.to_summary_graph(),
        }
    }

    pub fn unoriented_count(&self) -> usize {
        match self {
            DetailGraph::Window(g) => g.unoriented_edges().len(),
            DetailGraph::Extended(g) => g.unoriented_edges().len(),
        }
    }

    /// Fully oriented graphs serialize at their natural type; the partial
    /// types appear only when a degraded run left unoriented edges.
    pub fn to_json(&self) -> GraphJson {
        match self {
            DetailGraph::Window(g) if g.unoriented_edges().is_empty() => g
                .clone()
                .into_window_graph()
                .expect("no unoriented edges")
                .to_json(),
            DetailGraph::Window(g) => g.to_json(),
            DetailGraph::Extended(g) if g.unoriented_edges().is_empty() => g
                .clone()
                .into_extended_graph()
                .expect("no unoriented edges")
                .to_json(),
            DetailGraph::Extended(g) => g.to_json(),
        }
    }
}

/// Run metadata: test counts, group bookkeeping and wall time.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Diagnostics {
    pub ci_tests: usize,
    pub ucg_count: usize,
    pub unoriented_left: usize,
    pub warnings: Vec<String>,
    pub runtime_ms: u128,
}

/// Output of one discovery run. The summary graph is always deduced from
/// the detail graph at construction, so the two cannot drift apart.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryResult {
    pub scg: SummaryGraph,
    pub detail: DetailGraph,
    pub order_log: Vec<CausalOrder>,
    pub diagnostics: Diagnostics,
}

impl DiscoveryResult {
    fn new(detail: DetailGraph, order_log: Vec<CausalOrder>, diagnostics: Diagnostics) -> Self {
        Self {
            scg: detail.to_summary_graph(),
            detail,
            order_log,
            diagnostics,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        #[derive(Serialize)]
        struct ResultJson<'a> {
            scg: GraphJson,
            detail: GraphJson,
            order_log: Vec<Vec<&'a str>>,
            diagnostics: &'a Diagnostics,
        }
        let names = self.scg.var_names();
        let body = ResultJson {
            scg: self.scg.to_json(),
            detail: self.detail.to_json(),
            order_log: self
                .order_log
                .iter()
                .map(|o| o.nodes().iter().map(|&v| names[v.0].as_str()).collect())
                .collect(),
            diagnostics: &self.diagnostics,
        };
        Ok(serde_json::to_string_pretty(&body)?)
    }
}

fn maybe_now() -> Option<std::time::Instant> {
    // Instant is unusable on wasm targets; diagnostics then report zero.
    if cfg!(target_arch = "wasm32") {
        None
    } else {
        Some(std::time::Instant::now())
    }
}

fn elapsed_ms(start: &Option<std::time::Instant>) -> u128 {
    start.map(|s| s.elapsed().as_millis()).unwrap_or(0)
}

fn all_lagged_nodes(d: usize, gamma: usize) -> BTreeSet<LaggedNode> {
    (0..d)
        .flat_map(|v| (1..=gamma).map(move |l| LaggedNode::new(VarId(v), l)))
        .collect()
}

fn sample_size_warning(data: &Dataset, gamma: usize) -> Option<String> {
    let need = (gamma + 1) * data.var_count();
    (data.rows() <= need).then(|| {
        format!(
            "short series: {} rows for {} variables at gamma {} (more than {} recommended)",
            data.rows(),
            data.var_count(),
            gamma,
            need
        )
    })
}

/// NBCB on a dataset: noise-based order over the whole present slice,
/// then constraint-based pruning given that order.
pub fn nbcb(data: &Dataset, cfg: &DiscoveryConfig) -> Result<DiscoveryResult> {
    let std = data.standardized()?;
    let warn = sample_size_warning(&std, cfg.gamma);
    let orderer = NoiseOrderer {
        data: &std,
        gamma: cfg.gamma,
        alpha: cfg.alpha,
    };
    let mut result = match cfg.variant {
        Variant::Window => {
            let ci = PartialCorrWindowCi::new(&std, cfg.gamma)?;
            nbcb_window_with(&ci, &orderer, std.names(), cfg)?
        }
        Variant::Extended => {
            let ci = PartialCorrExtendedCi::new(&std, cfg.gamma)?;
            nbcb_extended_with(&ci, &orderer, std.names(), cfg)?
        }
    };
    result.diagnostics.warnings.extend(warn);
    Ok(result)
}

/// CBNB on a dataset: constraint-based pruning without an order, then one
/// noise-based ordering per undirected cycle group.
pub fn cbnb(data: &Dataset, cfg: &DiscoveryConfig) -> Result<DiscoveryResult> {
    let std = data.standardized()?;
    let warn = sample_size_warning(&std, cfg.gamma);
    let orderer = NoiseOrderer {
        data: &std,
        gamma: cfg.gamma,
        alpha: cfg.alpha,
    };
    let mut result = match cfg.variant {
        Variant::Window => {
            let ci = PartialCorrWindowCi::new(&std, cfg.gamma)?;
            cbnb_window_with(&ci, &orderer, std.names(), cfg)?
        }
        Variant::Extended => {
            let ci = PartialCorrExtendedCi::new(&std, cfg.gamma)?;
            cbnb_extended_with(&ci, &orderer, std.names(), cfg)?
        }
    };
    result.diagnostics.warnings.extend(warn);
    Ok(result)
}

/// NBCB with explicit test and orderer (window variant). This is the
/// entry point for population-oracle runs.
pub fn nbcb_window_with(
    ci: &dyn WindowCi,
    orderer: &dyn Orderer,
    names: &[String],
    cfg: &DiscoveryConfig,
) -> Result<DiscoveryResult> {
    let start = maybe_now();
    let present: Vec<VarId> = (0..names.len()).map(VarId).collect();
    let order = orderer.order(&present, &all_lagged_nodes(names.len(), cfg.gamma))?;
    let graph = restcb::rest_pcmci_plus_with(ci, names, cfg.gamma, cfg.alpha, Some(&order))?;
    debug_assert!(graph.unoriented_edges().is_empty());
    let diagnostics = Diagnostics {
        ci_tests: ci.test_count(),
        runtime_ms: elapsed_ms(&start),
        ..Diagnostics::default()
    };
    Ok(DiscoveryResult::new(
        DetailGraph::Window(graph),
        vec![order],
        diagnostics,
    ))
}

/// NBCB with explicit test and orderer (extended variant).
pub fn nbcb_extended_with(
    ci: &dyn ExtendedCi,
    orderer: &dyn Orderer,
    names: &[String],
    cfg: &DiscoveryConfig,
) -> Result<DiscoveryResult> {
    let start = maybe_now();
    let present: Vec<VarId> = (0..names.len()).map(VarId).collect();
    let order = orderer.order(&present, &all_lagged_nodes(names.len(), cfg.gamma))?;
    let graph = restcb::rest_pcgce_with(ci, names, cfg.alpha, Some(&order))?;
    debug_assert!(graph.unoriented_edges().is_empty());
    let diagnostics = Diagnostics {
        ci_tests: ci.test_count(),
        runtime_ms: elapsed_ms(&start),
        ..Diagnostics::default()
    };
    Ok(DiscoveryResult::new(
        DetailGraph::Extended(graph),
        vec![order],
        diagnostics,
    ))
}

/// CBNB with explicit test and orderer (window variant).
pub fn cbnb_window_with(
    ci: &dyn WindowCi,
    orderer: &dyn Orderer,
    names: &[String],
    cfg: &DiscoveryConfig,
) -> Result<DiscoveryResult> {
    let start = maybe_now();
    let mut graph = restcb::rest_pcmci_plus_with(ci, names, cfg.gamma, cfg.alpha, None)?;
    let groups = graph.find_ucgs();
    let mut order_log = Vec::new();
    let mut warnings = Vec::new();
    for group in &groups {
        let targets: Vec<VarId> = group.nodes().iter().copied().collect();
        // Lagged parents of the group inside the pruned graph.
        let past: BTreeSet<LaggedNode> = graph
            .lagged_edges()
            .iter()
            .filter(|&&(_, _, dst)| group.nodes().contains(&dst))
            .map(|&(src, lag, _)| LaggedNode::new(src, lag))
            .collect();
        match orderer.order(&targets, &past) {
            Ok(order) => {
                graph = graph.orient_group(group, &order)?;
                order_log.push(order);
            }
            Err(e) => {
                warnings.push(format!(
                    "group of {} nodes left unoriented: {e}",
                    group.nodes().len()
                ));
            }
        }
    }
    let diagnostics = Diagnostics {
        ci_tests: ci.test_count(),
        ucg_count: groups.len(),
        unoriented_left: graph.unoriented_edges().len(),
        warnings,
        runtime_ms: elapsed_ms(&start),
    };
    Ok(DiscoveryResult::new(
        DetailGraph::Window(graph),
        order_log,
        diagnostics,
    ))
}

/// CBNB with explicit test and orderer (extended variant). Past-block
/// parents expand to every lag up to `gamma` for the ordering regression.
pub fn cbnb_extended_with(
    ci: &dyn ExtendedCi,
    orderer: &dyn Orderer,
    names: &[String],
    cfg: &DiscoveryConfig,
) -> Result<DiscoveryResult> {
    let start = maybe_now();
    let mut graph = restcb::rest_pcgce_with(ci, names, cfg.alpha, None)?;
    let groups = graph.find_ucgs();
    let mut order_log = Vec::new();
    let mut warnings = Vec::new();
    for group in &groups {
        let targets: Vec<VarId> = group.nodes().iter().copied().collect();
        let past: BTreeSet<LaggedNode> = graph
            .lagged_edges()
            .iter()
            .filter(|&&(_, dst)| group.nodes().contains(&dst))
            .flat_map(|&(src, _)| (1..=cfg.gamma).map(move |l| LaggedNode::new(src, l)))
            .collect();
        match orderer.order(&targets, &past) {
            Ok(order) => {
                graph = graph.orient_group(group, &order)?;
                order_log.push(order);
            }
            Err(e) => {
                warnings.push(format!(
                    "group of {} nodes left unoriented: {e}",
                    group.nodes().len()
                ));
            }
        }
    }
    let diagnostics = Diagnostics {
        ci_tests: ci.test_count(),
        ucg_count: groups.len(),
        unoriented_left: graph.unoriented_edges().len(),
        warnings,
        runtime_ms: elapsed_ms(&start),
    };
    Ok(DiscoveryResult::new(
        DetailGraph::Extended(graph),
        order_log,
        diagnostics,
    ))
}
