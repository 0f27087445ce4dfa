//! Restricted constraint-based pruning.
//!
//! Two engines, one per graph abstraction:
//!
//! - [`rest_pcmci_plus`] prunes a window causal graph in two phases: a
//!   lagged phase that whittles per-target candidate-parent lists against
//!   growing conditioning sets, then a momentary phase that re-tests every
//!   surviving edge conditioned on present-slice subsets joined with both
//!   endpoints' lagged candidate sets.
//! - [`rest_pcgce`] prunes an extended summary graph directly, collapsing
//!   each variable's past into its first principal component. Per
//!   conditioning-set size it first caches the test statistics of every
//!   (edge, subset) candidate, then runs the p-value tests from the
//!   weakest dependence up, skipping entries gone stale.
//!
//! Neither engine orients anything beyond temporal priority: given a
//! causal order the instantaneous slice starts out fully oriented, without
//! one it stays unoriented and downstream code deals with the cycles.
//!
//! Both engines are generic over the conditional-independence test so a
//! d-separation oracle can stand in for the data-driven test.

use crate::graph::{
    ExtNode, ExtendedGraph, LaggedNode, PartialExtendedGraph, PartialWindowGraph, VarId,
    WindowGraph,
};
use crate::restnb::CausalOrder;
use crate::stats::{self, Dataset, TestResult};
use crate::Result;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Conditional-independence test over window-graph nodes. `x` may sit at
/// any lag (0 = instantaneous candidate); `y` is always the present slice.
pub trait WindowCi: Sync {
    fn test(
        &self,
        x: LaggedNode,
        y: VarId,
        cond: &[LaggedNode],
        compute_p: bool,
    ) -> Result<TestResult>;
    /// Number of tests run so far (diagnostics).
    fn test_count(&self) -> usize;
}

/// Conditional-independence test over extended-graph nodes.
pub trait ExtendedCi: Sync {
    fn test(&self, x: ExtNode, y: VarId, cond: &[ExtNode], compute_p: bool) -> Result<TestResult>;
    fn test_count(&self) -> usize;
}

/// Partial-correlation test on a dataset, aligned so every lag up to
/// `gamma` is available on the same `T - gamma` rows.
pub struct PartialCorrWindowCi<'a> {
    data: &'a Dataset,
    gamma: usize,
    count: AtomicUsize,
}

impl<'a> PartialCorrWindowCi<'a> {
    pub fn new(data: &'a Dataset, gamma: usize) -> Result<Self> {
        if data.rows() <= gamma + 4 {
            return Err(crate::Error::InsufficientSamples {
                have: data.rows(),
                need: gamma + 4,
            });
        }
        Ok(Self {
            data,
            gamma,
            count: AtomicUsize::new(0),
        })
    }
}

impl WindowCi for PartialCorrWindowCi<'_> {
    fn test(
        &self,
        x: LaggedNode,
        y: VarId,
        cond: &[LaggedNode],
        compute_p: bool,
    ) -> Result<TestResult> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let xcol = self.data.lagged_col(x, self.gamma)?;
        let ycol = self.data.lagged_col(LaggedNode::new(y, 0), self.gamma)?;
        let zcols: Vec<Vec<f64>> = cond
            .iter()
            .map(|&c| self.data.lagged_col(c, self.gamma))
            .collect::<Result<_>>()?;
        let zrefs: Vec<&[f64]> = zcols.iter().map(|c| c.as_slice()).collect();
        stats::ci_test_partial_corr(&xcol, &ycol, &zrefs, compute_p)
    }

    fn test_count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

/// d-separation oracle over a known window graph: statistic 1 and p-value
/// 0 when dependent, statistic 0 and p-value 1 when separated.
pub struct OracleWindowCi<'a> {
    truth: &'a WindowGraph,
    count: AtomicUsize,
}

impl<'a> OracleWindowCi<'a> {
    pub fn new(truth: &'a WindowGraph) -> Self {
        Self {
            truth,
            count: AtomicUsize::new(0),
        }
    }
}

impl WindowCi for OracleWindowCi<'_> {
    fn test(
        &self,
        x: LaggedNode,
        y: VarId,
        cond: &[LaggedNode],
        _compute_p: bool,
    ) -> Result<TestResult> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let s: BTreeSet<LaggedNode> = cond.iter().copied().collect();
        let separated = self.truth.d_separated(x, LaggedNode::new(y, 0), &s)?;
        Ok(if separated {
            TestResult {
                statistic: 0.0,
                p_value: 1.0,
            }
        } else {
            TestResult {
                statistic: 1.0,
                p_value: 0.0,
            }
        })
    }

    fn test_count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

/// Partial-correlation test over extended-graph nodes; the past block of
/// each variable is its first principal component over lags `1..=gamma`,
/// precomputed once.
pub struct PartialCorrExtendedCi<'a> {
    data: &'a Dataset,
    gamma: usize,
    past: Vec<Vec<f64>>,
    count: AtomicUsize,
}

impl<'a> PartialCorrExtendedCi<'a> {
    pub fn new(data: &'a Dataset, gamma: usize) -> Result<Self> {
        if data.rows() <= gamma + 4 {
            return Err(crate::Error::InsufficientSamples {
                have: data.rows(),
                need: gamma + 4,
            });
        }
        let mut past = Vec::with_capacity(data.var_count());
        for v in 0..data.var_count() {
            let lagged: Vec<Vec<f64>> = (1..=gamma)
                .map(|l| data.lagged_col(LaggedNode::new(VarId(v), l), gamma))
                .collect::<Result<_>>()?;
            let refs: Vec<&[f64]> = lagged.iter().map(|c| c.as_slice()).collect();
            past.push(stats::pca_first_component(&refs)?);
        }
        Ok(Self {
            data,
            gamma,
            past,
            count: AtomicUsize::new(0),
        })
    }

    fn column(&self, node: ExtNode) -> Result<Vec<f64>> {
        match node {
            ExtNode::Present(v) => self.data.lagged_col(LaggedNode::new(v, 0), self.gamma),
            ExtNode::Past(v) => Ok(self.past[v.0].clone()),
        }
    }
}

impl ExtendedCi for PartialCorrExtendedCi<'_> {
    fn test(&self, x: ExtNode, y: VarId, cond: &[ExtNode], compute_p: bool) -> Result<TestResult> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let xcol = self.column(x)?;
        let ycol = self.column(ExtNode::Present(y))?;
        let zcols: Vec<Vec<f64>> = cond
            .iter()
            .map(|&c| self.column(c))
            .collect::<Result<_>>()?;
        let zrefs: Vec<&[f64]> = zcols.iter().map(|c| c.as_slice()).collect();
        stats::ci_test_partial_corr(&xcol, &ycol, &zrefs, compute_p)
    }

    fn test_count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

/// d-separation oracle over a known extended graph.
pub struct OracleExtendedCi<'a> {
    truth: &'a ExtendedGraph,
    count: AtomicUsize,
}

impl<'a> OracleExtendedCi<'a> {
    pub fn new(truth: &'a ExtendedGraph) -> Self {
        Self {
            truth,
            count: AtomicUsize::new(0),
        }
    }
}

impl ExtendedCi for OracleExtendedCi<'_> {
    fn test(&self, x: ExtNode, y: VarId, cond: &[ExtNode], _compute_p: bool) -> Result<TestResult> {
        self.count.fetch_add(1, Ordering::Relaxed);
        let s: BTreeSet<ExtNode> = cond.iter().copied().collect();
        let separated = self.truth.d_separated(x, ExtNode::Present(y), &s)?;
        Ok(if separated {
            TestResult {
                statistic: 0.0,
                p_value: 1.0,
            }
        } else {
            TestResult {
                statistic: 1.0,
                p_value: 0.0,
            }
        })
    }

    fn test_count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

/// Lexicographic size-`n` subsets of `items`, in the order of `items`.
fn subsets_of_size<T: Copy>(items: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    if n > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance the combination counter.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - n {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn fmin(map: &BTreeMap<(LaggedNode, VarId), f64>, key: (LaggedNode, VarId)) -> f64 {
    *map.get(&key).unwrap_or(&f64::INFINITY)
}

fn update_min(map: &mut BTreeMap<(LaggedNode, VarId), f64>, key: (LaggedNode, VarId), h: f64) {
    let entry = map.entry(key).or_insert(f64::INFINITY);
    if h.abs() < *entry {
        *entry = h.abs();
    }
}

/// Convenience entry point running the partial-correlation test on `data`.
pub fn rest_pcmci_plus(
    data: &Dataset,
    gamma: usize,
    alpha: f64,
    order: Option<&CausalOrder>,
) -> Result<PartialWindowGraph> {
    let ci = PartialCorrWindowCi::new(data, gamma)?;
    rest_pcmci_plus_with(&ci, data.names(), gamma, alpha, order)
}

/// Window-graph pruning; see the module docs for the phase structure.
/// With `order` the instantaneous slice starts fully oriented and
/// conditioning draws on parents; without it, on adjacencies.
pub fn rest_pcmci_plus_with(
    ci: &dyn WindowCi,
    names: &[String],
    gamma: usize,
    alpha: f64,
    order: Option<&CausalOrder>,
) -> Result<PartialWindowGraph> {
    let d = names.len();
    let present: Vec<VarId> = (0..d).map(VarId).collect();

    // Fully connected start: every lagged node into every present node;
    // instantaneous pairs oriented by the order when given.
    let mut graph = PartialWindowGraph::new(names.to_vec(), gamma)?;
    for &x in &present {
        for lag in 1..=gamma {
            for &y in &present {
                graph.add_lagged(x, lag, y)?;
            }
        }
    }
    for &a in &present {
        for &b in &present {
            if a < b {
                match order {
                    Some(o) => {
                        if o.precedes(a, b) {
                            graph.add_inst(a, b)?;
                        } else {
                            graph.add_inst(b, a)?;
                        }
                    }
                    None => graph.add_unoriented(a, b)?,
                }
            }
        }
    }

    // Lagged candidate-parent lists, ordered; the order is resorted by
    // shrinking minimum dependence after each sweep.
    let mut b_hat: Vec<Vec<LaggedNode>> = present
        .iter()
        .map(|_| {
            (0..d)
                .flat_map(|v| (1..=gamma).map(move |l| LaggedNode::new(VarId(v), l)))
                .collect()
        })
        .collect();
    let mut i_min: BTreeMap<(LaggedNode, VarId), f64> = BTreeMap::new();

    // Phase 1: lagged skeleton per target.
    for &y in &present {
        let mut n = 0;
        loop {
            let candidates = b_hat[y.0].clone();
            if candidates.is_empty() || candidates.len() - 1 < n {
                break;
            }
            let mut marked: Vec<LaggedNode> = Vec::new();
            for &x in &candidates {
                let cond: Vec<LaggedNode> = candidates
                    .iter()
                    .copied()
                    .filter(|&c| c != x)
                    .take(n)
                    .collect();
                let res = ci.test(x, y, &cond, true)?;
                update_min(&mut i_min, (x, y), res.statistic);
                if res.p_value > alpha {
                    marked.push(x);
                }
            }
            for x in marked {
                b_hat[y.0].retain(|&c| c != x);
                graph.remove_lagged(x.var, x.lag, y);
            }
            // Stable sort by shrinking dependence floor, largest first.
            b_hat[y.0].sort_by(|&a, &b| fmin(&i_min, (b, y)).total_cmp(&fmin(&i_min, (a, y))));
            n += 1;
        }
    }

    // The momentary phase conditions on the frozen candidate sets.
    let b_frozen = b_hat.clone();
    let shifted = |x: LaggedNode| -> Vec<LaggedNode> {
        b_frozen[x.var.0]
            .iter()
            .map(|&c| LaggedNode::new(c.var, c.lag + x.lag))
            .filter(|c| c.lag <= gamma)
            .collect()
    };

    // Present-slice conditioning pool per target: parents when ordered,
    // adjacencies otherwise.
    let get_pool = |graph: &PartialWindowGraph, y: VarId| -> Vec<VarId> {
        let mut pool: BTreeSet<VarId> = BTreeSet::new();
        for &(a, b) in graph.inst_edges() {
            if b == y {
                pool.insert(a);
            }
            if order.is_none() && a == y {
                pool.insert(b);
            }
        }
        if order.is_none() {
            for &(a, b) in graph.unoriented_edges() {
                if a == y {
                    pool.insert(b);
                }
                if b == y {
                    pool.insert(a);
                }
            }
        }
        pool.into_iter().collect()
    };

    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum EdgeKey {
        Lagged(VarId, usize, VarId),
        Inst(VarId, VarId),
    }

    let mut i_min2: BTreeMap<(LaggedNode, VarId), f64> = BTreeMap::new();
    let mut pools: Vec<Vec<VarId>> = present.iter().map(|&y| get_pool(&graph, y)).collect();
    let mut n = 0;
    loop {
        // Tasks: every remaining edge, viewed into its target; unoriented
        // pairs give one task per endpoint.
        let mut tasks: Vec<(LaggedNode, VarId, EdgeKey)> = Vec::new();
        for &y in &present {
            for &(x, lag, t) in graph.lagged_edges() {
                if t == y {
                    tasks.push((LaggedNode::new(x, lag), y, EdgeKey::Lagged(x, lag, t)));
                }
            }
            for &(a, b) in graph.inst_edges() {
                if b == y {
                    tasks.push((LaggedNode::new(a, 0), y, EdgeKey::Inst(a, b)));
                }
            }
            for &(a, b) in graph.unoriented_edges() {
                if a == y {
                    tasks.push((LaggedNode::new(b, 0), y, EdgeKey::Inst(a, b)));
                } else if b == y {
                    tasks.push((LaggedNode::new(a, 0), y, EdgeKey::Inst(a, b)));
                }
            }
        }

        let pool_for = |x: LaggedNode, y: VarId, pools: &[Vec<VarId>]| -> Vec<VarId> {
            pools[y.0]
                .iter()
                .copied()
                .filter(|&p| !(x.lag == 0 && p == x.var))
                .collect()
        };
        if !tasks
            .iter()
            .any(|&(x, y, _)| pool_for(x, y, &pools).len() >= n)
        {
            break;
        }

        let mut marked: BTreeSet<EdgeKey> = BTreeSet::new();
        for &(x, y, key) in &tasks {
            if marked.contains(&key) {
                continue;
            }
            let pool = pool_for(x, y, &pools);
            if pool.len() < n {
                continue;
            }
            let base: BTreeSet<LaggedNode> = b_frozen[y.0]
                .iter()
                .copied()
                .filter(|&c| c != x)
                .chain(shifted(x))
                .collect();
            for subset in subsets_of_size(&pool, n) {
                let mut cond: BTreeSet<LaggedNode> = base.clone();
                cond.extend(subset.iter().map(|&v| LaggedNode::new(v, 0)));
                cond.remove(&x);
                cond.remove(&LaggedNode::new(y, 0));
                let cond: Vec<LaggedNode> = cond.into_iter().collect();
                let res = ci.test(x, y, &cond, true)?;
                update_min(&mut i_min2, (x, y), res.statistic);
                if res.p_value > alpha {
                    marked.insert(key);
                    break;
                }
            }
        }

        // Batch removal at the end of the sweep.
        for key in marked {
            match key {
                EdgeKey::Lagged(x, lag, y) => graph.remove_lagged(x, lag, y),
                EdgeKey::Inst(a, b) => graph.remove_inst_any(a, b),
            }
        }
        n += 1;
        // Refresh and resort the per-target pools by dependence floor.
        pools = present
            .iter()
            .map(|&y| {
                let mut pool = get_pool(&graph, y);
                pool.sort_by(|&a, &b| {
                    fmin(&i_min2, (LaggedNode::new(b, 0), y))
                        .total_cmp(&fmin(&i_min2, (LaggedNode::new(a, 0), y)))
                });
                pool
            })
            .collect();
    }

    Ok(graph)
}

/// Convenience entry point running the partial-correlation test on `data`.
pub fn rest_pcgce(
    data: &Dataset,
    gamma: usize,
    alpha: f64,
    order: Option<&CausalOrder>,
) -> Result<PartialExtendedGraph> {
    let ci = PartialCorrExtendedCi::new(data, gamma)?;
    rest_pcgce_with(&ci, data.names(), alpha, order)
}

/// Extended-graph pruning with statistic-first scheduling: per
/// conditioning-set size, statistics for all candidate (edge, subset)
/// pairs are cached, then p-value tests run from the weakest dependence
/// up, skipping entries whose subset (or edge) has gone stale.
pub fn rest_pcgce_with(
    ci: &dyn ExtendedCi,
    names: &[String],
    alpha: f64,
    order: Option<&CausalOrder>,
) -> Result<PartialExtendedGraph> {
    let d = names.len();
    let present: Vec<VarId> = (0..d).map(VarId).collect();

    let mut graph = PartialExtendedGraph::new(names.to_vec())?;
    for &x in &present {
        for &y in &present {
            graph.add_lagged(x, y);
        }
    }
    for &a in &present {
        for &b in &present {
            if a < b {
                match order {
                    Some(o) => {
                        if o.precedes(a, b) {
                            graph.add_inst(a, b)?;
                        } else {
                            graph.add_inst(b, a)?;
                        }
                    }
                    None => graph.add_unoriented(a, b)?,
                }
            }
        }
    }

    // Conditioning pool: parents of the target when an order is given,
    // adjacencies otherwise. Past nodes always point into the present, so
    // they are parents either way.
    let get_pool = |graph: &PartialExtendedGraph, y: VarId| -> Vec<ExtNode> {
        let mut pool: BTreeSet<ExtNode> = BTreeSet::new();
        for &(x, t) in graph.lagged_edges() {
            if t == y {
                pool.insert(ExtNode::Past(x));
            }
        }
        for &(a, b) in graph.inst_edges() {
            if b == y {
                pool.insert(ExtNode::Present(a));
            }
            if order.is_none() && a == y {
                pool.insert(ExtNode::Present(b));
            }
        }
        if order.is_none() {
            for &(a, b) in graph.unoriented_edges() {
                if a == y {
                    pool.insert(ExtNode::Present(b));
                }
                if b == y {
                    pool.insert(ExtNode::Present(a));
                }
            }
        }
        pool.into_iter().collect()
    };

    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum EdgeKey {
        Past(VarId, VarId),
        Inst(VarId, VarId),
    }

    let edge_alive = |graph: &PartialExtendedGraph, key: EdgeKey| -> bool {
        match key {
            EdgeKey::Past(x, y) => graph.lagged_edges().contains(&(x, y)),
            EdgeKey::Inst(a, b) => {
                graph.inst_edges().contains(&(a, b))
                    || graph.inst_edges().contains(&(b, a))
                    || graph.unoriented_edges().contains(&(a.min(b), a.max(b)))
            }
        }
    };

    let mut n = 0;
    loop {
        let mut tasks: Vec<(ExtNode, VarId, EdgeKey)> = Vec::new();
        for &y in &present {
            for &(x, t) in graph.lagged_edges() {
                if t == y {
                    tasks.push((ExtNode::Past(x), y, EdgeKey::Past(x, t)));
                }
            }
            for &(a, b) in graph.inst_edges() {
                if b == y {
                    tasks.push((ExtNode::Present(a), y, EdgeKey::Inst(a, b)));
                }
            }
            for &(a, b) in graph.unoriented_edges() {
                if a == y {
                    tasks.push((ExtNode::Present(b), y, EdgeKey::Inst(a, b)));
                } else if b == y {
                    tasks.push((ExtNode::Present(a), y, EdgeKey::Inst(a, b)));
                }
            }
        }

        let pool_for = |graph: &PartialExtendedGraph, x: ExtNode, y: VarId| -> Vec<ExtNode> {
            get_pool(graph, y).into_iter().filter(|&p| p != x).collect()
        };
        if !tasks
            .iter()
            .any(|&(x, y, _)| pool_for(&graph, x, y).len() >= n)
        {
            break;
        }

        // Statistic pass: cache dependence strength for every candidate.
        struct Entry {
            strength: f64,
            x: ExtNode,
            y: VarId,
            subset: Vec<ExtNode>,
            key: EdgeKey,
        }
        let mut cache: Vec<Entry> = Vec::new();
        for &(x, y, key) in &tasks {
            let pool = pool_for(&graph, x, y);
            if pool.len() < n {
                continue;
            }
            for subset in subsets_of_size(&pool, n) {
                let res = ci.test(x, y, &subset, false)?;
                cache.push(Entry {
                    strength: res.statistic.abs(),
                    x,
                    y,
                    subset,
                    key,
                });
            }
        }
        cache.sort_by(|a, b| {
            a.strength
                .total_cmp(&b.strength)
                .then_with(|| (a.x, a.y, &a.subset).cmp(&(b.x, b.y, &b.subset)))
        });

        // Execution pass, weakest dependence first.
        for e in &cache {
            if !edge_alive(&graph, e.key) {
                continue;
            }
            let pool: BTreeSet<ExtNode> = pool_for(&graph, e.x, e.y).into_iter().collect();
            if !e.subset.iter().all(|s| pool.contains(s)) {
                continue;
            }
            let res = ci.test(e.x, e.y, &e.subset, true)?;
            if res.p_value > alpha {
                match e.key {
                    EdgeKey::Past(x, y) => graph.remove_lagged(x, y),
                    EdgeKey::Inst(a, b) => graph.remove_inst_any(a, b),
                }
            }
        }
        n += 1;
    }

    Ok(graph)
}
