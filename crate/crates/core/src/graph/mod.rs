//! Causal-graph abstractions over a multivariate time series.
//!
//! Three levels of abstraction are provided, from most to least detailed:
//!
//! - [`WindowGraph`]: a DAG over a window of width `gamma + 1`. Thanks to
//!   time-invariance of the causal structure, a single `(src, lag, dst)`
//!   triple encodes the edge at every window position, so only edges into
//!   the present slice are stored.
//! - [`ExtendedGraph`]: a two-slice graph separating instantaneous causes
//!   from lagged causes, without lag values.
//! - [`SummaryGraph`]: one node per series; lags collapsed entirely. This
//!   is the only level where cycles (`X -> Y` and `Y -> X`) can appear.
//!
//! Partially oriented variants ([`PartialWindowGraph`],
//! [`PartialExtendedGraph`]) carry the same data plus a set of unoriented
//! instantaneous pairs; they are what constraint-based pruning produces
//! when no causal order is supplied. All types are plain data, immutable
//! once built, and safe to share across threads.

mod cycles;
mod dsep;
mod json;

pub use cycles::UndirectedCycleGroup;
pub use json::{EdgeJson, GraphDocument, GraphJson};

use crate::{Error, Result};
use std::collections::BTreeSet;

/// Index of a time series within a dataset. Indices are dense `0..d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// A variable observed `lag` steps in the past; `lag == 0` is the present
/// slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaggedNode {
    pub var: VarId,
    pub lag: usize,
}

impl LaggedNode {
    pub fn new(var: VarId, lag: usize) -> Self {
        Self { var, lag }
    }
}

/// A node of an [`ExtendedGraph`]: either a present-slice variable or the
/// whole past block of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNode {
    Present(VarId),
    Past(VarId),
}

fn check_names(names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateVariable(n.clone()));
        }
    }
    Ok(())
}

/// Normalizes an unordered instantaneous pair.
fn unordered(a: VarId, b: VarId) -> (VarId, VarId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Returns true when adding `src -> dst` keeps `edges` acyclic.
fn stays_acyclic(d: usize, edges: &BTreeSet<(VarId, VarId)>, src: VarId, dst: VarId) -> bool {
    // DFS from dst: a path back to src would close a cycle.
    let mut adj = vec![Vec::new(); d];
    for &(a, b) in edges {
        adj[a.0].push(b.0);
    }
    let mut stack = vec![dst.0];
    let mut seen = vec![false; d];
    while let Some(v) = stack.pop() {
        if v == src.0 {
            return false;
        }
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend(adj[v].iter().copied());
    }
    true
}

/// Kahn topological order with smallest-index tie-breaking, so the result
/// is deterministic.
fn topo_order(d: usize, edges: &BTreeSet<(VarId, VarId)>) -> Vec<VarId> {
    let mut indeg = vec![0usize; d];
    for &(_, b) in edges {
        indeg[b.0] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..d).filter(|&v| indeg[v] == 0).collect();
    let mut out = Vec::with_capacity(d);
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        out.push(VarId(v));
        for &(a, b) in edges {
            if a.0 == v {
                indeg[b.0] -= 1;
                if indeg[b.0] == 0 {
                    ready.insert(b.0);
                }
            }
        }
    }
    debug_assert_eq!(out.len(), d, "instantaneous subgraph must be acyclic");
    out
}

/// Window causal graph: repeating causal structure over a window of width
/// `gamma + 1`. Lagged edges `(src, lag, dst)` mean `src_{t-lag} -> dst_t`;
/// instantaneous edges `(src, dst)` mean `src_t -> dst_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowGraph {
    gamma: usize,
    vars: Vec<String>,
    lagged: BTreeSet<(VarId, usize, VarId)>,
    inst: BTreeSet<(VarId, VarId)>,
}

impl WindowGraph {
    pub fn new<S: Into<String>>(names: Vec<S>, gamma: usize) -> Result<Self> {
        let vars: Vec<String> = names.into_iter().map(Into::into).collect();
        check_names(&vars)?;
        if gamma == 0 {
            return Err(Error::InvalidParameter("gamma must be >= 1".into()));
        }
        Ok(Self {
            gamma,
            vars,
            lagged: BTreeSet::new(),
            inst: BTreeSet::new(),
        })
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0]
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.vars
            .iter()
            .position(|n| n == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Adds `src_{t-lag} -> dst_t` with `1 <= lag <= gamma`. Self edges
    /// (`src == dst`) are allowed here: they are self causes.
    pub fn add_lagged(&mut self, src: VarId, lag: usize, dst: VarId) -> Result<()> {
        if lag == 0 || lag > self.gamma {
            return Err(Error::LagOutOfRange {
                lag,
                gamma: self.gamma,
            });
        }
        self.lagged.insert((src, lag, dst));
        Ok(())
    }

    /// Adds `src_t -> dst_t`, rejecting self edges and anything that would
    /// close an instantaneous cycle.
    pub fn add_inst(&mut self, src: VarId, dst: VarId) -> Result<()> {
        if src == dst {
            return Err(Error::InstantaneousSelfEdge(self.var_name(src).into()));
        }
        if !stays_acyclic(self.vars.len(), &self.inst, src, dst) {
            return Err(Error::InstantaneousCycle(
                self.var_name(src).into(),
                self.var_name(dst).into(),
            ));
        }
        self.inst.insert((src, dst));
        Ok(())
    }

    pub fn lagged_edges(&self) -> &BTreeSet<(VarId, usize, VarId)> {
        &self.lagged
    }

    pub fn inst_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.inst
    }

    /// Collapses lag values: a lagged edge survives as `X_{t-} -> Y_t` if
    /// any lag realizes it.
    pub fn to_extended_graph(&self) -> ExtendedGraph {
        let mut lagged = BTreeSet::new();
        for &(src, _, dst) in &self.lagged {
            lagged.insert((src, dst));
        }
        ExtendedGraph {
            vars: self.vars.clone(),
            lagged,
            inst: self.inst.clone(),
        }
    }

    /// Collapses the window entirely into a per-variable summary graph.
    pub fn to_summary_graph(&self) -> SummaryGraph {
        let mut edges = BTreeSet::new();
        let mut self_loops = BTreeSet::new();
        for &(src, _, dst) in &self.lagged {
            if src == dst {
                self_loops.insert(src);
            } else {
                edges.insert((src, dst));
            }
        }
        for &(src, dst) in &self.inst {
            edges.insert((src, dst));
        }
        SummaryGraph {
            vars: self.vars.clone(),
            edges,
            self_loops,
        }
    }

    /// Deterministic topological order of the instantaneous subgraph.
    pub fn instantaneous_topo_order(&self) -> Vec<VarId> {
        topo_order(self.vars.len(), &self.inst)
    }
}

/// Window causal graph whose instantaneous edges may be unoriented.
/// Lagged edges are always oriented by temporal priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialWindowGraph {
    gamma: usize,
    vars: Vec<String>,
    lagged: BTreeSet<(VarId, usize, VarId)>,
    inst: BTreeSet<(VarId, VarId)>,
    unoriented: BTreeSet<(VarId, VarId)>,
}

impl PartialWindowGraph {
    pub fn new<S: Into<String>>(names: Vec<S>, gamma: usize) -> Result<Self> {
        let g = WindowGraph::new(names, gamma)?;
        Ok(Self {
            gamma: g.gamma,
            vars: g.vars,
            lagged: BTreeSet::new(),
            inst: BTreeSet::new(),
            unoriented: BTreeSet::new(),
        })
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0]
    }

    pub fn add_lagged(&mut self, src: VarId, lag: usize, dst: VarId) -> Result<()> {
        if lag == 0 || lag > self.gamma {
            return Err(Error::LagOutOfRange {
                lag,
                gamma: self.gamma,
            });
        }
        self.lagged.insert((src, lag, dst));
        Ok(())
    }

    pub fn add_inst(&mut self, src: VarId, dst: VarId) -> Result<()> {
        if src == dst {
            return Err(Error::InstantaneousSelfEdge(self.var_name(src).into()));
        }
        if self.unoriented.contains(&unordered(src, dst)) {
            return Err(Error::InvalidParameter(format!(
                "pair {}-{} is already present unoriented",
                self.var_name(src),
                self.var_name(dst)
            )));
        }
        if !stays_acyclic(self.vars.len(), &self.inst, src, dst) {
            return Err(Error::InstantaneousCycle(
                self.var_name(src).into(),
                self.var_name(dst).into(),
            ));
        }
        self.inst.insert((src, dst));
        Ok(())
    }

    pub fn add_unoriented(&mut self, a: VarId, b: VarId) -> Result<()> {
        if a == b {
            return Err(Error::InstantaneousSelfEdge(self.var_name(a).into()));
        }
        let (a, b) = unordered(a, b);
        if self.inst.contains(&(a, b)) || self.inst.contains(&(b, a)) {
            return Err(Error::InvalidParameter(format!(
                "pair {}-{} is already present oriented",
                self.var_name(a),
                self.var_name(b)
            )));
        }
        self.unoriented.insert((a, b));
        Ok(())
    }

    pub fn lagged_edges(&self) -> &BTreeSet<(VarId, usize, VarId)> {
        &self.lagged
    }

    pub fn inst_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.inst
    }

    pub fn unoriented_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.unoriented
    }

    pub fn remove_lagged(&mut self, src: VarId, lag: usize, dst: VarId) {
        self.lagged.remove(&(src, lag, dst));
    }

    pub fn remove_inst_any(&mut self, a: VarId, b: VarId) {
        self.inst.remove(&(a, b));
        self.inst.remove(&(b, a));
        self.unoriented.remove(&unordered(a, b));
    }

    /// Undirected cycle groups of the unoriented instantaneous subgraph.
    pub fn find_ucgs(&self) -> Vec<UndirectedCycleGroup> {
        cycles::find_groups(self.vars.len(), &self.unoriented)
    }

    /// Orients every unoriented edge of `group` by `order`: `{a, b}`
    /// becomes `a -> b` when `a` precedes `b`. Edges outside the group are
    /// untouched.
    pub fn orient_group(
        &self,
        group: &UndirectedCycleGroup,
        order: &crate::restnb::CausalOrder,
    ) -> Result<Self> {
        for v in group.nodes() {
            if order.position(*v).is_none() {
                return Err(Error::IncompleteOrder(self.var_name(*v).into()));
            }
        }
        let mut out = self.clone();
        for &(a, b) in group.edges() {
            if !out.unoriented.remove(&(a, b)) {
                continue;
            }
            if order.precedes(a, b) {
                out.inst.insert((a, b));
            } else {
                out.inst.insert((b, a));
            }
        }
        Ok(out)
    }

    /// Converts into an oriented [`WindowGraph`]; fails while unoriented
    /// edges remain.
    pub fn into_window_graph(self) -> Result<WindowGraph> {
        if let Some(&(a, _)) = self.unoriented.iter().next() {
            return Err(Error::InvalidParameter(format!(
                "graph still has unoriented edges (e.g. at `{}`)",
                self.var_name(a)
            )));
        }
        Ok(WindowGraph {
            gamma: self.gamma,
            vars: self.vars,
            lagged: self.lagged,
            inst: self.inst,
        })
    }

    /// Summary graph of the oriented part. Unoriented leftovers (possible
    /// only on degraded runs) contribute nothing.
    pub fn to_summary_graph(&self) -> SummaryGraph {
        let mut edges = BTreeSet::new();
        let mut self_loops = BTreeSet::new();
        for &(src, _, dst) in &self.lagged {
            if src == dst {
                self_loops.insert(src);
            } else {
                edges.insert((src, dst));
            }
        }
        for &(src, dst) in &self.inst {
            edges.insert((src, dst));
        }
        SummaryGraph {
            vars: self.vars.clone(),
            edges,
            self_loops,
        }
    }
}

impl From<WindowGraph> for PartialWindowGraph {
    fn from(g: WindowGraph) -> Self {
        Self {
            gamma: g.gamma,
            vars: g.vars,
            lagged: g.lagged,
            inst: g.inst,
            unoriented: BTreeSet::new(),
        }
    }
}

/// Extended summary causal graph: a past block and a present slice.
/// Lagged edges `(src, dst)` mean `src_{t-} -> dst_t` with no lag value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedGraph {
    vars: Vec<String>,
    lagged: BTreeSet<(VarId, VarId)>,
    inst: BTreeSet<(VarId, VarId)>,
}

impl ExtendedGraph {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let vars: Vec<String> = names.into_iter().map(Into::into).collect();
        check_names(&vars)?;
        Ok(Self {
            vars,
            lagged: BTreeSet::new(),
            inst: BTreeSet::new(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0]
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.vars
            .iter()
            .position(|n| n == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Adds `src_{t-} -> dst_t`. Self edges are allowed (self causes).
    pub fn add_lagged(&mut self, src: VarId, dst: VarId) {
        self.lagged.insert((src, dst));
    }

    pub fn add_inst(&mut self, src: VarId, dst: VarId) -> Result<()> {
        if src == dst {
            return Err(Error::InstantaneousSelfEdge(self.var_name(src).into()));
        }
        if !stays_acyclic(self.vars.len(), &self.inst, src, dst) {
            return Err(Error::InstantaneousCycle(
                self.var_name(src).into(),
                self.var_name(dst).into(),
            ));
        }
        self.inst.insert((src, dst));
        Ok(())
    }

    pub fn lagged_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.lagged
    }

    pub fn inst_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.inst
    }

    pub fn to_summary_graph(&self) -> SummaryGraph {
        let mut edges = BTreeSet::new();
        let mut self_loops = BTreeSet::new();
        for &(src, dst) in &self.lagged {
            if src == dst {
                self_loops.insert(src);
            } else {
                edges.insert((src, dst));
            }
        }
        for &(src, dst) in &self.inst {
            edges.insert((src, dst));
        }
        SummaryGraph {
            vars: self.vars.clone(),
            edges,
            self_loops,
        }
    }

    pub fn instantaneous_topo_order(&self) -> Vec<VarId> {
        topo_order(self.vars.len(), &self.inst)
    }
}

/// Extended summary causal graph whose instantaneous edges may be
/// unoriented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialExtendedGraph {
    vars: Vec<String>,
    lagged: BTreeSet<(VarId, VarId)>,
    inst: BTreeSet<(VarId, VarId)>,
    unoriented: BTreeSet<(VarId, VarId)>,
}

impl PartialExtendedGraph {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let g = ExtendedGraph::new(names)?;
        Ok(Self {
            vars: g.vars,
            lagged: BTreeSet::new(),
            inst: BTreeSet::new(),
            unoriented: BTreeSet::new(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0]
    }

    pub fn add_lagged(&mut self, src: VarId, dst: VarId) {
        self.lagged.insert((src, dst));
    }

    pub fn add_inst(&mut self, src: VarId, dst: VarId) -> Result<()> {
        if src == dst {
            return Err(Error::InstantaneousSelfEdge(self.var_name(src).into()));
        }
        if self.unoriented.contains(&unordered(src, dst)) {
            return Err(Error::InvalidParameter(format!(
                "pair {}-{} is already present unoriented",
                self.var_name(src),
                self.var_name(dst)
            )));
        }
        if !stays_acyclic(self.vars.len(), &self.inst, src, dst) {
            return Err(Error::InstantaneousCycle(
                self.var_name(src).into(),
                self.var_name(dst).into(),
            ));
        }
        self.inst.insert((src, dst));
        Ok(())
    }

    pub fn add_unoriented(&mut self, a: VarId, b: VarId) -> Result<()> {
        if a == b {
            return Err(Error::InstantaneousSelfEdge(self.var_name(a).into()));
        }
        let (a, b) = unordered(a, b);
        if self.inst.contains(&(a, b)) || self.inst.contains(&(b, a)) {
            return Err(Error::InvalidParameter(format!(
                "pair {}-{} is already present oriented",
                self.var_name(a),
                self.var_name(b)
            )));
        }
        self.unoriented.insert((a, b));
        Ok(())
    }

    pub fn lagged_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.lagged
    }

    pub fn inst_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.inst
    }

    pub fn unoriented_edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.unoriented
    }

    pub fn remove_lagged(&mut self, src: VarId, dst: VarId) {
        self.lagged.remove(&(src, dst));
    }

    pub fn remove_inst_any(&mut self, a: VarId, b: VarId) {
        self.inst.remove(&(a, b));
        self.inst.remove(&(b, a));
        self.unoriented.remove(&unordered(a, b));
    }

    pub fn find_ucgs(&self) -> Vec<UndirectedCycleGroup> {
        cycles::find_groups(self.vars.len(), &self.unoriented)
    }

    pub fn orient_group(
        &self,
        group: &UndirectedCycleGroup,
        order: &crate::restnb::CausalOrder,
    ) -> Result<Self> {
        for v in group.nodes() {
            if order.position(*v).is_none() {
                return Err(Error::IncompleteOrder(self.var_name(*v).into()));
            }
        }
        let mut out = self.clone();
        for &(a, b) in group.edges() {
            if !out.unoriented.remove(&(a, b)) {
                continue;
            }
            if order.precedes(a, b) {
                out.inst.insert((a, b));
            } else {
                out.inst.insert((b, a));
            }
        }
        Ok(out)
    }

    pub fn into_extended_graph(self) -> Result<ExtendedGraph> {
        if let Some(&(a, _)) = self.unoriented.iter().next() {
            return Err(Error::InvalidParameter(format!(
                "graph still has unoriented edges (e.g. at `{}`)",
                self.var_name(a)
            )));
        }
        Ok(ExtendedGraph {
            vars: self.vars,
            lagged: self.lagged,
            inst: self.inst,
        })
    }

    pub fn to_summary_graph(&self) -> SummaryGraph {
        let mut edges = BTreeSet::new();
        let mut self_loops = BTreeSet::new();
        for &(src, dst) in &self.lagged {
            if src == dst {
                self_loops.insert(src);
            } else {
                edges.insert((src, dst));
            }
        }
        for &(src, dst) in &self.inst {
            edges.insert((src, dst));
        }
        SummaryGraph {
            vars: self.vars.clone(),
            edges,
            self_loops,
        }
    }
}

impl From<ExtendedGraph> for PartialExtendedGraph {
    fn from(g: ExtendedGraph) -> Self {
        Self {
            vars: g.vars,
            lagged: g.lagged,
            inst: g.inst,
            unoriented: BTreeSet::new(),
        }
    }
}

/// Summary causal graph. Cycles are allowed: `X -> Y` together with
/// `Y -> X` renders as `X <-> Y`. Self causes are kept apart in
/// `self_loops` so scoring can skip them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryGraph {
    vars: Vec<String>,
    edges: BTreeSet<(VarId, VarId)>,
    self_loops: BTreeSet<VarId>,
}

impl SummaryGraph {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let vars: Vec<String> = names.into_iter().map(Into::into).collect();
        check_names(&vars)?;
        Ok(Self {
            vars,
            edges: BTreeSet::new(),
            self_loops: BTreeSet::new(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0]
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.vars
            .iter()
            .position(|n| n == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn add_edge(&mut self, src: VarId, dst: VarId) -> Result<()> {
        if src == dst {
            return Err(Error::InvalidParameter(
                "summary self causes go to self_loops, not edges".into(),
            ));
        }
        self.edges.insert((src, dst));
        Ok(())
    }

    pub fn add_self_loop(&mut self, v: VarId) {
        self.self_loops.insert(v);
    }

    pub fn edges(&self) -> &BTreeSet<(VarId, VarId)> {
        &self.edges
    }

    pub fn self_loops(&self) -> &BTreeSet<VarId> {
        &self.self_loops
    }

    pub fn has_edge(&self, src: VarId, dst: VarId) -> bool {
        self.edges.contains(&(src, dst))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::running_example_wcg;
    use super::*;
    use crate::restnb::CausalOrder;

    fn v(i: usize) -> VarId {
        VarId(i)
    }

    #[test]
    fn extended_graph_of_running_example() {
        let g = running_example_wcg();
        let e = g.to_extended_graph();
        let (x, y, z, w, u) = (v(0), v(1), v(2), v(3), v(4));
        let lagged: BTreeSet<_> = [
            (x, x),
            (y, y),
            (z, z),
            (w, w),
            (u, u),
            (x, y),
            (x, z),
            (w, y),
            (w, z),
        ]
        .into_iter()
        .collect();
        assert_eq!(*e.lagged_edges(), lagged);
        assert_eq!(e.inst_edges(), g.inst_edges());
    }

    #[test]
    fn summary_graph_of_running_example() {
        let g = running_example_wcg();
        let s = g.to_summary_graph();
        let (x, y, z, w, u) = (v(0), v(1), v(2), v(3), v(4));
        let edges: BTreeSet<_> = [
            (x, y),
            (y, x),
            (x, z),
            (z, x),
            (w, y),
            (y, w),
            (w, z),
            (z, w),
            (y, z),
            (w, u),
        ]
        .into_iter()
        .collect();
        assert_eq!(*s.edges(), edges);
        let loops: BTreeSet<_> = [x, y, z, w, u].into_iter().collect();
        assert_eq!(*s.self_loops(), loops);
    }

    #[test]
    fn summary_via_extended_matches_direct_deduction() {
        let g = running_example_wcg();
        assert_eq!(
            g.to_summary_graph(),
            g.to_extended_graph().to_summary_graph()
        );
    }

    #[test]
    fn empty_graphs_stay_empty_through_deductions() {
        let g = WindowGraph::new(vec!["A", "B"], 3).unwrap();
        let e = g.to_extended_graph();
        assert!(e.lagged_edges().is_empty() && e.inst_edges().is_empty());
        let s = g.to_summary_graph();
        assert!(s.edges().is_empty() && s.self_loops().is_empty());
        assert_eq!(s, e.to_summary_graph());
    }

    #[test]
    fn repeated_lags_collapse_to_one_extended_edge() {
        let mut g = WindowGraph::new(vec!["X", "Y"], 2).unwrap();
        g.add_lagged(v(0), 1, v(1)).unwrap();
        g.add_lagged(v(0), 2, v(1)).unwrap();
        let e = g.to_extended_graph();
        assert_eq!(e.lagged_edges().len(), 1);
        assert!(e.lagged_edges().contains(&(v(0), v(1))));
    }

    #[test]
    fn mixed_lag_zero_and_one_gives_two_summary_directions() {
        let mut g = WindowGraph::new(vec!["X", "Y"], 1).unwrap();
        g.add_lagged(v(0), 1, v(1)).unwrap();
        g.add_inst(v(1), v(0)).unwrap();
        let s = g.to_summary_graph();
        assert!(s.has_edge(v(0), v(1)) && s.has_edge(v(1), v(0)));
        assert!(s.self_loops().is_empty());
    }

    #[test]
    fn extended_collapse_keeps_both_directions() {
        let mut e = ExtendedGraph::new(vec!["X", "Y"]).unwrap();
        e.add_lagged(v(0), v(1));
        e.add_inst(v(1), v(0)).unwrap();
        let s = e.to_summary_graph();
        assert!(s.has_edge(v(0), v(1)) && s.has_edge(v(1), v(0)));
    }

    #[test]
    fn instantaneous_cycles_are_rejected() {
        let mut g = WindowGraph::new(vec!["A", "B", "C"], 1).unwrap();
        g.add_inst(v(0), v(1)).unwrap();
        g.add_inst(v(1), v(2)).unwrap();
        assert!(matches!(
            g.add_inst(v(2), v(0)),
            Err(Error::InstantaneousCycle(_, _))
        ));
        assert!(matches!(
            g.add_inst(v(0), v(0)),
            Err(Error::InstantaneousSelfEdge(_))
        ));
    }

    #[test]
    fn orient_group_follows_the_order() {
        let mut g = PartialWindowGraph::new(vec!["X", "Y", "Z"], 1).unwrap();
        g.add_unoriented(v(0), v(1)).unwrap();
        g.add_unoriented(v(1), v(2)).unwrap();
        g.add_unoriented(v(0), v(2)).unwrap();
        let group = &g.find_ucgs()[0];
        let order = CausalOrder::new(vec![v(1), v(2), v(0)]).unwrap();
        let oriented = g.orient_group(group, &order).unwrap();
        let expect: BTreeSet<_> = [(v(1), v(2)), (v(1), v(0)), (v(2), v(0))]
            .into_iter()
            .collect();
        assert_eq!(*oriented.inst_edges(), expect);
        assert!(oriented.unoriented_edges().is_empty());
    }

    #[test]
    fn orient_group_with_empty_group_is_identity() {
        let mut g = PartialWindowGraph::new(vec!["X", "Y"], 1).unwrap();
        g.add_unoriented(v(0), v(1)).unwrap();
        let empty = UndirectedCycleGroup::default();
        let order = CausalOrder::new(vec![v(0), v(1)]).unwrap();
        assert_eq!(g.orient_group(&empty, &order).unwrap(), g);
    }

    #[test]
    fn orient_group_rejects_incomplete_orders() {
        let mut g = PartialWindowGraph::new(vec!["X", "Y", "Z"], 1).unwrap();
        g.add_unoriented(v(0), v(1)).unwrap();
        g.add_unoriented(v(1), v(2)).unwrap();
        g.add_unoriented(v(0), v(2)).unwrap();
        let group = g.find_ucgs().remove(0);
        let order = CausalOrder::new(vec![v(0), v(1)]).unwrap();
        assert!(matches!(
            g.orient_group(&group, &order),
            Err(Error::IncompleteOrder(_))
        ));
    }

    #[test]
    fn topo_order_breaks_ties_by_index() {
        let mut g = WindowGraph::new(vec!["A", "B", "C", "D"], 1).unwrap();
        g.add_inst(v(2), v(0)).unwrap();
        g.add_inst(v(2), v(3)).unwrap();
        assert_eq!(g.instantaneous_topo_order(), vec![v(1), v(2), v(0), v(3)]);
    }
}
