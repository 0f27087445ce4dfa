//! d-separation on DAGs, used as a population oracle when testing the
//! discovery pipelines for exactness.
//!
//! A [`WindowGraph`] is unrolled over lags `0..=2*gamma` so that the
//! conditioning sets produced by the pruning phases (which shift parent
//! sets back in time) stay expressible. The reachability routine is the
//! standard active-trail search: walking descendant-ward may bounce back
//! up only at ancestors of the conditioning set, walking ancestor-ward is
//! blocked by the conditioning set itself.

use super::{ExtNode, ExtendedGraph, LaggedNode, WindowGraph};
use crate::{Error, Result};
use std::collections::BTreeSet;

/// Minimal parent/child adjacency for d-separation queries.
pub(crate) struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
        }
    }

    pub(crate) fn add_edge(&mut self, src: usize, dst: usize) {
        self.parents[dst].push(src);
        self.children[src].push(dst);
    }

    fn ancestors_of(&self, seed: &BTreeSet<usize>) -> Vec<bool> {
        let mut anc = vec![false; self.parents.len()];
        let mut stack: Vec<usize> = seed.iter().copied().collect();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut anc[v], true) {
                continue;
            }
            stack.extend(self.parents[v].iter().copied());
        }
        anc
    }

    /// True iff every path between `x` and `y` is blocked by `cond`.
    pub(crate) fn d_separated(&self, x: usize, y: usize, cond: &BTreeSet<usize>) -> bool {
        let in_cond = |v: usize| cond.contains(&v);
        let anc_of_cond = self.ancestors_of(cond);

        // States (node, entered-from-below?): from_child means the trail
        // reached the node against an edge (child -> parent move).
        let n = self.parents.len();
        let mut visited = vec![[false; 2]; n];
        let mut stack = vec![(x, true)];
        while let Some((v, from_child)) = stack.pop() {
            if std::mem::replace(&mut visited[v][from_child as usize], true) {
                continue;
            }
            if v == y && !in_cond(v) {
                return false;
            }
            if from_child {
                if !in_cond(v) {
                    for &p in &self.parents[v] {
                        stack.push((p, true));
                    }
                    for &c in &self.children[v] {
                        stack.push((c, false));
                    }
                }
            } else {
                if !in_cond(v) {
                    for &c in &self.children[v] {
                        stack.push((c, false));
                    }
                }
                if anc_of_cond[v] {
                    // Collider (or observed ancestor) lets the trail turn.
                    for &p in &self.parents[v] {
                        stack.push((p, true));
                    }
                }
            }
        }
        true
    }
}

impl WindowGraph {
    /// Index of `(var, lag)` in the unrolled DAG over lags `0..=2*gamma`.
    fn unrolled_index(&self, node: LaggedNode) -> Result<usize> {
        let max_lag = 2 * self.gamma();
        if node.lag > max_lag {
            return Err(Error::OutsideUnrolledRange(
                self.var_name(node.var).to_string(),
                node.lag,
                max_lag,
            ));
        }
        Ok(node.lag * self.var_count() + node.var.0)
    }

    /// DAG over nodes `(var, lag)` for lags `0..=2*gamma`, replicating the
    /// repeating edge structure at every slot it fits.
    pub(crate) fn unrolled_dag(&self) -> Dag {
        let d = self.var_count();
        let max_lag = 2 * self.gamma();
        let mut dag = Dag::new(d * (max_lag + 1));
        let idx = |var: usize, lag: usize| lag * d + var;
        for &(src, lag, dst) in self.lagged_edges() {
            for target_lag in 0..=(max_lag - lag) {
                dag.add_edge(idx(src.0, target_lag + lag), idx(dst.0, target_lag));
            }
        }
        for &(src, dst) in self.inst_edges() {
            for lag in 0..=max_lag {
                dag.add_edge(idx(src.0, lag), idx(dst.0, lag));
            }
        }
        dag
    }

    /// d-separation between two lagged nodes given a conditioning set, on
    /// the graph unrolled over lags `0..=2*gamma`.
    pub fn d_separated(
        &self,
        x: LaggedNode,
        y: LaggedNode,
        cond: &BTreeSet<LaggedNode>,
    ) -> Result<bool> {
        if cond.contains(&x) || cond.contains(&y) {
            return Err(Error::QueryInConditioningSet);
        }
        let xi = self.unrolled_index(x)?;
        let yi = self.unrolled_index(y)?;
        let mut s = BTreeSet::new();
        for &c in cond {
            s.insert(self.unrolled_index(c)?);
        }
        Ok(self.unrolled_dag().d_separated(xi, yi, &s))
    }
}

impl ExtendedGraph {
    fn ext_index(&self, node: ExtNode) -> usize {
        match node {
            ExtNode::Present(v) => v.0,
            ExtNode::Past(v) => self.var_count() + v.0,
        }
    }

    /// The extended graph itself is a DAG (past block feeding an acyclic
    /// present slice), so d-separation applies to it directly.
    pub fn d_separated(&self, x: ExtNode, y: ExtNode, cond: &BTreeSet<ExtNode>) -> Result<bool> {
        if cond.contains(&x) || cond.contains(&y) {
            return Err(Error::QueryInConditioningSet);
        }
        let d = self.var_count();
        let mut dag = Dag::new(2 * d);
        for &(src, dst) in self.lagged_edges() {
            dag.add_edge(d + src.0, dst.0);
        }
        for &(src, dst) in self.inst_edges() {
            dag.add_edge(src.0, dst.0);
        }
        let s: BTreeSet<usize> = cond.iter().map(|&c| self.ext_index(c)).collect();
        Ok(dag.d_separated(self.ext_index(x), self.ext_index(y), &s))
    }
}
