//! Undirected-cycle-group detection on the unoriented instantaneous
//! subgraph.
//!
//! A cycle group is the edge-sharing closure of undirected cycles: a
//! fundamental cycle basis is extracted with Paton's spanning-tree method,
//! then cycles are merged transitively whenever they share at least one
//! edge. Edges left over (bridges and tree-like parts) are grouped by
//! connected component of the leftover subgraph, so the returned groups
//! always partition the unoriented edge set.

use super::{unordered, VarId};
use std::collections::BTreeSet;

pub(crate) type UEdge = (VarId, VarId);

/// A maximal set of unoriented instantaneous edges that must be oriented
/// together: either the closure of cycles sharing edges, or a cycle-free
/// connected remainder.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UndirectedCycleGroup {
    nodes: BTreeSet<VarId>,
    edges: BTreeSet<UEdge>,
}

impl UndirectedCycleGroup {
    fn from_edges(edges: BTreeSet<UEdge>) -> Self {
        let mut nodes = BTreeSet::new();
        for &(a, b) in &edges {
            nodes.insert(a);
            nodes.insert(b);
        }
        Self { nodes, edges }
    }

    pub fn nodes(&self) -> &BTreeSet<VarId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<UEdge> {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Fundamental cycles of one connected component, from a BFS spanning tree
/// rooted at the smallest node (Paton's method): every non-tree edge
/// `{u, v}` closes exactly one cycle through the tree paths to their
/// lowest common ancestor.
fn fundamental_cycles(adj: &[Vec<usize>], root: usize, seen: &mut [bool]) -> Vec<BTreeSet<UEdge>> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut order = Vec::new();
    let mut queue = std::collections::VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
    }

    let in_tree = |a: usize, b: usize| parent[a] == b || parent[b] == a;
    let mut cycles = Vec::new();
    let mut done: BTreeSet<UEdge> = BTreeSet::new();
    for &u in &order {
        for &w in &adj[u] {
            let e = unordered(VarId(u), VarId(w));
            if in_tree(u, w) || !done.insert(e) {
                continue;
            }
            // Walk both endpoints up to their common ancestor.
            let mut cycle = BTreeSet::from([e]);
            let (mut a, mut b) = (u, w);
            while depth[a] > depth[b] {
                cycle.insert(unordered(VarId(a), VarId(parent[a])));
                a = parent[a];
            }
            while depth[b] > depth[a] {
                cycle.insert(unordered(VarId(b), VarId(parent[b])));
                b = parent[b];
            }
            while a != b {
                cycle.insert(unordered(VarId(a), VarId(parent[a])));
                cycle.insert(unordered(VarId(b), VarId(parent[b])));
                a = parent[a];
                b = parent[b];
            }
            cycles.push(cycle);
        }
    }
    cycles
}

/// Merges cycle edge-sets transitively on shared edges.
fn merge_on_shared_edges(cycles: Vec<BTreeSet<UEdge>>) -> Vec<BTreeSet<UEdge>> {
    let mut groups: Vec<BTreeSet<UEdge>> = Vec::new();
    for cycle in cycles {
        let mut merged = cycle;
        let mut rest = Vec::with_capacity(groups.len());
        for g in groups {
            if g.intersection(&merged).next().is_some() {
                merged.extend(g);
            } else {
                rest.push(g);
            }
        }
        rest.push(merged);
        groups = rest;
    }
    groups
}

/// Connected components (by edge) of an undirected edge set.
fn edge_components(d: usize, edges: &BTreeSet<UEdge>) -> Vec<BTreeSet<UEdge>> {
    let mut adj = vec![Vec::new(); d];
    for &(a, b) in edges {
        adj[a.0].push(b.0);
        adj[b.0].push(a.0);
    }
    let mut seen = vec![false; d];
    let mut out = Vec::new();
    for &(a, _) in edges {
        if seen[a.0] {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![a.0];
        seen[a.0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                comp.insert(unordered(VarId(u), VarId(w)));
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Partition of the unoriented edges into undirected cycle groups.
pub(crate) fn find_groups(d: usize, edges: &BTreeSet<UEdge>) -> Vec<UndirectedCycleGroup> {
    if edges.is_empty() {
        return Vec::new();
    }
    let mut adj = vec![Vec::new(); d];
    for &(a, b) in edges {
        adj[a.0].push(b.0);
        adj[b.0].push(a.0);
    }
    for l in &mut adj {
        l.sort_unstable();
    }

    let mut seen = vec![false; d];
    let mut cycles = Vec::new();
    for root in 0..d {
        if !seen[root] && !adj[root].is_empty() {
            cycles.extend(fundamental_cycles(&adj, root, &mut seen));
        }
    }
    let mut groups = merge_on_shared_edges(cycles);

    // Whatever is in no cycle forms one group per connected component of
    // the leftover subgraph.
    let covered: BTreeSet<UEdge> = groups.iter().flatten().copied().collect();
    let leftover: BTreeSet<UEdge> = edges.difference(&covered).copied().collect();
    groups.extend(edge_components(d, &leftover));

    groups.sort_by_key(|g| g.iter().next().copied());
    groups
        .into_iter()
        .map(UndirectedCycleGroup::from_edges)
        .collect()
}
