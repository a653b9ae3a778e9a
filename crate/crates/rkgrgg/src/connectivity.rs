//! Connected-component analysis.
//!
//! The primary path is a union-find with path halving and union by size;
//! [`components_oracle`] is an independent breadth-first search used to
//! cross-check it. Both return canonical labels: every node is labeled with
//! the smallest node index in its component, so equal partitions produce
//! identical label vectors.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::graph::IntersectionGraph;

/// Union-find over `0..n` with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grandparent = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grandparent;
            x = grandparent;
        }
        x
    }

    /// Merge the sets of `a` and `b`; false when already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn same_set(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}

fn canonical_labels_from(mut find: impl FnMut(u32) -> u32, n: usize) -> Vec<u32> {
    let mut min_of_root = vec![u32::MAX; n];
    let mut labels = vec![0u32; n];
    for i in 0..n as u32 {
        let r = find(i) as usize;
        if min_of_root[r] == u32::MAX {
            min_of_root[r] = i;
        }
        labels[i as usize] = min_of_root[r];
    }
    labels
}

/// Component labels via union-find; `labels[i]` is the smallest node index
/// in `i`'s component.
pub fn components(graph: &IntersectionGraph) -> Vec<u32> {
    let n = graph.n();
    let mut uf = UnionFind::new(n);
    for (i, j) in graph.edges() {
        uf.union(i, j);
    }
    canonical_labels_from(|x| uf.find(x), n)
}

/// Component labels via breadth-first search. Independent of [`components`];
/// the two must agree on every graph.
pub fn components_oracle(graph: &IntersectionGraph) -> Vec<u32> {
    let n = graph.n();
    let mut labels = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for start in 0..n as u32 {
        if labels[start as usize] != u32::MAX {
            continue;
        }
        labels[start as usize] = start;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in graph.neighbors(u as usize) {
                if labels[v as usize] == u32::MAX {
                    labels[v as usize] = start;
                    queue.push_back(v);
                }
            }
        }
    }
    labels
}

/// Summary of a graph's connectivity structure.
///
/// Consistency invariants: `is_connected` iff `component_count == 1` iff
/// `largest_component == n` (for nonempty graphs); `isolated_nodes >= 1`
/// iff `min_degree == 0`; an isolated node on `n >= 2` nodes forces
/// `is_connected == false`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ConnectivityReport {
    pub component_count: usize,
    pub largest_component: usize,
    pub isolated_nodes: usize,
    pub min_degree: usize,
    pub is_connected: bool,
}

/// Full connectivity summary in `O(n alpha(n) + m)`.
pub fn analyze(graph: &IntersectionGraph) -> ConnectivityReport {
    let degrees: Vec<usize> = (0..graph.n()).map(|i| graph.degree(i)).collect();
    summarize(components(graph), &degrees)
}

/// Connectivity summary for a bare edge list on `n` nodes (endpoints must
/// be `< n`); agrees with [`analyze`] on every graph's own edges.
pub fn analyze_edge_list(n: usize, edges: &[(u32, u32)]) -> ConnectivityReport {
    let mut uf = UnionFind::new(n);
    let mut degrees = vec![0usize; n];
    for &(i, j) in edges {
        uf.union(i, j);
        degrees[i as usize] += 1;
        degrees[j as usize] += 1;
    }
    summarize(canonical_labels_from(|x| uf.find(x), n), &degrees)
}

fn summarize(labels: Vec<u32>, degrees: &[usize]) -> ConnectivityReport {
    let mut sizes: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in &labels {
        *sizes.entry(l).or_insert(0) += 1;
    }
    let component_count = sizes.len();
    let largest_component = sizes.values().copied().max().unwrap_or(0);
    let isolated_nodes = degrees.iter().filter(|&&d| d == 0).count();
    let min_degree = degrees.iter().copied().min().unwrap_or(0);
    ConnectivityReport {
        component_count,
        largest_component,
        isolated_nodes,
        min_degree,
        is_connected: component_count == 1,
    }
}

/// Histogram of component sizes: `size -> number of components of that
/// size`. Sizes weighted by counts always sum to `n`.
pub fn component_size_histogram(labels: &[u32]) -> BTreeMap<usize, usize> {
    let mut sizes: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in labels {
        *sizes.entry(l).or_insert(0) += 1;
    }
    let mut histogram = BTreeMap::new();
    for size in sizes.values() {
        *histogram.entry(*size).or_insert(0) += 1;
    }
    histogram
}
