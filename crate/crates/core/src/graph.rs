//! Simple undirected graphs over dense integer ids.

use fixedbitset::FixedBitSet;
use std::collections::VecDeque;

/// Sorted list of vertex ids.
pub type VertexSet = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    matrix: Vec<FixedBitSet>,
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            matrix: vec![FixedBitSet::with_capacity(n); n],
            labels: None,
        }
    }

    /// Builds a graph from an edge list; self-loops and repeated edges are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n() && v < self.n(), "vertex out of range");
        if u == v || self.matrix[u].contains(v) {
            return;
        }
        self.matrix[u].insert(v);
        self.matrix[v].insert(u);
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbor_bits(&self, v: usize) -> &FixedBitSet {
        &self.matrix[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.n());
        self.labels = Some(labels);
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || connected_components(self).len() == 1
    }
}

/// Components of `g`, each sorted, listed by smallest member.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    components_avoiding(g, &FixedBitSet::with_capacity(g.n()))
}

/// Components of `g` minus the vertices in `removed`.
pub fn components_avoiding(g: &Graph, removed: &FixedBitSet) -> Vec<VertexSet> {
    let n = g.n();
    let mut seen = removed.clone();
    seen.grow(n);
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen.contains(s) {
            continue;
        }
        seen.insert(s);
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for &w in g.neighbors(u) {
                if !seen.contains(w) {
                    seen.insert(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Vertices outside `w` adjacent to some member of `w`.
pub fn open_neighborhood(g: &Graph, w: &[usize]) -> VertexSet {
    let mut inside = FixedBitSet::with_capacity(g.n());
    for &v in w {
        inside.insert(v);
    }
    let mut hit = FixedBitSet::with_capacity(g.n());
    for &v in w {
        hit.union_with(g.neighbor_bits(v));
    }
    hit.difference_with(&inside);
    hit.ones().collect()
}

/// Subgraph induced by `keep`; the map sends old ids to new ids.
pub fn induced_subgraph(g: &Graph, keep: &[usize]) -> (Graph, Vec<Option<usize>>) {
    let mut map = vec![None; g.n()];
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for (i, &v) in sorted.iter().enumerate() {
        map[v] = Some(i);
    }
    let mut h = Graph::new(sorted.len());
    for (i, &v) in sorted.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(j) = map[w] {
                if i < j {
                    h.add_edge(i, j);
                }
            }
        }
    }
    if let Some(labels) = g.labels() {
        h.set_labels(sorted.iter().map(|&v| labels[v].clone()).collect());
    }
    (h, map)
}

pub fn bits_of(n: usize, set: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for &v in set {
        b.insert(v);
    }
    b
}
