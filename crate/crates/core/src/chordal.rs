//! Chordality, maximal cliques and clique trees.

use crate::graph::{bits_of, connected_components, Graph, VertexSet};
use crate::host::HostTree;
use fixedbitset::FixedBitSet;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChordalError {
    #[error("graph is not chordal (induced cycle {0:?})")]
    NotChordal(Vec<usize>),
    #[error("graph is not connected")]
    NotConnected,
    #[error("ordering is not a perfect elimination ordering at vertex {0}")]
    InvalidPeo(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chordality {
    /// Maximum cardinality search order; its reverse eliminates perfectly.
    Chordal(Vec<usize>),
    /// An induced cycle of length at least four, in cyclic order.
    Cycle(Vec<usize>),
}

impl Chordality {
    pub fn peo(&self) -> Option<Vec<usize>> {
        match self {
            Chordality::Chordal(order) => Some(order.iter().rev().copied().collect()),
            Chordality::Cycle(_) => None,
        }
    }

    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal(_))
    }
}

/// Maximum cardinality search, lowest id first among equal weights.
pub fn mcs_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if !done[v] && best.map_or(true, |b| weight[v] > weight[b]) {
                best = Some(v);
            }
        }
        let v = best.expect("unvisited vertex");
        done[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !done[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Returns the first vertex whose later neighbors do not form a clique.
pub fn peo_violation(g: &Graph, peo: &[usize]) -> Option<usize> {
    let n = g.n();
    if peo.len() != n {
        return Some(0);
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in peo.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Some(v.min(n.saturating_sub(1)));
        }
        pos[v] = i;
    }
    for &v in peo {
        let later: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        let Some(&parent) = later.iter().min_by_key(|&&w| pos[w]) else {
            continue;
        };
        if later.iter().any(|&w| w != parent && !g.has_edge(w, parent)) {
            return Some(v);
        }
    }
    None
}

pub fn is_chordal(g: &Graph) -> Chordality {
    let order = mcs_order(g);
    let peo: Vec<usize> = order.iter().rev().copied().collect();
    if peo_violation(g, &peo).is_none() {
        Chordality::Chordal(order)
    } else {
        Chordality::Cycle(find_induced_cycle(g).expect("non-chordal graph has a long induced cycle"))
    }
}

/// Searches for an induced cycle of length at least four.
pub fn find_induced_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    for v in 0..n {
        let nb = g.neighbors(v);
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                if g.has_edge(x, y) {
                    continue;
                }
                let mut blocked = bits_of(n, nb);
                blocked.insert(v);
                blocked.set(x, false);
                blocked.set(y, false);
                if let Some(path) = shortest_path_avoiding(g, x, y, &blocked) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

fn shortest_path_avoiding(g: &Graph, s: usize, t: usize, blocked: &FixedBitSet) -> Option<Vec<usize>> {
    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = blocked.clone();
    seen.insert(s);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            let mut path = vec![t];
            let mut cur = t;
            while cur != s {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in g.neighbors(u) {
            if !seen.contains(w) {
                seen.insert(w);
                prev[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

/// All maximal cliques of a chordal graph, sorted lexicographically.
pub fn maximal_cliques(g: &Graph, peo: &[usize]) -> Result<Vec<VertexSet>, ChordalError> {
    if let Some(v) = peo_violation(g, peo) {
        return Err(ChordalError::InvalidPeo(v));
    }
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    let mut candidates: Vec<FixedBitSet> = peo
        .iter()
        .map(|&v| {
            let mut c = FixedBitSet::with_capacity(n);
            c.insert(v);
            for &w in g.neighbors(v) {
                if pos[w] > pos[v] {
                    c.insert(w);
                }
            }
            c
        })
        .collect();
    candidates.sort_by_key(|c| std::cmp::Reverse(c.count_ones(..)));
    let mut kept: Vec<FixedBitSet> = Vec::new();
    for c in candidates {
        if !kept.iter().any(|k| c.is_subset(k)) {
            kept.push(c);
        }
    }
    let mut out: Vec<VertexSet> = kept.iter().map(|c| c.ones().collect()).collect();
    out.sort();
    Ok(out)
}

/// Convenience: maximal cliques of a chordal graph via its own MCS order.
pub fn cliques_of(g: &Graph) -> Result<Vec<VertexSet>, ChordalError> {
    match is_chordal(g) {
        Chordality::Chordal(order) => {
            let peo: Vec<usize> = order.into_iter().rev().collect();
            maximal_cliques(g, &peo)
        }
        Chordality::Cycle(c) => Err(ChordalError::NotChordal(c)),
    }
}

#[derive(Clone, Debug)]
pub struct CliqueTree {
    pub tree: HostTree,
    /// `cliques[x]` labels tree node `x`.
    pub cliques: Vec<VertexSet>,
}

/// Maximum-weight spanning tree of the clique intersection graph.
pub fn clique_tree(g: &Graph) -> Result<CliqueTree, ChordalError> {
    if connected_components(g).len() > 1 {
        return Err(ChordalError::NotConnected);
    }
    let cliques = cliques_of(g)?;
    let k = cliques.len();
    let bits: Vec<FixedBitSet> = cliques.iter().map(|c| bits_of(g.n(), c)).collect();
    let mut candidates = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let w = bits[i].intersection(&bits[j]).count();
            if w > 0 {
                candidates.push((std::cmp::Reverse(w), i, j));
            }
        }
    }
    candidates.sort();
    let mut root: Vec<usize> = (0..k).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut edges = Vec::new();
    for (_, i, j) in candidates {
        let (a, b) = (find(&mut root, i), find(&mut root, j));
        if a != b {
            root[a] = b;
            edges.push((i, j));
        }
    }
    let tree = HostTree::from_edges(k.max(1), &edges).expect("spanning tree of a connected clique graph");
    Ok(CliqueTree { tree, cliques })
}

/// Claw-freeness: no vertex has three pairwise non-adjacent neighbors.
pub fn is_claw_free(g: &Graph) -> bool {
    (0..g.n()).all(|v| {
        let nb = g.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                if g.has_edge(a, b) {
                    continue;
                }
                if nb[j + 1..].iter().any(|&c| !g.has_edge(a, c) && !g.has_edge(b, c)) {
                    return false;
                }
            }
        }
        true
    })
}

/// Proper interval recognition through the main pipeline on the host K2.
pub fn is_proper_interval(g: &Graph) -> bool {
    if !is_chordal(g).is_chordal() || !is_claw_free(g) {
        return false;
    }
    crate::solver::recognize(g, &HostTree::k2()).is_some()
}
