//! Rehanging and the potential of a surrounded branching node.

use super::SolverError;
use crate::graph::bits_of;
use crate::host::Host;
use crate::representation::{escapes, Representation};
use crate::structure::{Chain, ChainSet, CliqueId};
use fixedbitset::FixedBitSet;

/// Host nodes of a chain walked in a fixed direction, `nodes[k]` carrying y_k for 1 ≤ k ≤ s.
#[derive(Clone, Debug)]
pub struct ChainPlacement {
    pub chain: Chain,
    pub nodes: Vec<usize>,
}

fn node_of(sets: &[Vec<usize>], clique: &[usize]) -> Option<usize> {
    sets.iter().position(|s| s.as_slice() == clique)
}

/// Locates the chain in `r`; `upward` walks it from its start terminal.
pub fn place_chain(
    r: &Representation,
    cs: &ChainSet,
    chain: usize,
    upward: bool,
) -> Result<ChainPlacement, SolverError> {
    let base = cs.chains.get(chain).ok_or(SolverError::NotOnChain)?;
    let ch = if upward { base.clone() } else { base.reversed() };
    let sets = r.node_sets();
    let mut nodes = vec![usize::MAX];
    for &c in &ch.inner {
        nodes.push(node_of(&sets, &cs.context.cliques[c]).ok_or(SolverError::NotOnChain)?);
    }
    let first = nodes[1];
    let lower = r
        .host
        .neighbors(first)
        .into_iter()
        .filter(|&w| member(cs, &ch.start, &sets[w]))
        .min()
        .ok_or(SolverError::NotOnChain)?;
    nodes[0] = lower;
    Ok(ChainPlacement { chain: ch, nodes })
}

fn member(cs: &ChainSet, terminal: &[CliqueId], set: &[usize]) -> bool {
    terminal.iter().any(|&c| cs.context.cliques[c].as_slice() == set)
}

/// Y_{k} as a set of cliques, including the terminals at k = 0 and k = s + 1.
fn y_set(ch: &Chain, k: usize) -> Vec<CliqueId> {
    if k == 0 {
        ch.start.clone()
    } else if k == ch.len() + 1 {
        ch.end.clone()
    } else {
        vec![ch.inner[k - 1]]
    }
}

/// Neighbors of y_i that get moved to y_j.
fn movable(r: &Representation, cs: &ChainSet, pl: &ChainPlacement, i: usize) -> Vec<usize> {
    let sets = r.node_sets();
    let (prev, next) = (y_set(&pl.chain, i - 1), y_set(&pl.chain, i + 1));
    r.host
        .neighbors(pl.nodes[i])
        .into_iter()
        .filter(|&z| !member(cs, &prev, &sets[z]) && !member(cs, &next, &sets[z]))
        .collect()
}

/// R[y_i, y_j]: every edge from y_i to a node outside Y_{i-1} ∪ Y_{i+1} is moved to y_j.
pub fn rehang(
    r: &Representation,
    cs: &ChainSet,
    pl: &ChainPlacement,
    i: usize,
    j: usize,
) -> Result<Representation, SolverError> {
    let s = pl.chain.len();
    if i == 0 || j == 0 || i > s || j > s {
        return Err(SolverError::NotOnChain);
    }
    let (yi, yj) = (pl.nodes[i], pl.nodes[j]);
    let moved = movable(r, cs, pl, i);
    let edges = r
        .host
        .edges()
        .iter()
        .map(|&(a, b)| {
            if a == yi && moved.contains(&b) {
                (yj, b)
            } else if b == yi && moved.contains(&a) {
                (a, yj)
            } else {
                (a, b)
            }
        })
        .collect();
    let host = Host::new(r.host.node_count(), edges).map_err(|_| SolverError::NotOnChain)?;
    Ok(Representation::new(host, r.models.clone(), r.mode))
}

fn descendants(host: &Host, root: usize, top: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; host.node_count()];
    parent[root] = root;
    let mut order = vec![root];
    let mut k = 0;
    while k < order.len() {
        let x = order[k];
        k += 1;
        for y in host.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                order.push(y);
            }
        }
    }
    order
        .into_iter()
        .filter(|&x| {
            let mut z = x;
            loop {
                if z == top {
                    return true;
                }
                if parent[z] == z {
                    return false;
                }
                z = parent[z];
            }
        })
        .collect()
}

/// Φ(y_i) by one walk up the chain with escape tables; returns the indices j.
pub fn potential(r: &Representation, cs: &ChainSet, pl: &ChainPlacement, i: usize, root: usize) -> Vec<usize> {
    let n = r.vertex_count();
    let s = pl.chain.len();
    let sets = r.node_sets();
    let bits: Vec<FixedBitSet> = sets.iter().map(|v| bits_of(n, v)).collect();
    let moved = movable(r, cs, pl, i);
    let mut fail = {
        let mut row = FixedBitSet::with_capacity(n);
        row.insert_range(..);
        vec![row; n]
    };
    let mut count = vec![0usize; n];
    let add = |fail: &mut Vec<FixedBitSet>, count: &mut Vec<usize>, x: usize, nbrs: &[usize]| {
        for &u in &sets[x] {
            count[u] += 1;
            for &w in nbrs {
                fail[u].intersect_with(&bits[w]);
            }
        }
    };
    for x in descendants(&r.host, root, pl.nodes[0]) {
        add(&mut fail, &mut count, x, &r.host.neighbors(x));
    }
    for k in 1..i {
        add(&mut fail, &mut count, pl.nodes[k], &r.host.neighbors(pl.nodes[k]));
    }
    let mut out = Vec::new();
    for j in i..=s {
        if j > i {
            let x = pl.nodes[j - 1];
            let nbrs: Vec<usize> = r
                .host
                .neighbors(x)
                .into_iter()
                .filter(|w| j - 1 != i || !moved.contains(w))
                .collect();
            add(&mut fail, &mut count, x, &nbrs);
        }
        let ok = (0..n).all(|u| count[u] < r.models[u].len() || fail[u].ones().all(|v| v == u));
        if !ok {
            break;
        }
        out.push(j);
    }
    out
}

/// Φ(y_i) straight from the definition: builds every R[y_i, y_j] and checks escapes.
pub fn oracle_potential(
    r: &Representation,
    cs: &ChainSet,
    pl: &ChainPlacement,
    i: usize,
    root: usize,
) -> Result<Vec<usize>, SolverError> {
    let n = r.vertex_count();
    let mut out = Vec::new();
    for j in i..=pl.chain.len() {
        let rj = rehang(r, cs, pl, i, j)?;
        let mut region = descendants(&rj.host, root, pl.nodes[0]);
        region.extend(&pl.nodes[..j]);
        let inside = bits_of(rj.host.node_count(), &region);
        let ok = (0..n)
            .filter(|&u| rj.models[u].iter().all(|&x| inside.contains(x)))
            .all(|u| (0..n).all(|v| v == u || escapes(&rj, u, v).is_some()));
        if ok {
            out.push(j);
        }
    }
    Ok(out)
}
