//! Recognition of H-graphs for a fixed host tree, and proper leafage.

mod potential;
mod realize;

pub use potential::{oracle_potential, place_chain, potential, rehang, ChainPlacement};
pub use realize::{realize_template, FailureCertificate, Part, RealizeStats};

use crate::chordal::{find_induced_cycle, is_chordal, is_proper_interval};
use crate::graph::{connected_components, induced_subgraph, Graph};
use crate::host::{reduced_trees, ContractionFamily, Host, HostTree};
use crate::representation::{proper_from_compact, verify_proper, Mode, Representation};
use crate::structure::chains;
use crate::template::{enumerate_templates, Label, Template};
use std::collections::HashMap;
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("graph is not chordal; induced cycle {0:?}")]
    NotChordal(Vec<usize>),
    #[error("node is not an inner node of the chain")]
    NotOnChain,
    #[error("proper leafage exceeds the search bound {0}")]
    Unresolved(usize),
}

/// Outcome of a recognition run with search statistics.
#[derive(Clone, Debug, Default)]
pub struct Recognition {
    /// Proper representation on a re-subdivision of the host, if one exists.
    pub witness: Option<Representation>,
    /// The compact representation it came from, for connected inputs.
    pub compact: Option<Representation>,
    pub templates_tried: usize,
    pub stats: RealizeStats,
    /// Deepest failure seen over all templates.
    pub failure: Option<FailureCertificate>,
    pub cycle: Option<Vec<usize>>,
}

/// Whether `g` is a proper H-graph for a subdivision-free target `t`; returns a witness.
pub fn recognize(g: &Graph, t: &HostTree) -> Option<Representation> {
    recognize_detailed(g, t).witness
}

pub fn recognize_detailed(g: &Graph, t: &HostTree) -> Recognition {
    let n = g.n();
    if n == 0 {
        return Recognition {
            witness: Some(Representation::new(t.host().clone(), Vec::new(), Mode::Proper)),
            ..Default::default()
        };
    }
    if t.node_count() == 1 {
        let witness = (n == 1).then(|| Representation::new(t.host().clone(), vec![vec![0]], Mode::Proper));
        return Recognition {
            witness,
            ..Default::default()
        };
    }
    if !is_chordal(g).is_chordal() {
        return Recognition {
            cycle: find_induced_cycle(g),
            ..Default::default()
        };
    }
    if g.is_connected() {
        recognize_connected(g, t)
    } else {
        let witness = recognize_disconnected(g, t);
        Recognition {
            witness,
            ..Default::default()
        }
    }
}

fn recognize_connected(g: &Graph, t: &HostTree) -> Recognition {
    let mut out = Recognition::default();
    let Ok(cs) = chains(g) else { return out };
    if !cs.consistent {
        return out;
    }
    let family = ContractionFamily::new(t.host());
    let _ = enumerate_templates(t, &cs, &mut |tpl: &Template| {
        out.templates_tried += 1;
        let rbar = root_of(tpl);
        let (result, stats) = realize_template(g, &cs, tpl, &rbar);
        out.stats.candidates_tested += stats.candidates_tested;
        out.stats.fallbacks += stats.fallbacks;
        match result {
            Ok(compact) => {
                let Ok(proper) = proper_from_compact(g, &compact) else {
                    return ControlFlow::Continue(());
                };
                if verify_proper(g, &proper).is_ok() && family.admits(&proper.host) {
                    out.witness = Some(proper);
                    out.compact = Some(compact);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            }
            Err(cert) => {
                out.failure = Some(cert);
                ControlFlow::Continue(())
            }
        }
    });
    if out.witness.is_some() {
        out.failure = None;
    }
    out
}

fn root_of(tpl: &Template) -> Vec<usize> {
    let rbar = tpl.root_ordering();
    if !rbar.is_empty() {
        return rbar;
    }
    (0..tpl.labels.len())
        .find(|&x| tpl.labels[x] != Label::Leaf)
        .into_iter()
        .collect()
}

/// Connected edge subsets of `t`, as bitmasks over its edge ids.
fn subtree_masks(t: &HostTree) -> Vec<u64> {
    let m = t.edge_count();
    let mut seen = std::collections::HashSet::new();
    let mut stack: Vec<u64> = (0..m).map(|e| 1u64 << e).collect();
    while let Some(mask) = stack.pop() {
        if !seen.insert(mask) {
            continue;
        }
        let mut touched = vec![false; t.node_count()];
        for (e, &(a, b)) in t.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                touched[a] = true;
                touched[b] = true;
            }
        }
        for (e, &(a, b)) in t.edges().iter().enumerate() {
            if mask >> e & 1 == 0 && (touched[a] || touched[b]) {
                stack.push(mask | 1 << e);
            }
        }
    }
    let mut all: Vec<u64> = seen.into_iter().collect();
    all.sort_unstable_by_key(|m| (m.count_ones(), *m));
    all
}

fn subtree_of(t: &HostTree, mask: u64) -> HostTree {
    let mut index = HashMap::new();
    let mut edges = Vec::new();
    for (e, &(a, b)) in t.edges().iter().enumerate() {
        if mask >> e & 1 == 1 {
            let next = index.len();
            let a = *index.entry(a).or_insert(next);
            let next = index.len();
            let b = *index.entry(b).or_insert(next);
            edges.push((a, b));
        }
    }
    HostTree::from_edges(index.len(), &edges).expect("connected edge subset")
}

struct Piece {
    host: Host,
    models: Vec<Vec<usize>>,
    vertices: Vec<usize>,
}

impl Piece {
    fn leaves(&self) -> Vec<usize> {
        (0..self.host.node_count())
            .filter(|&x| self.host.degree(x) <= 1)
            .collect()
    }
}

fn piece_of(comp: &[usize], rep: Representation) -> Piece {
    Piece {
        host: rep.host,
        models: rep.models,
        vertices: comp.to_vec(),
    }
}

/// Joins pieces: `links[k]` connects node `a` of the union so far to node `b` of piece k + 1.
fn glue(pieces: &[&Piece], links: &[(usize, usize)], n: usize) -> Representation {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut models = vec![Vec::new(); n];
    let mut offset = 0;
    for (k, p) in pieces.iter().enumerate() {
        if k > 0 {
            let (a, b) = links[k - 1];
            edges.push((a, b + offset));
        }
        edges.extend(p.host.edges().iter().map(|&(a, b)| (a + offset, b + offset)));
        for (local, &v) in p.vertices.iter().enumerate() {
            models[v] = p.models[local].iter().map(|x| x + offset).collect();
        }
        offset += p.host.node_count();
    }
    Representation::new(Host::new(offset, edges).expect("glued host"), models, Mode::Proper)
}

/// Splices a path piece into the leaf edge at `leaf`.
fn splice(r: &Representation, leaf: usize, piece: &Piece) -> Representation {
    let base = r.host.node_count();
    let mut edges: Vec<(usize, usize)> = r.host.edges().to_vec();
    let ends: Vec<usize> = piece.leaves();
    let (first, last) = (ends[0] + base, *ends.last().unwrap() + base);
    edges.extend(piece.host.edges().iter().map(|&(a, b)| (a + base, b + base)));
    let mut models = r.models.clone();
    for (local, &v) in piece.vertices.iter().enumerate() {
        models[v] = piece.models[local].iter().map(|x| x + base).collect();
    }
    let total = base + piece.host.node_count();
    if let Some(pos) = edges.iter().position(|&(a, b)| a == leaf || b == leaf) {
        let (a, b) = edges[pos];
        let inner = if a == leaf { b } else { a };
        edges[pos] = (inner, first);
        edges.push((last, leaf));
    } else {
        edges.push((leaf, first));
    }
    Representation::new(Host::new(total, edges).expect("spliced host"), models, Mode::Proper)
}

const LINK_BUDGET: usize = 200_000;

fn recognize_disconnected(g: &Graph, t: &HostTree) -> Option<Representation> {
    let n = g.n();
    let comps = connected_components(g);
    let mut path_pieces = Vec::new();
    let mut hard = Vec::new();
    for comp in &comps {
        let (sub, _) = induced_subgraph(g, comp);
        if is_proper_interval(&sub) {
            let rep = recognize_connected(&sub, &HostTree::k2()).witness?;
            path_pieces.push(piece_of(comp, rep));
        } else {
            hard.push((comp.clone(), sub));
        }
    }
    if t.edge_count() == 0 {
        return None;
    }
    if hard.len() > t.branching().len() {
        return None;
    }
    let family = ContractionFamily::new(t.host());
    let masks = subtree_masks(t);
    let mut cache: HashMap<(usize, u64), Option<Piece>> = HashMap::new();
    let mut chosen: Vec<u64> = Vec::new();
    let mut budget = LINK_BUDGET;
    let core = assign(t, &hard, &masks, 0, &mut chosen, &mut cache, &family, n, &mut budget)?;
    let mut result = match core {
        Some(r) => r,
        None => {
            let start = Host::new(2, vec![(0, 1)]).expect("edge");
            Representation::new(start, vec![Vec::new(); n], Mode::Proper)
        }
    };
    for piece in &path_pieces {
        let leaf = (0..result.host.node_count())
            .find(|&x| result.host.degree(x) == 1)
            .expect("a leaf");
        result = splice(&result, leaf, piece);
    }
    (verify_proper(g, &result).is_ok() && family.admits(&result.host)).then_some(result)
}

#[allow(clippy::too_many_arguments)]
fn assign(
    t: &HostTree,
    hard: &[(Vec<usize>, Graph)],
    masks: &[u64],
    k: usize,
    chosen: &mut Vec<u64>,
    cache: &mut HashMap<(usize, u64), Option<Piece>>,
    family: &ContractionFamily,
    n: usize,
    budget: &mut usize,
) -> Option<Option<Representation>> {
    if k == hard.len() {
        if hard.is_empty() {
            return Some(None);
        }
        let pieces: Vec<&Piece> = (0..k).map(|i| cache[&(i, chosen[i])].as_ref().unwrap()).collect();
        return link(&pieces, &mut Vec::new(), family, n, budget).map(Some);
    }
    for &mask in masks {
        if chosen.iter().any(|&other| (other & mask).count_ones() > 1) {
            continue;
        }
        let sub = subtree_of(t, mask);
        if sub.branching().is_empty() {
            continue;
        }
        let entry = cache.entry((k, mask)).or_insert_with(|| {
            let (comp, graph) = &hard[k];
            let rep = recognize_connected(graph, &sub).witness?;
            Some(piece_of(comp, rep))
        });
        if entry.is_none() {
            continue;
        }
        chosen.push(mask);
        if let Some(found) = assign(t, hard, masks, k + 1, chosen, cache, family, n, budget) {
            return Some(found);
        }
        chosen.pop();
        if *budget == 0 {
            return None;
        }
    }
    None
}

fn link(
    pieces: &[&Piece],
    links: &mut Vec<(usize, usize)>,
    family: &ContractionFamily,
    n: usize,
    budget: &mut usize,
) -> Option<Representation> {
    let k = links.len() + 1;
    if k == pieces.len() {
        *budget = budget.saturating_sub(1);
        let r = glue(pieces, links, n);
        return family.admits(&r.host).then_some(r);
    }
    let so_far: usize = pieces[..k].iter().map(|p| p.host.node_count()).sum();
    let so_far_leaves: Vec<usize> = {
        let mut out = Vec::new();
        let mut offset = 0;
        for p in &pieces[..k] {
            out.extend(p.leaves().into_iter().map(|x| x + offset));
            offset += p.host.node_count();
        }
        out
    };
    let next = pieces[k];
    let mut options: Vec<(usize, usize)> = Vec::new();
    for b in next.leaves() {
        options.extend((0..so_far).map(|a| (a, b)));
    }
    for &a in &so_far_leaves {
        options.extend((0..next.host.node_count()).map(|b| (a, b)));
    }
    for opt in options {
        if *budget == 0 {
            return None;
        }
        links.push(opt);
        if let Some(r) = link(pieces, links, family, n, budget) {
            return Some(r);
        }
        links.pop();
    }
    None
}

/// Least number of leaves of a host tree on which `g` has a proper representation.
pub fn proper_leafage(g: &Graph) -> Result<usize, SolverError> {
    if g.n() <= 1 {
        return Ok(0);
    }
    if !is_chordal(g).is_chordal() {
        return Err(SolverError::NotChordal(find_induced_cycle(g).unwrap_or_default()));
    }
    if connected_components(g)
        .iter()
        .all(|c| is_proper_interval(&induced_subgraph(g, c).0))
    {
        return Ok(2);
    }
    let bound = crate::chordal::cliques_of(g).map(|c| c.len() + 1).unwrap_or(3).max(3);
    for leaves in 3..=bound {
        if reduced_trees(leaves).iter().any(|t| recognize(g, t).is_some()) {
            return Ok(leaves);
        }
    }
    Err(SolverError::Unresolved(bound))
}
