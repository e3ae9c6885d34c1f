//! Representations on hosts, their verifiers, and the compact/proper conversions.

use crate::chordal::cliques_of;
use crate::graph::{bits_of, components_avoiding, open_neighborhood, Graph, VertexSet};
use crate::host::{Host, HostTree};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Proper,
    Compact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub host: Host,
    /// `models[v]` is the sorted node set M_v.
    pub models: Vec<Vec<usize>>,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("expected {expected} models, found {found}")]
    ModelCount { expected: usize, found: usize },
    #[error("model of {0} names a node outside the host")]
    NodeOutOfRange(usize),
    #[error("model of {0} is empty")]
    EmptyModel(usize),
    #[error("model of {0} is disconnected")]
    Disconnected(usize),
    #[error("edge {0}-{1} has disjoint models")]
    MissingIntersection(usize, usize),
    #[error("non-edge {0}-{1} has intersecting models")]
    SpuriousIntersection(usize, usize),
    #[error("model of {0} is contained in model of {1}")]
    Containment(usize, usize),
    #[error("host is not a tree")]
    NotATree,
    #[error("(C1) leaf {0} carries vertices")]
    NonEmptyLeaf(usize),
    #[error("(C2) node {0} does not carry a maximal clique")]
    NotMaximalClique(usize),
    #[error("(C2) nodes {0} and {1} carry the same clique")]
    DuplicateClique(usize, usize),
    #[error("(C2) clique {0:?} has no node")]
    MissingClique(VertexSet),
    #[error("(C3) {0} does not escape {1}")]
    NoEscape(usize, usize),
    #[error("graph is not chordal")]
    NotChordal,
}

#[derive(Debug, Error)]
pub enum ConversionError {
    #[error("input is not a compact representation: {0}")]
    NotCompact(Violation),
    #[error("input is not a proper representation: {0}")]
    NotProper(Violation),
    #[error("conversion produced an invalid representation: {0}")]
    Internal(Violation),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("host: {0}")]
    Host(#[from] crate::host::HostError),
    #[error("models must be keyed 0..n-1")]
    ModelKeys,
}

/// Ordered host edge (x, y) witnessing an escape.
pub type EscapeWitness = (usize, usize);

impl Representation {
    pub fn new(host: Host, models: Vec<Vec<usize>>, mode: Mode) -> Self {
        let models = models
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m.dedup();
                m
            })
            .collect();
        Representation { host, models, mode }
    }

    /// Builds a compact-form representation from per-node vertex sets.
    pub fn from_node_sets(host: Host, sets: &[Vec<usize>], n: usize) -> Self {
        let mut models = vec![Vec::new(); n];
        for (x, set) in sets.iter().enumerate() {
            for &v in set {
                models[v].push(x);
            }
        }
        Representation::new(host, models, Mode::Compact)
    }

    pub fn vertex_count(&self) -> usize {
        self.models.len()
    }

    /// V_x for every node x.
    pub fn node_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.host.node_count()];
        for (v, m) in self.models.iter().enumerate() {
            for &x in m {
                sets[x].push(v);
            }
        }
        sets
    }

    fn node_bits(&self) -> Vec<FixedBitSet> {
        let n = self.vertex_count();
        let mut bits = vec![FixedBitSet::with_capacity(n); self.host.node_count()];
        for (v, m) in self.models.iter().enumerate() {
            for &x in m {
                bits[x].insert(v);
            }
        }
        bits
    }

    fn model_bits(&self) -> Vec<FixedBitSet> {
        self.models.iter().map(|m| bits_of(self.host.node_count(), m)).collect()
    }

    pub fn tree(&self) -> Option<HostTree> {
        HostTree::from_host(self.host.clone()).ok()
    }

    pub fn to_json(&self) -> String {
        let doc = RepJson {
            host: HostJson {
                nodes: self.host.node_count(),
                edges: self.host.edges().iter().map(|&(a, b)| [a, b]).collect(),
            },
            models: self.models.iter().cloned().enumerate().collect(),
            mode: self.mode,
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let doc: RepJson = serde_json::from_str(text)?;
        let host = Host::new(doc.host.nodes, doc.host.edges.iter().map(|e| (e[0], e[1])).collect())?;
        let n = doc.models.len();
        if doc.models.keys().copied().ne(0..n) {
            return Err(FormatError::ModelKeys);
        }
        Ok(Representation::new(host, doc.models.into_values().collect(), doc.mode))
    }

    /// DOT rendering; nodes are annotated with the vertices they carry.
    pub fn to_dot(&self, g: &Graph) -> String {
        let sets = self.node_sets();
        let mut out = String::from("graph representation {\n");
        for (x, set) in sets.iter().enumerate() {
            let names: Vec<String> = set.iter().map(|&v| g.label(v)).collect();
            let _ = writeln!(out, "  n{x} [label=\"{x}: {{{}}}\"];", names.join(","));
        }
        for &(a, b) in self.host.edges() {
            let _ = writeln!(out, "  n{a} -- n{b};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct HostJson {
    nodes: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    host: HostJson,
    models: BTreeMap<usize, Vec<usize>>,
    mode: Mode,
}

fn set_connected(host: &Host, set: &[usize], inside: &FixedBitSet) -> bool {
    let Some(&start) = set.first() else { return false };
    let mut seen = FixedBitSet::with_capacity(host.node_count());
    seen.insert(start);
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &(y, _) in host.incident(x) {
            if inside.contains(y) && !seen.contains(y) {
                seen.insert(y);
                count += 1;
                stack.push(y);
            }
        }
    }
    count == set.len()
}

/// Models nonempty and connected, and intersecting exactly on edges of `g`.
pub fn verify_represents(g: &Graph, r: &Representation) -> Result<(), Violation> {
    let n = g.n();
    if r.vertex_count() != n {
        return Err(Violation::ModelCount {
            expected: n,
            found: r.vertex_count(),
        });
    }
    for (v, m) in r.models.iter().enumerate() {
        if m.iter().any(|&x| x >= r.host.node_count()) {
            return Err(Violation::NodeOutOfRange(v));
        }
    }
    let bits = r.model_bits();
    for (v, m) in r.models.iter().enumerate() {
        if m.is_empty() {
            return Err(Violation::EmptyModel(v));
        }
        if !set_connected(&r.host, m, &bits[v]) {
            return Err(Violation::Disconnected(v));
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let meet = !bits[u].is_disjoint(&bits[v]);
            match (g.has_edge(u, v), meet) {
                (true, false) => return Err(Violation::MissingIntersection(u, v)),
                (false, true) => return Err(Violation::SpuriousIntersection(u, v)),
                _ => {}
            }
        }
    }
    Ok(())
}

/// verify_represents plus pairwise non-containment.
pub fn verify_proper(g: &Graph, r: &Representation) -> Result<(), Violation> {
    verify_represents(g, r)?;
    let bits = r.model_bits();
    for u in 0..g.n() {
        for v in 0..g.n() {
            if u != v && bits[u].is_subset(&bits[v]) {
                return Err(Violation::Containment(u, v));
            }
        }
    }
    Ok(())
}

pub fn escapes(r: &Representation, u: usize, v: usize) -> Option<EscapeWitness> {
    escape_search(r, u, v, false)
}

pub fn strongly_escapes(r: &Representation, u: usize, v: usize) -> Option<EscapeWitness> {
    escape_search(r, u, v, true)
}

fn escape_search(r: &Representation, u: usize, v: usize, strong: bool) -> Option<EscapeWitness> {
    let bits = r.model_bits();
    let mut found: Option<EscapeWitness> = None;
    for &(a, b) in r.host.edges() {
        for (x, y) in [(a, b), (b, a)] {
            let ok = bits[u].contains(x) && !bits[v].contains(y) && (!strong || bits[v].contains(x));
            if ok && found.map_or(true, |f| (x, y) < f) {
                found = Some((x, y));
            }
        }
    }
    found
}

/// Checks (C1), (C2) and (C3), the latter in its strong-escape form.
pub fn verify_compact(g: &Graph, r: &Representation) -> Result<(), Violation> {
    verify_represents(g, r)?;
    let tree = r.tree().ok_or(Violation::NotATree)?;
    let sets = r.node_sets();
    for x in tree.leaves() {
        if !sets[x].is_empty() && tree.node_count() > 1 {
            return Err(Violation::NonEmptyLeaf(x));
        }
    }
    let cliques = cliques_of(g).map_err(|_| Violation::NotChordal)?;
    let mut owner: HashMap<&[usize], usize> = HashMap::new();
    for x in 0..tree.node_count() {
        if tree.is_leaf(x) || tree.node_count() == 1 {
            continue;
        }
        if cliques.binary_search(&sets[x]).is_err() {
            return Err(Violation::NotMaximalClique(x));
        }
        if let Some(&y) = owner.get(sets[x].as_slice()) {
            return Err(Violation::DuplicateClique(y, x));
        }
        owner.insert(&sets[x], x);
    }
    if let Some(c) = cliques.iter().find(|c| !owner.contains_key(c.as_slice())) {
        return Err(Violation::MissingClique(c.clone()));
    }
    let n = g.n();
    let nodes = r.node_bits();
    let models = r.model_bits();
    for u in 0..n {
        // fails: vertices v that u does not escape; strong: vertices u strongly escapes.
        let mut fails = FixedBitSet::with_capacity(n);
        fails.insert_range(..);
        let mut strong = FixedBitSet::with_capacity(n);
        for &x in &r.models[u] {
            for &(y, _) in r.host.incident(x) {
                fails.intersect_with(&nodes[y]);
                let mut diff = nodes[x].clone();
                diff.difference_with(&nodes[y]);
                strong.union_with(&diff);
            }
        }
        for v in 0..n {
            if v == u {
                continue;
            }
            let ok = if models[u].is_disjoint(&models[v]) {
                !fails.contains(v)
            } else {
                strong.contains(v)
            };
            if !ok {
                return Err(Violation::NoEscape(u, v));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KComponent {
    pub vertices: VertexSet,
    pub neighborhood: VertexSet,
    pub model: Vec<usize>,
}

/// Components of G − V_y with their neighborhoods and models.
pub fn components_k(g: &Graph, r: &Representation, y: usize) -> Vec<KComponent> {
    let sets = r.node_sets();
    let removed = bits_of(g.n(), &sets[y]);
    components_avoiding(g, &removed)
        .into_iter()
        .map(|comp| {
            let neighborhood = open_neighborhood(g, &comp);
            let model: BTreeSet<usize> = comp.iter().flat_map(|&v| r.models[v].iter().copied()).collect();
            KComponent {
                vertices: comp,
                neighborhood,
                model: model.into_iter().collect(),
            }
        })
        .collect()
}

struct Workspace {
    host: Host,
    models: Vec<BTreeSet<usize>>,
}

impl Workspace {
    fn holders(&self, x: usize, y: usize, among: impl Iterator<Item = usize>) -> Vec<usize> {
        among
            .filter(|&w| self.models[w].contains(&x) && self.models[w].contains(&y))
            .collect()
    }

    fn find_edge(&self, x: usize, y: usize) -> usize {
        self.host
            .incident(x)
            .iter()
            .find(|&&(z, _)| z == y)
            .map(|&(_, e)| e)
            .expect("edge exists")
    }
}

/// Turns a compact representation into a proper one on a subdivision of its host.
pub fn proper_from_compact(g: &Graph, r: &Representation) -> Result<Representation, ConversionError> {
    verify_compact(g, r).map_err(ConversionError::NotCompact)?;
    let n = g.n();
    let mut first_with: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
    let mut twin_of = vec![None; n];
    for v in 0..n {
        match first_with.get(&r.models[v]) {
            Some(&u) => twin_of[v] = Some(u),
            None => {
                first_with.insert(&r.models[v], v);
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&v| twin_of[v].is_none()).collect();
    let mut ws = Workspace {
        host: r.host.clone(),
        models: r.models.iter().map(|m| m.iter().copied().collect()).collect(),
    };

    let mut directed = Vec::new();
    for e in 0..r.host.edge_count() {
        let (x, y) = r.host.edges()[e];
        let holders = ws.holders(x, y, kept.iter().copied());
        let z = ws.host.subdivide_in_place(e).expect("edge exists");
        for w in holders {
            ws.models[w].insert(z);
        }
        directed.push((x, z));
        directed.push((y, z));
    }

    for (x, mid) in directed {
        let side: Vec<usize> = kept
            .iter()
            .copied()
            .filter(|&w| ws.models[w].contains(&x) && !ws.models[w].contains(&mid))
            .collect();
        let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut indeg: BTreeMap<usize, usize> = side.iter().map(|&w| (w, 0)).collect();
        let mut requests = 0;
        for &u in &side {
            for &v in &side {
                if u != v && ws.models[u].is_subset(&ws.models[v]) {
                    out_edges.entry(u).or_default().push(v);
                    *indeg.get_mut(&v).unwrap() += 1;
                    requests += 1;
                }
            }
        }
        if requests == 0 {
            continue;
        }
        let mut ready: BTreeSet<usize> = indeg.iter().filter(|&(_, &d)| d == 0).map(|(&w, _)| w).collect();
        let mut order = Vec::new();
        while let Some(&u) = ready.iter().next() {
            ready.remove(&u);
            order.push(u);
            for &v in out_edges.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&v).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(v);
                }
            }
        }
        if order.len() != side.len() {
            return Err(ConversionError::Internal(Violation::Containment(side[0], side[0])));
        }
        let s = order.len() - 1;
        let through = ws.holders(x, mid, kept.iter().copied());
        let mut e = ws.find_edge(x, mid);
        let mut fresh = Vec::with_capacity(s);
        for _ in 0..s {
            let z = ws.host.subdivide_in_place(e).expect("edge exists");
            fresh.push(z);
            e = ws.find_edge(z, mid);
        }
        for (k, &u) in order.iter().enumerate() {
            let index = s - k;
            for &z in &fresh[..index] {
                ws.models[u].insert(z);
            }
        }
        for w in through {
            ws.models[w].extend(fresh.iter().copied());
        }
    }

    let mut present: Vec<usize> = kept.clone();
    for v in 0..n {
        let Some(u) = twin_of[v] else { continue };
        ws.models[v] = ws.models[u].clone();
        present.push(v);
        let mut boundary = Vec::new();
        for &x in &ws.models[u] {
            for &(y, e) in ws.host.incident(x) {
                if !ws.models[u].contains(&y) {
                    boundary.push((x, y, e));
                }
            }
        }
        boundary.sort_unstable();
        if boundary.len() < 2 {
            return Err(ConversionError::Internal(Violation::Containment(v, u)));
        }
        for (k, &(x, y, e)) in boundary[..2].iter().enumerate() {
            let holders = ws.holders(x, y, present.iter().copied());
            let z = ws.host.subdivide_in_place(e).expect("edge exists");
            for w in holders {
                ws.models[w].insert(z);
            }
            ws.models[if k == 0 { u } else { v }].insert(z);
        }
    }

    let out = Representation::new(
        ws.host,
        ws.models.into_iter().map(|m| m.into_iter().collect()).collect(),
        Mode::Proper,
    );
    verify_proper(g, &out).map_err(ConversionError::Internal)?;
    Ok(out)
}

/// Turns a proper representation on a tree into a compact one.
pub fn compact_from_proper(g: &Graph, r: &Representation) -> Result<Representation, ConversionError> {
    verify_proper(g, r).map_err(ConversionError::NotProper)?;
    let tree = r.tree().ok_or(ConversionError::NotProper(Violation::NotATree))?;
    let cliques = cliques_of(g).map_err(|_| ConversionError::NotProper(Violation::NotChordal))?;
    let mut host = r.host.clone();
    let mut models = r.models.clone();
    if tree.node_count() == 1 {
        let a = host.attach_leaf(0);
        let b = host.attach_leaf(0);
        debug_assert!(a != b);
    } else {
        for leaf in tree.leaves() {
            host.attach_leaf(leaf);
        }
    }
    loop {
        let t = HostTree::from_host(host.clone()).expect("tree");
        let rep = Representation::new(host.clone(), models.clone(), Mode::Compact);
        let sets = rep.node_sets();
        let non_leaf = |x: usize| !t.is_leaf(x);
        let mut count: HashMap<&[usize], usize> = HashMap::new();
        for x in (0..t.node_count()).filter(|&x| non_leaf(x)) {
            *count.entry(sets[x].as_slice()).or_default() += 1;
        }
        let bad = (0..t.node_count())
            .filter(|&x| non_leaf(x))
            .find(|&x| cliques.binary_search(&sets[x]).is_err() || count[sets[x].as_slice()] > 1);
        let Some(z) = bad else {
            let out = Representation::new(host, models, Mode::Compact);
            verify_compact(g, &out).map_err(ConversionError::Internal)?;
            return Ok(out);
        };
        let zset = bits_of(g.n(), &sets[z]);
        let mut dist = vec![usize::MAX; t.node_count()];
        let mut parent = vec![usize::MAX; t.node_count()];
        dist[z] = 0;
        let mut queue = VecDeque::from([z]);
        let mut target = None;
        while let Some(x) = queue.pop_front() {
            if x != z && non_leaf(x) && zset.is_subset(&bits_of(g.n(), &sets[x])) {
                target = Some(x);
                break;
            }
            for &y in t.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let target = target.ok_or(ConversionError::Internal(Violation::NotMaximalClique(z)))?;
        let toward = parent[target];
        let e = t.edge_id(toward, target).expect("adjacent");
        let (next, map) = host.contract_edge(e).expect("edge exists");
        host = next;
        for m in &mut models {
            for x in m.iter_mut() {
                *x = map[*x];
            }
            m.sort_unstable();
            m.dedup();
        }
    }
}
