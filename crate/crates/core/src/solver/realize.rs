//! Bottom-up realization of a template with escape tables.

use crate::graph::Graph;
use crate::host::Host;
use crate::representation::{verify_compact, Representation};
use crate::structure::{ChainSet, CliqueId};
use crate::template::{Label, Template};
use fixedbitset::FixedBitSet;
use std::collections::HashMap;

/// A realized subtree: its escape table, model bookkeeping and the nodes built so far.
#[derive(Clone, Debug)]
pub struct Part {
    /// Clique at the subtree root; `None` for an empty leaf.
    pub root: Option<CliqueId>,
    /// Row u holds the vertices u fails to escape on the edges inside the subtree.
    pub table: Vec<FixedBitSet>,
    pub node_count: Vec<u32>,
    pub edge_count: Vec<u32>,
    pub nodes: Vec<Option<CliqueId>>,
    pub edges: Vec<(usize, usize)>,
    pub root_index: usize,
}

impl Part {
    pub fn leaf(n: usize) -> Self {
        Part {
            root: None,
            table: full_table(n),
            node_count: vec![0; n],
            edge_count: vec![0; n],
            nodes: vec![None],
            edges: Vec::new(),
            root_index: 0,
        }
    }

    pub fn node(n: usize, clique: CliqueId, members: &[usize]) -> Self {
        let mut node_count = vec![0; n];
        for &u in members {
            node_count[u] = 1;
        }
        Part {
            root: Some(clique),
            table: full_table(n),
            node_count,
            edge_count: vec![0; n],
            nodes: vec![Some(clique)],
            edges: Vec::new(),
            root_index: 0,
        }
    }

    /// Hangs `child` below this part's root through a single edge.
    pub fn attach(&mut self, child: Part, cliques: &[Vec<usize>], bits: &[FixedBitSet]) {
        let n = self.table.len();
        let empty = FixedBitSet::with_capacity(n);
        let top = self.root.map_or(&empty, |c| &bits[c]);
        let below = child.root.map_or(&empty, |c| &bits[c]);
        let mut table = child.table;
        let top_list: &[usize] = self.root.map_or(&[], |c| &cliques[c]);
        let below_list: &[usize] = child.root.map_or(&[], |c| &cliques[c]);
        for &u in below_list {
            table[u].intersect_with(top);
        }
        for &u in top_list {
            table[u].intersect_with(below);
        }
        for (row, other) in self.table.iter_mut().zip(&table) {
            row.intersect_with(other);
        }
        for u in 0..n {
            self.node_count[u] += child.node_count[u];
            self.edge_count[u] += child.edge_count[u];
        }
        for &u in top_list {
            if below.contains(u) {
                self.edge_count[u] += 1;
            }
        }
        let offset = self.nodes.len();
        self.nodes.extend(child.nodes);
        self.edges
            .extend(child.edges.into_iter().map(|(a, b)| (a + offset, b + offset)));
        self.edges.push((self.root_index, child.root_index + offset));
    }

    /// First vertex (u, v) violating the closing condition for vertices not at the root.
    pub fn closing_violation(&self, bits: &[FixedBitSet]) -> Option<(usize, usize)> {
        let n = self.table.len();
        let empty = FixedBitSet::with_capacity(n);
        let top = self.root.map_or(&empty, |c| &bits[c]);
        for u in 0..n {
            if self.node_count[u] == 0 {
                continue;
            }
            if self.node_count[u] != self.edge_count[u] + 1 {
                return Some((u, u));
            }
            if top.contains(u) {
                continue;
            }
            if let Some(v) = self.table[u].ones().find(|&v| v != u) {
                return Some((u, v));
            }
        }
        None
    }

    /// Violation when the part is the whole tree.
    pub fn final_violation(&self) -> Option<(usize, usize)> {
        for u in 0..self.table.len() {
            if self.node_count[u] != self.edge_count[u] + 1 {
                return Some((u, u));
            }
            if let Some(v) = self.table[u].ones().find(|&v| v != u) {
                return Some((u, v));
            }
        }
        None
    }

    pub fn into_representation(self, cliques: &[Vec<usize>], n: usize) -> Representation {
        let host = Host::new(self.nodes.len(), self.edges).expect("valid part");
        let sets: Vec<Vec<usize>> = self
            .nodes
            .iter()
            .map(|c| c.map_or(Vec::new(), |c| cliques[c].clone()))
            .collect();
        Representation::from_node_sets(host, &sets, n)
    }
}

fn full_table(n: usize) -> Vec<FixedBitSet> {
    let mut row = FixedBitSet::with_capacity(n);
    row.insert_range(..);
    vec![row; n]
}

/// Why a template could not be realized.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FailureCertificate {
    /// Template node where the search got stuck deepest.
    pub node: Option<usize>,
    /// A pair (u, v) where u could not escape v; (u, u) marks a disconnected model.
    pub blocked: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RealizeStats {
    pub candidates_tested: usize,
    /// Times a choice other than the last potential node had to be taken.
    pub fallbacks: usize,
}

struct Search<'a> {
    g: &'a Graph,
    cs: &'a ChainSet,
    tpl: &'a Template,
    order: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// (chain, position on its path) for every node on some chain path, one entry per chain.
    on_path: Vec<Vec<(usize, usize)>>,
    orient: Vec<bool>,
    assign: Vec<usize>,
    parts: Vec<Option<Part>>,
    deepest: (usize, FailureCertificate),
    stats: RealizeStats,
    edge_chain: HashMap<(usize, usize), usize>,
}

impl<'a> Search<'a> {
    fn n(&self) -> usize {
        self.g.n()
    }

    fn index_on(&self, chain: usize, x: usize) -> usize {
        let path = &self.tpl.paths[chain];
        let q = self.on_path[x].iter().find(|&&(c, _)| c == chain).expect("on path").1;
        if q == 0 {
            0
        } else if q + 1 == path.len() {
            self.cs.chains[chain].len() + 1
        } else {
            self.assign[x]
        }
    }

    /// Inner cliques between child `c` and parent `p`, listed from the child side.
    fn segment(&self, p: usize, c: usize) -> Option<Vec<CliqueId>> {
        let Some(&chain) = self.edge_chain.get(&(p.min(c), p.max(c))) else {
            return Some(Vec::new());
        };
        let (ip, ic) = (self.index_on(chain, p), self.index_on(chain, c));
        let inner = &self.cs.chains[chain].inner;
        let qp = self.on_path[p].iter().find(|&&(ch, _)| ch == chain).unwrap().1;
        let qc = self.on_path[c].iter().find(|&&(ch, _)| ch == chain).unwrap().1;
        if (qp > qc) != (ip > ic) || ip == ic {
            return None;
        }
        Some(if ic < ip {
            (ic + 1..ip).map(|j| inner[j - 1]).collect()
        } else {
            (ip + 1..ic).rev().map(|j| inner[j - 1]).collect()
        })
    }

    fn clique_of(&self, x: usize) -> CliqueId {
        match self.tpl.labels[x] {
            Label::Clique(c) => c,
            Label::Inner(y) => self.cs.chains[y].inner[self.assign[x] - 1],
            Label::Leaf => unreachable!("leaves carry no clique"),
        }
    }

    fn build(&self, x: usize) -> Option<Part> {
        let ctx = &self.cs.context;
        let n = self.n();
        let c = self.clique_of(x);
        let mut part = Part::node(n, c, &ctx.cliques[c]);
        for &child in &self.children[x] {
            let mut below = match self.tpl.labels[child] {
                Label::Leaf => Part::leaf(n),
                _ => self.parts[child].clone().expect("child processed"),
            };
            for s in self.segment(x, child)? {
                let mut mid = Part::node(n, s, &ctx.cliques[s]);
                mid.attach(below, &ctx.cliques, &ctx.bits);
                below = mid;
            }
            part.attach(below, &ctx.cliques, &ctx.bits);
        }
        Some(part)
    }

    fn note_failure(&mut self, depth: usize, x: usize, blocked: Option<(usize, usize)>) {
        if depth >= self.deepest.0 {
            self.deepest = (depth, FailureCertificate { node: Some(x), blocked });
        }
    }

    /// Candidate indices for an inner node, in preference order.
    fn candidates(&mut self, depth: usize, x: usize) -> Vec<(usize, Part)> {
        let Label::Inner(chain) = self.tpl.labels[x] else {
            return match self.build(x) {
                Some(part) => {
                    self.stats.candidates_tested += 1;
                    let last = depth + 1 == self.order.len();
                    let bad = if last {
                        part.final_violation()
                    } else {
                        part.closing_violation(&self.cs.context.bits)
                    };
                    match bad {
                        None => vec![(0, part)],
                        Some(b) => {
                            self.note_failure(depth, x, Some(b));
                            Vec::new()
                        }
                    }
                }
                None => Vec::new(),
            };
        };
        let path = &self.tpl.paths[chain];
        let q = self.on_path[x].iter().find(|&&(c, _)| c == chain).unwrap().1;
        let s = self.cs.chains[chain].len();
        let inner_count = path.len() - 2;
        let mut lo = q;
        let mut hi = s - (inner_count - q);
        let (below, above) = (path[q - 1], path[q + 1]);
        let low_child = self.children[x].contains(&below);
        let high_child = self.children[x].contains(&above);
        if low_child {
            lo = lo.max(self.index_on(chain, below) + 1);
        }
        if high_child {
            let top = self.index_on(chain, above);
            if top == 0 {
                return Vec::new();
            }
            hi = hi.min(top - 1);
        }
        if lo > hi {
            self.note_failure(depth, x, None);
            return Vec::new();
        }
        let upward = match (low_child, high_child) {
            (true, false) => true,
            (false, true) => false,
            _ => self.orient[chain],
        };
        let walk: Vec<usize> = if upward {
            (lo..=hi).collect()
        } else {
            (lo..=hi).rev().collect()
        };
        let mut feasible = Vec::new();
        let mut prefix_end = 0;
        let mut in_prefix = true;
        for &j in &walk {
            self.assign[x] = j;
            self.stats.candidates_tested += 1;
            let Some(part) = self.build(x) else {
                in_prefix = false;
                continue;
            };
            match part.closing_violation(&self.cs.context.bits) {
                None => {
                    feasible.push((j, part));
                    if in_prefix {
                        prefix_end = feasible.len();
                    }
                }
                Some(b) => {
                    in_prefix = false;
                    self.note_failure(depth, x, Some(b));
                }
            }
        }
        let rest = feasible.split_off(prefix_end);
        feasible.reverse();
        feasible.extend(rest);
        feasible
    }

    fn run(&mut self, depth: usize) -> Option<Part> {
        let x = self.order[depth];
        let options = self.candidates(depth, x);
        for (k, (j, part)) in options.into_iter().enumerate() {
            if k > 0 {
                self.stats.fallbacks += 1;
            }
            self.assign[x] = j;
            if depth + 1 == self.order.len() {
                return Some(part);
            }
            self.parts[x] = Some(part);
            if let Some(done) = self.run(depth + 1) {
                return Some(done);
            }
            self.parts[x] = None;
        }
        None
    }
}

/// Searches for a compact representation realizing `tpl`, rooted at `rbar[0]`.
pub fn realize_template(
    g: &Graph,
    cs: &ChainSet,
    tpl: &Template,
    rbar: &[usize],
) -> (Result<Representation, FailureCertificate>, RealizeStats) {
    let t = &tpl.tree;
    let Some(&root) = rbar.first() else {
        return (Err(FailureCertificate::default()), RealizeStats::default());
    };
    let parent = t.parents_from(root);
    let mut children = vec![Vec::new(); t.node_count()];
    for x in 0..t.node_count() {
        if x != root {
            children[parent[x]].push(x);
        }
    }
    let mut order = Vec::new();
    let mut stack = vec![(root, false)];
    while let Some((x, expanded)) = stack.pop() {
        if expanded {
            order.push(x);
            continue;
        }
        stack.push((x, true));
        for &c in children[x].iter().rev() {
            if tpl.labels[c] != Label::Leaf {
                stack.push((c, false));
            }
        }
    }
    let mut on_path = vec![Vec::new(); t.node_count()];
    let mut edge_chain = HashMap::new();
    for (chain, path) in tpl.paths.iter().enumerate() {
        for (q, &x) in path.iter().enumerate() {
            on_path[x].push((chain, q));
        }
        for w in path.windows(2) {
            edge_chain.insert((w[0].min(w[1]), w[0].max(w[1])), chain);
        }
    }
    let mut orient = Vec::new();
    for chain in 0..tpl.paths.len() {
        match tpl.orient_chain(rbar, chain) {
            Ok(o) => orient.push(o),
            Err(_) => return (Err(FailureCertificate::default()), RealizeStats::default()),
        }
    }
    let mut search = Search {
        g,
        cs,
        tpl,
        order,
        children,
        on_path,
        orient,
        assign: vec![0; t.node_count()],
        parts: vec![None; t.node_count()],
        deepest: (0, FailureCertificate::default()),
        stats: RealizeStats::default(),
        edge_chain,
    };
    let outcome = match search.run(0) {
        Some(part) => {
            let rep = part.into_representation(&cs.context.cliques, g.n());
            match verify_compact(g, &rep) {
                Ok(()) => Ok(rep),
                Err(_) => Err(FailureCertificate {
                    node: Some(root),
                    blocked: None,
                }),
            }
        }
        None => Err(search.deepest.1.clone()),
    };
    (outcome, search.stats)
}
