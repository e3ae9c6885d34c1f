//! Templates: the topology of candidate compact representations.

use crate::host::{labeled_tree_code, ContractionFamily, HostTree};
use crate::representation::Representation;
use crate::structure::{ChainSet, CliqueId};
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("no root resolves the orientation of chain {0}")]
    InvariantBroken(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    Leaf,
    /// A not-surrounded clique.
    Clique(CliqueId),
    /// The inner set of a chain.
    Inner(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Template {
    #[serde(serialize_with = "ser_tree")]
    pub tree: HostTree,
    pub labels: Vec<Label>,
    /// Per chain, its node path running from the start terminal side to the end terminal side.
    pub paths: Vec<Vec<usize>>,
}

fn ser_tree<S: serde::Serializer>(t: &HostTree, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("tree", 2)?;
    st.serialize_field("nodes", &t.node_count())?;
    st.serialize_field("edges", t.edges())?;
    st.end()
}

/// S̄-nodes of the template sorted by their clique.
pub type RootOrdering = Vec<usize>;

impl Template {
    /// Canonical code covering the tree, the labels and the oriented chain paths.
    pub fn code(&self) -> String {
        let mut cover: BTreeMap<(usize, usize), String> = BTreeMap::new();
        for (c, path) in self.paths.iter().enumerate() {
            for w in path.windows(2) {
                cover.insert((w[0], w[1]), format!("+{c}"));
                cover.insert((w[1], w[0]), format!("-{c}"));
            }
        }
        let labels = &self.labels;
        labeled_tree_code(
            &self.tree,
            &|x| match labels[x] {
                Label::Leaf => "L".into(),
                Label::Clique(c) => format!("C{c}"),
                Label::Inner(y) => format!("I{y}"),
            },
            &|p, c| format!("[{}]", cover.get(&(p, c)).map(String::as_str).unwrap_or("")),
        )
    }

    pub fn root_ordering(&self) -> RootOrdering {
        let mut nodes: Vec<(CliqueId, usize)> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(x, l)| match l {
                Label::Clique(c) => Some((*c, x)),
                _ => None,
            })
            .collect();
        nodes.sort_unstable();
        nodes.into_iter().map(|(_, x)| x).collect()
    }

    /// True when the chain points toward its end terminal.
    pub fn orient_chain(&self, rbar: &[usize], chain: usize) -> Result<bool, TemplateError> {
        let path = &self.paths[chain];
        let (a, b) = (path[0], *path.last().unwrap());
        for &r in rbar {
            if self.tree.between(a, b, r) {
                return Ok(true);
            }
            if self.tree.between(r, a, b) {
                return Ok(false);
            }
        }
        Err(TemplateError::InvariantBroken(chain))
    }
}

/// Whether the template node labeled `label` may stand for a member of `terminal`.
pub fn fits(cs: &ChainSet, label: Label, terminal: &[CliqueId]) -> bool {
    match label {
        Label::Leaf => false,
        Label::Clique(c) => terminal.contains(&c),
        Label::Inner(y) => cs.chains[y].inner.iter().all(|c| terminal.contains(c)),
    }
}

struct Enumerator<'a> {
    cs: &'a ChainSet,
    seen: HashSet<String>,
}

impl<'a> Enumerator<'a> {
    fn overlaps(&self, a: Label, b: Label) -> bool {
        let ctx = &self.cs.context;
        let members = |l: Label| -> Vec<CliqueId> {
            match l {
                Label::Leaf => Vec::new(),
                Label::Clique(c) => vec![c],
                Label::Inner(y) => self.cs.chains[y].inner.clone(),
            }
        };
        let (ma, mb) = (members(a), members(b));
        ma.iter().any(|&x| mb.iter().any(|&y| ctx.overlap[x][y] > 0))
    }

    fn chain_may_cover(&self, a: Label, b: Label) -> bool {
        self.cs.chains.iter().enumerate().any(|(id, ch)| {
            let part = |l: Label| l == Label::Inner(id) || fits(self.cs, l, &ch.start) || fits(self.cs, l, &ch.end);
            part(a) && part(b)
        })
    }

    /// Necessary condition for two labels to be adjacent in a template.
    fn compatible(&self, a: Label, b: Label) -> bool {
        match (a, b) {
            (Label::Leaf, Label::Leaf) => false,
            (Label::Leaf, _) | (_, Label::Leaf) => true,
            _ => self.overlaps(a, b) || self.chain_may_cover(a, b),
        }
    }

    fn run(&mut self, t: &HostTree, visit: &mut dyn FnMut(&Template) -> ControlFlow<()>) -> ControlFlow<()> {
        let cs = self.cs;
        let ctx = &cs.context;
        if !cs.consistent || ctx.is_empty() {
            return ControlFlow::Continue(());
        }
        let e = t.edge_count();
        if cs.not_surrounded.len() > e * e + 1 {
            return ControlFlow::Continue(());
        }
        let family = ContractionFamily::new(t.host());
        let mut shapes: Vec<HostTree> = family
            .reductions()
            .iter()
            .filter(|h| h.node_count() >= 2)
            .map(|h| HostTree::from_host(h.clone()).expect("tree"))
            .collect();
        shapes.sort_by_key(|s| (s.node_count(), s.canonical_code()));
        for shape in &shapes {
            let branching = shape.branching();
            let mut labels = vec![Label::Leaf; shape.node_count()];
            self.label_branching(shape, &branching, 0, &mut labels, visit)?;
        }
        ControlFlow::Continue(())
    }

    fn label_branching(
        &mut self,
        shape: &HostTree,
        branching: &[usize],
        i: usize,
        labels: &mut Vec<Label>,
        visit: &mut dyn FnMut(&Template) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == branching.len() {
            let used: HashSet<CliqueId> = labels
                .iter()
                .filter_map(|l| if let Label::Clique(c) = l { Some(*c) } else { None })
                .collect();
            let remaining: Vec<CliqueId> = self
                .cs
                .not_surrounded
                .iter()
                .copied()
                .filter(|c| !used.contains(c))
                .collect();
            let edges = shape.edges().to_vec();
            let mut seqs = vec![Vec::new(); edges.len()];
            let mut avail = vec![true; remaining.len()];
            return self.place(shape, labels, &edges, 0, &remaining, &mut avail, &mut seqs, visit);
        }
        let x = branching[i];
        let mut options: Vec<Label> = self.cs.not_surrounded.iter().map(|&c| Label::Clique(c)).collect();
        options.extend((0..self.cs.chains.len()).map(Label::Inner));
        for opt in options {
            let taken = labels.iter().filter(|&&l| l == opt).count();
            let cap = match opt {
                Label::Clique(_) => 1,
                Label::Inner(y) => self.cs.chains[y].len(),
                Label::Leaf => 0,
            };
            if taken >= cap {
                continue;
            }
            labels[x] = opt;
            self.label_branching(shape, branching, i + 1, labels, visit)?;
            labels[x] = Label::Leaf;
        }
        ControlFlow::Continue(())
    }

    #[allow(clippy::too_many_arguments)]
    fn place(
        &mut self,
        shape: &HostTree,
        labels: &[Label],
        edges: &[(usize, usize)],
        i: usize,
        remaining: &[CliqueId],
        avail: &mut Vec<bool>,
        seqs: &mut Vec<Vec<CliqueId>>,
        visit: &mut dyn FnMut(&Template) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == edges.len() {
            if avail.iter().any(|&a| a) {
                return ControlFlow::Continue(());
            }
            return self.assemble(labels, edges, seqs, visit);
        }
        let (a, b) = edges[i];
        let prev = match seqs[i].last() {
            Some(&c) => Label::Clique(c),
            None => labels[a],
        };
        if self.compatible(prev, labels[b]) {
            self.place(shape, labels, edges, i + 1, remaining, avail, seqs, visit)?;
        }
        for k in 0..remaining.len() {
            if !avail[k] || !self.compatible(prev, Label::Clique(remaining[k])) {
                continue;
            }
            avail[k] = false;
            seqs[i].push(remaining[k]);
            self.place(shape, labels, edges, i, remaining, avail, seqs, visit)?;
            seqs[i].pop();
            avail[k] = true;
        }
        ControlFlow::Continue(())
    }

    fn assemble(
        &mut self,
        labels: &[Label],
        edges: &[(usize, usize)],
        seqs: &[Vec<CliqueId>],
        visit: &mut dyn FnMut(&Template) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut all_labels = labels.to_vec();
        let mut tree_edges = Vec::new();
        for (&(a, b), seq) in edges.iter().zip(seqs) {
            let mut prev = a;
            for &c in seq {
                let x = all_labels.len();
                all_labels.push(Label::Clique(c));
                tree_edges.push((prev, x));
                prev = x;
            }
            tree_edges.push((prev, b));
        }
        let tree = HostTree::from_edges(all_labels.len(), &tree_edges).expect("tree");
        let mut tpl = Template {
            tree,
            labels: all_labels,
            paths: vec![Vec::new(); self.cs.chains.len()],
        };
        let options: Vec<Vec<Vec<usize>>> = (0..self.cs.chains.len()).map(|y| self.path_options(&tpl, y)).collect();
        if options.iter().any(Vec::is_empty) {
            return ControlFlow::Continue(());
        }
        let mut used = HashSet::new();
        self.choose_paths(&mut tpl, &options, 0, &mut used, visit)
    }

    fn path_options(&self, tpl: &Template, y: usize) -> Vec<Vec<usize>> {
        let ch = &self.cs.chains[y];
        let t = &tpl.tree;
        let inner_nodes: Vec<usize> = (0..t.node_count())
            .filter(|&x| tpl.labels[x] == Label::Inner(y))
            .collect();
        let is_end = |x: usize| tpl.labels[x] != Label::Leaf && tpl.labels[x] != Label::Inner(y);
        let mut bodies: Vec<Vec<usize>> = Vec::new();
        if inner_nodes.is_empty() {
            for &(a, b) in t.edges() {
                bodies.push(vec![a, b]);
            }
        } else {
            let Some(order) = path_order(t, &inner_nodes) else {
                return Vec::new();
            };
            let (first, last) = (order[0], *order.last().unwrap());
            for &p in t.neighbors(first) {
                for &q in t.neighbors(last) {
                    if order.contains(&p) || order.contains(&q) || p == q {
                        continue;
                    }
                    let mut path = vec![p];
                    path.extend(&order);
                    path.push(q);
                    bodies.push(path);
                }
            }
        }
        let mut out = Vec::new();
        for body in bodies {
            let (p, q) = (body[0], *body.last().unwrap());
            if !is_end(p) || !is_end(q) {
                continue;
            }
            if fits(self.cs, tpl.labels[p], &ch.start) && fits(self.cs, tpl.labels[q], &ch.end) {
                out.push(body.clone());
            }
            if fits(self.cs, tpl.labels[q], &ch.start) && fits(self.cs, tpl.labels[p], &ch.end) {
                out.push(body.iter().rev().copied().collect());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn choose_paths(
        &mut self,
        tpl: &mut Template,
        options: &[Vec<Vec<usize>>],
        y: usize,
        used: &mut HashSet<(usize, usize)>,
        visit: &mut dyn FnMut(&Template) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if y == options.len() {
            let t = &tpl.tree;
            for &(a, b) in t.edges() {
                if used.contains(&(a.min(b), a.max(b))) {
                    continue;
                }
                let (la, lb) = (tpl.labels[a], tpl.labels[b]);
                if la != Label::Leaf && lb != Label::Leaf && !self.overlaps(la, lb) {
                    return ControlFlow::Continue(());
                }
            }
            if self.seen.insert(tpl.code()) {
                return visit(tpl);
            }
            return ControlFlow::Continue(());
        }
        for path in &options[y] {
            let keys: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
            if keys.iter().any(|k| used.contains(k)) {
                continue;
            }
            used.extend(keys.iter().copied());
            tpl.paths[y] = path.clone();
            self.choose_paths(tpl, options, y + 1, used, visit)?;
            for k in &keys {
                used.remove(k);
            }
        }
        tpl.paths[y].clear();
        ControlFlow::Continue(())
    }
}

/// Orders `nodes` along a path if they induce one.
fn path_order(t: &HostTree, nodes: &[usize]) -> Option<Vec<usize>> {
    let inside = |x: usize| nodes.contains(&x);
    let deg = |x: usize| t.neighbors(x).iter().filter(|&&y| inside(y)).count();
    if nodes.iter().any(|&x| deg(x) > 2) {
        return None;
    }
    let start = *nodes.iter().find(|&&x| deg(x) <= 1)?;
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(&next) = t.neighbors(cur).iter().find(|&&y| inside(y) && y != prev) {
        prev = cur;
        cur = next;
        order.push(cur);
    }
    (order.len() == nodes.len()).then_some(order)
}

/// Streams distinct templates of `cs` over re-subdivisions of `t`.
pub fn enumerate_templates(
    t: &HostTree,
    cs: &ChainSet,
    visit: &mut dyn FnMut(&Template) -> ControlFlow<()>,
) -> ControlFlow<()> {
    Enumerator {
        cs,
        seen: HashSet::new(),
    }
    .run(t, visit)
}

pub fn collect_templates(t: &HostTree, cs: &ChainSet) -> Vec<Template> {
    let mut out = Vec::new();
    let _ = enumerate_templates(t, cs, &mut |tpl| {
        out.push(tpl.clone());
        ControlFlow::Continue(())
    });
    out
}

/// The template a compact representation realizes, by contracting surrounded degree-2 nodes.
pub fn template_of(r: &Representation, cs: &ChainSet) -> Option<Template> {
    let tree = r.tree()?;
    let sets = r.node_sets();
    let ctx = &cs.context;
    let mut label = vec![Label::Leaf; tree.node_count()];
    let mut node_of = vec![usize::MAX; ctx.len()];
    for x in 0..tree.node_count() {
        if tree.is_leaf(x) {
            continue;
        }
        let c = ctx.cliques.binary_search(&sets[x]).ok()?;
        node_of[c] = x;
        label[x] = match cs.inner_index[c] {
            Some(y) => Label::Inner(y),
            None => Label::Clique(c),
        };
    }
    let mut full_paths = Vec::new();
    for ch in &cs.chains {
        let nodes: Vec<usize> = ch.inner.iter().map(|&c| node_of[c]).collect();
        if nodes.iter().any(|&x| x == usize::MAX) || nodes.windows(2).any(|w| !tree.neighbors(w[0]).contains(&w[1])) {
            return None;
        }
        let (first, last) = (nodes[0], *nodes.last().unwrap());
        let clique_at = |z: usize| ctx.cliques.binary_search(&sets[z]).ok();
        let flank = |x: usize, term: &[CliqueId], avoid: usize| {
            tree.neighbors(x).iter().copied().find(|&z| {
                z != avoid
                    && !nodes.contains(&z)
                    && !tree.is_leaf(z)
                    && clique_at(z).map_or(false, |c| term.contains(&c))
            })
        };
        let before = flank(first, &ch.start, usize::MAX)?;
        let after = flank(last, &ch.end, before)?;
        let mut path = vec![before];
        path.extend(&nodes);
        path.push(after);
        full_paths.push(path);
    }
    let drop: Vec<bool> = (0..tree.node_count())
        .map(|x| matches!(label[x], Label::Inner(_)) && tree.degree(x) == 2)
        .collect();
    let mut new_id = vec![usize::MAX; tree.node_count()];
    let mut labels = Vec::new();
    for x in 0..tree.node_count() {
        if !drop[x] {
            new_id[x] = labels.len();
            labels.push(label[x]);
        }
    }
    let mut edges = Vec::new();
    for x in 0..tree.node_count() {
        if drop[x] {
            continue;
        }
        for &y in tree.neighbors(x) {
            let (mut prev, mut cur) = (x, y);
            while drop[cur] {
                let next = *tree.neighbors(cur).iter().find(|&&z| z != prev)?;
                prev = cur;
                cur = next;
            }
            if x < cur {
                edges.push((new_id[x], new_id[cur]));
            }
        }
    }
    let t0 = HostTree::from_edges(labels.len(), &edges).ok()?;
    let paths = full_paths
        .into_iter()
        .map(|p| p.into_iter().filter(|&x| !drop[x]).map(|x| new_id[x]).collect())
        .collect();
    Some(Template {
        tree: t0,
        labels,
        paths,
    })
}

/// Whether `r` subdivides the template with matching labels and chain paths.
pub fn realizes(r: &Representation, cs: &ChainSet, tpl: &Template) -> bool {
    template_of(r, cs).map_or(false, |own| own.code() == tpl.code())
}
