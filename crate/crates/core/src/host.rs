//! Host multigraphs and host trees.

use std::collections::{BTreeSet, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HostError {
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("host is not a tree")]
    NotATree,
}

/// A loopless multigraph; edge ids are positions in the edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Host {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Host {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, HostError> {
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(HostError::NodeOutOfRange(u.max(v)));
            }
            if u == v {
                return Err(HostError::SelfLoop(u));
            }
        }
        Ok(Self::build(n, edges))
    }

    fn build(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Host { n, edges, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Option<(usize, usize)> {
        self.edges.get(e).copied()
    }

    /// Incident (neighbor, edge id) pairs, sorted; parallel edges repeat the neighbor.
    pub fn incident(&self, x: usize) -> &[(usize, usize)] {
        &self.adj[x]
    }

    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.adj[x].iter().map(|&(y, _)| y).collect();
        out.dedup();
        out
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// Replaces edge `e` by a path through a fresh node; `e` keeps the first half.
    pub fn subdivide_edge(&self, e: usize) -> Result<(Host, usize), HostError> {
        let mut h = self.clone();
        let z = h.subdivide_in_place(e)?;
        Ok((h, z))
    }

    pub fn subdivide_in_place(&mut self, e: usize) -> Result<usize, HostError> {
        let (u, v) = self.edge(e).ok_or(HostError::UnknownEdge(e))?;
        let z = self.n;
        let mut edges = std::mem::take(&mut self.edges);
        edges[e] = (u, z);
        edges.push((z, v));
        *self = Self::build(self.n + 1, edges);
        Ok(z)
    }

    /// Adds a fresh node adjacent to `x`.
    pub fn attach_leaf(&mut self, x: usize) -> usize {
        let z = self.n;
        let mut edges = std::mem::take(&mut self.edges);
        edges.push((x, z));
        *self = Self::build(self.n + 1, edges);
        z
    }

    /// Merges the endpoints of `e` into the smaller id; drops resulting loops.
    /// Returns the contracted host and the old→new node map.
    pub fn contract_edge(&self, e: usize) -> Result<(Host, Vec<usize>), HostError> {
        let (u, v) = self.edge(e).ok_or(HostError::UnknownEdge(e))?;
        let (keep, gone) = (u.min(v), u.max(v));
        let map: Vec<usize> = (0..self.n)
            .map(|x| {
                let x = if x == gone { keep } else { x };
                if x > gone {
                    x - 1
                } else {
                    x
                }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (map[a], map[b]))
            .filter(|&(a, b)| a != b)
            .collect();
        Ok((Self::build(self.n - 1, edges), map))
    }

    /// Contracts a set of edges at once.
    pub fn contract_edges(&self, set: &[usize]) -> Host {
        let mut root: Vec<usize> = (0..self.n).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for &e in set {
            let (a, b) = self.edges[e];
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            if ra != rb {
                root[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut id = vec![usize::MAX; self.n];
        let mut next = 0;
        for x in 0..self.n {
            let r = find(&mut root, x);
            if id[r] == usize::MAX {
                id[r] = next;
                next += 1;
            }
            id[x] = id[r];
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (id[a], id[b]))
            .filter(|&(a, b)| a != b)
            .collect();
        Self::build(next, edges)
    }

    /// Suppresses degree-2 nodes whose two edges lead to distinct nodes.
    pub fn homeomorphic_reduction(&self) -> Host {
        let mut h = self.clone();
        loop {
            let found = (0..h.n).find(|&x| h.degree(x) == 2 && h.adj[x][0].0 != h.adj[x][1].0);
            let Some(x) = found else { return h };
            let (a, e1) = h.adj[x][0];
            let (b, e2) = h.adj[x][1];
            let mut edges: Vec<(usize, usize)> = h
                .edges
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != e1 && i != e2)
                .map(|(_, &ed)| ed)
                .collect();
            edges.push((a, b));
            let shift = |y: usize| if y > x { y - 1 } else { y };
            let edges = edges.into_iter().map(|(p, q)| (shift(p), shift(q))).collect();
            h = Self::build(h.n - 1, edges);
        }
    }

    fn multiplicity(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.n]; self.n];
        for &(a, b) in &self.edges {
            m[a][b] += 1;
            m[b][a] += 1;
        }
        m
    }

    /// Backtracking isomorphism test with degree refinement.
    pub fn is_isomorphic(&self, other: &Host) -> bool {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return false;
        }
        let mut da: Vec<usize> = (0..self.n).map(|x| self.degree(x)).collect();
        let mut db: Vec<usize> = (0..other.n).map(|x| other.degree(x)).collect();
        da.sort_unstable();
        db.sort_unstable();
        if da != db {
            return false;
        }
        let ma = self.multiplicity();
        let mb = other.multiplicity();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| std::cmp::Reverse(self.degree(x)));
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        fn go(
            i: usize,
            order: &[usize],
            a: &Host,
            b: &Host,
            ma: &[Vec<u8>],
            mb: &[Vec<u8>],
            map: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if i == order.len() {
                return true;
            }
            let x = order[i];
            for y in 0..b.n {
                if used[y] || a.degree(x) != b.degree(y) {
                    continue;
                }
                let ok = order[..i].iter().all(|&p| ma[x][p] == mb[y][map[p]]);
                if !ok {
                    continue;
                }
                map[x] = y;
                used[y] = true;
                if go(i + 1, order, a, b, ma, mb, map, used) {
                    return true;
                }
                used[y] = false;
            }
            map[x] = usize::MAX;
            false
        }
        go(0, &order, self, other, &ma, &mb, &mut map, &mut used)
    }
}

/// Distinct homeomorphic reductions of all contractions of a host.
pub struct ContractionFamily {
    reduced: Vec<Host>,
    tree_codes: HashSet<String>,
}

impl ContractionFamily {
    pub fn new(t: &Host) -> Self {
        let m = t.edge_count();
        assert!(m <= 20, "contraction family too large");
        let mut reduced: Vec<Host> = Vec::new();
        let mut tree_codes = HashSet::new();
        for mask in 0u32..(1u32 << m) {
            let set: Vec<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
            let r = t.contract_edges(&set).homeomorphic_reduction();
            if r.is_tree() {
                let code = tree_code(&r);
                if tree_codes.insert(code) {
                    reduced.push(r);
                }
            } else if !reduced.iter().any(|q| q.is_isomorphic(&r)) {
                reduced.push(r);
            }
        }
        ContractionFamily { reduced, tree_codes }
    }

    pub fn reductions(&self) -> &[Host] {
        &self.reduced
    }

    pub fn admits(&self, s: &Host) -> bool {
        if !s.is_connected() || s.node_count() == 0 {
            return false;
        }
        let r = s.homeomorphic_reduction();
        if r.is_tree() {
            return self.tree_codes.contains(&tree_code(&r));
        }
        self.reduced.iter().any(|q| q.is_isomorphic(&r))
    }
}

/// Whether `s` arises from `t` by contractions followed by subdivisions.
pub fn is_re_subdivision(s: &Host, t: &Host) -> bool {
    ContractionFamily::new(t).admits(s)
}

/// A simple acyclic connected host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostTree {
    host: Host,
    nbrs: Vec<Vec<usize>>,
}

impl HostTree {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, HostError> {
        Self::from_host(Host::new(n, edges.to_vec())?)
    }

    pub fn from_host(host: Host) -> Result<Self, HostError> {
        if !host.is_tree() {
            return Err(HostError::NotATree);
        }
        let nbrs = (0..host.node_count()).map(|x| host.neighbors(x)).collect();
        Ok(HostTree { host, nbrs })
    }

    pub fn k1() -> Self {
        Self::from_edges(1, &[]).unwrap()
    }

    pub fn k2() -> Self {
        Self::from_edges(2, &[(0, 1)]).unwrap()
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).unwrap()
    }

    /// K_{1,k} with center 0.
    pub fn star(k: usize) -> Self {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Self::from_edges(k + 1, &edges).unwrap()
    }

    pub fn host(&self) -> &Host {
        &self.host
    }

    pub fn node_count(&self) -> usize {
        self.host.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.host.edge_count()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        self.host.edges()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.nbrs[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.nbrs[x].len()
    }

    pub fn is_leaf(&self, x: usize) -> bool {
        self.degree(x) == 1
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&x| self.is_leaf(x)).collect()
    }

    pub fn branching(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&x| self.degree(x) >= 3).collect()
    }

    pub fn edge_id(&self, x: usize, y: usize) -> Option<usize> {
        self.host.incident(x).iter().find(|&&(z, _)| z == y).map(|&(_, e)| e)
    }

    /// Nodes on the unique x–y path, inclusive, ordered from x.
    pub fn path_between(&self, x: usize, y: usize) -> Vec<usize> {
        let parent = self.parents_from(y);
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            cur = parent[cur];
            path.push(cur);
        }
        path
    }

    /// Parent pointers of the tree rooted at `root`; the root points to itself.
    pub fn parents_from(&self, root: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.node_count()];
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.nbrs[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        parent
    }

    /// Whether `mid` lies on the path between `a` and `b`.
    pub fn between(&self, a: usize, mid: usize, b: usize) -> bool {
        self.path_between(a, b).contains(&mid)
    }

    /// Nodes adjacent to a leaf or of degree at least three.
    pub fn eyes(&self) -> BTreeSet<usize> {
        (0..self.node_count())
            .filter(|&x| self.degree(x) >= 3 || self.nbrs[x].iter().any(|&y| self.is_leaf(y)))
            .collect()
    }

    pub fn subdivide_edge(&self, e: usize) -> Result<(HostTree, usize), HostError> {
        let (h, z) = self.host.subdivide_edge(e)?;
        Ok((HostTree::from_host(h)?, z))
    }

    pub fn contract_edge(&self, e: usize) -> Result<(HostTree, Vec<usize>), HostError> {
        let (h, map) = self.host.contract_edge(e)?;
        Ok((HostTree::from_host(h)?, map))
    }

    pub fn homeomorphic_reduction(&self) -> HostTree {
        HostTree::from_host(self.host.homeomorphic_reduction()).expect("reduction of a tree is a tree")
    }

    pub fn canonical_code(&self) -> String {
        tree_code(&self.host)
    }

    pub fn is_isomorphic(&self, other: &HostTree) -> bool {
        self.canonical_code() == other.canonical_code()
    }

    /// Center nodes (one or two).
    pub fn centers(&self) -> Vec<usize> {
        let n = self.node_count();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut deg: Vec<usize> = (0..n).map(|x| self.degree(x)).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&x| deg[x] <= 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &x in &layer {
                for &y in &self.nbrs[x] {
                    if deg[y] > 0 {
                        deg[y] -= 1;
                        if deg[y] == 1 {
                            next.push(y);
                        }
                    }
                }
                deg[x] = 0;
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }
}

/// Canonical string of a node- and edge-labeled tree, invariant under relabeling ids.
/// `edge_label(p, c)` describes the edge from parent `p` to child `c`.
pub fn labeled_tree_code(
    t: &HostTree,
    node_label: &dyn Fn(usize) -> String,
    edge_label: &dyn Fn(usize, usize) -> String,
) -> String {
    fn encode(
        t: &HostTree,
        x: usize,
        parent: usize,
        nl: &dyn Fn(usize) -> String,
        el: &dyn Fn(usize, usize) -> String,
    ) -> String {
        let mut kids: Vec<String> = t
            .neighbors(x)
            .iter()
            .filter(|&&y| y != parent)
            .map(|&y| format!("{}{}", el(x, y), encode(t, y, x, nl, el)))
            .collect();
        kids.sort();
        format!("({}{})", nl(x), kids.concat())
    }
    t.centers()
        .into_iter()
        .map(|c| encode(t, c, usize::MAX, node_label, edge_label))
        .min()
        .unwrap_or_default()
}

fn tree_code(h: &Host) -> String {
    let t = HostTree::from_host(h.clone()).expect("tree");
    labeled_tree_code(&t, &|_| String::new(), &|_, _| String::new())
}

/// All unlabeled trees on `n` nodes.
pub fn all_trees(n: usize) -> Vec<HostTree> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![HostTree::k1()];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for t in &level {
            for x in 0..t.node_count() {
                let mut edges = t.edges().to_vec();
                edges.push((x, size - 1));
                let grown = HostTree::from_edges(size, &edges).unwrap();
                if seen.insert(grown.canonical_code()) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    level
}

/// Trees with exactly `leaves` leaves and no degree-2 nodes (K2 for two leaves).
pub fn reduced_trees(leaves: usize) -> Vec<HostTree> {
    match leaves {
        0 | 1 => return Vec::new(),
        2 => return vec![HostTree::k2()],
        _ => {}
    }
    let mut out = Vec::new();
    for n in leaves + 1..=2 * leaves - 2 {
        for t in all_trees(n) {
            if t.leaves().len() == leaves && (0..n).all(|x| t.degree(x) != 2) {
                out.push(t);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivide_examples() {
        let (p3, z) = HostTree::k2().subdivide_edge(0).unwrap();
        assert_eq!(z, 2);
        assert!(p3.is_isomorphic(&HostTree::path(3)));
        let theta = Host::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let (h, _) = theta.subdivide_edge(1).unwrap();
        assert_eq!((h.node_count(), h.edge_count()), (3, 3));
        let mut spider = HostTree::star(3).host().clone();
        for e in 0..3 {
            spider.subdivide_in_place(e).unwrap();
        }
        assert_eq!(spider.node_count(), 7);
        assert_eq!(HostTree::k2().subdivide_edge(3).unwrap_err(), HostError::UnknownEdge(3));
    }

    #[test]
    fn contract_examples() {
        let (t, _) = HostTree::path(3).contract_edge(1).unwrap();
        assert!(t.is_isomorphic(&HostTree::k2()));
        let d = Host::new(4, vec![(0, 1), (1, 2), (1, 2), (1, 2), (2, 3)]).unwrap();
        let (c, _) = d.contract_edge(1).unwrap();
        assert_eq!((c.node_count(), c.edge_count()), (3, 2));
        let (s, _) = HostTree::star(3).contract_edge(0).unwrap();
        assert!(s.is_isomorphic(&HostTree::star(2)));
    }

    #[test]
    fn re_subdivision_examples() {
        assert!(is_re_subdivision(HostTree::path(9).host(), HostTree::k2().host()));
        assert!(!is_re_subdivision(HostTree::star(3).host(), HostTree::k2().host()));
        assert!(is_re_subdivision(HostTree::k2().host(), HostTree::star(3).host()));
    }

    #[test]
    fn path_and_eyes() {
        let p = HostTree::path(3);
        assert_eq!(p.path_between(1, 1), vec![1]);
        assert_eq!(p.path_between(0, 2), vec![0, 1, 2]);
        assert_eq!(HostTree::k2().eyes(), BTreeSet::from([0, 1]));
        assert_eq!(HostTree::path(4).eyes(), BTreeSet::from([1, 2]));
        let spider = HostTree::from_edges(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]).unwrap();
        assert_eq!(spider.eyes(), BTreeSet::from([0, 1, 3, 5]));
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| all_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
        assert_eq!(reduced_trees(3).len(), 1);
        assert_eq!(reduced_trees(4).len(), 2);
    }
}
