//! The multigraph 𝔇, the poset gadget, interval-dimension certificates, and the
//! two directions between certificates and proper 𝔇-representations.

use crate::graph::Graph;
use crate::host::{ContractionFamily, Host};
use crate::representation::{verify_proper, Mode, Representation};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HardnessError {
    #[error("interval orders do not match the poset's elements")]
    DomainMismatch,
    #[error("the interval orders do not certify the poset")]
    InvalidCertificate,
    #[error("not a representation of a gadget graph on a subdivision of 𝔇: {0}")]
    NotAGadgetRepresentation(String),
    #[error("sat solver: {0}")]
    Solver(String),
}

/// A poset whose elements are all minimal or maximal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightOnePoset {
    pub mins: Vec<String>,
    pub maxs: Vec<String>,
    /// Pairs (i, j): the i-th minimal element lies below the j-th maximal one.
    pub relation: Vec<(usize, usize)>,
}

impl HeightOnePoset {
    pub fn new(mins: Vec<String>, maxs: Vec<String>, mut relation: Vec<(usize, usize)>) -> Self {
        relation.sort_unstable();
        relation.dedup();
        assert!(
            relation.iter().all(|&(i, j)| i < mins.len() && j < maxs.len()),
            "relation out of range"
        );
        HeightOnePoset { mins, maxs, relation }
    }

    /// Poset with generated names `p0.. ` and `q0..`.
    pub fn unnamed(mins: usize, maxs: usize, relation: Vec<(usize, usize)>) -> Self {
        Self::new(
            (0..mins).map(|i| format!("p{i}")).collect(),
            (0..maxs).map(|j| format!("q{j}")).collect(),
            relation,
        )
    }

    /// Elements are numbered minimal ones first.
    pub fn len(&self) -> usize {
        self.mins.len() + self.maxs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self, x: usize) -> &str {
        if x < self.mins.len() {
            &self.mins[x]
        } else {
            &self.maxs[x - self.mins.len()]
        }
    }

    pub fn less(&self, x: usize, y: usize) -> bool {
        let k = self.mins.len();
        x < k && y >= k && self.relation.binary_search(&(x, y - k)).is_ok()
    }
}

/// Closed integer intervals, one per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalOrder {
    pub intervals: Vec<(i64, i64)>,
}

impl IntervalOrder {
    pub fn less(&self, x: usize, y: usize) -> bool {
        self.intervals[x].1 < self.intervals[y].0
    }

    pub fn relation(&self) -> Vec<Vec<bool>> {
        let m = self.intervals.len();
        (0..m).map(|x| (0..m).map(|y| self.less(x, y)).collect()).collect()
    }
}

pub fn is_strict_order(rel: &[Vec<bool>]) -> bool {
    let m = rel.len();
    for x in 0..m {
        if rel[x][x] {
            return false;
        }
        for y in 0..m {
            if rel[x][y] && (rel[y][x] || (0..m).any(|z| rel[y][z] && !rel[x][z])) {
                return false;
            }
        }
    }
    true
}

/// Order whose predecessor sets are linearly ordered by inclusion.
pub fn is_interval_order(rel: &[Vec<bool>]) -> bool {
    if !is_strict_order(rel) {
        return false;
    }
    let m = rel.len();
    let preds: Vec<BTreeSet<usize>> = (0..m).map(|y| (0..m).filter(|&x| rel[x][y]).collect()).collect();
    preds
        .iter()
        .all(|a| preds.iter().all(|b| a.is_subset(b) || b.is_subset(a)))
}

/// No four elements a < b, c < d with the two pairs incomparable across.
pub fn is_two_plus_two_free(rel: &[Vec<bool>]) -> bool {
    let m = rel.len();
    for a in 0..m {
        for b in 0..m {
            if !rel[a][b] {
                continue;
            }
            for c in 0..m {
                for d in 0..m {
                    if !rel[c][d] || [a, b].contains(&c) || [a, b].contains(&d) {
                        continue;
                    }
                    let cross = |x: usize, y: usize| rel[x][y] || rel[y][x];
                    if !cross(a, c) && !cross(a, d) && !cross(b, c) && !cross(b, d) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub const NODE_A: usize = 0;
pub const NODE_B: usize = 1;
pub const NODE_C: usize = 2;
pub const NODE_D: usize = 3;

/// 𝔇: nodes a, b, c, d with edges ab, three parallel bc, and cd.
pub fn graph_d() -> Host {
    Host::new(
        4,
        vec![
            (NODE_A, NODE_B),
            (NODE_B, NODE_C),
            (NODE_B, NODE_C),
            (NODE_B, NODE_C),
            (NODE_C, NODE_D),
        ],
    )
    .expect("fixed multigraph")
}

pub const U_MIN: &str = "u_min";
pub const V_MIN: &str = "v_min";
pub const U_MAX: &str = "u_max";
pub const V_MAX: &str = "v_max";

/// Incomparability graph of `p` plus u_min, v_min, u_max, v_max, in that vertex order after the elements.
pub fn gadget_graph(p: &HeightOnePoset) -> Graph {
    let m = p.len();
    let k = p.mins.len();
    let mut g = Graph::new(m + 4);
    for x in 0..m {
        for y in x + 1..m {
            if !p.less(x, y) && !p.less(y, x) {
                g.add_edge(x, y);
            }
        }
    }
    let (umin, vmin, umax, vmax) = (m, m + 1, m + 2, m + 3);
    g.add_edge(umin, vmin);
    g.add_edge(umax, vmax);
    for x in 0..k {
        g.add_edge(vmin, x);
    }
    for y in k..m {
        g.add_edge(vmax, y);
    }
    let mut labels: Vec<String> = (0..m).map(|x| p.name(x).to_string()).collect();
    labels.extend([U_MIN, V_MIN, U_MAX, V_MAX].map(String::from));
    g.set_labels(labels);
    g
}

pub fn check_certificate(p: &HeightOnePoset, orders: &[IntervalOrder]) -> Result<bool, HardnessError> {
    let m = p.len();
    if orders.len() != 3
        || orders
            .iter()
            .any(|o| o.intervals.len() != m || o.intervals.iter().any(|&(l, r)| l > r))
    {
        return Err(HardnessError::DomainMismatch);
    }
    for x in 0..m {
        for y in 0..m {
            if x != y && p.less(x, y) != orders.iter().all(|o| o.less(x, y)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Linear extension of strict containment among `models`, ties by index.
fn containment_extension(models: &[BTreeSet<usize>]) -> Vec<usize> {
    let k = models.len();
    let below = |a: usize, b: usize| models[a].len() < models[b].len() && models[a].is_subset(&models[b]);
    let mut indeg: Vec<usize> = (0..k).map(|b| (0..k).filter(|&a| below(a, b)).count()).collect();
    let mut done = vec![false; k];
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let next = (0..k)
            .find(|&x| !done[x] && indeg[x] == 0)
            .expect("containment is acyclic");
        done[next] = true;
        out.push(next);
        for b in 0..k {
            if below(next, b) {
                indeg[b] -= 1;
            }
        }
    }
    out
}

/// Proper representation of the gadget graph on a subdivision of 𝔇 built from a certificate.
pub fn d_representation_from_certificate(
    p: &HeightOnePoset,
    orders: &[IntervalOrder],
) -> Result<Representation, HardnessError> {
    if !check_certificate(p, orders)? {
        return Err(HardnessError::InvalidCertificate);
    }
    let m = p.len();
    let k = p.mins.len();
    let spread = 2 * m as i64 + 2;
    let lowest = orders
        .iter()
        .flat_map(|o| o.intervals.iter().map(|iv| iv.0))
        .min()
        .unwrap_or(0);
    let highest = orders
        .iter()
        .flat_map(|o| o.intervals.iter().map(|iv| iv.1))
        .max()
        .unwrap_or(0);
    let span = (highest - lowest + 1) * spread;
    let len = span as usize + 1;

    let mut nodes = 4;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut models: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m + 4];
    let (umin, vmin, umax, vmax) = (m, m + 1, m + 2, m + 3);
    for (j, order) in orders.iter().enumerate() {
        let base = nodes;
        nodes += len;
        edges.push((NODE_B, base));
        for i in 0..len - 1 {
            edges.push((base + i, base + i + 1));
        }
        edges.push((base + len - 1, NODE_C));
        let _ = j;
        for x in 0..m {
            let (l, r) = order.intervals[x];
            let offset = (x % (m.max(1))) as i64;
            if x < k {
                let reach = (r - lowest) * spread + m as i64 + 1 + offset;
                models[x].extend((0..reach as usize).map(|i| base + i));
            } else {
                let from = (l - lowest) * spread + m as i64 + 1 - offset;
                models[x].extend((from as usize - 1..len).map(|i| base + i));
            }
        }
    }
    for x in 0..k {
        models[x].insert(NODE_B);
    }
    for y in k..m {
        models[y].insert(NODE_C);
    }
    models[vmin].insert(NODE_B);
    models[vmax].insert(NODE_C);

    for (side, leaf, hub, holders, u) in [
        (0, NODE_A, NODE_B, (0..k).chain([vmin]).collect::<Vec<_>>(), umin),
        (1, NODE_D, NODE_C, (k..m).chain([vmax]).collect::<Vec<_>>(), umax),
    ] {
        let _ = side;
        let order = {
            let ms: Vec<BTreeSet<usize>> = holders.iter().map(|&v| models[v].clone()).collect();
            containment_extension(&ms)
        };
        let l = holders.len();
        let stair: Vec<usize> = (0..l).map(|i| nodes + i).collect();
        nodes += l;
        edges.push((leaf, stair[0]));
        for w in stair.windows(2) {
            edges.push((w[0], w[1]));
        }
        edges.push((stair[l - 1], hub));
        for (pos, &h) in order.iter().enumerate() {
            models[holders[h]].extend(stair[pos..].iter().copied());
        }
        models[u] = [leaf, stair[0]].into_iter().collect();
    }
    let host = Host::new(nodes, edges).expect("subdivided 𝔇");
    let rep = Representation::new(
        host,
        models.into_iter().map(|s| s.into_iter().collect()).collect(),
        Mode::Proper,
    );
    let g = gadget_graph(p);
    verify_proper(&g, &rep).map_err(|_| HardnessError::InvalidCertificate)?;
    Ok(rep)
}

fn role(g: &Graph, name: &str) -> Result<usize, HardnessError> {
    (0..g.n())
        .find(|&v| g.label(v) == name)
        .ok_or_else(|| HardnessError::NotAGadgetRepresentation(format!("no vertex labeled {name}")))
}

fn host_adjacency(host: &Host) -> Vec<Vec<(usize, usize)>> {
    (0..host.node_count()).map(|x| host.incident(x).to_vec()).collect()
}

/// Three interval orders read off a proper representation of a gadget graph on a subdivision of 𝔇.
pub fn interval_orders_from_representation(g: &Graph, r: &Representation) -> Result<[IntervalOrder; 3], HardnessError> {
    let bad = |s: &str| HardnessError::NotAGadgetRepresentation(s.to_string());
    if !ContractionFamily::new(&graph_d()).admits(&r.host) {
        return Err(bad("host is not a re-subdivision of 𝔇"));
    }
    verify_proper(g, r).map_err(|e| bad(&e.to_string()))?;
    let (umin, vmin, umax, vmax) = (role(g, U_MIN)?, role(g, V_MIN)?, role(g, U_MAX)?, role(g, V_MAX)?);
    let elements: Vec<usize> = (0..g.n()).filter(|v| ![umin, vmin, umax, vmax].contains(v)).collect();
    if elements != (0..elements.len()).collect::<Vec<_>>() {
        return Err(bad("element vertices must come first"));
    }
    let mins: BTreeSet<usize> = g.neighbors(vmin).iter().copied().filter(|&v| v != umin).collect();

    let mut nodes = r.host.node_count();
    let mut edges: Vec<(usize, usize)> = r.host.edges().to_vec();
    let mut models: Vec<BTreeSet<usize>> = r.models.iter().map(|m| m.iter().copied().collect()).collect();
    let mut anchors = Vec::new();
    for (u, v) in [(umin, vmin), (umax, vmax)] {
        let pos = edges
            .iter()
            .position(|&(a, b)| {
                let inx = |z: usize| models[u].contains(&z) && models[v].contains(&z);
                let only = |z: usize| models[u].contains(&z) && !models[v].contains(&z);
                (inx(a) && only(b)) || (inx(b) && only(a))
            })
            .ok_or_else(|| bad("u and v models do not touch"))?;
        let (a, b) = edges[pos];
        let (x, y) = if models[v].contains(&a) { (a, b) } else { (b, a) };
        let (xs, ys) = (nodes, nodes + 1);
        nodes += 2;
        edges[pos] = (x, xs);
        edges.push((xs, ys));
        edges.push((ys, y));
        for model in models.iter_mut() {
            if model.contains(&x) && model.contains(&y) {
                model.insert(xs);
                model.insert(ys);
            }
        }
        models[v].insert(xs);
        models[u] = [xs, ys].into_iter().collect();
        edges.retain(|&e| e != (ys, y));
        anchors.push((xs, ys));
    }
    let host = Host::new(nodes, edges).map_err(|e| bad(&e.to_string()))?;
    let adj = host_adjacency(&host);
    let ((xmin, ymin), (xmax, ymax)) = (anchors[0], anchors[1]);
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut stack = vec![(xmin, vec![xmin], HashSet::from([usize::MAX]))];
    while let Some((at, path, used)) = stack.pop() {
        if paths.len() > 64 {
            return Err(bad("too many paths between the anchors"));
        }
        if at == xmax {
            paths.push(path);
            continue;
        }
        for &(y, e) in &adj[at] {
            if used.contains(&e) || path.contains(&y) || y == ymin || y == ymax {
                continue;
            }
            let mut p2 = path.clone();
            p2.push(y);
            let mut u2 = used.clone();
            u2.insert(e);
            stack.push((y, p2, u2));
        }
    }
    paths.sort();
    paths.dedup();
    if paths.is_empty() {
        return Err(bad("no path joins the anchors; the gadget graph is disconnected"));
    }
    if paths.len() > 3 {
        return Err(bad("expected one to three anchor paths"));
    }
    while paths.len() < 3 {
        paths.push(paths[0].clone());
    }
    let low: BTreeSet<usize> = models[vmin].iter().copied().filter(|&z| z != ymin).collect();
    let high: BTreeSet<usize> = models[vmax].iter().copied().filter(|&z| z != ymax).collect();
    let mut orders = Vec::new();
    for path in &paths {
        let index: HashMap<usize, usize> = path.iter().enumerate().map(|(i, &z)| (z, i)).collect();
        let last = path.len() as i64 - 1;
        let intervals = elements
            .iter()
            .map(|&x| {
                if mins.contains(&x) {
                    let end = models[x]
                        .iter()
                        .chain(&low)
                        .filter_map(|z| index.get(z))
                        .max()
                        .copied()
                        .unwrap_or(0);
                    (0, end as i64)
                } else {
                    let start = models[x]
                        .iter()
                        .chain(&high)
                        .filter_map(|z| index.get(z))
                        .min()
                        .copied()
                        .unwrap_or(path.len() - 1);
                    (start as i64, last)
                }
            })
            .collect();
        orders.push(IntervalOrder { intervals });
    }
    Ok(orders.try_into().expect("three orders"))
}

/// All interval orders on `m` elements, each with one integer representation.
fn all_interval_orders(m: usize) -> &'static [(u64, IntervalOrder)] {
    static CACHE: [OnceLock<Vec<(u64, IntervalOrder)>>; 7] = [const { OnceLock::new() }; 7];
    CACHE[m].get_or_init(|| {
        let choices: Vec<(i64, i64)> = (0..m.max(1) as i64)
            .flat_map(|l| (l..m.max(1) as i64).map(move |r| (l, r)))
            .collect();
        let mut seen: HashMap<u64, IntervalOrder> = HashMap::new();
        let mut cur: Vec<(i64, i64)> = Vec::with_capacity(m);
        fn go(m: usize, choices: &[(i64, i64)], cur: &mut Vec<(i64, i64)>, seen: &mut HashMap<u64, IntervalOrder>) {
            if cur.len() == m {
                let o = IntervalOrder { intervals: cur.clone() };
                let mut mask = 0u64;
                for x in 0..m {
                    for y in 0..m {
                        if o.less(x, y) {
                            mask |= 1 << (x * m + y);
                        }
                    }
                }
                seen.entry(mask).or_insert(o);
                return;
            }
            for &c in choices {
                cur.push(c);
                go(m, choices, cur, seen);
                cur.pop();
            }
        }
        go(m, &choices, &mut cur, &mut seen);
        let mut all: Vec<(u64, IntervalOrder)> = seen.into_iter().collect();
        all.sort_by_key(|(mask, _)| *mask);
        all
    })
}

/// Exhaustive search for three interval orders whose intersection is `p` (|P| ≤ 6).
pub fn find_certificate(p: &HeightOnePoset) -> Option<[IntervalOrder; 3]> {
    let m = p.len();
    assert!(m <= 6, "exhaustive certificate search is limited to six elements");
    let mut need = 0u64;
    let mut order_mask = 0u64;
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            if p.less(x, y) {
                order_mask |= 1 << (x * m + y);
            } else {
                need |= 1 << (x * m + y);
            }
        }
    }
    let mut options: Vec<(u64, &IntervalOrder)> = all_interval_orders(m)
        .iter()
        .filter(|(mask, _)| mask & order_mask == order_mask)
        .map(|(mask, o)| (need & !mask, o))
        .collect();
    options.sort_by_key(|(cover, _)| std::cmp::Reverse(cover.count_ones()));
    let covers: Vec<u64> = options.iter().map(|o| o.0).collect();
    let keep: Vec<usize> = (0..options.len())
        .filter(|&i| {
            !(0..options.len()).any(|j| j != i && covers[i] & !covers[j] == 0 && (covers[i] != covers[j] || j < i))
        })
        .collect();
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate().skip(a) {
            let rest = need & !(covers[i] | covers[j]);
            for &l in &keep[b..] {
                if rest & !covers[l] == 0 {
                    return Some([options[i].1.clone(), options[j].1.clone(), options[l].1.clone()]);
                }
            }
        }
    }
    if need == 0 {
        let o = options.first()?.1.clone();
        return Some([o.clone(), o.clone(), o]);
    }
    None
}

/// Height-one posets on at most `max_elements` elements, one per isomorphism class.
pub fn height_one_posets(max_elements: usize) -> Vec<HeightOnePoset> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for total in 1..=max_elements {
        for k in 0..=total {
            let l = total - k;
            let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..l).map(move |j| (i, j))).collect();
            for mask in 0u64..(1 << pairs.len()) {
                let rel: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                let key = bipartite_key(k, l, &rel);
                if seen.insert(key) {
                    out.push(HeightOnePoset::unnamed(k, l, rel));
                }
            }
        }
    }
    out
}

/// Relation under the best row and column permutation, as a comparable key.
fn bipartite_key(k: usize, l: usize, rel: &[(usize, usize)]) -> (usize, usize, Vec<u64>) {
    let mut best: Option<Vec<u64>> = None;
    let mut rows: Vec<usize> = (0..k).collect();
    permutations(&mut rows, 0, &mut |rows| {
        let mut cols: Vec<u64> = (0..l)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .fold(0u64, |acc, (pos, &i)| acc | (rel.contains(&(i, j)) as u64) << pos)
            })
            .collect();
        cols.sort_unstable();
        if best.as_ref().map_or(true, |b| cols < *b) {
            best = Some(cols);
        }
    });
    (k, l, best.unwrap_or_default())
}

fn permutations(items: &mut Vec<usize>, i: usize, visit: &mut dyn FnMut(&[usize])) {
    if i == items.len() {
        visit(items);
        return;
    }
    for j in i..items.len() {
        items.swap(i, j);
        permutations(items, i + 1, visit);
        items.swap(i, j);
    }
}

/// Decides whether `g` has a proper representation on a subdivision of 𝔇 with
/// `interior` nodes on every edge, by a SAT encoding; returns the representation.
pub fn sat_d_representation(g: &Graph, interior: usize) -> Result<Option<Representation>, HardnessError> {
    let n = g.n();
    let paths: [(usize, usize); 5] = [
        (NODE_B, NODE_A),
        (NODE_B, NODE_C),
        (NODE_B, NODE_C),
        (NODE_B, NODE_C),
        (NODE_C, NODE_D),
    ];
    let mut edges = Vec::new();
    let mut node_paths: Vec<Vec<usize>> = Vec::new();
    let mut nodes = 4;
    for &(s, t) in &paths {
        let mut seq = vec![s];
        for _ in 0..interior {
            seq.push(nodes);
            nodes += 1;
        }
        seq.push(t);
        for w in seq.windows(2) {
            edges.push((w[0], w[1]));
        }
        node_paths.push(seq);
    }
    let host = Host::new(nodes, edges).expect("subdivided 𝔇");
    let mut enc = Encoder::default();
    let x: Vec<Vec<i32>> = (0..n).map(|_| (0..nodes).map(|_| enc.var()).collect()).collect();
    for v in 0..n {
        enc.clause(x[v].clone());
        let mut full = Vec::new();
        let mut lone = Vec::new();
        for (pi, seq) in node_paths.iter().enumerate() {
            let pendant = pi == 0 || pi == 4;
            let len = seq.len();
            let lits: Vec<i32> = seq.iter().map(|&z| x[v][z]).collect();
            let pre: Vec<i32> = enc.running_and(&lits);
            let rev: Vec<i32> = lits.iter().rev().copied().collect();
            let suf: Vec<i32> = {
                let mut s = enc.running_and(&rev);
                s.reverse();
                s
            };
            full.push(pre[len - 1]);
            let iso = enc.var();
            lone.push(iso);
            let inner_end = if pendant { len } else { len - 1 };
            for i in 1..inner_end {
                let mut c = vec![-lits[i], pre[i], iso];
                if !pendant {
                    c.push(suf[i]);
                }
                enc.clause(c);
            }
            for (z, lit) in x[v].iter().enumerate() {
                if !seq[1..inner_end].contains(&z) {
                    enc.clause(vec![-iso, -lit]);
                }
            }
            for i in 1..inner_end {
                for k in i + 2..inner_end {
                    enc.clause(vec![-iso, -lits[i], lits[i + 1], -lits[k]]);
                }
            }
        }
        let parallel: Vec<i32> = full[1..4].to_vec();
        let mut c = vec![-x[v][NODE_B], -x[v][NODE_C]];
        c.extend(parallel);
        enc.clause(c);
    }
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) {
                let mut c = Vec::new();
                for z in 0..nodes {
                    let w = enc.var();
                    enc.clause(vec![-w, x[u][z]]);
                    enc.clause(vec![-w, x[v][z]]);
                    c.push(w);
                }
                enc.clause(c);
            } else {
                for z in 0..nodes {
                    enc.clause(vec![-x[u][z], -x[v][z]]);
                }
            }
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let mut c = Vec::new();
            for z in 0..nodes {
                let w = enc.var();
                enc.clause(vec![-w, x[u][z]]);
                enc.clause(vec![-w, -x[v][z]]);
                c.push(w);
            }
            enc.clause(c);
        }
    }
    let Some(model) = enc.solve()? else { return Ok(None) };
    let models: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..nodes).filter(|&z| model.contains(&x[v][z])).collect())
        .collect();
    Ok(Some(Representation::new(host, models, Mode::Proper)))
}

/// Interior length that suffices on every edge for a graph with `n` vertices.
pub fn sat_interior_bound(n: usize) -> usize {
    (2 * n).max(1)
}

/// Whether `g` is a proper 𝔇-graph, decided by the SAT encoding.
pub fn is_proper_d_graph(g: &Graph) -> Result<Option<Representation>, HardnessError> {
    sat_d_representation(g, sat_interior_bound(g.n()))
}

#[derive(Default)]
struct Encoder {
    vars: i32,
    clauses: Vec<Vec<i32>>,
}

impl Encoder {
    fn var(&mut self) -> i32 {
        self.vars += 1;
        self.vars
    }

    fn clause(&mut self, c: Vec<i32>) {
        self.clauses.push(c);
    }

    /// a_i ⇔ l_0 ∧ … ∧ l_i.
    fn running_and(&mut self, lits: &[i32]) -> Vec<i32> {
        let mut out = Vec::with_capacity(lits.len());
        for (i, &l) in lits.iter().enumerate() {
            let a = self.var();
            self.clause(vec![-a, l]);
            if i == 0 {
                self.clause(vec![a, -l]);
            } else {
                let prev = out[i - 1];
                self.clause(vec![-a, prev]);
                self.clause(vec![a, -l, -prev]);
            }
            out.push(a);
        }
        out
    }

    fn solve(self) -> Result<Option<HashSet<i32>>, HardnessError> {
        use splr::Certificate;
        match Certificate::try_from(self.clauses) {
            Ok(Certificate::SAT(ans)) => Ok(Some(ans.into_iter().filter(|&l| l > 0).collect())),
            Ok(Certificate::UNSAT) => Ok(None),
            Err(e) => Err(HardnessError::Solver(format!("{e:?}"))),
        }
    }
}

/// Breadth-first distances in a host, for tests and diagnostics.
pub fn host_distances(host: &Host, from: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; host.node_count()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for y in host.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> HeightOnePoset {
        HeightOnePoset::new(
            vec!["p".into(), "q".into()],
            vec!["r".into(), "s".into()],
            vec![(0, 0), (0, 1), (1, 1)],
        )
    }

    #[test]
    fn d_shape() {
        let d = graph_d();
        assert_eq!((d.node_count(), d.edge_count()), (4, 5));
        assert_eq!((0..4).map(|x| d.degree(x)).collect::<Vec<_>>(), vec![1, 4, 4, 1]);
    }

    #[test]
    fn gadget_of_example() {
        let g = gadget_graph(&example());
        assert_eq!(g.n(), 8);
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2) && !g.has_edge(0, 3) && !g.has_edge(1, 3));
        let vmin = 5;
        let mut nb = g.neighbors(vmin).to_vec();
        nb.sort_unstable();
        assert_eq!(nb, vec![0, 1, 4]);
    }

    #[test]
    fn certificate_round_trip() {
        let p = example();
        let cert = find_certificate(&p).expect("dimension at most three");
        assert!(check_certificate(&p, &cert).unwrap());
        let rep = d_representation_from_certificate(&p, &cert).unwrap();
        let g = gadget_graph(&p);
        let back = interval_orders_from_representation(&g, &rep).unwrap();
        assert!(check_certificate(&p, &back).unwrap());
    }

    #[test]
    fn interval_order_checks_agree() {
        let o = IntervalOrder {
            intervals: vec![(0, 1), (2, 3), (1, 2), (3, 3)],
        };
        let rel = o.relation();
        assert!(is_interval_order(&rel) && is_two_plus_two_free(&rel));
        let mut two_two = vec![vec![false; 4]; 4];
        two_two[0][1] = true;
        two_two[2][3] = true;
        assert!(!is_interval_order(&two_two) && !is_two_plus_two_free(&two_two));
    }

    #[test]
    fn sat_agrees_on_example() {
        let g = gadget_graph(&example());
        let rep = is_proper_d_graph(&g).unwrap().expect("representable");
        verify_proper(&g, &rep).unwrap();
    }

    #[test]
    fn stars_run_out_of_exits() {
        // A connected subtree of a subdivided 𝔇 has at most six boundary edges.
        let star = |k: usize| Graph::from_edges(k + 1, &(1..=k).map(|i| (0, i)).collect::<Vec<_>>());
        let rep = sat_d_representation(&star(6), 3).unwrap().expect("six exits suffice");
        verify_proper(&star(6), &rep).unwrap();
        assert!(sat_d_representation(&star(7), 1).unwrap().is_none());
    }

    #[test]
    fn built_representations_extract_on_disconnected_gadgets() {
        let p = HeightOnePoset::unnamed(1, 1, vec![(0, 0)]);
        let g = gadget_graph(&p);
        assert!(!g.is_connected());
        let orders = find_certificate(&p).unwrap();
        let built = d_representation_from_certificate(&p, &orders).unwrap();
        assert_eq!(
            check_certificate(&p, &interval_orders_from_representation(&g, &built).unwrap()),
            Ok(true)
        );
    }
}
