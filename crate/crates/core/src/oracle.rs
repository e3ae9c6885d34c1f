//! Brute-force ground truth and instance generators.

use crate::graph::{bits_of, Graph, VertexSet};
use crate::host::{ContractionFamily, Host, HostTree};
use crate::representation::{verify_compact, verify_proper, Mode, Representation};
use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashSet};
use std::ops::ControlFlow;
use thiserror::Error;

pub const DEFAULT_BUDGET: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space needs {needed} host nodes, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("input graph must be connected and chordal")]
    BadInput,
    #[error("no instance found after {0} attempts")]
    GenerationFailed(usize),
}

/// Maximal cliques by Bron–Kerbosch with pivoting, each sorted, the list sorted.
pub fn bron_kerbosch(g: &Graph) -> Vec<VertexSet> {
    fn go(g: &Graph, r: &mut Vec<usize>, p: FixedBitSet, x: FixedBitSet, out: &mut Vec<VertexSet>) {
        if p.is_clear() && x.is_clear() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| g.neighbor_bits(u).intersection(&p).count())
            .unwrap();
        let candidates: Vec<usize> = p.difference(g.neighbor_bits(pivot)).collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            let nb = g.neighbor_bits(v);
            let mut p2 = p.clone();
            p2.intersect_with(nb);
            let mut x2 = x.clone();
            x2.intersect_with(nb);
            r.push(v);
            go(g, r, p2, x2, out);
            r.pop();
            p.set(v, false);
            x.insert(v);
        }
    }
    let n = g.n();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    go(g, &mut Vec::new(), all, FixedBitSet::with_capacity(n), &mut out);
    out.sort();
    out
}

/// Induced cycle of length ≥ 4 by trying every vertex subset.
pub fn brute_induced_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.n();
    assert!(n <= 16, "exhaustive search is for small graphs");
    for mask in 0u32..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if verts.len() < 4 {
            continue;
        }
        let deg2 = verts
            .iter()
            .all(|&v| verts.iter().filter(|&&w| g.has_edge(v, w)).count() == 2);
        if !deg2 {
            continue;
        }
        let mut cycle = vec![verts[0]];
        let mut prev = usize::MAX;
        loop {
            let cur = *cycle.last().unwrap();
            let next = verts
                .iter()
                .copied()
                .find(|&w| g.has_edge(cur, w) && w != prev && w != cur);
            let Some(next) = next else { break };
            if next == verts[0] {
                break;
            }
            prev = cur;
            cycle.push(next);
        }
        if cycle.len() == verts.len() {
            return Some(cycle);
        }
    }
    None
}

fn components_without(g: &Graph, removed: &FixedBitSet) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = removed.clone();
    let mut out = Vec::new();
    for s in 0..n {
        if seen.contains(s) {
            continue;
        }
        seen.insert(s);
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for &w in g.neighbors(v) {
                if !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Conditions (1), (2A), (2B) and the subset form of (3), evaluated literally.
pub fn oracle_surrounding(g: &Graph, cliques: &[VertexSet], l: usize, y: usize, r: usize) -> bool {
    let n = g.n();
    let vy: BTreeSet<usize> = cliques[y].iter().copied().collect();
    let comps = components_without(g, &bits_of(n, &cliques[y]));
    let comp_of = |c: usize| -> Option<usize> {
        let v = cliques[c].iter().find(|v| !vy.contains(v))?;
        comps.iter().position(|comp| comp.contains(v))
    };
    let nbhd = |comp: &[usize]| -> BTreeSet<usize> {
        let inside: BTreeSet<usize> = comp.iter().copied().collect();
        comp.iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|w| !inside.contains(w))
            .collect()
    };
    let pair_ok = |a: usize, b: usize| -> bool {
        if a == b {
            return false;
        }
        let (na, nb) = (nbhd(&comps[a]), nbhd(&comps[b]));
        let union: BTreeSet<usize> = na.union(&nb).copied().collect();
        let meet: BTreeSet<usize> = na.intersection(&nb).copied().collect();
        if comps.len() == 2 {
            union == vy || meet.is_empty()
        } else {
            union == vy
                && (0..comps.len())
                    .filter(|&c| c != a && c != b)
                    .all(|c| nbhd(&comps[c]).is_subset(&meet))
        }
    };
    if l == y || r == y {
        return false;
    }
    let (Some(a), Some(b)) = (comp_of(l), comp_of(r)) else {
        return false;
    };
    if !pair_ok(a, b) {
        return false;
    }
    let meet_y = |c: usize| -> BTreeSet<usize> { cliques[c].iter().copied().filter(|v| vy.contains(v)).collect() };
    let (ml, mr) = (meet_y(l), meet_y(r));
    for l2 in 0..cliques.len() {
        for r2 in 0..cliques.len() {
            if l2 == y || r2 == y || comp_of(l2) != Some(a) || comp_of(r2) != Some(b) {
                continue;
            }
            if !meet_y(l2).is_subset(&ml) || !meet_y(r2).is_subset(&mr) {
                return false;
            }
        }
    }
    true
}

/// Every ordered pair (ℓ, r) forming a surrounding triple around y.
pub fn oracle_guards(g: &Graph, cliques: &[VertexSet], y: usize) -> Vec<(usize, usize)> {
    let k = cliques.len();
    let mut out = Vec::new();
    for l in 0..k {
        for r in 0..k {
            if oracle_surrounding(g, cliques, l, y, r) {
                out.push((l, r));
            }
        }
    }
    out
}

fn spanning_trees(
    k: usize,
    edges: &[(usize, usize)],
    visit: &mut dyn FnMut(&[(usize, usize)]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    fn go(
        k: usize,
        edges: &[(usize, usize)],
        i: usize,
        chosen: &mut Vec<(usize, usize)>,
        visit: &mut dyn FnMut(&[(usize, usize)]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if chosen.len() + 1 == k {
            return visit(chosen);
        }
        if edges.len() - i < k - 1 - chosen.len() {
            return ControlFlow::Continue(());
        }
        let mut parent: Vec<usize> = (0..k).collect();
        for &(a, b) in chosen.iter() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let (a, b) = edges[i];
        if find(&mut parent, a) != find(&mut parent, b) {
            chosen.push((a, b));
            go(k, edges, i + 1, chosen, visit)?;
            chosen.pop();
        }
        go(k, edges, i + 1, chosen, visit)
    }
    go(k, edges, 0, &mut Vec::new(), visit)
}

fn leaf_counts(
    k: usize,
    minimum: &[usize],
    total: usize,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    fn go(
        i: usize,
        minimum: &[usize],
        left: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == minimum.len() {
            return visit(cur);
        }
        let need_after: usize = minimum[i + 1..].iter().sum();
        let mut c = minimum[i];
        while c + need_after <= left {
            cur.push(c);
            go(i + 1, minimum, left - c, cur, visit)?;
            cur.pop();
            c += 1;
        }
        ControlFlow::Continue(())
    }
    let _ = k;
    go(0, minimum, total, &mut Vec::new(), visit)
}

/// Visits every compact representation of `g` on a re-subdivision of `t`.
pub fn for_each_compact(
    g: &Graph,
    t: &HostTree,
    budget: usize,
    visit: &mut dyn FnMut(&Representation) -> ControlFlow<()>,
) -> Result<(), OracleError> {
    if !g.is_connected() {
        return Err(OracleError::BadInput);
    }
    let cliques = bron_kerbosch(g);
    let k = cliques.len();
    let max_leaves = t.leaves().len().max(if t.node_count() == 1 { 0 } else { 2 });
    if k + max_leaves > budget {
        return Err(OracleError::BudgetExceeded {
            needed: k + max_leaves,
            budget,
        });
    }
    let n = g.n();
    let bits: Vec<FixedBitSet> = cliques.iter().map(|c| bits_of(n, c)).collect();
    let mut cand = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if !bits[a].is_disjoint(&bits[b]) {
                cand.push((a, b));
            }
        }
    }
    let family = ContractionFamily::new(t.host());
    let mut shapes: std::collections::HashMap<Vec<(usize, usize)>, bool> = std::collections::HashMap::new();
    let _ = spanning_trees(k, &cand, &mut |tree| {
        for v in 0..n {
            let holders: Vec<usize> = (0..k).filter(|&c| bits[c].contains(v)).collect();
            let inner = tree
                .iter()
                .filter(|&&(a, b)| bits[a].contains(v) && bits[b].contains(v))
                .count();
            if inner + 1 != holders.len() {
                return ControlFlow::Continue(());
            }
        }
        let mut degree = vec![0; k];
        for &(a, b) in tree {
            degree[a] += 1;
            degree[b] += 1;
        }
        let minimum: Vec<usize> = degree.iter().map(|&d| 2usize.saturating_sub(d)).collect();
        leaf_counts(k, &minimum, max_leaves, &mut |counts| {
            let mut edges = tree.to_vec();
            let mut next = k;
            for (c, &m) in counts.iter().enumerate() {
                for _ in 0..m {
                    edges.push((c, next));
                    next += 1;
                }
            }
            let host = Host::new(next, edges.clone()).expect("tree");
            let ok = *shapes.entry(edges).or_insert_with(|| family.admits(&host));
            if !ok {
                return ControlFlow::Continue(());
            }
            let mut sets = cliques.clone();
            sets.resize(next, Vec::new());
            let rep = Representation::from_node_sets(host, &sets, n);
            if verify_compact(g, &rep).is_ok() {
                visit(&rep)
            } else {
                ControlFlow::Continue(())
            }
        })
    });
    Ok(())
}

/// First compact representation of `g` on a re-subdivision of `t` in search order.
pub fn oracle_recognize(g: &Graph, t: &HostTree) -> Result<Option<Representation>, OracleError> {
    oracle_recognize_with(g, t, DEFAULT_BUDGET)
}

pub fn oracle_recognize_with(g: &Graph, t: &HostTree, budget: usize) -> Result<Option<Representation>, OracleError> {
    if g.n() == 0 {
        return Ok(None);
    }
    if t.node_count() == 1 {
        return Ok((g.n() == 1).then(|| Representation::new(t.host().clone(), vec![vec![0]], Mode::Compact)));
    }
    let mut found = None;
    for_each_compact(g, t, budget, &mut |r| {
        found = Some(r.clone());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Whether no compact representation on a re-subdivision of `r`'s host has fewer branching nodes.
pub fn is_minimal_compact(g: &Graph, r: &Representation, budget: usize) -> Result<bool, OracleError> {
    let Ok(t) = HostTree::from_host(r.host.clone()) else {
        return Ok(false);
    };
    let branching = t.branching().len();
    let mut minimal = true;
    for_each_compact(g, &t, budget, &mut |other| {
        let b = (0..other.host.node_count())
            .filter(|&x| other.host.degree(x) >= 3)
            .count();
        if b < branching {
            minimal = false;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    Ok(minimal)
}

fn random_tree(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m];
    for v in 1..m {
        let p = rng.gen_range(0..v);
        adj[v].push(p);
        adj[p].push(v);
    }
    adj
}

fn random_subtree(rng: &mut ChaCha8Rng, adj: &[Vec<usize>], start: usize, size: usize) -> Vec<usize> {
    let mut set = vec![start];
    let mut inside = HashSet::from([start]);
    while set.len() < size {
        let frontier: Vec<usize> = set
            .iter()
            .flat_map(|&x| adj[x].iter().copied())
            .filter(|y| !inside.contains(y))
            .collect();
        let Some(&y) = frontier.choose(rng) else { break };
        inside.insert(y);
        set.push(y);
    }
    set.sort_unstable();
    set
}

/// Random connected chordal graph as the intersection graph of subtrees; `density` in (0, 1].
pub fn gen_chordal(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n.max(1);
    let adj = random_tree(&mut rng, m);
    let span = ((m as f64 * density.clamp(0.05, 1.0)).ceil() as usize).max(1);
    let mut models: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut covered: Vec<usize> = Vec::new();
    for v in 0..n {
        let start = if v == 0 {
            rng.gen_range(0..m)
        } else {
            *covered.choose(&mut rng).unwrap()
        };
        let size = rng.gen_range(1..=span);
        let model = random_subtree(&mut rng, &adj, start, size);
        for &x in &model {
            if !covered.contains(&x) {
                covered.push(x);
            }
        }
        models.push(model);
    }
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if models[u].iter().any(|x| models[v].contains(x)) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

const PLANT_ATTEMPTS: usize = 200;

/// Random proper representation with `n` vertices on a subdivision of `t`, and its graph.
pub fn gen_planted(t: &HostTree, n: usize, seed: u64) -> Result<(Graph, Representation), OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stretch = n + 1;
    let mut edges = Vec::new();
    let mut next = t.node_count();
    for &(a, b) in t.edges() {
        let mut prev = a;
        for _ in 1..stretch {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, b));
    }
    let host = Host::new(next, edges).expect("subdivided tree");
    let adj: Vec<Vec<usize>> = (0..next).map(|x| host.neighbors(x)).collect();
    let max_size = (next / 2).max(2);
    for _ in 0..PLANT_ATTEMPTS {
        let mut models: Vec<Vec<usize>> = Vec::new();
        let mut covered: Vec<usize> = Vec::new();
        let mut misses = 0;
        while models.len() < n && misses < 50 * n {
            let start = if models.is_empty() {
                rng.gen_range(0..next)
            } else {
                *covered.choose(&mut rng).unwrap()
            };
            let size = rng.gen_range(1..=max_size);
            let model = random_subtree(&mut rng, &adj, start, size);
            let clash = models.iter().any(|m| {
                let sub = model.iter().all(|x| m.contains(x));
                let sup = m.iter().all(|x| model.contains(x));
                sub || sup
            });
            if clash {
                misses += 1;
                continue;
            }
            for &x in &model {
                if !covered.contains(&x) {
                    covered.push(x);
                }
            }
            models.push(model);
        }
        if models.len() < n {
            continue;
        }
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if models[u].iter().any(|x| models[v].contains(x)) {
                    g.add_edge(u, v);
                }
            }
        }
        let rep = Representation::new(host.clone(), models, Mode::Proper);
        if verify_proper(&g, &rep).is_ok() {
            return Ok((g, rep));
        }
    }
    Err(OracleError::GenerationFailed(PLANT_ATTEMPTS))
}

/// Canonical adjacency string: the least over vertex orders that sort by degree.
pub fn canonical_form(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if g.degree(c[0]) == g.degree(v) => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    fn permute(classes: &mut [Vec<usize>], i: usize, prefix: &mut Vec<usize>, g: &Graph, best: &mut Option<Vec<u64>>) {
        if i == classes.len() {
            let code: Vec<u64> = prefix
                .iter()
                .map(|&u| {
                    prefix
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &v)| acc | (g.has_edge(u, v) as u64) << k)
                })
                .collect();
            if best.as_ref().map_or(true, |b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        let class = classes[i].clone();
        heap_permutations(class, &mut |perm| {
            let len = prefix.len();
            prefix.extend_from_slice(perm);
            permute(classes, i + 1, prefix, g, best);
            prefix.truncate(len);
        });
    }
    let mut best = None;
    permute(&mut classes, 0, &mut Vec::new(), g, &mut best);
    best.unwrap_or_default()
}

fn heap_permutations(mut items: Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    let k = items.len();
    let mut c = vec![0; k];
    visit(&items);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(&items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// All connected chordal graphs on `n` vertices, one per isomorphism class.
pub fn connected_chordal_graphs(n: usize) -> Vec<Graph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![Graph::new(1)];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for clique in bron_kerbosch(g) {
                for mask in 1u32..(1 << clique.len()) {
                    let attach: Vec<usize> = clique
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect();
                    let mut h = Graph::new(size);
                    for (a, b) in g.edges() {
                        h.add_edge(a, b);
                    }
                    for &v in &attach {
                        h.add_edge(v, size - 1);
                    }
                    if seen.insert(canonical_form(&h)) {
                        next.push(h);
                    }
                }
            }
        }
        level = next;
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::is_chordal;

    #[test]
    fn chordal_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| connected_chordal_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 58]);
    }

    #[test]
    fn bron_kerbosch_on_p4() {
        assert_eq!(bron_kerbosch(&Graph::path(4)), vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn oracle_basics() {
        let p3 = Graph::path(3);
        let r = oracle_recognize(&p3, &HostTree::k2()).unwrap().unwrap();
        assert_eq!(r.node_sets().iter().filter(|s| !s.is_empty()).count(), 2);
        let claw = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert!(oracle_recognize(&claw, &HostTree::k2()).unwrap().is_none());
        let spider = oracle_recognize(&claw, &HostTree::star(3)).unwrap().unwrap();
        assert_eq!(spider.host.node_count(), 6);
    }

    #[test]
    fn budget_is_enforced() {
        let g = Graph::path(12);
        assert!(matches!(
            oracle_recognize(&g, &HostTree::k2()),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn generators() {
        assert_eq!(gen_chordal(1, 0.5, 3).n(), 1);
        for seed in 0..20 {
            let g = gen_chordal(9, 0.4, seed);
            assert!(is_chordal(&g).is_chordal() && g.is_connected());
            assert_eq!(g.edges(), gen_chordal(9, 0.4, seed).edges());
        }
        let (g, r) = gen_planted(&HostTree::star(3), 8, 1).unwrap();
        verify_proper(&g, &r).unwrap();
    }

    #[test]
    fn surrounding_on_p5() {
        let g = Graph::path(5);
        let c = bron_kerbosch(&g);
        assert!(oracle_surrounding(&g, &c, 0, 1, 2));
        assert!(!oracle_surrounding(&g, &c, 0, 1, 3));
    }
}
