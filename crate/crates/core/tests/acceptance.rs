//! One PASS/FAIL line per acceptance criterion.

use ptgraph::chordal::{cliques_of, is_chordal};
use ptgraph::graph::{connected_components, induced_subgraph, Graph};
use ptgraph::hardness::{
    check_certificate, d_representation_from_certificate, find_certificate, gadget_graph, height_one_posets,
    interval_orders_from_representation, is_proper_d_graph,
};
use ptgraph::host::{all_trees, is_re_subdivision, reduced_trees, ContractionFamily, HostTree};
use ptgraph::oracle::{
    bron_kerbosch, connected_chordal_graphs, for_each_compact, gen_planted, oracle_guards, oracle_recognize_with,
};
use ptgraph::representation::{
    compact_from_proper, components_k, proper_from_compact, verify_compact, verify_proper, Representation,
};
use ptgraph::solver::{oracle_potential, place_chain, potential, proper_leafage, recognize, rehang};
use ptgraph::structure::{chains, rehang_neighbors_equal, ChainSet, TerminalKind};
use ptgraph::template::{enumerate_templates, realizes};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;
use std::time::Instant;

const MAX_GRAPH: usize = 7;
const MAX_TREE: usize = 5;
const ORACLE_BUDGET: usize = 12;
const LEAFAGE_BUDGET: usize = 14;
const PLANTED_ROUND_TRIP: u64 = 500;
const PLANTED_POTENTIAL: u64 = 200;
const MAX_POSET: usize = 5;
const SCALING_SIZES: [usize; 4] = [50, 100, 200, 400];
const MAX_SLOPE: f64 = 3.5;

struct Entry {
    graph: usize,
    tree: usize,
    reps: Vec<Representation>,
}

struct Corpus {
    graphs: Vec<Graph>,
    trees: Vec<HostTree>,
    entries: Vec<Entry>,
}

fn build_corpus() -> Corpus {
    let graphs: Vec<Graph> = (1..=MAX_GRAPH).flat_map(connected_chordal_graphs).collect();
    let trees: Vec<HostTree> = (1..=MAX_TREE).flat_map(all_trees).collect();
    let pairs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|g| (0..trees.len()).map(move |t| (g, t)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(gi, ti)| {
            let mut reps = Vec::new();
            if trees[ti].node_count() > 1 {
                for_each_compact(&graphs[gi], &trees[ti], ORACLE_BUDGET, &mut |r| {
                    reps.push(r.clone());
                    ControlFlow::Continue(())
                })
                .expect("corpus fits the oracle budget");
            } else if let Some(r) = oracle_recognize_with(&graphs[gi], &trees[ti], ORACLE_BUDGET).unwrap() {
                reps.push(r);
            }
            Entry {
                graph: gi,
                tree: ti,
                reps,
            }
        })
        .collect();
    Corpus { graphs, trees, entries }
}

type Outcome = (bool, String);

fn oracle_equivalence(c: &Corpus) -> Outcome {
    let bad: Vec<String> = c
        .entries
        .par_iter()
        .filter_map(|e| {
            let (g, t) = (&c.graphs[e.graph], &c.trees[e.tree]);
            let ours = recognize(g, t);
            let agree = ours.is_some() == !e.reps.is_empty();
            let valid = ours.as_ref().map_or(true, |r| {
                verify_proper(g, r).is_ok() && is_re_subdivision(&r.host, t.host())
            });
            (!agree || !valid).then(|| {
                format!(
                    "g#{} t#{} ours={} oracle={}",
                    e.graph,
                    e.tree,
                    ours.is_some(),
                    !e.reps.is_empty()
                )
            })
        })
        .collect();
    let yes = c.entries.iter().filter(|e| !e.reps.is_empty()).count();
    (
        bad.is_empty(),
        format!(
            "{} pairs, {} yes, {} disagreements {:?}",
            c.entries.len(),
            yes,
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn round_trip(c: &Corpus) -> Outcome {
    let corpus_fail: usize = c
        .entries
        .par_iter()
        .map(|e| {
            let g = &c.graphs[e.graph];
            e.reps
                .iter()
                .filter(|r| r.host.node_count() > 1)
                .filter(|r| !proper_from_compact(g, r).is_ok_and(|p| verify_proper(g, &p).is_ok()))
                .count()
        })
        .sum();
    let checked: usize = c.entries.iter().map(|e| e.reps.len()).sum();
    let trees: Vec<HostTree> = (2..=MAX_TREE + 1).flat_map(all_trees).collect();
    let planted_fail: Vec<u64> = (0..PLANTED_ROUND_TRIP)
        .into_par_iter()
        .filter(|&seed| {
            let t = &trees[seed as usize % trees.len()];
            let n = 2 + (seed as usize * 7) % 9;
            let (g, r) = gen_planted(t, n, seed).expect("planted instance");
            !compact_from_proper(&g, &r).is_ok_and(|cr| verify_compact(&g, &cr).is_ok())
        })
        .collect();
    (
        corpus_fail == 0 && planted_fail.is_empty(),
        format!(
            "{checked} corpus reps ({corpus_fail} failed), {PLANTED_ROUND_TRIP} planted ({} failed {:?})",
            planted_fail.len(),
            planted_fail.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

fn structural_bounds(c: &Corpus) -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for e in &c.entries {
        let (g, t) = (&c.graphs[e.graph], &c.trees[e.tree]);
        if e.reps.is_empty() {
            continue;
        }
        let cs = chains(g).unwrap();
        let edges = t.edge_count();
        if cs.not_surrounded.len() > edges * edges + 1 {
            violations += 1;
        }
        for r in &e.reps {
            checked += 1;
            for (y, set) in r.node_sets().iter().enumerate() {
                if !set.is_empty() && components_k(g, r, y).len() > t.node_count() {
                    violations += 1;
                }
            }
        }
    }
    (violations == 0, format!("{checked} reps, {violations} violations"))
}

fn representable(c: &Corpus) -> Vec<usize> {
    let set: BTreeSet<usize> = c
        .entries
        .iter()
        .filter(|e| !e.reps.is_empty() && c.trees[e.tree].node_count() > 1)
        .map(|e| e.graph)
        .collect();
    set.into_iter().collect()
}

fn guard_characterization(c: &Corpus) -> Outcome {
    let graphs = representable(c);
    let mut triples = 0;
    let bad: Vec<String> = graphs
        .iter()
        .flat_map(|&gi| {
            let g = &c.graphs[gi];
            let cliques = bron_kerbosch(g);
            let cs = chains(g).unwrap();
            (0..cliques.len())
                .filter_map(|y| {
                    let brute: BTreeSet<(usize, usize)> = oracle_guards(g, &cliques, y).into_iter().collect();
                    let gd = &cs.guards[y];
                    let mut fast = BTreeSet::new();
                    for &l in &gd.left {
                        for &r in &gd.right {
                            fast.insert((l, r));
                            fast.insert((r, l));
                        }
                    }
                    (brute != fast || gd.ambiguous).then(|| format!("g#{gi} y={y}"))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    for &gi in &graphs {
        triples += bron_kerbosch(&c.graphs[gi]).len();
    }
    (
        bad.is_empty(),
        format!(
            "{} graphs, {triples} cliques, {} mismatches {:?}",
            graphs.len(),
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn chain_laws(c: &Corpus) -> Outcome {
    let mut violations = Vec::new();
    for &gi in &representable(c) {
        let g = &c.graphs[gi];
        let cs = chains(g).unwrap();
        let k = cs.context.len();
        let mut seen = vec![0; k];
        for ch in &cs.chains {
            for &y in &ch.inner {
                seen[y] += 1;
            }
            for (kind, set) in [(ch.start_kind, &ch.start), (ch.end_kind, &ch.end)] {
                let ok = match kind {
                    TerminalKind::NotSurrounded => set.len() == 1 && cs.not_surrounded.contains(&set[0]),
                    TerminalKind::Multi => set.len() > 1,
                    TerminalKind::Anomalous => false,
                };
                if !ok {
                    violations.push(format!("g#{gi} terminal {set:?}"));
                }
            }
        }
        for &y in &cs.not_surrounded {
            seen[y] += 1;
        }
        if seen.iter().any(|&s| s != 1) {
            violations.push(format!("g#{gi} partition"));
        }
        for e in c.entries.iter().filter(|e| e.graph == gi) {
            for r in &e.reps {
                let sets = r.node_sets();
                for ch in &cs.chains {
                    let inner_nodes: BTreeSet<usize> = ch
                        .inner
                        .iter()
                        .filter_map(|&y| sets.iter().position(|s| *s == cs.context.cliques[y]))
                        .collect();
                    let chain_sets: Vec<&Vec<usize>> = ch
                        .inner
                        .iter()
                        .chain(&ch.start)
                        .chain(&ch.end)
                        .map(|&y| &cs.context.cliques[y])
                        .collect();
                    for &x in &inner_nodes {
                        for w in r.host.neighbors(x) {
                            if sets[w].is_empty() || chain_sets.contains(&&sets[w]) {
                                continue;
                            }
                            let id = cs.context.cliques.iter().position(|q| *q == sets[w]).unwrap();
                            if !rehang_neighbors_equal(&cs.context, ch, id) {
                                violations.push(format!("g#{gi} neighbor {id}"));
                            }
                        }
                    }
                }
            }
        }
    }
    (
        violations.is_empty(),
        format!(
            "{} violations {:?}",
            violations.len(),
            violations.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn root_node(r: &Representation, cs: &ChainSet) -> Option<usize> {
    let first = *cs.not_surrounded.first()?;
    r.node_sets().iter().position(|s| *s == cs.context.cliques[first])
}

fn parents(r: &Representation, root: usize) -> Vec<usize> {
    r.tree().expect("tree host").parents_from(root)
}

/// Whether `mid` lies on the path from `a` to the root.
fn above(parent: &[usize], a: usize, mid: usize) -> bool {
    let mut z = a;
    loop {
        if z == mid {
            return true;
        }
        if parent[z] == z {
            return false;
        }
        z = parent[z];
    }
}

fn potential_at(g: &Graph, r: &Representation, tag: &str) -> (usize, Vec<String>) {
    let mut issues = Vec::new();
    let cs = chains(g).unwrap();
    let Some(root) = root_node(r, &cs) else {
        return (0, issues);
    };
    let parent = parents(r, root);
    let toward_root = |ci: usize| -> Option<ptgraph::solver::ChainPlacement> {
        [true, false]
            .into_iter()
            .map(|up| place_chain(r, &cs, ci, up).unwrap())
            .find(|pl| parent[pl.nodes[0]] == pl.nodes[1])
    };
    let mut checked = 0;
    for ci in 0..cs.chains.len() {
        let Some(pl) = toward_root(ci) else { continue };
        for i in 1..pl.nodes.len() {
            if r.host.degree(pl.nodes[i]) < 3 {
                continue;
            }
            checked += 1;
            let fast = potential(r, &cs, &pl, i, root);
            let slow = oracle_potential(r, &cs, &pl, i, root).unwrap();
            if fast != slow {
                issues.push(format!("{tag}: table {fast:?} vs definition {slow:?}"));
            }
            if slow.is_empty() || slow.windows(2).any(|w| w[1] != w[0] + 1) || slow[0] != i {
                issues.push(format!("{tag}: not contiguous {slow:?}"));
                continue;
            }
            for &j in &slow {
                let moved = rehang(r, &cs, &pl, i, j).unwrap();
                if verify_compact(g, &moved).is_err() {
                    issues.push(format!("{tag}: rehang to {j} breaks compactness"));
                }
            }
            for &j in &slow {
                let moved = rehang(r, &cs, &pl, i, j).unwrap();
                let after = oracle_potential(&moved, &cs, &pl, j, root).unwrap();
                let last = *slow.last().unwrap();
                if (after == vec![j]) != (j == last) {
                    issues.push(format!(
                        "{tag}: rehang {i}->{j} gives {after:?}, potential ends at {last}"
                    ));
                }
                for cj in 0..cs.chains.len() {
                    let Some(other) = toward_root(cj) else { continue };
                    for k in 1..other.nodes.len() {
                        let x = other.nodes[k];
                        if x == pl.nodes[i] || r.host.degree(x) < 3 || !above(&parent, x, pl.nodes[i]) {
                            continue;
                        }
                        let before: BTreeSet<usize> =
                            oracle_potential(r, &cs, &other, k, root).unwrap().into_iter().collect();
                        let after: BTreeSet<usize> = oracle_potential(&moved, &cs, &other, k, root)
                            .unwrap()
                            .into_iter()
                            .collect();
                        if !after.is_subset(&before) {
                            issues.push(format!("{tag}: independence at chain {cj} node {k}"));
                        }
                    }
                }
            }
        }
    }
    (checked, issues)
}

fn potential_laws(c: &Corpus) -> Outcome {
    let trees: Vec<HostTree> = (4..=MAX_TREE + 1)
        .flat_map(all_trees)
        .filter(|t| !t.branching().is_empty())
        .collect();
    let mut results: Vec<(usize, Vec<String>)> = c
        .entries
        .par_iter()
        .flat_map_iter(|e| e.reps.iter().map(move |r| (e, r)))
        .filter(|(_, r)| r.host.node_count() > 1)
        .map(|(e, r)| potential_at(&c.graphs[e.graph], r, &format!("g#{} t#{}", e.graph, e.tree)))
        .collect();
    results.extend(
        (0..PLANTED_POTENTIAL)
            .into_par_iter()
            .map(|seed| {
                let t = &trees[seed as usize % trees.len()];
                let n = 6 + seed as usize % 5;
                let (g, p) = gen_planted(t, n, 1000 + seed).expect("planted instance");
                match compact_from_proper(&g, &p) {
                    Ok(r) => potential_at(&g, &r, &format!("seed {seed}")),
                    Err(e) => (0, vec![format!("seed {seed}: {e}")]),
                }
            })
            .collect::<Vec<_>>(),
    );
    let checked: usize = results.iter().map(|r| r.0).sum();
    let issues: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    (
        issues.is_empty(),
        format!(
            "corpus + {PLANTED_POTENTIAL} planted, {checked} branching chain nodes, {} violations {:?}",
            issues.len(),
            issues.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn template_completeness(c: &Corpus) -> Outcome {
    let results: Vec<(usize, Vec<String>)> = c
        .entries
        .par_iter()
        .filter(|e| !e.reps.is_empty() && c.trees[e.tree].node_count() > 1)
        .map(|e| {
            let (g, t) = (&c.graphs[e.graph], &c.trees[e.tree]);
            let cs = chains(g).unwrap();
            let mut families: HashMap<String, ContractionFamily> = HashMap::new();
            let branching = |r: &Representation| (0..r.host.node_count()).filter(|&x| r.host.degree(x) >= 3).count();
            let mut minimal = Vec::new();
            for r in &e.reps {
                let key = r.tree().unwrap().canonical_code();
                let fam = families.entry(key).or_insert_with(|| ContractionFamily::new(&r.host));
                if !e
                    .reps
                    .iter()
                    .any(|o| branching(o) < branching(r) && fam.admits(&o.host))
                {
                    minimal.push(r);
                }
            }
            let mut templates = Vec::new();
            let _ = enumerate_templates(t, &cs, &mut |tpl| {
                templates.push(tpl.clone());
                ControlFlow::Continue(())
            });
            let misses = minimal
                .iter()
                .filter(|r| !templates.iter().any(|tpl| realizes(r, &cs, tpl)))
                .map(|r| format!("g#{} t#{} host {:?}", e.graph, e.tree, r.host.edges()))
                .collect();
            (minimal.len(), misses)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let misses: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    (
        misses.is_empty(),
        format!(
            "{checked} minimal reps, {} misses {:?}",
            misses.len(),
            misses.iter().take(2).collect::<Vec<_>>()
        ),
    )
}

fn hardness_equivalence() -> Outcome {
    let posets = height_one_posets(MAX_POSET);
    let results: Vec<(bool, Option<String>)> = posets
        .par_iter()
        .map(|p| {
            let g = gadget_graph(p);
            let cert = find_certificate(p);
            let sat = match is_proper_d_graph(&g) {
                Ok(s) => s,
                Err(e) => return (false, Some(format!("{p:?}: {e}"))),
            };
            if cert.is_some() != sat.is_some() {
                return (
                    false,
                    Some(format!(
                        "{p:?}: certificate {} vs sat {}",
                        cert.is_some(),
                        sat.is_some()
                    )),
                );
            }
            if let Some(cert) = cert {
                let built = match d_representation_from_certificate(p, &cert) {
                    Ok(r) => r,
                    Err(e) => return (true, Some(format!("{p:?}: build {e}"))),
                };
                let mut reps = vec![built];
                if g.is_connected() {
                    reps.extend(sat);
                }
                for rep in reps {
                    match interval_orders_from_representation(&g, &rep) {
                        Ok(orders) if check_certificate(p, &orders) == Ok(true) => {}
                        _ => return (true, Some(format!("{p:?}: extraction failed"))),
                    }
                }
                return (true, None);
            }
            (false, None)
        })
        .collect();
    let yes = results.iter().filter(|r| r.0).count();
    let bad: Vec<&String> = results.iter().filter_map(|r| r.1.as_ref()).collect();
    (
        bad.is_empty(),
        format!(
            "{} posets, {yes} of interval dimension ≤ 3, {} disagreements {:?}",
            posets.len(),
            bad.len(),
            bad.iter().take(2).collect::<Vec<_>>()
        ),
    )
}

fn brute_leafage_connected(g: &Graph) -> Option<usize> {
    if g.n() <= 1 {
        return Some(0);
    }
    (2..=cliques_of(g).ok()?.len() + 1).find(|&l| {
        reduced_trees(l)
            .iter()
            .any(|t| oracle_recognize_with(g, t, LEAFAGE_BUDGET).expect("budget").is_some())
    })
}

fn all_chordal_graphs(max_n: usize) -> Vec<Graph> {
    let connected: Vec<Vec<Graph>> = (0..=max_n)
        .map(|n| {
            if n == 0 {
                Vec::new()
            } else {
                connected_chordal_graphs(n)
            }
        })
        .collect();
    let mut out = Vec::new();
    fn go(
        connected: &[Vec<Graph>],
        left: usize,
        min: (usize, usize),
        parts: &mut Vec<(usize, usize)>,
        out: &mut Vec<Graph>,
    ) {
        if left == 0 && !parts.is_empty() {
            let n: usize = parts.iter().map(|&(s, _)| s).sum();
            let mut g = Graph::new(n);
            let mut off = 0;
            for &(s, i) in parts.iter() {
                for (a, b) in connected[s][i].edges() {
                    g.add_edge(a + off, b + off);
                }
                off += s;
            }
            out.push(g);
        }
        for s in min.0..=left {
            let start = if s == min.0 { min.1 } else { 0 };
            for i in start..connected[s].len() {
                parts.push((s, i));
                go(connected, left - s, (s, i), parts, out);
                parts.pop();
            }
        }
    }
    for n in 1..=max_n {
        go(&connected, n, (1, 0), &mut Vec::new(), &mut out);
    }
    out
}

fn leafage_agreement() -> Outcome {
    let graphs = all_chordal_graphs(MAX_GRAPH);
    let results: Vec<Option<String>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            assert!(is_chordal(g).is_chordal());
            let ours = proper_leafage(g).ok()?;
            if g.is_connected() || g.n() <= 1 {
                let brute = brute_leafage_connected(g);
                return (brute != Some(ours)).then(|| format!("graph {i}: ours {ours} brute {brute:?}"));
            }
            let parts: Vec<Graph> = connected_components(g)
                .iter()
                .map(|c| induced_subgraph(g, c).0)
                .collect();
            let lower = parts
                .iter()
                .filter_map(brute_leafage_connected)
                .max()
                .unwrap_or(0)
                .max(2);
            let witness = reduced_trees(ours.max(2))
                .iter()
                .any(|t| recognize(g, t).is_some_and(|r| verify_proper(g, &r).is_ok()));
            let smaller = (2..ours).any(|l| reduced_trees(l).iter().any(|t| recognize(g, t).is_some()));
            (ours < lower || !witness || smaller).then(|| format!("graph {i}: ours {ours} lower {lower}"))
        })
        .collect();
    let bad: Vec<&String> = results.iter().flatten().collect();
    let connected = graphs.iter().filter(|g| g.is_connected()).count();
    (
        bad.is_empty(),
        format!(
            "{} chordal graphs ({connected} connected vs oracle), {} disagreements {:?}",
            graphs.len(),
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn scaling() -> Outcome {
    let t = HostTree::k2();
    let mut points = Vec::new();
    for &n in &SCALING_SIZES {
        let g = Graph::path(n);
        let mut best = f64::MAX;
        for _ in 0..3 {
            let start = Instant::now();
            let r = recognize(&g, &t);
            best = best.min(start.elapsed().as_secs_f64());
            assert!(r.is_some(), "paths are proper interval graphs");
        }
        points.push(((n as f64).ln(), best.max(1e-6).ln()));
    }
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / k, sy / k);
    let cov: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = cov / var;
    let times: Vec<String> = points.iter().map(|p| format!("{:.3}s", p.1.exp())).collect();
    (
        slope <= MAX_SLOPE,
        format!("log-log slope {slope:.2} (bound {MAX_SLOPE}), times {times:?}"),
    )
}

fn report(id: usize, name: &str, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let (ok, detail) = run();
    println!(
        "{} [{id}] {name}: {detail} ({:.1}s)",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    ok
}

fn main() {
    let start = Instant::now();
    let corpus = build_corpus();
    println!(
        "corpus: {} graphs x {} trees built in {:.1}s",
        corpus.graphs.len(),
        corpus.trees.len(),
        start.elapsed().as_secs_f64()
    );
    let results = [
        report(1, "oracle equivalence", || oracle_equivalence(&corpus)),
        report(2, "compact/proper round trip", || round_trip(&corpus)),
        report(3, "structural bounds", || structural_bounds(&corpus)),
        report(4, "guard characterization", || guard_characterization(&corpus)),
        report(5, "chain laws", || chain_laws(&corpus)),
        report(6, "potential laws", || potential_laws(&corpus)),
        report(7, "template completeness", || template_completeness(&corpus)),
        report(8, "hardness equivalence", hardness_equivalence),
        report(9, "proper leafage", leafage_agreement),
        report(10, "scaling", scaling),
    ];
    if results.iter().any(|ok| !ok) {
        std::process::exit(1);
    }
}
