use ptgraph::chordal::clique_tree;
use ptgraph::graph::Graph;
use ptgraph::hardness::{
    check_certificate, d_representation_from_certificate, find_certificate, gadget_graph,
    interval_orders_from_representation, HeightOnePoset,
};
use ptgraph::host::{all_trees, is_re_subdivision, HostTree};
use ptgraph::oracle::{
    bron_kerbosch, connected_chordal_graphs, for_each_compact, gen_chordal, oracle_recognize, oracle_surrounding,
};
use ptgraph::representation::{
    compact_from_proper, escapes, proper_from_compact, strongly_escapes, verify_compact, verify_proper, Representation,
};
use ptgraph::structure::{chains, is_surrounding};
use ptgraph::template::{collect_templates, realizes, template_of, Label};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::ops::ControlFlow;

fn corpus(max_n: usize) -> Vec<(Graph, HostTree, Vec<Representation>)> {
    let trees: Vec<HostTree> = (2..=5).flat_map(all_trees).collect();
    let mut out = Vec::new();
    for g in (1..=max_n).flat_map(connected_chordal_graphs) {
        for t in &trees {
            let mut reps = Vec::new();
            for_each_compact(&g, t, 12, &mut |r| {
                reps.push(r.clone());
                ControlFlow::Continue(())
            })
            .unwrap();
            if !reps.is_empty() {
                out.push((g.clone(), t.clone(), reps));
            }
        }
    }
    out
}

fn path_graph(n: usize) -> Graph {
    Graph::path(n)
}

#[test]
fn clique_trees_have_induced_subtrees() {
    let mut checked = 0;
    for seed in 0..200 {
        let g = gen_chordal(3 + seed as usize % 7, 0.35, seed);
        let Ok(ct) = clique_tree(&g) else { continue };
        checked += 1;
        for v in 0..g.n() {
            let nodes: Vec<usize> = (0..ct.cliques.len()).filter(|&x| ct.cliques[x].contains(&v)).collect();
            let inside: BTreeSet<usize> = nodes.iter().copied().collect();
            let edges = ct
                .tree
                .edges()
                .iter()
                .filter(|(a, b)| inside.contains(a) && inside.contains(b))
                .count();
            assert_eq!(edges + 1, nodes.len(), "seed {seed} vertex {v}");
        }
    }
    assert!(checked > 50);
}

#[test]
fn re_subdivision_scripts_and_leaf_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trees: Vec<HostTree> = (2..=6).flat_map(all_trees).collect();
    for _ in 0..300 {
        let t = &trees[rng.gen_range(0..trees.len())];
        let mut s = t.clone();
        for _ in 0..rng.gen_range(0..3) {
            if s.edge_count() > 1 {
                s = s.contract_edge(rng.gen_range(0..s.edge_count())).unwrap().0;
            }
        }
        for _ in 0..rng.gen_range(0..4) {
            s = s.subdivide_edge(rng.gen_range(0..s.edge_count())).unwrap().0;
        }
        assert!(is_re_subdivision(s.host(), t.host()));
        let other = &trees[rng.gen_range(0..trees.len())];
        if other.leaves().len() > t.leaves().len() {
            assert!(!is_re_subdivision(other.host(), t.host()));
        }
    }
}

#[test]
fn escape_alternative_form_on_corpus() {
    for (_, _, reps) in corpus(6) {
        for r in &reps {
            let n = r.vertex_count();
            for u in 0..n {
                for v in 0..n {
                    if u == v {
                        continue;
                    }
                    let disjoint = r.models[u].iter().all(|x| !r.models[v].contains(x));
                    assert_eq!(
                        escapes(r, u, v).is_some(),
                        disjoint || strongly_escapes(r, u, v).is_some()
                    );
                }
            }
        }
    }
}

#[test]
fn conversions_preserve_clique_adjacency() {
    let nonleaf_pairs = |r: &Representation| -> BTreeSet<(Vec<usize>, Vec<usize>)> {
        let sets = r.node_sets();
        r.host
            .edges()
            .iter()
            .filter(|(a, b)| !sets[*a].is_empty() && !sets[*b].is_empty())
            .map(|&(a, b)| {
                (
                    sets[a.min(b)].clone().min(sets[a.max(b)].clone()),
                    sets[a].clone().max(sets[b].clone()),
                )
            })
            .collect()
    };
    let mut checked = 0;
    for (g, _, reps) in corpus(6) {
        for r in &reps {
            let proper = proper_from_compact(&g, r).unwrap();
            let back = compact_from_proper(&g, &proper).unwrap();
            verify_compact(&g, &back).unwrap();
            assert_eq!(nonleaf_pairs(&back), nonleaf_pairs(r));
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn twins_convert_on_an_edge() {
    let g = Graph::complete(2);
    let r = oracle_recognize(&g, &HostTree::k2())
        .unwrap()
        .expect("K2 is a proper interval graph");
    let proper = proper_from_compact(&g, &r).unwrap();
    verify_proper(&g, &proper).unwrap();
}

#[test]
fn path_chain_lengths() {
    for (n, s) in [(5, 2), (7, 4)] {
        let cs = chains(&path_graph(n)).unwrap();
        assert_eq!(cs.chains.len(), 1);
        assert_eq!(cs.chains[0].len(), s);
        assert_eq!(cs.not_surrounded.len(), 2);
    }
}

#[test]
fn terminals_meet_inner_sets_all_or_nothing() {
    for g in (1..=7).flat_map(connected_chordal_graphs) {
        let cs = chains(&g).unwrap();
        for ch in &cs.chains {
            let inner: BTreeSet<usize> = ch.inner.iter().copied().collect();
            for term in [&ch.start, &ch.end] {
                let meet = term.iter().filter(|c| inner.contains(c)).count();
                assert!(meet == 0 || meet == inner.len());
            }
        }
    }
}

#[test]
fn surrounding_matches_definition() {
    for g in (1..=7).flat_map(connected_chordal_graphs) {
        let cliques = bron_kerbosch(&g);
        let k = cliques.len();
        for y in 0..k {
            for l in 0..k {
                for r in 0..k {
                    if l == y || r == y || l == r {
                        continue;
                    }
                    assert_eq!(
                        is_surrounding(&g, &cliques, l, y, r),
                        oracle_surrounding(&g, &cliques, l, y, r)
                    );
                }
            }
        }
    }
}

#[test]
fn swapped_terminals_break_realization() {
    let g = path_graph(5);
    let cs = chains(&g).unwrap();
    let r = oracle_recognize(&g, &HostTree::k2()).unwrap().unwrap();
    let own = template_of(&r, &cs).unwrap();
    assert!(realizes(&r, &cs, &own));
    let mut swapped = own.clone();
    let ends: Vec<usize> = (0..swapped.labels.len())
        .filter(|&x| matches!(swapped.labels[x], Label::Clique(_)))
        .collect();
    assert_eq!(ends.len(), 2);
    swapped.labels.swap(ends[0], ends[1]);
    assert!(!realizes(&r, &cs, &swapped));
}

#[test]
fn orientation_ignores_roots_after_the_resolving_one() {
    let mut checked = 0;
    for g in (4..=7).flat_map(connected_chordal_graphs) {
        let cs = chains(&g).unwrap();
        for t in [HostTree::star(3), HostTree::star(4)] {
            for tpl in collect_templates(&t, &cs) {
                let rbar = tpl.root_ordering();
                for chain in 0..tpl.paths.len() {
                    let Ok(dir) = tpl.orient_chain(&rbar, chain) else {
                        continue;
                    };
                    let path = &tpl.paths[chain];
                    let (a, b) = (path[0], *path.last().unwrap());
                    let k = rbar
                        .iter()
                        .position(|&r| tpl.tree.between(a, b, r) || tpl.tree.between(r, a, b))
                        .unwrap();
                    let mut shuffled = rbar.clone();
                    shuffled[k + 1..].reverse();
                    assert_eq!(tpl.orient_chain(&shuffled, chain), Ok(dir));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn random_certificates_build_verified_representations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (k, l) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rel = (0..k)
            .flat_map(|i| (0..l).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect::<Vec<_>>();
        let p = HeightOnePoset::unnamed(k, l, rel);
        let orders = find_certificate(&p).unwrap();
        let g = gadget_graph(&p);
        let r = d_representation_from_certificate(&p, &orders).unwrap();
        verify_proper(&g, &r).unwrap();
        let back = interval_orders_from_representation(&g, &r).unwrap();
        assert_eq!(check_certificate(&p, &back), Ok(true));
    }
}
