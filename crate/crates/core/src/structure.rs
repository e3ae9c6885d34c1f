//! Representation-independent structure: surrounding triples, guards and chains.

use crate::chordal::{cliques_of, ChordalError};
use crate::graph::{bits_of, components_avoiding, open_neighborhood, Graph, VertexSet};
use fixedbitset::FixedBitSet;
use serde::Serialize;

/// Index into the lexicographically sorted list of maximal cliques.
pub type CliqueId = usize;

/// Components of G − V_y and where every other clique lands.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub components: Vec<VertexSet>,
    pub neighborhoods: Vec<FixedBitSet>,
    /// Component holding V_ℓ \ V_y, for every clique ℓ ≠ y.
    pub side_of: Vec<Option<usize>>,
}

/// Cliques of a chordal graph with the splitting data of every clique.
#[derive(Clone, Debug)]
pub struct CliqueContext {
    pub cliques: Vec<VertexSet>,
    pub bits: Vec<FixedBitSet>,
    pub overlap: Vec<Vec<usize>>,
    pub splittings: Vec<Splitting>,
}

impl CliqueContext {
    pub fn new(g: &Graph) -> Result<Self, ChordalError> {
        Ok(Self::from_cliques(g, cliques_of(g)?))
    }

    pub fn from_cliques(g: &Graph, cliques: Vec<VertexSet>) -> Self {
        let n = g.n();
        let bits: Vec<FixedBitSet> = cliques.iter().map(|c| bits_of(n, c)).collect();
        let k = cliques.len();
        let overlap = (0..k)
            .map(|a| (0..k).map(|b| bits[a].intersection(&bits[b]).count()).collect())
            .collect();
        let splittings = (0..k)
            .map(|y| {
                let components = components_avoiding(g, &bits[y]);
                let mut where_is = vec![usize::MAX; n];
                for (i, c) in components.iter().enumerate() {
                    for &v in c {
                        where_is[v] = i;
                    }
                }
                let neighborhoods = components
                    .iter()
                    .map(|c| bits_of(n, &open_neighborhood(g, c)))
                    .collect();
                let side_of = (0..k)
                    .map(|l| {
                        if l == y {
                            return None;
                        }
                        cliques[l].iter().find(|&&v| !bits[y].contains(v)).map(|&v| where_is[v])
                    })
                    .collect();
                Splitting {
                    components,
                    neighborhoods,
                    side_of,
                }
            })
            .collect();
        CliqueContext {
            cliques,
            bits,
            overlap,
            splittings,
        }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Conditions (1), (2A), (2B) for the component pair (a, b) of G − V_y.
    pub fn sides_admissible(&self, y: CliqueId, a: usize, b: usize) -> bool {
        let sp = &self.splittings[y];
        if a == b {
            return false;
        }
        let (na, nb) = (&sp.neighborhoods[a], &sp.neighborhoods[b]);
        let mut union = na.clone();
        union.union_with(nb);
        let covers = union == self.bits[y];
        if sp.components.len() == 2 {
            return covers || na.is_disjoint(nb);
        }
        if !covers {
            return false;
        }
        let mut both = na.clone();
        both.intersect_with(nb);
        (0..sp.components.len())
            .filter(|&c| c != a && c != b)
            .all(|c| sp.neighborhoods[c].is_subset(&both))
    }

    /// Cliques on component side `c` of y with the largest intersection with V_y.
    pub fn best_on_side(&self, y: CliqueId, c: usize) -> Vec<CliqueId> {
        let sp = &self.splittings[y];
        let members: Vec<CliqueId> = (0..self.len()).filter(|&l| sp.side_of[l] == Some(c)).collect();
        let best = members.iter().map(|&l| self.overlap[l][y]).max().unwrap_or(0);
        members.into_iter().filter(|&l| self.overlap[l][y] == best).collect()
    }

    pub fn is_surrounding(&self, l: CliqueId, y: CliqueId, r: CliqueId) -> bool {
        if l == y || r == y || l == r {
            return false;
        }
        let sp = &self.splittings[y];
        let (Some(a), Some(b)) = (sp.side_of[l], sp.side_of[r]) else {
            return false;
        };
        self.sides_admissible(y, a, b) && self.best_on_side(y, a).contains(&l) && self.best_on_side(y, b).contains(&r)
    }

    pub fn guards(&self, y: CliqueId) -> Guards {
        let comps = self.splittings[y].components.len();
        let mut pairs = Vec::new();
        for a in 0..comps {
            for b in a + 1..comps {
                if self.sides_admissible(y, a, b) {
                    pairs.push((a, b));
                }
            }
        }
        match pairs.as_slice() {
            [] => Guards::default(),
            [(a, b)] => Guards {
                left: self.best_on_side(y, *a),
                right: self.best_on_side(y, *b),
                ambiguous: false,
            },
            _ => Guards {
                ambiguous: true,
                ..Guards::default()
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Guards {
    pub left: Vec<CliqueId>,
    pub right: Vec<CliqueId>,
    /// Several component pairs qualify; no compact representation exists then.
    pub ambiguous: bool,
}

impl Guards {
    pub fn surrounded(&self) -> bool {
        !self.left.is_empty() && !self.right.is_empty()
    }
}

pub fn is_surrounding(g: &Graph, cliques: &[VertexSet], l: CliqueId, y: CliqueId, r: CliqueId) -> bool {
    CliqueContext::from_cliques(g, cliques.to_vec()).is_surrounding(l, y, r)
}

pub fn guards(g: &Graph, cliques: &[VertexSet], y: CliqueId) -> Guards {
    CliqueContext::from_cliques(g, cliques.to_vec()).guards(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TerminalKind {
    /// A single clique that is not surrounded.
    NotSurrounded,
    /// A guard with more than one clique.
    Multi,
    /// A surrounded singleton that does not continue the chain.
    Anomalous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub start: Vec<CliqueId>,
    pub inner: Vec<CliqueId>,
    pub end: Vec<CliqueId>,
    pub start_kind: TerminalKind,
    pub end_kind: TerminalKind,
}

impl Chain {
    pub fn reversed(&self) -> Chain {
        Chain {
            start: self.end.clone(),
            inner: self.inner.iter().rev().copied().collect(),
            end: self.start.clone(),
            start_kind: self.end_kind,
            end_kind: self.start_kind,
        }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ChainSet {
    pub context: CliqueContext,
    pub guards: Vec<Guards>,
    pub chains: Vec<Chain>,
    pub not_surrounded: Vec<CliqueId>,
    /// Chain holding each clique as an inner node.
    pub inner_index: Vec<Option<usize>>,
    /// False when some guard or chain violates the laws every compact representation obeys.
    pub consistent: bool,
}

pub fn chains(g: &Graph) -> Result<ChainSet, ChordalError> {
    Ok(chains_in(CliqueContext::new(g)?))
}

pub fn chains_in(context: CliqueContext) -> ChainSet {
    let k = context.len();
    let guards: Vec<Guards> = (0..k).map(|y| context.guards(y)).collect();
    let mut consistent = guards.iter().all(|gd| !gd.ambiguous);
    let mut inner_index = vec![None; k];
    let mut chains = Vec::new();
    let kind = |set: &[CliqueId]| match set {
        [c] if guards[*c].surrounded() => TerminalKind::Anomalous,
        [_] => TerminalKind::NotSurrounded,
        _ => TerminalKind::Multi,
    };
    for y in 0..k {
        if !guards[y].surrounded() || inner_index[y].is_some() {
            continue;
        }
        let id = chains.len();
        inner_index[y] = Some(id);
        let walk = |first: &Vec<CliqueId>, inner_index: &mut Vec<Option<usize>>| {
            let mut seq = Vec::new();
            let mut prev = y;
            let mut next = first.clone();
            loop {
                let [z] = next.as_slice() else { break };
                let z = *z;
                if !guards[z].surrounded() || inner_index[z].is_some() {
                    break;
                }
                let gz = &guards[z];
                let onward = if gz.left == [prev] {
                    gz.right.clone()
                } else if gz.right == [prev] {
                    gz.left.clone()
                } else {
                    break;
                };
                inner_index[z] = Some(id);
                seq.push(z);
                prev = z;
                next = onward;
            }
            (seq, next)
        };
        let (left, start) = walk(&guards[y].left, &mut inner_index);
        let (right, end) = walk(&guards[y].right, &mut inner_index);
        let mut inner: Vec<CliqueId> = left.into_iter().rev().collect();
        inner.push(y);
        inner.extend(right);
        let mut chain = Chain {
            start_kind: kind(&start),
            end_kind: kind(&end),
            start,
            inner,
            end,
        };
        let flip = match (chain.inner.first(), chain.inner.last()) {
            (Some(a), Some(b)) if a != b => a > b,
            _ => chain.start > chain.end,
        };
        if flip {
            chain = chain.reversed();
        }
        if chain.start_kind == TerminalKind::Anomalous || chain.end_kind == TerminalKind::Anomalous {
            consistent = false;
        }
        chains.push(chain);
    }
    let not_surrounded = (0..k).filter(|&c| inner_index[c].is_none()).collect();
    ChainSet {
        context,
        guards,
        chains,
        not_surrounded,
        inner_index,
        consistent,
    }
}

/// Whether V_x ∩ V_{y_i} is the same for every inner clique of the chain.
pub fn rehang_neighbors_equal(ctx: &CliqueContext, chain: &Chain, x: CliqueId) -> bool {
    let first = ctx.bits[x].intersection(&ctx.bits[chain.inner[0]]).collect::<Vec<_>>();
    chain
        .inner
        .iter()
        .all(|&y| ctx.bits[x].intersection(&ctx.bits[y]).collect::<Vec<_>>() == first)
}
