use std::collections::{BTreeMap, BTreeSet, VecDeque};

use oimso_core::{gaifman, Elem, Graph, NodeId, SegmentedDecomposition, Structure};
use serde::{Deserialize, Serialize};

use crate::{OtxxError, Result};

/// Greedy coloring along the reverse of a smallest-degree-last elimination
/// order. Colors are `0..bound`; fails if the greedy order needs more.
pub fn proper_coloring(g: &Graph, bound: usize) -> Result<BTreeMap<Elem, usize>> {
    let mut deg: BTreeMap<Elem, usize> = g.vertices().map(|v| (v, g.degree(v))).collect();
    let mut removed = BTreeSet::new();
    let mut elim = Vec::with_capacity(deg.len());
    while let Some((&v, _)) = deg
        .iter()
        .filter(|(v, _)| !removed.contains(*v))
        .min_by_key(|(&v, &d)| (d, v))
    {
        removed.insert(v);
        elim.push(v);
        for &w in g.neighbors(v) {
            if let Some(d) = deg.get_mut(&w) {
                *d = d.saturating_sub(1);
            }
        }
        deg.remove(&v);
    }
    let mut color = BTreeMap::new();
    for &v in elim.iter().rev() {
        let used: BTreeSet<usize> = g.neighbors(v).iter().filter_map(|w| color.get(w)).copied().collect();
        let c = (0..).find(|c| !used.contains(c)).expect("unbounded");
        if c >= bound {
            return Err(OtxxError::Contract(format!(
                "greedy coloring needs more than {bound} colors at vertex {v}"
            )));
        }
        color.insert(v, c);
    }
    Ok(color)
}

/// Bag orders from a proper `(k+1)`-coloring of the Gaifman graph: the
/// separator of each node first, by color, then the rest by (color, id).
pub fn coloring_bag_orders(
    a: &Structure,
    d: &SegmentedDecomposition,
    k: usize,
) -> Result<BTreeMap<NodeId, Vec<Elem>>> {
    let g = gaifman(a);
    let td = &d.td;
    for t in td.nodes() {
        if let Some(p) = td.parent(t) {
            let s: BTreeSet<Elem> = td.bag(t)?.intersection(td.bag(p)?).copied().collect();
            if !g.is_clique(&s) {
                return Err(OtxxError::Contract(format!("separator of node {t} is not a clique")));
            }
        }
    }
    let color = proper_coloring(&g, k + 1)?;
    let mut out = BTreeMap::new();
    for t in td.nodes() {
        let sep: BTreeSet<Elem> = match td.parent(t) {
            Some(p) => td.bag(t)?.intersection(td.bag(p)?).copied().collect(),
            None => BTreeSet::new(),
        };
        let mut order: Vec<Elem> = td.bag(t)?.iter().copied().collect();
        order.sort_by_key(|v| (!sep.contains(v), color.get(v).copied().unwrap_or(0), *v));
        out.insert(t, order);
    }
    Ok(out)
}

/// Strategy for ordering the bags of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "strategy")]
pub enum BagOrderProvider {
    /// Increasing element id.
    InputId,
    /// Breadth-first discovery order in the Gaifman graph, each component
    /// started at its smallest vertex, neighbors visited by id.
    Bfs,
    /// See [`coloring_bag_orders`].
    Coloring { k: usize },
}

impl BagOrderProvider {
    pub fn orders(
        &self,
        a: &Structure,
        d: &SegmentedDecomposition,
    ) -> Result<BTreeMap<NodeId, Vec<Elem>>> {
        let by_rank = |rank: &BTreeMap<Elem, usize>| -> Result<BTreeMap<NodeId, Vec<Elem>>> {
            d.td.nodes()
                .map(|t| {
                    let mut o: Vec<Elem> = d.td.bag(t)?.iter().copied().collect();
                    o.sort_by_key(|v| (rank.get(v).copied().unwrap_or(usize::MAX), *v));
                    Ok((t, o))
                })
                .collect()
        };
        match self {
            BagOrderProvider::InputId => by_rank(&BTreeMap::new()),
            BagOrderProvider::Bfs => {
                let g = gaifman(a);
                let mut rank = BTreeMap::new();
                for s in g.vertices() {
                    if rank.contains_key(&s) {
                        continue;
                    }
                    let mut queue = VecDeque::from([s]);
                    let n = rank.len();
                    rank.insert(s, n);
                    while let Some(v) = queue.pop_front() {
                        for &w in g.neighbors(v) {
                            if !rank.contains_key(&w) {
                                let n = rank.len();
                                rank.insert(w, n);
                                queue.push_back(w);
                            }
                        }
                    }
                }
                by_rank(&rank)
            }
            BagOrderProvider::Coloring { k } => coloring_bag_orders(a, d, *k),
        }
    }
}
