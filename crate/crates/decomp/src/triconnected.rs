use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{torso, Elem, Graph, NodeId, TreeDecomposition};
use serde::Serialize;

use crate::atoms::maximal_c_atoms;
use crate::{DecompError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsoClass {
    ThreeConnected,
    Cycle,
    Edge,
    Vertex,
}

/// Decomposition of adhesion at most 2 with every torso classified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriconnectedDecomposition {
    pub td: TreeDecomposition,
    pub class: BTreeMap<NodeId, TorsoClass>,
}

/// Connected after deleting any set of fewer than `k` vertices, with more
/// than `k` vertices.
pub fn is_k_connected(g: &Graph, k: usize) -> bool {
    let vs: Vec<Elem> = g.vertices().collect();
    if vs.len() <= k {
        return false;
    }
    fn subsets(vs: &[Elem], size: usize, cur: &mut Vec<Elem>, f: &mut dyn FnMut(&[Elem]) -> bool) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for (i, &v) in vs.iter().enumerate() {
            cur.push(v);
            let ok = subsets(&vs[i + 1..], size, cur, f);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    (0..k).all(|size| {
        subsets(&vs, size, &mut Vec::new(), &mut |s| {
            g.without(&s.iter().copied().collect()).is_connected()
        })
    })
}

pub fn classify_torso(g: &Graph) -> Option<TorsoClass> {
    let n = g.vertex_count();
    let m = g.edges().count();
    match n {
        1 => Some(TorsoClass::Vertex),
        2 if m == 1 => Some(TorsoClass::Edge),
        _ if n >= 3 && g.is_connected() && g.vertices().all(|v| g.degree(v) == 2) => {
            Some(TorsoClass::Cycle)
        }
        _ if n >= 4 && is_k_connected(g, 3) => Some(TorsoClass::ThreeConnected),
        _ => None,
    }
}

struct Piece {
    vs: BTreeSet<Elem>,
    virt: BTreeSet<(Elem, Elem)>,
}

impl Piece {
    fn graph(&self, g: &Graph) -> Graph {
        let mut h = g.induced(&self.vs);
        for &(a, b) in &self.virt {
            h.add_edge(a, b);
        }
        h
    }
}

fn two_separator(h: &Graph) -> Option<(Elem, Elem)> {
    if h.vertex_count() < 4 {
        return None;
    }
    let vs: Vec<Elem> = h.vertices().collect();
    for (i, &x) in vs.iter().enumerate() {
        for &y in &vs[i + 1..] {
            if !h.without(&BTreeSet::from([x, y])).is_connected() {
                return Some((x, y));
            }
        }
    }
    None
}

/// Splits blocks at cut vertices and then at 2-separators until every
/// torso is 3-connected, a cycle, an edge or a vertex.
pub fn three_connected_decomposition(g: &Graph) -> Result<TriconnectedDecomposition> {
    let mut pieces: Vec<Piece> = Vec::new();
    let mut edges: Vec<(usize, usize, BTreeSet<Elem>)> = Vec::new();
    let mut comp_first = Vec::new();
    for comp in g.components() {
        let mut block_first: Vec<(usize, usize)> = Vec::new();
        comp_first.push(pieces.len());
        for block in maximal_c_atoms(&g.induced(&comp), 1) {
            let start = pieces.len();
            pieces.push(Piece {
                vs: block,
                virt: BTreeSet::new(),
            });
            let mut work = vec![start];
            while let Some(i) = work.pop() {
                let h = pieces[i].graph(g);
                let Some((x, y)) = two_separator(&h) else {
                    continue;
                };
                let sep = BTreeSet::from([x, y]);
                let old_virt = pieces[i].virt.clone();
                let mut ids = Vec::new();
                for (j, c) in h.without(&sep).components().into_iter().enumerate() {
                    let vs: BTreeSet<Elem> = c.union(&sep).copied().collect();
                    let mut virt: BTreeSet<(Elem, Elem)> = old_virt
                        .iter()
                        .filter(|(a, b)| vs.contains(a) && vs.contains(b))
                        .copied()
                        .collect();
                    virt.insert((x, y));
                    let piece = Piece { vs, virt };
                    if j == 0 {
                        pieces[i] = piece;
                        ids.push(i);
                    } else {
                        ids.push(pieces.len());
                        pieces.push(piece);
                    }
                }
                for e in edges.iter_mut() {
                    for end in [0, 1] {
                        let at = if end == 0 { e.0 } else { e.1 };
                        if at == i {
                            let to = *ids
                                .iter()
                                .find(|&&p| e.2.is_subset(&pieces[p].vs))
                                .expect("separator lies in one side");
                            if end == 0 {
                                e.0 = to;
                            } else {
                                e.1 = to;
                            }
                        }
                    }
                }
                for &p in &ids[1..] {
                    edges.push((i, p, sep.clone()));
                }
                work.extend(ids);
            }
            block_first.push((start, pieces.len()));
        }
        // join blocks through cut vertices
        let mut anchor: BTreeMap<Elem, usize> = BTreeMap::new();
        for &(lo, hi) in &block_first {
            let mut linked = BTreeSet::new();
            for v in (lo..hi).flat_map(|p| pieces[p].vs.iter().copied()).collect::<BTreeSet<_>>() {
                let here = (lo..hi).find(|&p| pieces[p].vs.contains(&v)).unwrap();
                match anchor.get(&v) {
                    Some(&a) => {
                        if linked.insert(a) {
                            edges.push((a, here, BTreeSet::from([v])));
                        }
                    }
                    None => {
                        anchor.insert(v, here);
                    }
                }
            }
        }
    }
    for &c in comp_first.iter().skip(1) {
        edges.push((comp_first[0], c, BTreeSet::new()));
    }
    if pieces.is_empty() {
        pieces.push(Piece {
            vs: BTreeSet::new(),
            virt: BTreeSet::new(),
        });
    }
    let bags: BTreeMap<NodeId, BTreeSet<Elem>> = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| (i as NodeId, p.vs.clone()))
        .collect();
    let td = TreeDecomposition::from_undirected(
        0,
        bags,
        edges.iter().map(|(a, b, _)| (*a as NodeId, *b as NodeId)),
    )?;
    let a = g.to_structure();
    let mut class = BTreeMap::new();
    if g.is_empty() {
        return Ok(TriconnectedDecomposition { td, class });
    }
    for t in td.nodes() {
        let tg = torso(&a, &td, t)?;
        let c = classify_torso(&tg).ok_or_else(|| {
            DecompError::Contract(format!("torso at node {t} could not be classified"))
        })?;
        class.insert(t, c);
    }
    Ok(TriconnectedDecomposition { td, class })
}
