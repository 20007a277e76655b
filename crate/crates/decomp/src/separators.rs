use std::collections::BTreeSet;

use oimso_core::{Elem, Graph};
use serde::Serialize;

/// A clique whose removal disconnects the graph. `witness` holds one vertex
/// from each of two different components of `G - vertices`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CliqueSeparator {
    pub vertices: BTreeSet<Elem>,
    pub witness: (Elem, Elem),
}

impl CliqueSeparator {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// All cliques of at most `max` vertices, by size and then lexicographically.
pub(crate) fn cliques(g: &Graph, max: usize) -> Vec<BTreeSet<Elem>> {
    fn grow(
        g: &Graph,
        cur: &mut Vec<Elem>,
        cands: &[Elem],
        max: usize,
        out: &mut Vec<BTreeSet<Elem>>,
    ) {
        out.push(cur.iter().copied().collect());
        if cur.len() == max {
            return;
        }
        for (i, &v) in cands.iter().enumerate() {
            let next: Vec<Elem> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&w| g.has_edge(v, w))
                .collect();
            cur.push(v);
            grow(g, cur, &next, max, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let all: Vec<Elem> = g.vertices().collect();
    grow(g, &mut Vec::new(), &all, max, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn separation(g: &Graph, s: &BTreeSet<Elem>) -> Option<CliqueSeparator> {
    let comps = g.without(s).components();
    if comps.len() < 2 {
        return None;
    }
    let first = |c: &BTreeSet<Elem>| *c.first().expect("components are non-empty");
    Some(CliqueSeparator {
        vertices: s.clone(),
        witness: (first(&comps[0]), first(&comps[1])),
    })
}

/// Every clique `S` with `|S| <= c` such that `G - S` is disconnected,
/// including the empty set for a disconnected graph.
pub fn clique_separators(g: &Graph, c: usize) -> Vec<CliqueSeparator> {
    cliques(g, c)
        .iter()
        .filter_map(|s| separation(g, s))
        .collect()
}

/// The first clique separator of size at most `c`, if any.
pub(crate) fn first_clique_separator(g: &Graph, c: usize) -> Option<CliqueSeparator> {
    cliques(g, c).iter().find_map(|s| separation(g, s))
}

/// Connected and without clique separators of size at most `c`.
pub fn is_c_atom(g: &Graph, c: usize) -> bool {
    g.is_connected() && first_clique_separator(g, c).is_none()
}

/// Connected and without any clique separator.
pub fn is_atom(g: &Graph) -> bool {
    is_c_atom(g, g.vertex_count())
}
