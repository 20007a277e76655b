use std::collections::{BTreeMap, BTreeSet, HashSet};

use oimso_core::{metrics, Elem, Graph, NodeId, TreeDecomposition};
use serde::Serialize;

use crate::separators::{clique_separators, first_clique_separator};
use crate::{treewidth_exact, DecompError, Result, TREEWIDTH_ORACLE_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Atom,
    Separator,
}

/// A tree decomposition whose nodes are marked as atom or separator nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomDecomposition {
    pub td: TreeDecomposition,
    pub role: BTreeMap<NodeId, Role>,
}

impl AtomDecomposition {
    pub fn role(&self, t: NodeId) -> Role {
        self.role[&t]
    }

    pub fn atoms(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.role
            .iter()
            .filter(|(_, r)| **r == Role::Atom)
            .map(|(t, _)| *t)
    }

    pub fn separators(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.role
            .iter()
            .filter(|(_, r)| **r == Role::Separator)
            .map(|(t, _)| *t)
    }

    /// Edges joining two nodes of the same role.
    fn same_role_edge(&self) -> Option<(NodeId, NodeId)> {
        self.td
            .edges()
            .find(|(p, c)| self.role(*p) == self.role(*c))
    }
}

/// Root atom for the first component, an empty separator below it and
/// one atom per further component below that. Components are ordered by
/// smallest vertex.
pub fn components_decomposition(g: &Graph) -> AtomDecomposition {
    let comps = g.components();
    if comps.is_empty() {
        return AtomDecomposition {
            td: TreeDecomposition::single(BTreeSet::new()),
            role: BTreeMap::from([(0, Role::Separator)]),
        };
    }
    let mut bags = BTreeMap::from([(0, comps[0].clone()), (1, BTreeSet::new())]);
    let mut role = BTreeMap::from([(0, Role::Atom), (1, Role::Separator)]);
    let mut edges = vec![(0, 1)];
    for (i, c) in comps.iter().enumerate().skip(1) {
        let t = i as NodeId + 1;
        bags.insert(t, c.clone());
        role.insert(t, Role::Atom);
        edges.push((1, t));
    }
    let td = TreeDecomposition::new(0, bags, edges).expect("star shaped tree");
    AtomDecomposition { td, role }
}

/// The maximal vertex sets inducing `c`-atoms, in canonical order.
pub fn maximal_c_atoms(g: &Graph, c: usize) -> Vec<BTreeSet<Elem>> {
    fn split(
        g: &Graph,
        w: BTreeSet<Elem>,
        c: usize,
        seen: &mut HashSet<BTreeSet<Elem>>,
        out: &mut BTreeSet<BTreeSet<Elem>>,
    ) {
        if w.is_empty() || !seen.insert(w.clone()) {
            return;
        }
        let h = g.induced(&w);
        if !h.is_connected() {
            for comp in h.components() {
                split(g, comp, c, seen, out);
            }
        } else if let Some(s) = first_clique_separator(&h, c) {
            for comp in h.without(&s.vertices).components() {
                let piece = comp.union(&s.vertices).copied().collect();
                split(g, piece, c, seen, out);
            }
        } else {
            out.insert(w);
        }
    }
    let mut found = BTreeSet::new();
    split(g, g.vertex_set(), c, &mut HashSet::new(), &mut found);
    found
        .iter()
        .filter(|a| !found.iter().any(|b| b != *a && a.is_subset(b)))
        .cloned()
        .collect()
}

/// Splits a `(c-1)`-atom along its `c`-clique separators.
pub fn decompose_step(g: &Graph, c: usize) -> Result<AtomDecomposition> {
    decompose_step_at(g, c, &BTreeSet::new(), 0)
}

/// As [`decompose_step`], rooted at the first atom containing `hint` and
/// numbering nodes from `first`.
pub(crate) fn decompose_step_at(
    g: &Graph,
    c: usize,
    hint: &BTreeSet<Elem>,
    first: NodeId,
) -> Result<AtomDecomposition> {
    if c == 0 {
        return Err(DecompError::Contract("step size must be at least 1".into()));
    }
    if !g.is_connected() {
        return Err(DecompError::Contract(
            "graph is not connected (the empty set separates it)".into(),
        ));
    }
    if let Some(s) = first_clique_separator(g, c - 1) {
        return Err(DecompError::Contract(format!(
            "graph is not a {}-atom: clique separator {:?}",
            c - 1,
            s.vertices
        )));
    }
    let atoms = maximal_c_atoms(g, c);
    let seps = clique_separators(g, c);
    let mut bags = BTreeMap::new();
    let mut role = BTreeMap::new();
    let mut id = first;
    for a in &atoms {
        bags.insert(id, a.clone());
        role.insert(id, Role::Atom);
        id += 1;
    }
    let mut edges = Vec::new();
    for s in &seps {
        bags.insert(id, s.vertices.clone());
        role.insert(id, Role::Separator);
        for (k, a) in atoms.iter().enumerate() {
            if s.vertices.is_subset(a) {
                edges.push((first + k as NodeId, id));
            }
        }
        id += 1;
    }
    let root = atoms
        .iter()
        .position(|a| hint.is_subset(a))
        .ok_or_else(|| DecompError::Contract(format!("no atom contains {hint:?}")))?;
    let td = TreeDecomposition::from_undirected(first + root as NodeId, bags, edges)?;
    Ok(AtomDecomposition { td, role })
}

/// Replaces every atom node whose bag has a `c`-clique separator by the
/// decomposition step of its bag.
pub fn refine(g: &Graph, d: &AtomDecomposition, c: usize) -> Result<AtomDecomposition> {
    if let Some((p, ch)) = d.same_role_edge() {
        return Err(DecompError::Contract(format!(
            "nodes {p} and {ch} have the same role"
        )));
    }
    let td = &d.td;
    let mut bags = td.bags().clone();
    let mut role = d.role.clone();
    let mut edges: BTreeSet<(NodeId, NodeId)> = td.edges().collect();
    let mut root = td.root();
    let mut next = td.nodes().max().map_or(0, |m| m + 1);
    for t in d.atoms() {
        let bag = td.bag(t)?;
        let h = g.induced(bag);
        if h.vertex_count() != bag.len() {
            return Err(DecompError::Contract(format!("bag of node {t} has unknown vertices")));
        }
        if first_clique_separator(&h, c).is_none() {
            continue;
        }
        let hint = match td.parent(t) {
            Some(p) => td.bag(p)?.clone(),
            None => BTreeSet::new(),
        };
        let piece = decompose_step_at(&h, c, &hint, next)?;
        next += piece.td.len() as NodeId;
        bags.remove(&t);
        role.remove(&t);
        bags.extend(piece.td.bags().iter().map(|(k, v)| (*k, v.clone())));
        role.extend(piece.role.iter().map(|(k, v)| (*k, *v)));
        edges.extend(piece.td.edges());
        if let Some(p) = td.parent(t) {
            edges.remove(&(p, t));
            edges.insert((p, piece.td.root()));
        } else {
            root = piece.td.root();
        }
        for &s in td.children(t) {
            let sb = td.bag(s)?;
            let top = piece
                .atoms()
                .filter(|u| sb.is_subset(&piece.td.bags()[u]))
                .min_by_key(|&u| (piece.td.depth(u), u))
                .ok_or_else(|| {
                    DecompError::Contract(format!("no new atom contains the bag of node {s}"))
                })?;
            edges.remove(&(t, s));
            edges.insert((top, s));
        }
    }
    let td = TreeDecomposition::new(root, bags, edges)?;
    Ok(AtomDecomposition { td, role })
}

/// Decomposition whose atom bags induce atoms and whose separators are
/// cliques of size at most `k + 1`, for graphs of treewidth at most `k`.
///
/// The treewidth bound is verified exactly for small graphs and trusted
/// otherwise; an adhesion above `k + 1` in the result is reported as an
/// error.
pub fn atom_decomposition(g: &Graph, k: usize) -> Result<AtomDecomposition> {
    if g.vertex_count() <= TREEWIDTH_ORACLE_MAX {
        let tw = treewidth_exact(g)?;
        if tw > k {
            return Err(DecompError::Treewidth { tw, k });
        }
    }
    let mut d = components_decomposition(g);
    for c in 1..=k + 1 {
        d = refine(g, &d, c)?;
    }
    let adhesion = metrics(&d.td).adhesion;
    if adhesion > k + 1 {
        return Err(DecompError::Contract(format!(
            "adhesion {adhesion} exceeds {}; treewidth bound does not hold",
            k + 1
        )));
    }
    Ok(d)
}
