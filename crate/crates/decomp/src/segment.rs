use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{Elem, NodeId, NodeKind, SegmentedDecomposition, TreeDecomposition};

/// Turns a decomposition into a segmented one.
///
/// Edges whose bags are nested are contracted first, scanning edges in
/// `(parent, child)` order and keeping the parent's id with the larger bag.
/// Every remaining edge then gets an a-node holding the intersection of its
/// endpoints' bags; a-nodes with equal bags at a common endpoint are merged.
/// New ids start after the largest id of `d`.
pub fn segment(d: &TreeDecomposition) -> SegmentedDecomposition {
    let mut bags = d.bags().clone();
    let mut parent: BTreeMap<NodeId, NodeId> = d.edges().map(|(p, c)| (c, p)).collect();
    while let Some((c, p)) = parent
        .iter()
        .map(|(&c, &p)| (c, p))
        .filter(|(c, p)| bags[c].is_subset(&bags[p]) || bags[p].is_subset(&bags[c]))
        .min_by_key(|&(c, p)| (p, c))
    {
        let bc = bags.remove(&c).expect("live node");
        if bc.len() > bags[&p].len() {
            bags.insert(p, bc);
        }
        parent.remove(&c);
        for q in parent.values_mut() {
            if *q == c {
                *q = p;
            }
        }
    }

    let edges: Vec<(NodeId, NodeId)> = {
        let mut e: Vec<_> = parent.iter().map(|(&c, &p)| (p, c)).collect();
        e.sort_unstable();
        e
    };
    let meet = |(p, c): (NodeId, NodeId)| -> BTreeSet<Elem> {
        bags[&p].intersection(&bags[&c]).copied().collect()
    };
    // union-find over edge indices
    let mut class: Vec<usize> = (0..edges.len()).collect();
    fn find(class: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while class[r] != r {
            r = class[r];
        }
        class[i] = r;
        r
    }
    let mut at: BTreeMap<(NodeId, BTreeSet<Elem>), usize> = BTreeMap::new();
    for (i, &e) in edges.iter().enumerate() {
        let m = meet(e);
        for end in [e.0, e.1] {
            match at.get(&(end, m.clone())) {
                Some(&j) => {
                    let (a, b) = (find(&mut class, i), find(&mut class, j));
                    class[a.max(b)] = a.min(b);
                }
                None => {
                    at.insert((end, m.clone()), i);
                }
            }
        }
    }

    let mut next = d.nodes().max().map_or(0, |m| m + 1);
    let mut kind: BTreeMap<NodeId, NodeKind> = bags.keys().map(|&t| (t, NodeKind::B)).collect();
    let mut a_node: BTreeMap<usize, NodeId> = BTreeMap::new();
    let mut tree_edges = BTreeSet::new();
    for (i, &e) in edges.iter().enumerate() {
        let r = find(&mut class, i);
        let v = *a_node.entry(r).or_insert_with(|| {
            let v = next;
            next += 1;
            v
        });
        kind.insert(v, NodeKind::A);
        tree_edges.insert((e.0, v));
        tree_edges.insert((e.1, v));
    }
    let a_bags: Vec<(NodeId, BTreeSet<Elem>)> =
        a_node.iter().map(|(&r, &v)| (v, meet(edges[r]))).collect();
    bags.extend(a_bags);
    let td = TreeDecomposition::from_undirected(d.root(), bags, tree_edges)
        .expect("segmentation preserves the tree shape");
    SegmentedDecomposition::new(td, kind).expect("every node has a kind")
}
