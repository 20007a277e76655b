use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{induced, Elem, NodeId, SegmentedDecomposition, Structure, TreeDecomposition};

use crate::otxx::safe_offset;
use crate::{Otxx, OtxxError, Result};

/// `A_t**`: the substructure induced by the cone of `t` and the subtree
/// rooted at `t`. Node ids and the offset are kept.
pub fn sub_otxx(x: &Otxx, t: NodeId) -> Result<Otxx> {
    let td = &x.tree().td;
    if !td.contains_node(t) {
        return Err(OtxxError::UnknownNode(t));
    }
    if t == x.root() {
        return Ok(x.clone());
    }
    let nodes = td.subtree(t);
    let bags = nodes.iter().map(|&u| (u, td.bags()[&u].clone())).collect();
    let edges: Vec<_> = nodes.iter().skip(1).map(|&u| (td.parent(u).expect("below t"), u)).collect();
    let sub_td = TreeDecomposition::new(t, bags, edges)?;
    let kind = nodes.iter().map(|&u| (u, x.tree().kind(u))).collect();
    let tree = SegmentedDecomposition::new(sub_td, kind)?;
    let orders = nodes
        .iter()
        .map(|&u| (u, x.bag_orders()[&u].clone()))
        .collect();
    let base = induced(x.base(), x.gamma(t)?)?;
    Otxx::new(base, tree, orders, x.sigma(t)?.to_vec(), x.k(), x.offset())
}

/// `A_(t)**`: the `τ**`-structure induced by `β(t)` and the children of `t`.
pub fn local_structure(x: &Otxx, t: NodeId) -> Result<Structure> {
    let td = &x.tree().td;
    let bag = td.bag(t).map_err(|_| OtxxError::UnknownNode(t))?;
    let mut keep: BTreeSet<u32> = bag.clone();
    keep.insert(x.node_item(t));
    keep.extend(td.children(t).iter().map(|&c| x.node_item(c)));
    Ok(induced(&x.to_structure(), &keep)?)
}

/// Which part of the interface must agree for a replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interface {
    /// The `τ**`-structures induced on `{t} ∪ σ(t)`.
    Full,
    /// Node kinds and the base structures induced on `σ(t)`.
    Base,
}

/// Result of [`replace`] with the renaming applied to the inserted part.
#[derive(Debug, Clone)]
pub struct Replaced {
    pub otxx: Otxx,
    /// Elements of the inserted sub-otxx to their ids in the result.
    pub elems: BTreeMap<Elem, Elem>,
    /// Nodes of the inserted sub-otxx to their ids in the result.
    pub nodes: BTreeMap<NodeId, NodeId>,
}

/// Replaces the sub-otxx at `t` by `b`, gluing `{root_b} ∪ σ(root_b)` onto
/// `{t} ∪ σ(t)` in increasing order. The rest of `b` gets fresh ids.
pub fn replace(x: &Otxx, t: NodeId, b: &Otxx, check: Interface) -> Result<Replaced> {
    let td = &x.tree().td;
    let sx = x.sigma(t)?.to_vec();
    let sb = b.root_sep().to_vec();
    if sx.len() != sb.len() {
        return Err(OtxxError::Contract(format!(
            "interface sizes differ: {} vs {}",
            sx.len(),
            sb.len()
        )));
    }
    if x.kind(t)? != b.kind(b.root())? {
        return Err(OtxxError::Contract("root kinds differ".into()));
    }
    if x.base().vocabulary() != b.base().vocabulary() {
        return Err(OtxxError::Contract("vocabularies differ".into()));
    }
    let glue: BTreeMap<Elem, Elem> = sb.iter().copied().zip(sx.iter().copied()).collect();
    match check {
        Interface::Full => {
            if x.k() != b.k() {
                return Err(OtxxError::Contract("adhesion bounds differ".into()));
            }
            let mut gx: BTreeMap<u32, u32> = glue.clone();
            gx.insert(b.node_item(b.root()), x.node_item(t));
            let side = |o: &Otxx, root: NodeId, sep: &[Elem]| -> Result<Structure> {
                let mut s: BTreeSet<u32> = sep.iter().copied().collect();
                s.insert(o.node_item(root));
                Ok(induced(&o.to_structure(), &s)?)
            };
            let ix = side(x, t, &sx)?;
            let ib = side(b, b.root(), &sb)?.rename(&gx);
            if ix != ib {
                return Err(OtxxError::Contract("interfaces are not isomorphic".into()));
            }
        }
        Interface::Base => {
            let ix = induced(x.base(), &sx.iter().copied().collect())?;
            let ib = induced(b.base(), &sb.iter().copied().collect())?.rename(&glue);
            if ix != ib {
                return Err(OtxxError::Contract("interfaces are not isomorphic".into()));
            }
        }
    }
    let sx_set: BTreeSet<Elem> = sx.iter().copied().collect();
    let gone_elems: BTreeSet<Elem> = x.gamma(t)?.difference(&sx_set).copied().collect();
    let gone_nodes: BTreeSet<NodeId> = td.subtree(t).into_iter().skip(1).collect();
    let mut next_e = x.elements().last().map_or(0, |m| m + 1);
    let mut next_n = td.nodes().max().map_or(0, |m| m + 1);
    let mut emap = glue;
    for &v in b.elements() {
        emap.entry(v).or_insert_with(|| {
            next_e += 1;
            next_e - 1
        });
    }
    let mut nmap = BTreeMap::from([(b.root(), t)]);
    for u in b.tree().td.nodes() {
        nmap.entry(u).or_insert_with(|| {
            next_n += 1;
            next_n - 1
        });
    }
    let moved = b.rename_raw(&emap, &nmap);

    let mut base = Structure::with_universe(
        x.base().vocabulary().clone(),
        x.elements()
            .difference(&gone_elems)
            .chain(moved.base.universe())
            .copied(),
    );
    for (i, tuple) in x.base().tuples().chain(moved.base.tuples()) {
        if tuple.iter().all(|v| !gone_elems.contains(v)) {
            let name = &x.base().vocabulary().symbols()[i].name;
            base.insert(name, tuple.clone())?;
        }
    }
    let mut bags = BTreeMap::new();
    let mut orders = BTreeMap::new();
    let mut kind = BTreeMap::new();
    let mut edges = Vec::new();
    for u in td.nodes().filter(|u| !gone_nodes.contains(u) && *u != t) {
        bags.insert(u, td.bags()[&u].clone());
        orders.insert(u, x.bag_orders()[&u].clone());
        kind.insert(u, x.tree().kind(u));
    }
    for (p, c) in td.edges() {
        if !gone_nodes.contains(&c) {
            edges.push((p, c));
        }
    }
    for (u, bag) in moved.bags {
        bags.insert(u, bag);
    }
    orders.extend(moved.orders);
    kind.extend(moved.kind);
    edges.extend(moved.edges);
    let new_td = TreeDecomposition::new(td.root(), bags, edges)?;
    let tree = SegmentedDecomposition::new(new_td, kind)?;
    let offset = safe_offset(&base, &tree, x.offset());
    let otxx = Otxx::new(base, tree, orders, x.root_sep().to_vec(), x.k(), offset)?;
    Ok(Replaced {
        otxx,
        elems: emap,
        nodes: nmap,
    })
}

/// Parts of a renamed otxx before reassembly.
pub(crate) struct RawParts {
    pub base: Structure,
    pub bags: BTreeMap<NodeId, BTreeSet<Elem>>,
    pub orders: BTreeMap<NodeId, Vec<Elem>>,
    pub kind: BTreeMap<NodeId, oimso_core::NodeKind>,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Otxx {
    pub(crate) fn rename_raw(
        &self,
        elems: &BTreeMap<Elem, Elem>,
        nodes: &BTreeMap<NodeId, NodeId>,
    ) -> RawParts {
        let e = |v: &Elem| *elems.get(v).unwrap_or(v);
        let nd = |t: &NodeId| *nodes.get(t).unwrap_or(t);
        let td = &self.tree().td;
        RawParts {
            base: self.base().rename(elems),
            bags: td
                .bags()
                .iter()
                .map(|(t, b)| (nd(t), b.iter().map(e).collect()))
                .collect(),
            orders: self
                .bag_orders()
                .iter()
                .map(|(t, o)| (nd(t), o.iter().map(e).collect()))
                .collect(),
            kind: self.tree().kind.iter().map(|(t, k)| (nd(t), *k)).collect(),
            edges: td.edges().map(|(p, c)| (nd(&p), nd(&c))).collect(),
        }
    }
}
