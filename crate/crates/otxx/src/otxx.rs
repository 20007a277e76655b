use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{
    validate_decomposition, Elem, NodeId, NodeKind, SegmentedDecomposition, Structure, Vocabulary,
};

use crate::{OtxxError, Result};

/// Member of the merged universe of an otxx.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Elem(Elem),
    Node(NodeId),
}

/// An expanded ordered tree extension, or a sub-otxx when `root_sep` is
/// nonempty.
///
/// Elements keep their ids in the merged universe; node `t` becomes
/// `offset + t`. `root_sep` lists the separator of the root in the order
/// inherited from the enclosing otxx; those elements precede all others.
#[derive(Debug, Clone)]
pub struct Otxx {
    base: Structure,
    tree: SegmentedDecomposition,
    bag_orders: BTreeMap<NodeId, Vec<Elem>>,
    root_sep: Vec<Elem>,
    k: usize,
    offset: u32,
    d: Derived,
}

/// Equality up to the placement of node ids in the merged universe.
impl PartialEq for Otxx {
    fn eq(&self, o: &Self) -> bool {
        self.base == o.base
            && self.tree == o.tree
            && self.bag_orders == o.bag_orders
            && self.root_sep == o.root_sep
            && self.k == o.k
    }
}

impl Eq for Otxx {}

#[derive(Debug, Clone)]
struct Derived {
    /// Separators sorted by the partial order.
    sigma: BTreeMap<NodeId, Vec<Elem>>,
    gamma: BTreeMap<NodeId, BTreeSet<Elem>>,
    top: BTreeMap<Elem, NodeId>,
    /// Children in sibling order at b-nodes, by id at a-nodes.
    siblings: BTreeMap<NodeId, Vec<NodeId>>,
    /// Nodes strictly above each node in the partial order.
    above: BTreeMap<NodeId, BTreeSet<NodeId>>,
    /// Position of each element in the bag order of every bag holding it.
    bag_pos: BTreeMap<NodeId, BTreeMap<Elem, usize>>,
}

pub(crate) const RESERVED_ORDER: [(&str, usize); 10] = [
    ("V_S", 1),
    ("V_T", 1),
    ("E_T", 2),
    ("R_beta", 2),
    ("R_ord", 3),
    ("V_a", 1),
    ("V_b", 1),
    ("R_gamma", 2),
    ("R_sigma", 2),
    ("prec", 2),
];

impl Otxx {
    /// Checks all invariants and computes the derived relations.
    pub fn new(
        base: Structure,
        tree: SegmentedDecomposition,
        bag_orders: BTreeMap<NodeId, Vec<Elem>>,
        root_sep: Vec<Elem>,
        k: usize,
        offset: u32,
    ) -> Result<Self> {
        let td = &tree.td;
        if let Some(s) = base.vocabulary().symbols().iter().find(|s| oimso_core::is_reserved(&s.name)) {
            return Err(OtxxError::Invalid(format!("base uses reserved symbol `{}`", s.name)));
        }
        let report = validate_decomposition(&base, td);
        if !report.ok {
            return Err(OtxxError::Invalid(format!(
                "not a tree decomposition of the base: {:?}",
                report.violations
            )));
        }
        if let Some(v) = tree.segmentation_violations().into_iter().next() {
            return Err(OtxxError::Invalid(format!("not segmented: {v}")));
        }
        for t in td.nodes() {
            let order = bag_orders
                .get(&t)
                .ok_or_else(|| OtxxError::Invalid(format!("node {t} has no bag order")))?;
            let set: BTreeSet<Elem> = order.iter().copied().collect();
            if set.len() != order.len() || &set != td.bag(t)? {
                return Err(OtxxError::Invalid(format!("order of node {t} is not a permutation of its bag")));
            }
        }
        if let Some(t) = bag_orders.keys().find(|t| !td.contains_node(**t)) {
            return Err(OtxxError::UnknownNode(*t));
        }
        let root = td.root();
        let sep: BTreeSet<Elem> = root_sep.iter().copied().collect();
        if sep.len() != root_sep.len() || !sep.is_subset(td.bag(root)?) {
            return Err(OtxxError::Invalid("root separator is not a set of root bag elements".into()));
        }
        if tree.kind(root) == NodeKind::A && !sep.is_empty() && &sep != td.bag(root)? {
            return Err(OtxxError::Invalid("separator of an a-node root must be its bag".into()));
        }
        for t in td.nodes() {
            let s = match td.parent(t) {
                Some(p) => td.bag(t)?.intersection(td.bag(p)?).count(),
                None => sep.len(),
            };
            if s > k {
                return Err(OtxxError::Invalid(format!("separator of node {t} has {s} > {k} elements")));
            }
        }
        for t in td.nodes() {
            let id = offset
                .checked_add(t)
                .ok_or_else(|| OtxxError::Capacity("node id overflows the merged universe".into()))?;
            if base.contains(id) {
                return Err(OtxxError::Invalid(format!("node {t} collides with element {id}")));
            }
        }
        let d = Derived::compute(&tree, &bag_orders, &root_sep);
        Ok(Otxx {
            base,
            tree,
            bag_orders,
            root_sep,
            k,
            offset,
            d,
        })
    }

    pub fn base(&self) -> &Structure {
        &self.base
    }

    pub fn tree(&self) -> &SegmentedDecomposition {
        &self.tree
    }

    pub fn root(&self) -> NodeId {
        self.tree.td.root()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn bag_orders(&self) -> &BTreeMap<NodeId, Vec<Elem>> {
        &self.bag_orders
    }

    pub fn bag_order(&self, t: NodeId) -> Result<&[Elem]> {
        self.bag_orders
            .get(&t)
            .map(Vec::as_slice)
            .ok_or(OtxxError::UnknownNode(t))
    }

    /// Separator of the root; empty for an otxx proper.
    pub fn root_sep(&self) -> &[Elem] {
        &self.root_sep
    }

    pub fn is_sub(&self) -> bool {
        !self.root_sep.is_empty()
    }

    pub fn kind(&self, t: NodeId) -> Result<NodeKind> {
        self.tree.kind.get(&t).copied().ok_or(OtxxError::UnknownNode(t))
    }

    /// `σ(t)` listed in increasing partial order; `S_i(t)` is entry `i - 1`.
    pub fn sigma(&self, t: NodeId) -> Result<&[Elem]> {
        self.d.sigma.get(&t).map(Vec::as_slice).ok_or(OtxxError::UnknownNode(t))
    }

    /// The cone `γ(t)`.
    pub fn gamma(&self, t: NodeId) -> Result<&BTreeSet<Elem>> {
        self.d.gamma.get(&t).ok_or(OtxxError::UnknownNode(t))
    }

    /// The topmost node whose bag contains `v`.
    pub fn top(&self, v: Elem) -> Option<NodeId> {
        self.d.top.get(&v).copied()
    }

    /// Children of `t`: in sibling order at b-nodes, by id at a-nodes.
    pub fn children(&self, t: NodeId) -> Result<&[NodeId]> {
        self.d.siblings.get(&t).map(Vec::as_slice).ok_or(OtxxError::UnknownNode(t))
    }

    pub fn node_item(&self, t: NodeId) -> u32 {
        self.offset + t
    }

    pub fn item(&self, x: u32) -> Option<Item> {
        if self.base.contains(x) {
            return Some(Item::Elem(x));
        }
        x.checked_sub(self.offset)
            .filter(|t| self.tree.td.contains_node(*t))
            .map(Item::Node)
    }

    pub fn item_id(&self, i: Item) -> u32 {
        match i {
            Item::Elem(e) => e,
            Item::Node(t) => self.node_item(t),
        }
    }

    pub fn elements(&self) -> &BTreeSet<Elem> {
        self.base.universe()
    }

    /// Merged universe: nodes then elements, each by id.
    pub fn items(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.tree.td.nodes().map(|t| self.node_item(t)).collect();
        out.extend(self.base.universe().iter().copied());
        out
    }

    pub fn len(&self) -> usize {
        self.tree.td.len() + self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Strict partial order on nodes.
    pub fn node_less(&self, u: NodeId, w: NodeId) -> bool {
        self.d.above.get(&u).is_some_and(|s| s.contains(&w))
    }

    /// Strict partial order on elements.
    pub fn elem_less(&self, v: Elem, w: Elem) -> bool {
        if v == w {
            return false;
        }
        let rs = |x: Elem| self.root_sep.iter().position(|&y| y == x);
        match (rs(v), rs(w)) {
            (Some(i), Some(j)) => return i < j,
            (Some(_), None) => return true,
            (None, Some(_)) => return false,
            (None, None) => {}
        }
        let (Some(&tv), Some(&tw)) = (self.d.top.get(&v), self.d.top.get(&w)) else {
            return false;
        };
        if tv == tw {
            let pos = &self.d.bag_pos[&tv];
            pos[&v] < pos[&w]
        } else {
            self.node_less(tv, tw)
        }
    }

    /// Strict partial order on the merged universe.
    pub fn less(&self, x: u32, y: u32) -> bool {
        match (self.item(x), self.item(y)) {
            (Some(Item::Node(u)), Some(Item::Node(w))) => self.node_less(u, w),
            (Some(Item::Elem(v)), Some(Item::Elem(w))) => self.elem_less(v, w),
            (Some(Item::Node(_)), Some(Item::Elem(_))) => true,
            _ => false,
        }
    }

    /// `x ⪯ y`.
    pub fn prec(&self, x: u32, y: u32) -> bool {
        (x == y && self.item(x).is_some()) || self.less(x, y)
    }

    /// The vocabulary `τ**` for this otxx.
    pub fn vocabulary(&self) -> Vocabulary {
        expanded_vocabulary(self.base.vocabulary(), self.k)
    }

    /// The expansion as a single structure over the merged universe.
    pub fn to_structure(&self) -> Structure {
        let td = &self.tree.td;
        let mut s = Structure::with_universe(self.vocabulary(), self.items());
        let n = |t: NodeId| self.node_item(t);
        let mut put = |name: &str, tuple: Vec<u32>| {
            s.insert(name, tuple).expect("expanded vocabulary");
        };
        for (i, tuple) in self.base.tuples() {
            put(&self.base.vocabulary().symbols()[i].name, tuple.clone());
        }
        for &v in self.base.universe() {
            put("V_S", vec![v]);
        }
        for t in td.nodes() {
            put("V_T", vec![n(t)]);
            put(
                match self.tree.kind(t) {
                    NodeKind::A => "V_a",
                    NodeKind::B => "V_b",
                },
                vec![n(t)],
            );
            for &c in td.children(t) {
                put("E_T", vec![n(t), n(c)]);
            }
            let order = &self.bag_orders[&t];
            for (i, &v) in order.iter().enumerate() {
                put("R_beta", vec![n(t), v]);
                for &w in &order[i..] {
                    put("R_ord", vec![n(t), v, w]);
                }
            }
            for &v in &self.d.gamma[&t] {
                put("R_gamma", vec![n(t), v]);
            }
            for (i, &v) in self.d.sigma[&t].iter().enumerate() {
                put("R_sigma", vec![n(t), v]);
                put(&format!("S_{}", i + 1), vec![n(t), v]);
            }
        }
        let items = self.items();
        for &x in &items {
            for &y in &items {
                if self.prec(x, y) {
                    put("prec", vec![x, y]);
                }
            }
        }
        s
    }

    /// Same otxx with elements and nodes renamed injectively. Unmapped ids
    /// are kept. The offset is raised if a node would collide with an
    /// element.
    pub fn rename(
        &self,
        elems: &BTreeMap<Elem, Elem>,
        nodes: &BTreeMap<NodeId, NodeId>,
    ) -> Result<Otxx> {
        let raw = self.rename_raw(elems, nodes);
        if raw.base.len() != self.base.len() || raw.bags.len() != self.tree.td.len() {
            return Err(OtxxError::Contract("renaming is not injective".into()));
        }
        let root = *nodes.get(&self.root()).unwrap_or(&self.root());
        let td = oimso_core::TreeDecomposition::new(root, raw.bags, raw.edges)?;
        let tree = SegmentedDecomposition::new(td, raw.kind)?;
        let offset = safe_offset(&raw.base, &tree, self.offset);
        let root_sep = self
            .root_sep
            .iter()
            .map(|v| *elems.get(v).unwrap_or(v))
            .collect();
        Otxx::new(raw.base, tree, raw.orders, root_sep, self.k, offset)
    }
}

/// `offset` if no node collides with an element, else one past the
/// largest element.
pub(crate) fn safe_offset(base: &Structure, tree: &SegmentedDecomposition, offset: u32) -> u32 {
    let clash = tree
        .td
        .nodes()
        .any(|t| offset.checked_add(t).is_none_or(|x| base.contains(x)));
    if clash {
        base.universe().last().map_or(0, |m| m + 1)
    } else {
        offset
    }
}

/// `τ ∪ {V_S, V_T, E_T, R_beta, R_ord, V_a, V_b, R_gamma, R_sigma, prec,
/// S_1..S_k}`.
pub fn expanded_vocabulary(tau: &Vocabulary, k: usize) -> Vocabulary {
    let mut syms: Vec<(String, usize)> = tau
        .symbols()
        .iter()
        .map(|s| (s.name.clone(), s.arity))
        .collect();
    syms.extend(RESERVED_ORDER.iter().map(|&(n, a)| (n.to_string(), a)));
    syms.extend((1..=k).map(|i| (format!("S_{i}"), 2)));
    Vocabulary::extended(syms).expect("reserved names are absent from a user vocabulary")
}

impl Derived {
    fn compute(
        tree: &SegmentedDecomposition,
        orders: &BTreeMap<NodeId, Vec<Elem>>,
        root_sep: &[Elem],
    ) -> Self {
        let td = &tree.td;
        let root = td.root();
        let bag_pos: BTreeMap<NodeId, BTreeMap<Elem, usize>> = orders
            .iter()
            .map(|(&t, o)| (t, o.iter().enumerate().map(|(i, &v)| (v, i)).collect()))
            .collect();
        let mut top = BTreeMap::new();
        for t in td.subtree(root) {
            for &v in td.bags()[&t].iter() {
                top.entry(v).or_insert(t);
            }
        }
        let mut gamma: BTreeMap<NodeId, BTreeSet<Elem>> = BTreeMap::new();
        for t in td.postorder() {
            let mut g = td.bags()[&t].clone();
            for c in td.children(t) {
                g.extend(gamma[c].iter().copied());
            }
            gamma.insert(t, g);
        }
        let mut siblings = BTreeMap::new();
        for t in td.nodes() {
            let mut cs = td.children(t).to_vec();
            if tree.kind(t) == NodeKind::B {
                let pos = &bag_pos[&t];
                let key = |u: &NodeId| {
                    let mut k: Vec<usize> = td.bags()[u]
                        .intersection(&td.bags()[&t])
                        .map(|v| pos[v])
                        .collect();
                    k.sort_unstable();
                    k
                };
                cs.sort_by_key(key);
            }
            siblings.insert(t, cs);
        }
        let mut above: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for t in td.nodes() {
            let mut s: BTreeSet<NodeId> = td.subtree(t).into_iter().skip(1).collect();
            if let Some(p) = td.parent(t) {
                if tree.kind(p) == NodeKind::B {
                    let sib: &Vec<NodeId> = &siblings[&p];
                    let i = sib.iter().position(|&u| u == t).expect("child of parent");
                    for &y in &sib[i + 1..] {
                        s.extend(td.subtree(y));
                    }
                }
            }
            above.insert(t, s);
        }
        let mut d = Derived {
            sigma: BTreeMap::new(),
            gamma,
            top,
            siblings,
            above,
            bag_pos,
        };
        let rs_pos = |x: Elem| root_sep.iter().position(|&y| y == x);
        for t in td.nodes() {
            let mut s: Vec<Elem> = match td.parent(t) {
                Some(p) => td.bags()[&t].intersection(&td.bags()[&p]).copied().collect(),
                None => root_sep.to_vec(),
            };
            if td.parent(t).is_some() {
                s.sort_by(|&v, &w| d.cmp_elems(v, w, &rs_pos));
            }
            d.sigma.insert(t, s);
        }
        d
    }

    /// Comparison of two elements of one separator, where the order is linear.
    fn cmp_elems(&self, v: Elem, w: Elem, rs: &dyn Fn(Elem) -> Option<usize>) -> Ordering {
        match (rs(v), rs(w)) {
            (Some(i), Some(j)) => return i.cmp(&j),
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (None, None) => {}
        }
        let (tv, tw) = (self.top[&v], self.top[&w]);
        if tv == tw {
            self.bag_pos[&tv][&v].cmp(&self.bag_pos[&tv][&w])
        } else if self.above[&tv].contains(&tw) {
            Ordering::Less
        } else if self.above[&tw].contains(&tv) {
            Ordering::Greater
        } else {
            v.cmp(&w)
        }
    }
}
