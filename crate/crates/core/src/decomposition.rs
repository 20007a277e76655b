use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize, Serializer};

use crate::{gaifman, CoreError, Elem, Graph, NodeId, Result, Structure};

/// Rooted tree with a bag of elements at every node. Children lists are
/// sorted by node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    root: NodeId,
    bags: BTreeMap<NodeId, BTreeSet<Elem>>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
    parent: BTreeMap<NodeId, NodeId>,
}

impl TreeDecomposition {
    /// Builds a decomposition from parent -> child edges. Every node must
    /// carry a bag, and the edges must form a tree rooted at `root`.
    pub fn new(
        root: NodeId,
        bags: BTreeMap<NodeId, BTreeSet<Elem>>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        if !bags.contains_key(&root) {
            return Err(CoreError::UnknownNode(root));
        }
        let mut children: BTreeMap<NodeId, Vec<NodeId>> =
            bags.keys().map(|&t| (t, Vec::new())).collect();
        let mut parent = BTreeMap::new();
        for (p, c) in edges {
            for x in [p, c] {
                if !bags.contains_key(&x) {
                    return Err(CoreError::UnknownNode(x));
                }
            }
            if c == root {
                return Err(CoreError::NotATree(format!("root {root} has a parent")));
            }
            if parent.insert(c, p).is_some() {
                return Err(CoreError::NotATree(format!("node {c} has two parents")));
            }
            children.get_mut(&p).expect("known node").push(c);
        }
        for ch in children.values_mut() {
            ch.sort_unstable();
        }
        let td = TreeDecomposition {
            root,
            bags,
            children,
            parent,
        };
        let reached = td.subtree(root).len();
        if reached != td.bags.len() {
            return Err(CoreError::NotATree(format!(
                "{} of {} nodes reachable from the root",
                reached,
                td.bags.len()
            )));
        }
        Ok(td)
    }

    /// Builds a decomposition from undirected tree edges, orienting them
    /// away from `root`.
    pub fn from_undirected(
        root: NodeId,
        bags: BTreeMap<NodeId, BTreeSet<Elem>>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let mut m = 0;
        for (u, v) in edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
            m += 1;
        }
        if m + 1 != bags.len() {
            return Err(CoreError::NotATree(format!(
                "{} edges for {} nodes",
                m,
                bags.len()
            )));
        }
        let mut directed = Vec::new();
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(v) {
                    directed.push((u, v));
                    queue.push_back(v);
                }
            }
        }
        TreeDecomposition::new(root, bags, directed)
    }

    /// Single node `0` holding `bag`.
    pub fn single(bag: BTreeSet<Elem>) -> Self {
        TreeDecomposition::new(0, BTreeMap::from([(0, bag)]), []).expect("single node")
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bags.keys().copied()
    }

    pub fn contains_node(&self, t: NodeId) -> bool {
        self.bags.contains_key(&t)
    }

    pub fn bags(&self) -> &BTreeMap<NodeId, BTreeSet<Elem>> {
        &self.bags
    }

    pub fn bag(&self, t: NodeId) -> Result<&BTreeSet<Elem>> {
        self.bags.get(&t).ok_or(CoreError::UnknownNode(t))
    }

    pub fn parent(&self, t: NodeId) -> Option<NodeId> {
        self.parent.get(&t).copied()
    }

    pub fn children(&self, t: NodeId) -> &[NodeId] {
        self.children.get(&t).map(|c| c.as_slice()).unwrap_or(&[])
    }

    /// Parent (if any) followed by the children.
    pub fn neighbors(&self, t: NodeId) -> Vec<NodeId> {
        self.parent(t)
            .into_iter()
            .chain(self.children(t).iter().copied())
            .collect()
    }

    /// A node without children.
    pub fn is_leaf(&self, t: NodeId) -> bool {
        self.children(t).is_empty()
    }

    /// Tree edges as `(parent, child)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    /// Nodes of the subtree rooted at `t` in preorder.
    pub fn subtree(&self, t: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children(u).iter().rev());
        }
        out
    }

    /// All nodes, children before parents.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut v = self.subtree(self.root);
        v.reverse();
        v
    }

    /// True if `a` is an ancestor of `b` or equal to it.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut x = Some(b);
        while let Some(y) = x {
            if y == a {
                return true;
            }
            x = self.parent(y);
        }
        false
    }

    pub fn depth(&self, t: NodeId) -> usize {
        let mut d = 0;
        let mut x = t;
        while let Some(p) = self.parent(x) {
            d += 1;
            x = p;
        }
        d
    }

    /// The topmost node whose bag contains `v`.
    pub fn top_node(&self, v: Elem) -> Option<NodeId> {
        self.subtree(self.root)
            .into_iter()
            .find(|t| self.bags[t].contains(&v))
    }

    /// Union of all bags.
    pub fn elements(&self) -> BTreeSet<Elem> {
        self.bags.values().flatten().copied().collect()
    }

    /// Same tree with one bag replaced.
    pub fn with_bag(&self, t: NodeId, bag: BTreeSet<Elem>) -> Result<Self> {
        let mut d = self.clone();
        *d.bags.get_mut(&t).ok_or(CoreError::UnknownNode(t))? = bag;
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    /// Adhesion node.
    #[serde(rename = "a")]
    A,
    /// Bag node.
    #[serde(rename = "b")]
    B,
}

/// A tree decomposition whose nodes are split into a- and b-nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedDecomposition {
    pub td: TreeDecomposition,
    pub kind: BTreeMap<NodeId, NodeKind>,
}

impl SegmentedDecomposition {
    pub fn new(td: TreeDecomposition, kind: BTreeMap<NodeId, NodeKind>) -> Result<Self> {
        if let Some(t) = td.nodes().find(|t| !kind.contains_key(t)) {
            return Err(CoreError::UnknownNode(t));
        }
        if let Some(&t) = kind.keys().find(|t| !td.contains_node(**t)) {
            return Err(CoreError::UnknownNode(t));
        }
        Ok(SegmentedDecomposition { td, kind })
    }

    pub fn kind(&self, t: NodeId) -> NodeKind {
        self.kind[&t]
    }

    /// Violations of the four segmentation conditions, as readable strings.
    pub fn segmentation_violations(&self) -> Vec<String> {
        let td = &self.td;
        let mut out = Vec::new();
        for (p, c) in td.edges() {
            if self.kind(p) == self.kind(c) {
                out.push(format!("edge {p}-{c} joins two nodes of the same kind"));
            }
        }
        for t in td.nodes() {
            let bt = &td.bags[&t];
            let nb = td.neighbors(t);
            for (i, &u1) in nb.iter().enumerate() {
                for &u2 in &nb[i + 1..] {
                    let (b1, b2) = (&td.bags[&u1], &td.bags[&u2]);
                    match self.kind(t) {
                        NodeKind::A => {
                            let meet: BTreeSet<Elem> = b1.intersection(b2).copied().collect();
                            if &meet != bt {
                                out.push(format!(
                                    "a-node {t}: bag differs from the meet of neighbours {u1},{u2}"
                                ));
                            }
                        }
                        NodeKind::B => {
                            let m1: BTreeSet<Elem> = bt.intersection(b1).copied().collect();
                            let m2: BTreeSet<Elem> = bt.intersection(b2).copied().collect();
                            if m1 == m2 {
                                out.push(format!(
                                    "b-node {t}: neighbours {u1},{u2} share the same intersection"
                                ));
                            }
                        }
                    }
                }
            }
            if td.is_leaf(t) && self.kind(t) != NodeKind::B {
                out.push(format!("leaf {t} is an a-node"));
            }
        }
        out
    }

    pub fn is_segmented(&self) -> bool {
        self.segmentation_violations().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// A bag mentions an element outside the universe.
    BagOutsideUniverse { node: NodeId, element: Elem },
    /// No bag contains the tuple.
    Cover { symbol: String, tuple: Vec<Elem> },
    /// The nodes whose bags contain the element are empty or disconnected.
    Connectedness { element: Elem },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks bags, the cover condition and the connectedness condition.
pub fn validate_decomposition(a: &Structure, d: &TreeDecomposition) -> ValidationReport {
    let mut violations = Vec::new();
    for (&t, bag) in &d.bags {
        for &e in bag {
            if !a.contains(e) {
                violations.push(Violation::BagOutsideUniverse { node: t, element: e });
            }
        }
    }
    for (i, tuple) in a.tuples() {
        let covered = d.bags.values().any(|b| tuple.iter().all(|e| b.contains(e)));
        if !covered {
            violations.push(Violation::Cover {
                symbol: a.vocabulary().symbols()[i].name.clone(),
                tuple: tuple.clone(),
            });
        }
    }
    for &v in a.universe() {
        // The nodes holding v form a connected subtree iff exactly one of
        // them has a parent not holding v.
        let tops = d
            .bags
            .iter()
            .filter(|(t, b)| {
                b.contains(&v) && d.parent(**t).is_none_or(|p| !d.bags[&p].contains(&v))
            })
            .count();
        if tops != 1 {
            violations.push(Violation::Connectedness { element: v });
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    /// Maximum bag size minus one; `None` when every bag is empty.
    pub width: Option<usize>,
    /// Maximum intersection of adjacent bags; 0 for a single node.
    pub adhesion: usize,
}

impl Serialize for Metrics {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("Metrics", 2)?;
        match self.width {
            Some(w) => st.serialize_field("width", &w)?,
            None => st.serialize_field("width", "empty")?,
        }
        st.serialize_field("adhesion", &self.adhesion)?;
        st.end()
    }
}

pub fn metrics(d: &TreeDecomposition) -> Metrics {
    let max_bag = d.bags.values().map(|b| b.len()).max().unwrap_or(0);
    let adhesion = d
        .edges()
        .map(|(p, c)| d.bags[&p].intersection(&d.bags[&c]).count())
        .max()
        .unwrap_or(0);
    Metrics {
        width: max_bag.checked_sub(1),
        adhesion,
    }
}

/// `(σ(t), γ(t))`: the separator towards the parent and the cone.
pub fn node_sets(d: &TreeDecomposition, t: NodeId) -> Result<(BTreeSet<Elem>, BTreeSet<Elem>)> {
    let bag = d.bag(t)?;
    let sigma = match d.parent(t) {
        Some(p) => bag.intersection(&d.bags[&p]).copied().collect(),
        None => BTreeSet::new(),
    };
    let gamma = d
        .subtree(t)
        .iter()
        .flat_map(|u| d.bags[u].iter().copied())
        .collect();
    Ok((sigma, gamma))
}

/// The torso at `t`: the Gaifman graph on the bag plus cliques on the
/// intersections with all neighbouring bags.
pub fn torso(a: &Structure, d: &TreeDecomposition, t: NodeId) -> Result<Graph> {
    let bag = d.bag(t)?;
    let mut g = gaifman(a).induced(bag);
    for u in d.neighbors(t) {
        let meet = bag.intersection(&d.bags[&u]).copied().collect();
        g.make_clique(&meet);
    }
    Ok(g)
}
