use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{metrics, Graph, NodeId, NodeKind};
use oimso_decomp::{atom_decomposition, segment, treewidth_exact};
use oimso_otxx::{build_otxx, child_sequences, compatible_orders, sub_otxx, BagOrderProvider, OrderMode, Otxx};
use oimso_types::TypeId;
use serde::{Deserialize, Serialize};

use crate::{ComposeError, Composer, Result, Role, TypePartition};

/// Child node to a nonempty set of candidate types.
pub type CompatibleCover = BTreeMap<NodeId, BTreeSet<TypeId>>;

/// Default bound on the number of partitions refining a cover.
pub const DEFAULT_REFINEMENT_CAP: usize = 4096;
/// Default bound on the number of child orderings tried at an a-node.
pub const DEFAULT_ORDERING_CAP: usize = 720;

/// Output of the order-invariant composition at one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OiSet {
    pub types: BTreeSet<TypeId>,
    /// Partitions refining the cover that were composed.
    pub partitions: usize,
    /// Child orderings tried per partition; above 1 only at a-nodes
    /// with several children, where enumeration replaces the counting
    /// argument.
    pub orderings: usize,
}

impl OiSet {
    pub fn by_enumeration(&self) -> bool {
        self.orderings > 1
    }
}

/// Cover with one type per child.
pub fn cover_of(partition: &TypePartition) -> CompatibleCover {
    partition.iter().map(|(&u, &t)| (u, BTreeSet::from([t]))).collect()
}

fn refinements(children: &[NodeId], cover: &CompatibleCover, cap: usize) -> Result<Vec<TypePartition>> {
    let mut total = 1usize;
    for u in children {
        let set = cover
            .get(u)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| ComposeError::Contract(format!("cover has no types for child {u}")))?;
        total = total.saturating_mul(set.len());
    }
    if cover.len() != children.len() {
        return Err(ComposeError::Contract("cover lists nodes that are not children".into()));
    }
    if total > cap {
        return Err(ComposeError::Capacity(format!("{total} partitions refine the cover (cap {cap})")));
    }
    let mut out = vec![TypePartition::new()];
    for u in children {
        out = out
            .into_iter()
            .flat_map(|p| {
                cover[u].iter().map(move |&t| {
                    let mut p = p.clone();
                    p.insert(*u, t);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

impl Composer<'_> {
    /// Types of the b-node `t` over all partitions refining `cover`.
    pub fn oi_set_b(&self, x: &Otxx, t: NodeId, cover: &CompatibleCover) -> Result<OiSet> {
        if x.kind(t)? != NodeKind::B {
            return Err(ComposeError::KindMismatch { node: t, expected_a: false });
        }
        let parts = refinements(x.children(t)?, cover, DEFAULT_REFINEMENT_CAP)?;
        let mut types = BTreeSet::new();
        for p in &parts {
            types.insert(self.compose_b(x, t, p)?);
        }
        Ok(OiSet {
            types,
            partitions: parts.len(),
            orderings: 1,
        })
    }

    /// Types of the a-node `t` over all orderings of its children and all
    /// partitions refining `cover`.
    pub fn oi_set_a(&self, x: &Otxx, t: NodeId, cover: &CompatibleCover) -> Result<OiSet> {
        if x.kind(t)? != NodeKind::A {
            return Err(ComposeError::KindMismatch { node: t, expected_a: true });
        }
        let children = x.children(t)?;
        let n_orders = (1..=children.len()).try_fold(1usize, |a, b| a.checked_mul(b));
        if n_orders.is_none_or(|n| n > DEFAULT_ORDERING_CAP) {
            return Err(ComposeError::Capacity(format!(
                "{}! child orderings exceed the cap {DEFAULT_ORDERING_CAP}",
                children.len()
            )));
        }
        let parts = refinements(children, cover, DEFAULT_REFINEMENT_CAP)?;
        let orders = permutations(children);
        let mut types = BTreeSet::new();
        for p in &parts {
            for seq in &orders {
                types.insert(self.compose_a(x, t, seq, p)?);
            }
        }
        Ok(OiSet {
            types,
            partitions: parts.len(),
            orderings: orders.len(),
        })
    }

    /// The types realized by `s` under all its compatible orders
    /// (distinct block orders only). Fails beyond `cap` orders.
    pub fn realized_types(&self, s: &Otxx, role: Role, cap: usize) -> Result<BTreeSet<TypeId>> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        for o in compatible_orders(s, OrderMode::Enumerate { cap })? {
            let seqs = child_sequences(s, &o);
            if seen.insert(seqs.clone()) {
                out.insert(self.type_of(s, role, &seqs)?);
            }
        }
        Ok(out)
    }

    /// Compatible-order classes over the sub-otxxs of `corpus` (children
    /// of each node, typed with the interface named): two types are
    /// linked when one sub-otxx realizes both.
    pub fn co_classes_of(&self, corpus: &[Otxx], cap: usize) -> Result<CoClasses> {
        let mut uf = UnionFind::default();
        let mut skipped = 0;
        for x in corpus {
            for t in x.tree().td.nodes() {
                if t == x.root() && !x.is_sub() {
                    continue;
                }
                let s = sub_otxx(x, t)?;
                let types = match self.realized_types(&s, Role::Child, cap) {
                    Ok(ts) => ts,
                    Err(e) if e.is_capacity() => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let mut it = types.into_iter();
                let first = it.next().expect("at least one compatible order");
                uf.add(first);
                for other in it {
                    uf.union(first, other);
                }
            }
        }
        Ok(CoClasses {
            classes: uf.classes(),
            skipped,
        })
    }

    /// [`Composer::co_classes_of`] over every graph with at most
    /// `universe_cap` vertices, decomposed along clique separators with
    /// every bag-order strategy.
    pub fn co_classes(&self, universe_cap: usize, cap: usize) -> Result<CoClasses> {
        self.co_classes_of(&small_otxxs(universe_cap)?, cap)
    }
}

/// Every labeled graph on `0..n` for `n <= universe_cap`, as otxxs with
/// each bag-order strategy.
pub fn small_otxxs(universe_cap: usize) -> Result<Vec<Otxx>> {
    if universe_cap > 5 {
        return Err(ComposeError::Capacity(format!(
            "graph enumeration is limited to 5 vertices, asked for {universe_cap}"
        )));
    }
    let mut out = Vec::new();
    for n in 1..=universe_cap as u32 {
        let pairs: Vec<(u32, u32)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let g = Graph::from_edges(0..n, pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e));
            let k = treewidth_exact(&g)?;
            let d = segment(&atom_decomposition(&g, k)?.td);
            let adh = metrics(&d.td).adhesion;
            for p in [BagOrderProvider::InputId, BagOrderProvider::Bfs, BagOrderProvider::Coloring { k }] {
                let x = build_otxx(&g.to_structure(), &d, &p, adh)?;
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoClasses {
    pub classes: Vec<BTreeSet<TypeId>>,
    /// Sub-otxxs left out because their orders exceeded the cap.
    pub skipped: usize,
}

impl CoClasses {
    pub fn class_of(&self, t: TypeId) -> Option<&BTreeSet<TypeId>> {
        self.classes.iter().find(|c| c.contains(&t))
    }

    pub fn same_class(&self, a: TypeId, b: TypeId) -> bool {
        self.class_of(a).is_some_and(|c| c.contains(&b))
    }
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<TypeId, TypeId>,
}

impl UnionFind {
    fn add(&mut self, a: TypeId) {
        self.parent.entry(a).or_insert(a);
    }

    fn find(&mut self, a: TypeId) -> TypeId {
        self.add(a);
        let p = self.parent[&a];
        if p == a {
            return a;
        }
        let r = self.find(p);
        self.parent.insert(a, r);
        r
    }

    fn union(&mut self, a: TypeId, b: TypeId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(ra.max(rb), ra.min(rb));
        }
    }

    fn classes(mut self) -> Vec<BTreeSet<TypeId>> {
        let keys: Vec<TypeId> = self.parent.keys().copied().collect();
        let mut by_root: BTreeMap<TypeId, BTreeSet<TypeId>> = BTreeMap::new();
        for k in keys {
            let r = self.find(k);
            by_root.entry(r).or_default().insert(k);
        }
        by_root.into_values().collect()
    }
}
