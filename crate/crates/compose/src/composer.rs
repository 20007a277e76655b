use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use oimso_core::{induced, Elem, NodeId, NodeKind, Structure};
use oimso_otxx::{block_order, child_sequences, is_compatible, replace, sub_otxx, Interface, Otxx};
use oimso_types::{cmso_type, TypeId, TypeRegistry};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::{ComposeError, Result};

/// Child node to the type of its sub-otxx.
pub type TypePartition = BTreeMap<NodeId, TypeId>;

/// Which structure a node's type describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum View {
    /// The sub-otxx as a `τ**`-structure under its block order. Child
    /// types name the root node and the separator elements.
    Full,
    /// Only the base structure on the cone, under the block order of its
    /// elements. Child types name the empty set and the separator
    /// elements.
    Base,
}

/// Whether a type is computed for gluing (interface named) or for a
/// whole otxx (no distinguished sets).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Child,
    Root,
}

/// A realization of a type: a sub-otxx and the child sequences of its
/// block order.
#[derive(Debug, Clone, PartialEq)]
pub struct Rep {
    pub otxx: Otxx,
    pub seqs: BTreeMap<NodeId, Vec<NodeId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComposeConfig {
    pub q: usize,
    /// Largest counting modulus; 1 for plain MSO.
    pub modulus: u32,
    pub view: View,
}

#[derive(PartialEq, Eq, Hash)]
struct MemoKey {
    local: Structure,
    types: Vec<TypeId>,
    role: Role,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeStats {
    pub direct: usize,
    pub composed: usize,
    pub memo_hits: usize,
}

/// Semantic type composition: children are replaced by stored
/// representatives of their types and the shrunken structure is typed
/// directly. Results are memoized on the exact local structure.
pub struct Composer<'r> {
    reg: &'r TypeRegistry,
    cfg: ComposeConfig,
    // keyed also by root kind, which the base view does not record
    reps: Mutex<HashMap<(TypeId, NodeKind), Rep>>,
    memo: Mutex<HashMap<MemoKey, TypeId>>,
    direct: AtomicUsize,
    composed: AtomicUsize,
    hits: AtomicUsize,
}

/// One node of a DP run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeResult {
    pub node: NodeId,
    pub kind: NodeKind,
    /// Children in the order used for composition.
    pub children: Vec<NodeId>,
    pub partition: Vec<(NodeId, TypeId)>,
    pub composed: TypeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpResult {
    pub root: TypeId,
    /// The block order whose type the run computes.
    pub order: Vec<u32>,
    /// Nodes in postorder.
    pub nodes: Vec<NodeResult>,
}

impl<'r> Composer<'r> {
    pub fn new(reg: &'r TypeRegistry, cfg: ComposeConfig) -> Self {
        Composer {
            reg,
            cfg,
            reps: Mutex::default(),
            memo: Mutex::default(),
            direct: AtomicUsize::new(0),
            composed: AtomicUsize::new(0),
            hits: AtomicUsize::new(0),
        }
    }

    pub fn registry(&self) -> &'r TypeRegistry {
        self.reg
    }

    pub fn config(&self) -> ComposeConfig {
        self.cfg
    }

    pub fn stats(&self) -> ComposeStats {
        ComposeStats {
            direct: self.direct.load(Ordering::Relaxed),
            composed: self.composed.load(Ordering::Relaxed),
            memo_hits: self.hits.load(Ordering::Relaxed),
        }
    }

    /// The smallest stored realization of `t` whose root has the given kind.
    pub fn representative(&self, t: TypeId, kind: NodeKind) -> Option<Rep> {
        self.reps.lock().get(&(t, kind)).cloned()
    }

    fn offer(&self, t: TypeId, x: &Otxx, seqs: &BTreeMap<NodeId, Vec<NodeId>>) {
        let Ok(kind) = x.kind(x.root()) else { return };
        let mut reps = self.reps.lock();
        if reps.get(&(t, kind)).is_none_or(|r| x.len() < r.otxx.len()) {
            reps.insert(
                (t, kind),
                Rep {
                    otxx: x.clone(),
                    seqs: seqs.clone(),
                },
            );
        }
    }

    /// The structure, distinguished sets and order typed for `x` under its
    /// block order with the given child sequences.
    pub fn typed_input(
        &self,
        x: &Otxx,
        role: Role,
        seqs: &BTreeMap<NodeId, Vec<NodeId>>,
    ) -> Result<(Structure, Vec<BTreeSet<Elem>>, Vec<u32>)> {
        let order = block_order(x, seqs)?;
        let seps = x.root_sep().iter().map(|&v| BTreeSet::from([v]));
        Ok(match self.cfg.view {
            View::Full => {
                let sets = match role {
                    Role::Child => std::iter::once(BTreeSet::from([x.node_item(x.root())]))
                        .chain(seps)
                        .collect(),
                    Role::Root => Vec::new(),
                };
                (x.to_structure(), sets, order)
            }
            View::Base => {
                let sets = match role {
                    Role::Child => std::iter::once(BTreeSet::new()).chain(seps).collect(),
                    Role::Root => Vec::new(),
                };
                let elems: Vec<u32> = order.into_iter().filter(|v| x.elements().contains(v)).collect();
                (x.base().clone(), sets, elems)
            }
        })
    }

    /// Type of `x` computed directly on the whole structure. The input is
    /// kept as a representative when it is the smallest seen.
    pub fn type_of(&self, x: &Otxx, role: Role, seqs: &BTreeMap<NodeId, Vec<NodeId>>) -> Result<TypeId> {
        let (s, sets, order) = self.typed_input(x, role, seqs)?;
        let t = cmso_type(self.reg, &s, &sets, self.cfg.q, self.cfg.modulus, Some(&order))?;
        self.direct.fetch_add(1, Ordering::Relaxed);
        self.offer(t, x, seqs);
        Ok(t)
    }

    /// Type of the sub-otxx at `t` under the block order of `order`.
    pub fn sub_type(&self, x: &Otxx, t: NodeId, order: &[u32]) -> Result<TypeId> {
        let seqs = checked_sequences(x, order)?;
        let role = role_of(x, t);
        self.type_of(&sub_otxx(x, t)?, role, &restrict(&seqs, x, t))
    }

    /// Types of the children of `t` under the block order of `order`.
    pub fn type_partition(&self, x: &Otxx, order: &[u32], t: NodeId) -> Result<TypePartition> {
        let seqs = checked_sequences(x, order)?;
        x.children(t)?
            .iter()
            .map(|&u| Ok((u, self.type_of(&sub_otxx(x, u)?, Role::Child, &restrict(&seqs, x, u))?)))
            .collect()
    }

    /// Type of the sub-otxx at the b-node `t` whose children have the
    /// types in `partition`.
    pub fn compose_b(&self, x: &Otxx, t: NodeId, partition: &TypePartition) -> Result<TypeId> {
        if x.kind(t)? != NodeKind::B {
            return Err(ComposeError::KindMismatch { node: t, expected_a: false });
        }
        let seq = x.children(t)?.to_vec();
        self.compose(x, None, t, &seq, partition, role_of(x, t)).map(|(id, _)| id)
    }

    /// Type of the sub-otxx at the a-node `t` under the block order that
    /// visits its children in `seq`.
    pub fn compose_a(&self, x: &Otxx, t: NodeId, seq: &[NodeId], partition: &TypePartition) -> Result<TypeId> {
        if x.kind(t)? != NodeKind::A {
            return Err(ComposeError::KindMismatch { node: t, expected_a: true });
        }
        if x.children(t)?.is_empty() {
            return Err(ComposeError::Contract(format!("a-node {t} has no children")));
        }
        self.compose(x, None, t, seq, partition, role_of(x, t)).map(|(id, _)| id)
    }

    /// [`Composer::compose_b`] / [`Composer::compose_a`] without the memo:
    /// the children are always substituted and the result typed.
    pub fn compose_fresh(&self, x: &Otxx, t: NodeId, seq: &[NodeId], partition: &TypePartition) -> Result<TypeId> {
        let seq = self.check_children(x, t, seq, partition)?;
        self.substitute(x, t, &seq, partition, role_of(x, t))
    }

    fn check_children(&self, x: &Otxx, t: NodeId, seq: &[NodeId], partition: &TypePartition) -> Result<Vec<NodeId>> {
        let own = x.children(t)?;
        let mut a = seq.to_vec();
        a.sort_unstable();
        let mut b = own.to_vec();
        b.sort_unstable();
        if a != b {
            return Err(ComposeError::Contract(format!("sequence does not list the children of node {t}")));
        }
        if x.kind(t)? == NodeKind::B && seq != own {
            return Err(ComposeError::Contract(format!("b-node {t} fixes the order of its children")));
        }
        if !partition.keys().copied().eq(b.iter().copied()) {
            return Err(ComposeError::Contract(format!("partition does not cover the children of node {t}")));
        }
        Ok(seq.to_vec())
    }

    fn compose(
        &self,
        x: &Otxx,
        full: Option<&Structure>,
        t: NodeId,
        seq: &[NodeId],
        partition: &TypePartition,
        role: Role,
    ) -> Result<(TypeId, bool)> {
        let seq = self.check_children(x, t, seq, partition)?;
        let key = MemoKey {
            local: canonical_local(x, full, t, &seq)?,
            types: seq.iter().map(|u| partition[u]).collect(),
            role,
        };
        if let Some(&id) = self.memo.lock().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok((id, true));
        }
        let id = self.substitute(x, t, &seq, partition, role)?;
        self.memo.lock().insert(key, id);
        Ok((id, false))
    }

    fn substitute(&self, x: &Otxx, t: NodeId, seq: &[NodeId], partition: &TypePartition, role: Role) -> Result<TypeId> {
        let mut cur = sub_otxx(x, t)?;
        let mut seqs = BTreeMap::new();
        if x.kind(t)? == NodeKind::A {
            seqs.insert(t, seq.to_vec());
        }
        let iface = match self.cfg.view {
            View::Full => Interface::Full,
            View::Base => Interface::Base,
        };
        for &u in seq {
            let id = partition[&u];
            let rep = self.representative(id, x.kind(u)?).ok_or(ComposeError::MissingRepresentative(id))?;
            let r = replace(&cur, u, &rep.otxx, iface)?;
            for (w, s) in &rep.seqs {
                seqs.insert(r.nodes[w], s.iter().map(|c| r.nodes[c]).collect());
            }
            cur = r.otxx;
        }
        self.composed.fetch_add(1, Ordering::Relaxed);
        self.type_of(&cur, role, &seqs)
    }

    /// Bottom-up run over `x` with the child sequences of the compatible
    /// `order`. Nodes of equal height are processed by up to `jobs`
    /// threads.
    pub fn run_dp(&self, x: &Otxx, order: &[u32], jobs: usize) -> Result<DpResult> {
        let seqs = checked_sequences(x, order)?;
        let full = x.to_structure();
        let td = &x.tree().td;
        let post = td.postorder();
        let mut height: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &t in &post {
            let h = td.children(t).iter().map(|c| height[c] + 1).max().unwrap_or(0);
            height.insert(t, h);
        }
        let mut levels: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for &t in &post {
            levels.entry(height[&t]).or_default().push(t);
        }
        let mut done: BTreeMap<NodeId, NodeResult> = BTreeMap::new();
        for nodes in levels.values() {
            let work = |t: NodeId, done: &BTreeMap<NodeId, NodeResult>| -> Result<NodeResult> {
                let kind = x.kind(t)?;
                let seq = match kind {
                    NodeKind::A => seqs[&t].clone(),
                    NodeKind::B => x.children(t)?.to_vec(),
                };
                let partition: TypePartition = seq.iter().map(|u| (*u, done[u].composed)).collect();
                let (composed, _) = self.compose(x, Some(&full), t, &seq, &partition, role_of(x, t))?;
                Ok(NodeResult {
                    node: t,
                    kind,
                    partition: seq.iter().map(|u| (*u, partition[u])).collect(),
                    children: seq,
                    composed,
                })
            };
            let results: Vec<Result<NodeResult>> = if jobs <= 1 || nodes.len() == 1 {
                nodes.iter().map(|&t| work(t, &done)).collect()
            } else {
                let next = AtomicUsize::new(0);
                let slots: Vec<Mutex<Option<Result<NodeResult>>>> = nodes.iter().map(|_| Mutex::new(None)).collect();
                std::thread::scope(|s| {
                    for _ in 0..jobs.min(nodes.len()) {
                        s.spawn(|| loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= nodes.len() {
                                break;
                            }
                            *slots[i].lock() = Some(work(nodes[i], &done));
                        });
                    }
                });
                slots.into_iter().map(|m| m.into_inner().expect("every slot is filled")).collect()
            };
            for r in results {
                let r = r?;
                done.insert(r.node, r);
            }
        }
        let nodes: Vec<NodeResult> = post.iter().map(|t| done.remove(t).expect("computed")).collect();
        Ok(DpResult {
            root: nodes.last().expect("nonempty tree").composed,
            order: block_order(x, &seqs)?,
            nodes,
        })
    }
}

fn role_of(x: &Otxx, t: NodeId) -> Role {
    if t == x.root() && !x.is_sub() {
        Role::Root
    } else {
        Role::Child
    }
}

fn checked_sequences(x: &Otxx, order: &[u32]) -> Result<BTreeMap<NodeId, Vec<NodeId>>> {
    if !is_compatible(x, order) {
        return Err(ComposeError::Contract("order is not compatible".into()));
    }
    Ok(child_sequences(x, order))
}

/// Child sequences of the nodes below `t`.
pub(crate) fn restrict(
    seqs: &BTreeMap<NodeId, Vec<NodeId>>,
    x: &Otxx,
    t: NodeId,
) -> BTreeMap<NodeId, Vec<NodeId>> {
    x.tree()
        .td
        .subtree(t)
        .into_iter()
        .filter_map(|u| seqs.get(&u).map(|s| (u, s.clone())))
        .collect()
}

/// The local `τ**`-structure at `t` relabeled by the block order: `t`,
/// the children in `seq`, the separator, then the rest of the bag.
pub(crate) fn canonical_local(x: &Otxx, full: Option<&Structure>, t: NodeId, seq: &[NodeId]) -> Result<Structure> {
    let owned;
    let full = match full {
        Some(f) => f,
        None => {
            owned = x.to_structure();
            &owned
        }
    };
    let items = local_items(x, t, seq)?;
    let keep: BTreeSet<u32> = items.iter().copied().collect();
    let map: BTreeMap<u32, u32> = items.iter().enumerate().map(|(i, &y)| (y, i as u32)).collect();
    Ok(induced(full, &keep)?.rename(&map))
}

/// Items of the local structure at `t` in block order.
pub(crate) fn local_items(x: &Otxx, t: NodeId, seq: &[NodeId]) -> Result<Vec<u32>> {
    let mut items = vec![x.node_item(t)];
    items.extend(seq.iter().map(|&u| x.node_item(u)));
    let sig = x.sigma(t)?;
    items.extend(sig);
    items.extend(x.bag_order(t)?.iter().filter(|v| !sig.contains(v)));
    Ok(items)
}
