use std::collections::{BTreeMap, HashMap};

use oimso_core::{Elem, NodeId, NodeKind};
use rand::Rng;

use crate::{Otxx, OtxxError, Result};

/// Default bound on the number of enumerated linear extensions.
pub const DEFAULT_EXTENSION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMode {
    /// One extension: repeatedly take the smallest id among minimal items.
    Any,
    /// All extensions, failing when there are more than `cap`.
    Enumerate { cap: usize },
}

/// The strict partial order as predecessor lists over item indices.
struct Poset {
    items: Vec<u32>,
    preds: Vec<usize>,
    succs: Vec<Vec<usize>>,
}

impl Poset {
    fn of(x: &Otxx) -> Self {
        let items = x.items();
        let n = items.len();
        let mut preds = vec![0; n];
        let mut succs = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && x.less(items[i], items[j]) {
                    preds[j] += 1;
                    succs[i].push(j);
                }
            }
        }
        Poset { items, preds, succs }
    }

    fn take(&mut self, i: usize) {
        self.preds[i] = usize::MAX;
        for &j in &self.succs[i] {
            self.preds[j] -= 1;
        }
    }

    fn put_back(&mut self, i: usize) {
        for &j in &self.succs[i] {
            self.preds[j] += 1;
        }
        self.preds[i] = 0;
    }

    fn minimal(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.items.len()).filter(|&i| self.preds[i] == 0)
    }
}

/// Linear orders of the merged universe extending the partial order,
/// each listed from smallest to largest.
pub fn compatible_orders(x: &Otxx, mode: OrderMode) -> Result<Vec<Vec<u32>>> {
    let mut p = Poset::of(x);
    match mode {
        OrderMode::Any => {
            let mut out = Vec::with_capacity(p.items.len());
            while let Some(i) = p.minimal().min_by_key(|&i| p.items[i]) {
                p.take(i);
                out.push(p.items[i]);
            }
            Ok(vec![out])
        }
        OrderMode::Enumerate { cap } => {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            extend_all(&mut p, &mut cur, &mut out, cap)?;
            Ok(out)
        }
    }
}

fn extend_all(p: &mut Poset, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, cap: usize) -> Result<()> {
    if cur.len() == p.items.len() {
        if out.len() == cap {
            return Err(OtxxError::Capacity(format!("more than {cap} compatible orders")));
        }
        out.push(cur.clone());
        return Ok(());
    }
    let mins: Vec<usize> = p.minimal().collect();
    for i in mins {
        p.take(i);
        cur.push(p.items[i]);
        let r = extend_all(p, cur, out, cap);
        cur.pop();
        p.put_back(i);
        r?;
    }
    Ok(())
}

/// One compatible order built by picking a uniformly random minimal item
/// at every step.
pub fn random_compatible_order<R: Rng + ?Sized>(x: &Otxx, rng: &mut R) -> Vec<u32> {
    let mut p = Poset::of(x);
    let mut out = Vec::with_capacity(p.items.len());
    loop {
        let mins: Vec<usize> = p.minimal().collect();
        if mins.is_empty() {
            break;
        }
        let i = mins[rng.gen_range(0..mins.len())];
        p.take(i);
        out.push(p.items[i]);
    }
    out
}

/// Whether `order` lists the merged universe once and extends the partial
/// order.
pub fn is_compatible(x: &Otxx, order: &[u32]) -> bool {
    let pos: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let items = x.items();
    if pos.len() != order.len() || items.len() != order.len() || !items.iter().all(|y| pos.contains_key(y)) {
        return false;
    }
    items.iter().all(|&a| {
        items
            .iter()
            .all(|&b| !x.less(a, b) || pos[&a] < pos[&b])
    })
}

/// Child sequences read off a linear order: the children of every node
/// sorted by position.
pub fn child_sequences(x: &Otxx, order: &[u32]) -> BTreeMap<NodeId, Vec<NodeId>> {
    let pos: HashMap<u32, usize> = order.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    x.tree()
        .td
        .nodes()
        .map(|t| {
            let mut cs = x.tree().td.children(t).to_vec();
            cs.sort_by_key(|&c| pos.get(&x.node_item(c)).copied().unwrap_or(usize::MAX));
            (t, cs)
        })
        .collect()
}

/// The compatible order that lists nodes in preorder, visiting children
/// in the given sequences, then elements by (preorder of the topmost node
/// holding them, bag order), the root separator first.
///
/// Missing sequences default to [`Otxx::children`]. At b-nodes the
/// sequence must be the sibling order.
pub fn block_order(x: &Otxx, seqs: &BTreeMap<NodeId, Vec<NodeId>>) -> Result<Vec<u32>> {
    let td = &x.tree().td;
    let mut pre: Vec<NodeId> = Vec::with_capacity(td.len());
    let mut stack = vec![x.root()];
    while let Some(t) = stack.pop() {
        pre.push(t);
        let own = x.children(t)?;
        let cs = match seqs.get(&t) {
            Some(s) => {
                let mut a = s.clone();
                let mut b = own.to_vec();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    return Err(OtxxError::Contract(format!("sequence for node {t} is not a permutation of its children")));
                }
                if x.kind(t)? == NodeKind::B && s.as_slice() != own {
                    return Err(OtxxError::Contract(format!("sequence for b-node {t} breaks the sibling order")));
                }
                s.as_slice()
            }
            None => own,
        };
        stack.extend(cs.iter().rev());
    }
    let rank: HashMap<NodeId, usize> = pre.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut out: Vec<u32> = pre.iter().map(|&t| x.node_item(t)).collect();
    out.extend(x.root_sep());
    let mut rest: Vec<(usize, usize, Elem)> = x
        .elements()
        .iter()
        .filter(|v| !x.root_sep().contains(v))
        .map(|&v| {
            let t = x.top(v).expect("covered element");
            let p = x.bag_order(t).expect("node").iter().position(|&w| w == v).expect("in bag");
            (rank[&t], p, v)
        })
        .collect();
    rest.sort_unstable();
    out.extend(rest.into_iter().map(|(_, _, v)| v));
    Ok(out)
}

/// The block order with the child sequences of `order`. Fails unless
/// `order` is compatible.
pub fn normalize(x: &Otxx, order: &[u32]) -> Result<Vec<u32>> {
    if !is_compatible(x, order) {
        return Err(OtxxError::Contract("order is not compatible".into()));
    }
    block_order(x, &child_sequences(x, order))
}
