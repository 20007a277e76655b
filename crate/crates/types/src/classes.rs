use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use oimso_core::{Elem, Graph, Structure, Vocabulary};
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::{cmso_type, Payload, Result, TypeError, TypeId, TypeRegistry};

/// Largest number of (structure, order) pairs examined by a closure.
const WORK_CAP: usize = 500_000;

/// An order-invariance class together with the universe bound it was
/// computed under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OiClass {
    pub class: BTreeSet<TypeId>,
    pub universe_cap: usize,
}

fn structures(vocab: &Vocabulary, n: u32) -> Result<Vec<Structure>> {
    let is_graph = vocab.len() == 1 && vocab.arity("E") == Some(2);
    if is_graph {
        let pairs: Vec<(Elem, Elem)> = (0..n).tuple_combinations().collect();
        if pairs.len() > 16 {
            return Err(TypeError::Capacity(format!("too many graphs on {n} vertices")));
        }
        return Ok((0..1u32 << pairs.len())
            .map(|m| {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, e)| *e);
                Graph::from_edges(0..n, edges).to_structure()
            })
            .collect());
    }
    let mut slots: Vec<(String, Vec<Elem>)> = Vec::new();
    for s in vocab.symbols() {
        for t in (0..s.arity).map(|_| 0..n).multi_cartesian_product() {
            slots.push((s.name.clone(), t));
        }
    }
    if slots.len() > 16 {
        return Err(TypeError::Capacity(format!(
            "too many structures on {n} elements"
        )));
    }
    Ok((0..1u32 << slots.len())
        .map(|m| {
            let mut a = Structure::with_universe(vocab.clone(), 0..n);
            for (i, (name, t)) in slots.iter().enumerate() {
                if m >> i & 1 == 1 {
                    a.insert(name, t.clone()).expect("tuple within universe");
                }
            }
            a
        })
        .collect())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Ordered rank-`(q, c)` types of all structures over `vocab` with at most
/// `cap` elements, partitioned by the closure of "realized by one structure
/// under two orders". Graph vocabularies (`E` of arity 2 alone) range over
/// undirected graphs; other vocabularies over all structures.
pub fn ordered_type_classes(
    reg: &TypeRegistry,
    vocab: &Vocabulary,
    q: usize,
    c: u32,
    cap: usize,
) -> Result<Vec<BTreeSet<TypeId>>> {
    let mut index: BTreeMap<TypeId, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<TypeId>> = Vec::new();
    let mut work = 0usize;
    for n in 0..=cap {
        let all = structures(vocab, n as u32)?;
        work += all.len() * factorial(n);
        if work > WORK_CAP {
            return Err(TypeError::Capacity(format!(
                "closure over {work} ordered structures exceeds {WORK_CAP}"
            )));
        }
        for a in all {
            let elems: Vec<Elem> = a.universe().iter().copied().collect();
            let mut seen = BTreeSet::new();
            for order in elems.iter().copied().permutations(n) {
                let t = cmso_type(reg, &a, &[], q, c, Some(&order))?;
                seen.insert(t);
                let len = index.len();
                index.entry(t).or_insert(len);
            }
            groups.push(seen.into_iter().collect());
        }
    }
    let mut uf = UnionFind::<usize>::new(index.len());
    for g in &groups {
        for w in g.windows(2) {
            uf.union(index[&w[0]], index[&w[1]]);
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<TypeId>> = BTreeMap::new();
    for (&t, &i) in &index {
        classes.entry(uf.find(i)).or_default().insert(t);
    }
    let mut out: Vec<BTreeSet<TypeId>> = classes.into_values().collect();
    out.sort();
    Ok(out)
}

/// The class of the ordered sentence type `theta` among types realized by
/// structures with at most `cap` elements.
pub fn oi_type_class(reg: &TypeRegistry, theta: TypeId, cap: usize) -> Result<OiClass> {
    let sig = reg.signature_of(theta)?;
    if !sig.ordered {
        return Err(TypeError::Invalid(format!("{theta} is not an ordered type")));
    }
    if reg.arity(theta)? != 0 {
        return Err(TypeError::Invalid(format!("{theta} has free set variables")));
    }
    let q = match reg.payload(theta)? {
        Payload::Atomic { .. } => 0,
        Payload::Extensions { rank, .. } => rank,
    };
    let vocab = Vocabulary::extended(sig.symbols.iter().map(|s| (s.name.clone(), s.arity)))?;
    let classes = ordered_type_classes(reg, &vocab, q, sig.modulus, cap)?;
    classes
        .into_iter()
        .find(|c| c.contains(&theta))
        .map(|class| OiClass {
            class,
            universe_cap: cap,
        })
        .ok_or_else(|| {
            TypeError::Invalid(format!("{theta} is not realized within {cap} elements"))
        })
}
