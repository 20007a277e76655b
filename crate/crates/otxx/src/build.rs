use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{
    is_reserved, metrics, validate_decomposition, Elem, NodeId, NodeKind, SegmentedDecomposition,
    Structure, TreeDecomposition, Vocabulary,
};

use crate::otxx::RESERVED_ORDER;
use crate::{BagOrderProvider, Otxx, OtxxError, Result};

/// The otxx of `a` over the segmented decomposition `d`, with bags ordered
/// by `provider`.
pub fn build_otxx(
    a: &Structure,
    d: &SegmentedDecomposition,
    provider: &BagOrderProvider,
    k: usize,
) -> Result<Otxx> {
    let report = validate_decomposition(a, &d.td);
    if !report.ok {
        return Err(OtxxError::Contract(format!(
            "not a tree decomposition of the structure: {:?}",
            report.violations
        )));
    }
    let adhesion = metrics(&d.td).adhesion;
    if adhesion > k {
        return Err(OtxxError::Contract(format!("adhesion {adhesion} exceeds k = {k}")));
    }
    let orders = provider.orders(a, d)?;
    let offset = a.universe().last().map_or(0, |m| m + 1);
    Otxx::new(a.clone(), d.clone(), orders, Vec::new(), k, offset)
}

/// Reads a `τ**`-structure back into an [`Otxx`] and checks that every
/// derived relation is exactly as recomputed. `k` is the number of `S_i`
/// symbols. Node ids are the merged ids (offset 0).
pub fn decode_structure(s: &Structure) -> Result<Otxx> {
    let voc = s.vocabulary();
    for &(name, arity) in RESERVED_ORDER.iter() {
        match voc.symbols().iter().find(|x| x.name == name) {
            Some(x) if x.arity == arity => {}
            _ => return Err(OtxxError::Invalid(format!("missing symbol {name}/{arity}"))),
        }
    }
    let k = voc
        .symbols()
        .iter()
        .filter(|x| x.name.starts_with("S_") && is_reserved(&x.name))
        .count();
    for i in 1..=k {
        if voc.index_of(&format!("S_{i}")).is_none() {
            return Err(OtxxError::Invalid(format!("missing symbol S_{i}")));
        }
    }
    let tau = Vocabulary::new(
        voc.symbols()
            .iter()
            .filter(|x| !is_reserved(&x.name))
            .map(|x| (x.name.clone(), x.arity)),
    )?;
    let unary = |name: &str| -> BTreeSet<u32> {
        s.relation(name).into_iter().flatten().map(|t| t[0]).collect()
    };
    let elems = unary("V_S");
    let nodes = unary("V_T");
    if !elems.is_disjoint(&nodes) || elems.union(&nodes).ne(s.universe().iter()) {
        return Err(OtxxError::Invalid("V_S and V_T do not partition the universe".into()));
    }
    let pairs = |name: &str| s.relation(name).into_iter().flatten().map(|t| (t[0], t[1]));
    let mut bags: BTreeMap<NodeId, BTreeSet<Elem>> = nodes.iter().map(|&t| (t, BTreeSet::new())).collect();
    for (t, v) in pairs("R_beta") {
        bags.get_mut(&t)
            .filter(|_| elems.contains(&v))
            .ok_or_else(|| OtxxError::Invalid(format!("bad R_beta tuple ({t},{v})")))?
            .insert(v);
    }
    let edges: Vec<(NodeId, NodeId)> = pairs("E_T").collect();
    let roots: Vec<NodeId> = nodes
        .iter()
        .copied()
        .filter(|t| !edges.iter().any(|(_, c)| c == t))
        .collect();
    let [root] = roots[..] else {
        return Err(OtxxError::Invalid(format!("expected one root, found {}", roots.len())));
    };
    let td = TreeDecomposition::new(root, bags, edges)?;
    let (va, vb) = (unary("V_a"), unary("V_b"));
    let mut kind = BTreeMap::new();
    for &t in &nodes {
        kind.insert(
            t,
            match (va.contains(&t), vb.contains(&t)) {
                (true, false) => NodeKind::A,
                (false, true) => NodeKind::B,
                _ => return Err(OtxxError::Invalid(format!("node {t} needs exactly one kind"))),
            },
        );
    }
    let tree = SegmentedDecomposition::new(td, kind)?;
    let mut orders = BTreeMap::new();
    for &t in &nodes {
        let below = |v: Elem| {
            s.relation("R_ord")
                .into_iter()
                .flatten()
                .filter(|x| x[0] == t && x[2] == v)
                .count()
        };
        let mut o: Vec<Elem> = tree.td.bag(t)?.iter().copied().collect();
        o.sort_by_key(|&v| (below(v), v));
        orders.insert(t, o);
    }
    let mut tuples: BTreeMap<String, Vec<Vec<Elem>>> = BTreeMap::new();
    for sym in tau.symbols() {
        let r = s.relation(&sym.name).expect("symbol of the vocabulary");
        if let Some(t) = r.iter().find(|t| t.iter().any(|x| !elems.contains(x))) {
            return Err(OtxxError::Invalid(format!("{} tuple {t:?} leaves V_S", sym.name)));
        }
        tuples.insert(sym.name.clone(), r.iter().cloned().collect());
    }
    let base = Structure::new(tau, elems, tuples)?;
    let mut rs: Vec<(usize, Elem)> = Vec::new();
    for i in 1..=k {
        rs.extend(
            pairs(&format!("S_{i}"))
                .filter(|&(t, _)| t == root)
                .map(|(_, v)| (i, v)),
        );
    }
    rs.sort_unstable();
    let root_sep = rs.into_iter().map(|(_, v)| v).collect();
    let x = Otxx::new(base, tree, orders, root_sep, k, 0)?;
    let again = x.to_structure();
    for sym in voc.symbols() {
        if again.relation(&sym.name) != s.relation(&sym.name) {
            return Err(OtxxError::Invalid(format!("relation {} differs from its recomputation", sym.name)));
        }
    }
    Ok(x)
}

/// Whether `s` is an otxx: a valid expansion with empty root separator.
pub fn validate_otxx(s: &Structure) -> bool {
    decode_structure(s).is_ok_and(|x| !x.is_sub())
}

/// Whether `s` is a sub-otxx (the root separator may be nonempty).
pub fn validate_sub_otxx(s: &Structure) -> bool {
    decode_structure(s).is_ok()
}
