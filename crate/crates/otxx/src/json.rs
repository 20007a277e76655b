use std::collections::BTreeMap;

use oimso_core::{DecompositionJson, Elem, NodeId, Structure};
use serde::{Deserialize, Serialize};

use crate::{Otxx, OtxxError, Result};

/// Serialized otxx. The derived part is optional on input; when present
/// it must match the recomputation exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtxxJson {
    pub base: Structure,
    pub tree: DecompositionJson,
    pub bag_orders: BTreeMap<NodeId, Vec<Elem>>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub root_sep: Vec<Elem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedJson {
    /// Separators in increasing partial order.
    pub sigma: BTreeMap<NodeId, Vec<Elem>>,
    pub gamma: BTreeMap<NodeId, Vec<Elem>>,
    pub top: BTreeMap<Elem, NodeId>,
    /// Strict pairs of the partial order over merged ids.
    pub prec: Vec<(u32, u32)>,
}

impl From<&Otxx> for OtxxJson {
    fn from(x: &Otxx) -> Self {
        OtxxJson {
            base: x.base().clone(),
            tree: DecompositionJson::from(x.tree()),
            bag_orders: x.bag_orders().clone(),
            k: x.k(),
            root_sep: x.root_sep().to_vec(),
            offset: Some(x.offset()),
            derived: Some(derived(x)),
        }
    }
}

fn derived(x: &Otxx) -> DerivedJson {
    let nodes: Vec<NodeId> = x.tree().td.nodes().collect();
    let items = x.items();
    DerivedJson {
        sigma: nodes.iter().map(|&t| (t, x.sigma(t).expect("node").to_vec())).collect(),
        gamma: nodes
            .iter()
            .map(|&t| (t, x.gamma(t).expect("node").iter().copied().collect()))
            .collect(),
        top: x.elements().iter().map(|&v| (v, x.top(v).expect("covered"))).collect(),
        prec: items
            .iter()
            .flat_map(|&a| items.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| x.less(a, b))
            .collect(),
    }
}

impl OtxxJson {
    pub fn to_otxx(&self) -> Result<Otxx> {
        let offset = self
            .offset
            .unwrap_or_else(|| self.base.universe().last().map_or(0, |m| m + 1));
        let x = Otxx::new(
            self.base.clone(),
            self.tree.to_segmented()?,
            self.bag_orders.clone(),
            self.root_sep.clone(),
            self.k,
            offset,
        )?;
        if let Some(d) = &self.derived {
            if *d != derived(&x) {
                return Err(OtxxError::Invalid("derived relations differ from their recomputation".into()));
            }
        }
        Ok(x)
    }
}
