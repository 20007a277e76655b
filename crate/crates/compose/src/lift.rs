use std::collections::{BTreeMap, BTreeSet};

use oimso_core::{gaifman, metrics, NodeId, NodeKind, Structure};
use oimso_decomp::{atom_decomposition, improve, segment, treewidth_exact, TREEWIDTH_ORACLE_MAX};
use oimso_logic::{check_order_invariance, Formula, DEFAULT_ORDER_CAP};
use oimso_otxx::{build_otxx, compatible_orders, random_compatible_order, BagOrderProvider, OrderMode, Otxx};
use oimso_types::{mso_type, satisfies, Caps, TypeId, TypeRegistry};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::composer::{canonical_local, local_items};
use crate::{ComposeConfig, ComposeError, Composer, DpResult, Result, View};

/// Which compatible order the DP follows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderChoice {
    /// Repeatedly the smallest minimal item.
    First,
    /// A random linear extension from a seeded generator.
    Seeded(u64),
    /// A compatible order of the otxx built by [`lift_otxx`] with the same
    /// arguments.
    Given(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftOptions {
    pub provider: BagOrderProvider,
    pub order: OrderChoice,
    /// Structures up to this size are checked for order invariance by
    /// enumerating all orders.
    pub invariance_cap: usize,
    /// Accept larger structures without the check.
    pub trust_invariance: bool,
    pub jobs: usize,
    pub trace: bool,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            provider: BagOrderProvider::InputId,
            order: OrderChoice::First,
            invariance_cap: DEFAULT_ORDER_CAP,
            trust_invariance: false,
            jobs: 1,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvarianceStatus {
    /// The sentence does not mention the order.
    OrderFree,
    Checked,
    Trusted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub node: NodeId,
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    pub partition: Vec<(NodeId, u32)>,
    /// Type of the local structure with the partition as sets, at rank
    /// `min(q, 2)`; absent when it exceeds the caps.
    pub local_type: Option<u32>,
    pub composed: u32,
}

/// Per-node record of a run. Type numbers are local to the trace,
/// assigned in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub k: usize,
    pub q: usize,
    pub modulus: u32,
    pub root: NodeId,
    pub order: Vec<u32>,
    pub nodes: Vec<TraceNode>,
    pub root_type: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftOutcome {
    pub verdict: bool,
    pub invariance: InvarianceStatus,
    pub trace: Option<Trace>,
}

/// Model checks the order-invariant sentence `phi` on `a` by composing
/// types bottom-up over a clique-separator decomposition of the improved
/// Gaifman graph.
pub fn lift_modelcheck(a: &Structure, phi: &Formula, k: usize, q: usize, opts: &LiftOptions) -> Result<LiftOutcome> {
    if !phi.is_sentence() {
        return Err(ComposeError::Contract("the formula has free variables".into()));
    }
    if phi.rank() > q {
        return Err(ComposeError::Contract(format!("formula rank {} exceeds q = {q}", phi.rank())));
    }
    let invariance = if !phi.mentions_order() {
        InvarianceStatus::OrderFree
    } else if a.len() <= opts.invariance_cap {
        let r = check_order_invariance(phi, a, opts.invariance_cap)?;
        if !r.invariant {
            return Err(ComposeError::Contract(format!(
                "the sentence is not order-invariant on this structure: orders {:?} and {:?} disagree",
                r.witness.as_ref().map(|w| &w.0),
                r.witness.as_ref().map(|w| &w.1)
            )));
        }
        InvarianceStatus::Checked
    } else if opts.trust_invariance {
        InvarianceStatus::Trusted
    } else {
        return Err(ComposeError::Capacity(format!(
            "{} elements exceed the invariance cap {}; pass the trust flag to skip the check",
            a.len(),
            opts.invariance_cap
        )));
    };
    let x = lift_otxx(a, k, &opts.provider)?;
    let order = match &opts.order {
        OrderChoice::First => compatible_orders(&x, OrderMode::Any)?.remove(0),
        OrderChoice::Seeded(seed) => {
            random_compatible_order(&x, &mut rand_chacha::ChaCha8Rng::seed_from_u64(*seed))
        }
        OrderChoice::Given(o) => o.clone(),
    };
    let reg = TypeRegistry::with_caps(Caps::permissive());
    let cfg = ComposeConfig {
        q,
        modulus: phi.max_modulus(),
        view: View::Base,
    };
    let c = Composer::new(&reg, cfg);
    let dp = c.run_dp(&x, &order, opts.jobs)?;
    let verdict = satisfies(&reg, dp.root, phi)?;
    let trace = if opts.trace { Some(trace(&c, &x, &dp)?) } else { None };
    Ok(LiftOutcome {
        verdict,
        invariance,
        trace,
    })
}

/// The otxx used by [`lift_modelcheck`]: improve the Gaifman graph,
/// decompose it along clique separators, segment, and order the bags.
pub fn lift_otxx(a: &Structure, k: usize, provider: &BagOrderProvider) -> Result<Otxx> {
    let g = gaifman(a);
    if g.vertex_count() <= TREEWIDTH_ORACLE_MAX {
        let tw = treewidth_exact(&g)?;
        if tw > k {
            return Err(ComposeError::Contract(format!("treewidth {tw} exceeds k = {k}")));
        }
    }
    let improved = improve(&g, k);
    let d = segment(&atom_decomposition(&improved, k)?.td);
    let adhesion = metrics(&d.td).adhesion;
    match provider {
        // separators are cliques of the improved graph, not necessarily of
        // the input, so the coloring is taken there
        BagOrderProvider::Coloring { .. } => {
            let orders = provider.orders(&improved.to_structure(), &d)?;
            let offset = a.universe().last().map_or(0, |m| m + 1);
            Ok(Otxx::new(a.clone(), d, orders, Vec::new(), adhesion, offset)?)
        }
        _ => Ok(build_otxx(a, &d, provider, adhesion)?),
    }
}

fn trace(c: &Composer, x: &Otxx, dp: &DpResult) -> Result<Trace> {
    let full = x.to_structure();
    let local_q = c.config().q.min(2);
    let mut nodes = Vec::new();
    let mut ids = Renumber::default();
    for r in &dp.nodes {
        let local = canonical_local(x, Some(&full), r.node, &r.children)?;
        // children grouped by type, groups in order of first appearance
        let mut groups: Vec<(TypeId, BTreeSet<u32>)> = Vec::new();
        for (i, (_, t)) in r.partition.iter().enumerate() {
            match groups.iter_mut().find(|(g, _)| g == t) {
                Some((_, s)) => {
                    s.insert(i as u32 + 1);
                }
                None => groups.push((*t, BTreeSet::from([i as u32 + 1]))),
            }
        }
        let sets: Vec<BTreeSet<u32>> = groups.into_iter().map(|(_, s)| s).collect();
        let order: Vec<u32> = (0..local_items(x, r.node, &r.children)?.len() as u32).collect();
        let local_type = match mso_type(c.registry(), &local, &sets, local_q, Some(&order)) {
            Ok(t) => Some(t),
            Err(oimso_types::TypeError::Capacity(_)) => None,
            Err(e) => return Err(e.into()),
        };
        nodes.push(TraceNode {
            node: r.node,
            kind: r.kind,
            children: r.children.clone(),
            partition: r.partition.iter().map(|&(u, t)| (u, ids.get(t))).collect(),
            local_type: local_type.map(|t| ids.get(t)),
            composed: ids.get(r.composed),
        });
    }
    Ok(Trace {
        k: x.k(),
        q: c.config().q,
        modulus: c.config().modulus,
        root: x.root(),
        order: dp.order.clone(),
        root_type: ids.get(dp.root),
        nodes,
    })
}

#[derive(Default)]
struct Renumber(BTreeMap<TypeId, u32>);

impl Renumber {
    fn get(&mut self, t: TypeId) -> u32 {
        let n = self.0.len() as u32;
        *self.0.entry(t).or_insert(n)
    }
}
