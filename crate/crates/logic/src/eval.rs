use std::collections::{BTreeMap, BTreeSet, HashMap};

use oimso_core::dense::{Dense, DENSE_MAX};
use oimso_core::{Elem, Structure};

use crate::{CountTarget, Formula, LogicError, Result, Var};

/// Values for free variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub elems: BTreeMap<String, Elem>,
    pub sets: BTreeMap<String, BTreeSet<Elem>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_elem(mut self, x: &str, e: Elem) -> Self {
        self.elems.insert(x.into(), e);
        self
    }

    pub fn with_set(mut self, x: &str, s: impl IntoIterator<Item = Elem>) -> Self {
        self.sets.insert(x.into(), s.into_iter().collect());
        self
    }
}

type NodeIx = usize;
type Slot = usize;

/// Formula compiled to slot-addressed nodes. Element slots hold a dense
/// index, set slots a mask.
enum Node {
    Const(bool),
    Rel(usize, Vec<(Slot, bool)>),
    Eq((Slot, bool), (Slot, bool)),
    Le((Slot, bool), (Slot, bool)),
    In(Slot, Slot),
    Sub(Slot, Slot),
    Sing(Slot),
    Count(u32, Slot),
    Not(NodeIx),
    And(NodeIx, NodeIx),
    Or(NodeIx, NodeIx),
    Implies(NodeIx, NodeIx),
    Quant {
        slot: Slot,
        set: bool,
        universal: bool,
        body: NodeIx,
        free: Vec<Slot>,
    },
}

struct Compiler<'a> {
    a: &'a Structure,
    nodes: Vec<Node>,
    scope: Vec<(Var, Slot)>,
    next_slot: Slot,
}

impl Compiler<'_> {
    fn lookup(&self, v: &Var) -> Result<Slot> {
        self.scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| LogicError::Unbound(v.name().to_string()))
    }

    fn term(&self, v: &Var) -> Result<(Slot, bool)> {
        Ok((self.lookup(v)?, matches!(v, Var::Set(_))))
    }

    fn set(&self, s: &str) -> Result<Slot> {
        self.lookup(&Var::Set(s.to_string()))
    }

    fn push(&mut self, n: Node) -> NodeIx {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn compile(&mut self, f: &Formula) -> Result<NodeIx> {
        let node = match f {
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Rel(r, args) => {
                let voc = self.a.vocabulary();
                let i = voc
                    .index_of(r)
                    .ok_or_else(|| LogicError::UnknownSymbol(r.clone()))?;
                let k = voc.symbols()[i].arity;
                if k != args.len() {
                    return Err(LogicError::ArityMismatch {
                        symbol: r.clone(),
                        expected: k,
                        got: args.len(),
                    });
                }
                let ts = args.iter().map(|v| self.term(v)).collect::<Result<_>>()?;
                Node::Rel(i, ts)
            }
            Formula::Eq(x, y) => Node::Eq(self.term(x)?, self.term(y)?),
            Formula::Le(x, y) => Node::Le(self.term(x)?, self.term(y)?),
            Formula::In(x, s) => Node::In(self.lookup(&Var::Elem(x.clone()))?, self.set(s)?),
            Formula::Sub(s, t) => Node::Sub(self.set(s)?, self.set(t)?),
            Formula::Sing(s) => Node::Sing(self.set(s)?),
            Formula::Count(m, CountTarget::Set(s)) => Node::Count(*m, self.set(s)?),
            Formula::Count(m, CountTarget::Unary(r)) => {
                let voc = self.a.vocabulary();
                match voc.arity(r) {
                    None => return Err(LogicError::UnknownSymbol(r.clone())),
                    Some(1) => {}
                    Some(_) => return Err(LogicError::CountingArity(r.clone())),
                }
                let size = self.a.relation(r).map_or(0, |t| t.len()) as u32;
                Node::Const(size.is_multiple_of((*m).max(1)))
            }
            Formula::Not(g) => Node::Not(self.compile(g)?),
            Formula::And(x, y) => Node::And(self.compile(x)?, self.compile(y)?),
            Formula::Or(x, y) => Node::Or(self.compile(x)?, self.compile(y)?),
            Formula::Implies(x, y) => Node::Implies(self.compile(x)?, self.compile(y)?),
            Formula::Exists(x, g)
            | Formula::Forall(x, g)
            | Formula::ExistsSet(x, g)
            | Formula::ForallSet(x, g) => {
                let set = matches!(f, Formula::ExistsSet(..) | Formula::ForallSet(..));
                let universal = matches!(f, Formula::Forall(..) | Formula::ForallSet(..));
                let var = if set {
                    Var::Set(x.clone())
                } else {
                    Var::Elem(x.clone())
                };
                let free = f
                    .free_vars()
                    .iter()
                    .map(|v| self.lookup(v))
                    .collect::<Result<Vec<_>>>()?;
                let slot = self.next_slot;
                self.next_slot += 1;
                self.scope.push((var, slot));
                let body = self.compile(g)?;
                self.scope.pop();
                Node::Quant {
                    slot,
                    set,
                    universal,
                    body,
                    free,
                }
            }
        };
        Ok(self.push(node))
    }
}

struct Machine<'a> {
    d: &'a Dense,
    nodes: &'a [Node],
    /// Position of each dense index in the order.
    pos: Option<Vec<usize>>,
    env: Vec<u64>,
    memo: HashMap<(NodeIx, Vec<u64>), bool>,
}

impl Machine<'_> {
    fn value(&self, (slot, set): (Slot, bool)) -> Option<usize> {
        let v = self.env[slot];
        if set {
            (v.count_ones() == 1).then(|| v.trailing_zeros() as usize)
        } else {
            Some(v as usize)
        }
    }

    fn run(&mut self, ix: NodeIx) -> bool {
        match &self.nodes[ix] {
            Node::Const(b) => *b,
            Node::Rel(i, ts) => {
                let mut tuple = Vec::with_capacity(ts.len());
                for &t in ts {
                    match self.value(t) {
                        Some(v) => tuple.push(v as u8),
                        None => return false,
                    }
                }
                self.d.rels[*i].holds(&tuple)
            }
            Node::Eq(x, y) => match (self.value(*x), self.value(*y)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
            Node::Le(x, y) => match (self.value(*x), self.value(*y)) {
                (Some(a), Some(b)) => {
                    let pos = self.pos.as_ref().expect("order checked at compile time");
                    pos[a] <= pos[b]
                }
                _ => false,
            },
            Node::In(x, s) => self.env[*s] >> self.env[*x] & 1 == 1,
            Node::Sub(s, t) => self.env[*s] & !self.env[*t] == 0,
            Node::Sing(s) => self.env[*s].count_ones() == 1,
            Node::Count(m, s) => self.env[*s].count_ones().is_multiple_of((*m).max(1)),
            Node::Not(g) => !self.run(*g),
            Node::And(x, y) => {
                let (x, y) = (*x, *y);
                self.run(x) && self.run(y)
            }
            Node::Or(x, y) => {
                let (x, y) = (*x, *y);
                self.run(x) || self.run(y)
            }
            Node::Implies(x, y) => {
                let (x, y) = (*x, *y);
                !self.run(x) || self.run(y)
            }
            Node::Quant {
                slot,
                set,
                universal,
                body,
                free,
            } => {
                let (slot, set, universal, body) = (*slot, *set, *universal, *body);
                let key = (ix, free.iter().map(|&s| self.env[s]).collect::<Vec<_>>());
                if let Some(&b) = self.memo.get(&key) {
                    return b;
                }
                let n = self.d.n();
                let mut result = universal;
                if set {
                    let full = self.d.full_mask();
                    let mut m = 0u64;
                    loop {
                        self.env[slot] = m;
                        if self.run(body) != universal {
                            result = !universal;
                            break;
                        }
                        if m == full {
                            break;
                        }
                        m = (m.wrapping_sub(full)) & full;
                    }
                } else {
                    for v in 0..n {
                        self.env[slot] = v as u64;
                        if self.run(body) != universal {
                            result = !universal;
                            break;
                        }
                    }
                }
                self.memo.insert(key, result);
                result
            }
        }
    }
}

/// Truth of `phi` in `a` under `asg`, with `order` listing the universe from
/// smallest to largest when `phi` uses `<=`.
///
/// Set arguments of relation, equality and order atoms stand for their
/// unique element; such an atom is false unless the set is a singleton.
pub fn evaluate(
    a: &Structure,
    asg: &Assignment,
    phi: &Formula,
    order: Option<&[Elem]>,
) -> Result<bool> {
    let d = Dense::new(a).ok_or_else(|| {
        LogicError::Capacity(format!(
            "universe of {} elements exceeds {DENSE_MAX}",
            a.len()
        ))
    })?;
    let pos = match order {
        Some(o) => Some(order_positions(&d, o)?),
        None if phi.mentions_order() => return Err(LogicError::MissingOrder),
        None => None,
    };
    let mut c = Compiler {
        a,
        nodes: Vec::new(),
        scope: Vec::new(),
        next_slot: 0,
    };
    let mut env = Vec::new();
    for v in phi.free_vars() {
        let value = match &v {
            Var::Elem(x) => {
                let e = *asg
                    .elems
                    .get(x)
                    .ok_or_else(|| LogicError::Unbound(x.clone()))?;
                d.index(e).ok_or(LogicError::ElementOutside(e))? as u64
            }
            Var::Set(x) => {
                let s = asg
                    .sets
                    .get(x)
                    .ok_or_else(|| LogicError::Unbound(x.clone()))?;
                if let Some(e) = s.iter().find(|e| !a.contains(**e)) {
                    return Err(LogicError::ElementOutside(*e));
                }
                d.mask(s).expect("checked above")
            }
        };
        c.scope.push((v, c.next_slot));
        c.next_slot += 1;
        env.push(value);
    }
    let root = c.compile(phi)?;
    env.resize(c.next_slot, 0);
    let mut m = Machine {
        d: &d,
        nodes: &c.nodes,
        pos,
        env,
        memo: HashMap::new(),
    };
    Ok(m.run(root))
}

fn order_positions(d: &Dense, order: &[Elem]) -> Result<Vec<usize>> {
    if order.len() != d.n() {
        return Err(LogicError::NotAnOrder(format!(
            "{} entries for a universe of {}",
            order.len(),
            d.n()
        )));
    }
    let mut pos = vec![usize::MAX; d.n()];
    for (p, &e) in order.iter().enumerate() {
        let i = d
            .index(e)
            .ok_or_else(|| LogicError::NotAnOrder(format!("element {e} is not in the universe")))?;
        if pos[i] != usize::MAX {
            return Err(LogicError::NotAnOrder(format!("element {e} repeated")));
        }
        pos[i] = p;
    }
    Ok(pos)
}
