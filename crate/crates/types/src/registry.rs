use std::collections::{BTreeSet, HashMap};
use std::fmt;

use oimso_core::{Elem, Structure, Symbol, Vocabulary};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::{Result, TypeError};

/// Dense identifier of an interned type. Only meaningful together with the
/// registry that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeId(pub u32);

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// What a type is computed over: the vocabulary (symbols sorted by name),
/// whether an order is present, and the largest counting modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub symbols: Vec<Symbol>,
    pub ordered: bool,
    pub modulus: u32,
}

impl Signature {
    pub fn new(vocab: &Vocabulary, ordered: bool, modulus: u32) -> Self {
        let mut symbols = vocab.symbols().to_vec();
        symbols.sort();
        Signature {
            symbols,
            ordered,
            modulus: modulus.max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// Truth values of the atomic basis over `p` set variables.
    Atomic { sig: u32, p: usize, bits: Vec<u64> },
    /// Types of all one-set extensions, one rank lower.
    Extensions { rank: usize, p: usize, children: Vec<TypeId> },
}

/// A structure with a set tuple (and order) realizing a type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub structure: Structure,
    pub sets: Vec<BTreeSet<Elem>>,
    pub order: Option<Vec<Elem>>,
}

#[derive(Default, Serialize, Deserialize)]
struct Inner {
    signatures: Vec<Signature>,
    payloads: Vec<Payload>,
    #[serde(skip)]
    sig_index: HashMap<Signature, u32>,
    #[serde(skip)]
    index: HashMap<Payload, TypeId>,
    realizations: Vec<(TypeId, Realization)>,
    #[serde(skip)]
    realization_index: HashMap<TypeId, usize>,
}

/// Limits on rank and universe size. `universe[q]` bounds the universe for
/// rank `q`; the last entry applies to all larger ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_rank: usize,
    pub universe: Vec<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_rank: 3,
            universe: vec![10, 10, 10, 7],
        }
    }
}

impl Caps {
    /// Limits for composition work on expanded structures, where universes
    /// include tree nodes.
    pub fn permissive() -> Self {
        Caps {
            max_rank: 4,
            universe: vec![64, 64, 48, 14, 8],
        }
    }

    pub fn universe_for(&self, q: usize) -> usize {
        self.universe
            .get(q)
            .or(self.universe.last())
            .copied()
            .unwrap_or(0)
    }

    pub fn check(&self, q: usize, n: usize) -> Result<()> {
        if q > self.max_rank {
            return Err(TypeError::Capacity(format!(
                "rank {q} exceeds the cap {}",
                self.max_rank
            )));
        }
        let cap = self.universe_for(q);
        if n > cap {
            return Err(TypeError::Capacity(format!(
                "universe of {n} elements exceeds the cap {cap} at rank {q}"
            )));
        }
        Ok(())
    }
}

/// Append-only interner for type payloads plus the smallest realization
/// seen for each type computed at top level.
#[derive(Default)]
pub struct TypeRegistry {
    inner: RwLock<Inner>,
    caps: Caps,
}

impl fmt::Debug for TypeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.inner.read();
        f.debug_struct("TypeRegistry")
            .field("types", &g.payloads.len())
            .field("realizations", &g.realizations.len())
            .finish()
    }
}

impl TypeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_caps(caps: Caps) -> Self {
        TypeRegistry {
            inner: RwLock::default(),
            caps,
        }
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub(crate) fn signature_id(&self, sig: &Signature) -> u32 {
        if let Some(&id) = self.inner.read().sig_index.get(sig) {
            return id;
        }
        let mut g = self.inner.write();
        if let Some(&id) = g.sig_index.get(sig) {
            return id;
        }
        let id = g.signatures.len() as u32;
        g.signatures.push(sig.clone());
        g.sig_index.insert(sig.clone(), id);
        id
    }

    pub fn signature(&self, id: u32) -> Option<Signature> {
        self.inner.read().signatures.get(id as usize).cloned()
    }

    pub(crate) fn intern(&self, p: Payload) -> TypeId {
        if let Some(&id) = self.inner.read().index.get(&p) {
            return id;
        }
        let mut g = self.inner.write();
        if let Some(&id) = g.index.get(&p) {
            return id;
        }
        let id = TypeId(g.payloads.len() as u32);
        g.payloads.push(p.clone());
        g.index.insert(p, id);
        id
    }

    /// Number of interned types.
    pub fn len(&self) -> usize {
        self.inner.read().payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn payload(&self, t: TypeId) -> Result<Payload> {
        self.inner
            .read()
            .payloads
            .get(t.0 as usize)
            .cloned()
            .ok_or(TypeError::Unknown(t))
    }

    /// Rank of a type.
    pub fn rank(&self, t: TypeId) -> Result<usize> {
        Ok(match self.payload(t)? {
            Payload::Atomic { .. } => 0,
            Payload::Extensions { rank, .. } => rank,
        })
    }

    /// Number of free set variables.
    pub fn arity(&self, t: TypeId) -> Result<usize> {
        Ok(match self.payload(t)? {
            Payload::Atomic { p, .. } | Payload::Extensions { p, .. } => p,
        })
    }

    /// Signature of a type, found through its leftmost atomic descendant.
    pub fn signature_of(&self, mut t: TypeId) -> Result<Signature> {
        loop {
            match self.payload(t)? {
                Payload::Atomic { sig, .. } => {
                    return self
                        .signature(sig)
                        .ok_or_else(|| TypeError::Json(format!("missing signature {sig}")))
                }
                Payload::Extensions { children, .. } => {
                    t = *children
                        .first()
                        .ok_or_else(|| TypeError::Json(format!("type {t} has no children")))?
                }
            }
        }
    }

    /// Keeps `r` as the realization of `t` unless a smaller one is stored.
    pub(crate) fn record(&self, t: TypeId, r: impl FnOnce() -> Realization, size: usize) {
        {
            let g = self.inner.read();
            if let Some(&i) = g.realization_index.get(&t) {
                if g.realizations[i].1.structure.len() <= size {
                    return;
                }
            }
        }
        let r = r();
        let mut g = self.inner.write();
        match g.realization_index.get(&t).copied() {
            Some(i) if g.realizations[i].1.structure.len() > size => g.realizations[i].1 = r,
            Some(_) => {}
            None => {
                let i = g.realizations.len();
                g.realizations.push((t, r));
                g.realization_index.insert(t, i);
            }
        }
    }

    pub fn realization(&self, t: TypeId) -> Option<Realization> {
        let g = self.inner.read();
        g.realization_index
            .get(&t)
            .map(|&i| g.realizations[i].1.clone())
    }

    /// Types with a stored realization, in discovery order.
    pub fn registered(&self) -> Vec<TypeId> {
        self.inner.read().realizations.iter().map(|(t, _)| *t).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&*self.inner.read()).expect("registry serializes")
    }

    /// Rebuilds a registry from [`TypeRegistry::to_json`] output, with
    /// default caps.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mut inner: Inner =
            serde_json::from_value(v.clone()).map_err(|e| TypeError::Json(e.to_string()))?;
        for (i, s) in inner.signatures.iter().enumerate() {
            if inner.sig_index.insert(s.clone(), i as u32).is_some() {
                return Err(TypeError::Json("duplicate signature".into()));
            }
        }
        let n = inner.payloads.len() as u32;
        for (i, p) in inner.payloads.iter().enumerate() {
            let ok = match p {
                Payload::Atomic { sig, .. } => (*sig as usize) < inner.signatures.len(),
                Payload::Extensions { children, .. } => {
                    children.iter().all(|c| c.0 < i as u32) && !children.is_empty()
                }
            };
            if !ok {
                return Err(TypeError::Json(format!("bad payload at {i}")));
            }
            if inner.index.insert(p.clone(), TypeId(i as u32)).is_some() {
                return Err(TypeError::Json(format!("duplicate payload at {i}")));
            }
        }
        for (i, (t, _)) in inner.realizations.iter().enumerate() {
            if t.0 >= n || inner.realization_index.insert(*t, i).is_some() {
                return Err(TypeError::Json(format!("bad realization for {t}")));
            }
        }
        Ok(TypeRegistry {
            inner: RwLock::new(inner),
            caps: Caps::default(),
        })
    }
}
