use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use oimso_core::dense::{Dense, DenseRel};
use oimso_core::{Elem, Structure};
use oimso_logic::{CountTarget, Formula, Var};

use crate::registry::{Payload, Signature};
use crate::{Result, TypeError, TypeId, TypeRegistry};

/// One atom of the basis over set variables `X1..Xp` (0-based indices here).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Atom {
    Sub(usize, usize),
    Sing(usize),
    /// Signature symbol index applied to singleton sets.
    Rel(usize, Vec<usize>),
    Le(usize, usize),
    Count(u32, usize),
    /// `m` divides the size of a unary relation.
    CountRel(u32, usize),
}

pub(crate) fn set_var(i: usize) -> String {
    format!("X{}", i + 1)
}

impl Atom {
    pub(crate) fn to_formula(&self, sig: &Signature) -> Formula {
        let v = |i: &usize| Var::Set(set_var(*i));
        match self {
            Atom::Sub(i, j) => Formula::Sub(set_var(*i), set_var(*j)),
            Atom::Sing(i) => Formula::Sing(set_var(*i)),
            Atom::Rel(s, args) => Formula::Rel(sig.symbols[*s].name.clone(), args.iter().map(v).collect()),
            Atom::Le(i, j) => Formula::Le(v(i), v(j)),
            Atom::Count(m, i) => Formula::Count(*m, CountTarget::Set(set_var(*i))),
            Atom::CountRel(m, s) => {
                Formula::Count(*m, CountTarget::Unary(sig.symbols[*s].name.clone()))
            }
        }
    }
}

fn basis(sig: &Signature, p: usize) -> Vec<Atom> {
    let mut out = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if i != j {
                out.push(Atom::Sub(i, j));
            }
        }
    }
    out.extend((0..p).map(Atom::Sing));
    for (s, sym) in sig.symbols.iter().enumerate() {
        let k = sym.arity as u32;
        for code in 0..p.pow(k) {
            let mut args = Vec::with_capacity(k as usize);
            let mut c = code;
            for _ in 0..k {
                args.push(c % p);
                c /= p;
            }
            args.reverse();
            out.push(Atom::Rel(s, args));
        }
    }
    if sig.ordered {
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    out.push(Atom::Le(i, j));
                }
            }
        }
    }
    for m in 2..=sig.modulus {
        out.extend((0..p).map(|i| Atom::Count(m, i)));
        for (s, sym) in sig.symbols.iter().enumerate() {
            if sym.arity == 1 {
                out.push(Atom::CountRel(m, s));
            }
        }
    }
    out
}

fn lcm_upto(c: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=c.max(1)).fold(1, |l, m| l / gcd(l, m) * m)
}

/// A structure prepared for type computation.
pub(crate) struct Ctx<'a> {
    pub reg: &'a TypeRegistry,
    pub sig: Signature,
    sig_id: u32,
    pub d: Dense,
    /// Dense relation index for each signature symbol.
    rel: Vec<usize>,
    pos: Option<Vec<usize>>,
    period: u32,
    /// Enumerate all subsets at every rank.
    pub exhaustive: bool,
    basis: RefCell<HashMap<usize, Rc<Vec<Atom>>>>,
}

impl<'a> Ctx<'a> {
    pub fn new(
        reg: &'a TypeRegistry,
        a: &Structure,
        order: Option<&[Elem]>,
        modulus: u32,
    ) -> Result<Self> {
        // subset enumeration uses u64 counters
        let d = Dense::new(a).filter(|d| d.n() < 64).ok_or_else(|| {
            TypeError::Capacity(format!("universe of {} elements is too large", a.len()))
        })?;
        let sig = Signature::new(a.vocabulary(), order.is_some(), modulus);
        let rel = sig
            .symbols
            .iter()
            .map(|s| a.vocabulary().index_of(&s.name).expect("same vocabulary"))
            .collect();
        let pos = match order {
            None => None,
            Some(o) => {
                let mut pos = vec![usize::MAX; d.n()];
                if o.len() != d.n() {
                    return Err(TypeError::Invalid("order is not a permutation".into()));
                }
                for (p, &e) in o.iter().enumerate() {
                    match d.index(e) {
                        Some(i) if pos[i] == usize::MAX => pos[i] = p,
                        _ => return Err(TypeError::Invalid("order is not a permutation".into())),
                    }
                }
                Some(pos)
            }
        };
        Ok(Ctx {
            reg,
            sig_id: reg.signature_id(&sig),
            period: lcm_upto(sig.modulus),
            sig,
            d,
            rel,
            pos,
            exhaustive: false,
            basis: RefCell::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }

    pub fn masks(&self, sets: &[BTreeSet<Elem>]) -> Result<Vec<u64>> {
        sets.iter()
            .map(|s| {
                self.d.mask(s).ok_or_else(|| {
                    TypeError::Invalid("set contains an element outside the universe".into())
                })
            })
            .collect()
    }

    pub fn basis(&self, p: usize) -> Rc<Vec<Atom>> {
        self.basis
            .borrow_mut()
            .entry(p)
            .or_insert_with(|| Rc::new(basis(&self.sig, p)))
            .clone()
    }

    fn holds(&self, atom: &Atom, sets: &[u64], single: &[Option<u8>]) -> bool {
        match atom {
            Atom::Sub(i, j) => sets[*i] & !sets[*j] == 0,
            Atom::Sing(i) => single[*i].is_some(),
            Atom::Rel(s, args) => {
                let rel = &self.d.rels[self.rel[*s]];
                match (rel, args.as_slice()) {
                    (DenseRel::Unary(m), [i]) => single[*i].is_some_and(|x| m >> x & 1 == 1),
                    (DenseRel::Binary(rows), [i, j]) => match (single[*i], single[*j]) {
                        (Some(x), Some(y)) => rows[x as usize] >> y & 1 == 1,
                        _ => false,
                    },
                    _ => {
                        let t: Option<Vec<u8>> = args.iter().map(|i| single[*i]).collect();
                        t.is_some_and(|t| rel.holds(&t))
                    }
                }
            }
            Atom::Le(i, j) => match (single[*i], single[*j], &self.pos) {
                (Some(x), Some(y), Some(pos)) => pos[x as usize] <= pos[y as usize],
                _ => false,
            },
            Atom::Count(m, i) => sets[*i].count_ones().is_multiple_of(*m),
            Atom::CountRel(m, s) => (self.d.rels[self.rel[*s]].count() as u32).is_multiple_of(*m),
        }
    }

    pub fn diag(&self, sets: &[u64]) -> Vec<u64> {
        let single: Vec<Option<u8>> = sets
            .iter()
            .map(|m| (m.count_ones() == 1).then(|| m.trailing_zeros() as u8))
            .collect();
        let basis = self.basis(sets.len());
        let mut bits = vec![0u64; basis.len().div_ceil(64)];
        for (k, atom) in basis.iter().enumerate() {
            if self.holds(atom, sets, &single) {
                bits[k / 64] |= 1 << (k % 64);
            }
        }
        bits
    }

    /// Index of the first basis atom on which the two diagrams differ.
    pub fn first_difference(a: &[u64], b: &[u64]) -> Option<usize> {
        a.iter()
            .zip(b)
            .enumerate()
            .find(|(_, (x, y))| x != y)
            .map(|(w, (x, y))| w * 64 + (x ^ y).trailing_zeros() as usize)
    }

    pub fn tp(&self, sets: &mut Vec<u64>, r: usize) -> TypeId {
        if r == 0 {
            let bits = self.diag(sets);
            return self.reg.intern(Payload::Atomic {
                sig: self.sig_id,
                p: sets.len(),
                bits,
            });
        }
        let mut children = BTreeSet::new();
        for q in self.candidates(sets, r) {
            sets.push(q);
            children.insert(self.tp(sets, r - 1));
            sets.pop();
        }
        self.reg.intern(Payload::Extensions {
            rank: r,
            p: sets.len(),
            children: children.into_iter().collect(),
        })
    }

    /// Child types with the first set realizing each.
    pub fn witnesses(&self, sets: &mut Vec<u64>, r: usize) -> BTreeMap<TypeId, u64> {
        let mut out = BTreeMap::new();
        for q in self.candidates(sets, r) {
            sets.push(q);
            let t = self.tp(sets, r - 1);
            sets.pop();
            out.entry(t).or_insert(q);
        }
        out
    }

    fn all_subsets(&self) -> Vec<u64> {
        let n = self.n();
        assert!(n < 64, "subset enumeration needs fewer than 64 elements");
        (0..1u64 << n).collect()
    }

    /// Sets `Q` such that the types of `(sets, Q)` at rank `r - 1` over the
    /// candidates are exactly those over all subsets.
    ///
    /// At rank 1 a non-singleton `Q` is described by how many elements it
    /// takes from each cell of the Venn diagram of `sets`, up to a threshold
    /// and modulo the counting period. At rank 2 the same holds for the
    /// classes of elements with equal diagrams over `(sets, {x})`. Higher
    /// ranks enumerate all subsets.
    pub fn candidates(&self, sets: &[u64], r: usize) -> Vec<u64> {
        let n = self.n();
        if self.exhaustive {
            return self.all_subsets();
        }
        let singletons = (0..n).map(|i| 1u64 << i);
        let groups: Vec<Vec<usize>> = match r {
            1 => {
                let mut cells: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
                for i in 0..n {
                    let key = sets.iter().map(|m| m >> i & 1 == 1).collect();
                    cells.entry(key).or_default().push(i);
                }
                cells.into_values().collect()
            }
            2 => {
                let mut classes: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
                let mut ext = sets.to_vec();
                ext.push(0);
                for i in 0..n {
                    *ext.last_mut().unwrap() = 1 << i;
                    classes.entry(self.diag(&ext)).or_default().push(i);
                }
                classes.into_values().collect()
            }
            _ => return self.all_subsets(),
        };
        let l = self.period as usize;
        let counts: Vec<Vec<usize>> = groups
            .iter()
            .map(|g| {
                let s = g.len();
                let mut ks: BTreeSet<usize> = BTreeSet::from([0, s]);
                if r == 1 {
                    ks.extend(1..=(l + 1).min(s.saturating_sub(1)));
                } else {
                    let b = 2 * l + 2;
                    ks.extend(0..=b.min(s));
                    ks.extend(s.saturating_sub(b)..=s);
                }
                ks.into_iter().collect()
            })
            .collect();
        let combos = counts
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
        if n < 20 && combos.is_none_or(|c| c >= 1 << n) {
            return self.all_subsets();
        }
        let mut out: Vec<u64> = singletons.collect();
        let mut choice = vec![0usize; groups.len()];
        'outer: loop {
            let mut q = 0u64;
            for (k, g) in groups.iter().enumerate() {
                for &i in &g[..counts[k][choice[k]]] {
                    q |= 1 << i;
                }
            }
            out.push(q);
            for k in 0..choice.len() {
                choice[k] += 1;
                if choice[k] < counts[k].len() {
                    continue 'outer;
                }
                choice[k] = 0;
            }
            break;
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

