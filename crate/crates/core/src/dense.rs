use std::collections::HashSet;

use crate::{Elem, Structure};

/// Largest universe a [`Dense`] view supports (sets are `u64` masks).
pub const DENSE_MAX: usize = 64;

/// One relation over dense indices.
#[derive(Debug, Clone)]
pub enum DenseRel {
    Unary(u64),
    /// Row `i` is the mask of `j` with `(i, j)` in the relation.
    Binary(Vec<u64>),
    Other(HashSet<Vec<u8>>),
}

impl DenseRel {
    pub fn holds(&self, t: &[u8]) -> bool {
        match self {
            DenseRel::Unary(m) => m >> t[0] & 1 == 1,
            DenseRel::Binary(rows) => rows[t[0] as usize] >> t[1] & 1 == 1,
            DenseRel::Other(s) => s.contains(t),
        }
    }

    /// Number of tuples, for unary relations the cardinality.
    pub fn count(&self) -> usize {
        match self {
            DenseRel::Unary(m) => m.count_ones() as usize,
            DenseRel::Binary(rows) => rows.iter().map(|r| r.count_ones() as usize).sum(),
            DenseRel::Other(s) => s.len(),
        }
    }
}

/// A structure re-indexed to `0..n` with bitmask relations. Index `i`
/// corresponds to the `i`th smallest element.
#[derive(Debug, Clone)]
pub struct Dense {
    pub elems: Vec<Elem>,
    pub rels: Vec<DenseRel>,
    pub arities: Vec<usize>,
}

impl Dense {
    /// `None` if the universe exceeds [`DENSE_MAX`].
    pub fn new(a: &Structure) -> Option<Dense> {
        let elems: Vec<Elem> = a.universe().iter().copied().collect();
        let n = elems.len();
        if n > DENSE_MAX {
            return None;
        }
        let idx = |e: &Elem| elems.binary_search(e).expect("tuple inside universe") as u8;
        let mut rels = Vec::new();
        let mut arities = Vec::new();
        for (i, sym) in a.vocabulary().symbols().iter().enumerate() {
            let tuples = a.relation_at(i);
            arities.push(sym.arity);
            rels.push(match sym.arity {
                1 => DenseRel::Unary(tuples.iter().fold(0, |m, t| m | 1 << idx(&t[0]))),
                2 => {
                    let mut rows = vec![0u64; n];
                    for t in tuples {
                        rows[idx(&t[0]) as usize] |= 1 << idx(&t[1]);
                    }
                    DenseRel::Binary(rows)
                }
                _ => DenseRel::Other(
                    tuples
                        .iter()
                        .map(|t| t.iter().map(idx).collect())
                        .collect(),
                ),
            });
        }
        Some(Dense {
            elems,
            rels,
            arities,
        })
    }

    pub fn n(&self) -> usize {
        self.elems.len()
    }

    pub fn index(&self, e: Elem) -> Option<usize> {
        self.elems.binary_search(&e).ok()
    }

    /// Mask of a set of elements; `None` if one lies outside the universe.
    pub fn mask<'a>(&self, set: impl IntoIterator<Item = &'a Elem>) -> Option<u64> {
        let mut m = 0u64;
        for e in set {
            m |= 1 << self.index(*e)?;
        }
        Some(m)
    }

    /// Elements of a mask, ascending.
    pub fn unmask(&self, m: u64) -> Vec<Elem> {
        (0..self.n())
            .filter(|i| m >> i & 1 == 1)
            .map(|i| self.elems[i])
            .collect()
    }

    pub fn full_mask(&self) -> u64 {
        full_mask(self.n())
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
