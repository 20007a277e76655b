use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{CoreError, Elem, Graph, Result, Vocabulary};

/// A finite relational structure. Relations are stored per symbol index
/// of the vocabulary, each as a sorted set of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    vocab: Vocabulary,
    universe: BTreeSet<Elem>,
    relations: Vec<BTreeSet<Vec<Elem>>>,
}

impl Structure {
    pub fn new<N, T>(
        vocab: Vocabulary,
        universe: impl IntoIterator<Item = Elem>,
        relations: impl IntoIterator<Item = (N, T)>,
    ) -> Result<Self>
    where
        N: AsRef<str>,
        T: IntoIterator<Item = Vec<Elem>>,
    {
        let mut s = Structure::empty(vocab);
        s.universe = universe.into_iter().collect();
        for (name, tuples) in relations {
            let name = name.as_ref();
            let idx = s
                .vocab
                .index_of(name)
                .ok_or_else(|| CoreError::UnknownSymbol(name.to_string()))?;
            for t in tuples {
                s.insert_at(idx, t)?;
            }
        }
        Ok(s)
    }

    /// Structure with empty universe and relations.
    pub fn empty(vocab: Vocabulary) -> Self {
        let relations = vec![BTreeSet::new(); vocab.len()];
        Structure {
            vocab,
            universe: BTreeSet::new(),
            relations,
        }
    }

    /// Edgeless structure over `universe`.
    pub fn with_universe(vocab: Vocabulary, universe: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Structure::empty(vocab);
        s.universe = universe.into_iter().collect();
        s
    }

    fn insert_at(&mut self, idx: usize, tuple: Vec<Elem>) -> Result<()> {
        let sym = &self.vocab.symbols()[idx];
        if tuple.len() != sym.arity {
            return Err(CoreError::ArityMismatch {
                symbol: sym.name.clone(),
                arity: sym.arity,
                got: tuple.len(),
            });
        }
        if let Some(&e) = tuple.iter().find(|e| !self.universe.contains(e)) {
            return Err(CoreError::ElementOutside(e));
        }
        self.relations[idx].insert(tuple);
        Ok(())
    }

    /// Adds a tuple to relation `name`.
    pub fn insert(&mut self, name: &str, tuple: Vec<Elem>) -> Result<()> {
        let idx = self
            .vocab
            .index_of(name)
            .ok_or_else(|| CoreError::UnknownSymbol(name.to_string()))?;
        self.insert_at(idx, tuple)
    }

    pub fn add_element(&mut self, e: Elem) {
        self.universe.insert(e);
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn universe(&self) -> &BTreeSet<Elem> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.universe.contains(&e)
    }

    /// Tuples of the `i`th symbol of the vocabulary.
    pub fn relation_at(&self, i: usize) -> &BTreeSet<Vec<Elem>> {
        &self.relations[i]
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Vec<Elem>>> {
        self.vocab.index_of(name).map(|i| &self.relations[i])
    }

    pub fn holds(&self, name: &str, tuple: &[Elem]) -> bool {
        self.relation(name).is_some_and(|r| r.contains(tuple))
    }

    /// All `(symbol index, tuple)` pairs.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &Vec<Elem>)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |t| (i, t)))
    }

    /// Same universe and relations over a larger vocabulary. Symbols of
    /// `self` must appear in `vocab` with equal arity.
    pub fn expand(&self, vocab: Vocabulary) -> Result<Structure> {
        let mut out = Structure::with_universe(vocab, self.universe.iter().copied());
        for (i, sym) in self.vocab.symbols().iter().enumerate() {
            let j = out
                .vocab
                .index_of(&sym.name)
                .ok_or_else(|| CoreError::UnknownSymbol(sym.name.clone()))?;
            if out.vocab.symbols()[j].arity != sym.arity {
                return Err(CoreError::ArityMismatch {
                    symbol: sym.name.clone(),
                    arity: out.vocab.symbols()[j].arity,
                    got: sym.arity,
                });
            }
            out.relations[j] = self.relations[i].clone();
        }
        Ok(out)
    }

    /// Restriction to the symbols of `vocab` (a sub-vocabulary).
    pub fn reduct(&self, vocab: &Vocabulary) -> Result<Structure> {
        let mut out = Structure::with_universe(vocab.clone(), self.universe.iter().copied());
        for (j, sym) in vocab.symbols().iter().enumerate() {
            let i = self
                .vocab
                .index_of(&sym.name)
                .ok_or_else(|| CoreError::UnknownSymbol(sym.name.clone()))?;
            out.relations[j] = self.relations[i].clone();
        }
        Ok(out)
    }

    /// Image under an injective renaming of elements. Elements missing from
    /// `map` keep their id.
    pub fn rename(&self, map: &BTreeMap<Elem, Elem>) -> Structure {
        let f = |e: &Elem| *map.get(e).unwrap_or(e);
        Structure {
            vocab: self.vocab.clone(),
            universe: self.universe.iter().map(f).collect(),
            relations: self
                .relations
                .iter()
                .map(|r| r.iter().map(|t| t.iter().map(f).collect()).collect())
                .collect(),
        }
    }
}

/// The Gaifman graph: elements adjacent iff distinct and in a common tuple.
pub fn gaifman(a: &Structure) -> Graph {
    let mut g = Graph::new(a.universe.iter().copied());
    for (_, t) in a.tuples() {
        for (i, &u) in t.iter().enumerate() {
            for &v in &t[i + 1..] {
                if u != v {
                    g.add_edge(u, v);
                }
            }
        }
    }
    g
}

/// The induced substructure `A[V]`.
pub fn induced(a: &Structure, v: &BTreeSet<Elem>) -> Result<Structure> {
    if let Some(&e) = v.iter().find(|e| !a.universe.contains(e)) {
        return Err(CoreError::ElementOutside(e));
    }
    Ok(Structure {
        vocab: a.vocab.clone(),
        universe: v.clone(),
        relations: a
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|t| t.iter().all(|e| v.contains(e)))
                    .cloned()
                    .collect()
            })
            .collect(),
    })
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    arity: usize,
    tuples: Vec<Vec<Elem>>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    universe: Vec<Elem>,
    relations: BTreeMap<String, RelationJson>,
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let relations = self
            .vocab
            .symbols()
            .iter()
            .zip(&self.relations)
            .map(|(s, r)| {
                (
                    s.name.clone(),
                    RelationJson {
                        arity: s.arity,
                        tuples: r.iter().cloned().collect(),
                    },
                )
            })
            .collect();
        StructureJson {
            universe: self.universe.iter().copied().collect(),
            relations,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Structure {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = StructureJson::deserialize(de)?;
        let vocab = Vocabulary::extended(j.relations.iter().map(|(n, r)| (n.clone(), r.arity)))
            .map_err(D::Error::custom)?;
        Structure::new(
            vocab,
            j.universe,
            j.relations.into_iter().map(|(n, r)| (n, r.tuples)),
        )
        .map_err(D::Error::custom)
    }
}
