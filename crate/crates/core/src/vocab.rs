use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Name of the distinguished linear order symbol. It never belongs to a
/// vocabulary; orders are passed alongside structures.
pub const ORDER_SYMBOL: &str = "<=";

const RESERVED: &[&str] = &[
    ORDER_SYMBOL,
    "V_S",
    "V_T",
    "E_T",
    "R_beta",
    "R_ord",
    "R_sigma",
    "R_gamma",
    "V_a",
    "V_b",
    "prec",
];

/// True for names used by expanded tree extensions (including `S_1`, `S_2`, ...).
pub fn is_reserved(name: &str) -> bool {
    if RESERVED.contains(&name) {
        return true;
    }
    match name.strip_prefix("S_") {
        Some(rest) => !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Ordered list of relation symbols with unique names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Symbol>", into = "Vec<Symbol>")]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
}

impl Vocabulary {
    /// A user vocabulary: names unique, arities positive, no reserved names.
    pub fn new(symbols: impl IntoIterator<Item = (impl Into<String>, usize)>) -> Result<Self> {
        let v = Self::extended(symbols)?;
        if let Some(s) = v.symbols.iter().find(|s| is_reserved(&s.name)) {
            return Err(CoreError::ReservedSymbol(s.name.clone()));
        }
        Ok(v)
    }

    /// Like [`Vocabulary::new`] but admits reserved names. Used for the
    /// expanded vocabularies built by downstream crates.
    pub fn extended(symbols: impl IntoIterator<Item = (impl Into<String>, usize)>) -> Result<Self> {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if arity == 0 {
                return Err(CoreError::ZeroArity(name));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(CoreError::DuplicateSymbol(name));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Vocabulary { symbols: out })
    }

    /// The vocabulary `{E/2}` of graphs.
    pub fn graph() -> Self {
        Vocabulary {
            symbols: vec![Symbol {
                name: "E".into(),
                arity: 2,
            }],
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.symbols[i].arity)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

impl TryFrom<Vec<Symbol>> for Vocabulary {
    type Error = CoreError;
    fn try_from(v: Vec<Symbol>) -> Result<Self> {
        Vocabulary::extended(v.into_iter().map(|s| (s.name, s.arity)))
    }
}

impl From<Vocabulary> for Vec<Symbol> {
    fn from(v: Vocabulary) -> Self {
        v.symbols
    }
}
