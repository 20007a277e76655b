use std::collections::BTreeSet;

use oimso_core::{Elem, Graph};
use serde::Serialize;

use crate::separators::is_atom;
use crate::triconnected::is_k_connected;
use crate::{has_minor, improve, treewidth_exact, DecompError, Result, MINOR_ORACLE_MAX, TREEWIDTH_ORACLE_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SeparabilityMode {
    /// Improved atoms of treewidth at most `k`.
    Tw { k: usize },
    /// 3-connected graphs without a `K_{3,ell}` minor.
    Minor { ell: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparabilityReport {
    pub components: usize,
    pub bound: usize,
    /// The count must be strictly below `bound` rather than at most `bound`.
    pub strict: bool,
    pub ok: bool,
    /// Preconditions that were checked and failed.
    pub precondition_failures: Vec<String>,
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let edges = (0..a as Elem).flat_map(|i| (0..b as Elem).map(move |j| (i, a as Elem + j)));
    Graph::from_edges(0..(a + b) as Elem, edges)
}

/// Counts the components of `G - S` against the bound of the mode.
/// Preconditions are verified only where the oracles apply.
pub fn separability_check(
    g: &Graph,
    s: &BTreeSet<Elem>,
    mode: SeparabilityMode,
) -> Result<SeparabilityReport> {
    if let Some(&v) = s.iter().find(|v| !g.vertex_set().contains(v)) {
        return Err(DecompError::UnknownVertex(v));
    }
    let components = g.without(s).components().len();
    let n = g.vertex_count();
    let mut failures = Vec::new();
    let (bound, strict) = match mode {
        SeparabilityMode::Tw { k } => {
            if n <= TREEWIDTH_ORACLE_MAX {
                let tw = treewidth_exact(g)?;
                if tw > k {
                    failures.push(format!("treewidth {tw} exceeds {k}"));
                }
                if improve(g, tw) != *g {
                    failures.push("graph is not improved".into());
                }
                if !is_atom(g) {
                    failures.push("graph is not an atom".into());
                }
            }
            (binom(s.len(), 2) * k + 1, false)
        }
        SeparabilityMode::Minor { ell } => {
            if n <= TREEWIDTH_ORACLE_MAX && !is_k_connected(g, 3) {
                failures.push("graph is not 3-connected".into());
            }
            if n <= MINOR_ORACLE_MAX.0 && 3 + ell <= MINOR_ORACLE_MAX.1
                && has_minor(g, &complete_bipartite(3, ell))? {
                    failures.push(format!("graph has a K_3,{ell} minor"));
                }
            if s.len() <= 2 {
                (1, false)
            } else {
                (ell * binom(s.len(), 3), true)
            }
        }
    };
    let ok = if strict {
        components < bound
    } else {
        components <= bound
    };
    Ok(SeparabilityReport {
        components,
        bound,
        strict,
        ok,
        precondition_failures: failures,
    })
}
