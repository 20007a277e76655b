use itertools::Itertools;
use oimso_core::{Elem, Structure};
use serde::{Deserialize, Serialize};

use crate::{evaluate, Assignment, Formula, LogicError, Result};

/// Largest universe whose orders are enumerated by default.
pub const DEFAULT_ORDER_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariance {
    pub invariant: bool,
    /// Two orders on which the formula disagrees.
    pub witness: Option<(Vec<Elem>, Vec<Elem>)>,
}

/// Evaluates the sentence `phi` under every linear order of `a` (in
/// lexicographic order of the element sequence) and reports the first order
/// that disagrees with the first one.
pub fn check_order_invariance(phi: &Formula, a: &Structure, cap: usize) -> Result<Invariance> {
    let invariant = Invariance {
        invariant: true,
        witness: None,
    };
    if !phi.mentions_order() {
        return Ok(invariant);
    }
    if a.len() > cap {
        return Err(LogicError::Capacity(format!(
            "{} elements exceed the order enumeration cap {cap}",
            a.len()
        )));
    }
    let asg = Assignment::new();
    let elems: Vec<Elem> = a.universe().iter().copied().collect();
    let mut first: Option<(Vec<Elem>, bool)> = None;
    for order in elems.iter().copied().permutations(elems.len()) {
        let v = evaluate(a, &asg, phi, Some(&order))?;
        match &first {
            None => first = Some((order, v)),
            Some((o, w)) if *w != v => {
                return Ok(Invariance {
                    invariant: false,
                    witness: Some((o.clone(), order)),
                })
            }
            _ => {}
        }
    }
    Ok(invariant)
}
