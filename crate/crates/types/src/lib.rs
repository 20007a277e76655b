//! Rank-q types of structures with a tuple of distinguished sets.
//!
//! Types are computed over the set-only fragment: variables range over
//! sets, and the atoms are `X sub Y`, `sing(X)`, relation and order atoms on
//! singleton sets, and `C_m` atoms. Element variables embed into this
//! fragment as singleton sets without raising the rank, so every formula of
//! `oimso_logic` is covered. Set tuple position `i` (0-based) corresponds to
//! the free set variable `X{i+1}`.

mod classes;
mod engine;
mod error;
mod registry;
mod separate;

use std::collections::BTreeSet;

use oimso_core::{Elem, Structure};
use oimso_logic::{evaluate, Assignment, Formula, Var};

pub use classes::{oi_type_class, ordered_type_classes, OiClass};
pub use error::TypeError;
pub use registry::{Caps, Payload, Realization, Signature, TypeId, TypeRegistry};
pub use separate::separating_sentence;

use engine::Ctx;

pub type Result<T, E = TypeError> = std::result::Result<T, E>;

/// Rank-`q` MSO type of `(a, sets)`, including order facts when `order`
/// (the universe listed from smallest to largest) is given.
pub fn mso_type(
    reg: &TypeRegistry,
    a: &Structure,
    sets: &[BTreeSet<Elem>],
    q: usize,
    order: Option<&[Elem]>,
) -> Result<TypeId> {
    cmso_type(reg, a, sets, q, 1, order)
}

/// Rank-`(q, c)` type: as [`mso_type`] with counting atoms `C_m` for
/// `2 <= m <= c` in the basis.
pub fn cmso_type(
    reg: &TypeRegistry,
    a: &Structure,
    sets: &[BTreeSet<Elem>],
    q: usize,
    c: u32,
    order: Option<&[Elem]>,
) -> Result<TypeId> {
    compute(reg, a, sets, q, c, order, false)
}

/// [`cmso_type`] enumerating every subset at every rank. Slow; used to
/// cross-check the shortcuts taken at ranks 1 and 2.
#[doc(hidden)]
pub fn cmso_type_exhaustive(
    reg: &TypeRegistry,
    a: &Structure,
    sets: &[BTreeSet<Elem>],
    q: usize,
    c: u32,
    order: Option<&[Elem]>,
) -> Result<TypeId> {
    compute(reg, a, sets, q, c, order, true)
}

fn compute(
    reg: &TypeRegistry,
    a: &Structure,
    sets: &[BTreeSet<Elem>],
    q: usize,
    c: u32,
    order: Option<&[Elem]>,
    exhaustive: bool,
) -> Result<TypeId> {
    reg.caps().check(q, a.len())?;
    let mut ctx = Ctx::new(reg, a, order, c)?;
    ctx.exhaustive = exhaustive;
    let mut masks = ctx.masks(sets)?;
    let t = ctx.tp(&mut masks, q);
    reg.record(
        t,
        || Realization {
            structure: a.clone(),
            sets: sets.to_vec(),
            order: order.map(<[Elem]>::to_vec),
        },
        a.len(),
    );
    Ok(t)
}

/// Whether `a` and `b` have the same rank-`q` MSO type (no distinguished
/// sets). Equivalently, Duplicator wins the `q`-round game in which both
/// players only pick sets.
pub fn equiv(reg: &TypeRegistry, a: &Structure, b: &Structure, q: usize) -> Result<bool> {
    Ok(mso_type(reg, a, &[], q, None)? == mso_type(reg, b, &[], q, None)?)
}

/// Truth of `phi` on the stored realization of `theta`. The free variables
/// of `phi` must be among `X1..Xp`.
pub fn satisfies(reg: &TypeRegistry, theta: TypeId, phi: &Formula) -> Result<bool> {
    let rank = reg.rank(theta)?;
    let sig = reg.signature_of(theta)?;
    let real = reg
        .realization(theta)
        .ok_or(TypeError::Unregistered(theta))?;
    if phi.rank() > rank {
        return Err(TypeError::Mismatch(format!(
            "formula rank {} exceeds type rank {rank}",
            phi.rank()
        )));
    }
    if phi.max_modulus() > sig.modulus {
        return Err(TypeError::Mismatch(format!(
            "modulus {} exceeds the type's {}",
            phi.max_modulus(),
            sig.modulus
        )));
    }
    if phi.mentions_order() && !sig.ordered {
        return Err(TypeError::Mismatch("formula uses an order, type is unordered".into()));
    }
    if let Some(s) = phi
        .symbols()
        .into_iter()
        .find(|s| !sig.symbols.iter().any(|t| &t.name == s))
    {
        return Err(TypeError::Mismatch(format!("symbol `{s}` is not in the vocabulary")));
    }
    let mut asg = Assignment::new();
    for v in phi.free_vars() {
        let index = match &v {
            Var::Set(name) => name
                .strip_prefix('X')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&i| i >= 1 && i <= real.sets.len()),
            Var::Elem(_) => None,
        };
        let i = index.ok_or_else(|| {
            TypeError::Mismatch(format!("free variable `{}` is not one of X1..X{}", v.name(), real.sets.len()))
        })?;
        asg.sets.insert(v.name().to_string(), real.sets[i - 1].clone());
    }
    Ok(evaluate(&real.structure, &asg, phi, real.order.as_deref())?)
}
