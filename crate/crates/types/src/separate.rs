use oimso_logic::Formula;

use crate::engine::{set_var, Ctx};
use crate::{Realization, Result, TypeError, TypeRegistry};

/// A set-only formula of rank at most `q` with free variables among
/// `X1..Xp` that holds in `a` and fails in `b`, or `None` when the two have
/// the same rank-`(q, c)` type.
///
/// Follows the first difference in the type recursion: if `a` realizes an
/// extension type that `b` lacks, the formula asserts a set witnessing it
/// that is separated from every extension available in `b`.
pub fn separating_sentence(
    reg: &TypeRegistry,
    a: &Realization,
    b: &Realization,
    q: usize,
    c: u32,
) -> Result<Option<Formula>> {
    if a.sets.len() != b.sets.len() {
        return Err(TypeError::Invalid("set tuples differ in length".into()));
    }
    let ca = Ctx::new(reg, &a.structure, a.order.as_deref(), c)?;
    let cb = Ctx::new(reg, &b.structure, b.order.as_deref(), c)?;
    if ca.sig != cb.sig {
        return Err(TypeError::Invalid("structures have different signatures".into()));
    }
    reg.caps().check(q, a.structure.len().max(b.structure.len()))?;
    let mut pa = ca.masks(&a.sets)?;
    let mut pb = cb.masks(&b.sets)?;
    if ca.tp(&mut pa, q) == cb.tp(&mut pb, q) {
        return Ok(None);
    }
    Ok(Some(separate(&ca, &mut pa, &cb, &mut pb, q)))
}

fn separate(ca: &Ctx, pa: &mut Vec<u64>, cb: &Ctx, pb: &mut Vec<u64>, r: usize) -> Formula {
    if r == 0 {
        let (da, db) = (ca.diag(pa), cb.diag(pb));
        let k = Ctx::first_difference(&da, &db).expect("different atomic types");
        let atom = ca.basis(pa.len())[k].to_formula(&ca.sig);
        return if da[k / 64] >> (k % 64) & 1 == 1 {
            atom
        } else {
            Formula::not(atom)
        };
    }
    let wa = ca.witnesses(pa, r);
    let wb = cb.witnesses(pb, r);
    let Some((_, &qa)) = wa.iter().find(|(t, _)| !wb.contains_key(t)) else {
        return Formula::not(separate(cb, pb, ca, pa, r));
    };
    let x = set_var(pa.len());
    pa.push(qa);
    let parts: Vec<Formula> = wb
        .values()
        .map(|&qb| {
            pb.push(qb);
            let f = separate(ca, pa, cb, pb, r - 1);
            pb.pop();
            f
        })
        .collect();
    pa.pop();
    let mut parts = parts;
    parts.sort();
    parts.dedup();
    Formula::exists_set(&x, Formula::conj(parts))
}
