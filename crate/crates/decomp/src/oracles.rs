use std::collections::BTreeSet;

use oimso_core::{Elem, Graph};

use crate::{DecompError, Result};

/// Largest graph accepted by [`treewidth_exact`].
pub const TREEWIDTH_ORACLE_MAX: usize = 12;
/// Largest host and pattern accepted by [`has_minor`].
pub const MINOR_ORACLE_MAX: (usize, usize) = (10, 6);

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    let vs: Vec<Elem> = g.vertices().collect();
    vs.iter()
        .map(|&v| {
            vs.iter()
                .enumerate()
                .filter(|(_, &w)| g.has_edge(v, w))
                .fold(0u32, |m, (j, _)| m | 1 << j)
        })
        .collect()
}

/// Exact treewidth by dynamic programming over elimination prefixes.
pub fn treewidth_exact(g: &Graph) -> Result<usize> {
    let n = g.vertex_count();
    if n > TREEWIDTH_ORACLE_MAX {
        return Err(DecompError::Capacity(format!(
            "treewidth oracle takes at most {TREEWIDTH_ORACLE_MAX} vertices, got {n}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let adj = adjacency_masks(g);
    // vertices outside `s + v` reachable from `v` through `s`
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = adj[u] & !seen;
            seen |= nb;
            out |= nb & !s;
            frontier |= nb & s;
        }
        out.count_ones()
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![i32::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i32::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            best = best.min(tw[prev as usize].max(q(prev, v) as i32));
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize].max(0) as usize)
}

/// Whether `h` is a minor of `g`, by searching for branch sets.
///
/// Unused vertices of a model can always be absorbed into an adjacent
/// branch set within their component, so it suffices to partition the
/// vertices of some union of components of `g` into exactly `|V(h)|`
/// connected blocks.
pub fn has_minor(g: &Graph, h: &Graph) -> Result<bool> {
    let (gmax, hmax) = MINOR_ORACLE_MAX;
    let (n, k) = (g.vertex_count(), h.vertex_count());
    if n > gmax || k > hmax {
        return Err(DecompError::Capacity(format!(
            "minor oracle takes hosts up to {gmax} and patterns up to {hmax} vertices"
        )));
    }
    if k == 0 {
        return Ok(true);
    }
    if k > n || h.edges().count() > g.edges().count() {
        return Ok(false);
    }
    let adj = adjacency_masks(g);
    let hv: Vec<Elem> = h.vertices().collect();
    let h_edges: Vec<(usize, usize)> = h
        .edges()
        .map(|(a, b)| {
            let i = hv.iter().position(|&x| x == a).unwrap();
            let j = hv.iter().position(|&x| x == b).unwrap();
            (i, j)
        })
        .collect();
    let perms = permutations(k);
    let vs: Vec<Elem> = g.vertices().collect();
    let comps: Vec<u32> = g
        .components()
        .iter()
        .map(|c| {
            c.iter()
                .map(|v| vs.iter().position(|x| x == v).unwrap())
                .fold(0, |m, i| m | 1 << i)
        })
        .collect();
    for keep in 1u32..1 << comps.len() {
        let used = (0..comps.len())
            .filter(|i| keep >> i & 1 == 1)
            .fold(0u32, |m, i| m | comps[i]);
        if (used.count_ones() as usize) < k {
            continue;
        }
        let order: Vec<usize> = (0..n).filter(|i| used >> i & 1 == 1).collect();
        let mut blocks = vec![0u32; k];
        if search(&adj, &order, 0, 0, &mut blocks, &h_edges, &perms) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn connected(adj: &[u32], set: u32) -> bool {
    if set == 0 {
        return false;
    }
    let mut seen = 1u32 << set.trailing_zeros();
    let mut frontier = seen;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nb = adj[u] & set & !seen;
        seen |= nb;
        frontier |= nb;
    }
    seen == set
}

/// Assigns `order[i..]` to blocks as a restricted growth string.
fn search(
    adj: &[u32],
    order: &[usize],
    i: usize,
    used: usize,
    blocks: &mut [u32],
    h_edges: &[(usize, usize)],
    perms: &[Vec<usize>],
) -> bool {
    let k = blocks.len();
    if order.len() - i < k - used {
        return false;
    }
    if i == order.len() {
        if !blocks.iter().all(|&b| connected(adj, b)) {
            return false;
        }
        let touch = |a: u32, b: u32| {
            let mut x = a;
            while x != 0 {
                let u = x.trailing_zeros() as usize;
                x &= x - 1;
                if adj[u] & b != 0 {
                    return true;
                }
            }
            false
        };
        let mut quotient = vec![vec![false; k]; k];
        for a in 0..k {
            for b in a + 1..k {
                let t = touch(blocks[a], blocks[b]);
                quotient[a][b] = t;
                quotient[b][a] = t;
            }
        }
        return perms
            .iter()
            .any(|p| h_edges.iter().all(|&(x, y)| quotient[p[x]][p[y]]));
    }
    let v = order[i];
    for b in 0..(used + 1).min(k) {
        blocks[b] |= 1 << v;
        let found = search(adj, order, i + 1, used.max(b + 1), blocks, h_edges, perms);
        blocks[b] &= !(1 << v);
        if found {
            return true;
        }
    }
    false
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, left: &mut BTreeSet<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        for x in left.clone() {
            left.remove(&x);
            cur.push(x);
            go(cur, left, out);
            cur.pop();
            left.insert(x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}
