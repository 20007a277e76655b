use std::collections::{BTreeMap, VecDeque};

use oimso_core::{Elem, Graph};

use crate::{DecompError, Result};

/// Maximum number of internally vertex-disjoint paths between `v` and `w`.
/// An edge `vw` counts as one path.
pub fn disjoint_paths(g: &Graph, v: Elem, w: Elem) -> Result<usize> {
    for x in [v, w] {
        if !g.vertex_set().contains(&x) {
            return Err(DecompError::UnknownVertex(x));
        }
    }
    if v == w {
        return Err(DecompError::Contract("endpoints must differ".into()));
    }
    let idx: BTreeMap<Elem, usize> = g.vertices().enumerate().map(|(i, x)| (x, i)).collect();
    let n = idx.len();
    // node 2i is the entry of vertex i, 2i+1 its exit
    let mut cap = vec![vec![0u32; 2 * n]; 2 * n];
    let big = n as u32 + 1;
    for (&x, &i) in &idx {
        cap[2 * i][2 * i + 1] = if x == v || x == w { big } else { 1 };
        for y in g.neighbors(x) {
            cap[2 * i + 1][2 * idx[y]] = 1;
        }
    }
    let (s, t) = (2 * idx[&v] + 1, 2 * idx[&w]);
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; 2 * n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for x in 0..2 * n {
                if cap[u][x] > 0 && prev[x] == usize::MAX {
                    prev[x] = u;
                    queue.push_back(x);
                }
            }
        }
        if prev[t] == usize::MAX {
            return Ok(flow);
        }
        let mut x = t;
        while x != s {
            let u = prev[x];
            cap[u][x] -= 1;
            cap[x][u] += 1;
            x = u;
        }
        flow += 1;
    }
}

/// Adds an edge between every pair joined by at least `k + 1` internally
/// disjoint paths.
pub fn improve(g: &Graph, k: usize) -> Graph {
    let mut out = g.clone();
    let vs: Vec<Elem> = g.vertices().collect();
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            if !g.has_edge(u, v) && disjoint_paths(g, u, v).expect("distinct vertices") > k {
                out.add_edge(u, v);
            }
        }
    }
    out
}
