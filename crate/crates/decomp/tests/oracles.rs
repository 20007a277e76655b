use std::collections::{BTreeSet, HashMap};

use oimso_core::{Elem, Graph};
use oimso_decomp::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: u32, p: std::ops::Range<f64>) -> Graph {
    let p = rng.gen_range(p);
    let mut g = Graph::new(0..n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

fn set(xs: &[Elem]) -> BTreeSet<Elem> {
    xs.iter().copied().collect()
}

/// Width of the best elimination ordering, trying all orderings.
fn treewidth_by_orderings(g: &Graph) -> usize {
    fn go(g: &Graph, best: &mut usize, cur: usize) {
        if cur >= *best {
            return;
        }
        if g.vertex_count() == 0 {
            *best = cur;
            return;
        }
        for v in g.vertices().collect::<Vec<_>>() {
            let nb = g.neighbors(v).clone();
            let mut h = g.without(&BTreeSet::from([v]));
            h.make_clique(&nb);
            go(&h, best, cur.max(nb.len()));
        }
    }
    let mut best = usize::MAX;
    go(g, &mut best, 0);
    best
}

/// Smallest vertex set avoiding `v`, `w` that separates them, in
/// `G` minus the edge `vw`; the edge adds one.
fn menger_by_cuts(g: &Graph, v: Elem, w: Elem) -> usize {
    let mut h = g.clone();
    let direct = h.has_edge(v, w);
    h.remove_edge(v, w);
    let others: Vec<Elem> = h.vertices().filter(|&x| x != v && x != w).collect();
    let mut best = others.len();
    for m in 0u32..1 << others.len() {
        let s: BTreeSet<Elem> = others
            .iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .map(|(_, x)| *x)
            .collect();
        if s.len() < best && !h.without(&s).reach(v, |_| true).contains(&w) {
            best = s.len();
        }
    }
    best + direct as usize
}

fn canon_key(g: &Graph) -> Vec<(Elem, Elem)> {
    let idx: HashMap<Elem, Elem> = g.vertices().enumerate().map(|(i, v)| (v, i as Elem)).collect();
    let mut e: Vec<_> = g.edges().map(|(a, b)| (idx[&a], idx[&b])).collect();
    e.push((u32::MAX, g.vertex_count() as Elem));
    e.sort_unstable();
    e
}

fn contains_subgraph(g: &Graph, h: &Graph) -> bool {
    // g and h have equal vertex counts here
    let gv: Vec<Elem> = g.vertices().collect();
    let hv: Vec<Elem> = h.vertices().collect();
    let mut perm: Vec<usize> = (0..gv.len()).collect();
    fn next(p: &mut [usize]) -> bool {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return false;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
    loop {
        let map = |x: Elem| gv[perm[hv.iter().position(|&y| y == x).unwrap()]];
        if h.edges().all(|(a, b)| g.has_edge(map(a), map(b))) {
            return true;
        }
        if !next(&mut perm) {
            return false;
        }
    }
}

/// Minors by repeated vertex deletion, edge deletion and edge contraction.
fn minor_by_operations(g: &Graph, h: &Graph, memo: &mut HashMap<Vec<(Elem, Elem)>, bool>) -> bool {
    if g.vertex_count() < h.vertex_count() || g.edge_count() < h.edge_count() {
        return false;
    }
    let key = canon_key(g);
    if let Some(&r) = memo.get(&key) {
        return r;
    }
    let mut found = g.vertex_count() == h.vertex_count() && contains_subgraph(g, h);
    if !found {
        for v in g.vertices() {
            if minor_by_operations(&g.without(&BTreeSet::from([v])), h, memo) {
                found = true;
                break;
            }
        }
    }
    if !found {
        for (a, b) in g.edges().collect::<Vec<_>>() {
            let mut c = g.without(&BTreeSet::from([b]));
            for &x in g.neighbors(b) {
                if x != a {
                    c.add_edge(a, x);
                }
            }
            if minor_by_operations(&c, h, memo) {
                found = true;
                break;
            }
        }
    }
    memo.insert(key, found);
    found
}

#[test]
fn treewidth_examples() {
    for n in 1..=7 {
        assert_eq!(treewidth_exact(&Graph::complete(n)).unwrap(), n.saturating_sub(1) as usize);
    }
    assert_eq!(treewidth_exact(&Graph::path(6)).unwrap(), 1);
    assert_eq!(treewidth_exact(&Graph::from_edges(0..5, [(0, 1), (0, 2), (0, 3), (3, 4)])).unwrap(), 1);
    for n in 3..=10 {
        assert_eq!(treewidth_exact(&Graph::cycle(n)).unwrap(), 2);
    }
    assert_eq!(treewidth_exact(&Graph::new([])).unwrap(), 0);
    assert!(matches!(treewidth_exact(&Graph::path(13)), Err(DecompError::Capacity(_))));
}

#[test]
fn treewidth_matches_orderings() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..120 {
        let n = rng.gen_range(1..=7);
        let g = random_graph(&mut rng, n, 0.2..0.8);
        assert_eq!(treewidth_exact(&g).unwrap(), treewidth_by_orderings(&g), "{g:?}");
    }
}

#[test]
fn minor_examples() {
    let k4 = Graph::complete(4);
    assert!(has_minor(&k4, &Graph::cycle(3)).unwrap());
    assert!(has_minor(&k4, &complete_bipartite(3, 1)).unwrap());
    assert!(!has_minor(&k4, &Graph::complete(5)).unwrap());
    // the triangular prism is planar
    let prism = Graph::from_edges(0..6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]);
    assert!(!has_minor(&prism, &complete_bipartite(3, 3)).unwrap());
    assert!(has_minor(&prism, &Graph::complete(4)).unwrap());
    // C6 with long chords is K_{3,3}
    let mut k33 = Graph::cycle(6);
    for i in 0..3 {
        k33.add_edge(i, i + 3);
    }
    assert!(has_minor(&k33, &complete_bipartite(3, 3)).unwrap());
    // a pattern with several components
    let two_edges = Graph::from_edges(0..4, [(0, 1), (2, 3)]);
    assert!(has_minor(&Graph::path(4), &two_edges).unwrap());
    assert!(!has_minor(&Graph::path(3), &two_edges).unwrap());
    assert!(has_minor(&Graph::from_edges(0..4, [(0, 1), (2, 3)]), &two_edges).unwrap());
    assert!(matches!(has_minor(&Graph::path(11), &k4), Err(DecompError::Capacity(_))));
}

#[test]
fn minor_matches_operations() {
    let patterns = [
        Graph::cycle(3),
        Graph::cycle(4),
        Graph::complete(4),
        complete_bipartite(2, 3),
        complete_bipartite(1, 3),
        Graph::path(4),
        Graph::from_edges(0..4, [(0, 1), (2, 3)]),
        Graph::new(0..3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..40 {
        let n = rng.gen_range(2..=7);
        let g = random_graph(&mut rng, n, 0.2..0.7);
        for h in &patterns {
            let mut memo = HashMap::new();
            assert_eq!(
                has_minor(&g, h).unwrap(),
                minor_by_operations(&g, h, &mut memo),
                "g={g:?} h={h:?}"
            );
        }
    }
}

#[test]
fn disjoint_paths_examples() {
    assert_eq!(disjoint_paths(&Graph::cycle(4), 0, 2).unwrap(), 2);
    let k4 = Graph::complete(4);
    for u in 0..4 {
        for v in 0..4 {
            if u != v {
                assert_eq!(disjoint_paths(&k4, u, v).unwrap(), 3);
            }
        }
    }
    let star = complete_bipartite(1, 4);
    assert_eq!(disjoint_paths(&star, 0, 3).unwrap(), 1);
    assert_eq!(disjoint_paths(&star, 1, 3).unwrap(), 1);
    assert!(disjoint_paths(&star, 1, 1).is_err());
    assert!(matches!(disjoint_paths(&star, 1, 9), Err(DecompError::UnknownVertex(9))));
}

#[test]
fn disjoint_paths_match_cuts() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let g = random_graph(&mut rng, n, 0.2..0.8);
        for v in 0..n {
            for w in v + 1..n {
                assert_eq!(disjoint_paths(&g, v, w).unwrap(), menger_by_cuts(&g, v, w));
            }
        }
    }
}

/// `n` cycles of length `n`, every cycle vertex adjacent to both of two
/// non-adjacent universal vertices.
fn cycles_with_two_universals(n: u32) -> (Graph, Elem, Elem) {
    let (u1, u2) = (n * n, n * n + 1);
    let mut g = Graph::new(0..n * n + 2);
    for c in 0..n {
        for i in 0..n {
            let v = c * n + i;
            g.add_edge(v, c * n + (i + 1) % n);
            g.add_edge(v, u1);
            g.add_edge(v, u2);
        }
    }
    (g, u1, u2)
}

#[test]
fn improve_examples() {
    let k5 = Graph::complete(5);
    assert_eq!(improve(&k5, 4), k5);
    let c4 = Graph::cycle(4);
    assert_eq!(improve(&c4, 2), c4);
    let (g, u1, u2) = cycles_with_two_universals(3);
    let tw = treewidth_exact(&g).unwrap();
    // two cycles contract to a u1-u2 edge, leaving K5 as a minor
    assert_eq!(tw, 4);
    assert!(is_atom(&g));
    let h = improve(&g, tw);
    assert!(h.has_edge(u1, u2));
    assert!(!is_atom(&h));
    assert_eq!(h.edge_count(), g.edge_count() + 1);
}

#[test]
fn improve_keeps_treewidth() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..60 {
        let n = rng.gen_range(1..=10);
        let g = random_graph(&mut rng, n, 0.2..0.7);
        let k = treewidth_exact(&g).unwrap();
        let h = improve(&g, k);
        assert!(g.edges().all(|(u, v)| h.has_edge(u, v)));
        assert_eq!(h.vertex_set(), g.vertex_set());
        assert_eq!(treewidth_exact(&h).unwrap(), k);
    }
}

fn wheel(rim: u32) -> Graph {
    let mut g = Graph::new(0..=rim);
    for i in 1..=rim {
        g.add_edge(0, i);
        g.add_edge(i, if i == rim { 1 } else { i + 1 });
    }
    g
}

#[test]
fn separability_examples() {
    let k4 = Graph::complete(4);
    let r = separability_check(&k4, &set(&[0, 1]), SeparabilityMode::Tw { k: 3 }).unwrap();
    assert_eq!((r.components, r.bound, r.ok), (1, 4, true));
    assert!(r.precondition_failures.is_empty());

    let w = wheel(5);
    let r = separability_check(&w, &set(&[0, 1, 3]), SeparabilityMode::Minor { ell: 3 }).unwrap();
    assert_eq!(r.components, 2);
    assert_eq!(r.bound, 3);
    assert!(r.ok && r.strict);
    assert!(r.precondition_failures.is_empty(), "{:?}", r.precondition_failures);

    let r = separability_check(&w, &set(&[]), SeparabilityMode::Minor { ell: 3 }).unwrap();
    assert_eq!((r.components, r.ok), (1, true));
    let r = separability_check(&Graph::cycle(5), &set(&[]), SeparabilityMode::Tw { k: 2 }).unwrap();
    assert_eq!((r.components, r.ok), (1, true));

    // preconditions are reported, the count is still made
    let r = separability_check(&Graph::path(3), &set(&[1]), SeparabilityMode::Tw { k: 1 }).unwrap();
    assert_eq!(r.components, 2);
    assert!(!r.precondition_failures.is_empty());
    let r = separability_check(&complete_bipartite(3, 3), &set(&[0, 1, 2]), SeparabilityMode::Minor { ell: 3 }).unwrap();
    assert_eq!(r.components, 3);
    assert!(!r.ok);
    assert!(r.precondition_failures.iter().any(|m| m.contains("minor")));
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |a, i| a * (n - i) / (i + 1))
}

#[test]
fn improved_atoms_are_separable() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut checked = 0;
    for _ in 0..400 {
        let n = rng.gen_range(3..=9);
        let g = random_graph(&mut rng, n, 0.3..0.8);
        let k = treewidth_exact(&g).unwrap();
        let h = improve(&g, k);
        if !is_atom(&h) || treewidth_exact(&h).unwrap() != k || h.edge_count() == binom(n as usize, 2) {
            continue;
        }
        checked += 1;
        let vs: Vec<Elem> = h.vertices().collect();
        for m in 0u32..1 << vs.len() {
            let s: BTreeSet<Elem> = vs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| *v).collect();
            let comps = h.without(&s).components().len();
            assert!(comps <= binom(s.len(), 2) * k + 1);
        }
    }
    assert!(checked >= 20, "only {checked} improved atoms");
}

#[test]
fn three_connected_minor_free_are_separable() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let mut checked = 0;
    let k33 = complete_bipartite(3, 3);
    for _ in 0..300 {
        let n = rng.gen_range(4..=8);
        let g = random_graph(&mut rng, n, 0.4..0.8);
        if !is_k_connected(&g, 3) || has_minor(&g, &k33).unwrap() {
            continue;
        }
        checked += 1;
        let vs: Vec<Elem> = g.vertices().collect();
        for m in 0u32..1 << vs.len() {
            let s: BTreeSet<Elem> = vs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, v)| *v).collect();
            let r = separability_check(&g, &s, SeparabilityMode::Minor { ell: 3 }).unwrap();
            assert!(r.ok, "{g:?} {s:?} {r:?}");
            if s.len() <= 2 {
                assert_eq!(r.components, 1);
            }
        }
    }
    assert!(checked >= 5, "only {checked} graphs");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn improve_is_monotone_and_idempotent(seed in any::<u64>(), n in 1u32..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.2..0.8);
        let k = treewidth_exact(&g).unwrap();
        let h = improve(&g, k);
        prop_assert!(g.edges().all(|(u, v)| h.has_edge(u, v)));
        prop_assert_eq!(improve(&h, k), h);
    }
}
