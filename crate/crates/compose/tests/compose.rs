use std::collections::{BTreeMap, BTreeSet};

use oimso_compose::*;
use oimso_core::{metrics, Graph, NodeId, NodeKind, TreeDecomposition, SegmentedDecomposition};
use oimso_decomp::{atom_decomposition, segment, treewidth_exact};
use oimso_logic::{evaluate, Assignment};
use oimso_otxx::*;
use oimso_types::{mso_type, separating_sentence, Caps, Realization, TypeId, TypeRegistry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn otxx_of(g: &Graph, provider: BagOrderProvider) -> Otxx {
    let k = treewidth_exact(g).unwrap();
    let d = segment(&atom_decomposition(g, k).unwrap().td);
    let adh = metrics(&d.td).adhesion;
    build_otxx(&g.to_structure(), &d, &provider, adh).unwrap()
}

fn random_graph(rng: &mut impl Rng, max_n: u32, p: f64) -> Graph {
    let n = rng.gen_range(1..=max_n);
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

fn corpus(seed: u64, count: usize, max_n: u32) -> Vec<Otxx> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let g = random_graph(&mut rng, max_n, 0.35);
            let p = [BagOrderProvider::InputId, BagOrderProvider::Bfs][i % 2];
            otxx_of(&g, p)
        })
        .collect()
}

fn registry() -> TypeRegistry {
    TypeRegistry::with_caps(Caps::permissive())
}

fn full(q: usize) -> ComposeConfig {
    ComposeConfig {
        q,
        modulus: 1,
        view: View::Full,
    }
}

fn first_order(x: &Otxx) -> Vec<u32> {
    compatible_orders(x, OrderMode::Any).unwrap().remove(0)
}

/// Star with centre 0: one a-node whose children are isomorphic leaves.
fn star() -> Otxx {
    otxx_of(&Graph::from_edges(0..4, [(0, 1), (0, 2), (0, 3)]), BagOrderProvider::InputId)
}

fn a_node(x: &Otxx) -> NodeId {
    x.tree().td.nodes().find(|&t| x.tree().kind(t) == NodeKind::A).unwrap()
}

#[test]
fn isomorphic_leaves_share_a_type() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let x = star();
    let t = a_node(&x);
    assert_eq!(x.children(t).unwrap().len(), 2);
    let p = c.type_partition(&x, &first_order(&x), t).unwrap();
    assert_eq!(p.values().collect::<BTreeSet<_>>().len(), 1);
    let leaf = *x.children(t).unwrap().first().unwrap();
    assert!(c.type_partition(&x, &first_order(&x), leaf).unwrap().is_empty());
}

#[test]
fn different_children_are_separated() {
    // an a-node on {0} with a triangle and an edge below it
    let g = Graph::from_edges(0..5, [(0, 3), (0, 1), (0, 2), (1, 2), (0, 4)]);
    let bags: BTreeMap<NodeId, BTreeSet<u32>> = [(0, vec![0, 3]), (1, vec![0]), (2, vec![0, 1, 2]), (3, vec![0, 4])]
        .into_iter()
        .map(|(t, b)| (t, b.into_iter().collect()))
        .collect();
    let td = TreeDecomposition::new(0, bags, [(0, 1), (1, 2), (1, 3)]).unwrap();
    let kinds = [(0, NodeKind::B), (1, NodeKind::A), (2, NodeKind::B), (3, NodeKind::B)].into();
    let d = SegmentedDecomposition::new(td, kinds).unwrap();
    assert!(d.is_segmented());
    let x = build_otxx(&g.to_structure(), &d, &BagOrderProvider::InputId, 1).unwrap();
    let reg = registry();
    let c = Composer::new(&reg, full(1));
    let o = first_order(&x);
    let p = c.type_partition(&x, &o, 1).unwrap();
    let (u, w) = (2, 3);
    assert_eq!((p[&u], p[&w]), (c.sub_type(&x, u, &o).unwrap(), c.sub_type(&x, w, &o).unwrap()));
    let (a, b) = (c.sub_type(&x, u, &o).unwrap(), c.sub_type(&x, w, &o).unwrap());
    assert_ne!(a, b);
    let (ra, rb) = (reg.realization(a).unwrap(), reg.realization(b).unwrap());
    let phi = separating_sentence(&reg, &ra, &rb, 1, 1).unwrap().expect("types differ");
    assert!(phi.rank() <= 1);
    let holds = |r: &Realization| {
        let asg = r
            .sets
            .iter()
            .enumerate()
            .fold(Assignment::new(), |asg, (i, s)| asg.with_set(&format!("X{}", i + 1), s.iter().copied()));
        evaluate(&r.structure, &asg, &phi, r.order.as_deref()).unwrap()
    };
    assert!(holds(&ra));
    assert!(!holds(&rb));
}

fn p3() -> Otxx {
    let a = Graph::from_edges(0..3, [(0, 1), (1, 2)]).to_structure();
    let bags: BTreeMap<NodeId, BTreeSet<u32>> = [(0, vec![0, 1]), (1, vec![1]), (2, vec![1, 2])]
        .into_iter()
        .map(|(t, b)| (t, b.into_iter().collect()))
        .collect();
    let td = TreeDecomposition::new(0, bags, [(0, 1), (1, 2)]).unwrap();
    let d = SegmentedDecomposition::new(td, [(0, NodeKind::B), (1, NodeKind::A), (2, NodeKind::B)].into()).unwrap();
    build_otxx(&a, &d, &BagOrderProvider::InputId, 1).unwrap()
}

#[test]
fn childless_b_node_is_typed_directly() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let x = p3();
    let o = first_order(&x);
    let composed = c.compose_b(&x, 2, &TypePartition::new()).unwrap();
    assert_eq!(composed, c.sub_type(&x, 2, &o).unwrap());
}

#[test]
fn substitution_agrees_with_the_original_on_p3() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let x = p3();
    let o = first_order(&x);
    let p = c.type_partition(&x, &o, 0).unwrap();
    let composed = c.compose_b(&x, 0, &p).unwrap();
    let direct = mso_type(&reg, &x.to_structure(), &[], 2, Some(&o)).unwrap();
    assert_eq!(composed, direct);
    assert_eq!(c.compose_fresh(&x, 0, &[1], &p).unwrap(), direct);
}

#[test]
fn compose_checks_node_kinds() {
    let reg = registry();
    let c = Composer::new(&reg, full(1));
    let x = p3();
    let o = first_order(&x);
    let p = c.type_partition(&x, &o, 1).unwrap();
    assert!(matches!(c.compose_b(&x, 1, &p), Err(ComposeError::KindMismatch { .. })));
    let p0 = c.type_partition(&x, &o, 0).unwrap();
    assert!(matches!(c.compose_a(&x, 0, &[1], &p0), Err(ComposeError::KindMismatch { .. })));
    assert!(matches!(c.compose_b(&x, 0, &TypePartition::new()), Err(ComposeError::Contract(_))));
    // a childless a-node violates segmentation and cannot be built
    let td = TreeDecomposition::new(0, [(0, BTreeSet::from([0, 1])), (1, BTreeSet::from([1]))].into(), [(0, 1)]).unwrap();
    let d = SegmentedDecomposition::new(td, [(0, NodeKind::B), (1, NodeKind::A)].into()).unwrap();
    assert!(!d.is_segmented());
    assert!(build_otxx(&Graph::from_edges(0..2, [(0, 1)]).to_structure(), &d, &BagOrderProvider::InputId, 1).is_err());
}

#[test]
fn missing_representative_is_reported() {
    let reg = registry();
    let c = Composer::new(&reg, full(1));
    let other = registry();
    let c2 = Composer::new(&other, full(1));
    let x = p3();
    let p = c2.type_partition(&x, &first_order(&x), 0).unwrap();
    // ids from another registry have no representative here
    let bogus: TypePartition = p.keys().map(|&u| (u, TypeId(9999))).collect();
    assert!(matches!(c.compose_b(&x, 0, &bogus), Err(ComposeError::MissingRepresentative(_))));
}

#[test]
fn single_child_a_node() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let x = p3();
    let o = first_order(&x);
    let p = c.type_partition(&x, &o, 1).unwrap();
    assert_eq!(c.compose_a(&x, 1, &[2], &p).unwrap(), c.sub_type(&x, 1, &o).unwrap());
}

#[test]
fn equal_children_can_be_swapped() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let x = star();
    let t = a_node(&x);
    let p = c.type_partition(&x, &first_order(&x), t).unwrap();
    let seq = x.children(t).unwrap().to_vec();
    let rev: Vec<NodeId> = seq.iter().rev().copied().collect();
    assert_eq!(c.compose_a(&x, t, &seq, &p).unwrap(), c.compose_a(&x, t, &rev, &p).unwrap());
    let oi = c.oi_set_a(&x, t, &cover_of(&p)).unwrap();
    assert_eq!(oi.types.len(), 1);
    assert!(oi.by_enumeration());
}

#[test]
fn dp_matches_direct_types_under_block_orders() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for x in corpus(4, 25, 7) {
        let o = random_compatible_order(&x, &mut rng);
        let n = normalize(&x, &o).unwrap();
        let dp = c.run_dp(&x, &o, 1).unwrap();
        assert_eq!(dp.order, n);
        let direct = mso_type(&reg, &x.to_structure(), &[], 2, Some(&n)).unwrap();
        assert_eq!(dp.root, direct);
        for r in &dp.nodes {
            assert_eq!(c.sub_type(&x, r.node, &o).unwrap(), r.composed, "node {}", r.node);
        }
    }
}

#[test]
fn dp_is_well_defined_across_representatives() {
    // the same nodes composed against representatives collected from a
    // different corpus
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    for x in corpus(5, 15, 6) {
        c.run_dp(&x, &first_order(&x), 1).unwrap();
    }
    for x in corpus(6, 15, 7) {
        let dp = c.run_dp(&x, &first_order(&x), 1).unwrap();
        for r in &dp.nodes {
            let p: TypePartition = r.partition.iter().copied().collect();
            assert_eq!(c.compose_fresh(&x, r.node, &r.children, &p).unwrap(), r.composed);
        }
    }
}

#[test]
fn b_node_types_do_not_depend_on_the_inducing_order() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for x in corpus(8, 20, 7) {
        for t in x.tree().td.nodes().filter(|&t| x.tree().kind(t) == NodeKind::B) {
            let mut by_partition: BTreeMap<Vec<TypeId>, TypeId> = BTreeMap::new();
            for _ in 0..4 {
                let o = random_compatible_order(&x, &mut rng);
                let p: Vec<TypeId> = c.type_partition(&x, &o, t).unwrap().into_values().collect();
                let direct = c.sub_type(&x, t, &o).unwrap();
                assert_eq!(*by_partition.entry(p).or_insert(direct), direct);
            }
        }
    }
}

#[test]
fn raw_orders_can_differ_from_block_orders() {
    // subtrees below an a-node may interleave in a compatible order; the
    // type of such an order is not a function of the child types
    let reg = registry();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut differ = 0;
    for x in corpus(10, 40, 8) {
        let o = random_compatible_order(&x, &mut rng);
        let n = normalize(&x, &o).unwrap();
        let s = x.to_structure();
        if mso_type(&reg, &s, &[], 2, Some(&o)).unwrap() != mso_type(&reg, &s, &[], 2, Some(&n)).unwrap() {
            differ += 1;
        }
    }
    assert!(differ > 0);
}

#[test]
fn parallel_runs_agree() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    for x in corpus(11, 10, 8) {
        let o = first_order(&x);
        assert_eq!(c.run_dp(&x, &o, 1).unwrap(), c.run_dp(&x, &o, 4).unwrap());
    }
}

#[test]
fn dp_rejects_incompatible_orders() {
    let reg = registry();
    let c = Composer::new(&reg, full(1));
    let x = p3();
    let mut o = first_order(&x);
    o.reverse();
    assert!(matches!(c.run_dp(&x, &o, 1), Err(ComposeError::Contract(_))));
}

fn child_realized(c: &Composer, x: &Otxx, t: NodeId) -> CompatibleCover {
    x.children(t)
        .unwrap()
        .iter()
        .map(|&u| (u, c.realized_types(&sub_otxx(x, u).unwrap(), Role::Child, 2000).unwrap()))
        .collect()
}

#[test]
fn oi_sets_at_b_nodes() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for x in corpus(13, 20, 6) {
        for t in x.tree().td.nodes().filter(|&t| x.tree().kind(t) == NodeKind::B) {
            let o = random_compatible_order(&x, &mut rng);
            let p = c.type_partition(&x, &o, t).unwrap();
            let single = c.oi_set_b(&x, t, &cover_of(&p)).unwrap();
            assert_eq!(single.types, BTreeSet::from([c.compose_b(&x, t, &p).unwrap()]));
            assert!(single.types.contains(&c.sub_type(&x, t, &o).unwrap()));
            let wide = child_realized(&c, &x, t);
            let big = c.oi_set_b(&x, t, &wide).unwrap();
            assert!(big.types.is_superset(&single.types), "monotone");
            assert!(!big.by_enumeration());
        }
    }
}

#[test]
fn oi_sets_at_a_nodes_cover_all_compatible_orders() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    for x in corpus(14, 20, 6) {
        for t in x.tree().td.nodes().filter(|&t| x.tree().kind(t) == NodeKind::A) {
            let cover = child_realized(&c, &x, t);
            let Ok(oi) = c.oi_set_a(&x, t, &cover) else { continue };
            let s = sub_otxx(&x, t).unwrap();
            for ty in c.realized_types(&s, Role::Child, 2000).unwrap() {
                assert!(oi.types.contains(&ty));
            }
        }
    }
}

#[test]
fn oi_outputs_are_compatible_at_the_node() {
    // with every child covered by all the types it realizes, the output is
    // exactly what the node realizes, hence one class
    let reg = registry();
    let c = Composer::new(&reg, full(1));
    for x in corpus(15, 12, 6) {
        for t in x.tree().td.nodes().filter(|&t| t != x.root()) {
            let cover = child_realized(&c, &x, t);
            let out = match x.kind(t).unwrap() {
                NodeKind::B => c.oi_set_b(&x, t, &cover),
                NodeKind::A => c.oi_set_a(&x, t, &cover),
            }
            .unwrap();
            let s = sub_otxx(&x, t).unwrap();
            assert_eq!(out.types, c.realized_types(&s, Role::Child, 2000).unwrap());
            let classes = c.co_classes_of(std::slice::from_ref(&x), 2000).unwrap();
            let first = *out.types.iter().next().unwrap();
            assert!(out.types.iter().all(|&ty| classes.same_class(first, ty)));
        }
    }
}

#[test]
fn co_classes_are_closed() {
    let reg = registry();
    let c = Composer::new(&reg, full(1));
    let classes = c.co_classes(3, 2000).unwrap();
    assert_eq!(classes.skipped, 0);
    let all: Vec<TypeId> = classes.classes.iter().flatten().copied().collect();
    let distinct: BTreeSet<TypeId> = all.iter().copied().collect();
    assert_eq!(all.len(), distinct.len(), "classes are disjoint");
    for x in small_otxxs(3).unwrap() {
        for t in x.tree().td.nodes().filter(|&t| t != x.root()) {
            let s = sub_otxx(&x, t).unwrap();
            let r: Vec<TypeId> = c.realized_types(&s, Role::Child, 2000).unwrap().into_iter().collect();
            for w in r.windows(2) {
                assert!(classes.same_class(w[0], w[1]));
                assert!(classes.same_class(w[1], w[0]));
            }
        }
    }
}

#[test]
fn total_sub_otxx_has_one_realized_type() {
    let reg = registry();
    let c = Composer::new(&reg, full(2));
    let x = p3();
    for t in [1, 2] {
        let s = sub_otxx(&x, t).unwrap();
        assert_eq!(compatible_orders(&s, OrderMode::Enumerate { cap: 10 }).unwrap().len(), 1);
        assert_eq!(c.realized_types(&s, Role::Child, 10).unwrap().len(), 1);
    }
}

#[test]
fn base_view_matches_direct_types() {
    let reg = registry();
    let c = Composer::new(
        &reg,
        ComposeConfig {
            q: 2,
            modulus: 2,
            view: View::Base,
        },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for x in corpus(17, 25, 8) {
        let o = random_compatible_order(&x, &mut rng);
        let dp = c.run_dp(&x, &o, 1).unwrap();
        let elems: Vec<u32> = dp.order.iter().copied().filter(|v| x.elements().contains(v)).collect();
        let direct = oimso_types::cmso_type(&reg, x.base(), &[], 2, 2, Some(&elems)).unwrap();
        assert_eq!(dp.root, direct);
        for r in &dp.nodes {
            assert_eq!(c.sub_type(&x, r.node, &o).unwrap(), r.composed);
        }
    }
}

