use oimso_compose::*;
use oimso_core::{gaifman, Graph, Structure, Vocabulary};
use oimso_decomp::treewidth_exact;
use oimso_logic::{evaluate, parse_formula, Assignment, Formula};
use oimso_otxx::{is_compatible, BagOrderProvider};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIP: &str = "EX X. ~(ex x. ex y. (x in X & y in X & E(x,y))) & ~(ex x. ex y. (~(x in X) & ~(y in X) & E(x,y)))";
const EVENLEN: &str = "EX X. (all x. ((all y. x <= y) -> x in X)) & (all x. ((all y. y <= x) -> ~(x in X))) & \
    (all x. all y. ((x <= y & ~(x = y) & all z. ((x <= z & z <= y) -> (z = x | z = y))) -> \
    ((x in X -> ~(y in X)) & (~(y in X) -> x in X))))";
const EVEN: &str = "EX X. (all x. x in X) & C_2(X)";
const TRIANGLE: &str = "ex x. ex y. ex z. (E(x,y) & E(y,z) & E(x,z))";
const TWO: &str = "ex x. ex y. (x <= y & ~(x = y))";

fn phi(text: &str) -> Formula {
    parse_formula(text, &Vocabulary::graph()).unwrap()
}

fn two_triangles() -> Structure {
    Graph::from_edges(0..6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).to_structure()
}

fn check(a: &Structure, f: &Formula, opts: &LiftOptions) -> bool {
    lift_modelcheck(a, f, 2, f.rank(), opts).unwrap().verdict
}

fn direct(a: &Structure, f: &Formula) -> bool {
    let order: Vec<u32> = a.universe().iter().rev().copied().collect();
    evaluate(a, &Assignment::new(), f, Some(&order)).unwrap()
}

#[test]
fn bipartiteness() {
    let f = phi(BIP);
    let opts = LiftOptions::default();
    assert!(!check(&two_triangles(), &f, &opts));
    assert!(check(&Graph::cycle(4).to_structure(), &f, &opts));
    assert!(!direct(&two_triangles(), &f));
}

#[test]
fn universe_parity_through_the_order() {
    let f = phi(EVENLEN);
    assert_eq!(f.rank(), 4);
    let opts = LiftOptions::default();
    for (n, even) in [(4, true), (5, false)] {
        let a = Graph::path(n).to_structure();
        let out = lift_modelcheck(&a, &f, 2, 4, &opts).unwrap();
        assert_eq!(out.verdict, even);
        assert_eq!(out.invariance, InvarianceStatus::Checked);
        assert_eq!(direct(&a, &f), even);
    }
}

#[test]
fn verdicts_do_not_depend_on_the_order() {
    let a = Graph::from_edges(0..5, [(0, 1), (1, 2), (2, 0), (2, 3)]).to_structure();
    for text in [EVENLEN, EVEN, TRIANGLE, BIP] {
        let f = phi(text);
        let verdicts: Vec<bool> = (0..5)
            .map(|seed| {
                let opts = LiftOptions {
                    order: OrderChoice::Seeded(seed),
                    ..LiftOptions::default()
                };
                check(&a, &f, &opts)
            })
            .collect();
        assert!(verdicts.iter().all(|&v| v == direct(&a, &f)), "{text}: {verdicts:?}");
    }
}

fn random_tw2(rng: &mut impl Rng, n: u32) -> Structure {
    loop {
        let mut g = Graph::new(0..n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.4) {
                    g.add_edge(u, v);
                }
            }
        }
        if treewidth_exact(&g).unwrap() <= 2 {
            return g.to_structure();
        }
    }
}

#[test]
fn agrees_with_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let suite: Vec<Formula> = [BIP, EVEN, TRIANGLE, TWO].map(phi).into();
    for _ in 0..12 {
        let n = rng.gen_range(1..=5);
        let a = random_tw2(&mut rng, n);
        for f in &suite {
            let opts = LiftOptions {
                order: OrderChoice::Seeded(rng.gen()),
                provider: BagOrderProvider::Bfs,
                ..LiftOptions::default()
            };
            assert_eq!(check(&a, f, &opts), direct(&a, f), "{f} on {a:?}");
        }
    }
}

#[test]
fn coloring_provider_gives_the_same_verdicts() {
    let f = phi(BIP);
    for g in [Graph::cycle(5), Graph::cycle(6), Graph::complete(3), Graph::path(4)] {
        let a = g.to_structure();
        let opts = LiftOptions {
            provider: BagOrderProvider::Coloring { k: 2 },
            ..LiftOptions::default()
        };
        assert_eq!(check(&a, &f, &opts), direct(&a, &f));
    }
}

#[test]
fn rejects_what_it_cannot_decide() {
    let opts = LiftOptions::default();
    let a = Graph::path(3).to_structure();
    // the minimum is an endpoint under some orders only
    let not_invariant = phi("ex x. ((all y. x <= y) & ex y. ex z. (E(x,y) & E(x,z) & ~(y = z)))");
    assert!(matches!(lift_modelcheck(&a, &not_invariant, 2, 3, &opts), Err(ComposeError::Contract(_))));
    assert!(matches!(lift_modelcheck(&a, &phi("ex x. x in X"), 2, 2, &opts), Err(ComposeError::Contract(_))));
    assert!(matches!(lift_modelcheck(&a, &phi(TRIANGLE), 2, 2, &opts), Err(ComposeError::Contract(_))));
    let k4 = Graph::complete(4).to_structure();
    assert!(matches!(lift_modelcheck(&k4, &phi(TWO), 2, 2, &opts), Err(ComposeError::Contract(_))));
    let big = Graph::path(10).to_structure();
    assert!(lift_modelcheck(&big, &phi(TWO), 2, 2, &opts).unwrap_err().is_capacity());
    let trusted = LiftOptions {
        trust_invariance: true,
        ..LiftOptions::default()
    };
    let out = lift_modelcheck(&big, &phi(TWO), 2, 2, &trusted).unwrap();
    assert!(out.verdict);
    assert_eq!(out.invariance, InvarianceStatus::Trusted);
}

#[test]
fn traces_are_deterministic() {
    let a = Graph::from_edges(0..6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).to_structure();
    let f = phi(BIP);
    let run = |jobs| {
        let opts = LiftOptions {
            jobs,
            trace: true,
            ..LiftOptions::default()
        };
        lift_modelcheck(&a, &f, 2, 3, &opts).unwrap().trace.unwrap()
    };
    let t1 = run(1);
    assert_eq!(t1, run(4));
    assert_eq!(serde_json::to_string(&t1).unwrap(), serde_json::to_string(&run(1)).unwrap());
    assert_eq!(t1.nodes.last().unwrap().node, t1.root);
    assert_eq!(t1.nodes.last().unwrap().composed, t1.root_type);
    let x = lift_otxx(&a, 2, &BagOrderProvider::InputId).unwrap();
    assert!(is_compatible(&x, &t1.order));
    assert!(treewidth_exact(&gaifman(&a)).unwrap() <= 2);
}

#[test]
fn explicit_orders_are_checked() {
    let a = Graph::from_edges(0..4, [(0, 1), (0, 2), (0, 3)]).to_structure();
    let f = phi(EVEN);
    let x = lift_otxx(&a, 2, &BagOrderProvider::InputId).unwrap();
    let orders = oimso_otxx::compatible_orders(&x, oimso_otxx::OrderMode::Enumerate { cap: 100 }).unwrap();
    assert!(orders.len() > 1);
    for o in &orders {
        let opts = LiftOptions {
            order: OrderChoice::Given(o.clone()),
            ..LiftOptions::default()
        };
        assert!(check(&a, &f, &opts));
    }
    let mut bad = orders[0].clone();
    bad.reverse();
    let opts = LiftOptions {
        order: OrderChoice::Given(bad),
        ..LiftOptions::default()
    };
    assert!(matches!(lift_modelcheck(&a, &f, 2, 2, &opts), Err(ComposeError::Contract(_))));
}
