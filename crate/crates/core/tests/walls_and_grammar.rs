mod support;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use modcheck::walls::{
    bidimensionality, canonical_partition, extend_canonical_partition, privileged_components, pseudogrid_from_wall,
    subdivide_wall, Pseudogrid,
};
use modcheck::{
    elementary_wall, eval_mod, h_modification_check, model_check_theta, parse_formula, parse_mod_string, parse_theta,
    Graph, ModString, ModWitness, ThetaSentence, VertexSet, Wall,
};
use proptest::prelude::*;
use rand::Rng;
use support::*;

fn subdivided(r: usize, seed: u64, max: usize) -> Wall {
    let w = elementary_wall(r).unwrap();
    let mut rng = rng(seed);
    let plan: BTreeMap<_, _> = w
        .elementary_edges()
        .into_iter()
        .map(|e| (e, if rng.gen_bool(0.3) { rng.gen_range(1..=max) } else { 0 }))
        .collect();
    subdivide_wall(&w, &plan).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn walls_have_the_expected_shape(r in prop::sample::select(vec![3usize, 5, 7]), seed in any::<u64>()) {
        let w = subdivided(r, seed, 2);
        let g = w.graph();
        let extra: usize = w.subdivisions().values().map(Vec::len).sum();
        prop_assert_eq!(g.n(), 2 * r * r - 2 + extra);
        prop_assert!(g.is_connected_set(&(0..g.n()).collect()));
        prop_assert!((0..g.n()).all(|v| (2..=3).contains(&g.neighbors(v).len())));
        prop_assert_eq!(w.vertical_paths().len(), r);
        prop_assert_eq!(w.horizontal_paths().len(), r);
        for p in w.vertical_paths().iter().chain(&w.horizontal_paths()) {
            prop_assert!(p.windows(2).all(|e| g.has_edge(e[0], e[1])));
        }
        prop_assert_eq!(&Wall::parse(&w.to_text()).unwrap(), &w);
    }

    #[test]
    fn canonical_partitions_cover_the_wall(r in prop::sample::select(vec![3usize, 5, 7]), seed in any::<u64>()) {
        let w = subdivided(r, seed, 2);
        let g = w.graph();
        let p = canonical_partition(&w);
        prop_assert!(p.validate(g).is_ok());
        prop_assert_eq!(p.internal_count(), (r - 2) * (r - 2));
        prop_assert_eq!(p.covered(), (0..g.n()).collect::<VertexSet>());
        let touch = |a: &VertexSet, b: &VertexSet| a.iter().any(|&u| b.iter().any(|&v| g.has_edge(u, v)));
        for (&(i, j), bag) in &p.internal {
            for key in [(i + 1, j), (i, j + 1)] {
                if let Some(other) = p.internal.get(&key) {
                    prop_assert!(touch(bag, other));
                }
            }
        }
    }

    #[test]
    fn extended_partitions_cover_the_component(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (g, w) = wall_host(&mut rng, 5, 3, 4);
        let p = extend_canonical_partition(&g, &VertexSet::new(), &w, &canonical_partition(&w)).unwrap();
        prop_assert!(p.validate(&g).is_ok());
        prop_assert_eq!(p.covered(), (0..g.n()).collect::<VertexSet>());
        let base = canonical_partition(&w);
        let map = w.embedding_in(&g).unwrap();
        for (k, bag) in &base.internal {
            prop_assert!(bag.iter().all(|v| p.internal[k].contains(&map[*v])));
        }
        let size = rng.gen_range(0..8);
        let x = random_subset(&mut rng, g.n(), size);
        let hit = p.internal.values().filter(|b| !b.is_disjoint(&x)).count();
        prop_assert_eq!(bidimensionality(&x, &p), hit);
        prop_assert!(hit <= x.len());
    }
}

/// Components of `G ∖ X` by breadth-first search, kept when they hold a whole
/// horizontal and a whole vertical path.
fn privileged_oracle(g: &Graph, pg: &Pseudogrid, x: &VertexSet) -> BTreeSet<VertexSet> {
    let mut seen = x.clone();
    let mut out = BTreeSet::new();
    for s in 0..g.n() {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = VertexSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if seen.insert(u) {
                    comp.insert(u);
                    queue.push_back(u);
                }
            }
        }
        let whole = |p: &Vec<usize>| p.iter().all(|v| comp.contains(v));
        if pg.horizontal.iter().any(whole) && pg.vertical.iter().any(whole) {
            out.insert(comp);
        }
    }
    out
}

#[test]
fn privileged_components_on_every_subset_of_a_small_host() {
    let (g, w) = wall_host(&mut rng(7), 3, 2, 1);
    let pg = pseudogrid_from_wall(&w, 3)
        .unwrap()
        .mapped(&w.embedding_in(&g).unwrap());
    let mut counts = [0usize; 2];
    for m in 0..1u32 << g.n() {
        let x: VertexSet = (0..g.n()).filter(|v| m >> v & 1 == 1).collect();
        let got: BTreeSet<VertexSet> = privileged_components(&g, &pg, &x).into_iter().collect();
        assert_eq!(got, privileged_oracle(&g, &pg, &x));
        assert!(got.len() <= 1);
        counts[got.len()] += 1;
    }
    assert!(counts[0] > 0 && counts[1] > 0);
}

/// Replays an acceptance script against the string it came from.
fn replay_script(g: &Graph, w: &ModString, s: &ModWitness) -> bool {
    match (w, s) {
        (ModString::Terminal(b), ModWitness::Terminal) => {
            model_check_theta(&g.to_structure(), &ThetaSentence::Base(b.clone()))
                .unwrap()
                .is_some()
        }
        (ModString::N(inner), ModWitness::Vertex(label, rest)) => match g.index_of(*label) {
            Some(v) => replay_script(&g.remove_vertices(&VertexSet::from([v])), inner, rest),
            None => false,
        },
        (ModString::E(inner), ModWitness::Edge((a, b), rest)) => match (g.index_of(*a), g.index_of(*b)) {
            (Some(u), Some(v)) if g.has_edge(u, v) => replay_script(&g.without_edge(u, v), inner, rest),
            _ => false,
        },
        (ModString::C(inner), ModWitness::Components(parts)) => {
            let comps: BTreeSet<_> = g
                .components()
                .into_iter()
                .map(|c| g.labels_of(&c.into_iter().collect()))
                .collect();
            let claimed: BTreeSet<_> = parts.iter().map(|(c, _)| c.clone()).collect();
            comps == claimed
                && parts.iter().all(|(c, rest)| {
                    let idx: VertexSet = c.iter().map(|&l| g.index_of(l).unwrap()).collect();
                    replay_script(&g.induced(&idx), inner, rest)
                })
        }
        (ModString::And(l, r), ModWitness::And(a, b)) => replay_script(g, l, a) && replay_script(g, r, b),
        (ModString::Or(l, _), ModWitness::Or(false, a)) => replay_script(g, l, a),
        (ModString::Or(_, r), ModWitness::Or(true, a)) => replay_script(g, r, a),
        _ => false,
    }
}

fn has_triangle(g: &Graph) -> bool {
    g.edges()
        .into_iter()
        .any(|(u, v)| (0..g.n()).any(|w| g.has_edge(u, w) && g.has_edge(v, w)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modification_scripts_replay(g in graph_strategy(6)) {
        for text in [
            "n^2 excl{K3}",
            "c (n excl{K3})",
            "e (n excl{K3}) or n (e excl{K4})",
            "(n excl{K2}) and c (e excl{K3})",
        ] {
            let w = parse_mod_string(text).unwrap();
            if let Some(s) = eval_mod(&g, &w).unwrap() {
                prop_assert!(replay_script(&g, &w, &s), "{} on {:?}", text, g.edges());
            }
        }
    }

    #[test]
    fn deletions_match_direct_counting(g in graph_strategy(6)) {
        let accepts = |t: &str| eval_mod(&g, &parse_mod_string(t).unwrap()).unwrap().is_some();
        prop_assert_eq!(accepts("e^2 base(forall x. forall y. not E(x,y))"), g.edge_count() == 2);
        let two_hit = g.n() >= 2
            && pairs(g.n()).into_iter().any(|(a, b)| !has_triangle(&g.remove_vertices(&VertexSet::from([a, b]))));
        prop_assert_eq!(accepts("n^2 excl{K3}"), two_hit);
        let each = g.components().into_iter().all(|c| {
            let h = g.induced(&c.into_iter().collect());
            (0..h.n()).any(|v| h.remove_vertices(&VertexSet::from([v])).edge_count() == 0)
        });
        prop_assert_eq!(accepts("c (n excl{K2})"), each);
    }

    #[test]
    fn single_edge_modification_is_edge_deletion(g in graph_strategy(6)) {
        let k2 = Graph::complete(2);
        for text in ["base(true ; excl{K3})", "base(forall x. exists y. E(x,y) ; excl{C4})"] {
            let theta = parse_theta(text).unwrap();
            let w = ModString::e(ModString::terminal(theta.clone()).unwrap());
            let h = h_modification_check(&g, &k2, &theta).unwrap();
            prop_assert_eq!(h.is_some(), eval_mod(&g, &w).unwrap().is_some());
            if let Some(h) = h {
                prop_assert_eq!(h.deleted.len(), 1);
                let (u, v) = h.deleted[0];
                prop_assert!(g.has_edge(u, v));
                prop_assert!(model_check_theta(&g.without_edge(u, v).to_structure(), &theta).unwrap().is_some());
            }
        }
    }
}

#[test]
fn texts_round_trip() {
    for text in [
        "exists x. forall y. (E(x,y) -> x = y)",
        "forall X. exists x. (x in X or not E(x,x))",
        "not (exists x. P(x) and exists y. not P(y))",
    ] {
        let f = parse_formula(text).unwrap();
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }
    for text in [
        "base(true ; excl{K3,K1_3})",
        "mod(forall x. forall y. (not X(x) and not X(y)) -> x = y ; tw=1) |> (cc(base(true ; excl{K3})) or base(true ; excl{K2}))",
        "base(exists x. x = x ; excl{K5,K33} ; dp)",
    ] {
        let t = parse_theta(text).unwrap();
        assert_eq!(parse_theta(&t.to_string()).unwrap(), t);
    }
    for text in [
        "n^2 planar",
        "c (n excl{K3}) or e excl{K4}",
        "(cd)^2 excl{K3} and n excl{K4}",
    ] {
        let w = parse_mod_string(text).unwrap();
        assert_eq!(parse_mod_string(&w.to_string()).unwrap(), w);
    }
}
