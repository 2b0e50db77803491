//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod support;

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use modcheck::grammar::edge_gadget;
use modcheck::logic::{parse_formula, Prepared};
use modcheck::theta::{clique_bound_check, elimination_distance, Target, MEASURE_CAP};
use modcheck::transforms::{apex_project_sentence, apex_project_structure, star_closure};
use modcheck::walls::{
    bidimensionality, canonical_partition, extend_canonical_partition, is_pseudogrid, privileged_components,
    pseudogrid_from_wall, w_privileged_sequence, Flag, Scenario,
};
use modcheck::width::{treewidth_exact, treewidth_of_structure};
use modcheck::{
    eval_mod, holds, max_bramble_order, parse_theta, treedepth_exact, Elem, Error, Formula, Graph, ModString,
    Structure, ThetaSentence, VertexSet, Vocabulary, EMPTY,
};
use rand::Rng;
use support::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(violations: usize, detail: String) -> Verdict {
    Verdict {
        pass: violations == 0,
        detail: format!("{violations} violations; {detail}"),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("apex projection round-trip", mins(5), apex_projection),
        ("clique exclusion of models", mins(10), clique_exclusion),
        ("privileged components and sequences", mins(2), privileged),
        (
            "bidimensionality of low-treewidth sets",
            mins(10),
            bidimensionality_bound,
        ),
        ("bramble duality", mins(15), bramble_duality),
        (
            "elimination distance equals treedepth",
            mins(5),
            elimination_vs_treedepth,
        ),
        ("modification strings against trace oracle", mins(5), grammar_oracle),
        ("edge gadget", mins(5), gadget),
        ("disjoint paths", mins(5), disjoint_paths),
        ("treewidth golden values", mins(5), treewidth_golden),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed < *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}; {:.1}s of {}s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn ep_vocabulary() -> Vocabulary {
    Vocabulary::new()
        .with_relation("E", 2)
        .unwrap()
        .with_relation("P", 1)
        .unwrap()
}

fn ep_structure(g: &Graph, p: u32) -> Structure {
    let mut tuples = Vec::new();
    for (u, v) in g.edges() {
        tuples.push(vec![u as Elem, v as Elem]);
        tuples.push(vec![v as Elem, u as Elem]);
    }
    Structure::new(ep_vocabulary(), 0..g.n() as Elem)
        .unwrap()
        .with_tuples("E", tuples)
        .unwrap()
        .with_tuples("P", (0..g.n() as Elem).filter(|v| p >> v & 1 == 1).map(|v| vec![v]))
        .unwrap()
}

/// First-order sentences of quantifier rank at most two over `{E, P}`.
fn sentence_pool() -> Vec<Formula> {
    let matrices = [
        "E(x,y)",
        "not E(x,y)",
        "E(x,y) and P(x)",
        "E(x,y) and not P(y)",
        "E(x,y) or x = y",
        "E(x,y) -> P(y)",
        "P(x) and not P(y) and not E(x,y)",
        "E(x,y) and P(x) and P(y)",
        "not x = y and not E(x,y)",
        "E(x,x) or P(x)",
    ];
    let prefixes = [
        "exists x. exists y.",
        "forall x. exists y.",
        "exists x. forall y.",
        "forall x. forall y.",
    ];
    let mut pool: Vec<Formula> = prefixes
        .iter()
        .flat_map(|p| matrices.iter().map(move |m| format!("{p} ({m})")))
        .chain(
            [
                "exists x. P(x)",
                "forall x. not E(x,x)",
                "exists x. (P(x) and forall y. (E(x,y) -> P(y)))",
                "forall x. (P(x) or exists y. (E(x,y) and P(y)))",
                "(exists x. exists y. E(x,y)) and (forall x. P(x))",
            ]
            .map(String::from),
        )
        .map(|s| parse_formula(&s).unwrap())
        .collect();
    pool.dedup();
    assert!(pool.iter().all(|f| f.is_sentence() && f.quantifier_rank() <= 2));
    pool
}

fn apex_tuples(n: usize) -> Vec<Vec<Elem>> {
    let entries: Vec<Elem> = (0..n as Elem).chain([EMPTY]).collect();
    let mut out = vec![vec![]];
    for &a in &entries {
        out.push(vec![a]);
        for &b in &entries {
            if a != b || a == EMPTY {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

fn apex_projection() -> Verdict {
    let mut structures = Vec::new();
    for n in 0..=4 {
        for g in labelled_graphs(n) {
            for p in 0..1u32 << n {
                structures.push(ep_structure(&g, p));
            }
        }
    }
    let exhaustive = structures.len();
    let mut r = rng(22);
    for _ in 0..500 {
        let n = r.gen_range(1..=5);
        let g = random_graph(&mut r, n, 0.5);
        let p = r.gen_range(0..1u32 << n);
        structures.push(ep_structure(&g, p));
    }
    let pool = sentence_pool();
    let projected: Vec<Vec<Formula>> = (0..=2)
        .map(|l| pool.iter().map(|s| apex_project_sentence(s, l).unwrap()).collect())
        .collect();
    let mut checks = 0;
    let mut violations = 0;
    let mut first = None;
    for a in &structures {
        let truth: Vec<bool> = pool.iter().map(|s| holds(a, s).unwrap()).collect();
        for apex in apex_tuples(a.len()) {
            let b = apex_project_structure(a, &apex).unwrap();
            for (i, s) in projected[apex.len()].iter().enumerate() {
                checks += 1;
                if holds(&b, s).unwrap() != truth[i] {
                    violations += 1;
                    first.get_or_insert_with(|| format!("; first: {} with apex {:?}", pool[i], apex));
                }
            }
        }
    }
    verdict(
        violations,
        format!(
            "{} structures ({exhaustive} exhaustive), {} sentences, {checks} checks{}",
            structures.len(),
            pool.len(),
            first.unwrap_or_default()
        ),
    )
}

/// Sentences of height at most two, declared treewidth at most two and clique
/// bound at most four, every base with an excluded-minor condition.
fn theta_pool() -> Vec<ThetaSentence> {
    let bases = [
        "base(true ; excl{K3})",
        "base(true ; excl{K4})",
        "base(true ; excl{C4})",
        "base(forall x. forall y. not E(x,y) ; excl{K3})",
        "base(true ; excl{K1_3,K3})",
    ];
    let m0 = "mod(forall x. X(x) ; tw=0)";
    let m1 = "mod(forall x. forall y. (not X(x) and not X(y)) -> x = y ; tw=1)";
    let m2 =
        "mod(forall x. forall y. forall z. (not X(x) and not X(y) and not X(z)) -> (x = y or y = z or x = z) ; tw=2)";
    let mut texts: Vec<String> = bases.iter().map(|b| b.to_string()).collect();
    for m in [m0, m1, m2] {
        for body in [
            bases[0].to_string(),
            format!("cc({})", bases[1]),
            format!("{} and {}", bases[0], bases[2]),
            format!("{} or cc({})", bases[3], bases[4]),
        ] {
            texts.push(format!("{m} |> ({body})"));
        }
    }
    texts.extend([
        format!("{m1} |> (cc({m1} |> ({})))", bases[0]),
        format!("{m2} |> ({m0} |> ({}) or {})", bases[1], bases[4]),
        format!("{m1} |> (cc({m2} |> (cc({}))) and {})", bases[2], bases[1]),
        format!("{m0} |> ({m1} |> ({}))", bases[3]),
        format!("{m2} |> (cc({m1} |> ({} or {})))", bases[0], bases[2]),
    ]);
    texts.iter().map(|t| parse_theta(t).unwrap()).collect()
}

fn clique_exclusion() -> Verdict {
    let pool = theta_pool();
    assert!(pool.len() >= 20);
    for t in &pool {
        let m = t.metadata();
        assert!(m.height <= 2 && m.tw <= 2 && m.hw <= 4 && !t.is_tilde(), "{t}");
    }
    let graphs = iso_classes_upto(6);
    let (mut models, mut violations, mut errors) = (0, 0, 0);
    let mut first = None;
    for t in &pool {
        for g in &graphs {
            match clique_bound_check(t, &g.to_structure()) {
                Ok(true) => models += 1,
                Ok(false) => {
                    models += 1;
                    violations += 1;
                    first.get_or_insert_with(|| format!("; first: {t} on {}", g.to_edge_list().replace('\n', " ")));
                }
                Err(Error::Precondition(_)) => {}
                Err(_) => errors += 1,
            }
        }
    }
    verdict(
        violations + errors,
        format!(
            "{} sentences x {} graph classes, {models} models, {errors} errors{}",
            pool.len(),
            graphs.len(),
            first.unwrap_or_default()
        ),
    )
}

fn random_scenario(r: &mut impl Rng, h: usize) -> Scenario {
    Scenario::new(
        (0..h)
            .map(|_| if r.gen_bool(0.5) { Flag::Hollow } else { Flag::Filled })
            .collect(),
    )
    .unwrap()
}

fn privileged() -> Verdict {
    let mut r = rng(33);
    let (mut samples, mut violations) = (0, 0);
    let mut hosts = 0;
    while samples < 10_000 {
        let wall_r = if hosts % 2 == 0 { 5 } else { 7 };
        let (g, w) = wall_host(&mut r, wall_r, [0, 3, 8][hosts % 3], hosts % 2 * 4);
        hosts += 1;
        let map = w.embedding_in(&g).unwrap();
        let q = [3, 5, 7][r.gen_range(0..(wall_r - 1) / 2)];
        let pg = pseudogrid_from_wall(&w, q).unwrap().mapped(&map);
        if !is_pseudogrid(&g, &pg) {
            violations += 1;
            continue;
        }
        for _ in 0..500 {
            samples += 1;
            let h = r.gen_range(1..=3);
            let size = r.gen_range(0..=g.n() / 4);
            let pool: Vec<usize> = if r.gen_bool(0.5) {
                random_subset(&mut r, g.n(), size).into_iter().collect()
            } else {
                random_connected_set(&mut r, &g, size.max(1)).into_iter().collect()
            };
            let mut xs = vec![VertexSet::new(); h];
            for v in pool {
                xs[r.gen_range(0..h)].insert(v);
            }
            let scenario = random_scenario(&mut r, h);
            let mut union = VertexSet::new();
            for x in xs.iter().rev() {
                union.extend(x);
                if privileged_components(&g, &pg, &union).len() > 1 {
                    violations += 1;
                }
            }
            let Ok(seq) = w_privileged_sequence(&g, &pg, &xs, &scenario) else {
                violations += 1;
                continue;
            };
            if w_privileged_sequence(&g, &pg, &xs, &scenario).ok().as_ref() != Some(&seq) {
                violations += 1;
            }
            let nested = seq.sets.windows(2).all(|p| p[0].is_subset(&p[1]));
            let empty_down =
                (0..seq.sets.len()).all(|i| !seq.sets[i].is_empty() || seq.sets[..i].iter().all(|c| c.is_empty()));
            if !nested || !empty_down {
                violations += 1;
            }
        }
    }
    verdict(violations, format!("{samples} samples over {hosts} wall hosts"))
}

fn bidimensionality_bound() -> Verdict {
    let mut r = rng(30);
    let (mut accepted, mut attempts, mut violations) = (0, 0, 0);
    let mut by_tw: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut hosts = 0;
    while accepted < 1_000 {
        let wall_r = if hosts % 2 == 0 { 5 } else { 7 };
        let (g, w) = wall_host(&mut r, wall_r, [0, 3, 8][hosts % 3], 0);
        hosts += 1;
        let partition = extend_canonical_partition(&g, &VertexSet::new(), &w, &canonical_partition(&w)).unwrap();
        let a = g.to_structure();
        for _ in 0..400 {
            attempts += 1;
            let x = if r.gen_bool(0.5) {
                let size = r.gen_range(1..=18);
                random_connected_set(&mut r, &g, size)
            } else {
                let size = r.gen_range(1..=6);
                random_subset(&mut r, g.n(), size)
            };
            let star = star_closure(&a, &g.labels_of(&x)).unwrap();
            if star.len() > 20 {
                continue;
            }
            let tw = treewidth_of_structure(&star).unwrap();
            if tw > 3 {
                continue;
            }
            accepted += 1;
            let bid = bidimensionality(&x, &partition);
            let e = by_tw.entry(tw).or_default();
            e.0 += 1;
            e.1 = e.1.max(bid);
            if bid > (tw + 1) * (tw + 1) {
                violations += 1;
            }
        }
    }
    let spread: Vec<String> = by_tw
        .iter()
        .map(|(tw, (n, b))| format!("tw {tw}: {n} sets, max bid {b}"))
        .collect();
    verdict(
        violations,
        format!(
            "{accepted} accepted of {attempts} sampled over {hosts} hosts; {}",
            spread.join(", ")
        ),
    )
}

fn bramble_duality() -> Verdict {
    let mut checked = 0;
    let mut violations = 0;
    for n in 1..=6 {
        for g in iso_classes(n).iter().filter(|g| g.is_connected()) {
            checked += 1;
            let (tw, _) = treewidth_exact(g).unwrap();
            if max_bramble_order(g).unwrap() != tw + 1 {
                violations += 1;
            }
        }
    }
    verdict(
        violations,
        format!("{checked} connected graph classes on 1..6 vertices"),
    )
}

fn elimination_vs_treedepth() -> Verdict {
    let graphs = iso_classes_upto(6);
    let mut violations = 0;
    let mut shifted = 0;
    let mut first = None;
    for g in &graphs {
        let ed = elimination_distance(g, &Target::edgeless(), MEASURE_CAP)
            .unwrap()
            .unwrap();
        let td = treedepth_exact(g).unwrap();
        if ed != td {
            violations += 1;
            first.get_or_insert_with(|| {
                format!(
                    "; first: {} vertices, {} edges: ed {ed}, td {td}",
                    g.n(),
                    g.edge_count()
                )
            });
        }
        if ed == td.saturating_sub(1) {
            shifted += 1;
        }
    }
    verdict(
        violations,
        format!(
            "{} graph classes on 0..6 vertices; ed = max(td - 1, 0) on {shifted}{}",
            graphs.len(),
            first.unwrap_or_default()
        ),
    )
}

#[derive(Clone, Copy)]
enum Node {
    Terminal(usize),
    N(usize),
    E(usize),
    C(usize),
    And(usize, usize),
    Or(usize, usize),
}

const TERMINALS: [&str; 3] = [
    "base(true ; excl{K2})",
    "base(true ; excl{K3})",
    "base(true ; excl{P3})",
];

/// Every tree with at most three levels (terminals on the first), as an arena
/// in which each tree appears once.
fn trees() -> Vec<Node> {
    let mut arena: Vec<Node> = (0..TERMINALS.len()).map(Node::Terminal).collect();
    let mut depth = vec![0; arena.len()];
    for d in 1..3 {
        let prev = arena.len();
        for t in 0..prev {
            if depth[t] == d - 1 {
                for op in [Node::N, Node::E, Node::C] {
                    arena.push(op(t));
                    depth.push(d);
                }
            }
        }
        for a in 0..prev {
            for b in 0..prev {
                if depth[a].max(depth[b]) == d - 1 {
                    arena.push(Node::And(a, b));
                    arena.push(Node::Or(a, b));
                    depth.extend([d, d]);
                }
            }
        }
    }
    arena
}

fn to_mod_string(arena: &[Node], id: usize, terminals: &[ModString]) -> ModString {
    let rec = |i| to_mod_string(arena, i, terminals);
    match arena[id] {
        Node::Terminal(k) => terminals[k].clone(),
        Node::N(a) => ModString::n(rec(a)),
        Node::E(a) => ModString::e(rec(a)),
        Node::C(a) => ModString::c(rec(a)),
        Node::And(a, b) => ModString::and(rec(a), rec(b)),
        Node::Or(a, b) => ModString::or(rec(a), rec(b)),
    }
}

/// Trace oracle on one host graph: states are alive vertex and edge masks.
struct TraceOracle {
    n: usize,
    edges: Vec<(usize, usize)>,
    memo: HashMap<(usize, u32, u64), bool>,
}

impl TraceOracle {
    fn new(g: &Graph) -> Self {
        TraceOracle {
            n: g.n(),
            edges: g.edges(),
            memo: HashMap::new(),
        }
    }

    fn components(&self, vs: u32, es: u64) -> Vec<(u32, u64)> {
        let mut left = vs;
        let mut out = Vec::new();
        while left != 0 {
            let mut comp = left & left.wrapping_neg();
            loop {
                let mut grown = comp;
                for (i, &(u, v)) in self.edges.iter().enumerate() {
                    if es >> i & 1 == 1 && (comp >> u & 1 == 1 || comp >> v & 1 == 1) {
                        grown |= 1 << u | 1 << v;
                    }
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            let ce = (0..self.edges.len())
                .filter(|&i| es >> i & 1 == 1 && comp >> self.edges[i].0 & 1 == 1)
                .fold(0u64, |m, i| m | 1 << i);
            out.push((comp, ce));
            left &= !comp;
        }
        out
    }

    fn terminal(&self, k: usize, vs: u32, es: u64) -> bool {
        let comps = self.components(vs, es);
        match k {
            0 => es == 0,
            1 => es.count_ones() + comps.len() as u32 == vs.count_ones(),
            _ => comps.iter().all(|(c, _)| c.count_ones() <= 2),
        }
    }

    fn eval(&mut self, arena: &[Node], id: usize, vs: u32, es: u64) -> bool {
        if let Some(&b) = self.memo.get(&(id, vs, es)) {
            return b;
        }
        let b = match arena[id] {
            Node::Terminal(k) => self.terminal(k, vs, es),
            Node::N(a) => (0..self.n).filter(|v| vs >> v & 1 == 1).any(|v| {
                let ne = (0..self.edges.len())
                    .filter(|&i| es >> i & 1 == 1 && self.edges[i].0 != v && self.edges[i].1 != v)
                    .fold(0u64, |m, i| m | 1 << i);
                self.eval(arena, a, vs & !(1 << v), ne)
            }),
            Node::E(a) => (0..self.edges.len())
                .filter(|i| es >> i & 1 == 1)
                .any(|i| self.eval(arena, a, vs, es & !(1 << i))),
            Node::C(a) => self
                .components(vs, es)
                .into_iter()
                .all(|(c, ce)| self.eval(arena, a, c, ce)),
            Node::And(a, b) => self.eval(arena, a, vs, es) && self.eval(arena, b, vs, es),
            Node::Or(a, b) => self.eval(arena, a, vs, es) || self.eval(arena, b, vs, es),
        };
        self.memo.insert((id, vs, es), b);
        b
    }
}

fn grammar_oracle() -> Verdict {
    let arena = trees();
    let terminals: Vec<ModString> = TERMINALS
        .iter()
        .map(|t| ModString::terminal(parse_theta(t).unwrap()).unwrap())
        .collect();
    let strings: Vec<ModString> = (0..arena.len()).map(|i| to_mod_string(&arena, i, &terminals)).collect();
    assert!(strings.iter().all(|s| s.depth() <= 2));
    let graphs: Vec<Graph> = (0..=5).flat_map(labelled_graphs).collect();
    let mut violations = 0;
    let mut first = None;
    for g in &graphs {
        let mut oracle = TraceOracle::new(g);
        let all_v = (1u32 << g.n()) - 1;
        let all_e = (1u64 << g.edge_count()) - 1;
        for (i, s) in strings.iter().enumerate() {
            let got = eval_mod(g, s).unwrap().is_some();
            if got != oracle.eval(&arena, i, all_v, all_e) {
                violations += 1;
                first.get_or_insert_with(|| format!("; first: {s} on {}", g.to_edge_list().replace('\n', " ")));
            }
        }
    }
    verdict(
        violations,
        format!(
            "{} trees x {} labelled graphs on 0..5 vertices{}",
            strings.len(),
            graphs.len(),
            first.unwrap_or_default()
        ),
    )
}

fn gadget() -> Verdict {
    let mut violations = 0;
    let mut checked = 0;
    for n in 0..=5 {
        for g in labelled_graphs(n) {
            for c in 1..=2 {
                checked += 1;
                let gd = edge_gadget(&g, c).unwrap();
                let h = &gd.graph;
                let m = g.edge_count();
                let counts = h.n() == (c + 1) * n + m
                    && h.edge_count() == n * c * (c + 1) / 2 + 2 * m
                    && gd.red.len() == n * c
                    && gd.blue.len() == m;
                if !counts {
                    violations += 1;
                }
                // Deleting a blue vertex removes exactly that edge's blue link.
                for (u, v) in g.edges() {
                    let e_blue = gd.subdivision[&(u, v)];
                    for (a, b) in pairs(n) {
                        let (wa, wb) = (gd.white[a], gd.white[b]);
                        let linked = gd
                            .blue
                            .iter()
                            .any(|&x| x != e_blue && h.has_edge(x, wa) && h.has_edge(x, wb));
                        if linked != (g.has_edge(a, b) && (a, b) != (u, v)) {
                            violations += 1;
                        }
                    }
                }
                // Contracting the cliques and dissolving the blues gives back G.
                let mut back = Graph::empty(n);
                for &x in &gd.blue {
                    let ends: Vec<usize> = h
                        .neighbors(x)
                        .iter()
                        .filter_map(|y| gd.white.iter().position(|w| w == y))
                        .collect();
                    if ends.len() == 2 {
                        back.add_edge(ends[0], ends[1]);
                    } else {
                        violations += 1;
                    }
                }
                if back != g || h.components().len() != g.components().len() {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        violations,
        format!("{checked} (graph, c) pairs, graphs exhaustive up to 5 vertices, c in 1..2"),
    )
}

fn disjoint_paths() -> Verdict {
    let mut violations = 0;
    let dp2 = parse_formula("dp2(a,b,c,d)").unwrap();
    let mut small = 0;
    for n in 4..=5 {
        for g in labelled_graphs(n) {
            let a = g.to_structure();
            let p = Prepared::new(&a, &dp2, &["a", "b", "c", "d"]).unwrap();
            for t in quadruples(n) {
                small += 1;
                if p.check(&t).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    let atoms = [
        ("dp1(a,b)", 2, None),
        ("dp2(a,b,c,d)", 4, None),
        ("sdp1,1(a,b)", 2, Some(1)),
        ("sdp1,2(a,b,c,d)", 4, Some(1)),
        ("sdp2,2(a,b,c,d)", 4, Some(2)),
    ];
    let mut r = rng(13);
    let mut compared = 0;
    let mut held = 0;
    for _ in 0..100 {
        let p = r.gen_range(0.25..0.6);
        let g = random_graph(&mut r, 8, p);
        let a = g.to_structure();
        for (text, arity, s) in atoms {
            let f = parse_formula(text).unwrap();
            let names = ["a", "b", "c", "d"];
            let p = Prepared::new(&a, &f, &names[..arity]).unwrap();
            for _ in 0..40 {
                let ends: Vec<usize> = (0..arity).map(|_| r.gen_range(0..8)).collect();
                let args: Vec<Elem> = ends.iter().map(|&v| v as Elem).collect();
                let got = p.check(&args).unwrap();
                compared += 1;
                held += got as usize;
                if got != disjoint_paths_oracle(&g, &ends, s) {
                    violations += 1;
                }
            }
        }
    }
    verdict(
        violations,
        format!("{small} small endpoint tuples; {compared} comparisons on 100 random 8-vertex graphs, {held} true"),
    )
}

fn quadruples(n: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let t = [a, b, c, d];
                    if (0..4).all(|i| (0..i).all(|j| t[i] != t[j])) {
                        out.push(t.iter().map(|&v| v as Elem).collect());
                    }
                }
            }
        }
    }
    out
}

fn treewidth_golden() -> Verdict {
    let mut cases: Vec<(String, Graph, usize)> = Vec::new();
    for n in 2..=9 {
        cases.push((format!("P{n}"), Graph::path(n), 1));
        cases.push((format!("S{n}"), Graph::star(n), 1));
    }
    cases.push((
        "binary tree 15".into(),
        {
            let edges: Vec<_> = (1..15).map(|v| ((v - 1) / 2, v)).collect();
            Graph::from_edges(15, &edges)
        },
        1,
    ));
    for n in 3..=10 {
        cases.push((format!("C{n}"), Graph::cycle(n), 2));
    }
    for n in 1..=9 {
        cases.push((format!("K{n}"), Graph::complete(n), n - 1));
    }
    cases.push(("4x4 grid".into(), Graph::grid(4, 4), 4));
    let mut violations = 0;
    let mut crossed = 0;
    let mut wrong = Vec::new();
    for (name, g, expected) in &cases {
        let (tw, td) = treewidth_exact(g).unwrap();
        let mut ok = tw == *expected && td.is_valid(g) && td.width() == tw;
        if g.n() <= 7 && g.is_connected() {
            crossed += 1;
            ok &= max_bramble_order(g).unwrap() == tw + 1;
        }
        if !ok {
            violations += 1;
            wrong.push(name.clone());
        }
    }
    verdict(
        violations,
        format!(
            "{} golden graphs, {crossed} cross-checked against brambles{}",
            cases.len(),
            if wrong.is_empty() {
                String::new()
            } else {
                format!("; wrong: {}", wrong.join(", "))
            }
        ),
    )
}
