//! Structure and graph operations: stellation, torsos, `ind_X`, `rm_X`,
//! `cl_X`, `star_X`, connectivity closure and apex projection.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::logic::{holds, Formula, Term};
use crate::structure::{gaifman_graph, induced_substructure, Elem, ElemSet, Structure, Tuple, Vocabulary, EMPTY};

/// The unary symbol carrying a modulator.
pub const MODULATOR: &str = "X";
/// The binary symbol added by [`cl_x`].
pub const CLIQUE_RELATION: &str = "E";

/// A stellation: the graph plus, for each contracted vertex, its component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stellation {
    pub graph: Graph,
    /// New vertex index of each `v_C`, with the component `C` in the input graph.
    pub components: Vec<(usize, Vec<usize>)>,
}

/// Keeps `X`, contracts every component `C` of `G ∖ X` to a vertex `v_C`
/// adjacent to `N(C) ∩ X`. `v_C` is labelled by the smallest label in `C`.
pub fn stellation(g: &Graph, x: &VertexSet) -> Result<Stellation> {
    check_vertices(g, x)?;
    let (mut h, comps) = contract_components(g, x);
    let mut components = Vec::new();
    for (i, (c, nbrs)) in comps.into_iter().enumerate() {
        let vc = x.len() + i;
        for &u in &nbrs {
            h.add_edge(vc, u);
        }
        components.push((vc, c));
    }
    Ok(Stellation { graph: h, components })
}

/// `G[X]` with, for each component `C` of `G ∖ X`, a clique on `N(C) ∩ X`.
pub fn torso(g: &Graph, x: &VertexSet) -> Result<Graph> {
    check_vertices(g, x)?;
    let (mut h, comps) = contract_components(g, x);
    for (_, nbrs) in comps {
        clique(&mut h, &nbrs);
    }
    Ok(h.induced(&(0..x.len()).collect()))
}

/// As [`torso`] but the contracted vertices remain, adjacent to `N(C) ∩ X`.
pub fn torso_plus(g: &Graph, x: &VertexSet) -> Result<Graph> {
    let mut s = stellation(g, x)?;
    for (vc, _) in &s.components {
        let nbrs: Vec<usize> = s.graph.neighbors(*vc).iter().copied().collect();
        clique(&mut s.graph, &nbrs);
    }
    Ok(s.graph)
}

fn check_vertices(g: &Graph, x: &VertexSet) -> Result<()> {
    match x.iter().find(|&&v| v >= g.n()) {
        Some(&v) => Err(Error::NoSuchVertex(v)),
        None => Ok(()),
    }
}

fn clique(g: &mut Graph, vs: &[usize]) {
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            g.add_edge(u, v);
        }
    }
}

/// `G[X]` followed by one isolated vertex per component of `G ∖ X`; returns
/// each component with its neighbourhood in `X` (as new indices).
type Contracted = (Graph, Vec<(Vec<usize>, Vec<usize>)>);

fn contract_components(g: &Graph, x: &VertexSet) -> Contracted {
    let mut h = g.induced(x);
    let pos: BTreeMap<usize, usize> = x.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut removed = vec![false; g.n()];
    for &v in x {
        removed[v] = true;
    }
    let mut out = Vec::new();
    for c in g.components_avoiding(&removed) {
        let label = c.iter().map(|&v| g.label(v)).min().expect("non-empty component");
        h.add_vertex(label);
        let nbrs: BTreeSet<usize> = c
            .iter()
            .flat_map(|&v| g.neighbors(v).iter())
            .filter_map(|w| pos.get(w).copied())
            .collect();
        out.push((c, nbrs.into_iter().collect()));
    }
    (h, out)
}

/// `𝔄[X] ↾ τ`: the substructure induced by `X`, without the modulator symbol.
pub fn ind_x(a: &Structure, x: &ElemSet) -> Result<Structure> {
    Ok(induced_substructure(a, x)?.restrict_vocabulary(MODULATOR))
}

/// `𝔄[V ∖ X] ↾ τ`.
pub fn rm_x(a: &Structure, x: &ElemSet) -> Result<Structure> {
    if let Some(&bad) = x.iter().find(|e| !a.contains(**e)) {
        return Err(Error::NotInUniverse(bad));
    }
    let rest: ElemSet = a.universe().difference(x).copied().collect();
    ind_x(a, &rest)
}

/// Adds `E` relating every two distinct elements that share a tuple with a
/// common `z ∈ X` (possibly in different tuples, and `z` may be one of them),
/// and interprets `X` by `x`. An existing binary `E` is extended.
pub fn cl_x(a: &Structure, x: &ElemSet) -> Result<Structure> {
    if let Some(&bad) = x.iter().find(|e| !a.contains(**e)) {
        return Err(Error::NotInUniverse(bad));
    }
    let base = a.restrict_vocabulary(MODULATOR);
    let mut reach: BTreeMap<Elem, ElemSet> = BTreeMap::new();
    for (_, tuples) in base.relations() {
        for t in tuples {
            for z in t.iter().filter(|z| x.contains(z)) {
                reach.entry(*z).or_default().extend(t.iter().copied());
            }
        }
    }
    let mut edges: BTreeSet<Tuple> = BTreeSet::new();
    for near in reach.values() {
        for &u in near {
            for &v in near {
                if u != v {
                    edges.insert(vec![u, v]);
                }
            }
        }
    }
    let with_e = match base.vocabulary().arity(CLIQUE_RELATION) {
        Some(2) => base,
        Some(_) => {
            return Err(Error::Vocabulary(format!(
                "`{CLIQUE_RELATION}` is used with arity other than 2"
            )))
        }
        None => rebuild(&base, base.vocabulary().clone().with_relation(CLIQUE_RELATION, 2)?)?,
    };
    with_e.with_tuples(CLIQUE_RELATION, edges)?.with_unary(MODULATOR, x)
}

/// Same elements, relations and constants over a larger vocabulary.
fn rebuild(a: &Structure, vocab: Vocabulary) -> Result<Structure> {
    let mut s = Structure::new(vocab, a.universe().iter().copied())?;
    for (name, tuples) in a.relations() {
        s = s.with_tuples(name, tuples.iter().cloned())?;
    }
    for (c, v) in a.constants() {
        s = s.with_constant(c, v)?;
    }
    Ok(s)
}

/// Components of `G_𝔄 ∖ X`, keyed by their smallest element.
pub fn star_components(a: &Structure, x: &ElemSet) -> Result<BTreeMap<Elem, ElemSet>> {
    if let Some(&bad) = x.iter().find(|e| !a.contains(**e)) {
        return Err(Error::NotInUniverse(bad));
    }
    let g = gaifman_graph(&a.restrict_vocabulary(MODULATOR));
    let removed: Vec<bool> = (0..g.n()).map(|v| x.contains(&g.label(v))).collect();
    Ok(g.components_avoiding(&removed)
        .into_iter()
        .map(|c| {
            let set: ElemSet = c.iter().map(|&v| g.label(v)).collect();
            (*set.iter().next().expect("non-empty"), set)
        })
        .collect())
}

/// Collapses each component `C` of `G_𝔄 ∖ X` to the element `min C`, projects
/// every tuple entrywise, and reinterprets `X` as the collapsed elements.
pub fn star_x(a: &Structure, x: &ElemSet) -> Result<Structure> {
    if a.vocabulary().has_constants() {
        return Err(Error::ConstantsPresent);
    }
    let comps = star_components(a, x)?;
    let mut rep: BTreeMap<Elem, Elem> = x.iter().map(|&e| (e, e)).collect();
    for (&r, c) in &comps {
        for &e in c {
            rep.insert(e, r);
        }
    }
    let base = a.restrict_vocabulary(MODULATOR);
    let universe: ElemSet = x.iter().chain(comps.keys()).copied().collect();
    let mut s = Structure::new(base.vocabulary().clone(), universe)?;
    for (name, tuples) in base.relations() {
        s = s.with_tuples(name, tuples.iter().map(|t| t.iter().map(|e| rep[e]).collect()))?;
    }
    s.with_unary(MODULATOR, &comps.keys().copied().collect())
}

/// `cl_X(star_X(𝔄, X))`, with `cl_X` taken at the collapsed elements.
pub fn star_closure(a: &Structure, x: &ElemSet) -> Result<Structure> {
    let star = star_x(a, x)?;
    let collapsed = star.unary_set(MODULATOR);
    cl_x(&star, &collapsed)
}

/// Whether every component `C` of the Gaifman graph has `𝔄[C] ⊨ φ`.
pub fn eval_connectivity_closure(a: &Structure, phi: &Formula) -> Result<bool> {
    if !phi.is_sentence() {
        return Err(Error::Invalid("connectivity closure needs a sentence".into()));
    }
    let g = gaifman_graph(a);
    for c in g.components() {
        let part: ElemSet = c.iter().map(|&v| g.label(v)).collect();
        if !holds(&induced_substructure(a, &part)?, phi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn projected_relation(rel: &str, j: usize) -> String {
    format!("{rel}_{j}")
}

pub fn projected_apex_relation(rel: &str, j: usize) -> String {
    format!("{rel}_ap_{j}")
}

pub fn apex_colour(rel: &str, i: usize) -> String {
    format!("{rel}_Y_{i}")
}

pub fn apex_constant(i: usize) -> String {
    format!("c{i}")
}

/// `τ^(c)` for apex tuples of size `l`: unary relations kept, each `R` of arity
/// `r ≥ 2` replaced by `R_j`, `R_ap_j` (`j ∈ [r]`) and `R_Y_i` (`i ∈ [l]`),
/// plus constants `c1..cl`.
pub fn projected_vocabulary(tau: &Vocabulary, l: usize) -> Result<Vocabulary> {
    let mut v = Vocabulary::new();
    for c in tau.constants() {
        v = v.with_constant(c)?;
    }
    for i in 1..=l {
        let c = apex_constant(i);
        if tau.has_constant(&c) {
            return Err(Error::Vocabulary(format!("`{c}` is reserved for apex constants")));
        }
        v = v.with_constant(&c)?;
    }
    for (rel, r) in tau.relations() {
        if r == 1 {
            v = v.with_relation(rel, 1)?;
            continue;
        }
        for j in 1..=r {
            v = v.with_relation(&projected_relation(rel, j), j)?;
            v = v.with_relation(&projected_apex_relation(rel, j), j)?;
        }
        for i in 1..=l {
            v = v.with_relation(&apex_colour(rel, i), 1)?;
        }
    }
    Ok(v)
}

/// `ap_c(𝔄, a)`. Entries of `apex` are elements or [`EMPTY`].
pub fn apex_project_structure(a: &Structure, apex: &[Elem]) -> Result<Structure> {
    if let Some(&bad) = apex.iter().find(|&&e| e != EMPTY && !a.contains(e)) {
        return Err(Error::NotInUniverse(bad));
    }
    let l = apex.len();
    let tau = a.vocabulary();
    let in_apex: ElemSet = apex.iter().copied().filter(|&e| e != EMPTY).collect();
    let mut s = Structure::new(projected_vocabulary(tau, l)?, a.universe().iter().copied())?;
    for (c, v) in a.constants() {
        s = s.with_constant(c, v)?;
    }
    for (i, &e) in apex.iter().enumerate() {
        s = s.with_constant(&apex_constant(i + 1), e)?;
    }
    for (rel, tuples) in a.relations() {
        if tau.arity(rel) == Some(1) {
            s = s.with_tuples(rel, tuples.iter().cloned())?;
            continue;
        }
        for t in tuples {
            let z: Tuple = t.iter().copied().filter(|e| !in_apex.contains(e)).collect();
            let w: Tuple = t.iter().copied().filter(|e| in_apex.contains(e)).collect();
            if !z.is_empty() {
                s = s.with_tuple(&projected_relation(rel, z.len()), z.clone())?;
            }
            if !w.is_empty() {
                s = s.with_tuple(&projected_apex_relation(rel, w.len()), w)?;
            }
            for (i, &ai) in apex.iter().enumerate() {
                if ai != EMPTY && t.contains(&ai) {
                    s = s.with_tuples(&apex_colour(rel, i + 1), z.iter().map(|&v| vec![v]))?;
                }
            }
        }
    }
    Ok(s)
}

/// `σ^l`: every atom `R(x₁..x_r)` with `r ≥ 2` becomes a disjunction over the
/// split sizes `j ∈ [0, r]`, the order-preserving splits of its arguments
/// into a non-apex part `z` (length `j`) and an apex part `w`, and the index
/// tuples `t ∈ [l]^(r−j)`:
/// `z ∈ R_j ∧ w ∈ R_ap_(r−j) ∧ ⋀ᵢ (wᵢ = c_tᵢ ∧ ⋀_(y∈z) y ∈ R_Y_tᵢ)`.
/// Empty `z` or `w` drop the corresponding membership conjunct.
pub fn apex_project_sentence(sigma: &Formula, l: usize) -> Result<Formula> {
    if !sigma.is_first_order() {
        return Err(Error::NotFirstOrder(sigma.to_string()));
    }
    Ok(project(sigma, l))
}

fn project(f: &Formula, l: usize) -> Formula {
    let rec = |g: &Formula| Box::new(project(g, l));
    match f {
        Formula::Rel(r, ts) if ts.len() >= 2 => project_atom(r, ts, l),
        Formula::Not(g) => Formula::Not(rec(g)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| project(g, l)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| project(g, l)).collect()),
        Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
        Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), rec(g)),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), rec(g)),
        other => other.clone(),
    }
}

fn project_atom(rel: &str, ts: &[Term], l: usize) -> Formula {
    let r = ts.len();
    let mut cases = Vec::new();
    for mask in 0u32..(1 << r) {
        let z: Vec<Term> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| ts[i].clone()).collect();
        let w: Vec<Term> = (0..r).filter(|i| mask >> i & 1 == 0).map(|i| ts[i].clone()).collect();
        let mut parts = Vec::new();
        if !z.is_empty() {
            parts.push(Formula::Rel(projected_relation(rel, z.len()), z.clone()));
        }
        if !w.is_empty() {
            parts.push(Formula::Rel(projected_apex_relation(rel, w.len()), w.clone()));
        }
        let mut choices = Vec::new();
        for t in index_tuples(l, w.len()) {
            let mut conj = Vec::new();
            for (wi, &ti) in w.iter().zip(&t) {
                conj.push(Formula::Eq(wi.clone(), Term::Const(apex_constant(ti))));
                for y in &z {
                    conj.push(Formula::Rel(apex_colour(rel, ti), vec![y.clone()]));
                }
            }
            choices.push(Formula::and(conj));
        }
        parts.push(Formula::or(choices));
        cases.push(Formula::and(parts));
    }
    // Order by decreasing `j` so the plain case comes first.
    cases.reverse();
    Formula::or(cases)
}

/// All tuples in `[l]^len` (1-based), lexicographic.
fn index_tuples(l: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=l).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}
