//! The compound modification logic: sentences `β ▷ γ` whose modulator part
//! `β` is read on `star_X(𝔄, X)` and whose target part `γ` is a positive
//! Boolean combination of sentences read on `𝔄 ∖ X`, bottoming out at
//! first-order targets with an excluded-minor condition.

mod measures;
mod syntax;

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::logic::{holds, Formula};
use crate::minors::{excl_membership, is_minor, ObstructionSet};
use crate::structure::{gaifman_graph, induced_substructure, ElemSet, Structure};
use crate::transforms::{rm_x, star_closure, star_x};
use crate::width::treewidth_of_structure;

pub use measures::{
    bridge_depth, elimination_distance, g_treewidth, parametric_measure, Measured, Parameter, Target, MEASURE_CAP,
};
pub(crate) use syntax::{parse_excl_at, parse_theta_at};
pub use syntax::{parse_theta, THETA_GRAMMAR};

/// Default universe cap for [`model_check_theta`].
pub const THETA_CAP: usize = 14;

/// `σ ∧ μ`: a first-order target plus an optional excluded-minor condition.
/// Without `obstructions` the sentence belongs to the variant without minor
/// targets. `paths` admits disjoint-path atoms in `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSentence {
    pub sigma: Formula,
    pub obstructions: Option<ObstructionSet>,
    pub paths: bool,
}

/// A modulator sentence over `τ ∪ {X}` with its declared treewidth bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulatorSentence {
    pub formula: Formula,
    pub declared_tw: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compound {
    pub modulator: ModulatorSentence,
    pub body: Body,
}

/// Positive Boolean combination of child sentences; `closed` children are
/// evaluated on every connected component separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Leaf { theta: ThetaSentence, closed: bool },
    And(Vec<Body>),
    Or(Vec<Body>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaSentence {
    Base(BaseSentence),
    Compound(Box<Compound>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ThetaMetadata {
    pub height: usize,
    pub tw: usize,
    pub hw: usize,
}

impl ThetaSentence {
    pub fn base(sigma: Formula, obstructions: Option<ObstructionSet>) -> Result<Self> {
        let s = ThetaSentence::Base(BaseSentence {
            sigma,
            obstructions,
            paths: false,
        });
        s.validate()?;
        Ok(s)
    }

    /// A base sentence whose `sigma` may use `dp` / `sdp` atoms.
    pub fn base_with_paths(sigma: Formula, obstructions: Option<ObstructionSet>) -> Result<Self> {
        let s = ThetaSentence::Base(BaseSentence {
            sigma,
            obstructions,
            paths: true,
        });
        s.validate()?;
        Ok(s)
    }

    pub fn compound(beta: Formula, declared_tw: usize, body: Body) -> Result<Self> {
        let s = ThetaSentence::Compound(Box::new(Compound {
            modulator: ModulatorSentence {
                formula: beta,
                declared_tw,
            },
            body,
        }));
        s.validate()?;
        Ok(s)
    }

    /// `β ▷ θ^(c)`.
    pub fn over(beta: Formula, declared_tw: usize, theta: ThetaSentence) -> Result<Self> {
        Self::compound(beta, declared_tw, Body::closed(theta))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ThetaSentence::Base(b) => {
                if !b.sigma.is_sentence() {
                    return Err(Error::Invalid(format!("target `{}` is not a sentence", b.sigma)));
                }
                if !b.sigma.is_first_order() {
                    return Err(Error::NotFirstOrder(b.sigma.to_string()));
                }
                if !b.paths && b.sigma.uses_paths() {
                    return Err(Error::Invalid(format!(
                        "target `{}` uses path atoms but the base is not marked dp",
                        b.sigma
                    )));
                }
                Ok(())
            }
            ThetaSentence::Compound(c) => {
                let beta = &c.modulator.formula;
                if !beta.is_sentence() {
                    return Err(Error::Invalid(format!("modulator `{beta}` is not a sentence")));
                }
                if beta.uses_paths() {
                    return Err(Error::Invalid(format!("modulator `{beta}` uses path atoms")));
                }
                c.body.validate()
            }
        }
    }

    pub fn metadata(&self) -> ThetaMetadata {
        match self {
            ThetaSentence::Base(b) => ThetaMetadata {
                height: 0,
                tw: 0,
                hw: b.obstructions.as_ref().map_or(0, |o| o.clique_bound()),
            },
            ThetaSentence::Compound(c) => {
                let mut m = ThetaMetadata::default();
                c.body.for_each_leaf(&mut |t, _| {
                    let sub = t.metadata();
                    m.height = m.height.max(sub.height);
                    m.tw = m.tw.max(sub.tw);
                    m.hw = m.hw.max(sub.hw);
                });
                m.height += 1;
                m.tw = m.tw.max(c.modulator.declared_tw);
                m
            }
        }
    }

    /// Whether some base lacks an excluded-minor condition.
    pub fn is_tilde(&self) -> bool {
        self.bases().iter().any(|b| b.obstructions.is_none())
    }

    pub fn uses_paths(&self) -> bool {
        self.bases().iter().any(|b| b.sigma.uses_paths())
    }

    pub fn bases(&self) -> Vec<&BaseSentence> {
        match self {
            ThetaSentence::Base(b) => vec![b],
            ThetaSentence::Compound(c) => {
                let mut out = Vec::new();
                c.body.for_each_leaf(&mut |t, _| out.extend(t.bases()));
                out
            }
        }
    }

    /// Every base drops its excluded-minor condition.
    pub fn without_obstructions(&self) -> ThetaSentence {
        self.map_bases(&|b| BaseSentence {
            obstructions: None,
            ..b.clone()
        })
    }

    /// Every base additionally excludes `K_c`.
    pub fn with_clique_exclusion(&self, c: usize) -> ThetaSentence {
        self.map_bases(&|b| {
            let mut graphs = b.obstructions.as_ref().map_or(Vec::new(), |o| o.graphs().to_vec());
            graphs.push((format!("K{c}"), Graph::complete(c)));
            let bound = b.obstructions.as_ref().map(|o| o.clique_bound().max(c));
            BaseSentence {
                obstructions: Some(ObstructionSet::new(graphs, bound).expect("bound covers every member")),
                ..b.clone()
            }
        })
    }

    fn map_bases(&self, f: &dyn Fn(&BaseSentence) -> BaseSentence) -> ThetaSentence {
        match self {
            ThetaSentence::Base(b) => ThetaSentence::Base(f(b)),
            ThetaSentence::Compound(c) => ThetaSentence::Compound(Box::new(Compound {
                modulator: c.modulator.clone(),
                body: c.body.map_leaves(&|t| t.map_bases(f)),
            })),
        }
    }
}

impl Body {
    pub fn leaf(theta: ThetaSentence) -> Body {
        Body::Leaf { theta, closed: false }
    }

    pub fn closed(theta: ThetaSentence) -> Body {
        Body::Leaf { theta, closed: true }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Body::Leaf { theta, .. } => theta.validate(),
            Body::And(bs) | Body::Or(bs) => {
                if bs.is_empty() {
                    return Err(Error::Invalid("empty conjunction or disjunction in a body".into()));
                }
                bs.iter().try_for_each(Body::validate)
            }
        }
    }

    fn for_each_leaf<'a>(&'a self, f: &mut dyn FnMut(&'a ThetaSentence, bool)) {
        match self {
            Body::Leaf { theta, closed } => f(theta, *closed),
            Body::And(bs) | Body::Or(bs) => bs.iter().for_each(|b| b.for_each_leaf(f)),
        }
    }

    fn map_leaves(&self, f: &dyn Fn(&ThetaSentence) -> ThetaSentence) -> Body {
        match self {
            Body::Leaf { theta, closed } => Body::Leaf {
                theta: f(theta),
                closed: *closed,
            },
            Body::And(bs) => Body::And(bs.iter().map(|b| b.map_leaves(f)).collect()),
            Body::Or(bs) => Body::Or(bs.iter().map(|b| b.map_leaves(f)).collect()),
        }
    }
}

/// The modulators chosen on an accepting branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaWitness {
    Base,
    Compound { modulator: ElemSet, body: BodyWitness },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BodyWitness {
    /// One entry per component for a closed leaf, a single entry over the
    /// whole universe otherwise.
    Leaf(Vec<(ElemSet, ThetaWitness)>),
    And(Vec<BodyWitness>),
    /// Index of the satisfied disjunct.
    Or(usize, Box<BodyWitness>),
}

impl ThetaWitness {
    /// Every modulator on the branch, outermost first.
    pub fn modulators(&self) -> Vec<ElemSet> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<ElemSet>) {
        if let ThetaWitness::Compound { modulator, body } = self {
            out.push(modulator.clone());
            body.collect(out);
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        match self {
            ThetaWitness::Base => writeln!(f, "{:depth$}base", ""),
            ThetaWitness::Compound { modulator, body } => {
                writeln!(f, "{:depth$}X = {}", "", set_text(modulator))?;
                body.write(f, depth + 2)
            }
        }
    }
}

impl BodyWitness {
    fn collect(&self, out: &mut Vec<ElemSet>) {
        match self {
            BodyWitness::Leaf(parts) => parts.iter().for_each(|(_, w)| w.collect(out)),
            BodyWitness::And(ws) => ws.iter().for_each(|w| w.collect(out)),
            BodyWitness::Or(_, w) => w.collect(out),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        match self {
            BodyWitness::Leaf(parts) => {
                for (part, w) in parts {
                    writeln!(f, "{:depth$}on {}", "", set_text(part))?;
                    w.write(f, depth + 2)?;
                }
                Ok(())
            }
            BodyWitness::And(ws) => ws.iter().try_for_each(|w| w.write(f, depth)),
            BodyWitness::Or(i, w) => {
                writeln!(f, "{:depth$}disjunct {i}", "")?;
                w.write(f, depth + 2)
            }
        }
    }
}

impl fmt::Display for ThetaWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

fn set_text(s: &ElemSet) -> String {
    let items: Vec<String> = s.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// `𝔄 ⊨ θ`, with the modulators of an accepting branch.
pub fn model_check_theta(a: &Structure, theta: &ThetaSentence) -> Result<Option<ThetaWitness>> {
    model_check_theta_with(a, theta, THETA_CAP)
}

pub fn model_check_theta_with(a: &Structure, theta: &ThetaSentence, cap: usize) -> Result<Option<ThetaWitness>> {
    theta.validate()?;
    if a.len() > cap {
        return Err(Error::LimitExceeded {
            what: "structure for modulator search",
            size: a.len(),
            limit: cap,
        });
    }
    sat(a, theta)
}

fn base_holds(a: &Structure, b: &BaseSentence) -> Result<bool> {
    if !holds(a, &b.sigma)? {
        return Ok(false);
    }
    match &b.obstructions {
        Some(o) => excl_membership(&gaifman_graph(a), o),
        None => Ok(true),
    }
}

fn sat(a: &Structure, theta: &ThetaSentence) -> Result<Option<ThetaWitness>> {
    match theta {
        ThetaSentence::Base(b) => Ok(base_holds(a, b)?.then_some(ThetaWitness::Base)),
        ThetaSentence::Compound(c) => {
            for x in lex_subsets(a.universe()) {
                if !modulator_accepts(a, &c.modulator, &x)? {
                    continue;
                }
                if let Some(body) = sat_body(&rm_x(a, &x)?, &c.body)? {
                    return Ok(Some(ThetaWitness::Compound { modulator: x, body }));
                }
            }
            Ok(None)
        }
    }
}

/// `star_X(𝔄, X) ⊨ β`, enforcing the declared treewidth on acceptance.
fn modulator_accepts(a: &Structure, m: &ModulatorSentence, x: &ElemSet) -> Result<bool> {
    if !holds(&star_x(a, x)?, &m.formula)? {
        return Ok(false);
    }
    let actual = treewidth_of_structure(&star_closure(a, x)?)?;
    if actual > m.declared_tw {
        return Err(Error::DeclaredTreewidthViolated {
            declared: m.declared_tw,
            actual,
            modulator: x.iter().copied().collect(),
        });
    }
    Ok(true)
}

fn components(a: &Structure) -> Vec<ElemSet> {
    let g = gaifman_graph(a);
    g.components()
        .into_iter()
        .map(|c| c.iter().map(|&v| g.label(v)).collect())
        .collect()
}

fn sat_body(a: &Structure, body: &Body) -> Result<Option<BodyWitness>> {
    match body {
        Body::Leaf { theta, closed } => {
            let parts = if *closed {
                components(a)
            } else {
                vec![a.universe().clone()]
            };
            let mut out = Vec::new();
            for part in parts {
                let sub = if *closed {
                    induced_substructure(a, &part)?
                } else {
                    a.clone()
                };
                match sat(&sub, theta)? {
                    Some(w) => out.push((part, w)),
                    None => return Ok(None),
                }
            }
            Ok(Some(BodyWitness::Leaf(out)))
        }
        Body::And(bs) => {
            let mut out = Vec::new();
            for b in bs {
                match sat_body(a, b)? {
                    Some(w) => out.push(w),
                    None => return Ok(None),
                }
            }
            Ok(Some(BodyWitness::And(out)))
        }
        Body::Or(bs) => {
            for (i, b) in bs.iter().enumerate() {
                if let Some(w) = sat_body(a, b)? {
                    return Ok(Some(BodyWitness::Or(i, Box::new(w))));
                }
            }
            Ok(None)
        }
    }
}

/// Subsets as sorted sequences in lexicographic order (`∅` first).
fn lex_subsets(universe: &ElemSet) -> Vec<ElemSet> {
    fn go(elems: &[u32], from: usize, cur: &mut Vec<u32>, out: &mut Vec<ElemSet>) {
        out.push(cur.iter().copied().collect());
        for i in from..elems.len() {
            cur.push(elems[i]);
            go(elems, i + 1, cur, out);
            cur.pop();
        }
    }
    let elems: Vec<u32> = universe.iter().copied().collect();
    let mut out = Vec::with_capacity(1 << elems.len().min(20));
    go(&elems, 0, &mut Vec::new(), &mut out);
    out
}

/// Re-verifies a witness: its modulators are accepted and its branch
/// satisfies every target.
pub fn replay(a: &Structure, theta: &ThetaSentence, w: &ThetaWitness) -> Result<bool> {
    match (theta, w) {
        (ThetaSentence::Base(b), ThetaWitness::Base) => base_holds(a, b),
        (ThetaSentence::Compound(c), ThetaWitness::Compound { modulator, body }) => {
            if !modulator.is_subset(a.universe()) || !modulator_accepts(a, &c.modulator, modulator)? {
                return Ok(false);
            }
            replay_body(&rm_x(a, modulator)?, &c.body, body)
        }
        _ => Ok(false),
    }
}

fn replay_body(a: &Structure, body: &Body, w: &BodyWitness) -> Result<bool> {
    match (body, w) {
        (Body::Leaf { theta, closed }, BodyWitness::Leaf(parts)) => {
            let expected = if *closed {
                components(a)
            } else {
                vec![a.universe().clone()]
            };
            let mut listed: Vec<ElemSet> = parts.iter().map(|(p, _)| p.clone()).collect();
            let mut want = expected;
            listed.sort();
            want.sort();
            if listed != want {
                return Ok(false);
            }
            for (part, pw) in parts {
                let sub = if *closed {
                    induced_substructure(a, part)?
                } else {
                    a.clone()
                };
                if !replay(&sub, theta, pw)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Body::And(bs), BodyWitness::And(ws)) if bs.len() == ws.len() => {
            for (b, w) in bs.iter().zip(ws) {
                if !replay_body(a, b, w)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Body::Or(bs), BodyWitness::Or(i, w)) => match bs.get(*i) {
            Some(b) => replay_body(a, b, w),
            None => Ok(false),
        },
        _ => Ok(false),
    }
}

/// The clique order `hw + (tw + 1) · height` excluded by every model.
pub fn clique_bound(m: &ThetaMetadata) -> usize {
    m.hw + (m.tw + 1) * m.height
}

/// Checks that a model of `θ` excludes `K_c` with `c` from [`clique_bound`].
pub fn clique_bound_check(theta: &ThetaSentence, a: &Structure) -> Result<bool> {
    if theta.is_tilde() {
        return Err(Error::NotApplicable(
            "the clique bound needs an excluded-minor condition at every base".into(),
        ));
    }
    if model_check_theta(a, theta)?.is_none() {
        return Err(Error::Precondition(
            "the structure is not a model of the sentence".into(),
        ));
    }
    let c = clique_bound(&theta.metadata());
    let g = gaifman_graph(a);
    if c > g.n() {
        return Ok(true);
    }
    Ok(is_minor(&Graph::complete(c), &g)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn at_most_one_outside() -> Formula {
        f("forall x. forall y. (not X(x) and not X(y)) -> x = y")
    }

    fn planarization() -> ThetaSentence {
        let target = ThetaSentence::base(Formula::True, Some(ObstructionSet::planar())).unwrap();
        ThetaSentence::compound(at_most_one_outside(), 1, Body::leaf(target)).unwrap()
    }

    #[test]
    fn planarization_of_k5() {
        let k5 = Graph::complete(5).to_structure();
        let w = model_check_theta(&k5, &planarization()).unwrap().unwrap();
        assert_eq!(w.modulators(), vec![ElemSet::from([0])]);
        assert!(replay(&k5, &planarization(), &w).unwrap());
        let k6 = Graph::complete(6).to_structure();
        assert!(model_check_theta(&k6, &planarization()).unwrap().is_none());
    }

    #[test]
    fn empty_modulator_reduces_to_target() {
        let empty = f("forall x. X(x)");
        let target = ThetaSentence::base(Formula::True, ObstructionSet::from_names(&["K3"]).ok()).unwrap();
        let theta = ThetaSentence::compound(empty, 0, Body::leaf(target.clone())).unwrap();
        for g in [Graph::path(4), Graph::cycle(4), Graph::star(3), Graph::complete(3)] {
            let a = g.to_structure();
            assert_eq!(
                model_check_theta(&a, &theta).unwrap().is_some(),
                model_check_theta(&a, &target).unwrap().is_some()
            );
        }
    }

    #[test]
    fn metadata_of_nested_sentences() {
        let base = ThetaSentence::base(Formula::True, ObstructionSet::from_names(&["K4"]).ok()).unwrap();
        assert_eq!(
            base.metadata(),
            ThetaMetadata {
                height: 0,
                tw: 0,
                hw: 4
            }
        );
        let one = ThetaSentence::over(at_most_one_outside(), 1, base).unwrap();
        assert_eq!(
            one.metadata(),
            ThetaMetadata {
                height: 1,
                tw: 1,
                hw: 4
            }
        );
        let tilde = ThetaSentence::base(Formula::True, None).unwrap();
        let two = ThetaSentence::compound(
            f("forall x. X(x)"),
            0,
            Body::Or(vec![Body::closed(one), Body::leaf(tilde)]),
        )
        .unwrap();
        assert_eq!(
            two.metadata(),
            ThetaMetadata {
                height: 2,
                tw: 1,
                hw: 4
            }
        );
        assert!(two.is_tilde());
        assert_eq!(clique_bound(&two.metadata()), 8);
    }

    #[test]
    fn declared_treewidth_is_enforced() {
        let anything = ThetaSentence::compound(
            Formula::True,
            0,
            Body::leaf(ThetaSentence::base(Formula::False, None).unwrap()),
        )
        .unwrap();
        let err = model_check_theta(&Graph::path(3).to_structure(), &anything).unwrap_err();
        assert!(matches!(err, Error::DeclaredTreewidthViolated { declared: 0, .. }));
    }

    #[test]
    fn validation() {
        assert!(ThetaSentence::base(f("exists X. exists x. x in X"), None).is_err());
        assert!(ThetaSentence::base(f("exists x. exists y. exists z. exists w. dp2(x,y,z,w)"), None).is_err());
        assert!(
            ThetaSentence::base_with_paths(f("exists x. exists y. exists z. exists w. dp2(x,y,z,w)"), None).is_ok()
        );
        assert!(ThetaSentence::base(f("E(x,y)"), None).is_err());
        assert!(ThetaSentence::compound(Formula::True, 0, Body::And(vec![])).is_err());
    }

    #[test]
    fn clique_bound_on_forests() {
        let forests = ThetaSentence::base(Formula::True, ObstructionSet::from_names(&["K3"]).ok()).unwrap();
        assert!(clique_bound_check(&forests, &Graph::path(5).to_structure()).unwrap());
        assert!(matches!(
            clique_bound_check(&forests, &Graph::cycle(3).to_structure()),
            Err(Error::Precondition(_))
        ));
        let tilde = ThetaSentence::base(Formula::True, None).unwrap();
        assert!(matches!(
            clique_bound_check(&tilde, &Graph::path(2).to_structure()),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn subsets_are_lexicographic() {
        let subs = lex_subsets(&ElemSet::from([1, 2, 3]));
        let seqs: Vec<Vec<u32>> = subs.iter().map(|s| s.iter().copied().collect()).collect();
        let mut sorted = seqs.clone();
        sorted.sort();
        assert_eq!(seqs, sorted);
        assert_eq!(seqs.len(), 8);
    }
}
