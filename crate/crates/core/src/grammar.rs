//! Modification strings: vertex deletion `n`, edge deletion `e`, per-component
//! evaluation `c`, conjunction and disjunction over target sentences, plus the
//! gadget that turns edge deletions into vertex deletions and `H`-modifications.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::minors::{contract_edge, ObstructionSet};
use crate::structure::{Elem, ElemSet};
use crate::theta::{model_check_theta_with, parse_excl_at, parse_theta_at, BaseSentence, ThetaSentence, ThetaWitness};

/// Default vertex cap for [`eval_mod`].
pub const MOD_CAP: usize = 10;

/// Surface syntax accepted by [`parse_mod_string`]. `and` binds tighter than
/// `or`; `n^k w`, `e^k w`, `c^k w` nest `k` copies and `(cd)^k w` expands to
/// `k` copies of `c n`.
pub const MOD_GRAMMAR: &str = r#"string = disj ;
disj   = conj { ( "or" | "∨" ) conj } ;
conj   = unit { ( "and" | "∧" ) unit } ;
unit   = op unit | "(" string ")" | [ "F" ] target ;
op     = ( "n" | "e" | "c" | "s" ) [ "^" int ] | "(cd)" "^" int ;
target = "planar" | "excl" "{" name { "," name } "}" [ "c" "=" int ] | base ;
base   = "base" "(" formula [ ";" excl ] [ ";" "dp" ] ")" ;
"#;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModString {
    /// A base sentence. Without obstructions it is a first-order terminal.
    Terminal(BaseSentence),
    /// `∃v: G ∖ v ∈ 𝒢_w`.
    N(Box<ModString>),
    /// `∃e: G ∖ e ∈ 𝒢_w`.
    E(Box<ModString>),
    /// Every component is in `𝒢_w`.
    C(Box<ModString>),
    /// `∃e: G / e ∈ 𝒢_w`; evaluated only with the `contraction` feature.
    S(Box<ModString>),
    And(Box<ModString>, Box<ModString>),
    Or(Box<ModString>, Box<ModString>),
}

impl ModString {
    pub fn terminal(theta: ThetaSentence) -> Result<ModString> {
        match theta {
            ThetaSentence::Base(b) => Ok(ModString::Terminal(b)),
            _ => Err(Error::Invalid("a terminal must be a base sentence".into())),
        }
    }

    pub fn n(w: ModString) -> ModString {
        ModString::N(Box::new(w))
    }

    pub fn e(w: ModString) -> ModString {
        ModString::E(Box::new(w))
    }

    pub fn c(w: ModString) -> ModString {
        ModString::C(Box::new(w))
    }

    pub fn and(l: ModString, r: ModString) -> ModString {
        ModString::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: ModString, r: ModString) -> ModString {
        ModString::Or(Box::new(l), Box::new(r))
    }

    pub fn terminals(&self) -> Vec<&BaseSentence> {
        match self {
            ModString::Terminal(b) => vec![b],
            ModString::N(w) | ModString::E(w) | ModString::C(w) | ModString::S(w) => w.terminals(),
            ModString::And(l, r) | ModString::Or(l, r) => {
                let mut out = l.terminals();
                out.extend(r.terminals());
                out
            }
        }
    }

    /// Whether the terminals are first-order sentences without obstructions.
    pub fn is_tilde(&self) -> bool {
        self.terminals().iter().all(|t| t.obstructions.is_none())
    }

    /// Terminals must agree on whether they carry obstructions.
    pub fn validate(&self) -> Result<()> {
        let ts = self.terminals();
        let with = ts.iter().filter(|t| t.obstructions.is_some()).count();
        if with != 0 && with != ts.len() {
            return Err(Error::Invalid(
                "terminals mix excluded-minor targets with plain first-order targets".into(),
            ));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        match self {
            ModString::Terminal(_) => 0,
            ModString::N(w) | ModString::E(w) | ModString::C(w) | ModString::S(w) => 1 + w.depth(),
            ModString::And(l, r) | ModString::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl fmt::Display for ModString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModString::Terminal(b) => write!(f, "{}", ThetaSentence::Base(b.clone())),
            ModString::N(w) => write!(f, "(n {w})"),
            ModString::E(w) => write!(f, "(e {w})"),
            ModString::C(w) => write!(f, "(c {w})"),
            ModString::S(w) => write!(f, "(s {w})"),
            ModString::And(l, r) => write!(f, "({l} and {r})"),
            ModString::Or(l, r) => write!(f, "({l} or {r})"),
        }
    }
}

/// Parses a string written in [`MOD_GRAMMAR`].
pub fn parse_mod_string(text: &str) -> Result<ModString> {
    let mut p = ModParser { text, pos: 0 };
    let w = p.disj()?;
    p.ws();
    if p.pos < text.len() {
        return p.err("trailing input");
    }
    w.validate().or_else(|e| p.at(0, e))?;
    Ok(w)
}

struct ModParser<'a> {
    text: &'a str,
    pos: usize,
}

impl ModParser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn at<T>(&self, pos: usize, e: Error) -> Result<T> {
        if let Error::Syntax { .. } = e {
            return Err(e);
        }
        let before = &self.text[..pos];
        Err(Error::Syntax {
            line: before.matches('\n').count() + 1,
            column: before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1,
            message: e.to_string(),
        })
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        self.at(self.pos, Error::Invalid(message.to_string()))
    }

    fn word(&mut self, w: &str) -> bool {
        self.ws();
        let r = self.rest();
        let ok = r.starts_with(w)
            && !r[w.len()..]
                .chars()
                .next()
                .is_some_and(|ch| ch.is_alphanumeric() || ch == '_');
        if ok {
            self.pos += w.len();
        }
        ok
    }

    fn punct(&mut self, p: &str) -> bool {
        self.ws();
        if self.rest().starts_with(p) {
            self.pos += p.len();
            true
        } else {
            false
        }
    }

    fn power(&mut self) -> Result<usize> {
        if !self.punct("^") {
            return Ok(1);
        }
        self.ws();
        let digits = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return self.err("expected an exponent");
        }
        let k = self.rest()[..digits]
            .parse()
            .or_else(|_| self.err("exponent out of range"))?;
        self.pos += digits;
        Ok(k)
    }

    fn disj(&mut self) -> Result<ModString> {
        let mut w = self.conj()?;
        while self.word("or") || self.punct("∨") {
            w = ModString::or(w, self.conj()?);
        }
        Ok(w)
    }

    fn conj(&mut self) -> Result<ModString> {
        let mut w = self.unit()?;
        while self.word("and") || self.punct("∧") {
            w = ModString::and(w, self.unit()?);
        }
        Ok(w)
    }

    fn op(&mut self) -> Option<fn(Box<ModString>) -> ModString> {
        for (letter, make) in [
            ("n", ModString::N as fn(Box<ModString>) -> ModString),
            ("e", ModString::E),
            ("c", ModString::C),
            ("s", ModString::S),
        ] {
            let save = self.pos;
            self.ws();
            let r = self.rest();
            if r.starts_with(letter)
                && !r[1..]
                    .chars()
                    .next()
                    .is_some_and(|ch| ch.is_alphanumeric() || ch == '_')
            {
                self.pos += 1;
                return Some(make);
            }
            self.pos = save;
        }
        None
    }

    fn unit(&mut self) -> Result<ModString> {
        if self.punct("(cd)") {
            if !self.rest().trim_start().starts_with('^') {
                return self.err("`(cd)` needs an exponent");
            }
            let k = self.power()?;
            let inner = self.unit()?;
            return Ok((0..k).fold(inner, |w, _| ModString::c(ModString::n(w))));
        }
        if self.word("d") {
            return self.err("the letter `d` is only available as `(cd)^k`");
        }
        if let Some(make) = self.op() {
            let k = self.power()?;
            let inner = self.unit()?;
            return Ok((0..k).fold(inner, |w, _| make(Box::new(w))));
        }
        if self.punct("(") {
            let w = self.disj()?;
            if !self.punct(")") {
                return self.err("expected `)`");
            }
            return Ok(w);
        }
        self.word("F");
        self.target()
    }

    fn target(&mut self) -> Result<ModString> {
        self.ws();
        let start = self.pos;
        if self.word("planar") {
            return Ok(ModString::Terminal(BaseSentence {
                sigma: crate::logic::Formula::True,
                obstructions: Some(ObstructionSet::planar()),
                paths: false,
            }));
        }
        if self.word("excl") {
            let (o, end) = parse_excl_at(self.text, self.pos)?;
            self.pos = end;
            return Ok(ModString::Terminal(BaseSentence {
                sigma: crate::logic::Formula::True,
                obstructions: Some(o),
                paths: false,
            }));
        }
        if self.rest().starts_with("base") {
            let (t, end) = parse_theta_at(self.text, start)?;
            self.pos = end;
            return ModString::terminal(t).or_else(|e| self.at(start, e));
        }
        self.err("expected a target (`planar`, `excl{…}` or `base(…)`)")
    }
}

/// The choices made on an accepting evaluation, in element labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModWitness {
    Terminal,
    Vertex(Elem, Box<ModWitness>),
    Edge((Elem, Elem), Box<ModWitness>),
    Contract((Elem, Elem), Box<ModWitness>),
    Components(Vec<(ElemSet, ModWitness)>),
    And(Box<ModWitness>, Box<ModWitness>),
    /// `false` for the left disjunct.
    Or(bool, Box<ModWitness>),
}

impl ModWitness {
    fn write(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        match self {
            ModWitness::Terminal => writeln!(f, "{:depth$}accept", ""),
            ModWitness::Vertex(v, w) => {
                writeln!(f, "{:depth$}delete vertex {v}", "")?;
                w.write(f, depth)
            }
            ModWitness::Edge((u, v), w) => {
                writeln!(f, "{:depth$}delete edge {u}-{v}", "")?;
                w.write(f, depth)
            }
            ModWitness::Contract((u, v), w) => {
                writeln!(f, "{:depth$}contract edge {u}-{v}", "")?;
                w.write(f, depth)
            }
            ModWitness::Components(parts) => {
                for (part, w) in parts {
                    let items: Vec<String> = part.iter().map(|e| e.to_string()).collect();
                    writeln!(f, "{:depth$}component {{{}}}", "", items.join(","))?;
                    w.write(f, depth + 2)?;
                }
                Ok(())
            }
            ModWitness::And(l, r) => {
                l.write(f, depth)?;
                r.write(f, depth)
            }
            ModWitness::Or(right, w) => {
                writeln!(
                    f,
                    "{:depth$}take {} disjunct",
                    "",
                    if *right { "right" } else { "left" }
                )?;
                w.write(f, depth)
            }
        }
    }
}

impl fmt::Display for ModWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// Whether `G ∈ 𝒢_w`, with a deletion script.
pub fn eval_mod(g: &Graph, w: &ModString) -> Result<Option<ModWitness>> {
    eval_mod_with(g, w, MOD_CAP)
}

pub fn eval_mod_with(g: &Graph, w: &ModString, cap: usize) -> Result<Option<ModWitness>> {
    w.validate()?;
    if g.n() > cap {
        return Err(Error::LimitExceeded {
            what: "graph for modification search",
            size: g.n(),
            limit: cap,
        });
    }
    eval(g, w)
}

fn terminal_holds(g: &Graph, b: &BaseSentence) -> Result<bool> {
    let theta = ThetaSentence::Base(b.clone());
    Ok(model_check_theta_with(&g.to_structure(), &theta, g.n())?.is_some())
}

fn eval(g: &Graph, w: &ModString) -> Result<Option<ModWitness>> {
    let wrap = |r: Option<ModWitness>, f: &dyn Fn(Box<ModWitness>) -> ModWitness| r.map(|w| f(Box::new(w)));
    match w {
        ModString::Terminal(b) => Ok(terminal_holds(g, b)?.then_some(ModWitness::Terminal)),
        ModString::N(inner) => {
            for v in 0..g.n() {
                let r = eval(&g.remove_vertices(&[v].into()), inner)?;
                if r.is_some() {
                    return Ok(wrap(r, &|w| ModWitness::Vertex(g.label(v), w)));
                }
            }
            Ok(None)
        }
        ModString::E(inner) => {
            for (u, v) in g.edges() {
                let r = eval(&g.without_edge(u, v), inner)?;
                if r.is_some() {
                    return Ok(wrap(r, &|w| ModWitness::Edge((g.label(u), g.label(v)), w)));
                }
            }
            Ok(None)
        }
        ModString::S(inner) => {
            if !cfg!(feature = "contraction") {
                return Err(Error::NotApplicable(
                    "contraction is experimental; build with the `contraction` feature".into(),
                ));
            }
            for (u, v) in g.edges() {
                let r = eval(&contract_edge(g, u, v)?, inner)?;
                if r.is_some() {
                    return Ok(wrap(r, &|w| ModWitness::Contract((g.label(u), g.label(v)), w)));
                }
            }
            Ok(None)
        }
        ModString::C(inner) => {
            let mut parts = Vec::new();
            for c in g.components() {
                let set: VertexSet = c.iter().copied().collect();
                match eval(&g.induced(&set), inner)? {
                    Some(w) => parts.push((g.labels_of(&set), w)),
                    None => return Ok(None),
                }
            }
            Ok(Some(ModWitness::Components(parts)))
        }
        ModString::And(l, r) => {
            let Some(lw) = eval(g, l)? else { return Ok(None) };
            let Some(rw) = eval(g, r)? else { return Ok(None) };
            Ok(Some(ModWitness::And(Box::new(lw), Box::new(rw))))
        }
        ModString::Or(l, r) => {
            if let Some(lw) = eval(g, l)? {
                return Ok(Some(ModWitness::Or(false, Box::new(lw))));
            }
            Ok(wrap(eval(g, r)?, &|w| ModWitness::Or(true, w)))
        }
    }
}

/// The annotated graph `(G', R, B)`: every edge subdivided once by a blue
/// vertex and every original vertex identified with a vertex of its own
/// `(c + 1)`-clique whose other vertices are red.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGadget {
    pub graph: Graph,
    pub red: VertexSet,
    pub blue: VertexSet,
    /// Index in `graph` of each original vertex.
    pub white: Vec<usize>,
    /// Blue vertex of each original edge `(u, v)`, `u < v`.
    pub subdivision: BTreeMap<(usize, usize), usize>,
}

/// Builds the gadget for `c ≥ 1`. Whites come first, then each vertex's red
/// clique, then the blue vertices in edge order; labels equal indices.
pub fn edge_gadget(g: &Graph, c: usize) -> Result<EdgeGadget> {
    if c == 0 {
        return Err(Error::Invalid("the clique size parameter must be at least 1".into()));
    }
    let n = g.n();
    let edges = g.edges();
    let total = (c + 1) * n + edges.len();
    let mut h = Graph::empty(total);
    let mut red = VertexSet::new();
    for v in 0..n {
        let clique: Vec<usize> = std::iter::once(v).chain((0..c).map(|i| n + v * c + i)).collect();
        red.extend(&clique[1..]);
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                h.add_edge(a, b);
            }
        }
    }
    let mut blue = VertexSet::new();
    let mut subdivision = BTreeMap::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        let b = (c + 1) * n + i;
        h.add_edge(u, b);
        h.add_edge(b, v);
        blue.insert(b);
        subdivision.insert((u, v), b);
    }
    Ok(EdgeGadget {
        graph: h,
        red,
        blue,
        white: (0..n).collect(),
        subdivision,
    })
}

/// An embedding of `H` (pattern vertex ↦ host vertex index) whose image edges
/// were deleted, with the acceptance witness of the result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HModification {
    pub embedding: Vec<usize>,
    pub deleted: Vec<(usize, usize)>,
    pub witness: ThetaWitness,
}

/// Whether deleting the edges of some copy of `H` in `G` yields a model of `θ`.
/// Copies are enumerated as injective maps in lexicographic order; copies
/// with the same edge image are checked once.
pub fn h_modification_check(g: &Graph, h: &Graph, theta: &ThetaSentence) -> Result<Option<HModification>> {
    h_modification_check_with(g, h, theta, MOD_CAP)
}

pub fn h_modification_check_with(
    g: &Graph,
    h: &Graph,
    theta: &ThetaSentence,
    cap: usize,
) -> Result<Option<HModification>> {
    if g.n() > cap {
        return Err(Error::LimitExceeded {
            what: "graph for modification search",
            size: g.n(),
            limit: cap,
        });
    }
    let mut seen = BTreeSet::new();
    let mut map = Vec::with_capacity(h.n());
    let mut used = vec![false; g.n()];
    let mut found = None;
    embed(g, h, theta, &mut map, &mut used, &mut seen, &mut found)?;
    Ok(found)
}

fn embed(
    g: &Graph,
    h: &Graph,
    theta: &ThetaSentence,
    map: &mut Vec<usize>,
    used: &mut [bool],
    seen: &mut BTreeSet<Vec<(usize, usize)>>,
    found: &mut Option<HModification>,
) -> Result<()> {
    if found.is_some() {
        return Ok(());
    }
    let i = map.len();
    if i == h.n() {
        let mut deleted: Vec<(usize, usize)> = h
            .edges()
            .iter()
            .map(|&(a, b)| (map[a].min(map[b]), map[a].max(map[b])))
            .collect();
        deleted.sort();
        if !seen.insert(deleted.clone()) {
            return Ok(());
        }
        let mut rest = g.clone();
        for &(u, v) in &deleted {
            rest.remove_edge(u, v);
        }
        if let Some(witness) = model_check_theta_with(&rest.to_structure(), theta, g.n())? {
            *found = Some(HModification {
                embedding: map.clone(),
                deleted,
                witness,
            });
        }
        return Ok(());
    }
    for v in 0..g.n() {
        if used[v] || h.neighbors(i).iter().any(|&j| j < i && !g.has_edge(map[j], v)) {
            continue;
        }
        used[v] = true;
        map.push(v);
        embed(g, h, theta, map, used, seen, found)?;
        map.pop();
        used[v] = false;
    }
    Ok(())
}
