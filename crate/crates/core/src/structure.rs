//! Finite relational structures over a vocabulary of relation and constant symbols.
//!
//! Elements are opaque `u32` ids. The empty interpretation of a constant is the
//! sentinel [`EMPTY`], which never belongs to a universe and never occurs in a tuple.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type Elem = u32;

/// The sentinel standing for an uninterpreted constant.
pub const EMPTY: Elem = Elem::MAX;

pub type Tuple = Vec<Elem>;
pub type ElemSet = BTreeSet<Elem>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    relations: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// The vocabulary `{E}` of graphs.
    pub fn graph() -> Self {
        Self::new().with_relation("E", 2).expect("fresh vocabulary")
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Vocabulary(format!("relation `{name}` has arity 0")));
        }
        if self.constants.contains(name) {
            return Err(Error::Vocabulary(format!("`{name}` is already a constant")));
        }
        match self.relations.get(name) {
            Some(&a) if a != arity => Err(Error::Vocabulary(format!(
                "relation `{name}` redeclared with arity {arity}, was {a}"
            ))),
            _ => {
                self.relations.insert(name.to_string(), arity);
                Ok(self)
            }
        }
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self> {
        if self.relations.contains_key(name) {
            return Err(Error::Vocabulary(format!("`{name}` is already a relation")));
        }
        self.constants.insert(name.to_string());
        Ok(self)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.iter().map(String::as_str)
    }

    pub fn has_constants(&self) -> bool {
        !self.constants.is_empty()
    }

    /// Drops a symbol if present.
    pub fn without(&self, name: &str) -> Self {
        let mut v = self.clone();
        v.relations.remove(name);
        v.constants.remove(name);
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    vocab: Vocabulary,
    universe: ElemSet,
    relations: BTreeMap<String, BTreeSet<Tuple>>,
    constants: BTreeMap<String, Elem>,
    labels: BTreeMap<Elem, String>,
}

impl Structure {
    /// A structure with empty relations and every constant interpreted as ∅.
    pub fn new(vocab: Vocabulary, universe: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let universe: ElemSet = universe.into_iter().collect();
        if universe.contains(&EMPTY) {
            return Err(Error::Invalid("the ∅ sentinel cannot be an element".into()));
        }
        let relations = vocab
            .relations()
            .map(|(n, _)| (n.to_string(), BTreeSet::new()))
            .collect();
        let constants = vocab.constants().map(|c| (c.to_string(), EMPTY)).collect();
        Ok(Structure {
            vocab,
            universe,
            relations,
            constants,
            labels: BTreeMap::new(),
        })
    }

    pub fn with_tuple(mut self, rel: &str, tuple: Tuple) -> Result<Self> {
        self.insert_tuple(rel, tuple)?;
        Ok(self)
    }

    pub fn with_tuples<I>(mut self, rel: &str, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        for t in tuples {
            self.insert_tuple(rel, t)?;
        }
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str, value: Elem) -> Result<Self> {
        if !self.vocab.has_constant(name) {
            return Err(Error::UnknownSymbol(name.to_string()));
        }
        if value != EMPTY && !self.universe.contains(&value) {
            return Err(Error::NotInUniverse(value));
        }
        self.constants.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn with_label(mut self, e: Elem, label: &str) -> Result<Self> {
        if !self.universe.contains(&e) {
            return Err(Error::NotInUniverse(e));
        }
        self.labels.insert(e, label.to_string());
        Ok(self)
    }

    fn insert_tuple(&mut self, rel: &str, tuple: Tuple) -> Result<()> {
        let arity = self
            .vocab
            .arity(rel)
            .ok_or_else(|| Error::UnknownSymbol(rel.to_string()))?;
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: rel.to_string(),
                expected: arity,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|e| !self.universe.contains(e)) {
            return Err(Error::NotInUniverse(bad));
        }
        self.relations.get_mut(rel).expect("declared").insert(tuple);
        Ok(())
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn universe(&self) -> &ElemSet {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.universe.contains(&e)
    }

    /// Tuples of a relation; empty for unknown symbols.
    pub fn relation(&self, name: &str) -> &BTreeSet<Tuple> {
        static NONE: BTreeSet<Tuple> = BTreeSet::new();
        self.relations.get(name).unwrap_or(&NONE)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &BTreeSet<Tuple>)> {
        self.relations.iter().map(|(n, t)| (n.as_str(), t))
    }

    /// Interpretation of a constant, [`EMPTY`] for ∅.
    pub fn constant(&self, name: &str) -> Option<Elem> {
        self.constants.get(name).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = (&str, Elem)> {
        self.constants.iter().map(|(n, &e)| (n.as_str(), e))
    }

    pub fn label(&self, e: Elem) -> Option<&str> {
        self.labels.get(&e).map(String::as_str)
    }

    /// Same structure over a smaller vocabulary.
    pub fn restrict_vocabulary(&self, drop: &str) -> Structure {
        let mut s = self.clone();
        s.vocab = s.vocab.without(drop);
        s.relations.remove(drop);
        s.constants.remove(drop);
        s
    }

    /// Adds (or replaces) a unary relation interpreted by `set`.
    pub fn with_unary(&self, name: &str, set: &ElemSet) -> Result<Structure> {
        let mut s = self.clone();
        s.vocab = s.vocab.without(name).with_relation(name, 1)?;
        s.relations.insert(name.to_string(), BTreeSet::new());
        for &e in set {
            s.insert_tuple(name, vec![e])?;
        }
        Ok(s)
    }

    /// Elements of a unary relation.
    pub fn unary_set(&self, name: &str) -> ElemSet {
        self.relation(name).iter().map(|t| t[0]).collect()
    }

    /// Parses the line-based text format:
    ///
    /// ```text
    /// vocab E/2 P/1 const c
    /// universe 4          # elements 0..3; or `elements 0 5 9`
    /// rel E 0 1
    /// const c 2           # or `const c null`
    /// label 0 root
    /// ```
    pub fn parse(text: &str) -> Result<Structure> {
        let mut vocab: Option<Vocabulary> = None;
        let mut s: Option<Structure> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fail = |m: &str| Error::Format {
                line: line_no,
                message: m.to_string(),
            };
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or("");
            let rest: Vec<&str> = words.collect();
            match head {
                "vocab" => {
                    if vocab.is_some() {
                        return Err(fail("duplicate vocab line"));
                    }
                    let mut v = Vocabulary::new();
                    let mut consts = false;
                    for w in rest {
                        if w == "const" {
                            consts = true;
                        } else if consts {
                            v = v.with_constant(w).map_err(|e| fail(&e.to_string()))?;
                        } else {
                            let (name, ar) = w.split_once('/').ok_or_else(|| fail("expected NAME/ARITY"))?;
                            let ar: usize = ar.parse().map_err(|_| fail("bad arity"))?;
                            v = v.with_relation(name, ar).map_err(|e| fail(&e.to_string()))?;
                        }
                    }
                    vocab = Some(v);
                }
                "universe" | "elements" => {
                    let v = vocab.clone().ok_or_else(|| fail("universe before vocab"))?;
                    if s.is_some() {
                        return Err(fail("duplicate universe line"));
                    }
                    let elems: Vec<Elem> = if head == "universe" {
                        if rest.len() != 1 {
                            return Err(fail("expected `universe N`"));
                        }
                        let n: Elem = rest[0].parse().map_err(|_| fail("bad size"))?;
                        (0..n).collect()
                    } else {
                        rest.iter()
                            .map(|w| w.parse::<Elem>().map_err(|_| fail("bad element")))
                            .collect::<Result<_>>()?
                    };
                    s = Some(Structure::new(v, elems).map_err(|e| fail(&e.to_string()))?);
                }
                "rel" => {
                    let cur = s.take().ok_or_else(|| fail("rel before universe"))?;
                    let (name, args) = rest.split_first().ok_or_else(|| fail("missing relation name"))?;
                    let t: Tuple = args
                        .iter()
                        .map(|w| w.parse::<Elem>().map_err(|_| fail("bad element")))
                        .collect::<Result<_>>()?;
                    s = Some(cur.with_tuple(name, t).map_err(|e| fail(&e.to_string()))?);
                }
                "const" => {
                    let cur = s.take().ok_or_else(|| fail("const before universe"))?;
                    if rest.len() != 2 {
                        return Err(fail("expected `const NAME ELEMENT|null`"));
                    }
                    let val = if rest[1] == "null" {
                        EMPTY
                    } else {
                        rest[1].parse().map_err(|_| fail("bad element"))?
                    };
                    s = Some(cur.with_constant(rest[0], val).map_err(|e| fail(&e.to_string()))?);
                }
                "label" => {
                    let cur = s.take().ok_or_else(|| fail("label before universe"))?;
                    if rest.len() != 2 {
                        return Err(fail("expected `label ELEMENT TEXT`"));
                    }
                    let e: Elem = rest[0].parse().map_err(|_| fail("bad element"))?;
                    s = Some(cur.with_label(e, rest[1]).map_err(|e| fail(&e.to_string()))?);
                }
                _ => return Err(fail(&format!("unknown directive `{head}`"))),
            }
        }
        s.ok_or(Error::Format {
            line: 0,
            message: "missing universe".into(),
        })
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vocab")?;
        for (n, a) in self.vocab.relations() {
            write!(f, " {n}/{a}")?;
        }
        if self.vocab.has_constants() {
            write!(f, " const")?;
            for c in self.vocab.constants() {
                write!(f, " {c}")?;
            }
        }
        writeln!(f)?;
        let n = self.universe.len() as Elem;
        if self.universe.iter().copied().eq(0..n) {
            writeln!(f, "universe {n}")?;
        } else {
            write!(f, "elements")?;
            for e in &self.universe {
                write!(f, " {e}")?;
            }
            writeln!(f)?;
        }
        for (name, tuples) in &self.relations {
            for t in tuples {
                write!(f, "rel {name}")?;
                for e in t {
                    write!(f, " {e}")?;
                }
                writeln!(f)?;
            }
        }
        for (c, &v) in &self.constants {
            if v == EMPTY {
                writeln!(f, "const {c} null")?;
            } else {
                writeln!(f, "const {c} {v}")?;
            }
        }
        for (e, l) in &self.labels {
            writeln!(f, "label {e} {l}")?;
        }
        Ok(())
    }
}

/// An annotated structure: a base structure with named subsets of its universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedStructure {
    base: Structure,
    annotations: BTreeMap<String, ElemSet>,
}

impl AnnotatedStructure {
    pub fn new(base: Structure) -> Self {
        AnnotatedStructure {
            base,
            annotations: BTreeMap::new(),
        }
    }

    pub fn with_annotation(mut self, name: &str, set: ElemSet) -> Result<Self> {
        if let Some(&bad) = set.iter().find(|e| !self.base.contains(**e)) {
            return Err(Error::NotInUniverse(bad));
        }
        self.annotations.insert(name.to_string(), set);
        Ok(self)
    }

    pub fn base(&self) -> &Structure {
        &self.base
    }

    pub fn annotation(&self, name: &str) -> Option<&ElemSet> {
        self.annotations.get(name)
    }

    pub fn annotations(&self) -> impl Iterator<Item = (&str, &ElemSet)> {
        self.annotations.iter().map(|(n, s)| (n.as_str(), s))
    }

    /// Flattens the annotations into unary relations of the same names.
    pub fn to_structure(&self) -> Result<Structure> {
        let mut s = self.base.clone();
        for (n, set) in &self.annotations {
            s = s.with_unary(n, set)?;
        }
        Ok(s)
    }
}

/// Gaifman graph: vertices are the universe (in increasing order, labelled by
/// element id), two distinct elements adjacent iff they share a tuple.
pub fn gaifman_graph(a: &Structure) -> Graph {
    let elems: Vec<Elem> = a.universe.iter().copied().collect();
    let mut g = Graph::with_labels(elems.clone());
    let idx = |e: Elem| elems.binary_search(&e).expect("tuple entry in universe");
    for tuples in a.relations.values() {
        for t in tuples {
            for (i, &x) in t.iter().enumerate() {
                for &y in &t[i + 1..] {
                    if x != y {
                        g.add_edge(idx(x), idx(y));
                    }
                }
            }
        }
    }
    g
}

/// `𝔄[S]`: relations restricted to `S`, constants outside `S` become ∅.
pub fn induced_substructure(a: &Structure, s: &ElemSet) -> Result<Structure> {
    if let Some(&bad) = s.iter().find(|e| !a.contains(**e)) {
        return Err(Error::NotInUniverse(bad));
    }
    let relations = a
        .relations
        .iter()
        .map(|(n, ts)| {
            let kept = ts.iter().filter(|t| t.iter().all(|e| s.contains(e))).cloned().collect();
            (n.clone(), kept)
        })
        .collect();
    let constants = a
        .constants
        .iter()
        .map(|(n, &v)| (n.clone(), if s.contains(&v) { v } else { EMPTY }))
        .collect();
    let labels = a
        .labels
        .iter()
        .filter(|(e, _)| s.contains(e))
        .map(|(e, l)| (*e, l.clone()))
        .collect();
    Ok(Structure {
        vocab: a.vocab.clone(),
        universe: s.clone(),
        relations,
        constants,
        labels,
    })
}

/// Disjoint union. Elements of `b` keep their ids when the universes are
/// disjoint; otherwise they are renumbered past the largest element of `a`.
/// Two non-∅ interpretations of a constant always conflict.
pub fn disjoint_union(a: &Structure, b: &Structure) -> Result<Structure> {
    if a.vocab != b.vocab {
        return Err(Error::Invalid("disjoint union needs equal vocabularies".into()));
    }
    let overlap = a.universe.iter().any(|e| b.universe.contains(e));
    let base = a.universe.iter().next_back().map_or(0, |m| m + 1);
    let map: BTreeMap<Elem, Elem> = b
        .universe
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, if overlap { base + i as Elem } else { e }))
        .collect();
    let mut out = a.clone();
    out.universe.extend(map.values().copied());
    for (n, ts) in &b.relations {
        let dst = out.relations.get_mut(n).expect("same vocabulary");
        for t in ts {
            dst.insert(t.iter().map(|e| map[e]).collect());
        }
    }
    for (n, &v) in &b.constants {
        let cur = out.constants[n];
        if v == EMPTY {
            continue;
        }
        if cur != EMPTY {
            return Err(Error::ConstantConflict(n.clone()));
        }
        out.constants.insert(n.clone(), map[&v]);
    }
    for (e, l) in &b.labels {
        out.labels.insert(map[e], l.clone());
    }
    Ok(out)
}

/// Default universe limit of [`is_isomorphic`].
pub const ISOMORPHISM_LIMIT: usize = 12;

/// Isomorphism test by permutation search with degree pruning; returns a witness
/// bijection from `a`'s universe to `b`'s (∅ maps to ∅ implicitly).
pub fn is_isomorphic(a: &Structure, b: &Structure) -> Result<Option<BTreeMap<Elem, Elem>>> {
    is_isomorphic_with_limit(a, b, ISOMORPHISM_LIMIT)
}

pub fn is_isomorphic_with_limit(a: &Structure, b: &Structure, limit: usize) -> Result<Option<BTreeMap<Elem, Elem>>> {
    for s in [a, b] {
        if s.len() > limit {
            return Err(Error::LimitExceeded {
                what: "isomorphism universe",
                size: s.len(),
                limit,
            });
        }
    }
    if a.vocab != b.vocab || a.len() != b.len() {
        return Ok(None);
    }
    for (n, ts) in &a.relations {
        if ts.len() != b.relations[n].len() {
            return Ok(None);
        }
    }
    let ea: Vec<Elem> = a.universe.iter().copied().collect();
    let eb: Vec<Elem> = b.universe.iter().copied().collect();
    let sig_a = signatures(a, &ea);
    let sig_b = signatures(b, &eb);
    let mut sa = sig_a.clone();
    let mut sb = sig_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(None);
    }
    // Constants force parts of the bijection.
    let mut forced: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, &va) in &a.constants {
        let vb = b.constants[c];
        match (va == EMPTY, vb == EMPTY) {
            (true, true) => {}
            (false, false) => {
                let ia = ea.binary_search(&va).expect("in universe");
                let ib = eb.binary_search(&vb).expect("in universe");
                if forced.get(&ia).is_some_and(|&x| x != ib) {
                    return Ok(None);
                }
                forced.insert(ia, ib);
            }
            _ => return Ok(None),
        }
    }
    let n = ea.len();
    let mut search = IsoSearch {
        a,
        b,
        ea: &ea,
        eb: &eb,
        sig_a: &sig_a,
        sig_b: &sig_b,
        forced: &forced,
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if search.go(0) {
        Ok(Some((0..n).map(|i| (ea[i], eb[search.map[i]])).collect()))
    } else {
        Ok(None)
    }
}

fn signatures(s: &Structure, elems: &[Elem]) -> Vec<Vec<usize>> {
    let g = gaifman_graph(s);
    elems
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut sig = vec![g.degree(i)];
            for ts in s.relations.values() {
                let arity = ts.iter().next().map_or(0, |t| t.len());
                for pos in 0..arity {
                    sig.push(ts.iter().filter(|t| t[pos] == *e).count());
                }
            }
            sig
        })
        .collect()
}

struct IsoSearch<'a> {
    a: &'a Structure,
    b: &'a Structure,
    ea: &'a [Elem],
    eb: &'a [Elem],
    sig_a: &'a [Vec<usize>],
    sig_b: &'a [Vec<usize>],
    forced: &'a BTreeMap<usize, usize>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn go(&mut self, i: usize) -> bool {
        if i == self.ea.len() {
            return true;
        }
        let candidates: Vec<usize> = match self.forced.get(&i) {
            Some(&j) => vec![j],
            None => (0..self.eb.len()).collect(),
        };
        for j in candidates {
            if self.used[j] || self.sig_a[i] != self.sig_b[j] {
                continue;
            }
            if self.forced.iter().any(|(&fa, &fb)| fb == j && fa != i) {
                continue;
            }
            self.map[i] = j;
            self.used[j] = true;
            if self.consistent(i) && self.go(i + 1) {
                return true;
            }
            self.used[j] = false;
            self.map[i] = usize::MAX;
        }
        false
    }

    /// Checks every tuple whose entries are all mapped and include element `i`.
    fn consistent(&self, i: usize) -> bool {
        let pos = |e: Elem| self.ea.binary_search(&e).expect("in universe");
        for (n, ts) in &self.a.relations {
            let tb = &self.b.relations[n];
            for t in ts {
                if !t.contains(&self.ea[i]) {
                    continue;
                }
                let mut img = Vec::with_capacity(t.len());
                let mut complete = true;
                for &e in t {
                    let m = self.map[pos(e)];
                    if m == usize::MAX {
                        complete = false;
                        break;
                    }
                    img.push(self.eb[m]);
                }
                if complete && !tb.contains(&img) {
                    return false;
                }
            }
        }
        true
    }
}
