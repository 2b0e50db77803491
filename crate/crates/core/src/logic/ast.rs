use std::collections::BTreeSet;
use std::fmt;

/// A first-order term: a variable or a constant symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

/// Formulas of first-order and monadic second-order logic with counting,
/// distance and disjoint-path atoms.
///
/// Set variables are identifiers starting with an upper-case letter; first-order
/// variables start with a lower-case letter or `_`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// `(t₁, …, t_r) ∈ R`
    Rel(String, Vec<Term>),
    /// `t ∈ X` for a set variable `X`
    In(Term, String),
    /// `|X| ≡ 0 (mod p)`, `p > 1`
    Card(u32, String),
    /// `d(t₁, t₂) ≤ r` in the Gaifman graph
    DistLeq(Term, Term, u32),
    /// `dp_k(x₁, y₁, …, x_k, y_k)`
    Dp(Vec<Term>),
    /// `s-dp_k(x₁, y₁, …, x_k, y_k)`
    Sdp(u32, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

pub fn is_set_variable(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

impl Formula {
    /// Conjunction that drops `true`, collapses on `false`, splices nested
    /// conjunctions and unwraps singletons.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().expect("one element"),
            _ => Formula::And(out),
        }
    }

    /// Disjunction that drops `false`, collapses on `true`, splices nested
    /// disjunctions and unwraps singletons.
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().expect("one element"),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `∃v φ`, choosing the set or element quantifier from the variable's case.
    pub fn exists(v: &str, f: Formula) -> Formula {
        if is_set_variable(v) {
            Formula::ExistsSet(v.to_string(), Box::new(f))
        } else {
            Formula::Exists(v.to_string(), Box::new(f))
        }
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        if is_set_variable(v) {
            Formula::ForallSet(v.to_string(), Box::new(f))
        } else {
            Formula::Forall(v.to_string(), Box::new(f))
        }
    }

    /// Relation atom over variables.
    pub fn rel(name: &str, vars: &[&str]) -> Formula {
        Formula::Rel(name.to_string(), vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Eq(Term::var(a), Term::var(b))
    }

    /// Free first-order and set variables.
    pub fn free_variables(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut fo = BTreeSet::new();
        let mut so = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut fo, &mut so);
        (fo, so)
    }

    fn collect_free(&self, bound: &mut Vec<String>, fo: &mut BTreeSet<String>, so: &mut BTreeSet<String>) {
        let term = |t: &Term, bound: &Vec<String>, fo: &mut BTreeSet<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    fo.insert(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::DistLeq(a, b, _) => {
                term(a, bound, fo);
                term(b, bound, fo);
            }
            Formula::Rel(_, ts) | Formula::Dp(ts) | Formula::Sdp(_, ts) => {
                for t in ts {
                    term(t, bound, fo);
                }
            }
            Formula::In(t, x) => {
                term(t, bound, fo);
                if !bound.contains(x) {
                    so.insert(x.clone());
                }
            }
            Formula::Card(_, x) => {
                if !bound.contains(x) {
                    so.insert(x.clone());
                }
            }
            Formula::Not(f) => f.collect_free(bound, fo, so),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, fo, so);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, fo, so);
                b.collect_free(bound, fo, so);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) | Formula::ExistsSet(v, f) | Formula::ForallSet(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, fo, so);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        let (fo, so) = self.free_variables();
        fo.is_empty() && so.is_empty()
    }

    /// No set quantifiers, set membership or cardinality atoms.
    pub fn is_first_order(&self) -> bool {
        self.all_nodes(&mut |f| {
            !matches!(
                f,
                Formula::In(..) | Formula::Card(..) | Formula::ExistsSet(..) | Formula::ForallSet(..)
            )
        })
    }

    /// Whether any disjoint-path atom occurs.
    pub fn uses_paths(&self) -> bool {
        !self.all_nodes(&mut |f| !matches!(f, Formula::Dp(_) | Formula::Sdp(..)))
    }

    pub fn has_set_quantifier(&self) -> bool {
        !self.all_nodes(&mut |f| !matches!(f, Formula::ExistsSet(..) | Formula::ForallSet(..)))
    }

    fn all_nodes(&self, pred: &mut dyn FnMut(&Formula) -> bool) -> bool {
        if !pred(self) {
            return false;
        }
        match self {
            Formula::Not(f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::ExistsSet(_, f)
            | Formula::ForallSet(_, f) => f.all_nodes(pred),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.all_nodes(pred)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.all_nodes(pred) && b.all_nodes(pred),
            _ => true,
        }
    }

    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_rank).max().unwrap_or(0),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            Formula::Exists(_, f) | Formula::Forall(_, f) | Formula::ExistsSet(_, f) | Formula::ForallSet(_, f) => {
                1 + f.quantifier_rank()
            }
            _ => 0,
        }
    }

    /// Relation symbols with the arities they are used at.
    pub fn relation_symbols(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.all_nodes(&mut |f| {
            if let Formula::Rel(r, ts) = f {
                out.insert((r.clone(), ts.len()));
            }
            true
        });
        out
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.all_nodes(&mut |f| {
            match f {
                Formula::Eq(a, b) | Formula::DistLeq(a, b, _) => {
                    out.insert(a.name().to_string());
                    out.insert(b.name().to_string());
                }
                Formula::Rel(_, ts) | Formula::Dp(ts) | Formula::Sdp(_, ts) => {
                    out.extend(ts.iter().map(|t| t.name().to_string()));
                }
                Formula::In(t, x) => {
                    out.insert(t.name().to_string());
                    out.insert(x.clone());
                }
                Formula::Card(_, x) => {
                    out.insert(x.clone());
                }
                Formula::Exists(v, _) | Formula::Forall(v, _) | Formula::ExistsSet(v, _) | Formula::ForallSet(v, _) => {
                    out.insert(v.clone());
                }
                _ => {}
            }
            true
        });
        out
    }

    /// Replaces free occurrences of the first-order variable `from` by `to`.
    /// `to` must not be bound inside the formula.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        let t = |x: &Term| match x {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            other => other.clone(),
        };
        let rec = |f: &Formula| Box::new(f.rename_free(from, to));
        match self {
            Formula::True | Formula::False | Formula::Card(..) => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
            Formula::DistLeq(a, b, r) => Formula::DistLeq(t(a), t(b), *r),
            Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(t).collect()),
            Formula::Dp(ts) => Formula::Dp(ts.iter().map(t).collect()),
            Formula::Sdp(s, ts) => Formula::Sdp(*s, ts.iter().map(t).collect()),
            Formula::In(x, s) => Formula::In(t(x), s.clone()),
            Formula::Not(f) => Formula::Not(rec(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_free(from, to)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_free(from, to)).collect()),
            Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
            Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
            Formula::Exists(v, _) | Formula::Forall(v, _) if v == from => self.clone(),
            Formula::Exists(v, f) => Formula::Exists(v.clone(), rec(f)),
            Formula::Forall(v, f) => Formula::Forall(v.clone(), rec(f)),
            Formula::ExistsSet(v, f) => Formula::ExistsSet(v.clone(), rec(f)),
            Formula::ForallSet(v, f) => Formula::ForallSet(v.clone(), rec(f)),
        }
    }

    /// Relativizes every quantifier to the `r`-ball around the variable `center`.
    pub fn relativize(&self, center: &str, r: u32) -> Formula {
        let c = Term::var(center);
        let rec = |f: &Formula| f.relativize(center, r);
        match self {
            Formula::Not(f) => Formula::not(rec(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(rec).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(rec).collect()),
            Formula::Implies(a, b) => Formula::implies(rec(a), rec(b)),
            Formula::Iff(a, b) => Formula::Iff(Box::new(rec(a)), Box::new(rec(b))),
            Formula::Exists(v, f) => Formula::Exists(
                v.clone(),
                Box::new(Formula::And(vec![Formula::DistLeq(c, Term::var(v), r), rec(f)])),
            ),
            Formula::Forall(v, f) => Formula::Forall(
                v.clone(),
                Box::new(Formula::implies(Formula::DistLeq(c, Term::var(v), r), rec(f))),
            ),
            Formula::ExistsSet(v, f) | Formula::ForallSet(v, f) => {
                let y = fresh_name("y", &self.variable_names());
                let inside = Formula::Forall(
                    y.clone(),
                    Box::new(Formula::implies(
                        Formula::In(Term::var(&y), v.clone()),
                        Formula::DistLeq(c, Term::var(&y), r),
                    )),
                );
                if matches!(self, Formula::ExistsSet(..)) {
                    Formula::ExistsSet(v.clone(), Box::new(Formula::And(vec![inside, rec(f)])))
                } else {
                    Formula::ForallSet(v.clone(), Box::new(Formula::implies(inside, rec(f))))
                }
            }
            atom => atom.clone(),
        }
    }
}

/// `base`, or `base` followed by primes rendered as `_`, not in `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

// Printing precedence: larger binds tighter.
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_UNARY: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => P_IFF,
        Formula::Implies(..) => P_IMP,
        Formula::Or(_) => P_OR,
        Formula::And(_) => P_AND,
        Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsSet(..) | Formula::ForallSet(..) => 0,
        _ => P_UNARY,
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, ts: &[Term]) -> fmt::Result {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", t.name())?;
    }
    Ok(())
}

impl Formula {
    /// Writes `self`, parenthesized unless its precedence is at least `min`.
    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if prec(self) < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "{} = {}", a.name(), b.name()),
            Formula::Rel(r, ts) => {
                write!(f, "{r}(")?;
                write_terms(f, ts)?;
                write!(f, ")")
            }
            Formula::In(t, x) => write!(f, "{} in {x}", t.name()),
            Formula::Card(p, x) => write!(f, "Card{p}({x})"),
            Formula::DistLeq(a, b, r) => write!(f, "dist<={r}({},{})", a.name(), b.name()),
            Formula::Dp(ts) => {
                write!(f, "dp{}(", ts.len() / 2)?;
                write_terms(f, ts)?;
                write!(f, ")")
            }
            Formula::Sdp(s, ts) => {
                write!(f, "sdp{s},{}(", ts.len() / 2)?;
                write_terms(f, ts)?;
                write!(f, ")")
            }
            Formula::Not(g) => {
                write!(f, "not ")?;
                g.write_at(f, P_UNARY)
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let (op, p) = if matches!(self, Formula::And(_)) {
                    ("and", P_AND)
                } else {
                    ("or", P_OR)
                };
                if fs.is_empty() {
                    return write!(f, "{}", if p == P_AND { "true" } else { "false" });
                }
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {op} ")?;
                    }
                    g.write_at(f, p + 1)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                a.write_at(f, P_IMP + 1)?;
                write!(f, " -> ")?;
                b.write_at(f, P_IMP)
            }
            Formula::Iff(a, b) => {
                a.write_at(f, P_IFF)?;
                write!(f, " <-> ")?;
                b.write_at(f, P_IFF + 1)
            }
            Formula::Exists(v, g) | Formula::ExistsSet(v, g) => {
                write!(f, "exists {v}. ")?;
                g.write_at(f, 0)
            }
            Formula::Forall(v, g) | Formula::ForallSet(v, g) => {
                write!(f, "forall {v}. ")?;
                g.write_at(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
