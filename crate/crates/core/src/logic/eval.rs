use std::cell::OnceCell;
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::structure::{gaifman_graph, Elem, ElemSet, Structure, EMPTY};

use super::ast::{Formula, Term};

/// Default universe cap for set quantification.
pub const SET_QUANTIFIER_CAP: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub elements: BTreeMap<String, Elem>,
    pub sets: BTreeMap<String, ElemSet>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, e: Elem) -> Self {
        self.elements.insert(var.to_string(), e);
        self
    }

    pub fn with_set(mut self, var: &str, s: ElemSet) -> Self {
        self.sets.insert(var.to_string(), s);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub set_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            set_cap: SET_QUANTIFIER_CAP,
        }
    }
}

/// `𝔄 ⊨ φ[α]`.
pub fn evaluate(a: &Structure, phi: &Formula, alpha: &Assignment) -> Result<bool> {
    evaluate_with(a, phi, alpha, EvalOptions::default())
}

pub fn evaluate_with(a: &Structure, phi: &Formula, alpha: &Assignment, opts: EvalOptions) -> Result<bool> {
    let model = Model::new(a);
    let compiled = model.compile(phi, alpha, opts)?;
    Ok(model.eval(&compiled, &mut Env::default()))
}

/// Evaluates a sentence.
pub fn holds(a: &Structure, phi: &Formula) -> Result<bool> {
    evaluate(a, phi, &Assignment::new())
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug)]
enum T {
    Slot(usize),
    Fixed(usize),
}

#[derive(Clone, Debug)]
enum C {
    True,
    False,
    Eq(T, T),
    Rel(usize, Vec<T>),
    In(T, S),
    Card(u32, S),
    Dist(T, T, usize),
    Paths(Option<usize>, Vec<T>),
    Not(Box<C>),
    And(Vec<C>),
    Or(Vec<C>),
    Implies(Box<C>, Box<C>),
    Iff(Box<C>, Box<C>),
    Exists(Box<C>),
    Forall(Box<C>),
    ExistsSet(Box<C>),
    ForallSet(Box<C>),
}

#[derive(Clone, Debug)]
enum S {
    Slot(usize),
    Fixed(Vec<bool>),
}

#[derive(Default)]
struct Env {
    fo: Vec<usize>,
    sets: Vec<Vec<bool>>,
}

struct Relation {
    arity: usize,
    flat: Vec<bool>,
    tuples: HashSet<Vec<usize>>,
}

/// A structure converted to dense indices for evaluation.
struct Model<'a> {
    s: &'a Structure,
    elems: Vec<Elem>,
    names: HashMap<&'a str, usize>,
    rels: Vec<Relation>,
    adj: Vec<Vec<usize>>,
    dist: OnceCell<Vec<Vec<usize>>>,
}

impl<'a> Model<'a> {
    fn new(s: &'a Structure) -> Self {
        let elems: Vec<Elem> = s.universe().iter().copied().collect();
        let n = elems.len();
        let idx = |e: &Elem| elems.binary_search(e).expect("tuple entry in universe");
        let mut names = HashMap::new();
        let mut rels = Vec::new();
        for (name, tuples) in s.relations() {
            let arity = s.vocabulary().arity(name).expect("declared");
            let dense: HashSet<Vec<usize>> = tuples.iter().map(|t| t.iter().map(idx).collect()).collect();
            let flat = if arity <= 2 && n <= 4096 {
                let mut f = vec![false; n.pow(arity as u32)];
                for t in &dense {
                    let k = if arity == 1 { t[0] } else { t[0] * n + t[1] };
                    f[k] = true;
                }
                f
            } else {
                Vec::new()
            };
            names.insert(name, rels.len());
            rels.push(Relation {
                arity,
                flat,
                tuples: dense,
            });
        }
        let g = gaifman_graph(s);
        let adj = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
        Model {
            s,
            elems,
            names,
            rels,
            adj,
            dist: OnceCell::new(),
        }
    }

    fn n(&self) -> usize {
        self.elems.len()
    }

    fn index(&self, e: Elem) -> Option<usize> {
        self.elems.binary_search(&e).ok()
    }

    fn distances(&self) -> &Vec<Vec<usize>> {
        self.dist.get_or_init(|| {
            let n = self.n();
            (0..n)
                .map(|s| {
                    let mut d = vec![NONE; n];
                    d[s] = 0;
                    let mut q = std::collections::VecDeque::from([s]);
                    while let Some(u) = q.pop_front() {
                        for &w in &self.adj[u] {
                            if d[w] == NONE {
                                d[w] = d[u] + 1;
                                q.push_back(w);
                            }
                        }
                    }
                    d
                })
                .collect()
        })
    }

    fn compile(&self, phi: &Formula, alpha: &Assignment, opts: EvalOptions) -> Result<C> {
        if phi.has_set_quantifier() && self.n() > opts.set_cap {
            return Err(Error::LimitExceeded {
                what: "set quantification universe",
                size: self.n(),
                limit: opts.set_cap,
            });
        }
        let mut ctx = Compile {
            m: self,
            alpha,
            fo: Vec::new(),
            sets: Vec::new(),
        };
        ctx.formula(phi)
    }

    fn eval(&self, c: &C, env: &mut Env) -> bool {
        let val = |t: &T, env: &Env| match *t {
            T::Slot(i) => env.fo[i],
            T::Fixed(v) => v,
        };
        match c {
            C::True => true,
            C::False => false,
            C::Eq(a, b) => val(a, env) == val(b, env),
            C::Rel(r, ts) => {
                let rel = &self.rels[*r];
                let vs: Vec<usize> = ts.iter().map(|t| val(t, env)).collect();
                if vs.contains(&NONE) {
                    return false;
                }
                if !rel.flat.is_empty() {
                    let k = if rel.arity == 1 {
                        vs[0]
                    } else {
                        vs[0] * self.n() + vs[1]
                    };
                    return rel.flat[k];
                }
                rel.tuples.contains(&vs)
            }
            C::In(t, s) => {
                let v = val(t, env);
                if v == NONE {
                    return false;
                }
                match s {
                    S::Slot(i) => env.sets[*i][v],
                    S::Fixed(bits) => bits[v],
                }
            }
            C::Card(p, s) => {
                let count = match s {
                    S::Slot(i) => env.sets[*i].iter().filter(|b| **b).count(),
                    S::Fixed(bits) => bits.iter().filter(|b| **b).count(),
                };
                count % *p as usize == 0
            }
            C::Dist(a, b, r) => {
                let (x, y) = (val(a, env), val(b, env));
                if x == NONE || y == NONE || x == y {
                    return true;
                }
                self.distances()[x][y] <= *r
            }
            C::Paths(s, ts) => {
                let vs: Vec<usize> = ts.iter().map(|t| val(t, env)).collect();
                self.disjoint_paths(&vs, *s)
            }
            C::Not(f) => !self.eval(f, env),
            C::And(fs) => fs.iter().all(|f| self.eval(f, env)),
            C::Or(fs) => fs.iter().any(|f| self.eval(f, env)),
            C::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            C::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            C::Exists(f) | C::Forall(f) => {
                let want = matches!(c, C::Exists(_));
                env.fo.push(0);
                let mut result = !want;
                for v in 0..self.n() {
                    *env.fo.last_mut().expect("pushed") = v;
                    if self.eval(f, env) == want {
                        result = want;
                        break;
                    }
                }
                env.fo.pop();
                result
            }
            C::ExistsSet(f) | C::ForallSet(f) => {
                let want = matches!(c, C::ExistsSet(_));
                let n = self.n();
                env.sets.push(vec![false; n]);
                let mut result = !want;
                for mask in 0u64..(1u64 << n) {
                    let bits = env.sets.last_mut().expect("pushed");
                    for (i, b) in bits.iter_mut().enumerate() {
                        *b = mask >> i & 1 == 1;
                    }
                    if self.eval(f, env) == want {
                        result = want;
                        break;
                    }
                }
                env.sets.pop();
                result
            }
        }
    }

    /// `dp_k` / `s-dp_k` on dense endpoints (`NONE` entries make it false).
    fn disjoint_paths(&self, ends: &[usize], s: Option<usize>) -> bool {
        if ends.contains(&NONE) {
            return false;
        }
        let mut sorted = ends.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ends.len() {
            return false;
        }
        let k = ends.len() / 2;
        let mut owner = vec![NONE; self.n()];
        for (i, &e) in ends.iter().enumerate() {
            owner[e] = i / 2;
        }
        if let Some(s) = s {
            let d = self.distances();
            for i in 0..ends.len() {
                for j in 0..ends.len() {
                    if i / 2 != j / 2 && d[ends[i]][ends[j]] <= s {
                        return false;
                    }
                }
            }
        }
        let mut search = PathSearch {
            m: self,
            ends,
            k,
            s,
            owner,
        };
        search.route(0)
    }
}

struct PathSearch<'m, 'a> {
    m: &'m Model<'a>,
    ends: &'m [usize],
    k: usize,
    s: Option<usize>,
    owner: Vec<usize>,
}

impl PathSearch<'_, '_> {
    fn route(&mut self, i: usize) -> bool {
        if i == self.k {
            return true;
        }
        let (x, y) = (self.ends[2 * i], self.ends[2 * i + 1]);
        self.extend(i, x, y, 0)
    }

    /// Extends path `i` from `cur`; `inner` counts interior vertices so far.
    fn extend(&mut self, i: usize, cur: usize, y: usize, inner: usize) -> bool {
        for &w in &self.m.adj[cur] {
            if w == y {
                if inner >= 1 && self.route(i + 1) {
                    return true;
                }
                continue;
            }
            if self.owner[w] != NONE || !self.far_enough(i, w) {
                continue;
            }
            self.owner[w] = i;
            if self.extend(i, w, y, inner + 1) {
                return true;
            }
            self.owner[w] = NONE;
        }
        false
    }

    fn far_enough(&self, i: usize, w: usize) -> bool {
        let Some(s) = self.s else {
            return true;
        };
        let d = &self.m.distances()[w];
        self.owner
            .iter()
            .enumerate()
            .all(|(u, &o)| o == NONE || o == i || d[u] > s)
    }
}

struct Compile<'m, 'a> {
    m: &'m Model<'a>,
    alpha: &'m Assignment,
    fo: Vec<String>,
    sets: Vec<String>,
}

impl Compile<'_, '_> {
    fn term(&self, t: &Term) -> Result<T> {
        match t {
            Term::Var(v) => {
                if let Some(i) = self.fo.iter().rposition(|b| b == v) {
                    return Ok(T::Slot(i));
                }
                if let Some(&e) = self.alpha.elements.get(v) {
                    return self.element(e).map(T::Fixed);
                }
                match self.m.s.constant(v) {
                    Some(e) => self.element(e).map(T::Fixed),
                    None => Err(Error::UnboundVariable(v.clone())),
                }
            }
            Term::Const(c) => match self.m.s.constant(c) {
                Some(e) => self.element(e).map(T::Fixed),
                None => Err(Error::UnknownSymbol(c.clone())),
            },
        }
    }

    fn element(&self, e: Elem) -> Result<usize> {
        if e == EMPTY {
            return Ok(NONE);
        }
        self.m.index(e).ok_or(Error::NotInUniverse(e))
    }

    fn set(&self, x: &str) -> Result<S> {
        if let Some(i) = self.sets.iter().rposition(|b| b == x) {
            return Ok(S::Slot(i));
        }
        match self.alpha.sets.get(x) {
            Some(set) => {
                let mut bits = vec![false; self.m.n()];
                for &e in set {
                    bits[self.element(e)?] = true;
                }
                Ok(S::Fixed(bits))
            }
            None => Err(Error::UnboundVariable(x.to_string())),
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<C> {
        Ok(match f {
            Formula::True => C::True,
            Formula::False => C::False,
            Formula::Eq(a, b) => C::Eq(self.term(a)?, self.term(b)?),
            Formula::Rel(r, ts) => {
                let &idx = self
                    .m
                    .names
                    .get(r.as_str())
                    .ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
                let arity = self.m.rels[idx].arity;
                if arity != ts.len() {
                    return Err(Error::ArityMismatch {
                        symbol: r.clone(),
                        expected: arity,
                        found: ts.len(),
                    });
                }
                C::Rel(idx, ts.iter().map(|t| self.term(t)).collect::<Result<_>>()?)
            }
            Formula::In(t, x) => C::In(self.term(t)?, self.set(x)?),
            Formula::Card(p, x) => {
                if *p < 2 {
                    return Err(Error::Invalid(format!("Card modulus {p} must exceed 1")));
                }
                C::Card(*p, self.set(x)?)
            }
            Formula::DistLeq(a, b, r) => C::Dist(self.term(a)?, self.term(b)?, *r as usize),
            Formula::Dp(ts) | Formula::Sdp(_, ts) => {
                if ts.is_empty() || ts.len() % 2 != 0 {
                    return Err(Error::Invalid("path atoms need a positive even arity".into()));
                }
                let s = match f {
                    Formula::Sdp(s, _) => Some(*s as usize),
                    _ => None,
                };
                C::Paths(s, ts.iter().map(|t| self.term(t)).collect::<Result<_>>()?)
            }
            Formula::Not(g) => C::Not(Box::new(self.formula(g)?)),
            Formula::And(fs) => C::And(fs.iter().map(|g| self.formula(g)).collect::<Result<_>>()?),
            Formula::Or(fs) => C::Or(fs.iter().map(|g| self.formula(g)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => C::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Iff(a, b) => C::Iff(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                self.fo.push(v.clone());
                let body = self.formula(g);
                self.fo.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::Exists(..)) {
                    C::Exists(body)
                } else {
                    C::Forall(body)
                }
            }
            Formula::ExistsSet(v, g) | Formula::ForallSet(v, g) => {
                self.sets.push(v.clone());
                let body = self.formula(g);
                self.sets.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::ExistsSet(..)) {
                    C::ExistsSet(body)
                } else {
                    C::ForallSet(body)
                }
            }
        })
    }
}

/// A formula compiled against one structure, reusable across assignments of
/// its free first-order variables (listed in `free` order).
pub struct Prepared<'a> {
    model: Model<'a>,
    code: C,
    arity: usize,
}

impl<'a> Prepared<'a> {
    /// Compiles `phi` with `free` as positional parameters.
    pub fn new(a: &'a Structure, phi: &Formula, free: &[&str]) -> Result<Self> {
        let wrapped = free
            .iter()
            .rev()
            .fold(phi.clone(), |f, v| Formula::Exists(v.to_string(), Box::new(f)));
        let model = Model::new(a);
        let code = strip_exists(
            model.compile(&wrapped, &Assignment::new(), EvalOptions::default())?,
            free.len(),
        );
        Ok(Prepared {
            model,
            code,
            arity: free.len(),
        })
    }

    /// Truth value with the parameters bound to `args` (universe elements).
    pub fn check(&self, args: &[Elem]) -> Result<bool> {
        assert_eq!(args.len(), self.arity);
        let fo = args
            .iter()
            .map(|&e| self.model.index(e).ok_or(Error::NotInUniverse(e)))
            .collect::<Result<Vec<_>>>()?;
        let mut env = Env { fo, sets: Vec::new() };
        Ok(self.model.eval(&self.code, &mut env))
    }
}

fn strip_exists(c: C, k: usize) -> C {
    if k == 0 {
        return c;
    }
    match c {
        C::Exists(b) => strip_exists(*b, k - 1),
        _ => unreachable!("wrapped in exists"),
    }
}
