//! Exact treewidth and treedepth, tree decompositions and brambles.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::structure::{gaifman_graph, Structure};

/// Default vertex bound for [`treewidth_exact`] and [`treedepth_exact`].
pub const TREEWIDTH_LIMIT: usize = 20;
/// Default vertex bound for [`max_bramble_order`].
pub const BRAMBLE_LIMIT: usize = 7;

/// A rooted tree given by parent links, with one bag per node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<VertexSet>,
    pub parent: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdViolation {
    NotATree(String),
    UnknownVertex(usize),
    UncoveredVertex(usize),
    UncoveredEdge(usize, usize),
    DisconnectedTrace(usize),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree(m) => write!(f, "decomposition tree is malformed: {m}"),
            TdViolation::UnknownVertex(v) => write!(f, "bag mentions unknown vertex {v}"),
            TdViolation::UncoveredVertex(v) => write!(f, "vertex {v} is in no bag"),
            TdViolation::UncoveredEdge(u, v) => write!(f, "edge {{{u}, {v}}} is in no bag"),
            TdViolation::DisconnectedTrace(v) => write!(f, "bags containing {v} are not connected"),
        }
    }
}

impl TreeDecomposition {
    pub fn single_bag(g: &Graph) -> Self {
        TreeDecomposition {
            bags: vec![(0..g.n()).collect()],
            parent: vec![None],
        }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// `max |χ(t)| − 1`, and 0 when there are no non-empty bags.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Tree edges as `(child, parent)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
            .collect()
    }

    /// Checks the decomposition against `g`; an empty list means valid.
    pub fn validate(&self, g: &Graph) -> Vec<TdViolation> {
        let mut out = Vec::new();
        let m = self.bags.len();
        if self.parent.len() != m {
            out.push(TdViolation::NotATree(format!(
                "{} bags but {} parent links",
                m,
                self.parent.len()
            )));
            return out;
        }
        if let Some(msg) = self.tree_defect() {
            out.push(TdViolation::NotATree(msg));
            return out;
        }
        let mut bad = VertexSet::new();
        for bag in &self.bags {
            for &v in bag {
                if v >= g.n() {
                    bad.insert(v);
                }
            }
        }
        out.extend(bad.into_iter().map(TdViolation::UnknownVertex));
        for v in 0..g.n() {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                out.push(TdViolation::UncoveredVertex(v));
            }
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                out.push(TdViolation::UncoveredEdge(u, v));
            }
        }
        for v in 0..g.n() {
            // A non-empty trace is connected iff exactly one of its nodes has
            // a parent outside it.
            let tops = (0..m)
                .filter(|&t| self.bags[t].contains(&v) && self.parent[t].is_none_or(|p| !self.bags[p].contains(&v)))
                .count();
            if tops > 1 {
                out.push(TdViolation::DisconnectedTrace(v));
            }
        }
        out
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        self.validate(g).is_empty()
    }

    fn tree_defect(&self) -> Option<String> {
        let m = self.bags.len();
        if m == 0 {
            return None;
        }
        let roots = self.parent.iter().filter(|p| p.is_none()).count();
        if roots != 1 {
            return Some(format!("{roots} roots"));
        }
        for t in 0..m {
            let mut cur = t;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                if p >= m {
                    return Some(format!("node {cur} has unknown parent {p}"));
                }
                cur = p;
                steps += 1;
                if steps > m {
                    return Some(format!("node {t} lies on a cycle"));
                }
            }
        }
        None
    }

    /// Text form: `s td <bags> <max bag size> <vertices>`, then
    /// `b <i> <v>...` per bag and `<i> <j>` per tree edge, all 1-based.
    pub fn to_td_string(&self, n: usize) -> String {
        let mut s = format!(
            "s td {} {} {}\n",
            self.bags.len(),
            self.bags.iter().map(|b| b.len()).max().unwrap_or(0),
            n
        );
        for (i, bag) in self.bags.iter().enumerate() {
            s.push_str(&format!("b {}", i + 1));
            for v in bag {
                s.push_str(&format!(" {}", v + 1));
            }
            s.push('\n');
        }
        for (c, p) in self.edges() {
            s.push_str(&format!("{} {}\n", p + 1, c + 1));
        }
        s
    }

    /// Parses [`TreeDecomposition::to_td_string`] output; the tree is rooted
    /// at the first bag. Returns the decomposition and the vertex count.
    pub fn parse_td(text: &str) -> Result<(TreeDecomposition, usize)> {
        let err = |line: usize, message: String| Error::Format { line, message };
        let mut header = None;
        let mut bags: Vec<Option<VertexSet>> = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() || toks[0] == "c" {
                continue;
            }
            let nums = |ts: &[&str]| -> Result<Vec<usize>> {
                ts.iter()
                    .map(|t| t.parse::<usize>().map_err(|_| err(line, format!("bad number `{t}`"))))
                    .collect()
            };
            match toks[0] {
                "s" => {
                    if toks.len() != 5 || toks[1] != "td" || header.is_some() {
                        return Err(err(line, "malformed header".into()));
                    }
                    let h = nums(&toks[2..])?;
                    bags = vec![None; h[0]];
                    header = Some((h[0], h[2]));
                }
                "b" => {
                    let (m, n) = header.ok_or_else(|| err(line, "bag before header".into()))?;
                    let v = nums(&toks[1..])?;
                    let id = *v.first().ok_or_else(|| err(line, "bag without id".into()))?;
                    if id == 0 || id > m || bags[id - 1].is_some() {
                        return Err(err(line, format!("bad bag id {id}")));
                    }
                    let mut bag = VertexSet::new();
                    for &x in &v[1..] {
                        if x == 0 || x > n {
                            return Err(err(line, format!("vertex {x} out of range")));
                        }
                        bag.insert(x - 1);
                    }
                    bags[id - 1] = Some(bag);
                }
                _ => {
                    let (m, _) = header.ok_or_else(|| err(line, "edge before header".into()))?;
                    let v = nums(&toks)?;
                    if v.len() != 2 || v.iter().any(|&x| x == 0 || x > m) {
                        return Err(err(line, "malformed tree edge".into()));
                    }
                    edges.push((v[0] - 1, v[1] - 1));
                }
            }
        }
        let (m, n) = header.ok_or_else(|| err(0, "missing header".into()))?;
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| err(0, format!("bag {} missing", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if m > 0 && edges.len() != m - 1 {
            return Err(err(0, format!("{} tree edges for {} bags", edges.len(), m)));
        }
        let mut adj = vec![Vec::new(); m];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; m];
        let mut seen = vec![false; m];
        let mut stack = Vec::new();
        if m > 0 {
            seen[0] = true;
            stack.push(0);
        }
        while let Some(t) = stack.pop() {
            for &u in &adj[t] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(t);
                    stack.push(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(err(0, "tree edges do not connect all bags".into()));
        }
        Ok((TreeDecomposition { bags, parent }, n))
    }
}

fn check_limit(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::LimitExceeded { what, size, limit })
    } else {
        Ok(())
    }
}

fn neighborhood(adj: &[u64], set: u64) -> u64 {
    let mut out = 0;
    let mut s = set;
    while s != 0 {
        out |= adj[s.trailing_zeros() as usize];
        s &= s - 1;
    }
    out
}

fn flood(adj: &[u64], start: u64, within: u64) -> u64 {
    let mut seen = start;
    let mut frontier = start;
    while frontier != 0 {
        let next = neighborhood(adj, frontier) & within & !seen;
        seen |= next;
        frontier = next;
    }
    seen
}

/// Vertices outside `s ∪ {v}` reachable from `v` through `s`.
fn q_set(adj: &[u64], s: u64, v: usize) -> u64 {
    let c = flood(adj, 1 << v, s | 1 << v);
    neighborhood(adj, c) & !(s | 1 << v)
}

pub fn treewidth_exact(g: &Graph) -> Result<(usize, TreeDecomposition)> {
    treewidth_exact_with_limit(g, TREEWIDTH_LIMIT)
}

/// Subset DP: `TW(S) = min_{v∈S} max(TW(S∖v), |Q(S∖v, v)|)`.
pub fn treewidth_exact_with_limit(g: &Graph, limit: usize) -> Result<(usize, TreeDecomposition)> {
    check_limit("treewidth input", g.n(), limit.min(24))?;
    let n = g.n();
    let adj = g.masks();
    let full = (1usize << n) - 1;
    let mut tw = vec![0u8; full + 1];
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let sub = tw[without];
            if sub >= best {
                continue;
            }
            let q = q_set(&adj, without as u64, v).count_ones() as u8;
            best = best.min(sub.max(q));
        }
        tw[s] = best;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let target = tw[s];
        let mut rest = s;
        loop {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let without = s & !(1 << v);
            let q = q_set(&adj, without as u64, v).count_ones() as u8;
            if tw[without].max(q) == target {
                order.push(v);
                s = without;
                break;
            }
        }
    }
    order.reverse();
    let td = decomposition_from_order(g, &order);
    Ok((tw[full] as usize, td))
}

/// Decomposition induced by eliminating vertices in `order`; node `i` holds
/// `order[i]` with its later neighbours in the fill-in graph.
pub fn decomposition_from_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut fill: Vec<VertexSet> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = fill[v].iter().copied().filter(|&u| pos[u] > i).collect();
        for &a in &later {
            for &b in &later {
                if a != b {
                    fill[a].insert(b);
                }
            }
        }
        parent[i] = later.iter().map(|&u| pos[u]).min();
        let mut bag: VertexSet = later.into_iter().collect();
        bag.insert(v);
        bags.push(bag);
    }
    // Components of the fill graph give separate roots; hang them off the last.
    if n > 0 {
        for p in parent.iter_mut().take(n - 1) {
            if p.is_none() {
                *p = Some(n - 1);
            }
        }
    }
    TreeDecomposition { bags, parent }
}

pub fn treewidth(g: &Graph) -> Result<usize> {
    treewidth_exact(g).map(|(w, _)| w)
}

/// Treewidth of the Gaifman graph.
pub fn treewidth_of_structure(a: &Structure) -> Result<usize> {
    treewidth(&gaifman_graph(a))
}

pub fn treedepth_exact(g: &Graph) -> Result<usize> {
    check_limit("treedepth input", g.n(), TREEWIDTH_LIMIT)?;
    let adj = g.masks();
    let full = if g.n() == 64 { !0 } else { (1u64 << g.n()) - 1 };
    let mut memo = HashMap::new();
    Ok(treedepth_rec(&adj, full, &mut memo))
}

fn treedepth_rec(adj: &[u64], set: u64, memo: &mut HashMap<u64, usize>) -> usize {
    if set == 0 {
        return 0;
    }
    if let Some(&d) = memo.get(&set) {
        return d;
    }
    let first = flood(adj, set & set.wrapping_neg(), set);
    let d = if first != set {
        let mut best = 0;
        let mut rest = set;
        while rest != 0 {
            let c = flood(adj, rest & rest.wrapping_neg(), rest);
            rest &= !c;
            best = best.max(treedepth_rec(adj, c, memo));
        }
        best
    } else {
        let mut best = usize::MAX;
        let mut rest = set;
        while rest != 0 {
            let v = rest & rest.wrapping_neg();
            rest &= rest - 1;
            best = best.min(1 + treedepth_rec(adj, set & !v, memo));
        }
        best
    };
    memo.insert(set, d);
    d
}

/// Connected vertex sets that pairwise touch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bramble {
    pub sets: Vec<VertexSet>,
}

impl Bramble {
    pub fn new(sets: Vec<VertexSet>) -> Self {
        Bramble { sets }
    }
}

/// Whether `a` and `b` share a vertex or are joined by an edge.
pub fn touches(g: &Graph, a: &VertexSet, b: &VertexSet) -> bool {
    a.iter()
        .any(|&v| b.contains(&v) || g.neighbors(v).iter().any(|u| b.contains(u)))
}

pub fn validate_bramble(g: &Graph, b: &Bramble) -> Result<()> {
    for (i, s) in b.sets.iter().enumerate() {
        if let Some(&v) = s.iter().find(|&&v| v >= g.n()) {
            return Err(Error::NoSuchVertex(v));
        }
        if s.is_empty() || !g.is_connected_set(s) {
            return Err(Error::Invalid(format!("bramble set {i} is not connected")));
        }
    }
    for i in 0..b.sets.len() {
        for j in i + 1..b.sets.len() {
            if !touches(g, &b.sets[i], &b.sets[j]) {
                return Err(Error::Invalid(format!("bramble sets {i} and {j} do not touch")));
            }
        }
    }
    Ok(())
}

/// Minimum size of a vertex set meeting every bramble set.
pub fn bramble_order(g: &Graph, b: &Bramble) -> Result<usize> {
    check_limit("bramble host", g.n(), 64)?;
    validate_bramble(g, b)?;
    let sets: Vec<u64> = b.sets.iter().map(|s| s.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
    Ok(min_hitting_set(&sets))
}

fn min_hitting_set(sets: &[u64]) -> usize {
    fn go(sets: &[u64], chosen: u64, depth: usize, best: &mut usize) {
        let Some(&open) = sets.iter().find(|&&s| s & chosen == 0) else {
            *best = (*best).min(depth);
            return;
        };
        if depth + 1 >= *best {
            return;
        }
        let mut rest = open;
        while rest != 0 {
            let v = rest & rest.wrapping_neg();
            rest &= rest - 1;
            go(sets, chosen | v, depth + 1, best);
        }
    }
    let mut best = sets.len() + 1;
    go(sets, 0, 0, &mut best);
    best
}

pub fn max_bramble_order(g: &Graph) -> Result<usize> {
    max_bramble(g).map(|(k, _)| k)
}

/// Largest bramble order, with a bramble attaining it.
///
/// A bramble of order at least `k` exists iff every `(k−1)`-set `S` can be
/// given a component of `G − S` so that the chosen components pairwise touch;
/// the chosen components then form such a bramble. The search is over
/// components, the inclusion-maximal connected sets avoiding each `S`.
pub fn max_bramble(g: &Graph) -> Result<(usize, Bramble)> {
    check_limit("bramble search", g.n(), BRAMBLE_LIMIT)?;
    let adj = g.masks();
    let mut best = (0, Bramble::default());
    for k in 1..=g.n() {
        match haven(&adj, g.n(), k - 1) {
            Some(sets) => {
                let sets = sets
                    .into_iter()
                    .map(|m| (0..g.n()).filter(|v| m >> v & 1 == 1).collect())
                    .collect();
                best = (k, Bramble { sets });
            }
            None => break,
        }
    }
    Ok(best)
}

fn touch_masks(adj: &[u64], a: u64, b: u64) -> bool {
    a & b != 0 || neighborhood(adj, a) & b != 0
}

/// Pairwise touching choice of components over all `size`-subsets.
fn haven(adj: &[u64], n: usize, size: usize) -> Option<Vec<u64>> {
    let full = (1u64 << n) - 1;
    let mut domains: Vec<Vec<u64>> = Vec::new();
    for s in 0..=full {
        if s.count_ones() as usize != size {
            continue;
        }
        let mut comps = Vec::new();
        let mut rest = full & !s;
        while rest != 0 {
            let c = flood(adj, rest & rest.wrapping_neg(), rest);
            rest &= !c;
            comps.push(c);
        }
        if comps.is_empty() {
            return None;
        }
        domains.push(comps);
    }
    domains.sort_by_key(|d| d.len());
    let mut chosen = Vec::with_capacity(domains.len());
    if assign(adj, &domains, &mut chosen) {
        let mut out = chosen;
        out.sort_unstable();
        out.dedup();
        Some(out)
    } else {
        None
    }
}

fn assign(adj: &[u64], domains: &[Vec<u64>], chosen: &mut Vec<u64>) -> bool {
    let i = chosen.len();
    if i == domains.len() {
        return true;
    }
    for &c in &domains[i] {
        if chosen.iter().all(|&d| touch_masks(adj, c, d)) {
            chosen.push(c);
            if assign(adj, domains, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
