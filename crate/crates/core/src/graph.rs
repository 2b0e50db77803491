//! Simple undirected graphs on dense vertex indices `0..n`.
//!
//! Each vertex carries a label (an element id) so a graph converts to and from
//! an `{E}`-structure without losing identities.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::structure::{Elem, ElemSet, Structure, Vocabulary};

pub type VertexSet = BTreeSet<usize>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    labels: Vec<Elem>,
    adj: Vec<BTreeSet<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices labelled `0..n`.
    pub fn empty(n: usize) -> Self {
        Graph {
            labels: (0..n as Elem).collect(),
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn with_labels(labels: Vec<Elem>) -> Self {
        let n = labels.len();
        Graph {
            labels,
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::empty(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = Graph::empty(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// `w × h` grid, vertex `(x, y)` at index `y * w + x`.
    pub fn grid(w: usize, h: usize) -> Self {
        let mut g = Graph::empty(w * h);
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    g.add_edge(y * w + x, y * w + x + 1);
                }
                if y + 1 < h {
                    g.add_edge(y * w + x, (y + 1) * w + x);
                }
            }
        }
        g
    }

    pub fn petersen() -> Self {
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(i, i + 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        g
    }

    /// Adds an edge; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    pub fn add_vertex(&mut self, label: Elem) -> usize {
        self.labels.push(label);
        self.adj.push(BTreeSet::new());
        self.labels.len() - 1
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.range(u + 1..).map(|&v| (u, v)));
        }
        out
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn label(&self, v: usize) -> Elem {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Elem] {
        &self.labels
    }

    pub fn index_of(&self, label: Elem) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn relabeled(&self, labels: Vec<Elem>) -> Graph {
        assert_eq!(labels.len(), self.n());
        Graph {
            labels,
            adj: self.adj.clone(),
        }
    }

    /// Induced subgraph on `keep` (in increasing index order), labels preserved.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let order: Vec<usize> = keep.iter().copied().collect();
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph::with_labels(order.iter().map(|&v| self.labels[v]).collect());
        for (i, &v) in order.iter().enumerate() {
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX {
                    g.adj[i].insert(pos[w]);
                }
            }
        }
        g
    }

    pub fn remove_vertices(&self, drop: &VertexSet) -> Graph {
        let keep = (0..self.n()).filter(|v| !drop.contains(v)).collect();
        self.induced(&keep)
    }

    pub fn without_edge(&self, u: usize, v: usize) -> Graph {
        let mut g = self.clone();
        g.remove_edge(u, v);
        g
    }

    /// Components of the graph with `removed` vertices deleted, each sorted,
    /// ordered by smallest vertex.
    pub fn components_avoiding(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = removed.to_vec();
        seen.resize(n, false);
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_avoiding(&[])
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether `set` is non-empty and induces a connected subgraph.
    pub fn is_connected_set(&self, set: &VertexSet) -> bool {
        let Some(&s) = set.iter().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }

    /// Hop distances from `s`; `usize::MAX` for unreachable vertices.
    pub fn bfs(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distances(&self) -> Vec<Vec<usize>> {
        (0..self.n()).map(|s| self.bfs(s)).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.edge_count() + self.components().len() == self.n()
    }

    /// Adjacency rows as bitmasks; requires `n ≤ 64`.
    pub fn masks(&self) -> Vec<u64> {
        assert!(self.n() <= 64, "bitmask view needs at most 64 vertices");
        self.adj
            .iter()
            .map(|nb| nb.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect()
    }

    pub fn to_structure(&self) -> Structure {
        let mut s =
            Structure::new(Vocabulary::graph(), self.labels.iter().copied()).expect("labels are valid elements");
        let tuples: Vec<Vec<Elem>> = (0..self.n())
            .flat_map(|u| self.adj[u].iter().map(move |&v| (u, v)))
            .map(|(u, v)| vec![self.labels[u], self.labels[v]])
            .collect();
        s = s.with_tuples("E", tuples).expect("edges over the universe");
        s
    }

    /// Reads a graph from an `{E}`-structure; `E` must be symmetric and anti-reflexive.
    pub fn from_structure(s: &Structure) -> Result<Graph> {
        if s.vocabulary() != &Vocabulary::graph() {
            return Err(Error::Invalid("not a graph vocabulary".into()));
        }
        let elems: Vec<Elem> = s.universe().iter().copied().collect();
        let mut g = Graph::with_labels(elems.clone());
        let e = s.relation("E");
        for t in e {
            if t[0] == t[1] {
                return Err(Error::Invalid("E is not anti-reflexive".into()));
            }
            if !e.contains(&vec![t[1], t[0]]) {
                return Err(Error::Invalid("E is not symmetric".into()));
            }
            let u = elems.binary_search(&t[0]).expect("in universe");
            let v = elems.binary_search(&t[1]).expect("in universe");
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Vertices whose labels lie in `set`.
    pub fn indices_of(&self, set: &ElemSet) -> VertexSet {
        (0..self.n()).filter(|&v| set.contains(&self.labels[v])).collect()
    }

    pub fn labels_of(&self, set: &VertexSet) -> ElemSet {
        set.iter().map(|&v| self.labels[v]).collect()
    }

    /// Plain edge list, one `u v` pair per line, 0-based. An optional first line
    /// `n N` fixes the vertex count (otherwise the largest id plus one).
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fail = |m: &str| Error::Format {
                line: i + 1,
                message: m.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            if words.len() == 2 && words[0] == "n" {
                n = Some(words[1].parse().map_err(|_| fail("bad vertex count"))?);
                continue;
            }
            if words.len() != 2 {
                return Err(fail("expected `u v`"));
            }
            let u: usize = words[0].parse().map_err(|_| fail("bad vertex"))?;
            let v: usize = words[1].parse().map_err(|_| fail("bad vertex"))?;
            if u == v {
                return Err(fail("loops are not allowed"));
            }
            max = max.max(Some(u.max(v)));
            edges.push((u, v));
        }
        let n = match (n, max) {
            (Some(n), Some(m)) if m >= n => {
                return Err(Error::Format {
                    line: 0,
                    message: format!("vertex {m} out of range for n = {n}"),
                })
            }
            (Some(n), _) => n,
            (None, m) => m.map_or(0, |m| m + 1),
        };
        Ok(Graph::from_edges(n, &edges))
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n());
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Whether two graphs are isomorphic (ignoring labels).
    pub fn is_isomorphic(&self, other: &Graph) -> Result<bool> {
        let a = self.relabeled((0..self.n() as Elem).collect()).to_structure();
        let b = other.relabeled((0..other.n() as Elem).collect()).to_structure();
        Ok(crate::structure::is_isomorphic(&a, &b)?.is_some())
    }
}

/// Connected components as vertex sets.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    g.components().into_iter().map(|c| c.into_iter().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_examples() {
        assert_eq!(Graph::empty(3).components().len(), 3);
        assert_eq!(Graph::path(3).components(), vec![vec![0, 1, 2]]);
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(connected_components(&two).len(), 2);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::petersen();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(Graph::parse_edge_list("0 0\n").is_err());
        assert!(Graph::parse_edge_list("0 x\n").is_err());
        assert_eq!(Graph::parse_edge_list("n 3\n0 1\n").unwrap().n(), 3);
    }

    #[test]
    fn structure_round_trip() {
        let g = Graph::grid(3, 2);
        assert_eq!(Graph::from_structure(&g.to_structure()).unwrap(), g);
        let v = Vocabulary::graph();
        let bad = Structure::new(v, 0..2).unwrap().with_tuple("E", vec![0, 1]).unwrap();
        assert!(Graph::from_structure(&bad).is_err());
    }

    #[test]
    fn petersen_shape() {
        let p = Graph::petersen();
        assert_eq!(p.edge_count(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
    }
}
