//! Minor containment, obstruction sets and Hadwiger numbers.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default bound on `|V(H)|` for [`is_minor`].
pub const MINOR_LIMIT: usize = 8;

/// One connected bag of host vertices per pattern vertex.
pub type MinorModel = Vec<Vec<usize>>;

/// Whether `h` is a minor of `g`, with a witness model.
pub fn is_minor(h: &Graph, g: &Graph) -> Result<Option<MinorModel>> {
    is_minor_with_limit(h, g, MINOR_LIMIT)
}

pub fn is_minor_with_limit(h: &Graph, g: &Graph, limit: usize) -> Result<Option<MinorModel>> {
    if h.n() > g.n() {
        return Ok(None);
    }
    if h.n() > limit {
        return Err(Error::LimitExceeded {
            what: "minor pattern",
            size: h.n(),
            limit,
        });
    }
    if g.n() > 64 {
        return Err(Error::LimitExceeded {
            what: "minor host",
            size: g.n(),
            limit: 64,
        });
    }
    if h.edge_count() > g.edge_count() {
        return Ok(None);
    }
    if h.n() == 0 {
        return Ok(Some(Vec::new()));
    }
    let hm = h.masks();
    let k = h.n();
    // Pairs whose transposition is an automorphism of `h` may have their bags
    // opened in index order only.
    let mut earlier_twins = vec![0u64; k];
    for i in 0..k {
        for (j, twins) in earlier_twins.iter_mut().enumerate().skip(i + 1) {
            let swap = |m: u64| {
                let (bi, bj) = (m >> i & 1, m >> j & 1);
                (m & !(1 << i) & !(1 << j)) | bi << j | bj << i
            };
            let auto = (0..k).all(|v| {
                let img = if v == i {
                    j
                } else if v == j {
                    i
                } else {
                    v
                };
                hm[img] == swap(hm[v])
            });
            if auto {
                *twins |= 1 << i;
            }
        }
    }
    let mut s = MinorSearch {
        gm: g.masks(),
        k,
        n: g.n(),
        bags: vec![0; k],
        earlier_twins,
        edges: h.edges(),
    };
    if s.go(0) {
        Ok(Some(
            s.bags
                .iter()
                .map(|&b| (0..g.n()).filter(|v| b >> v & 1 == 1).collect())
                .collect(),
        ))
    } else {
        Ok(None)
    }
}

struct MinorSearch {
    gm: Vec<u64>,
    k: usize,
    n: usize,
    bags: Vec<u64>,
    earlier_twins: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl MinorSearch {
    fn go(&mut self, v: usize) -> bool {
        if !self.feasible(v) {
            return false;
        }
        if v == self.n {
            return true;
        }
        let open: u64 = (0..self.k).filter(|&i| self.bags[i] != 0).fold(0, |m, i| m | 1 << i);
        for i in 0..self.k {
            if self.bags[i] == 0 && self.earlier_twins[i] & !open != 0 {
                continue;
            }
            self.bags[i] |= 1 << v;
            if self.go(v + 1) {
                return true;
            }
            self.bags[i] &= !(1 << v);
        }
        self.go(v + 1)
    }

    /// Necessary conditions with vertices `v..n` still unassigned.
    fn feasible(&self, v: usize) -> bool {
        let free: u64 = if v >= 64 { 0 } else { !0u64 << v } & self.full();
        let empty = self.bags.iter().filter(|&&b| b == 0).count();
        if empty > free.count_ones() as usize {
            return false;
        }
        let mut reach = vec![0u64; self.k];
        for (i, &b) in self.bags.iter().enumerate() {
            if b == 0 {
                reach[i] = free;
                continue;
            }
            let r = self.flood(b & b.wrapping_neg(), b | free);
            if b & !r != 0 {
                return false;
            }
            reach[i] = r;
        }
        for &(i, j) in &self.edges {
            if self.neighborhood(reach[i]) & reach[j] == 0 {
                return false;
            }
        }
        true
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            !0
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn neighborhood(&self, set: u64) -> u64 {
        let mut out = 0;
        let mut s = set;
        while s != 0 {
            let v = s.trailing_zeros() as usize;
            out |= self.gm[v];
            s &= s - 1;
        }
        out
    }

    fn flood(&self, start: u64, within: u64) -> u64 {
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let next = self.neighborhood(frontier) & within & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }
}

/// A finite set of excluded minors with a clique bound `c_μ` such that
/// `K_{c_μ}` contains every member as a minor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSet {
    graphs: Vec<(String, Graph)>,
    clique_bound: usize,
}

impl ObstructionSet {
    /// `clique_bound` defaults to the largest member order. Every graph on at
    /// most `c` vertices is a subgraph of `K_c`, so validation is an order check.
    pub fn new(graphs: Vec<(String, Graph)>, clique_bound: Option<usize>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::Invalid("an obstruction set needs at least one graph".into()));
        }
        let c = clique_bound.unwrap_or_else(|| graphs.iter().map(|(_, g)| g.n()).max().unwrap_or(0));
        for (name, h) in &graphs {
            if h.n() > c {
                return Err(Error::Invalid(format!("{name} is not a minor of K{c}")));
            }
        }
        Ok(ObstructionSet {
            graphs,
            clique_bound: c,
        })
    }

    /// Obstruction set from names understood by [`named_graph`].
    pub fn from_names(names: &[&str]) -> Result<Self> {
        let graphs = names
            .iter()
            .map(|n| named_graph(n).map(|g| (n.to_string(), g)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graphs, None)
    }

    /// `{K5, K3,3}`.
    pub fn planar() -> Self {
        Self::from_names(&["K5", "K33"]).expect("built-in")
    }

    pub fn graphs(&self) -> &[(String, Graph)] {
        &self.graphs
    }

    pub fn clique_bound(&self) -> usize {
        self.clique_bound
    }

    pub fn names(&self) -> Vec<&str> {
        self.graphs.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Small named graphs: `K<n>` complete, `K33` and `K<a>_<b>` complete
/// bipartite, `P<n>` path on `n` vertices, `C<n>` cycle, `S<n>` star with `n`
/// leaves, `M<k>` matching with `k` edges.
pub fn named_graph(name: &str) -> Result<Graph> {
    let bad = || Error::Invalid(format!("unknown graph name `{name}`"));
    if name == "K33" {
        return Ok(Graph::complete_bipartite(3, 3));
    }
    let (head, rest) = match (name.get(..1), name.get(1..)) {
        (Some(h), Some(r)) => (h, r),
        _ => return Err(bad()),
    };
    if let Some((a, b)) = rest.split_once('_') {
        if head != "K" {
            return Err(bad());
        }
        let a: usize = a.parse().map_err(|_| bad())?;
        let b: usize = b.parse().map_err(|_| bad())?;
        return Ok(Graph::complete_bipartite(a, b));
    }
    let n: usize = rest.parse().map_err(|_| bad())?;
    Ok(match head {
        "K" => Graph::complete(n),
        "P" => Graph::path(n),
        "C" if n >= 3 => Graph::cycle(n),
        "S" => Graph::star(n),
        "M" => Graph::from_edges(2 * n, &(0..n).map(|i| (2 * i, 2 * i + 1)).collect::<Vec<_>>()),
        _ => return Err(bad()),
    })
}

/// `G ∈ excl(ℱ)`.
pub fn excl_membership(g: &Graph, obs: &ObstructionSet) -> Result<bool> {
    for (_, h) in &obs.graphs {
        if is_minor(h, g)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest `k` with `K_k` not a minor of `g`.
pub fn hadwiger_number(g: &Graph) -> Result<usize> {
    let mut k = 1;
    while is_minor(&Graph::complete(k), g)?.is_some() {
        k += 1;
    }
    Ok(k)
}

/// Contracts `{u, v}` into `u` (which keeps its label); `v` is removed.
pub fn contract_edge(g: &Graph, u: usize, v: usize) -> Result<Graph> {
    if u >= g.n() || v >= g.n() || !g.has_edge(u, v) {
        return Err(Error::Invalid(format!("{{{u}, {v}}} is not an edge")));
    }
    let mut h = g.clone();
    let nb: Vec<usize> = g.neighbors(v).iter().copied().collect();
    for w in nb {
        h.add_edge(u, w);
    }
    Ok(h.remove_vertices(&[v].into()))
}
