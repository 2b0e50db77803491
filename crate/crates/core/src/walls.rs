//! Walls with explicit coordinates, their layers and central subwalls,
//! canonical partitions, pseudogrids and privileged sets.
//!
//! Coordinates are 1-based `(x, y) ∈ [2r] × [r]`. Vertical edges
//! `{(x, y), (x, y+1)}` exist when `x + y` is even; the two degree-one grid
//! corners `(2r, 1)` and `(1, r)` are absent.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::structure::Elem;

pub type Coord = (usize, usize);

/// An `r`-wall: a subdivision of the elementary `r`-wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    r: usize,
    graph: Graph,
    grid: BTreeMap<Coord, usize>,
    /// Subdivision vertices of each elementary edge `(a, b)`, `a < b`, listed
    /// from `a` towards `b`. Edges without subdivisions have no entry.
    subdivisions: BTreeMap<(Coord, Coord), Vec<usize>>,
}

fn check_height(r: usize) -> Result<()> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "wall height must be odd and at least 3, got {r}"
        )));
    }
    Ok(())
}

/// Grid coordinates of the elementary `r`-wall, built from the definition.
fn elementary_coords(r: usize) -> BTreeSet<Coord> {
    let all: BTreeSet<Coord> = (1..=r).flat_map(|y| (1..=2 * r).map(move |x| (x, y))).collect();
    let degree = |&(x, y): &Coord| {
        let mut d = 0;
        if x > 1 {
            d += 1;
        }
        if x < 2 * r {
            d += 1;
        }
        if y > 1 && (x + y - 1) % 2 == 0 {
            d += 1;
        }
        if y < r && (x + y) % 2 == 0 {
            d += 1;
        }
        d
    };
    all.iter().copied().filter(|c| degree(c) != 1).collect()
}

fn elementary_edges(r: usize) -> Vec<(Coord, Coord)> {
    let coords = elementary_coords(r);
    let mut out = Vec::new();
    for &(x, y) in &coords {
        if coords.contains(&(x + 1, y)) {
            out.push(((x, y), (x + 1, y)));
        }
        if (x + y) % 2 == 0 && coords.contains(&(x, y + 1)) {
            out.push(((x, y), (x, y + 1)));
        }
    }
    out
}

fn ordered(a: Coord, b: Coord) -> (Coord, Coord) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Coordinates of the `i`-th vertical path, `i ∈ [r]`.
fn vertical_path_coords(r: usize, i: usize) -> Vec<Coord> {
    let left = 2 * i - 1;
    let mut c = left;
    let mut out = vec![(c, 1)];
    for y in 1..r {
        out.push((c, y + 1));
        if y + 1 < r {
            c = if c == left { left + 1 } else { left };
            out.push((c, y + 1));
        }
    }
    out
}

/// Coordinates of the `j`-th horizontal path (row `j`), left to right.
fn horizontal_path_coords(r: usize, j: usize) -> Vec<Coord> {
    let coords = elementary_coords(r);
    (1..=2 * r).map(|x| (x, j)).filter(|c| coords.contains(c)).collect()
}

/// The elementary `r`-wall, vertices numbered row by row.
pub fn elementary_wall(r: usize) -> Result<Wall> {
    check_height(r)?;
    let mut order: Vec<Coord> = elementary_coords(r).into_iter().collect();
    order.sort_by_key(|&(x, y)| (y, x));
    let grid: BTreeMap<Coord, usize> = order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut graph = Graph::empty(order.len());
    for (a, b) in elementary_edges(r) {
        graph.add_edge(grid[&a], grid[&b]);
    }
    Ok(Wall {
        r,
        graph,
        grid,
        subdivisions: BTreeMap::new(),
    })
}

/// Subdivides elementary edges; `plan` gives how many new vertices to add on
/// each edge (appended next to the edge's larger endpoint). New vertices get
/// fresh labels above every existing one.
pub fn subdivide_wall(w: &Wall, plan: &BTreeMap<(Coord, Coord), usize>) -> Result<Wall> {
    let edges: BTreeSet<(Coord, Coord)> = elementary_edges(w.r).into_iter().collect();
    let mut out = w.clone();
    let mut next_label: Elem = w.graph.labels().iter().max().map_or(0, |m| m + 1);
    for (&(a, b), &count) in plan {
        let key = ordered(a, b);
        if !edges.contains(&key) {
            return Err(Error::Invalid(format!("{a:?}-{b:?} is not an elementary edge")));
        }
        if count == 0 {
            continue;
        }
        let end = out.grid[&key.1];
        let chain = out.subdivisions.entry(key).or_default();
        let mut last = chain.last().copied().unwrap_or(out.grid[&key.0]);
        out.graph.remove_edge(last, end);
        for _ in 0..count {
            let v = out.graph.add_vertex(next_label);
            next_label += 1;
            out.graph.add_edge(last, v);
            chain.push(v);
            last = v;
        }
        out.graph.add_edge(last, end);
    }
    Ok(out)
}

impl Wall {
    /// Assembles a wall from its parts, checking that `graph` is exactly the
    /// subdivided elementary wall they describe.
    pub fn from_parts(
        r: usize,
        graph: Graph,
        grid: BTreeMap<Coord, usize>,
        subdivisions: BTreeMap<(Coord, Coord), Vec<usize>>,
    ) -> Result<Wall> {
        check_height(r)?;
        let bad = |m: String| Err(Error::Invalid(m));
        if grid.keys().copied().collect::<BTreeSet<_>>() != elementary_coords(r) {
            return bad("grid coordinates do not match the elementary wall".into());
        }
        let edges: BTreeSet<(Coord, Coord)> = elementary_edges(r).into_iter().collect();
        let mut owner = vec![false; graph.n()];
        let mut claim = |v: usize| -> Result<()> {
            if v >= owner.len() || owner[v] {
                return Err(Error::Invalid(format!("vertex {v} is used twice or missing")));
            }
            owner[v] = true;
            Ok(())
        };
        for &v in grid.values() {
            claim(v)?;
        }
        for (key, chain) in &subdivisions {
            if !edges.contains(key) || key.0 > key.1 {
                return bad(format!("{key:?} is not an elementary edge"));
            }
            for &v in chain {
                claim(v)?;
            }
        }
        if owner.iter().any(|o| !o) {
            return bad("some vertex is neither a grid nor a subdivision vertex".into());
        }
        let w = Wall {
            r,
            graph,
            grid,
            subdivisions: subdivisions.into_iter().filter(|(_, c)| !c.is_empty()).collect(),
        };
        let mut expected = Graph::with_labels(w.graph.labels().to_vec());
        for &(a, b) in &edges {
            for pair in w.edge_walk(a, b).windows(2) {
                expected.add_edge(pair[0], pair[1]);
            }
        }
        if expected != w.graph {
            return bad("graph edges do not match the subdivided wall".into());
        }
        Ok(w)
    }

    pub fn height(&self) -> usize {
        self.r
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn grid(&self) -> &BTreeMap<Coord, usize> {
        &self.grid
    }

    pub fn subdivisions(&self) -> &BTreeMap<(Coord, Coord), Vec<usize>> {
        &self.subdivisions
    }

    pub fn vertex_at(&self, c: Coord) -> Option<usize> {
        self.grid.get(&c).copied()
    }

    /// Grid coordinate of `v`, `None` for subdivision vertices.
    pub fn coord(&self, v: usize) -> Option<Coord> {
        self.grid.iter().find(|(_, &u)| u == v).map(|(&c, _)| c)
    }

    pub fn elementary_edges(&self) -> Vec<(Coord, Coord)> {
        elementary_edges(self.r)
    }

    /// Vertices of the elementary edge from `a` to `b`, both ends included.
    pub fn edge_walk(&self, a: Coord, b: Coord) -> Vec<usize> {
        let key = ordered(a, b);
        let mut mid = self.subdivisions.get(&key).cloned().unwrap_or_default();
        if a > b {
            mid.reverse();
        }
        let mut out = vec![self.grid[&a]];
        out.extend(mid);
        out.push(self.grid[&b]);
        out
    }

    fn walk(&self, coords: &[Coord]) -> Vec<usize> {
        let mut out = vec![self.grid[&coords[0]]];
        for pair in coords.windows(2) {
            out.extend(self.edge_walk(pair[0], pair[1]).into_iter().skip(1));
        }
        out
    }

    /// Vertical paths `P_1, …, P_r`, each listed bottom to top.
    pub fn vertical_paths(&self) -> Vec<Vec<usize>> {
        (1..=self.r)
            .map(|i| self.walk(&vertical_path_coords(self.r, i)))
            .collect()
    }

    /// Horizontal paths `L_1, …, L_r`, each listed left to right.
    pub fn horizontal_paths(&self) -> Vec<Vec<usize>> {
        (1..=self.r)
            .map(|j| self.walk(&horizontal_path_coords(self.r, j)))
            .collect()
    }

    /// The perimeter `D(W)` in cyclic order starting at corner `(1, 1)`.
    pub fn perimeter(&self) -> Vec<usize> {
        let r = self.r;
        let mut seq = horizontal_path_coords(r, 1);
        seq.extend(vertical_path_coords(r, r).into_iter().skip(1));
        seq.extend(horizontal_path_coords(r, r).into_iter().rev().skip(1));
        seq.extend(vertical_path_coords(r, 1).into_iter().rev().skip(1));
        let mut cycle = self.walk(&seq);
        cycle.pop();
        cycle
    }

    pub fn corners(&self) -> Vec<usize> {
        let r = self.r;
        [(1, 1), (2, r), (2 * r - 1, 1), (2 * r, r)]
            .iter()
            .map(|c| self.grid[c])
            .collect()
    }

    /// Perimeter grid vertices of degree two in the elementary wall.
    pub fn pegs(&self) -> Vec<usize> {
        let edges = elementary_edges(self.r);
        let on: BTreeSet<usize> = self.perimeter().into_iter().collect();
        self.grid
            .iter()
            .filter(|(c, v)| on.contains(v) && edges.iter().filter(|(a, b)| a == *c || b == *c).count() == 2)
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn branch_vertices(&self) -> Vec<usize> {
        (0..self.graph.n()).filter(|&v| self.graph.degree(v) == 3).collect()
    }

    fn label_index(&self) -> HashMap<Elem, usize> {
        self.graph.labels().iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    /// Vertices left after deleting the perimeter and then, repeatedly, all
    /// vertices of degree at most one.
    fn strip_perimeter(&self) -> VertexSet {
        let mut alive = vec![true; self.graph.n()];
        for v in self.perimeter() {
            alive[v] = false;
        }
        loop {
            let drop: Vec<usize> = (0..self.graph.n())
                .filter(|&v| alive[v] && self.graph.neighbors(v).iter().filter(|&&u| alive[u]).count() <= 1)
                .collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive[v] = false;
            }
        }
        (0..self.graph.n()).filter(|&v| alive[v]).collect()
    }

    /// The `(r−2)`-wall left by removing the perimeter, re-indexed onto the
    /// elementary grid. Removing an odd number of layers mirrors the rows.
    fn inner_wall(&self) -> Result<Wall> {
        let r = self.r;
        if r < 5 {
            return Err(Error::Invalid("a 3-wall has no inner wall".into()));
        }
        let keep = self.strip_perimeter();
        let graph = self.graph.induced(&keep);
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let old: BTreeMap<Coord, usize> = self
            .grid
            .iter()
            .filter(|(_, v)| keep.contains(v))
            .map(|(&c, &v)| (c, v))
            .collect();
        let target = elementary_coords(r - 2);
        for mirror in [false, true] {
            for dx in 0..=3 {
                let map = |&(x, y): &Coord| -> Option<Coord> {
                    let nx = x.checked_sub(dx)?;
                    let ny = if mirror { r.checked_sub(y)? } else { y.checked_sub(1)? };
                    Some((nx, ny))
                };
                let mapped: Option<BTreeMap<Coord, usize>> =
                    old.iter().map(|(c, &v)| map(c).map(|nc| (nc, pos[&v]))).collect();
                let Some(grid) = mapped else { continue };
                if grid.keys().copied().collect::<BTreeSet<_>>() != target {
                    continue;
                }
                let back: BTreeMap<Coord, Coord> = old.keys().map(|c| (map(c).expect("mapped"), *c)).collect();
                let mut subdivisions = BTreeMap::new();
                let mut ok = true;
                for (a, b) in elementary_edges(r - 2) {
                    let (oa, ob) = (back[&a], back[&b]);
                    if !elementary_edges(r).contains(&ordered(oa, ob)) {
                        ok = false;
                        break;
                    }
                    let walk = self.edge_walk(oa, ob);
                    let chain: Vec<usize> = walk[1..walk.len() - 1].iter().map(|v| pos[v]).collect();
                    if !chain.is_empty() {
                        subdivisions.insert((a, b), chain);
                    }
                }
                if ok {
                    return Wall::from_parts(r - 2, graph, grid, subdivisions);
                }
            }
        }
        Err(Error::Invalid("inner part is not a wall".into()))
    }

    /// Layers `1..=(r−1)/2`, the first being the perimeter.
    pub fn layers(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        let index = self.label_index();
        loop {
            out.push(
                cur.perimeter()
                    .into_iter()
                    .map(|v| index[&cur.graph.label(v)])
                    .collect(),
            );
            if cur.r < 5 {
                break;
            }
            cur = cur.inner_wall().expect("inner wall of a wall");
        }
        out
    }

    /// Layer number (1-based) of every vertex, `None` off all layers.
    pub fn layer_index(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.graph.n()];
        for (i, layer) in self.layers().iter().enumerate() {
            for &v in layer {
                out[v] = Some(i + 1);
            }
        }
        out
    }

    /// The two central branch vertices, `(3, 2)` and `(4, 2)` of `W^(3)`.
    pub fn central_vertices(&self) -> VertexSet {
        let inner = self.central_subwall(3).expect("q = 3 is always valid");
        let index = self.label_index();
        [(3, 2), (4, 2)]
            .iter()
            .map(|c| index[&inner.graph.label(inner.grid[c])])
            .collect()
    }

    /// `W^(q)`: the wall left after removing the first `(r−q)/2` layers.
    /// Vertices keep their labels; indices and coordinates are re-assigned.
    pub fn central_subwall(&self, q: usize) -> Result<Wall> {
        if q < 3 || q.is_multiple_of(2) || q > self.r {
            return Err(Error::Invalid(format!(
                "central subwall height must be odd in [3, {}], got {q}",
                self.r
            )));
        }
        let mut cur = self.clone();
        while cur.r > q {
            cur = cur.inner_wall()?;
        }
        Ok(cur)
    }

    /// Indices in `host` of this wall's vertices, matched by label; fails if
    /// a vertex or edge is missing from the host.
    pub fn embedding_in(&self, host: &Graph) -> Result<Vec<usize>> {
        let index: HashMap<Elem, usize> = host.labels().iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let map: Vec<usize> = self
            .graph
            .labels()
            .iter()
            .map(|l| {
                index
                    .get(l)
                    .copied()
                    .ok_or_else(|| Error::Invalid(format!("wall vertex {l} is not in the host")))
            })
            .collect::<Result<_>>()?;
        for (u, v) in self.graph.edges() {
            if !host.has_edge(map[u], map[v]) {
                return Err(Error::Invalid(format!(
                    "wall edge {{{}, {}}} is not in the host",
                    self.graph.label(u),
                    self.graph.label(v)
                )));
            }
        }
        Ok(map)
    }

    /// Text form: `wall r`, `labels …`, one `grid x y v` per grid vertex and
    /// one `sub x1 y1 x2 y2 v…` per subdivided edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("wall {}\nlabels", self.r);
        for l in self.graph.labels() {
            s.push_str(&format!(" {l}"));
        }
        s.push('\n');
        for (&(x, y), v) in &self.grid {
            s.push_str(&format!("grid {x} {y} {v}\n"));
        }
        for (&((x1, y1), (x2, y2)), chain) in &self.subdivisions {
            s.push_str(&format!("sub {x1} {y1} {x2} {y2}"));
            for v in chain {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Wall> {
        let mut r = None;
        let mut labels: Option<Vec<Elem>> = None;
        let mut grid = BTreeMap::new();
        let mut subdivisions = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |m: &str| Error::Format {
                line,
                message: m.to_string(),
            };
            let content = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = content.split_whitespace().collect();
            let Some((&head, rest)) = toks.split_first() else {
                continue;
            };
            let nums: Vec<usize> = rest
                .iter()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err("expected numbers"))?;
            match head {
                "wall" if nums.len() == 1 && r.is_none() => r = Some(nums[0]),
                "labels" if labels.is_none() => labels = Some(nums.iter().map(|&n| n as Elem).collect()),
                "grid" if nums.len() == 3 => {
                    if grid.insert((nums[0], nums[1]), nums[2]).is_some() {
                        return Err(err("duplicate grid coordinate"));
                    }
                }
                "sub" if nums.len() >= 4 => {
                    let key = ((nums[0], nums[1]), (nums[2], nums[3]));
                    if subdivisions.insert(key, nums[4..].to_vec()).is_some() {
                        return Err(err("duplicate subdivided edge"));
                    }
                }
                _ => return Err(err(&format!("unexpected `{head}` line"))),
            }
        }
        let r = r.ok_or(Error::Format {
            line: 0,
            message: "missing `wall` line".into(),
        })?;
        let labels = labels.ok_or(Error::Format {
            line: 0,
            message: "missing `labels` line".into(),
        })?;
        check_height(r)?;
        let mut graph = Graph::with_labels(labels);
        let n = graph.n();
        let at = |c: &Coord| -> Result<usize> {
            grid.get(c)
                .copied()
                .filter(|&v| v < n)
                .ok_or_else(|| Error::Invalid(format!("grid vertex {c:?} missing or out of range")))
        };
        for (a, b) in elementary_edges(r) {
            let mut walk = vec![at(&a)?];
            for &v in subdivisions
                .get(&(a, b))
                .map(|c: &Vec<usize>| c.as_slice())
                .unwrap_or(&[])
            {
                if v >= n {
                    return Err(Error::NoSuchVertex(v));
                }
                walk.push(v);
            }
            walk.push(at(&b)?);
            for pair in walk.windows(2) {
                graph.add_edge(pair[0], pair[1]);
            }
        }
        Wall::from_parts(r, graph, grid, subdivisions)
    }
}

/// Internal bags `Q^(i,j)`, `i, j ∈ [2, r−1]`, and the external bag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonicalPartition {
    pub internal: BTreeMap<(usize, usize), VertexSet>,
    pub external: VertexSet,
}

impl CanonicalPartition {
    pub fn internal_count(&self) -> usize {
        self.internal.len()
    }

    pub fn covered(&self) -> VertexSet {
        let mut all = self.external.clone();
        for bag in self.internal.values() {
            all.extend(bag.iter().copied());
        }
        all
    }

    /// Bag of `v`: `Some((i, j))` internal, `None` external or uncovered.
    pub fn bag_of(&self, v: usize) -> Option<(usize, usize)> {
        self.internal.iter().find(|(_, b)| b.contains(&v)).map(|(&k, _)| k)
    }

    /// Checks that the bags are disjoint and every internal bag is connected
    /// and non-empty.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut seen = self.external.clone();
        for (k, bag) in &self.internal {
            if bag.is_empty() || !g.is_connected_set(bag) {
                return Err(Error::Invalid(format!("bag {k:?} is not connected")));
            }
            for &v in bag {
                if !seen.insert(v) {
                    return Err(Error::Invalid(format!("vertex {v} lies in two bags")));
                }
            }
        }
        Ok(())
    }
}

/// Canonical partition of `W`, in `W`'s vertex indices.
pub fn canonical_partition(w: &Wall) -> CanonicalPartition {
    let r = w.r;
    let inner = |i: usize, j: usize| (2..r).contains(&i) && (2..r).contains(&j);
    let col = |x: usize| x.div_ceil(2);
    let mut internal: BTreeMap<(usize, usize), VertexSet> = BTreeMap::new();
    let mut place = |key: Option<(usize, usize)>, vs: &[usize]| {
        if let Some(k) = key {
            internal.entry(k).or_default().extend(vs.iter().copied());
        }
    };
    for (&(x, y), &v) in &w.grid {
        let i = col(x);
        place(inner(i, y).then_some((i, y)), &[v]);
    }
    for (a, b) in elementary_edges(r) {
        let walk = w.edge_walk(a, b);
        let mid = &walk[1..walk.len() - 1];
        let ((x, y), (_, y2)) = (a, b);
        let key = if y == y2 {
            // Within `P_i ∩ L_y` when `x` is odd, else the segment of `B^(i,y)`
            // reaching left from `P_i` towards `P_{i−1}`.
            let i = if x % 2 == 1 { col(x) } else { x / 2 + 1 };
            inner(i, y).then_some((i, y))
        } else {
            let i = col(x);
            let j = if i % 2 == 0 { y } else { y + 1 };
            inner(i, j).then_some((i, j))
        };
        place(key, mid);
    }
    for i in 2..r {
        for j in 2..r {
            internal.entry((i, j)).or_default();
        }
    }
    let used: VertexSet = internal.values().flatten().copied().collect();
    let external = (0..w.graph.n()).filter(|v| !used.contains(v)).collect();
    CanonicalPartition { internal, external }
}

/// Greedy extension into `G ∖ A`.
///
/// `partition` is in `W`'s indices and `W` is located in `G` by labels. While
/// some unassigned vertex of the component of `G ∖ A` containing `W` has a
/// neighbour in a bag, the lowest-index such vertex joins the lowest adjacent
/// bag, internal bags ordered by `(i, j)` and the external bag last. All other
/// vertices of `G ∖ A` join the external bag. Result is in `G`'s indices.
pub fn extend_canonical_partition(
    g: &Graph,
    apex: &VertexSet,
    w: &Wall,
    partition: &CanonicalPartition,
) -> Result<CanonicalPartition> {
    let map = w.embedding_in(g)?;
    if let Some(&v) = map.iter().find(|v| apex.contains(v)) {
        return Err(Error::Invalid(format!("wall vertex {v} is an apex")));
    }
    if let Some(&v) = apex.iter().find(|&&v| v >= g.n()) {
        return Err(Error::NoSuchVertex(v));
    }
    let n = g.n();
    let ext = usize::MAX;
    let keys: Vec<(usize, usize)> = partition.internal.keys().copied().collect();
    let mut bag = vec![None; n];
    for (b, k) in keys.iter().enumerate() {
        for &v in &partition.internal[k] {
            bag[map[v]] = Some(b);
        }
    }
    for &v in &partition.external {
        bag[map[v]] = Some(ext);
    }
    let removed: Vec<bool> = (0..n).map(|v| apex.contains(&v)).collect();
    let compass: VertexSet = g
        .components_avoiding(&removed)
        .into_iter()
        .find(|c| c.contains(&map[0]))
        .map(|c| c.into_iter().collect())
        .unwrap_or_default();
    loop {
        let next = compass
            .iter()
            .copied()
            .filter(|&v| bag[v].is_none())
            .find_map(|v| g.neighbors(v).iter().filter_map(|&u| bag[u]).min().map(|b| (v, b)));
        match next {
            Some((v, b)) => bag[v] = Some(b),
            None => break,
        }
    }
    let mut out = CanonicalPartition {
        internal: keys.iter().map(|&k| (k, VertexSet::new())).collect(),
        external: VertexSet::new(),
    };
    for (v, &b) in bag.iter().enumerate().take(n) {
        if apex.contains(&v) {
            continue;
        }
        match b {
            Some(b) if b != ext => {
                out.internal.get_mut(&keys[b]).expect("key").insert(v);
            }
            _ => {
                out.external.insert(v);
            }
        }
    }
    Ok(out)
}

/// Number of internal bags meeting `x`.
pub fn bidimensionality(x: &VertexSet, partition: &CanonicalPartition) -> usize {
    partition
        .internal
        .values()
        .filter(|b| b.iter().any(|v| x.contains(v)))
        .count()
}

/// Horizontal paths `𝒫` and vertical paths `𝒬` as vertex sequences.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pseudogrid {
    pub horizontal: Vec<Vec<usize>>,
    pub vertical: Vec<Vec<usize>>,
}

impl Pseudogrid {
    pub fn size(&self) -> usize {
        self.horizontal.len()
    }

    pub fn vertices(&self) -> VertexSet {
        self.horizontal
            .iter()
            .chain(&self.vertical)
            .flatten()
            .copied()
            .collect()
    }

    pub fn mapped(&self, map: &[usize]) -> Pseudogrid {
        let m = |ps: &Vec<Vec<usize>>| ps.iter().map(|p| p.iter().map(|&v| map[v]).collect()).collect();
        Pseudogrid {
            horizontal: m(&self.horizontal),
            vertical: m(&self.vertical),
        }
    }
}

/// The horizontal and vertical paths of `W^(q)`, in `W`'s indices.
pub fn pseudogrid_from_wall(w: &Wall, q: usize) -> Result<Pseudogrid> {
    let sub = w.central_subwall(q)?;
    let map = sub.embedding_in(&w.graph)?;
    Ok(Pseudogrid {
        horizontal: sub.horizontal_paths(),
        vertical: sub.vertical_paths(),
    }
    .mapped(&map))
}

pub fn is_pseudogrid(g: &Graph, pg: &Pseudogrid) -> bool {
    pseudogrid_defect(g, pg).is_none()
}

/// First reason `pg` is not a pseudogrid of `g`.
pub fn pseudogrid_defect(g: &Graph, pg: &Pseudogrid) -> Option<String> {
    let q = pg.horizontal.len();
    if q == 0 || pg.vertical.len() != q {
        return Some(format!("{} horizontal and {} vertical paths", q, pg.vertical.len()));
    }
    for (name, paths) in [("horizontal", &pg.horizontal), ("vertical", &pg.vertical)] {
        let mut used = VertexSet::new();
        for (i, p) in paths.iter().enumerate() {
            if p.is_empty() {
                return Some(format!("{name} path {} is empty", i + 1));
            }
            if p.iter().any(|&v| v >= g.n()) || p.windows(2).any(|e| !g.has_edge(e[0], e[1])) {
                return Some(format!("{name} path {} is not a walk of the graph", i + 1));
            }
            for &v in p {
                if !used.insert(v) {
                    return Some(format!("{name} paths are not vertex-disjoint at {v}"));
                }
            }
        }
    }
    for (i, p) in pg.horizontal.iter().enumerate() {
        if !decomposes(p, &pg.vertical) {
            return Some(format!("horizontal path {} does not cross 𝒬 in order", i + 1));
        }
    }
    for (j, p) in pg.vertical.iter().enumerate() {
        if !decomposes(p, &pg.horizontal) {
            return Some(format!("vertical path {} does not cross 𝒫 in order", j + 1));
        }
    }
    None
}

/// Whether `p` splits as `R_0 S_1 R_1 … S_q R_q` (consecutive pieces sharing
/// an endpoint) with `S_j` a non-empty subpath of `others[j]` and every `R_j`
/// using no edge of, and having no internal vertex on, any of `others`.
fn decomposes(p: &[usize], others: &[Vec<usize>]) -> bool {
    let mut on: HashMap<usize, (usize, usize)> = HashMap::new();
    for (j, path) in others.iter().enumerate() {
        for (k, &v) in path.iter().enumerate() {
            on.insert(v, (j, k));
        }
    }
    let is_other_edge = |a: usize, b: usize| match (on.get(&a), on.get(&b)) {
        (Some(&(ja, ka)), Some(&(jb, kb))) => ja == jb && ka.abs_diff(kb) == 1,
        _ => false,
    };
    let connector = |s: usize, e: usize| {
        (s + 1..e).all(|t| !on.contains_key(&p[t])) && (s..e).all(|t| !is_other_edge(p[t], p[t + 1]))
    };
    let q = others.len();
    let m = p.len();
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    fn piece(
        j: usize,
        s: usize,
        p: &[usize],
        q: usize,
        on: &HashMap<usize, (usize, usize)>,
        connector: &dyn Fn(usize, usize) -> bool,
        memo: &mut HashMap<(usize, usize), bool>,
    ) -> bool {
        if let Some(&b) = memo.get(&(j, s)) {
            return b;
        }
        let m = p.len();
        let mut ok = false;
        if on.get(&p[s]).map(|x| x.0) == Some(j) {
            let mut e = s;
            loop {
                let done = if j + 1 == q {
                    connector(e, m - 1)
                } else {
                    (e + 1..m).any(|s2| {
                        on.get(&p[s2]).map(|x| x.0) == Some(j + 1)
                            && connector(e, s2)
                            && piece(j + 1, s2, p, q, on, connector, memo)
                    })
                };
                if done {
                    ok = true;
                    break;
                }
                // Extend the piece along `others[j]` in a fixed direction.
                if e + 1 >= m {
                    break;
                }
                let (Some(&(ja, ka)), Some(&(jb, kb))) = (on.get(&p[e]), on.get(&p[e + 1])) else {
                    break;
                };
                let step_ok = ja == j && jb == j && ka.abs_diff(kb) == 1;
                let dir_ok = e == s || {
                    let (_, k0) = on[&p[s]];
                    let (_, k1) = on[&p[s + 1]];
                    (k1 > k0) == (kb > ka)
                };
                if !(step_ok && dir_ok) {
                    break;
                }
                e += 1;
            }
        }
        memo.insert((j, s), ok);
        ok
    }
    (0..m).any(|s| {
        on.get(&p[s]).map(|x| x.0) == Some(0) && connector(0, s) && piece(0, s, p, q, &on, &connector, &mut memo)
    })
}

/// Components of `G ∖ X` containing a whole horizontal and a whole vertical
/// path of `pg`.
pub fn privileged_components(g: &Graph, pg: &Pseudogrid, x: &VertexSet) -> Vec<VertexSet> {
    let removed: Vec<bool> = (0..g.n()).map(|v| x.contains(&v)).collect();
    g.components_avoiding(&removed)
        .into_iter()
        .map(|c| c.into_iter().collect::<VertexSet>())
        .filter(|c| {
            let inside = |p: &Vec<usize>| p.iter().all(|v| c.contains(v));
            pg.horizontal.iter().any(inside) && pg.vertical.iter().any(inside)
        })
        .collect()
}

/// `○` asks for the privileged component, `●` for everything left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    Hollow,
    Filled,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Hollow => "○",
            Flag::Filled => "●",
        })
    }
}

/// A non-empty string over `{○, ●}`; `o` and `*` are accepted as ASCII
/// spellings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario(Vec<Flag>);

impl Scenario {
    pub fn new(flags: Vec<Flag>) -> Result<Self> {
        if flags.is_empty() {
            return Err(Error::Invalid("a scenario has length at least 1".into()));
        }
        Ok(Scenario(flags))
    }

    pub fn flags(&self) -> &[Flag] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let flags = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '○' | 'o' => Ok(Flag::Hollow),
                '●' | '*' => Ok(Flag::Filled),
                other => Err(Error::Invalid(format!("`{other}` is not a scenario symbol"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(flags)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for flag in &self.0 {
            write!(f, "{flag}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivilegedSequence {
    /// `C_1, …, C_{h+1}`.
    pub sets: Vec<VertexSet>,
    /// Whether `X_i ⊆ C_{i+1}` for every `i`.
    pub modulators_inside: bool,
}

impl PrivilegedSequence {
    /// `C_1`.
    pub fn privileged_set(&self) -> &VertexSet {
        &self.sets[0]
    }
}

/// The `w`-privileged sequence; `w_i` (the `i`-th symbol, 1-based) decides
/// `C_i`. `C_{h+1} = V(G)`; for `w_i = ○`, `C_i` is the privileged component
/// of `G ∖ (X_i ∪ … ∪ X_h)` or `∅`; for `w_i = ●`, `C_i = C_{i+1} ∖ X_i`.
pub fn w_privileged_sequence(g: &Graph, pg: &Pseudogrid, xs: &[VertexSet], w: &Scenario) -> Result<PrivilegedSequence> {
    let h = xs.len();
    if w.len() != h {
        return Err(Error::Invalid(format!(
            "scenario has length {} but there are {h} modulators",
            w.len()
        )));
    }
    let mut seen = VertexSet::new();
    for x in xs {
        for &v in x {
            if v >= g.n() {
                return Err(Error::NoSuchVertex(v));
            }
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("modulators overlap at {v}")));
            }
        }
    }
    let mut sets = vec![VertexSet::new(); h + 1];
    sets[h] = (0..g.n()).collect();
    let mut union = VertexSet::new();
    for i in (0..h).rev() {
        union.extend(xs[i].iter().copied());
        sets[i] = match w.flags()[i] {
            Flag::Hollow => privileged_components(g, pg, &union)
                .into_iter()
                .next()
                .unwrap_or_default(),
            Flag::Filled => sets[i + 1].difference(&xs[i]).copied().collect(),
        };
    }
    let modulators_inside = (0..h).all(|i| xs[i].is_subset(&sets[i + 1]));
    Ok(PrivilegedSequence {
        sets,
        modulators_inside,
    })
}
