//! Regular bipartite host graphs, with the hypercube as a bit-parallel special case.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vertex_set::{Vertex, VertexSet};

/// Largest supported hypercube dimension.
pub const MAX_DIMENSION: usize = 20;
/// Largest supported vertex count for any host graph.
pub const MAX_VERTICES: usize = 1 << MAX_DIMENSION;

/// One of the two bipartition classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

/// Parity class of a hypercube vertex. Even vertices form `X`, odd ones `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: Vertex) -> Parity {
        if v.weight().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn side(self) -> Side {
        match self {
            Parity::Even => Side::X,
            Parity::Odd => Side::Y,
        }
    }
}

#[derive(Clone, Debug)]
enum Topology {
    Hypercube,
    /// Flat adjacency, `degree` entries per vertex, each row sorted ascending.
    Explicit(Vec<u32>),
}

/// A `d`-regular bipartite graph with classes `X` and `Y`.
///
/// Immutable once built; every query is a pure function of the graph and its arguments.
#[derive(Debug)]
pub struct RegularBipartiteGraph {
    degree: usize,
    vertex_count: usize,
    class_x: VertexSet,
    class_y: VertexSet,
    topology: Topology,
    co_degree_y: OnceLock<usize>,
    co_degree_x: OnceLock<usize>,
}

impl Clone for RegularBipartiteGraph {
    fn clone(&self) -> Self {
        RegularBipartiteGraph {
            degree: self.degree,
            vertex_count: self.vertex_count,
            class_x: self.class_x.clone(),
            class_y: self.class_y.clone(),
            topology: self.topology.clone(),
            co_degree_y: self.co_degree_y.clone(),
            co_degree_x: self.co_degree_x.clone(),
        }
    }
}

/// Edges running between two vertex sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeBoundary {
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(Vertex, Vertex)>>,
}

/// Builds the hypercube `Q_d` with `X` = even vertices and `Y` = odd vertices.
pub fn build_hypercube(d: usize) -> Result<RegularBipartiteGraph> {
    if !(1..=MAX_DIMENSION).contains(&d) {
        return Err(Error::SizeLimit(format!(
            "hypercube dimension {d} outside 1..={MAX_DIMENSION}"
        )));
    }
    let n = 1usize << d;
    let mut class_x = VertexSet::new(n);
    for v in 0..n as u32 {
        if v.count_ones() % 2 == 0 {
            class_x.insert(Vertex(v));
        }
    }
    let class_y = class_x.complement();
    Ok(RegularBipartiteGraph {
        degree: d,
        vertex_count: n,
        class_x,
        class_y,
        topology: Topology::Hypercube,
        co_degree_y: OnceLock::new(),
        co_degree_x: OnceLock::new(),
    })
}

impl RegularBipartiteGraph {
    /// Builds a graph from an explicit edge list `(x, y)` with `x < n_x <= y < n_x + n_y`.
    ///
    /// Validation here is structural only; `graph_io` reports line-accurate errors for files.
    pub fn from_edges(degree: usize, n_x: usize, n_y: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let n = n_x + n_y;
        if degree == 0 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::SizeLimit(format!(
                "{n} vertices exceeds {MAX_VERTICES}"
            )));
        }
        let mut rows: Vec<Vec<u32>> = vec![Vec::with_capacity(degree); n];
        for &(x, y) in edges {
            let (xs, ys) = (x as usize, y as usize);
            if xs >= n || ys >= n {
                return Err(Error::Domain(format!(
                    "edge ({x}, {y}) outside vertex range"
                )));
            }
            if (xs < n_x) == (ys < n_x) {
                return Err(Error::Domain(format!("edge ({x}, {y}) inside one class")));
            }
            rows[xs].push(y);
            rows[ys].push(x);
        }
        let mut adjacency = Vec::with_capacity(n * degree);
        for (v, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("duplicate edge at vertex {v}")));
            }
            if row.len() != degree {
                return Err(Error::Domain(format!(
                    "vertex {v} has degree {} instead of {degree}",
                    row.len()
                )));
            }
            adjacency.extend_from_slice(row);
        }
        let class_x = VertexSet::from_ids(n, 0..n_x as u32);
        let class_y = class_x.complement();
        Ok(RegularBipartiteGraph {
            degree,
            vertex_count: n,
            class_x,
            class_y,
            topology: Topology::Explicit(adjacency),
            co_degree_y: OnceLock::new(),
            co_degree_x: OnceLock::new(),
        })
    }

    /// The complete bipartite graph `K_{n,n}`.
    pub fn complete_bipartite(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n);
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                edges.push((x, n as u32 + y));
            }
        }
        Self::from_edges(n, n, n, &edges)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.degree * self.class_x.count()
    }

    pub fn is_hypercube(&self) -> bool {
        matches!(self.topology, Topology::Hypercube)
    }

    pub fn class(&self, side: Side) -> &VertexSet {
        match side {
            Side::X => &self.class_x,
            Side::Y => &self.class_y,
        }
    }

    pub fn class_x(&self) -> &VertexSet {
        &self.class_x
    }

    pub fn class_y(&self) -> &VertexSet {
        &self.class_y
    }

    pub fn side_of(&self, v: Vertex) -> Side {
        if self.class_x.contains(v) {
            Side::X
        } else {
            Side::Y
        }
    }

    /// Side containing every member of `set`; `None` for the empty set.
    pub fn side_of_set(&self, set: &VertexSet) -> Result<Option<Side>> {
        self.check_set(set)?;
        let in_x = !set.is_disjoint(&self.class_x);
        let in_y = !set.is_disjoint(&self.class_y);
        match (in_x, in_y) {
            (false, false) => Ok(None),
            (true, false) => Ok(Some(Side::X)),
            (false, true) => Ok(Some(Side::Y)),
            (true, true) => Err(Error::Domain("set meets both bipartition classes".into())),
        }
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.vertex_count)
    }

    pub fn set_of<I>(&self, ids: I) -> VertexSet
    where
        I: IntoIterator,
        I::Item: Into<Vertex>,
    {
        VertexSet::from_ids(self.vertex_count, ids)
    }

    pub(crate) fn check_set(&self, set: &VertexSet) -> Result<()> {
        if set.universe() != self.vertex_count {
            return Err(Error::Domain(format!(
                "set over {} vertices used with a {}-vertex graph",
                set.universe(),
                self.vertex_count
            )));
        }
        Ok(())
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v.index() >= self.vertex_count {
            return Err(Error::Domain(format!("vertex {v} outside graph")));
        }
        Ok(())
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: Vertex) -> Neighbors<'_> {
        match &self.topology {
            Topology::Hypercube => Neighbors::Cube {
                v: v.0,
                d: self.degree as u32,
                i: 0,
            },
            Topology::Explicit(adj) => {
                let start = v.index() * self.degree;
                Neighbors::List(adj[start..start + self.degree].iter())
            }
        }
    }

    /// `d_B(v)`: number of neighbors of `v` inside `set`.
    #[inline]
    pub fn degree_into(&self, v: Vertex, set: &VertexSet) -> usize {
        self.neighbors(v).filter(|&w| set.contains(w)).count()
    }

    /// `N(A)`: every vertex adjacent to some member of `set`.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        assert_eq!(set.universe(), self.vertex_count, "set universe mismatch");
        match &self.topology {
            Topology::Hypercube => {
                let mut out = self.empty_set();
                for i in 0..self.degree {
                    out.union_with(&flip_coordinate(set, i));
                }
                out
            }
            Topology::Explicit(_) => {
                let mut out = self.empty_set();
                for u in set {
                    for w in self.neighbors(u) {
                        out.insert(w);
                    }
                }
                out
            }
        }
    }

    /// Vertices of `within` whose whole neighborhood lies inside `target`.
    pub fn vertices_with_neighbors_in(&self, target: &VertexSet, within: &VertexSet) -> VertexSet {
        match &self.topology {
            Topology::Hypercube => {
                let mut out = within.clone();
                for i in 0..self.degree {
                    out.intersect_with(&flip_coordinate(target, i));
                }
                out
            }
            Topology::Explicit(_) => {
                // A vertex with all neighbors in `target` has at least one there.
                let mut candidates = self.neighborhood(target);
                candidates.intersect_with(within);
                let mut out = self.empty_set();
                for v in &candidates {
                    if self.neighbors(v).all(|w| target.contains(w)) {
                        out.insert(v);
                    }
                }
                out
            }
        }
    }

    /// Graph distance `rho(u, v)`.
    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        match self.topology {
            Topology::Hypercube => Ok((u.0 ^ v.0).count_ones() as usize),
            Topology::Explicit(_) => {
                if u == v {
                    return Ok(0);
                }
                let mut dist = vec![usize::MAX; self.vertex_count];
                let mut queue = VecDeque::from([u]);
                dist[u.index()] = 0;
                while let Some(x) = queue.pop_front() {
                    for y in self.neighbors(x) {
                        if dist[y.index()] == usize::MAX {
                            dist[y.index()] = dist[x.index()] + 1;
                            if y == v {
                                return Ok(dist[y.index()]);
                            }
                            queue.push_back(y);
                        }
                    }
                }
                Err(Error::NoPath { from: u.0, to: v.0 })
            }
        }
    }

    /// All vertices at distance at most `radius` from `v`, `v` included.
    pub fn ball(&self, v: Vertex, radius: usize) -> VertexSet {
        let mut seen = self.empty_set();
        seen.insert(v);
        let mut frontier = vec![v];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &x in &frontier {
                for y in self.neighbors(x) {
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        seen
    }

    /// Edges with one end in `a` and the other in `b`, each counted once.
    pub fn nabla(&self, a: &VertexSet, b: &VertexSet) -> EdgeBoundary {
        self.nabla_impl(a, b, false)
    }

    /// As [`nabla`](Self::nabla), also listing the edges as `(end in a, end in b)`.
    pub fn nabla_edges(&self, a: &VertexSet, b: &VertexSet) -> EdgeBoundary {
        self.nabla_impl(a, b, true)
    }

    fn nabla_impl(&self, a: &VertexSet, b: &VertexSet, list: bool) -> EdgeBoundary {
        let mut count = 0;
        let mut edges = list.then(Vec::new);
        for u in a {
            for w in self.neighbors(u) {
                if !b.contains(w) {
                    continue;
                }
                // Both orientations qualify: keep the one starting at the smaller id.
                if w < u && a.contains(w) && b.contains(u) {
                    continue;
                }
                count += 1;
                if let Some(e) = edges.as_mut() {
                    e.push((u, w));
                }
            }
        }
        EdgeBoundary { count, edges }
    }

    /// Co-degree: the largest number of common neighbors of two distinct vertices of `Y`.
    ///
    /// Returns 0 when `Y` has fewer than two vertices.
    pub fn co_degree(&self) -> usize {
        *self
            .co_degree_y
            .get_or_init(|| self.compute_co_degree(Side::Y))
    }

    /// Co-degree measured over pairs from `side`.
    pub fn co_degree_of(&self, side: Side) -> usize {
        match side {
            Side::Y => self.co_degree(),
            Side::X => *self
                .co_degree_x
                .get_or_init(|| self.compute_co_degree(Side::X)),
        }
    }

    fn compute_co_degree(&self, side: Side) -> usize {
        if self.is_hypercube() {
            // Two vertices at distance 2 share exactly two neighbors.
            return if self.degree >= 2 { 2 } else { 0 };
        }
        self.count_co_degree(side)
    }

    fn count_co_degree(&self, side: Side) -> usize {
        let mut shared = vec![0u32; self.vertex_count];
        let mut touched = Vec::new();
        let mut best = 0u32;
        for y in self.class(side) {
            for x in self.neighbors(y) {
                for z in self.neighbors(x) {
                    if z == y {
                        continue;
                    }
                    if shared[z.index()] == 0 {
                        touched.push(z);
                    }
                    shared[z.index()] += 1;
                }
            }
            for z in touched.drain(..) {
                best = best.max(shared[z.index()]);
                shared[z.index()] = 0;
            }
        }
        best as usize
    }

    /// Checks the structural invariants: regularity, bipartiteness and the class partition.
    pub fn validate(&self) -> Result<()> {
        if !self.class_x.is_disjoint(&self.class_y)
            || (&self.class_x | &self.class_y).count() != self.vertex_count
        {
            return Err(Error::Domain(
                "classes do not partition the vertices".into(),
            ));
        }
        for v in 0..self.vertex_count as u32 {
            let v = Vertex(v);
            let side = self.side_of(v);
            let mut count = 0;
            for w in self.neighbors(v) {
                count += 1;
                if self.side_of(w) == side {
                    return Err(Error::Domain(format!("edge {v}-{w} inside one class")));
                }
            }
            if count != self.degree {
                return Err(Error::Domain(format!("vertex {v} has degree {count}")));
            }
        }
        Ok(())
    }
}

pub enum Neighbors<'a> {
    Cube { v: u32, d: u32, i: u32 },
    List(std::slice::Iter<'a, u32>),
}

impl Iterator for Neighbors<'_> {
    type Item = Vertex;

    #[inline]
    fn next(&mut self) -> Option<Vertex> {
        match self {
            // Ascending id order: flipping a set bit lowers the id, so walk those
            // from the top coordinate down, then the clear bits upward.
            Neighbors::Cube { v, d, i } => {
                while *i < 2 * *d {
                    let step = *i;
                    *i += 1;
                    if step < *d {
                        let bit = *d - 1 - step;
                        if *v >> bit & 1 == 1 {
                            return Some(Vertex(*v ^ (1 << bit)));
                        }
                    } else {
                        let bit = step - *d;
                        if *v >> bit & 1 == 0 {
                            return Some(Vertex(*v ^ (1 << bit)));
                        }
                    }
                }
                None
            }
            Neighbors::List(it) => it.next().map(|&w| Vertex(w)),
        }
    }
}

const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Image of a hypercube vertex set under flipping coordinate `i`, one word at a time.
fn flip_coordinate(set: &VertexSet, i: usize) -> VertexSet {
    let words = set.words();
    let out = if i < 6 {
        let shift = 1u32 << i;
        let mask = LOW_HALF[i];
        words
            .iter()
            .map(|&w| ((w & mask) << shift) | ((w >> shift) & mask))
            .collect()
    } else {
        let stride = 1usize << (i - 6);
        (0..words.len()).map(|k| words[k ^ stride]).collect()
    };
    VertexSet::from_words(set.universe(), out)
}

/// Parses an MSB-first bit string such as `"011"` into a hypercube vertex.
pub fn vertex_from_bits(bits: &str) -> Result<Vertex> {
    u32::from_str_radix(bits, 2)
        .map(Vertex)
        .map_err(|e| Error::Domain(format!("bad bit string {bits:?}: {e}")))
}

/// MSB-first bit string of `v` padded to width `d`.
pub fn bits_of(v: Vertex, d: usize) -> String {
    format!("{:0width$b}", v.0, width = d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: usize) -> RegularBipartiteGraph {
        build_hypercube(d).unwrap()
    }

    fn bits(s: &str) -> Vertex {
        vertex_from_bits(s).unwrap()
    }

    #[test]
    fn small_cubes() {
        let g = q(1);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.class_x().count(), 1);
        assert_eq!(g.class_y().count(), 1);

        let g = q(2);
        assert_eq!(g.class_x().to_vec(), vec![0b00, 0b11]);
        assert_eq!(g.class_y().to_vec(), vec![0b01, 0b10]);
        assert_eq!(g.edge_count(), 4);
        g.validate().unwrap();
    }

    #[test]
    fn dimension_range() {
        assert!(matches!(build_hypercube(0), Err(Error::SizeLimit(_))));
        assert!(matches!(build_hypercube(21), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn neighborhoods() {
        let g = q(3);
        let a = g.set_of([bits("000")]);
        assert_eq!(g.neighborhood(&a).to_vec(), vec![0b001, 0b010, 0b100]);
        assert!(g.neighborhood(&g.empty_set()).is_empty());
        let g2 = q(2);
        let e = g2.set_of([bits("00"), bits("11")]);
        assert_eq!(g2.neighborhood(&e).to_vec(), vec![0b01, 0b10]);
    }

    #[test]
    fn neighbors_ascending() {
        let g = q(5);
        for v in 0..32u32 {
            let ns: Vec<u32> = g.neighbors(Vertex(v)).map(Vertex::id).collect();
            let mut sorted = ns.clone();
            sorted.sort_unstable();
            assert_eq!(ns, sorted);
            assert_eq!(ns.len(), 5);
        }
    }

    #[test]
    fn bit_parallel_matches_lists() {
        for d in [3usize, 6, 7, 8] {
            let g = q(d);
            let set = g.set_of((0..g.vertex_count() as u32).filter(|v| v % 5 == 1 || v % 7 == 3));
            let mut expect = g.empty_set();
            for u in &set {
                for i in 0..d {
                    expect.insert(Vertex(u.0 ^ (1 << i)));
                }
            }
            assert_eq!(g.neighborhood(&set), expect, "d = {d}");
        }
    }

    #[test]
    fn distances() {
        let g = q(3);
        assert_eq!(g.distance(bits("000"), bits("111")).unwrap(), 3);
        assert_eq!(g.distance(bits("000"), bits("000")).unwrap(), 0);
        let g4 = q(4);
        assert_eq!(g4.distance(bits("0000"), bits("0011")).unwrap(), 2);
    }

    #[test]
    fn explicit_distance_and_no_path() {
        // two disjoint 4-cycles
        let edges = [
            (0, 4),
            (0, 5),
            (1, 4),
            (1, 5),
            (2, 6),
            (2, 7),
            (3, 6),
            (3, 7),
        ];
        let g = RegularBipartiteGraph::from_edges(2, 4, 4, &edges).unwrap();
        assert_eq!(g.distance(Vertex(0), Vertex(1)).unwrap(), 2);
        assert_eq!(g.distance(Vertex(0), Vertex(5)).unwrap(), 1);
        assert_eq!(
            g.distance(Vertex(0), Vertex(2)),
            Err(Error::NoPath { from: 0, to: 2 })
        );
    }

    #[test]
    fn nabla_counts() {
        let g = q(3);
        let a = g.set_of([bits("000")]);
        assert_eq!(g.nabla(&a, g.class_y()).count, 3);
        assert_eq!(g.nabla(g.class_x(), g.class_y()).count, 12);
        let g2 = q(2);
        assert_eq!(g2.nabla(&g2.set_of([0u32]), &g2.set_of([3u32])).count, 0);
        // symmetric overlap counts each edge once
        let all = VertexSet::full(8);
        assert_eq!(g.nabla(&all, &all).count, 12);
        let listed = g.nabla_edges(&a, g.class_y());
        assert_eq!(listed.edges.unwrap().len(), 3);
    }

    #[test]
    fn co_degrees() {
        for d in 2..=6 {
            assert_eq!(q(d).co_degree(), 2, "d = {d}");
            assert_eq!(q(d).count_co_degree(Side::Y), 2, "d = {d}");
            assert_eq!(q(d).co_degree_of(Side::X), 2, "d = {d}");
        }
        assert_eq!(q(1).co_degree(), 0);
        let k33 = RegularBipartiteGraph::complete_bipartite(3).unwrap();
        assert_eq!(k33.co_degree(), 3);
        k33.validate().unwrap();
    }

    #[test]
    fn bit_strings() {
        assert_eq!(bits("011"), Vertex(3));
        assert_eq!(bits_of(Vertex(3), 3), "011");
        assert!(vertex_from_bits("012").is_err());
    }

    #[test]
    fn explicit_matches_cube() {
        let cube = q(4);
        let mut edges = Vec::new();
        // relabel evens to 0..8 and odds to 8..16
        let evens = cube.class_x().to_vec();
        let odds = cube.class_y().to_vec();
        let pos = |v: u32| -> u32 {
            evens
                .iter()
                .position(|&e| e == v)
                .map(|p| p as u32)
                .unwrap_or_else(|| 8 + odds.iter().position(|&o| o == v).unwrap() as u32)
        };
        for &x in &evens {
            for y in cube.neighbors(Vertex(x)) {
                edges.push((pos(x), pos(y.0)));
            }
        }
        let g = RegularBipartiteGraph::from_edges(4, 8, 8, &edges).unwrap();
        assert_eq!(g.co_degree(), 2);
        let a = g.set_of([0u32, 1]);
        assert_eq!(g.neighborhood(&a).count(), 6);
    }
}
