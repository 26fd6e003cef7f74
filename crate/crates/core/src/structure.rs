//! Closure, smallness, k-linkage and k-components of one-sided vertex sets.

use std::collections::{HashSet, VecDeque};
use std::ops::ControlFlow;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{RegularBipartiteGraph, Side};
use crate::vertex_set::{Vertex, VertexSet};

/// `A` together with its closure and neighborhood.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetStats {
    pub set: VertexSet,
    pub closure: VertexSet,
    pub neighborhood: VertexSet,
    /// `|[A]|`
    pub a: usize,
    /// `|N(A)|`
    pub g: usize,
    /// `g - a`
    pub t: i64,
}

/// Maximal k-linked pieces of a set, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentDecomposition {
    pub parts: Vec<VertexSet>,
    pub k: usize,
}

/// The closure `[A] = {v : N(v) ⊆ N(A)}`, taken inside the class of `A`.
pub fn closure(g: &RegularBipartiteGraph, a: &VertexSet) -> Result<VertexSet> {
    let Some(side) = g.side_of_set(a)? else {
        return Ok(g.empty_set());
    };
    Ok(closure_on_side(g, a, side))
}

pub(crate) fn closure_on_side(g: &RegularBipartiteGraph, a: &VertexSet, side: Side) -> VertexSet {
    let n = g.neighborhood(a);
    g.vertices_with_neighbors_in(&n, g.class(side))
}

/// `|[A]| <= |X| / 2`, where `X` is the class holding `A`. The empty set is small.
pub fn is_small(g: &RegularBipartiteGraph, a: &VertexSet) -> Result<bool> {
    let Some(side) = g.side_of_set(a)? else {
        return Ok(true);
    };
    let c = closure_on_side(g, a, side).count();
    Ok(2 * c <= g.class(side).count())
}

pub fn is_k_linked(g: &RegularBipartiteGraph, a: &VertexSet, k: usize) -> Result<bool> {
    Ok(k_components(g, a, k)?.parts.len() <= 1)
}

pub fn k_components(
    g: &RegularBipartiteGraph,
    a: &VertexSet,
    k: usize,
) -> Result<ComponentDecomposition> {
    if k == 0 {
        return Err(Error::Domain(
            "linkage distance k must be at least 1".into(),
        ));
    }
    g.check_set(a)?;
    let oracle = LinkageOracle::new(g, k);
    Ok(ComponentDecomposition {
        parts: oracle.components(a),
        k,
    })
}

pub fn set_stats(g: &RegularBipartiteGraph, a: &VertexSet) -> Result<SetStats> {
    let side = g
        .side_of_set(a)?
        .ok_or_else(|| Error::Domain("set statistics need a nonempty set".into()))?;
    let neighborhood = g.neighborhood(a);
    let closure = g.vertices_with_neighbors_in(&neighborhood, g.class(side));
    let (ac, gc) = (closure.count(), neighborhood.count());
    Ok(SetStats {
        set: a.clone(),
        closure,
        neighborhood,
        a: ac,
        g: gc,
        t: gc as i64 - ac as i64,
    })
}

/// Answers "which vertices lie within distance k of v" for one graph and one k.
///
/// Hypercube queries walk the xor masks of weight at most k; balls in explicit
/// graphs are computed once per vertex and memoized.
pub struct LinkageOracle<'g> {
    graph: &'g RegularBipartiteGraph,
    k: usize,
    masks: Vec<u32>,
    balls: Vec<OnceLock<Box<[u32]>>>,
}

impl<'g> LinkageOracle<'g> {
    pub fn new(graph: &'g RegularBipartiteGraph, k: usize) -> Self {
        let (masks, balls) = if graph.is_hypercube() {
            (weight_masks(graph.degree(), k), Vec::new())
        } else {
            let mut balls = Vec::new();
            balls.resize_with(graph.vertex_count(), OnceLock::new);
            (Vec::new(), balls)
        };
        LinkageOracle {
            graph,
            k,
            masks,
            balls,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &'g RegularBipartiteGraph {
        self.graph
    }

    /// Calls `f` for every `w != v` with `rho(v, w) <= k`.
    pub fn for_each_near(&self, v: Vertex, mut f: impl FnMut(Vertex)) {
        if self.graph.is_hypercube() {
            for &m in &self.masks {
                f(Vertex(v.0 ^ m));
            }
        } else {
            let ball = self.balls[v.index()].get_or_init(|| self.explicit_ball(v));
            for &w in ball.iter() {
                f(Vertex(w));
            }
        }
    }

    fn explicit_ball(&self, v: Vertex) -> Box<[u32]> {
        let mut seen = HashSet::from([v]);
        let mut queue = VecDeque::from([(v, 0usize)]);
        let mut out = Vec::new();
        while let Some((x, depth)) = queue.pop_front() {
            if depth == self.k {
                continue;
            }
            for y in self.graph.neighbors(x) {
                if seen.insert(y) {
                    out.push(y.0);
                    queue.push_back((y, depth + 1));
                }
            }
        }
        out.sort_unstable();
        out.into_boxed_slice()
    }

    /// k-components of `a`, ordered by smallest member.
    pub fn components(&self, a: &VertexSet) -> Vec<VertexSet> {
        let mut unseen = a.clone();
        let mut parts = Vec::new();
        for start in a {
            if !unseen.remove(start) {
                continue;
            }
            let mut part = self.graph.empty_set();
            part.insert(start);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                self.for_each_near(u, |w| {
                    if unseen.remove(w) {
                        part.insert(w);
                        stack.push(w);
                    }
                });
            }
            parts.push(part);
        }
        parts
    }

    pub fn is_linked(&self, a: &VertexSet) -> bool {
        let Some(start) = a.first() else {
            return true;
        };
        let total = a.count();
        let mut seen = self.graph.empty_set();
        seen.insert(start);
        let mut reached = 1;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            self.for_each_near(u, |w| {
                if a.contains(w) && seen.insert(w) {
                    reached += 1;
                    stack.push(w);
                }
            });
        }
        reached == total
    }

    /// Visits every k-linked subset of `within` that contains `root`, avoids `banned`,
    /// and has at most `max_size` members, each exactly once.
    ///
    /// Members are passed in insertion order with `root` first. Returning
    /// `ControlFlow::Break` from the visitor stops the walk.
    pub fn for_each_linked_set<F>(
        &self,
        root: Vertex,
        within: &VertexSet,
        banned: &[Vertex],
        max_size: usize,
        mut visit: F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[Vertex]) -> ControlFlow<()>,
    {
        if max_size == 0 || !within.contains(root) || banned.contains(&root) {
            return ControlFlow::Continue(());
        }
        let mut blocked = vec![false; self.graph.vertex_count()];
        for &b in banned {
            blocked[b.index()] = true;
        }
        blocked[root.index()] = true;
        let mut ext = Vec::new();
        self.for_each_near(root, |w| {
            if within.contains(w) && !blocked[w.index()] {
                blocked[w.index()] = true;
                ext.push(w);
            }
        });
        let mut current = vec![root];
        self.extend(
            &mut current,
            &ext,
            within,
            &mut blocked,
            max_size,
            &mut visit,
        )
    }

    // Invariant: `blocked` marks the current set, every excluded vertex, and every
    // pending extension candidate on the recursion stack.
    fn extend<F>(
        &self,
        current: &mut Vec<Vertex>,
        ext: &[Vertex],
        within: &VertexSet,
        blocked: &mut [bool],
        max_size: usize,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[Vertex]) -> ControlFlow<()>,
    {
        visit(current)?;
        if current.len() == max_size {
            return ControlFlow::Continue(());
        }
        for (i, &w) in ext.iter().enumerate() {
            let mut child = ext[i + 1..].to_vec();
            let fresh_from = child.len();
            self.for_each_near(w, |u| {
                if within.contains(u) && !blocked[u.index()] {
                    blocked[u.index()] = true;
                    child.push(u);
                }
            });
            current.push(w);
            let flow = self.extend(current, &child, within, blocked, max_size, visit);
            current.pop();
            for u in &child[fresh_from..] {
                blocked[u.index()] = false;
            }
            flow?;
            // `w` stays blocked: later siblings exclude it.
        }
        ControlFlow::Continue(())
    }
}

/// All nonzero masks of Hamming weight at most `k` over `d` bits, ascending.
fn weight_masks(d: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(d: usize, start: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if acc != 0 {
            out.push(acc);
        }
        if left == 0 {
            return;
        }
        for i in start..d {
            rec(d, i + 1, left - 1, acc | (1 << i), out);
        }
    }
    rec(d, 0, k.min(d), 0, &mut out);
    out.sort_unstable();
    out
}

/// Bitmask linkage for graphs with at most 64 vertices, used by exhaustive sweeps.
#[derive(Clone, Debug)]
pub struct MaskLinkage {
    near: Vec<u64>,
}

impl MaskLinkage {
    pub fn new(g: &RegularBipartiteGraph, k: usize) -> Result<Self> {
        if g.vertex_count() > 64 {
            return Err(Error::SizeLimit(format!(
                "mask linkage needs at most 64 vertices, graph has {}",
                g.vertex_count()
            )));
        }
        let oracle = LinkageOracle::new(g, k);
        let near = (0..g.vertex_count() as u32)
            .map(|v| {
                let mut m = 0u64;
                oracle.for_each_near(Vertex(v), |w| m |= 1 << w.0);
                m
            })
            .collect();
        Ok(MaskLinkage { near })
    }

    pub fn components(&self, set: u64) -> Vec<u64> {
        let mut rest = set;
        let mut parts = Vec::new();
        while rest != 0 {
            let mut part = rest & rest.wrapping_neg();
            let mut frontier = part;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.near[v] & set & !part;
                part |= new;
                frontier |= new;
            }
            rest &= !part;
            parts.push(part);
        }
        parts
    }

    pub fn is_linked(&self, set: u64) -> bool {
        set == 0 || self.components(set).len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hypercube, vertex_from_bits};

    fn q(d: usize) -> RegularBipartiteGraph {
        build_hypercube(d).unwrap()
    }

    fn set(g: &RegularBipartiteGraph, bits: &[&str]) -> VertexSet {
        g.set_of(bits.iter().map(|b| vertex_from_bits(b).unwrap()))
    }

    /// Closure straight from the definition, over all of V.
    fn closure_by_definition(g: &RegularBipartiteGraph, a: &VertexSet) -> VertexSet {
        let n = g.neighborhood(a);
        let mut out = g.empty_set();
        for v in 0..g.vertex_count() as u32 {
            if g.neighbors(Vertex(v)).all(|w| n.contains(w)) {
                out.insert(Vertex(v));
            }
        }
        out
    }

    #[test]
    fn closure_examples() {
        let g2 = q(2);
        assert_eq!(
            closure(&g2, &set(&g2, &["00"])).unwrap(),
            set(&g2, &["00", "11"])
        );
        let g3 = q(3);
        assert_eq!(
            closure(&g3, &set(&g3, &["000"])).unwrap(),
            set(&g3, &["000"])
        );
        assert!(closure(&g3, &g3.empty_set()).unwrap().is_empty());
        let mixed = set(&g3, &["000", "001"]);
        assert!(matches!(closure(&g3, &mixed), Err(Error::Domain(_))));
    }

    #[test]
    fn closure_restriction_is_harmless() {
        for d in 2..=4 {
            let g = q(d);
            let evens = g.class_x().to_vec();
            for mask in 1u32..(1 << evens.len()) {
                let a = g.set_of(
                    evens
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v),
                );
                assert_eq!(closure(&g, &a).unwrap(), closure_by_definition(&g, &a));
            }
        }
    }

    #[test]
    fn smallness() {
        let g3 = q(3);
        assert!(is_small(&g3, &set(&g3, &["000"])).unwrap());
        let g2 = q(2);
        assert!(!is_small(&g2, &set(&g2, &["00"])).unwrap());
        assert!(is_small(&g2, &g2.empty_set()).unwrap());
    }

    #[test]
    fn linkage_examples() {
        let g3 = q(3);
        assert!(is_k_linked(&g3, &set(&g3, &["000", "011"]), 2).unwrap());
        let g4 = q(4);
        assert!(!is_k_linked(&g4, &set(&g4, &["0000", "1111"]), 2).unwrap());
        assert!(is_k_linked(&g4, &set(&g4, &["0101"]), 1).unwrap());
        assert!(is_k_linked(&g4, &g4.empty_set(), 1).unwrap());
        assert!(k_components(&g4, &g4.empty_set(), 0).is_err());
    }

    #[test]
    fn component_examples() {
        let g3 = q(3);
        assert_eq!(k_components(&g3, g3.class_x(), 2).unwrap().parts.len(), 1);
        let g4 = q(4);
        let two = k_components(&g4, &set(&g4, &["0000", "1111"]), 2).unwrap();
        assert_eq!(two.parts, vec![set(&g4, &["0000"]), set(&g4, &["1111"])]);
        let chain = set(&g4, &["0000", "0011", "1111"]);
        assert_eq!(k_components(&g4, &chain, 2).unwrap().parts.len(), 1);
    }

    #[test]
    fn stats_examples() {
        let g3 = q(3);
        let s = set_stats(&g3, &set(&g3, &["000"])).unwrap();
        assert_eq!((s.a, s.g, s.t), (1, 3, 2));
        let g2 = q(2);
        let s = set_stats(&g2, &set(&g2, &["00"])).unwrap();
        assert_eq!((s.a, s.g, s.t), (2, 2, 0));
        let s = set_stats(&g3, &set(&g3, &["000", "011"])).unwrap();
        assert_eq!((s.a, s.g, s.t), (4, 4, 0));
        assert!(set_stats(&g3, &g3.empty_set()).is_err());
    }

    #[test]
    fn mask_linkage_agrees() {
        let g = q(4);
        let mask_link = MaskLinkage::new(&g, 2).unwrap();
        let oracle = LinkageOracle::new(&g, 2);
        for mask in 0u64..(1 << 16) {
            if mask % 7 != 0 {
                continue;
            }
            let s = VertexSet::from_mask(16, mask);
            let expect: Vec<u64> = oracle
                .components(&s)
                .iter()
                .map(VertexSet::to_mask)
                .collect();
            assert_eq!(mask_link.components(mask), expect);
        }
    }

    #[test]
    fn linked_set_enumeration_counts() {
        // connected sets containing a vertex of the 4-cycle: sizes 1,2,3,4 -> 1,2,3,1
        let g = q(2);
        let oracle = LinkageOracle::new(&g, 1);
        let mut by_size = [0usize; 5];
        let all = VertexSet::full(4);
        let _ = oracle.for_each_linked_set(Vertex(0), &all, &[], 4, |s| {
            by_size[s.len()] += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(by_size, [0, 1, 2, 3, 1]);
    }

    #[test]
    fn linked_enumeration_matches_brute_force() {
        let g = q(4);
        for k in 1..=3 {
            let oracle = LinkageOracle::new(&g, k);
            let mask_link = MaskLinkage::new(&g, k).unwrap();
            let all = VertexSet::full(16);
            let mut seen = HashSet::new();
            let _ = oracle.for_each_linked_set(Vertex(5), &all, &[], 16, |s| {
                let m = s.iter().fold(0u64, |m, v| m | 1 << v.0);
                assert!(seen.insert(m), "duplicate {m:#x}");
                ControlFlow::Continue(())
            });
            let expect = (0u64..1 << 16)
                .filter(|m| m >> 5 & 1 == 1 && mask_link.is_linked(*m))
                .count();
            assert_eq!(seen.len(), expect, "k = {k}");
        }
    }
}
