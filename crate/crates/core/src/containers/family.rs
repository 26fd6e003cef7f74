use std::ops::ControlFlow;

use rand::seq::IteratorRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{RegularBipartiteGraph, Side};
use crate::structure::LinkageOracle;
use crate::vertex_set::{Vertex, VertexSet};

/// `𝒢(a, g, v)`: every 2-linked `A` on the side opposite `v` with `|[A]| = a`,
/// `|N(A)| = g` and `v ∈ N(A)`, in lexicographic order.
///
/// Each such `A` is found once, rooted at its smallest neighbor of `v`.
pub fn enumerate_g_agv(
    g: &RegularBipartiteGraph,
    a: usize,
    g_size: usize,
    v: Vertex,
    budget: u64,
) -> Result<Vec<VertexSet>> {
    g.check_vertex(v)?;
    if a == 0 {
        return Ok(Vec::new());
    }
    let side = g.side_of(v).other();
    let within = g.class(side);
    let oracle = LinkageOracle::new(g, 2);
    let roots: Vec<Vertex> = g
        .neighbors(v)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut found = Vec::new();
    let mut visited = 0u64;
    for (i, &root) in roots.iter().enumerate() {
        let flow = oracle.for_each_linked_set(root, within, &roots[..i], a, |members| {
            visited += 1;
            if visited > budget {
                return ControlFlow::Break(());
            }
            let set = g.set_of(members.iter().copied());
            let n = g.neighborhood(&set);
            if n.count() == g_size && g.vertices_with_neighbors_in(&n, within).count() == a {
                found.push(set);
            }
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            return Err(Error::EnumerationLimit {
                limit: budget,
                progress: visited - 1,
                context: format!("2-linked sets with a = {a}, g = {g_size} around vertex {v}"),
            });
        }
    }
    found.sort_by(VertexSet::cmp_lex);
    Ok(found)
}

/// Every nonempty 2-linked subset of `side` with at most `max_size` members, in
/// lexicographic order.
pub fn two_linked_sets(
    g: &RegularBipartiteGraph,
    side: Side,
    max_size: usize,
    budget: u64,
) -> Result<Vec<VertexSet>> {
    let within = g.class(side);
    let oracle = LinkageOracle::new(g, 2);
    let roots: Vec<Vertex> = within.iter().collect();
    let mut found = Vec::new();
    for (i, &root) in roots.iter().enumerate() {
        let flow = oracle.for_each_linked_set(root, within, &roots[..i], max_size, |members| {
            if found.len() as u64 >= budget {
                return ControlFlow::Break(());
            }
            found.push(g.set_of(members.iter().copied()));
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            return Err(Error::EnumerationLimit {
                limit: budget,
                progress: budget,
                context: "2-linked subsets of one class".into(),
            });
        }
    }
    found.sort_by(VertexSet::cmp_lex);
    Ok(found)
}

/// A random 2-linked subset of `side` with `size` members, grown one vertex at a time
/// from a uniform start by adding a uniform vertex within distance 2.
pub fn sample_two_linked<R: Rng>(
    g: &RegularBipartiteGraph,
    side: Side,
    size: usize,
    rng: &mut R,
) -> Result<VertexSet> {
    let class = g.class(side);
    if size == 0 || size > class.count() {
        return Err(Error::Domain(format!(
            "cannot sample {size} vertices from a class of {}",
            class.count()
        )));
    }
    let oracle = LinkageOracle::new(g, 2);
    let start = class.iter().choose(rng).expect("class is nonempty");
    let mut set = g.empty_set();
    set.insert(start);
    let mut frontier = g.empty_set();
    oracle.for_each_near(start, |w| {
        frontier.insert(w);
    });
    frontier.intersect_with(class);
    while set.count() < size {
        let Some(next) = frontier.iter().choose(rng) else {
            // The class is not 2-linked; what was reached is all there is.
            return Err(Error::Infeasible(format!(
                "2-component of {start} has fewer than {size} vertices"
            )));
        };
        set.insert(next);
        oracle.for_each_near(next, |w| {
            if class.contains(w) && !set.contains(w) {
                frontier.insert(w);
            }
        });
        frontier.remove(next);
    }
    Ok(set)
}
