//! Greedy covers of one side of a bipartite incidence structure.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RegularBipartiteGraph;
use crate::vertex_set::{Vertex, VertexSet};

/// A bipartite graph `Γ` on sides `P` and `Q` with local ids `0..|P|` and `0..|Q|`.
#[derive(Clone, Debug)]
pub struct CoverInstance {
    p_adj: Vec<Vec<u32>>,
    q_adj: Vec<Vec<u32>>,
}

/// Result of [`greedy_cover`].
#[derive(Clone, Debug, Serialize)]
pub struct Cover {
    /// Chosen members of `Q`, as a set over `0..|Q|`.
    pub chosen: VertexSet,
    /// Smallest degree on the `P` side (`a`).
    pub min_degree_p: usize,
    /// Largest degree on the `Q` side (`b`).
    pub max_degree_q: usize,
    /// `(|Q| / a)(1 + ln b)`, or `None` when `P` is empty.
    pub bound: Option<f64>,
}

impl CoverInstance {
    /// Builds an instance from `(p, q)` incidences; duplicates are ignored.
    pub fn new(p_count: usize, q_count: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut p_adj = vec![Vec::new(); p_count];
        let mut q_adj = vec![Vec::new(); q_count];
        for &(p, q) in edges {
            if p as usize >= p_count || q as usize >= q_count {
                return Err(Error::Domain(format!("incidence ({p}, {q}) out of range")));
            }
            p_adj[p as usize].push(q);
            q_adj[q as usize].push(p);
        }
        for row in p_adj.iter_mut().chain(q_adj.iter_mut()) {
            row.sort_unstable();
            row.dedup();
        }
        Ok(CoverInstance { p_adj, q_adj })
    }

    /// The subgraph of `g` between `p` and `q`, with local ids in ascending vertex order.
    ///
    /// Returns the instance with the vertex behind each `P` and `Q` id.
    pub fn from_graph(
        g: &RegularBipartiteGraph,
        p: &VertexSet,
        q: &VertexSet,
    ) -> (CoverInstance, Vec<Vertex>, Vec<Vertex>) {
        let p_ids: Vec<Vertex> = p.iter().collect();
        let q_ids: Vec<Vertex> = q.iter().collect();
        let mut q_local = std::collections::HashMap::with_capacity(q_ids.len());
        for (i, &v) in q_ids.iter().enumerate() {
            q_local.insert(v, i as u32);
        }
        let mut edges = Vec::new();
        for (i, &u) in p_ids.iter().enumerate() {
            for w in g.neighbors(u) {
                if let Some(&j) = q_local.get(&w) {
                    edges.push((i as u32, j));
                }
            }
        }
        let inst = CoverInstance::new(p_ids.len(), q_ids.len(), &edges)
            .expect("local ids are in range by construction");
        (inst, p_ids, q_ids)
    }

    pub fn p_count(&self) -> usize {
        self.p_adj.len()
    }

    pub fn q_count(&self) -> usize {
        self.q_adj.len()
    }

    pub fn min_degree_p(&self) -> usize {
        self.p_adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree_q(&self) -> usize {
        self.q_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `(|Q| / a)(1 + ln b)`.
    pub fn lovasz_stein_bound(&self) -> Option<f64> {
        let a = self.min_degree_p();
        if self.p_adj.is_empty() || a == 0 {
            return None;
        }
        let b = self.max_degree_q() as f64;
        Some(self.q_count() as f64 / a as f64 * (1.0 + b.ln()))
    }
}

/// A random `degree`-regular bipartite instance with `n` elements per side: a union of
/// `degree` uniform perfect matchings, each redrawn until it avoids the earlier ones.
pub fn random_regular_instance(n: usize, degree: usize, seed: u64) -> Result<CoverInstance> {
    const RETRIES: u32 = 100_000;
    if degree > n {
        return Err(Error::Domain(format!(
            "degree {degree} exceeds side size {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken = vec![Vec::<u32>::with_capacity(degree); n];
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for _ in 0..degree {
        let mut tries = 0;
        loop {
            perm.shuffle(&mut rng);
            if perm.iter().enumerate().all(|(p, q)| !taken[p].contains(q)) {
                break;
            }
            tries += 1;
            if tries == RETRIES {
                return Err(Error::RandomizedFailure {
                    retries: RETRIES,
                    observed: format!("no simple {degree}-regular draw on {n} + {n} vertices"),
                });
            }
        }
        perm.iter().enumerate().for_each(|(p, &q)| taken[p].push(q));
    }
    let edges: Vec<(u32, u32)> = taken
        .iter()
        .enumerate()
        .flat_map(|(p, qs)| qs.iter().map(move |&q| (p as u32, q)))
        .collect();
    CoverInstance::new(n, n, &edges)
}

/// Greedy cover: repeatedly take the `q` covering the most uncovered `p`, ties to the smallest id.
///
/// Panics if the result exceeds `(|Q| / a)(1 + ln b)`; greedy never does.
pub fn greedy_cover(inst: &CoverInstance) -> Result<Cover> {
    if let Some(p) = inst.p_adj.iter().position(Vec::is_empty) {
        return Err(Error::Infeasible(format!(
            "element {p} of P has no neighbor in Q"
        )));
    }
    let mut gain: Vec<usize> = inst.q_adj.iter().map(Vec::len).collect();
    let mut heap: BinaryHeap<(usize, Reverse<u32>)> = gain
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(q, &k)| (k, Reverse(q as u32)))
        .collect();
    let mut covered = vec![false; inst.p_count()];
    let mut remaining = inst.p_count();
    let mut chosen = VertexSet::new(inst.q_count());
    while remaining > 0 {
        let (k, Reverse(q)) = heap
            .pop()
            .expect("an uncovered element always has a candidate");
        if k != gain[q as usize] {
            if gain[q as usize] > 0 {
                heap.push((gain[q as usize], Reverse(q)));
            }
            continue;
        }
        chosen.insert(Vertex(q));
        for &p in &inst.q_adj[q as usize] {
            if !std::mem::replace(&mut covered[p as usize], true) {
                remaining -= 1;
                for &r in &inst.p_adj[p as usize] {
                    gain[r as usize] -= 1;
                }
            }
        }
    }
    let bound = inst.lovasz_stein_bound();
    if let Some(b) = bound {
        assert!(
            chosen.count() as f64 <= b + 1e-9,
            "greedy cover of size {} exceeds the Lovász–Stein bound {b}",
            chosen.count()
        );
    }
    Ok(Cover {
        chosen,
        min_degree_p: inst.min_degree_p(),
        max_degree_q: inst.max_degree_q(),
        bound,
    })
}

/// Greedy cover of `p` by members of `q` inside a host graph, returned as host vertices.
pub fn greedy_cover_in_graph(
    g: &RegularBipartiteGraph,
    p: &VertexSet,
    q: &VertexSet,
) -> Result<VertexSet> {
    let (inst, _, q_ids) = CoverInstance::from_graph(g, p, q);
    let cover = greedy_cover(&inst)?;
    Ok(g.set_of(cover.chosen.iter().map(|i| q_ids[i.index()])))
}
