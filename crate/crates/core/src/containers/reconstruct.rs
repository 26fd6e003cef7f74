use std::collections::HashSet;

use serde::Serialize;

use super::ContainerParams;
use crate::error::{Error, Result};
use crate::graph::{RegularBipartiteGraph, Side};
use crate::structure::LinkageOracle;
use crate::vertex_set::{Vertex, VertexSet};

/// The class `𝒢(a, g, v)` a reconstructed set must belong to; `t = g - a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Targets {
    pub a: usize,
    pub g: usize,
    pub t: usize,
    pub v: Vertex,
}

impl Targets {
    pub fn new(a: usize, g: usize, v: Vertex) -> Result<Self> {
        if g < a {
            return Err(Error::Domain(format!("need a ≤ g, got a = {a}, g = {g}")));
        }
        Ok(Targets { a, g, t: g - a, v })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `|S| < g - γt`: every subset of `S`.
    Small,
    /// Otherwise: subsets of the closure of `F ∪ D` for small `D ⊆ N(S) ∖ F`.
    Large,
}

/// Every set listed from one `(F, S)` pair, before filtering.
pub struct RawCandidates<'g> {
    g: &'g RegularBipartiteGraph,
    side: Side,
    f: VertexSet,
    budget: u64,
    emitted: u64,
    failed: bool,
    /// Members whose subsets are being listed, with the next and end masks.
    current: Option<(Vec<Vertex>, u64, u64)>,
    /// Large branch only: extensions `D ⊆ pool` of at most `max_extra` members.
    pool: Vec<Vertex>,
    max_extra: usize,
    /// Indices into `pool` of the next `D`; `None` once exhausted.
    choice: Option<Vec<usize>>,
    seen: HashSet<Vec<u32>>,
}

fn subset_range(members: &[Vertex]) -> Result<u64> {
    if members.len() > 62 {
        return Err(Error::SizeLimit(format!(
            "cannot list the subsets of a {}-element set",
            members.len()
        )));
    }
    Ok(1u64 << members.len())
}

fn subset_of(g: &RegularBipartiteGraph, members: &[Vertex], mask: u64) -> VertexSet {
    g.set_of(
        members
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v),
    )
}

/// Next `k`-combination of `0..n` in lexicographic order, moving to size `k + 1`
/// after the last one; `false` past size `max`.
fn advance(choice: &mut Vec<usize>, n: usize, max: usize) -> bool {
    let k = choice.len();
    for i in (0..k).rev() {
        if choice[i] < n - k + i {
            choice[i] += 1;
            for j in i + 1..k {
                choice[j] = choice[j - 1] + 1;
            }
            return true;
        }
    }
    if k < max && k < n {
        *choice = (0..=k).collect();
        return true;
    }
    false
}

impl RawCandidates<'_> {
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Moves to the closure of the next unseen `F ∪ D`; `false` when none is left.
    fn next_extension(&mut self) -> Result<bool> {
        while let Some(choice) = self.choice.as_mut() {
            let mut target = self.f.clone();
            for &i in choice.iter() {
                target.insert(self.pool[i]);
            }
            if !advance(choice, self.pool.len(), self.max_extra) {
                self.choice = None;
            }
            let closure = self
                .g
                .vertices_with_neighbors_in(&target, self.g.class(self.side));
            if self.seen.insert(closure.to_vec()) {
                let members: Vec<Vertex> = closure.iter().collect();
                self.current = Some((subset_range(&members).map(|end| (members, 0, end)))?);
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl Iterator for RawCandidates<'_> {
    type Item = Result<VertexSet>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            if let Some((members, next, end)) = self.current.as_mut() {
                if *next < *end {
                    let out = subset_of(self.g, members, *next);
                    *next += 1;
                    self.emitted += 1;
                    if self.emitted > self.budget {
                        self.failed = true;
                        return Some(Err(Error::EnumerationLimit {
                            limit: self.budget,
                            progress: self.emitted - 1,
                            context: "reconstruction candidates".into(),
                        }));
                    }
                    return Some(Ok(out));
                }
                self.current = None;
            }
            match self.next_extension() {
                Ok(true) => continue,
                Ok(false) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Hypothesis checks on the `(F, S)` pair; violations are reported, not fatal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// `|S| ≤ |F| + 2tψ / (d - ψ)`
    pub size_bound: bool,
    /// `F ⊆ N(S)`
    pub f_within_neighborhood: bool,
}

/// The filtered stream: members of `𝒢(a, g, v)` listed from `(F, S)`.
pub struct Reconstruction<'g> {
    pub branch: Branch,
    pub hypotheses: Hypotheses,
    pub targets: Targets,
    raw: RawCandidates<'g>,
    oracle: LinkageOracle<'g>,
}

impl<'g> Reconstruction<'g> {
    /// The unfiltered candidate stream.
    pub fn raw(self) -> RawCandidates<'g> {
        self.raw
    }

    fn accepts(&self, candidate: &VertexSet) -> bool {
        let g = self.raw.g;
        let n = g.neighborhood(candidate);
        n.contains(self.targets.v)
            && n.count() == self.targets.g
            && g.vertices_with_neighbors_in(&n, g.class(self.raw.side))
                .count()
                == self.targets.a
            && self.oracle.is_linked(candidate)
    }
}

impl Iterator for Reconstruction<'_> {
    type Item = Result<VertexSet>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.raw.next()? {
                Ok(c) if self.accepts(&c) => return Some(Ok(c)),
                Ok(_) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Lists every `A ∈ 𝒢(a, g, v)` with `F ⊆ N(A)` and `[A] ⊆ S`, possibly with repeats.
///
/// `A` lives in the class not containing `v`. The large branch takes extensions
/// `D` with `|D| ≤ 2tψ/(d - ψ) + γt`.
pub fn reconstruct_family<'g>(
    g: &'g RegularBipartiteGraph,
    f: &VertexSet,
    s: &VertexSet,
    targets: Targets,
    params: &ContainerParams,
    budget: u64,
) -> Result<Reconstruction<'g>> {
    g.check_set(f)?;
    g.check_set(s)?;
    g.check_vertex(targets.v)?;
    let d = g.degree();
    let psi = params.psi;
    if psi == 0 || psi >= d {
        return Err(Error::Precondition(format!(
            "ψ must lie in [1, {}], got {psi}",
            d.saturating_sub(1)
        )));
    }
    let side = g.side_of(targets.v).other();
    if !s.is_subset(g.class(side)) || !f.is_subset(g.class(side.other())) {
        return Err(Error::Precondition(
            "S and F must lie on opposite sides, F on the side of v".into(),
        ));
    }

    let ns = g.neighborhood(s);
    let t = targets.t as f64;
    let slack = 2.0 * t * psi as f64 / (d - psi) as f64;
    let hypotheses = Hypotheses {
        size_bound: s.count() as f64 <= f.count() as f64 + slack + 1e-9,
        f_within_neighborhood: f.is_subset(&ns),
    };
    let branch = if (s.count() as f64) < targets.g as f64 - params.gamma * t {
        Branch::Small
    } else {
        Branch::Large
    };
    let mut raw = RawCandidates {
        g,
        side,
        f: f.clone(),
        budget,
        emitted: 0,
        failed: false,
        current: None,
        pool: Vec::new(),
        max_extra: 0,
        choice: None,
        seen: HashSet::new(),
    };
    match branch {
        Branch::Small => {
            let members: Vec<Vertex> = s.iter().collect();
            raw.current = Some((subset_range(&members).map(|end| (members, 0, end)))?);
        }
        Branch::Large => {
            raw.pool = (&ns - f).iter().collect();
            raw.max_extra = (slack + params.gamma * t + 1e-9).floor() as usize;
            raw.choice = Some(Vec::new());
        }
    }
    Ok(Reconstruction {
        branch,
        hypotheses,
        targets,
        raw,
        oracle: LinkageOracle::new(g, 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hypercube, vertex_from_bits};

    fn set(g: &RegularBipartiteGraph, bits: &[&str]) -> VertexSet {
        g.set_of(bits.iter().map(|b| vertex_from_bits(b).unwrap()))
    }

    fn params(gamma: f64, psi: usize) -> ContainerParams {
        ContainerParams {
            gamma,
            psi,
            ..ContainerParams::defaults_for(3).unwrap()
        }
    }

    fn collect(r: impl Iterator<Item = Result<VertexSet>>) -> Vec<Vec<u32>> {
        r.map(|s| s.unwrap().to_vec()).collect()
    }

    #[test]
    fn large_branch_example() {
        let g = build_hypercube(3).unwrap();
        let f = set(&g, &["001", "010", "100"]);
        let s = set(&g, &["000"]);
        let targets = Targets::new(1, 3, vertex_from_bits("001").unwrap()).unwrap();
        let r = reconstruct_family(&g, &f, &s, targets, &params(1.0, 1), 1000).unwrap();
        assert_eq!(r.branch, Branch::Large);
        assert!(r.hypotheses.size_bound && r.hypotheses.f_within_neighborhood);
        assert_eq!(collect(r), vec![vec![0]]);
    }

    #[test]
    fn small_branch_example() {
        let g = build_hypercube(3).unwrap();
        let f = set(&g, &["001", "010", "100"]);
        let s = set(&g, &["000"]);
        let targets = Targets::new(1, 3, vertex_from_bits("001").unwrap()).unwrap();
        let r = reconstruct_family(&g, &f, &s, targets, &params(0.1, 1), 1000).unwrap();
        assert_eq!(r.branch, Branch::Small);
        assert_eq!(collect(r.raw()), vec![vec![], vec![0]]);
        let r = reconstruct_family(&g, &f, &s, targets, &params(0.1, 1), 1000).unwrap();
        assert_eq!(collect(r), vec![vec![0]]);
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let g = build_hypercube(3).unwrap();
        let f = set(&g, &["111"]);
        let s = set(&g, &["000"]);
        let targets = Targets::new(1, 3, vertex_from_bits("001").unwrap()).unwrap();
        let r = reconstruct_family(&g, &f, &s, targets, &params(0.1, 1), 1000).unwrap();
        assert_eq!(r.branch, Branch::Small);
        assert!(!r.hypotheses.f_within_neighborhood);
        assert_eq!(collect(r.raw()), vec![vec![], vec![0]]);
    }

    #[test]
    fn budget_is_enforced() {
        let g = build_hypercube(4).unwrap();
        let s = g.class_x().clone();
        let targets = Targets::new(4, 12, Vertex(1)).unwrap();
        let p = ContainerParams {
            gamma: 0.01,
            ..ContainerParams::defaults_for(4).unwrap()
        };
        let r = reconstruct_family(&g, &g.empty_set(), &s, targets, &p, 10).unwrap();
        assert_eq!(r.branch, Branch::Small);
        let results: Vec<_> = r.raw().collect();
        assert_eq!(results.len(), 11);
        assert!(matches!(
            results[10],
            Err(Error::EnumerationLimit { limit: 10, .. })
        ));
    }

    #[test]
    fn combinations_in_size_order() {
        let mut c = Vec::new();
        let mut all = vec![c.clone()];
        while advance(&mut c, 3, 2) {
            all.push(c.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2]
            ]
        );
        let mut c = Vec::new();
        assert!(!advance(&mut c, 0, 5));
    }
}
