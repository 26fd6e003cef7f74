use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::phi::{verify_phi_approx, PhiApprox};
use super::Host;
use crate::error::{Error, Result};
use crate::graph::RegularBipartiteGraph;
use crate::vertex_set::{Vertex, VertexSet};

/// `(F, S)` with `F ⊆ G`, `S ⊇ [A]` and both degree conditions of strength `d - ψ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiApprox {
    #[serde(rename = "F")]
    pub f: VertexSet,
    #[serde(rename = "S")]
    pub s: VertexSet,
    pub psi: usize,
}

/// The fixed vertex order `≪` used to break ties when picking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum VertexOrder {
    #[default]
    Ascending,
    /// `rank[v]` is the position of vertex `v`; must be a permutation.
    Ranked(Vec<u32>),
}

impl VertexOrder {
    /// A uniformly random order, reproducible from `seed`.
    pub fn shuffled(vertex_count: usize, seed: u64) -> Self {
        let mut rank: Vec<u32> = (0..vertex_count as u32).collect();
        rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        VertexOrder::Ranked(rank)
    }

    fn sorted(&self, set: &VertexSet) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = set.iter().collect();
        if let VertexOrder::Ranked(rank) = self {
            out.sort_by_key(|v| rank[v.index()]);
        }
        out
    }

    fn check(&self, n: usize) -> Result<()> {
        if let VertexOrder::Ranked(rank) = self {
            let mut seen = vec![false; n];
            let ok = rank.len() == n
                && rank
                    .iter()
                    .all(|&r| (r as usize) < n && !std::mem::replace(&mut seen[r as usize], true));
            if !ok {
                return Err(Error::Precondition(
                    "vertex order is not a permutation of the vertices".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Picks made by the two steps and the bounds they are expected to respect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiTrace {
    pub step1: Vec<Vertex>,
    pub step2: Vec<Vertex>,
    /// `td / ((d - φ)ψ) + 1`
    pub step1_bound: f64,
    /// `td / ((d - ψ)ψ) + 1`
    pub step2_bound: f64,
    #[serde(skip)]
    d: usize,
    #[serde(skip)]
    t: usize,
    #[serde(skip)]
    phi: usize,
    #[serde(skip)]
    psi: usize,
}

impl PsiTrace {
    pub fn step1_within_bound(&self) -> bool {
        let unit = (self.d - self.phi) * self.psi;
        self.step1.len() * unit <= self.t * self.d + unit
    }

    pub fn step2_within_bound(&self) -> bool {
        let unit = (self.d - self.psi) * self.psi;
        self.step2.len() * unit <= self.t * self.d + unit
    }
}

/// Refines a φ-approximation into a ψ-approximation.
///
/// Step 1 absorbs `N(u)` for the `≪`-least `u ∈ [A]` with `d_{G∖F'}(u) > ψ` until none
/// is left. With `S = {u ∈ X : d_F(u) ≥ d - ψ}`, step 2 deletes `N(w)` from `S` for the
/// `≪`-least `w ∈ Y ∖ G` with `d_S(w) > ψ` until none is left. Finally `F` gains every
/// `w ∈ Y` with `d_S(w) > ψ`.
pub fn psi_refine(
    g: &RegularBipartiteGraph,
    a: &VertexSet,
    approx: &PhiApprox,
    psi: usize,
    order: &VertexOrder,
) -> Result<(PsiApprox, PsiTrace)> {
    let d = g.degree();
    if psi == 0 || psi >= d {
        return Err(Error::Precondition(format!(
            "ψ must lie in [1, {}], got {psi}",
            d.saturating_sub(1)
        )));
    }
    order.check(g.vertex_count())?;
    let host = Host::new(g, a)?;
    if !verify_phi_approx(g, a, &approx.fprime, approx.phi) {
        return Err(Error::Precondition(format!(
            "F' is not a {}-approximation of A",
            approx.phi
        )));
    }

    // Degrees into G ∖ F' and S only shrink, so one ordered pass finds every pick.
    let mut f = approx.fprime.clone();
    let mut step1 = Vec::new();
    for u in order.sorted(&host.closure) {
        let outside = g.neighbors(u).filter(|&w| !f.contains(w)).count();
        if outside > psi {
            step1.push(u);
            for w in g.neighbors(u) {
                f.insert(w);
            }
        }
    }

    let xs = g.class(host.side);
    let ys = g.class(host.side.other());
    let mut s = g.empty_set();
    for u in xs {
        if g.degree_into(u, &f) >= d - psi {
            s.insert(u);
        }
    }
    let mut step2 = Vec::new();
    for w in order.sorted(&(ys - &host.neighborhood)) {
        if g.degree_into(w, &s) > psi {
            step2.push(w);
            for u in g.neighbors(w) {
                s.remove(u);
            }
        }
    }
    for w in ys {
        if g.degree_into(w, &s) > psi {
            f.insert(w);
        }
    }

    let t = host.t as usize;
    let (tf, df) = (t as f64, d as f64);
    let trace = PsiTrace {
        step1,
        step2,
        step1_bound: tf * df / ((d - approx.phi) as f64 * psi as f64) + 1.0,
        step2_bound: tf * df / ((d - psi) as f64 * psi as f64) + 1.0,
        d,
        t,
        phi: approx.phi,
        psi,
    };
    Ok((PsiApprox { f, s, psi }, trace))
}

/// Which of the ψ-approximation conditions hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PsiCheck {
    /// `F ⊆ G` and `S ⊇ [A]`
    pub outer: bool,
    /// `d_F(u) ≥ d - ψ` for `u ∈ S`
    pub s_degree: bool,
    /// `d_{X∖S}(v) ≥ d - ψ` for `v ∈ Y ∖ F`
    pub complement_degree: bool,
    /// `|S| ≤ |F| + 2tψ / (d - ψ)`
    pub size_bound: bool,
}

impl PsiCheck {
    /// The three defining conditions; the size bound is reported separately.
    pub fn is_valid(&self) -> bool {
        self.outer && self.s_degree && self.complement_degree
    }
}

pub fn verify_psi_approx(
    g: &RegularBipartiteGraph,
    a: &VertexSet,
    f: &VertexSet,
    s: &VertexSet,
    psi: usize,
) -> PsiCheck {
    let fail = PsiCheck {
        outer: false,
        s_degree: false,
        complement_degree: false,
        size_bound: false,
    };
    let d = g.degree();
    let Ok(host) = Host::new(g, a) else {
        return fail;
    };
    if psi >= d {
        return fail;
    }
    let xs = g.class(host.side);
    let ys = g.class(host.side.other());
    let outer = f.is_subset(&host.neighborhood) && host.closure.is_subset(s) && s.is_subset(xs);
    let s_degree = s.iter().all(|u| g.degree_into(u, f) >= d - psi);
    let rest_x = xs - s;
    let complement_degree = (ys - f)
        .iter()
        .all(|v| g.degree_into(v, &rest_x) >= d - psi);
    // |S| - |F| ≤ 2tψ/(d - ψ), cleared of the denominator.
    let lhs = (s.count() as i64 - f.count() as i64) * (d - psi) as i64;
    let size_bound = lhs <= 2 * host.t * psi as i64;
    PsiCheck {
        outer,
        s_degree,
        complement_degree,
        size_bound,
    }
}
