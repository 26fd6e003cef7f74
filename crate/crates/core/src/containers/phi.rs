use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{derive_seed, ContainerParams, Host};
use crate::combinatorics::greedy_cover_in_graph;
use crate::error::{Error, Result};
use crate::graph::RegularBipartiteGraph;
use crate::vertex_set::{Vertex, VertexSet};

/// `F'` with `G^φ ⊆ F' ⊆ G` and `N(F') ⊇ [A]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiApprox {
    #[serde(rename = "Fprime")]
    pub fprime: VertexSet,
    pub phi: usize,
}

/// Limits a sampled `T₀` must respect before it is accepted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateBounds {
    /// `4gp`
    pub t0: f64,
    /// `4tdp`
    pub omega: f64,
    /// `3g / d^10`
    pub t0_prime: f64,
}

/// How `F'` was put together: `F' = (N(N_[A](T₀)) ∩ G) ∪ T₀' ∪ T₁`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproxCertificate {
    #[serde(rename = "T0")]
    pub t0: VertexSet,
    #[serde(rename = "T0prime")]
    pub t0_prime: VertexSet,
    #[serde(rename = "T1")]
    pub t1: VertexSet,
    #[serde(rename = "L")]
    pub l: VertexSet,
    /// `∇(T₀, X ∖ [A])` as `(end in T₀, end in X)`.
    #[serde(rename = "Omega")]
    pub omega: Vec<(Vertex, Vertex)>,
    pub anchor: Vertex,
    pub p: f64,
    pub retries: u32,
    pub seed: u64,
    pub bounds: CertificateBounds,
}

impl ApproxCertificate {
    pub fn bounds_hold(&self) -> bool {
        within(self.t0.count(), self.bounds.t0)
            && within(self.omega.len(), self.bounds.omega)
            && within(self.t0_prime.count(), self.bounds.t0_prime)
    }
}

fn within(n: usize, limit: f64) -> bool {
    n as f64 <= limit + 1e-9
}

/// `G^φ = {y ∈ G : d_[A](y) > φ}`.
pub fn g_phi(g: &RegularBipartiteGraph, a: &VertexSet, phi: usize) -> Result<VertexSet> {
    check_phi(g, phi)?;
    let host = Host::new(g, a)?;
    Ok(high_degree_part(g, &host, phi))
}

fn high_degree_part(g: &RegularBipartiteGraph, host: &Host, phi: usize) -> VertexSet {
    let mut out = g.empty_set();
    for y in &host.neighborhood {
        if g.degree_into(y, &host.closure) > phi {
            out.insert(y);
        }
    }
    out
}

fn check_phi(g: &RegularBipartiteGraph, phi: usize) -> Result<()> {
    let d = g.degree();
    if phi == 0 || phi >= d {
        return Err(Error::Precondition(format!(
            "φ must lie in [1, {}], got {phi}",
            d.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Builds a φ-approximation of `A` by rejection sampling `T₀`.
///
/// `anchor` defaults to the smallest member of `N(A)` and is always put into `T₀`.
pub fn build_phi_approx(
    g: &RegularBipartiteGraph,
    a: &VertexSet,
    params: &ContainerParams,
    anchor: Option<Vertex>,
) -> Result<(PhiApprox, ApproxCertificate)> {
    params.validate(g.degree())?;
    let host = Host::new(g, a)?;
    let d = g.degree();
    let gs = &host.neighborhood;
    let anchor = anchor.unwrap_or_else(|| gs.first().expect("nonempty A has neighbors"));
    if !gs.contains(anchor) {
        return Err(Error::Precondition(format!(
            "anchor {anchor} is not a neighbor of A"
        )));
    }

    let p = params.sampling_probability(d, g.co_degree_of(host.side.other()));
    let (gf, tf, df) = (host.g as f64, host.t as f64, d as f64);
    let bounds = CertificateBounds {
        t0: 4.0 * gf * p,
        omega: 4.0 * tf * df * p,
        t0_prime: 3.0 * gf / df.powi(10),
    };
    let high = high_degree_part(g, &host, params.phi);
    let outside = g.class(host.side) - &host.closure;
    let seed = derive_seed(params.seed, a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut last = None;
    for retries in 0..params.max_retries.max(1) {
        let mut t0 = if p >= 1.0 {
            gs.clone()
        } else {
            g.set_of(gs.iter().filter(|_| rng.gen_bool(p)))
        };
        t0.insert(anchor);

        let mut reached = g.neighborhood(&t0);
        reached.intersect_with(&host.closure);
        let mut core = g.neighborhood(&reached);
        core.intersect_with(gs);
        let t0_prime = &high - &core;
        let omega = g.nabla_edges(&t0, &outside).edges.unwrap_or_default();

        let ok = within(t0.count(), bounds.t0)
            && within(omega.len(), bounds.omega)
            && within(t0_prime.count(), bounds.t0_prime);
        if !ok {
            last = Some((t0.count(), omega.len(), t0_prime.count()));
            continue;
        }

        let l = &core | &t0_prime;
        let uncovered = &host.closure - &g.neighborhood(&l);
        let t1 = greedy_cover_in_graph(g, &uncovered, &(gs - &l))?;
        let fprime = &l | &t1;
        let cert = ApproxCertificate {
            t0,
            t0_prime,
            t1,
            l,
            omega,
            anchor,
            p,
            retries,
            seed,
            bounds,
        };
        return Ok((
            PhiApprox {
                fprime,
                phi: params.phi,
            },
            cert,
        ));
    }
    let (t0, omega, t0p) = last.unwrap_or_default();
    Err(Error::RandomizedFailure {
        retries: params.max_retries,
        observed: format!(
            "last sample: |T0| = {t0} (limit {:.3}), |Omega| = {omega} (limit {:.3}), |T0'| = {t0p} (limit {:.3e})",
            bounds.t0, bounds.omega, bounds.t0_prime
        ),
    })
}

/// Whether `G^φ ⊆ F' ⊆ G` and `N(F') ⊇ [A]`.
///
/// Sets spanning both classes are never approximated.
pub fn verify_phi_approx(
    g: &RegularBipartiteGraph,
    a: &VertexSet,
    fprime: &VertexSet,
    phi: usize,
) -> bool {
    let Ok(side) = g.side_of_set(a) else {
        return false;
    };
    if side.is_none() {
        return fprime.is_empty();
    }
    let Ok(host) = Host::new(g, a) else {
        return false;
    };
    high_degree_part(g, &host, phi).is_subset(fprime)
        && fprime.is_subset(&host.neighborhood)
        && host.closure.is_subset(&g.neighborhood(fprime))
}
