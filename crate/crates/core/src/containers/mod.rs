//! Container approximations for 2-linked sets in a `d`-regular bipartite graph.
//!
//! A set `A ⊆ X` with neighborhood `G = N(A)` is first approximated from inside
//! `G` by a φ-approximation `F'`, which is then refined into a ψ-approximation
//! `(F, S)` with `F ⊆ G` and `S ⊇ [A]`. From `(F, S)` every such `A` can be
//! listed again; [`pipeline`] checks that round trip over whole families.

mod family;
mod phi;
mod pipeline;
mod psi;
mod reconstruct;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{RegularBipartiteGraph, Side};
use crate::vertex_set::VertexSet;

pub use family::{enumerate_g_agv, sample_two_linked, two_linked_sets};
pub use phi::{
    build_phi_approx, g_phi, verify_phi_approx, ApproxCertificate, CertificateBounds, PhiApprox,
};
pub use pipeline::{
    container_pipeline, run_for_set, CertificateSizes, PipelineRecord, PipelineReport,
};
pub use psi::{psi_refine, verify_psi_approx, PsiApprox, PsiCheck, PsiTrace, VertexOrder};
pub use reconstruct::{
    reconstruct_family, Branch, Hypotheses, RawCandidates, Reconstruction, Targets,
};

/// Default enumeration budget for reconstruction and family listing.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Tuning of the two approximation stages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainerParams {
    pub phi: usize,
    pub psi: usize,
    pub gamma: f64,
    pub c: f64,
    pub c_prime: f64,
    pub seed: u64,
    pub max_retries: u32,
}

impl ContainerParams {
    /// `φ = ⌈d/2⌉`, `ψ = ⌈c'd / log₂ d⌉`, `γ = c / log₂ d` with `c = c' = 1`,
    /// φ and ψ clamped into `[1, d - 1]`.
    pub fn defaults_for(d: usize) -> Result<Self> {
        Self::with_constants(d, 1.0, 1.0)
    }

    pub fn with_constants(d: usize, c: f64, c_prime: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!(
                "container parameters need d ≥ 2, got {d}"
            )));
        }
        let log_d = (d as f64).log2();
        let clamp = |x: usize| x.clamp(1, d - 1);
        Ok(ContainerParams {
            phi: clamp(d.div_ceil(2)),
            psi: clamp((c_prime * d as f64 / log_d).ceil() as usize),
            gamma: c / log_d,
            c,
            c_prime,
            seed: 0,
            max_retries: 1000,
        })
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if d < 2 || !(1..d).contains(&self.phi) || !(1..d).contains(&self.psi) {
            return Err(Error::Precondition(format!(
                "need 1 ≤ φ, ψ ≤ d - 1; got φ = {}, ψ = {}, d = {d}",
                self.phi, self.psi
            )));
        }
        if self.gamma.is_nan() || self.gamma <= 0.0 {
            return Err(Error::Precondition(format!(
                "γ must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Inclusion probability `p = min(1, 20 Δ₂ log₂ d / (φ d))` for the random part of `T₀`.
    pub fn sampling_probability(&self, d: usize, co_degree: usize) -> f64 {
        let p = 20.0 * co_degree as f64 * (d as f64).log2() / (self.phi as f64 * d as f64);
        p.min(1.0)
    }
}

/// The pieces every stage needs about `A`.
#[derive(Clone, Debug)]
pub(crate) struct Host {
    pub side: Side,
    pub closure: VertexSet,
    pub neighborhood: VertexSet,
    pub a: usize,
    pub g: usize,
    pub t: i64,
}

impl Host {
    pub(crate) fn new(g: &RegularBipartiteGraph, a: &VertexSet) -> Result<Self> {
        let side = g
            .side_of_set(a)?
            .ok_or_else(|| Error::Domain("container construction needs a nonempty set".into()))?;
        let neighborhood = g.neighborhood(a);
        let closure = g.vertices_with_neighbors_in(&neighborhood, g.class(side));
        Ok(Host {
            side,
            a: closure.count(),
            g: neighborhood.count(),
            t: neighborhood.count() as i64 - closure.count() as i64,
            closure,
            neighborhood,
        })
    }
}

/// Mixes a master seed with the members of `a`, so per-set randomness does not
/// depend on the order in which sets are processed.
pub fn derive_seed(master: u64, a: &VertexSet) -> u64 {
    let mut h = splitmix64(master);
    for v in a {
        h = splitmix64(h ^ u64::from(v.0));
    }
    h
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters() {
        let p = ContainerParams::defaults_for(3).unwrap();
        assert_eq!((p.phi, p.psi), (2, 2));
        let p = ContainerParams::defaults_for(4).unwrap();
        assert_eq!((p.phi, p.psi), (2, 2));
        assert!((p.gamma - 0.5).abs() < 1e-12);
        let p = ContainerParams::defaults_for(5).unwrap();
        assert_eq!((p.phi, p.psi), (3, 3));
        let p = ContainerParams::defaults_for(2).unwrap();
        assert_eq!((p.phi, p.psi), (1, 1));
        assert!(ContainerParams::defaults_for(1).is_err());
        let p = ContainerParams::defaults_for(64).unwrap();
        assert_eq!((p.phi, p.psi), (32, 11));
    }

    #[test]
    fn probability_clamps() {
        let p = ContainerParams::defaults_for(4).unwrap();
        assert_eq!(p.sampling_probability(4, 2), 1.0);
        let p = ContainerParams::defaults_for(20).unwrap();
        let expect = 40.0 * 20f64.log2() / 200.0;
        assert!((p.sampling_probability(20, 2) - expect).abs() < 1e-12);
        assert!(expect < 1.0);
    }

    #[test]
    fn seeds_depend_on_set() {
        let a = VertexSet::from_ids(8, [0u32, 3]);
        let b = VertexSet::from_ids(8, [0u32, 5]);
        assert_ne!(derive_seed(7, &a), derive_seed(7, &b));
        assert_eq!(derive_seed(7, &a), derive_seed(7, &a.clone()));
    }
}
