use std::collections::BTreeSet;

use serde::Serialize;

use super::family::enumerate_g_agv;
use super::phi::{build_phi_approx, verify_phi_approx};
use super::psi::{psi_refine, verify_psi_approx, PsiCheck, VertexOrder};
use super::reconstruct::{reconstruct_family, Branch, Targets};
use super::{ContainerParams, Host};
use crate::error::Result;
use crate::graph::RegularBipartiteGraph;
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateSizes {
    pub t0: usize,
    pub t0_prime: usize,
    pub t1: usize,
    pub omega: usize,
    pub retries: u32,
}

/// One set pushed through both approximation stages and back.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineRecord {
    #[serde(rename = "A")]
    pub set: VertexSet,
    pub a: usize,
    pub g: usize,
    pub t: usize,
    pub v: Vertex,
    #[serde(rename = "Fprime")]
    pub fprime: VertexSet,
    #[serde(rename = "F")]
    pub f: VertexSet,
    #[serde(rename = "S")]
    pub s: VertexSet,
    pub seed: u64,
    pub certificate: CertificateSizes,
    pub certificate_bounds: bool,
    pub phi_valid: bool,
    pub psi: PsiCheck,
    pub step1: usize,
    pub step2: usize,
    pub step1_within_bound: bool,
    pub step2_within_bound: bool,
    pub branch: Branch,
    pub reconstructed: bool,
}

impl PipelineRecord {
    /// Every check passed.
    pub fn ok(&self) -> bool {
        self.certificate_bounds
            && self.phi_valid
            && self.psi.is_valid()
            && self.psi.size_bound
            && self.step1_within_bound
            && self.step2_within_bound
            && self.reconstructed
    }
}

/// Runs both stages for `A` with anchor `v` (smallest neighbor by default) and checks
/// that reconstruction from the resulting `(F, S)` lists `A` again.
pub fn run_for_set(
    g: &RegularBipartiteGraph,
    a: &VertexSet,
    params: &ContainerParams,
    anchor: Option<Vertex>,
    budget: u64,
) -> Result<PipelineRecord> {
    let host = Host::new(g, a)?;
    let (phi, cert) = build_phi_approx(g, a, params, anchor)?;
    let (psi, trace) = psi_refine(g, a, &phi, params.psi, &VertexOrder::Ascending)?;
    let targets = Targets::new(host.a, host.g, cert.anchor)?;
    let mut stream = reconstruct_family(g, &psi.f, &psi.s, targets, params, budget)?;
    let branch = stream.branch;
    let mut reconstructed = false;
    for candidate in &mut stream {
        if candidate? == *a {
            reconstructed = true;
            break;
        }
    }
    Ok(PipelineRecord {
        set: a.clone(),
        a: host.a,
        g: host.g,
        t: targets.t,
        v: cert.anchor,
        certificate: CertificateSizes {
            t0: cert.t0.count(),
            t0_prime: cert.t0_prime.count(),
            t1: cert.t1.count(),
            omega: cert.omega.len(),
            retries: cert.retries,
        },
        certificate_bounds: cert.bounds_hold(),
        phi_valid: verify_phi_approx(g, a, &phi.fprime, phi.phi),
        psi: verify_psi_approx(g, a, &psi.f, &psi.s, params.psi),
        step1: trace.step1.len(),
        step2: trace.step2.len(),
        step1_within_bound: trace.step1_within_bound(),
        step2_within_bound: trace.step2_within_bound(),
        branch,
        reconstructed,
        seed: cert.seed,
        fprime: phi.fprime,
        f: psi.f,
        s: psi.s,
    })
}

/// Containers for one class `𝒢(a, g, v)`.
#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub a: usize,
    pub g: usize,
    pub t: usize,
    pub v: Vertex,
    pub family_size: usize,
    /// Distinct `(F, S)` pairs.
    pub containers: usize,
    pub covered: usize,
    pub failures: Vec<VertexSet>,
    /// `g - c't / log₂ d`
    pub benchmark_log2: f64,
    pub records: Vec<PipelineRecord>,
}

impl PipelineReport {
    /// Fraction of the family recovered; 1 for an empty family.
    pub fn coverage(&self) -> f64 {
        if self.family_size == 0 {
            1.0
        } else {
            self.covered as f64 / self.family_size as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn container_pipeline(
    g: &RegularBipartiteGraph,
    a: usize,
    g_size: usize,
    v: Vertex,
    params: &ContainerParams,
    budget: u64,
) -> Result<PipelineReport> {
    params.validate(g.degree())?;
    let family = enumerate_g_agv(g, a, g_size, v, budget)?;
    let mut pairs = BTreeSet::new();
    let mut records = Vec::with_capacity(family.len());
    let mut failures = Vec::new();
    for set in &family {
        let rec = run_for_set(g, set, params, Some(v), budget)?;
        pairs.insert((rec.f.to_vec(), rec.s.to_vec()));
        if !rec.ok() {
            failures.push(set.clone());
        }
        records.push(rec);
    }
    let t = g_size.saturating_sub(a);
    Ok(PipelineReport {
        a,
        g: g_size,
        t,
        v,
        family_size: family.len(),
        containers: pairs.len(),
        covered: records.iter().filter(|r| r.reconstructed).count(),
        failures,
        benchmark_log2: g_size as f64 - params.c_prime * t as f64 / (g.degree() as f64).log2(),
        records,
    })
}
