//! Invariant suites run by `cubeset verify`.

use std::str::FromStr;
use std::thread;

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::census::{
    count_with, f_k, f_k_lower, ratio_table, sandwich, sap_sum, CountMethod, MAX_COUNT_DIMENSION,
};
use crate::combinatorics::{
    entropy_bound_holds, greedy_cover, random_regular_instance, rooted_subtree_count, CoverInstance,
};
use crate::containers::{
    psi_refine, run_for_set, sample_two_linked, two_linked_sets, ContainerParams, PipelineRecord,
    VertexOrder,
};
use crate::error::{Error, Result};
use crate::graph::{build_hypercube, Parity, RegularBipartiteGraph, Side};
use crate::iso::{
    check_small_set_boundary, check_small_set_expansion, layer_ratio, min_ball_neighborhood,
    min_neighborhood, SearchMode,
};
use crate::structure::{closure, is_k_linked, k_components};
use crate::vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Structure,
    Combinatorics,
    Iso,
    Containers,
    Census,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Suite as clap::ValueEnum>::from_str(s, true)
            .map_err(|_| Error::Domain(format!("unknown suite '{s}'")))
    }
}

/// One named invariant and how it fared.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Instances examined.
    pub cases: u64,
    pub counterexample: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub d: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Fraction of container sets recovered, when the container suite ran.
    pub coverage: Option<f64>,
}

/// Knobs shared by the suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub params: ContainerParams,
    /// Random sets drawn where a sweep is not exhaustive.
    pub samples: usize,
    pub parallelism: usize,
    pub budget: u64,
    /// Substitutes for `Q_d` in the generic suites.
    pub graph: Option<RegularBipartiteGraph>,
}

impl SuiteConfig {
    pub fn new(params: ContainerParams) -> Self {
        SuiteConfig {
            params,
            samples: 1000,
            parallelism: 1,
            budget: crate::containers::DEFAULT_BUDGET,
            graph: None,
        }
    }
}

/// Collects the outcome of one invariant, keeping the first counterexample.
struct Tally {
    name: String,
    cases: u64,
    counterexample: Option<Value>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            name: name.into(),
            cases: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    fn finish(self) -> Check {
        Check {
            passed: self.counterexample.is_none(),
            name: self.name,
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

pub fn verify_suite(suite: Suite, d: usize, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let (checks, coverage) = match suite {
        Suite::Structure => (structure_suite(d, cfg)?, None),
        Suite::Combinatorics => (combinatorics_suite(d, cfg)?, None),
        Suite::Iso => (iso_suite(d)?, None),
        Suite::Containers => {
            let (checks, coverage) = containers_suite(d, cfg)?;
            (checks, Some(coverage))
        }
        Suite::Census => (census_suite(d)?, None),
        Suite::All => {
            let mut checks = Vec::new();
            let mut coverage = None;
            for s in [
                Suite::Structure,
                Suite::Combinatorics,
                Suite::Iso,
                Suite::Containers,
                Suite::Census,
            ] {
                let part = verify_suite(s, d, cfg)?;
                let prefix = serde_json::to_value(s).expect("suite names serialize");
                let prefix = prefix.as_str().expect("suite names are strings").to_owned();
                coverage = coverage.or(part.coverage);
                checks.extend(part.checks.into_iter().map(|c| Check {
                    name: format!("{prefix}/{}", c.name),
                    ..c
                }));
            }
            (checks, coverage)
        }
    };
    Ok(SuiteReport {
        suite,
        d,
        passed: checks.iter().all(|c| c.passed),
        checks,
        coverage,
    })
}

fn host_graph(d: usize, cfg: &SuiteConfig) -> Result<RegularBipartiteGraph> {
    match &cfg.graph {
        Some(g) => Ok(g.clone()),
        None => build_hypercube(d),
    }
}

fn ids(set: &VertexSet) -> Value {
    json!(set.to_vec())
}

/// Every subset of `X` when it has at most 16 members, otherwise `samples` random ones.
fn structure_sets(g: &RegularBipartiteGraph, cfg: &SuiteConfig) -> Vec<VertexSet> {
    let members: Vec<_> = g.class_x().iter().collect();
    let pick = |mask: u64| {
        g.set_of(
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v),
        )
    };
    if members.len() <= 16 {
        return (1u64..1 << members.len()).map(pick).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.params.seed);
    (0..cfg.samples)
        .map(|_| {
            let size = rng.gen_range(1..=members.len() / 2);
            let chosen = rand::seq::index::sample(&mut rng, members.len(), size);
            g.set_of(chosen.iter().map(|i| members[i]))
        })
        .collect()
}

fn structure_suite(d: usize, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let g = host_graph(d, cfg)?;
    let mut idempotent = Tally::new("closure idempotence");
    let mut extensive = Tally::new("closure extensivity");
    let mut same_nbhd = Tally::new("closure keeps the neighborhood");
    let mut linked = Tally::new("2-linked closure");
    let mut additive = Tally::new("2-component additivity");
    let mut degree = Tally::new("neighborhood at most d|A|");
    for a in structure_sets(&g, cfg) {
        let c = closure(&g, &a)?;
        let n = g.neighborhood(&a);
        idempotent.record(closure(&g, &c)? == c, || ids(&a));
        extensive.record(a.is_subset(&c), || ids(&a));
        same_nbhd.record(g.neighborhood(&c) == n, || ids(&a));
        if is_k_linked(&g, &a, 2)? {
            linked.record(is_k_linked(&g, &c, 2)?, || ids(&a));
        }
        let parts = k_components(&g, &a, 2)?.parts;
        let sum: usize = parts.iter().map(|p| g.neighborhood(p).count()).sum();
        additive.record(sum == n.count(), || ids(&a));
        degree.record(n.count() <= g.degree() * a.count(), || ids(&a));
    }
    Ok([idempotent, extensive, same_nbhd, linked, additive, degree]
        .into_iter()
        .map(Tally::finish)
        .collect())
}

/// Rooted subtrees of the infinite `branching`-ary tree with `n` vertices, listed one by one:
/// each vertex on the frontier is either taken (its children join the frontier) or refused.
pub fn enumerate_rooted_subtrees(branching: usize, n: usize) -> u64 {
    fn grow(frontier: usize, size: usize, branching: usize, n: usize) -> u64 {
        if size == n {
            return 1;
        }
        if frontier == 0 {
            return 0;
        }
        grow(frontier - 1 + branching, size + 1, branching, n)
            + grow(frontier - 1, size, branching, n)
    }
    if n == 0 {
        return 0;
    }
    grow(branching, 1, branching, n)
}

fn catalan(n: usize) -> BigUint {
    let mut c = vec![BigUint::one()];
    for m in 1..=n {
        let next = (0..m).map(|i| &c[i] * &c[m - 1 - i]).sum();
        c.push(next);
    }
    c.swap_remove(n)
}

fn cover_check(tally: &mut Tally, inst: &CoverInstance, label: impl Fn() -> Value) -> Result<()> {
    let cover = greedy_cover(inst)?;
    let ok = cover
        .bound
        .is_some_and(|b| cover.chosen.count() as f64 <= b);
    tally.record(ok, label);
    Ok(())
}

fn combinatorics_suite(d: usize, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut catalan_check = Tally::new("subtree count equals Catalan for Δ = 2");
    for n in 1..=12 {
        let got = rooted_subtree_count(2, n as u64)?;
        catalan_check.record(got == catalan(n), || json!({ "n": n }));
    }
    let mut brute = Tally::new("subtree count equals enumeration for Δ ≤ 3, n ≤ 6");
    for branching in 1..=3 {
        for n in 1..=6 {
            let got = rooted_subtree_count(branching as u64, n as u64)?;
            brute.record(
                got == BigUint::from(enumerate_rooted_subtrees(branching, n)),
                || json!({ "branching": branching, "n": n }),
            );
        }
    }
    let mut entropy = Tally::new("entropy bound for N ≤ 30");
    for n in 1..=30u64 {
        for k in 0..=n / 2 {
            entropy.record(
                entropy_bound_holds(n, Ratio::new(k, n))?,
                || json!({ "N": n, "k": k }),
            );
        }
    }
    let mut cover = Tally::new("greedy cover within the Lovász–Stein bound");
    let g = host_graph(d, cfg)?;
    for (p, q) in [(Side::X, Side::Y), (Side::Y, Side::X)] {
        let (inst, _, _) = CoverInstance::from_graph(&g, g.class(p), g.class(q));
        cover_check(&mut cover, &inst, || json!({ "host": "graph", "P": p }))?;
    }
    for k in 1..=d.min(5) {
        let cube = build_hypercube(k)?;
        let (inst, _, _) = CoverInstance::from_graph(&cube, cube.class_x(), cube.class_y());
        cover_check(&mut cover, &inst, || json!({ "host": "hypercube", "d": k }))?;
    }
    for seed in 0..cfg.samples.min(100) as u64 {
        let n = 8 + (seed as usize * 7) % 41;
        let degree = 1 + seed as usize % 6;
        let inst = random_regular_instance(n, degree, cfg.params.seed ^ seed)?;
        cover_check(
            &mut cover,
            &inst,
            || json!({ "host": "random", "n": n, "degree": degree, "seed": seed }),
        )?;
    }
    Ok([catalan_check, brute, entropy, cover]
        .into_iter()
        .map(Tally::finish)
        .collect())
}

fn iso_suite(d: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if (3..=5).contains(&d) {
        let mut balls = Tally::new("minimum neighborhood attained by even balls");
        for size in 1..=1usize << (d - 1) {
            let exact = min_neighborhood(d, Parity::Even, size, SearchMode::Exhaustive)?;
            let ball = min_ball_neighborhood(d, Parity::Even, size)?;
            balls.record(
                exact.min_neighborhood == ball,
                || json!({ "size": size, "exhaustive": exact.min_neighborhood, "ball": ball }),
            );
        }
        checks.push(balls.finish());
        let report = check_small_set_boundary(d)?;
        let witness = || report.counterexample.as_ref().map_or(Value::Null, ids);
        let mut positive = Tally::new("boundary ratio positive on small sets");
        positive.record(report.positive, witness);
        positive.cases = report.sets_checked;
        checks.push(positive.finish());
        let mut third = Tally::new("boundary ratio at least 1/3 at low radius");
        third.record(report.third_when_low_radius, witness);
        third.cases = report.sets_checked;
        checks.push(third.finish());
        let exp = check_small_set_expansion(d, d, 0, 0)?;
        let mut expansion = Tally::new("small-set expansion");
        expansion.record(
            exp.holds.unwrap_or(true),
            || json!({ "ratio": exp.max_ratio.to_string(), "witness": ids(&exp.witness) }),
        );
        checks.push(expansion.finish());
    }
    let mut layers = Tally::new("full-layer ratio within bound for d ≤ 12");
    let mut equal = Tally::new("full-layer ratio equality");
    for dim in 1..=12 {
        for i in 0..=dim / 2 {
            let r = layer_ratio(dim, i)?;
            layers.record(r.holds(), || json!({ "d": dim, "i": i }));
            if 2 * i + 2 <= dim {
                equal.record(r.is_equality(), || json!({ "d": dim, "i": i }));
            }
        }
    }
    checks.push(layers.finish());
    checks.push(equal.finish());
    Ok(checks)
}

/// Sets swept by the container suite: all 2-linked subsets of `X` up to `d = 4`,
/// then `samples` seeded random ones.
pub fn container_sets(g: &RegularBipartiteGraph, cfg: &SuiteConfig) -> Result<Vec<VertexSet>> {
    let class = g.class_x().count();
    if class <= 8 {
        return two_linked_sets(g, Side::X, class, cfg.budget);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.params.seed);
    (0..cfg.samples)
        .map(|_| {
            let size = rng.gen_range(1..=class / 2);
            sample_two_linked(g, Side::X, size, &mut rng)
        })
        .collect()
}

/// Runs the pipeline on every set, `parallelism` contiguous chunks at a time, in input order.
pub fn run_pipeline_sweep(
    g: &RegularBipartiteGraph,
    sets: &[VertexSet],
    params: &ContainerParams,
    parallelism: usize,
    budget: u64,
) -> Result<Vec<PipelineRecord>> {
    let per = sets.len().div_ceil(parallelism.max(1)).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = sets
            .chunks(per)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|a| run_for_set(g, a, params, None, budget))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(sets.len());
        for h in handles {
            out.extend(h.join().expect("pipeline worker panicked")?);
        }
        Ok(out)
    })
}

fn containers_suite(d: usize, cfg: &SuiteConfig) -> Result<(Vec<Check>, f64)> {
    let g = host_graph(d, cfg)?;
    cfg.params.validate(g.degree())?;
    let sets = container_sets(&g, cfg)?;
    let records = run_pipeline_sweep(&g, &sets, &cfg.params, cfg.parallelism, cfg.budget)?;
    let mut phi = Tally::new("φ-approximation valid");
    let mut psi = Tally::new("ψ-approximation valid");
    let mut size = Tally::new("container size inequality");
    let mut steps = Tally::new("step counts within bound");
    let mut cert = Tally::new("certificate bounds");
    let mut recovered = Tally::new("reconstruction recovers A");
    for r in &records {
        let w = || json!({ "A": ids(&r.set), "seed": r.seed });
        phi.record(r.phi_valid, w);
        psi.record(r.psi.is_valid(), w);
        size.record(r.psi.size_bound, w);
        steps.record(r.step1_within_bound && r.step2_within_bound, w);
        cert.record(r.certificate_bounds, w);
        recovered.record(r.reconstructed, w);
    }
    let mut determinism = Tally::new("ψ refinement deterministic");
    for a in sets.iter().take(20) {
        let (approx, _) = crate::containers::build_phi_approx(&g, a, &cfg.params, None)?;
        let first = psi_refine(&g, a, &approx, cfg.params.psi, &VertexOrder::Ascending)?.0;
        for _ in 1..10 {
            let again = psi_refine(&g, a, &approx, cfg.params.psi, &VertexOrder::Ascending)?.0;
            determinism.record(again == first, || ids(a));
        }
    }
    let coverage = if records.is_empty() {
        1.0
    } else {
        records.iter().filter(|r| r.reconstructed).count() as f64 / records.len() as f64
    };
    let checks = [phi, psi, size, steps, cert, recovered, determinism]
        .into_iter()
        .map(Tally::finish)
        .collect();
    Ok((checks, coverage))
}

fn census_suite(d: usize) -> Result<Vec<Check>> {
    let top = d.clamp(1, MAX_COUNT_DIMENSION);
    let mut agree = Tally::new("counting methods agree");
    let mut trivial = Tally::new("count exceeds 2^{2^{d-1}}");
    for k in 1..=top {
        let counts: Vec<BigUint> = [CountMethod::Split, CountMethod::Pairs, CountMethod::Branch]
            .into_iter()
            .map(|m| count_with(k, m, false, 1))
            .collect::<Result<_>>()?;
        agree.record(counts.windows(2).all(|w| w[0] == w[1]), || {
            json!({ "d": k, "counts": counts.iter().map(ToString::to_string).collect::<Vec<_>>() })
        });
        trivial.record(
            counts[0] > BigUint::one() << (1u32 << (k - 1)),
            || json!({ "d": k }),
        );
    }
    let mut sandwiched = Tally::new("sandwich");
    let mut monotone = Tally::new("small-set sum non-decreasing");
    let mut previous: Option<BigRational> = None;
    for k in 2..=top {
        let s = sandwich(k)?;
        sandwiched.record(s.lower_holds && s.upper_holds, || json!({ "d": k }));
        let sum = sap_sum(k)?.to_ratio();
        monotone.record(
            previous.as_ref().is_none_or(|p| *p <= sum),
            || json!({ "d": k }),
        );
        previous = Some(sum);
    }
    let mut fk = Tally::new("f(k) at least its lower formula");
    let mut witnessed = Tally::new("f(k) lower formula exact at (4,2) and (3,2)");
    for k in 1..=top {
        for j in 0..=4 {
            let exact = BigRational::from_integer(f_k(k, j, 1 << 30)?.into());
            let lower = f_k_lower(k, j, false);
            fk.record(exact >= lower, || json!({ "d": k, "k": j }));
            if (k, j) == (4, 2) || (k, j) == (3, 2) {
                witnessed.record(exact == lower, || json!({ "d": k, "k": j }));
            }
        }
    }
    let mut ratios = Tally::new("ratio table finite and positive");
    for row in ratio_table(top, false, 1)? {
        ratios.record(
            row.ratio.is_finite() && row.ratio > 0.0 && !row.count.is_zero(),
            || json!({ "d": row.d }),
        );
    }
    Ok(
        [agree, trivial, sandwiched, monotone, fk, witnessed, ratios]
            .into_iter()
            .map(Tally::finish)
            .collect(),
    )
}
