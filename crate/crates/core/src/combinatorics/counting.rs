use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RegularBipartiteGraph;
use crate::structure::LinkageOracle;
use crate::vertex_set::Vertex;

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Rooted subtrees with `n` vertices in the infinite `branching`-ary tree:
/// `C(Δn, n) / ((Δ - 1)n + 1)`.
pub fn rooted_subtree_count(branching: u64, n: u64) -> Result<BigUint> {
    if branching == 0 || n == 0 {
        return Err(Error::Domain(
            "branching and size must both be at least 1".into(),
        ));
    }
    let num = binomial(branching * n, n);
    let den = BigUint::from((branching - 1) * n + 1);
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Number of k-linked `n`-subsets of `v`'s class that contain `v`, by enumeration.
///
/// Fails once more than `budget` linked sets have been visited.
pub fn count_k_linked_sets(
    g: &RegularBipartiteGraph,
    v: Vertex,
    n: usize,
    k: usize,
    budget: u64,
) -> Result<BigUint> {
    g.check_vertex(v)?;
    if k == 0 {
        return Err(Error::Domain(
            "linkage distance k must be at least 1".into(),
        ));
    }
    if n == 0 {
        return Ok(BigUint::zero());
    }
    let oracle = LinkageOracle::new(g, k);
    let within = g.class(g.side_of(v));
    let mut visited = 0u64;
    let mut count = 0u64;
    let flow = oracle.for_each_linked_set(v, within, &[], n, |set| {
        visited += 1;
        if set.len() == n {
            count += 1;
        }
        if visited > budget {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if flow.is_break() {
        return Err(Error::EnumerationLimit {
            limit: budget,
            progress: visited,
            context: format!("{k}-linked sets of size {n} through vertex {v}"),
        });
    }
    Ok(BigUint::from(count))
}

/// Both sides of the binomial tail estimate for `Σ_{i≤k} C(n, i)`.
#[derive(Clone, Debug, Serialize)]
pub struct TailBound {
    #[serde(serialize_with = "crate::cli::record::biguint_string")]
    pub sum: BigUint,
    /// `(e n / k)^k`
    pub en_over_k_pow: f64,
    /// For `k <= n/3`: whether `sum <= C(n,k)(1 + k/(n - 2k + 1))`.
    pub geometric_bound_holds: Option<bool>,
}

pub fn binomial_tail_bound(n: u64, k: u64) -> Result<TailBound> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let mut sum = BigUint::zero();
    let mut term = BigUint::one();
    for i in 0..=k {
        if i > 0 {
            term = term * (n - i + 1) / i;
        }
        sum += &term;
    }
    let en_over_k_pow = (std::f64::consts::E * n as f64 / k as f64).powf(k as f64);
    // Consecutive ratios C(n,i-1)/C(n,i) = i/(n-i+1) are at most k/(n-k+1), so the
    // tail is dominated by a geometric series.
    let geometric_bound_holds = (3 * k <= n).then(|| {
        let lhs = &sum * (n - 2 * k + 1);
        let rhs = binomial(n, k) * (n - k + 1);
        lhs <= rhs
    });
    Ok(TailBound {
        sum,
        en_over_k_pow,
        geometric_bound_holds,
    })
}
