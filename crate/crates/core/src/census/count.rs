use std::collections::HashMap;
use std::str::FromStr;
use std::thread;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest dimension counted by default.
pub const MAX_COUNT_DIMENSION: usize = 5;
/// Largest dimension counted in extended mode.
pub const MAX_EXTENDED_DIMENSION: usize = 6;

/// How `|𝓘(Q_d)|` is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    /// Sum over even sets `A` of `2^{|𝒪 ∖ N(A)|}`, split along the last coordinate.
    #[default]
    Split,
    /// Disjoint pairs of independent sets of `Q_{d-1}`.
    Pairs,
    /// Branch on a vertex, splitting into connected components, with memoization.
    Branch,
}

impl FromStr for CountMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" | "exact" => Ok(CountMethod::Split),
            "pairs" => Ok(CountMethod::Pairs),
            "branch" => Ok(CountMethod::Branch),
            other => Err(Error::Domain(format!("unknown counting method '{other}'"))),
        }
    }
}

/// Adjacency masks of `Q_d` for `d ≤ 6`.
fn cube_adjacency(d: usize) -> Vec<u64> {
    (0..1u64 << d)
        .map(|v| (0..d).fold(0, |m, i| m | 1 << (v ^ 1 << i)))
        .collect()
}

fn check_range(d: usize, extended: bool) -> Result<()> {
    let max = if extended {
        MAX_EXTENDED_DIMENSION
    } else {
        MAX_COUNT_DIMENSION
    };
    if d == 0 || d > max {
        let hint = if extended {
            ""
        } else {
            " (d = 6 needs extended mode)"
        };
        return Err(Error::Domain(format!(
            "counting supports 1 ≤ d ≤ {max}, got {d}{hint}"
        )));
    }
    Ok(())
}

/// `|𝓘(Q_d)|`, the empty set included.
pub fn count_independent_sets(d: usize, extended: bool) -> Result<BigUint> {
    count_with(d, CountMethod::Split, extended, 1)
}

pub fn count_with(
    d: usize,
    method: CountMethod,
    extended: bool,
    parallelism: usize,
) -> Result<BigUint> {
    check_range(d, extended)?;
    match method {
        CountMethod::Split => Ok(BigUint::from(split_count(d, parallelism.max(1)))),
        CountMethod::Pairs => pairs_count(d).map(BigUint::from),
        CountMethod::Branch => Ok(BigUint::from(branch_count(&cube_adjacency(d)))),
    }
}

/// With `P = Q_{d-1}`, the even side of `Q_d` is `E_P × {0} ∪ O_P × {1}`. For `A₀ ⊆ E_P`
/// and `A₁ ⊆ O_P`, the odd vertex `(o, 0)` is free iff `o ∉ N(A₀) ∪ A₁`, and `(e, 1)` is
/// free iff `e ∉ N(A₁) ∪ A₀`.
fn split_count(d: usize, parallelism: usize) -> u128 {
    let p = d - 1;
    let evens: Vec<u64> = (0..1u64 << p).filter(|v| v.count_ones() % 2 == 0).collect();
    let odds: Vec<u64> = (0..1u64 << p).filter(|v| v.count_ones() % 2 == 1).collect();
    let local =
        |class: &[u64], v: u64| class.iter().position(|&w| w == v).expect("vertex in class");
    // Neighbors of each class member as a mask over the other class.
    let nbr = |from: &[u64], to: &[u64]| -> Vec<u32> {
        from.iter()
            .map(|&v| (0..p).fold(0u32, |m, i| m | 1 << local(to, v ^ 1 << i)))
            .collect()
    };
    let even_nbr = nbr(&evens, &odds);
    let odd_nbr = nbr(&odds, &evens);
    let free_table = |nbrs: &[u32], universe: usize| -> Vec<u32> {
        let full = if universe == 32 {
            u32::MAX
        } else {
            (1u32 << universe) - 1
        };
        let mut cover = vec![0u32; 1 << nbrs.len()];
        for s in 1..cover.len() {
            let low = s.trailing_zeros() as usize;
            cover[s] = cover[s & (s - 1)] | nbrs[low];
        }
        cover.into_iter().map(|c| !c & full).collect()
    };
    // u[A₀] = O_P ∖ N(A₀); w[A₁] = E_P ∖ N(A₁).
    let u = free_table(&even_nbr, odds.len());
    let w = free_table(&odd_nbr, evens.len());

    let n0 = u.len();
    let chunks = parallelism.min(n0).max(1);
    let per = n0.div_ceil(chunks);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..chunks)
            .map(|c| {
                let (u, w) = (&u, &w);
                scope.spawn(move || {
                    let mut total = 0u128;
                    let start = (c * per).min(n0);
                    let end = ((c + 1) * per).min(n0);
                    for (a0, &ua) in u[start..end].iter().enumerate() {
                        let a0 = start + a0;
                        let not_a0 = !(a0 as u32);
                        let mut inner = 0u64;
                        for (a1, &wa) in w.iter().enumerate() {
                            let free =
                                (ua & !(a1 as u32)).count_ones() + (wa & not_a0).count_ones();
                            inner += 1 << free;
                        }
                        total += u128::from(inner);
                    }
                    total
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .sum()
    })
}

/// `Q_d = Q_{d-1} □ K₂`: an independent set of `Q_d` is a pair of disjoint independent
/// sets of `Q_{d-1}`. Counts `Σ_{I₁} #{I₂ ⊆ V ∖ I₁}` with a subset-sum table.
fn pairs_count(d: usize) -> Result<u128> {
    let p = d - 1;
    let n = 1usize << p;
    if n > 16 {
        return Err(Error::SizeLimit(format!(
            "the pairs method needs d ≤ 5, got {d}"
        )));
    }
    let adj = cube_adjacency(p);
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    for s in 1usize..1 << n {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        independent[s] = independent[rest] && adj[low] & rest as u64 == 0;
    }
    // below[s] = number of independent subsets of s.
    let mut below: Vec<u64> = independent.iter().map(|&b| u64::from(b)).collect();
    for bit in 0..n {
        for s in 0..1usize << n {
            if s >> bit & 1 == 1 {
                below[s] += below[s ^ 1 << bit];
            }
        }
    }
    let full = (1usize << n) - 1;
    Ok((0..1usize << n)
        .filter(|&s| independent[s])
        .map(|s| u128::from(below[full ^ s]))
        .sum())
}

/// Independent sets of the graph on `0..adj.len()` (at most 64 vertices).
pub(crate) fn branch_count(adj: &[u64]) -> u128 {
    assert!(
        adj.len() <= 64,
        "branch counting handles at most 64 vertices"
    );
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut memo = HashMap::new();
    branch(adj, all, &mut memo)
}

fn branch(adj: &[u64], set: u64, memo: &mut HashMap<u64, u128>) -> u128 {
    if set == 0 {
        return 1;
    }
    if set.count_ones() == 1 {
        return 2;
    }
    if let Some(&c) = memo.get(&set) {
        return c;
    }
    let first = component_of(adj, set, set.trailing_zeros() as usize);
    let result = if first != set {
        branch(adj, first, memo) * branch(adj, set & !first, memo)
    } else {
        let mut best = (0, 0);
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let deg = (adj[v] & set).count_ones();
            if deg > best.0 {
                best = (deg, v);
            }
        }
        let v = best.1;
        if best.0 == 0 {
            1u128 << set.count_ones()
        } else {
            branch(adj, set & !(1 << v), memo) + branch(adj, set & !(1 << v) & !adj[v], memo)
        }
    };
    memo.insert(set, result);
    result
}

fn component_of(adj: &[u64], set: u64, start: usize) -> u64 {
    let mut part = 1u64 << start;
    let mut frontier = part;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & set & !part;
        part |= new;
        frontier |= new;
    }
    part
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every vertex subset, checked edge by edge.
    fn naive(d: usize) -> u64 {
        let n = 1u64 << d;
        (0u64..1 << n)
            .filter(|&s| {
                (0..n).all(|v| s >> v & 1 == 0 || (0..d).all(|i| s >> (v ^ 1 << i) & 1 == 0))
            })
            .count() as u64
    }

    #[test]
    fn naive_values() {
        let expect = [3u64, 7, 35, 743];
        for d in 1..=4 {
            assert_eq!(naive(d), expect[d - 1]);
        }
    }

    #[test]
    fn all_methods_agree_with_naive() {
        for d in 1..=4 {
            let n = BigUint::from(naive(d));
            for m in [CountMethod::Split, CountMethod::Pairs, CountMethod::Branch] {
                assert_eq!(count_with(d, m, false, 2).unwrap(), n, "d = {d}, {m:?}");
            }
        }
    }

    #[test]
    fn dimension_five() {
        let expect = BigUint::from(254_475u32);
        for m in [CountMethod::Split, CountMethod::Pairs, CountMethod::Branch] {
            assert_eq!(count_with(5, m, false, 4).unwrap(), expect, "{m:?}");
        }
    }

    #[test]
    #[ignore = "several seconds in release builds"]
    fn dimension_six() {
        let threads = thread::available_parallelism().map_or(1, |n| n.get());
        let split = count_with(6, CountMethod::Split, true, threads).unwrap();
        let branch = count_with(6, CountMethod::Branch, true, 1).unwrap();
        assert_eq!(split, branch);
        assert_eq!(split, BigUint::from(19_768_832_143u64));
    }

    #[test]
    fn range_checks() {
        assert!(count_independent_sets(0, false).is_err());
        assert!(count_independent_sets(6, false).is_err());
        assert!(count_with(6, CountMethod::Pairs, true, 1).is_err());
        assert_eq!("exact".parse::<CountMethod>().unwrap(), CountMethod::Split);
        assert!("magic".parse::<CountMethod>().is_err());
    }

    #[test]
    fn branch_on_small_graphs() {
        // Path on 3 vertices: 5 independent sets; triangle: 4; empty graph on 5: 32.
        assert_eq!(branch_count(&[0b010, 0b101, 0b010]), 5);
        assert_eq!(branch_count(&[0b110, 0b101, 0b011]), 4);
        assert_eq!(branch_count(&[0; 5]), 32);
    }
}
