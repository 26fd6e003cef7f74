use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::count::count_independent_sets;
use crate::combinatorics::binomial;
use crate::error::{Error, Result};

/// `numerator / 2^exponent`, kept with an odd numerator or a zero exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: BigUint, exponent: u32) -> Self {
        let shift = numerator
            .trailing_zeros()
            .map_or(exponent, |z| (z.min(u64::from(exponent))) as u32);
        DyadicRational {
            numerator: numerator >> shift,
            exponent: exponent - shift,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::one() << self.exponent,
        )
    }

    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.to_ratio()).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_sweep(d: usize) -> Result<()> {
    if d == 0 || d > 5 {
        return Err(Error::Domain(format!(
            "exhaustive sweeps over even sets need 1 ≤ d ≤ 5, got {d}"
        )));
    }
    Ok(())
}

/// Even and odd vertices of `Q_d` with, for each even vertex, its neighbors as a mask
/// over the odd list.
fn even_odd_masks(d: usize) -> (usize, usize, Vec<u32>) {
    let evens: Vec<u32> = (0..1u32 << d).filter(|v| v.count_ones() % 2 == 0).collect();
    let odds: Vec<u32> = (0..1u32 << d).filter(|v| v.count_ones() % 2 == 1).collect();
    let pos = |v: u32| odds.iter().position(|&w| w == v).expect("odd vertex");
    let nbr = evens
        .iter()
        .map(|&v| (0..d).fold(0u32, |m, i| m | 1 << pos(v ^ 1 << i)))
        .collect();
    (evens.len(), odds.len(), nbr)
}

/// `Σ 2^{-|N(A)|}` over small `A ⊆ ℰ`, the empty set included.
pub fn sap_sum(d: usize) -> Result<DyadicRational> {
    check_sweep(d)?;
    let (ne, no, nbr) = even_odd_masks(d);
    let mut cover = vec![0u32; 1 << ne];
    for s in 1..cover.len() {
        cover[s] = cover[s & (s - 1)] | nbr[s.trailing_zeros() as usize];
    }
    let mut total = 0u64;
    for n in &cover {
        let closure = nbr.iter().filter(|&&m| m & !n == 0).count();
        if 2 * closure <= ne {
            total += 1 << (no - n.count_ones() as usize);
        }
    }
    Ok(DyadicRational::new(BigUint::from(total), no as u32))
}

/// `2^{2^{d-1}} < |𝓘(Q_d)| ≤ 2 · sap_sum(d) · 2^{2^{d-1}}`, both sides exact.
#[derive(Clone, Debug, Serialize)]
pub struct Sandwich {
    pub d: usize,
    #[serde(serialize_with = "crate::cli::record::biguint_string")]
    pub count: BigUint,
    pub sum: DyadicRational,
    #[serde(serialize_with = "crate::cli::record::biguint_string")]
    pub lower: BigUint,
    pub upper: DyadicRational,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn sandwich(d: usize) -> Result<Sandwich> {
    let sum = sap_sum(d)?;
    let count = count_independent_sets(d, false)?;
    let half = 1u32 << (d - 1);
    let lower = BigUint::one() << half;
    let upper = DyadicRational::new(sum.numerator() << (half + 1), sum.exponent());
    let upper_holds = &count << upper.exponent() <= *upper.numerator();
    Ok(Sandwich {
        d,
        lower_holds: count > lower,
        upper_holds,
        count,
        sum,
        lower,
        upper,
    })
}

/// Whether `|𝓘(Q_d)| ≤ 2 · sap_sum(d) · 2^{2^{d-1}}`.
pub fn upper_bound_check(d: usize) -> Result<bool> {
    Ok(sandwich(d)?.upper_holds)
}

/// Number of `k`-subsets of `ℰ` whose neighborhoods are pairwise disjoint (`|N(S)| = kd`).
///
/// Fails once more than `budget` partial selections have been tried.
pub fn f_k(d: usize, k: usize, budget: u64) -> Result<BigUint> {
    if d == 0 || d > crate::graph::MAX_DIMENSION {
        return Err(Error::Domain(format!("dimension {d} is out of range")));
    }
    let evens: Vec<u32> = (0..1u32 << d).filter(|v| v.count_ones() % 2 == 0).collect();
    let mut used = vec![false; 1 << d];
    let mut visited = 0u64;
    let mut count = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        d: usize,
        evens: &[u32],
        start: usize,
        left: usize,
        used: &mut [bool],
        visited: &mut u64,
        budget: u64,
        count: &mut u64,
    ) -> bool {
        if left == 0 {
            *count += 1;
            return true;
        }
        for (i, &v) in evens.iter().enumerate().skip(start) {
            if evens.len() - i < left {
                break;
            }
            if (0..d).any(|b| used[(v ^ 1 << b) as usize]) {
                continue;
            }
            *visited += 1;
            if *visited > budget {
                return false;
            }
            (0..d).for_each(|b| used[(v ^ 1 << b) as usize] = true);
            let ok = rec(d, evens, i + 1, left - 1, used, visited, budget, count);
            (0..d).for_each(|b| used[(v ^ 1 << b) as usize] = false);
            if !ok {
                return false;
            }
        }
        true
    }
    if !rec(d, &evens, 0, k, &mut used, &mut visited, budget, &mut count) {
        return Err(Error::EnumerationLimit {
            limit: budget,
            progress: visited - 1,
            context: format!("{k}-subsets of even vertices with disjoint neighborhoods in Q_{d}"),
        });
    }
    Ok(BigUint::from(count))
}

/// `(1/k!) ∏_{j<k} (2^{d-1} - j(C(d,2) + 1))`, or 0 once a factor is negative.
///
/// With `literal` the factors use `j - 1` in place of `j`.
pub fn f_k_lower(d: usize, k: usize, literal: bool) -> BigRational {
    let half = BigInt::one() << (d - 1);
    let step = BigInt::from(binomial(d as u64, 2)) + 1;
    let mut product = BigInt::one();
    let mut factorial = BigInt::one();
    for j in 0..k as i64 {
        let idx = if literal { j - 1 } else { j };
        let factor: BigInt = &half - &step * idx;
        if factor.is_negative() {
            return BigRational::zero();
        }
        product *= factor;
        factorial *= j + 1;
    }
    BigRational::new(product, factorial)
}
