//! Vertex isoperimetry in the hypercube: Hamming balls, boundary ratios and
//! exhaustive neighborhood minimization at small dimension.

use num_rational::Rational64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_hypercube, Parity, RegularBipartiteGraph, MAX_DIMENSION};
use crate::vertex_set::{Vertex, VertexSet};

/// Largest dimension for exhaustive subset sweeps.
pub const EXHAUSTIVE_MAX_DIMENSION: usize = 5;

/// Parameters of one realized even or odd Hamming ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HammingBallSpec {
    pub center: Vertex,
    /// Every class vertex within this distance of the center is included.
    pub inner_radius: usize,
    /// Number of class vertices taken from the next layer.
    pub fill: usize,
    pub parity: Parity,
}

fn class_vertices(d: usize, parity: Parity) -> Vec<u32> {
    (0..1u32 << d)
        .filter(|&v| Parity::of(Vertex(v)) == parity)
        .collect()
}

fn check_dimension(d: usize) -> Result<()> {
    if !(1..=MAX_DIMENSION).contains(&d) {
        return Err(Error::SizeLimit(format!(
            "dimension {d} outside 1..={MAX_DIMENSION}"
        )));
    }
    Ok(())
}

/// Class members grouped by distance from `center`, each group ascending.
fn layers(d: usize, parity: Parity, center: Vertex) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); d + 1];
    for v in class_vertices(d, parity) {
        out[(v ^ center.0).count_ones() as usize].push(v);
    }
    out.retain(|l| !l.is_empty());
    out
}

/// The `parity` Hamming ball of exactly `size` vertices about `center`.
///
/// Whole layers are taken by distance; the last, partial layer is filled in ascending id order.
pub fn hamming_ball(d: usize, parity: Parity, size: usize, center: Vertex) -> Result<VertexSet> {
    Ok(hamming_ball_spec(d, parity, size, center)?.0)
}

pub fn hamming_ball_spec(
    d: usize,
    parity: Parity,
    size: usize,
    center: Vertex,
) -> Result<(VertexSet, HammingBallSpec)> {
    check_dimension(d)?;
    let half = 1usize << (d - 1);
    if size > half {
        return Err(Error::Domain(format!(
            "ball size {size} exceeds class size {half}"
        )));
    }
    if center.index() >= 1 << d {
        return Err(Error::Domain(format!("center {center} outside Q_{d}")));
    }
    let mut set = VertexSet::new(1 << d);
    let mut left = size;
    let mut inner_radius = 0;
    let mut fill = 0;
    for layer in layers(d, parity, center) {
        let dist = (layer[0] ^ center.0).count_ones() as usize;
        if left >= layer.len() {
            layer.iter().for_each(|&v| {
                set.insert(Vertex(v));
            });
            left -= layer.len();
            inner_radius = dist;
            if left == 0 {
                break;
            }
        } else {
            layer[..left].iter().for_each(|&v| {
                set.insert(Vertex(v));
            });
            fill = left;
            break;
        }
    }
    if size == 0 {
        inner_radius = 0;
    }
    Ok((
        set,
        HammingBallSpec {
            center,
            inner_radius,
            fill,
            parity,
        },
    ))
}

/// `(|N(A)| - |A|) / |N(A)|` for a nonempty one-sided `A`.
pub fn boundary_ratio(g: &RegularBipartiteGraph, a: &VertexSet) -> Result<Rational64> {
    if g.side_of_set(a)?.is_none() {
        return Err(Error::Domain("boundary ratio of the empty set".into()));
    }
    let n = g.neighborhood(a).count() as i64;
    Ok(Rational64::new(n - a.count() as i64, n))
}

/// Neighbor masks of `Q_d` for `d ≤ 6`.
fn neighbor_masks(d: usize) -> Vec<u64> {
    (0..1u64 << d)
        .map(|v| (0..d).fold(0u64, |m, i| m | 1 << (v ^ 1 << i)))
        .collect()
}

fn mask_neighborhood(nbr: &[u64], set: u64) -> u64 {
    let mut rest = set;
    let mut out = 0;
    while rest != 0 {
        out |= nbr[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    out
}

/// How [`min_neighborhood`] searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every subset of the requested size; `d ≤ 5`.
    Exhaustive,
    /// Random subsets; yields an upper bound on the minimum.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinNeighborhood {
    pub size: usize,
    pub min_neighborhood: usize,
    /// Lexicographically smallest minimizer found.
    pub minimizer: VertexSet,
    pub exhaustive: bool,
}

/// Visits the index combinations of `k` out of `n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum of `|N(A)|` over `A` in the `parity` class with `|A| = size`.
pub fn min_neighborhood(
    d: usize,
    parity: Parity,
    size: usize,
    mode: SearchMode,
) -> Result<MinNeighborhood> {
    check_dimension(d)?;
    let members = class_vertices(d, parity);
    if size > members.len() {
        return Err(Error::Domain(format!(
            "size {size} exceeds class size {}",
            members.len()
        )));
    }
    match mode {
        SearchMode::Exhaustive => {
            if d > EXHAUSTIVE_MAX_DIMENSION {
                return Err(Error::EnumerationLimit {
                    limit: 1 << (1 << (EXHAUSTIVE_MAX_DIMENSION - 1)),
                    progress: 0,
                    context: format!("exhaustive neighborhood search in Q_{d}"),
                });
            }
            let nbr = neighbor_masks(d);
            let mut best = (usize::MAX, 0u64);
            for_each_combination(members.len(), size, |idx| {
                let set = idx.iter().fold(0u64, |m, &i| m | 1 << members[i]);
                let n = mask_neighborhood(&nbr, set).count_ones() as usize;
                if n < best.0 {
                    best = (n, set);
                }
            });
            Ok(MinNeighborhood {
                size,
                min_neighborhood: best.0,
                minimizer: VertexSet::from_mask(1 << d, best.1),
                exhaustive: true,
            })
        }
        SearchMode::Sampled { samples, seed } => {
            let g = build_hypercube(d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(usize, VertexSet)> = None;
            // Canonical balls about an even and an odd center are always candidates.
            let balls = [
                hamming_ball(d, parity, size, Vertex(0))?,
                hamming_ball(d, parity, size, Vertex(1))?,
            ];
            let mut consider = |set: VertexSet| {
                let n = g.neighborhood(&set).count();
                let better = match &best {
                    None => true,
                    Some((m, s)) => n < *m || (n == *m && set.cmp_lex(s).is_lt()),
                };
                if better {
                    best = Some((n, set));
                }
            };
            balls.into_iter().for_each(&mut consider);
            for _ in 0..samples {
                let picks = sample(&mut rng, members.len(), size);
                consider(VertexSet::from_ids(
                    1 << d,
                    picks.iter().map(|i| members[i]),
                ));
            }
            let (min_neighborhood, minimizer) = best.expect("at least the ball was considered");
            Ok(MinNeighborhood {
                size,
                min_neighborhood,
                minimizer,
                exhaustive: false,
            })
        }
    }
}

/// Minimum of `|N(B)|` over every `parity` Hamming ball `B` of the given size:
/// all centers, and every choice of the partial outer layer.
pub fn min_ball_neighborhood(d: usize, parity: Parity, size: usize) -> Result<usize> {
    check_dimension(d)?;
    if d > 6 {
        return Err(Error::SizeLimit(format!(
            "ball enumeration in Q_{d} needs d ≤ 6"
        )));
    }
    if size > 1 << (d - 1) {
        return Err(Error::Domain(format!("size {size} exceeds class size")));
    }
    let nbr = neighbor_masks(d);
    let mut best = usize::MAX;
    for center in 0..1u32 << d {
        let mut inner = 0u64;
        let mut left = size;
        let mut partial: &[u32] = &[];
        let center_layers = layers(d, parity, Vertex(center));
        for layer in &center_layers {
            if left >= layer.len() {
                inner |= layer.iter().fold(0u64, |m, &v| m | 1 << v);
                left -= layer.len();
            } else {
                partial = layer;
                break;
            }
        }
        let inner_n = mask_neighborhood(&nbr, inner);
        for_each_combination(partial.len(), left, |idx| {
            let fill = idx.iter().fold(0u64, |m, &i| m | 1 << partial[i]);
            let n = (inner_n | mask_neighborhood(&nbr, fill)).count_ones() as usize;
            best = best.min(n);
        });
    }
    Ok(best)
}

/// Observed full-layer ratio `|B_i| / |N⁺(B_i)|` and the bound `(2i+1)/(d-2i)`.
///
/// `None` stands for an unbounded ratio (empty upper layer, `2i = d`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerRatio {
    pub d: usize,
    pub i: usize,
    pub layer_size: usize,
    pub upper_size: usize,
    #[serde(serialize_with = "ratio_opt")]
    pub observed: Option<Rational64>,
    #[serde(serialize_with = "ratio_opt")]
    pub bound: Option<Rational64>,
}

fn ratio_opt<S: serde::Serializer>(
    r: &Option<Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_str("inf"),
    }
}

impl LayerRatio {
    pub fn holds(&self) -> bool {
        match (self.observed, self.bound) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(o), Some(b)) => o <= b,
        }
    }

    pub fn is_equality(&self) -> bool {
        self.observed == self.bound
    }
}

/// Measures the layer `B_i` at distance `2i` from `0` in `Q_d` and its upper neighborhood.
pub fn layer_ratio(d: usize, i: usize) -> Result<LayerRatio> {
    check_dimension(d)?;
    if 2 * i > d {
        return Err(Error::Domain(format!("need 2i ≤ d, got i = {i}, d = {d}")));
    }
    let g = build_hypercube(d)?;
    let layer = g.set_of((0..1u32 << d).filter(|v| v.count_ones() as usize == 2 * i));
    let upper: VertexSet = {
        let n = g.neighborhood(&layer);
        g.set_of(n.iter().filter(|v| v.weight() as usize == 2 * i + 1))
    };
    let (b, u) = (layer.count() as i64, upper.count() as i64);
    Ok(LayerRatio {
        d,
        i,
        layer_size: b as usize,
        upper_size: u as usize,
        observed: (u > 0).then(|| Rational64::new(b, u)),
        bound: (2 * i < d).then(|| Rational64::new(2 * i as i64 + 1, (d - 2 * i) as i64)),
    })
}

/// Constant `C` in the small-set expansion check `|A| / |N(A)| ≤ C / d` for `|A| ≤ d`.
///
/// The extremal sets in the exhaustive sweeps (`d ≤ 5`) are the `d` even neighbors of an
/// odd vertex, with `|N(A)| = 1 + C(d, 2)`. Then `d · |A| / |N(A)| = 2d² / (d² - d + 2)`,
/// which peaks at `16/7` for `d = 4`.
pub const EXPANSION_CONSTANT: (i64, i64) = (16, 7);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub d: usize,
    pub max_size: usize,
    #[serde(serialize_with = "crate::iso::ratio_str")]
    pub max_ratio: Rational64,
    pub witness: VertexSet,
    pub exhaustive: bool,
    #[serde(serialize_with = "crate::iso::ratio_str")]
    pub bound: Rational64,
    /// Whether `max_ratio ≤ bound`; only asserted when `max_size ≤ d`.
    pub holds: Option<bool>,
}

pub(crate) fn ratio_str<S: serde::Serializer>(
    r: &Rational64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// Largest `|A| / |N(A)|` over even `A` with `1 ≤ |A| ≤ max_size`.
///
/// Exhaustive for `d ≤ 5`; for `6 ≤ d ≤ 12` the canonical ball at each size plus
/// `samples` random sets per size are examined, which only bounds the maximum from below.
pub fn check_small_set_expansion(
    d: usize,
    max_size: usize,
    samples: usize,
    seed: u64,
) -> Result<ExpansionReport> {
    check_dimension(d)?;
    if d > 12 {
        return Err(Error::SizeLimit(format!(
            "expansion check supports d ≤ 12, got {d}"
        )));
    }
    let half = 1usize << (d - 1);
    let max_size = max_size.min(half);
    let mut best: Option<(Rational64, VertexSet)> = None;
    let exhaustive = d <= EXHAUSTIVE_MAX_DIMENSION;
    for size in 1..=max_size {
        let found = if exhaustive {
            min_neighborhood(d, Parity::Even, size, SearchMode::Exhaustive)?
        } else {
            min_neighborhood(
                d,
                Parity::Even,
                size,
                SearchMode::Sampled {
                    samples,
                    seed: seed ^ size as u64,
                },
            )?
        };
        let ratio = Rational64::new(size as i64, found.min_neighborhood as i64);
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, found.minimizer));
        }
    }
    let (max_ratio, witness) =
        best.unwrap_or((Rational64::from_integer(0), VertexSet::new(1 << d)));
    let bound = Rational64::new(EXPANSION_CONSTANT.0, EXPANSION_CONSTANT.1 * d as i64);
    Ok(ExpansionReport {
        d,
        max_size,
        max_ratio,
        witness,
        exhaustive,
        bound,
        holds: (max_size <= d).then_some(max_ratio <= bound),
    })
}

/// Radius `k` (even) of the even ball about `0` realizing size `size`:
/// the largest even `r` whose full ball has at most `size` vertices.
pub fn realized_radius(d: usize, size: usize) -> usize {
    let mut total = 0usize;
    let mut radius = 0;
    let mut r = 0;
    while r <= d {
        total += crate::combinatorics::binomial(d as u64, r as u64)
            .try_into()
            .unwrap_or(usize::MAX);
        if total > size {
            break;
        }
        radius = r;
        r += 2;
    }
    radius
}

/// Exhaustive check over even `A` with `1 ≤ |A| ≤ 2^{d-2}`: the boundary ratio is positive,
/// and at least `1/3` whenever the realized radius satisfies `4k ≤ d`.
#[derive(Clone, Debug, Serialize)]
pub struct SmallSetBoundaryReport {
    pub d: usize,
    pub sets_checked: u64,
    #[serde(serialize_with = "crate::iso::ratio_str")]
    pub min_ratio: Rational64,
    #[serde(serialize_with = "crate::iso::ratio_str")]
    pub min_ratio_low_radius: Rational64,
    pub positive: bool,
    pub third_when_low_radius: bool,
    pub counterexample: Option<VertexSet>,
}

pub fn check_small_set_boundary(d: usize) -> Result<SmallSetBoundaryReport> {
    check_dimension(d)?;
    if !(2..=EXHAUSTIVE_MAX_DIMENSION).contains(&d) {
        return Err(Error::SizeLimit(format!(
            "exhaustive boundary check needs 2 ≤ d ≤ 5, got {d}"
        )));
    }
    let nbr = neighbor_masks(d);
    let evens = class_vertices(d, Parity::Even);
    let cap = 1usize << (d - 2);
    let third = Rational64::new(1, 3);
    let mut report = SmallSetBoundaryReport {
        d,
        sets_checked: 0,
        min_ratio: Rational64::from_integer(1),
        min_ratio_low_radius: Rational64::from_integer(1),
        positive: true,
        third_when_low_radius: true,
        counterexample: None,
    };
    for bits in 1u64..1 << evens.len() {
        let size = bits.count_ones() as usize;
        if size > cap {
            continue;
        }
        let set = (0..evens.len())
            .filter(|i| bits >> i & 1 == 1)
            .fold(0u64, |m, i| m | 1 << evens[i]);
        let n = mask_neighborhood(&nbr, set).count_ones() as i64;
        let ratio = Rational64::new(n - size as i64, n);
        report.sets_checked += 1;
        report.min_ratio = report.min_ratio.min(ratio);
        let low_radius = 4 * realized_radius(d, size) <= d;
        if low_radius {
            report.min_ratio_low_radius = report.min_ratio_low_radius.min(ratio);
        }
        let bad = ratio <= Rational64::from_integer(0) || (low_radius && ratio < third);
        if bad && report.counterexample.is_none() {
            report.counterexample = Some(VertexSet::from_mask(1 << d, set));
        }
        report.positive &= ratio > Rational64::from_integer(0);
        report.third_when_low_radius &= !low_radius || ratio >= third;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vertex_from_bits;

    fn bits(s: &str) -> u32 {
        vertex_from_bits(s).unwrap().0
    }

    #[test]
    fn ball_examples() {
        let b = hamming_ball(3, Parity::Even, 1, Vertex(0)).unwrap();
        assert_eq!(b.to_vec(), vec![0]);
        let b = hamming_ball(3, Parity::Even, 4, Vertex(0)).unwrap();
        assert_eq!(b.to_vec(), vec![0, 3, 5, 6]);
        let b = hamming_ball(3, Parity::Even, 2, Vertex(0)).unwrap();
        assert_eq!(b.to_vec(), vec![bits("000"), bits("011")]);
        assert!(hamming_ball(3, Parity::Even, 5, Vertex(0)).is_err());
    }

    #[test]
    fn ball_specs() {
        let (_, spec) = hamming_ball_spec(4, Parity::Even, 4, Vertex(0)).unwrap();
        assert_eq!((spec.inner_radius, spec.fill), (0, 3));
        let (_, spec) = hamming_ball_spec(4, Parity::Even, 7, Vertex(0)).unwrap();
        assert_eq!((spec.inner_radius, spec.fill), (2, 0));
        // odd center: even vertices sit at odd distances
        let (b, spec) = hamming_ball_spec(3, Parity::Even, 3, Vertex(1)).unwrap();
        assert_eq!(b.to_vec(), vec![0, 3, 5]);
        assert_eq!((spec.inner_radius, spec.fill), (1, 0));
    }

    #[test]
    fn ratios() {
        let g3 = build_hypercube(3).unwrap();
        let g2 = build_hypercube(2).unwrap();
        assert_eq!(
            boundary_ratio(&g3, &g3.set_of([0u32])).unwrap(),
            Rational64::new(2, 3)
        );
        assert_eq!(
            boundary_ratio(&g3, &g3.set_of([0u32, 3])).unwrap(),
            Rational64::new(1, 2)
        );
        assert_eq!(
            boundary_ratio(&g2, &g2.set_of([0u32])).unwrap(),
            Rational64::new(1, 2)
        );
        assert!(boundary_ratio(&g3, &g3.empty_set()).is_err());
    }

    #[test]
    fn min_neighborhood_examples() {
        let m = |d, s| {
            min_neighborhood(d, Parity::Even, s, SearchMode::Exhaustive)
                .unwrap()
                .min_neighborhood
        };
        assert_eq!(m(3, 1), 3);
        assert_eq!(m(3, 2), 4);
        assert_eq!(m(4, 2), 6);
        let first = min_neighborhood(4, Parity::Even, 2, SearchMode::Exhaustive).unwrap();
        assert_eq!(first.minimizer.to_vec(), vec![bits("0000"), bits("0011")]);
        assert!(min_neighborhood(6, Parity::Even, 2, SearchMode::Exhaustive).is_err());
    }

    #[test]
    fn sampled_mode_bounds_from_above() {
        let exact = min_neighborhood(5, Parity::Even, 4, SearchMode::Exhaustive).unwrap();
        let sampled = min_neighborhood(
            5,
            Parity::Even,
            4,
            SearchMode::Sampled {
                samples: 50,
                seed: 3,
            },
        )
        .unwrap();
        assert!(sampled.min_neighborhood >= exact.min_neighborhood);
        assert!(!sampled.exhaustive);
    }

    #[test]
    fn layer_examples() {
        let r = layer_ratio(5, 1).unwrap();
        assert_eq!(r.observed, Some(Rational64::new(1, 1)));
        assert_eq!(r.bound, Some(Rational64::new(1, 1)));
        let r = layer_ratio(4, 0).unwrap();
        assert_eq!(
            (r.observed, r.bound),
            (Some(Rational64::new(1, 4)), Some(Rational64::new(1, 4)))
        );
        let r = layer_ratio(6, 1).unwrap();
        assert_eq!((r.layer_size, r.upper_size), (15, 20));
        assert_eq!(r.bound, Some(Rational64::new(3, 4)));
        let r = layer_ratio(4, 2).unwrap();
        assert_eq!((r.observed, r.bound), (None, None));
        assert!(r.holds());
        assert!(layer_ratio(4, 3).is_err());
    }

    #[test]
    fn expansion_examples() {
        let r = check_small_set_expansion(3, 1, 0, 0).unwrap();
        assert_eq!(r.max_ratio, Rational64::new(1, 3));
        let r = check_small_set_expansion(4, 2, 0, 0).unwrap();
        assert_eq!(r.max_ratio, Rational64::new(1, 3));
        // four even neighbors of an odd vertex have only seven neighbors
        let r = check_small_set_expansion(4, 4, 0, 0).unwrap();
        assert_eq!(r.max_ratio, Rational64::new(4, 7));
        assert_eq!(r.holds, Some(true));
        let r = check_small_set_expansion(3, 3, 0, 0).unwrap();
        assert_eq!(r.max_ratio, Rational64::new(3, 4));
        assert_eq!(r.holds, Some(true));
    }

    #[test]
    fn sampled_expansion_sees_odd_centered_balls() {
        for d in 6..=8 {
            let r = check_small_set_expansion(d, d, 20, 1).unwrap();
            let half_d = (d * (d - 1) / 2 + 1) as i64;
            assert!(r.max_ratio >= Rational64::new(d as i64, half_d), "d = {d}");
            assert_eq!(r.holds, Some(true));
        }
    }

    #[test]
    fn radius() {
        assert_eq!(realized_radius(5, 1), 0);
        assert_eq!(realized_radius(5, 10), 0);
        assert_eq!(realized_radius(5, 11), 2);
        assert_eq!(realized_radius(4, 8), 4);
    }
}
