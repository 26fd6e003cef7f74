//! Fixed-universe bitsets over vertex ids.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use serde::{Deserialize, Serialize};

const WORD_BITS: usize = 64;

/// A vertex, identified by its index in the host graph.
///
/// For the hypercube, bit `i` of the id is coordinate `i` of the 0/1 string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub u32);

impl Vertex {
    #[inline]
    pub fn id(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Number of ones in the binary encoding.
    #[inline]
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }
}

impl From<u32> for Vertex {
    fn from(id: u32) -> Self {
        Vertex(id)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of `{0, .., universe - 1}` stored one bit per vertex.
///
/// Iteration is always in ascending id order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    pub fn new(universe: usize) -> Self {
        VertexSet {
            words: vec![0; universe.div_ceil(WORD_BITS)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = VertexSet {
            words: vec![!0; universe.div_ceil(WORD_BITS)],
            universe,
        };
        s.trim();
        s
    }

    pub fn from_ids<I>(universe: usize, ids: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<Vertex>,
    {
        let mut s = VertexSet::new(universe);
        for v in ids {
            s.insert(v.into());
        }
        s
    }

    /// Builds a set from the low bits of a mask; bit `i` is vertex `i`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(
            universe >= 64 || mask >> universe == 0,
            "mask exceeds universe"
        );
        let mut s = VertexSet::new(universe);
        if let Some(w) = s.words.first_mut() {
            *w = mask;
        }
        s
    }

    /// Low 64 bits as a mask; only meaningful for universes of at most 64 vertices.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub(crate) fn from_words(universe: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), universe.div_ceil(WORD_BITS));
        let mut s = VertexSet { words, universe };
        s.trim();
        s
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    fn trim(&mut self) {
        let rem = self.universe % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the ambient vertex set.
    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Number of members.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        let i = v.index();
        i < self.universe && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    /// Inserts `v`, returning whether it was absent.
    #[inline]
    pub fn insert(&mut self, v: Vertex) -> bool {
        let i = v.index();
        assert!(
            i < self.universe,
            "vertex {i} outside universe {}",
            self.universe
        );
        let w = &mut self.words[i / WORD_BITS];
        let bit = 1u64 << (i % WORD_BITS);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: Vertex) -> bool {
        let i = v.index();
        if i >= self.universe {
            return false;
        }
        let w = &mut self.words[i / WORD_BITS];
        let bit = 1u64 << (i % WORD_BITS);
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first(&self) -> Option<Vertex> {
        self.iter().next()
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().map(Vertex::id).collect()
    }

    fn check_universe(&self, other: &VertexSet) {
        assert_eq!(
            self.universe, other.universe,
            "vertex sets over different universes"
        );
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.check_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn complement(&self) -> VertexSet {
        let words = self.words.iter().map(|w| !w).collect();
        VertexSet::from_words(self.universe, words)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.check_universe(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.check_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        self.check_universe(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Compares member lists lexicographically (ascending ids), so `{0, 5} < {1}`.
    pub fn cmp_lex(&self, other: &VertexSet) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(Vertex::id)).finish()
    }
}

impl<'a> BitOr for &'a VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: &'a VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.union_with(rhs);
        out
    }
}

impl<'a> BitAnd for &'a VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: &'a VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.intersect_with(rhs);
        out
    }
}

impl<'a> Sub for &'a VertexSet {
    type Output = VertexSet;
    fn sub(self, rhs: &'a VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.difference_with(rhs);
        out
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(Vertex::id))
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = Vertex;

    #[inline]
    fn next(&mut self) -> Option<Vertex> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(Vertex((self.index * WORD_BITS + bit) as u32));
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = Vertex;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_and_iteration() {
        let a = VertexSet::from_ids(130, [0u32, 3, 64, 129]);
        let b = VertexSet::from_ids(130, [3u32, 65, 129]);
        assert_eq!((&a | &b).to_vec(), vec![0, 3, 64, 65, 129]);
        assert_eq!((&a & &b).to_vec(), vec![3, 129]);
        assert_eq!((&a - &b).to_vec(), vec![0, 64]);
        assert_eq!(a.count(), 4);
        assert!(VertexSet::from_ids(130, [3u32]).is_subset(&a));
        assert_eq!(a.complement().count(), 126);
        assert_eq!(VertexSet::full(130).count(), 130);
    }

    #[test]
    fn lexicographic_order() {
        let a = VertexSet::from_ids(8, [0u32, 5]);
        let b = VertexSet::from_ids(8, [1u32]);
        let c = VertexSet::from_ids(8, [0u32]);
        assert_eq!(a.cmp_lex(&b), Ordering::Less);
        assert_eq!(c.cmp_lex(&a), Ordering::Less);
    }

    #[test]
    fn masks() {
        let s = VertexSet::from_mask(16, 0b1010);
        assert_eq!(s.to_vec(), vec![1, 3]);
        assert_eq!(s.to_mask(), 0b1010);
    }
}
