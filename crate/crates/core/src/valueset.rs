use std::fmt;

use serde::{Deserialize, Serialize};

/// A set of value indices drawn from a domain of at most 16 values.
///
/// Used both for attribute-grid cells (scalar attributes are singletons) and
/// for the regime filters that restrict which indices may appear.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueSet(u16);

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet(0);

    pub const fn from_bits(bits: u16) -> Self {
        ValueSet(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 16);
        if n >= 16 {
            ValueSet(u16::MAX)
        } else {
            ValueSet((1u16 << n) - 1)
        }
    }

    pub fn singleton(i: u8) -> Self {
        debug_assert!(i < 16);
        ValueSet(1 << i)
    }

    pub fn range(lo: u8, hi_inclusive: u8) -> Self {
        (lo..=hi_inclusive).collect()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: u8) -> bool {
        i < 16 && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: u8) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: u8) {
        self.0 &= !(1 << i);
    }

    pub fn union(self, other: Self) -> Self {
        ValueSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ValueSet(self.0 & other.0)
    }

    pub fn symmetric_difference(self, other: Self) -> Self {
        ValueSet(self.0 ^ other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ValueSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// The single member, if the set is a singleton.
    pub fn single(self) -> Option<u8> {
        (self.len() == 1).then(|| self.0.trailing_zeros() as u8)
    }

    pub fn min(self) -> Option<u8> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as u8)
    }

    pub fn max(self) -> Option<u8> {
        (!self.is_empty()).then(|| 15 - self.0.leading_zeros() as u8)
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0u8..16).filter(move |i| self.contains(*i))
    }

    pub fn to_vec(self) -> Vec<u8> {
        self.iter().collect()
    }
}

impl FromIterator<u8> for ValueSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut s = ValueSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
