//! Dense bitset over element indices of one ring.

use crate::ring::Elem;

/// Subset of a ring's elements, indexed by `Elem`. Carries the ring's
/// fingerprint so that cross-ring mixups are detectable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElemSet {
    n: usize,
    fp: u64,
    bits: Vec<u64>,
}

impl ElemSet {
    pub fn empty(n: usize, fp: u64) -> Self {
        ElemSet { n, fp, bits: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize, fp: u64) -> Self {
        let mut s = Self::empty(n, fp);
        for i in 0..n {
            s.insert(Elem(i as u32));
        }
        s
    }

    pub fn from_iter_of(n: usize, fp: u64, it: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Self::empty(n, fp);
        for e in it {
            s.insert(e);
        }
        s
    }

    pub fn universe_len(&self) -> usize {
        self.n
    }

    pub fn ring_fingerprint(&self) -> u64 {
        self.fp
    }

    /// Returns true if the element was newly inserted.
    pub fn insert(&mut self, e: Elem) -> bool {
        let (w, b) = (e.0 as usize / 64, e.0 as usize % 64);
        let fresh = self.bits[w] & (1 << b) == 0;
        self.bits[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, e: Elem) {
        let (w, b) = (e.0 as usize / 64, e.0 as usize % 64);
        self.bits[w] &= !(1 << b);
    }

    pub fn contains(&self, e: Elem) -> bool {
        let (w, b) = (e.0 as usize / 64, e.0 as usize % 64);
        self.bits[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.n).map(|i| Elem(i as u32)).filter(|&e| self.contains(e))
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersect(&self, other: &ElemSet) -> ElemSet {
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        ElemSet { n: self.n, fp: self.fp, bits }
    }
}

impl std::fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}
