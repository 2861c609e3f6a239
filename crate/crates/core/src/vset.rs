use std::fmt;

/// A set of vertex indices, stored as a bitmask. Graphs are capped at 64
/// vertices so that every set fits in one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(pub u64);

pub const MAX_VERTICES: usize = 64;

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Canonical order: by size, then by the sorted index list.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.to_vec().cmp(&other.to_vec()))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        VertexSet(it.into_iter().fold(0u64, |s, v| s | 1u64 << v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
