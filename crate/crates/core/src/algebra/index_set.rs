use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Maximum bucket index representable in an [`IndexSet`].
pub const MAX_BUCKETS: u32 = 64;

/// A subset of the buckets `1..=64`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn singleton(bucket: u32) -> Self {
        assert!(
            (1..=MAX_BUCKETS).contains(&bucket),
            "bucket {bucket} out of range"
        );
        IndexSet(1 << (bucket - 1))
    }

    /// `{1, ..., d}`.
    pub fn full(d: u32) -> Self {
        assert!(d <= MAX_BUCKETS);
        if d == 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << d) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, bucket: u32) -> bool {
        (1..=MAX_BUCKETS).contains(&bucket) && self.0 & (1 << (bucket - 1)) != 0
    }

    pub fn insert(&mut self, bucket: u32) {
        *self = self.union(Self::singleton(bucket));
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest bucket, `None` for the empty set.
    pub fn min(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    /// Buckets in increasing order.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(b + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.iter().collect()
    }
}

impl FromIterator<u32> for IndexSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        iter.into_iter()
            .fold(IndexSet::EMPTY, |acc, b| acc.union(IndexSet::singleton(b)))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        let mut set = IndexSet::EMPTY;
        for b in v {
            if !(1..=MAX_BUCKETS).contains(&b) {
                return Err(serde::de::Error::custom(format!("bucket {b} out of range")));
            }
            if set.contains(b) {
                return Err(serde::de::Error::custom(format!("bucket {b} repeated")));
            }
            set.insert(b);
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let a: IndexSet = [1, 3, 5].into_iter().collect();
        let b: IndexSet = [2, 3].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert_eq!(a.union(b).to_vec(), vec![1, 2, 3, 5]);
        assert_eq!(a.intersection(b).to_vec(), vec![3]);
        assert_eq!(a.difference(b).to_vec(), vec![1, 5]);
        assert!(!a.is_disjoint(b));
        assert_eq!(a.min(), Some(1));
        assert_eq!(IndexSet::EMPTY.min(), None);
        assert_eq!(IndexSet::full(4).to_vec(), vec![1, 2, 3, 4]);
        assert_eq!(IndexSet::full(64).len(), 64);
        assert_eq!(a.to_string(), "{1,3,5}");
    }
}
