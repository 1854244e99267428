use std::fmt;

use crate::error::{Error, Result};

/// Largest party count a mask can address.
pub const MAX_PARTIES: usize = 32;

/// A subset of the parties `{0, .., n-1}`, stored as a bit mask.
///
/// Party `i` is a member iff bit `i` is set. Parties are 0-based here; the
/// JSON keys and the CLI use 1-based labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u64,
    n: usize,
}

impl SubsetMask {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_PARTIES {
            return Err(Error::InvalidDims(format!("party count {n} outside 1..={MAX_PARTIES}")));
        }
        if bits >> n != 0 {
            return Err(Error::IndexOutOfRange {
                what: "subset bit",
                index: 63 - bits.leading_zeros() as usize,
                bound: n,
            });
        }
        Ok(Self { bits, n })
    }

    pub fn empty(n: usize) -> Self {
        Self { bits: 0, n }
    }

    pub fn full(n: usize) -> Self {
        Self { bits: full_bits(n), n }
    }

    pub fn single(party: usize, n: usize) -> Result<Self> {
        Self::from_parties(&[party], n)
    }

    /// Builds a mask from 0-based party indices.
    pub fn from_parties(parties: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &p in parties {
            if p >= n {
                return Err(Error::IndexOutOfRange {
                    what: "party",
                    index: p,
                    bound: n,
                });
            }
            bits |= 1 << p;
        }
        Self::new(bits, n)
    }

    /// Every subset of an `n`-party system, in increasing bit order.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..1u64 << n).map(move |bits| SubsetMask { bits, n })
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(self, party: usize) -> bool {
        party < self.n && self.bits >> party & 1 == 1
    }

    pub fn complement(self) -> Self {
        Self {
            bits: !self.bits & full_bits(self.n),
            n: self.n,
        }
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_full(self) -> bool {
        self.bits == full_bits(self.n)
    }

    /// True for every subset other than the empty and the full set.
    pub fn is_nontrivial(self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn union(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            bits: self.bits | other.bits,
            n: self.n,
        }
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.bits & other.bits == 0
    }

    /// Member parties, 0-based and ascending.
    pub fn parties(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.n).filter(move |&i| bits >> i & 1 == 1)
    }

    /// Sorted 1-based labels, concatenated (`"13"`), or comma separated
    /// once labels exceed one digit.
    pub fn key(self) -> String {
        let labels: Vec<String> = self.parties().map(|i| (i + 1).to_string()).collect();
        if self.n <= 9 {
            labels.concat()
        } else {
            labels.join(",")
        }
    }

    /// Inverse of [`SubsetMask::key`]. Accepts both the concatenated and the
    /// comma-separated forms.
    pub fn parse_key(key: &str, n: usize) -> Result<Self> {
        let key = key.trim();
        let labels: Vec<usize> = if key.is_empty() {
            Vec::new()
        } else if key.contains(',') {
            key.split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidSpec(format!("bad subset key {key:?}: {e}")))?
        } else {
            key.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::InvalidSpec(format!("bad subset key {key:?}")))
                })
                .collect::<Result<_>>()?
        };
        let mut parties = Vec::with_capacity(labels.len());
        for l in labels {
            if l == 0 || l > n {
                return Err(Error::InvalidSpec(format!(
                    "subset key {key:?} names party {l} outside 1..={n}"
                )));
            }
            parties.push(l - 1);
        }
        let mask = Self::from_parties(&parties, n)?;
        if mask.len() != parties.len() {
            return Err(Error::InvalidSpec(format!("subset key {key:?} repeats a party")));
        }
        Ok(mask)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.parties().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

#[inline]
fn full_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
