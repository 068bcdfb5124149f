use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of `E_k = {0, .., k-1}`.
pub type Elem = u8;

/// Largest supported domain size. Element sets are stored as `u32` masks.
pub const MAX_K: usize = 16;

/// Cap on `k^arity` for anything materialised as a table or bitset.
pub const MAX_CELLS: usize = 1 << 26;

/// The finite set `E_k`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Domain {
    k: usize,
}

impl Domain {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::arg(format!("domain size k={k} must be at least 2")));
        }
        if k > MAX_K {
            return Err(Error::arg(format!("domain size k={k} exceeds {MAX_K}")));
        }
        Ok(Domain { k })
    }

    #[inline]
    pub fn k(self) -> usize {
        self.k
    }

    pub fn elements(self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.k).map(|a| a as Elem)
    }

    /// `k^n`, or an error when it exceeds [`MAX_CELLS`].
    pub fn cells(self, n: usize) -> Result<usize> {
        let mut acc: usize = 1;
        for _ in 0..n {
            acc = acc
                .checked_mul(self.k)
                .filter(|&v| v <= MAX_CELLS)
                .ok_or_else(|| Error::Budget(format!("k^{n} with k={} is too large", self.k)))?;
        }
        Ok(acc)
    }

    /// Row-major rank: the first coordinate is the most significant digit.
    #[inline]
    pub fn rank(self, tuple: &[Elem]) -> usize {
        tuple
            .iter()
            .fold(0usize, |acc, &a| acc * self.k + a as usize)
    }

    pub fn decode(self, mut rank: usize, arity: usize) -> Vec<Elem> {
        let mut out = vec![0; arity];
        self.decode_into(&mut rank, &mut out);
        out
    }

    pub fn decode_into(self, rank: &mut usize, out: &mut [Elem]) {
        for slot in out.iter_mut().rev() {
            *slot = (*rank % self.k) as Elem;
            *rank /= self.k;
        }
    }

    pub fn check_elem(self, a: usize) -> Result<Elem> {
        if a < self.k {
            Ok(a as Elem)
        } else {
            Err(Error::arg(format!(
                "element {a} out of range for k={}",
                self.k
            )))
        }
    }

    pub fn full_set(self) -> ElemSet {
        ElemSet((1u32 << self.k) - 1)
    }

    pub(crate) fn same(self, other: Domain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                left: self.k,
                right: other.k,
            })
        }
    }
}

impl TryFrom<usize> for Domain {
    type Error = Error;
    fn try_from(k: usize) -> Result<Self> {
        Domain::new(k)
    }
}

impl From<Domain> for usize {
    fn from(d: Domain) -> usize {
        d.k
    }
}

/// Advances `tuple` to the next tuple in rank order; returns false after the last one.
pub fn next_tuple(tuple: &mut [Elem], k: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        if (*slot as usize) + 1 < k {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// A subset of `E_k`, stored as a bitmask.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet(pub u32);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn from_elems<I: IntoIterator<Item = Elem>>(it: I) -> Self {
        ElemSet(it.into_iter().fold(0, |m, a| m | (1 << a)))
    }

    #[inline]
    pub fn contains(self, a: Elem) -> bool {
        self.0 >> a & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: Elem) {
        self.0 |= 1 << a;
    }

    pub fn with(self, a: Elem) -> Self {
        ElemSet(self.0 | 1 << a)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersect(self, other: ElemSet) -> Self {
        ElemSet(self.0 & other.0)
    }

    pub fn union(self, other: ElemSet) -> Self {
        ElemSet(self.0 | other.0)
    }

    pub fn min(self) -> Option<Elem> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as Elem)
    }

    pub fn iter(self) -> impl Iterator<Item = Elem> + Clone {
        let mut m = self.0;
        std::iter::from_fn(move || {
            (m != 0).then(|| {
                let a = m.trailing_zeros();
                m &= m - 1;
                a as Elem
            })
        })
    }

    pub fn to_vec(self) -> Vec<Elem> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for ElemSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElemSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Elem>::deserialize(d)?;
        if v.iter().any(|&a| a as usize >= MAX_K) {
            return Err(serde::de::Error::custom("element out of range"));
        }
        Ok(ElemSet::from_elems(v))
    }
}

/// Fixed-length bitset indexed by tuple rank.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits {
            words: vec![!0; len.div_ceil(64)],
            len,
        };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn or(&self, other: &Bits) -> Bits {
        debug_assert_eq!(self.len, other.len);
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
            len: self.len,
        }
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut m = w;
            std::iter::from_fn(move || {
                (m != 0).then(|| {
                    let b = m.trailing_zeros() as usize;
                    m &= m - 1;
                    wi * 64 + b
                })
            })
        })
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}
