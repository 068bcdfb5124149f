use std::fmt;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::domain::{next_tuple, Bits, Domain, Elem, ElemSet};
use crate::error::{Error, Result, ValidationError};

/// An `h`-ary relation on `E_k`: a bitset over tuple ranks plus the member list in rank order.
#[derive(Clone)]
pub struct Relation {
    domain: Domain,
    arity: usize,
    bits: Bits,
    /// Members flattened in ascending rank order, `arity` entries per tuple.
    flat: Vec<Elem>,
    prefixes: OnceLock<Arc<Prefixes>>,
}

/// Per prefix length `j`, bitsets over `k^j`: some member extends the prefix / every extension is a member.
#[derive(Debug)]
pub(crate) struct Prefixes {
    pub(crate) some: Vec<Bits>,
    pub(crate) all: Vec<Bits>,
}

/// Result of comparing two relations by inclusion.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inclusion {
    Equal,
    /// The left relation is a proper subset of the right one.
    LeftStrict,
    /// The right relation is a proper subset of the left one.
    RightStrict,
    Incomparable,
}

impl Relation {
    pub fn from_bits(domain: Domain, arity: usize, bits: Bits) -> Result<Self> {
        if arity == 0 {
            return Err(Error::arg("relation arity must be at least 1"));
        }
        let cells = domain.cells(arity)?;
        if bits.len() != cells {
            return Err(Error::arg(format!(
                "bitset length {} != k^h = {cells}",
                bits.len()
            )));
        }
        let mut flat = Vec::with_capacity(bits.count() * arity);
        let mut buf = vec![0; arity];
        for r in bits.ones() {
            let mut rr = r;
            domain.decode_into(&mut rr, &mut buf);
            flat.extend_from_slice(&buf);
        }
        Ok(Relation {
            domain,
            arity,
            bits,
            flat,
            prefixes: OnceLock::new(),
        })
    }

    pub fn empty(domain: Domain, arity: usize) -> Result<Self> {
        Self::from_bits(domain, arity, Bits::new(domain.cells(arity)?))
    }

    pub fn full(domain: Domain, arity: usize) -> Result<Self> {
        Self::from_bits(domain, arity, Bits::full(domain.cells(arity)?))
    }

    pub fn from_tuples<I, T>(domain: Domain, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Elem]>,
    {
        let mut bits = Bits::new(domain.cells(arity)?);
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: t.len(),
                });
            }
            if let Some(&a) = t.iter().find(|&&a| a as usize >= domain.k()) {
                return Err(Error::arg(format!(
                    "entry {a} out of range for k={}",
                    domain.k()
                )));
            }
            bits.set(domain.rank(t));
        }
        Self::from_bits(domain, arity, bits)
    }

    /// All tuples satisfying `pred`, scanned in rank order.
    pub fn from_predicate(
        domain: Domain,
        arity: usize,
        mut pred: impl FnMut(&[Elem]) -> bool,
    ) -> Result<Self> {
        let mut bits = Bits::new(domain.cells(arity)?);
        let mut t = vec![0; arity];
        let mut r = 0;
        loop {
            if pred(&t) {
                bits.set(r);
            }
            r += 1;
            if !next_tuple(&mut t, domain.k()) {
                break;
            }
        }
        Self::from_bits(domain, arity, bits)
    }

    pub fn unary(domain: Domain, set: ElemSet) -> Result<Self> {
        if !set.is_subset(domain.full_set()) {
            return Err(Error::arg(format!("set {set} not within E_{}", domain.k())));
        }
        Self::from_tuples(domain, 1, set.iter().map(|a| [a]))
    }

    #[inline]
    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.domain.k()
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.bits.len()
    }

    #[inline]
    pub fn contains(&self, t: &[Elem]) -> bool {
        t.len() == self.arity
            && t.iter().all(|&a| (a as usize) < self.k())
            && self.bits.get(self.domain.rank(t))
    }

    #[inline]
    pub fn contains_rank(&self, r: usize) -> bool {
        self.bits.get(r)
    }

    /// Members in ascending rank order.
    pub fn tuples(&self) -> impl ExactSizeIterator<Item = &[Elem]> + Clone {
        self.flat.chunks_exact(self.arity)
    }

    pub fn tuple(&self, i: usize) -> &[Elem] {
        &self.flat[i * self.arity..(i + 1) * self.arity]
    }

    pub fn flat_members(&self) -> &[Elem] {
        &self.flat
    }

    pub fn member_ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub(crate) fn prefixes(&self) -> &Prefixes {
        self.prefixes.get_or_init(|| {
            let k = self.k();
            let mut some = vec![self.bits.clone()];
            let mut all = vec![self.bits.clone()];
            for _ in 0..self.arity {
                let (ps, pa) = (some.last().unwrap(), all.last().unwrap());
                let len = ps.len() / k;
                let mut s = Bits::new(len);
                let mut a = Bits::new(len);
                for p in 0..len {
                    if (0..k).any(|x| ps.get(p * k + x)) {
                        s.set(p);
                    }
                    if (0..k).all(|x| pa.get(p * k + x)) {
                        a.set(p);
                    }
                }
                some.push(s);
                all.push(a);
            }
            some.reverse();
            all.reverse();
            Arc::new(Prefixes { some, all })
        })
    }

    /// For unary relations, the member set.
    pub fn as_set(&self) -> Option<ElemSet> {
        (self.arity == 1).then(|| ElemSet::from_elems(self.flat.iter().copied()))
    }

    fn check_shape(&self, other: &Relation) -> Result<()> {
        self.domain.same(other.domain)?;
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Relation) -> Result<Relation> {
        self.check_shape(other)?;
        Self::from_bits(self.domain, self.arity, self.bits.and(&other.bits))
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_shape(other)?;
        Self::from_bits(self.domain, self.arity, self.bits.or(&other.bits))
    }

    pub fn is_subset(&self, other: &Relation) -> Result<bool> {
        self.check_shape(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    pub fn compare(&self, other: &Relation) -> Result<Inclusion> {
        self.check_shape(other)?;
        let le = self.bits.is_subset(&other.bits);
        let ge = other.bits.is_subset(&self.bits);
        Ok(match (le, ge) {
            (true, true) => Inclusion::Equal,
            (true, false) => Inclusion::LeftStrict,
            (false, true) => Inclusion::RightStrict,
            (false, false) => Inclusion::Incomparable,
        })
    }

    /// Image under an element permutation `perm` of `E_k`.
    pub fn map_elements(&self, perm: &[Elem]) -> Result<Relation> {
        if perm.len() != self.k() {
            return Err(Error::arg("permutation length must equal k"));
        }
        let mut buf = vec![0; self.arity];
        let mut bits = Bits::new(self.bits.len());
        for t in self.tuples() {
            for (b, &a) in buf.iter_mut().zip(t) {
                *b = perm[a as usize];
            }
            bits.set(self.domain.rank(&buf));
        }
        Self::from_bits(self.domain, self.arity, bits)
    }

    /// First tuple with a repeated entry that is not a member, if any.
    pub fn first_non_reflexive(&self) -> Option<Vec<Elem>> {
        if self.arity < 2 {
            return None;
        }
        let mut t = vec![0; self.arity];
        let mut r = 0;
        loop {
            if has_repeat(&t) && !self.bits.get(r) {
                return Some(t);
            }
            r += 1;
            if !next_tuple(&mut t, self.k()) {
                return None;
            }
        }
    }

    pub fn is_totally_reflexive(&self) -> bool {
        self.first_non_reflexive().is_none()
    }

    /// First member whose image under some adjacent transposition is missing.
    pub fn first_non_symmetric(&self) -> Option<(Vec<Elem>, Vec<Elem>)> {
        let mut buf = vec![0; self.arity];
        for t in self.tuples() {
            for i in 1..self.arity {
                buf.copy_from_slice(t);
                buf.swap(i - 1, i);
                if !self.bits.get(self.domain.rank(&buf)) {
                    return Some((t.to_vec(), buf));
                }
            }
        }
        None
    }

    pub fn is_totally_symmetric(&self) -> bool {
        self.first_non_symmetric().is_none()
    }

    /// `{a : (a, a_2, .., a_h) ∈ rel for all a_2, .., a_h}`; the member set when unary.
    pub fn center(&self) -> ElemSet {
        let block = self.bits.len() / self.k();
        let mut out = ElemSet::EMPTY;
        for a in self.domain.elements() {
            let start = a as usize * block;
            if (start..start + block).all(|r| self.bits.get(r)) {
                out.insert(a);
            }
        }
        out
    }

    /// Whether `B^h ⊆ rel`.
    pub fn is_chain(&self, b: ElemSet) -> bool {
        let elems = b.to_vec();
        if elems.is_empty() {
            return true;
        }
        let mut idx = vec![0usize; self.arity];
        let mut t = vec![0; self.arity];
        loop {
            for (x, &i) in t.iter_mut().zip(&idx) {
                *x = elems[i];
            }
            if !self.bits.get(self.domain.rank(&t)) {
                return false;
            }
            let mut p = self.arity;
            loop {
                if p == 0 {
                    return true;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < elems.len() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }

    pub fn validate_central(&self) -> Result<(), ValidationError> {
        if let Some(t) = self.first_non_reflexive() {
            return Err(ValidationError::NotReflexive(t));
        }
        if let Some((member, missing)) = self.first_non_symmetric() {
            return Err(ValidationError::NotSymmetric { member, missing });
        }
        let c = self.center();
        if c.is_empty() {
            return Err(ValidationError::EmptyCenter);
        }
        if c == self.domain.full_set() {
            return Err(ValidationError::ImproperCenter);
        }
        Ok(())
    }

    pub fn to_json(&self) -> RelationJson {
        RelationJson {
            k: self.k(),
            arity: self.arity,
            tuples: self.tuples().map(|t| t.to_vec()).collect(),
        }
    }
}

pub(crate) fn has_repeat(t: &[Elem]) -> bool {
    let mut seen = 0u32;
    for &a in t {
        if seen >> a & 1 == 1 {
            return true;
        }
        seen |= 1 << a;
    }
    false
}

/// `ι_k^h`: all `h`-tuples with at least one repeated coordinate.
pub fn diagonal(domain: Domain, h: usize) -> Result<Relation> {
    if h < 2 {
        return Err(Error::arg(format!(
            "diagonal relation needs arity h >= 2, got {h}"
        )));
    }
    Relation::from_predicate(domain, h, has_repeat)
}

/// `ι_k^h` together with every tuple meeting `centers`; for `h = 1` just `centers`.
pub fn star(domain: Domain, h: usize, centers: ElemSet) -> Result<Relation> {
    if h == 1 {
        return Relation::unary(domain, centers);
    }
    Relation::from_predicate(domain, h, |t| {
        has_repeat(t) || t.iter().any(|&a| centers.contains(a))
    })
}

/// Strictly increasing `h`-tuples over `E_k`, in lexicographic order.
pub fn rainbow_subsets(domain: Domain, h: usize) -> Vec<Vec<Elem>> {
    domain.elements().combinations(h).collect()
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.arity == other.arity && self.bits == other.bits
    }
}

impl Eq for Relation {}

impl std::hash::Hash for Relation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.domain.hash(state);
        self.arity.hash(state);
        self.bits.hash(state);
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation(k={}, h={}, ", self.k(), self.arity)?;
        f.debug_set().entries(self.tuples()).finish()?;
        write!(f, ")")
    }
}

/// JSON form `{"k":K,"arity":H,"tuples":[[..],..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub k: usize,
    pub arity: usize,
    pub tuples: Vec<Vec<Elem>>,
}

impl TryFrom<RelationJson> for Relation {
    type Error = Error;
    fn try_from(j: RelationJson) -> Result<Self> {
        Relation::from_tuples(Domain::new(j.k)?, j.arity, j.tuples)
    }
}

impl From<Relation> for RelationJson {
    fn from(r: Relation) -> Self {
        r.to_json()
    }
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RelationJson::deserialize(d)?;
        Relation::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(k: usize) -> Domain {
        Domain::new(k).unwrap()
    }

    fn star3() -> Relation {
        let diag = diagonal(d(3), 2).unwrap();
        diag.union(&Relation::from_tuples(d(3), 2, [[0, 1], [1, 0], [0, 2], [2, 0]]).unwrap())
            .unwrap()
    }

    #[test]
    fn diagonal_sizes() {
        assert_eq!(diagonal(d(3), 2).unwrap().len(), 3);
        assert_eq!(diagonal(d(3), 3).unwrap().len(), 21);
        assert!(diagonal(d(2), 3).unwrap().is_full());
        assert!(diagonal(d(3), 1).is_err());
    }

    #[test]
    fn totality_examples() {
        let iota = diagonal(d(3), 2).unwrap();
        assert!(iota.is_totally_reflexive() && iota.is_totally_symmetric());
        let s = star3();
        assert!(s.is_totally_reflexive() && s.is_totally_symmetric());
        let lop = iota
            .union(&Relation::from_tuples(d(3), 2, [[0, 1]]).unwrap())
            .unwrap();
        assert!(lop.is_totally_reflexive());
        assert!(!lop.is_totally_symmetric());
    }

    #[test]
    fn center_examples() {
        assert_eq!(star3().center(), ElemSet::from_elems([0]));
        assert!(diagonal(d(3), 2).unwrap().center().is_empty());
        assert_eq!(Relation::full(d(3), 2).unwrap().center(), d(3).full_set());
    }

    #[test]
    fn validation_errors() {
        assert!(star3().validate_central().is_ok());
        assert_eq!(
            Relation::full(d(3), 2).unwrap().validate_central(),
            Err(ValidationError::ImproperCenter)
        );
        assert_eq!(
            diagonal(d(3), 2).unwrap().validate_central(),
            Err(ValidationError::EmptyCenter)
        );
        let u = Relation::unary(d(3), ElemSet::from_elems([0])).unwrap();
        assert!(u.validate_central().is_ok());
        assert_eq!(u.center(), ElemSet::from_elems([0]));
    }

    #[test]
    fn compare_examples() {
        let s = star3();
        assert_eq!(s.compare(&s).unwrap(), Inclusion::Equal);
        let iota = diagonal(d(3), 2).unwrap();
        assert_eq!(iota.compare(&s).unwrap(), Inclusion::LeftStrict);
        assert_eq!(s.compare(&iota).unwrap(), Inclusion::RightStrict);
        assert!(s.compare(&Relation::full(d(4), 2).unwrap()).is_err());
    }

    #[test]
    fn chain_check() {
        let s = star3();
        assert!(s.is_chain(ElemSet::from_elems([0, 1])));
        assert!(!s.is_chain(ElemSet::from_elems([1, 2])));
        assert!(s.is_chain(ElemSet::from_elems([2])));
    }
}
