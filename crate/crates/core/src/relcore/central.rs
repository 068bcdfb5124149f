use std::ops::Deref;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::domain::{ElemSet, MAX_K};
use super::relation::Relation;
use crate::error::{Result, ValidationError};

/// A relation checked to be totally reflexive, totally symmetric, with `∅ ⊊ center ⊊ E_k`.
#[derive(Clone, Debug)]
pub struct CentralRelation {
    rel: Relation,
    center: ElemSet,
    chains: OnceLock<Vec<ElemSet>>,
}

impl CentralRelation {
    pub fn new(rel: Relation) -> Result<Self, ValidationError> {
        rel.validate_central()?;
        let center = rel.center();
        Ok(CentralRelation {
            rel,
            center,
            chains: OnceLock::new(),
        })
    }

    #[inline]
    pub fn rel(&self) -> &Relation {
        &self.rel
    }

    pub fn into_rel(self) -> Relation {
        self.rel
    }

    #[inline]
    pub fn center(&self) -> ElemSet {
        self.center
    }

    /// All `⊆`-maximal `B` with `B^h ⊆ rel`, sorted by size descending then lexicographically.
    pub fn maximal_chains(&self) -> &[ElemSet] {
        self.chains.get_or_init(|| maximal_chains_of(&self.rel))
    }

    /// Whether `B` lies inside some maximal chain.
    pub fn is_chain(&self, b: ElemSet) -> bool {
        self.maximal_chains().iter().any(|m| b.is_subset(*m))
    }
}

impl Deref for CentralRelation {
    type Target = Relation;
    fn deref(&self) -> &Relation {
        &self.rel
    }
}

impl PartialEq for CentralRelation {
    fn eq(&self, other: &Self) -> bool {
        self.rel == other.rel
    }
}

impl Eq for CentralRelation {}

impl TryFrom<Relation> for CentralRelation {
    type Error = ValidationError;
    fn try_from(rel: Relation) -> Result<Self, ValidationError> {
        CentralRelation::new(rel)
    }
}

impl Serialize for CentralRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rel.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CentralRelation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rel = Relation::deserialize(d)?;
        CentralRelation::new(rel).map_err(serde::de::Error::custom)
    }
}

/// Maximal chains of a totally reflexive, totally symmetric relation.
///
/// Chains are closed under subsets, so a set is a chain iff dropping its largest element
/// leaves a chain and every rainbow `h`-subset through that element is a member.
fn maximal_chains_of(rel: &Relation) -> Vec<ElemSet> {
    let k = rel.k();
    let h = rel.arity();
    debug_assert!(k <= MAX_K);
    let n = 1usize << k;
    let mut chain = vec![false; n];
    chain[0] = true;
    for mask in 1..n {
        let top = (usize::BITS - 1 - mask.leading_zeros()) as u8;
        let rest = mask & !(1 << top);
        if !chain[rest] {
            continue;
        }
        let rest_elems = ElemSet(rest as u32).to_vec();
        chain[mask] = if h == 1 {
            rel.contains(&[top])
        } else {
            rest_elems.iter().copied().combinations(h - 1).all(|mut t| {
                t.push(top);
                rel.contains(&t)
            })
        };
    }
    let mut masks: Vec<usize> = (1..n).filter(|&m| chain[m]).collect();
    masks.sort_by_key(|&m| std::cmp::Reverse(m.count_ones()));
    let mut out: Vec<ElemSet> = Vec::new();
    for m in masks {
        let s = ElemSet(m as u32);
        if !out.iter().any(|o| s.is_subset(*o)) {
            out.push(s);
        }
    }
    out.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.to_vec().cmp(&b.to_vec()))
    });
    out
}
