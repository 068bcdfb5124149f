use super::central::CentralRelation;
use super::domain::{Domain, Elem};
use super::relation::{rainbow_subsets, Relation};
use crate::error::{Error, Result};

/// Every totally reflexive, totally symmetric `h`-ary relation on `E_k`.
///
/// Such a relation is fixed by which rainbow `h`-subsets it contains. Bit `i` of the mask
/// selects the `i`-th subset in lexicographic order; output is in ascending mask order.
/// For `h = 1` the "subsets" are singletons, so this lists every unary relation.
pub fn reflexive_symmetric_relations(domain: Domain, h: usize) -> Result<Vec<Relation>> {
    if h == 0 {
        return Err(Error::arg("arity must be at least 1"));
    }
    let subsets = rainbow_subsets(domain, h);
    if subsets.len() > 20 {
        return Err(Error::Budget(format!(
            "2^{} reflexive symmetric relations of arity {h} on E_{}",
            subsets.len(),
            domain.k()
        )));
    }
    let base = if h == 1 {
        Relation::empty(domain, 1)?
    } else {
        super::diagonal(domain, h)?
    };
    let perms = permutations(h);
    let mut out = Vec::with_capacity(1 << subsets.len());
    for mask in 0u32..1 << subsets.len() {
        let mut tuples: Vec<Vec<Elem>> = Vec::new();
        for (i, s) in subsets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                tuples.extend(perms.iter().map(|p| p.iter().map(|&j| s[j]).collect()));
            }
        }
        out.push(base.union(&Relation::from_tuples(domain, h, tuples)?)?);
    }
    Ok(out)
}

/// The central members of [`reflexive_symmetric_relations`], in the same order.
pub fn central_relations(domain: Domain, h: usize) -> Result<Vec<CentralRelation>> {
    Ok(reflexive_symmetric_relations(domain, h)?
        .into_iter()
        .filter_map(|r| CentralRelation::new(r).ok())
        .collect())
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).permutations(n).collect()
}

/// Canonical representative of a relation's orbit under element permutations:
/// the lexicographically least sorted member-rank list.
pub fn iso_canonical_key(rel: &Relation) -> Vec<usize> {
    let k = rel.k();
    permutations(k)
        .into_iter()
        .map(|p| {
            let p: Vec<Elem> = p.into_iter().map(|x| x as Elem).collect();
            rel.map_elements(&p)
                .expect("permutation of E_k")
                .member_ranks()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}
