//! Clone closure restricted to operations of arity at most `n`.
//!
//! For a fixed generator set the result is exactly the arity-`<= n` part of the generated
//! clone. Probes that truncate an infinite generator set such as `Pol{ρ,σ}` to arity `<= n`
//! only under-approximate.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycheck::{pol_members, preserves, SearchLimits};
use crate::relcore::{Bits, Domain, Elem, Operation, Relation};

/// Dense membership bitsets are used while `k^(k^n)` stays below this.
const DENSE_LIMIT: u128 = 1 << 26;

pub const UNDER_APPROXIMATION_NOTE: &str =
    "consistency evidence only: generators are truncated to \
the arity bound, so members reachable only through wider polymorphisms are missed";

enum Members {
    Dense(Bits),
    Sparse(HashSet<Vec<Elem>>),
}

impl Members {
    fn new(k: usize, cells: usize) -> Members {
        let total = (k as u128).checked_pow(cells as u32);
        match total {
            Some(t) if t <= DENSE_LIMIT => Members::Dense(Bits::new(t as usize)),
            _ => Members::Sparse(HashSet::new()),
        }
    }

    /// True if newly inserted.
    fn insert(&mut self, k: usize, table: &[Elem]) -> bool {
        match self {
            Members::Dense(bits) => {
                let r = table.iter().fold(0usize, |a, &v| a * k + v as usize);
                if bits.get(r) {
                    false
                } else {
                    bits.set(r);
                    true
                }
            }
            Members::Sparse(set) => set.insert(table.to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedClone {
    pub domain: Domain,
    pub max_arity: usize,
    /// `members[n-1]` holds the `n`-ary members sorted by table.
    pub members: Vec<Vec<Operation>>,
    pub generators: Vec<Operation>,
    /// False when the budget ran out or a stop count was reached before the fixpoint.
    pub fixpoint: bool,
    pub compositions: u64,
}

impl BoundedClone {
    pub fn count(&self, n: usize) -> usize {
        self.members.get(n.wrapping_sub(1)).map_or(0, |v| v.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.members.iter().map(|v| v.len()).collect()
    }

    pub fn contains(&self, f: &Operation) -> bool {
        self.members
            .get(f.arity().wrapping_sub(1))
            .is_some_and(|v| v.binary_search_by(|g| g.table().cmp(f.table())).is_ok())
    }

    /// Member-wise inclusion at every arity.
    pub fn is_subset(&self, other: &BoundedClone) -> bool {
        self.members.iter().flatten().all(|f| other.contains(f))
    }
}

#[derive(Copy, Clone, Debug)]
pub struct ClosureOptions {
    /// Maximum number of compositions formed.
    pub budget: u64,
    /// Stop as soon as every arity `n` holds `stop_counts[n-1]` members.
    pub stop_counts: Option<[usize; 4]>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            budget: 2_000_000_000,
            stop_counts: None,
        }
    }
}

pub fn bounded_closure(
    domain: Domain,
    gens: &[Operation],
    max_arity: usize,
    budget: u64,
) -> Result<BoundedClone> {
    bounded_closure_with(
        domain,
        gens,
        max_arity,
        ClosureOptions {
            budget,
            stop_counts: None,
        },
    )
}

/// Each arity is computed on its own as the set generated from the projections by applying
/// generators pointwise. This equals closure under all compositions of members: by
/// associativity, `g(f_1..f_m)` with `g = γ(g_1..g_r)` is `γ(g_1(f), .., g_r(f))`, whose
/// parts never leave arity `n`.
pub fn bounded_closure_with(
    domain: Domain,
    gens: &[Operation],
    max_arity: usize,
    opts: ClosureOptions,
) -> Result<BoundedClone> {
    if max_arity == 0 || max_arity > 4 {
        return Err(Error::arg("max_arity must be in 1..=4"));
    }
    for g in gens {
        domain.same(g.domain())?;
        if g.arity() > max_arity {
            return Err(Error::arg(format!(
                "generator of arity {} exceeds the bound",
                g.arity()
            )));
        }
    }
    let mut outer: Vec<&Operation> = gens.iter().filter(|g| !is_projection(g)).collect();
    outer.sort_by(|a, b| (a.arity(), a.table()).cmp(&(b.arity(), b.table())));
    outer.dedup_by(|a, b| a.table() == b.table() && a.arity() == b.arity());

    let mut members = Vec::new();
    let mut compositions = 0u64;
    let mut fixpoint = true;
    for n in 1..=max_arity {
        let stop = opts.stop_counts.map(|sc| sc[n - 1]);
        let budget = opts.budget.saturating_sub(compositions);
        let (tables, used, complete) = close_level(domain, n, gens, &outer, budget, stop)?;
        compositions += used;
        fixpoint &= complete;
        let mut ops: Vec<Operation> = tables
            .into_iter()
            .map(|t| Operation::new(domain, n, t))
            .collect::<Result<_>>()?;
        ops.sort_by(|x, y| x.table().cmp(y.table()));
        members.push(ops);
    }
    Ok(BoundedClone {
        domain,
        max_arity,
        members,
        generators: gens.to_vec(),
        fixpoint,
        compositions,
    })
}

fn is_projection(g: &Operation) -> bool {
    let d = g.domain();
    (1..=g.arity())
        .any(|i| Operation::projection(d, g.arity(), i).is_ok_and(|p| p.table() == g.table()))
}

/// Returns the `n`-ary tables, compositions used, and whether the fixpoint was reached.
fn close_level(
    domain: Domain,
    n: usize,
    gens: &[Operation],
    outer: &[&Operation],
    budget: u64,
    stop: Option<usize>,
) -> Result<(Vec<Vec<Elem>>, u64, bool)> {
    let k = domain.k();
    let cells = domain.cells(n)?;
    let total = (k as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    let mut index = Members::new(k, cells);
    // Member `j` occupies `flat[j*cells..(j+1)*cells]`.
    let mut flat: Vec<Elem> = Vec::new();
    let mut seeds: Vec<Operation> = (1..=n)
        .map(|i| Operation::projection(domain, n, i))
        .collect::<Result<_>>()?;
    seeds.extend(gens.iter().filter(|g| g.arity() == n).cloned());
    for s in &seeds {
        if index.insert(k, s.table()) {
            flat.extend_from_slice(s.table());
        }
    }
    let full = |len: usize| (len as u128) >= total;
    let stopped = |len: usize| full(len) || stop.is_some_and(|s| len >= s);
    let split = |flat: Vec<Elem>| flat.chunks(cells).map(<[Elem]>::to_vec).collect::<Vec<_>>();
    let mut used = 0u64;
    let mut idx: Vec<usize> = Vec::new();
    let mut scratch: Vec<Elem> = vec![0; cells];
    // Every generator has been applied to every tuple over members `0..e`.
    let mut e = 0usize;
    while e < flat.len() / cells {
        if stopped(flat.len() / cells) {
            let f = full(flat.len() / cells);
            return Ok((split(flat), used, f));
        }
        for g in outer {
            let m = g.arity();
            let gt = g.table();
            // Tuples over `0..=e` whose first occurrence of `e` is at `first`.
            for first in 0..m {
                if first > 0 && e == 0 {
                    break;
                }
                idx.clear();
                idx.resize(m, 0);
                idx[first] = e;
                let bound = |p: usize| if p < first { e } else { e + 1 };
                loop {
                    used += 1;
                    if used > budget {
                        return Ok((split(flat), used - 1, false));
                    }
                    match m {
                        1 => {
                            let a = &flat[e * cells..(e + 1) * cells];
                            for (o, &v) in scratch.iter_mut().zip(a) {
                                *o = gt[v as usize];
                            }
                        }
                        2 => {
                            let a = &flat[idx[0] * cells..(idx[0] + 1) * cells];
                            let b = &flat[idx[1] * cells..(idx[1] + 1) * cells];
                            for ((o, &u), &v) in scratch.iter_mut().zip(a).zip(b) {
                                *o = gt[u as usize * k + v as usize];
                            }
                        }
                        _ => {
                            for (x, o) in scratch.iter_mut().enumerate() {
                                let r = idx
                                    .iter()
                                    .fold(0usize, |acc, &j| acc * k + flat[j * cells + x] as usize);
                                *o = gt[r];
                            }
                        }
                    }
                    if index.insert(k, &scratch) {
                        flat.extend_from_slice(&scratch);
                        if stopped(flat.len() / cells) {
                            let f = full(flat.len() / cells);
                            return Ok((split(flat), used, f));
                        }
                    }
                    let mut p = m;
                    let advanced = loop {
                        if p == 0 {
                            break false;
                        }
                        p -= 1;
                        if p == first {
                            continue;
                        }
                        idx[p] += 1;
                        if idx[p] < bound(p) {
                            break true;
                        }
                        idx[p] = 0;
                    };
                    if !advanced {
                        break;
                    }
                }
            }
        }
        e += 1;
    }
    Ok((split(flat), used, true))
}

/// All operations of arity `<= max_arity` preserving every relation.
pub fn bounded_pol(domain: Domain, rels: &[&Relation], max_arity: usize) -> Result<BoundedClone> {
    if max_arity == 0 || max_arity > 4 {
        return Err(Error::arg("max_arity must be in 1..=4"));
    }
    let mut members = Vec::new();
    for n in 1..=max_arity {
        let total = (domain.k() as u128)
            .checked_pow(domain.cells(n)? as u32)
            .unwrap_or(u128::MAX);
        let cap = usize::try_from(total.min(1 << 24)).unwrap_or(usize::MAX);
        let limits = SearchLimits {
            node_budget: u64::MAX,
            ..SearchLimits::default()
        };
        members.push(pol_members(domain, n, rels, limits, cap)?);
    }
    Ok(BoundedClone {
        domain,
        max_arity,
        members,
        generators: Vec::new(),
        fixpoint: true,
        compositions: 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub g: Operation,
    pub saturated: bool,
    pub reached: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub note: String,
    pub max_arity: usize,
    pub pol_rho: Vec<usize>,
    pub pol_rho_sigma: Vec<usize>,
    pub entries: Vec<ProbeEntry>,
}

impl SaturationReport {
    /// Vacuously true without gap members.
    pub fn all_saturated(&self) -> bool {
        self.entries.iter().all(|e| e.saturated)
    }
}

/// For each `g` of arity `<= max_arity` in `Pol ρ ∖ Pol σ`, whether the bounded closure of
/// `Pol{ρ,σ} ∪ {g}` reaches every member of `Pol ρ` at that bound.
pub fn saturation_probe(
    rho: &Relation,
    sigma: &Relation,
    max_arity: usize,
    budget: u64,
) -> Result<SaturationReport> {
    let d = rho.domain();
    d.same(sigma.domain())?;
    let top = bounded_pol(d, &[rho], max_arity)?;
    let low = bounded_pol(d, &[rho, sigma], max_arity)?;
    let mut stop = [0usize; 4];
    for (i, c) in top.counts().into_iter().enumerate() {
        stop[i] = c;
    }
    let base: Vec<Operation> = low.members.iter().flatten().cloned().collect();
    let mut entries = Vec::new();
    for g in top
        .members
        .iter()
        .flatten()
        .filter(|g| !preserves(g, sigma))
    {
        let mut gens = base.clone();
        gens.push(g.clone());
        let cl = bounded_closure_with(
            d,
            &gens,
            max_arity,
            ClosureOptions {
                budget,
                stop_counts: Some(stop),
            },
        )?;
        let reached = cl.counts();
        entries.push(ProbeEntry {
            g: g.clone(),
            saturated: reached == top.counts(),
            reached,
        });
    }
    Ok(SaturationReport {
        note: UNDER_APPROXIMATION_NOTE.into(),
        max_arity,
        pol_rho: top.counts(),
        pol_rho_sigma: low.counts(),
        entries,
    })
}
