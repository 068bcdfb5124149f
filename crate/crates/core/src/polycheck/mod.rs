//! Preservation, polymorphism enumeration and separator search.

mod cover;
mod preserve;
mod search;

use std::ops::ControlFlow;

pub use cover::find_central_separator;
pub use preserve::{find_violation, in_pol, preserves};
pub use search::{pol_members, search_ops, SearchLimits, SearchStats};

use crate::error::{Error, Result};
use crate::relcore::{Domain, Elem, Operation, Relation};

pub fn apply(f: &Operation, args: &[Elem]) -> Result<Elem> {
    f.apply(args)
}

pub fn projection(domain: Domain, n: usize, i: usize) -> Result<Operation> {
    Operation::projection(domain, n, i)
}

pub fn constant(domain: Domain, a: Elem, n: usize) -> Result<Operation> {
    Operation::constant(domain, a, n)
}

/// Largest `k^(k^n)` that [`enumerate_ops`] agrees to walk (that of `k=3, n=3`).
pub const ENUMERATION_LIMIT: f64 = 7_625_597_484_987.0;

/// All `n`-ary operations in table-lexicographic order.
pub fn enumerate_ops(domain: Domain, n: usize) -> Result<OpIter> {
    let cells = domain.cells(n)?;
    let count = (domain.k() as f64).powi(cells as i32);
    if count > ENUMERATION_LIMIT {
        return Err(Error::Budget(format!(
            "{}^{cells} operations of arity {n} on E_{} exceed the enumeration limit",
            domain.k(),
            domain.k()
        )));
    }
    Ok(OpIter {
        domain,
        n,
        next: Some(vec![0; cells]),
    })
}

pub fn count_ops(domain: Domain, n: usize) -> Result<u128> {
    let cells = domain.cells(n)?;
    (domain.k() as u128)
        .checked_pow(cells as u32)
        .ok_or_else(|| Error::Budget("operation count overflows".into()))
}

pub struct OpIter {
    domain: Domain,
    n: usize,
    next: Option<Vec<Elem>>,
}

impl Iterator for OpIter {
    type Item = Operation;
    fn next(&mut self) -> Option<Operation> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if crate::relcore::next_tuple(&mut succ, self.domain.k()) {
            self.next = Some(succ);
        }
        Some(Operation::new(self.domain, self.n, cur).expect("well-formed table"))
    }
}

/// Find an operation preserving all of `preserve` and violating some member of `violate`.
#[derive(Clone, Debug)]
pub struct OpQuery {
    pub preserve: Vec<Relation>,
    pub violate: Vec<Relation>,
    pub max_arity: usize,
    /// Search-node budget shared across all arities.
    pub budget: u64,
}

impl OpQuery {
    pub fn new(preserve: Vec<Relation>, violate: Vec<Relation>) -> Self {
        OpQuery {
            preserve,
            violate,
            max_arity: 2,
            budget: SearchLimits::default().node_budget,
        }
    }

    pub fn max_arity(mut self, n: usize) -> Self {
        self.max_arity = n;
        self
    }

    pub fn budget(mut self, b: u64) -> Self {
        self.budget = b;
        self
    }
}

/// The first separator in order of arity, then table. `Ok(None)` means the bounded search
/// completed without a hit; running out of budget is an `Err(Error::Budget)`.
pub fn find_separator(query: &OpQuery) -> Result<Option<Operation>> {
    if query.max_arity == 0 || query.budget == 0 {
        return Err(Error::arg("max_arity and budget must be positive"));
    }
    let Some(domain) = query
        .preserve
        .iter()
        .chain(&query.violate)
        .map(|r| r.domain())
        .next()
    else {
        return Ok(None);
    };
    let preserve: Vec<&Relation> = query.preserve.iter().collect();
    let violate: Vec<&Relation> = query.violate.iter().collect();
    let mut remaining = query.budget;
    for n in 1..=query.max_arity {
        let limits = SearchLimits {
            node_budget: remaining,
            ..SearchLimits::default()
        };
        let mut found = None;
        let stats = search_ops(domain, n, &preserve, &violate, true, limits, |f| {
            found = Some(f.clone());
            ControlFlow::Break(())
        })?;
        if found.is_some() {
            return Ok(found);
        }
        remaining = remaining.saturating_sub(stats.nodes);
        if remaining == 0 {
            return Err(Error::Budget(format!(
                "separator search exhausted budget at arity {n}"
            )));
        }
    }
    Ok(None)
}

/// Like [`find_separator`] with one preserved relation. At arities where `delta` is too wide to
/// compile and `rho` is central, the witness search of [`find_central_separator`] replaces
/// the table search.
pub fn find_rho_separator(
    rho: &Relation,
    delta: &Relation,
    max_arity: usize,
    budget: u64,
) -> Result<Option<Operation>> {
    if max_arity == 0 || budget == 0 {
        return Err(Error::arg("max_arity and budget must be positive"));
    }
    let central = rho.arity() >= 2
        && !rho.center().is_empty()
        && rho.is_totally_reflexive()
        && rho.is_totally_symmetric();
    let cap = SearchLimits::default().constraint_cap as f64;
    let mut remaining = budget;
    for n in 1..=max_arity {
        let wide = (delta.len() as f64).powi(n as i32) > cap;
        if central && wide && n <= 2 {
            if let Some(g) = find_central_separator(rho, delta, n, remaining)? {
                return Ok(Some(g));
            }
            continue;
        }
        let limits = SearchLimits {
            node_budget: remaining,
            ..SearchLimits::default()
        };
        let mut found = None;
        let stats = search_ops(rho.domain(), n, &[rho], &[delta], true, limits, |f| {
            found = Some(f.clone());
            ControlFlow::Break(())
        })?;
        if found.is_some() {
            return Ok(found);
        }
        remaining = remaining.saturating_sub(stats.nodes);
        if remaining == 0 {
            return Err(Error::Budget(format!(
                "separator search exhausted budget at arity {n}"
            )));
        }
    }
    Ok(None)
}
