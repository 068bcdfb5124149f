use std::ops::ControlFlow;

use super::preserve::preserves;
use crate::error::{Error, Result};
use crate::relcore::{Domain, Elem, Operation, Relation};

/// Resource caps for [`search_ops`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of partial tables (search nodes) examined.
    pub node_budget: u64,
    /// Relations needing more compiled constraints than this are checked on complete tables only.
    pub constraint_cap: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_budget: 50_000_000,
            constraint_cap: 2_000_000,
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    /// Complete tables passing every check.
    pub accepted: u64,
    /// True when the visitor stopped the search early.
    pub stopped: bool,
}

/// Row-rank `h`-tuples whose image under `f` must lie in one relation, bucketed by the largest row.
struct Compiled<'a> {
    rel: &'a Relation,
    by_trigger: Vec<Vec<u32>>,
}

/// Upper bound on `|rel|^n` before any reduction.
fn raw_count(rel: &Relation, n: usize) -> f64 {
    (rel.len() as f64).powi(n as i32)
}

fn compile<'a>(rel: &'a Relation, n: usize, cells: usize, cap: usize) -> Option<Compiled<'a>> {
    let h = rel.arity();
    let k = rel.k();
    if raw_count(rel, n) > cap as f64 {
        return None;
    }
    if rel.is_empty() {
        return Some(Compiled {
            rel,
            by_trigger: vec![Vec::new(); cells],
        });
    }
    let reflexive = h >= 2 && rel.is_totally_reflexive();
    let symmetric = reflexive && rel.is_totally_symmetric();
    let m = rel.len();
    let flat = rel.flat_members();
    let mut rows_of = Vec::new();
    let mut idx = vec![0usize; n];
    let mut rows = vec![0usize; h];
    loop {
        rows.iter_mut().for_each(|r| *r = 0);
        for &c in &idx {
            let t = &flat[c * h..(c + 1) * h];
            for j in 0..h {
                rows[j] = rows[j] * k + t[j] as usize;
            }
        }
        let keep = if reflexive {
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
            if distinct && symmetric {
                rows.copy_from_slice(&sorted);
            }
            distinct
        } else {
            true
        };
        if keep {
            rows_of.extend(rows.iter().map(|&r| r as u32));
        }
        let mut p = n;
        loop {
            if p == 0 {
                break;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < m {
                break;
            }
            idx[p] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    let mut tuples: Vec<&[u32]> = rows_of.chunks_exact(h).collect();
    tuples.sort_unstable();
    tuples.dedup();
    let mut by_trigger = vec![Vec::new(); cells];
    for t in tuples {
        let trig = *t.iter().max().unwrap() as usize;
        by_trigger[trig].extend_from_slice(t);
    }
    Some(Compiled { rel, by_trigger })
}

/// Visits, in table-lexicographic order, every `n`-ary operation preserving all of `preserve`
/// and violating at least one of `violate` (any operation, if `violate` is empty and
/// `require_violation` is false).
///
/// Entries are assigned in rank order with values ascending, and each compiled constraint is
/// checked once its largest row is assigned, so pruning never reorders the output.
pub fn search_ops(
    domain: Domain,
    n: usize,
    preserve: &[&Relation],
    violate: &[&Relation],
    require_violation: bool,
    limits: SearchLimits,
    mut visit: impl FnMut(&Operation) -> ControlFlow<()>,
) -> Result<SearchStats> {
    let k = domain.k();
    let cells = domain.cells(n)?;
    for r in preserve.iter().chain(violate) {
        domain.same(r.domain())?;
    }
    let mut stats = SearchStats::default();
    if require_violation && violate.is_empty() {
        return Ok(stats);
    }
    let mut compiled = Vec::new();
    let mut leaf_checked = Vec::new();
    for &r in preserve {
        if r.is_full() {
            continue;
        }
        match compile(r, n, cells, limits.constraint_cap) {
            Some(c) => compiled.push(c),
            None => leaf_checked.push(r),
        }
    }
    let violate: Vec<&Relation> = violate.iter().copied().filter(|r| !r.is_full()).collect();
    if require_violation && violate.is_empty() {
        return Ok(stats);
    }
    let mut compiled_violate = Vec::new();
    let mut leaf_violate = Vec::new();
    if require_violation {
        for &r in &violate {
            match compile(r, n, cells, limits.constraint_cap) {
                Some(c) => compiled_violate.push(c),
                None => leaf_violate.push(r),
            }
        }
    }

    let mut table: Vec<Elem> = vec![0; cells];
    let mut pos = 0usize;
    let holds = |c: &Compiled, table: &[Elem], pos: usize| -> bool {
        let h = c.rel.arity();
        c.by_trigger[pos].chunks_exact(h).all(|rows| {
            let img = rows
                .iter()
                .fold(0usize, |a, &r| a * k + table[r as usize] as usize);
            c.rel.contains_rank(img)
        })
    };
    // Shallowest position whose compiled violate constraints fail on the current path;
    // `cells` when none do.
    let mut violated_at = cells;
    loop {
        stats.nodes += 1;
        if stats.nodes > limits.node_budget {
            return Err(Error::Budget(format!(
                "search for {n}-ary operations exceeded {} nodes",
                limits.node_budget
            )));
        }
        if violated_at >= pos {
            violated_at = cells;
        }
        let mut descend = compiled.iter().all(|c| holds(c, &table, pos));
        if descend
            && violated_at == cells
            && compiled_violate.iter().any(|c| !holds(c, &table, pos))
        {
            violated_at = pos;
        }
        if descend && pos + 1 == cells {
            descend = false;
            stats.leaves += 1;
            let needs_op = !leaf_checked.is_empty() || (violated_at == cells && require_violation);
            let f = if needs_op {
                Some(Operation::new(domain, n, table.clone())?)
            } else {
                None
            };
            let accept = match &f {
                None => true,
                Some(f) => {
                    leaf_checked.iter().all(|r| preserves(f, r))
                        && (!require_violation
                            || violated_at < cells
                            || leaf_violate.iter().any(|r| !preserves(f, r)))
                }
            };
            if accept {
                stats.accepted += 1;
                let f = match f {
                    Some(f) => f,
                    None => Operation::new(domain, n, table.clone())?,
                };
                if visit(&f).is_break() {
                    stats.stopped = true;
                    return Ok(stats);
                }
            }
        }
        if descend {
            pos += 1;
            table[pos] = 0;
            continue;
        }
        loop {
            if (table[pos] as usize) + 1 < k {
                table[pos] += 1;
                break;
            }
            table[pos] = 0;
            if pos == 0 {
                return Ok(stats);
            }
            pos -= 1;
        }
    }
}

/// Collects every `n`-ary operation preserving all of `rels`, in table order.
pub fn pol_members(
    domain: Domain,
    n: usize,
    rels: &[&Relation],
    limits: SearchLimits,
    max_count: usize,
) -> Result<Vec<Operation>> {
    let mut out = Vec::new();
    let mut overflow = false;
    search_ops(domain, n, rels, &[], false, limits, |f| {
        if out.len() == max_count {
            overflow = true;
            return ControlFlow::Break(());
        }
        out.push(f.clone());
        ControlFlow::Continue(())
    })?;
    if overflow {
        return Err(Error::Budget(format!(
            "more than {max_count} {n}-ary polymorphisms"
        )));
    }
    Ok(out)
}
