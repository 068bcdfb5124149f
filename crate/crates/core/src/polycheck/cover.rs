//! Separators of a central relation from a wide relation, found through violation witnesses.
//!
//! Let `ρ` be totally reflexive, totally symmetric, with `c ∈ C_ρ`. If `g ∈ Pol ρ` sends member
//! columns `t^1..t^n` of `δ` to `v ∉ δ`, then so does the operation `ĝ` that agrees with `g` on the
//! rows `r_p = (t^1_p..t^n_p)` and is `c` elsewhere, and `ĝ ∈ Pol ρ`. So an `n`-ary separator
//! exists iff some `v ∉ δ` and columns in `δ` satisfy:
//! - equal rows carry equal values of `v`;
//! - every `h`-set `S` of positions with `v_S ∉ ρ` has a column `i` with `t^i_S ∉ ρ`.
//!
//! The second condition is a set cover over `h`-subsets of positions, checked with bitmasks.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::relcore::{Elem, Operation, Relation};

/// Largest `k^N` whose complement is scanned for images.
const MAX_IMAGE_SPACE: usize = 1 << 24;

type Mask = Vec<u64>;

struct Subsets {
    h: usize,
    /// `h` positions per subset, ascending.
    flat: Vec<usize>,
    words: usize,
}

impl Subsets {
    fn new(big_n: usize, h: usize) -> Subsets {
        let mut flat = Vec::new();
        let mut s: Vec<usize> = (0..h).collect();
        if h <= big_n {
            loop {
                flat.extend_from_slice(&s);
                let Some(i) = (0..h).rev().find(|&i| s[i] < big_n - h + i) else {
                    break;
                };
                s[i] += 1;
                for j in i + 1..h {
                    s[j] = s[j - 1] + 1;
                }
            }
        }
        let count = flat.len() / h.max(1);
        Subsets {
            h,
            flat,
            words: count.div_ceil(64).max(1),
        }
    }

    /// Bit `s` set iff `t` restricted to subset `s` lies outside `rho`.
    fn outside(&self, rho: &Relation, t: &[Elem]) -> Mask {
        let k = rho.k();
        let mut m = vec![0u64; self.words];
        for (s, pos) in self.flat.chunks_exact(self.h).enumerate() {
            let r = pos.iter().fold(0usize, |a, &p| a * k + t[p] as usize);
            if !rho.contains_rank(r) {
                m[s / 64] |= 1 << (s % 64);
            }
        }
        m
    }
}

fn covers(a: &[u64], b: &[u64], need: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .zip(need)
        .all(|((&x, &y), &z)| z & !(x | y) == 0)
}

/// Positions `p < q` whose images differ; their rows must differ too.
fn conflicts(v: &[Elem]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for q in 0..v.len() {
        for p in 0..q {
            if v[p] != v[q] {
                out.push((p, q));
            }
        }
    }
    out
}

/// An `n`-ary (`n` in `1..=2`) member of `Pol ρ ∖ Pol δ`, or `None` if no such operation exists.
///
/// Images `v ∉ δ` are tried in rank order and columns in member order, so the result is
/// deterministic but not the table-least separator. `budget` bounds column trials.
pub fn find_central_separator(
    rho: &Relation,
    delta: &Relation,
    n: usize,
    budget: u64,
) -> Result<Option<Operation>> {
    let d = rho.domain();
    d.same(delta.domain())?;
    if !(1..=2).contains(&n) {
        return Err(Error::arg(
            "witness separator search supports arities 1 and 2",
        ));
    }
    let Some(c) = rho.center().min() else {
        return Err(Error::pre(
            "witness separator search needs a nonempty center",
        ));
    };
    if rho.arity() < 2 || !rho.is_totally_reflexive() || !rho.is_totally_symmetric() {
        return Err(Error::pre(
            "witness separator search needs a central relation",
        ));
    }
    if delta.is_full() {
        return Ok(None);
    }
    let k = d.k();
    let big_n = delta.arity();
    let space = k
        .checked_pow(big_n as u32)
        .filter(|&s| s <= MAX_IMAGE_SPACE);
    let Some(space) = space else {
        return Err(Error::Budget(format!("image space {k}^{big_n} too large")));
    };
    let subsets = Subsets::new(big_n, rho.arity());
    let masks: Vec<Mask> = delta.tuples().map(|t| subsets.outside(rho, t)).collect();
    let zero = vec![0u64; subsets.words];

    let mut trials = 0u64;
    let mut v = vec![0 as Elem; big_n];
    for rank in 0..space {
        if delta.contains_rank(rank) {
            continue;
        }
        let mut x = rank;
        d.decode_into(&mut x, &mut v);
        let need = subsets.outside(rho, &v);
        let bad = conflicts(&v);
        // Members grouped by the part of their mask that matters for this image.
        let mut keys: Vec<Mask> = Vec::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<Mask, usize> = HashMap::new();
        for (i, m) in masks.iter().enumerate() {
            let key: Mask = m.iter().zip(&need).map(|(a, b)| a & b).collect();
            let slot = *index.entry(key.clone()).or_insert_with(|| {
                keys.push(key);
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[slot].push(i);
        }
        let found = if n == 1 {
            let mut hit = None;
            'one: for (a, ka) in keys.iter().enumerate() {
                if !covers(ka, &zero, &need) {
                    continue;
                }
                for &i in &classes[a] {
                    trials += 1;
                    let t = delta.tuple(i);
                    if bad.iter().all(|&(p, q)| t[p] != t[q]) {
                        hit = Some(vec![i]);
                        break 'one;
                    }
                }
            }
            hit
        } else {
            let mut hit = None;
            'two: for (a, ka) in keys.iter().enumerate() {
                for (b, kb) in keys.iter().enumerate() {
                    trials += 1;
                    if trials > budget {
                        return Err(Error::Budget(format!(
                            "witness separator search exceeded {budget} trials"
                        )));
                    }
                    if !covers(ka, kb, &need) {
                        continue;
                    }
                    for &i in &classes[a] {
                        let t1 = delta.tuple(i);
                        for &j in &classes[b] {
                            trials += 1;
                            let t2 = delta.tuple(j);
                            if bad.iter().all(|&(p, q)| t1[p] != t1[q] || t2[p] != t2[q]) {
                                hit = Some(vec![i, j]);
                                break 'two;
                            }
                        }
                    }
                }
            }
            hit
        };
        if trials > budget {
            return Err(Error::Budget(format!(
                "witness separator search exceeded {budget} trials"
            )));
        }
        if let Some(cols) = found {
            let mut table = vec![c; d.cells(n)?];
            for (p, &vp) in v.iter().enumerate() {
                let r = cols
                    .iter()
                    .fold(0usize, |a, &i| a * k + delta.tuple(i)[p] as usize);
                table[r] = vp;
            }
            return Ok(Some(Operation::new(d, n, table)?));
        }
    }
    Ok(None)
}
