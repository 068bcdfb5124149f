//! Reference implementations used only by tests. They share no code with the library
//! beyond reading member tuples out of a `Relation` and entries out of an `Operation`.

#![allow(dead_code)]

pub mod slow;

use std::collections::HashSet;

use clonecert::relcore::{Operation, Relation};

/// Member tuples as an owned hash set.
pub fn members(rel: &Relation) -> HashSet<Vec<u8>> {
    rel.tuples().map(|t| t.to_vec()).collect()
}

/// All of `E_k^n` in lexicographic order.
pub fn all_tuples(k: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * k);
        for t in &out {
            for a in 0..k as u8 {
                let mut u = t.clone();
                u.push(a);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

pub fn apply(f: &Operation, args: &[u8]) -> u8 {
    let k = f.k();
    let mut r = 0usize;
    for &a in args {
        r = r * k + a as usize;
    }
    f.table()[r]
}

/// Definition, verbatim: every choice of `n` member columns gives a member row-image.
pub fn naive_preserves(f: &Operation, rel: &Relation) -> bool {
    let set = members(rel);
    let list: Vec<Vec<u8>> = rel.tuples().map(|t| t.to_vec()).collect();
    let n = f.arity();
    let h = rel.arity();
    if list.is_empty() {
        return true;
    }
    let mut pick = vec![0usize; n];
    loop {
        let image: Vec<u8> = (0..h)
            .map(|row| {
                let args: Vec<u8> = pick.iter().map(|&c| list[c][row]).collect();
                apply(f, &args)
            })
            .collect();
        if !set.contains(&image) {
            return false;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < list.len() {
                break;
            }
            pick[i] = 0;
        }
    }
}
