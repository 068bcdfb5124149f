use itertools::Itertools;

use super::{DerivedSpec, IndexMode, Kind};
use crate::error::{Error, Result};
use crate::relcore::{Elem, ElemSet, Relation};

/// Selections of `len` indices from `0..range`, in lexicographic order.
pub fn index_selections(len: usize, range: usize, mode: IndexMode) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    match mode {
        IndexMode::Strict => (0..range).combinations(len).collect(),
        IndexMode::Repeats => (0..len)
            .map(|_| 0..range)
            .multi_cartesian_product()
            .collect(),
    }
}

/// Largest `|B|` with `B^h ⊆ rel`.
pub fn max_chain_size(rel: &Relation) -> usize {
    let k = rel.k();
    (0u32..1 << k)
        .filter(|&m| rel.is_chain(ElemSet(m)))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// `(h-1)`-subsets of `E_k ∖ C_ρ`, counted.
fn f_size(rho: &Relation) -> usize {
    let outside = rho.k() - rho.center().len();
    let h1 = rho.arity() - 1;
    (0..outside).combinations(h1).count()
}

fn require(cond: bool, kind: Kind, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::arg(format!("{kind}: requires {what}")))
    }
}

/// Checks a clause `(x_{sel}.., tail..) ∈ rel` using a scratch buffer.
#[inline]
fn holds(rel: &Relation, buf: &mut Vec<Elem>, x: &[Elem], sel: &[usize], tail: &[Elem]) -> bool {
    buf.clear();
    buf.extend(sel.iter().map(|&i| x[i]));
    buf.extend_from_slice(tail);
    rel.contains(buf)
}

pub(super) fn evaluate(spec: &DerivedSpec, ins: &[Relation]) -> Result<Relation> {
    let kind = spec.kind;
    let want = match kind {
        Kind::RhoL | Kind::Lambda | Kind::Alpha1Of => 1,
        _ => 2,
    };
    if ins.len() != want {
        return Err(Error::arg(format!(
            "{kind}: expects {want} inputs, got {}",
            ins.len()
        )));
    }
    let rho = &ins[0];
    let d = rho.domain();
    let k = d.k();
    let h = rho.arity();
    if let Some(sigma) = ins.get(1) {
        d.same(sigma.domain())?;
    }
    let mode = spec.index_mode;
    let mut buf: Vec<Elem> = Vec::with_capacity(16);
    let all_elems: Vec<Elem> = d.elements().collect();

    match kind {
        Kind::Tau => {
            let sigma = &ins[1];
            require(
                h == 2 && sigma.arity() == 1,
                kind,
                "binary rho and unary sigma",
            )?;
            let us: Vec<Elem> = sigma.tuples().map(|t| t[0]).collect();
            Relation::from_predicate(d, 1, |y| us.iter().any(|&u| rho.contains(&[u, y[0]])))
        }
        Kind::GammaBinary | Kind::GammaT => {
            let sigma = &ins[1];
            require(
                h == 2 && sigma.arity() == 1,
                kind,
                "binary rho and unary sigma",
            )?;
            let t = if kind == Kind::GammaT {
                spec.get("t")?
            } else {
                2
            };
            require((2..=k).contains(&t), kind, "2 <= t <= k")?;
            let us: Vec<Elem> = sigma.tuples().map(|t| t[0]).collect();
            Relation::from_predicate(d, t, |a| {
                us.iter()
                    .any(|&u| a.iter().all(|&ai| rho.contains(&[ai, u])))
            })
        }
        Kind::RhoL => {
            let l = spec.get("l")?;
            require(h == 2, kind, "binary rho")?;
            let m = max_chain_size(rho);
            require(
                (2..=m.max(2)).contains(&l),
                kind,
                "2 <= l <= largest chain size",
            )?;
            Relation::from_predicate(d, l, |a| {
                a.iter().all(|&x| a.iter().all(|&y| rho.contains(&[x, y])))
            })
        }
        Kind::AlphaN => {
            let sigma = &ins[1];
            let n = spec.get("n")?;
            require(
                h >= 3 && sigma.arity() == 1,
                kind,
                "rho of arity >= 3 and unary sigma",
            )?;
            require(n + 1 >= h, kind, "n >= h-1")?;
            let sels = index_selections(h - 1, n, mode);
            let us: Vec<Elem> = sigma.tuples().map(|t| t[0]).collect();
            Relation::from_predicate(d, n, |b| {
                us.iter().any(|&u| {
                    sels.iter().all(|sel| {
                        buf.clear();
                        buf.push(u);
                        buf.extend(sel.iter().map(|&i| b[i]));
                        rho.contains(&buf)
                    })
                })
            })
        }
        Kind::BetaChain => {
            let sigma = &ins[1];
            let j = spec.get("j")?;
            require(
                h >= 3 && sigma.arity() == 1,
                kind,
                "rho of arity >= 3 and unary sigma",
            )?;
            require(j >= 1 && j <= f_size(rho), kind, "1 <= j <= |F|")?;
            let arity = j * (h - 1) + 1;
            let us: Vec<Elem> = sigma.tuples().map(|t| t[0]).collect();
            Relation::from_predicate(d, arity, |b| {
                us.iter().any(|&u| {
                    b[1..].chunks_exact(h - 1).all(|blk| {
                        buf.clear();
                        buf.push(u);
                        buf.extend_from_slice(blk);
                        rho.contains(&buf)
                    })
                })
            })
        }
        Kind::Alpha1Of => {
            let positions = spec
                .params
                .get("positions")
                .copied()
                .unwrap_or(h.saturating_sub(1));
            require(h >= 2, kind, "arity >= 2")?;
            require(
                positions == h - 1 || positions == h,
                kind,
                "positions in {h-1, h}",
            )?;
            Relation::from_predicate(d, h, |x| {
                all_elems.iter().any(|&u| {
                    (0..positions).all(|i| {
                        buf.clear();
                        buf.extend_from_slice(x);
                        buf[i] = u;
                        rho.contains(&buf)
                    })
                })
            })
        }
        Kind::BetaT => {
            let gamma = &ins[1];
            let t = spec.get("t")?;
            require(
                h >= 2 && gamma.arity() == h,
                kind,
                "gamma of the same arity h >= 2",
            )?;
            require(t >= h, kind, "t >= h")?;
            let sels = index_selections(h - 1, t, mode);
            let mut buf2: Vec<Elem> = Vec::with_capacity(h);
            Relation::from_predicate(d, t, |x| {
                all_elems.iter().any(|&u| {
                    sels.iter().all(|sel| {
                        buf2.clear();
                        buf2.extend(sel[..h - 2].iter().map(|&i| x[i]));
                        buf2.push(x[0]);
                        buf2.push(u);
                        gamma.contains(&buf2) && holds(rho, &mut buf, x, sel, &[u])
                    })
                })
            })
        }
        Kind::Lambda => {
            let s = spec.get("s")?;
            require(2 <= h && h < s, kind, "2 <= h < s")?;
            Relation::from_predicate(d, s, |a| rho.contains(&a[..h]))
        }
        Kind::GammaPrime => {
            let sigma = &ins[1];
            let s = sigma.arity();
            require(2 <= h && h < s, kind, "2 <= h < s")?;
            Relation::from_predicate(d, s, |a| sigma.contains(a) && rho.contains(&a[..h]))
        }
        Kind::ThetaUp => {
            let sigma = &ins[1];
            let s = sigma.arity();
            let t = spec.get("t")?;
            require(2 <= h && h <= t && t < s, kind, "2 <= h <= t <= s-1")?;
            let sels = index_selections(h - 1, t, mode);
            let mut pad: Vec<Elem> = Vec::with_capacity(s);
            Relation::from_predicate(d, t, |a| {
                all_elems.iter().any(|&u| {
                    pad.clear();
                    pad.extend_from_slice(a);
                    pad.resize(s, u);
                    sigma.contains(&pad)
                        && sels.iter().all(|sel| holds(rho, &mut buf, a, sel, &[u]))
                })
            })
        }
        Kind::ThetaDown => {
            let sigma = &ins[1];
            let s = sigma.arity();
            let t = spec.get("t")?;
            require(2 <= s && s <= t && t < h, kind, "2 <= s <= t <= h-1")?;
            let sels = index_selections(s - 1, t, mode);
            let mut pad: Vec<Elem> = Vec::with_capacity(h);
            Relation::from_predicate(d, t, |a| {
                all_elems.iter().any(|&u| {
                    pad.clear();
                    pad.extend_from_slice(a);
                    pad.resize(h, u);
                    rho.contains(&pad)
                        && sels.iter().all(|sel| holds(sigma, &mut buf, a, sel, &[u]))
                })
            })
        }
        Kind::GammaS => {
            let sigma = &ins[1];
            let s = sigma.arity();
            require(2 <= h && h < s, kind, "2 <= h < s")?;
            let sels = index_selections(h - 1, s, mode);
            Relation::from_predicate(d, s, |x| {
                sigma.contains(x)
                    && sels.iter().all(|sel| {
                        [x[0], x[1]].iter().all(|&lead| {
                            buf.clear();
                            buf.push(lead);
                            buf.extend(sel.iter().map(|&i| x[i]));
                            rho.contains(&buf)
                        })
                    })
            })
        }
        Kind::GammaPrimeT => {
            let sigma = &ins[1];
            let s = sigma.arity();
            let t = spec.get("t")?;
            require(h >= 2 && s >= 2 && h != s, kind, "2 <= h, 2 <= s, h != s")?;
            require(t >= h.max(s), kind, "t >= max(h, s)")?;
            let range = spec
                .params
                .get("range")
                .copied()
                .unwrap_or(if h < s { s } else { t });
            require((1..=t).contains(&range), kind, "1 <= range <= t")?;
            let len = h.max(s) - 1;
            let sels = index_selections(len, range, mode);
            Relation::from_predicate(d, t, |x| {
                all_elems.iter().any(|&v| {
                    sels.iter().all(|sel| {
                        holds(rho, &mut buf, x, &sel[..h - 1], &[v])
                            && holds(sigma, &mut buf, x, &sel[..s - 1], &[v])
                    })
                })
            })
        }
        Kind::GammaPrimeH => {
            let sigma = &ins[1];
            let s = sigma.arity();
            require(2 <= s && s < h, kind, "2 <= s < h")?;
            let sels = index_selections(s - 1, h, mode);
            let tail: Vec<usize> = (1..h).collect();
            Relation::from_predicate(d, h, |b| {
                all_elems.iter().any(|&v| {
                    holds(rho, &mut buf, b, &tail, &[v])
                        && sels.iter().all(|sel| holds(sigma, &mut buf, b, sel, &[v]))
                })
            })
        }
        Kind::GammaPrimeChain => {
            let sigma = &ins[1];
            let s = sigma.arity();
            let n = spec.get("n")?;
            require(2 <= s && s < h, kind, "2 <= s < h")?;
            require(n >= 1 && n <= f_size(rho), kind, "1 <= n <= |F|")?;
            let arity = n * (h - 1) + 1;
            let sels = index_selections(s - 1, arity, mode);
            Relation::from_predicate(d, arity, |b| {
                all_elems.iter().any(|&v| {
                    b[1..].chunks_exact(h - 1).all(|blk| {
                        buf.clear();
                        buf.extend_from_slice(blk);
                        buf.push(v);
                        rho.contains(&buf)
                    }) && sels.iter().all(|sel| holds(sigma, &mut buf, b, sel, &[v]))
                })
            })
        }
        Kind::Intersect => rho.intersect(&ins[1]),
    }
}
