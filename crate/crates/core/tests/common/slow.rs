//! Slow evaluator for derivation transcripts: nested loops over each defining formula.
//!
//! Returns `None` exactly when the formula is outside its arity regime.

use std::collections::HashSet;

use clonecert::derived::{DerivedSpec, IndexMode, Kind, Source};
use clonecert::relcore::Relation;

use super::{all_tuples, members};

struct Rel {
    k: usize,
    arity: usize,
    set: HashSet<Vec<u8>>,
}

impl Rel {
    fn of(r: &Relation) -> Rel {
        Rel {
            k: r.k(),
            arity: r.arity(),
            set: members(r),
        }
    }

    fn has(&self, t: &[u8]) -> bool {
        self.set.contains(t)
    }

    /// Elements `a` such that every tuple starting with `a` is a member.
    fn center(&self) -> Vec<u8> {
        let rest = all_tuples(self.k, self.arity - 1);
        (0..self.k as u8)
            .filter(|&a| {
                rest.iter().all(|r| {
                    let mut t = vec![a];
                    t.extend_from_slice(r);
                    self.has(&t)
                })
            })
            .collect()
    }

    fn is_chain(&self, b: &[u8]) -> bool {
        all_tuples(b.len(), self.arity).iter().all(|ix| {
            let t: Vec<u8> = ix.iter().map(|&i| b[i as usize]).collect();
            self.has(&t)
        })
    }
}

fn subsets_of_size(items: &[u8], r: usize) -> usize {
    fn go(items: &[u8], r: usize) -> usize {
        if r == 0 {
            return 1;
        }
        if items.len() < r {
            return 0;
        }
        go(&items[1..], r - 1) + go(&items[1..], r)
    }
    go(items, r)
}

/// Number of `(h-1)`-subsets of `E_k` outside the center.
fn f_size(rho: &Rel) -> usize {
    let c = rho.center();
    let outside: Vec<u8> = (0..rho.k as u8).filter(|a| !c.contains(a)).collect();
    subsets_of_size(&outside, rho.arity - 1)
}

fn largest_chain(rho: &Rel) -> usize {
    let mut best = 0;
    for mask in 0u32..1 << rho.k {
        let b: Vec<u8> = (0..rho.k as u8).filter(|&a| mask >> a & 1 == 1).collect();
        if b.len() > best && rho.is_chain(&b) {
            best = b.len();
        }
    }
    best
}

fn selections(len: usize, range: usize, mode: IndexMode) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(len: usize, range: usize, strict: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let lo = if strict {
            cur.last().map_or(0, |&l| l + 1)
        } else {
            0
        };
        for i in lo..range {
            cur.push(i);
            go(len, range, strict, cur, out);
            cur.pop();
        }
    }
    go(len, range, mode == IndexMode::Strict, &mut cur, &mut out);
    out
}

fn pick(x: &[u8], sel: &[usize]) -> Vec<u8> {
    sel.iter().map(|&i| x[i]).collect()
}

fn with(mut t: Vec<u8>, tail: &[u8]) -> Vec<u8> {
    t.extend_from_slice(tail);
    t
}

fn build(k: usize, arity: usize, pred: impl Fn(&[u8]) -> bool) -> Option<Relation> {
    let d = clonecert::relcore::Domain::new(k).ok()?;
    let kept: Vec<Vec<u8>> = all_tuples(k, arity)
        .into_iter()
        .filter(|t| pred(t))
        .collect();
    Relation::from_tuples(d, arity, kept).ok()
}

pub fn slow_evaluate(spec: &DerivedSpec, rho: &Relation, sigma: &Relation) -> Option<Relation> {
    let mut ins = Vec::new();
    for s in &spec.inputs {
        ins.push(match s {
            Source::Rho => rho.clone(),
            Source::Sigma => sigma.clone(),
            Source::Derived(d) => slow_evaluate(d, rho, sigma)?,
        });
    }
    let single = matches!(spec.kind, Kind::RhoL | Kind::Lambda | Kind::Alpha1Of);
    if ins.len() != if single { 1 } else { 2 } {
        return None;
    }
    if ins.len() == 2 && ins[0].k() != ins[1].k() {
        return None;
    }
    let r = Rel::of(&ins[0]);
    let s = ins.get(1).map(Rel::of);
    let k = r.k;
    let h = r.arity;
    let p = |name: &str| spec.params.get(name).copied();
    let mode = spec.index_mode;
    let elems: Vec<u8> = (0..k as u8).collect();

    match spec.kind {
        Kind::Tau => {
            let s = s?;
            if h != 2 || s.arity != 1 {
                return None;
            }
            build(k, 1, |y| {
                elems.iter().any(|&u| s.has(&[u]) && r.has(&[u, y[0]]))
            })
        }
        Kind::GammaBinary | Kind::GammaT => {
            let s = s?;
            if h != 2 || s.arity != 1 {
                return None;
            }
            let t = if spec.kind == Kind::GammaT {
                p("t")?
            } else {
                2
            };
            if t < 2 || t > k {
                return None;
            }
            build(k, t, |a| {
                elems
                    .iter()
                    .any(|&u| s.has(&[u]) && a.iter().all(|&ai| r.has(&[ai, u])))
            })
        }
        Kind::RhoL => {
            let l = p("l")?;
            if h != 2 || l < 2 || l > largest_chain(&r).max(2) {
                return None;
            }
            build(k, l, |a| {
                for &x in a {
                    for &y in a {
                        if !r.has(&[x, y]) {
                            return false;
                        }
                    }
                }
                true
            })
        }
        Kind::AlphaN => {
            let s = s?;
            let n = p("n")?;
            if h < 3 || s.arity != 1 || n + 1 < h {
                return None;
            }
            let sels = selections(h - 1, n, mode);
            build(k, n, |b| {
                elems.iter().any(|&u| {
                    s.has(&[u]) && sels.iter().all(|sel| r.has(&with(vec![u], &pick(b, sel))))
                })
            })
        }
        Kind::BetaChain => {
            let s = s?;
            let j = p("j")?;
            if h < 3 || s.arity != 1 || j < 1 || j > f_size(&r) {
                return None;
            }
            let arity = j * (h - 1) + 1;
            build(k, arity, |b| {
                elems.iter().any(|&u| {
                    s.has(&[u])
                        && (0..j).all(|blk| {
                            let start = 1 + blk * (h - 1);
                            r.has(&with(vec![u], &b[start..start + h - 1]))
                        })
                })
            })
        }
        Kind::Alpha1Of => {
            if h < 2 {
                return None;
            }
            let positions = p("positions").unwrap_or(h - 1);
            if positions != h - 1 && positions != h {
                return None;
            }
            build(k, h, |x| {
                elems.iter().any(|&u| {
                    (0..positions).all(|i| {
                        let mut y = x.to_vec();
                        y[i] = u;
                        r.has(&y)
                    })
                })
            })
        }
        Kind::BetaT => {
            let g = s?;
            let t = p("t")?;
            if h < 2 || g.arity != h || t < h {
                return None;
            }
            let sels = selections(h - 1, t, mode);
            build(k, t, |x| {
                elems.iter().any(|&u| {
                    sels.iter().all(|sel| {
                        let gt = with(pick(x, &sel[..h - 2]), &[x[0], u]);
                        g.has(&gt) && r.has(&with(pick(x, sel), &[u]))
                    })
                })
            })
        }
        Kind::Lambda => {
            let sa = p("s")?;
            if h < 2 || h >= sa {
                return None;
            }
            build(k, sa, |a| r.has(&a[..h]))
        }
        Kind::GammaPrime => {
            let s = s?;
            if h < 2 || h >= s.arity {
                return None;
            }
            build(k, s.arity, |a| s.has(a) && r.has(&a[..h]))
        }
        Kind::ThetaUp => {
            let s = s?;
            let t = p("t")?;
            if !(2 <= h && h <= t && t < s.arity) {
                return None;
            }
            let sels = selections(h - 1, t, mode);
            build(k, t, |a| {
                elems.iter().any(|&u| {
                    let padded = with(a.to_vec(), &vec![u; s.arity - t]);
                    s.has(&padded) && sels.iter().all(|sel| r.has(&with(pick(a, sel), &[u])))
                })
            })
        }
        Kind::ThetaDown => {
            let s = s?;
            let t = p("t")?;
            if !(2 <= s.arity && s.arity <= t && t < h) {
                return None;
            }
            let sels = selections(s.arity - 1, t, mode);
            build(k, t, |a| {
                elems.iter().any(|&u| {
                    let padded = with(a.to_vec(), &vec![u; h - t]);
                    r.has(&padded) && sels.iter().all(|sel| s.has(&with(pick(a, sel), &[u])))
                })
            })
        }
        Kind::GammaS => {
            let s = s?;
            if h < 2 || h >= s.arity {
                return None;
            }
            let sels = selections(h - 1, s.arity, mode);
            build(k, s.arity, |x| {
                s.has(x)
                    && sels.iter().all(|sel| {
                        r.has(&with(vec![x[0]], &pick(x, sel)))
                            && r.has(&with(vec![x[1]], &pick(x, sel)))
                    })
            })
        }
        Kind::GammaPrimeT => {
            let s = s?;
            let t = p("t")?;
            let sa = s.arity;
            if h < 2 || sa < 2 || h == sa || t < h.max(sa) {
                return None;
            }
            let range = p("range").unwrap_or(if h < sa { sa } else { t });
            if range < 1 || range > t {
                return None;
            }
            let sels = selections(h.max(sa) - 1, range, mode);
            build(k, t, |x| {
                elems.iter().any(|&v| {
                    sels.iter().all(|sel| {
                        r.has(&with(pick(x, &sel[..h - 1]), &[v]))
                            && s.has(&with(pick(x, &sel[..sa - 1]), &[v]))
                    })
                })
            })
        }
        Kind::GammaPrimeH => {
            let s = s?;
            if !(2 <= s.arity && s.arity < h) {
                return None;
            }
            let sels = selections(s.arity - 1, h, mode);
            build(k, h, |b| {
                elems.iter().any(|&v| {
                    r.has(&with(b[1..].to_vec(), &[v]))
                        && sels.iter().all(|sel| s.has(&with(pick(b, sel), &[v])))
                })
            })
        }
        Kind::GammaPrimeChain => {
            let s = s?;
            let n = p("n")?;
            if !(2 <= s.arity && s.arity < h) || n < 1 || n > f_size(&r) {
                return None;
            }
            let arity = n * (h - 1) + 1;
            let sels = selections(s.arity - 1, arity, mode);
            build(k, arity, |b| {
                elems.iter().any(|&v| {
                    (0..n).all(|blk| {
                        let start = 1 + blk * (h - 1);
                        r.has(&with(b[start..start + h - 1].to_vec(), &[v]))
                    }) && sels.iter().all(|sel| s.has(&with(pick(b, sel), &[v])))
                })
            })
        }
        Kind::Intersect => {
            let s = s?;
            if s.arity != h {
                return None;
            }
            build(k, h, |t| r.has(t) && s.has(t))
        }
    }
}
