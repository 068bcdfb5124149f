//! Rebuilds a target `h ∈ Pol ρ` from `Pol{ρ,σ} ∪ {g}` for a submaximal pair, as
//! `h(x) = H(x, f_1(x), .., f_q(x))`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify, Evidence, Verdict};
use crate::error::{Error, Result};
use crate::polycheck::{find_violation as column_violation, in_pol, preserves};
use crate::relcore::{CentralRelation, Domain, Elem, ElemSet, Inclusion, Operation, Relation};

/// Preservation of `H` is checked exhaustively up to this many column combinations.
pub const EXHAUSTIVE_LIMIT: f64 = 1e7;
pub const SAMPLE_COUNT: usize = 100_000;
/// Largest table `H` may have: `k^(m+q) <= 3^8`, i.e. `m+q <= 8` on `E_3` and `<= 6` on `E_4`.
pub const MAX_H_CELLS: usize = 6561;

/// Which gadget family builds `S`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FcCase {
    /// Unary `σ` (types I, II): contexts are `c ∈ σ^m`.
    Unary,
    /// `σ ⊊ ρ` or type IV: contexts are `s` pairwise distinct rows of `E_k^m`.
    DistinctRows,
    /// `ρ ⊊ σ` or type V: contexts are `s` rows any `h` of which fail `ρ`.
    RhoFailing,
}

/// `n` columns `a_1, .., a_n ∈ σ` with `g(a_1, .., a_n) ∉ σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub columns: Vec<Vec<Elem>>,
    pub image: Vec<Elem>,
}

/// First violating selection of member columns.
pub fn find_violation(g: &Operation, sigma: &Relation) -> Result<Violation> {
    g.domain().same(sigma.domain())?;
    let columns = column_violation(g, sigma).ok_or_else(|| Error::pre("no violation exists"))?;
    let image = (0..sigma.arity())
        .map(|j| {
            let row: Vec<Elem> = columns.iter().map(|c| c[j]).collect();
            g.eval(&row)
        })
        .collect();
    Ok(Violation { columns, image })
}

/// One member of `S`: `g(f^1, .., f^n)` for a context given by its rows `b_1, .., b_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fc {
    pub rows: Vec<Vec<Elem>>,
    pub inner: Vec<Operation>,
    pub op: Operation,
}

pub struct FcContext<'a> {
    pub rho: &'a Relation,
    pub sigma: &'a Relation,
    /// Default value for [`FcCase::RhoFailing`]; must be central in `ρ`.
    pub c: Elem,
}

/// Builds `f` with `(f(b_1), .., f(b_s)) ∉ σ`. For [`FcCase::Unary`] the single row is `c ∈ σ^m`.
pub fn build_fc(
    case: FcCase,
    g: &Operation,
    violation: &Violation,
    rows: &[Vec<Elem>],
    ctx: &FcContext,
) -> Result<Fc> {
    let d = g.domain();
    let s = ctx.sigma.arity();
    let n = g.arity();
    let m = rows
        .first()
        .map(|r| r.len())
        .ok_or_else(|| Error::arg("empty context"))?;
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::arg("context rows differ in length"));
    }
    if violation.columns.len() != n || violation.columns.iter().any(|a| a.len() != s) {
        return Err(Error::arg("violation does not match g and sigma"));
    }
    let cells = d.cells(m)?;
    let inner: Vec<Operation> = match case {
        FcCase::Unary => {
            if s != 1 || rows.len() != 1 || !rows[0].iter().all(|&x| ctx.sigma.contains(&[x])) {
                return Err(Error::arg("unary case needs one row in sigma^m"));
            }
            (0..n)
                .map(|i| Operation::constant(d, violation.columns[i][0], m))
                .collect::<Result<_>>()?
        }
        FcCase::DistinctRows | FcCase::RhoFailing => {
            if rows.len() != s {
                return Err(Error::ArityMismatch {
                    expected: s,
                    got: rows.len(),
                });
            }
            let distinct: HashSet<&Vec<Elem>> = rows.iter().collect();
            if distinct.len() != s {
                return Err(Error::arg("context rows are not pairwise distinct"));
            }
            if case == FcCase::RhoFailing {
                if !ctx.rho.center().contains(ctx.c) {
                    return Err(Error::arg("default element is not central in rho"));
                }
                if let Some(sel) = rho_related_rows(ctx.rho, rows) {
                    return Err(Error::arg(format!(
                        "context rows {sel:?} are jointly in rho"
                    )));
                }
            }
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let a = &violation.columns[i];
                let other = if case == FcCase::DistinctRows {
                    a[0]
                } else {
                    ctx.c
                };
                let mut table = vec![other; cells];
                for (j, b) in rows.iter().enumerate() {
                    table[d.rank(b)] = a[j];
                }
                out.push(Operation::new(d, m, table)?);
            }
            out
        }
    };
    for f in &inner {
        if !in_pol(f, [ctx.rho, ctx.sigma]) {
            return Err(Error::Precondition(
                "inner gadget is not in Pol{rho, sigma}".into(),
            ));
        }
    }
    let mut table = Vec::with_capacity(cells);
    let mut x = vec![0 as Elem; m];
    let mut args = vec![0 as Elem; n];
    for r in 0..cells {
        let mut rr = r;
        d.decode_into(&mut rr, &mut x);
        for (a, f) in args.iter_mut().zip(&inner) {
            *a = f.eval(&x);
        }
        table.push(g.eval(&args));
    }
    let op = Operation::new(d, m, table)?;
    let img: Vec<Elem> = rows.iter().map(|b| op.eval(b)).collect();
    if ctx.sigma.contains(&img) {
        return Err(Error::Precondition("gadget image lies in sigma".into()));
    }
    Ok(Fc {
        rows: rows.to_vec(),
        inner,
        op,
    })
}

/// Indices of `h` rows that are jointly in `ρ`, if any.
fn rho_related_rows(rho: &Relation, rows: &[Vec<Elem>]) -> Option<Vec<usize>> {
    use itertools::Itertools;
    let h = rho.arity();
    let m = rows[0].len();
    let mut buf = Vec::with_capacity(h);
    (0..rows.len()).combinations(h).find(|sel| {
        (0..m).all(|j| {
            buf.clear();
            buf.extend(sel.iter().map(|&i| rows[i][j]));
            rho.contains(&buf)
        })
    })
}

/// `(x, f_1(x), .., f_q(x))`.
pub fn ext_map(s: &[Operation], x: &[Elem]) -> Result<Vec<Elem>> {
    if s.is_empty() {
        return Err(Error::arg("S must be nonempty"));
    }
    let mut y = x.to_vec();
    for f in s {
        y.push(f.apply(x)?);
    }
    Ok(y)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub y: Vec<Elem>,
    pub d_y: ElemSet,
    pub u_y: Elem,
}

#[derive(Clone, Debug)]
pub struct BuiltH {
    pub op: Operation,
    /// One entry per `y ∈ σ^{m+q}`; empty unless type II.
    pub chains: Vec<ChainEntry>,
}

/// `H(ext(x)) = target(x)`; type II sends `y ∈ σ^{m+q}` to `u_y`; everything else goes to `c`.
pub fn build_h(
    rho: &CentralRelation,
    sigma: &CentralRelation,
    target: &Operation,
    s: &[Operation],
    verdict: Verdict,
    c: Elem,
) -> Result<BuiltH> {
    let d = target.domain();
    let m = target.arity();
    let width = m + s.len();
    let cells = d.cells(width)?;
    if cells > MAX_H_CELLS {
        return Err(Error::Budget(format!(
            "H would have arity {width} and {cells} table cells (limit {MAX_H_CELLS})"
        )));
    }
    let mut table = vec![c; cells];
    let mut is_ext = vec![false; cells];
    let xs: Vec<Vec<Elem>> = (0..d.cells(m)?).map(|r| d.decode(r, m)).collect();
    let exts: Vec<Vec<Elem>> = xs.iter().map(|x| ext_map(s, x)).collect::<Result<_>>()?;
    for (x, y) in xs.iter().zip(&exts) {
        let r = d.rank(y);
        table[r] = target.eval(x);
        is_ext[r] = true;
    }
    let mut chains = Vec::new();
    if verdict == Verdict::TypeII {
        if rho.arity() != 2 || sigma.arity() != 1 {
            return Err(Error::pre("type II needs binary rho and unary sigma"));
        }
        let sig = sigma.center();
        let members = sig.to_vec();
        let mut y = vec![members[0]; width];
        loop {
            let r = d.rank(&y);
            if is_ext[r] {
                return Err(Error::Precondition(format!(
                    "{y:?} is both in ext(E^m) and in sigma^(m+q)"
                )));
            }
            let mut d_y = ElemSet::EMPTY;
            for (x, e) in xs.iter().zip(&exts) {
                if e.iter().zip(&y).all(|(&a, &b)| rho.contains(&[a, b])) {
                    d_y.insert(target.eval(x));
                }
            }
            let eta = rho
                .maximal_chains()
                .iter()
                .filter(|b| d_y.is_subset(**b))
                .fold(ElemSet::EMPTY, |acc, b| acc.union(*b));
            let u_y = eta.intersect(sig).min().ok_or_else(|| {
                Error::Precondition(format!("no sigma element on chains over {d_y}"))
            })?;
            table[r] = u_y;
            chains.push(ChainEntry {
                y: y.clone(),
                d_y,
                u_y,
            });
            // Odometer over σ^{width}.
            let mut p = width;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                let i = members.iter().position(|&v| v == y[p]).unwrap();
                if i + 1 < members.len() {
                    y[p] = members[i + 1];
                    break;
                }
                y[p] = members[0];
            }
            if y.iter().all(|&v| v == members[0]) {
                break;
            }
        }
    }
    Ok(BuiltH {
        op: Operation::new(d, width, table)?,
        chains,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub mode: CheckMode,
}

impl Check {
    fn exact(name: &str, passed: bool) -> Check {
        Check {
            name: name.into(),
            passed,
            mode: CheckMode::Exhaustive,
        }
    }
}

/// Exhaustive while `|rel|^n <= EXHAUSTIVE_LIMIT`, otherwise seeded random column samples.
pub fn check_preserves(f: &Operation, rel: &Relation, seed: u64) -> (bool, CheckMode) {
    let n = f.arity();
    if (rel.len() as f64).powi(n as i32) <= EXHAUSTIVE_LIMIT {
        return (preserves(f, rel), CheckMode::Exhaustive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = rel.arity();
    let mut rows = vec![vec![0 as Elem; n]; h];
    let mut img = vec![0 as Elem; h];
    for _ in 0..SAMPLE_COUNT {
        for i in 0..n {
            let t = rel.tuple(rng.gen_range(0..rel.len()));
            for (row, &a) in rows.iter_mut().zip(t) {
                row[i] = a;
            }
        }
        for j in 0..h {
            img[j] = f.eval(&rows[j]);
        }
        if !rel.contains(&img) {
            return (false, CheckMode::Sampled);
        }
    }
    (true, CheckMode::Sampled)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpTranscript {
    pub sigma_type: Verdict,
    pub case: FcCase,
    pub g: Operation,
    pub violation: Violation,
    pub c: Elem,
    pub m: usize,
    /// Contexts enumerated before deduplication.
    pub contexts: usize,
    /// Distinct gadgets, each with the first context that produced it.
    pub s: Vec<Fc>,
    pub h: Operation,
    pub target: Operation,
    pub chains: Vec<ChainEntry>,
    pub checks: Vec<Check>,
}

impl InterpTranscript {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn q(&self) -> usize {
        self.s.len()
    }
}

fn case_for(verdict: Verdict, evidence: &Option<Evidence>) -> Result<FcCase> {
    Ok(match (verdict, evidence) {
        (Verdict::TypeI | Verdict::TypeII, _) => FcCase::Unary,
        (Verdict::TypeIV, _) => FcCase::DistinctRows,
        (Verdict::TypeV, _) => FcCase::RhoFailing,
        (
            Verdict::TypeIII,
            Some(Evidence::Comparable {
                direction: Inclusion::RightStrict,
            }),
        ) => FcCase::DistinctRows,
        (
            Verdict::TypeIII,
            Some(Evidence::Comparable {
                direction: Inclusion::LeftStrict,
            }),
        ) => FcCase::RhoFailing,
        _ => {
            return Err(Error::pre(format!(
                "pair is {verdict}; interpolation needs types I to V"
            )))
        }
    })
}

/// Every context of the given case at arity `m`, in lexicographic order of the row list.
fn contexts(
    case: FcCase,
    d: Domain,
    m: usize,
    rho: &Relation,
    sigma: &Relation,
) -> Result<Vec<Vec<Vec<Elem>>>> {
    use itertools::Itertools;
    let rows: Vec<Vec<Elem>> = (0..d.cells(m)?).map(|r| d.decode(r, m)).collect();
    Ok(match case {
        FcCase::Unary => {
            let sig = sigma.tuples().map(|t| t[0]).collect::<Vec<_>>();
            (0..m)
                .map(|_| sig.iter().copied())
                .multi_cartesian_product()
                .map(|c| vec![c])
                .collect()
        }
        FcCase::DistinctRows => rows.iter().cloned().permutations(sigma.arity()).collect(),
        FcCase::RhoFailing => rows
            .iter()
            .cloned()
            .permutations(sigma.arity())
            .filter(|ctx| rho_related_rows(rho, ctx).is_none())
            .collect(),
    })
}

/// Runs the whole construction and its post-checks. `seed` drives sampled checks only.
pub fn interpolate(
    rho: &CentralRelation,
    sigma: &CentralRelation,
    g: &Operation,
    target: &Operation,
    seed: u64,
) -> Result<InterpTranscript> {
    let cls = classify(rho, sigma)?;
    let case = case_for(cls.verdict, &cls.evidence)?;
    let d = rho.domain();
    d.same(g.domain())?;
    d.same(target.domain())?;
    if !preserves(g, rho) {
        return Err(Error::pre("g does not preserve rho"));
    }
    if !preserves(target, rho) {
        return Err(Error::pre("target does not preserve rho"));
    }
    let violation = find_violation(g, sigma)?;
    let c = match cls.verdict {
        Verdict::TypeI => rho.center().intersect(sigma.center()).min(),
        Verdict::TypeII => rho.center().min(),
        _ => rho.center().intersect(sigma.center()).min(),
    }
    .ok_or_else(|| Error::Precondition("no suitable central element".into()))?;
    let m = target.arity();
    let ctxs = contexts(case, d, m, rho, sigma)?;
    let fctx = FcContext {
        rho: rho.rel(),
        sigma: sigma.rel(),
        c,
    };
    let mut s: Vec<Fc> = Vec::new();
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut fc_ok = true;
    for ctx in &ctxs {
        let fc = build_fc(case, g, &violation, ctx, &fctx)?;
        let img: Vec<Elem> = ctx.iter().map(|b| fc.op.eval(b)).collect();
        fc_ok &= !sigma.contains(&img);
        if seen.insert(fc.op.table().to_vec()) {
            s.push(fc);
        }
    }
    if s.is_empty() {
        return Err(Error::Precondition("no gadget contexts exist".into()));
    }
    let ops: Vec<Operation> = s.iter().map(|f| f.op.clone()).collect();
    let built = build_h(rho, sigma, target, &ops, cls.verdict, c)?;
    let h = built.op;

    let mut checks = Vec::new();
    checks.push(Check::exact(
        "inner gadgets in Pol{rho,sigma}",
        s.iter()
            .all(|f| f.inner.iter().all(|i| in_pol(i, [rho.rel(), sigma.rel()]))),
    ));
    checks.push(Check::exact("gadgets leave sigma on their context", fc_ok));
    checks.push(Check::exact(
        "gadgets in Pol rho",
        ops.iter().all(|f| preserves(f, rho)),
    ));
    let mut identity = true;
    let mut x = vec![0 as Elem; m];
    for r in 0..d.cells(m)? {
        let mut rr = r;
        d.decode_into(&mut rr, &mut x);
        identity &= h.eval(&ext_map(&ops, &x)?) == target.eval(&x);
    }
    checks.push(Check::exact("H(ext(x)) = target(x)", identity));
    let (ok, mode) = check_preserves(&h, rho, seed);
    checks.push(Check {
        name: "H preserves rho".into(),
        passed: ok,
        mode,
    });
    let (ok, mode) = check_preserves(&h, sigma, seed.wrapping_add(1));
    checks.push(Check {
        name: "H preserves sigma".into(),
        passed: ok,
        mode,
    });
    if cls.verdict == Verdict::TypeII {
        let chain_ok = built
            .chains
            .iter()
            .all(|e| rho.is_chain(e.d_y) && sigma.contains(&[e.u_y]));
        checks.push(Check::exact(
            "D_y are chains and u_y lie in sigma",
            chain_ok,
        ));
    }

    Ok(InterpTranscript {
        sigma_type: cls.verdict,
        case,
        g: g.clone(),
        violation,
        c,
        m,
        contexts: ctxs.len(),
        s,
        h,
        target: target.clone(),
        chains: built.chains,
        checks,
    })
}
