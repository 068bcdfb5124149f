//! Checkable witnesses that `Pol{ρ,σ}` is not maximal in `Pol ρ`.
//!
//! A certificate names `δ` by a derivation from `{ρ, σ}`, so `Pol{ρ,σ} ⊆ Pol δ` holds by
//! construction. Two operations then show `Pol{ρ,σ} ⊊ Pol{ρ,δ} ⊊ Pol ρ`.

mod catalog;
mod gadget;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use catalog::{catalog, Candidate};
pub use gadget::{build_gadget, Gadget, GadgetSpec, MAX_GADGET_N};

use crate::classifier::{classify, Verdict};
use crate::derived::DerivedSpec;
use crate::error::{Error, Result};
use crate::polycheck::{find_rho_separator, find_separator, in_pol, preserves, OpQuery};
use crate::relcore::{CentralRelation, Operation, Relation};

pub const CERTIFICATE_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    pub relation: Relation,
    pub derived_spec: DerivedSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub rho: Relation,
    pub sigma: Relation,
    pub delta: Delta,
    /// In `Pol{ρ,δ}`, not in `Pol σ`.
    pub f_mid: Operation,
    /// In `Pol ρ`, not in `Pol δ`.
    pub g_top: Operation,
    pub lemma_tag: String,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Checks the certificate against its own `rho` and `sigma`.
    pub fn verify(&self) -> Verification {
        verify_certificate(&self.rho, &self.sigma, self)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clause {
    /// Pair or domains do not match the certificate.
    Pair,
    /// `δ` is not recomputed by its transcript.
    A,
    /// `f_mid` must preserve `ρ` and `δ` and violate `σ`.
    B,
    /// `g_top` must preserve `ρ` and violate `δ`.
    C,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Pair => "pair",
            Clause::A => "a",
            Clause::B => "b",
            Clause::C => "c",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub ok: bool,
    pub failed: Option<Clause>,
    pub detail: String,
}

impl Verification {
    fn fail(c: Clause, detail: impl Into<String>) -> Self {
        Verification {
            ok: false,
            failed: Some(c),
            detail: detail.into(),
        }
    }
}

/// Direct checks only; never searches.
pub fn verify_certificate(rho: &Relation, sigma: &Relation, cert: &Certificate) -> Verification {
    use Clause::*;
    if &cert.rho != rho || &cert.sigma != sigma {
        return Verification::fail(Pair, "certificate was issued for a different pair");
    }
    let d = rho.domain();
    let same = [
        sigma.domain(),
        cert.delta.relation.domain(),
        cert.f_mid.domain(),
        cert.g_top.domain(),
    ]
    .iter()
    .all(|&x| x == d);
    if !same {
        return Verification::fail(Pair, "domains differ");
    }
    match cert.delta.derived_spec.evaluate(rho, sigma) {
        Ok(r) if r == cert.delta.relation => {}
        Ok(_) => return Verification::fail(A, "transcript recomputes a different relation"),
        Err(e) => return Verification::fail(A, format!("transcript does not evaluate: {e}")),
    }
    let delta = &cert.delta.relation;
    if !preserves(&cert.f_mid, rho) {
        return Verification::fail(B, "f_mid does not preserve rho");
    }
    if !preserves(&cert.f_mid, delta) {
        return Verification::fail(B, "f_mid does not preserve delta");
    }
    if preserves(&cert.f_mid, sigma) {
        return Verification::fail(B, "f_mid preserves sigma");
    }
    if !preserves(&cert.g_top, rho) {
        return Verification::fail(C, "g_top does not preserve rho");
    }
    if preserves(&cert.g_top, delta) {
        return Verification::fail(C, "g_top preserves delta");
    }
    Verification {
        ok: true,
        failed: None,
        detail: "all clauses hold".into(),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub max_arity: usize,
    /// Node budget of each separator search.
    pub budget: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            max_arity: 2,
            budget: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum CandidateStatus {
    /// Not defined for this pair, or too large to evaluate.
    NotApplicable(String),
    /// Full, empty, equal to `ρ` or `σ`, or equal to an earlier candidate.
    Skipped(String),
    NoGTop,
    NoFMid,
    Budget(String),
    Certified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateOutcome {
    pub tag: String,
    pub transcript: String,
    pub outcome: CandidateStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub config: CertifyConfig,
    pub certificate: Option<Certificate>,
    pub candidates: Vec<CandidateOutcome>,
}

/// Requires a `NotSubmaximal` pair. `Ok` with no certificate means "not found within bounds".
pub fn find_certificate(
    rho: &CentralRelation,
    sigma: &CentralRelation,
    config: &CertifyConfig,
) -> Result<CertifyReport> {
    let verdict = classify(rho, sigma)?.verdict;
    if verdict != Verdict::NotSubmaximal {
        return Err(Error::pre(format!(
            "pair is {verdict}; only NotSubmaximal pairs can be certified"
        )));
    }
    Ok(run_catalog(rho.rel(), sigma.rel(), config, true))
}

/// Runs the catalog without the classification precondition.
///
/// Every candidate is first tried with separators of arity 1, then the arity is raised for
/// the candidates still open (see [`passes`]). The certificate comes from the first pass that
/// succeeds and, within it, the earliest candidate. With `stop_at_first` false every candidate
/// is resolved.
pub fn run_catalog(
    rho: &Relation,
    sigma: &Relation,
    config: &CertifyConfig,
    stop_at_first: bool,
) -> CertifyReport {
    let mut seen: Vec<Relation> = Vec::new();
    let mut live: Vec<(usize, Candidate, Relation)> = Vec::new();
    let mut candidates = Vec::new();
    for (i, c) in catalog(rho, sigma).into_iter().enumerate() {
        let transcript = c.spec.transcript();
        let outcome = match prepare(rho, sigma, &c, &mut seen) {
            Ok(delta) => {
                live.push((i, c.clone(), delta));
                CandidateStatus::NoGTop
            }
            Err(status) => status,
        };
        candidates.push(CandidateOutcome {
            tag: c.tag,
            transcript,
            outcome,
        });
    }
    let mut tried = vec![false; candidates.len()];
    let mut certificate = None;
    for (arity, budget, retry) in passes(config) {
        let mut still = Vec::new();
        for (i, c, delta) in live {
            let hit_budget = matches!(candidates[i].outcome, CandidateStatus::Budget(_));
            if (certificate.is_some() && stop_at_first) || (retry && !hit_budget) {
                still.push((i, c, delta));
                continue;
            }
            let (status, cert) = separate(rho, sigma, &c, delta.clone(), arity, budget);
            candidates[i].outcome = status;
            tried[i] = true;
            match cert {
                Some(cert) => {
                    if certificate.is_none() {
                        certificate = Some(cert);
                    }
                }
                None => still.push((i, c, delta)),
            }
        }
        live = still;
        if certificate.is_some() && stop_at_first {
            break;
        }
    }
    if certificate.is_some() && stop_at_first {
        for (i, _, _) in live.into_iter().filter(|(i, _, _)| !tried[*i]) {
            candidates[i].outcome = CandidateStatus::Skipped("not tried".into());
        }
    }
    CertifyReport {
        config: *config,
        certificate,
        candidates,
    }
}

/// Node budget of the quick pass that precedes the full-budget pass at arities above 1.
const QUICK_BUDGET: u64 = 200_000;

/// `(arity, budget, retry_only)` per pass. Arity 1 runs once. Higher arities run a quick
/// pass, then a full-budget pass restricted to candidates that ran out in the quick one.
fn passes(config: &CertifyConfig) -> Vec<(usize, u64, bool)> {
    let mut out = vec![(1, config.budget, false)];
    for a in 2..=config.max_arity {
        if config.budget > QUICK_BUDGET {
            out.push((a, QUICK_BUDGET, false));
            out.push((a, config.budget, true));
        } else {
            out.push((a, config.budget, false));
        }
    }
    out
}

fn prepare(
    rho: &Relation,
    sigma: &Relation,
    c: &Candidate,
    seen: &mut Vec<Relation>,
) -> std::result::Result<Relation, CandidateStatus> {
    use CandidateStatus::*;
    let delta = c
        .spec
        .evaluate(rho, sigma)
        .map_err(|e| NotApplicable(e.to_string()))?;
    let skip = if delta.is_full() {
        Some("delta is full")
    } else if delta.is_empty() {
        Some("delta is empty")
    } else if &delta == rho {
        Some("delta equals rho")
    } else if &delta == sigma {
        Some("delta equals sigma")
    } else if seen.contains(&delta) {
        Some("delta equals an earlier candidate")
    } else {
        None
    };
    if let Some(why) = skip {
        return Err(Skipped(why.into()));
    }
    seen.push(delta.clone());
    Ok(delta)
}

fn separate(
    rho: &Relation,
    sigma: &Relation,
    c: &Candidate,
    delta: Relation,
    max_arity: usize,
    budget: u64,
) -> (CandidateStatus, Option<Certificate>) {
    use CandidateStatus::*;
    let search = |preserve: Vec<Relation>, violate: Vec<Relation>| {
        find_separator(
            &OpQuery::new(preserve, violate)
                .max_arity(max_arity)
                .budget(budget),
        )
    };
    let g_top = match find_rho_separator(rho, &delta, max_arity, budget) {
        Ok(Some(g)) => g,
        Ok(None) => return (NoGTop, None),
        Err(e) => return (Budget(format!("g_top: {e}")), None),
    };
    let f_mid = match search(vec![rho.clone(), delta.clone()], vec![sigma.clone()]) {
        Ok(Some(f)) => f,
        Ok(None) => return (NoFMid, None),
        Err(e) => return (Budget(format!("f_mid: {e}")), None),
    };
    debug_assert!(in_pol(&f_mid, [rho, &delta]));
    let cert = Certificate {
        schema: CERTIFICATE_SCHEMA,
        rho: rho.clone(),
        sigma: sigma.clone(),
        delta: Delta {
            relation: delta,
            derived_spec: c.spec.clone(),
        },
        f_mid,
        g_top,
        lemma_tag: c.tag.clone(),
    };
    let v = cert.verify();
    if !v.ok {
        return (
            NotApplicable(format!(
                "internal: certificate failed clause {:?}",
                v.failed
            )),
            None,
        );
    }
    (Certified, Some(cert))
}
