//! The five-condition test for whether `Pol{ρ,σ}` is a maximal subclone of `Pol ρ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::derived::{gamma_binary, lambda_pad};
use crate::error::{Error, Result};
use crate::relcore::{CentralRelation, Elem, ElemSet, Inclusion};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    TypeI,
    TypeII,
    TypeIII,
    TypeIV,
    TypeV,
    NotSubmaximal,
}

impl Verdict {
    pub fn is_submaximal(self) -> bool {
        self != Verdict::NotSubmaximal
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::TypeI => "TypeI",
            Verdict::TypeII => "TypeII",
            Verdict::TypeIII => "TypeIII",
            Verdict::TypeIV => "TypeIV",
            Verdict::TypeV => "TypeV",
            Verdict::NotSubmaximal => "NotSubmaximal",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    I,
    II,
    III,
    IV,
    V,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::I,
        Condition::II,
        Condition::III,
        Condition::IV,
        Condition::V,
    ];

    pub fn verdict(self) -> Verdict {
        match self {
            Condition::I => Verdict::TypeI,
            Condition::II => Verdict::TypeII,
            Condition::III => Verdict::TypeIII,
            Condition::IV => Verdict::TypeIV,
            Condition::V => Verdict::TypeV,
        }
    }

    pub fn parse(s: &str) -> Option<Condition> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Some(Condition::I),
            "II" | "2" => Some(Condition::II),
            "III" | "3" => Some(Condition::III),
            "IV" | "4" => Some(Condition::IV),
            "V" | "5" => Some(Condition::V),
            _ => None,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Why a condition holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// An element of `C_ρ ∩ σ`.
    CenterMeetsSigma { element: Elem },
    /// `γ = ρ`, and each maximal chain with the least element it shares with `σ`.
    ChainsMeetSigma { chain_hits: Vec<(ElemSet, Elem)> },
    /// Strict inclusion between `ρ` and `σ`.
    Comparable { direction: Inclusion },
    /// An element of `C_ρ ∩ C_σ`.
    CommonCenter { element: Elem },
    /// A tuple of `σ ∖ λ`, with `λ ⊆ σ`.
    PaddingStrict { witness: Vec<Elem> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionOutcome {
    pub condition: Condition,
    pub holds: bool,
    pub evidence: Option<Evidence>,
    /// Set when the condition fails.
    pub reason: Option<String>,
}

impl ConditionOutcome {
    fn yes(condition: Condition, e: Evidence) -> Self {
        ConditionOutcome {
            condition,
            holds: true,
            evidence: Some(e),
            reason: None,
        }
    }

    fn no(condition: Condition, reason: impl Into<String>) -> Self {
        ConditionOutcome {
            condition,
            holds: false,
            evidence: None,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub evidence: Option<Evidence>,
    /// Failure reasons of every condition checked before the verdict was reached.
    pub reasons: Vec<String>,
}

fn check_pair(rho: &CentralRelation, sigma: &CentralRelation) -> Result<()> {
    rho.domain().same(sigma.domain())?;
    if rho.k() < 3 {
        return Err(Error::pre(format!(
            "domain size k={} must be at least 3",
            rho.k()
        )));
    }
    if rho.arity() < 2 {
        return Err(Error::pre("rho must have arity at least 2"));
    }
    if rho.rel() == sigma.rel() {
        return Err(Error::pre("rho and sigma must differ"));
    }
    Ok(())
}

/// Evaluates one condition, including its arity guard.
pub fn condition(
    rho: &CentralRelation,
    sigma: &CentralRelation,
    which: Condition,
) -> Result<ConditionOutcome> {
    check_pair(rho, sigma)?;
    let h = rho.arity();
    let s = sigma.arity();
    let c = which;
    Ok(match which {
        Condition::I => {
            if s != 1 {
                ConditionOutcome::no(c, format!("I: sigma has arity {s}, not 1"))
            } else {
                match rho.center().intersect(sigma.center()).min() {
                    Some(e) => ConditionOutcome::yes(c, Evidence::CenterMeetsSigma { element: e }),
                    None => ConditionOutcome::no(
                        c,
                        format!(
                            "I: center {} of rho misses sigma {}",
                            rho.center(),
                            sigma.center()
                        ),
                    ),
                }
            }
        }
        Condition::II => {
            if s != 1 {
                ConditionOutcome::no(c, format!("II: sigma has arity {s}, not 1"))
            } else if h != 2 {
                ConditionOutcome::no(c, format!("II: rho has arity {h}, not 2"))
            } else {
                let gamma = gamma_binary(rho.rel(), sigma.rel())?.relation;
                let sig = sigma.center();
                let misses: Vec<ElemSet> = rho
                    .maximal_chains()
                    .iter()
                    .copied()
                    .filter(|b| b.intersect(sig).is_empty())
                    .collect();
                if &gamma != rho.rel() {
                    let mut r = "II: gamma differs from rho".to_string();
                    if !misses.is_empty() {
                        r.push_str(&format!("; chains missing sigma: {misses:?}"));
                    }
                    ConditionOutcome::no(c, r)
                } else if !misses.is_empty() {
                    ConditionOutcome::no(c, format!("II: chains missing sigma: {misses:?}"))
                } else {
                    let chain_hits = rho
                        .maximal_chains()
                        .iter()
                        .map(|&b| (b, b.intersect(sig).min().expect("chain meets sigma")))
                        .collect();
                    ConditionOutcome::yes(c, Evidence::ChainsMeetSigma { chain_hits })
                }
            }
        }
        Condition::III => {
            if s != h {
                ConditionOutcome::no(c, format!("III: arities {h} and {s} differ"))
            } else {
                match rho.compare(sigma.rel())? {
                    d @ (Inclusion::LeftStrict | Inclusion::RightStrict) => {
                        ConditionOutcome::yes(c, Evidence::Comparable { direction: d })
                    }
                    Inclusion::Equal => ConditionOutcome::no(c, "III: rho equals sigma"),
                    Inclusion::Incomparable => {
                        ConditionOutcome::no(c, "III: rho and sigma are incomparable")
                    }
                }
            }
        }
        Condition::IV => {
            if !(2 <= s && s < h) {
                ConditionOutcome::no(c, format!("IV: needs 2 <= s < h, got s={s}, h={h}"))
            } else {
                match rho.center().intersect(sigma.center()).min() {
                    Some(e) => ConditionOutcome::yes(c, Evidence::CommonCenter { element: e }),
                    None => ConditionOutcome::no(
                        c,
                        format!(
                            "IV: centers {} and {} are disjoint",
                            rho.center(),
                            sigma.center()
                        ),
                    ),
                }
            }
        }
        Condition::V => {
            if !(2 <= h && h < s) {
                ConditionOutcome::no(c, format!("V: needs 2 <= h < s, got h={h}, s={s}"))
            } else {
                let lambda = lambda_pad(rho.rel(), s)?.relation;
                match lambda.compare(sigma.rel())? {
                    Inclusion::LeftStrict => {
                        let witness = sigma
                            .tuples()
                            .find(|t| !lambda.contains(t))
                            .expect("strict superset has an extra tuple")
                            .to_vec();
                        ConditionOutcome::yes(c, Evidence::PaddingStrict { witness })
                    }
                    Inclusion::Equal => ConditionOutcome::no(c, "V: lambda equals sigma"),
                    _ => ConditionOutcome::no(c, "V: lambda is not contained in sigma"),
                }
            }
        }
    })
}

/// First condition to hold in the order I, II, III, IV, V; otherwise `NotSubmaximal`.
pub fn classify(rho: &CentralRelation, sigma: &CentralRelation) -> Result<ClassificationResult> {
    let mut reasons = Vec::new();
    for which in Condition::ALL {
        let out = condition(rho, sigma, which)?;
        if out.holds {
            return Ok(ClassificationResult {
                verdict: which.verdict(),
                evidence: out.evidence,
                reasons,
            });
        }
        reasons.extend(out.reason);
    }
    Ok(ClassificationResult {
        verdict: Verdict::NotSubmaximal,
        evidence: None,
        reasons,
    })
}

/// Re-checks a verdict's evidence directly from the definitions.
pub fn evidence_holds(
    rho: &CentralRelation,
    sigma: &CentralRelation,
    r: &ClassificationResult,
) -> bool {
    let (h, s) = (rho.arity(), sigma.arity());
    match (&r.verdict, &r.evidence) {
        (Verdict::NotSubmaximal, None) => true,
        (Verdict::TypeI, Some(Evidence::CenterMeetsSigma { element })) => {
            s == 1
                && sigma.contains(&[*element])
                && crate::relcore::Relation::from_predicate(rho.domain(), h - 1, |_| true)
                    .map(|all| {
                        all.tuples().all(|t| {
                            let mut x = vec![*element];
                            x.extend_from_slice(t);
                            rho.contains(&x)
                        })
                    })
                    .unwrap_or(false)
        }
        (Verdict::TypeII, Some(Evidence::ChainsMeetSigma { chain_hits })) => {
            let k = rho.k() as Elem;
            let direct_gamma_is_rho = (0..k).all(|a| {
                (0..k).all(|b| {
                    let g = (0..k).any(|u| {
                        sigma.contains(&[u]) && rho.contains(&[a, u]) && rho.contains(&[b, u])
                    });
                    g == rho.contains(&[a, b])
                })
            });
            s == 1
                && h == 2
                && direct_gamma_is_rho
                && chain_hits.len() == rho.maximal_chains().len()
                && chain_hits
                    .iter()
                    .all(|(b, e)| rho.is_chain(*b) && b.contains(*e) && sigma.contains(&[*e]))
        }
        (Verdict::TypeIII, Some(Evidence::Comparable { direction })) => {
            s == h
                && match direction {
                    Inclusion::LeftStrict => {
                        rho.tuples().all(|t| sigma.contains(t)) && rho.len() < sigma.len()
                    }
                    Inclusion::RightStrict => {
                        sigma.tuples().all(|t| rho.contains(t)) && sigma.len() < rho.len()
                    }
                    _ => false,
                }
        }
        (Verdict::TypeIV, Some(Evidence::CommonCenter { element })) => {
            2 <= s && s < h && rho.center().contains(*element) && sigma.center().contains(*element)
        }
        (Verdict::TypeV, Some(Evidence::PaddingStrict { witness })) => {
            2 <= h
                && h < s
                && sigma.contains(witness)
                && !rho.contains(&witness[..h])
                && sigma.tuples().len() > 0
                && crate::relcore::Relation::from_predicate(rho.domain(), s, |t| {
                    rho.contains(&t[..h])
                })
                .map(|lam| lam.tuples().all(|t| sigma.contains(t)))
                .unwrap_or(false)
        }
        _ => false,
    }
}
