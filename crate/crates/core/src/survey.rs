//! Every ordered pair of central relations on `E_k`: verdict, evidence, certificate or demo.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certify::{find_certificate, run_catalog, Certificate, CertifyConfig};
use crate::classifier::{classify, evidence_holds, Evidence, Verdict};
use crate::error::{Error, Result};
use crate::interp::interpolate;
use crate::polycheck::{find_separator, pol_members, preserves, OpQuery, SearchLimits};
use crate::relcore::{central_relations, write_relation, CentralRelation, Domain, Operation};

pub const SURVEY_SCHEMA: u32 = 1;
pub const ID_ALGORITHM: &str = "sha256 of the canonical text form, first 16 hex digits";

pub fn relation_id(rel: &crate::relcore::Relation) -> String {
    let digest = Sha256::digest(write_relation(rel).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub k: usize,
    /// Relations of arity `1..=max_relation_arity` take part.
    pub max_relation_arity: usize,
    pub certify: CertifyConfig,
    pub seed: u64,
    /// One interpolation demo per submaximal row.
    pub interpolation: bool,
    /// Also run the certificate catalog on submaximal rows; any hit is an inconsistency.
    pub cross_check: bool,
}

impl SurveyConfig {
    pub fn new(k: usize) -> Self {
        SurveyConfig {
            k,
            max_relation_arity: 3,
            certify: CertifyConfig::default(),
            seed: 0,
            interpolation: true,
            cross_check: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub id: String,
    pub arity: usize,
    pub center: Vec<u8>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub lemma_tag: String,
    pub transcript: String,
    pub delta_arity: usize,
    pub f_mid_arity: usize,
    pub g_top_arity: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoSummary {
    pub status: DemoStatus,
    pub detail: String,
    /// Number of gadgets when the demo ran.
    pub q: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub rho_id: String,
    pub sigma_id: String,
    pub verdict: Verdict,
    pub evidence: Option<Evidence>,
    pub evidence_valid: bool,
    pub certificate: Option<CertificateSummary>,
    /// Filled in by callers that store certificates.
    pub certificate_file: Option<String>,
    pub interpolation: Option<DemoSummary>,
    /// Tag of a catalog certificate found for a submaximal pair.
    pub cross_check_hit: Option<String>,
    pub consistent: bool,
    #[serde(skip)]
    pub full_certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub schema: u32,
    pub id_algorithm: String,
    pub config: SurveyConfig,
    pub relations: Vec<RelationEntry>,
    pub rows: Vec<SurveyRow>,
    pub verdict_counts: BTreeMap<String, usize>,
    pub inconsistent: usize,
}

impl SurveyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// All central relations of arity `1..=max_arity` on `E_k`, arity-major.
pub fn all_central(k: usize, max_arity: usize) -> Result<Vec<CentralRelation>> {
    let d = Domain::new(k)?;
    let mut out = Vec::new();
    for h in 1..=max_arity {
        out.extend(central_relations(d, h)?);
    }
    Ok(out)
}

pub fn survey(config: &SurveyConfig) -> Result<SurveyReport> {
    if !(3..=4).contains(&config.k) {
        return Err(Error::pre("surveys are supported for k = 3 and k = 4"));
    }
    if !(1..=3).contains(&config.max_relation_arity) {
        return Err(Error::arg("relation arity bound must be in 1..=3"));
    }
    let rels = all_central(config.k, config.max_relation_arity)?;
    let relations: Vec<RelationEntry> = rels
        .iter()
        .map(|r| RelationEntry {
            id: relation_id(r.rel()),
            arity: r.arity(),
            center: r.center().to_vec(),
            text: write_relation(r.rel()),
        })
        .collect();
    let mut rows = Vec::new();
    for (i, rho) in rels.iter().enumerate().filter(|(_, r)| r.arity() >= 2) {
        for (j, sigma) in rels.iter().enumerate() {
            if i != j {
                let mut row = survey_row(rho, sigma, config)?;
                row.rho_id = relations[i].id.clone();
                row.sigma_id = relations[j].id.clone();
                rows.push(row);
            }
        }
    }
    let mut verdict_counts = BTreeMap::new();
    for r in &rows {
        *verdict_counts
            .entry(r.verdict.name().to_string())
            .or_insert(0) += 1;
    }
    let inconsistent = rows.iter().filter(|r| !r.consistent).count();
    Ok(SurveyReport {
        schema: SURVEY_SCHEMA,
        id_algorithm: ID_ALGORITHM.into(),
        config: *config,
        relations,
        rows,
        verdict_counts,
        inconsistent,
    })
}

/// One row; the ids are left empty for the caller.
pub fn survey_row(
    rho: &CentralRelation,
    sigma: &CentralRelation,
    config: &SurveyConfig,
) -> Result<SurveyRow> {
    let cls = classify(rho, sigma)?;
    let evidence_valid = evidence_holds(rho, sigma, &cls);
    let mut row = SurveyRow {
        rho_id: String::new(),
        sigma_id: String::new(),
        verdict: cls.verdict,
        evidence: cls.evidence.clone(),
        evidence_valid,
        certificate: None,
        certificate_file: None,
        interpolation: None,
        cross_check_hit: None,
        consistent: evidence_valid,
        full_certificate: None,
    };
    if cls.verdict == Verdict::NotSubmaximal {
        let report = find_certificate(rho, sigma, &config.certify)?;
        match report.certificate {
            Some(cert) => {
                let verified = cert.verify().ok;
                row.consistent &= verified;
                row.certificate = Some(CertificateSummary {
                    lemma_tag: cert.lemma_tag.clone(),
                    transcript: cert.delta.derived_spec.transcript(),
                    delta_arity: cert.delta.relation.arity(),
                    f_mid_arity: cert.f_mid.arity(),
                    g_top_arity: cert.g_top.arity(),
                    verified,
                });
                row.full_certificate = Some(cert);
            }
            None => row.consistent = false,
        }
        return Ok(row);
    }
    if config.cross_check {
        let report = run_catalog(rho.rel(), sigma.rel(), &config.certify, true);
        if let Some(cert) = report.certificate.filter(|c| c.verify().ok) {
            row.cross_check_hit = Some(cert.lemma_tag);
            row.consistent = false;
        }
    }
    if config.interpolation {
        let demo = demo(rho, sigma, config);
        row.consistent &= demo.status != DemoStatus::Fail;
        row.interpolation = Some(demo);
    }
    Ok(row)
}

/// `g` is the first separator of `ρ` from `σ`; the target is the first unary member of
/// `Pol ρ ∖ Pol σ` other than `g`, else the last unary member of `Pol ρ`.
fn demo(rho: &CentralRelation, sigma: &CentralRelation, config: &SurveyConfig) -> DemoSummary {
    let skipped = |detail: String| DemoSummary {
        status: DemoStatus::Skipped,
        detail,
        q: None,
    };
    let query = OpQuery::new(vec![rho.rel().clone()], vec![sigma.rel().clone()])
        .max_arity(config.certify.max_arity)
        .budget(config.certify.budget);
    let g = match find_separator(&query) {
        Ok(Some(g)) => g,
        Ok(None) => return skipped("no separator of rho from sigma within the arity bound".into()),
        Err(e) => return skipped(format!("separator search: {e}")),
    };
    let unary = match pol_members(
        rho.domain(),
        1,
        &[rho.rel()],
        SearchLimits::default(),
        1 << 20,
    ) {
        Ok(u) => u,
        Err(e) => return skipped(format!("unary polymorphisms: {e}")),
    };
    let target: Option<&Operation> = unary
        .iter()
        .find(|f| **f != g && !preserves(f, sigma.rel()))
        .or(unary.last());
    let Some(target) = target else {
        return skipped("no unary polymorphism".into());
    };
    match interpolate(rho, sigma, &g, target, config.seed) {
        Ok(t) => {
            let failed: Vec<&str> = t
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            let (status, detail) = if failed.is_empty() {
                (
                    DemoStatus::Pass,
                    format!("{} checks passed", t.checks.len()),
                )
            } else {
                (DemoStatus::Fail, format!("failed: {}", failed.join(", ")))
            };
            DemoSummary {
                status,
                detail,
                q: Some(t.q()),
            }
        }
        Err(Error::Budget(e)) => skipped(format!("budget: {e}")),
        Err(e) => DemoSummary {
            status: DemoStatus::Fail,
            detail: e.to_string(),
            q: None,
        },
    }
}
