use std::fs;
use std::path::Path;

use clonecert::certify::{find_certificate, verify_certificate, Certificate, CertifyConfig};
use clonecert::classifier::classify;
use clonecert::closure::{bounded_closure, saturation_probe, ClosureOptions};
use clonecert::derived::{DerivedSpec, IndexMode, Kind};
use clonecert::interp::interpolate;
use clonecert::relcore::{
    iso_canonical_key, reflexive_symmetric_relations, write_relation, CentralRelation, Domain,
    Relation,
};
use clonecert::survey::{survey, DemoStatus, SurveyConfig, SurveyRow};
use clonecert::ValidationError;
use serde::Serialize;
use serde_json::json;

use crate::input::{load_operation, load_operations, load_relation, read_text};
use crate::{Cli, Cmd, Failure};

type Outcome = Result<u8, Failure>;

fn print_json<T: Serialize>(v: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("serializable output")
    );
}

fn central(rel: Relation, what: &Path) -> Result<CentralRelation, Failure> {
    CentralRelation::new(rel)
        .map_err(|e| Failure::invalid(format!("{}: {}", what.display(), describe(&e))))
}

fn describe(e: &ValidationError) -> String {
    let name = format!("{e:?}");
    let name = name
        .split(['(', ' ', '{'])
        .next()
        .unwrap_or_default()
        .to_string();
    format!("not central ({name}): {e}")
}

fn pair(rho: &Path, sigma: &Path) -> Result<(CentralRelation, CentralRelation), Failure> {
    Ok((
        central(load_relation(rho)?, rho)?,
        central(load_relation(sigma)?, sigma)?,
    ))
}

pub fn run(cli: &Cli) -> Outcome {
    let budget = cli.budget;
    match &cli.cmd {
        Cmd::Validate { file } => validate(cli, file),
        Cmd::Center { file } => {
            let rel = load_relation(file)?;
            let c = rel.center();
            if cli.json {
                print_json(&json!({ "center": c }));
            } else {
                println!("{c}");
            }
            Ok(0)
        }
        Cmd::Chains { file } => {
            let rel = central(load_relation(file)?, file)?;
            if cli.json {
                print_json(&json!({ "chains": rel.maximal_chains() }));
            } else {
                for ch in rel.maximal_chains() {
                    println!("{ch}");
                }
            }
            Ok(0)
        }
        Cmd::Derive {
            rho,
            sigma,
            kind,
            params,
            mode,
        } => {
            let kind = Kind::from_name(kind)
                .ok_or_else(|| Failure::usage(format!("unknown constructor `{kind}`")))?;
            let mut spec = DerivedSpec::new(kind);
            for (k, v) in params {
                spec = spec.param(k, *v);
            }
            if let Some(m) = mode {
                spec = spec.mode(match m.as_str() {
                    "strict" => IndexMode::Strict,
                    "repeats" => IndexMode::Repeats,
                    _ => return Err(Failure::usage(format!("unknown mode `{m}`"))),
                });
            }
            let (r, s) = (load_relation(rho)?, load_relation(sigma)?);
            let rel = spec.evaluate(&r, &s)?;
            if cli.json {
                print_json(
                    &json!({ "relation": rel, "derived_spec": spec, "transcript": spec.transcript() }),
                );
            } else {
                println!("{}", write_relation(&rel));
                println!("# {}", spec.transcript());
            }
            Ok(0)
        }
        Cmd::Classify { rho, sigma } => {
            let (r, s) = pair(rho, sigma)?;
            let res = classify(&r, &s)?;
            if cli.json {
                print_json(&res);
            } else {
                println!("verdict: {}", res.verdict.name());
                if let Some(e) = &res.evidence {
                    println!(
                        "evidence: {}",
                        serde_json::to_string(e).expect("evidence serializes")
                    );
                }
                for reason in &res.reasons {
                    println!("  {reason}");
                }
            }
            Ok(0)
        }
        Cmd::Certify {
            rho,
            sigma,
            max_arity,
            out,
        } => {
            let (r, s) = pair(rho, sigma)?;
            let mut cfg = CertifyConfig {
                max_arity: *max_arity,
                ..CertifyConfig::default()
            };
            if let Some(b) = budget {
                cfg.budget = b;
            }
            let rep = find_certificate(&r, &s, &cfg)?;
            if cli.json {
                print_json(&rep);
            }
            let Some(cert) = rep.certificate else {
                for c in &rep.candidates {
                    eprintln!("  {} {}: {:?}", c.tag, c.transcript, c.outcome);
                }
                return Err(Failure::invalid(
                    "no certificate found within the search bounds",
                ));
            };
            match out {
                Some(path) => {
                    fs::write(path, cert.to_json()).map_err(|e| {
                        Failure::usage(format!("cannot write {}: {e}", path.display()))
                    })?;
                    if !cli.json {
                        println!(
                            "certified by {}: {}",
                            cert.lemma_tag,
                            cert.delta.derived_spec.transcript()
                        );
                    }
                }
                None if !cli.json => println!("{}", cert.to_json()),
                None => {}
            }
            Ok(0)
        }
        Cmd::Verify { cert, rho, sigma } => {
            let c = Certificate::from_json(&read_text(cert)?)?;
            let (r, s) = match (rho, sigma) {
                (Some(r), Some(s)) => (load_relation(r)?, load_relation(s)?),
                _ => (c.rho.clone(), c.sigma.clone()),
            };
            let v = verify_certificate(&r, &s, &c);
            if cli.json {
                print_json(&v);
            } else if v.ok {
                println!("ok: {}", v.detail);
            } else {
                let clause = v.failed.map(|c| c.to_string()).unwrap_or_default();
                println!("FAIL clause {clause}: {}", v.detail);
            }
            Ok(if v.ok { 0 } else { 1 })
        }
        Cmd::Interpolate {
            rho,
            sigma,
            g,
            target,
        } => {
            let (r, s) = pair(rho, sigma)?;
            let g = load_operation(g, r.domain())?;
            let target = load_operation(target, r.domain())?;
            let t = interpolate(&r, &s, &g, &target, cli.seed)?;
            if cli.json {
                print_json(&t);
            } else {
                println!(
                    "type {} case {:?}: c={} m={} q={}",
                    t.sigma_type.name(),
                    t.case,
                    t.c,
                    t.m,
                    t.q()
                );
                for c in &t.checks {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    println!("{verdict} {} ({:?})", c.name, c.mode);
                }
            }
            if t.passed() {
                Ok(0)
            } else {
                Err(Failure::inconsistent("an interpolation check failed"))
            }
        }
        Cmd::Closure {
            gens,
            k,
            max_arity,
            stats,
            rho,
            sigma,
        } => {
            let budget = budget.unwrap_or(ClosureOptions::default().budget);
            if let (Some(rho), Some(sigma)) = (rho, sigma) {
                let rep = saturation_probe(
                    &load_relation(rho)?,
                    &load_relation(sigma)?,
                    *max_arity,
                    budget,
                )?;
                if cli.json {
                    print_json(&rep);
                } else {
                    println!("note: {}", rep.note);
                    println!("Pol rho counts: {:?}", rep.pol_rho);
                    println!("Pol{{rho,sigma}} counts: {:?}", rep.pol_rho_sigma);
                    for e in &rep.entries {
                        let tag = if e.saturated { "saturated" } else { "short" };
                        println!("{tag} {} reached {:?}", e.g.to_text(), e.reached);
                    }
                }
                return Ok(0);
            }
            let Some(gens) = gens else {
                return Err(Failure::usage(
                    "closure needs --gens, or --rho with --sigma",
                ));
            };
            let ops = load_operations(gens)?;
            let domain = match (ops.first(), k) {
                (Some(op), _) => op.domain(),
                (None, Some(k)) => Domain::new(*k)?,
                (None, None) => return Err(Failure::usage("empty generator file needs --k")),
            };
            let cl = bounded_closure(domain, &ops, *max_arity, budget)?;
            if cli.json {
                if *stats {
                    print_json(
                        &json!({ "counts": cl.counts(), "fixpoint": cl.fixpoint, "compositions": cl.compositions }),
                    );
                } else {
                    print_json(&cl);
                }
            } else {
                for (n, c) in cl.counts().iter().enumerate() {
                    println!("arity {}: {c}", n + 1);
                }
                println!("fixpoint: {}", cl.fixpoint);
                println!("compositions: {}", cl.compositions);
                if !*stats {
                    for f in cl.members.iter().flatten() {
                        println!("{}", f.to_text());
                    }
                }
            }
            Ok(0)
        }
        Cmd::Enumerate {
            k,
            arity,
            central: only_central,
            dedup_iso,
        } => {
            if *k > 4 || *arity > 3 {
                return Err(Failure::usage("enumerate supports k <= 4 and arity <= 3"));
            }
            let rels = reflexive_symmetric_relations(Domain::new(*k)?, *arity)?;
            let kept: Vec<Relation> = rels
                .into_iter()
                .filter(|r| !only_central || r.validate_central().is_ok())
                .filter(|r| {
                    !dedup_iso || iso_canonical_key(r) == r.member_ranks().collect::<Vec<_>>()
                })
                .collect();
            if cli.json {
                print_json(&kept);
            } else {
                let texts: Vec<String> = kept.iter().map(write_relation).collect();
                println!("{}", texts.join("\n\n"));
            }
            Ok(0)
        }
        Cmd::Survey {
            k,
            max_arity,
            separator_arity,
            out_dir,
            cross_check,
            no_interpolation,
        } => {
            let mut cfg = SurveyConfig {
                max_relation_arity: *max_arity,
                seed: cli.seed,
                interpolation: !no_interpolation,
                cross_check: *cross_check,
                ..SurveyConfig::new(*k)
            };
            cfg.certify.max_arity = *separator_arity;
            if let Some(b) = budget {
                cfg.certify.budget = b;
            }
            let mut rep = survey(&cfg)?;
            if let Some(dir) = out_dir {
                write_survey(dir, &mut rep.rows)?;
                fs::write(dir.join("survey.json"), rep.to_json())
                    .map_err(|e| Failure::usage(format!("cannot write survey.json: {e}")))?;
            }
            if cli.json {
                println!("{}", rep.to_json());
            } else {
                for r in &rep.rows {
                    println!("{}", table_line(r));
                }
                println!("verdicts: {:?}", rep.verdict_counts);
                println!("inconsistent rows: {}", rep.inconsistent);
            }
            if rep.inconsistent > 0 {
                return Err(Failure::inconsistent(format!(
                    "{} inconsistent survey rows",
                    rep.inconsistent
                )));
            }
            Ok(0)
        }
    }
}

fn validate(cli: &Cli, file: &Path) -> Outcome {
    let rel = load_relation(file)?;
    match rel.validate_central() {
        Ok(()) => {
            if cli.json {
                print_json(&json!({ "central": true, "center": rel.center() }));
            } else {
                println!("central; center {}", rel.center());
            }
            Ok(0)
        }
        Err(e) => {
            if cli.json {
                print_json(&json!({ "central": false, "reason": describe(&e) }));
            }
            Err(Failure::invalid(describe(&e)))
        }
    }
}

fn write_survey(dir: &Path, rows: &mut [SurveyRow]) -> Result<(), Failure> {
    let certs = dir.join("certificates");
    fs::create_dir_all(&certs)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", certs.display())))?;
    for r in rows.iter_mut() {
        if let Some(c) = &r.full_certificate {
            let name = format!("{}_{}.json", r.rho_id, r.sigma_id);
            fs::write(certs.join(&name), c.to_json())
                .map_err(|e| Failure::usage(format!("cannot write {name}: {e}")))?;
            r.certificate_file = Some(format!("certificates/{name}"));
        }
    }
    Ok(())
}

fn table_line(r: &SurveyRow) -> String {
    let detail = if let Some(c) = &r.certificate {
        format!("certificate {} (verified: {})", c.lemma_tag, c.verified)
    } else if let Some(d) = &r.interpolation {
        let s = match d.status {
            DemoStatus::Pass => "PASS",
            DemoStatus::Fail => "FAIL",
            DemoStatus::Skipped => "skipped",
        };
        format!("interpolation {s}: {}", d.detail)
    } else {
        String::new()
    };
    let mark = if r.consistent { "" } else { "  INCONSISTENT" };
    format!(
        "{} {} {:<14} {detail}{mark}",
        r.rho_id,
        r.sigma_id,
        r.verdict.name()
    )
}
