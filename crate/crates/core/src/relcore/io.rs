use super::domain::{Domain, Elem};
use super::relation::Relation;
use crate::error::{Error, Result};

/// A parsed relation plus non-fatal diagnostics such as duplicate tuples.
#[derive(Clone, Debug)]
pub struct ParsedRelation {
    pub relation: Relation,
    pub warnings: Vec<String>,
}

/// Parses the line format: `#` comments, `k=<int>`, `arity=<int>`, then one tuple per line.
pub fn read_relation(text: &str) -> Result<Relation> {
    read_relation_with_warnings(text).map(|p| p.relation)
}

pub fn read_relation_with_warnings(text: &str) -> Result<ParsedRelation> {
    let mut k: Option<usize> = None;
    let mut arity: Option<usize> = None;
    let mut tuples: Vec<(usize, Vec<Elem>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(v) = line.strip_prefix("k=") {
            if k.is_some() {
                return Err(perr("duplicate `k=` header".into()));
            }
            let v: usize = v.trim().parse().map_err(|_| perr(format!("bad k `{v}`")))?;
            Domain::new(v).map_err(|e| perr(e.to_string()))?;
            k = Some(v);
            continue;
        }
        if let Some(v) = line.strip_prefix("arity=") {
            if k.is_none() {
                return Err(perr("`arity=` must follow `k=`".into()));
            }
            if arity.is_some() {
                return Err(perr("duplicate `arity=` header".into()));
            }
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| perr(format!("bad arity `{v}`")))?;
            if v == 0 {
                return Err(perr("arity must be at least 1".into()));
            }
            arity = Some(v);
            continue;
        }
        let (Some(k), Some(h)) = (k, arity) else {
            return Err(perr("tuple before `k=` and `arity=` headers".into()));
        };
        let mut t = Vec::with_capacity(h);
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| perr(format!("bad entry `{tok}`")))?;
            if v >= k {
                return Err(perr(format!("entry out of range: {v} >= k={k}")));
            }
            t.push(v as Elem);
        }
        if t.len() != h {
            return Err(perr(format!("tuple has {} entries, expected {h}", t.len())));
        }
        tuples.push((line_no, t));
    }
    let k = k.ok_or(Error::Parse {
        line: 0,
        msg: "missing `k=` header".into(),
    })?;
    let h = arity.ok_or(Error::Parse {
        line: 0,
        msg: "missing `arity=` header".into(),
    })?;
    let domain = Domain::new(k)?;
    let mut seen = std::collections::HashMap::new();
    let mut warnings = Vec::new();
    for (line, t) in &tuples {
        if let Some(first) = seen.insert(t.clone(), *line) {
            warnings.push(format!(
                "line {line}: duplicate tuple {t:?} (first on line {first})"
            ));
        }
    }
    let relation = Relation::from_tuples(domain, h, tuples.into_iter().map(|(_, t)| t))?;
    Ok(ParsedRelation { relation, warnings })
}

/// Canonical text: headers then members in ascending rank order, no trailing newline.
pub fn write_relation(rel: &Relation) -> String {
    let mut out = format!("k={}\narity={}", rel.k(), rel.arity());
    for t in rel.tuples() {
        out.push('\n');
        let parts: Vec<String> = t.iter().map(|a| a.to_string()).collect();
        out.push_str(&parts.join(" "));
    }
    out
}
