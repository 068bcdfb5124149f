use std::fs;
use std::path::Path;

use clonecert::relcore::{read_relation_with_warnings, Domain, Elem, Operation, Relation};
use clonecert::Error;

use crate::Failure;

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

/// Text format, or JSON when the first non-blank character is `{`.
pub fn load_relation(path: &Path) -> Result<Relation, Failure> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(&text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())));
    }
    let parsed = read_relation_with_warnings(&text)
        .map_err(|e| Failure::from(e).context(&path.display().to_string()))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.relation)
}

/// A file holding one operation, an inline `k=.. arity=.. table=..` line, or a bare table
/// such as `0,2,0` whose arity follows from its length.
pub fn load_operation(spec: &str, domain: Domain) -> Result<Operation, Failure> {
    let path = Path::new(spec);
    let text = if path.is_file() {
        read_text(path)?
    } else {
        spec.to_string()
    };
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Failure::usage(format!("{spec}: {e}")));
    }
    if text.starts_with("k=") {
        return Operation::parse_text(text).map_err(Failure::from);
    }
    let table = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|v| match v.parse::<usize>() {
            Ok(x) if x < domain.k() => Ok(x as Elem),
            _ => Err(Failure::usage(format!(
                "bad table entry `{v}` for k={}",
                domain.k()
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let k = domain.k();
    let arity = (0..=8)
        .find(|&n| k.checked_pow(n as u32) == Some(table.len()))
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Failure::usage(format!(
                "table length {} is not a power of {k}",
                table.len()
            ))
        })?;
    Operation::new(domain, arity, table).map_err(Failure::from)
}

/// One operation per non-comment line, or a JSON array of operations.
pub fn load_operations(path: &Path) -> Result<Vec<Operation>, Failure> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
        .map(|(i, l)| {
            Operation::parse_text(l).map_err(|e| match e {
                Error::Parse { msg, .. } => {
                    Failure::usage(format!("{}: line {}: {msg}", path.display(), i + 1))
                }
                other => Failure::from(other),
            })
        })
        .collect()
}
