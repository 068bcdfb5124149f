use std::fmt;

use serde::{Deserialize, Serialize};

use super::domain::{Domain, Elem};
use crate::error::{Error, Result};

/// An `n`-ary operation on `E_k`, stored as its value table in rank order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    domain: Domain,
    arity: usize,
    table: Vec<Elem>,
}

impl Operation {
    pub fn new(domain: Domain, arity: usize, table: Vec<Elem>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::arg("operation arity must be at least 1"));
        }
        let cells = domain.cells(arity)?;
        if table.len() != cells {
            return Err(Error::arg(format!(
                "table length {} != k^n = {cells}",
                table.len()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v as usize >= domain.k()) {
            return Err(Error::arg(format!(
                "table value {v} out of range for k={}",
                domain.k()
            )));
        }
        Ok(Operation {
            domain,
            arity,
            table,
        })
    }

    /// The `i`-th `n`-ary projection, `1 ≤ i ≤ n`.
    pub fn projection(domain: Domain, n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::arg(format!("projection index {i} not in 1..={n}")));
        }
        let cells = domain.cells(n)?;
        let stride = domain.k().pow((n - i) as u32);
        let table = (0..cells)
            .map(|r| (r / stride % domain.k()) as Elem)
            .collect();
        Operation::new(domain, n, table)
    }

    pub fn constant(domain: Domain, a: Elem, n: usize) -> Result<Self> {
        domain.check_elem(a as usize)?;
        Operation::new(domain, n, vec![a; domain.cells(n)?])
    }

    #[inline]
    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.domain.k()
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn at_rank(&self, r: usize) -> Elem {
        self.table[r]
    }

    pub fn apply(&self, args: &[Elem]) -> Result<Elem> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        if let Some(&a) = args.iter().find(|&&a| a as usize >= self.k()) {
            return Err(Error::arg(format!(
                "argument {a} out of range for k={}",
                self.k()
            )));
        }
        Ok(self.table[self.domain.rank(args)])
    }

    /// Table lookup without bounds checks on the argument values.
    #[inline]
    pub fn eval(&self, args: &[Elem]) -> Elem {
        self.table[self.domain.rank(args)]
    }

    pub fn is_constant(&self) -> bool {
        self.table.windows(2).all(|w| w[0] == w[1])
    }

    /// `k=<K> arity=<N> table=<v0 v1 ..>`.
    pub fn to_text(&self) -> String {
        let vals: Vec<String> = self.table.iter().map(|v| v.to_string()).collect();
        format!(
            "k={} arity={} table={}",
            self.k(),
            self.arity,
            vals.join(" ")
        )
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let line = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "empty operation text".into(),
            })?;
        let perr = |msg: String| Error::Parse { line: 1, msg };
        let rest = line
            .strip_prefix("k=")
            .ok_or_else(|| perr("expected `k=`".into()))?;
        let (k, rest) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| perr("expected `arity=`".into()))?;
        let rest = rest
            .trim_start()
            .strip_prefix("arity=")
            .ok_or_else(|| perr("expected `arity=`".into()))?;
        let (n, rest) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| perr("expected `table=`".into()))?;
        let rest = rest
            .trim_start()
            .strip_prefix("table=")
            .ok_or_else(|| perr("expected `table=`".into()))?;
        let k: usize = k.parse().map_err(|_| perr(format!("bad k `{k}`")))?;
        let n: usize = n.parse().map_err(|_| perr(format!("bad arity `{n}`")))?;
        let domain = Domain::new(k)?;
        let table = rest
            .split_whitespace()
            .map(|v| match v.parse::<usize>() {
                Ok(x) if x < k => Ok(x as Elem),
                Ok(_) => Err(perr(format!("entry out of range: {v}"))),
                Err(_) => Err(perr(format!("bad table entry `{v}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Operation::new(domain, n, table)
    }

    pub fn to_json(&self) -> OperationJson {
        OperationJson {
            k: self.k(),
            arity: self.arity,
            table: self.table.clone(),
        }
    }
}

impl fmt::Debug for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Operation(k={}, n={}, {:?})",
            self.k(),
            self.arity,
            self.table
        )
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// JSON form `{"k":K,"arity":N,"table":[..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationJson {
    pub k: usize,
    pub arity: usize,
    pub table: Vec<Elem>,
}

impl TryFrom<OperationJson> for Operation {
    type Error = Error;
    fn try_from(j: OperationJson) -> Result<Self> {
        Operation::new(Domain::new(j.k)?, j.arity, j.table)
    }
}

impl Serialize for Operation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OperationJson::deserialize(d)?;
        Operation::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_and_constant() {
        let d = Domain::new(3).unwrap();
        let p = Operation::projection(d, 3, 2).unwrap();
        assert_eq!(p.apply(&[0, 1, 2]).unwrap(), 1);
        assert_eq!(Operation::constant(d, 0, 1).unwrap().table(), &[0, 0, 0]);
        let f = Operation::new(d, 1, vec![0, 0, 2]).unwrap();
        assert_eq!(f.apply(&[1]).unwrap(), 0);
        assert!(p.apply(&[0, 1]).is_err());
        assert!(Operation::projection(d, 2, 3).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = Domain::new(3).unwrap();
        let f = Operation::new(d, 2, vec![0, 1, 2, 2, 1, 0, 0, 0, 1]).unwrap();
        let s = f.to_text();
        assert_eq!(s, "k=3 arity=2 table=0 1 2 2 1 0 0 0 1");
        assert_eq!(Operation::parse_text(&s).unwrap(), f);
        assert!(Operation::parse_text("k=3 arity=1 table=0 1").is_err());
        assert!(Operation::parse_text("k=3 arity=1 table=0 1 3").is_err());
    }
}
