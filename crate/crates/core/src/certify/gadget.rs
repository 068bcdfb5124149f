//! Operations that send `N` chosen columns to a prescribed row and everything else to a
//! central element.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycheck::preserves;
use crate::relcore::{Elem, Operation, Relation};

pub const MAX_GADGET_N: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetSpec {
    /// `(b_1, .., b_h) ∉ ρ`.
    pub forbidden_tuple: Vec<Elem>,
    pub target_arity: usize,
    /// `(v_1, .., v_N)`, usually chosen outside the relation to be violated.
    pub value_row: Vec<Elem>,
    /// Must be central in `ρ`.
    pub default: Elem,
}

impl GadgetSpec {
    /// Strictly increasing `h`-subsets of `0..N` in lexicographic order.
    pub fn index_family(&self) -> Vec<Vec<usize>> {
        (0..self.target_arity)
            .combinations(self.forbidden_tuple.len())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub op: Operation,
    /// `x_1, .., x_N`, each of length `q`.
    pub columns: Vec<Vec<Elem>>,
    /// `y_1, .., y_q`, each of length `N`; `op` maps them coordinatewise to the value row.
    pub rows: Vec<Vec<Elem>>,
}

impl Gadget {
    /// True when every row lies in `delta` and the value row does not, so `op` violates `delta`.
    pub fn violates_on_rows(&self, delta: &Relation, value_row: &[Elem]) -> bool {
        delta.arity() == value_row.len()
            && self.rows.iter().all(|y| delta.contains(y))
            && !delta.contains(value_row)
    }
}

pub fn build_gadget(rho: &Relation, spec: &GadgetSpec) -> Result<Gadget> {
    let d = rho.domain();
    let h = rho.arity();
    let n = spec.target_arity;
    let b = &spec.forbidden_tuple;
    if b.len() != h {
        return Err(Error::ArityMismatch {
            expected: h,
            got: b.len(),
        });
    }
    for &x in b.iter().chain(&spec.value_row).chain([&spec.default]) {
        d.check_elem(x as usize)?;
    }
    if rho.contains(b) {
        return Err(Error::arg(format!("forbidden tuple {b:?} lies in rho")));
    }
    if !rho.center().contains(spec.default) {
        return Err(Error::arg(format!(
            "default {} is not central in rho",
            spec.default
        )));
    }
    if n < h || n > MAX_GADGET_N {
        return Err(Error::arg(format!(
            "target arity must satisfy h <= N <= {MAX_GADGET_N}"
        )));
    }
    if spec.value_row.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: spec.value_row.len(),
        });
    }
    let family = spec.index_family();
    let q = family.len();
    let cells = d.cells(q)?;

    let mut columns = vec![vec![spec.default; q]; n];
    for (j, w) in family.iter().enumerate() {
        for (l, &i) in w.iter().enumerate() {
            columns[i][j] = b[l];
        }
    }
    if !columns.iter().all_unique() {
        return Err(Error::arg("gadget columns are not pairwise distinct"));
    }
    let mut buf = Vec::with_capacity(h);
    for sel in (0..n).combinations(h) {
        let fails = (0..q).any(|j| {
            buf.clear();
            buf.extend(sel.iter().map(|&i| columns[i][j]));
            !rho.contains(&buf)
        });
        if !fails {
            return Err(Error::arg(format!(
                "columns {sel:?} do not jointly fail rho"
            )));
        }
    }

    let mut table = vec![spec.default; cells];
    for (x, &v) in columns.iter().zip(&spec.value_row) {
        table[d.rank(x)] = v;
    }
    let op = Operation::new(d, q, table)?;
    if !preserves(&op, rho) {
        return Err(Error::Precondition("gadget does not preserve rho".into()));
    }
    let rows = (0..q)
        .map(|j| columns.iter().map(|x| x[j]).collect())
        .collect();
    Ok(Gadget { op, columns, rows })
}
