use crate::relcore::{Elem, Operation, Relation};

/// Column enumeration is used while `|rel|^n` stays below this.
const COLUMN_LIMIT: f64 = 16384.0;

/// Whether `f` maps every `h × n` matrix with member columns to a member row-image.
///
/// Panics if `f` and `rel` live on different domains.
pub fn preserves(f: &Operation, rel: &Relation) -> bool {
    find_violation(f, rel).is_none()
}

/// A witness of non-preservation: `n` member columns whose row-wise image is not a member.
pub fn find_violation(f: &Operation, rel: &Relation) -> Option<Vec<Vec<Elem>>> {
    assert_eq!(
        f.domain(),
        rel.domain(),
        "operation and relation on different domains"
    );
    if rel.is_full() || rel.is_empty() {
        return None;
    }
    let combos = (rel.len() as f64).powi(f.arity() as i32);
    let rows = if combos <= COLUMN_LIMIT {
        by_columns(f, rel)
    } else {
        by_rows(f, rel)
    }?;
    Some(columns_from_rows(f, rel, &rows))
}

fn columns_from_rows(f: &Operation, rel: &Relation, rows: &[usize]) -> Vec<Vec<Elem>> {
    let d = f.domain();
    let decoded: Vec<Vec<Elem>> = rows.iter().map(|&r| d.decode(r, f.arity())).collect();
    (0..f.arity())
        .map(|i| (0..rel.arity()).map(|j| decoded[j][i]).collect())
        .collect()
}

/// Odometer over `n`-tuples of members; `acc[l]` holds the partial row ranks after `l` columns.
fn by_columns(f: &Operation, rel: &Relation) -> Option<Vec<usize>> {
    let k = f.k();
    let n = f.arity();
    let h = rel.arity();
    let m = rel.len();
    let flat = rel.flat_members();
    let table = f.table();
    let mut idx = vec![0usize; n];
    let mut acc = vec![0usize; (n + 1) * h];
    let mut level = 0;
    loop {
        while level < n {
            let t = &flat[idx[level] * h..(idx[level] + 1) * h];
            let (lo, hi) = acc.split_at_mut((level + 1) * h);
            let prev = &lo[level * h..];
            for j in 0..h {
                hi[j] = prev[j] * k + t[j] as usize;
            }
            level += 1;
        }
        let rows = &acc[n * h..];
        let img = rows.iter().fold(0usize, |a, &r| a * k + table[r] as usize);
        if !rel.contains_rank(img) {
            return Some(rows.to_vec());
        }
        loop {
            if level == 0 {
                return None;
            }
            level -= 1;
            idx[level] += 1;
            if idx[level] < m {
                break;
            }
            idx[level] = 0;
        }
    }
}

/// Depth-first over rows `r_1..r_h` of `E_k^n`, keeping every column a member prefix and the
/// image extendable to a non-member.
fn by_rows(f: &Operation, rel: &Relation) -> Option<Vec<usize>> {
    let k = f.k();
    let n = f.arity();
    let h = rel.arity();
    let cells = f.table().len();
    let pre = rel.prefixes();
    let table = f.table();
    let mut digits = vec![0usize; cells * n];
    for r in 0..cells {
        let mut x = r;
        for i in (0..n).rev() {
            digits[r * n + i] = x % k;
            x /= k;
        }
    }
    // cols[j*n + i]: rank of the first j entries of column i.
    let mut cols = vec![0usize; (h + 1) * n];
    let mut img = vec![0usize; h + 1];
    let mut rows = vec![0usize; h];
    let mut j = 0;
    let mut next = 0usize;
    loop {
        let mut placed = false;
        while next < cells {
            let r = next;
            next += 1;
            let ni = img[j] * k + table[r] as usize;
            if pre.all[j + 1].get(ni) {
                continue;
            }
            let d = &digits[r * n..(r + 1) * n];
            let ok = (0..n).all(|i| pre.some[j + 1].get(cols[j * n + i] * k + d[i]));
            if !ok {
                continue;
            }
            for i in 0..n {
                cols[(j + 1) * n + i] = cols[j * n + i] * k + d[i];
            }
            img[j + 1] = ni;
            rows[j] = r;
            placed = true;
            break;
        }
        if placed {
            j += 1;
            if j == h {
                return Some(rows);
            }
            next = 0;
        } else {
            if j == 0 {
                return None;
            }
            j -= 1;
            next = rows[j] + 1;
        }
    }
}

pub fn in_pol<'a, I>(f: &Operation, rels: I) -> bool
where
    I: IntoIterator<Item = &'a Relation>,
{
    rels.into_iter().all(|r| preserves(f, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::{diagonal, Domain, ElemSet};

    fn star3() -> Relation {
        let d = Domain::new(3).unwrap();
        Relation::from_predicate(d, 2, |t| t[0] == t[1] || t[0] == 0 || t[1] == 0).unwrap()
    }

    fn both(f: &Operation, r: &Relation) -> (bool, bool) {
        (by_columns(f, r).is_none(), by_rows(f, r).is_none())
    }

    #[test]
    fn examples() {
        let d = Domain::new(3).unwrap();
        let s = star3();
        let p1 = Operation::projection(d, 2, 1).unwrap();
        assert_eq!(both(&p1, &s), (true, true));
        let c0 = Operation::constant(d, 0, 1).unwrap();
        assert_eq!(both(&c0, &s), (true, true));
        let swap = Operation::new(d, 1, vec![1, 0, 2]).unwrap();
        assert_eq!(both(&swap, &s), (false, false));
        let w = find_violation(&swap, &s).unwrap();
        assert!(s.contains(&w[0]));
        assert!(!s.contains(&[swap.eval(&[w[0][0]]), swap.eval(&[w[0][1]])]));
    }

    #[test]
    fn in_pol_examples() {
        let d = Domain::new(3).unwrap();
        let u0 = Relation::unary(d, ElemSet::from_elems([0])).unwrap();
        let s = star3();
        assert!(in_pol(&Operation::constant(d, 0, 1).unwrap(), [&s, &u0]));
        assert!(!in_pol(&Operation::constant(d, 1, 1).unwrap(), [&s, &u0]));
        assert!(in_pol(&Operation::constant(d, 1, 1).unwrap(), []));
    }

    #[test]
    fn strategies_agree_on_all_unary_and_binary_e3() {
        let d = Domain::new(3).unwrap();
        let rels = [star3(), diagonal(d, 2).unwrap(), diagonal(d, 3).unwrap()];
        for n in 1..=2 {
            let cells = 3usize.pow(n as u32);
            let total = 3usize.pow(cells as u32);
            for code in (0..total).step_by(7) {
                let mut x = code;
                let mut table = vec![0; cells];
                for v in table.iter_mut().rev() {
                    *v = (x % 3) as Elem;
                    x /= 3;
                }
                let f = Operation::new(d, n, table).unwrap();
                for r in &rels {
                    let (a, b) = both(&f, r);
                    assert_eq!(a, b, "{f:?} {r:?}");
                }
            }
        }
    }
}
