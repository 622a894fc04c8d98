//! The potential matrix and exact permanents.
//!
//! Rows are unstarred crossings, columns unstarred regions; an entry sums
//! the corner weights the region contributes at that crossing. The state
//! sum equals the permanent by multilinearity, which gives both a faster
//! evaluator and a cross-check.

use crate::par::{map_reduce, Parallelism};
use crate::poly::{LaurentPoly, Subst, Var};
use crate::stars::StarredDiagram;
use crate::statesum::{self, potential_table, region_candidates, CornerTable};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<LaurentPoly>>,
}

pub(crate) fn matrix_with(sd: &StarredDiagram, table: &CornerTable) -> PotentialMatrix {
    let crossings = sd.unstarred_crossings();
    let rows: Vec<String> = crossings
        .iter()
        .map(|&v| sd.map().vertex_name(v).to_string())
        .collect();
    let regions = sd.unstarred_regions();
    let cols: Vec<String> = regions.iter().map(|&r| sd.region_name(r)).collect();
    let candidates = region_candidates(sd);
    let mut entries =
        vec![vec![LaurentPoly::zero(); regions.len()]; crossings.len()];
    for (j, cands) in candidates.iter().enumerate() {
        for &(v, s) in cands {
            let i = crossings.iter().position(|&c| c == v).unwrap();
            let sign = sd.map().sign(v).unwrap();
            entries[i][j] += &table.label_poly(sign, s);
        }
    }
    PotentialMatrix { rows, cols, entries }
}

/// The two-variable potential matrix of a starred diagram.
pub fn potential_matrix(sd: &StarredDiagram) -> PotentialMatrix {
    matrix_with(sd, &potential_table())
}

/// How many corners each unstarred region has at each unstarred crossing
/// (the multiplicity pattern behind the matrix entries).
pub fn corner_counts(sd: &StarredDiagram) -> Vec<Vec<usize>> {
    let crossings = sd.unstarred_crossings();
    let candidates = region_candidates(sd);
    let mut counts = vec![vec![0usize; candidates.len()]; crossings.len()];
    for (j, cands) in candidates.iter().enumerate() {
        for &(v, _) in cands {
            let i = crossings.iter().position(|&c| c == v).unwrap();
            counts[i][j] += 1;
        }
    }
    counts
}

impl PotentialMatrix {
    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    /// Applies a variable substitution to every entry.
    pub fn substitute(&self, rules: &[(Var, Subst)]) -> PotentialMatrix {
        PotentialMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.substitute(rules)).collect())
                .collect(),
        }
    }

    /// Same matrix with rows and columns listed in the given order.
    pub fn reordered(&self, rows: &[&str], cols: &[&str]) -> Result<PotentialMatrix> {
        let row_idx: Vec<usize> = rows
            .iter()
            .map(|name| {
                self.rows
                    .iter()
                    .position(|r| r == name)
                    .ok_or_else(|| Error::Other(format!("no matrix row {name:?}")))
            })
            .collect::<Result<_>>()?;
        let col_idx: Vec<usize> = cols
            .iter()
            .map(|name| {
                self.cols
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::Other(format!("no matrix column {name:?}")))
            })
            .collect::<Result<_>>()?;
        if row_idx.len() != self.rows.len() || col_idx.len() != self.cols.len() {
            return Err(Error::Other("reorder must mention every row and column".into()));
        }
        Ok(PotentialMatrix {
            rows: rows.iter().map(|s| s.to_string()).collect(),
            cols: cols.iter().map(|s| s.to_string()).collect(),
            entries: row_idx
                .iter()
                .map(|&i| col_idx.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        })
    }

    /// Aligned text rendering with row and column labels.
    pub fn pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.to_string()).collect())
            .collect();
        let row_w = self.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        let col_w: Vec<usize> = self
            .cols
            .iter()
            .enumerate()
            .map(|(j, name)| {
                cells.iter().map(|row| row[j].len()).chain([name.len()]).max().unwrap()
            })
            .collect();
        let mut out = String::new();
        out.push_str(&" ".repeat(row_w));
        for (j, name) in self.cols.iter().enumerate() {
            out.push_str("  ");
            out.push_str(&format!("{name:<width$}", width = col_w[j]));
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        for (i, rname) in self.rows.iter().enumerate() {
            out.push_str(&format!("{rname:<row_w$}"));
            for (j, cell) in cells[i].iter().enumerate() {
                out.push_str("  ");
                out.push_str(&format!("{cell:<width$}", width = col_w[j]));
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries.iter().map(|row| {
                row.iter().map(|e| serde_json::to_value(e).unwrap()).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }

    pub fn permanent(&self, par: Parallelism) -> LaurentPoly {
        assert!(self.is_square(), "permanent of a non-square matrix");
        permanent_sparse(&self.entries, par)
    }
}

/// Ryser's formula with Gray-code updates: for an n×n matrix,
/// perm(A) = (−1)^n Σ_{S ⊆ cols} (−1)^{|S|} Π_i Σ_{j∈S} a_ij.
/// In parallel mode the subset space is split into contiguous chunks, each
/// walked independently.
pub fn permanent_ryser(a: &[Vec<LaurentPoly>], par: Parallelism) -> LaurentPoly {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "permanent of a non-square matrix");
    if n == 0 {
        return LaurentPoly::one();
    }
    assert!(n < 63, "matrix too large for a dense permanent");
    let total: u64 = 1 << n;
    let chunks: u64 = if par.is_parallel() && n >= 6 { 32 } else { 1 };
    let step = total / chunks;
    let walk = |range: std::ops::Range<u64>| -> LaurentPoly {
        let gray = |k: u64| k ^ (k >> 1);
        let mut sums: Vec<LaurentPoly> = (0..n).map(|_| LaurentPoly::zero()).collect();
        let mut start_set = gray(range.start);
        for j in 0..n {
            if start_set >> j & 1 == 1 {
                for (i, row) in a.iter().enumerate() {
                    sums[i] += &row[j];
                }
            }
        }
        let mut acc = LaurentPoly::zero();
        for k in range.start..range.end {
            if k != range.start {
                let j = (k & k.wrapping_neg()).trailing_zeros() as usize;
                let added = gray(k) >> j & 1 == 1;
                for (i, row) in a.iter().enumerate() {
                    if added {
                        sums[i] += &row[j];
                    } else {
                        sums[i] -= &row[j];
                    }
                }
                start_set = gray(k);
            }
            if start_set == 0 {
                continue;
            }
            let mut term = sums[0].clone();
            for s in &sums[1..] {
                term = &term * s;
                if term.is_zero() {
                    break;
                }
            }
            if (n as u32 - start_set.count_ones()) % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    };
    let ranges: Vec<std::ops::Range<u64>> =
        (0..chunks).map(|c| c * step..if c + 1 == chunks { total } else { (c + 1) * step }).collect();
    map_reduce(par, ranges, walk, LaurentPoly::zero, |mut x, y| {
        x += &y;
        x
    })
}

/// Expansion over nonzero entries with a Hall-style pruning bound. The
/// preferred engine: diagram matrices are sparse (few regions touch each
/// crossing).
pub fn permanent_sparse(a: &[Vec<LaurentPoly>], par: Parallelism) -> LaurentPoly {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "permanent of a non-square matrix");
    if n == 0 {
        return LaurentPoly::one();
    }
    assert!(n < 63, "matrix too large");
    let masks: Vec<u64> = a
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    fn feasible(masks: &[u64], row: usize, used: u64) -> bool {
        let mut union = 0u64;
        for (i, m) in masks.iter().enumerate().skip(row) {
            union |= m & !used;
            if (union.count_ones() as usize) < i - row + 1 {
                return false;
            }
        }
        true
    }
    fn expand(
        a: &[Vec<LaurentPoly>],
        masks: &[u64],
        row: usize,
        used: u64,
        prefix: &LaurentPoly,
    ) -> LaurentPoly {
        if row == a.len() {
            return prefix.clone();
        }
        if !feasible(masks, row, used) {
            return LaurentPoly::zero();
        }
        let mut acc = LaurentPoly::zero();
        let mut avail = masks[row] & !used;
        while avail != 0 {
            let j = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            let next = prefix * &a[row][j];
            acc += &expand(a, masks, row + 1, used | 1 << j, &next);
        }
        acc
    }
    if par.is_parallel() && n >= 4 {
        let branches: Vec<usize> = (0..n).filter(|&j| masks[0] >> j & 1 == 1).collect();
        return map_reduce(
            par,
            branches,
            |j| expand(a, &masks, 1, 1 << j, &a[0][j]),
            LaurentPoly::zero,
            |mut x, y| {
                x += &y;
                x
            },
        );
    }
    expand(a, &masks, 0, 0, &LaurentPoly::one())
}

/// Recomputes the potential three ways (state sum, sparse permanent, dense
/// permanent) and fails loudly if they ever disagree.
pub fn crosscheck(sd: &StarredDiagram, par: Parallelism) -> Result<LaurentPoly> {
    let direct = statesum::potential(sd);
    let m = potential_matrix(sd);
    if !m.is_square() {
        return Err(Error::Other(format!(
            "potential matrix is {}x{}, cannot take a permanent",
            m.rows.len(),
            m.cols.len()
        )));
    }
    let sparse = permanent_sparse(&m.entries, par);
    let dense = permanent_ryser(&m.entries, par);
    if direct != sparse || sparse != dense {
        return Err(Error::Other(format!(
            "engines disagree: state sum {direct}, sparse {sparse}, dense {dense}"
        )));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{DiagramMap, Parts, StarsSpec};
    use crate::poly::Var;

    fn poly(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

    fn simple_knotoid() -> DiagramMap {
        DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"a","over_in_slot":3},{"id":"b","over_in_slot":3}],
            "endpoints":[{"id":"t","kind":"tail"},{"id":"h","kind":"head"}],
            "edges":[{"from":["t",0],"to":["a",0]},{"from":["a",2],"to":["b",3]},
                     {"from":["b",1],"to":["a",3]},{"from":["a",1],"to":["b",0]},
                     {"from":["b",2],"to":["h",0]}]}"#,
        )
        .unwrap()
        .map
    }

    fn trefoil() -> DiagramMap {
        let mut parts = Parts::default();
        for i in 1..=3 {
            parts.crossings.push((format!("t{i}"), 3));
        }
        for i in 1..=3u32 {
            let j = i % 3 + 1;
            parts.edges.push(((format!("t{i}"), 2), (format!("t{j}"), 3)));
            parts.edges.push(((format!("t{i}"), 1), (format!("t{j}"), 0)));
        }
        DiagramMap::build(parts).unwrap()
    }

    #[test]
    fn simple_knotoid_matrix() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let m = potential_matrix(&sd);
        assert_eq!(m.rows, vec!["a", "b"]);
        assert_eq!(m.cols, vec!["f1", "f2"]);
        assert_eq!(m.entries[0], vec![poly("W"), poly("1")]);
        assert_eq!(m.entries[1], vec![poly("-B"), poly("W + 1")]);
        // the one-variable specialization shown in reports
        let mock = m.substitute(&[(Var::B, crate::poly::Subst::inv(Var::W))]);
        assert_eq!(mock.entries[1][0], poly("-W^-1"));
        assert_eq!(
            m.permanent(Parallelism::Sequential),
            statesum::potential(&sd)
        );
    }

    #[test]
    fn engines_agree_on_fixtures() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        crosscheck(&sd, Parallelism::Sequential).unwrap();
        let spec = StarsSpec::Regions(vec!["f0".into(), "f1".into()]);
        let sd = StarredDiagram::make_starred(trefoil(), Some(&spec)).unwrap();
        crosscheck(&sd, Parallelism::Rayon).unwrap();
    }

    #[test]
    fn permanents_match_on_a_dense_matrix() {
        // 4x4 with polynomial entries and a zero
        let e = |s: &str| poly(s);
        let a = vec![
            vec![e("W"), e("1"), e("-B"), e("W + 1")],
            vec![e("0"), e("W - B"), e("1"), e("B")],
            vec![e("2"), e("-W"), e("B^2"), e("1")],
            vec![e("1"), e("0"), e("W"), e("-1")],
        ];
        let r = permanent_ryser(&a, Parallelism::Sequential);
        let s = permanent_sparse(&a, Parallelism::Sequential);
        let rp = permanent_ryser(&a, Parallelism::Rayon);
        let sp = permanent_sparse(&a, Parallelism::Rayon);
        assert_eq!(r, s);
        assert_eq!(r, rp);
        assert_eq!(r, sp);
        assert!(!r.is_zero());
    }

    #[test]
    fn zero_row_kills_the_permanent() {
        let a = vec![
            vec![poly("0"), poly("0")],
            vec![poly("W"), poly("1")],
        ];
        assert_eq!(permanent_sparse(&a, Parallelism::Sequential), LaurentPoly::zero());
        assert_eq!(permanent_ryser(&a, Parallelism::Sequential), LaurentPoly::zero());
    }

    #[test]
    fn empty_matrix_has_permanent_one() {
        let a: Vec<Vec<LaurentPoly>> = vec![];
        assert_eq!(permanent_ryser(&a, Parallelism::Sequential), LaurentPoly::one());
        assert_eq!(permanent_sparse(&a, Parallelism::Sequential), LaurentPoly::one());
    }

    #[test]
    fn trident_trefoil_matrix_matches_the_printed_form() {
        let merged = trefoil()
            .merge_regions(&[vec!["f0".into(), "f3".into(), "f4".into()]])
            .unwrap();
        assert!(merged.census().admissible);
        let sd = StarredDiagram::make_starred(merged, None).unwrap();
        let mock = potential_matrix(&sd)
            .substitute(&[(Var::B, crate::poly::Subst::inv(Var::W))]);
        // columns in the order ring, lens, merged-triple
        let m = mock.reordered(&["t1", "t2", "t3"], &["f1", "f2", "f0"]).unwrap();
        let golden = concat!(
            "    f1  f2     f0\n",
            "t1  1   W      1 - W^-1\n",
            "t2  1   -W^-1  W + 1\n",
            "t3  1   0      W + 1 - W^-1\n",
        );
        assert_eq!(m.pretty(), golden);
        assert_eq!(
            m.permanent(Parallelism::Sequential),
            poly("2*W^2 + 2*W - 2 - 2*W^-1 + 2*W^-2")
        );
    }

    #[test]
    fn corner_multiplicities() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        assert_eq!(corner_counts(&sd), vec![vec![1, 1], vec![1, 2]]);
    }
}
