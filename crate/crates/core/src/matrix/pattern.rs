use serde::Serialize;

use super::SignMatrix;
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternMode {
    /// Increasing row and column subsets, entrywise equal.
    Ordered,
    /// Equal after some row and column permutation of the selected submatrix.
    #[default]
    UpToPermutation,
}

/// Rows and columns of the host matrix such that
/// `host[rows[i], cols[j]] == pattern[i, j]` for all `i, j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Exhaustive submatrix containment test. Row/column negations are not applied.
pub fn contains_pattern(
    m: &SignMatrix,
    p: &SignMatrix,
    mode: PatternMode,
) -> Result<Option<PatternWitness>> {
    if p.rows() > m.rows() || p.cols() > m.cols() {
        return Err(Error::arg(format!(
            "pattern {}x{} is larger than matrix {}x{}",
            p.rows(),
            p.cols(),
            m.rows(),
            m.cols()
        )));
    }
    // permutations are enumerated along the shorter side of the pattern
    if mode == PatternMode::UpToPermutation && p.rows() < p.cols() {
        return Ok(contains_pattern(&m.transpose(), &p.transpose(), mode)?
            .map(|w| PatternWitness {
                rows: w.cols,
                cols: w.rows,
            }));
    }
    let row_sets = combinations(m.rows(), p.rows());
    let col_sets = combinations(m.cols(), p.cols());
    let col_perms = match mode {
        PatternMode::Ordered => vec![(0..p.cols()).collect()],
        PatternMode::UpToPermutation => permutations(p.cols()),
    };
    let pattern_rows: Vec<&[i8]> = (0..p.rows()).map(|i| p.row(i)).collect();
    let mut sorted_pattern = pattern_rows.clone();
    sorted_pattern.sort();

    Ok(par::find_map_first(0..row_sets.len(), |ri| {
        let rows = &row_sets[ri];
        let mut buf: Vec<Vec<i8>> = vec![Vec::with_capacity(p.cols()); p.rows()];
        for cols in &col_sets {
            for perm in &col_perms {
                for (b, &r) in buf.iter_mut().zip(rows) {
                    b.clear();
                    b.extend(perm.iter().map(|&k| m.get(r, cols[k])));
                }
                let chosen_cols: Vec<usize> = perm.iter().map(|&k| cols[k]).collect();
                match mode {
                    PatternMode::Ordered => {
                        if buf.iter().zip(&pattern_rows).all(|(a, b)| a == b) {
                            return Some(PatternWitness {
                                rows: rows.clone(),
                                cols: chosen_cols,
                            });
                        }
                    }
                    PatternMode::UpToPermutation => {
                        let mut sorted: Vec<&[i8]> = buf.iter().map(Vec::as_slice).collect();
                        sorted.sort();
                        if sorted == sorted_pattern {
                            return Some(PatternWitness {
                                rows: match_rows(&buf, rows, &pattern_rows),
                                cols: chosen_cols,
                            });
                        }
                    }
                }
            }
        }
        None
    }))
}

/// Assigns each pattern row a distinct host row with identical content.
fn match_rows(buf: &[Vec<i8>], rows: &[usize], pattern: &[&[i8]]) -> Vec<usize> {
    let mut used = vec![false; buf.len()];
    pattern
        .iter()
        .map(|prow| {
            let k = (0..buf.len())
                .find(|&k| !used[k] && buf[k].as_slice() == *prow)
                .expect("row multisets are equal");
            used[k] = true;
            rows[k]
        })
        .collect()
}

/// All increasing `k`-subsets of `0..n`, lexicographic.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_witness(m: &SignMatrix, p: &SignMatrix, w: &PatternWitness) {
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                assert_eq!(m.get(w.rows[i], w.cols[j]), p.get(i, j));
            }
        }
    }

    #[test]
    fn identity_selection() {
        let s4 = SignMatrix::s4();
        let w = contains_pattern(&s4, &s4, PatternMode::Ordered)
            .unwrap()
            .unwrap();
        assert_eq!(w.rows, vec![0, 1, 2, 3]);
        assert_eq!(w.cols, vec![0, 1, 2, 3]);
    }

    #[test]
    fn s6_is_s4_free_both_ways() {
        let (s6, s4) = (SignMatrix::s6(), SignMatrix::s4());
        assert_eq!(contains_pattern(&s6, &s4, PatternMode::UpToPermutation).unwrap(), None);
        assert_eq!(contains_pattern(&s6, &s4, PatternMode::Ordered).unwrap(), None);
    }

    #[test]
    fn all_ones_has_no_s4() {
        let j = SignMatrix::ones(4, 4);
        assert_eq!(
            contains_pattern(&j, &SignMatrix::s4(), PatternMode::UpToPermutation).unwrap(),
            None
        );
    }

    #[test]
    fn permuted_copy_is_found_with_valid_witness() {
        let s4 = SignMatrix::s4();
        let host = s4
            .tensor(&SignMatrix::ones(1, 2))
            .permute(&[2, 0, 3, 1], &[7, 1, 4, 0, 3, 6, 2, 5])
            .unwrap();
        let w = contains_pattern(&host, &s4, PatternMode::UpToPermutation)
            .unwrap()
            .unwrap();
        check_witness(&host, &s4, &w);
        let wide = SignMatrix::from_rows(&[&[1, -1, -1]]).unwrap();
        let w = contains_pattern(&host, &wide, PatternMode::UpToPermutation)
            .unwrap()
            .unwrap();
        check_witness(&host, &wide, &w);
    }

    #[test]
    fn oversized_pattern_is_an_error() {
        assert!(contains_pattern(&SignMatrix::xor2(), &SignMatrix::s4(), PatternMode::Ordered).is_err());
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(combinations(6, 4).len(), 15);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(3)[1], vec![0, 2, 1]);
    }
}
