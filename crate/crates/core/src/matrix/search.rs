use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use super::pattern::permutations;
use super::{contains_pattern, exact_rank, PatternMode, SignMatrix};
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Debug)]
pub struct SearchConstraints {
    pub min_rank: usize,
    /// Matrices containing this pattern (up to row/column permutation) are rejected.
    pub forbidden: Option<SignMatrix>,
    /// Stop after this many matrices have been emitted.
    pub max_emitted: usize,
    /// Upper bound on partial matrices visited before giving up.
    pub max_nodes: u64,
}

impl Default for SearchConstraints {
    fn default() -> Self {
        SearchConstraints {
            min_rank: 0,
            forbidden: None,
            max_emitted: 1000,
            max_nodes: 50_000_000,
        }
    }
}

/// Strongly balanced `rows x cols` sign matrices up to row and column
/// permutation, one canonical representative each, in lexicographic order.
pub fn search_strongly_balanced(
    rows: usize,
    cols: usize,
    constraints: &SearchConstraints,
) -> Result<Vec<SignMatrix>> {
    check_even(rows, cols)?;
    let candidates = balanced_rows(cols);
    let nodes = AtomicU64::new(0);
    // rows are chosen in nondecreasing candidate order, which already removes
    // row permutations; column permutations are removed by canonicalisation
    let per_first: Vec<Result<BTreeSet<SignMatrix>>> = par::map_range(0..candidates.len(), |first| {
        let mut found = BTreeSet::new();
        let mut chosen = vec![first];
        let mut sums: Vec<i32> = candidates[first].iter().map(|&v| v as i32).collect();
        extend(
            &candidates,
            rows,
            &mut chosen,
            &mut sums,
            true,
            &nodes,
            constraints.max_nodes,
            &mut |picked| {
                let m = assemble(&candidates, picked, cols);
                found.insert(canonical_form(&m));
            },
        )?;
        Ok(found)
    });
    let mut all = BTreeSet::new();
    for part in per_first {
        all.extend(part?);
    }

    let accepted: Vec<Option<SignMatrix>> = {
        let all: Vec<SignMatrix> = all.into_iter().collect();
        par::map_slice(&all, |m| {
            if exact_rank(m) < constraints.min_rank {
                return None;
            }
            if let Some(p) = &constraints.forbidden {
                if p.rows() <= m.rows() && p.cols() <= m.cols() {
                    let hit = contains_pattern(m, p, PatternMode::UpToPermutation)
                        .expect("dimensions checked");
                    if hit.is_some() {
                        return None;
                    }
                }
            }
            Some(m.clone())
        })
    };
    Ok(accepted
        .into_iter()
        .flatten()
        .take(constraints.max_emitted)
        .collect())
}

/// Every strongly balanced `rows x cols` sign matrix (no deduplication), in
/// lexicographic order of their row sequences.
pub fn enumerate_strongly_balanced(rows: usize, cols: usize, max_nodes: u64) -> Result<Vec<SignMatrix>> {
    check_even(rows, cols)?;
    let candidates = balanced_rows(cols);
    let nodes = AtomicU64::new(0);
    let parts: Vec<Result<Vec<SignMatrix>>> = par::map_range(0..candidates.len(), |first| {
        let mut found = Vec::new();
        let mut chosen = vec![first];
        let mut sums: Vec<i32> = candidates[first].iter().map(|&v| v as i32).collect();
        extend(
            &candidates,
            rows,
            &mut chosen,
            &mut sums,
            false,
            &nodes,
            max_nodes,
            &mut |picked| found.push(assemble(&candidates, picked, cols)),
        )?;
        Ok(found)
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Lexicographically smallest row-major representative under row and column
/// permutations (with -1 < +1).
///
/// For a fixed column order the best row order sorts the rows; for a fixed
/// row order the best column order sorts columns by their top-to-bottom
/// content. Whichever side is shorter gets its permutations enumerated.
pub fn canonical_form(m: &SignMatrix) -> SignMatrix {
    let (rows, cols) = m.dims();
    let mut best: Option<Vec<i8>> = None;
    if rows <= cols {
        for perm in permutations(rows) {
            let mut columns: Vec<Vec<i8>> = (0..cols)
                .map(|j| perm.iter().map(|&r| m.get(r, j)).collect())
                .collect();
            columns.sort();
            let flat: Vec<i8> = (0..rows)
                .flat_map(|i| columns.iter().map(move |c| c[i]))
                .collect();
            if best.as_ref().is_none_or(|b| flat < *b) {
                best = Some(flat);
            }
        }
    } else {
        for perm in permutations(cols) {
            let mut r: Vec<Vec<i8>> = (0..rows)
                .map(|i| perm.iter().map(|&c| m.get(i, c)).collect())
                .collect();
            r.sort();
            let flat = r.concat();
            if best.as_ref().is_none_or(|b| flat < *b) {
                best = Some(flat);
            }
        }
    }
    SignMatrix::new(rows, cols, best.expect("at least one permutation")).expect("permuted sign matrix")
}

fn check_even(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 || rows % 2 == 1 || cols % 2 == 1 {
        return Err(Error::arg(format!(
            "{rows}x{cols}: a strongly balanced sign matrix needs even, positive dimensions \
             (a line of odd length has an odd, hence nonzero, sum)"
        )));
    }
    Ok(())
}

/// All ±1 vectors of length `n` summing to zero, lexicographic with -1 < +1.
fn balanced_rows(n: usize) -> Vec<Vec<i8>> {
    let mut out: Vec<Vec<i8>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize * 2 == n)
        .map(|m| (0..n).map(|i| if m >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    out.sort();
    out
}

fn assemble(candidates: &[Vec<i8>], picked: &[usize], cols: usize) -> SignMatrix {
    SignMatrix::new(
        picked.len(),
        cols,
        picked.iter().flat_map(|&i| candidates[i].iter().copied()).collect(),
    )
    .expect("rows of a sign matrix")
}

#[allow(clippy::too_many_arguments)]
fn extend(
    candidates: &[Vec<i8>],
    rows: usize,
    chosen: &mut Vec<usize>,
    sums: &mut [i32],
    nondecreasing: bool,
    nodes: &AtomicU64,
    max_nodes: u64,
    emit: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    let visited = nodes.fetch_add(1, Ordering::Relaxed) + 1;
    if visited > max_nodes {
        return Err(Error::Resource {
            what: "strongly balanced search".into(),
            required: visited as u128,
            cap: max_nodes as u128,
        });
    }
    let remaining = (rows - chosen.len()) as i32;
    if sums.iter().any(|s| s.abs() > remaining) {
        return Ok(());
    }
    if remaining == 0 {
        emit(chosen);
        return Ok(());
    }
    let start = if nondecreasing { *chosen.last().expect("nonempty") } else { 0 };
    for next in start..candidates.len() {
        for (s, &v) in sums.iter_mut().zip(&candidates[next]) {
            *s += v as i32;
        }
        chosen.push(next);
        let r = extend(candidates, rows, chosen, sums, nondecreasing, nodes, max_nodes, emit);
        chosen.pop();
        for (s, &v) in sums.iter_mut().zip(&candidates[next]) {
            *s -= v as i32;
        }
        r?;
    }
    Ok(())
}
