use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AbelianGroupSpec, CharacterTable, GroupMapMatrix, PairMultiset};
use crate::error::{Error, Result};
use crate::matrix::{balance_check, Matrix, SignMatrix};
use crate::par;

/// Cap on the number of elementary operations in the all-pairs loops.
pub const MAX_PAIR_WORK: u128 = 1 << 34;

/// Relative zero threshold for character sums.
pub const SUM_TOLERANCE: f64 = 1e-8;

fn check_work(what: &str, work: u128) -> Result<()> {
    if work > MAX_PAIR_WORK {
        return Err(Error::Resource {
            what: what.into(),
            required: work,
            cap: MAX_PAIR_WORK,
        });
    }
    Ok(())
}

/// True when `(s, s)·T = T` for every `s ∈ G`.
pub fn g_invariant(t: &PairMultiset, g: &AbelianGroupSpec) -> bool {
    (0..g.order()).all(|s| {
        let moved: PairMultiset = t
            .iter()
            .flat_map(|((a, b), m)| std::iter::repeat_n((g.add(a, s), g.add(b, s)), m))
            .collect();
        &moved == t
    })
}

/// `max_{i≠j} |Σ_{(s,t)∈T} χ_i(s) conj(χ_j(t))|`.
pub fn orthogonality_sums(t: &PairMultiset, table: &CharacterTable) -> Result<f64> {
    check_elements(t, table.order())?;
    Ok(off_diagonal_max(&pair_sums(t, table)))
}

fn check_elements(t: &PairMultiset, order: usize) -> Result<()> {
    match t.iter().find(|((a, b), _)| *a >= order || *b >= order) {
        Some(((a, b), _)) => Err(Error::arg(format!(
            "pair ({a}, {b}) is outside a group of order {order}"
        ))),
        None => Ok(()),
    }
}

/// `Σ_{(s,t)∈T} χ_i(s) conj(χ_j(t))` for all `i, j`.
fn pair_sums(t: &PairMultiset, table: &CharacterTable) -> Matrix<Complex64> {
    let h = table.h();
    let mut sums = Matrix::from_fn(h, h, |_, _| Complex64::new(0.0, 0.0));
    for ((s, u), m) in t.iter() {
        for i in 0..h {
            let a = table.value(i, s) * m as f64;
            for j in 0..h {
                let cur = sums.get(i, j);
                sums.set(i, j, cur + a * table.value(j, u).conj());
            }
        }
    }
    sums
}

fn off_diagonal_max(m: &Matrix<Complex64>) -> f64 {
    let mut best = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                best = best.max(m.get(i, j).norm());
            }
        }
    }
    best
}

/// Row-pair multisets `S^{x,x'}` (index `x·|X| + x'`) and column-pair
/// multisets `T^{y,y'}` (index `y·|Y| + y'`).
#[derive(Clone, Debug, Serialize)]
pub struct PairMultisets {
    pub rows: Vec<PairMultiset>,
    pub cols: Vec<PairMultiset>,
}

pub fn pair_multisets(gmap: &GroupMapMatrix) -> Result<PairMultisets> {
    let (m, n) = (gmap.rows(), gmap.cols());
    check_work(
        "pair multiset entries",
        (m as u128).pow(2) * n as u128 + (n as u128).pow(2) * m as u128,
    )?;
    let rows = par::map_range(0..m * m, |k| {
        let (x, xp) = (k / m, k % m);
        (0..n).map(|y| (gmap.get(x, y), gmap.get(xp, y))).collect()
    });
    let cols = par::map_range(0..n * n, |k| {
        let (y, yp) = (k / n, k % n);
        (0..m).map(|x| (gmap.get(x, y), gmap.get(x, yp))).collect()
    });
    Ok(PairMultisets { rows, cols })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// Occurrences of each group element among the entries.
    pub counts: Vec<usize>,
    /// `|X||Y|/|G|` when it is an integer.
    pub expected: Option<usize>,
    pub reason: Option<String>,
    /// Every `S^{x,x}` is invariant (Abelian groups only).
    pub row_diagonals_invariant: Option<bool>,
    /// Every `T^{y,y}` is invariant (Abelian groups only).
    pub col_diagonals_invariant: Option<bool>,
    /// Diagonal invariance, when present, implies regularity here.
    pub diagonal_premise_consistent: bool,
}

/// Is the multiset of entries a multiple of `G`?
pub fn regularity_check(gmap: &GroupMapMatrix) -> RegularityReport {
    let order = gmap.group().order();
    let mut counts = vec![0usize; order];
    for &e in gmap.entries().data() {
        counts[e] += 1;
    }
    let total = gmap.rows() * gmap.cols();
    let (regular, expected, reason) = if !total.is_multiple_of(order) {
        (
            false,
            None,
            Some(format!("|X||Y| = {total} is not divisible by |G| = {order}")),
        )
    } else {
        let want = total / order;
        match counts.iter().position(|&c| c != want) {
            Some(e) => (
                false,
                Some(want),
                Some(format!("element {e} occurs {} times, expected {want}", counts[e])),
            ),
            None => (true, Some(want), None),
        }
    };
    let (row_diag, col_diag) = match gmap.group().abelian() {
        Some(spec) => {
            let rows = (0..gmap.rows()).all(|x| {
                let t: PairMultiset = (0..gmap.cols()).map(|y| (gmap.get(x, y), gmap.get(x, y))).collect();
                g_invariant(&t, spec)
            });
            let cols = (0..gmap.cols()).all(|y| {
                let t: PairMultiset = (0..gmap.rows()).map(|x| (gmap.get(x, y), gmap.get(x, y))).collect();
                g_invariant(&t, spec)
            });
            (Some(rows), Some(cols))
        }
        None => (None, None),
    };
    let premise = row_diag == Some(true) || col_diag == Some(true);
    RegularityReport {
        regular,
        counts,
        expected,
        reason,
        row_diagonals_invariant: row_diag,
        col_diagonals_invariant: col_diag,
        diagonal_premise_consistent: !premise || regular,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityGeneralReport {
    pub hard: Vec<usize>,
    pub max_row_violation: f64,
    pub max_col_violation: f64,
    pub row_threshold: f64,
    pub col_threshold: f64,
    pub passed: bool,
}

/// `Σ_y ψ_i(g(x,y)) conj(ψ_j(g(x',y)))` and the column analogue, for all
/// row pairs, column pairs and distinct hard `i, j`.
pub fn orthogonality_general(
    gmap: &GroupMapMatrix,
    table: &CharacterTable,
    hard: &[usize],
) -> Result<OrthogonalityGeneralReport> {
    if table.order() != gmap.group().order() {
        return Err(Error::dims(gmap.group().order(), table.order()));
    }
    if let Some(&i) = hard.iter().find(|&&i| i >= table.h()) {
        return Err(Error::arg(format!("character index {i} out of range")));
    }
    let (m, n) = (gmap.rows(), gmap.cols());
    let k = hard.len() as u128;
    check_work(
        "orthogonality sums",
        k * k * ((m as u128).pow(2) * n as u128 + (n as u128).pow(2) * m as u128),
    )?;
    let values = |x: usize, y: usize, i: usize| table.value(hard[i], gmap.get(x, y));
    let row_max = if hard.len() < 2 {
        0.0
    } else {
        par::max_f64(0..m * m, |p| {
            let (x, xp) = (p / m, p % m);
            pairwise_max(hard.len(), n, |i, y| values(x, y, i), |j, y| values(xp, y, j))
        })
    };
    let col_max = if hard.len() < 2 {
        0.0
    } else {
        par::max_f64(0..n * n, |p| {
            let (y, yp) = (p / n, p % n);
            pairwise_max(hard.len(), m, |i, x| values(x, y, i), |j, x| values(x, yp, j))
        })
    };
    let row_threshold = SUM_TOLERANCE * n as f64;
    let col_threshold = SUM_TOLERANCE * m as f64;
    Ok(OrthogonalityGeneralReport {
        hard: hard.to_vec(),
        max_row_violation: row_max.max(0.0),
        max_col_violation: col_max.max(0.0),
        row_threshold,
        col_threshold,
        passed: row_max <= row_threshold && col_max <= col_threshold,
    })
}

fn pairwise_max(
    k: usize,
    len: usize,
    a: impl Fn(usize, usize) -> Complex64,
    b: impl Fn(usize, usize) -> Complex64,
) -> f64 {
    let mut best = 0.0f64;
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let s: Complex64 = (0..len).map(|y| a(i, y) * b(j, y).conj()).sum();
            best = best.max(s.norm());
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct TPrimeReport {
    /// Largest off-diagonal character sum over `T` itself.
    pub direct_max: f64,
    /// Largest off-diagonal entry of `C T′ C†`, where `T′` is the
    /// class-averaged pair function.
    pub conjugated_max: f64,
    pub threshold: f64,
    pub direct_holds: bool,
    pub conjugated_holds: bool,
    pub agree: bool,
}

/// Tests diagonalisation of the class-averaged `T′` both directly and by
/// conjugation with the character matrix.
pub fn tprime_check(t: &PairMultiset, table: &CharacterTable) -> Result<TPrimeReport> {
    let order = table.order();
    check_elements(t, order)?;
    let h = table.h();
    let class_of = table.class_of();
    let mut class_size = vec![0usize; h];
    for &c in class_of {
        class_size[c] += 1;
    }
    // class-pair totals, then spread evenly over each class pair
    let mut totals = vec![0usize; h * h];
    for ((s, u), m) in t.iter() {
        totals[class_of[s] * h + class_of[u]] += m;
    }
    let tprime = |s: usize, u: usize| {
        let (k, l) = (class_of[s], class_of[u]);
        totals[k * h + l] as f64 / (class_size[k] * class_size[l]) as f64
    };
    let mut conj = Matrix::from_fn(h, h, |_, _| Complex64::new(0.0, 0.0));
    for i in 0..h {
        // (C T′)_{i,u}
        let row: Vec<Complex64> = (0..order)
            .map(|u| (0..order).map(|s| table.value(i, s) * tprime(s, u)).sum())
            .collect();
        for j in 0..h {
            let v: Complex64 = (0..order).map(|u| row[u] * table.value(j, u).conj()).sum();
            conj.set(i, j, v);
        }
    }
    let direct_max = off_diagonal_max(&pair_sums(t, table));
    let conjugated_max = off_diagonal_max(&conj);
    let threshold = SUM_TOLERANCE * t.total().max(1) as f64;
    let direct_holds = direct_max <= threshold;
    let conjugated_holds = conjugated_max <= threshold;
    Ok(TPrimeReport {
        direct_max,
        conjugated_max,
        threshold,
        direct_holds,
        conjugated_holds,
        agree: direct_holds == conjugated_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationReport {
    pub blocks_strongly_balanced: Vec<bool>,
    pub all_strongly_balanced: bool,
    pub all_pairs_invariant: bool,
    pub equivalent: bool,
}

/// Compares invariance of every pair multiset of the block product over
/// `Z₂ᵗ` with strong balance of every block.
pub fn degeneration_check(blocks: &[SignMatrix]) -> Result<DegenerationReport> {
    let gmaps: Vec<GroupMapMatrix> = blocks.iter().map(GroupMapMatrix::from_sign_matrix).collect();
    let product = GroupMapMatrix::block_product(&gmaps)?;
    let blocks_strongly_balanced: Vec<bool> =
        blocks.iter().map(|b| balance_check(b).strongly_balanced).collect();
    let all_strongly_balanced = blocks_strongly_balanced.iter().all(|&b| b);
    let all_pairs_invariant = all_pairs_invariant(&product)?;
    Ok(DegenerationReport {
        blocks_strongly_balanced,
        all_strongly_balanced,
        all_pairs_invariant,
        equivalent: all_strongly_balanced == all_pairs_invariant,
    })
}

fn all_pairs_invariant(gmap: &GroupMapMatrix) -> Result<bool> {
    let spec = gmap
        .group()
        .abelian()
        .ok_or_else(|| Error::arg("invariance needs an Abelian group"))?;
    let sets = pair_multisets(gmap)?;
    Ok(sets.rows.iter().chain(&sets.cols).all(|t| g_invariant(t, spec)))
}

/// Every row and column of the block hits each element equally often.
fn lines_regular(gmap: &GroupMapMatrix) -> bool {
    let order = gmap.group().order();
    let uniform = |it: &mut dyn Iterator<Item = usize>, len: usize| {
        if !len.is_multiple_of(order) {
            return false;
        }
        let mut c = vec![0usize; order];
        for e in it {
            c[e] += 1;
        }
        c.iter().all(|&k| k == len / order)
    };
    (0..gmap.rows()).all(|x| uniform(&mut (0..gmap.cols()).map(|y| gmap.get(x, y)), gmap.cols()))
        && (0..gmap.cols()).all(|y| uniform(&mut (0..gmap.rows()).map(|x| gmap.get(x, y)), gmap.rows()))
}

/// Rows drawn as shuffles of a balanced row, kept once the columns are
/// balanced too. `None` when the shape cannot be regular or sampling gives up.
fn line_regular_draw(r: usize, c: usize, m: usize, rng: &mut impl Rng) -> Option<Matrix<usize>> {
    if !r.is_multiple_of(m) || !c.is_multiple_of(m) {
        return None;
    }
    for _ in 0..200 {
        let rows: Vec<Vec<usize>> = (0..r)
            .map(|_| {
                let mut row: Vec<usize> = (0..c).map(|y| y % m).collect();
                row.shuffle(rng);
                row
            })
            .collect();
        let cols_ok = (0..c).all(|y| {
            let mut k = vec![0usize; m];
            for row in &rows {
                k[row[y]] += 1;
            }
            k.iter().all(|&v| v == r / m)
        });
        if cols_ok {
            return Some(Matrix::from_fn(r, c, |x, y| rows[x][y]));
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct LineRegularReport {
    pub moduli: Vec<usize>,
    pub block_dims: (usize, usize),
    pub trials: usize,
    pub seed: u64,
    /// Products where every block has uniform rows and columns.
    pub line_regular_instances: usize,
    pub invariant_instances: usize,
    /// Instances where the two properties disagree.
    pub mismatches: usize,
    /// Text form of the first mismatching block list.
    pub first_mismatch: Option<Vec<String>>,
}

/// Random search over block products of cyclic-group maps, comparing
/// all-pairs invariance with per-block line regularity. Reports what it
/// finds and asserts nothing.
pub fn line_regular_search(
    moduli: &[usize],
    block_dims: (usize, usize),
    trials: usize,
    seed: u64,
) -> Result<LineRegularReport> {
    let (r, c) = block_dims;
    if r == 0 || c == 0 {
        return Err(Error::arg("block dimensions must be positive"));
    }
    let specs = moduli
        .iter()
        .map(|&m| AbelianGroupSpec::new(vec![m]))
        .collect::<Result<Vec<_>>>()?;
    if specs.is_empty() {
        return Err(Error::arg("at least one block is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LineRegularReport {
        moduli: moduli.to_vec(),
        block_dims,
        trials,
        seed,
        line_regular_instances: 0,
        invariant_instances: 0,
        mismatches: 0,
        first_mismatch: None,
    };
    for _ in 0..trials {
        let blocks = specs
            .iter()
            .map(|spec| {
                let m = spec.order();
                let entries = if rng.random_bool(0.5) {
                    line_regular_draw(r, c, m, &mut rng)
                } else {
                    None
                }
                .unwrap_or_else(|| Matrix::from_fn(r, c, |_, _| rng.random_range(0..m)));
                GroupMapMatrix::new(super::GroupKind::Abelian(spec.clone()), entries)
            })
            .collect::<Result<Vec<_>>>()?;
        let regular = blocks.iter().all(lines_regular);
        let product = GroupMapMatrix::block_product(&blocks)?;
        let invariant = all_pairs_invariant(&product)?;
        report.line_regular_instances += usize::from(regular);
        report.invariant_instances += usize::from(invariant);
        if regular != invariant {
            report.mismatches += 1;
            if report.first_mismatch.is_none() {
                report.first_mismatch = Some(blocks.iter().map(|b| b.to_text()).collect::<Result<_>>()?);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::characters_abelian;
    use super::*;
    use crate::matrix::SignMatrix;

    fn z(m: &[usize]) -> AbelianGroupSpec {
        AbelianGroupSpec::new(m.to_vec()).unwrap()
    }

    #[test]
    fn diagonal_is_invariant() {
        for g in [z(&[3]), z(&[2, 2]), z(&[4]), z(&[2, 3])] {
            let t = PairMultiset::diagonal(g.order());
            assert!(g_invariant(&t, &g));
            assert!(orthogonality_sums(&t, &characters_abelian(&g)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn z3_two_pairs_not_invariant() {
        let g = z(&[3]);
        let t: PairMultiset = [(0, 0), (0, 1)].into_iter().collect();
        assert!(!g_invariant(&t, &g));
        assert!(orthogonality_sums(&t, &characters_abelian(&g)).unwrap() > 1e-6);
    }

    #[test]
    fn orbit_closure_is_invariant() {
        let g = z(&[2, 3]);
        let seed = [(1, 4), (0, 0), (5, 2)];
        let t: PairMultiset = (0..g.order())
            .flat_map(|r| seed.iter().map(move |&(a, b)| (a, b, r)))
            .map(|(a, b, r)| (g.add(a, r), g.add(b, r)))
            .collect();
        assert!(g_invariant(&t, &g));
        assert!(orthogonality_sums(&t, &characters_abelian(&g)).unwrap() < 1e-8 * t.total() as f64);
    }

    #[test]
    fn xor2_pair_multisets() {
        let gm = GroupMapMatrix::from_sign_matrix(&SignMatrix::xor2());
        let sets = pair_multisets(&gm).unwrap();
        assert_eq!(sets.rows.len(), 4);
        assert_eq!(sets.cols.len(), 4);
        let s12 = &sets.rows[1];
        let want: PairMultiset = [(0, 1), (1, 0)].into_iter().collect();
        assert_eq!(s12, &want);
        assert!(g_invariant(s12, &z(&[2])));
        let single = GroupMapMatrix::parse("group 3\n2\n").unwrap();
        let sets = pair_multisets(&single).unwrap();
        assert_eq!(sets.rows.len(), 1);
        assert_eq!(sets.rows[0].total(), 1);
    }

    #[test]
    fn regularity() {
        let rep = regularity_check(&GroupMapMatrix::from_sign_matrix(&SignMatrix::s4()));
        assert!(rep.regular);
        assert_eq!(rep.expected, Some(8));
        assert_eq!(rep.row_diagonals_invariant, Some(true));
        assert!(rep.diagonal_premise_consistent);
        let constant = GroupMapMatrix::parse("group 3\n1,1,1\n1,1,1\n1,1,1\n").unwrap();
        assert!(!regularity_check(&constant).regular);
        let odd = GroupMapMatrix::parse("group 3\n0,1\n").unwrap();
        let rep = regularity_check(&odd);
        assert!(!rep.regular && rep.expected.is_none());
    }

    #[test]
    fn orthogonality_general_cases() {
        let t2 = characters_abelian(&z(&[2, 2]));
        let blocks = [SignMatrix::s4(), SignMatrix::s4()].map(|b| GroupMapMatrix::from_sign_matrix(&b));
        let prod = GroupMapMatrix::block_product(&blocks).unwrap();
        let rep = orthogonality_general(&prod, &t2, &[1, 2, 3]).unwrap();
        assert!(rep.passed, "{rep:?}");

        let t3 = characters_abelian(&z(&[3]));
        let column = GroupMapMatrix::parse("group 3\n1\n1\n1\n").unwrap();
        assert!(!orthogonality_general(&column, &t3, &[1, 2]).unwrap().passed);
        assert!(orthogonality_general(&column, &t3, &[1]).unwrap().passed);
        assert!(orthogonality_general(&column, &t2, &[1]).is_err());
    }

    #[test]
    fn tprime_consistency() {
        let t3 = characters_abelian(&z(&[3]));
        let diag = tprime_check(&PairMultiset::diagonal(3), &t3).unwrap();
        assert!(diag.direct_holds && diag.conjugated_holds && diag.agree);
        let bad: PairMultiset = [(0, 0), (0, 1)].into_iter().collect();
        let rep = tprime_check(&bad, &t3).unwrap();
        assert!(!rep.direct_holds && !rep.conjugated_holds && rep.agree);
        assert!((rep.direct_max - rep.conjugated_max).abs() < 1e-9);
    }

    #[test]
    fn tprime_on_s3_classes() {
        let s3 = r#"{"h":3,"order":6,
            "table":[[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],
                     [1,0],[-1,0],[-1,0],[-1,0],[1,0],[1,0],
                     [2,0],[0,0],[0,0],[0,0],[-1,0],[-1,0]],
            "class_of":[0,1,1,1,2,2],"degrees":[1,1,2]}"#;
        let table = CharacterTable::from_json(s3).unwrap();
        let all: PairMultiset = (0..6).flat_map(|s| (0..6).map(move |t| (s, t))).collect();
        let rep = tprime_check(&all, &table).unwrap();
        assert!(rep.agree);
        let lopsided: PairMultiset = [(1, 4), (2, 0)].into_iter().collect();
        assert!(tprime_check(&lopsided, &table).unwrap().agree);
        assert!(tprime_check(&[(9, 0)].into_iter().collect(), &table).is_err());
    }

    #[test]
    fn degeneration_examples() {
        let rep = degeneration_check(&[SignMatrix::s4(), SignMatrix::s4()]).unwrap();
        assert!(rep.all_strongly_balanced && rep.all_pairs_invariant && rep.equivalent);
        let rep = degeneration_check(&[SignMatrix::ones(2, 2), SignMatrix::xor2()]).unwrap();
        assert!(!rep.all_strongly_balanced && !rep.all_pairs_invariant && rep.equivalent);
    }

    #[test]
    fn degeneration_exhaustive_two_by_two() {
        let all: Vec<SignMatrix> = (0..16u32)
            .map(|bits| SignMatrix::from_fn(2, 2, |i, j| if bits >> (2 * i + j) & 1 == 1 { -1 } else { 1 }).unwrap())
            .collect();
        for a in &all {
            for b in &all {
                assert!(degeneration_check(&[a.clone(), b.clone()]).unwrap().equivalent);
            }
        }
    }

    #[test]
    fn line_regular_search_is_deterministic() {
        let a = line_regular_search(&[3, 3], (3, 3), 20, 7).unwrap();
        let b = line_regular_search(&[3, 3], (3, 3), 20, 7).unwrap();
        assert_eq!(a.mismatches, b.mismatches);
        assert_eq!(a.first_mismatch, b.first_mismatch);
        assert!(line_regular_search(&[1], (2, 2), 1, 0).is_err());
    }
}
