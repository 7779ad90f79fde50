//! Seeded property suites. Each suite runs a fixed family of instances and
//! counts violations; `run_all` is what `commbound verify-suite` executes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{approx_degree, dual_polynomial, verify_dual};
use crate::boolfn::BoolFunction;
use crate::bounds::{sherstov_bound, shaltiel_verify};
use crate::composer::{build_witness, verify_rank_theorem};
use crate::error::Result;
use crate::group::{
    block_group_bound, characters_abelian, degeneration_check, g_invariant, general_bound,
    orthogonality_sums, product_approx_degree, regularity_check, tprime_check, AbelianGroupSpec,
    CharacterTable, GroupKind, GroupMapMatrix, HardnessPartition, PairMultiset,
};
use crate::matrix::{
    balance_check, contains_pattern, enumerate_strongly_balanced, exact_rank,
    search_strongly_balanced, Matrix, PatternMode, SearchConstraints, SignMatrix,
};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            instances: 0,
            violations: 0,
            passed: true,
            notes: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.violations += 1;
            self.passed = false;
            if self.notes.len() < 5 {
                self.notes.push(what());
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

pub const SUITE_NAMES: [&str; 11] = [
    "rank_theorem",
    "s6_reproduction",
    "dual_witness",
    "witness_bound",
    "concrete_bound",
    "measure_inequalities",
    "character_sum_invariance",
    "diagonal_regularity",
    "block_degeneration",
    "tprime_consistency",
    "abelian_degeneration",
];

/// Runs every suite, or only those listed in `only`.
pub fn run_all(seed: u64, only: &[String]) -> Result<SuiteReport> {
    if let Some(bad) = only.iter().find(|o| !SUITE_NAMES.contains(&o.as_str())) {
        return Err(crate::Error::Argument(format!(
            "unknown suite `{bad}`; expected one of {}",
            SUITE_NAMES.join(", ")
        )));
    }
    let mut suites = Vec::new();
    for name in SUITE_NAMES {
        if !only.is_empty() && !only.iter().any(|o| o == name) {
            continue;
        }
        suites.push(run_one(name, seed)?);
    }
    let passed = suites.iter().all(|s| s.passed);
    Ok(SuiteReport {
        seed,
        suites,
        passed,
    })
}

pub fn run_one(name: &str, seed: u64) -> Result<SuiteResult> {
    match name {
        "rank_theorem" => rank_theorem(seed, 20),
        "s6_reproduction" => s6_reproduction(),
        "dual_witness" => dual_witness(3, 4),
        "witness_bound" => witness_bound(),
        "concrete_bound" => concrete_bound(),
        "measure_inequalities" => measure_inequalities(seed, 200, 10),
        "character_sum_invariance" => character_sum_invariance(seed, 500),
        "diagonal_regularity" => diagonal_regularity(seed, 200),
        "block_degeneration" => block_degeneration(),
        "tprime_consistency" => tprime_consistency(seed, 500),
        "abelian_degeneration" => abelian_degeneration(),
        other => Err(crate::Error::Argument(format!(
            "unknown suite `{other}`; expected one of {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// Every Boolean function of arity `n`, indexed so that bit `x` of the
/// index is set when `f(x) = -1`.
pub fn all_functions(n: usize) -> impl Iterator<Item = BoolFunction> {
    (0u64..1 << (1 << n)).map(move |idx| {
        BoolFunction::from_mask_fn(n, |x| if idx >> x & 1 == 1 { -1 } else { 1 }).expect("small arity")
    })
}

pub fn random_function(n: usize, rng: &mut impl Rng) -> BoolFunction {
    let table = (0..1usize << n).map(|_| if rng.random_bool(0.5) { -1 } else { 1 }).collect();
    BoolFunction::new(n, table).expect("small arity")
}

pub fn random_sign_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> SignMatrix {
    SignMatrix::from_fn(rows, cols, |_, _| if rng.random_bool(0.5) { -1 } else { 1 }).expect("valid shape")
}

/// Exact rank of `M_{f∘gⁿ}` against the rank formula: all strongly balanced
/// 4x4 `g` with all 16 two-bit `f`, `S₄`/`S₆` with the same functions, and
/// `random_n3` random three-bit functions with `S₄`.
pub fn rank_theorem(seed: u64, random_n3: usize) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("rank_theorem");
    let mut inners = enumerate_strongly_balanced(4, 4, 10_000_000)?;
    inners.push(SignMatrix::s4());
    inners.push(SignMatrix::s6());
    for g in &inners {
        for f in all_functions(2) {
            let rep = verify_rank_theorem(&f, g)?;
            res.record(rep.equal, || format!("{f} with a {}x{} inner: {rep:?}", g.rows(), g.cols()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_n3 {
        let f = random_function(3, &mut rng);
        let rep = verify_rank_theorem(&f, &SignMatrix::s4())?;
        res.record(rep.equal, || format!("{f} with S4: {rep:?}"));
    }
    res.notes.push(format!("{} strongly balanced 4x4 inner matrices", inners.len() - 2));
    Ok(res)
}

/// `S₆` is strongly balanced, has rank at least 2, avoids `S₄`, and the
/// search finds such a 6x6 matrix.
pub fn s6_reproduction() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("s6_reproduction");
    let s6 = SignMatrix::s6();
    res.record(balance_check(&s6).strongly_balanced, || "S6 is not strongly balanced".into());
    let rank = exact_rank(&s6);
    res.record(rank >= 2, || format!("rank(S6) = {rank}"));
    let hit = contains_pattern(&s6, &SignMatrix::s4(), PatternMode::UpToPermutation)?;
    res.record(hit.is_none(), || "S6 contains S4".into());
    let found = search_strongly_balanced(
        6,
        6,
        &SearchConstraints {
            min_rank: 2,
            forbidden: Some(SignMatrix::s4()),
            max_emitted: 1,
            ..SearchConstraints::default()
        },
    )?;
    res.record(!found.is_empty(), || "search found no S4-free 6x6 matrix".into());
    Ok(res)
}

/// Dual polynomials for every function of arity up to `max_n` at `ε = 1/3`
/// verify with margins at least `-1e-8`; parity has full degree up to
/// `parity_n`.
pub fn dual_witness(max_n: usize, parity_n: usize) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("dual_witness");
    for n in 1..=max_n {
        for f in all_functions(n) {
            let w = dual_polynomial(&f, 1.0 / 3.0)?;
            let v = verify_dual(&w, &f)?;
            let ok = v.orthogonality_margin >= -1e-8 && v.l1_margin >= -1e-8 && v.correlation_margin >= -1e-8;
            res.record(ok, || format!("{f}: {v:?}"));
        }
    }
    for n in 1..=parity_n {
        let d = approx_degree(&BoolFunction::parity(n), 1.0 / 3.0)?.d;
        res.record(d == n, || format!("deg(PARITY_{n}) = {d}"));
    }
    Ok(res)
}

/// Witness matrices for `S₄`, `S₆` with `PARITY₂`, `AND₂`.
pub fn witness_bound() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("witness_bound");
    for g in [SignMatrix::s4(), SignMatrix::s6()] {
        for f in [BoolFunction::parity(2), BoolFunction::and(2)] {
            let w = dual_polynomial(&f, 1.0 / 3.0)?;
            let b = build_witness(&f, &w, &g, None)?;
            let ok = (b.l1 - 1.0).abs() <= 1e-9
                && b.correlation >= 1.0 / 3.0 - 1e-8
                && b.spectral_bound.is_some_and(|bound| b.spectral_norm <= bound + 1e-8);
            res.record(ok, || {
                format!(
                    "{f} with {}x{}: l1 {}, correlation {}, norm {} vs {:?}",
                    g.rows(),
                    g.cols(),
                    b.l1,
                    b.correlation,
                    b.spectral_norm,
                    b.spectral_bound
                )
            });
        }
    }
    Ok(res)
}

/// `PARITY₂` with `S₄` at `ε₀ = 1/3` has main term 1.
pub fn concrete_bound() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("concrete_bound");
    let rep = sherstov_bound(&BoolFunction::parity(2), &SignMatrix::s4(), 1.0 / 3.0)?;
    let main = rep.main_term.unwrap_or(f64::NAN);
    res.record((main - 1.0).abs() <= 1e-6, || format!("main term {main}"));
    Ok(res)
}

/// `(‖A‖/√size)³/108 <= disc_U(A) <= ‖A‖/√size` on random sign matrices.
pub fn measure_inequalities(seed: u64, count: usize, max_dim: usize) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("measure_inequalities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let (r, c) = (rng.random_range(1..=max_dim), rng.random_range(1..=max_dim));
        let a = random_sign_matrix(r, c, &mut rng);
        let rep = shaltiel_verify(&a)?;
        res.record(rep.holds && rep.upper_holds, || format!("{r}x{c}: {rep:?}\n{}", a.to_text()));
    }
    Ok(res)
}

fn small_groups() -> Vec<AbelianGroupSpec> {
    [vec![3], vec![4], vec![2, 2]]
        .into_iter()
        .map(|m| AbelianGroupSpec::new(m).expect("valid moduli"))
        .collect()
}

/// Half orbit closures (invariant by construction), half arbitrary pairs.
pub fn random_multiset(g: &AbelianGroupSpec, rng: &mut impl Rng) -> PairMultiset {
    let order = g.order();
    let k = rng.random_range(1..=4);
    let seeds: Vec<(usize, usize)> =
        (0..k).map(|_| (rng.random_range(0..order), rng.random_range(0..order))).collect();
    if rng.random_bool(0.5) {
        (0..order)
            .flat_map(|r| seeds.iter().map(move |&(a, b)| (g.add(a, r), g.add(b, r))))
            .collect()
    } else {
        let extra = rng.random_range(0..=2 * order);
        seeds
            .into_iter()
            .chain((0..extra).map(|_| (rng.random_range(0..order), rng.random_range(0..order))))
            .collect()
    }
}

/// `G`-invariance agrees with vanishing off-diagonal character sums.
pub fn character_sum_invariance(seed: u64, count: usize) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("character_sum_invariance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = small_groups();
    let tables: Vec<CharacterTable> = groups.iter().map(characters_abelian).collect();
    let mut invariant = 0;
    for k in 0..count {
        let (g, table) = (&groups[k % groups.len()], &tables[k % groups.len()]);
        let t = random_multiset(g, &mut rng);
        let inv = g_invariant(&t, g);
        let sums = orthogonality_sums(&t, table)?;
        invariant += usize::from(inv);
        res.record(inv == (sums <= 1e-8 * t.total() as f64), || {
            format!("group {g}: invariant {inv}, max sum {sums}, {t:?}")
        });
    }
    res.notes.push(format!("{invariant} of {count} multisets invariant"));
    Ok(res)
}

/// Diagonal invariance implies regularity on random maps over `Z₃`.
pub fn diagonal_regularity(seed: u64, count: usize) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("diagonal_regularity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z3 = AbelianGroupSpec::new(vec![3])?;
    let mut premises = 0;
    for k in 0..count {
        let rows = 3 * rng.random_range(1..=2);
        let cols = rng.random_range(1..=5);
        let entries = if k % 2 == 0 {
            // every column hits each element equally often
            let mut cols_data: Vec<Vec<usize>> = (0..cols)
                .map(|_| {
                    let mut col: Vec<usize> = (0..rows).map(|i| i % 3).collect();
                    col.shuffle(&mut rng);
                    col
                })
                .collect();
            Matrix::from_fn(rows, cols, |x, y| std::mem::take(&mut cols_data[y][x]))
        } else {
            Matrix::from_fn(rows, cols, |_, _| rng.random_range(0..3))
        };
        let gmap = GroupMapMatrix::new(GroupKind::Abelian(z3.clone()), entries)?;
        let rep = regularity_check(&gmap);
        let premise = rep.row_diagonals_invariant == Some(true) || rep.col_diagonals_invariant == Some(true);
        premises += usize::from(premise);
        res.record(!premise || rep.regular, || format!("{rep:?}"));
    }
    res.notes.push(format!("{premises} of {count} instances met the diagonal premise"));
    Ok(res)
}

/// All pairs of 2x2 blocks: invariance of every pair multiset of the product
/// matches strong balance of both blocks.
pub fn block_degeneration() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("block_degeneration");
    let blocks: Vec<SignMatrix> = (0..16u32)
        .map(|bits| {
            SignMatrix::from_fn(2, 2, |i, j| if bits >> (2 * i + j) & 1 == 1 { -1 } else { 1 })
                .expect("2x2")
        })
        .collect();
    for a in &blocks {
        for b in &blocks {
            let rep = degeneration_check(&[a.clone(), b.clone()])?;
            res.record(rep.equivalent, || format!("{}{}{rep:?}", a.to_text(), b.to_text()));
        }
    }
    Ok(res)
}

/// Direct and conjugated forms of the `T′` test agree.
pub fn tprime_consistency(seed: u64, count: usize) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("tprime_consistency");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = small_groups();
    let tables: Vec<CharacterTable> = groups.iter().map(characters_abelian).collect();
    for k in 0..count {
        let (g, table) = (&groups[k % groups.len()], &tables[k % groups.len()]);
        let t = random_multiset(g, &mut rng);
        let rep = tprime_check(&t, table)?;
        res.record(rep.agree, || format!("group {g}: {rep:?}"));
    }
    Ok(res)
}

/// Over `Z₂ⁿ` the group bounds reduce to the Boolean ones, and the product
/// approximate degree equals the Boolean approximate degree.
pub fn abelian_degeneration() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("abelian_degeneration");
    let g = SignMatrix::s4();
    for n in 1..=2 {
        let blocks: Vec<GroupMapMatrix> = (0..n).map(|_| GroupMapMatrix::from_sign_matrix(&g)).collect();
        let gmap = GroupMapMatrix::block_product(&blocks)?;
        let table = characters_abelian(&AbelianGroupSpec::boolean(n)?);
        let z2: Vec<CharacterTable> = (0..n).map(|_| characters_abelian(&AbelianGroupSpec::boolean(1).expect("Z2"))).collect();
        for f in all_functions(n) {
            let values: Vec<f64> = f.table().iter().map(|&v| v as f64).collect();
            let d = approx_degree(&f, 1.0 / 3.0)?.d;
            let easy: Vec<usize> = (0..1usize << n).filter(|s| (s.count_ones() as usize) < d).collect();
            let part = HardnessPartition::from_easy(table.h(), &easy)?;
            let general = general_bound(&gmap, &values, &table, &part, 0.0)?;
            let sherstov = sherstov_bound(&f, &g, 1.0 / 3.0)?;
            if let (Some(a), Some(b)) = (general.main_term, sherstov.main_term) {
                res.record((a - b).abs() < 1e-8, || format!("{f}: general {a}, sherstov {b}"));
            }
            let block = block_group_bound(&blocks, &values, &z2)?;
            if let (Some(a), Some(b)) = (block.main_term, sherstov.main_term) {
                res.record((a - b).abs() < 1e-8, || format!("{f}: block {a}, sherstov {b}"));
            }
        }
    }
    for n in 1..=3 {
        let z2: Vec<CharacterTable> = (0..n).map(|_| characters_abelian(&AbelianGroupSpec::boolean(1).expect("Z2"))).collect();
        for f in all_functions(n) {
            let values: Vec<f64> = f.table().iter().map(|&v| v as f64).collect();
            let want = approx_degree(&f, 1.0 / 3.0)?.d;
            let got = product_approx_degree(&values, &z2, 1.0 / 3.0)?.d;
            res.record(got == want, || format!("{f}: product degree {got}, Boolean degree {want}"));
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_functions_counts_and_order() {
        assert_eq!(all_functions(2).count(), 16);
        let third = all_functions(2).nth(3).unwrap();
        assert_eq!(third.table(), &[-1, -1, 1, 1]);
    }

    #[test]
    fn quick_suites_pass() {
        for name in ["concrete_bound", "witness_bound", "block_degeneration"] {
            let r = run_one(name, 0).unwrap();
            assert!(r.passed, "{r:?}");
        }
        assert!(character_sum_invariance(1, 60).unwrap().passed);
        assert!(tprime_consistency(1, 60).unwrap().passed);
        assert!(diagonal_regularity(1, 40).unwrap().passed);
        assert!(measure_inequalities(1, 20, 6).unwrap().passed);
    }

    #[test]
    fn random_multisets_cover_both_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = AbelianGroupSpec::new(vec![4]).unwrap();
        let outcomes: Vec<bool> = (0..40).map(|_| g_invariant(&random_multiset(&g, &mut rng), &g)).collect();
        assert!(outcomes.iter().any(|&b| b) && outcomes.iter().any(|&b| !b));
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_one("nope", 0).is_err());
        assert!(run_all(0, &["concrete_bound".to_string()]).unwrap().passed);
    }
}
