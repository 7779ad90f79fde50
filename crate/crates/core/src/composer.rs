//! Block compositions `f∘gⁿ`, the rank formula for strongly balanced `g`, and
//! the witness matrices built from dual polynomials.
//!
//! A composite row index `x = (x¹, …, xⁿ)` is read with block 1 as the most
//! significant digit, matching the Kronecker product `A₁ ⊗ … ⊗ Aₙ`. Block `i`
//! feeds coordinate `x_i` of `f`, i.e. bit `i-1` of the truth-table index.

use serde::Serialize;

use crate::approx::DualWitness;
use crate::boolfn::BoolFunction;
use crate::error::{Error, Result};
use crate::matrix::{
    balance_check, exact_rank, DistributionMatrix, IntMatrix, Matrix, RealMatrix, SignMatrix,
    Spectral,
};
use crate::par;

/// Default cap on the number of entries of a materialised composition.
pub const DEFAULT_MAX_ENTRIES: u128 = 1 << 24;

/// Above this many entry-term products the Fourier cross-check is skipped.
const FOURIER_CHECK_BUDGET: u128 = 1 << 28;

#[derive(Clone, Debug, Serialize)]
pub struct Composition {
    pub f: BoolFunction,
    pub g: SignMatrix,
    pub n: usize,
    pub matrix: SignMatrix,
    /// Whether the Fourier expansion was also evaluated and matched.
    pub fourier_checked: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub n: usize,
    pub pairs_checked: usize,
    /// Largest absolute entry of any `M_T M_S^†` or `M_T^† M_S` with `S ≠ T`.
    pub max_violation: i64,
    /// First violating `(T, S)` in lexicographic order.
    pub first_violation: Option<(usize, usize)>,
    pub orthogonal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankTheoremReport {
    pub n: usize,
    pub rank_g: usize,
    /// `Σ_{T : f̂_T ≠ 0} rk(M_g)^{|T|}`.
    pub formula: u128,
    pub exact_rank: usize,
    pub equal: bool,
    pub support_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessMatrix {
    pub b: RealMatrix,
    pub source: DualWitness,
    pub mu: Option<DistributionMatrix>,
    pub l1: f64,
    /// `<M_{f∘gⁿ}, B>`.
    pub correlation: f64,
    pub spectral_norm: f64,
    /// `(‖M_g‖/√size)^d (1/size)^{n/2}` on the uniform path.
    pub spectral_bound: Option<f64>,
    pub l1_ok: bool,
    pub correlation_ok: bool,
    pub bound_ok: Option<bool>,
}

/// `M_{χ_T∘gⁿ}`: the Kronecker product with `M_g` in the blocks of `T` and
/// the all-ones matrix elsewhere.
pub fn char_compose(t: usize, g: &SignMatrix, n: usize) -> Result<SignMatrix> {
    if n == 0 || n >= usize::BITS as usize || t >> n != 0 {
        return Err(Error::arg(format!("subset mask {t:#b} does not fit {n} blocks")));
    }
    let ones = SignMatrix::ones(g.rows(), g.cols());
    let factor = |i: usize| if t >> i & 1 == 1 { g } else { &ones };
    let mut m = factor(0).clone();
    for i in 1..n {
        m = m.tensor(factor(i));
    }
    Ok(m)
}

/// `‖M_{χ_T∘gⁿ}‖` from the tensor identity `‖A ⊗ B‖ = ‖A‖‖B‖`.
pub fn char_compose_norm(t: usize, g: &SignMatrix, n: usize) -> Result<f64> {
    let k = (t & ((1usize << n) - 1)).count_ones() as i32;
    let j = (g.size() as f64).sqrt();
    Ok(g.spectral_norm()?.powi(k) * j.powi(n as i32 - k))
}

pub fn compose_block(f: &BoolFunction, g: &SignMatrix, n: usize) -> Result<Composition> {
    compose_block_capped(f, g, n, DEFAULT_MAX_ENTRIES)
}

/// `M_{f∘gⁿ}` by pointwise evaluation, cross-checked against the Fourier
/// expansion `Σ_T f̂_T M_{χ_T∘gⁿ}` when that is affordable.
pub fn compose_block_capped(
    f: &BoolFunction,
    g: &SignMatrix,
    n: usize,
    max_entries: u128,
) -> Result<Composition> {
    if f.arity() != n {
        return Err(Error::dims(format!("arity {n}"), format!("arity {}", f.arity())));
    }
    if n == 0 {
        return Err(Error::arg("block composition needs at least one block"));
    }
    let entries = composed_entries(g, n)?;
    if entries > max_entries {
        return Err(Error::Resource {
            what: format!("{n}-block composition of a {}x{} matrix (entries)", g.rows(), g.cols()),
            required: entries,
            cap: max_entries,
        });
    }
    let matrix = pointwise(g, n, |z| f.eval(z) as f64)
        .map(|&v| v as i8);
    let matrix = SignMatrix::new(matrix.rows(), matrix.cols(), matrix.data().to_vec())?;

    let numerators = f.fourier_numerators();
    let terms = numerators.iter().filter(|&&c| c != 0).count() as u128;
    let fourier_checked = terms * entries <= FOURIER_CHECK_BUDGET;
    if fourier_checked {
        let (rows, cols) = matrix.dims();
        let mut acc = vec![0i64; rows * cols];
        for (t, &c) in numerators.iter().enumerate().filter(|(_, &c)| c != 0) {
            let m = char_compose(t, g, n)?;
            for (a, &s) in acc.iter_mut().zip(m.entries()) {
                *a += c * s as i64;
            }
        }
        let scale = 1i64 << n;
        if acc
            .iter()
            .zip(matrix.entries())
            .any(|(&a, &s)| a != scale * s as i64)
        {
            return Err(Error::pre("Fourier expansion and pointwise evaluation disagree"));
        }
    }
    Ok(Composition {
        f: f.clone(),
        g: g.clone(),
        n,
        matrix,
        fourier_checked,
    })
}

/// Checks `M_T M_S^† = 0` and `M_T^† M_S = 0` for all `S ≠ T` with exact
/// integer products.
pub fn verify_orthogonality(g: &SignMatrix, n: usize) -> Result<OrthogonalityReport> {
    let entries = composed_entries(g, n)?;
    let (r, c) = (entries_side(g.rows(), n)?, entries_side(g.cols(), n)?);
    let pairs = (1u128 << n) * ((1u128 << n) - 1) / 2;
    let work = pairs * entries * (r.max(c) as u128);
    const MAX_WORK: u128 = 1 << 36;
    if work > MAX_WORK {
        return Err(Error::Resource {
            what: "orthogonality check (multiply-adds)".into(),
            required: work,
            cap: MAX_WORK,
        });
    }
    let mats: Vec<IntMatrix> = (0..1usize << n)
        .map(|t| char_compose(t, g, n).map(|m| m.to_int()))
        .collect::<Result<_>>()?;
    let trans: Vec<IntMatrix> = mats.iter().map(|m| m.transpose()).collect();
    let pairs: Vec<(usize, usize)> = (0..mats.len())
        .flat_map(|t| (t + 1..mats.len()).map(move |s| (t, s)))
        .collect();
    let worst = par::map_slice(&pairs, |&(t, s)| {
        let left = mats[t].mul_transpose(&mats[s]).expect("equal shapes");
        let right = trans[t].mul_transpose(&trans[s]).expect("equal shapes");
        left.data()
            .iter()
            .chain(right.data())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    });
    let max_violation = worst.iter().copied().max().unwrap_or(0);
    let first_violation = worst
        .iter()
        .position(|&w| w != 0)
        .map(|i| pairs[i]);
    Ok(OrthogonalityReport {
        n,
        pairs_checked: pairs.len(),
        max_violation,
        first_violation,
        orthogonal: max_violation == 0,
    })
}

/// Compares `Σ_{f̂_T ≠ 0} rk(M_g)^{|T|}` with the exact rank of `M_{f∘gⁿ}`.
pub fn verify_rank_theorem(f: &BoolFunction, g: &SignMatrix) -> Result<RankTheoremReport> {
    if !balance_check(g).strongly_balanced {
        return Err(Error::pre(
            "inner matrix is not strongly balanced; the rank formula does not apply",
        ));
    }
    let n = f.arity();
    let composed = compose_block(f, g, n)?;
    let rank_g = exact_rank(g);
    let numerators = f.fourier_numerators();
    let mut formula: u128 = 0;
    let mut support = 0;
    for (t, _) in numerators.iter().enumerate().filter(|(_, &c)| c != 0) {
        support += 1;
        formula += (rank_g as u128).pow(t.count_ones());
    }
    let exact = exact_rank(&composed.matrix);
    Ok(RankTheoremReport {
        n,
        rank_g,
        formula,
        exact_rank: exact,
        equal: formula == exact as u128,
        support_size: support,
    })
}

/// Witness matrix from a dual polynomial `v` of `f`.
///
/// Without `mu`: `B[x, y] = 2ⁿ / size(M_g)ⁿ · v(z(x, y))`, which needs `g`
/// strongly balanced. With `mu`: `B[x, y] = 2ⁿ · v(z(x, y)) · Π μ(xⁱ, yⁱ)`,
/// which needs `mu` balanced with respect to `g`. Here `z(x, y)` is the point
/// whose `i`-th coordinate is `g(xⁱ, yⁱ)`.
pub fn build_witness(
    f: &BoolFunction,
    w: &DualWitness,
    g: &SignMatrix,
    mu: Option<&DistributionMatrix>,
) -> Result<WitnessMatrix> {
    let n = w.v.n;
    if f.arity() != n {
        return Err(Error::dims(format!("arity {n}"), format!("arity {}", f.arity())));
    }
    let composed = compose_block(f, g, n)?;
    let two_n = (1u64 << n) as f64;
    let b = match mu {
        None => {
            if !balance_check(g).strongly_balanced {
                return Err(Error::pre(
                    "inner matrix must be strongly balanced for the uniform witness",
                ));
            }
            let scale = two_n / (g.size() as f64).powi(n as i32);
            pointwise(g, n, |z| scale * w.v.table[z])
        }
        Some(mu) => {
            if mu.dims() != g.dims() {
                return Err(Error::dims(
                    format!("{}x{}", g.rows(), g.cols()),
                    format!("{}x{}", mu.dims().0, mu.dims().1),
                ));
            }
            let bias = mu.bias(g)?;
            if bias.abs() > 1e-12 {
                return Err(Error::pre(format!(
                    "distribution is not balanced with respect to g (bias {bias:e})"
                )));
            }
            let values = pointwise(g, n, |z| two_n * w.v.table[z]);
            let weights = product_measure(mu, n);
            values.hadamard(&weights)?
        }
    };
    let l1 = b.l1_norm();
    let correlation = composed.matrix.to_real().inner(&b)?;
    let spectral_norm = b.spectral_norm()?;
    let spectral_bound = match mu {
        None => {
            let size = g.size() as f64;
            Some((g.spectral_norm()? / size.sqrt()).powi(w.d as i32) * size.powf(-(n as f64) / 2.0))
        }
        Some(_) => None,
    };
    Ok(WitnessMatrix {
        l1_ok: l1 <= 1.0 + 1e-9,
        correlation_ok: correlation >= w.epsilon - 1e-8,
        bound_ok: spectral_bound.map(|bd| spectral_norm <= bd + 1e-8),
        b,
        source: w.clone(),
        mu: mu.cloned(),
        l1,
        correlation,
        spectral_norm,
        spectral_bound,
    })
}

/// Number of entries of `M_{·∘gⁿ}`, checked for overflow.
fn composed_entries(g: &SignMatrix, n: usize) -> Result<u128> {
    (g.size() as u128)
        .checked_pow(n as u32)
        .filter(|&e| e <= usize::MAX as u128)
        .ok_or_else(|| Error::Resource {
            what: "composed matrix entries".into(),
            required: u128::MAX,
            cap: usize::MAX as u128,
        })
}

fn entries_side(side: usize, n: usize) -> Result<usize> {
    side.checked_pow(n as u32)
        .ok_or_else(|| Error::arg("composed dimension overflows"))
}

/// Fills the composite matrix with `h(z(x, y))`.
fn pointwise(g: &SignMatrix, n: usize, h: impl Fn(usize) -> f64 + Sync + Send) -> RealMatrix {
    let (gr, gc) = g.dims();
    let rows = gr.pow(n as u32);
    let cols = gc.pow(n as u32);
    let data: Vec<Vec<f64>> = par::map_range(0..rows, |r| {
        let xs = digits(r, gr, n);
        (0..cols)
            .map(|c| {
                let mut y = c;
                let mut z = 0usize;
                // least significant digit is block n
                for i in (0..n).rev() {
                    if g.get(xs[i], y % gc) < 0 {
                        z |= 1 << i;
                    }
                    y /= gc;
                }
                h(z)
            })
            .collect()
    });
    Matrix::from_vec(rows, cols, data.concat()).expect("composite shape")
}

/// `μ^{⊗n}` as a matrix.
fn product_measure(mu: &DistributionMatrix, n: usize) -> RealMatrix {
    let mut m = mu.matrix().clone();
    for _ in 1..n {
        m = m.kron(mu.matrix());
    }
    m
}

/// Base-`base` digits of `v`, block 1 first.
fn digits(mut v: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for d in out.iter_mut().rev() {
        *d = v % base;
        v /= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{dual_at, dual_polynomial};

    const THIRD: f64 = 1.0 / 3.0;

    #[test]
    fn char_compose_examples() {
        let g = SignMatrix::s4();
        assert_eq!(char_compose(0, &g, 2).unwrap(), SignMatrix::ones(16, 16));
        let x = SignMatrix::xor2();
        assert_eq!(char_compose(0b11, &x, 2).unwrap(), x.tensor(&x));
        // T = {1}: block 1 is the leading factor
        assert_eq!(char_compose(0b01, &g, 2).unwrap(), g.tensor(&SignMatrix::ones(4, 4)));
        assert!(char_compose(0b100, &g, 2).is_err());
    }

    #[test]
    fn character_norm_shortcut() {
        let g = SignMatrix::s4();
        for t in 0..4 {
            let direct = char_compose(t, &g, 2).unwrap().spectral_norm().unwrap();
            assert!((char_compose_norm(t, &g, 2).unwrap() - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn parity_with_xor_has_rank_one() {
        let c = compose_block(&BoolFunction::parity(2), &SignMatrix::xor2(), 2).unwrap();
        assert_eq!(c.matrix, SignMatrix::xor2().tensor(&SignMatrix::xor2()));
        assert_eq!(exact_rank(&c.matrix), 1);
        assert!(c.fourier_checked);
        let r = verify_rank_theorem(&BoolFunction::parity(2), &SignMatrix::xor2()).unwrap();
        assert!(r.equal && r.formula == 1);
    }

    #[test]
    fn constant_gives_all_ones() {
        let one = BoolFunction::constant(2, 1).unwrap();
        let c = compose_block(&one, &SignMatrix::s4(), 2).unwrap();
        assert_eq!(c.matrix, SignMatrix::ones(16, 16));
        let r = verify_rank_theorem(&one, &SignMatrix::s6()).unwrap();
        assert_eq!((r.formula, r.exact_rank), (1, 1));
    }

    #[test]
    fn and2_with_s4() {
        let r = verify_rank_theorem(&BoolFunction::and(2), &SignMatrix::s4()).unwrap();
        assert_eq!(r.rank_g, 2);
        assert_eq!(r.formula, 9);
        assert_eq!(r.exact_rank, 9);
        assert!(r.equal);
    }

    #[test]
    fn pointwise_semantics() {
        let f = BoolFunction::and(2);
        let g = SignMatrix::s4();
        let m = compose_block(&f, &g, 2).unwrap().matrix;
        for x1 in 0..4 {
            for x2 in 0..4 {
                for y1 in 0..4 {
                    for y2 in 0..4 {
                        let z = usize::from(g.get(x1, y1) < 0) | usize::from(g.get(x2, y2) < 0) << 1;
                        assert_eq!(m.get(4 * x1 + x2, 4 * y1 + y2), f.eval(z));
                    }
                }
            }
        }
    }

    #[test]
    fn rectangular_inner_matrix() {
        let g = SignMatrix::s4().tensor(&SignMatrix::ones(1, 2));
        let f = BoolFunction::and(2);
        let c = compose_block(&f, &g, 2).unwrap();
        assert_eq!(c.matrix.dims(), (16, 64));
        assert!(c.fourier_checked);
    }

    #[test]
    fn size_cap_and_arity() {
        let f = BoolFunction::parity(3);
        let err = compose_block_capped(&f, &SignMatrix::s6(), 3, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource { required: 46656, .. }));
        assert!(compose_block(&f, &SignMatrix::s4(), 2).is_err());
    }

    #[test]
    fn orthogonality_examples() {
        let r = verify_orthogonality(&SignMatrix::s4(), 2).unwrap();
        assert!(r.orthogonal);
        assert_eq!(r.pairs_checked, 6);
        let r = verify_orthogonality(&SignMatrix::ones(2, 2), 1).unwrap();
        assert!(!r.orthogonal);
        assert_eq!(r.first_violation, Some((0, 1)));
        assert!(verify_orthogonality(&SignMatrix::xor2(), 1).unwrap().orthogonal);
        for n in 1..=3 {
            assert!(verify_orthogonality(&SignMatrix::s4(), n).unwrap().orthogonal);
        }
    }

    #[test]
    fn rank_theorem_rejects_unbalanced() {
        let r = verify_rank_theorem(&BoolFunction::and(1), &SignMatrix::hadamard2());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn parity_one_witness_is_scaled_s4() {
        let f = BoolFunction::parity(1);
        let w = dual_polynomial(&f, THIRD).unwrap();
        let g = SignMatrix::s4();
        let wm = build_witness(&f, &w, &g, None).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((wm.b.get(i, j) - g.get(i, j) as f64 / 16.0).abs() < 1e-12);
            }
        }
        assert!((wm.l1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_correlation_matches_dual() {
        let f = BoolFunction::parity(2);
        let w = dual_polynomial(&f, THIRD).unwrap();
        let wm = build_witness(&f, &w, &SignMatrix::s4(), None).unwrap();
        assert!((wm.correlation - w.correlation).abs() < 1e-10);
        assert!(wm.l1_ok && wm.correlation_ok && wm.bound_ok == Some(true));
    }

    #[test]
    fn witness_bound_holds() {
        for g in [SignMatrix::s4(), SignMatrix::s6()] {
            for f in [BoolFunction::parity(2), BoolFunction::and(2), BoolFunction::majority(3)] {
                let w = dual_polynomial(&f, THIRD).unwrap();
                let wm = build_witness(&f, &w, &g, None).unwrap();
                assert!((wm.l1 - 1.0).abs() < 1e-9);
                assert!(wm.correlation >= THIRD - 1e-8);
                assert_eq!(wm.bound_ok, Some(true), "{f} on {g}");
            }
        }
    }

    #[test]
    fn weighted_witness() {
        let f = BoolFunction::parity(2);
        let w = dual_at(&f, THIRD, 2).unwrap();
        let g = SignMatrix::xor2();
        let mu = DistributionMatrix::uniform(2, 2);
        let wm = build_witness(&f, &w, &g, Some(&mu)).unwrap();
        assert_eq!(wm.b.dims(), (4, 4));
        assert!((wm.l1 - 1.0).abs() < 1e-12);
        assert!((wm.correlation - w.correlation).abs() < 1e-12);

        let skew = DistributionMatrix::new(Matrix::from_vec(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap()).unwrap();
        assert!(matches!(build_witness(&f, &w, &g, Some(&skew)), Err(Error::Precondition(_))));
        assert!(matches!(
            build_witness(&f, &w, &SignMatrix::hadamard2(), None),
            Err(Error::Precondition(_))
        ));
    }
}
