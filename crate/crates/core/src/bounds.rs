//! Discrepancy, γ₂* enclosures, spectral-discrepancy certificates and the
//! lower-bound evaluators for block compositions.
//!
//! Every evaluator returns a [`BoundReport`] whose `main_term` excludes the
//! unspecified additive constants; those are mentioned in `warnings`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::approx::approx_degree;
use crate::boolfn::BoolFunction;
use crate::error::{Error, Result};
use crate::matrix::{
    balance_check, exact_rank, DistributionMatrix, RealMatrix, SignMatrix, Spectral,
};
use crate::par;

/// Over-approximation of Grothendieck's constant.
pub const GROTHENDIECK_UPPER: f64 = 1.7823;

/// Default cap on the enumerated side of a discrepancy computation.
pub const DEFAULT_DISC_CAP: usize = 24;

const ADDITIVE_CONSTANT_NOTE: &str = "additive O(1) constant excluded from main_term";

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub theorem: String,
    pub applicable: bool,
    /// Present only when applicable.
    pub main_term: Option<f64>,
    pub intermediates: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Why the theorem does not apply.
    pub reason: Option<String>,
}

impl BoundReport {
    pub(crate) fn new(theorem: &str) -> Self {
        BoundReport {
            theorem: theorem.to_string(),
            applicable: false,
            main_term: None,
            intermediates: BTreeMap::new(),
            warnings: vec![ADDITIVE_CONSTANT_NOTE.to_string()],
            reason: None,
        }
    }

    pub(crate) fn set(&mut self, key: &str, value: f64) {
        self.intermediates.insert(key.to_string(), value);
    }

    pub(crate) fn accept(mut self, main_term: f64) -> Self {
        self.applicable = true;
        self.main_term = Some(main_term);
        self
    }

    pub(crate) fn reject(mut self, reason: impl Into<String>) -> Self {
        self.applicable = false;
        self.main_term = None;
        self.reason = Some(reason.into());
        self
    }

    /// True when the report applies and its main term is positive beyond
    /// rounding noise.
    pub fn is_informative(&self) -> bool {
        self.applicable && self.main_term.is_some_and(|m| m > 1e-9)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShaltielReport {
    pub spectral_norm: f64,
    pub size: usize,
    /// `‖A‖ / √size`.
    pub normalized_norm: f64,
    /// `(‖A‖/√size)³ / 108`.
    pub lhs: f64,
    pub disc_uniform: f64,
    pub holds: bool,
    /// `disc_U(A) <= ‖A‖/√size`.
    pub upper_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralDiscCert {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub mu: DistributionMatrix,
    pub r: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralDiscReport {
    pub size: usize,
    /// `Σ μ A'`.
    pub bias: f64,
    pub weighted_norm: f64,
    pub abs_weighted_norm: f64,
    pub balanced: bool,
    pub norm_condition: bool,
    pub abs_norm_condition: bool,
    /// Smallest `r` meeting the two norm conditions for this `(A', μ)`.
    pub minimal_r: f64,
    pub valid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxTraceReport {
    pub inner: f64,
    pub witness_l1: f64,
    pub witness_norm: f64,
    pub trace_lb: f64,
    pub gamma2_lb: f64,
    /// `log₂ gamma2_lb`, when positive lower bound is available.
    pub qcc_main_term: Option<f64>,
    pub applicable: bool,
}

/// `disc_P(A) = max_{x,y} |xᵀ (A•P) y|` over 0/1 vectors.
pub fn discrepancy(a: &SignMatrix, p: &DistributionMatrix) -> Result<f64> {
    discrepancy_capped(a, p, DEFAULT_DISC_CAP)
}

pub fn discrepancy_capped(a: &SignMatrix, p: &DistributionMatrix, cap: usize) -> Result<f64> {
    max_rectangle(&p.weight(a)?, cap)
}

/// `max_{x,y} |xᵀ W y|` over 0/1 vectors. Subsets of the shorter side are
/// enumerated in Gray-code order; the other side is optimised in closed form.
pub fn max_rectangle(w: &RealMatrix, cap: usize) -> Result<f64> {
    let w = if w.rows() > w.cols() { w.transpose() } else { w.clone() };
    let (m, n) = w.dims();
    if m > cap || m >= 63 {
        return Err(Error::Resource {
            what: format!(
                "discrepancy enumeration over 2^{m} subsets; use disc <= ||A||/sqrt(size) instead"
            ),
            required: 1u128 << m.min(127),
            cap: 1u128 << cap.min(127),
        });
    }
    let chunk_bits = m.min(12);
    let chunks = 1usize << (m - chunk_bits);
    Ok(par::max_f64(0..chunks, |c| {
        let start = c << chunk_bits;
        let end = start + (1usize << chunk_bits);
        let mut sums = vec![0.0; n];
        let code = start ^ (start >> 1);
        for i in (0..m).filter(|i| code >> i & 1 == 1) {
            for (s, v) in sums.iter_mut().zip(w.row(i)) {
                *s += v;
            }
        }
        let mut best = best_columns(&sums);
        for k in start + 1..end {
            let bit = k.trailing_zeros() as usize;
            let gray = k ^ (k >> 1);
            let sign = if gray >> bit & 1 == 1 { 1.0 } else { -1.0 };
            for (s, v) in sums.iter_mut().zip(w.row(bit)) {
                *s += sign * v;
            }
            best = best.max(best_columns(&sums));
        }
        best
    }))
}

fn best_columns(sums: &[f64]) -> f64 {
    let (mut pos, mut neg) = (0.0, 0.0);
    for &s in sums {
        if s > 0.0 {
            pos += s;
        } else {
            neg -= s;
        }
    }
    f64::max(pos, neg)
}

pub fn shaltiel_verify(a: &SignMatrix) -> Result<ShaltielReport> {
    let norm = a.spectral_norm()?;
    let size = a.size();
    let normalized = norm / (size as f64).sqrt();
    let lhs = normalized.powi(3) / 108.0;
    let disc = discrepancy(a, &DistributionMatrix::uniform(a.rows(), a.cols()))?;
    Ok(ShaltielReport {
        spectral_norm: norm,
        size,
        normalized_norm: normalized,
        lhs,
        disc_uniform: disc,
        holds: lhs <= disc + 1e-9,
        upper_holds: disc <= normalized + 1e-9,
    })
}

/// Certified enclosure `[disc_P(A), K_G · disc_P(A)]` of `γ₂*(A•P)`.
pub fn gamma2_star_interval(a: &SignMatrix, p: &DistributionMatrix) -> Result<Interval> {
    let disc = discrepancy(a, p)?;
    Ok(Interval {
        lower: disc,
        upper: GROTHENDIECK_UPPER * disc,
    })
}

/// Checks a spectral-discrepancy certificate for `a`.
pub fn verify_spectral_disc(a: &SignMatrix, cert: &SpectralDiscCert) -> Result<SpectralDiscReport> {
    if cert.rows.is_empty() || cert.cols.is_empty() {
        return Err(Error::arg("certificate index sets must be nonempty"));
    }
    let sub = a.submatrix(&cert.rows, &cert.cols)?;
    if cert.mu.dims() != sub.dims() {
        return Err(Error::arg(format!(
            "distribution is {}x{}, submatrix is {}x{}",
            cert.mu.dims().0,
            cert.mu.dims().1,
            sub.rows(),
            sub.cols()
        )));
    }
    let weighted = cert.mu.weight(&sub)?;
    let bias: f64 = weighted.data().iter().sum();
    let root = (sub.size() as f64).sqrt();
    let weighted_norm = weighted.spectral_norm()?;
    let abs_weighted_norm = weighted.abs().spectral_norm()?;
    let balanced = bias.abs() <= 1e-9;
    let norm_condition = weighted_norm <= cert.r / root + 1e-9;
    let abs_norm_condition = abs_weighted_norm <= (1.0 + cert.r) / root + 1e-9;
    let minimal_r = f64::max(root * weighted_norm, root * abs_weighted_norm - 1.0);
    Ok(SpectralDiscReport {
        size: sub.size(),
        bias,
        weighted_norm,
        abs_weighted_norm,
        balanced,
        norm_condition,
        abs_norm_condition,
        minimal_r,
        valid: balanced && norm_condition && abs_norm_condition,
    })
}

/// Lower bounds from a witness `B`: the ε-approximate trace norm, the
/// corresponding γ₂ bound and its logarithm.
pub fn approx_trace_lower(a: &SignMatrix, b: &RealMatrix, epsilon: f64) -> Result<ApproxTraceReport> {
    if a.dims() != b.dims() {
        return Err(Error::dims(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    let witness_norm = b.spectral_norm()?;
    if !(witness_norm > 0.0) {
        return Err(Error::arg("witness matrix has zero spectral norm"));
    }
    let inner = a.to_real().inner(b)?;
    let witness_l1 = b.l1_norm();
    let trace_lb = (inner - epsilon * witness_l1) / witness_norm;
    let gamma2_lb = trace_lb / (a.size() as f64).sqrt();
    let applicable = trace_lb > 0.0;
    Ok(ApproxTraceReport {
        inner,
        witness_l1,
        witness_norm,
        trace_lb,
        gamma2_lb,
        qcc_main_term: applicable.then(|| gamma2_lb.log2()),
        applicable,
    })
}

/// `deg_{ε₀}(f) · log₂(√size(M_g)/‖M_g‖)` for strongly balanced `g`.
pub fn sherstov_bound(f: &BoolFunction, g: &SignMatrix, epsilon0: f64) -> Result<BoundReport> {
    check_open_unit(epsilon0, "epsilon0")?;
    let mut rep = BoundReport::new("sherstov");
    rep.set("epsilon0", epsilon0);
    rep.set("size_g", g.size() as f64);
    if !balance_check(g).strongly_balanced {
        return Ok(rep.reject("inner matrix is not strongly balanced"));
    }
    let d = approx_degree(f, epsilon0)?.d;
    let norm = g.spectral_norm()?;
    let ratio = (g.size() as f64).sqrt() / norm;
    let rank = exact_rank(g);
    rep.set("d", d as f64);
    rep.set("spectral_norm_g", norm);
    rep.set("ratio", ratio);
    rep.set("log2_ratio", ratio.log2());
    rep.set("rank_g", rank as f64);
    if rank == 1 {
        rep.warnings
            .push("inner matrix has rank 1: the main term is zero and the bound is trivial".into());
    }
    let main = d as f64 * ratio.log2();
    Ok(rep.accept(main))
}

/// `(1/3) deg_{1/3}(f) (log₂(1/disc_U(M_g)) - 7)` for strongly balanced `g`.
pub fn disc_bound(f: &BoolFunction, g: &SignMatrix) -> Result<BoundReport> {
    let mut rep = BoundReport::new("disc");
    rep.set("size_g", g.size() as f64);
    if !balance_check(g).strongly_balanced {
        return Ok(rep.reject("inner matrix is not strongly balanced"));
    }
    let d = approx_degree(f, 1.0 / 3.0)?.d;
    let disc = discrepancy(g, &DistributionMatrix::uniform(g.rows(), g.cols()))?;
    let inner = (1.0 / disc).log2() - 7.0;
    rep.set("d", d as f64);
    rep.set("disc_uniform", disc);
    rep.set("log2_inverse_disc_minus_7", inner);
    if inner <= 0.0 {
        rep.warnings.push(format!(
            "disc_U = {disc} is at least 2^-7, so the bound is vacuous"
        ));
    }
    Ok(rep.accept(d as f64 * inner / 3.0))
}

/// Main term `deg_{ε₀}(f)` provided `γ₂*(M_g•μ) <= d/(2en)`, tested with the
/// upper end of the Grothendieck enclosure.
pub fn shizhu_bound(
    f: &BoolFunction,
    g: &SignMatrix,
    mu: &DistributionMatrix,
    epsilon0: f64,
) -> Result<BoundReport> {
    check_open_unit(epsilon0, "epsilon0")?;
    if mu.dims() != g.dims() {
        return Err(Error::dims(
            format!("{}x{}", g.rows(), g.cols()),
            format!("{}x{}", mu.dims().0, mu.dims().1),
        ));
    }
    let bias = mu.bias(g)?;
    if bias.abs() > 1e-9 {
        return Err(Error::pre(format!(
            "distribution is not balanced with respect to g (bias {bias:e})"
        )));
    }
    let mut rep = BoundReport::new("shizhu");
    let n = f.arity();
    let d = approx_degree(f, epsilon0)?.d;
    rep.set("epsilon0", epsilon0);
    rep.set("d", d as f64);
    rep.set("n", n as f64);
    rep.set("bias", bias);
    let upper = match gamma2_star_interval(g, mu) {
        Ok(iv) => {
            rep.set("gamma2_star_lower", iv.lower);
            iv.upper
        }
        Err(Error::Resource { .. }) => {
            // |xᵀ M y| <= ‖x‖‖y‖‖M‖
            let w = mu.weight(g)?;
            let disc_upper = ((g.rows() * g.cols()) as f64).sqrt() * w.spectral_norm()?;
            rep.warnings.push(
                "discrepancy enumeration capped; using disc <= sqrt(mn) ||M_g • mu||".into(),
            );
            GROTHENDIECK_UPPER * disc_upper
        }
        Err(e) => return Err(e),
    };
    let threshold = d as f64 / (2.0 * std::f64::consts::E * n as f64);
    rep.set("gamma2_star_upper", upper);
    rep.set("threshold", threshold);
    rep.set("gap", upper - threshold);
    rep.warnings
        .push("assumes gamma2*(mu) <= 1 for the product step, not recomputed".into());
    if upper <= threshold {
        Ok(rep.accept(d as f64))
    } else {
        Ok(rep.reject(format!(
            "gamma2* upper bound {upper:.6} exceeds d/(2en) = {threshold:.6}"
        )))
    }
}

/// Main term `deg_{ε₀}(f)` provided the certified `ρ` satisfies
/// `ρ <= d/(2en)`.
pub fn shizhu_rho_bound(
    f: &BoolFunction,
    g: &SignMatrix,
    cert: &SpectralDiscCert,
    epsilon0: f64,
) -> Result<BoundReport> {
    check_open_unit(epsilon0, "epsilon0")?;
    let mut rep = BoundReport::new("shizhu-rho");
    let n = f.arity();
    let d = approx_degree(f, epsilon0)?.d;
    let check = verify_spectral_disc(g, cert)?;
    let threshold = d as f64 / (2.0 * std::f64::consts::E * n as f64);
    rep.set("epsilon0", epsilon0);
    rep.set("d", d as f64);
    rep.set("n", n as f64);
    rep.set("rho_certified", check.minimal_r);
    rep.set("threshold", threshold);
    if !check.balanced {
        return Ok(rep.reject("certificate distribution is not balanced on the submatrix"));
    }
    if check.minimal_r <= threshold {
        Ok(rep.accept(d as f64))
    } else {
        Ok(rep.reject(format!(
            "certified rho {:.6} exceeds d/(2en) = {threshold:.6}",
            check.minimal_r
        )))
    }
}

fn check_open_unit(v: f64, name: &str) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::arg(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::dual_polynomial;
    use crate::composer::{build_witness, compose_block};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use crate::matrix::Matrix;

    const THIRD: f64 = 1.0 / 3.0;

    fn unif(a: &SignMatrix) -> DistributionMatrix {
        DistributionMatrix::uniform(a.rows(), a.cols())
    }

    #[test]
    fn discrepancy_oracle_values() {
        let cases = [
            (SignMatrix::hadamard2(), 0.5),
            (SignMatrix::ones(3, 5), 1.0),
            (SignMatrix::s4(), 0.125),
            (SignMatrix::s6(), 1.0 / 9.0),
            (SignMatrix::xor2(), 0.25),
        ];
        for (a, want) in cases {
            let got = discrepancy(&a, &unif(&a)).unwrap();
            assert!((got - want).abs() < 1e-12, "{a}: {got}");
        }
    }

    #[test]
    fn discrepancy_brute_force_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let (m, n) = (rng.random_range(1..=5), rng.random_range(1..=7));
            let a = SignMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.5) { 1 } else { -1 }).unwrap();
            let w: Vec<f64> = (0..m * n).map(|_| rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let p = DistributionMatrix::new(Matrix::from_vec(m, n, w.iter().map(|v| v / total).collect()).unwrap())
                .unwrap();
            let mut brute: f64 = 0.0;
            for x in 0..1usize << m {
                for y in 0..1usize << n {
                    let mut s = 0.0;
                    for i in (0..m).filter(|i| x >> i & 1 == 1) {
                        for j in (0..n).filter(|j| y >> j & 1 == 1) {
                            s += a.get(i, j) as f64 * p.get(i, j);
                        }
                    }
                    brute = brute.max(s.abs());
                }
            }
            let got = discrepancy(&a, &p).unwrap();
            assert!((got - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn discrepancy_cap() {
        let a = SignMatrix::ones(6, 8);
        assert!(matches!(discrepancy_capped(&a, &unif(&a), 5), Err(Error::Resource { .. })));
        assert!(discrepancy_capped(&a, &unif(&a), 6).is_ok());
    }

    #[test]
    fn discrepancy_is_thread_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = SignMatrix::from_fn(14, 16, |_, _| if rng.random_bool(0.5) { 1 } else { -1 }).unwrap();
        let p = unif(&a);
        par::set_parallel(false);
        let seq = discrepancy(&a, &p).unwrap();
        par::set_parallel(true);
        let parl = discrepancy(&a, &p).unwrap();
        assert_eq!(seq.to_bits(), parl.to_bits());
    }

    #[test]
    fn shaltiel_examples() {
        let h = shaltiel_verify(&SignMatrix::hadamard2()).unwrap();
        assert!((h.lhs - 0.5f64.powf(1.5) / 108.0).abs() < 1e-12);
        assert!(h.holds && h.upper_holds);
        let j = shaltiel_verify(&SignMatrix::ones(4, 4)).unwrap();
        assert!((j.lhs - 1.0 / 108.0).abs() < 1e-12);
        assert!(j.holds);
    }

    #[test]
    fn gamma2_interval_examples() {
        let h = SignMatrix::hadamard2();
        let iv = gamma2_star_interval(&h, &unif(&h)).unwrap();
        assert!((iv.lower - 0.5).abs() < 1e-12 && (iv.upper - 0.89115).abs() < 1e-12);
        let j = SignMatrix::ones(2, 2);
        let iv = gamma2_star_interval(&j, &unif(&j)).unwrap();
        assert!((iv.lower - 1.0).abs() < 1e-12 && (iv.upper - 1.7823).abs() < 1e-12);
    }

    #[test]
    fn spectral_disc_certificates() {
        let x = SignMatrix::xor2();
        let cert = SpectralDiscCert {
            rows: vec![0, 1],
            cols: vec![0, 1],
            mu: unif(&x),
            r: 1.0,
        };
        let rep = verify_spectral_disc(&x, &cert).unwrap();
        // ‖XOR₂/4‖ = 1/2, so √4 · 1/2 = 1; |XOR₂/4| = J/4 also has norm 1/2
        assert!(rep.balanced);
        assert!((rep.minimal_r - 1.0).abs() < 1e-12);
        assert!(rep.valid);

        // uniform μ: condition (3) always holds
        let s6 = SignMatrix::s6();
        let cert = SpectralDiscCert { rows: (0..6).collect(), cols: (0..6).collect(), mu: unif(&s6), r: 0.0 };
        assert!(verify_spectral_disc(&s6, &cert).unwrap().abs_norm_condition);

        let skew = DistributionMatrix::new(Matrix::from_vec(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap()).unwrap();
        let cert = SpectralDiscCert { rows: vec![0, 1], cols: vec![0, 1], mu: skew, r: 10.0 };
        let rep = verify_spectral_disc(&x, &cert).unwrap();
        assert!(!rep.balanced && !rep.valid);

        let cert = SpectralDiscCert { rows: vec![0], cols: vec![0, 1], mu: unif(&x), r: 1.0 };
        assert!(verify_spectral_disc(&x, &cert).is_err());
    }

    #[test]
    fn approx_trace_on_hadamard() {
        let h = SignMatrix::hadamard2();
        let b = h.to_real().scale(0.25);
        let rep = approx_trace_lower(&h, &b, 0.0).unwrap();
        assert!((rep.inner - 1.0).abs() < 1e-12);
        assert!((rep.witness_norm - 2f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((rep.trace_lb - 2.0 * 2f64.sqrt()).abs() < 1e-10);
        let rep = approx_trace_lower(&h, &b, 1.0).unwrap();
        assert!(rep.trace_lb <= 1e-12 && !rep.applicable && rep.qcc_main_term.is_none());
        let zero = Matrix::from_fn(2, 2, |_, _| 0.0);
        assert!(approx_trace_lower(&h, &zero, 0.1).is_err());
    }

    #[test]
    fn proof_chain_relation() {
        // witness at ε₀ = 1/3 evaluated at ε = 1/4 leaves a 1/12 margin
        for g in [SignMatrix::s4(), SignMatrix::s6()] {
            for f in [BoolFunction::parity(2), BoolFunction::and(2), BoolFunction::or(2)] {
                let w = dual_polynomial(&f, THIRD).unwrap();
                let wm = build_witness(&f, &w, &g, None).unwrap();
                let m = compose_block(&f, &g, 2).unwrap().matrix;
                let rep = approx_trace_lower(&m, &wm.b, 0.25).unwrap();
                let lhs = rep.trace_lb / (m.size() as f64).sqrt();
                let ratio = (g.size() as f64).sqrt() / g.spectral_norm().unwrap();
                let rhs = ratio.powi(w.d as i32) / 12.0;
                assert!(lhs >= rhs - 1e-8, "{f}: {lhs} < {rhs}");
            }
        }
    }

    #[test]
    fn sherstov_examples() {
        let r = sherstov_bound(&BoolFunction::parity(2), &SignMatrix::s4(), THIRD).unwrap();
        assert!((r.main_term.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(r.intermediates["d"], 2.0);
        assert!((r.intermediates["ratio"] - 2f64.sqrt()).abs() < 1e-12);

        let r = sherstov_bound(&BoolFunction::and(2), &SignMatrix::xor2(), THIRD).unwrap();
        assert!(r.main_term.unwrap().abs() < 1e-12);
        assert!(r.warnings.iter().any(|w| w.contains("rank 1")));
        assert!(!r.is_informative());

        let r = sherstov_bound(&BoolFunction::constant(2, 1).unwrap(), &SignMatrix::s4(), THIRD).unwrap();
        assert_eq!(r.main_term, Some(0.0));

        let r = sherstov_bound(&BoolFunction::parity(2), &SignMatrix::hadamard2(), THIRD).unwrap();
        assert!(!r.applicable && r.main_term.is_none() && r.reason.is_some());
        assert!(sherstov_bound(&BoolFunction::parity(2), &SignMatrix::s4(), 0.0).is_err());
    }

    #[test]
    fn sherstov_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = BoolFunction::majority(3);
        let g = SignMatrix::s6();
        let base = sherstov_bound(&f, &g, THIRD).unwrap().main_term.unwrap();
        for _ in 0..10 {
            let mut rp: Vec<usize> = (0..6).collect();
            let mut cp: Vec<usize> = (0..6).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            let pg = g.permute(&rp, &cp).unwrap();
            let m = sherstov_bound(&f, &pg, THIRD).unwrap().main_term.unwrap();
            assert!((m - base).abs() < 1e-9);
        }
    }

    #[test]
    fn disc_bound_examples() {
        let r = disc_bound(&BoolFunction::parity(2), &SignMatrix::s4()).unwrap();
        // log₂ 8 - 7 = -4, d = 2
        assert!((r.main_term.unwrap() - 2.0 * (-4.0) / 3.0).abs() < 1e-9);
        assert!(r.warnings.iter().any(|w| w.contains("vacuous")));
        let r = disc_bound(&BoolFunction::constant(3, 1).unwrap(), &SignMatrix::s6()).unwrap();
        assert_eq!(r.main_term, Some(0.0));
    }

    #[test]
    fn shizhu_examples() {
        let x = SignMatrix::xor2();
        let mu = unif(&x);
        // γ₂* upper = 1.7823/4 ≈ 0.4456 against d/(2en) = 2/(4e) ≈ 0.1839
        let r = shizhu_bound(&BoolFunction::parity(2), &x, &mu, THIRD).unwrap();
        assert!(!r.applicable);
        assert!((r.intermediates["gamma2_star_upper"] - 1.7823 / 4.0).abs() < 1e-12);
        assert!(r.intermediates["gap"] > 0.0);

        let r = shizhu_bound(&BoolFunction::constant(1, 1).unwrap(), &x, &mu, THIRD).unwrap();
        assert!(!r.applicable);

        let skew = DistributionMatrix::new(Matrix::from_vec(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap()).unwrap();
        assert!(matches!(
            shizhu_bound(&BoolFunction::parity(2), &x, &skew, THIRD),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn shizhu_rho_examples() {
        let s6 = SignMatrix::s6();
        let cert = SpectralDiscCert { rows: (0..6).collect(), cols: (0..6).collect(), mu: unif(&s6), r: 2.0 };
        let r = shizhu_rho_bound(&BoolFunction::parity(2), &s6, &cert, THIRD).unwrap();
        // √36 · ‖S6‖/36 = 2√3/6, above d/(2en) = 1/(2e)
        assert!((r.intermediates["rho_certified"] - 12f64.sqrt() / 6.0).abs() < 1e-9);
        assert!(!r.applicable);
    }

    #[test]
    fn measure_inequalities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..60 {
            let (m, n) = (rng.random_range(1..=8), rng.random_range(1..=8));
            let a = SignMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.5) { 1 } else { -1 }).unwrap();
            let rep = shaltiel_verify(&a).unwrap();
            assert!(rep.holds && rep.upper_holds);
        }
    }
}
