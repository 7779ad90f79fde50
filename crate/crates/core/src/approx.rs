//! Approximate degree by linear programming, with dual certificates.

use serde::Serialize;

use crate::boolfn::{self, character_eval, wht, BoolFunction, FourierSpectrum, RealPointFunction};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense};

/// Largest arity accepted by the LP path.
pub const MAX_LP_ARITY: usize = 12;

/// Slack granted to `E_d <= ε` when deciding feasibility.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct ChebyshevFit {
    pub degree: usize,
    /// `min ||f - p||_∞` over polynomials `p` of degree at most `degree`.
    pub error: f64,
    pub approximant: FourierSpectrum,
    pub pivots: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpDiagnostics {
    /// `"exact"` for the ε = 0 path, `"lp"` otherwise.
    pub method: &'static str,
    pub programs_solved: usize,
    pub pivots: usize,
    pub status: LpStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxDegreeResult {
    pub d: usize,
    pub epsilon: f64,
    pub approximant: FourierSpectrum,
    /// `max_x |f(x) - f'(x)|`, recomputed from the approximant.
    pub max_error: f64,
    /// Best uniform error at each degree tried, starting from 0.
    pub errors_by_degree: Vec<f64>,
    pub lp_status: LpDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualWitness {
    pub v: RealPointFunction,
    pub d: usize,
    pub epsilon: f64,
    pub correlation: f64,
    pub l1: f64,
}

/// Margins are signed slacks: nonnegative means the property holds exactly.
#[derive(Clone, Debug, Serialize)]
pub struct DualVerification {
    pub max_low_degree_correlation: f64,
    pub orthogonality_margin: f64,
    pub orthogonality_ok: bool,
    pub l1: f64,
    pub l1_margin: f64,
    pub l1_ok: bool,
    pub correlation: f64,
    pub correlation_margin: f64,
    pub correlation_ok: bool,
    pub passed: bool,
}

/// Subsets of `{1..n}` of size at most `d`, as masks in increasing order.
pub fn low_degree_masks(n: usize, d: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|t| t.count_ones() as usize <= d)
        .collect()
}

/// Best uniform approximation of `f` by polynomials of degree `<= d`.
pub fn chebyshev_error(f: &BoolFunction, d: usize) -> Result<ChebyshevFit> {
    let n = f.arity();
    check_lp_arity(n)?;
    if d >= boolfn::degree(f) {
        return Ok(ChebyshevFit {
            degree: d,
            error: 0.0,
            approximant: f.spectrum(),
            pivots: 0,
        });
    }
    let masks = low_degree_masks(n, d);
    let k = masks.len();
    // variables: coefficients c_T (free), then t >= 0; minimise t
    let mut lp = LinearProgram::new(k + 1, Sense::Minimize);
    for j in 0..k {
        lp.set_free(j);
    }
    lp.set_objective(k, 1.0);
    for x in 0..1usize << n {
        let chi: Vec<f64> = masks.iter().map(|&t| character_eval(t, x) as f64).collect();
        let fx = f.eval(x) as f64;
        // p(x) - t <= f(x)  and  -p(x) - t <= -f(x)
        let mut up = chi.clone();
        up.push(-1.0);
        lp.add_constraint(up, Relation::Le, fx)?;
        let mut down: Vec<f64> = chi.iter().map(|c| -c).collect();
        down.push(-1.0);
        lp.add_constraint(down, Relation::Le, -fx)?;
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!(
            "Chebyshev program at degree {d} ended {:?}",
            sol.status
        )));
    }
    let mut coeffs = vec![0.0; 1 << n];
    for (j, &t) in masks.iter().enumerate() {
        coeffs[t] = sol.x[j];
    }
    let approximant = FourierSpectrum { n, coeffs };
    Ok(ChebyshevFit {
        degree: d,
        error: uniform_error(f, &approximant).max(sol.objective),
        approximant,
        pivots: sol.pivots,
    })
}

/// The ε-approximate degree of `f` with a feasible approximant.
pub fn approx_degree(f: &BoolFunction, epsilon: f64) -> Result<ApproxDegreeResult> {
    check_epsilon(epsilon)?;
    let n = f.arity();
    let exact = boolfn::degree(f);
    if epsilon == 0.0 {
        let approximant = f.spectrum();
        return Ok(ApproxDegreeResult {
            d: exact,
            epsilon,
            max_error: uniform_error(f, &approximant),
            approximant,
            errors_by_degree: Vec::new(),
            lp_status: LpDiagnostics {
                method: "exact",
                programs_solved: 0,
                pivots: 0,
                status: LpStatus::Optimal,
            },
        });
    }
    check_lp_arity(n)?;
    let mut errors = Vec::new();
    let (mut programs, mut pivots) = (0, 0);
    for d in 0..=n {
        let fit = chebyshev_error(f, d)?;
        if d < exact {
            programs += 1;
        }
        pivots += fit.pivots;
        errors.push(fit.error);
        if fit.error <= epsilon + FEASIBILITY_TOLERANCE {
            let max_error = uniform_error(f, &fit.approximant);
            if max_error > epsilon + 1e-8 || fit.approximant.degree_above(0.0) > d {
                return Err(Error::Lp(format!(
                    "approximant at degree {d} fails its own check (error {max_error})"
                )));
            }
            return Ok(ApproxDegreeResult {
                d,
                epsilon,
                approximant: fit.approximant,
                max_error,
                errors_by_degree: errors,
                lp_status: LpDiagnostics {
                    method: "lp",
                    programs_solved: programs,
                    pivots,
                    status: LpStatus::Optimal,
                },
            });
        }
    }
    Err(Error::Lp("no degree up to n met the error target".into()))
}

/// Solves the dual program at threshold `d`: maximise `Σ v f` subject to
/// `Σ|v| <= 1` and `v ⟂ χ_T` for `|T| < d`. Returns the optimum and `v`.
pub fn dual_lp(f: &BoolFunction, d: usize) -> Result<(f64, RealPointFunction)> {
    let n = f.arity();
    check_lp_arity(n)?;
    let size = 1usize << n;
    // v = p - q with p, q >= 0
    let mut lp = LinearProgram::new(2 * size, Sense::Maximize);
    for x in 0..size {
        let fx = f.eval(x) as f64;
        lp.set_objective(x, fx);
        lp.set_objective(size + x, -fx);
    }
    lp.add_constraint(vec![1.0; 2 * size], Relation::Le, 1.0)?;
    for t in (0..size).filter(|t| (t.count_ones() as usize) < d) {
        let mut row = vec![0.0; 2 * size];
        for x in 0..size {
            let c = character_eval(t, x) as f64;
            row[x] = c;
            row[size + x] = -c;
        }
        lp.add_constraint(row, Relation::Eq, 0.0)?;
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("dual program at threshold {d} ended {:?}", sol.status)));
    }
    let v = (0..size).map(|x| sol.x[x] - sol.x[size + x]).collect();
    Ok((sol.objective, RealPointFunction::new(n, v)?))
}

/// A dual polynomial certifying `deg_ε(f) >= d`, scaled to unit `ℓ₁` mass.
pub fn dual_polynomial(f: &BoolFunction, epsilon: f64) -> Result<DualWitness> {
    let d = approx_degree(f, epsilon)?.d;
    dual_at(f, epsilon, d)
}

/// Like [`dual_polynomial`] with the threshold supplied.
pub fn dual_at(f: &BoolFunction, epsilon: f64, d: usize) -> Result<DualWitness> {
    check_epsilon(epsilon)?;
    let n = f.arity();
    let v = if d == 0 {
        f.to_real().scale(1.0 / (1u64 << n) as f64)
    } else {
        let (_, v) = dual_lp(f, d)?;
        let l1 = v.l1();
        if !(l1 > 0.0) {
            return Err(Error::Lp(format!("dual program at threshold {d} returned v = 0")));
        }
        v.scale(1.0 / l1)
    };
    Ok(DualWitness {
        correlation: v.inner(&f.to_real().table),
        l1: v.l1(),
        v,
        d,
        epsilon,
    })
}

/// Re-checks the three witness properties directly.
pub fn verify_dual(w: &DualWitness, f: &BoolFunction) -> Result<DualVerification> {
    if w.v.n != f.arity() {
        return Err(Error::dims(f.arity(), w.v.n));
    }
    let size = w.v.table.len() as f64;
    let spec = wht(&w.v);
    let max_low = spec
        .coeffs
        .iter()
        .enumerate()
        .filter(|(t, _)| (t.count_ones() as usize) < w.d)
        .map(|(_, c)| (c * size).abs())
        .fold(0.0, f64::max);
    let l1 = w.v.l1();
    let correlation = w.v.inner(&f.to_real().table);
    let orthogonality_margin = -max_low;
    let l1_margin = 1.0 - l1;
    let correlation_margin = correlation - w.epsilon;
    let orthogonality_ok = orthogonality_margin >= -1e-8;
    let l1_ok = l1_margin >= -1e-9;
    let correlation_ok = correlation_margin >= -1e-8;
    Ok(DualVerification {
        max_low_degree_correlation: max_low,
        orthogonality_margin,
        orthogonality_ok,
        l1,
        l1_margin,
        l1_ok,
        correlation,
        correlation_margin,
        correlation_ok,
        passed: orthogonality_ok && l1_ok && correlation_ok,
    })
}

fn uniform_error(f: &BoolFunction, p: &FourierSpectrum) -> f64 {
    let values = boolfn::iwht(p);
    values
        .table
        .iter()
        .zip(f.table())
        .map(|(v, &fx)| (v - fx as f64).abs())
        .fold(0.0, f64::max)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::arg(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    Ok(())
}

fn check_lp_arity(n: usize) -> Result<()> {
    if n > MAX_LP_ARITY {
        return Err(Error::Resource {
            what: "approximate-degree linear program arity".into(),
            required: n as u128,
            cap: MAX_LP_ARITY as u128,
        });
    }
    Ok(())
}
