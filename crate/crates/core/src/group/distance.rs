use num_complex::Complex64;
use serde::Serialize;

use super::{CharacterTable, MAX_GROUP_ORDER};
use crate::approx::FEASIBILITY_TOLERANCE;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation, Sense};

/// Largest group order handed to the dense simplex solver.
pub const MAX_LP_ORDER: usize = 512;

/// Allowed imaginary residue of an approximant.
const IMAGINARY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub delta: f64,
    /// Coefficients `c_i` for the easy characters, in `easy` order.
    pub coefficients: Vec<Complex64>,
    pub status: LpStatus,
    pub pivots: usize,
}

fn check_inputs(f: &[f64], table: &CharacterTable, easy: &[usize]) -> Result<()> {
    if f.len() != table.order() {
        return Err(Error::dims(table.order(), f.len()));
    }
    if table.order() > MAX_LP_ORDER {
        return Err(Error::Resource {
            what: "group order for the linear program".into(),
            required: table.order() as u128,
            cap: MAX_LP_ORDER as u128,
        });
    }
    if let Some(&i) = easy.iter().find(|&&i| i >= table.h()) {
        return Err(Error::arg(format!("character index {i} out of range")));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("function values must be finite"));
    }
    Ok(())
}

/// `min δ` with `|f(g) - Re P(g)| <= δ` and `|Im P(g)|` negligible, where
/// `P = Σ_{i∈easy} c_i χ_i`.
pub fn distance_to_easy(f: &[f64], table: &CharacterTable, easy: &[usize]) -> Result<DistanceReport> {
    check_inputs(f, table, easy)?;
    let k = easy.len();
    let nv = 2 * k + 1;
    let delta = 2 * k;
    let mut lp = LinearProgram::new(nv, Sense::Minimize);
    for v in 0..2 * k {
        lp.set_free(v);
    }
    lp.set_objective(delta, 1.0);
    for (g, &fg) in f.iter().enumerate() {
        // P(g) = Σ (re + i·im)(a + i·b)
        let mut re_row = vec![0.0; nv];
        let mut im_row = vec![0.0; nv];
        for (slot, &i) in easy.iter().enumerate() {
            let c = table.value(i, g);
            re_row[2 * slot] = c.re;
            re_row[2 * slot + 1] = -c.im;
            im_row[2 * slot] = c.im;
            im_row[2 * slot + 1] = c.re;
        }
        let mut upper = re_row.clone();
        upper[delta] = -1.0;
        lp.add_constraint(upper, Relation::Le, fg)?;
        let mut lower = re_row;
        lower[delta] = 1.0;
        lp.add_constraint(lower, Relation::Ge, fg)?;
        if k > 0 {
            lp.add_constraint(im_row.clone(), Relation::Le, IMAGINARY_SLACK)?;
            lp.add_constraint(im_row, Relation::Ge, -IMAGINARY_SLACK)?;
        }
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("distance program ended {:?}", sol.status)));
    }
    Ok(DistanceReport {
        delta: sol.objective.max(0.0),
        coefficients: (0..k).map(|s| Complex64::new(sol.x[2 * s], sol.x[2 * s + 1])).collect(),
        status: sol.status,
        pivots: sol.pivots,
    })
}

/// A real function `h` with vanishing easy coefficients, `Σ|h| <= 2` and
/// correlation with `f` above the distance `δ`, plus the checks on it.
#[derive(Clone, Debug, Serialize)]
pub struct DualH {
    pub h: Vec<f64>,
    pub delta: f64,
    /// `Σ_g f(g) h(g)`.
    pub correlation: f64,
    pub l1: f64,
    /// `max_{i∈easy} |ĥ_i|`.
    pub max_easy_coefficient: f64,
    pub easy_ok: bool,
    pub l1_margin: f64,
    pub l1_ok: bool,
    pub correlation_margin: f64,
    pub correlation_ok: bool,
    /// `|ĥ_i| <= (|G|⁻¹ Σ|h|) max_g|χ_i(g)|` for every `i`.
    pub coefficient_bound_ok: bool,
    pub passed: bool,
}

/// Dual of [`distance_to_easy`]: maximise `Σ f v` over real `v` with
/// `Σ|v| <= 1` orthogonal to every easy character; returns `h = 2v`.
///
/// When `easy` is not closed under conjugation the real dual may fall short
/// of `δ`; the correlation check then fails and says so.
pub fn dual_h(f: &[f64], table: &CharacterTable, easy: &[usize]) -> Result<DualH> {
    check_inputs(f, table, easy)?;
    let primal = distance_to_easy(f, table, easy)?;
    let order = table.order();
    let mut lp = LinearProgram::new(2 * order, Sense::Maximize);
    for (g, &fg) in f.iter().enumerate() {
        lp.set_objective(g, fg);
        lp.set_objective(order + g, -fg);
    }
    lp.add_constraint(vec![1.0; 2 * order], Relation::Le, 1.0)?;
    for &i in easy {
        let row = table.row(i);
        let mut re = vec![0.0; 2 * order];
        let mut im = vec![0.0; 2 * order];
        for (g, c) in row.iter().enumerate() {
            re[g] = c.re;
            re[order + g] = -c.re;
            im[g] = c.im;
            im[order + g] = -c.im;
        }
        lp.add_constraint(re, Relation::Eq, 0.0)?;
        if im.iter().any(|&v| v != 0.0) {
            lp.add_constraint(im, Relation::Eq, 0.0)?;
        }
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!("dual program ended {:?}", sol.status)));
    }
    let h: Vec<f64> = (0..order).map(|g| 2.0 * (sol.x[g] - sol.x[order + g])).collect();
    Ok(verify_h(h, f, table, easy, primal.delta))
}

fn verify_h(h: Vec<f64>, f: &[f64], table: &CharacterTable, easy: &[usize], delta: f64) -> DualH {
    let hc: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let l1: f64 = h.iter().map(|v| v.abs()).sum();
    let correlation: f64 = f.iter().zip(&h).map(|(a, b)| a * b).sum();
    let max_easy_coefficient = easy
        .iter()
        .map(|&i| table.coefficient(i, &hc).norm())
        .fold(0.0, f64::max);
    let mass = l1 / table.order() as f64;
    let coefficient_bound_ok = (0..table.h())
        .all(|i| table.coefficient(i, &hc).norm() <= mass * table.max_abs(i) + FEASIBILITY_TOLERANCE);
    let easy_ok = max_easy_coefficient <= 1e-8;
    let l1_margin = 2.0 - l1;
    let l1_ok = l1_margin >= -FEASIBILITY_TOLERANCE;
    let correlation_margin = correlation.abs() - delta;
    let correlation_ok = correlation_margin > FEASIBILITY_TOLERANCE;
    DualH {
        h,
        delta,
        correlation,
        l1,
        max_easy_coefficient,
        easy_ok,
        l1_margin,
        l1_ok,
        correlation_margin,
        correlation_ok,
        coefficient_bound_ok,
        passed: easy_ok && l1_ok && correlation_ok && coefficient_bound_ok,
    }
}

/// Character table of `G₁ × … × G_t` (component 1 least significant in both
/// element and character indices) with the number of non-identity
/// components of each character.
pub fn product_table(tables: &[CharacterTable]) -> Result<(CharacterTable, Vec<usize>)> {
    if tables.is_empty() {
        return Err(Error::arg("product of zero groups"));
    }
    let order = tables
        .iter()
        .try_fold(1usize, |acc, t| acc.checked_mul(t.order()))
        .filter(|&o| o <= MAX_GROUP_ORDER)
        .ok_or_else(|| Error::Resource {
            what: "product group order".into(),
            required: tables.iter().map(|t| t.order() as u128).product(),
            cap: MAX_GROUP_ORDER as u128,
        })?;
    let h: usize = tables.iter().map(|t| t.h()).product();
    let identities = tables
        .iter()
        .map(|t| t.identity_index())
        .collect::<Result<Vec<_>>>()?;
    let split = |mut idx: usize, radix: &dyn Fn(&CharacterTable) -> usize| -> Vec<usize> {
        tables
            .iter()
            .map(|t| {
                let r = radix(t);
                let d = idx % r;
                idx /= r;
                d
            })
            .collect()
    };
    let elems: Vec<Vec<usize>> = (0..order).map(|g| split(g, &|t| t.order())).collect();
    let mut values = Vec::with_capacity(h * order);
    let mut degrees = Vec::with_capacity(h);
    let mut nonidentity = Vec::with_capacity(h);
    for c in 0..h {
        let chars = split(c, &|t| t.h());
        degrees.push(tables.iter().zip(&chars).map(|(t, &i)| t.degrees()[i]).product());
        nonidentity.push(chars.iter().zip(&identities).filter(|(a, b)| a != b).count());
        for e in &elems {
            values.push(
                tables
                    .iter()
                    .zip(&chars)
                    .zip(e)
                    .map(|((t, &i), &g)| t.value(i, g))
                    .product(),
            );
        }
    }
    let class_of = elems
        .iter()
        .map(|e| {
            tables
                .iter()
                .zip(e)
                .rev()
                .fold(0, |acc, (t, &g)| acc * t.h() + t.class_of()[g])
        })
        .collect();
    Ok((CharacterTable::new(h, order, values, class_of, degrees)?, nonidentity))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductDegreeResult {
    pub d: usize,
    pub epsilon: f64,
    /// Distance to the span of characters with at most `k` non-identity
    /// components, for `k = 0..=d`.
    pub errors_by_degree: Vec<f64>,
}

/// Smallest `d` such that characters with at most `d` non-identity
/// components approximate `f` within `epsilon`.
pub fn product_approx_degree(f: &[f64], tables: &[CharacterTable], epsilon: f64) -> Result<ProductDegreeResult> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::arg(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    let (table, counts) = product_table(tables)?;
    let mut errors = Vec::new();
    for d in 0..=tables.len() {
        let easy: Vec<usize> = (0..table.h()).filter(|&i| counts[i] <= d).collect();
        let delta = distance_to_easy(f, &table, &easy)?.delta;
        errors.push(delta);
        if delta <= epsilon + FEASIBILITY_TOLERANCE {
            return Ok(ProductDegreeResult {
                d,
                epsilon,
                errors_by_degree: errors,
            });
        }
    }
    Err(Error::Lp("the full character set failed to reach the target".into()))
}
