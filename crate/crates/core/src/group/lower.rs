use super::checks::{orthogonality_general, regularity_check};
use super::distance::{distance_to_easy, product_approx_degree};
use super::{CharacterTable, GroupMapMatrix, HardnessPartition};
use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::matrix::Spectral;
use crate::par;

/// Most blocks the subset minimisation will enumerate.
pub const MAX_BLOCKS: usize = 20;

/// `log₂(√(MN) / max_{ψ∈Hard} max_g|ψ(g)|·‖[ψ(g(x,y))]‖)` for a regular,
/// orthogonal map. The additive `log₂(δ − 2ε)` term is reported separately
/// as `log2_delta_minus_2eps`, and `full_display` adds it back.
pub fn general_bound(
    gmap: &GroupMapMatrix,
    f: &[f64],
    table: &CharacterTable,
    partition: &HardnessPartition,
    epsilon: f64,
) -> Result<BoundReport> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::arg(format!("epsilon must lie in [0, 1/2), got {epsilon}")));
    }
    if table.order() != gmap.group().order() {
        return Err(Error::dims(gmap.group().order(), table.order()));
    }
    if partition.easy.len() + partition.hard.len() != table.h() {
        return Err(Error::arg("partition does not cover the character table"));
    }
    let mut rep = BoundReport::new("general");
    let (m, n) = (gmap.rows(), gmap.cols());
    rep.set("epsilon", epsilon);
    rep.set("rows", m as f64);
    rep.set("cols", n as f64);
    let regular = regularity_check(gmap);
    if !regular.regular {
        let why = regular.reason.unwrap_or_default();
        return Ok(rep.reject(format!("map is not regular: {why}")));
    }
    if partition.hard.is_empty() {
        return Ok(rep.reject("hard set is empty"));
    }
    let orth = orthogonality_general(gmap, table, &partition.hard)?;
    rep.set("orthogonality_row_violation", orth.max_row_violation);
    rep.set("orthogonality_col_violation", orth.max_col_violation);
    if !orth.passed {
        return Ok(rep.reject("orthogonality fails on the hard characters"));
    }
    let delta = match partition.delta {
        Some(d) => d,
        None => distance_to_easy(f, table, &partition.easy)?.delta,
    };
    rep.set("delta", delta);
    let gap = delta - 2.0 * epsilon;
    rep.set("delta_minus_2eps", gap);
    if gap <= 1e-12 {
        return Ok(rep.reject(format!("delta - 2 epsilon = {gap} is not positive")));
    }
    let terms = par::map_slice(&partition.hard, |&i| -> Result<f64> {
        Ok(table.max_abs(i) * gmap.character_matrix(table, i).spectral_norm()?)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let denominator = terms.iter().copied().fold(0.0, f64::max);
    let sqrt_mn = ((m * n) as f64).sqrt();
    let main = (sqrt_mn / denominator).log2();
    rep.set("sqrt_mn", sqrt_mn);
    rep.set("denominator", denominator);
    rep.set("log2_delta_minus_2eps", gap.log2());
    rep.set("full_display", main + gap.log2());
    rep.warnings
        .push("main_term excludes log2(delta - 2 epsilon); see full_display".into());
    if table.degrees().iter().any(|&d| d > 1) {
        rep.warnings.push(
            "denominator uses max_g |psi(g)|, which can be below deg(psi) for nonabelian groups".into(),
        );
    }
    Ok(rep.accept(main))
}

/// `min_{|S| >= d} Σ_{i∈S} m_i` with `d = deg_{1/3}(f)` over the product
/// group and `m_i = min_χ log₂(√size(g_i) / (deg χ·‖[χ(g_i(x,y))]‖))` over the
/// non-identity characters of block `i`.
pub fn block_group_bound(
    gmaps: &[GroupMapMatrix],
    f: &[f64],
    tables: &[CharacterTable],
) -> Result<BoundReport> {
    let t = gmaps.len();
    if t == 0 || t != tables.len() {
        return Err(Error::dims(gmaps.len(), tables.len()));
    }
    if t > MAX_BLOCKS {
        return Err(Error::Resource {
            what: "blocks in the subset minimisation".into(),
            required: t as u128,
            cap: MAX_BLOCKS as u128,
        });
    }
    let mut rep = BoundReport::new("block_group");
    rep.set("blocks", t as f64);
    for (k, (g, table)) in gmaps.iter().zip(tables).enumerate() {
        if g.group().order() != table.order() {
            return Err(Error::dims(g.group().order(), table.order()));
        }
        let all: Vec<usize> = (0..table.h()).collect();
        let orth = orthogonality_general(g, table, &all)?;
        if !orth.passed {
            return Ok(rep.reject(format!("orthogonality fails in block {}", k + 1)));
        }
    }
    let d = product_approx_degree(f, tables, 1.0 / 3.0)?.d;
    rep.set("d", d as f64);
    let mut per_block = Vec::with_capacity(t);
    for (k, (g, table)) in gmaps.iter().zip(tables).enumerate() {
        let id = table.identity_index()?;
        let size = ((g.rows() * g.cols()) as f64).sqrt();
        let mut best = f64::INFINITY;
        for i in (0..table.h()).filter(|&i| i != id) {
            let norm = g.character_matrix(table, i).spectral_norm()?;
            best = best.min((size / (table.degrees()[i] as f64 * norm)).log2());
        }
        if !best.is_finite() {
            return Ok(rep.reject(format!("block {} has no non-identity character", k + 1)));
        }
        rep.set(&format!("block_{}_term", k + 1), best);
        per_block.push(best);
    }
    let min = (0u32..1 << t)
        .filter(|s| s.count_ones() as usize >= d)
        .map(|s| (0..t).filter(|k| s >> k & 1 == 1).map(|k| per_block[k]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    rep.warnings
        .push("minimum taken over block sets S with |S| >= deg_1/3(f)".into());
    Ok(rep.accept(min))
}
