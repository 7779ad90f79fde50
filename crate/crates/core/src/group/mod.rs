//! Functions composed through a finite group: `F(x, y) = f(g(x, y))`.
//!
//! Group elements are stored as indices. For an Abelian group
//! `Z_{m₁} × … × Z_{m_k}` the tuple `(a₁, …, a_k)` has index
//! `a₁ + m₁(a₂ + m₂(a₃ + …))`, so on `Z₂ⁿ` the index is the Boolean mask used
//! by [`crate::boolfn`]. Characters of Abelian groups are indexed the same way.
//! General groups enter only through a user-supplied [`CharacterTable`].

mod checks;
mod distance;
mod lower;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{content_lines, ComplexMatrix, Matrix, SignMatrix};

pub use checks::{
    degeneration_check, g_invariant, orthogonality_general, orthogonality_sums, pair_multisets,
    line_regular_search, regularity_check, tprime_check, DegenerationReport, OrthogonalityGeneralReport,
    PairMultisets, LineRegularReport, RegularityReport, TPrimeReport,
};
pub use distance::{
    distance_to_easy, dual_h, product_approx_degree, product_table, DistanceReport, DualH,
    ProductDegreeResult,
};
pub use lower::{block_group_bound, general_bound};

/// Largest group order accepted for class-function tables.
pub const MAX_GROUP_ORDER: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupSpec {
    moduli: Vec<usize>,
}

impl AbelianGroupSpec {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::arg("a group needs at least one cyclic factor"));
        }
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::arg(format!("modulus {m} is below 2")));
        }
        let order = moduli
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .filter(|&o| o <= MAX_GROUP_ORDER)
            .ok_or_else(|| Error::Resource {
                what: "group order".into(),
                required: moduli.iter().map(|&m| m as u128).product(),
                cap: MAX_GROUP_ORDER as u128,
            })?;
        let _ = order;
        Ok(AbelianGroupSpec { moduli })
    }

    /// `Z₂ⁿ`.
    pub fn boolean(n: usize) -> Result<Self> {
        AbelianGroupSpec::new(vec![2; n])
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    pub fn index(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.moduli.len() {
            return Err(Error::dims(self.moduli.len(), tuple.len()));
        }
        let mut idx = 0;
        for (&a, &m) in tuple.iter().zip(&self.moduli).rev() {
            if a >= m {
                return Err(Error::arg(format!("component {a} out of range for Z_{m}")));
            }
            idx = idx * m + a;
        }
        Ok(idx)
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        self.moduli
            .iter()
            .map(|&m| {
                let a = index % m;
                index /= m;
                a
            })
            .collect()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut idx = 0;
        let mut place = 1;
        for &m in &self.moduli {
            idx += ((a % m + b % m) % m) * place;
            a /= m;
            b /= m;
            place *= m;
        }
        idx
    }

    /// Direct product, `self` supplying the least significant components.
    pub fn product(&self, other: &AbelianGroupSpec) -> Result<AbelianGroupSpec> {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        AbelianGroupSpec::new(moduli)
    }

    /// Parses `m1,m2,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let moduli = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::arg(format!("bad modulus `{}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        AbelianGroupSpec::new(moduli)
    }
}

impl fmt::Display for AbelianGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Character values `χ_i(g)` with the class data needed by the checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterTable {
    h: usize,
    order: usize,
    /// Row-major `h x order`.
    table: Vec<Complex64>,
    class_of: Vec<usize>,
    degrees: Vec<usize>,
}

#[derive(Deserialize, Serialize)]
struct CharacterTableJson {
    h: usize,
    order: usize,
    table: Vec<[f64; 2]>,
    class_of: Vec<usize>,
    degrees: Vec<usize>,
}

impl CharacterTable {
    pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;

    /// Validates row orthogonality, the degree bound and the class map.
    pub fn new(
        h: usize,
        order: usize,
        table: Vec<Complex64>,
        class_of: Vec<usize>,
        degrees: Vec<usize>,
    ) -> Result<Self> {
        if h == 0 || order == 0 || order > MAX_GROUP_ORDER {
            return Err(Error::arg(format!("invalid table shape {h}x{order}")));
        }
        if table.len() != h * order {
            return Err(Error::dims(h * order, table.len()));
        }
        if class_of.len() != order {
            return Err(Error::arg(format!(
                "class map has {} entries for a group of order {order}",
                class_of.len()
            )));
        }
        if degrees.len() != h {
            return Err(Error::dims(h, degrees.len()));
        }
        let mut seen = vec![false; h];
        for &c in &class_of {
            if c >= h {
                return Err(Error::arg(format!("class index {c} out of range (h = {h})")));
            }
            seen[c] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::arg("every class index must be used"));
        }
        let t = CharacterTable {
            h,
            order,
            table,
            class_of,
            degrees,
        };
        for i in 0..h {
            for g in 0..order {
                let v = t.value(i, g);
                if v.norm() > t.degrees[i] as f64 + 1e-12 {
                    return Err(Error::arg(format!(
                        "|chi_{i}({g})| = {} exceeds the degree {}",
                        v.norm(),
                        t.degrees[i]
                    )));
                }
                let c = t.class_of[g];
                let rep = t.class_of.iter().position(|&k| k == c).expect("class used");
                if (v - t.value(i, rep)).norm() > 1e-9 {
                    return Err(Error::arg(format!("chi_{i} is not constant on class {c}")));
                }
            }
            for j in 0..h {
                let s: Complex64 = (0..order).map(|g| t.value(i, g) * t.value(j, g).conj()).sum();
                let want = if i == j { order as f64 } else { 0.0 };
                if (s - want).norm() > Self::ORTHOGONALITY_TOLERANCE {
                    return Err(Error::arg(format!(
                        "rows {i} and {j} violate orthogonality (sum {s})"
                    )));
                }
            }
        }
        Ok(t)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self, i: usize, g: usize) -> Complex64 {
        self.table[i * self.order + g]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.table[i * self.order..(i + 1) * self.order]
    }

    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Index of the trivial character.
    pub fn identity_index(&self) -> Result<usize> {
        (0..self.h)
            .find(|&i| self.row(i).iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-9))
            .ok_or_else(|| Error::arg("character table has no trivial character"))
    }

    /// `max_g |χ_i(g)|`.
    pub fn max_abs(&self, i: usize) -> f64 {
        self.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `f̂_i = |G|⁻¹ Σ_g χ_i(g) conj(f(g))`.
    pub fn coefficient(&self, i: usize, f: &[Complex64]) -> Complex64 {
        let s: Complex64 = self.row(i).iter().zip(f).map(|(c, v)| c * v.conj()).sum();
        s / self.order as f64
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CharacterTableJson = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), e.to_string()))?;
        CharacterTable::new(
            raw.h,
            raw.order,
            raw.table.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
            raw.class_of,
            raw.degrees,
        )
    }

    pub fn to_json(&self) -> String {
        let raw = CharacterTableJson {
            h: self.h,
            order: self.order,
            table: self.table.iter().map(|z| [z.re, z.im]).collect(),
            class_of: self.class_of.clone(),
            degrees: self.degrees.clone(),
        };
        serde_json::to_string(&raw).expect("plain data serialises")
    }
}

/// `χ_a(x) = Π_j exp(2πi a_j x_j / m_j)`, exact on quarter turns.
pub fn characters_abelian(g: &AbelianGroupSpec) -> CharacterTable {
    let order = g.order();
    let lcm = g.moduli.iter().fold(1usize, |acc, &m| lcm(acc, m));
    let tuples: Vec<Vec<usize>> = (0..order).map(|i| g.tuple(i)).collect();
    let mut table = Vec::with_capacity(order * order);
    for a in &tuples {
        for x in &tuples {
            let turns: usize = a
                .iter()
                .zip(x)
                .zip(&g.moduli)
                .map(|((&ai, &xi), &m)| ai * xi % m * (lcm / m))
                .sum::<usize>()
                % lcm;
            table.push(root_of_unity(turns, lcm));
        }
    }
    CharacterTable::new(order, order, table, (0..order).collect(), vec![1; order])
        .expect("Abelian characters are orthogonal")
}

/// `exp(2πi k/n)` with exact values at multiples of a quarter turn.
fn root_of_unity(k: usize, n: usize) -> Complex64 {
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The group carrying a map's values.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Abelian(AbelianGroupSpec),
    /// Known only through its order; elements are `0..order`.
    Opaque { order: usize },
}

impl GroupKind {
    pub fn order(&self) -> usize {
        match self {
            GroupKind::Abelian(g) => g.order(),
            GroupKind::Opaque { order } => *order,
        }
    }

    pub fn abelian(&self) -> Option<&AbelianGroupSpec> {
        match self {
            GroupKind::Abelian(g) => Some(g),
            GroupKind::Opaque { .. } => None,
        }
    }
}

/// `g: X × Y → G` as a matrix of element indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupMapMatrix {
    group: GroupKind,
    entries: Matrix<usize>,
}

impl GroupMapMatrix {
    pub fn new(group: GroupKind, entries: Matrix<usize>) -> Result<Self> {
        let order = group.order();
        if let Some(bad) = entries.data().iter().find(|&&e| e >= order) {
            return Err(Error::arg(format!("element {bad} outside a group of order {order}")));
        }
        Ok(GroupMapMatrix { group, entries })
    }

    /// A sign matrix as a map into `Z₂`, with `-1` sent to the generator.
    pub fn from_sign_matrix(m: &SignMatrix) -> Self {
        let entries = Matrix::from_fn(m.rows(), m.cols(), |i, j| usize::from(m.get(i, j) < 0));
        GroupMapMatrix {
            group: GroupKind::Abelian(AbelianGroupSpec { moduli: vec![2] }),
            entries,
        }
    }

    pub fn group(&self) -> &GroupKind {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn cols(&self) -> usize {
        self.entries.cols()
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        self.entries.get(x, y)
    }

    pub fn entries(&self) -> &Matrix<usize> {
        &self.entries
    }

    /// `[χ_i(g(x, y))]` for a table over this map's group.
    pub fn character_matrix(&self, table: &CharacterTable, i: usize) -> ComplexMatrix {
        Matrix::from_fn(self.rows(), self.cols(), |x, y| table.value(i, self.get(x, y)))
    }

    /// `g(x, y) = (g₁(x¹, y¹), …, g_t(xᵗ, yᵗ))` for Abelian blocks. Block 1
    /// is the most significant row/column digit and the least significant
    /// group component.
    pub fn block_product(blocks: &[GroupMapMatrix]) -> Result<GroupMapMatrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::arg("block product needs at least one block"))?;
        let mut spec = first
            .group
            .abelian()
            .cloned()
            .ok_or_else(|| Error::arg("block product needs Abelian blocks"))?;
        let mut rows = first.rows();
        let mut cols = first.cols();
        let mut orders = vec![spec.order()];
        for b in &blocks[1..] {
            let g = b
                .group
                .abelian()
                .ok_or_else(|| Error::arg("block product needs Abelian blocks"))?;
            spec = spec.product(g)?;
            orders.push(g.order());
            rows = rows
                .checked_mul(b.rows())
                .ok_or_else(|| Error::arg("block product too large"))?;
            cols = cols
                .checked_mul(b.cols())
                .ok_or_else(|| Error::arg("block product too large"))?;
        }
        if (rows as u128) * (cols as u128) > crate::composer::DEFAULT_MAX_ENTRIES {
            return Err(Error::Resource {
                what: "block product entries".into(),
                required: rows as u128 * cols as u128,
                cap: crate::composer::DEFAULT_MAX_ENTRIES,
            });
        }
        let entries = Matrix::from_fn(rows, cols, |x, y| {
            let (mut xr, mut yr) = (x, y);
            let mut parts = vec![0; blocks.len()];
            for (k, b) in blocks.iter().enumerate().rev() {
                parts[k] = b.get(xr % b.rows(), yr % b.cols());
                xr /= b.rows();
                yr /= b.cols();
            }
            let mut idx = 0;
            for (k, &p) in parts.iter().enumerate().rev() {
                idx = idx * orders[k] + p;
            }
            idx
        });
        GroupMapMatrix::new(GroupKind::Abelian(spec), entries)
    }

    /// Parses `group m1,m2,...` followed by rows of comma-separated tuples
    /// `a1:a2:...`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `group m1,m2,...` header"))?;
        let spec_text = header
            .strip_prefix("group")
            .ok_or_else(|| Error::parse(hl, "header must start with `group`"))?;
        let spec = AbelianGroupSpec::parse(spec_text).map_err(|e| Error::parse(hl, e.to_string()))?;
        let mut data = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (ln, line) in lines {
            let mut count = 0;
            for tok in line.split(',') {
                let parts = tok
                    .trim()
                    .split(':')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::parse(ln, format!("bad element `{}`", tok.trim())))?;
                data.push(spec.index(&parts).map_err(|e| Error::parse(ln, e.to_string()))?);
                count += 1;
            }
            match cols {
                None => cols = Some(count),
                Some(c) if c != count => {
                    return Err(Error::parse(ln, format!("expected {c} entries, found {count}")))
                }
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::parse(hl, "no rows"))?;
        GroupMapMatrix::new(GroupKind::Abelian(spec), Matrix::from_vec(rows, cols, data)?)
    }

    pub fn to_text(&self) -> Result<String> {
        let spec = self
            .group
            .abelian()
            .ok_or_else(|| Error::arg("only Abelian maps have a text form"))?;
        let mut out = format!("group {spec}\n");
        for x in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|y| {
                    spec.tuple(self.get(x, y))
                        .iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(":")
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// A multiset of element pairs `(s, t)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairMultiset {
    counts: BTreeMap<(usize, usize), usize>,
}

impl PairMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: usize, t: usize) {
        *self.counts.entry((s, t)).or_insert(0) += 1;
    }

    pub fn count(&self, s: usize, t: usize) -> usize {
        self.counts.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// `{(s, s) : s ∈ G}`.
    pub fn diagonal(order: usize) -> Self {
        (0..order).map(|s| (s, s)).collect()
    }
}

impl FromIterator<(usize, usize)> for PairMultiset {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let mut m = PairMultiset::new();
        for (s, t) in iter {
            m.insert(s, t);
        }
        m
    }
}

/// Split of character indices into an easy and a hard part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardnessPartition {
    pub easy: Vec<usize>,
    pub hard: Vec<usize>,
    pub delta: Option<f64>,
}

impl HardnessPartition {
    /// Everything outside `easy` is hard.
    pub fn from_easy(h: usize, easy: &[usize]) -> Result<Self> {
        let mut is_easy = vec![false; h];
        for &i in easy {
            if i >= h {
                return Err(Error::arg(format!("character index {i} out of range (h = {h})")));
            }
            if is_easy[i] {
                return Err(Error::arg(format!("character index {i} listed twice")));
            }
            is_easy[i] = true;
        }
        Ok(HardnessPartition {
            easy: (0..h).filter(|&i| is_easy[i]).collect(),
            hard: (0..h).filter(|&i| !is_easy[i]).collect(),
            delta: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::character_eval;

    #[test]
    fn abelian_indexing() {
        let g = AbelianGroupSpec::new(vec![3, 4]).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(g.index(&[2, 1]).unwrap(), 5);
        assert_eq!(g.tuple(5), vec![2, 1]);
        assert_eq!(g.add(g.index(&[2, 3]).unwrap(), g.index(&[2, 2]).unwrap()), g.index(&[1, 1]).unwrap());
        assert!(g.index(&[3, 0]).is_err());
        assert!(AbelianGroupSpec::new(vec![1]).is_err());
        assert!(AbelianGroupSpec::new(vec![]).is_err());
        assert!(AbelianGroupSpec::new(vec![1 << 8, 1 << 8]).is_err());
    }

    #[test]
    fn boolean_characters_match_boolfn() {
        for n in 1..=4 {
            let t = characters_abelian(&AbelianGroupSpec::boolean(n).unwrap());
            assert_eq!(t.h(), 1 << n);
            for a in 0..1 << n {
                for x in 0..1 << n {
                    assert_eq!(t.value(a, x), Complex64::new(character_eval(a, x) as f64, 0.0));
                }
            }
        }
    }

    #[test]
    fn cyclic_three() {
        let t = characters_abelian(&AbelianGroupSpec::new(vec![3]).unwrap());
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let want = [[1.0.into(), 1.0.into(), 1.0.into()], [1.0.into(), w, w * w], [1.0.into(), w * w, w * w * w * w]];
        for (i, row) in want.iter().enumerate() {
            for (g, v) in row.iter().enumerate() {
                assert!((t.value(i, g) - v).norm() < 1e-12);
            }
        }
        assert_eq!(t.identity_index().unwrap(), 0);
    }

    #[test]
    fn table_json_round_trip_and_validation() {
        let t = characters_abelian(&AbelianGroupSpec::new(vec![2, 3]).unwrap());
        let back = CharacterTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        // S₃: classes {e}, transpositions, 3-cycles
        let s3 = r#"{"h":3,"order":6,
            "table":[[1,0],[1,0],[1,0],[1,0],[1,0],[1,0],
                     [1,0],[-1,0],[-1,0],[-1,0],[1,0],[1,0],
                     [2,0],[0,0],[0,0],[0,0],[-1,0],[-1,0]],
            "class_of":[0,1,1,1,2,2],"degrees":[1,1,2]}"#;
        let s3 = CharacterTable::from_json(s3).unwrap();
        assert_eq!(s3.degrees(), &[1, 1, 2]);
        let bad = r#"{"h":2,"order":2,"table":[[1,0],[1,0],[1,0],[1,0]],"class_of":[0,1],"degrees":[1,1]}"#;
        assert!(CharacterTable::from_json(bad).is_err());
        assert!(CharacterTable::from_json("{").is_err());
    }

    #[test]
    fn gmap_text_format() {
        let text = "# Latin square over Z3\ngroup 3\n0,1,2\n1,2,0\n2,0,1\n";
        let g = GroupMapMatrix::parse(text).unwrap();
        assert_eq!((g.rows(), g.cols()), (3, 3));
        assert_eq!(g.get(1, 2), 0);
        assert_eq!(GroupMapMatrix::parse(&g.to_text().unwrap()).unwrap(), g);
        let two = GroupMapMatrix::parse("group 2,3\n1:2,0:0\n").unwrap();
        assert_eq!(two.get(0, 0), 5);
        assert!(GroupMapMatrix::parse("group 3\n0,3\n").is_err());
        assert!(GroupMapMatrix::parse("group 3\n0,1\n0\n").is_err());
        assert!(GroupMapMatrix::parse("3\n0\n").is_err());
    }

    #[test]
    fn block_product_layout() {
        let a = GroupMapMatrix::from_sign_matrix(&SignMatrix::xor2());
        let b = GroupMapMatrix::from_sign_matrix(&SignMatrix::hadamard2());
        let p = GroupMapMatrix::block_product(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(p.group().order(), 4);
        for x in 0..4 {
            for y in 0..4 {
                let want = a.get(x / 2, y / 2) + 2 * b.get(x % 2, y % 2);
                assert_eq!(p.get(x, y), want);
            }
        }
    }

    #[test]
    fn partition_validation() {
        let p = HardnessPartition::from_easy(4, &[0, 2]).unwrap();
        assert_eq!(p.hard, vec![1, 3]);
        assert!(HardnessPartition::from_easy(4, &[4]).is_err());
        assert!(HardnessPartition::from_easy(4, &[1, 1]).is_err());
    }
}
