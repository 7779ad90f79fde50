//! Boolean functions on `{-1,+1}^n`, the Walsh–Hadamard transform and
//! characters `χ_T(x) = Π_{i∈T} x_i`.
//!
//! Points and subsets are both bitmasks: bit `i` of a point is set when
//! `x_{i+1} = -1`, bit `i` of a subset is set when `i+1 ∈ T`. Then
//! `χ_T(x) = (-1)^{popcount(T & x)}`.
//!
//! Two inner-product conventions coexist:
//! * Fourier coefficients carry the `2^-n` normalisation,
//!   `f̂_T = 2^-n Σ_x f(x) χ_T(x)`;
//! * inner products of point tables are plain sums, `<u, v> = Σ_x u(x) v(x)`,
//!   as used for dual polynomials.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported arity.
pub const MAX_ARITY: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoolFunction {
    n: usize,
    table: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealPointFunction {
    pub n: usize,
    pub table: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSpectrum {
    pub n: usize,
    /// Indexed by subset mask.
    pub coeffs: Vec<f64>,
}

/// `χ_T(x)` as ±1.
#[inline]
pub fn character_eval(t: usize, x: usize) -> i8 {
    if (t & x).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl BoolFunction {
    pub fn new(n: usize, table: Vec<i8>) -> Result<Self> {
        check_arity(n)?;
        if table.len() != 1 << n {
            return Err(Error::dims(1usize << n, table.len()));
        }
        if table.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::arg("truth table entries must be ±1"));
        }
        Ok(BoolFunction { n, table })
    }

    /// Builds `f` from a predicate on the set of coordinates equal to -1.
    pub fn from_mask_fn(n: usize, f: impl Fn(usize) -> i8) -> Result<Self> {
        check_arity(n)?;
        BoolFunction::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn parity(n: usize) -> Self {
        Self::from_mask_fn(n, |x| character_eval(usize::MAX, x)).expect("arity checked")
    }

    /// `-1` iff every input is `-1`.
    pub fn and(n: usize) -> Self {
        let full = (1usize << n) - 1;
        Self::from_mask_fn(n, |x| if x == full { -1 } else { 1 }).expect("arity checked")
    }

    /// `-1` iff some input is `-1`.
    pub fn or(n: usize) -> Self {
        Self::from_mask_fn(n, |x| if x != 0 { -1 } else { 1 }).expect("arity checked")
    }

    /// `-1` iff strictly more than half of the inputs are `-1`.
    pub fn majority(n: usize) -> Self {
        Self::from_mask_fn(n, |x| if 2 * x.count_ones() as usize > n { -1 } else { 1 })
            .expect("arity checked")
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        Self::from_mask_fn(n, |_| value)
    }

    /// The character `χ_T` as a Boolean function.
    pub fn character(n: usize, t: usize) -> Self {
        Self::from_mask_fn(n, |x| character_eval(t, x)).expect("arity checked")
    }

    /// Built-ins by `NAME:arity`: `PARITY`, `AND`, `OR`, `MAJ`, `CONST`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let (name, arity) = spec
            .split_once(':')
            .ok_or_else(|| Error::arg(format!("`{spec}` is not of the form NAME:arity")))?;
        let n: usize = arity
            .trim()
            .parse()
            .map_err(|_| Error::arg(format!("bad arity in `{spec}`")))?;
        check_arity(n)?;
        match name.trim().to_ascii_uppercase().as_str() {
            "PARITY" | "XOR" => Ok(Self::parity(n)),
            "AND" => Ok(Self::and(n)),
            "OR" => Ok(Self::or(n)),
            "MAJ" | "MAJORITY" => Ok(Self::majority(n)),
            "CONST" | "ONE" => Self::constant(n, 1),
            other => Err(Error::arg(format!("unknown built-in function `{other}`"))),
        }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> i8 {
        self.table[x]
    }

    pub fn to_real(&self) -> RealPointFunction {
        RealPointFunction {
            n: self.n,
            table: self.table.iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn pointwise_mul(&self, other: &BoolFunction) -> Result<BoolFunction> {
        if self.n != other.n {
            return Err(Error::dims(self.n, other.n));
        }
        BoolFunction::new(
            self.n,
            self.table.iter().zip(&other.table).map(|(a, b)| a * b).collect(),
        )
    }

    /// `2^n f̂_T` for every `T`, exactly.
    pub fn fourier_numerators(&self) -> Vec<i64> {
        let mut a: Vec<i64> = self.table.iter().map(|&v| v as i64).collect();
        butterfly(&mut a);
        a
    }

    pub fn spectrum(&self) -> FourierSpectrum {
        wht(&self.to_real())
    }

    /// Parses the truth-table format: `n=<arity>` followed by `2^n` characters
    /// from `{0,1}` in index order, `1` meaning output `-1`. Whitespace between
    /// the digits is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = crate::matrix::content_lines(text);
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `n=<arity>` header"))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(ln, "header must be `n=<arity>`"))?;
        check_arity(n).map_err(|e| Error::parse(ln, e.to_string()))?;
        let mut table = Vec::with_capacity(1 << n);
        for (ln, line) in lines {
            for c in line.chars().filter(|c| !c.is_whitespace()) {
                table.push(match c {
                    '0' => 1,
                    '1' => -1,
                    other => return Err(Error::parse(ln, format!("bad truth-table digit `{other}`"))),
                });
            }
        }
        if table.len() != 1 << n {
            return Err(Error::parse(
                ln,
                format!("expected {} truth-table digits, found {}", 1usize << n, table.len()),
            ));
        }
        BoolFunction::new(n, table)
    }
}

impl fmt::Display for BoolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        let bits: String = self
            .table
            .iter()
            .map(|&v| if v < 0 { '1' } else { '0' })
            .collect();
        writeln!(f, "{bits}")
    }
}

impl FromStr for BoolFunction {
    type Err = Error;

    /// Either a built-in `NAME:arity` or the truth-table text format.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with("n=") {
            BoolFunction::parse(s)
        } else {
            BoolFunction::builtin(s.trim())
        }
    }
}

impl RealPointFunction {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        check_arity(n)?;
        if table.len() != 1 << n {
            return Err(Error::dims(1usize << n, table.len()));
        }
        Ok(RealPointFunction { n, table })
    }

    pub fn l1(&self) -> f64 {
        self.table.iter().map(|v| v.abs()).sum()
    }

    /// Plain-sum inner product `Σ_x u(x) v(x)`.
    pub fn inner(&self, other: &[f64]) -> f64 {
        self.table.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> RealPointFunction {
        RealPointFunction {
            n: self.n,
            table: self.table.iter().map(|v| v * s).collect(),
        }
    }
}

impl FourierSpectrum {
    /// Largest `|T|` with `|coeff| > threshold`.
    pub fn degree_above(&self, threshold: f64) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > threshold)
            .map(|(t, _)| t.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Forward transform: `coeffs[T] = 2^-n Σ_x f(x) χ_T(x)`.
pub fn wht(f: &RealPointFunction) -> FourierSpectrum {
    let mut a = f.table.clone();
    butterfly(&mut a);
    let scale = 1.0 / a.len() as f64;
    a.iter_mut().for_each(|c| *c *= scale);
    FourierSpectrum { n: f.n, coeffs: a }
}

/// Inverse transform: `f(x) = Σ_T coeffs[T] χ_T(x)`.
pub fn iwht(s: &FourierSpectrum) -> RealPointFunction {
    let mut a = s.coeffs.clone();
    butterfly(&mut a);
    RealPointFunction { n: s.n, table: a }
}

/// Exact polynomial degree: the largest `|T|` with `f̂_T ≠ 0`.
pub fn degree(f: &BoolFunction) -> usize {
    f.fourier_numerators()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(t, _)| t.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Unnormalised in-place Walsh–Hadamard butterfly.
fn butterfly<T>(a: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*u, *v);
                *u = x + y;
                *v = x - y;
            }
        }
        h *= 2;
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n > MAX_ARITY {
        return Err(Error::arg(format!("arity {n} exceeds {MAX_ARITY}")));
    }
    Ok(())
}
