//! Dense matrices specialised for sign matrices.
//!
//! [`Matrix`] is a plain row-major container used for integer, real and
//! complex data. [`SignMatrix`] wraps a `Matrix<i8>` whose entries are known to
//! be ±1; it is the representation of a two-party function `f(x, y)`.

mod balance;
mod pattern;
mod rank;
mod search;
mod spectrum;

use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use balance::{balance_check, BalanceReport};
pub use pattern::{contains_pattern, PatternMode, PatternWitness};
pub use rank::exact_rank;
pub use search::{
    canonical_form, enumerate_strongly_balanced, search_strongly_balanced, SearchConstraints,
};
pub use spectrum::{singular_values, Spectral, SpectrumReport, DEFAULT_TOLERANCE};

pub type RealMatrix = Matrix<f64>;
pub type ComplexMatrix = Matrix<Complex64>;
pub type IntMatrix = Matrix<i64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::arg(format!("empty matrix {rows}x{cols}")));
        }
        if rows * cols != data.len() {
            return Err(Error::dims(
                format!("{} entries for {rows}x{cols}", rows * cols),
                data.len(),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn size(&self) -> usize {
        self.rows * self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Copy> Matrix<T> {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::arg("submatrix index out of range"));
        }
        Matrix::from_vec(
            rows.len(),
            cols.len(),
            rows.iter()
                .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
                .map(|(r, c)| self.get(r, c))
                .collect(),
        )
    }

    /// Kronecker product; the left factor is the most significant index.
    pub fn kron(&self, other: &Self) -> Self
    where
        T: Mul<Output = T>,
    {
        let (p, q) = other.dims();
        Matrix::from_fn(self.rows * p, self.cols * q, |i, j| {
            self.get(i / p, j / q) * other.get(i % p, j % q)
        })
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self>
    where
        T: Mul<Output = T>,
    {
        if self.dims() != other.dims() {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a * b)
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self>
    where
        T: Add<Output = T>,
    {
        if self.dims() != other.dims() {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }
}

impl IntMatrix {
    /// `self * other^T` computed exactly.
    pub fn mul_transpose(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::dims(self.cols, other.cols));
        }
        Ok(Matrix::from_fn(self.rows, other.rows, |i, j| {
            self.row(i).iter().zip(other.row(j)).map(|(a, b)| a * b).sum()
        }))
    }
}

impl RealMatrix {
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// `<A, B> = Tr(A B^T)`, the plain entrywise sum of products.
    pub fn inner(&self, other: &RealMatrix) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn scale(&self, s: f64) -> RealMatrix {
        self.map(|v| v * s)
    }

    pub fn abs(&self) -> RealMatrix {
        self.map(|v| v.abs())
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        self.map(|&v| Complex64::new(v, 0.0))
    }
}

/// Kronecker product of two matrices.
pub fn tensor<T: Copy + Mul<Output = T>>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.kron(b)
}

/// Entrywise product of two equally sized matrices.
pub fn entrywise<T: Copy + Mul<Output = T>>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    a.hadamard(b)
}

/// A matrix with every entry in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::arg(format!("empty sign matrix {rows}x{cols}")));
        }
        if rows * cols != entries.len() {
            return Err(Error::dims(rows * cols, entries.len()));
        }
        if let Some(bad) = entries.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::arg(format!("sign matrix entry {bad} is not ±1")));
        }
        Ok(SignMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::arg("ragged rows"));
        }
        SignMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i8) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SignMatrix::new(rows, cols, entries)
    }

    /// The all-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        SignMatrix {
            rows,
            cols,
            entries: vec![1; rows * cols],
        }
    }

    /// The 4x4 pattern-matrix core.
    pub fn s4() -> Self {
        SignMatrix::from_rows(&[
            &[1, -1, 1, -1],
            &[1, -1, -1, 1],
            &[-1, 1, 1, -1],
            &[-1, 1, -1, 1],
        ])
        .expect("valid constant")
    }

    /// A strongly balanced 6x6 matrix with no 4x4 submatrix equal to [`SignMatrix::s4`].
    pub fn s6() -> Self {
        SignMatrix::from_rows(&[
            &[1, 1, 1, -1, -1, -1],
            &[1, 1, -1, 1, -1, -1],
            &[1, -1, -1, -1, 1, 1],
            &[-1, -1, 1, 1, 1, -1],
            &[-1, 1, -1, -1, 1, 1],
            &[-1, -1, 1, 1, -1, 1],
        ])
        .expect("valid constant")
    }

    /// XOR on one bit: `[[1, -1], [-1, 1]]`.
    pub fn xor2() -> Self {
        SignMatrix::from_rows(&[&[1, -1], &[-1, 1]]).expect("valid constant")
    }

    /// The 2x2 Hadamard matrix `[[1, 1], [1, -1]]`.
    pub fn hadamard2() -> Self {
        SignMatrix::from_rows(&[&[1, 1], &[1, -1]]).expect("valid constant")
    }

    /// Built-in matrices by name: `S4`, `S6`, `XOR2`, `H2`, `J<r>x<c>`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "S4" => Some(Self::s4()),
            "S6" => Some(Self::s6()),
            "XOR2" | "XOR" => Some(Self::xor2()),
            "H2" => Some(Self::hadamard2()),
            other => {
                let dims = other.strip_prefix('J')?;
                let (r, c) = dims.split_once('X')?;
                let (r, c) = (r.parse().ok()?, c.parse().ok()?);
                (r > 0 && c > 0).then(|| Self::ones(r, c))
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn size(&self) -> usize {
        self.rows * self.cols
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        SignMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i)).expect("transpose")
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::arg("empty submatrix selection"));
        }
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::arg("submatrix index out of range"));
        }
        SignMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// Returns `P A Q` where row `i` of the result is row `row_perm[i]` of `self`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        if !is_permutation(row_perm, self.rows) || !is_permutation(col_perm, self.cols) {
            return Err(Error::arg("not a permutation"));
        }
        self.submatrix(row_perm, col_perm)
    }

    pub fn tensor(&self, other: &SignMatrix) -> SignMatrix {
        let (p, q) = other.dims();
        SignMatrix::from_fn(self.rows * p, self.cols * q, |i, j| {
            self.get(i / p, j / q) * other.get(i % p, j % q)
        })
        .expect("tensor of sign matrices")
    }

    pub fn entrywise(&self, other: &SignMatrix) -> Result<SignMatrix> {
        if self.dims() != other.dims() {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(SignMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn to_int(&self) -> IntMatrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as i64)
    }

    pub fn to_real(&self) -> RealMatrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as f64)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.get(i, j) as f64, 0.0)
        })
    }

    /// Parses the text format: a header `m n`, then `m` lines of `n` tokens
    /// from `{+1, -1, +, -}`. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `m n` header"))?;
        let (rows, cols) = parse_header(hline, header)?;
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(hline + r + 1, format!("expected {rows} rows")))?;
            let before = entries.len();
            for tok in line.split_whitespace() {
                entries.push(match tok {
                    "+1" | "+" | "1" => 1,
                    "-1" | "-" => -1,
                    other => return Err(Error::parse(ln, format!("bad sign token `{other}`"))),
                });
            }
            if entries.len() - before != cols {
                return Err(Error::parse(ln, format!("expected {cols} entries")));
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing data after matrix"));
        }
        SignMatrix::new(rows, cols, entries)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: Vec<&str> = self
                .row(i)
                .iter()
                .map(|&e| if e > 0 { "+1" } else { "-1" })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A probability distribution on the entries of a matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionMatrix(RealMatrix);

impl DistributionMatrix {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(m: RealMatrix) -> Result<Self> {
        if m.data().iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::arg("distribution entries must be finite and nonnegative"));
        }
        let total: f64 = m.data().iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::arg(format!(
                "distribution sums to {total}, expected 1"
            )));
        }
        Ok(DistributionMatrix(m))
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        let p = 1.0 / (rows * cols) as f64;
        DistributionMatrix(Matrix::from_fn(rows, cols, |_, _| p))
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    /// `A • P`, the sign matrix weighted entrywise by this distribution.
    pub fn weight(&self, a: &SignMatrix) -> Result<RealMatrix> {
        if a.dims() != self.dims() {
            return Err(Error::dims(
                format!("{}x{}", a.rows(), a.cols()),
                format!("{}x{}", self.0.rows(), self.0.cols()),
            ));
        }
        Ok(Matrix::from_fn(a.rows(), a.cols(), |i, j| {
            a.get(i, j) as f64 * self.get(i, j)
        }))
    }

    /// `Σ P(x, y) A(x, y)`; zero when `P` is balanced with respect to `A`.
    pub fn bias(&self, a: &SignMatrix) -> Result<f64> {
        Ok(self.weight(a)?.data().iter().sum())
    }

    /// Grid format: `m n` header then `m` lines of `n` nonnegative reals.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `m n` header"))?;
        let (rows, cols) = parse_header(hline, header)?;
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(hline + r + 1, format!("expected {rows} rows")))?;
            let before = data.len();
            for tok in line.split_whitespace() {
                data.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::parse(ln, format!("bad number `{tok}`")))?,
                );
            }
            if data.len() - before != cols {
                return Err(Error::parse(ln, format!("expected {cols} entries")));
            }
        }
        DistributionMatrix::new(Matrix::from_vec(rows, cols, data)?)
    }
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_header(line: usize, header: &str) -> Result<(usize, usize)> {
    let dims: Vec<&str> = header.split_whitespace().collect();
    match dims.as_slice() {
        [m, n] => {
            let m = m
                .parse::<usize>()
                .map_err(|_| Error::parse(line, "bad row count"))?;
            let n = n
                .parse::<usize>()
                .map_err(|_| Error::parse(line, "bad column count"))?;
            if m == 0 || n == 0 {
                return Err(Error::parse(line, "dimensions must be positive"));
            }
            Ok((m, n))
        }
        _ => Err(Error::parse(line, "header must be `m n`")),
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n
        && p.iter()
            .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_with_scalar_one_is_identity() {
        let h = SignMatrix::hadamard2();
        assert_eq!(h.tensor(&SignMatrix::ones(1, 1)), h);
        let hr = h.to_real();
        assert_eq!(tensor(&hr, &Matrix::from_fn(1, 1, |_, _| 1.0)), hr);
    }

    #[test]
    fn entrywise_square_is_all_ones() {
        let s4 = SignMatrix::s4();
        assert_eq!(s4.entrywise(&s4).unwrap(), SignMatrix::ones(4, 4));
        assert!(s4.entrywise(&SignMatrix::ones(2, 2)).is_err());
        assert!(entrywise(&s4.to_real(), &SignMatrix::xor2().to_real()).is_err());
    }

    #[test]
    fn kron_block_order() {
        let a = SignMatrix::xor2();
        let j = SignMatrix::ones(1, 2);
        let k = a.tensor(&j);
        assert_eq!(k.dims(), (2, 4));
        assert_eq!(k.row(0), &[1, 1, -1, -1]);
        assert_eq!(a.to_int().kron(&j.to_int()), k.to_int());
    }

    #[test]
    fn rejects_non_sign_entries() {
        assert!(SignMatrix::new(1, 2, vec![1, 0]).is_err());
        assert!(SignMatrix::new(2, 2, vec![1, 1, 1]).is_err());
        assert!(SignMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let s6 = SignMatrix::s6();
        let text = s6.to_text();
        assert!(text.starts_with("6 6\n+1 +1 +1 -1 -1 -1\n"));
        assert_eq!(SignMatrix::parse(&text).unwrap(), s6);
        let short = SignMatrix::parse("2 2\n+ -\n- +\n").unwrap();
        assert_eq!(short, SignMatrix::xor2());
    }

    #[test]
    fn parse_errors_name_the_line() {
        match SignMatrix::parse("2 2\n+1 -1\n+1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SignMatrix::parse("2 2\n+1 -1\n").is_err());
        assert!(SignMatrix::parse("2 2\n+1 -1 +1\n+1 -1\n").is_err());
    }

    #[test]
    fn builtins() {
        assert_eq!(SignMatrix::builtin("s4"), Some(SignMatrix::s4()));
        assert_eq!(SignMatrix::builtin("J2x3"), Some(SignMatrix::ones(2, 3)));
        assert_eq!(SignMatrix::builtin("nope"), None);
    }

    #[test]
    fn distribution_validation() {
        assert!(DistributionMatrix::new(Matrix::from_fn(2, 2, |_, _| 0.5)).is_err());
        let u = DistributionMatrix::uniform(2, 2);
        assert_eq!(u.bias(&SignMatrix::xor2()).unwrap(), 0.0);
        assert_eq!(u.bias(&SignMatrix::ones(2, 2)).unwrap(), 1.0);
        let p = DistributionMatrix::parse("1 2\n0.25 0.75\n").unwrap();
        assert_eq!(p.get(0, 1), 0.75);
        assert!(DistributionMatrix::parse("1 2\n-0.25 1.25\n").is_err());
    }

    #[test]
    fn permute_and_submatrix() {
        let s4 = SignMatrix::s4();
        let p = s4.permute(&[3, 2, 1, 0], &[0, 1, 2, 3]).unwrap();
        assert_eq!(p.row(0), s4.row(3));
        assert!(s4.permute(&[0, 0, 1, 2], &[0, 1, 2, 3]).is_err());
        let sub = s4.submatrix(&[0, 1], &[2, 3]).unwrap();
        assert_eq!(sub.entries(), &[1, -1, -1, 1]);
    }
}
