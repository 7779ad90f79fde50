use num_bigint::BigInt;

use super::{IntMatrix, SignMatrix};

/// Exact rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Runs in `i128` first and restarts with big integers if an intermediate
/// minor overflows, so the result is exact for any input size.
pub fn exact_rank(m: &SignMatrix) -> usize {
    int_rank(&m.to_int())
}

pub(crate) fn int_rank(m: &IntMatrix) -> usize {
    let rows: Vec<Vec<i128>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|&v| v as i128).collect())
        .collect();
    if let Some(r) = bareiss(rows) {
        return r;
    }
    let rows: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    bareiss(rows).expect("big integer elimination cannot overflow")
}

trait Exact: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// `(a*b - c*d) / q`, where the division is known to be exact.
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, q: &Self) -> Option<Self>;
}

impl Exact for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, q: &Self) -> Option<Self> {
        let num = a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)?;
        debug_assert_eq!(num % q, 0);
        Some(num / q)
    }
}

impl Exact for BigInt {
    fn zero() -> Self {
        BigInt::from(0)
    }
    fn one() -> Self {
        BigInt::from(1)
    }
    fn is_zero(&self) -> bool {
        self.sign() == num_bigint::Sign::NoSign
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, d: &Self, q: &Self) -> Option<Self> {
        Some((a * b - c * d) / q)
    }
}

fn bareiss<T: Exact>(mut a: Vec<Vec<T>>) -> Option<usize> {
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut prev = T::one();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(pivot) = (rank..n_rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            for j in col + 1..n_cols {
                row[j] = T::cross_div(&prow[col], &row[j], &row[col], &prow[j], &prev)?;
            }
            row[col] = T::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    Some(rank)
}
