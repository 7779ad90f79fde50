use serde::Serialize;

use super::SignMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub row_sums: Vec<i64>,
    pub col_sums: Vec<i64>,
    /// Total sum is zero: `Tr(A J^†) = 0`.
    pub balanced: bool,
    /// Every row and column sums to zero: `A J^† = A^† J = 0`.
    pub strongly_balanced: bool,
}

pub fn balance_check(m: &SignMatrix) -> BalanceReport {
    let row_sums: Vec<i64> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|&e| e as i64).sum())
        .collect();
    let col_sums: Vec<i64> = (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m.get(i, j) as i64).sum())
        .collect();
    let balanced = row_sums.iter().sum::<i64>() == 0;
    let strongly_balanced =
        row_sums.iter().all(|&s| s == 0) && col_sums.iter().all(|&s| s == 0);
    BalanceReport {
        row_sums,
        col_sums,
        balanced,
        strongly_balanced,
    }
}

impl SignMatrix {
    pub fn is_strongly_balanced(&self) -> bool {
        balance_check(self).strongly_balanced
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_matrices_are_strongly_balanced() {
        assert!(balance_check(&SignMatrix::s4()).strongly_balanced);
        let s6 = balance_check(&SignMatrix::s6());
        assert!(s6.strongly_balanced && s6.balanced);
        assert_eq!(s6.row_sums, vec![0; 6]);
    }

    #[test]
    fn all_ones_is_not_balanced() {
        let j = balance_check(&SignMatrix::ones(4, 4));
        assert!(!j.balanced && !j.strongly_balanced);
        assert_eq!(j.row_sums, vec![4; 4]);
    }

    #[test]
    fn balanced_but_not_strongly() {
        let m = SignMatrix::from_rows(&[&[1, 1], &[-1, -1]]).unwrap();
        let r = balance_check(&m);
        assert!(r.balanced && !r.strongly_balanced);
    }
}
