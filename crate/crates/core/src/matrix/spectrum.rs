use num_complex::Complex64;
use serde::Serialize;

use super::{ComplexMatrix, RealMatrix, SignMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_RTOL: f64 = 1e-14;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    /// Descending.
    pub singular_values: Vec<f64>,
    pub spectral_norm: f64,
    pub trace_norm: f64,
    pub frobenius_norm: f64,
    /// Number of singular values above `tolerance * spectral_norm`.
    pub numeric_rank: usize,
    pub tolerance: f64,
}

impl SpectrumReport {
    fn from_values(singular_values: Vec<f64>, tolerance: f64) -> Self {
        let spectral_norm = singular_values.first().copied().unwrap_or(0.0);
        let cutoff = tolerance * spectral_norm;
        SpectrumReport {
            spectral_norm,
            trace_norm: singular_values.iter().sum(),
            frobenius_norm: singular_values.iter().map(|s| s * s).sum::<f64>().sqrt(),
            numeric_rank: if spectral_norm > 0.0 {
                singular_values.iter().filter(|&&s| s > cutoff).count()
            } else {
                0
            },
            singular_values,
            tolerance,
        }
    }
}

/// Anything whose singular spectrum can be computed.
pub trait Spectral {
    fn spectrum(&self, tolerance: f64) -> Result<SpectrumReport>;

    fn spectral_norm(&self) -> Result<f64> {
        Ok(self.spectrum(DEFAULT_TOLERANCE)?.spectral_norm)
    }
}

impl Spectral for ComplexMatrix {
    fn spectrum(&self, tolerance: f64) -> Result<SpectrumReport> {
        if !(tolerance > 0.0) {
            return Err(Error::arg("spectrum tolerance must be positive"));
        }
        Ok(SpectrumReport::from_values(singular_values(self)?, tolerance))
    }
}

impl Spectral for RealMatrix {
    fn spectrum(&self, tolerance: f64) -> Result<SpectrumReport> {
        self.to_complex().spectrum(tolerance)
    }
}

impl Spectral for SignMatrix {
    fn spectrum(&self, tolerance: f64) -> Result<SpectrumReport> {
        self.to_complex().spectrum(tolerance)
    }
}

/// Singular values, descending.
///
/// One-sided cyclic Jacobi: column pairs are rotated until the implicit Gram
/// matrix `A^†A` is diagonal, i.e. its off-diagonal Frobenius mass falls below
/// `1e-14 * ||A^†A||_F`. The column norms are then the singular values. The
/// Gram matrix is never formed, so singular values near zero keep full
/// absolute accuracy relative to `σ₁`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (m, n) = a.dims();
    // work on the side with fewer columns
    let mut cols: Vec<Vec<Complex64>> = if n <= m {
        (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect()
    } else {
        (0..m).map(|i| a.row(i).iter().map(|z| z.conj()).collect()).collect()
    };
    let k = cols.len();

    let gram_norm = {
        let mut s = 0.0;
        for p in 0..k {
            for q in 0..k {
                s += dot(&cols[p], &cols[q]).norm_sqr();
            }
        }
        s.sqrt()
    };
    if gram_norm == 0.0 {
        return Ok(vec![0.0; k]);
    }

    let mut converged = false;
    let mut off = 0.0;
    for _ in 0..MAX_SWEEPS {
        off = 0.0;
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = norm_sqr(&cols[p]);
                let beta = norm_sqr(&cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                off += 2.0 * g * g;
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // unit phase making the pair's inner product real and positive
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if !rotated || off.sqrt() < OFF_DIAGONAL_RTOL * gram_norm {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            sweeps: MAX_SWEEPS,
            off: off.sqrt(),
        });
    }

    let mut sv: Vec<f64> = cols.iter().map(|c| norm_sqr(c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
