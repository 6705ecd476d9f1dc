use faer::Mat;

use crate::assembly::SystemMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// All eigenvalues of a dense complex matrix.
pub fn dense_eigenvalues(a: &Mat<C64>) -> Result<Vec<C64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues().map_err(|_| Error::EigenNoConvergence)
}

/// Eigenvalues of `A · diag(col_scale)`.
pub fn system_eigenvalues(sys: &SystemMatrix, col_scale: Option<&[C64]>) -> Result<Vec<C64>> {
    if let Some(s) = col_scale {
        if s.len() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                got: s.len(),
            });
        }
    }
    dense_eigenvalues(&sys.to_dense(col_scale))
}

pub fn squared(eigs: &[C64]) -> Vec<C64> {
    eigs.iter().map(|e| e * e).collect()
}

fn nearest(z: C64, points: &[C64]) -> f64 {
    points.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
}

/// Share of `values` within `radius` of some point.
pub fn fraction_within(values: &[C64], points: &[C64], radius: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let hits = values.iter().filter(|&&z| nearest(z, points) <= radius).count();
    hits as f64 / values.len() as f64
}

/// Smallest radius that captures at least `fraction` of `values`.
pub fn radius_for_fraction(values: &[C64], points: &[C64], fraction: f64) -> f64 {
    let mut d: Vec<f64> = values.iter().map(|&z| nearest(z, points)).collect();
    if d.is_empty() {
        return 0.0;
    }
    d.sort_by(f64::total_cmp);
    let idx = ((fraction.clamp(0.0, 1.0) * d.len() as f64).ceil() as usize).clamp(1, d.len());
    d[idx - 1]
}
