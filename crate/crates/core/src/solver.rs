//! Full (non-restarted) GMRES with optional right diagonal preconditioning.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Square operator `y = A x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for faer::Mat<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Arnoldi steps taken.
    pub iterations: usize,
    /// Relative residual of the (preconditioned) least-squares problem,
    /// starting with 1 at iteration 0.
    pub residual_history: Vec<f64>,
    #[serde(skip)]
    pub solution: Vec<C64>,
    pub converged: bool,
    /// `‖b − A x‖ / ‖b‖` for the returned `x`.
    pub true_residual: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Solve `A x = b` from a zero initial guess. With `right_precond = M⁻¹`
/// the Krylov basis vectors are scaled by `M⁻¹` before `A` is applied and the
/// returned solution is `x = M⁻¹ y`, so it solves the original system.
/// Stops when the relative least-squares residual drops to `tol`.
pub fn gmres(
    op: &dyn LinearOperator,
    rhs: &[C64],
    right_precond: Option<&[C64]>,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if let Some(m) = right_precond {
        if m.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.len(),
            });
        }
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let beta = norm(rhs);
    if !beta.is_finite() {
        return Err(Error::Breakdown(0));
    }
    if beta == 0.0 {
        return Ok(SolveReport {
            iterations: 0,
            residual_history: vec![0.0],
            solution: vec![C64::default(); n],
            converged: true,
            true_residual: 0.0,
        });
    }

    let precondition = |v: &[C64]| -> Vec<C64> {
        match right_precond {
            Some(m) => v.iter().zip(m).map(|(a, b)| a * b).collect(),
            None => v.to_vec(),
        }
    };

    let mut basis: Vec<Vec<C64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    // Columns of the Hessenberg matrix, already rotated to triangular form.
    let mut r_cols: Vec<Vec<C64>> = Vec::new();
    let mut rotations: Vec<(f64, C64)> = Vec::new();
    let mut g = vec![C64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut converged = false;
    let mut w = vec![C64::default(); n];

    for j in 0..max_iter {
        let z = precondition(&basis[j]);
        op.apply(&z, &mut w);
        let mut h = vec![C64::default(); j + 2];
        let mut prev = norm(&w);
        for pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                h[i] += c;
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= c * vk);
            }
            let now = norm(&w);
            if pass == 0 && now < 0.7 * prev {
                prev = now;
                continue;
            }
            break;
        }
        let h_next = norm(&w);
        h[j + 1] = C64::new(h_next, 0.0);
        if h.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Breakdown(j + 1));
        }

        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = a * c + s * b;
            h[i + 1] = -s.conj() * a + b * c;
        }
        let (a, b) = (h[j], h[j + 1]);
        let d = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if a.norm() == 0.0 {
            (0.0, C64::new(1.0, 0.0))
        } else {
            let phase = a / a.norm();
            (a.norm() / d, phase * b.conj() / d)
        };
        h[j] = a * c + s * b;
        h[j + 1] = C64::default();
        rotations.push((c, s));
        let gj = g[j];
        g[j] = gj * c;
        g.push(-s.conj() * gj);
        h.truncate(j + 1);
        r_cols.push(h);

        let res = g[j + 1].norm() / beta;
        history.push(res);
        let happy = h_next <= f64::EPSILON * beta.max(prev);
        if res <= tol || happy {
            converged = res <= tol;
            break;
        }
        basis.push(w.iter().map(|v| v / h_next).collect());
    }

    let m = r_cols.len();
    let mut y = vec![C64::default(); m];
    for i in (0..m).rev() {
        let mut s = g[i];
        for k in i + 1..m {
            s -= r_cols[k][i] * y[k];
        }
        y[i] = s / r_cols[i][i];
    }
    let mut xhat = vec![C64::default(); n];
    for (v, yi) in basis.iter().zip(&y) {
        xhat.iter_mut().zip(v).for_each(|(x, vk)| *x += yi * vk);
    }
    let solution = precondition(&xhat);
    op.apply(&solution, &mut w);
    let true_residual = norm(
        &rhs.iter().zip(&w).map(|(b, ax)| b - ax).collect::<Vec<_>>(),
    ) / beta;
    if !true_residual.is_finite() {
        return Err(Error::Breakdown(m));
    }
    Ok(SolveReport {
        iterations: m,
        residual_history: history,
        solution,
        converged,
        true_residual,
    })
}
