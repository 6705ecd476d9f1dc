//! Series solution for a plane wave hitting two concentric spheres.
//!
//! Region 1 is the exterior, region 2 the shell `r_inner < r < r_outer`,
//! region 3 the core. With the polar axis along the propagation direction
//! only the `m = 0` modes survive:
//!
//! ```text
//! Ω₁: u_in + Σ aₙ hₙ(k₁r) Pₙ(cos θ)
//! Ω₂: Σ (bₙ hₙ(k₂r) + cₙ jₙ(k₂r)) Pₙ(cos θ)
//! Ω₃: Σ dₙ jₙ(k₃r) Pₙ(cos θ)
//! ```
//!
//! with `u` and `(1/ε) ∂u/∂r` continuous at both radii.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::C64;

pub const DEFAULT_N_MAX: usize = 50;

const I: C64 = C64::new(0.0, 1.0);

/// `j₀ … j_{n_max}` at `x ≥ 0` by normalised downward recurrence.
pub fn spherical_j(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = n_max.max(x.ceil() as usize) + 30 + (x.sqrt() * 4.0) as usize;
    let (mut next, mut cur) = (0.0_f64, 1e-30_f64);
    let mut j0_j1 = (0.0, 0.0);
    for n in (0..=start).rev() {
        if n <= n_max {
            out[n] = cur;
        }
        if n == 1 {
            j0_j1.1 = cur;
        }
        if n == 0 {
            j0_j1.0 = cur;
            break;
        }
        let prev = (2 * n + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            j0_j1.1 *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let scale = if j0.abs() >= j1.abs() { j0 / j0_j1.0 } else { j1 / j0_j1.1 };
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// `y₀ … y_{n_max}` at `x > 0` by upward recurrence.
pub fn spherical_y(n_max: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut out = vec![0.0; n_max + 1];
    out[0] = -c / x;
    if n_max >= 1 {
        out[1] = -c / (x * x) - s / x;
    }
    for n in 1..n_max {
        out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
    }
    out
}

/// Derivatives from `f'ₙ = fₙ₋₁ − (n+1)/x fₙ` and `f'₀ = −f₁`. Needs
/// `values` up to `n_max + 1`.
fn derivatives<T>(values: &[T], x: f64) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Neg<Output = T>,
{
    let n_max = values.len() - 2;
    (0..=n_max)
        .map(|n| {
            if n == 0 {
                -values[1]
            } else {
                values[n - 1] - values[n] * ((n + 1) as f64 / x)
            }
        })
        .collect()
}

/// `(jₙ, j'ₙ)` for `n ≤ n_max`.
pub fn spherical_j_with_derivative(n_max: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut j = spherical_j(n_max + 1, x);
    let d = if x == 0.0 {
        let mut d = vec![0.0; n_max + 1];
        if n_max >= 1 {
            d[1] = 1.0 / 3.0;
        }
        d
    } else {
        derivatives(&j, x)
    };
    j.truncate(n_max + 1);
    (j, d)
}

/// `(hₙ, h'ₙ)` with `hₙ = jₙ + i yₙ`, `x > 0`.
pub fn spherical_h_with_derivative(n_max: usize, x: f64) -> (Vec<C64>, Vec<C64>) {
    let j = spherical_j(n_max + 1, x);
    let y = spherical_y(n_max + 1, x);
    let mut h: Vec<C64> = j.iter().zip(&y).map(|(&a, &b)| C64::new(a, b)).collect();
    let d = derivatives(&h, x);
    h.truncate(n_max + 1);
    (h, d)
}

/// `P₀(t) … P_{n_max}(t)`.
pub fn legendre(n_max: usize, t: f64) -> Vec<f64> {
    let mut p = vec![0.0; n_max + 1];
    p[0] = 1.0;
    if n_max >= 1 {
        p[1] = t;
    }
    for n in 1..n_max {
        p[n + 1] = ((2 * n + 1) as f64 * t * p[n] - n as f64 * p[n - 1]) / (n + 1) as f64;
    }
    p
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesSolution {
    pub epsilons: [f64; 3],
    pub wavenumbers: [f64; 3],
    pub r_inner: f64,
    pub r_outer: f64,
    /// Unit propagation direction of the incident wave.
    pub direction: Vec3,
    /// `[aₙ, bₙ, cₙ, dₙ]` for `n = 0 … n_max`.
    pub coefficients: Vec<[C64; 4]>,
}

/// Solve with partial pivoting after column and row equilibration.
fn solve4(mut a: [[C64; 4]; 4], mut b: [C64; 4], n: usize) -> Result<[C64; 4]> {
    let mut col_scale = [1.0; 4];
    for (c, s) in col_scale.iter_mut().enumerate() {
        let m = (0..4).map(|r| a[r][c].norm()).fold(0.0, f64::max);
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::SingularMode(n));
        }
        *s = 1.0 / m;
        (0..4).for_each(|r| a[r][c] *= *s);
    }
    for r in 0..4 {
        let m = a[r].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            a[r].iter_mut().for_each(|v| *v /= m);
            b[r] /= m;
        }
    }
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if a[p][k].norm() < 1e-14 {
            return Err(Error::SingularMode(n));
        }
        a.swap(k, p);
        b.swap(k, p);
        for r in k + 1..4 {
            let f = a[r][k] / a[k][k];
            for c in k..4 {
                let v = a[k][c];
                a[r][c] -= f * v;
            }
            let v = b[k];
            b[r] -= f * v;
        }
    }
    let mut x = [C64::default(); 4];
    for k in (0..4).rev() {
        let s: C64 = (k + 1..4).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    for (xi, s) in x.iter_mut().zip(col_scale) {
        *xi *= s;
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularMode(n));
    }
    Ok(x)
}

/// Mode coefficients for incidence along +z. Use
/// [`SeriesSolution::with_direction`] for other directions.
pub fn series_coefficients(
    omega: f64,
    epsilons: [f64; 3],
    r_inner: f64,
    r_outer: f64,
    n_max: usize,
) -> Result<SeriesSolution> {
    if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidFrequency(omega));
    }
    for (i, &e) in epsilons.iter().enumerate() {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidMaterial {
                region: i + 1,
                epsilon: e,
            });
        }
    }
    let k = epsilons.map(|e| omega * e.sqrt());
    let (j1, dj1) = spherical_j_with_derivative(n_max, k[0] * r_outer);
    let (h1, dh1) = spherical_h_with_derivative(n_max, k[0] * r_outer);
    let (j2o, dj2o) = spherical_j_with_derivative(n_max, k[1] * r_outer);
    let (h2o, dh2o) = spherical_h_with_derivative(n_max, k[1] * r_outer);
    let (j2i, dj2i) = spherical_j_with_derivative(n_max, k[1] * r_inner);
    let (h2i, dh2i) = spherical_h_with_derivative(n_max, k[1] * r_inner);
    let (j3, dj3) = spherical_j_with_derivative(n_max, k[2] * r_inner);
    let f = [k[0] / epsilons[0], k[1] / epsilons[1], k[2] / epsilons[2]];
    let re = |v: f64| C64::new(v, 0.0);

    let coefficients = (0..=n_max)
        .map(|n| {
            let amp = (2 * n + 1) as f64 * I.powu(n as u32);
            let a = [
                [h1[n], -h2o[n], -re(j2o[n]), C64::default()],
                [dh1[n] * f[0], -dh2o[n] * f[1], -re(dj2o[n] * f[1]), C64::default()],
                [C64::default(), h2i[n], re(j2i[n]), -re(j3[n])],
                [C64::default(), dh2i[n] * f[1], re(dj2i[n] * f[1]), -re(dj3[n] * f[2])],
            ];
            let b = [-amp * j1[n], -amp * dj1[n] * f[0], C64::default(), C64::default()];
            solve4(a, b, n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesSolution {
        epsilons,
        wavenumbers: k,
        r_inner,
        r_outer,
        direction: Vec3::new(0.0, 0.0, 1.0),
        coefficients,
    })
}

impl SeriesSolution {
    pub fn with_direction(mut self, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("incident direction must be nonzero".into()));
        }
        self.direction = direction * (1.0 / n);
        Ok(self)
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Region containing `x`; points on a sphere belong to the outer side.
    pub fn region_of(&self, x: Vec3) -> usize {
        let r = x.norm();
        if r >= self.r_outer {
            1
        } else if r >= self.r_inner {
            2
        } else {
            3
        }
    }

    /// `(u, ∂u/∂r)` of the expansion belonging to `region`, evaluated at `x`
    /// even outside that region. `x` must not be the origin unless `region` is 3.
    pub fn eval_region(&self, region: usize, x: Vec3) -> (C64, C64) {
        let r = x.norm();
        let n_max = self.n_max();
        let t = if r > 0.0 { self.direction.dot(x) / r } else { 1.0 };
        let p = legendre(n_max, t);
        let k = self.wavenumbers[region - 1];
        let kr = k * r;
        let mut u = C64::default();
        let mut du = C64::default();
        match region {
            1 => {
                let (h, dh) = spherical_h_with_derivative(n_max, kr);
                for n in 0..=n_max {
                    let a = self.coefficients[n][0] * p[n];
                    u += a * h[n];
                    du += a * dh[n] * k;
                }
                let inc = (I * k * self.direction.dot(x)).exp();
                u += inc;
                du += inc * I * k * t;
            }
            2 => {
                let (h, dh) = spherical_h_with_derivative(n_max, kr);
                let (j, dj) = spherical_j_with_derivative(n_max, kr);
                for n in 0..=n_max {
                    let [_, b, c, _] = self.coefficients[n];
                    u += (b * h[n] + c * j[n]) * p[n];
                    du += (b * dh[n] + c * dj[n]) * p[n] * k;
                }
            }
            _ => {
                let (j, dj) = spherical_j_with_derivative(n_max, kr);
                for n in 0..=n_max {
                    let d = self.coefficients[n][3] * p[n];
                    u += d * j[n];
                    du += d * dj[n] * k;
                }
            }
        }
        (u, du)
    }
}

/// Total field at `x`, using the expansion of the region that contains it.
pub fn eval_analytic(solution: &SeriesSolution, x: Vec3) -> C64 {
    solution.eval_region(solution.region_of(x), x).0
}

/// `√(Σ|u_num − u_ana|² / Σ|u_ana|²)`.
pub fn l2_error(u_num: &[C64], u_ana: &[C64]) -> Result<f64> {
    if u_num.len() != u_ana.len() {
        return Err(Error::DimensionMismatch {
            expected: u_ana.len(),
            got: u_num.len(),
        });
    }
    let den: f64 = u_ana.iter().map(|v| v.norm_sqr()).sum();
    if !(den > 0.0) {
        return Err(Error::ZeroReference);
    }
    let num: f64 = u_num.iter().zip(u_ana).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((num / den).sqrt())
}
