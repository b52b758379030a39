//! Test-only oracles. None of these call into the code path they check.

#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};

/// Dense Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    x
}

/// Solves `AᵀP + PA = −Q` entry by entry: the unknown `P_ij` sits at `i·n + j`.
pub fn lyapunov_oracle(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = vec![vec![0.0; n * n]; n * n];
    let mut rhs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            // (AᵀP)_ij = Σ_k A_ki P_kj,  (PA)_ij = Σ_k P_ik A_kj
            for k in 0..n {
                m[row][k * n + j] += a[(k, i)];
                m[row][i * n + k] += a[(k, j)];
            }
            rhs[row] = -q[(i, j)];
        }
    }
    let x = gauss_solve(m, rhs);
    DMatrix::from_fn(n, n, |i, j| x[i * n + j])
}

pub fn max_abs_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Cyclic coordinate descent on `½‖φ − Bα‖² + λ‖α‖₁`.
pub fn lasso_cd(b: &DMatrix<f64>, phi: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let n = b.ncols();
    let mut alpha = DVector::zeros(n);
    for _ in 0..20_000 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let cj = b.column(j);
            let partial = phi - b * &alpha + cj * alpha[j];
            let z = cj.dot(&partial);
            let next = z.signum() * (z.abs() - lambda).max(0.0) / cj.norm_squared();
            moved = moved.max((next - alpha[j]).abs());
            alpha[j] = next;
        }
        if moved <= 1e-15 * alpha.amax().max(1.0) {
            break;
        }
    }
    alpha
}

/// Random orthonormal `n×n` matrix from Gram–Schmidt on `raw`.
pub fn orthonormalize(raw: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = raw.clone();
    for j in 0..q.ncols() {
        for k in 0..j {
            let proj = q.column(k).dot(&q.column(j));
            let ck = q.column(k).clone_owned();
            q.column_mut(j).axpy(-proj, &ck, 1.0);
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

/// Central-difference Jacobian of `f: ℝᵐ → ℝᴺ`.
pub fn fd_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    u: &DVector<f64>,
    step: f64,
) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = (0..u.len())
        .map(|j| {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += step;
            dn[j] -= step;
            (f(&up) - f(&dn)) / (2.0 * step)
        })
        .collect();
    DMatrix::from_columns(&cols)
}

/// Quadratic features in the library's ordering: 1, u, then u_i u_j for
/// i ≤ j (row-major) with a ½ on squares.
pub fn quad_features(u: &DVector<f64>) -> DVector<f64> {
    let m = u.len();
    let mut v = vec![1.0];
    v.extend(u.iter().copied());
    for i in 0..m {
        for j in i..m {
            v.push(if i == j {
                0.5 * u[i] * u[i]
            } else {
                u[i] * u[j]
            });
        }
    }
    DVector::from_vec(v)
}

/// `κ₁e^{−at/2}z₀ + (2/a)(κ₂Δ̄ + κ₃V̄)(1 − e^{−at/2})` for constant forcing.
pub fn constant_forcing_bound(
    kappa: [f64; 3],
    a: f64,
    z0: f64,
    dbar: f64,
    vbar: f64,
    t: f64,
) -> f64 {
    let decay = (-0.5 * a * t).exp();
    kappa[0] * decay * z0 + 2.0 / a * (kappa[1] * dbar + kappa[2] * vbar) * (1.0 - decay)
}

/// Least-squares slope of `ln y` against `t`.
pub fn log_linear_slope(t: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&t, &y)| (t, y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    sxy / sxx
}
