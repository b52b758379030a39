//! Small dense helpers on top of nalgebra shared by every module.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest singular value (induced 2-norm). Zero for empty matrices.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Max-entry norm.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn sym_eig_range(m: &DMatrix<f64>) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let ev = sym.symmetric_eigenvalues();
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

pub fn is_spd(m: &DMatrix<f64>, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dim(
            name,
            "square",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    let scale = max_abs(m).max(1.0);
    if symmetry_defect(m) > 1e-10 * scale {
        return Err(Error::NotPositiveDefinite(format!("{name} (asymmetric)")));
    }
    let (lo, _) = sym_eig_range(m);
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite(name.to_string()));
    }
    Ok(())
}

/// Moore-Penrose pseudo-inverse through the SVD, discarding singular values
/// below `rel_cutoff * sigma_max`.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_cutoff * sigma_max;
    let k = svd.singular_values.len();
    let mut out = DMatrix::zeros(c, r);
    for i in 0..k {
        let s = svd.singular_values[i];
        if s > cutoff && s > 0.0 {
            out += v_t.row(i).transpose() * u.column(i).transpose() / s;
        }
    }
    out
}

pub fn numerical_rank(m: &DMatrix<f64>, rel_cutoff: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    sv.iter()
        .filter(|&&s| s > rel_cutoff * smax && s > 0.0)
        .count()
}

pub fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::dim(format!("row {i}"), ncols, r.len()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_identities() {
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]);
        let p = pseudo_inverse(&b, 1e-12);
        assert!(max_abs(&(&b * &p * &b - &b)) < 1e-12);
        assert!(max_abs(&(&p * &b * &p - &p)) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_diag() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -3.0, 2.0]));
        assert!((spectral_norm(&d) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }
}
