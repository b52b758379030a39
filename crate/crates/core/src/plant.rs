//! Continuous-time LTI plant `ẋ = Ax + Bu + Ew`, `y = Cx + Dw`.
//!
//! Construction checks dimensions and that `A` is Hurwitz, and caches `A⁻¹`
//! so the steady-state maps `G = −CA⁻¹B`, `H = D − CA⁻¹E` and equilibria all
//! share one inversion.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{is_spd, max_abs, sym_eig_range, symmetry_defect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzCheck {
    pub stable: bool,
    /// Largest real part over the spectrum. Negative means stable.
    pub margin: f64,
}

pub fn validate_hurwitz(a: &DMatrix<f64>) -> Result<HurwitzCheck> {
    if !a.is_square() {
        return Err(Error::dim(
            "A",
            "square",
            format!("{}x{}", a.nrows(), a.ncols()),
        ));
    }
    if a.is_empty() {
        return Err(Error::dim("A", "n >= 1", 0));
    }
    let margin = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(HurwitzCheck {
        stable: margin < 0.0,
        margin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    a_inv: DMatrix<f64>,
}

impl PlantModel {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        e: DMatrix<f64>,
    ) -> Result<Self> {
        let check = validate_hurwitz(&a)?;
        let n = a.nrows();
        let (m, p, q) = (b.ncols(), c.nrows(), d.ncols());
        let shape = |x: &DMatrix<f64>| format!("{}x{}", x.nrows(), x.ncols());
        if b.nrows() != n || m == 0 {
            return Err(Error::dim("B", format!("{n}xm (m >= 1)"), shape(&b)));
        }
        if c.ncols() != n || p == 0 {
            return Err(Error::dim("C", format!("px{n} (p >= 1)"), shape(&c)));
        }
        if d.nrows() != p || q == 0 {
            return Err(Error::dim("D", format!("{p}xq (q >= 1)"), shape(&d)));
        }
        if e.shape() != (n, q) {
            return Err(Error::dim("E", format!("{n}x{q}"), shape(&e)));
        }
        if !check.stable {
            return Err(Error::NotHurwitz {
                margin: check.margin,
            });
        }
        let a_inv = a
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Singular("A".into()))?;
        let scale = max_abs(&a).max(1.0) * max_abs(&a_inv).max(1.0);
        if max_abs(&(&a * &a_inv - DMatrix::identity(n, n))) > 1e-10 * scale {
            return Err(Error::Singular("A (inverse residual too large)".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            e,
            a_inv,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn m(&self) -> usize {
        self.b.ncols()
    }
    pub fn p(&self) -> usize {
        self.c.nrows()
    }
    pub fn q(&self) -> usize {
        self.d.ncols()
    }

    pub fn a_inv(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    pub fn rhs(
        &self,
        x: &DVector<f64>,
        u: &DVector<f64>,
        w: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_vec("x", x, self.n())?;
        self.check_vec("u", u, self.m())?;
        self.check_vec("w", w, self.q())?;
        Ok(&self.a * x + &self.b * u + &self.e * w)
    }

    pub fn output(&self, x: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_vec("x", x, self.n())?;
        self.check_vec("w", w, self.q())?;
        Ok(&self.c * x + &self.d * w)
    }

    /// `x_eq = −A⁻¹(Bu + Ew)`.
    pub fn equilibrium_state(&self, u: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_vec("u", u, self.m())?;
        self.check_vec("w", w, self.q())?;
        Ok(-(&self.a_inv * (&self.b * u + &self.e * w)))
    }

    pub fn steady_state_maps(&self) -> SteadyStateMaps {
        let a_inv_b = &self.a_inv * &self.b;
        let a_inv_e = &self.a_inv * &self.e;
        SteadyStateMaps {
            g: -(&self.c * a_inv_b),
            h: &self.d - &self.c * a_inv_e,
        }
    }

    fn check_vec(&self, name: &str, v: &DVector<f64>, len: usize) -> Result<()> {
        if v.len() != len {
            return Err(Error::dim(name, len, v.len()));
        }
        Ok(())
    }
}

/// Equilibrium input/disturbance to output maps: `y_eq = G u + H w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateMaps {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
}

impl SteadyStateMaps {
    pub fn output(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        &self.g * u + &self.h * w
    }
}

/// `P ≻ 0` solving `AᵀP + PA = −Q`, with the spectral data the stability
/// certificates need.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovCertificate {
    pub q: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub lambda_min_p: f64,
    pub lambda_max_p: f64,
    pub lambda_min_q: f64,
}

impl LyapunovCertificate {
    pub fn solve(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<Self> {
        let p = solve_lyapunov(a, q)?;
        let (lambda_min_p, lambda_max_p) = sym_eig_range(&p);
        let (lambda_min_q, _) = sym_eig_range(q);
        Ok(Self {
            q: q.clone(),
            p,
            lambda_min_p,
            lambda_max_p,
            lambda_min_q,
        })
    }

    /// Exponential decay rate `λ_min(Q)/λ_max(P)` of `xᵀPx` along `ẋ = Ax`.
    pub fn decay_rate(&self) -> f64 {
        self.lambda_min_q / self.lambda_max_p
    }
}

/// `‖AᵀP + PA + Q‖_max`.
pub fn lyapunov_residual(a: &DMatrix<f64>, p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    max_abs(&(a.transpose() * p + p * a + q))
}

/// Solves `AᵀP + PA = −Q` through the Kronecker-sum system
/// `(I ⊗ Aᵀ + Aᵀ ⊗ I) vec(P) = −vec(Q)`.
pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let check = validate_hurwitz(a)?;
    let n = a.nrows();
    if q.shape() != (n, n) {
        return Err(Error::dim(
            "Q",
            format!("{n}x{n}"),
            format!("{}x{}", q.nrows(), q.ncols()),
        ));
    }
    if !check.stable {
        return Err(Error::NotHurwitz {
            margin: check.margin,
        });
    }
    is_spd(q, "Q")
        .map_err(|_| Error::Precondition("Q must be symmetric positive definite".into()))?;

    let at = a.transpose();
    let eye = DMatrix::<f64>::identity(n, n);
    let kron_sum = eye.kronecker(&at) + at.kronecker(&eye);
    // nalgebra storage is column-major, so this is vec(Q).
    let rhs = -DVector::from_column_slice(q.as_slice());
    let vec_p = kron_sum
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Kronecker-sum Lyapunov operator".into()))?;
    let p = DMatrix::from_column_slice(n, n, vec_p.as_slice());
    let p = (&p + p.transpose()) * 0.5;
    debug_assert!(symmetry_defect(&p) <= 1e-12 * max_abs(&p).max(1.0));
    Ok(p)
}
