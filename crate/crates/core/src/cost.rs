//! Basis-expansion cost models.
//!
//! `φ(u) = b(u)ᵀα + e_φ(u)` and `ψ(y) = d(y)ᵀρ + e_ψ(y)`, where `b`, `d` are
//! [`BasisSet`]s and the optional tails `e_φ`, `e_ψ` are further basis sets
//! with fixed, never-learned coefficients. The controller only ever sees the
//! learned part; the tails model truncation error.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, spectral_norm, sym_eig_range, symmetry_defect};

/// A finite family of differentiable scalar functions on `ℝ^dim`.
pub trait BasisSet: fmt::Debug + Send + Sync {
    fn input_dim(&self) -> usize;

    /// Number of functions in the family.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64>;

    /// `len × input_dim` Jacobian, row `i` is `∇b_iᵀ`.
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64>;

    /// Upper bound on the Lipschitz constant of `∇(b(·)ᵀc)`, if known in
    /// closed form.
    fn gradient_lipschitz(&self, _coeffs: &DVector<f64>) -> Option<f64> {
        None
    }

    /// Lower bound on the Hessian of `b(·)ᵀc` (negative means possibly
    /// non-convex), if known in closed form.
    fn curvature_lower_bound(&self, _coeffs: &DVector<f64>) -> Option<f64> {
        None
    }

    fn as_quadratic(&self) -> Option<&QuadraticBasis> {
        None
    }
}

fn check_len(what: &str, v: &DVector<f64>, len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::dim(what, len, v.len()));
    }
    Ok(())
}

/// `1, u_1..u_m`, then `u_i²/2` on the diagonal and `u_i u_j` off it, walking
/// the upper triangle row by row. For `m = 2` this is
/// `(1, u₁, u₂, u₁²/2, u₁u₂, u₂²/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticBasis {
    m: usize,
}

pub fn quadratic_basis(m: usize) -> Result<QuadraticBasis> {
    if m == 0 {
        return Err(Error::Precondition("quadratic basis needs m >= 1".into()));
    }
    Ok(QuadraticBasis { m })
}

impl QuadraticBasis {
    pub fn count(m: usize) -> usize {
        1 + m + m * (m + 1) / 2
    }

    fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m).flat_map(move |i| (i..self.m).map(move |j| (i, j)))
    }
}

impl BasisSet for QuadraticBasis {
    fn input_dim(&self) -> usize {
        self.m
    }

    fn len(&self) -> usize {
        Self::count(self.m)
    }

    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.push(1.0);
        out.extend(u.iter().copied());
        for (i, j) in self.upper_pairs() {
            out.push(if i == j {
                0.5 * u[i] * u[i]
            } else {
                u[i] * u[j]
            });
        }
        DVector::from_vec(out)
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.len(), self.m);
        for i in 0..self.m {
            jac[(1 + i, i)] = 1.0;
        }
        for (row, (i, j)) in (1 + self.m..).zip(self.upper_pairs()) {
            if i == j {
                jac[(row, i)] = u[i];
            } else {
                jac[(row, i)] = u[j];
                jac[(row, j)] = u[i];
            }
        }
        jac
    }

    fn gradient_lipschitz(&self, coeffs: &DVector<f64>) -> Option<f64> {
        let q = unpack_quadratic(coeffs, self.m).ok()?;
        Some(spectral_norm(&q.upsilon))
    }

    fn curvature_lower_bound(&self, coeffs: &DVector<f64>) -> Option<f64> {
        let q = unpack_quadratic(coeffs, self.m).ok()?;
        Some(sym_eig_range(&q.upsilon).0)
    }

    fn as_quadratic(&self) -> Option<&QuadraticBasis> {
        Some(self)
    }
}

/// `b_i(u) = ln cosh(u_i)`: smooth, convex, gradient `tanh(u_i)` with
/// Lipschitz constant 1 per coordinate. Used as a truncation tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogCoshBasis {
    m: usize,
}

impl LogCoshBasis {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("log-cosh basis needs m >= 1".into()));
        }
        Ok(Self { m })
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl BasisSet for LogCoshBasis {
    fn input_dim(&self) -> usize {
        self.m
    }
    fn len(&self) -> usize {
        self.m
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        u.map(ln_cosh)
    }
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&u.map(f64::tanh))
    }
    fn gradient_lipschitz(&self, coeffs: &DVector<f64>) -> Option<f64> {
        Some(coeffs.iter().fold(0.0, |acc, c| acc.max(c.abs())))
    }
    fn curvature_lower_bound(&self, coeffs: &DVector<f64>) -> Option<f64> {
        // sech² ∈ (0, 1]: nonnegative weights add no negative curvature.
        Some(coeffs.iter().fold(0.0, |acc, &c| acc.min(c)))
    }
}

/// Identity features `b(u) = u`; the regression matrix is the stacked points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearBasis {
    m: usize,
}

impl LinearBasis {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("linear basis needs m >= 1".into()));
        }
        Ok(Self { m })
    }
}

impl BasisSet for LinearBasis {
    fn input_dim(&self) -> usize {
        self.m
    }
    fn len(&self) -> usize {
        self.m
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        u.clone()
    }
    fn jacobian(&self, _u: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(self.m, self.m)
    }
    fn gradient_lipschitz(&self, _coeffs: &DVector<f64>) -> Option<f64> {
        Some(0.0)
    }
    fn curvature_lower_bound(&self, _coeffs: &DVector<f64>) -> Option<f64> {
        Some(0.0)
    }
}

/// `½uᵀΥu + υᵀu + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCost {
    pub upsilon: DMatrix<f64>,
    pub lin: DVector<f64>,
    pub r: f64,
}

impl QuadraticCost {
    pub fn new(upsilon: DMatrix<f64>, lin: DVector<f64>, r: f64) -> Result<Self> {
        let m = lin.len();
        if upsilon.shape() != (m, m) {
            return Err(Error::dim(
                "Upsilon",
                format!("{m}x{m}"),
                format!("{}x{}", upsilon.nrows(), upsilon.ncols()),
            ));
        }
        if symmetry_defect(&upsilon) > 1e-12 * max_abs(&upsilon).max(1.0) {
            return Err(Error::Precondition("Upsilon must be symmetric".into()));
        }
        Ok(Self { upsilon, lin, r })
    }

    /// `½‖y − ξ‖²`.
    pub fn tracking(xi: &DVector<f64>) -> Self {
        let p = xi.len();
        Self {
            upsilon: DMatrix::identity(p, p),
            lin: -xi,
            r: 0.5 * xi.norm_squared(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    pub fn value(&self, u: &DVector<f64>) -> f64 {
        0.5 * u.dot(&(&self.upsilon * u)) + self.lin.dot(u) + self.r
    }

    pub fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.upsilon * u + &self.lin
    }

    pub fn is_psd(&self) -> bool {
        sym_eig_range(&self.upsilon).0 >= -1e-10
    }
}

/// Parameter vector of `q` in the [`QuadraticBasis`] ordering.
pub fn pack_quadratic(q: &QuadraticCost) -> Result<DVector<f64>> {
    let m = q.dim();
    if q.upsilon.shape() != (m, m) {
        return Err(Error::dim(
            "Upsilon",
            format!("{m}x{m}"),
            format!("{:?}", q.upsilon.shape()),
        ));
    }
    if symmetry_defect(&q.upsilon) > 1e-12 * max_abs(&q.upsilon).max(1.0) {
        return Err(Error::Precondition("Upsilon must be symmetric".into()));
    }
    let mut out = Vec::with_capacity(QuadraticBasis::count(m));
    out.push(q.r);
    out.extend(q.lin.iter().copied());
    for i in 0..m {
        for j in i..m {
            // The cross basis function is u_i u_j, so it carries Υ_ij once; the
            // symmetric Υ_ji partner is implied.
            out.push(q.upsilon[(i, j)]);
        }
    }
    Ok(DVector::from_vec(out))
}

pub fn unpack_quadratic(alpha: &DVector<f64>, m: usize) -> Result<QuadraticCost> {
    check_len("alpha", alpha, QuadraticBasis::count(m))?;
    let r = alpha[0];
    let lin = alpha.rows(1, m).into_owned();
    let mut upsilon = DMatrix::zeros(m, m);
    let mut k = 1 + m;
    for i in 0..m {
        for j in i..m {
            upsilon[(i, j)] = alpha[k];
            upsilon[(j, i)] = alpha[k];
            k += 1;
        }
    }
    Ok(QuadraticCost { upsilon, lin, r })
}

/// `∇b(u)ᵀ α̂`: gradient of the learned model `b(·)ᵀα̂`.
pub fn model_gradient(
    basis: &dyn BasisSet,
    coeffs: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_len("point", u, basis.input_dim())?;
    check_len("coefficients", coeffs, basis.len())?;
    Ok(basis.jacobian(u).tr_mul(coeffs))
}

pub fn grad_phi_hat(
    basis: &dyn BasisSet,
    alpha_hat: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<DVector<f64>> {
    model_gradient(basis, alpha_hat, u)
}

pub fn grad_psi_hat(
    basis: &dyn BasisSet,
    rho_hat: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    model_gradient(basis, rho_hat, y)
}

/// Fixed-coefficient tail of a basis expansion.
#[derive(Debug, Clone)]
pub struct Tail {
    pub basis: Arc<dyn BasisSet>,
    pub coeffs: DVector<f64>,
}

/// One side of the composite cost: learned part plus optional tail.
#[derive(Debug, Clone)]
pub struct CostTerm {
    pub basis: Arc<dyn BasisSet>,
    pub coeffs: DVector<f64>,
    pub tail: Option<Tail>,
}

impl CostTerm {
    pub fn new(basis: Arc<dyn BasisSet>, coeffs: DVector<f64>) -> Result<Self> {
        check_len("coefficients", &coeffs, basis.len())?;
        Ok(Self {
            basis,
            coeffs,
            tail: None,
        })
    }

    pub fn quadratic(q: &QuadraticCost) -> Result<Self> {
        let basis = quadratic_basis(q.dim())?;
        Self::new(Arc::new(basis), pack_quadratic(q)?)
    }

    pub fn with_tail(mut self, basis: Arc<dyn BasisSet>, coeffs: DVector<f64>) -> Result<Self> {
        check_len("tail coefficients", &coeffs, basis.len())?;
        if basis.input_dim() != self.basis.input_dim() {
            return Err(Error::dim(
                "tail input dimension",
                self.basis.input_dim(),
                basis.input_dim(),
            ));
        }
        self.tail = Some(Tail { basis, coeffs });
        Ok(self)
    }

    pub fn input_dim(&self) -> usize {
        self.basis.input_dim()
    }

    pub fn value(&self, u: &DVector<f64>) -> f64 {
        let mut v = self.basis.eval(u).dot(&self.coeffs);
        if let Some(t) = &self.tail {
            v += t.basis.eval(u).dot(&t.coeffs);
        }
        v
    }

    /// True gradient, tail included.
    pub fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut g = self.basis.jacobian(u).tr_mul(&self.coeffs);
        if let Some(t) = &self.tail {
            g += t.basis.jacobian(u).tr_mul(&t.coeffs);
        }
        g
    }

    /// `∇e(u)`, zero without a tail.
    pub fn tail_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        match &self.tail {
            Some(t) => t.basis.jacobian(u).tr_mul(&t.coeffs),
            None => DVector::zeros(u.len()),
        }
    }

    /// The learned part as a quadratic, when the basis is quadratic and there
    /// is no tail.
    pub fn as_pure_quadratic(&self) -> Option<QuadraticCost> {
        if self.tail.is_some() {
            return None;
        }
        let qb = self.basis.as_quadratic()?;
        unpack_quadratic(&self.coeffs, qb.input_dim()).ok()
    }
}

/// `u ↦ φ(u) + ψ(Gu + Hw)`.
#[derive(Debug, Clone)]
pub struct CompositeCost {
    pub phi: CostTerm,
    pub psi: CostTerm,
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
}

impl CompositeCost {
    pub fn new(phi: CostTerm, psi: CostTerm, g: DMatrix<f64>, h: DMatrix<f64>) -> Result<Self> {
        let (p, m) = g.shape();
        if phi.input_dim() != m {
            return Err(Error::dim("phi input dimension", m, phi.input_dim()));
        }
        if psi.input_dim() != p {
            return Err(Error::dim("psi input dimension", p, psi.input_dim()));
        }
        if h.nrows() != p {
            return Err(Error::dim("H rows", p, h.nrows()));
        }
        Ok(Self { phi, psi, g, h })
    }

    pub fn m(&self) -> usize {
        self.g.ncols()
    }
    pub fn p(&self) -> usize {
        self.g.nrows()
    }
    pub fn q(&self) -> usize {
        self.h.ncols()
    }

    fn check_uw(&self, u: &DVector<f64>, w: &DVector<f64>) -> Result<()> {
        check_len("u", u, self.m())?;
        check_len("w", w, self.q())
    }

    /// Steady-state output `Gu + Hw`.
    pub fn output(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        &self.g * u + &self.h * w
    }

    pub fn value(&self, u: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        self.check_uw(u, w)?;
        Ok(self.phi.value(u) + self.psi.value(&self.output(u, w)))
    }

    /// `∇φ(u) + Gᵀ∇ψ(Gu + Hw)` with the tails included.
    pub fn gradient(&self, u: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_uw(u, w)?;
        Ok(self.gradient_unchecked(u, w))
    }

    fn gradient_unchecked(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        self.phi.gradient(u) + self.g.tr_mul(&self.psi.gradient(&self.output(u, w)))
    }
}

pub fn composite_gradient(
    cost: &CompositeCost,
    u: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<DVector<f64>> {
    cost.gradient(u, w)
}

/// Smoothness and strong-convexity constants of the composite cost. The
/// `*_n`/`*_m` fields belong to the learned parts and `*_e` to the tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessConstants {
    pub l_u: f64,
    pub l_y: f64,
    pub l: f64,
    pub mu_u: f64,
    pub g_norm: f64,
    pub l_u_n: f64,
    pub l_y_m: f64,
    pub l_u_e: f64,
    pub l_y_e: f64,
}

impl SmoothnessConstants {
    /// User-supplied constants for bases without closed-form curvature.
    pub fn user(
        l_u_n: f64,
        l_y_m: f64,
        l_u_e: f64,
        l_y_e: f64,
        mu_u: f64,
        g_norm: f64,
    ) -> Result<Self> {
        let all = [l_u_n, l_y_m, l_u_e, l_y_e, g_norm];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Precondition(
                "smoothness constants must be finite and nonnegative".into(),
            ));
        }
        let l_u = l_u_n + l_u_e;
        let l_y = l_y_m + l_y_e;
        let l = l_u + g_norm * g_norm * l_y;
        if !(mu_u > 0.0) {
            return Err(Error::Convexity(format!("mu_u = {mu_u} must be positive")));
        }
        if mu_u > l * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "mu_u = {mu_u} exceeds l = {l}"
            )));
        }
        Ok(Self {
            l_u,
            l_y,
            l,
            mu_u,
            g_norm,
            l_u_n,
            l_y_m,
            l_u_e,
            l_y_e,
        })
    }

    /// The constants of the truncation-free problem: tails dropped.
    pub fn has_tails(&self) -> bool {
        self.l_u_e > 0.0 || self.l_y_e > 0.0
    }
}

pub fn smoothness_constants(cost: &CompositeCost) -> Result<SmoothnessConstants> {
    let unknown = |what: &str| {
        Error::Precondition(format!(
            "no closed-form curvature for the {what} basis; supply constants with SmoothnessConstants::user"
        ))
    };
    let lip = |t: &CostTerm, what: &str| -> Result<(f64, f64)> {
        let main = t
            .basis
            .gradient_lipschitz(&t.coeffs)
            .ok_or_else(|| unknown(what))?;
        let tail = match &t.tail {
            Some(tl) => tl
                .basis
                .gradient_lipschitz(&tl.coeffs)
                .ok_or_else(|| unknown(what))?,
            None => 0.0,
        };
        Ok((main, tail))
    };
    let (l_u_n, l_u_e) = lip(&cost.phi, "phi")?;
    let (l_y_m, l_y_e) = lip(&cost.psi, "psi")?;
    let g_norm = spectral_norm(&cost.g);

    let mu_u = match (cost.phi.basis.as_quadratic(), cost.psi.basis.as_quadratic()) {
        (Some(qb_phi), Some(qb_psi)) => {
            let qphi = unpack_quadratic(&cost.phi.coeffs, qb_phi.input_dim())?;
            let qpsi = unpack_quadratic(&cost.psi.coeffs, qb_psi.input_dim())?;
            let hess = &qphi.upsilon + cost.g.transpose() * &qpsi.upsilon * &cost.g;
            let mut mu = sym_eig_range(&hess).0;
            let tail_low = |t: &CostTerm| -> Result<f64> {
                match &t.tail {
                    Some(tl) => tl
                        .basis
                        .curvature_lower_bound(&tl.coeffs)
                        .ok_or_else(|| unknown("tail")),
                    None => Ok(0.0),
                }
            };
            mu += tail_low(&cost.phi)?.min(0.0);
            mu += tail_low(&cost.psi)?.min(0.0) * g_norm * g_norm;
            mu
        }
        _ => return Err(unknown("non-quadratic")),
    };
    SmoothnessConstants::user(l_u_n, l_y_m, l_u_e, l_y_e, mu_u, g_norm)
}

/// Default gradient tolerance of the optimizer oracle.
pub const ORACLE_TOL: f64 = 1e-10;
const ORACLE_MAX_ITERS: usize = 1_000_000;

/// Minimizer `u*(w)` of the composite cost.
///
/// Uses the normal equations when both learned parts are quadratic and there
/// are no tails; otherwise gradient descent with step `1/ℓ`, warm-started.
#[derive(Debug, Clone)]
pub struct OptimizerOracle {
    cost: CompositeCost,
    consts: SmoothnessConstants,
    closed_form: Option<ClosedForm>,
}

#[derive(Debug, Clone)]
struct ClosedForm {
    hess_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lin_phi: DVector<f64>,
    upsilon_psi: DMatrix<f64>,
    lin_psi: DVector<f64>,
}

impl OptimizerOracle {
    pub fn new(cost: &CompositeCost) -> Result<Self> {
        let consts = smoothness_constants(cost)?;
        Self::with_constants(cost, consts)
    }

    pub fn with_constants(cost: &CompositeCost, consts: SmoothnessConstants) -> Result<Self> {
        if !(consts.mu_u > 0.0) {
            return Err(Error::Convexity(format!("mu_u = {}", consts.mu_u)));
        }
        let closed_form = match (cost.phi.as_pure_quadratic(), cost.psi.as_pure_quadratic()) {
            (Some(qphi), Some(qpsi)) => {
                let hess = &qphi.upsilon + cost.g.transpose() * &qpsi.upsilon * &cost.g;
                Some(ClosedForm {
                    hess_lu: hess.lu(),
                    lin_phi: qphi.lin,
                    upsilon_psi: qpsi.upsilon,
                    lin_psi: qpsi.lin,
                })
            }
            _ => None,
        };
        Ok(Self {
            cost: cost.clone(),
            consts,
            closed_form,
        })
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    pub fn solve(
        &self,
        w: &DVector<f64>,
        warm: Option<&DVector<f64>>,
        tol: f64,
    ) -> Result<DVector<f64>> {
        check_len("w", w, self.cost.q())?;
        if let Some(cf) = &self.closed_form {
            // Υu + υ + Gᵀ(Υ_ψ(Gu + Hw) + υ_ψ) = 0
            let rhs = -(&cf.lin_phi
                + self
                    .cost
                    .g
                    .tr_mul(&(&cf.upsilon_psi * (&self.cost.h * w) + &cf.lin_psi)));
            let u = cf
                .hess_lu
                .solve(&rhs)
                .ok_or_else(|| Error::Convexity("composite Hessian is singular".into()))?;
            if self.cost.gradient_unchecked(&u, w).norm() <= tol {
                return Ok(u);
            }
            return self.descend(w, u, tol);
        }
        let start = warm
            .cloned()
            .unwrap_or_else(|| DVector::zeros(self.cost.m()));
        check_len("warm start", &start, self.cost.m())?;
        self.descend(w, start, tol)
    }

    /// Gradient descent with step `1/ℓ` only, ignoring any closed form.
    pub fn solve_by_descent(
        &self,
        w: &DVector<f64>,
        start: DVector<f64>,
        tol: f64,
    ) -> Result<DVector<f64>> {
        check_len("w", w, self.cost.q())?;
        check_len("start", &start, self.cost.m())?;
        self.descend(w, start, tol)
    }

    fn descend(&self, w: &DVector<f64>, mut u: DVector<f64>, tol: f64) -> Result<DVector<f64>> {
        let step = 1.0 / self.consts.l;
        let mut grad = self.cost.gradient_unchecked(&u, w);
        let mut gnorm = grad.norm();
        let g0 = gnorm;
        for _ in 0..ORACLE_MAX_ITERS {
            if gnorm <= tol {
                return Ok(u);
            }
            u -= &grad * step;
            grad = self.cost.gradient_unchecked(&u, w);
            gnorm = grad.norm();
            // Under μ_u-strong convexity and ℓ-smoothness the gradient norm
            // contracts; growth means the constants are wrong.
            if !gnorm.is_finite() || gnorm > 1e6 * g0.max(1.0) {
                return Err(Error::Convexity(
                    "gradient descent is not contracting (cost not strongly convex?)".into(),
                ));
            }
        }
        Err(Error::NonConvergence {
            iterations: ORACLE_MAX_ITERS,
            residual: gnorm,
        })
    }

    pub fn constants(&self) -> &SmoothnessConstants {
        &self.consts
    }

    pub fn cost(&self) -> &CompositeCost {
        &self.cost
    }
}

pub fn optimizer_oracle(cost: &CompositeCost, w: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    OptimizerOracle::new(cost)?.solve(w, None, tol)
}

/// Polyak-Łojasiewicz check
/// `‖∇f(u)‖² + tol ≥ 2μ_u (f(u) − f(u*))` for the composite `f`.
pub fn check_pl(
    cost: &CompositeCost,
    consts: &SmoothnessConstants,
    w: &DVector<f64>,
    u: &DVector<f64>,
    tol: f64,
) -> Result<bool> {
    let oracle = OptimizerOracle::with_constants(cost, *consts)?;
    let u_star = oracle.solve(w, Some(u), ORACLE_TOL)?;
    let lhs = cost.gradient(u, w)?.norm_squared();
    let gap = cost.value(u, w)? - cost.value(&u_star, w)?;
    Ok(lhs + tol >= 2.0 * consts.mu_u * gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::benchmark4;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn isotropic(m: usize, xi: &[f64]) -> CompositeCost {
        let phi = CostTerm::quadratic(
            &QuadraticCost::new(DMatrix::identity(m, m), DVector::zeros(m), 0.0).unwrap(),
        )
        .unwrap();
        let psi = CostTerm::quadratic(&QuadraticCost::tracking(&v(xi))).unwrap();
        CompositeCost::new(phi, psi, DMatrix::identity(m, m), DMatrix::zeros(m, 1)).unwrap()
    }

    #[test]
    fn quadratic_basis_layout() {
        let b = quadratic_basis(2).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(quadratic_basis(4).unwrap().len(), 15);
        assert!(quadratic_basis(0).is_err());

        let u = v(&[1.0, 2.0]);
        assert_eq!(b.eval(&u), v(&[1.0, 1.0, 2.0, 0.5, 2.0, 2.0]));
        let jac = b.jacobian(&u);
        let expected =
            DMatrix::from_row_slice(6, 2, &[0., 0., 1., 0., 0., 1., 1., 0., 2., 1., 0., 2.]);
        assert_eq!(jac, expected);
    }

    #[test]
    fn pack_examples() {
        let q = QuadraticCost::new(DMatrix::zeros(3, 3), DVector::zeros(3), 3.0).unwrap();
        let alpha = pack_quadratic(&q).unwrap();
        assert_eq!(alpha[0], 3.0);
        assert!(alpha.rows(1, alpha.len() - 1).iter().all(|&x| x == 0.0));

        let q = QuadraticCost::new(DMatrix::identity(2, 2), DVector::zeros(2), 0.0).unwrap();
        assert_eq!(pack_quadratic(&q).unwrap(), v(&[0., 0., 0., 1., 0., 1.]));

        let asym = QuadraticCost {
            upsilon: DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]),
            lin: DVector::zeros(2),
            r: 0.0,
        };
        assert!(matches!(pack_quadratic(&asym), Err(Error::Precondition(_))));
    }

    #[test]
    fn benchmark_pack_evaluates_like_the_quadratic() {
        let q = QuadraticCost::new(
            benchmark4::upsilon(),
            benchmark4::upsilon_lin(),
            benchmark4::R,
        )
        .unwrap();
        let alpha = pack_quadratic(&q).unwrap();
        assert_eq!(unpack_quadratic(&alpha, 4).unwrap(), q);
        let b = quadratic_basis(4).unwrap();
        for k in 0..100 {
            let t = k as f64 * 0.37;
            let u = v(&[
                t.sin(),
                (1.3 * t).cos(),
                0.5 * t.sin() * t.cos(),
                2.0 - 0.04 * t,
            ]);
            let direct = 0.5 * u.dot(&(&q.upsilon * &u)) + q.lin.dot(&u) + q.r;
            assert!((b.eval(&u).dot(&alpha) - direct).abs() < 1e-10);
            let g = grad_phi_hat(&b, &alpha, &u).unwrap();
            assert!((g - (&q.upsilon * &u + &q.lin)).amax() < 1e-10);
        }
    }

    #[test]
    fn model_gradient_examples() {
        let b = quadratic_basis(2).unwrap();
        let alpha = pack_quadratic(
            &QuadraticCost::new(DMatrix::identity(2, 2), DVector::zeros(2), 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(
            grad_phi_hat(&b, &alpha, &v(&[1.0, 2.0])).unwrap(),
            v(&[1.0, 2.0])
        );
        assert_eq!(
            grad_psi_hat(&b, &DVector::zeros(6), &v(&[1.0, 2.0])).unwrap(),
            DVector::zeros(2)
        );
        assert!(matches!(
            grad_phi_hat(&b, &DVector::zeros(5), &v(&[1.0, 2.0])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn composite_gradient_example() {
        let cost = isotropic(2, &[0.0, 0.0]);
        let g = composite_gradient(&cost, &v(&[1.0, 0.0]), &v(&[0.0])).unwrap();
        assert_eq!(g, v(&[2.0, 0.0]));
    }

    #[test]
    fn oracle_examples() {
        let cost = isotropic(2, &[0.0, 0.0]);
        let u = optimizer_oracle(&cost, &v(&[0.0]), 1e-10).unwrap();
        assert!(u.amax() < 1e-12);

        let cost = isotropic(2, &[2.0, 0.0]);
        let oracle = OptimizerOracle::new(&cost).unwrap();
        let u = oracle.solve(&v(&[0.0]), None, 1e-10).unwrap();
        assert!((&u - v(&[1.0, 0.0])).amax() < 1e-12);
        let u_gd = oracle
            .solve_by_descent(&v(&[0.0]), DVector::zeros(2), 1e-12)
            .unwrap();
        assert!((u_gd - v(&[1.0, 0.0])).amax() < 1e-11);
        assert!(cost.gradient(&u, &v(&[0.0])).unwrap().norm() < 1e-10);
    }

    #[test]
    fn smoothness_examples() {
        let c = smoothness_constants(&isotropic(2, &[0.0, 0.0])).unwrap();
        assert!((c.l_u - 1.0).abs() < 1e-12);
        assert!((c.l_y - 1.0).abs() < 1e-12);
        assert!((c.l - 2.0).abs() < 1e-12);
        assert!((c.mu_u - 2.0).abs() < 1e-12);

        let phi = CostTerm::quadratic(
            &QuadraticCost::new(
                DMatrix::from_diagonal(&v(&[1.0, 4.0])),
                DVector::zeros(2),
                0.0,
            )
            .unwrap(),
        )
        .unwrap();
        let psi = CostTerm::quadratic(&QuadraticCost::tracking(&v(&[0.0, 0.0]))).unwrap();
        let cost =
            CompositeCost::new(phi, psi, DMatrix::zeros(2, 2), DMatrix::zeros(2, 1)).unwrap();
        let c = smoothness_constants(&cost).unwrap();
        assert!((c.mu_u - 1.0).abs() < 1e-12);
        assert!((c.l_u - 4.0).abs() < 1e-12);
    }

    #[test]
    fn strong_convexity_violation_is_reported() {
        let phi = CostTerm::quadratic(
            &QuadraticCost::new(DMatrix::zeros(2, 2), DVector::zeros(2), 0.0).unwrap(),
        )
        .unwrap();
        let psi = CostTerm::quadratic(&QuadraticCost::tracking(&v(&[0.0, 0.0]))).unwrap();
        let cost =
            CompositeCost::new(phi, psi, DMatrix::zeros(2, 2), DMatrix::zeros(2, 1)).unwrap();
        assert!(matches!(
            smoothness_constants(&cost),
            Err(Error::Convexity(_))
        ));
        assert!(matches!(
            SmoothnessConstants::user(1.0, 1.0, 0.0, 0.0, 5.0, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pl_examples() {
        let cost = isotropic(2, &[2.0, -1.0]);
        let consts = smoothness_constants(&cost).unwrap();
        let w = v(&[0.0]);
        let u_star = optimizer_oracle(&cost, &w, 1e-12).unwrap();
        assert!(check_pl(&cost, &consts, &w, &u_star, 1e-12).unwrap());

        // φ = ½‖u‖², ψ ≡ 0: equality case ‖u‖² = 2·1·½‖u‖².
        let phi = CostTerm::quadratic(
            &QuadraticCost::new(DMatrix::identity(2, 2), DVector::zeros(2), 0.0).unwrap(),
        )
        .unwrap();
        let psi = CostTerm::quadratic(
            &QuadraticCost::new(DMatrix::zeros(2, 2), DVector::zeros(2), 0.0).unwrap(),
        )
        .unwrap();
        let cost =
            CompositeCost::new(phi, psi, DMatrix::identity(2, 2), DMatrix::zeros(2, 1)).unwrap();
        let consts = smoothness_constants(&cost).unwrap();
        assert!((consts.mu_u - 1.0).abs() < 1e-12);
        assert!(check_pl(&cost, &consts, &w, &v(&[3.0, -4.0]), 1e-9).unwrap());
    }

    #[test]
    fn log_cosh_tail() {
        let t = LogCoshBasis::new(2).unwrap();
        let u = v(&[0.3, -800.0]);
        let e = t.eval(&u);
        assert!((e[0] - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((e[1] - (800.0 - std::f64::consts::LN_2)).abs() < 1e-9);
        assert_eq!(t.gradient_lipschitz(&v(&[0.1, -0.4])), Some(0.4));
        assert_eq!(t.curvature_lower_bound(&v(&[0.1, 0.2])), Some(0.0));
    }

    #[test]
    fn tail_enters_true_gradient_only() {
        let phi = CostTerm::quadratic(
            &QuadraticCost::new(DMatrix::identity(2, 2), DVector::zeros(2), 0.0).unwrap(),
        )
        .unwrap()
        .with_tail(Arc::new(LogCoshBasis::new(2).unwrap()), v(&[0.5, 0.5]))
        .unwrap();
        let u = v(&[1.0, -1.0]);
        let g = phi.gradient(&u);
        let tanh1 = 1f64.tanh();
        assert!((g - v(&[1.0 + 0.5 * tanh1, -1.0 - 0.5 * tanh1])).amax() < 1e-14);
        assert_eq!(
            grad_phi_hat(phi.basis.as_ref(), &phi.coeffs, &u).unwrap(),
            u
        );
        assert!(phi.as_pure_quadratic().is_none());
    }
}
