//! Parameter learning from sporadic, noisy functional evaluations.
//!
//! Every estimator is a deterministic function of the dataset (and its
//! regularization weight); the recursive variant is a deterministic function
//! of the record sequence.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cost::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, pseudo_inverse};

/// Relative singular-value cutoff of the pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-12;

/// One functional evaluation `(t, point, φ(point) + noise)`. Recorded data
/// carry `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub t: f64,
    pub point: DVector<f64>,
    pub value: f64,
}

impl EvaluationRecord {
    pub fn new(t: f64, point: DVector<f64>, value: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::Precondition(format!(
                "evaluation time must be >= 0, got {t}"
            )));
        }
        if !value.is_finite() || point.iter().any(|x| !x.is_finite()) {
            return Err(Error::Precondition(
                "evaluation record must be finite".into(),
            ));
        }
        Ok(Self { t, point, value })
    }
}

/// Append-only evaluation buffer with its regression matrix `B` (rows
/// `b(point)ᵀ`) and target vector `Φ̂`.
#[derive(Debug, Clone)]
pub struct Dataset {
    basis: Arc<dyn BasisSet>,
    records: Vec<EvaluationRecord>,
    rows: Vec<DVector<f64>>,
}

impl Dataset {
    pub fn new(basis: Arc<dyn BasisSet>) -> Self {
        Self {
            basis,
            records: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, record: EvaluationRecord) -> Result<()> {
        if record.point.len() != self.basis.input_dim() {
            return Err(Error::dim(
                "evaluation point",
                self.basis.input_dim(),
                record.point.len(),
            ));
        }
        self.rows.push(self.basis.eval(&record.point));
        self.records.push(record);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn basis(&self) -> &Arc<dyn BasisSet> {
        &self.basis
    }

    pub fn records(&self) -> &[EvaluationRecord] {
        &self.records
    }

    /// `K × N` regression matrix.
    pub fn regression_matrix(&self) -> DMatrix<f64> {
        let n = self.basis.len();
        DMatrix::from_fn(self.rows.len(), n, |i, j| self.rows[i][j])
    }

    pub fn targets(&self) -> DVector<f64> {
        DVector::from_iterator(self.records.len(), self.records.iter().map(|r| r.value))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsFit {
    pub alpha: DVector<f64>,
    /// `‖(I − BB†)Φ̂‖²`.
    pub residual: f64,
    pub rank: usize,
}

/// Least squares through the pseudo-inverse: the unique minimizer when `B` has
/// full column rank, the minimum-norm interpolant when `K < N`.
pub fn fit_ls(data: &Dataset) -> Result<LsFit> {
    if data.is_empty() {
        return Err(Error::Precondition(
            "least squares needs at least one record".into(),
        ));
    }
    let b = data.regression_matrix();
    let phi = data.targets();
    let b_pinv = pseudo_inverse(&b, PINV_CUTOFF);
    let alpha = &b_pinv * &phi;
    let projected = &phi - &b * (&b_pinv * &phi);
    Ok(LsFit {
        alpha,
        residual: projected.norm_squared(),
        rank: numerical_rank(&b, PINV_CUTOFF),
    })
}

/// `(BᵀB + λI)⁻¹BᵀΦ̂`.
pub fn fit_ridge(data: &Dataset, lambda: f64) -> Result<DVector<f64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Precondition(format!(
            "ridge weight must be positive, got {lambda}"
        )));
    }
    if data.is_empty() {
        return Err(Error::Precondition(
            "ridge regression needs at least one record".into(),
        ));
    }
    let b = data.regression_matrix();
    let n = b.ncols();
    let gram = b.tr_mul(&b) + DMatrix::identity(n, n) * lambda;
    let rhs = b.tr_mul(&data.targets());
    gram.cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::Singular("ridge normal matrix".into()))
}

/// Entrywise `max{|z_i| − λ, 0}·sgn(z_i)`.
pub fn soft_threshold(z: &DVector<f64>, lambda: f64) -> DVector<f64> {
    z.map(|zi| (zi.abs() - lambda).max(0.0) * zi.signum())
}

/// Soft-thresholded least squares `z = (BᵀB)⁻¹BᵀΦ̂`. This is the exact lasso
/// minimizer of `½‖Φ̂ − Bα‖² + λ‖α‖₁` only for orthonormal designs.
pub fn fit_lasso(data: &Dataset, lambda: f64) -> Result<DVector<f64>> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Precondition(format!(
            "lasso weight must be nonnegative, got {lambda}"
        )));
    }
    if data.is_empty() {
        return Err(Error::Precondition(
            "lasso needs at least one record".into(),
        ));
    }
    let b = data.regression_matrix();
    let (k, n) = b.shape();
    if k < n || numerical_rank(&b, PINV_CUTOFF) < n {
        return Err(Error::Rank(format!(
            "BᵀB is singular ({k} records, {n} basis functions)"
        )));
    }
    let z = b
        .tr_mul(&b)
        .cholesky()
        .map(|c| c.solve(&b.tr_mul(&data.targets())))
        .ok_or_else(|| Error::Rank("BᵀB is not positive definite".into()))?;
    Ok(soft_threshold(&z, lambda))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    pub alpha: DVector<f64>,
    pub cov: DMatrix<f64>,
}

pub fn rls_init(alpha0: DVector<f64>, cov_scale: f64) -> Result<RlsState> {
    if !(cov_scale > 0.0) || !cov_scale.is_finite() {
        return Err(Error::Precondition(format!(
            "RLS covariance scale must be positive, got {cov_scale}"
        )));
    }
    let n = alpha0.len();
    Ok(RlsState {
        alpha: alpha0,
        cov: DMatrix::identity(n, n) * cov_scale,
    })
}

/// Rank-one update: `k = Pb/(1 + bᵀPb)`, `α ← α + k(φ̂ − bᵀα)`, `P ← P − k bᵀP`.
pub fn rls_update(
    state: &RlsState,
    record: &EvaluationRecord,
    basis: &dyn BasisSet,
) -> Result<RlsState> {
    if record.point.len() != basis.input_dim() {
        return Err(Error::dim(
            "evaluation point",
            basis.input_dim(),
            record.point.len(),
        ));
    }
    if state.alpha.len() != basis.len() {
        return Err(Error::dim("RLS estimate", basis.len(), state.alpha.len()));
    }
    let b = basis.eval(&record.point);
    let pb = &state.cov * &b;
    let denom = 1.0 + b.dot(&pb);
    if !(denom > 0.0) {
        return Err(Error::RlsState);
    }
    let gain = &pb / denom;
    let innovation = record.value - b.dot(&state.alpha);
    let alpha = &state.alpha + &gain * innovation;
    let cov = &state.cov - &gain * pb.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    if cov.clone().cholesky().is_none() || alpha.iter().any(|x| !x.is_finite()) {
        return Err(Error::RlsState);
    }
    Ok(RlsState { alpha, cov })
}

pub fn estimation_error(estimate: &DVector<f64>, truth: &DVector<f64>) -> f64 {
    (estimate - truth).norm()
}

pub fn running_sup_error(history: &[f64]) -> f64 {
    history.iter().copied().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Estimator {
    Ls,
    Ridge { lambda: f64 },
    Lasso { lambda: f64 },
    Rls { cov_scale: f64 },
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Ls => "ls",
            Estimator::Ridge { .. } => "ridge",
            Estimator::Lasso { .. } => "lasso",
            Estimator::Rls { .. } => "rls",
        }
    }
}

/// Estimate valid from `valid_from` until the next refit.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterEstimate {
    pub coeffs: DVector<f64>,
    pub valid_from: f64,
    pub method: &'static str,
}

/// Dataset plus estimator, refitting on every new record.
#[derive(Debug, Clone)]
pub struct Learner {
    data: Dataset,
    estimator: Estimator,
    rls: Option<RlsState>,
}

impl Learner {
    pub fn new(basis: Arc<dyn BasisSet>, estimator: Estimator) -> Result<Self> {
        let rls = match estimator {
            Estimator::Rls { cov_scale } => Some(rls_init(DVector::zeros(basis.len()), cov_scale)?),
            Estimator::Ridge { lambda } if !(lambda > 0.0) => {
                return Err(Error::Precondition(format!(
                    "ridge weight must be positive, got {lambda}"
                )))
            }
            Estimator::Lasso { lambda } if !(lambda >= 0.0) => {
                return Err(Error::Precondition(format!(
                    "lasso weight must be nonnegative, got {lambda}"
                )))
            }
            _ => None,
        };
        Ok(Self {
            data: Dataset::new(basis),
            estimator,
            rls,
        })
    }

    pub fn observe(&mut self, record: EvaluationRecord) -> Result<()> {
        if let Some(state) = &self.rls {
            self.rls = Some(rls_update(state, &record, self.data.basis().as_ref())?);
        }
        self.data.push(record)
    }

    pub fn fit(&self) -> Result<DVector<f64>> {
        match self.estimator {
            Estimator::Ls => Ok(fit_ls(&self.data)?.alpha),
            Estimator::Ridge { lambda } => fit_ridge(&self.data, lambda),
            Estimator::Lasso { lambda } => fit_lasso(&self.data, lambda),
            Estimator::Rls { .. } => Ok(self.rls.as_ref().expect("rls state").alpha.clone()),
        }
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }
}
