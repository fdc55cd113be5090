//! Damped Fisher scoring in working coordinates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::init::{cmnb_fallback_init, cmp_init, nb_moment_init, ratio_regression_init};
use super::models::{fit_policy, loglik_with, score_with, ModelKind, ModelParams};
use crate::dist::TruncationPolicy;
use crate::error::{Error, Result};
use crate::table::FrequencyTable;

const EIGEN_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitStrategy {
    Auto,
    Explicit(ModelParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    pub init: InitStrategy,
    pub max_iter: usize,
    /// Bound on `max_j |∂ ln L/∂θ_j| / n` over the free working coordinates.
    pub grad_tol: f64,
    pub max_halvings: usize,
    /// Largest Newton step, in working units (sup norm).
    pub max_step: f64,
    pub policy: TruncationPolicy,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            init: InitStrategy::Auto,
            max_iter: 200,
            grad_tol: 1e-8,
            max_halvings: 30,
            max_step: 2.0,
            policy: fit_policy(),
        }
    }
}

impl FitConfig {
    pub fn with_init(mut self, params: impl Into<ModelParams>) -> Self {
        self.init = InitStrategy::Explicit(params.into());
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidParameter(
                "grad_tol and max_step must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitStatus {
    Converged,
    MaxIterations,
    /// The iterate ran toward the edge of the parameter space.
    Boundary,
    /// No step length in the halving sequence increased the likelihood.
    StepFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: ModelParams,
    pub initial: ModelParams,
    pub log_likelihood: f64,
    pub converged: bool,
    pub status: FitStatus,
    pub iterations: usize,
    /// Delta-method standard errors in natural coordinates; absent unless
    /// converged in the interior with a positive-definite information.
    pub standard_errors: Option<Vec<f64>>,
    pub gradient_norm: f64,
    /// Log-likelihood of the start and of each accepted iterate.
    pub loglik_trace: Vec<f64>,
}

impl ModelKind {
    pub fn fit(&self, table: &FrequencyTable, config: &FitConfig) -> Result<FitResult> {
        config.validate()?;
        let start = match config.init {
            InitStrategy::Explicit(p) if p.kind() == *self => p,
            InitStrategy::Explicit(p) => {
                return Err(Error::InvalidParameter(format!(
                    "initial parameters are {}, model is {}",
                    p.kind().name(),
                    self.name()
                )))
            }
            InitStrategy::Auto => self.auto_init(table, config)?,
        };
        Scorer {
            kind: *self,
            table,
            config,
        }
        .run(start)
    }

    fn auto_init(&self, table: &FrequencyTable, config: &FitConfig) -> Result<ModelParams> {
        match self {
            ModelKind::Nb => Ok(nb_moment_init(table)?.into()),
            ModelKind::Cmp => Ok(cmp_init(table)?.into()),
            ModelKind::Cmnb => {
                // Candidates: ratio regression, and the NB maximum as the
                // ν = 1 slice. The larger likelihood wins.
                let mut candidates: Vec<ModelParams> = Vec::new();
                if let Ok(p) = ratio_regression_init(table) {
                    candidates.push(p.into());
                }
                let nb_config = FitConfig {
                    init: InitStrategy::Auto,
                    ..*config
                };
                if let Ok(fit) = ModelKind::Nb.fit(table, &nb_config) {
                    if let ModelParams::Nb(nb) = fit.model {
                        candidates.push(nb.as_cmnb().into());
                    }
                }
                if candidates.is_empty() {
                    candidates.push(cmnb_fallback_init(table)?.into());
                }
                let mut best: Option<(f64, ModelParams)> = None;
                for c in candidates {
                    let Ok(ll) = loglik_with(table, c, config.policy) else {
                        continue;
                    };
                    if ll.is_finite() && best.is_none_or(|(b, _)| ll > b) {
                        best = Some((ll, c));
                    }
                }
                best.map(|(_, c)| c)
                    .ok_or(Error::RatioRegression("no start with finite likelihood"))
            }
        }
    }
}

/// CMNB maximum likelihood.
pub fn mle_fit(table: &FrequencyTable, config: &FitConfig) -> Result<FitResult> {
    ModelKind::Cmnb.fit(table, config)
}

pub fn mle_fit_nb(table: &FrequencyTable) -> Result<FitResult> {
    ModelKind::Nb.fit(table, &FitConfig::default())
}

pub fn mle_fit_cmp(table: &FrequencyTable) -> Result<FitResult> {
    ModelKind::Cmp.fit(table, &FitConfig::default())
}

pub fn fit_model(kind: ModelKind, table: &FrequencyTable, config: &FitConfig) -> Result<FitResult> {
    kind.fit(table, config)
}

struct Scorer<'a> {
    kind: ModelKind,
    table: &'a FrequencyTable,
    config: &'a FitConfig,
}

impl Scorer<'_> {
    fn loglik(&self, params: &ModelParams) -> Result<f64> {
        loglik_with(self.table, *params, self.config.policy)
    }

    /// Gradient in working coordinates.
    fn gradient(&self, params: &ModelParams) -> Result<Vec<f64>> {
        let s = score_with(self.table, params, self.config.policy)?;
        let jac = self.kind.param_jacobian(params);
        Ok(s.iter().zip(&jac).map(|(a, b)| a * b).collect())
    }

    fn gradient_at(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.gradient(&self.kind.params_from_theta(theta)?)
    }

    fn at_lower_bound(&self, theta: &[f64], j: usize) -> bool {
        self.kind.lower_bound(j).is_some_and(|b| theta[j] <= b)
    }

    /// `−∂g/∂θ` by central differences, one-sided next to a bound or where
    /// one side leaves the parameter space; symmetrized.
    fn information(&self, theta: &[f64], grad: &[f64]) -> Result<DMatrix<f64>> {
        let d = theta.len();
        let mut jac = DMatrix::<f64>::zeros(d, d);
        for j in 0..d {
            let h = 1e-5 * theta[j].abs().max(1.0);
            let shifted = |delta: f64| {
                let mut t = theta.to_vec();
                t[j] += delta;
                self.gradient_at(&t)
            };
            let below_ok = self.kind.lower_bound(j).is_none_or(|b| theta[j] - h >= b);
            let column = match (shifted(h), below_ok.then(|| shifted(-h))) {
                (Ok(up), Some(Ok(down))) => up
                    .iter()
                    .zip(&down)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect::<Vec<_>>(),
                (Ok(up), _) => up.iter().zip(grad).map(|(a, b)| (a - b) / h).collect(),
                (Err(_), Some(Ok(down))) => {
                    grad.iter().zip(&down).map(|(a, b)| (a - b) / h).collect()
                }
                (Err(e), _) => return Err(e),
            };
            for i in 0..d {
                jac[(i, j)] = column[i];
            }
        }
        Ok(-(&jac + jac.transpose()) * 0.5)
    }

    fn run(&self, start: ModelParams) -> Result<FitResult> {
        let n = self.table.n() as f64;
        let mut params = start;
        let mut theta = start.theta();
        let mut ll = self.loglik(&params)?;
        if !ll.is_finite() {
            return Err(Error::InvalidParameter(
                "log-likelihood is not finite at the start".into(),
            ));
        }
        let mut trace = vec![ll];
        let mut iterations = 0;
        let mut status = FitStatus::MaxIterations;
        let mut grad_norm;
        let mut free: Vec<usize>;
        loop {
            let grad = self.gradient(&params)?;
            free = (0..theta.len())
                .filter(|&j| !(self.at_lower_bound(&theta, j) && grad[j] <= 0.0))
                .collect();
            grad_norm = free.iter().map(|&j| grad[j].abs() / n).fold(0.0, f64::max);
            if grad_norm <= self.config.grad_tol {
                status = FitStatus::Converged;
                break;
            }
            if self.kind.at_boundary(&params) {
                status = FitStatus::Boundary;
                break;
            }
            if iterations >= self.config.max_iter {
                break;
            }
            let info = self.information(&theta, &grad)?;
            let Some(step) = newton_step(&info, &grad, &free) else {
                status = FitStatus::StepFailure;
                break;
            };
            let sup = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            let mut t = (self.config.max_step / sup).min(1.0);
            let mut accepted = None;
            for _ in 0..=self.config.max_halvings {
                let mut cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
                for (j, c) in cand.iter_mut().enumerate() {
                    if let Some(b) = self.kind.lower_bound(j) {
                        *c = c.max(b);
                    }
                }
                if let Ok(p) = self.kind.params_from_theta(&cand) {
                    if let Ok(l) = self.loglik(&p) {
                        if l.is_finite() && l >= ll {
                            accepted = Some((cand, p, l));
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            let Some((cand, p, l)) = accepted else {
                status = FitStatus::StepFailure;
                break;
            };
            theta = cand;
            params = p;
            ll = l;
            trace.push(ll);
            iterations += 1;
        }
        let converged = status == FitStatus::Converged;
        let standard_errors = if converged && free.len() == theta.len() {
            self.standard_errors(&theta, &params)
        } else {
            None
        };
        Ok(FitResult {
            model: params,
            initial: start,
            log_likelihood: ll,
            converged,
            status,
            iterations,
            standard_errors,
            gradient_norm: grad_norm,
            loglik_trace: trace,
        })
    }

    fn standard_errors(&self, theta: &[f64], params: &ModelParams) -> Option<Vec<f64>> {
        let grad = self.gradient(params).ok()?;
        let info = self.information(theta, &grad).ok()?;
        let eig = SymmetricEigen::new(info.clone());
        if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        let cov = info.try_inverse()?;
        let jac = self.kind.param_jacobian(params);
        Some(
            (0..theta.len())
                .map(|j| cov[(j, j)].sqrt() * jac[j].abs())
                .collect(),
        )
    }
}

/// Solves `info · d = grad` on the `free` coordinates after flooring the
/// eigenvalues of the restricted information at `EIGEN_FLOOR` in absolute
/// value. Fixed coordinates get a zero step.
fn newton_step(info: &DMatrix<f64>, grad: &[f64], free: &[usize]) -> Option<Vec<f64>> {
    let m = free.len();
    let mut step = vec![0.0; grad.len()];
    if m == 0 {
        return Some(step);
    }
    let sub = DMatrix::from_fn(m, m, |i, j| info[(free[i], free[j])]);
    let g = DVector::from_iterator(m, free.iter().map(|&j| grad[j]));
    let eig = SymmetricEigen::new(sub);
    let floored = eig.eigenvalues.map(|v| v.abs().max(EIGEN_FLOOR));
    let coords = eig.eigenvectors.transpose() * g;
    let scaled = coords.component_div(&floored);
    let d = &eig.eigenvectors * scaled;
    if d.iter().any(|v| !v.is_finite()) {
        return None;
    }
    for (i, &j) in free.iter().enumerate() {
        step[j] = d[i];
    }
    Some(step)
}
