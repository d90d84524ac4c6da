//! Least-squares fitting, information criteria and the restricted GLS
//! estimator.
//!
//! Throughout, `T_eff = T - p` and the innovation covariance is
//! `Σ̂ = ÛᵀÛ / T_eff` with missing residual cells counted as zero.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::design::{build_design_with, NetworkSchedule};
use crate::error::{Error, Result, Warning};
use crate::linalg::{cholesky_solve, inverse, log_det_spd, lstsq, Matrix};
use crate::model::{constraint_matrix, CoefficientSet, ModelSpec};
use crate::network::{MaskMode, Network};
use crate::series::SeriesMatrix;

/// Ridge added to a singular innovation covariance.
pub const RIDGE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    #[default]
    Bic,
    Aic,
}

impl Criterion {
    pub fn penalty(self, n_params: usize, t_eff: usize) -> f64 {
        let (m, t) = (n_params as f64, t_eff as f64);
        match self {
            Criterion::Bic => m * libm::log(t) / t,
            Criterion::Aic => 2.0 * m / t,
        }
    }

    pub fn value(self, log_det: f64, n_params: usize, t_eff: usize) -> f64 {
        log_det + self.penalty(n_params, t_eff)
    }
}

/// Gaussian log-likelihood at the ML covariance `Σ̂` for `n_nodes` series.
pub fn gaussian_loglik(log_det: f64, n_nodes: usize, t_eff: usize) -> f64 {
    let (n, t) = (n_nodes as f64, t_eff as f64);
    -0.5 * t * n * libm::log(2.0 * PI) - 0.5 * t * log_det - 0.5 * t * n
}

/// `ÛᵀÛ / t_eff` with missing cells as zero.
pub fn innovation_cov(residuals: &SeriesMatrix, t_eff: usize) -> Result<Matrix> {
    if t_eff == 0 {
        return Err(Error::InvalidArgument("effective sample size is zero".into()));
    }
    let n = residuals.n_nodes();
    let mut s = Matrix::zeros(n, n);
    for row in residuals.rows() {
        for a in 0..n {
            let Some(ua) = row[a] else { continue };
            for b in 0..n {
                if let Some(ub) = row[b] {
                    s[(a, b)] += ua * ub;
                }
            }
        }
    }
    Ok(s.scale(1.0 / t_eff as f64))
}

/// `ln |Σ|`, adding `RIDGE·I` when `Σ` is not positive definite and that is
/// allowed. The flag reports whether the ridge was used.
pub fn log_det_stabilized(sigma: &Matrix, allow_ridge: bool) -> Result<(f64, bool)> {
    match log_det_spd(sigma) {
        Ok(v) if v.is_finite() => Ok((v, false)),
        _ if allow_ridge => {
            let ridged = sigma.add(&Matrix::identity(sigma.rows()).scale(RIDGE))?;
            Ok((log_det_spd(&ridged)?, true))
        }
        _ => Err(Error::Singular("innovation covariance")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub mask_mode: MaskMode,
    /// Stabilise a singular `Σ̂` instead of failing.
    pub allow_ridge: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { mask_mode: MaskMode::Reweight, allow_ridge: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: ModelSpec,
    /// Estimates; `sigma` holds each node's residual RMS.
    pub coef: CoefficientSet,
    pub gamma: Vec<f64>,
    pub names: Vec<String>,
    /// NaN for aliased columns or when no residual degrees of freedom remain.
    pub se: Vec<f64>,
    pub fitted: SeriesMatrix,
    pub residuals: SeriesMatrix,
    pub sigma_u_hat: Matrix,
    pub rss: f64,
    pub rank: usize,
    /// Retained rows minus rank.
    pub dof: usize,
    pub n_obs_used: usize,
    pub dropped_row_count: usize,
    pub t_eff: usize,
    /// Residual cells per node contributing to `Σ̂`.
    pub effective_sample: Vec<usize>,
    pub log_det: f64,
    pub bic: f64,
    pub aic: f64,
    pub loglik: f64,
    pub warnings: Vec<Warning>,
}

impl FitResult {
    pub fn n_params(&self) -> usize {
        self.gamma.len()
    }

    pub fn criterion(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Bic => self.bic,
            Criterion::Aic => self.aic,
        }
    }
}

pub fn fit(vts: &SeriesMatrix, net: &Network, spec: &ModelSpec) -> Result<FitResult> {
    fit_with(vts, NetworkSchedule::Static(net), spec, FitOptions::default())
}

pub fn fit_with(
    vts: &SeriesMatrix,
    schedule: NetworkSchedule<'_>,
    spec: &ModelSpec,
    opts: FitOptions,
) -> Result<FitResult> {
    let n = vts.n_nodes();
    let design = build_design_with(vts, schedule, spec, opts.mask_mode)?;
    let m = design.x.cols();
    let rows = design.n_rows();
    if rows < m {
        return Err(Error::InsufficientData { rows, params: m });
    }
    let ls = lstsq(&design.x, &design.y)?;
    let mut warnings = Vec::new();
    if !ls.aliased.is_empty() {
        warnings.push(Warning::RankDeficient { aliased: ls.aliased.clone() });
    }

    let fitted_vals = design.x.mul_vec(&ls.coef)?;
    let mut fitted = SeriesMatrix::empty_like(vts.names().to_vec(), vts.n_times());
    let mut residuals = fitted.clone();
    let mut rss = 0.0;
    let mut node_ss = vec![0.0; n];
    let mut effective_sample = vec![0usize; n];
    for ((&(t, i), &f), &y) in design.row_index.iter().zip(&fitted_vals).zip(&design.y) {
        let u = y - f;
        fitted.set(t, i, Some(f));
        residuals.set(t, i, Some(u));
        rss += u * u;
        node_ss[i] += u * u;
        effective_sample[i] += 1;
    }

    let dof = rows - ls.rank;
    let s2 = if dof > 0 { rss / dof as f64 } else { f64::NAN };
    let se = ls.unscaled_var.iter().map(|v| libm::sqrt(s2 * v)).collect();
    let sigma = node_ss
        .iter()
        .zip(&effective_sample)
        .map(|(ss, &k)| if k > 0 { libm::sqrt(ss / k as f64) } else { 0.0 })
        .collect();
    let coef = CoefficientSet::from_gamma(spec, n, &ls.coef, sigma)?;

    let t_eff = vts.n_times() - spec.p();
    let sigma_u_hat = innovation_cov(&residuals, t_eff)?;
    let (log_det, ridged) = log_det_stabilized(&sigma_u_hat, opts.allow_ridge)?;
    if ridged {
        warnings.push(Warning::RidgeStabilized);
    }

    Ok(FitResult {
        names: spec.param_names(n),
        spec: spec.clone(),
        coef,
        gamma: ls.coef,
        se,
        fitted,
        residuals,
        sigma_u_hat,
        rss,
        rank: ls.rank,
        dof,
        n_obs_used: rows,
        dropped_row_count: design.dropped_rows(),
        t_eff,
        effective_sample,
        log_det,
        bic: Criterion::Bic.value(log_det, m, t_eff),
        aic: Criterion::Aic.value(log_det, m, t_eff),
        loglik: gaussian_loglik(log_det, n, t_eff),
        warnings,
    })
}

/// Restricted GLS estimate
/// `γ̃ = [Rᵀ(ZZᵀ ⊗ Σ̃⁻¹)R]⁻¹ Rᵀ(Z ⊗ Σ̃⁻¹) vec(X)`, built with explicit
/// Kronecker products. `Z` stacks the lagged observations
/// `[X_{t-1}; …; X_{t-p}]` as columns and `X` holds `X_t`, `t = p+1..T`.
/// Complete data and a static network only.
pub fn gls_restricted_estimate(
    vts: &SeriesMatrix,
    net: &Network,
    spec: &ModelSpec,
    sigma_tilde: &Matrix,
) -> Result<Vec<f64>> {
    let n = vts.n_nodes();
    let p = spec.p();
    if net.n_nodes() != n {
        return Err(Error::DimensionMismatch("series and network node counts differ".into()));
    }
    if sigma_tilde.rows() != n || sigma_tilde.cols() != n {
        return Err(Error::DimensionMismatch(format!("covariance must be {n}x{n}")));
    }
    let data = vts.to_matrix()?;
    let t_all = data.rows();
    if t_all <= p {
        return Err(Error::SeriesTooShort(format!("{t_all} time points for lag order {p}")));
    }
    let t_eff = t_all - p;
    let r = constraint_matrix(net, spec)?;

    let mut z = Matrix::zeros(n * p, t_eff);
    let mut x = Matrix::zeros(n, t_eff);
    for col in 0..t_eff {
        let t = col + p;
        for i in 0..n {
            x[(i, col)] = data[(t, i)];
            for k in 1..=p {
                z[((k - 1) * n + i, col)] = data[(t - k, i)];
            }
        }
    }
    let sigma_inv = inverse(sigma_tilde)?;
    let zzt = z.matmul(&z.transpose())?;
    let rt = r.transpose();
    let gram = rt.matmul(&zzt.kron(&sigma_inv))?.matmul(&r)?;
    let rhs = rt.matmul(&z.kron(&sigma_inv))?.mul_vec(&x.vec_cols())?;
    cholesky_solve(&gram, &rhs).map_err(|_| Error::Singular("restricted GLS Gram matrix"))
}

/// Zero-mean autoregression fitted to one node.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub order: usize,
    pub coef: Vec<f64>,
    /// `RSS / T_eff`.
    pub sigma2: f64,
    pub criterion: f64,
    /// Leading missing values removed before fitting.
    pub offset: usize,
}

impl ArFit {
    /// Iterated forecasts continuing `history`, which must hold at least
    /// `order` values.
    pub fn forecast(&self, history: &[f64], h: usize) -> Vec<f64> {
        let mut buf = history.to_vec();
        for _ in 0..h {
            let t = buf.len();
            let next = self.coef.iter().enumerate().map(|(k, a)| a * buf[t - 1 - k]).sum();
            buf.push(next);
        }
        buf.split_off(history.len())
    }
}

/// OLS fit of a zero-mean AR(`order`) to a complete series.
pub fn fit_ar(x: &[f64], order: usize, criterion: Criterion) -> Result<ArFit> {
    if x.len() <= order {
        return Err(Error::SeriesTooShort(format!("{} values for AR order {order}", x.len())));
    }
    let t_eff = x.len() - order;
    let mut a = Matrix::zeros(t_eff, order);
    for r in 0..t_eff {
        for k in 0..order {
            a[(r, k)] = x[order + r - 1 - k];
        }
    }
    let y = &x[order..];
    let ls = lstsq(&a, y)?;
    let fitted = a.mul_vec(&ls.coef)?;
    let rss: f64 = y.iter().zip(&fitted).map(|(y, f)| (y - f) * (y - f)).sum();
    let sigma2 = rss / t_eff as f64;
    Ok(ArFit {
        order,
        coef: ls.coef,
        sigma2,
        criterion: criterion.value(libm::log(sigma2), order, t_eff),
        offset: 0,
    })
}

/// Per-node AR baseline: for each node, strips leading missing values and
/// picks the order `0..=max_p` minimising the criterion.
pub fn ar_baseline(vts: &SeriesMatrix, max_p: usize, criterion: Criterion) -> Result<Vec<ArFit>> {
    (0..vts.n_nodes())
        .map(|i| {
            let col = vts.column(i);
            let offset = col.iter().take_while(|v| v.is_none()).count();
            let x = col[offset..]
                .iter()
                .map(|v| v.ok_or_else(|| Error::InvalidArgument(format!("node {} has interior missing values", i + 1))))
                .collect::<Result<Vec<f64>>>()?;
            if x.len() <= max_p {
                return Err(Error::SeriesTooShort(format!(
                    "node {} has {} values for maximum order {max_p}",
                    i + 1,
                    x.len()
                )));
            }
            let mut best: Option<ArFit> = None;
            for order in 0..=max_p {
                let f = fit_ar(&x, order, criterion)?;
                if best.as_ref().is_none_or(|b| f.criterion < b.criterion) {
                    best = Some(f);
                }
            }
            let mut best = best.expect("at least order zero is tried");
            best.offset = offset;
            Ok(best)
        })
        .collect()
}
