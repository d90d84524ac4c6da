//! Iterated h-step forecasts and the squared prediction error.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::FitResult;
use crate::linalg::Matrix;
use crate::model::{CoefficientSet, ModelSpec};
use crate::network::{Network, StageTable};
use crate::series::SeriesMatrix;

/// Forecasts `h` steps past the end of `history` with zero innovations,
/// feeding each step back as history. Returns an `h × N` matrix.
///
/// Only the last `p` rows of `history` are read. Every node is forecast,
/// so a missing cell there is a missing own lag and is an error.
pub fn predict(
    net: &Network,
    spec: &ModelSpec,
    coef: &CoefficientSet,
    history: &SeriesMatrix,
    h: usize,
) -> Result<Matrix> {
    let n = net.n_nodes();
    let p = spec.p();
    coef.validate(spec, n)?;
    if net.n_covariates() != spec.n_covariates() {
        return Err(Error::InvalidSpec("model and network covariate counts differ".into()));
    }
    if history.n_nodes() != n {
        return Err(Error::DimensionMismatch(format!(
            "history has {} nodes, network has {n}",
            history.n_nodes()
        )));
    }
    if h == 0 {
        return Err(Error::InvalidArgument("forecast horizon must be positive".into()));
    }
    let t_hist = history.n_times();
    if t_hist < p {
        return Err(Error::SeriesTooShort(format!("{t_hist} history rows for lag order {p}")));
    }
    let mut rows = Vec::with_capacity(p + h);
    for t in t_hist - p..t_hist {
        let row = (0..n)
            .map(|i| history.get(t, i).ok_or(Error::MissingOwnLag { node: i + 1, time: t + 1 }))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }

    let table = StageTable::build(net, spec.max_stage(), None)?;
    let weights: Vec<Vec<_>> =
        (0..n).map(|i| (1..=spec.max_stage()).map(|r| table.weights(i, r, None)).collect()).collect();
    let mut out = Matrix::zeros(h, n);
    for step in 0..h {
        let t = rows.len();
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 1..=p {
                let lag = &rows[t - j];
                acc += coef.alpha_for(spec, i, j) * lag[i];
                for r in 1..=spec.stage(j) {
                    for e in &weights[i][r - 1].entries {
                        acc += coef.beta_for(spec, i, j, r, e.cov) * e.weight * lag[e.node];
                    }
                }
            }
            out[(step, i)] = acc;
            next.push(acc);
        }
        rows.push(next);
    }
    Ok(out)
}

pub fn predict_from_fit(fit: &FitResult, net: &Network, history: &SeriesMatrix, h: usize) -> Result<Matrix> {
    predict(net, &fit.spec, &fit.coef, history, h)
}

/// `Σ_i (actual_i - pred_i)²` over the observed entries of `actual`.
pub fn prediction_error(pred: &[f64], actual: &[Option<f64>]) -> Result<f64> {
    if pred.len() != actual.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions for {} actual values",
            pred.len(),
            actual.len()
        )));
    }
    let mut seen = false;
    let mut total = 0.0;
    for (p, a) in pred.iter().zip(actual) {
        if let Some(a) = a {
            seen = true;
            total += (a - p) * (a - p);
        }
    }
    if seen {
        Ok(total)
    } else {
        Err(Error::AllMissing)
    }
}
