//! GNAR fitting as a stacked linear regression `y = Xγ + u`.
//!
//! Rows run over response times `t = p+1..T` (outer) and nodes (inner).
//! A row is dropped when its response or any of its own lags is missing.
//! Neighbour regressors at lag `j` use weights masked by the nodes
//! observed at `t-j`, renormalised over the rest, and are zero when the
//! whole neighbour set is unobserved.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{ModelSpec, Param};
use crate::network::{neighbour_regressor, MaskMode, Network, WeightCache};
use crate::series::SeriesMatrix;

/// The network in force at each time point.
#[derive(Debug, Clone, Copy)]
pub enum NetworkSchedule<'a> {
    Static(&'a Network),
    /// One network per row of the series.
    Varying(&'a [Network]),
}

impl<'a> NetworkSchedule<'a> {
    pub fn as_static(&self) -> Result<&'a Network> {
        match self {
            NetworkSchedule::Static(net) => Ok(net),
            NetworkSchedule::Varying(_) => Err(Error::TimeVaryingNetwork),
        }
    }

    fn networks(&self) -> &'a [Network] {
        match self {
            NetworkSchedule::Static(net) => core::slice::from_ref(*net),
            NetworkSchedule::Varying(nets) => nets,
        }
    }

    fn index_at(&self, t: usize) -> usize {
        match self {
            NetworkSchedule::Static(_) => 0,
            NetworkSchedule::Varying(_) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    pub y: Vec<f64>,
    pub x: Matrix,
    /// Zero-based `(t, node)` of each retained row.
    pub row_index: Vec<(usize, usize)>,
    /// One flag per candidate row `(t, node)`, `t = p..T`, t-major.
    pub kept_mask: Vec<bool>,
}

impl DesignProblem {
    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn dropped_rows(&self) -> usize {
        self.kept_mask.iter().filter(|k| !**k).count()
    }
}

pub fn build_design(vts: &SeriesMatrix, net: &Network, spec: &ModelSpec) -> Result<DesignProblem> {
    build_design_with(vts, NetworkSchedule::Static(net), spec, MaskMode::default())
}

pub fn build_design_with(
    vts: &SeriesMatrix,
    schedule: NetworkSchedule<'_>,
    spec: &ModelSpec,
    mode: MaskMode,
) -> Result<DesignProblem> {
    let n = vts.n_nodes();
    let p = spec.p();
    let t_all = vts.n_times();
    spec.validate_for(n)?;
    let nets = schedule.networks();
    if let NetworkSchedule::Varying(v) = schedule {
        if v.len() != t_all {
            return Err(Error::DimensionMismatch(format!("{} networks for {t_all} time points", v.len())));
        }
    }
    for net in nets {
        if net.n_nodes() != n {
            return Err(Error::DimensionMismatch(format!(
                "series has {n} nodes, network has {}",
                net.n_nodes()
            )));
        }
        if net.n_covariates() != spec.n_covariates() {
            return Err(Error::InvalidSpec("model and network covariate counts differ".into()));
        }
    }
    if t_all <= p {
        return Err(Error::SeriesTooShort(format!("{t_all} time points for lag order {p}")));
    }

    let params = spec.params(n);
    let m = params.len();
    let mut caches: Vec<Option<WeightCache<'_>>> = (0..nets.len()).map(|_| None).collect();
    let mut y = Vec::new();
    let mut data = Vec::new();
    let mut row_index = Vec::new();
    let mut kept_mask = Vec::with_capacity((t_all - p) * n);
    let masks: Vec<Vec<bool>> = (0..t_all).map(|t| vts.observed(t)).collect();

    for t in p..t_all {
        let k = schedule.index_at(t);
        if caches[k].is_none() {
            caches[k] = Some(WeightCache::new(&nets[k], spec.max_stage(), mode)?);
        }
        let cache = caches[k].as_mut().expect("cache initialised above");
        // Neighbour regressors indexed [lag][node][stage][cov].
        let mut beta_vals: Vec<Vec<Vec<Vec<f64>>>> = Vec::with_capacity(p);
        for j in 1..=p {
            let lag_row = vts.row(t - j);
            let maps = cache.get(&masks[t - j])?;
            beta_vals.push(
                (0..n)
                    .map(|i| {
                        (1..=spec.stage(j))
                            .map(|r| {
                                (1..=spec.n_covariates())
                                    .map(|c| neighbour_regressor(lag_row, &maps[i][r - 1], c))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
        for i in 0..n {
            let keep = vts.get(t, i).is_some() && (1..=p).all(|j| vts.get(t - j, i).is_some());
            kept_mask.push(keep);
            if !keep {
                continue;
            }
            y.push(vts.get(t, i).unwrap_or(0.0));
            row_index.push((t, i));
            let au = spec.alpha_unit(i);
            let bu = spec.beta_unit(i);
            data.extend(params.iter().map(|param| match *param {
                Param::Alpha { unit, lag } if unit == au => vts.get(t - lag, i).unwrap_or(0.0),
                Param::Beta { unit, lag, stage, cov } if unit == bu => beta_vals[lag - 1][i][stage - 1][cov - 1],
                _ => 0.0,
            }));
        }
    }
    if y.is_empty() {
        return Err(Error::InsufficientData { rows: 0, params: m });
    }
    let rows = y.len();
    Ok(DesignProblem { y, x: Matrix::from_vec(rows, m, data), row_index, kept_mask })
}
