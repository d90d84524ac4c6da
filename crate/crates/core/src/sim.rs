//! Seeded simulation of GNAR processes.
//!
//! Both simulators start from `p` presample rows (zeros unless given),
//! run `burn_in + n` steps and keep the last `n`. Innovations are drawn
//! time-major, node-minor, one standard normal per node per step, even
//! when that node's σ is zero, so the node recursion and the VAR recursion
//! consume the stream identically.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result, Warning};
use crate::estimate::FitResult;
use crate::linalg::Matrix;
use crate::model::{stationarity_margin, CoefficientSet, ModelSpec};
use crate::network::{Network, StageTable};
use crate::rng::RngStream;
use crate::series::SeriesMatrix;

pub const DEFAULT_BURN_IN: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub burn_in: usize,
    /// Presample rows, oldest first. One row per lag.
    pub initial: Option<Vec<Vec<f64>>>,
}

impl SimConfig {
    pub fn new(n: usize) -> Self {
        SimConfig { n, burn_in: DEFAULT_BURN_IN, initial: None }
    }

    pub fn burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn initial(mut self, rows: Vec<Vec<f64>>) -> Self {
        self.initial = Some(rows);
        self
    }

    fn presample(&self, p: usize, n_nodes: usize) -> Result<Vec<Vec<f64>>> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("simulation length must be positive".into()));
        }
        match &self.initial {
            None => Ok(vec![vec![0.0; n_nodes]; p]),
            Some(rows) => {
                if rows.len() != p || rows.iter().any(|r| r.len() != n_nodes) {
                    return Err(Error::DimensionMismatch(format!(
                        "initial state needs {p} row(s) of {n_nodes} value(s)"
                    )));
                }
                if rows.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("initial state"));
                }
                Ok(rows.clone())
            }
        }
    }
}

/// Simulated panel plus any warnings raised on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub series: SeriesMatrix,
    pub warnings: Vec<Warning>,
}

fn finish(net: &Network, rows: Vec<Vec<f64>>, keep: usize) -> Result<SeriesMatrix> {
    let start = rows.len() - keep;
    let kept = rows.into_iter().skip(start).map(|r| r.into_iter().map(Some).collect()).collect();
    SeriesMatrix::new(net.names().to_vec(), kept)
}

/// Simulates by the node-level recursion
/// `X_{i,t} = Σ_j (α_{i,j} X_{i,t-j} + Σ_c Σ_r β_{j,r,c} Σ_q ω_{i,q,c} X_{q,t-j}) + σ_i z`.
pub fn gnar_simulate(
    net: &Network,
    spec: &ModelSpec,
    coef: &CoefficientSet,
    cfg: &SimConfig,
    rng: &mut RngStream,
) -> Result<Simulated> {
    let n = net.n_nodes();
    if net.n_covariates() != spec.n_covariates() {
        return Err(Error::InvalidSpec("model and network covariate counts differ".into()));
    }
    let report = stationarity_margin(spec, coef, n)?;
    let mut warnings = Vec::new();
    if !report.sufficient_condition_holds {
        warnings.push(Warning::NonStationary { max_margin: report.max_margin() });
    }
    let p = spec.p();
    let table = StageTable::build(net, spec.max_stage(), None)?;
    let weights: Vec<Vec<_>> =
        (0..n).map(|i| (1..=spec.max_stage()).map(|r| table.weights(i, r, None)).collect()).collect();

    let mut rows = cfg.presample(p, n)?;
    for _ in 0..cfg.burn_in + cfg.n {
        let t = rows.len();
        let mut next = vec![0.0; n];
        for (i, x) in next.iter_mut().enumerate() {
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
            *x = acc + coef.sigma[i] * rng.next_normal();
        }
        rows.push(next);
    }
    Ok(Simulated { series: finish(net, rows, cfg.n)?, warnings })
}

/// Simulates `X_t = φ_1 X_{t-1} + … + φ_p X_{t-p} + σ∘z_t`. Output columns
/// take the names of `net`, which only supplies labels here.
pub fn var_simulate(
    net: &Network,
    phis: &[Matrix],
    sigma: &[f64],
    cfg: &SimConfig,
    rng: &mut RngStream,
) -> Result<SeriesMatrix> {
    let n = net.n_nodes();
    if phis.is_empty() {
        return Err(Error::InvalidArgument("no coefficient matrices".into()));
    }
    if phis.iter().any(|m| m.rows() != n || m.cols() != n) || sigma.len() != n {
        return Err(Error::DimensionMismatch(format!("coefficients must be {n}x{n} with {n} sigma values")));
    }
    let mut rows = cfg.presample(phis.len(), n)?;
    for _ in 0..cfg.burn_in + cfg.n {
        let t = rows.len();
        let mut next = vec![0.0; n];
        for (k, phi) in phis.iter().enumerate() {
            let lagged = phi.mul_vec(&rows[t - 1 - k])?;
            for (x, v) in next.iter_mut().zip(lagged) {
                *x += v;
            }
        }
        for (x, s) in next.iter_mut().zip(sigma) {
            *x += s * rng.next_normal();
        }
        rows.push(next);
    }
    finish(net, rows, cfg.n)
}

/// Simulates from fitted coefficients; each node's σ is its residual RMS.
pub fn simulate_from_fit(fit: &FitResult, net: &Network, cfg: &SimConfig, rng: &mut RngStream) -> Result<Simulated> {
    gnar_simulate(net, &fit.spec, &fit.coef, cfg, rng)
}
