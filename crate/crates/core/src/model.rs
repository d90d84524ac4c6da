//! Model orders, coefficient containers and the VAR representation.
//!
//! Free parameters are laid out lag-major: for each lag the α terms come
//! first (one per α unit), then the β terms ordered by stage and, within a
//! stage, by covariate. Group models repeat that whole block once per
//! group, groups in ascending label order. This matches the display order
//! `alpha1, beta1.1, alpha2, beta2.1, ...`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::{Network, StageTable};

/// Assignment of nodes to labelled groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    labels: Vec<String>,
    of_node: Vec<usize>,
}

impl Grouping {
    /// Groups from one label per node. Group indices follow sorted labels.
    pub fn from_node_labels<S: AsRef<str>>(node_labels: &[S]) -> Result<Self> {
        if node_labels.is_empty() {
            return Err(Error::InvalidSpec("grouping needs at least one node".into()));
        }
        let labels: Vec<String> = node_labels
            .iter()
            .map(|s| String::from(s.as_ref()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let of_node = node_labels
            .iter()
            .map(|s| labels.iter().position(|l| l == s.as_ref()).expect("label present"))
            .collect();
        Ok(Grouping { labels, of_node })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_groups(&self) -> usize {
        self.labels.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.of_node.len()
    }

    pub fn group_of(&self, node: usize) -> usize {
        self.of_node[node]
    }

    pub fn node_labels(&self) -> Vec<&str> {
        self.of_node.iter().map(|&g| self.labels[g].as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaMode {
    Global,
    PerNode,
    PerGroup(Grouping),
}

/// A GNAR(p, [s]) order with its covariate count and α structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    p: usize,
    s: Vec<usize>,
    n_covariates: usize,
    alpha_mode: AlphaMode,
}

/// One free parameter. Lags, stages and covariates are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Alpha { unit: usize, lag: usize },
    Beta { unit: usize, lag: usize, stage: usize, cov: usize },
}

impl ModelSpec {
    pub fn new(p: usize, s: Vec<usize>, n_covariates: usize, alpha_mode: AlphaMode) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidSpec("lag order p must be at least 1".into()));
        }
        if s.len() != p {
            return Err(Error::InvalidSpec(format!("stage vector has {} entries for p = {}", s.len(), p)));
        }
        if n_covariates == 0 {
            return Err(Error::InvalidSpec("covariate count must be at least 1".into()));
        }
        Ok(ModelSpec { p, s, n_covariates, alpha_mode })
    }

    pub fn global(p: usize, s: Vec<usize>) -> Result<Self> {
        Self::new(p, s, 1, AlphaMode::Global)
    }

    pub fn per_node(p: usize, s: Vec<usize>) -> Result<Self> {
        Self::new(p, s, 1, AlphaMode::PerNode)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn stages(&self) -> &[usize] {
        &self.s
    }

    /// Maximum stage at lag `j` (one-based).
    pub fn stage(&self, lag: usize) -> usize {
        self.s[lag - 1]
    }

    pub fn max_stage(&self) -> usize {
        self.s.iter().copied().max().unwrap_or(0)
    }

    pub fn n_covariates(&self) -> usize {
        self.n_covariates
    }

    pub fn alpha_mode(&self) -> &AlphaMode {
        &self.alpha_mode
    }

    pub fn is_global(&self) -> bool {
        self.alpha_mode == AlphaMode::Global
    }

    /// Short label like `GNAR(2,[2,0])`, with a suffix for non-global α.
    pub fn label(&self) -> String {
        let s: Vec<String> = self.s.iter().map(|x| format!("{x}")).collect();
        let suffix = match self.alpha_mode {
            AlphaMode::Global => "",
            AlphaMode::PerNode => " individual-alpha",
            AlphaMode::PerGroup(_) => " group-alpha",
        };
        format!("GNAR({},[{}]){}", self.p, s.join(","), suffix)
    }

    pub fn validate_for(&self, n_nodes: usize) -> Result<()> {
        if let AlphaMode::PerGroup(g) = &self.alpha_mode {
            if g.n_nodes() != n_nodes {
                return Err(Error::InvalidSpec(format!(
                    "grouping covers {} nodes, network has {}",
                    g.n_nodes(),
                    n_nodes
                )));
            }
        }
        Ok(())
    }

    pub fn alpha_units(&self, n_nodes: usize) -> usize {
        match &self.alpha_mode {
            AlphaMode::Global => 1,
            AlphaMode::PerNode => n_nodes,
            AlphaMode::PerGroup(g) => g.n_groups(),
        }
    }

    pub fn beta_units(&self) -> usize {
        match &self.alpha_mode {
            AlphaMode::PerGroup(g) => g.n_groups(),
            _ => 1,
        }
    }

    pub fn alpha_unit(&self, node: usize) -> usize {
        match &self.alpha_mode {
            AlphaMode::Global => 0,
            AlphaMode::PerNode => node,
            AlphaMode::PerGroup(g) => g.group_of(node),
        }
    }

    pub fn beta_unit(&self, node: usize) -> usize {
        match &self.alpha_mode {
            AlphaMode::PerGroup(g) => g.group_of(node),
            _ => 0,
        }
    }

    /// Number of free parameters M.
    pub fn n_params(&self, n_nodes: usize) -> usize {
        let per_lag_beta: usize = self.n_covariates * self.s.iter().sum::<usize>();
        match &self.alpha_mode {
            AlphaMode::Global => self.p + per_lag_beta,
            AlphaMode::PerNode => n_nodes * self.p + per_lag_beta,
            AlphaMode::PerGroup(g) => g.n_groups() * (self.p + per_lag_beta),
        }
    }

    /// Free parameters in canonical order.
    pub fn params(&self, n_nodes: usize) -> Vec<Param> {
        let block = |unit_alpha: &mut dyn Iterator<Item = usize>, bunit: usize, out: &mut Vec<Param>, lag: usize| {
            for unit in unit_alpha {
                out.push(Param::Alpha { unit, lag });
            }
            for stage in 1..=self.s[lag - 1] {
                for cov in 1..=self.n_covariates {
                    out.push(Param::Beta { unit: bunit, lag, stage, cov });
                }
            }
        };
        let mut out = Vec::with_capacity(self.n_params(n_nodes));
        match &self.alpha_mode {
            AlphaMode::PerGroup(g) => {
                for grp in 0..g.n_groups() {
                    for lag in 1..=self.p {
                        block(&mut core::iter::once(grp), grp, &mut out, lag);
                    }
                }
            }
            _ => {
                let units = self.alpha_units(n_nodes);
                for lag in 1..=self.p {
                    block(&mut (0..units), 0, &mut out, lag);
                }
            }
        }
        out
    }

    /// Display names: `alpha1`, `beta1.1`, `alpha1node3`, `alpha1 'AB'`, ...
    /// The covariate index is appended only when there is more than one.
    pub fn param_names(&self, n_nodes: usize) -> Vec<String> {
        self.params(n_nodes)
            .into_iter()
            .map(|p| {
                let base = match p {
                    Param::Alpha { unit, lag } => match self.alpha_mode {
                        AlphaMode::PerNode => format!("alpha{lag}node{}", unit + 1),
                        _ => format!("alpha{lag}"),
                    },
                    Param::Beta { lag, stage, cov, .. } => {
                        if self.n_covariates > 1 {
                            format!("beta{lag}.{stage}.{cov}")
                        } else {
                            format!("beta{lag}.{stage}")
                        }
                    }
                };
                match (&self.alpha_mode, p) {
                    (AlphaMode::PerGroup(g), Param::Alpha { unit, .. } | Param::Beta { unit, .. }) => {
                        format!("{base} '{}'", g.labels()[unit])
                    }
                    _ => base,
                }
            })
            .collect()
    }
}

/// α and β values plus per-node innovation standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    /// `alpha[unit][lag - 1]`
    pub alpha: Vec<Vec<f64>>,
    /// `beta[unit][lag - 1][stage - 1][cov - 1]`
    pub beta: Vec<Vec<Vec<Vec<f64>>>>,
    pub sigma: Vec<f64>,
}

impl CoefficientSet {
    /// All-zero coefficients shaped for `spec`, with unit noise.
    pub fn zeros(spec: &ModelSpec, n_nodes: usize) -> Self {
        let beta_unit = (1..=spec.p())
            .map(|lag| vec![vec![0.0; spec.n_covariates()]; spec.stage(lag)])
            .collect::<Vec<_>>();
        CoefficientSet {
            alpha: vec![vec![0.0; spec.p()]; spec.alpha_units(n_nodes)],
            beta: vec![beta_unit; spec.beta_units()],
            sigma: vec![1.0; n_nodes],
        }
    }

    /// Global-α coefficients with one covariate: `alpha[lag-1]`,
    /// `beta[lag-1][stage-1]`.
    pub fn global(alpha: Vec<f64>, beta: Vec<Vec<f64>>, sigma: Vec<f64>) -> Self {
        CoefficientSet {
            alpha: vec![alpha],
            beta: vec![beta.into_iter().map(|l| l.into_iter().map(|b| vec![b]).collect()).collect()],
            sigma,
        }
    }

    /// Per-node α with one covariate: `alpha[node][lag-1]`.
    pub fn per_node(alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>>, sigma: Vec<f64>) -> Self {
        CoefficientSet {
            alpha,
            beta: vec![beta.into_iter().map(|l| l.into_iter().map(|b| vec![b]).collect()).collect()],
            sigma,
        }
    }

    /// Unpacks a parameter vector in canonical order.
    pub fn from_gamma(spec: &ModelSpec, n_nodes: usize, gamma: &[f64], sigma: Vec<f64>) -> Result<Self> {
        let params = spec.params(n_nodes);
        if gamma.len() != params.len() {
            return Err(Error::MissingCoefficients(format!(
                "{} values for {} parameters",
                gamma.len(),
                params.len()
            )));
        }
        let mut c = Self::zeros(spec, n_nodes);
        c.sigma = sigma;
        for (p, &g) in params.iter().zip(gamma) {
            *c.slot_mut(*p) = g;
        }
        c.validate(spec, n_nodes)?;
        Ok(c)
    }

    pub fn to_gamma(&self, spec: &ModelSpec, n_nodes: usize) -> Result<Vec<f64>> {
        self.validate(spec, n_nodes)?;
        Ok(spec.params(n_nodes).into_iter().map(|p| self.slot(p)).collect())
    }

    fn slot(&self, p: Param) -> f64 {
        match p {
            Param::Alpha { unit, lag } => self.alpha[unit][lag - 1],
            Param::Beta { unit, lag, stage, cov } => self.beta[unit][lag - 1][stage - 1][cov - 1],
        }
    }

    fn slot_mut(&mut self, p: Param) -> &mut f64 {
        match p {
            Param::Alpha { unit, lag } => &mut self.alpha[unit][lag - 1],
            Param::Beta { unit, lag, stage, cov } => &mut self.beta[unit][lag - 1][stage - 1][cov - 1],
        }
    }

    /// Checks every array has the shape `spec` requires.
    pub fn validate(&self, spec: &ModelSpec, n_nodes: usize) -> Result<()> {
        spec.validate_for(n_nodes)?;
        let units = spec.alpha_units(n_nodes);
        if self.alpha.len() != units || self.alpha.iter().any(|a| a.len() != spec.p()) {
            return Err(Error::MissingCoefficients(format!(
                "expected {units} alpha unit(s) with {} lag(s) each",
                spec.p()
            )));
        }
        if self.beta.len() != spec.beta_units() {
            return Err(Error::MissingCoefficients(format!("expected {} beta unit(s)", spec.beta_units())));
        }
        for unit in &self.beta {
            if unit.len() != spec.p() {
                return Err(Error::MissingCoefficients("beta needs one entry per lag".into()));
            }
            for (j, lag) in unit.iter().enumerate() {
                if lag.len() != spec.stage(j + 1) || lag.iter().any(|st| st.len() != spec.n_covariates()) {
                    return Err(Error::MissingCoefficients(format!(
                        "beta at lag {} needs {} stage(s) x {} covariate(s)",
                        j + 1,
                        spec.stage(j + 1),
                        spec.n_covariates()
                    )));
                }
            }
        }
        if self.sigma.len() != n_nodes {
            return Err(Error::MissingCoefficients(format!(
                "{} sigma values for {n_nodes} nodes",
                self.sigma.len()
            )));
        }
        if self.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::MissingCoefficients("sigma must be finite and non-negative".into()));
        }
        let all = self.alpha.iter().flatten().chain(self.beta.iter().flatten().flatten().flatten());
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("coefficient"));
        }
        Ok(())
    }

    pub fn alpha_for(&self, spec: &ModelSpec, node: usize, lag: usize) -> f64 {
        self.alpha[spec.alpha_unit(node)][lag - 1]
    }

    pub fn beta_for(&self, spec: &ModelSpec, node: usize, lag: usize, stage: usize, cov: usize) -> f64 {
        self.beta[spec.beta_unit(node)][lag - 1][stage - 1][cov - 1]
    }
}

/// Per-node sums of absolute coefficients. All margins below one is a
/// sufficient (not necessary) condition for stationarity on a fixed network.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub margins: Vec<f64>,
    pub sufficient_condition_holds: bool,
}

impl StationarityReport {
    pub fn max_margin(&self) -> f64 {
        self.margins.iter().copied().fold(0.0, f64::max)
    }
}

pub fn stationarity_margin(spec: &ModelSpec, coef: &CoefficientSet, n_nodes: usize) -> Result<StationarityReport> {
    coef.validate(spec, n_nodes)?;
    let margins: Vec<f64> = (0..n_nodes)
        .map(|i| {
            (1..=spec.p())
                .map(|j| {
                    let beta: f64 = coef.beta[spec.beta_unit(i)][j - 1].iter().flatten().map(|b| b.abs()).sum();
                    coef.alpha_for(spec, i, j).abs() + beta
                })
                .sum()
        })
        .collect();
    let holds = margins.iter().all(|&m| m < 1.0);
    Ok(StationarityReport { margins, sufficient_condition_holds: holds })
}

fn check_network(net: &Network, spec: &ModelSpec) -> Result<()> {
    spec.validate_for(net.n_nodes())?;
    if net.n_covariates() != spec.n_covariates() {
        return Err(Error::InvalidSpec(format!(
            "model has {} covariate(s), network has {}",
            spec.n_covariates(),
            net.n_covariates()
        )));
    }
    Ok(())
}

/// Weight matrices `W^(r,c)` indexed `[stage-1][cov-1]`.
fn weight_matrices(net: &Network, spec: &ModelSpec) -> Result<Vec<Vec<Matrix>>> {
    let max_stage = spec.max_stage();
    let n = net.n_nodes();
    let table = StageTable::build(net, max_stage, None)?;
    let mut out = vec![vec![Matrix::zeros(n, n); spec.n_covariates()]; max_stage];
    for (r, per_cov) in out.iter_mut().enumerate() {
        for l in 0..n {
            for e in table.weights(l, r + 1, None).entries {
                per_cov[e.cov - 1][(l, e.node)] = e.weight;
            }
        }
    }
    Ok(out)
}

/// VAR coefficient matrices `φ_k = diag(α_{·,k}) + Σ_c Σ_{r ≤ s_k} β_{k,r,c} W^(r,c)`.
pub fn to_var_matrices(net: &Network, spec: &ModelSpec, coef: &CoefficientSet) -> Result<Vec<Matrix>> {
    check_network(net, spec)?;
    let n = net.n_nodes();
    coef.validate(spec, n)?;
    let w = weight_matrices(net, spec)?;
    let mut phis = Vec::with_capacity(spec.p());
    for k in 1..=spec.p() {
        let mut phi = Matrix::zeros(n, n);
        for l in 0..n {
            phi[(l, l)] = coef.alpha_for(spec, l, k);
            for r in 1..=spec.stage(k) {
                for c in 1..=spec.n_covariates() {
                    let b = coef.beta_for(spec, l, k, r, c);
                    let wrow = w[r - 1][c - 1].row(l);
                    for (m, &wv) in wrow.iter().enumerate() {
                        if wv != 0.0 {
                            phi[(l, m)] += b * wv;
                        }
                    }
                }
            }
        }
        phis.push(phi);
    }
    Ok(phis)
}

/// Companion matrix with `[φ_1 … φ_p]` on top and identity blocks on the
/// first block subdiagonal.
pub fn companion_matrix(phis: &[Matrix]) -> Result<Matrix> {
    let first = phis.first().ok_or_else(|| Error::InvalidArgument("no coefficient matrices".into()))?;
    let n = first.rows();
    if phis.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::DimensionMismatch("coefficient matrices differ in size".into()));
    }
    let p = phis.len();
    let mut c = Matrix::zeros(n * p, n * p);
    for (k, phi) in phis.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                c[(i, k * n + j)] = phi[(i, j)];
            }
        }
    }
    for k in 1..p {
        for i in 0..n {
            c[(k * n + i, (k - 1) * n + i)] = 1.0;
        }
    }
    Ok(c)
}

/// Constraint matrix R (pN² × M) with `vec([φ_1 … φ_p]) = R γ`, where vec
/// stacks columns and γ follows [`ModelSpec::params`].
pub fn constraint_matrix(net: &Network, spec: &ModelSpec) -> Result<Matrix> {
    check_network(net, spec)?;
    let n = net.n_nodes();
    let params = spec.params(n);
    let w = weight_matrices(net, spec)?;
    let mut r = Matrix::zeros(spec.p() * n * n, params.len());
    let idx = |lag: usize, row: usize, col: usize| ((lag - 1) * n + col) * n + row;
    for (m, param) in params.iter().enumerate() {
        match *param {
            Param::Alpha { unit, lag } => {
                for a in (0..n).filter(|&a| spec.alpha_unit(a) == unit) {
                    r[(idx(lag, a, a), m)] = 1.0;
                }
            }
            Param::Beta { unit, lag, stage, cov } => {
                let wm = &w[stage - 1][cov - 1];
                for a in (0..n).filter(|&a| spec.beta_unit(a) == unit) {
                    for b in 0..n {
                        if wm[(a, b)] != 0.0 {
                            r[(idx(lag, a, b), m)] = wm[(a, b)];
                        }
                    }
                }
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Edge;
    use alloc::string::ToString;

    fn five_net() -> Network {
        let names = ["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()).collect();
        let edges = vec![Edge::unit(0, 3), Edge::unit(0, 4), Edge::unit(1, 2), Edge::unit(1, 3), Edge::unit(2, 3)];
        Network::new(names, false, 1, edges).unwrap()
    }

    #[test]
    fn parameter_counts() {
        let s = vec![2, 1];
        assert_eq!(ModelSpec::global(2, s.clone()).unwrap().n_params(5), 2 + 3);
        assert_eq!(ModelSpec::per_node(2, s.clone()).unwrap().n_params(5), 10 + 3);
        let g = Grouping::from_node_labels(&["AB", "AB", "CDE", "CDE", "CDE"]).unwrap();
        let spec = ModelSpec::new(2, s, 2, AlphaMode::PerGroup(g)).unwrap();
        assert_eq!(spec.n_params(5), 2 * (2 + 2 * 3));
        assert_eq!(spec.params(5).len(), spec.n_params(5));
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::global(0, vec![]).is_err());
        assert!(ModelSpec::global(1, vec![1, 1]).is_err());
        assert!(ModelSpec::new(1, vec![1], 0, AlphaMode::Global).is_err());
    }

    #[test]
    fn display_names() {
        let spec = ModelSpec::global(2, vec![1, 1]).unwrap();
        assert_eq!(spec.param_names(5), ["alpha1", "beta1.1", "alpha2", "beta2.1"]);
        let spec = ModelSpec::per_node(1, vec![1]).unwrap();
        assert_eq!(
            spec.param_names(3),
            ["alpha1node1", "alpha1node2", "alpha1node3", "beta1.1"]
        );
        let g = Grouping::from_node_labels(&["CDE", "AB", "AB"]).unwrap();
        let spec = ModelSpec::new(1, vec![1], 1, AlphaMode::PerGroup(g)).unwrap();
        assert_eq!(spec.param_names(3), ["alpha1 'AB'", "beta1.1 'AB'", "alpha1 'CDE'", "beta1.1 'CDE'"]);
        let spec = ModelSpec::new(1, vec![1], 2, AlphaMode::Global).unwrap();
        assert_eq!(spec.param_names(3), ["alpha1", "beta1.1.1", "beta1.1.2"]);
    }

    #[test]
    fn gamma_round_trip() {
        let spec = ModelSpec::global(2, vec![2, 0]).unwrap();
        let c = CoefficientSet::from_gamma(&spec, 5, &[0.2, 0.2, 0.3, 0.3], vec![1.0; 5]).unwrap();
        assert_eq!(c.alpha, vec![vec![0.2, 0.3]]);
        assert_eq!(c.beta[0][0], vec![vec![0.2], vec![0.3]]);
        assert_eq!(c.to_gamma(&spec, 5).unwrap(), vec![0.2, 0.2, 0.3, 0.3]);
        assert!(CoefficientSet::from_gamma(&spec, 5, &[0.1], vec![1.0; 5]).is_err());
    }

    #[test]
    fn margins_model_a() {
        let spec = ModelSpec::per_node(1, vec![1]).unwrap();
        let coef = CoefficientSet::per_node(
            vec![vec![0.4], vec![0.0], vec![-0.6], vec![0.0], vec![0.0]],
            vec![vec![0.3]],
            vec![1.0; 5],
        );
        let rep = stationarity_margin(&spec, &coef, 5).unwrap();
        let want = [0.7, 0.3, 0.9, 0.3, 0.3];
        for (m, w) in rep.margins.iter().zip(want) {
            assert!((m - w).abs() < 1e-15);
        }
        assert!(rep.sufficient_condition_holds);
    }

    #[test]
    fn margins_nonstationary_and_zero() {
        let spec = ModelSpec::global(1, vec![1]).unwrap();
        let coef = CoefficientSet::global(vec![0.2], vec![vec![0.85]], vec![1.0; 5]);
        let rep = stationarity_margin(&spec, &coef, 5).unwrap();
        assert!((rep.max_margin() - 1.05).abs() < 1e-15);
        assert!(!rep.sufficient_condition_holds);
        let zero = CoefficientSet::zeros(&spec, 5);
        let rep = stationarity_margin(&spec, &zero, 5).unwrap();
        assert_eq!(rep.max_margin(), 0.0);
        assert!(rep.sufficient_condition_holds);
    }

    #[test]
    fn missing_coefficients_rejected() {
        let spec = ModelSpec::global(2, vec![1, 0]).unwrap();
        let coef = CoefficientSet::global(vec![0.2], vec![vec![0.1]], vec![1.0; 5]);
        assert!(matches!(stationarity_margin(&spec, &coef, 5), Err(Error::MissingCoefficients(_))));
    }

    #[test]
    fn var_matrix_row_e() {
        let net = five_net();
        let spec = ModelSpec::global(1, vec![1]).unwrap();
        let coef = CoefficientSet::global(vec![0.2], vec![vec![0.3]], vec![1.0; 5]);
        let phi = to_var_matrices(&net, &spec, &coef).unwrap();
        assert_eq!(phi[0].row(4), &[0.3, 0.0, 0.0, 0.0, 0.2]);
        assert_eq!(phi[0].row(0), &[0.2, 0.0, 0.0, 0.15, 0.15]);
    }

    #[test]
    fn var_matrices_diagonal_without_beta() {
        let net = five_net();
        let spec = ModelSpec::per_node(2, vec![0, 0]).unwrap();
        let mut coef = CoefficientSet::zeros(&spec, 5);
        for (i, a) in coef.alpha.iter_mut().enumerate() {
            a[0] = 0.1 * i as f64;
            a[1] = -0.05;
        }
        let phi = to_var_matrices(&net, &spec, &coef).unwrap();
        for k in 0..2 {
            for i in 0..5 {
                for j in 0..5 {
                    if i != j {
                        assert_eq!(phi[k][(i, j)], 0.0);
                    }
                }
            }
        }
        assert_eq!(phi[0][(3, 3)], coef.alpha[3][0]);
    }

    #[test]
    fn companion_structure() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(companion_matrix(std::slice::from_ref(&a)).unwrap(), a);
        let b = Matrix::from_rows(&[vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap();
        let c = companion_matrix(&[a, b]).unwrap();
        assert_eq!(c.row(0), &[1.0, 2.0, 5.0, 6.0]);
        assert_eq!(c.row(2), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.row(3), &[0.0, 1.0, 0.0, 0.0]);
        assert!(companion_matrix(&[Matrix::zeros(2, 2), Matrix::zeros(3, 3)]).is_err());
    }

    #[test]
    fn constraint_matrix_small_cases() {
        let net = Network::empty(2);
        let spec = ModelSpec::global(1, vec![0]).unwrap();
        let r = constraint_matrix(&net, &spec).unwrap();
        assert_eq!((r.rows(), r.cols()), (4, 1));
        assert_eq!(r.as_slice(), Matrix::identity(2).vec_cols().as_slice());

        let net = Network::empty(3);
        let spec = ModelSpec::per_node(1, vec![0]).unwrap();
        let r = constraint_matrix(&net, &spec).unwrap();
        assert_eq!((r.rows(), r.cols()), (9, 3));
        for k in 0..3 {
            assert_eq!(r[(k * 3 + k, k)], 1.0);
            assert_eq!(r.transpose().row(k).iter().sum::<f64>(), 1.0);
        }
    }
}
