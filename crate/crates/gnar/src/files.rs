//! Text formats for networks, series, model orders, coefficients and fits.

use std::collections::BTreeMap;

use gnar_core::estimate::FitResult;
use gnar_core::model::{AlphaMode, CoefficientSet, Grouping, ModelSpec};
use gnar_core::network::{AdjacencyKind, Edge, Network};
use gnar_core::{Matrix, SeriesMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::numfmt::{cell, g17, parse_cell};

fn one_f64() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

/// Network JSON. Node ids are one-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub n_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub directed: bool,
    #[serde(rename = "C", default = "one_usize")]
    pub n_covariates: usize,
    pub edges: Vec<EdgeFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFile {
    pub from: usize,
    pub to: usize,
    #[serde(default = "one_f64")]
    pub dist: f64,
    #[serde(default = "one_usize")]
    pub cov: usize,
}

impl NetworkFile {
    pub fn from_network(net: &Network) -> Self {
        NetworkFile {
            n_nodes: net.n_nodes(),
            names: Some(net.names().to_vec()),
            directed: net.is_directed(),
            n_covariates: net.n_covariates(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeFile { from: e.from + 1, to: e.to + 1, dist: e.dist, cov: e.cov })
                .collect(),
        }
    }

    pub fn to_network(&self) -> Result<Network> {
        let names = match &self.names {
            Some(names) if names.len() != self.n_nodes => {
                return Err(CliError::format(format!(
                    "network lists {} names for {} nodes",
                    names.len(),
                    self.n_nodes
                )))
            }
            Some(names) => names.clone(),
            None => gnar_core::network::default_names(self.n_nodes),
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.from == 0 || e.to == 0 {
                return Err(CliError::format("network node ids are one-based"));
            }
            edges.push(Edge::new(e.from - 1, e.to - 1, e.dist, e.cov));
        }
        Ok(Network::new(names, self.directed, self.n_covariates, edges)?)
    }
}

pub fn parse_network(text: &str) -> Result<Network> {
    serde_json::from_str::<NetworkFile>(text)?.to_network()
}

pub fn network_to_json(net: &Network) -> String {
    pretty(&NetworkFile::from_network(net))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

/// Reads a square adjacency CSV whose header row holds the node names.
pub fn parse_adjacency(text: &str) -> Result<(Vec<String>, Matrix)> {
    let mut rdr = csv_reader(text);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let n = names.len();
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != n {
            return Err(CliError::format(format!("adjacency row {} has {} entries, expected {n}", rows + 1, rec.len())));
        }
        for s in rec.iter() {
            match parse_cell(s) {
                Some(Ok(v)) => data.push(v),
                _ => return Err(CliError::format(format!("adjacency row {}: bad entry {s:?}", rows + 1))),
            }
        }
        rows += 1;
    }
    if rows != n {
        return Err(CliError::format(format!("adjacency has {rows} rows for {n} named columns")));
    }
    Ok((names, Matrix::from_vec(n, n, data)))
}

pub fn network_from_adjacency(text: &str, kind: AdjacencyKind, symmetrize: bool) -> Result<Network> {
    let (names, a) = parse_adjacency(text)?;
    Ok(Network::from_adjacency(&a, kind, symmetrize)?.renamed(names)?)
}

/// Adjacency CSV. Edge covariates are not representable, so networks with
/// more than one covariate are rejected.
pub fn adjacency_to_csv(net: &Network, kind: AdjacencyKind) -> Result<String> {
    if net.n_covariates() > 1 {
        return Err(CliError::format("adjacency CSV cannot hold more than one edge covariate"));
    }
    let a = net.to_adjacency(kind);
    let mut w = csv_writer();
    w.write_record(net.names())?;
    for i in 0..a.rows() {
        w.write_record(a.row(i).iter().map(|&v| g17(v)))?;
    }
    Ok(finish_csv(w))
}

/// Series CSV: header of node names, one row per time point, `NA` missing.
pub fn parse_series(text: &str) -> Result<SeriesMatrix> {
    let mut rdr = csv_reader(text);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (t, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != names.len() {
            return Err(CliError::format(format!("series row {} has {} cells, expected {}", t + 1, rec.len(), names.len())));
        }
        let row = rec
            .iter()
            .map(|s| match parse_cell(s) {
                None => Ok(None),
                Some(Ok(v)) => Ok(Some(v)),
                Some(Err(_)) => Err(CliError::format(format!("series row {}: bad value {s:?}", t + 1))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(SeriesMatrix::new(names, rows)?)
}

pub fn series_to_csv(vts: &SeriesMatrix) -> String {
    let mut w = csv_writer();
    w.write_record(vts.names()).expect("in-memory write");
    for row in vts.rows() {
        w.write_record(row.iter().map(|&v| cell(v))).expect("in-memory write");
    }
    finish_csv(w)
}

pub fn matrix_to_csv(names: &[String], m: &Matrix) -> String {
    let mut w = csv_writer();
    w.write_record(names).expect("in-memory write");
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|&v| g17(v))).expect("in-memory write");
    }
    finish_csv(w)
}

/// Model order JSON. `C` defaults to the network's covariate count and
/// `groups` maps node names to group labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub p: usize,
    pub s: Vec<usize>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub n_covariates: Option<usize>,
    #[serde(default = "default_alpha_mode")]
    pub alpha_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<BTreeMap<String, String>>,
}

fn default_alpha_mode() -> String {
    "global".into()
}

impl SpecFile {
    pub fn from_spec(spec: &ModelSpec, names: &[String]) -> Self {
        let (alpha_mode, groups) = match spec.alpha_mode() {
            AlphaMode::Global => ("global", None),
            AlphaMode::PerNode => ("per_node", None),
            AlphaMode::PerGroup(g) => (
                "per_group",
                Some(names.iter().cloned().zip(g.node_labels().into_iter().map(str::to_string)).collect()),
            ),
        };
        SpecFile {
            p: spec.p(),
            s: spec.stages().to_vec(),
            n_covariates: Some(spec.n_covariates()),
            alpha_mode: alpha_mode.into(),
            groups,
        }
    }

    /// Resolves the order against the network's node names.
    pub fn to_spec(&self, names: &[String], default_covariates: usize) -> Result<ModelSpec> {
        let mode = alpha_mode_from(&self.alpha_mode, self.groups.as_ref(), names)?;
        Ok(ModelSpec::new(self.p, self.s.clone(), self.n_covariates.unwrap_or(default_covariates), mode)?)
    }
}

/// Builds an α mode from its name and, for `per_group`, a name-to-label map.
pub fn alpha_mode_from(name: &str, groups: Option<&BTreeMap<String, String>>, names: &[String]) -> Result<AlphaMode> {
    match name {
        "global" => Ok(AlphaMode::Global),
        "per_node" => Ok(AlphaMode::PerNode),
        "per_group" => {
            let groups = groups.ok_or_else(|| CliError::format("alpha_mode per_group needs a groups map"))?;
            if let Some(extra) = groups.keys().find(|k| !names.contains(k)) {
                return Err(CliError::format(format!("groups map names unknown node {extra:?}")));
            }
            let labels = names
                .iter()
                .map(|n| groups.get(n).cloned().ok_or_else(|| CliError::format(format!("node {n:?} has no group"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(AlphaMode::PerGroup(Grouping::from_node_labels(&labels)?))
        }
        other => Err(CliError::format(format!("unknown alpha_mode {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaValue {
    Common(f64),
    PerNode(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedEstimate {
    pub name: String,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefValues {
    ByName(BTreeMap<String, f64>),
    Listed(Vec<NamedEstimate>),
}

/// Coefficient JSON, keyed by display name. A fit JSON also parses as one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefFile {
    pub coefficients: CoefValues,
    pub sigma: SigmaValue,
}

impl CoefFile {
    pub fn to_coefficients(&self, spec: &ModelSpec, n_nodes: usize) -> Result<CoefficientSet> {
        let names = spec.param_names(n_nodes);
        let lookup: BTreeMap<&str, f64> = match &self.coefficients {
            CoefValues::ByName(m) => m.iter().map(|(k, v)| (k.as_str(), *v)).collect(),
            CoefValues::Listed(l) => l.iter().map(|e| (e.name.as_str(), e.estimate)).collect(),
        };
        if let Some(extra) = lookup.keys().find(|k| !names.iter().any(|n| n == *k)) {
            return Err(CliError::format(format!("coefficient {extra:?} is not a parameter of {}", spec.label())));
        }
        let gamma = names
            .iter()
            .map(|n| lookup.get(n.as_str()).copied().ok_or_else(|| CliError::format(format!("coefficient {n:?} missing"))))
            .collect::<Result<Vec<_>>>()?;
        let sigma = match &self.sigma {
            SigmaValue::Common(s) => vec![*s; n_nodes],
            SigmaValue::PerNode(v) => v.clone(),
        };
        Ok(CoefficientSet::from_gamma(spec, n_nodes, &gamma, sigma)?)
    }
}

pub fn parse_coefficients(text: &str, spec: &ModelSpec, n_nodes: usize) -> Result<CoefficientSet> {
    serde_json::from_str::<CoefFile>(text)?.to_coefficients(spec, n_nodes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefEntry {
    pub name: String,
    pub estimate: f64,
    /// `null` for aliased columns or when no residual degrees of freedom remain.
    pub se: Option<f64>,
}

/// Fit JSON: estimates, statistics, fitted values and the inputs needed to
/// forecast or simulate from the fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitFile {
    pub model: String,
    pub spec: SpecFile,
    pub network: NetworkFile,
    pub coefficients: Vec<CoefEntry>,
    /// Per-node residual root mean square.
    pub sigma: Vec<f64>,
    pub sigma_u_hat: Vec<Vec<f64>>,
    pub rss: f64,
    pub rank: usize,
    pub dof: usize,
    pub n_obs_used: usize,
    pub dropped_row_count: usize,
    pub t_eff: usize,
    pub t_eff_rule: String,
    pub effective_sample: BTreeMap<String, usize>,
    pub log_det: f64,
    pub bic: f64,
    pub aic: f64,
    pub loglik: f64,
    pub warnings: Vec<String>,
    pub fitted: Vec<Vec<Option<f64>>>,
    pub residuals: Vec<Vec<Option<f64>>>,
}

fn rows_of(m: &SeriesMatrix) -> Vec<Vec<Option<f64>>> {
    m.rows().map(<[Option<f64>]>::to_vec).collect()
}

impl FitFile {
    pub fn new(fit: &FitResult, net: &Network) -> Self {
        let names = net.names();
        FitFile {
            model: fit.spec.label(),
            spec: SpecFile::from_spec(&fit.spec, names),
            network: NetworkFile::from_network(net),
            coefficients: fit
                .names
                .iter()
                .zip(&fit.gamma)
                .zip(&fit.se)
                .map(|((name, &estimate), &se)| CoefEntry { name: name.clone(), estimate, se: Some(se).filter(|s| s.is_finite()) })
                .collect(),
            sigma: fit.coef.sigma.clone(),
            sigma_u_hat: fit.sigma_u_hat.to_rows(),
            rss: fit.rss,
            rank: fit.rank,
            dof: fit.dof,
            n_obs_used: fit.n_obs_used,
            dropped_row_count: fit.dropped_row_count,
            t_eff: fit.t_eff,
            t_eff_rule: "T - p".into(),
            effective_sample: names.iter().cloned().zip(fit.effective_sample.iter().copied()).collect(),
            log_det: fit.log_det,
            bic: fit.bic,
            aic: fit.aic,
            loglik: fit.loglik,
            warnings: fit.warnings.iter().map(|w| w.to_string()).collect(),
            fitted: rows_of(&fit.fitted),
            residuals: rows_of(&fit.residuals),
        }
    }

    /// Network, order and coefficients recovered from the file.
    pub fn model(&self) -> Result<(Network, ModelSpec, CoefficientSet)> {
        let net = self.network.to_network()?;
        let spec = self.spec.to_spec(net.names(), net.n_covariates())?;
        let names = spec.param_names(net.n_nodes());
        if names.len() != self.coefficients.len() || names.iter().zip(&self.coefficients).any(|(a, b)| *a != b.name) {
            return Err(CliError::format("fit coefficients do not match its model order"));
        }
        let gamma: Vec<f64> = self.coefficients.iter().map(|c| c.estimate).collect();
        let coef = CoefficientSet::from_gamma(&spec, net.n_nodes(), &gamma, self.sigma.clone())?;
        Ok((net, spec, coef))
    }
}

pub fn fit_to_json(fit: &FitResult, net: &Network) -> String {
    pretty(&FitFile::new(fit, net))
}

pub fn parse_fit(text: &str) -> Result<FitFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_pretty_json<T: Serialize>(v: &T) -> String {
    pretty(v)
}
