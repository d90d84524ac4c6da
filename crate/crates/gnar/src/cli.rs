//! Command-line surface.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gnar_core::estimate::{fit_with, Criterion, FitOptions};
use gnar_core::forecast::{predict, prediction_error};
use gnar_core::linalg::spectral_radius;
use gnar_core::model::{companion_matrix, stationarity_margin, to_var_matrices};
use gnar_core::netsearch::{normalize_by_node_sd, stage_grid, SearchConfig};
use gnar_core::network::{AdjacencyKind, MaskMode};
use gnar_core::sim::{gnar_simulate, SimConfig};
use gnar_core::{AlphaMode, CoefficientSet, DesignProblem, ModelSpec, Network, NetworkSchedule, RngStream};
use serde_json::json;

use crate::align::align_series;
use crate::error::{CliError, Result};
use crate::files;
use crate::numfmt::{cell, g17};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "gnar", version, about = "Network autoregressive models for time series observed on graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares fit; writes fit JSON.
    Fit(FitArgs),
    /// Simulates a series; writes series CSV.
    Simulate(SimulateArgs),
    /// Forecasts from a fit; writes forecast CSV and an optional score.
    Predict(PredictArgs),
    /// Information criterion over a grid of orders; writes long-format CSV.
    IcGrid(IcGridArgs),
    /// Scores random networks by held-out prediction error.
    NetSearch(NetSearchArgs),
    /// Converts between adjacency CSV and network JSON.
    Convert(ConvertArgs),
    /// Per-node stationarity margins and the companion spectral radius.
    CheckStationarity(StationarityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlphaModeArg {
    #[value(alias = "per_node")]
    PerNode,
    Global,
    #[value(alias = "per_group")]
    PerGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaskArg {
    Reweight,
    Subgraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Bic,
    Aic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Weights,
    Distances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    #[arg(long, value_enum, default_value = "global")]
    pub alpha_mode: AlphaModeArg,
    /// JSON object mapping node names to group labels.
    #[arg(long)]
    pub groups: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub p: usize,
    /// Neighbour stages per lag, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub s: Vec<usize>,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, value_enum, default_value = "reweight")]
    pub mask_mode: MaskArg,
    /// Match series columns to nodes by position instead of name.
    #[arg(long)]
    pub by_position: bool,
    /// Also write the regression response and design matrix as CSV.
    #[arg(long)]
    pub design_csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub coef: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "GNAR_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = gnar_core::sim::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub fit: PathBuf,
    /// History; the last p rows are used.
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub h: usize,
    /// Observed values for steps 1.. of the horizon.
    #[arg(long)]
    pub actuals: Option<PathBuf>,
    /// Score JSON destination; stderr when omitted.
    #[arg(long, requires = "actuals")]
    pub score: Option<PathBuf>,
    #[arg(long)]
    pub by_position: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IcGridArgs {
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub net: PathBuf,
    /// Lag orders to try, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub p: Vec<usize>,
    /// Largest neighbour stage tried at every lag.
    #[arg(long, default_value_t = 3)]
    pub max_stage: usize,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, value_enum, default_value = "bic")]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub by_position: bool,
    /// JSON summary of the minimising order.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetSearchArgs {
    #[arg(long)]
    pub series: PathBuf,
    /// Candidate order `p:s1,...,sp`, e.g. `2:1,0`. Repeatable.
    #[arg(long = "order", required = true)]
    pub orders: Vec<String>,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, default_value_t = 100)]
    pub n_networks: usize,
    #[arg(long, default_value_t = 0.15)]
    pub prob: f64,
    /// Network k is drawn with seed `seed + k`.
    #[arg(long, env = "GNAR_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of leading rows used for fitting.
    #[arg(long)]
    pub train_end: usize,
    /// One-based row to score; defaults to `train_end + 1`.
    #[arg(long)]
    pub target: Option<usize>,
    /// Divide each node by its standard deviation over the training rows.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub best_network: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output format; inferred from the file extensions when omitted.
    #[arg(long, value_enum)]
    pub to: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "weights")]
    pub kind: KindArg,
    /// Mirror one-sided adjacency entries.
    #[arg(long)]
    pub symmetrize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StationarityArgs {
    #[arg(long, conflicts_with_all = ["net", "spec", "coef"], required_unless_present_all = ["net", "spec", "coef"])]
    pub fit: Option<PathBuf>,
    #[arg(long)]
    pub net: Option<PathBuf>,
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub coef: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args`, runs the command and returns the process exit code.
/// Failures are written to stderr as JSON.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = CliError::usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::IcGrid(a) => cmd_ic_grid(a),
        Command::NetSearch(a) => cmd_net_search(a),
        Command::Convert(a) => cmd_convert(a),
        Command::CheckStationarity(a) => cmd_stationarity(a),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn warn(message: impl std::fmt::Display) {
    eprintln!("{}", json!({ "warning": message.to_string() }));
}

fn alpha_mode(args: &ModeArgs, names: &[String]) -> Result<AlphaMode> {
    let groups: Option<BTreeMap<String, String>> = match &args.groups {
        Some(path) => Some(serde_json::from_str(&read(path)?)?),
        None => None,
    };
    match args.alpha_mode {
        AlphaModeArg::PerGroup if groups.is_none() => Err(CliError::usage("--alpha-mode per-group needs --groups")),
        AlphaModeArg::Global | AlphaModeArg::PerNode if groups.is_some() => {
            Err(CliError::usage("--groups only applies with --alpha-mode per-group"))
        }
        AlphaModeArg::Global => Ok(AlphaMode::Global),
        AlphaModeArg::PerNode => Ok(AlphaMode::PerNode),
        AlphaModeArg::PerGroup => files::alpha_mode_from("per_group", groups.as_ref(), names),
    }
}

/// Spec built from command-line orders; malformed orders are usage errors.
fn spec_from_flags(p: usize, s: Vec<usize>, n_covariates: usize, mode: AlphaMode) -> Result<ModelSpec> {
    if p == 0 {
        return Err(CliError::usage("--p must be at least 1"));
    }
    if s.len() != p {
        return Err(CliError::usage(format!("--s lists {} stages for p = {p}", s.len())));
    }
    Ok(ModelSpec::new(p, s, n_covariates, mode)?)
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let net = files::parse_network(&read(&a.net)?)?;
    let raw = files::parse_series(&read(&a.series)?)?;
    let mode = alpha_mode(&a.mode, net.names())?;
    let spec = spec_from_flags(a.p, a.s, net.n_covariates(), mode)?;
    let vts = align_series(&raw, net.names(), a.by_position)?;
    let opts = FitOptions {
        mask_mode: match a.mask_mode {
            MaskArg::Reweight => MaskMode::Reweight,
            MaskArg::Subgraph => MaskMode::Subgraph,
        },
        ..FitOptions::default()
    };
    let fit = fit_with(&vts, NetworkSchedule::Static(&net), &spec, opts)?;
    for w in &fit.warnings {
        warn(w);
    }
    if let Some(path) = &a.design_csv {
        let design = gnar_core::build_design_with(&vts, NetworkSchedule::Static(&net), &spec, opts.mask_mode)?;
        emit(Some(path), &design_to_csv(&design, &fit.names, net.names()))?;
    }
    emit(a.out.as_deref(), &files::fit_to_json(&fit, &net))
}

fn design_to_csv(d: &DesignProblem, params: &[String], nodes: &[String]) -> String {
    let mut out = String::from("t,node,y");
    for p in params {
        out.push(',');
        out.push_str(p);
    }
    out.push('\n');
    for (k, &(t, i)) in d.row_index.iter().enumerate() {
        out.push_str(&format!("{},{},{}", t + 1, nodes[i], g17(d.y[k])));
        for &x in d.x.row(k) {
            out.push(',');
            out.push_str(&g17(x));
        }
        out.push('\n');
    }
    out
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let net = files::parse_network(&read(&a.net)?)?;
    let spec_file: files::SpecFile = serde_json::from_str(&read(&a.spec)?)?;
    let spec = spec_file.to_spec(net.names(), net.n_covariates())?;
    let coef = files::parse_coefficients(&read(&a.coef)?, &spec, net.n_nodes())?;
    let cfg = SimConfig::new(a.n).burn_in(a.burn_in);
    let sim = gnar_simulate(&net, &spec, &coef, &cfg, &mut RngStream::new(a.seed))?;
    for w in &sim.warnings {
        warn(w);
    }
    emit(a.out.as_deref(), &files::series_to_csv(&sim.series))
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let (net, spec, coef) = files::parse_fit(&read(&a.fit)?)?.model()?;
    let history = align_series(&files::parse_series(&read(&a.series)?)?, net.names(), a.by_position)?;
    let forecast = predict(&net, &spec, &coef, &history, a.h)?;
    let score = match &a.actuals {
        Some(path) => Some(score_forecast(&forecast, &files::parse_series(&read(path)?)?, &net, a.by_position)?),
        None => None,
    };
    emit(a.out.as_deref(), &files::matrix_to_csv(net.names(), &forecast))?;
    if let Some(score) = score {
        let text = files::to_pretty_json(&score);
        match &a.score {
            Some(path) => emit(Some(path), &text)?,
            None => eprint!("{text}"),
        }
    }
    Ok(())
}

fn score_forecast(
    forecast: &gnar_core::Matrix,
    actuals: &gnar_core::SeriesMatrix,
    net: &Network,
    by_position: bool,
) -> Result<serde_json::Value> {
    let actuals = align_series(actuals, net.names(), by_position)?;
    if actuals.n_times() == 0 || actuals.n_times() > forecast.rows() {
        return Err(CliError::format(format!(
            "actuals have {} rows; expected 1 to {}",
            actuals.n_times(),
            forecast.rows()
        )));
    }
    let mut steps = Vec::new();
    let mut total = 0.0;
    for t in 0..actuals.n_times() {
        let e = prediction_error(forecast.row(t), actuals.row(t))?;
        total += e;
        steps.push(json!({ "step": t + 1, "error": e }));
    }
    Ok(json!({ "steps": steps, "total": total }))
}

fn cmd_ic_grid(a: IcGridArgs) -> Result<()> {
    let net = files::parse_network(&read(&a.net)?)?;
    let vts = align_series(&files::parse_series(&read(&a.series)?)?, net.names(), a.by_position)?;
    let mode = alpha_mode(&a.mode, net.names())?;
    if a.p.contains(&0) {
        return Err(CliError::usage("lag orders must be at least 1"));
    }
    let mut specs = Vec::new();
    for &p in &a.p {
        for s in stage_grid(&vec![a.max_stage; p]) {
            specs.push(ModelSpec::new(p, s, net.n_covariates(), mode.clone())?);
        }
    }
    let criterion = match a.criterion {
        CriterionArg::Bic => Criterion::Bic,
        CriterionArg::Aic => Criterion::Aic,
    };
    let grid = parallel::ic_grid(&vts, &net, &specs, criterion, a.jobs)?;

    let width = a.p.iter().copied().max().unwrap_or(0);
    let mut out = String::from("p");
    for j in 1..=width {
        out.push_str(&format!(",b{j}"));
    }
    out.push_str(",n_params,value\n");
    for e in &grid.entries {
        out.push_str(&e.spec.p().to_string());
        for j in 0..width {
            out.push(',');
            out.push_str(&e.spec.stages().get(j).map_or_else(|| "NA".into(), |s| s.to_string()));
        }
        out.push_str(&format!(",{},{}\n", e.n_params, cell(e.value)));
    }
    emit(a.out.as_deref(), &out)?;

    if let Some(path) = &a.summary {
        let best = grid.best_entry().map(|e| {
            json!({
                "model": e.spec.label(),
                "p": e.spec.p(),
                "s": e.spec.stages(),
                "n_params": e.n_params,
                "value": e.value,
            })
        });
        let failed = grid.entries.iter().filter(|e| e.value.is_none()).count();
        let criterion = match criterion {
            Criterion::Bic => "bic",
            Criterion::Aic => "aic",
        };
        let summary = json!({ "criterion": criterion, "candidates": grid.entries.len(), "failed": failed, "best": best });
        emit(Some(path), &files::to_pretty_json(&summary))?;
    }
    Ok(())
}

/// Parses `p:s1,...,sp`.
fn parse_order(text: &str) -> Result<(usize, Vec<usize>)> {
    let bad = || CliError::usage(format!("order {text:?} is not of the form p:s1,...,sp"));
    let (p, s) = text.split_once(':').ok_or_else(bad)?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    let s = s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<Vec<usize>>>()?;
    Ok((p, s))
}

fn cmd_net_search(a: NetSearchArgs) -> Result<()> {
    let raw = files::parse_series(&read(&a.series)?)?;
    let mode = alpha_mode(&a.mode, raw.names())?;
    let specs = a
        .orders
        .iter()
        .map(|o| parse_order(o).and_then(|(p, s)| spec_from_flags(p, s, 1, mode.clone())))
        .collect::<Result<Vec<_>>>()?;
    if !(0.0..=1.0).contains(&a.prob) {
        return Err(CliError::usage("--prob must lie in [0, 1]"));
    }
    let target = a.target.unwrap_or(a.train_end + 1);
    if a.train_end == 0 || target <= a.train_end || target > raw.n_times() {
        return Err(CliError::usage(format!(
            "need 1 <= train-end < target <= {} (the series length)",
            raw.n_times()
        )));
    }
    let vts = if a.normalize { normalize_by_node_sd(&raw, a.train_end)?.0 } else { raw };
    let cfg = SearchConfig { specs: specs.clone(), n_networks: a.n_networks, prob: a.prob, master_seed: a.seed, train_end: a.train_end, target };
    let result = parallel::search(&vts, cfg, a.jobs)?;

    let mut out = String::from("seed,spec_id,error\n");
    for row in &result.table {
        out.push_str(&format!("{},{},{}\n", row.seed, row.spec_id, g17(row.error)));
    }
    emit(a.out.as_deref(), &out)?;
    if let Some(path) = &a.best_network {
        emit(Some(path), &files::network_to_json(&result.best_network))?;
    }
    if let Some(path) = &a.summary {
        let best = result.best;
        let summary = json!({
            "best_seed": best.seed,
            "best_spec_id": best.spec_id,
            "best_model": specs[best.spec_id].label(),
            "best_error": best.error,
            "best_edge_count": result.best_network.edge_count(),
            "candidates": result.table.len(),
            "unfitted": result.table.iter().filter(|r| r.error.is_infinite()).count(),
        });
        emit(Some(path), &files::to_pretty_json(&summary))?;
    }
    Ok(())
}

fn extension_format(path: &Path) -> Option<FormatArg> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "json" => Some(FormatArg::Json),
        "csv" => Some(FormatArg::Csv),
        _ => None,
    }
}

fn cmd_convert(a: ConvertArgs) -> Result<()> {
    let from = extension_format(&a.input)
        .ok_or_else(|| CliError::usage("input must end in .csv (adjacency) or .json (network)"))?;
    let to = a
        .to
        .or_else(|| a.out.as_deref().and_then(extension_format))
        .unwrap_or(match from {
            FormatArg::Json => FormatArg::Csv,
            FormatArg::Csv => FormatArg::Json,
        });
    let kind = match a.kind {
        KindArg::Weights => AdjacencyKind::Weights,
        KindArg::Distances => AdjacencyKind::Distances,
    };
    let text = read(&a.input)?;
    let net = match from {
        FormatArg::Json => files::parse_network(&text)?,
        FormatArg::Csv => files::network_from_adjacency(&text, kind, a.symmetrize)?,
    };
    let out = match to {
        FormatArg::Json => files::network_to_json(&net),
        FormatArg::Csv => files::adjacency_to_csv(&net, kind)?,
    };
    emit(a.out.as_deref(), &out)
}

fn cmd_stationarity(a: StationarityArgs) -> Result<()> {
    let (net, spec, coef): (Network, ModelSpec, CoefficientSet) = match &a.fit {
        Some(path) => files::parse_fit(&read(path)?)?.model()?,
        None => {
            let need = |p: &Option<PathBuf>| p.clone().ok_or_else(|| CliError::usage("give --fit or all of --net, --spec, --coef"));
            let net = files::parse_network(&read(&need(&a.net)?)?)?;
            let spec_file: files::SpecFile = serde_json::from_str(&read(&need(&a.spec)?)?)?;
            let spec = spec_file.to_spec(net.names(), net.n_covariates())?;
            let coef = files::parse_coefficients(&read(&need(&a.coef)?)?, &spec, net.n_nodes())?;
            (net, spec, coef)
        }
    };
    let report = stationarity_margin(&spec, &coef, net.n_nodes())?;
    let radius = spectral_radius(&companion_matrix(&to_var_matrices(&net, &spec, &coef)?)?)?;
    let margins: Vec<_> = net
        .names()
        .iter()
        .zip(&report.margins)
        .map(|(n, m)| json!({ "node": n, "margin": m }))
        .collect();
    let out = json!({
        "model": spec.label(),
        "margins": margins,
        "max_margin": report.max_margin(),
        "sufficient_condition_holds": report.sufficient_condition_holds,
        "spectral_radius": radius,
        "stable": radius < 1.0,
    });
    emit(a.out.as_deref(), &files::to_pretty_json(&out))
}
