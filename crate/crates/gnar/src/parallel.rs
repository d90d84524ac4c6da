//! Thread-pool drivers for the network search and the order grid. Results
//! are collected in candidate order, so any thread count gives the same
//! output as a serial run.

use gnar_core::estimate::Criterion;
use gnar_core::netsearch::{ic_value, IcGrid, NetworkSearch, SearchConfig, SearchResult};
use gnar_core::{ModelSpec, Network, SeriesMatrix};
use rayon::prelude::*;

use crate::error::{CliError, Result};

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::format(format!("cannot start worker pool: {e}")))
}

pub fn search(vts: &SeriesMatrix, cfg: SearchConfig, jobs: usize) -> Result<SearchResult> {
    let search = NetworkSearch::new(vts, cfg)?;
    let scores = pool(jobs)?.install(|| {
        (0..search.n_networks())
            .into_par_iter()
            .map(|k| search.evaluate(k))
            .collect::<gnar_core::Result<Vec<_>>>()
    })?;
    Ok(search.finish(scores)?)
}

pub fn ic_grid(vts: &SeriesMatrix, net: &Network, specs: &[ModelSpec], criterion: Criterion, jobs: usize) -> Result<IcGrid> {
    let values = pool(jobs)?.install(|| {
        specs
            .par_iter()
            .map(|s| ic_value(vts, net, s, criterion).ok())
            .collect::<Vec<_>>()
    });
    Ok(IcGrid::from_values(criterion, vts.n_nodes(), specs, values))
}
