//! Generalised network autoregressive (GNAR) models for multivariate time
//! series observed on the nodes of a network.
//!
//! The crate is `no_std` with `alloc`. File formats, the command line and
//! parallel drivers live in the companion `gnar` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod design;
pub mod error;
pub mod estimate;
pub mod forecast;
pub mod linalg;
pub mod model;
pub mod netsearch;
pub mod network;
pub mod rng;
pub mod series;
pub mod sim;

pub use design::{build_design, build_design_with, DesignProblem, NetworkSchedule};
pub use error::{Error, Result, Warning};
pub use estimate::{fit, fit_with, Criterion, FitOptions, FitResult};
pub use forecast::{predict, prediction_error};
pub use linalg::Matrix;
pub use model::{AlphaMode, CoefficientSet, Grouping, ModelSpec, StationarityReport};
pub use network::{AdjacencyKind, Edge, MaskMode, Network, WeightMap};
pub use rng::RngStream;
pub use series::SeriesMatrix;
pub use sim::{gnar_simulate, var_simulate, SimConfig};
