//! Experiment orchestration: target distributions, training loops for the
//! closed-form-discriminator GANs and the moment-matching baselines,
//! deterministic CSV/JSON outputs, and gradient-order sweeps.

mod config;
mod history;
mod outputs;
mod run;
mod sweep;
mod target;

pub use config::{
    Algorithm, GeneratorConfig, GeneratorKind, LambdaMode, RunSpec, TimingMode, TrainConfig,
};
pub use history::{MetricRecord, RunHistory, RunStatus};
pub use outputs::{samples_csv, write_run_outputs};
pub use run::{run, run_gmmn, run_poly_lsgan, run_poly_wgan, RunResult, FINAL_SAMPLE_COUNT};
pub use sweep::{sweep_csv, sweep_m, SweepEntry};
pub use target::{GmmComponent, TargetSampler, TargetSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
    #[error(transparent)]
    Discriminator(#[from] crate::discriminators::DiscriminatorError),
    #[error(transparent)]
    Generator(#[from] crate::generator::GeneratorError),
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
