//! Trial runner, generators and file formats for the ro-arena CLI.

pub mod enumerate;
pub mod error;
pub mod instance;
pub mod registry;
pub mod runner;
pub mod spec;
pub mod table;

pub use error::{BenchError, Result};
pub use runner::{Experiment, ExperimentConfig, OrderKind};

/// Runs an experiment and returns the CSV bytes together with the summary
/// text. The CSV is written to the configured output, if any, only after
/// every trial succeeded.
pub fn run(cfg: &ExperimentConfig) -> Result<(Vec<u8>, String)> {
    let exp = Experiment::from_config(cfg)?;
    let records = exp.run()?;
    let bytes = table::to_csv(&records);
    if let Some(out) = &exp.out {
        table::write_atomic(out, &bytes)?;
    }
    Ok((bytes, table::summary_text(&records)))
}

/// Generates the instance named by `spec` and returns its file contents.
pub fn gen(spec: &str, seed: u64) -> Result<String> {
    let spec = spec::Spec::parse(spec)?;
    Ok(instance::generate(&spec, seed)?.to_text())
}
