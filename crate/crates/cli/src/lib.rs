//! Front end for `curvlab-core`: catalog lookup and metric files, seeded
//! point sampling, parallel evaluation and reports.

pub mod error;
pub mod expr;
pub mod metric_file;
pub mod report;
pub mod run;

pub use error::CliError;
pub use run::{run, Checks, Format, MetricSource, PointSource, RunConfig, RunResult};

/// Runs `config`, writes the report and returns the process exit code.
pub fn execute(config: &RunConfig) -> Result<u8, CliError> {
    let result = run(config)?;
    let text = match config.format {
        Format::Json => report::to_json(&result),
        Format::Table => report::to_table(&result),
    };
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            use std::io::Write;
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
    Ok(result.exit_code())
}
