use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use curvlab::run::{parse_box, parse_checks, parse_point};
use curvlab::{CliError, Format, MetricSource, PointSource, RunConfig};
use curvlab_core::catalog::{describe, NAMES};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Table,
}

/// Curvature conditions of semi-Riemannian metrics, checked pointwise.
#[derive(Debug, Parser)]
#[command(name = "curvlab", version)]
#[command(group(ArgGroup::new("source").args(["metric", "metric_file", "list"]).required(true)))]
struct Cli {
    /// Catalog metric name.
    #[arg(long)]
    metric: Option<String>,

    /// TOML metric definition.
    #[arg(long, value_name = "PATH")]
    metric_file: Option<PathBuf>,

    /// Parameter override, `k=v` (repeatable).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,

    /// Evaluation point `x1,x2,..` (repeatable).
    #[arg(long = "points", value_name = "X", conflicts_with = "sample")]
    points: Vec<String>,

    /// Number of random points.
    #[arg(long)]
    sample: Option<usize>,

    #[arg(long, default_value_t = 0, requires = "sample")]
    seed: u64,

    /// Sampling box `lo:hi,..`; defaults to the metric's own box.
    #[arg(long = "box", value_name = "BOX", requires = "sample")]
    bx: Option<String>,

    /// Condition ids, comma-separated, or `all`.
    #[arg(long, default_value = "all")]
    checks: String,

    /// Tolerance override for every condition.
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = OutFormat::Table)]
    format: OutFormat,

    /// Lists catalog entries and their parameters.
    #[arg(long)]
    list: bool,
}

fn config(cli: Cli) -> Result<RunConfig, CliError> {
    let metric = match (cli.metric, cli.metric_file) {
        (Some(name), _) => MetricSource::Catalog(name),
        (None, Some(path)) => MetricSource::File(path),
        (None, None) => return Err(CliError::parse("no metric given")),
    };
    let params = cli
        .params
        .iter()
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::parse(format!("--param `{p}` is not k=v")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let points = match cli.sample {
        Some(count) => PointSource::Sample {
            count,
            seed: cli.seed,
            bx: cli.bx.as_deref().map(parse_box).transpose()?,
        },
        None if cli.points.is_empty() => PointSource::Default,
        None => PointSource::Explicit(cli.points.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?),
    };
    Ok(RunConfig {
        metric,
        params,
        points,
        checks: parse_checks(&cli.checks)?,
        tol: cli.tol,
        out: cli.out,
        format: match cli.format {
            OutFormat::Json => Format::Json,
            OutFormat::Table => Format::Table,
        },
    })
}

fn list() {
    let mut s = String::new();
    for name in NAMES {
        s += &format!("{name}\n");
        for p in describe(name).unwrap_or(&[]) {
            let kind = format!("{:?}", p.kind);
            s += &format!("  {:<10} {:<8} default {:<40} {}\n", p.name, kind, p.default, p.doc);
        }
    }
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        list();
        return ExitCode::SUCCESS;
    }
    let code = config(cli).and_then(|c| curvlab::execute(&c)).unwrap_or_else(|e| {
        eprintln!("curvlab: {e}");
        e.exit_code()
    });
    ExitCode::from(code)
}
