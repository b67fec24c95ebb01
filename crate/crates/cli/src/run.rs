use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use curvlab_core::catalog::{build, CatalogEntry, Origin, Outcome, Param, Params};
use curvlab_core::conditions::{ConditionId, ConditionReport, PointAnalysis};
use curvlab_core::warped::WarpedSpec;
use curvlab_core::MetricSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;
use crate::expr::{Expr, Scope};
use crate::metric_file::FileMetric;

/// Total rejection-sampling attempts per run.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum MetricSource {
    Catalog(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointSource {
    /// The catalog entry's or metric file's own points.
    Default,
    Explicit(Vec<Vec<f64>>),
    Sample {
        count: usize,
        seed: u64,
        bx: Option<Vec<(f64, f64)>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Checks {
    All,
    List(Vec<ConditionId>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub metric: MetricSource,
    pub params: Vec<(String, String)>,
    pub points: PointSource,
    pub checks: Checks,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn catalog(name: &str) -> Self {
        Self {
            metric: MetricSource::Catalog(name.into()),
            params: Vec::new(),
            points: PointSource::Default,
            checks: Checks::All,
            tol: None,
            out: None,
            format: Format::Json,
        }
    }
}

/// A resolved metric with everything the run needs from its source.
pub struct Target {
    pub name: String,
    pub source: &'static str,
    pub spec: Arc<dyn MetricSpec>,
    pub warped: Option<WarpedSpec>,
    pub params: BTreeMap<String, String>,
    pub default_points: Vec<Vec<f64>>,
    pub sample_box: Option<Vec<(f64, f64)>>,
    entry: Option<CatalogEntry>,
    expect: Vec<ConditionId>,
}

impl Target {
    pub fn resolve(metric: &MetricSource, params: &[(String, String)]) -> Result<Self, CliError> {
        match metric {
            MetricSource::Catalog(name) => {
                let p: Params = params
                    .iter()
                    .map(|(k, v)| (k.clone(), Param::Text(v.clone())))
                    .collect();
                let e = build(name, &p)?;
                Ok(Self {
                    name: e.name.clone(),
                    source: "catalog",
                    spec: e.spec.clone(),
                    warped: e.warped.clone(),
                    params: e.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                    default_points: e.default_points.clone(),
                    sample_box: Some(e.sample_box.clone()),
                    expect: Vec::new(),
                    entry: Some(e),
                })
            }
            MetricSource::File(path) => {
                let f = FileMetric::load(path, params)?;
                Ok(Self {
                    name: f.name().to_string(),
                    source: "file",
                    params: f.params.clone(),
                    default_points: f.points.clone(),
                    sample_box: f.sample_box.clone(),
                    expect: f.expect.clone(),
                    spec: Arc::new(f),
                    warped: None,
                    entry: None,
                })
            }
        }
    }

    pub fn expected_ids(&self) -> Vec<ConditionId> {
        match &self.entry {
            Some(e) => e.expected_ids(),
            None => self.expect.clone(),
        }
    }

    fn check(&self, a: &PointAnalysis) -> Vec<Outcome> {
        if let Some(e) = &self.entry {
            return e.check(a);
        }
        self.expect
            .iter()
            .map(|id| {
                let r = a.report(*id);
                Outcome {
                    label: format!("{id} holds"),
                    origin: Origin::Stated,
                    condition: Some(*id),
                    pass: r.is_some_and(|r| r.holds),
                    degenerate: r.is_some_and(|r| r.degenerate),
                    skipped: false,
                    measure: r.map_or(f64::NAN, |r| r.residual_rel),
                    detail: r.map_or("not evaluated".into(), |r| format!("residual {:e}", r.residual_rel)),
                }
            })
            .collect()
    }
}

pub struct PointResult {
    pub index: usize,
    pub analysis: PointAnalysis,
    pub outcomes: Vec<Outcome>,
}

pub struct RunResult {
    pub target: Target,
    pub config: RunConfig,
    pub ids: Vec<ConditionId>,
    pub points: Vec<PointResult>,
}

impl RunResult {
    /// 1 if a non-degenerate expected check failed, else 0.
    pub fn exit_code(&self) -> u8 {
        let failed = self
            .points
            .iter()
            .flat_map(|p| &p.outcomes)
            .any(|o| !o.pass && !o.degenerate && !o.skipped);
        u8::from(failed)
    }
}

/// Parses `"x1,x2,.."`; entries may be expressions such as `pi/3`.
pub fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    let scope = Scope::default();
    s.split(',')
        .map(|t| {
            let v = Expr::parse(t, &scope)?.value(&[]);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::parse(format!("point coordinate `{t}` is not finite")))
            }
        })
        .collect()
}

/// Parses `"lo:hi,lo:hi,.."`.
pub fn parse_box(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let scope = Scope::default();
    s.split(',')
        .map(|t| {
            let (lo, hi) = t
                .split_once(':')
                .ok_or_else(|| CliError::parse(format!("box entry `{t}` is not lo:hi")))?;
            let (lo, hi) = (Expr::parse(lo, &scope)?.value(&[]), Expr::parse(hi, &scope)?.value(&[]));
            if !(lo <= hi) {
                return Err(CliError::parse(format!("box entry `{t}` has lo > hi")));
            }
            Ok((lo, hi))
        })
        .collect()
}

/// Parses `LIST|all` where LIST is comma-separated condition ids.
pub fn parse_checks(s: &str) -> Result<Checks, CliError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Checks::All);
    }
    s.split(',')
        .map(|t| {
            let t = t.trim().to_ascii_uppercase();
            ConditionId::parse(&t).ok_or_else(|| CliError::parse(format!("unknown condition `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Checks::List)
}

/// Points drawn uniformly from `bx`, kept when inside the domain.
pub fn sample(spec: &dyn MetricSpec, bx: &[(f64, f64)], count: usize, seed: u64) -> Result<Vec<Vec<f64>>, CliError> {
    if bx.len() != spec.dim() {
        return Err(CliError::parse(format!(
            "sampling box has {} entries, metric has dimension {}",
            bx.len(),
            spec.dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts == MAX_ATTEMPTS {
            return Err(CliError::Domain(format!(
                "only {} of {count} points found inside the domain after {MAX_ATTEMPTS} attempts",
                out.len()
            )));
        }
        attempts += 1;
        let x: Vec<f64> = bx.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
        if spec.in_domain(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

fn apply_tol(r: &mut ConditionReport, tol: f64) {
    r.tol = tol;
    r.holds = !r.degenerate && r.residual_rel < tol;
}

pub fn run(config: &RunConfig) -> Result<RunResult, CliError> {
    let target = Target::resolve(&config.metric, &config.params)?;
    if let Some(t) = config.tol {
        if !(t > 0.0) {
            return Err(CliError::parse("tolerance must be positive"));
        }
    }
    let points = match &config.points {
        PointSource::Default => {
            if target.default_points.is_empty() {
                return Err(CliError::parse("metric has no default points; use --points or --sample"));
            }
            target.default_points.clone()
        }
        PointSource::Explicit(p) => p.clone(),
        PointSource::Sample { count, seed, bx } => {
            let bx = bx
                .as_ref()
                .or(target.sample_box.as_ref())
                .ok_or_else(|| CliError::parse("no sampling box; use --box"))?;
            sample(&*target.spec, bx, *count, *seed)?
        }
    };
    let n = target.spec.dim();
    for (i, x) in points.iter().enumerate() {
        if x.len() != n {
            return Err(CliError::parse(format!("point {i} has {} coordinates, expected {n}", x.len())));
        }
        if !target.spec.in_domain(x) {
            return Err(CliError::Domain(format!("point {i} {x:?} is outside the domain of {}", target.name)));
        }
    }

    let mut ids = match &config.checks {
        Checks::All => ConditionId::ALL.to_vec(),
        Checks::List(v) => v.clone(),
    };
    ids.extend(target.expected_ids());
    ids.sort();
    ids.dedup();

    let results: Vec<Result<PointResult, CliError>> = points
        .par_iter()
        .enumerate()
        .map(|(index, x)| {
            let mut analysis = curvlab_core::conditions::analyze_point(&*target.spec, target.warped.as_ref(), x, &ids)
                .map_err(|e| match CliError::from(e) {
                    CliError::Domain(m) => CliError::Domain(format!("point {index}: {m}")),
                    other => other,
                })?;
            if let Some(t) = config.tol {
                analysis.reports.iter_mut().for_each(|r| apply_tol(r, t));
            }
            let outcomes = target.check(&analysis);
            Ok(PointResult { index, analysis, outcomes })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(RunResult {
        target,
        config: config.clone(),
        ids,
        points,
    })
}
