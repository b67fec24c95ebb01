//! Metrics declared in a TOML file.
//!
//! ```toml
//! name = "schwarzschild_file"
//! dim = 4
//! signature = [-1, 1, 1, 1]
//! coordinates = ["t", "r", "th", "ph"]
//! domain = ["r > 2*m", "sin(th) > 0"]
//! expect = ["PSEUDO"]
//!
//! [params]
//! m = 1.0
//!
//! [components]
//! "t,t" = "-(1 - 2*m/r)"
//! "r,r" = "1/(1 - 2*m/r)"
//! "th,th" = "r^2"
//! "ph,ph" = "r^2*sin(th)^2"
//!
//! [sample]
//! box = [[-1, 1], [2.5, 10], [0.3, 2.8], [0, 6]]
//! points = [[0, 3, 1.0471975511965976, 0]]
//! ```
//!
//! A parameter is a number or a family in catalog profile syntax; a family
//! containing `*` or `;` takes two arguments. Components not listed are zero.

use std::collections::BTreeMap;
use std::path::Path;

use curvlab_core::catalog::{Profile, Profile2};
use curvlab_core::conditions::ConditionId;
use curvlab_core::{Jet, MetricSpec};
use serde::Deserialize;

use crate::error::CliError;
use crate::expr::{Expr, Family, Inequality, Scope};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: Option<String>,
    dim: usize,
    signature: Vec<i8>,
    coordinates: Vec<String>,
    #[serde(default)]
    domain: Vec<String>,
    #[serde(default)]
    params: BTreeMap<String, toml::Value>,
    components: BTreeMap<String, String>,
    #[serde(default)]
    sample: RawSample,
    #[serde(default)]
    expect: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    #[serde(rename = "box")]
    bx: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    points: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub struct FileMetric {
    name: String,
    signature: Vec<i8>,
    /// Upper triangle, row-major; `None` for zero components.
    comps: Vec<Option<Expr>>,
    domain: Vec<Inequality>,
    pub params: BTreeMap<String, String>,
    pub sample_box: Option<Vec<(f64, f64)>>,
    pub points: Vec<Vec<f64>>,
    pub expect: Vec<ConditionId>,
}

fn family(text: &str) -> Result<Family, CliError> {
    let bad = |e: curvlab_core::CurvError| CliError::parse(format!("parameter family `{text}`: {e}"));
    if text.contains('*') || text.contains(';') {
        Profile2::parse(text).map(Family::Two).map_err(bad)
    } else {
        Profile::parse(text).map(Family::One).map_err(bad)
    }
}

impl FileMetric {
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let fallback = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "metric_file".into());
        Self::from_toml(&text, &fallback, overrides)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str, fallback_name: &str, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| CliError::parse(e.to_string()))?;
        let n = raw.dim;
        if n == 0 || n > curvlab_core::MAX_DIM {
            return Err(CliError::parse(format!("dim must be 1..={}", curvlab_core::MAX_DIM)));
        }
        if raw.signature.len() != n || raw.coordinates.len() != n {
            return Err(CliError::parse("signature and coordinates must have dim entries"));
        }
        if raw.signature.iter().any(|s| *s != 1 && *s != -1) {
            return Err(CliError::parse("signature entries must be 1 or -1"));
        }

        let mut params: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in &raw.params {
            let s = match v {
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::String(s) => s.clone(),
                other => return Err(CliError::parse(format!("parameter `{k}` has unsupported value {other}"))),
            };
            params.insert(k.clone(), s);
        }
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(CliError::parse(format!("unknown parameter `{k}`")));
            }
            params.insert(k.clone(), v.clone());
        }

        let mut scope = Scope {
            coords: raw.coordinates.clone(),
            ..Default::default()
        };
        for (k, v) in &params {
            if raw.coordinates.contains(k) {
                return Err(CliError::parse(format!("parameter `{k}` shadows a coordinate")));
            }
            match v.trim().parse::<f64>() {
                Ok(x) => {
                    scope.reals.insert(k.clone(), x);
                }
                Err(_) => {
                    scope.families.insert(k.clone(), family(v)?);
                }
            }
        }

        let mut comps = vec![None; n * (n + 1) / 2];
        for (key, src) in &raw.components {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| CliError::parse(format!("component key `{key}` is not `a,b`")))?;
            let idx = |c: &str| {
                raw.coordinates
                    .iter()
                    .position(|x| x == c.trim())
                    .ok_or_else(|| CliError::parse(format!("unknown coordinate `{c}` in `{key}`")))
            };
            let (i, j) = (idx(a)?, idx(b)?);
            let (i, j) = (i.min(j), i.max(j));
            let slot = i * n - i * (i + 1) / 2 + j;
            if comps[slot].is_some() {
                return Err(CliError::parse(format!("component `{key}` given twice")));
            }
            comps[slot] = Some(Expr::parse(src, &scope)?);
        }
        if comps.iter().all(|c| c.is_none()) {
            return Err(CliError::parse("no components"));
        }

        let domain = raw
            .domain
            .iter()
            .map(|d| Inequality::parse(d, &scope))
            .collect::<Result<Vec<_>, _>>()?;
        let sample_box = match raw.sample.bx {
            Some(b) if b.len() != n => return Err(CliError::parse("sample box must have dim entries")),
            Some(b) => Some(b.into_iter().map(|[lo, hi]| (lo, hi)).collect()),
            None => None,
        };
        if raw.sample.points.iter().any(|p| p.len() != n) {
            return Err(CliError::parse("sample points must have dim coordinates"));
        }
        let expect = raw
            .expect
            .iter()
            .map(|s| ConditionId::parse(s).ok_or_else(|| CliError::parse(format!("unknown condition `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Self {
            name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
            signature: raw.signature,
            comps,
            domain,
            params,
            sample_box,
            points: raw.sample.points,
            expect,
        })
    }
}

impl MetricSpec for FileMetric {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.signature.len()
    }

    fn signature(&self) -> &[i8] {
        &self.signature
    }

    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.dim();
        let upper: Vec<Jet> = self
            .comps
            .iter()
            .map(|c| c.as_ref().map_or(Jet::constant(0.0), |e| e.eval(x)))
            .collect();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (i.min(j), i.max(j));
                out.push(upper[a * n - a * (a + 1) / 2 + b]);
            }
        }
        out
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.domain.iter().all(|d| d.holds(x))
    }
}
