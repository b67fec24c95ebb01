//! Named metrics with default points and machine-checkable expectations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::conditions::{analyze_point, ConditionId, PointAnalysis};
use crate::error::{CurvError, Result};
use crate::metric::MetricSpec;
use crate::warped::WarpedSpec;

mod entries;
mod profile;

pub use entries::{build, describe, ParamInfo, ParamKind, NAMES};
pub use profile::{Profile, Profile2};

/// A catalog parameter value.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Real(f64),
    Func(Profile),
    Func2(Profile2),
    /// Unparsed text, interpreted by the entry according to the parameter's kind.
    Text(String),
}

impl core::fmt::Display for Param {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Param::Real(v) => write!(f, "{v}"),
            Param::Func(p) => write!(f, "{p}"),
            Param::Func2(p) => write!(f, "{p}"),
            Param::Text(s) => f.write_str(s),
        }
    }
}

pub type Params = BTreeMap<String, Param>;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// A closed form or property quoted for this metric in the literature.
    Stated,
    /// Computed by hand from stated formulas for this particular metric.
    Derived,
    /// Holds for elementary reasons.
    Trivial,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Stated => "stated",
            Origin::Derived => "derived",
            Origin::Trivial => "trivial",
        }
    }
}

pub type ValueFn = Arc<dyn Fn(&PointAnalysis) -> f64 + Send + Sync>;
pub type PredFn = Arc<dyn Fn(&PointAnalysis) -> bool + Send + Sync>;
/// Returns a measured quantity and whether it passes.
pub type CheckFn = Arc<dyn Fn(&PointAnalysis) -> core::result::Result<(f64, bool), String> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Metric,
    Ricci,
    Riemann,
    Weyl,
}

#[derive(Clone)]
pub enum Expect {
    Holds(ConditionId),
    /// The condition is not degenerate and its residual exceeds the bound.
    Fails { id: ConditionId, min_residual: f64 },
    Degenerate(ConditionId),
    /// The condition holds and a fitted constant matches `value` to `tol` relative.
    Fitted { id: ConditionId, name: &'static str, value: ValueFn, tol: f64 },
    Component { tensor: Which, index: Vec<usize>, value: ValueFn, tol: f64 },
    Custom(CheckFn),
}

#[derive(Clone)]
pub struct Expectation {
    pub label: String,
    pub expect: Expect,
    pub origin: Origin,
    /// Only evaluated at points where this returns true.
    pub when: Option<PredFn>,
}

impl Expectation {
    pub fn new(label: impl Into<String>, expect: Expect, origin: Origin) -> Self {
        Self {
            label: label.into(),
            expect,
            origin,
            when: None,
        }
    }

    pub fn when(mut self, p: impl Fn(&PointAnalysis) -> bool + Send + Sync + 'static) -> Self {
        self.when = Some(Arc::new(p));
        self
    }

    /// Condition the expectation needs run, if any.
    pub fn condition(&self) -> Option<ConditionId> {
        match &self.expect {
            Expect::Holds(id) | Expect::Degenerate(id) => Some(*id),
            Expect::Fails { id, .. } | Expect::Fitted { id, .. } => Some(*id),
            _ => None,
        }
    }
}

/// Result of one expectation at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub origin: Origin,
    pub condition: Option<ConditionId>,
    pub pass: bool,
    /// The condition came out degenerate, so the expectation could not be judged.
    pub degenerate: bool,
    pub skipped: bool,
    /// The measured quantity (residual or deviation).
    pub measure: f64,
    pub detail: String,
}

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub spec: Arc<dyn MetricSpec>,
    pub warped: Option<WarpedSpec>,
    /// Resolved parameters, defaults included.
    pub params: Params,
    pub default_points: Vec<Vec<f64>>,
    /// Coordinate box for random sampling.
    pub sample_box: Vec<(f64, f64)>,
    pub expectations: Vec<Expectation>,
}

impl core::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("default_points", &self.default_points)
            .field("expectations", &self.expectations.len())
            .finish_non_exhaustive()
    }
}

impl CatalogEntry {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn analyze(&self, x: &[f64], ids: &[ConditionId]) -> Result<PointAnalysis> {
        analyze_point(&*self.spec, self.warped.as_ref(), x, ids)
    }

    /// Conditions referenced by the expectations, in canonical order.
    pub fn expected_ids(&self) -> Vec<ConditionId> {
        let mut v: Vec<ConditionId> =
            self.expectations.iter().filter_map(|e| e.condition()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn check(&self, a: &PointAnalysis) -> Vec<Outcome> {
        self.expectations.iter().map(|e| evaluate(e, a)).collect()
    }
}

fn outcome(e: &Expectation, pass: bool, measure: f64, detail: String) -> Outcome {
    Outcome {
        label: e.label.clone(),
        origin: e.origin,
        condition: e.condition(),
        pass,
        degenerate: false,
        skipped: false,
        measure,
        detail,
    }
}

fn rel_dev(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Judges one expectation against an analysed point.
pub fn evaluate(e: &Expectation, a: &PointAnalysis) -> Outcome {
    if let Some(w) = &e.when {
        if !w(a) {
            let mut o = outcome(e, true, 0.0, "not applicable at this point".into());
            o.skipped = true;
            return o;
        }
    }
    let find = |id: ConditionId| a.report(id);
    let missing = |id: ConditionId| outcome(e, false, f64::NAN, format!("{id} was not evaluated"));
    match &e.expect {
        Expect::Holds(id) => match find(*id) {
            None => missing(*id),
            Some(r) => {
                let mut o = outcome(e, r.holds, r.residual_rel, format!("residual {:e}", r.residual_rel));
                o.degenerate = r.degenerate;
                if r.degenerate {
                    o.detail = r.note.clone().unwrap_or_else(|| "degenerate".into());
                }
                o
            }
        },
        Expect::Fails { id, min_residual } => match find(*id) {
            None => missing(*id),
            Some(r) => {
                let pass = !r.degenerate && r.residual_rel > *min_residual;
                let mut o = outcome(e, pass, r.residual_rel, format!("residual {:e}", r.residual_rel));
                o.degenerate = r.degenerate;
                o
            }
        },
        Expect::Degenerate(id) => match find(*id) {
            None => missing(*id),
            Some(r) => outcome(
                e,
                r.degenerate && !r.holds,
                r.lhs_norm,
                r.note.clone().unwrap_or_default(),
            ),
        },
        Expect::Fitted { id, name, value, tol } => match find(*id) {
            None => missing(*id),
            Some(r) => {
                let want = value(a);
                match r.fitted(name) {
                    Some(got) => {
                        let dev = rel_dev(got, want);
                        let mut o = outcome(
                            e,
                            r.holds && dev <= *tol,
                            dev,
                            format!("{name} = {got:e}, expected {want:e}, residual {:e}", r.residual_rel),
                        );
                        o.degenerate = r.degenerate;
                        o
                    }
                    None => {
                        let mut o = outcome(e, false, f64::NAN, format!("{name} not fitted"));
                        o.degenerate = r.degenerate;
                        o
                    }
                }
            }
        },
        Expect::Component { tensor, index, value, tol } => {
            let got = component(a, *tensor, index);
            let want = value(a);
            match got {
                Ok(got) => {
                    let dev = rel_dev(got, want);
                    outcome(e, dev <= *tol, dev, format!("{got:e}, expected {want:e}"))
                }
                Err(err) => outcome(e, false, f64::NAN, err.to_string()),
            }
        }
        Expect::Custom(f) => match f(a) {
            Ok((m, pass)) => outcome(e, pass, m, format!("{m:e}")),
            Err(msg) => outcome(e, false, f64::NAN, msg),
        },
    }
}

/// A single component of one of the package tensors.
pub fn component(a: &PointAnalysis, which: Which, index: &[usize]) -> Result<f64> {
    let n = a.pkg.n();
    let bad = || CurvError::InvalidParam {
        name: "index".into(),
        reason: format!("{index:?} is not a valid index"),
    };
    if index.iter().any(|&i| i >= n) {
        return Err(bad());
    }
    match (which, index.len()) {
        (Which::Metric, 2) => Ok(a.pkg.g().at(index[0], index[1])),
        (Which::Ricci, 2) => Ok(a.pkg.s.at(index[0], index[1])),
        (Which::Riemann, 4) => Ok(a.pkg.r.get([index[0], index[1], index[2], index[3]])),
        (Which::Weyl, 4) => Ok(a.pkg.weyl()?.get([index[0], index[1], index[2], index[3]])),
        _ => Err(bad()),
    }
}

/// IDENTITY01 as the expectation shared by every entry.
pub(crate) fn universal() -> Vec<Expectation> {
    alloc::vec![Expectation::new(
        "IDENTITY01 holds",
        Expect::Holds(ConditionId::Identity01),
        Origin::Stated,
    )
    .when(|a| a.pkg.n() >= 4)]
}
