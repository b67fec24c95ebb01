//! JSON and table renderings of a run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use curvlab_core::catalog::Outcome;
use curvlab_core::conditions::{ConditionId, ConditionReport, PointClass};
use serde_json::{json, Map, Number, Value};

use crate::run::{Checks, PointResult, PointSource, RunResult};

pub const SCHEMA_ID: &str = "curvlab-report/1";

/// A JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let v = if v == 0.0 { 0.0 } else { v };
    Value::Number(Number::from_str(&format!("{v:.16e}")).expect("formatted float is valid JSON"))
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

fn named(pairs: &[(String, f64)]) -> Value {
    Value::Object(pairs.iter().map(|(k, v)| (k.clone(), num(*v))).collect())
}

pub fn class_label(c: &PointClass, n: usize) -> String {
    let mut words = Vec::new();
    if c.einstein {
        words.push("Einstein");
        if c.ricci_flat {
            words.push("Ricci-flat");
        }
    } else if c.quasi_einstein {
        words.push("quasi-Einstein");
    } else if c.two_quasi_einstein {
        words.push("2-quasi-Einstein");
    } else {
        words.push("generic Ricci");
    }
    if c.ricci_simple {
        words.push("Ricci-simple");
    }
    if n >= 4 && !c.in_uc {
        words.push("conformally flat");
    }
    words.join(", ")
}

fn class_json(c: &PointClass, n: usize) -> Value {
    json!({
        "label": class_label(c, n),
        "in_us": c.in_us,
        "in_uc": c.in_uc,
        "einstein": c.einstein,
        "ricci_flat": c.ricci_flat,
        "quasi_einstein": c.quasi_einstein,
        "two_quasi_einstein": c.two_quasi_einstein,
        "alpha": opt(c.alpha),
        "rank_s_minus_alpha_g": c.rank_s_minus_alpha_g,
        "rank_s": c.rank_s,
        "ricci_simple": c.ricci_simple,
        "quasi_residual": opt(c.quasi_residual),
        "s_traceless_rel": num(c.s_traceless_rel),
        "weyl_rel": num(c.weyl_rel),
    })
}

pub fn report_json(r: &ConditionReport) -> Value {
    json!({
        "condition_id": r.id.as_str(),
        "fitted": named(&r.fitted),
        "residual_rel": num(r.residual_rel),
        "holds": r.holds,
        "degenerate": r.degenerate,
        "tol": num(r.tol),
        "lhs_norm": num(r.lhs_norm),
        "parts": named(&r.parts),
        "note": r.note,
    })
}

fn outcome_json(o: &Outcome) -> Value {
    json!({
        "label": o.label,
        "origin": o.origin.as_str(),
        "condition_id": o.condition.map(|c| c.as_str()),
        "pass": o.pass,
        "degenerate": o.degenerate,
        "skipped": o.skipped,
        "measure": num(o.measure),
        "detail": o.detail,
    })
}

fn point_json(p: &PointResult) -> Value {
    let a = &p.analysis;
    let n = a.pkg.n();
    let aux = a.aux.as_ref();
    let scalars = json!({
        "kappa": num(a.pkg.kappa),
        "tau1": opt(aux.and_then(|w| w.tau1)),
        "tau2": opt(aux.and_then(|w| w.tau2)),
        "tau3": opt(aux.and_then(|w| w.tau3)),
        "rho0": opt(aux.and_then(|w| w.rho0)),
        "rho": opt(aux.and_then(|w| w.rho)),
        "tr_t": opt(aux.map(|w| w.tr_t)),
        "delta1_f": opt(aux.map(|w| w.delta1_f)),
        "kappa_bar": opt(aux.map(|w| w.kappa_bar)),
        "kappa_tilde": opt(aux.map(|w| w.kappa_tilde)),
        "warp": opt(aux.map(|w| w.f)),
    });
    json!({
        "index": p.index,
        "x": nums(&a.point),
        "classification": class_json(&a.class, n),
        "scalars": scalars,
        "reports": a.reports.iter().map(report_json).collect::<Vec<_>>(),
        "expectations": p.outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
    })
}

/// Per-condition aggregate over all points.
#[derive(Clone, Debug, Default)]
pub struct ConditionSummary {
    pub evaluated: usize,
    pub holds: usize,
    pub degenerate: usize,
    /// Largest residual among non-degenerate reports.
    pub worst_residual: Option<f64>,
}

pub fn summarize(run: &RunResult) -> Vec<(ConditionId, ConditionSummary)> {
    let mut m: BTreeMap<ConditionId, ConditionSummary> = BTreeMap::new();
    for id in &run.ids {
        m.insert(*id, ConditionSummary::default());
    }
    for p in &run.points {
        for r in &p.analysis.reports {
            let s = m.entry(r.id).or_default();
            s.evaluated += 1;
            if r.degenerate {
                s.degenerate += 1;
                continue;
            }
            if r.holds {
                s.holds += 1;
            }
            let w = s.worst_residual.get_or_insert(0.0);
            if r.residual_rel.is_nan() || r.residual_rel > *w {
                *w = r.residual_rel;
            }
        }
    }
    m.into_iter().collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpectationTally {
    pub passed: usize,
    pub failed: usize,
    pub degenerate: usize,
    pub skipped: usize,
}

pub fn tally(run: &RunResult) -> ExpectationTally {
    let mut t = ExpectationTally::default();
    for o in run.points.iter().flat_map(|p| &p.outcomes) {
        if o.skipped {
            t.skipped += 1;
        } else if o.degenerate && !o.pass {
            t.degenerate += 1;
        } else if o.pass {
            t.passed += 1;
        } else {
            t.failed += 1;
        }
    }
    t
}

pub fn to_json(run: &RunResult) -> String {
    let cfg = &run.config;
    let points = match &cfg.points {
        PointSource::Default => json!({"mode": "default"}),
        PointSource::Explicit(_) => json!({"mode": "explicit"}),
        PointSource::Sample { count, seed, bx } => json!({
            "mode": "sample",
            "count": count,
            "seed": seed,
            "box": bx.as_ref().or(run.target.sample_box.as_ref()).map(|b| {
                b.iter().map(|(lo, hi)| json!([num(*lo), num(*hi)])).collect::<Vec<_>>()
            }),
        }),
    };
    let checks = match &cfg.checks {
        Checks::All => json!("all"),
        Checks::List(v) => json!(v.iter().map(|c| c.as_str()).collect::<Vec<_>>()),
    };
    let summary: Vec<Value> = summarize(run)
        .iter()
        .map(|(id, s)| {
            json!({
                "condition_id": id.as_str(),
                "evaluated": s.evaluated,
                "holds": s.holds,
                "degenerate": s.degenerate,
                "worst_residual": opt(s.worst_residual),
            })
        })
        .collect();
    let t = tally(run);
    let doc = json!({
        "schema": SCHEMA_ID,
        "tool": {"name": "curvlab", "version": env!("CARGO_PKG_VERSION")},
        "metric": {
            "name": run.target.name,
            "source": run.target.source,
            "dim": run.target.spec.dim(),
            "signature": run.target.spec.signature(),
            "warped": run.target.warped.is_some(),
            "params": Value::Object(run.target.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<Map<_, _>>()),
        },
        "config": {
            "points": points,
            "checks": checks,
            "tol": opt(cfg.tol),
        },
        "points": run.points.iter().map(point_json).collect::<Vec<_>>(),
        "summary": {
            "conditions": summary,
            "expectations": {
                "passed": t.passed,
                "failed": t.failed,
                "degenerate": t.degenerate,
                "skipped": t.skipped,
            },
            "exit_code": run.exit_code(),
        },
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn short(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.3e}")
    }
}

pub fn to_table(run: &RunResult) -> String {
    let mut s = String::new();
    let params: Vec<String> = run.target.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(s, "metric  {} ({}, n = {})", run.target.name, run.target.source, run.target.spec.dim());
    if !params.is_empty() {
        let _ = writeln!(s, "params  {}", params.join(" "));
    }
    for p in &run.points {
        let a = &p.analysis;
        let x: Vec<String> = a.point.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "\npoint {}  x = ({})", p.index, x.join(", "));
        let _ = writeln!(s, "  class   {}", class_label(&a.class, a.pkg.n()));
        let _ = write!(s, "  kappa = {}", short(a.pkg.kappa));
        if let Some(w) = &a.aux {
            for (k, v) in [("tau1", w.tau1), ("tau2", w.tau2), ("rho0", w.rho0), ("rho", w.rho)] {
                if let Some(v) = v {
                    let _ = write!(s, "  {k} = {}", short(v));
                }
            }
        }
        s.push('\n');
        let _ = writeln!(s, "  {:<20} {:<10} {:>10}  fitted", "condition", "verdict", "residual");
        for r in &a.reports {
            let verdict = if r.degenerate {
                "degenerate"
            } else if r.holds {
                "holds"
            } else {
                "fails"
            };
            let fitted: Vec<String> = r.fitted.iter().map(|(k, v)| format!("{k}={}", short(*v))).collect();
            let _ = writeln!(
                s,
                "  {:<20} {:<10} {:>10}  {}",
                r.id.as_str(),
                verdict,
                short(r.residual_rel),
                fitted.join(" ")
            );
        }
        for o in p.outcomes.iter().filter(|o| !o.pass && !o.skipped) {
            let tag = if o.degenerate { "degenerate" } else { "FAILED" };
            let _ = writeln!(s, "  expectation {tag}: {} ({})", o.label, o.detail);
        }
    }
    let _ = writeln!(s, "\nsummary over {} point(s)", run.points.len());
    let _ = writeln!(s, "  {:<20} {:>6} {:>6} {:>10} {:>12}", "condition", "holds", "eval", "degenerate", "worst");
    for (id, c) in summarize(run) {
        let _ = writeln!(
            s,
            "  {:<20} {:>6} {:>6} {:>10} {:>12}",
            id.as_str(),
            c.holds,
            c.evaluated,
            c.degenerate,
            c.worst_residual.map_or("-".into(), short)
        );
    }
    let t = tally(run);
    let _ = writeln!(
        s,
        "expectations: {} passed, {} failed, {} degenerate, {} skipped",
        t.passed, t.failed, t.degenerate, t.skipped
    );
    let _ = writeln!(s, "exit {}", run.exit_code());
    s
}
