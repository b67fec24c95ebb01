use alloc::vec::Vec;

use super::{
    check_thm62, check_thm71, error_report, run_generic, ConditionId, ConditionReport, Context,
    PointClass, TOL_CHAINED,
};
use crate::engine::{curvature_package, CurvaturePackage};
use crate::error::{CurvError, Result};
use crate::metric::MetricSpec;
use crate::warped::{aux_tensors, WarpedAux, WarpedSpec};

/// Everything computed at one chart point.
#[derive(Clone, Debug)]
pub struct PointAnalysis {
    pub point: Vec<f64>,
    pub pkg: CurvaturePackage,
    pub class: PointClass,
    /// In the order the conditions were requested.
    pub reports: Vec<ConditionReport>,
    pub aux: Option<WarpedAux>,
}

impl PointAnalysis {
    pub fn report(&self, id: ConditionId) -> Option<&ConditionReport> {
        self.reports.iter().find(|r| r.id == id)
    }
}

fn is_warped_only(id: ConditionId) -> bool {
    use ConditionId::*;
    matches!(
        id,
        Thm62RdotS
            | Thm71Cc
            | Thm71Genpseudo
            | Thm71Identity05
            | Thm71WeylDecomp
            | Thm71Identity06
            | Thm71Cr
            | Thm71Rc
    )
}

/// Curvature package, classification and the requested reports at `x`.
///
/// The package comes from the generic engine on `spec`; when `warped` is
/// given its auxiliary scalars feed the warped-product conditions.
pub fn analyze_point(
    spec: &dyn MetricSpec,
    warped: Option<&WarpedSpec>,
    x: &[f64],
    ids: &[ConditionId],
) -> Result<PointAnalysis> {
    if x.len() != spec.dim() {
        return Err(CurvError::DimensionMismatch {
            expected: spec.dim(),
            got: x.len(),
        });
    }
    if !spec.in_domain(x) {
        return Err(CurvError::OutsideDomain(spec.name().into()));
    }
    let pkg = curvature_package(spec, x)?;
    let ctx = Context::new(&pkg);
    let class = ctx.class().clone();

    let mut aux = None;
    let mut aux_err = None;
    if let Some(w) = warped {
        let lr = run_generic(&ctx, &[ConditionId::Pseudo])
            .first()
            .filter(|r| r.holds)
            .and_then(|r| r.fitted("L_R"));
        match aux_tensors(w, x, lr) {
            Ok(a) => aux = Some(a),
            Err(e) => aux_err = Some(e),
        }
    }

    let mut thm71: Option<Vec<ConditionReport>> = None;
    let mut reports = Vec::with_capacity(ids.len());
    for &id in ids {
        if !is_warped_only(id) {
            reports.extend(run_generic(&ctx, &[id]));
            continue;
        }
        let Some(a) = aux.as_ref() else {
            let r = match &aux_err {
                Some(e) => error_report(id, e),
                None => ConditionReport::degenerate(id, TOL_CHAINED, "requires a warped-product metric"),
            };
            reports.push(r);
            continue;
        };
        if id == ConditionId::Thm62RdotS {
            reports.push(check_thm62(&ctx, a).unwrap_or_else(|e| error_report(id, &e)));
            continue;
        }
        let all = thm71.get_or_insert_with(|| match check_thm71(&ctx, a) {
            Ok(v) => v,
            Err(e) => ConditionId::ALL
                .iter()
                .filter(|i| is_warped_only(**i))
                .map(|i| error_report(*i, &e))
                .collect(),
        });
        if let Some(r) = all.iter().find(|r| r.id == id) {
            reports.push(r.clone());
        }
    }
    drop(ctx);
    Ok(PointAnalysis {
        point: x.to_vec(),
        pkg,
        class,
        reports,
        aux,
    })
}
