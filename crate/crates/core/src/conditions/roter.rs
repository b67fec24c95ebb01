use alloc::format;
use alloc::vec::Vec;

use super::{ConditionId, ConditionReport, Context, TOL_CHAINED, TOL_IDENTITY};
use crate::error::{CurvError, Result};
use crate::tensor::{fit_coefficients, kulkarni_nomizu, Balance, Components, CurvTensor4};

/// A Roter-type fit of `R` together with its coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RoterFit {
    pub report: ConditionReport,
    /// `(φ, μ, η)` for the three-term basis, `φ₁..φ_k` otherwise.
    pub coeffs: Vec<f64>,
    pub gram_degenerate: bool,
}

/// Fits `R` against `½S∧S, g∧S, G`, optionally extended by `g∧S²`
/// and then `S∧S², ½S²∧S²`.
pub fn fit_roter(ctx: &Context<'_>, id: ConditionId) -> Result<RoterFit> {
    use ConditionId::*;
    let k = match id {
        Roter => 3,
        GenRoter4Term => 4,
        GenRoter6Term => 6,
        _ => return Err(CurvError::Precondition(format!("{id} is not a Roter-type fit"))),
    };
    let pkg = ctx.pkg;
    let class = ctx.class();
    if !class.in_us || !class.in_uc {
        let why = if class.in_us { "point is outside U_C" } else { "point is outside U_S" };
        let mut report = ConditionReport::degenerate(id, TOL_IDENTITY, why);
        report.lhs_norm = pkg.r.norm();
        return Ok(RoterFit { report, coeffs: Vec::new(), gram_degenerate: true });
    }
    let mut basis: Vec<CurvTensor4> = alloc::vec![
        ctx.ss()?.scale(0.5),
        ctx.gs()?.clone(),
        pkg.big_g.clone(),
    ];
    if k >= 4 {
        basis.push(ctx.gs2()?.clone());
    }
    if k == 6 {
        basis.push(kulkarni_nomizu(&pkg.s, &pkg.s2)?);
        basis.push(kulkarni_nomizu(&pkg.s2, &pkg.s2)?.scale(0.5));
    }
    let refs: Vec<&dyn Components> = basis.iter().map(|b| b as &dyn Components).collect();
    let fit = fit_coefficients(&pkg.r, &refs)?;
    let mut bal = Balance::new().plus(&pkg.r);
    for (c, b) in fit.coeffs.iter().zip(&basis) {
        bal = bal.term(-c, b);
    }
    let mut report = ConditionReport::new(id, TOL_IDENTITY);
    let names: &[&str] = if k == 3 {
        &["phi", "mu", "eta"]
    } else {
        &["phi1", "phi2", "phi3", "phi4", "phi5", "phi6"]
    };
    for (name, c) in names.iter().zip(&fit.coeffs) {
        report = report.fit(name, *c);
    }
    report = report.with_part(id.as_str(), bal.residual_floor(1e-13 * pkg.r.norm()));
    report.lhs_norm = pkg.r.norm();
    if fit.degenerate {
        report.note = Some(format!(
            "basis is linearly dependent (Gram condition {:e}); minimum-norm coefficients",
            fit.gram_condition
        ));
    }
    Ok(RoterFit {
        report: report.finish(),
        coeffs: fit.coeffs,
        gram_degenerate: fit.degenerate,
    })
}

/// Structure functions implied by a three-term Roter fit, followed by the
/// residual of every equation they enter.
pub fn check_thm32(ctx: &Context<'_>, fit: &RoterFit) -> Result<ConditionReport> {
    let id = ConditionId::Thm32Consequents;
    if fit.report.id != ConditionId::Roter || !fit.report.holds || fit.coeffs.len() != 3 {
        return Ok(ConditionReport::degenerate(id, TOL_CHAINED, "ROTER does not hold"));
    }
    let pkg = ctx.pkg;
    let n = ctx.n() as f64;
    let kappa = pkg.kappa;
    let (phi, mu, eta) = (fit.coeffs[0], fit.coeffs[1], fit.coeffs[2]);
    let a1 = kappa + ((n - 2.0) * mu - 1.0) / phi;
    let a2 = (mu * kappa + (n - 1.0) * eta) / phi;
    let lr = ((n - 2.0) * (mu * mu - phi * eta) - mu) / phi;
    let l = lr + mu / phi;
    let lc = lr + (kappa / (n - 1.0) - a1) / (n - 2.0);

    let f6 = ctx.floor6();
    let f4 = ctx.floor4();
    let g = pkg.g();
    let sn = pkg.s.norm();
    let f2 = 1e-13 * sn * sn * pkg.metric.g_inv.norm();
    let (rr, rc, cr, cc) = (ctx.rr()?, ctx.rc()?, ctx.cr()?, ctx.cc()?);
    let (qgr, qgc, qsr, qsc, qsg) = (ctx.qgr()?, ctx.qgc()?, ctx.qsr()?, ctx.qsc()?, ctx.qsg()?);
    let qgs = ctx.qgs()?;
    let rmc = rc - cr;
    let cpr = cr + rc;

    let s2rel = Balance::new().plus(&pkg.s2).term(-a1, &pkg.s).term(-a2, g);
    let eqs: [(&str, Balance, f64); 12] = [
        ("S2", s2rel, f2),
        ("RC", Balance::new().plus(rc).term(-lr, qgc), f6),
        ("RR", Balance::new().plus(rr).term(-lr, qgr), f6),
        ("RS", Balance::new().plus(ctx.rs()?).term(-lr, qgs), f4),
        ("RR-QSR", Balance::new().plus(rr).minus(qsr).term(-l, qgc), f6),
        ("CC", Balance::new().plus(cc).term(-lc, qgc), f6),
        ("CR", Balance::new().plus(cr).term(-lc, qgr), f6),
        ("CS", Balance::new().plus(ctx.cs()?).term(-lc, qgs), f4),
        (
            "RC-CR(a)",
            Balance::new()
                .plus(&rmc)
                .term(-1.0 / (n - 2.0), qsr)
                .term(-(((n - 1.0) * mu - 1.0) / ((n - 2.0) * phi) + kappa / (n - 1.0)), qgr)
                .term(
                    -((mu * ((n - 1.0) * mu - 1.0) - (n - 1.0) * phi * eta) / ((n - 2.0) * phi)),
                    qsg,
                ),
            f6,
        ),
        (
            "RC-CR(b)",
            Balance::new()
                .plus(&rmc)
                .term(-((mu - 1.0 / (n - 2.0)) / phi + kappa / (n - 1.0)), qgr)
                .term(-((mu / phi) * (mu - 1.0 / (n - 2.0)) - eta), qsg),
            f6,
        ),
        (
            "CR+RC",
            Balance::new()
                .plus(&cpr)
                .minus(qsc)
                .term(-(l + lc - 1.0 / ((n - 2.0) * phi)), qgc),
            f6,
        ),
        (
            "CR-RC",
            Balance::new().minus(&rmc).minus(qsc).term(kappa / (n - 1.0), qgc),
            f6,
        ),
    ];
    let mut r = ConditionReport::new(id, TOL_CHAINED)
        .fit("alpha1", a1)
        .fit("alpha2", a2)
        .fit("L_R", lr)
        .fit("L", l)
        .fit("L_C", lc);
    for (name, b, floor) in &eqs {
        r = r.with_part(name, b.residual_floor(*floor));
    }
    r.lhs_norm = rc.norm();
    Ok(r.finish())
}

/// Checks the closed-form decomposition
/// `R = ½S∧S + (1/(n-2) - α) g∧S + (α² - κ/((n-2)(n-1))) G`
/// of a conformally flat quasi-Einstein point.
pub fn quasi_einstein_decomposition(ctx: &Context<'_>) -> Result<ConditionReport> {
    let id = ConditionId::Roter;
    let class = ctx.class();
    let alpha = match class.alpha {
        Some(a) if class.quasi_einstein => a,
        _ => return Ok(ConditionReport::degenerate(id, TOL_IDENTITY, "point is not quasi-Einstein")),
    };
    let pkg = ctx.pkg;
    let n = ctx.n() as f64;
    let mu = 1.0 / (n - 2.0) - alpha;
    let eta = alpha * alpha - pkg.kappa / ((n - 2.0) * (n - 1.0));
    let b = Balance::new()
        .plus(&pkg.r)
        .term(-0.5, ctx.ss()?)
        .term(-mu, ctx.gs()?)
        .term(-eta, &pkg.big_g);
    let mut r = ConditionReport::new(id, TOL_IDENTITY)
        .fit("phi", 1.0)
        .fit("mu", mu)
        .fit("eta", eta)
        .with_part("closed_form", b.residual_floor(1e-13 * pkg.r.norm()));
    r.lhs_norm = pkg.r.norm();
    r.note = Some(format!("alpha = {alpha:e}"));
    Ok(r.finish())
}
