use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::identities::check_linear;
use super::{ConditionId, ConditionReport, Context, TOL_CHAINED, TOL_IDENTITY};
use crate::engine::CurvaturePackage;
use crate::error::{CurvError, Result};
use crate::metric::MetricAtPoint;
use crate::tensor::{kulkarni_nomizu, tachibana, Balance, Components, SymTensor2};
use crate::warped::{traceless_ratio, WarpedAux, PROPORTIONAL_TOL};

/// Traceless ratio of the base block `S_ab` against `ḡ_ab` and whether
/// it counts as proportional.
pub fn s_base_proportional(pkg: &CurvaturePackage, p: usize) -> Result<(f64, bool)> {
    let g = pkg.g();
    let gb = SymTensor2::from_fn(p, |a, b| g.at(a, b));
    let sb = SymTensor2::from_fn(p, |a, b| pkg.s.at(a, b));
    let mb = MetricAtPoint::new(gb, &pkg.metric.signature[..p])?;
    let ratio = traceless_ratio(&sb, &mb);
    Ok((ratio, ratio <= PROPORTIONAL_TOL))
}

/// Adds `coef · τ₂ · w`; without `τ₂` the equation is undefined and the
/// second value is false.
fn tau2_term(
    bal: Balance,
    coef: f64,
    w: &dyn Components,
    tau2: Option<f64>,
    notes: &mut Vec<String>,
) -> (Balance, bool) {
    match tau2 {
        Some(t2) => (bal.term(coef * t2, w), true),
        None => {
            notes.push(format!(
                "tau2 undefined (rank A < 2); its tensor factor has norm {:e}",
                w.norm()
            ));
            (bal, false)
        }
    }
}

fn join(notes: Vec<String>) -> Option<String> {
    if notes.is_empty() {
        None
    } else {
        Some(notes.join("; "))
    }
}

fn require_base(aux: &WarpedAux) -> Result<f64> {
    if aux.p != 2 {
        return Err(CurvError::Precondition(format!("requires p = 2, got p = {}", aux.p)));
    }
    if aux.n < 4 {
        return Err(CurvError::Precondition(format!("requires n >= 4, got n = {}", aux.n)));
    }
    aux.tau1
        .ok_or_else(|| CurvError::Precondition("fibre is not Einstein, tau1 undefined".into()))
}

/// `R·S` and `C·S` as combinations of `Q(g,S)`, `Q(g,S²)`, `Q(S,S²)`
/// with the coefficients built from `τ₁`, `τ₂`, `κ̄`.
pub fn check_thm62(ctx: &Context<'_>, aux: &WarpedAux) -> Result<ConditionReport> {
    let id = ConditionId::Thm62RdotS;
    let tau1 = require_base(aux)?;
    let pkg = ctx.pkg;
    let class = ctx.class();
    if !class.in_us || !class.in_uc {
        return Ok(ConditionReport::degenerate(id, TOL_CHAINED, "point is outside U_S ∩ U_C"));
    }
    let (ratio, prop) = s_base_proportional(pkg, aux.p)?;
    if prop {
        let mut r = check_linear(ctx, ConditionId::RicciPseudo, TOL_CHAINED)?;
        r.id = id;
        r.note = Some(format!("S_ab proportional to the base metric (ratio {ratio:e}); RICCI_PSEUDO verdict"));
        return Ok(r);
    }
    let nf = aux.n as f64;
    let kappa = pkg.kappa;
    let kb = aux.kappa_bar;
    let phi1 = (2.0 * tau1 - kb) / (2.0 * (nf - 2.0));
    let phi2 = 1.0 / (nf - 2.0);
    let phi3_over_tau2 = (2.0 * kappa - (nf - 1.0) * kb - 2.0 * (nf - 1.0) * tau1) / (nf - 2.0);

    let (qgs, qgs2, qss2) = (ctx.qgs()?, ctx.qgs2()?, ctx.qss2()?);
    // φ₃ multiplies τ₁² Q(g,S) - τ₁ Q(g,S²) + Q(S,S²)
    let w = Balance::new()
        .term(tau1 * tau1, qgs)
        .term(-tau1, qgs2)
        .plus(qss2);
    let w = crate::tensor::Tensor4::from_data(aux.n, w.sum().to_vec())?;
    let f4 = ctx.floor4();
    let mut notes = Vec::new();

    let rs = Balance::new()
        .plus(ctx.rs()?)
        .term(-(phi1 - 2.0 * tau1 * phi2), qgs)
        .term(-phi2, qgs2);
    let (rs, ok1) = tau2_term(rs, -phi3_over_tau2, &w, aux.tau2, &mut notes);
    let cs = Balance::new()
        .plus(ctx.cs()?)
        .term(-(phi1 - 2.0 * tau1 * phi2 + kappa / ((nf - 2.0) * (nf - 1.0))), qgs)
        .term(-(phi2 - 1.0 / (nf - 2.0)), qgs2);
    let (cs, ok2) = tau2_term(cs, -phi3_over_tau2, &w, aux.tau2, &mut notes);
    notes.dedup();

    let mut r = ConditionReport::new(id, TOL_CHAINED).fit("phi1", phi1).fit("phi2", phi2);
    if let Some(t2) = aux.tau2 {
        let phi3 = t2 * phi3_over_tau2;
        let psi5 = phi1 - 2.0 * tau1 * phi2 + tau1 * tau1 * phi3;
        let psi4 = phi2 - tau1 * phi3;
        r = r
            .fit("phi3", phi3)
            .fit("psi1", psi5 + kappa / ((nf - 2.0) * (nf - 1.0)))
            .fit("psi2", psi4 - 1.0 / (nf - 2.0))
            .fit("psi3", phi3)
            .fit("psi4", psi4)
            .fit("psi5", psi5);
    }
    r = r
        .with_part("RdotS", rs.residual_floor(f4))
        .with_part("CdotS", cs.residual_floor(f4));
    r.lhs_norm = ctx.rs()?.norm();
    r.degenerate = !(ok1 && ok2);
    r.note = join(notes);
    Ok(r.finish())
}

/// Reports for the warped-product Weyl-tensor conditions: the three
/// unconditional ones first, then the four that need `S_ab ≁ ḡ_ab`.
pub fn check_thm71(ctx: &Context<'_>, aux: &WarpedAux) -> Result<Vec<ConditionReport>> {
    use ConditionId::*;
    let tau1 = require_base(aux)?;
    let rho = aux.rho.ok_or_else(|| {
        CurvError::Precondition("fibre is not of constant curvature, rho undefined".into())
    })?;
    let part_i = [Thm71Cc, Thm71Genpseudo, Thm71Identity05];
    let part_ii = [Thm71WeylDecomp, Thm71Identity06, Thm71Cr, Thm71Rc];
    if ctx.qgc_vanishes()? {
        let note = "Q(g,C) vanishes, the point is conformally flat";
        let mut out = Vec::new();
        for id in part_i.iter().chain(&part_ii) {
            let mut r = ConditionReport::degenerate(*id, TOL_CHAINED, note);
            r.lhs_norm = ctx.weyl()?.norm();
            out.push(r);
        }
        return Ok(out);
    }
    let pkg = ctx.pkg;
    let nf = aux.n as f64;
    let kappa = pkg.kappa;
    let f = aux.f;
    let lc = -rho / (2.0 * (nf - 2.0));
    let l = -(nf - 2.0) / ((nf - 1.0) * rho)
        * (aux.kappa_bar * (tau1 + aux.tr_t / (2.0 * f))
            + (nf - 3.0) / (4.0 * f * f) * (aux.tr_t2 - aux.tr_t * aux.tr_t));
    let f6 = ctx.floor6();
    let m2 = 1.0 / ((nf - 2.0) * (nf - 2.0));
    let (rr, rc, cr, cc) = (ctx.rr()?, ctx.rc()?, ctx.cr()?, ctx.cc()?);
    let (qgc, qsc, qsr, qsg) = (ctx.qgc()?, ctx.qsc()?, ctx.qsr()?, ctx.qsg()?);
    let sym = cr + rc;
    let mut out = Vec::new();

    let fin = |id, tol, b: Balance, fits: &[(&str, f64)]| {
        let mut r = ConditionReport::new(id, tol);
        for (k, v) in fits {
            r = r.fit(k, *v);
        }
        r.lhs_norm = b.lhs_norm();
        r.with_part(id.as_str(), b.residual_floor(f6)).finish()
    };

    out.push(fin(
        Thm71Cc,
        TOL_IDENTITY,
        Balance::new().plus(cc).term(-lc, qgc),
        &[("L_C", lc), ("rho", rho)],
    ));
    out.push(fin(
        Thm71Genpseudo,
        TOL_CHAINED,
        Balance::new().plus(rr).minus(qsr).term(-l, qgc),
        &[("L", l)],
    ));
    let q05 = {
        let x = ctx
            .ss()?
            .scale((nf - 2.0) / 2.0)
            .axpy(-kappa, ctx.gs()?)
            .axpy(1.0, ctx.gs2()?);
        tachibana(pkg.g(), &x)?
    };
    out.push(fin(
        Thm71Identity05,
        TOL_CHAINED,
        Balance::new()
            .plus(&sym)
            .minus(qsc)
            .term(-(l + lc), qgc)
            .term(m2, &q05),
        &[("L", l), ("L_C", lc)],
    ));

    let (ratio, prop) = s_base_proportional(pkg, aux.p)?;
    if prop || !ctx.class().in_us {
        let note = format!("point is outside V (S_ab traceless ratio {ratio:e})");
        for id in part_ii {
            out.push(ConditionReport::degenerate(id, TOL_CHAINED, note.clone()));
        }
        return Ok(out);
    }
    let disc = aux.a_discriminant.unwrap_or(0.0);
    let tau2 = aux.tau2;

    // Weyl decomposition: C + k B = 0
    let weyl = ctx.weyl()?;
    let tr_s2 = super::trace_of(pkg, &pkg.s2);
    let big_b = ctx
        .ss()?
        .scale((nf - 2.0) / 2.0)
        .axpy(-kappa, ctx.gs()?)
        .axpy(1.0, ctx.gs2()?)
        .axpy(-(tr_s2 - kappa * kappa) / (nf - 1.0), &pkg.big_g);
    let mut fits = alloc::vec![("rho", rho), ("tau1", tau1)];
    if let Some(t2) = tau2 {
        fits.push(("tau2", t2));
        let k = (nf - 1.0) * rho * t2 / ((nf - 3.0) * (nf - 2.0));
        let b = Balance::new().plus(weyl).term(k, &big_b);
        let mut r = ConditionReport::new(Thm71WeylDecomp, TOL_CHAINED);
        for (n, v) in &fits {
            r = r.fit(n, *v);
        }
        r.lhs_norm = weyl.norm();
        out.push(r.with_part("WeylDecomp", b.residual_floor(1e-13 * pkg.r.norm())).finish());
    } else {
        let mut r = ConditionReport::degenerate(
            Thm71WeylDecomp,
            TOL_CHAINED,
            format!("tau2 undefined: tr(A^2) - (tr A)^2 = {disc:e}, rank(A) < 2"),
        );
        r.lhs_norm = weyl.norm();
        out.push(r);
    }

    let c06 = l - rho / (2.0 * (nf - 2.0)) + (nf - 3.0) * disc / ((nf - 2.0) * (nf - 1.0) * rho);
    out.push(fin(
        Thm71Identity06,
        TOL_CHAINED,
        Balance::new().plus(&sym).minus(qsc).term(-c06, qgc),
        &[("L", l), ("coef", c06)],
    ));

    // τ₂ multiplies τ₁² Q(S,G) - τ₁ Q(S²,G) - g∧Q(S,S²)
    let qs2g = tachibana(&pkg.s2, &pkg.big_g)?;
    let gq = kulkarni_nomizu(pkg.g(), ctx.qss2()?)?;
    let w = {
        let b = Balance::new().term(tau1 * tau1, qsg).term(-tau1, &qs2g).minus(&gq);
        crate::tensor::Tensor6::from_data(aux.n, b.sum().to_vec())?
    };
    let wc = (nf - 1.0) * rho * m2;

    let mut notes = Vec::new();
    let cr_bal = Balance::new()
        .plus(cr)
        .term(-m2 * rho / 2.0, qsg)
        .term(rho / (2.0 * (nf - 2.0)), qgc);
    let (cr_bal, ok) = tau2_term(cr_bal, -wc, &w, tau2, &mut notes);
    let mut r = fin(Thm71Cr, TOL_CHAINED, cr_bal, &[("rho", rho), ("tau1", tau1)]);
    r.degenerate = !ok;
    r.note = join(notes);
    out.push(r.finish());

    let c07 = l + (nf - 3.0) * disc / ((nf - 2.0) * (nf - 1.0) * rho);
    let mut notes = Vec::new();
    let rc_bal = Balance::new()
        .plus(rc)
        .minus(qsc)
        .term(-c07, qgc)
        .term(m2 * rho / 2.0, qsg);
    let (rc_bal, ok) = tau2_term(rc_bal, wc, &w, tau2, &mut notes);
    let mut r = fin(Thm71Rc, TOL_CHAINED, rc_bal, &[("L", l), ("coef", c07)]);
    r.degenerate = !ok;
    r.note = join(notes);
    out.push(r.finish());
    Ok(out)
}
