use alloc::format;
use alloc::vec::Vec;

use super::{ConditionId, ConditionReport, Context, SET_TOL, TOL_CHAINED, TOL_IDENTITY};
use crate::error::{CurvError, Result};
use crate::tensor::{fit_coefficients, tachibana, Balance, Components, SymTensor2, Tensor6};

/// One-parameter fit `target = c · basis`, with the residual taken against
/// the larger of `‖target‖`, `‖c basis‖` and `floor`.
pub(crate) fn fit_one(
    id: ConditionId,
    name: &str,
    target: &dyn Components,
    basis: &dyn Components,
    basis_vanishes: bool,
    floor: f64,
    tol: f64,
) -> Result<ConditionReport> {
    let lhs = target.norm();
    if basis_vanishes {
        let mut r = ConditionReport::degenerate(id, tol, "basis tensor vanishes at this point");
        r.lhs_norm = lhs;
        return Ok(r);
    }
    let fit = fit_coefficients(target, &[basis])?;
    let c = fit.coeffs.first().copied().unwrap_or(0.0);
    let res = Balance::new().plus(target).term(-c, basis).residual_floor(floor);
    let mut r = ConditionReport::new(id, tol).fit(name, c).with_part(id.as_str(), res);
    r.lhs_norm = lhs;
    Ok(r.finish())
}

/// `R·R = L_R Q(g,R)`, `R·S = L_S Q(g,S)`, `R·C = L_1 Q(g,C)`,
/// `C·C = L_C Q(g,C)` or `R·R - Q(S,R) = L Q(g,C)`.
pub fn check_linear(ctx: &Context<'_>, id: ConditionId, tol: f64) -> Result<ConditionReport> {
    use ConditionId::*;
    let pkg = ctx.pkg;
    let gn = pkg.g().norm();
    let rn = pkg.r.norm();
    let f6 = ctx.floor6();
    match id {
        Pseudo => {
            let q = ctx.qgr()?;
            fit_one(id, "L_R", ctx.rr()?, q, q.norm() <= SET_TOL * gn * rn, f6, tol)
        }
        RicciPseudo => {
            let q = ctx.qgs()?;
            let v = q.norm() <= SET_TOL * gn * rn.max(pkg.s.norm());
            fit_one(id, "L_S", ctx.rs()?, q, v, ctx.floor4(), tol)
        }
        WeylPseudo => fit_one(id, "L_1", ctx.rc()?, ctx.qgc()?, ctx.qgc_vanishes()?, f6, tol),
        CcPseudo => fit_one(id, "L_C", ctx.cc()?, ctx.qgc()?, ctx.qgc_vanishes()?, f6, tol),
        Genpseudo01 => {
            let (rr, qsr) = (ctx.rr()?, ctx.qsr()?);
            let t = rr - qsr;
            let floor = f6.max(rr.norm()).max(qsr.norm());
            fit_one(id, "L", &t, ctx.qgc()?, ctx.qgc_vanishes()?, floor, tol)
        }
        _ => Err(CurvError::Precondition(format!("{id} is not a one-parameter condition"))),
    }
}

fn usable(r: &ConditionReport) -> Option<f64> {
    if r.degenerate || !r.holds {
        None
    } else {
        r.fitted.first().map(|(_, v)| *v)
    }
}

/// `Q(g, a S∧S + b g∧S + c g∧S²)`.
fn q_g_combo(ctx: &Context<'_>, a: f64, b: f64, c: f64) -> Result<Tensor6> {
    let x = ctx.ss()?.scale(a).axpy(b, ctx.gs()?).axpy(c, ctx.gs2()?);
    tachibana(ctx.pkg.g(), &x)
}

/// Identities relating `C·R + R·C` to Tachibana tensors.
pub fn check_identity(ctx: &Context<'_>, id: ConditionId) -> Result<ConditionReport> {
    use ConditionId::*;
    let n = ctx.n() as f64;
    let kappa = ctx.pkg.kappa;
    let mut floor = ctx.floor6();
    let m2 = 1.0 / ((n - 2.0) * (n - 2.0));
    let sym = ctx.cr()? + ctx.rc()?;
    let fit_l = |cid| {
        let r = check_linear(ctx, cid, TOL_IDENTITY)?;
        usable(&r).ok_or_else(|| {
            CurvError::MissingPrerequisite(format!("{cid} does not hold with a determined constant"))
        })
    };
    let (bal, tol, mut rep) = match id {
        Identity01 => {
            let q = q_g_combo(ctx, 0.0, -kappa / (n - 1.0), 1.0)?;
            let b = Balance::new()
                .plus(&sym)
                .minus(ctx.rr()?)
                .minus(ctx.cc()?)
                .term(m2, &q);
            // an identity in R alone, so it is measured against the size of R·R
            floor = ctx.scale6();
            (b, TOL_IDENTITY, ConditionReport::new(id, TOL_IDENTITY))
        }
        Identity02_01 => {
            let l = fit_l(Genpseudo01)?;
            let q = q_g_combo(ctx, (n - 2.0) / 2.0, -kappa, 1.0)?;
            let b = Balance::new()
                .plus(&sym)
                .minus(ctx.qsc()?)
                .term(-l, ctx.qgc()?)
                .minus(ctx.cc()?)
                .term(m2, &q);
            (b, TOL_CHAINED, ConditionReport::new(id, TOL_CHAINED).fit("L", l))
        }
        Identity05 => {
            let l = fit_l(Genpseudo01)?;
            let lc = fit_l(CcPseudo)?;
            let q = q_g_combo(ctx, (n - 2.0) / 2.0, -kappa, 1.0)?;
            let b = Balance::new()
                .plus(&sym)
                .minus(ctx.qsc()?)
                .term(-(l + lc), ctx.qgc()?)
                .term(m2, &q);
            let r = ConditionReport::new(id, TOL_CHAINED).fit("L", l).fit("L_C", lc);
            (b, TOL_CHAINED, r)
        }
        Identity05Quasi => {
            if !ctx.class().quasi_einstein {
                return Err(CurvError::MissingPrerequisite("point is not quasi-Einstein".into()));
            }
            let l = fit_l(Genpseudo01)?;
            let lc = fit_l(CcPseudo)?;
            let b = Balance::new()
                .plus(&sym)
                .minus(ctx.qsc()?)
                .term(-(l + lc), ctx.qgc()?);
            let r = ConditionReport::new(id, TOL_CHAINED).fit("L", l).fit("L_C", lc);
            (b, TOL_CHAINED, r)
        }
        GoedelId => {
            let b = Balance::new()
                .plus(&sym)
                .minus(ctx.qsc()?)
                .term(-kappa / 6.0, ctx.qgc()?);
            (b, TOL_IDENTITY, ConditionReport::new(id, TOL_IDENTITY))
        }
        _ => return Err(CurvError::Precondition(format!("{id} is not an identity check"))),
    };
    rep.lhs_norm = bal.lhs_norm();
    rep = rep.with_part(id.as_str(), bal.residual_floor(floor));
    rep.tol = tol;
    Ok(rep.finish())
}

/// The three consequences of pseudosymmetry on an Einstein manifold.
pub fn check_einstein_chain(ctx: &Context<'_>) -> Result<ConditionReport> {
    let id = ConditionId::EinsteinChain;
    if !ctx.class().einstein {
        return Ok(ConditionReport::degenerate(id, TOL_CHAINED, "point is not Einstein"));
    }
    let ps = check_linear(ctx, ConditionId::Pseudo, TOL_IDENTITY)?;
    let Some(lr) = usable(&ps) else {
        return Ok(ConditionReport::degenerate(id, TOL_CHAINED, "PSEUDO does not hold"));
    };
    let n = ctx.n() as f64;
    let kappa = ctx.pkg.kappa;
    let f6 = ctx.floor6();
    let qgc = ctx.qgc()?;
    let a = Balance::new()
        .plus(ctx.rr()?)
        .minus(ctx.qsr()?)
        .term(-(lr - kappa / n), qgc);
    let b = Balance::new()
        .plus(ctx.cc()?)
        .term(-(lr - kappa / ((n - 1.0) * n)), qgc);
    let sym = ctx.cr()? + ctx.rc()?;
    let c = Balance::new()
        .plus(&sym)
        .minus(ctx.qsc()?)
        .term(-(2.0 * lr - kappa / (n - 1.0)), qgc);
    let mut r = ConditionReport::new(id, TOL_CHAINED)
        .fit("L_R", lr)
        .with_part("RR-QSR", a.residual_floor(f6))
        .with_part("CC", b.residual_floor(f6))
        .with_part("CR+RC", c.residual_floor(f6));
    r.lhs_norm = a.lhs_norm();
    Ok(r.finish())
}

/// `(n-2)(R·C - C·R) = Q(S,R) - L_S Q(g,R)`.
pub fn check_quasi10(ctx: &Context<'_>, l_s: f64) -> Result<ConditionReport> {
    let id = ConditionId::Quasi10;
    let n = ctx.n() as f64;
    let d = ctx.rc()? - ctx.cr()?;
    let b = Balance::new()
        .term(n - 2.0, &d)
        .minus(ctx.qsr()?)
        .term(l_s, ctx.qgr()?);
    let mut r = ConditionReport::new(id, TOL_CHAINED)
        .fit("L_S", l_s)
        .with_part(id.as_str(), b.residual_floor(ctx.floor6()));
    r.lhs_norm = b.lhs_norm();
    Ok(r.finish())
}

/// Least-squares symmetric `D` with `R·S = Q(g,D)`; `D` is only determined
/// up to a multiple of `g` since `Q(g,g) = 0`.
pub fn fit_rs_qgd(ctx: &Context<'_>) -> Result<(ConditionReport, SymTensor2)> {
    let id = ConditionId::RsQgd;
    let n = ctx.n();
    let g = ctx.pkg.g();
    let mut units = Vec::new();
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i..n {
            let e = SymTensor2::from_fn(n, |a, b| {
                if (a == i && b == j) || (a == j && b == i) {
                    1.0
                } else {
                    0.0
                }
            });
            basis.push(tachibana(g, &e)?);
            units.push(e);
        }
    }
    let refs: Vec<&dyn Components> = basis.iter().map(|b| b as &dyn Components).collect();
    let target = ctx.rs()?;
    let fit = fit_coefficients(target, &refs)?;
    let mut d = SymTensor2::zeros(n);
    let mut bal = Balance::new().plus(target);
    for ((c, e), q) in fit.coeffs.iter().zip(&units).zip(&basis) {
        d = d.axpy(*c, e);
        bal = bal.term(-c, q);
    }
    let floor = ctx.floor4();
    let res = if target.norm() <= floor { 0.0 } else { bal.residual_floor(floor) };
    let mut r = ConditionReport::new(id, TOL_CHAINED).with_part(id.as_str(), res);
    r.lhs_norm = target.norm();
    r.note = Some(if res == 0.0 && target.norm() > 0.0 {
        "R·S is round-off; D = 0".into()
    } else {
        "D is determined up to a multiple of g".into()
    });
    Ok((r.finish(), d))
}

/// `C·R + R·C = Q(S,C) + L₂ Q(g,C)`, with the premises recorded as parts.
pub fn fit_cor36_l2(ctx: &Context<'_>) -> Result<ConditionReport> {
    let id = ConditionId::Cor36L2;
    let t = &(ctx.cr()? + ctx.rc()?) - ctx.qsc()?;
    let mut r = fit_one(
        id,
        "L_2",
        &t,
        ctx.qgc()?,
        ctx.qgc_vanishes()?,
        ctx.floor6(),
        TOL_CHAINED,
    )?;
    if r.degenerate {
        return Ok(r);
    }
    let gp = check_linear(ctx, ConditionId::Genpseudo01, TOL_IDENTITY)?;
    let cc = check_linear(ctx, ConditionId::CcPseudo, TOL_IDENTITY)?;
    let (dq, _) = fit_rs_qgd(ctx)?;
    let premises = gp.holds && cc.holds && dq.holds;
    r.parts.push(("GENPSEUDO01".into(), gp.residual_rel));
    r.parts.push(("CC_PSEUDO".into(), cc.residual_rel));
    r.parts.push(("RS_QGD".into(), dq.residual_rel));
    if !premises {
        r.note = Some("premises GENPSEUDO01, CC_PSEUDO, RS_QGD do not all hold".into());
    }
    Ok(r)
}
