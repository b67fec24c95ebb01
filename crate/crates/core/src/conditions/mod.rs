//! Pseudosymmetry-type curvature conditions evaluated at a point.
//!
//! Every check produces a [`ConditionReport`]. Fitted structure functions
//! come from least squares over the flattened components; identities are
//! judged by the norm of `LHS - RHS` over the largest single term.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::OnceCell;

use num_complex::Complex64;

use crate::engine::CurvaturePackage;
use crate::error::{CurvError, Result};
use crate::linalg;
use crate::tensor::{
    curv_action, kulkarni_nomizu, numerical_rank, tachibana, trace, Components, CurvTensor4,
    SymTensor2, Tensor4, Tensor6, DEFAULT_RANK_TOL,
};

mod analysis;
mod identities;
mod roter;
mod warped_thms;

pub use analysis::{analyze_point, PointAnalysis};
pub use identities::{
    check_einstein_chain, check_identity, check_linear, check_quasi10, fit_cor36_l2, fit_rs_qgd,
};
pub use roter::{check_thm32, fit_roter, quasi_einstein_decomposition, RoterFit};
pub use warped_thms::{check_thm62, check_thm71, s_base_proportional};

/// Residual tolerance for direct identities and one-parameter fits.
pub const TOL_IDENTITY: f64 = 1e-9;
/// Residual tolerance for checks chained through fitted constants.
pub const TOL_CHAINED: f64 = 1e-8;
/// Relative threshold for membership of `𝒰_S`, `𝒰_C` and for vanishing tensors.
pub const SET_TOL: f64 = 1e-9;

macro_rules! ids {
    ($($v:ident => $s:literal),* $(,)?) => {
        /// Identifier of a curvature condition or identity.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum ConditionId { $($v),* }

        impl ConditionId {
            pub const ALL: &'static [ConditionId] = &[$(ConditionId::$v),*];

            pub fn as_str(self) -> &'static str {
                match self { $(ConditionId::$v => $s),* }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s { $($s => Some(ConditionId::$v),)* _ => None }
            }
        }
    };
}

ids! {
    Pseudo => "PSEUDO",
    RicciPseudo => "RICCI_PSEUDO",
    WeylPseudo => "WEYL_PSEUDO",
    CcPseudo => "CC_PSEUDO",
    Genpseudo01 => "GENPSEUDO01",
    Identity01 => "IDENTITY01",
    Identity02_01 => "IDENTITY02_01",
    Identity05 => "IDENTITY05",
    Identity05Quasi => "IDENTITY05_QUASI",
    GoedelId => "GOEDEL_ID",
    Roter => "ROTER",
    GenRoter4Term => "GEN_ROTER_4TERM",
    GenRoter6Term => "GEN_ROTER_6TERM",
    Thm32Consequents => "THM32_CONSEQUENTS",
    Thm62RdotS => "THM62_RDOTS",
    Thm71Cc => "THM71_CC",
    Thm71Genpseudo => "THM71_GENPSEUDO",
    Thm71Identity05 => "THM71_IDENTITY05",
    Thm71WeylDecomp => "THM71_WEYL_DECOMP",
    Thm71Identity06 => "THM71_IDENTITY06",
    Thm71Cr => "THM71_CR",
    Thm71Rc => "THM71_RC",
    EinsteinChain => "EINSTEIN_CHAIN",
    Quasi10 => "QUASI10",
    RsQgd => "RS_QGD",
    Cor36L2 => "COR36_L2",
}

impl core::fmt::Display for ConditionId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict on one condition at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub id: ConditionId,
    /// Structure functions, in a fixed order per condition.
    pub fitted: Vec<(String, f64)>,
    pub residual_rel: f64,
    pub holds: bool,
    /// The condition is undefined here (vanishing basis, excluded set,
    /// unmet precondition); `holds` is then false.
    pub degenerate: bool,
    pub tol: f64,
    /// Norm of the left-hand side, kept so degenerate points can be told apart.
    pub lhs_norm: f64,
    /// Residuals of the individual equations making up the report.
    pub parts: Vec<(String, f64)>,
    pub note: Option<String>,
}

impl ConditionReport {
    pub fn new(id: ConditionId, tol: f64) -> Self {
        Self {
            id,
            fitted: Vec::new(),
            residual_rel: 0.0,
            holds: false,
            degenerate: false,
            tol,
            lhs_norm: 0.0,
            parts: Vec::new(),
            note: None,
        }
    }

    pub fn degenerate(id: ConditionId, tol: f64, note: impl Into<String>) -> Self {
        let mut r = Self::new(id, tol);
        r.degenerate = true;
        r.note = Some(note.into());
        r
    }

    pub fn fit(mut self, name: &str, v: f64) -> Self {
        self.fitted.push((name.into(), v));
        self
    }

    pub fn fitted(&self, name: &str) -> Option<f64> {
        self.fitted.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn part(&self, name: &str) -> Option<f64> {
        self.parts.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Adds a named sub-residual; the report residual is the worst part.
    pub fn with_part(mut self, name: &str, r: f64) -> Self {
        self.parts.push((name.into(), r));
        self.residual_rel = self.residual_rel.max(r);
        self
    }

    /// Sets `holds` from the residual unless degenerate.
    pub fn finish(mut self) -> Self {
        self.holds = !self.degenerate && self.residual_rel < self.tol;
        self
    }
}

/// Classification of a point by its Ricci tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct PointClass {
    pub in_us: bool,
    pub in_uc: bool,
    pub einstein: bool,
    pub ricci_flat: bool,
    pub quasi_einstein: bool,
    pub two_quasi_einstein: bool,
    /// `α` minimizing `rank(S - α g)`.
    pub alpha: Option<f64>,
    pub rank_s_minus_alpha_g: usize,
    pub rank_s: usize,
    pub ricci_simple: bool,
    /// Residual of `S² = (κ - (n-2)α) S + α((n-1)α - κ) g` for the chosen `α`.
    pub quasi_residual: Option<f64>,
    /// `‖S - (κ/n) g‖`, `‖C‖` relative to their reference scales.
    pub s_traceless_rel: f64,
    pub weyl_rel: f64,
}

/// A curvature package with lazily computed products.
pub struct Context<'a> {
    pub pkg: &'a CurvaturePackage,
    rr: OnceCell<Tensor6>,
    rc: OnceCell<Tensor6>,
    cr: OnceCell<Tensor6>,
    cc: OnceCell<Tensor6>,
    qgr: OnceCell<Tensor6>,
    qgc: OnceCell<Tensor6>,
    qsr: OnceCell<Tensor6>,
    qsc: OnceCell<Tensor6>,
    qsg: OnceCell<Tensor6>,
    rs: OnceCell<Tensor4>,
    cs: OnceCell<Tensor4>,
    qgs: OnceCell<Tensor4>,
    qgs2: OnceCell<Tensor4>,
    qss2: OnceCell<Tensor4>,
    ss: OnceCell<CurvTensor4>,
    gs: OnceCell<CurvTensor4>,
    gs2: OnceCell<CurvTensor4>,
    class: OnceCell<PointClass>,
}

macro_rules! cached {
    ($name:ident, $ty:ty, |$c:ident| $body:expr) => {
        pub fn $name(&self) -> Result<&$ty> {
            if let Some(v) = self.$name.get() {
                return Ok(v);
            }
            let $c = self;
            let v: $ty = $body;
            Ok(self.$name.get_or_init(|| v))
        }
    };
}

impl<'a> Context<'a> {
    pub fn new(pkg: &'a CurvaturePackage) -> Self {
        Self {
            pkg,
            rr: OnceCell::new(),
            rc: OnceCell::new(),
            cr: OnceCell::new(),
            cc: OnceCell::new(),
            qgr: OnceCell::new(),
            qgc: OnceCell::new(),
            qsr: OnceCell::new(),
            qsc: OnceCell::new(),
            qsg: OnceCell::new(),
            rs: OnceCell::new(),
            cs: OnceCell::new(),
            qgs: OnceCell::new(),
            qgs2: OnceCell::new(),
            qss2: OnceCell::new(),
            ss: OnceCell::new(),
            gs: OnceCell::new(),
            gs2: OnceCell::new(),
            class: OnceCell::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.pkg.n()
    }

    pub fn weyl(&self) -> Result<&CurvTensor4> {
        self.pkg.weyl()
    }

    cached!(rr, Tensor6, |c| curv_action(&c.pkg.r, &c.pkg.r, &c.pkg.metric)?);
    cached!(rc, Tensor6, |c| curv_action(&c.pkg.r, c.weyl()?, &c.pkg.metric)?);
    cached!(cr, Tensor6, |c| curv_action(c.weyl()?, &c.pkg.r, &c.pkg.metric)?);
    cached!(cc, Tensor6, |c| curv_action(c.weyl()?, c.weyl()?, &c.pkg.metric)?);
    cached!(qgr, Tensor6, |c| tachibana(c.pkg.g(), &c.pkg.r)?);
    cached!(qgc, Tensor6, |c| tachibana(c.pkg.g(), c.weyl()?)?);
    cached!(qsr, Tensor6, |c| tachibana(&c.pkg.s, &c.pkg.r)?);
    cached!(qsc, Tensor6, |c| tachibana(&c.pkg.s, c.weyl()?)?);
    cached!(qsg, Tensor6, |c| tachibana(&c.pkg.s, &c.pkg.big_g)?);
    cached!(rs, Tensor4, |c| curv_action(&c.pkg.r, &c.pkg.s, &c.pkg.metric)?);
    cached!(cs, Tensor4, |c| curv_action(c.weyl()?, &c.pkg.s, &c.pkg.metric)?);
    cached!(qgs, Tensor4, |c| tachibana(c.pkg.g(), &c.pkg.s)?);
    cached!(qgs2, Tensor4, |c| tachibana(c.pkg.g(), &c.pkg.s2)?);
    cached!(qss2, Tensor4, |c| tachibana(&c.pkg.s, &c.pkg.s2)?);
    cached!(ss, CurvTensor4, |c| kulkarni_nomizu(&c.pkg.s, &c.pkg.s)?);
    cached!(gs, CurvTensor4, |c| kulkarni_nomizu(c.pkg.g(), &c.pkg.s)?);
    cached!(gs2, CurvTensor4, |c| kulkarni_nomizu(c.pkg.g(), &c.pkg.s2)?);

    pub fn class(&self) -> &PointClass {
        self.class.get_or_init(|| classify_point(self.pkg, DEFAULT_RANK_TOL))
    }

    /// Typical size of `(0,6)` products of two curvature tensors.
    pub fn scale6(&self) -> f64 {
        let r = self.pkg.r.norm();
        let g = self.pkg.g().norm();
        let gi = self.pkg.metric.g_inv.norm();
        (gi * r * r).max(g * r)
    }

    /// Floor for residual denominators of `(0,6)` balances.
    pub fn floor6(&self) -> f64 {
        1e-13 * self.scale6()
    }

    /// Size scale of `(0,4)` products of `R` with `S`.
    pub fn floor4(&self) -> f64 {
        let r = self.pkg.r.norm();
        let s = self.pkg.s.norm().max(r);
        let g = self.pkg.g().norm();
        let gi = self.pkg.metric.g_inv.norm();
        1e-13 * (gi * r * s).max(g * s)
    }

    /// `Q(g,C)` vanishes relative to `‖g‖‖R‖`, i.e. the point is outside `𝒰_C`.
    pub fn qgc_vanishes(&self) -> Result<bool> {
        let q = self.qgc()?.norm();
        Ok(q <= SET_TOL * self.pkg.g().norm() * self.pkg.r.norm())
    }
}

fn rel(x: f64, scale: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / scale.max(f64::MIN_POSITIVE)
    }
}

/// Real eigenvalues of `g⁻¹S`. Multiple roots come out of the polynomial
/// solver split by round-off, so roots are grouped at several radii and each
/// grouping is polished against the power sums `tr(Mʲ)`.
fn ricci_eigen_candidates(pkg: &CurvaturePackage) -> Vec<f64> {
    let n = pkg.n();
    let m = pkg.metric.raise(&pkg.s);
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let roots = linalg::poly_roots(&linalg::char_poly(n, &m));
    let mut power_sums = Vec::with_capacity(n);
    let mut mk = m.clone();
    for _ in 0..n {
        power_sums.push((0..n).map(|i| mk[i * n + i]).sum::<f64>());
        mk = linalg::matmul(n, &mk, &m);
    }
    let mut out: Vec<f64> = Vec::new();
    for radius in [0.0, 1e-6, 1e-4, 1e-2] {
        let mut used = alloc::vec![false; roots.len()];
        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let mut sum = roots[i];
            let mut k = 1;
            used[i] = true;
            for j in (i + 1)..roots.len() {
                if !used[j] && libm::sqrt((roots[j] - roots[i]).norm_sqr()) <= radius * scale {
                    used[j] = true;
                    sum += roots[j];
                    k += 1;
                }
            }
            clusters.push((sum / k as f64, k));
        }
        let im_tol = radius.max(1e-6) * scale;
        for (z, _) in polish_clusters(clusters, &power_sums, scale, im_tol) {
            if z.im.abs() <= 1e-6 * scale && !out.contains(&z.re) {
                out.push(z.re);
            }
        }
    }
    out
}

/// Newton on `Σ kᵢ zᵢʲ = tr(Mʲ)` for the real clusters, complex ones held fixed.
fn polish_clusters(
    mut clusters: Vec<(Complex64, usize)>,
    p: &[f64],
    scale: f64,
    im_tol: f64,
) -> Vec<(Complex64, usize)> {
    let real: Vec<usize> = (0..clusters.len())
        .filter(|&i| clusters[i].0.im.abs() <= im_tol)
        .collect();
    let m = real.len();
    if m == 0 || m > p.len() {
        return clusters;
    }
    let start = clusters.clone();
    let mut x: Vec<f64> = real.iter().map(|&i| clusters[i].0.re).collect();
    for _ in 0..30 {
        let mut f = alloc::vec![0.0; m];
        let mut jac = alloc::vec![0.0; m * m];
        for j in 0..m {
            let e = j as i32 + 1;
            let mut v = -p[j];
            for (c, &(z, k)) in clusters.iter().enumerate() {
                if !real.contains(&c) {
                    v += k as f64 * z.powi(e).re;
                }
            }
            for (c, &i) in real.iter().enumerate() {
                let k = clusters[i].1 as f64;
                v += k * libm::pow(x[c], e as f64);
                jac[j * m + c] = e as f64 * k * libm::pow(x[c], (e - 1) as f64);
            }
            f[j] = v;
        }
        let Some((inv, _)) = linalg::invert(m, &jac) else {
            return start;
        };
        let mut step_max = 0.0f64;
        for c in 0..m {
            let dx: f64 = (0..m).map(|q| inv[c * m + q] * f[q]).sum();
            x[c] -= dx;
            step_max = step_max.max(dx.abs());
        }
        if !x.iter().all(|v| v.is_finite()) {
            return start;
        }
        if step_max <= 1e-15 * scale {
            break;
        }
    }
    for (c, &i) in real.iter().enumerate() {
        if (x[c] - start[i].0.re).abs() > 1e-2 * scale {
            return start;
        }
        clusters[i].0 = Complex64::new(x[c], 0.0);
    }
    clusters
}

/// Flags of the point and the `α` achieving the smallest `rank(S - α g)`.
pub fn classify_point(pkg: &CurvaturePackage, tol: f64) -> PointClass {
    let n = pkg.n();
    let nf = n as f64;
    let g = pkg.g();
    let s = &pkg.s;
    let kappa = pkg.kappa;
    let rn = pkg.r.norm();
    let sref = s.norm().max(rn);
    let dev = s.axpy(-kappa / nf, g);
    let s_traceless_rel = rel(dev.norm(), sref);
    let in_us = s_traceless_rel > SET_TOL;
    let weyl_rel = pkg.c.as_ref().map_or(0.0, |c| rel(c.norm(), rn));
    let in_uc = weyl_rel > SET_TOL;
    let ricci_flat = rel(s.norm(), rn.max(s.norm())) <= SET_TOL;
    let rank_s = if ricci_flat { 0 } else { numerical_rank(s, tol) };

    let mut best: Option<(usize, f64)> = None;
    if in_us {
        for alpha in ricci_eigen_candidates(pkg) {
            let a = s.axpy(-alpha, g);
            let rk = if rel(a.norm(), sref) <= SET_TOL {
                0
            } else {
                numerical_rank(&a, tol)
            };
            best = match best {
                Some((r0, a0)) if r0 < rk || (r0 == rk && a0 >= alpha) => Some((r0, a0)),
                _ => Some((rk, alpha)),
            };
        }
    }
    let (rank_sa, alpha) = match best {
        Some((r, a)) => (r, Some(a)),
        None => (if in_us { n } else { 0 }, if in_us { None } else { Some(kappa / nf) }),
    };
    let quasi_einstein = in_us && rank_sa == 1;
    let two_quasi_einstein = in_us && rank_sa <= 2;
    let quasi_residual = alpha.filter(|_| in_us).and_then(|a| {
        let lhs = &pkg.s2;
        let rhs = s
            .scale(kappa - (nf - 2.0) * a)
            .axpy(a * ((nf - 1.0) * a - kappa), g);
        let d = lhs - &rhs;
        let sc = lhs.norm().max(rhs.norm()).max(s.norm() * s.norm());
        Some(rel(d.norm(), sc))
    });
    PointClass {
        in_us,
        in_uc,
        einstein: !in_us,
        ricci_flat,
        quasi_einstein,
        two_quasi_einstein,
        alpha,
        rank_s_minus_alpha_g: rank_sa,
        rank_s,
        ricci_simple: in_us && rank_s == 1,
        quasi_residual,
        s_traceless_rel,
        weyl_rel,
    }
}

/// Runs every condition that needs only the curvature package.
pub fn run_generic(ctx: &Context<'_>, ids: &[ConditionId]) -> Vec<ConditionReport> {
    use ConditionId::*;
    let mut out = Vec::new();
    for &id in ids {
        let rep = match id {
            Pseudo | RicciPseudo | WeylPseudo | CcPseudo | Genpseudo01 => {
                check_linear(ctx, id, TOL_IDENTITY)
            }
            Identity01 | Identity02_01 | Identity05 | Identity05Quasi | GoedelId => {
                check_identity(ctx, id)
            }
            Roter | GenRoter4Term | GenRoter6Term => fit_roter(ctx, id).map(|f| f.report),
            Thm32Consequents => fit_roter(ctx, Roter).and_then(|f| check_thm32(ctx, &f)),
            EinsteinChain => check_einstein_chain(ctx),
            RsQgd => fit_rs_qgd(ctx).map(|(r, _)| r),
            Cor36L2 => fit_cor36_l2(ctx),
            Quasi10 => {
                check_linear(ctx, RicciPseudo, TOL_IDENTITY).and_then(|ls| match ls.fitted("L_S") {
                    Some(l) if !ls.degenerate => check_quasi10(ctx, l),
                    _ => Ok(ConditionReport::degenerate(
                        Quasi10,
                        TOL_CHAINED,
                        "L_S is undetermined",
                    )),
                })
            }
            _ => continue,
        };
        out.push(rep.unwrap_or_else(|e| error_report(id, &e)));
    }
    out
}

pub(crate) fn error_report(id: ConditionId, e: &CurvError) -> ConditionReport {
    ConditionReport::degenerate(id, TOL_IDENTITY, format!("{e}"))
}

pub(crate) fn trace_of(pkg: &CurvaturePackage, a: &SymTensor2) -> f64 {
    trace(a, &pkg.metric)
}
