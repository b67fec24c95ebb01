//! Warped products `M̄ ×_F Ñ` and their closed-form curvature.
//!
//! Chart coordinates are `(x^1..x^p, x^{p+1}..x^n)`: base first, fibre second.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{christoffel, riemann, CurvaturePackage};
use crate::error::{CurvError, Result};
use crate::jet::Jet;
use crate::metric::{MetricAtPoint, MetricSpec};
use crate::tensor::{
    curv_action, fit_coefficients, kulkarni_nomizu, power, tachibana, trace, Balance, Components,
    CurvTensor4, FitResult, SymTensor2, Tensor4,
};

pub type ScalarFn = dyn Fn(&[Jet]) -> Jet + Send + Sync;

/// Threshold for "proportional to the metric" tests on the traceless part.
pub const PROPORTIONAL_TOL: f64 = 1e-9;
/// Tolerance for the numerical fibre Einstein / constant-curvature checks.
pub const FIBRE_TOL: f64 = 1e-9;
/// Relative threshold below which `tr(A²) - (tr A)²` counts as zero.
pub const TAU2_TOL: f64 = 1e-10;

/// `ḡ ×_F g̃`, with `F` a positive function of the base coordinates.
#[derive(Clone)]
pub struct WarpedSpec {
    name: String,
    base: Arc<dyn MetricSpec>,
    fibre: Arc<dyn MetricSpec>,
    warp: Arc<ScalarFn>,
    signature: Vec<i8>,
    profile: Option<(Arc<ScalarFn>, usize)>,
}

impl core::fmt::Debug for WarpedSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("WarpedSpec")
            .field("name", &self.name)
            .field("base", &self.base.name())
            .field("fibre", &self.fibre.name())
            .finish_non_exhaustive()
    }
}

impl WarpedSpec {
    pub fn new(
        name: impl Into<String>,
        base: Arc<dyn MetricSpec>,
        fibre: Arc<dyn MetricSpec>,
        warp: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    ) -> Result<Self> {
        let (p, q) = (base.dim(), fibre.dim());
        if p == 0 || q == 0 || p + q > crate::jet::MAX_DIM {
            return Err(CurvError::UnsupportedDimension(p + q));
        }
        let mut signature = base.signature().to_vec();
        signature.extend_from_slice(fibre.signature());
        Ok(Self {
            name: name.into(),
            base,
            fibre,
            warp: Arc::new(warp),
            signature,
            profile: None,
        })
    }

    /// Attaches a radial profile `f(x̄)` with `r = x̄[r_index]`, enabling
    /// `τ₃ = (r²/2) f_rr - r f_r + f - 1` in [`aux_tensors`].
    pub fn with_profile(
        mut self,
        f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
        r_index: usize,
    ) -> Self {
        self.profile = Some((Arc::new(f), r_index));
        self
    }

    pub fn base(&self) -> &dyn MetricSpec {
        &*self.base
    }

    pub fn fibre(&self) -> &dyn MetricSpec {
        &*self.fibre
    }

    /// Base dimension `p`.
    pub fn p(&self) -> usize {
        self.base.dim()
    }

    pub fn warp_at(&self, xb: &[Jet]) -> Jet {
        (self.warp)(xb)
    }

    fn split<'a>(&self, x: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        let n = self.dim();
        if x.len() != n {
            return Err(CurvError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        Ok(x.split_at(self.p()))
    }

    /// Rejects points where `F <= 0` or either factor is outside its domain.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        let (xb, xf) = self.split(x)?;
        let cb: Vec<Jet> = xb.iter().map(|&v| Jet::constant(v)).collect();
        let f = self.warp_at(&cb).value;
        if !(f > 0.0) {
            return Err(CurvError::NonPositiveWarp(f));
        }
        if !self.base.in_domain(xb) || !self.fibre.in_domain(xf) {
            return Err(CurvError::OutsideDomain(self.name.clone()));
        }
        Ok(())
    }
}

impl MetricSpec for WarpedSpec {
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
        let p = self.p();
        let q = n - p;
        let gb = self.base.components(&x[..p]);
        let gf = self.fibre.components(&x[p..]);
        let f = self.warp_at(&x[..p]);
        let mut out = vec![Jet::constant(0.0); n * n];
        for a in 0..p {
            for b in 0..p {
                out[a * n + b] = gb[a * p + b];
            }
        }
        for al in 0..q {
            for be in 0..q {
                out[(p + al) * n + p + be] = f * gf[al * q + be];
            }
        }
        out
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.check_point(x).is_ok()
    }
}

/// Builds the product metric as a [`MetricSpec`].
pub fn assemble(spec: &WarpedSpec) -> Arc<dyn MetricSpec> {
    Arc::new(spec.clone())
}

/// Everything the closed forms need at one product point.
#[derive(Clone, Debug)]
pub struct WarpedPoint {
    pub p: usize,
    pub n: usize,
    pub base: CurvaturePackage,
    pub fibre: CurvaturePackage,
    /// Base Christoffels `Γ̄^a_bc`, row-major.
    pub base_gamma: Vec<f64>,
    pub fibre_gamma: Vec<f64>,
    pub f: f64,
    /// `F_a`.
    pub df: Vec<f64>,
    pub t: SymTensor2,
    pub tr_t: f64,
    /// `tr(T²)` taken with `ḡ`.
    pub tr_t2: f64,
    pub delta1_f: f64,
    pub metric: MetricAtPoint,
}

impl WarpedPoint {
    pub fn evaluate(spec: &WarpedSpec, x: &[f64]) -> Result<Self> {
        spec.check_point(x)?;
        let (xb, xf) = spec.split(x)?;
        let p = xb.len();
        let n = x.len();
        let chb = christoffel(spec.base(), xb)?;
        let chf = christoffel(spec.fibre(), xf)?;
        let rb = riemann(&chb)?;
        let rf = riemann(&chf)?;
        let base_gamma = chb.gamma.clone();
        let fibre_gamma = chf.gamma.clone();
        let base =
            CurvaturePackage::from_riemann(xb.to_vec(), chb.metric, chb.gamma, rb)?;
        let fibre =
            CurvaturePackage::from_riemann(xf.to_vec(), chf.metric, chf.gamma, rf)?;

        let fj = spec.warp_at(&Jet::seed(xb));
        let f = fj.value;
        let df: Vec<f64> = (0..p).map(|a| fj.d(a)).collect();
        let t = SymTensor2::from_fn(p, |a, b| {
            let conn: f64 = (0..p)
                .map(|c| base_gamma[(c * p + a) * p + b] * df[c])
                .sum();
            fj.dd(a, b) - conn - df[a] * df[b] / (2.0 * f)
        });
        let tr_t = trace(&t, &base.metric);
        let tr_t2 = trace(&power(&t, &base.metric, 2)?, &base.metric);
        let gbi = &base.metric.g_inv;
        let mut delta1_f = 0.0;
        for a in 0..p {
            for b in 0..p {
                delta1_f += gbi.at(a, b) * df[a] * df[b];
            }
        }
        let g = SymTensor2::from_fn(n, |i, j| match (i < p, j < p) {
            (true, true) => base.g().at(i, j),
            (false, false) => f * fibre.g().at(i - p, j - p),
            _ => 0.0,
        });
        let metric = MetricAtPoint::new(g, spec.signature())?;
        Ok(Self {
            p,
            n,
            base,
            fibre,
            base_gamma,
            fibre_gamma,
            f,
            df,
            t,
            tr_t,
            tr_t2,
            delta1_f,
            metric,
        })
    }

    /// `T` padded with zeros to the product dimension.
    pub fn t_embedded(&self) -> SymTensor2 {
        embed2(&self.t, self.n, 0)
    }

    /// Christoffels of the product, from the base/fibre ones and `F`.
    pub fn gamma(&self) -> Vec<f64> {
        let (n, p) = (self.n, self.p);
        let q = n - p;
        let gbi = &self.base.metric.g_inv;
        let gf = self.fibre.g();
        let mut out = vec![0.0; n * n * n];
        let ix = |h: usize, i: usize, j: usize| (h * n + i) * n + j;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    out[ix(a, b, c)] = self.base_gamma[(a * p + b) * p + c];
                }
            }
        }
        for al in 0..q {
            for be in 0..q {
                for ga in 0..q {
                    out[ix(p + al, p + be, p + ga)] = self.fibre_gamma[(al * q + be) * q + ga];
                }
            }
        }
        for a in 0..p {
            let up: f64 = (0..p).map(|b| gbi.at(a, b) * self.df[b]).sum();
            for al in 0..q {
                for be in 0..q {
                    out[ix(a, p + al, p + be)] = -0.5 * up * gf.at(al, be);
                }
            }
        }
        for a in 0..p {
            let v = self.df[a] / (2.0 * self.f);
            for al in 0..q {
                out[ix(p + al, a, p + al)] = v;
                out[ix(p + al, p + al, a)] = v;
            }
        }
        out
    }
}

fn embed2(a: &SymTensor2, n: usize, offset: usize) -> SymTensor2 {
    let m = a.n();
    SymTensor2::from_fn(n, |i, j| {
        if (offset..offset + m).contains(&i) && (offset..offset + m).contains(&j) {
            a.at(i - offset, j - offset)
        } else {
            0.0
        }
    })
}

fn embed4(b: &CurvTensor4, n: usize, offset: usize) -> CurvTensor4 {
    let m = b.n();
    let mut t = Tensor4::zeros(n);
    for h in 0..m {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    t.set(
                        [h + offset, i + offset, j + offset, k + offset],
                        b.get([h, i, j, k]),
                    );
                }
            }
        }
    }
    CurvTensor4::project(&t).0
}

/// Curvature package of the product from the block formulas
/// `R_abcd = R̄_abcd`, `R_αabδ = -½ T_ab g̃_αδ`,
/// `R_αβγδ = F R̃_αβγδ - ¼ Δ₁F G̃_αβγδ`, with `S` and `κ` in closed form.
pub fn closed_form_curvature(spec: &WarpedSpec, x: &[f64]) -> Result<CurvaturePackage> {
    let wp = WarpedPoint::evaluate(spec, x)?;
    closed_form_from_point(&wp, x)
}

pub fn closed_form_from_point(wp: &WarpedPoint, x: &[f64]) -> Result<CurvaturePackage> {
    let (n, p) = (wp.n, wp.p);
    let q = (n - p) as f64;
    let f = wp.f;
    let gf = embed2(wp.fibre.g(), n, p);
    let r = embed4(&wp.base.r, n, 0)
        .axpy(f, &embed4(&wp.fibre.r, n, p))
        .axpy(-0.25 * wp.delta1_f, &embed4(&wp.fibre.big_g, n, p))
        .axpy(-0.5, &kulkarni_nomizu(&wp.t_embedded(), &gf)?);
    let fib = wp.tr_t + (q - 1.0) * wp.delta1_f / (2.0 * f);
    let s = embed2(&wp.base.s, n, 0)
        .axpy(-q / (2.0 * f), &wp.t_embedded())
        .axpy(1.0, &embed2(&wp.fibre.s, n, p))
        .axpy(-0.5 * fib, &gf);
    let kappa = wp.base.kappa + wp.fibre.kappa / f
        - q / f * (wp.tr_t + (q - 1.0) * wp.delta1_f / (4.0 * f));
    CurvaturePackage::from_parts(x.to_vec(), wp.metric.clone(), wp.gamma(), r, s, kappa)
}

/// Why an auxiliary quantity was left undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub field: &'static str,
    pub reason: String,
}

/// Auxiliary tensors and scalars of a warped product at a point.
#[derive(Clone, Debug)]
pub struct WarpedAux {
    pub n: usize,
    pub p: usize,
    pub f: f64,
    pub t: SymTensor2,
    pub tr_t: f64,
    pub tr_t2: f64,
    pub delta1_f: f64,
    pub kappa_bar: f64,
    pub kappa_tilde: f64,
    /// Relative defect of `S̃ = (κ̃/(n-p)) g̃`.
    pub fibre_einstein_defect: f64,
    /// Relative defect of `R̃ = κ̃ G̃ / ((n-p)(n-p-1))`.
    pub fibre_const_curv_defect: f64,
    pub fibre_einstein: bool,
    pub fibre_const_curv: bool,
    pub h: Option<SymTensor2>,
    pub tau1: Option<f64>,
    /// `A = S - τ₁ g` on the product.
    pub a: Option<SymTensor2>,
    /// Largest `|A_αβ|`, `|A_aα|` relative to `max|A|`.
    pub a_block_defect: Option<f64>,
    /// `tr(A²) - (tr A)²`.
    pub a_discriminant: Option<f64>,
    pub tau2: Option<f64>,
    pub tau3: Option<f64>,
    pub rho0: Option<f64>,
    pub rho: Option<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

impl WarpedAux {
    pub fn diagnostic(&self, field: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.field == field)
    }
}

fn rel_gap(a: &dyn Components, b: &dyn Components) -> f64 {
    let gap = a
        .data()
        .iter()
        .zip(b.data())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if gap == 0.0 {
        0.0
    } else {
        gap / a.max_abs().max(b.max_abs())
    }
}

/// Norm of the traceless part of `a` relative to the norm of `a`.
pub fn traceless_ratio(a: &SymTensor2, g: &MetricAtPoint) -> f64 {
    let k = trace(a, g) / g.n() as f64;
    let dev = a.axpy(-k, &g.g);
    let base = a.norm();
    if dev.norm() == 0.0 {
        0.0
    } else {
        dev.norm() / base
    }
}

pub fn aux_tensors(spec: &WarpedSpec, x: &[f64], candidate_lr: Option<f64>) -> Result<WarpedAux> {
    let wp = WarpedPoint::evaluate(spec, x)?;
    let pkg = closed_form_from_point(&wp, x)?;
    let mut aux = aux_from_point(&wp, &pkg, candidate_lr);
    if let Some((prof, ri)) = &spec.profile {
        let xb = &x[..wp.p];
        let fj = prof(&Jet::seed(xb));
        let r = xb[*ri];
        aux.tau3 = Some(0.5 * r * r * fj.dd(*ri, *ri) - r * fj.d(*ri) + fj.value - 1.0);
    } else {
        aux.diagnostics.push(Diagnostic {
            field: "tau3",
            reason: "no radial profile attached to the warped spec".into(),
        });
    }
    Ok(aux)
}

/// Auxiliary quantities from an evaluated point and its closed-form package.
pub fn aux_from_point(wp: &WarpedPoint, pkg: &CurvaturePackage, candidate_lr: Option<f64>) -> WarpedAux {
    let (n, p) = (wp.n, wp.p);
    let q = n - p;
    let (nf, qf) = (n as f64, q as f64);
    let f = wp.f;
    let kb = wp.base.kappa;
    let kt = wp.fibre.kappa;
    let mut diags = Vec::new();

    let ein_target = wp.fibre.g().scale(kt / qf);
    let fibre_einstein_defect = if q == 1 {
        0.0
    } else {
        rel_gap(&wp.fibre.s, &ein_target)
    };
    let fibre_const_curv_defect = if q <= 2 {
        0.0
    } else {
        let cc = wp.fibre.big_g.scale(kt / (qf * (qf - 1.0)));
        rel_gap(&wp.fibre.r, &cc)
    };
    let fibre_einstein = fibre_einstein_defect < FIBRE_TOL;
    let fibre_const_curv = fibre_const_curv_defect < FIBRE_TOL;

    let h = candidate_lr.map(|lr| wp.t.scale(0.5).axpy(f * lr, wp.base.g()));

    let mut tau1 = None;
    if p != 2 {
        diags.push(Diagnostic {
            field: "tau1",
            reason: format!("requires a two-dimensional base, got p = {p}"),
        });
    } else if !fibre_einstein {
        diags.push(Diagnostic {
            field: "tau1",
            reason: format!("fibre is not Einstein (defect {fibre_einstein_defect:e})"),
        });
    } else {
        tau1 = Some(
            kt / ((nf - 2.0) * f) - wp.tr_t / (2.0 * f) - (nf - 3.0) * wp.delta1_f / (4.0 * f * f),
        );
    }

    let (mut a, mut a_block_defect, mut a_discriminant, mut tau2) = (None, None, None, None);
    if let Some(t1) = tau1 {
        let am = pkg.s.axpy(-t1, pkg.g());
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i >= p || j >= p {
                    off = off.max(am.at(i, j).abs());
                }
            }
        }
        let scale = am.max_abs().max(pkg.s.max_abs()).max(f64::MIN_POSITIVE);
        a_block_defect = Some(off / scale);
        let tra = trace(&am, &pkg.metric);
        let tra2 = power(&am, &pkg.metric, 2).map(|m| trace(&m, &pkg.metric)).unwrap_or(0.0);
        let disc = tra2 - tra * tra;
        let mixed = pkg.metric.raise(&am);
        let mscale: f64 = mixed.iter().map(|v| v * v).sum();
        a_discriminant = Some(disc);
        if disc.abs() > TAU2_TOL * mscale && disc != 0.0 {
            tau2 = Some(1.0 / disc);
        } else {
            diags.push(Diagnostic {
                field: "tau2",
                reason: format!("tr(A^2) - (tr A)^2 = {disc:e} vanishes, rank(A) < 2"),
            });
        }
        a = Some(am);
    } else {
        for field in ["A", "tau2"] {
            diags.push(Diagnostic {
                field,
                reason: "tau1 is undefined".into(),
            });
        }
    }

    let mut rho0 = None;
    if p != 2 || n < 4 {
        diags.push(Diagnostic {
            field: "rho0",
            reason: format!("requires p = 2 and n >= 4, got p = {p}, n = {n}"),
        });
    } else if !fibre_const_curv {
        diags.push(Diagnostic {
            field: "rho0",
            reason: format!("fibre is not of constant curvature (defect {fibre_const_curv_defect:e})"),
        });
    } else {
        rho0 = Some(
            kb / 2.0 + kt / ((nf - 3.0) * (nf - 2.0) * f) + wp.tr_t / (2.0 * f)
                - wp.delta1_f / (4.0 * f * f),
        );
    }
    let rho = rho0.map(|r0| 2.0 * (nf - 3.0) * r0 / (nf - 1.0));
    if rho.is_none() {
        diags.push(Diagnostic {
            field: "rho",
            reason: "rho0 is undefined".into(),
        });
    }

    WarpedAux {
        n,
        p,
        f,
        t: wp.t.clone(),
        tr_t: wp.tr_t,
        tr_t2: wp.tr_t2,
        delta1_f: wp.delta1_f,
        kappa_bar: kb,
        kappa_tilde: kt,
        fibre_einstein_defect,
        fibre_const_curv_defect,
        fibre_einstein,
        fibre_const_curv,
        h,
        tau1,
        a,
        a_block_defect,
        a_discriminant,
        tau2,
        tau3: None,
        rho0,
        rho,
        diagnostics: diags,
    }
}

/// Pseudosymmetry of a warped product judged three ways.
#[derive(Clone, Debug)]
pub struct PseudosymVerdict {
    /// Traceless part of `T` relative to `T`.
    pub t_traceless_ratio: f64,
    pub t_proportional: bool,
    /// `R·R` fitted against `Q(g,R)`.
    pub direct_fit: FitResult,
    pub pseudosymmetric: bool,
    pub l_r: Option<f64>,
    /// `-tr(T)/(2pF)`, the value making `H` vanish when `T ∝ ḡ`.
    pub l_r_proportional: f64,
    pub h: Option<SymTensor2>,
    pub pseudo10_residual: Option<f64>,
    pub pseudo11b_residual: Option<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Residual tolerance for the direct pseudosymmetry fit.
pub const PSEUDO_TOL: f64 = 1e-9;

pub fn pseudosym_criteria(spec: &WarpedSpec, x: &[f64]) -> Result<PseudosymVerdict> {
    let wp = WarpedPoint::evaluate(spec, x)?;
    let pkg = closed_form_from_point(&wp, x)?;
    let (n, p) = (wp.n, wp.p);
    let (pf, qf) = (p as f64, (n - p) as f64);
    let f = wp.f;
    let mut diags = Vec::new();

    let t_traceless_ratio = traceless_ratio(&wp.t, &wp.base.metric);
    let t_proportional = t_traceless_ratio < PROPORTIONAL_TOL;
    let l_r_proportional = -wp.tr_t / (2.0 * pf * f);

    let rr = curv_action(&pkg.r, &pkg.r, &pkg.metric)?;
    let qgr = tachibana(pkg.g(), &pkg.r)?;
    let direct_fit = fit_coefficients(&rr, &[&qgr])?;
    let pseudosymmetric = direct_fit.residual_rel < PSEUDO_TOL;
    let l_r = if direct_fit.degenerate {
        diags.push(Diagnostic {
            field: "L_R",
            reason: "Q(g,R) vanishes, L_R is undetermined".into(),
        });
        None
    } else {
        direct_fit.coeffs.first().copied()
    };
    let lr = l_r.or(if t_proportional { Some(l_r_proportional) } else { None });
    let h = lr.map(|lr| wp.t.scale(0.5).axpy(f * lr, wp.base.g()));

    let (mut pseudo10_residual, mut pseudo11b_residual) = (None, None);
    match (&h, lr) {
        (Some(h), Some(lr)) if p >= 2 && n - p >= 2 => {
            let gb = wp.base.g();
            let c10 = f * (wp.base.kappa / ((pf - 1.0) * pf) - lr);
            let lhs = Tensor4::from_fn(p, |[a, b, c, d]| {
                h.at(a, c) * h.at(b, d) - h.at(a, b) * h.at(c, d)
            });
            let rhs = Tensor4::from_fn(p, |[a, b, c, d]| {
                c10 * (gb.at(a, b) * h.at(c, d) - gb.at(a, c) * h.at(b, d))
            });
            let h_ref = 0.5 * wp.t.norm() + (f * lr).abs() * gb.norm();
            let floor10 = h_ref * (h_ref + c10.abs() * gb.norm());
            pseudo10_residual = Some(Balance::new().plus(&lhs).minus(&rhs).residual_floor(floor10));
            let h2 = power(h, &wp.base.metric, 2)?;
            let c11 = f * wp.base.kappa / ((pf - 1.0) * pf) - wp.fibre.kappa / ((qf - 1.0) * qf)
                + wp.delta1_f / (4.0 * f);
            let floor11 = h_ref * (h_ref * wp.base.metric.g_inv.norm() + c11.abs());
            pseudo11b_residual = Some(Balance::new().plus(&h2).term(-c11, h).residual_floor(floor11));
        }
        (Some(_), Some(_)) => diags.push(Diagnostic {
            field: "pseudo10",
            reason: format!("requires p >= 2 and n - p >= 2, got p = {p}, n = {n}"),
        }),
        _ => diags.push(Diagnostic {
            field: "pseudo10",
            reason: "no L_R available to form H".into(),
        }),
    }

    Ok(PseudosymVerdict {
        t_traceless_ratio,
        t_proportional,
        direct_fit,
        pseudosymmetric,
        l_r,
        l_r_proportional,
        h,
        pseudo10_residual,
        pseudo11b_residual,
        diagnostics: diags,
    })
}
