use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{
    universal, CatalogEntry, Expect, Expectation, Origin, Param, Params, Profile, Profile2, Which,
};
use crate::conditions::{quasi_einstein_decomposition, ConditionId, Context, PointAnalysis};
use crate::error::{CurvError, Result};
use crate::jet::Jet;
use crate::metric::{FnMetric, MetricSpec};
use crate::tensor::{numerical_rank, Components, DEFAULT_RANK_TOL};
use crate::warped::WarpedSpec;

use ConditionId as C;
use Origin::{Derived, Stated, Trivial};

/// Catalog entry names accepted by [`build`].
pub const NAMES: &[&str] = &[
    "flat",
    "constant_curvature",
    "sphere",
    "schwarzschild",
    "reissner_nordstrom",
    "kottler",
    "vaidya_ingoing",
    "vaidya_outgoing",
    "vaidya_kottler",
    "vaidya_rn",
    "vaidya_bonnor",
    "goedel",
    "robertson_walker",
    "generalized_robertson_walker",
    "spherical_symmetric",
    "rt_warped_sphere",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Int,
    /// A [`Profile`] of one variable.
    Func,
    /// A [`Profile2`] of `(u, r)`.
    Func2,
}

#[derive(Clone, Copy, Debug)]
pub struct ParamInfo {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: &'static str,
    pub doc: &'static str,
}

macro_rules! pi {
    ($name:expr, $kind:expr, $default:expr, $doc:expr) => {
        ParamInfo { name: $name, kind: $kind, default: $default, doc: $doc }
    };
}

use ParamKind::{Func, Func2, Int, Real};

/// Parameter schema of a catalog entry.
pub fn describe(name: &str) -> Result<&'static [ParamInfo]> {
    Ok(match canonical(name)? {
        "flat" => &[
            pi!("n", Int, "4", "dimension"),
            pi!("negatives", Int, "0", "number of timelike directions"),
        ],
        "constant_curvature" => &[
            pi!("n", Int, "4", "dimension"),
            pi!("c", Real, "1", "sectional curvature"),
        ],
        "sphere" => &[pi!("n", Int, "2", "dimension"), pi!("a", Real, "1", "radius")],
        "schwarzschild" => &[pi!("m", Real, "1", "mass")],
        "reissner_nordstrom" => &[pi!("m", Real, "1", "mass"), pi!("q", Real, "0.3", "charge")],
        "kottler" => &[
            pi!("m", Real, "1", "mass"),
            pi!("lambda", Real, "0.01", "cosmological constant"),
        ],
        "vaidya_ingoing" | "vaidya_outgoing" => &[pi!("m", Func, "poly:0,1", "mass function m(v)")],
        "vaidya_kottler" => &[
            pi!("m", Func, "poly:0,1", "mass function m(v)"),
            pi!("lambda", Real, "0.1", "cosmological constant"),
        ],
        "vaidya_rn" => &[
            pi!("m", Func, "poly:0,1", "mass function m(v)"),
            pi!("q", Real, "0.3", "charge"),
        ],
        "vaidya_bonnor" => &[
            pi!("m", Func, "poly:0,1", "mass function m(v)"),
            pi!("q", Func, "poly:0.3,0.1", "charge function q(v)"),
        ],
        "goedel" => &[pi!("a", Real, "1", "scale")],
        "robertson_walker" => &[
            pi!("F", Func, "poly:2,0,1", "warping function F(t)"),
            pi!("k", Real, "1", "fibre sectional curvature"),
            pi!("eps", Real, "-1", "base metric sign"),
        ],
        "generalized_robertson_walker" => &[
            pi!("F", Func, "poly:2,0,1", "warping function F(t)"),
            pi!("eps", Real, "-1", "base metric sign"),
        ],
        "spherical_symmetric" => &[
            pi!("m", Func2, "poly:1,0.1*const:1", "m(u,r)"),
            pi!("beta", Func2, "const:1*poly:0,0.1;poly:0,0.05*poly:0,1", "beta(u,r)"),
        ],
        "rt_warped_sphere" => &[
            pi!("f", Func, "sin:1,1,0,2", "f(r)"),
            pi!("R", Func, "poly:1,0,1", "R(t)"),
        ],
        _ => unreachable!(),
    })
}

fn canonical(name: &str) -> Result<&'static str> {
    let name = if name == "vaidya" { "vaidya_ingoing" } else { name };
    NAMES
        .iter()
        .copied()
        .find(|n| *n == name)
        .ok_or_else(|| CurvError::UnknownMetric(name.to_string()))
}

struct Args<'a> {
    given: &'a Params,
    schema: &'static [ParamInfo],
    out: Params,
}

impl<'a> Args<'a> {
    fn new(name: &str, given: &'a Params) -> Result<Self> {
        let schema = describe(name)?;
        for k in given.keys() {
            if !schema.iter().any(|p| p.name == k) {
                return Err(CurvError::InvalidParam {
                    name: k.clone(),
                    reason: format!("not a parameter of `{name}`"),
                });
            }
        }
        Ok(Self { given, schema, out: Params::new() })
    }

    fn raw(&self, k: &str) -> (Option<&'a Param>, &'static str) {
        let info = self.schema.iter().find(|p| p.name == k).expect("parameter in schema");
        (self.given.get(k), info.default)
    }

    fn invalid(k: &str, reason: impl Into<String>) -> CurvError {
        CurvError::InvalidParam { name: k.to_string(), reason: reason.into() }
    }

    fn real(&mut self, k: &str) -> Result<f64> {
        let (g, d) = self.raw(k);
        let v = match g {
            Some(Param::Real(v)) => *v,
            Some(Param::Text(s)) => s.trim().parse().map_err(|_| Self::invalid(k, "expected a number"))?,
            Some(Param::Func(Profile::Const(v))) => *v,
            Some(_) => return Err(Self::invalid(k, "expected a number")),
            None => d.parse().expect("numeric default"),
        };
        if !v.is_finite() {
            return Err(Self::invalid(k, "must be finite"));
        }
        self.out.insert(k.into(), Param::Real(v));
        Ok(v)
    }

    fn int(&mut self, k: &str, lo: usize, hi: usize) -> Result<usize> {
        let v = self.real(k)?;
        if libm::trunc(v) != v || v < lo as f64 || v > hi as f64 {
            return Err(Self::invalid(k, format!("expected an integer in {lo}..={hi}")));
        }
        Ok(v as usize)
    }

    fn func(&mut self, k: &str) -> Result<Profile> {
        let (g, d) = self.raw(k);
        let p = match g {
            Some(Param::Func(p)) => p.clone(),
            Some(Param::Real(v)) => Profile::Const(*v),
            Some(Param::Text(s)) => Profile::parse(s)?,
            Some(Param::Func2(_)) => return Err(Self::invalid(k, "expected a function of one variable")),
            None => Profile::parse(d)?,
        };
        self.out.insert(k.into(), Param::Func(p.clone()));
        Ok(p)
    }

    fn func2(&mut self, k: &str) -> Result<Profile2> {
        let (g, d) = self.raw(k);
        let p = match g {
            Some(Param::Func2(p)) => p.clone(),
            Some(Param::Func(p)) => Profile2(vec![(Profile::Const(1.0), p.clone())]),
            Some(Param::Real(v)) => Profile2(vec![(Profile::Const(1.0), Profile::Const(*v))]),
            Some(Param::Text(s)) => Profile2::parse(s)?,
            None => Profile2::parse(d)?,
        };
        self.out.insert(k.into(), Param::Func2(p.clone()));
        Ok(p)
    }
}

fn j(v: f64) -> Jet {
    Jet::constant(v)
}

fn unit_sphere2() -> Arc<dyn MetricSpec> {
    Arc::new(
        FnMetric::diagonal("S2", vec![1, 1], |x| {
            let s = x[0].sin();
            vec![j(1.0), s * s]
        })
        .with_domain(|x| libm::sin(x[0]) > 0.05),
    )
}

/// Round `Sⁿ(a)` in hyperspherical angles.
fn round_sphere(n: usize, a: f64) -> FnMetric {
    FnMetric::diagonal(format!("S{n}({a})"), vec![1; n], move |x| {
        let mut out = Vec::with_capacity(n);
        let mut w = j(a * a);
        for (i, xi) in x.iter().enumerate() {
            out.push(w);
            if i + 1 < n {
                let s = xi.sin();
                w = w * s * s;
            }
        }
        out
    })
    .with_domain(move |x| x[..n - 1].iter().all(|&t| libm::sin(t) > 0.05))
}

/// `δ / (1 + c|x|²/4)²`, curvature `c`.
fn conformal_space_form(n: usize, c: f64) -> FnMetric {
    FnMetric::diagonal(format!("K{n}({c})"), vec![1; n], move |x| {
        let r2 = x.iter().fold(j(0.0), |acc, &xi| acc + xi * xi);
        let w = (r2 * (c / 4.0) + 1.0).powi(-2);
        vec![w; n]
    })
    .with_domain(move |x| 1.0 + c * x.iter().map(|v| v * v).sum::<f64>() / 4.0 > 0.1)
}

fn holds(id: ConditionId, origin: Origin) -> Expectation {
    Expectation::new(format!("{id} holds"), Expect::Holds(id), origin)
}

fn degenerate(id: ConditionId) -> Expectation {
    Expectation::new(format!("{id} degenerate"), Expect::Degenerate(id), Trivial)
}

fn fitted(
    id: ConditionId,
    name: &'static str,
    what: &str,
    origin: Origin,
    tol: f64,
    value: impl Fn(&PointAnalysis) -> f64 + Send + Sync + 'static,
) -> Expectation {
    Expectation::new(
        format!("{id} {name} = {what}"),
        Expect::Fitted { id, name, value: Arc::new(value), tol },
        origin,
    )
}

fn custom(
    label: &str,
    origin: Origin,
    f: impl Fn(&PointAnalysis) -> core::result::Result<(f64, bool), String> + Send + Sync + 'static,
) -> Expectation {
    Expectation::new(label, Expect::Custom(Arc::new(f)), origin)
}

fn component(
    label: &str,
    tensor: Which,
    index: &[usize],
    origin: Origin,
    value: impl Fn(&PointAnalysis) -> f64 + Send + Sync + 'static,
) -> Expectation {
    Expectation::new(
        label,
        Expect::Component { tensor, index: index.to_vec(), value: Arc::new(value), tol: 1e-9 },
        origin,
    )
}

fn rel(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / s.max(f64::MIN_POSITIVE)
    }
}

fn weyl_vanishes() -> Expectation {
    custom("C = 0", Trivial, |a| {
        let c = a.pkg.weyl().map_err(|e| e.to_string())?;
        let m = rel(c.max_abs(), a.pkg.r.max_abs());
        Ok((m, m < 1e-10))
    })
    .when(|a| a.pkg.n() >= 4)
}

fn weyl_nonzero() -> Expectation {
    custom("C != 0", Derived, |a| Ok((a.class.weyl_rel, a.class.in_uc)))
}

fn einstein(origin: Origin) -> Expectation {
    custom("Einstein", origin, |a| Ok((a.class.s_traceless_rel, a.class.einstein)))
}

fn ricci_flat() -> Expectation {
    custom("Ricci flat", Stated, |a| {
        let m = rel(a.pkg.s.norm(), a.pkg.r.norm());
        Ok((m, a.class.ricci_flat))
    })
}

fn aux_of(a: &PointAnalysis) -> core::result::Result<&crate::warped::WarpedAux, String> {
    a.aux.as_ref().ok_or_else(|| "no warped auxiliary data".to_string())
}

fn scalar_check(
    label: &str,
    origin: Origin,
    got: impl Fn(&PointAnalysis) -> core::result::Result<f64, String> + Send + Sync + 'static,
    want: impl Fn(&PointAnalysis) -> f64 + Send + Sync + 'static,
    tol: f64,
) -> Expectation {
    custom(label, origin, move |a| {
        let g = got(a)?;
        let w = want(a);
        let d = (g - w).abs() / w.abs().max(1.0);
        Ok((d, d <= tol))
    })
}

/// Builds a catalog entry with the given parameters; missing ones take defaults.
pub fn build(name: &str, params: &Params) -> Result<CatalogEntry> {
    let name = canonical(name)?;
    let mut args = Args::new(name, params)?;
    let mut e = match name {
        "flat" => flat(&mut args)?,
        "constant_curvature" => constant_curvature(&mut args)?,
        "sphere" => sphere(&mut args)?,
        "schwarzschild" | "reissner_nordstrom" | "kottler" => static_spherical(name, &mut args)?,
        "vaidya_ingoing" | "vaidya_outgoing" | "vaidya_kottler" | "vaidya_rn" | "vaidya_bonnor" => {
            vaidya(name, &mut args)?
        }
        "goedel" => goedel(&mut args)?,
        "robertson_walker" => robertson_walker(&mut args)?,
        "generalized_robertson_walker" => generalized_rw(&mut args)?,
        "spherical_symmetric" => spherical_symmetric(&mut args)?,
        "rt_warped_sphere" => rt_warped_sphere(&mut args)?,
        _ => unreachable!(),
    };
    e.params = args.out;
    e.expectations.extend(universal());
    for x in &e.default_points {
        if !e.spec.in_domain(x) {
            return Err(CurvError::OutsideDomain(format!("{} default point {x:?}", e.name)));
        }
    }
    Ok(e)
}

fn plain(name: &str, spec: Arc<dyn MetricSpec>, points: Vec<Vec<f64>>, bx: Vec<(f64, f64)>) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        spec,
        warped: None,
        params: Params::new(),
        default_points: points,
        sample_box: bx,
        expectations: Vec::new(),
    }
}

fn warped_entry(name: &str, w: WarpedSpec, points: Vec<Vec<f64>>, bx: Vec<(f64, f64)>) -> CatalogEntry {
    let mut e = plain(name, Arc::new(w.clone()), points, bx);
    e.warped = Some(w);
    e
}

fn spread(n: usize, k: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    // deterministic, well-separated points inside a box
    (0..k)
        .map(|i| {
            (0..n)
                .map(|d| {
                    let t = (((i * 7 + d * 3) % 11) as f64 + 0.5) / 11.0;
                    lo + (hi - lo) * t
                })
                .collect()
        })
        .collect()
}

fn flat(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let n = args.int("n", 2, crate::jet::MAX_DIM)?;
    let neg = args.int("negatives", 0, n)?;
    let sig: Vec<i8> = (0..n).map(|i| if i < neg { -1 } else { 1 }).collect();
    let s2 = sig.clone();
    let spec = FnMetric::diagonal(format!("flat{n}"), sig, move |_| s2.iter().map(|&s| j(s as f64)).collect());
    let mut e = plain("flat", Arc::new(spec), spread(n, 3, -1.0, 1.0), vec![(-2.0, 2.0); n]);
    e.expectations = vec![
        custom("R = 0", Trivial, |a| Ok((a.pkg.r.max_abs(), a.pkg.r.max_abs() == 0.0))),
        degenerate(C::Pseudo),
        degenerate(C::RicciPseudo),
    ];
    Ok(e)
}

fn constant_curvature(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let n = args.int("n", 2, crate::jet::MAX_DIM)?;
    let c = args.real("c")?;
    let spec = conformal_space_form(n, c);
    let mut e = plain(
        "constant_curvature",
        Arc::new(spec),
        spread(n, 3, -0.4, 0.4),
        vec![(-0.5, 0.5); n],
    );
    let nf = n as f64;
    e.expectations = vec![
        einstein(Trivial),
        scalar_check("kappa = n(n-1)c", Trivial, |a| Ok(a.pkg.kappa), move |_| nf * (nf - 1.0) * c, 1e-9),
        weyl_vanishes(),
        custom("R.R = 0", Trivial, |a| {
            let ctx = Context::new(&a.pkg);
            let rr = ctx.rr().map_err(|e| e.to_string())?;
            let scale = a.pkg.metric.g_inv.norm() * a.pkg.r.norm() * a.pkg.r.norm();
            let m = rel(rr.norm(), scale);
            Ok((m, m < 1e-10))
        }),
        degenerate(C::Pseudo),
        degenerate(C::WeylPseudo).when(|a| a.pkg.n() >= 4),
        degenerate(C::CcPseudo).when(|a| a.pkg.n() >= 4),
        degenerate(C::Genpseudo01).when(|a| a.pkg.n() >= 4),
        degenerate(C::Identity05).when(|a| a.pkg.n() >= 4),
        degenerate(C::Cor36L2).when(|a| a.pkg.n() >= 4),
    ];
    Ok(e)
}

fn sphere(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let n = args.int("n", 2, crate::jet::MAX_DIM)?;
    let a = args.real("a")?;
    if !(a > 0.0) {
        return Err(Args::invalid("a", "radius must be positive"));
    }
    let pts = spread(n, 3, 0.4, 2.6);
    let mut bx = vec![(0.3, PI - 0.3); n];
    bx[n - 1] = (0.0, 2.0 * PI);
    let mut e = plain("sphere", Arc::new(round_sphere(n, a)), pts, bx);
    let nf = n as f64;
    e.expectations = vec![
        einstein(Trivial),
        scalar_check("kappa = n(n-1)/a^2", Trivial, |a| Ok(a.pkg.kappa), move |_| nf * (nf - 1.0) / (a * a), 1e-9),
        weyl_vanishes(),
    ];
    Ok(e)
}

type Fvr = Arc<dyn Fn(Jet, Jet) -> Jet + Send + Sync>;

/// `f`, `f_v`, `f_r`, `f_rr` at base coordinates `(v, r)`.
fn f_derivs(f: &Fvr, v: f64, r: f64) -> (f64, f64, f64, f64) {
    let x = Jet::seed(&[v, r]);
    let y = f(x[0], x[1]);
    (y.value, y.d(0), y.d(1), y.dd(1, 1))
}

/// `(r²/2) f_rr - r f_r + f - 1`.
fn tau3(f: &Fvr, v: f64, r: f64) -> f64 {
    let (f0, _, fr, frr) = f_derivs(f, v, r);
    0.5 * r * r * frr - r * fr + f0 - 1.0
}

/// Expectations shared by the `F = r²` metrics over the unit sphere with a
/// base built from a single function `f(v, r)`.
fn radial_expectations(f: &Fvr) -> Vec<Expectation> {
    let f1 = f.clone();
    let f2 = f.clone();
    let f3 = f.clone();
    vec![
        fitted(C::CcPseudo, "L_C", "tau3/(6r^2)", Derived, 1e-9, move |a| {
            let (v, r) = (a.point[0], a.point[1]);
            tau3(&f1, v, r) / (6.0 * r * r)
        }),
        fitted(C::Genpseudo01, "L", "((f-1)f_rr - f_r^2/2)/tau3", Stated, 1e-9, move |a| {
            let (v, r) = (a.point[0], a.point[1]);
            let (f0, _, fr, frr) = f_derivs(&f2, v, r);
            ((f0 - 1.0) * frr - 0.5 * fr * fr) / tau3(&f2, v, r)
        }),
        scalar_check(
            "rho = -(2/3) tau3 / r^2",
            Stated,
            |a| aux_of(a)?.rho.ok_or_else(|| "rho undefined".into()),
            move |a| {
                let (v, r) = (a.point[0], a.point[1]);
                -2.0 * tau3(&f3, v, r) / (3.0 * r * r)
            },
            1e-9,
        ),
        holds(C::Identity05, Stated),
        holds(C::Thm71Cc, Stated),
        holds(C::Thm71Genpseudo, Stated),
        holds(C::Thm71Identity05, Stated),
    ]
}

fn sphere_points(base: &[[f64; 2]]) -> Vec<Vec<f64>> {
    let ang = [[PI / 3.0, PI / 4.0], [1.0, 0.5], [2.0, 1.0], [1.3, 2.5], [0.9, 3.0]];
    base.iter()
        .zip(ang.iter().cycle())
        .map(|(b, a)| vec![b[0], b[1], a[0], a[1]])
        .collect()
}

fn radial_warped(name: &str, base: FnMetric, f: Fvr) -> Result<WarpedSpec> {
    let fp = f.clone();
    Ok(WarpedSpec::new(name, Arc::new(base), unit_sphere2(), |xb| xb[1] * xb[1])?
        .with_profile(move |xb| fp(xb[0], xb[1]), 1))
}

fn static_spherical(name: &str, args: &mut Args<'_>) -> Result<CatalogEntry> {
    let m = args.real("m")?;
    let (q, lambda) = match name {
        "reissner_nordstrom" => (args.real("q")?, 0.0),
        "kottler" => (0.0, args.real("lambda")?),
        _ => (0.0, 0.0),
    };
    let f: Fvr = Arc::new(move |_t, r| -(j(2.0 * m) / r) + 1.0 + j(q * q) / (r * r) - r * r * (lambda / 3.0));
    let fv = move |r: f64| 1.0 - 2.0 * m / r + q * q / (r * r) - lambda * r * r / 3.0;
    let horizon = if q.abs() < m.abs() { m.abs() + libm::sqrt(m * m - q * q) } else { 0.0 };
    let fb = f.clone();
    let fd = fv;
    let base = FnMetric::new(format!("{name}_base"), vec![-1, 1], move |x| {
        let fx = fb(x[0], x[1]);
        vec![-fx, j(0.0), j(0.0), fx.recip()]
    })
    .with_domain(move |x| x[1] > horizon + 0.1 && fd(x[1]) > 1e-3);
    let w = radial_warped(name, base, f.clone())?;
    let rs: Vec<f64> = [3.0, 4.5, 6.0, 3.5, 8.0].iter().map(|r| r * m.abs().max(0.5)).collect();
    let rs: Vec<f64> = rs.into_iter().filter(|&r| fv(r) > 1e-3 && r > horizon + 0.1).collect();
    let ts = [0.0, 1.0, -0.5, 2.0, 0.3];
    let base_pts: Vec<[f64; 2]> = rs.iter().zip(ts).map(|(&r, t)| [t, r]).collect();
    let rmax = rs.iter().cloned().fold(horizon + 1.0, f64::max);
    let bx = vec![(-2.0, 2.0), (horizon + 0.5, rmax), (0.3, PI - 0.3), (0.0, 2.0 * PI)];
    let mut e = warped_entry(name, w, sphere_points(&base_pts), bx);
    e.expectations = radial_expectations(&f);
    match name {
        "schwarzschild" => {
            e.expectations.extend([
                ricci_flat(),
                holds(C::Pseudo, Stated),
                fitted(C::Pseudo, "L_R", "-m/r^3", Derived, 1e-9, move |a| -m / (a.point[1] * a.point[1] * a.point[1])),
                holds(C::EinsteinChain, Stated),
            ]);
        }
        "kottler" => {
            e.expectations.extend([
                einstein(Stated),
                holds(C::Pseudo, Stated),
                holds(C::EinsteinChain, Stated),
            ]);
        }
        _ => {
            e.expectations.extend([
                custom("2-quasi-Einstein", Stated, |a| {
                    Ok((a.class.rank_s_minus_alpha_g as f64, a.class.two_quasi_einstein))
                }),
                holds(C::Roter, Derived),
                holds(C::Thm32Consequents, Derived),
                holds(C::Pseudo, Derived),
                holds(C::Thm62RdotS, Derived),
            ]);
        }
    }
    Ok(e)
}

fn vaidya(name: &str, args: &mut Args<'_>) -> Result<CatalogEntry> {
    let m = args.func("m")?;
    let outgoing = name == "vaidya_outgoing";
    let f: Fvr = match name {
        "vaidya_kottler" => {
            let l = args.real("lambda")?;
            Arc::new(move |v, r| -(m.eval(v) * 2.0 / r) + 1.0 - r * r * (l / 3.0))
        }
        "vaidya_rn" => {
            let q = args.real("q")?;
            Arc::new(move |v, r| -(m.eval(v) * 2.0 / r) + 1.0 - j(q * q) / (r * r))
        }
        "vaidya_bonnor" => {
            let q = args.func("q")?;
            Arc::new(move |v, r| {
                let qv = q.eval(v);
                -(m.eval(v) * 2.0 / r) + 1.0 - qv * qv / (r * r)
            })
        }
        _ => Arc::new(move |v, r| -(m.eval(v) * 2.0 / r) + 1.0),
    };
    let sgn = if outgoing { -1.0 } else { 1.0 };
    let fb = f.clone();
    let base = FnMetric::new(format!("{name}_base"), vec![-1, 1], move |x| {
        let fx = fb(x[0], x[1]);
        vec![-fx, j(sgn), j(sgn), j(0.0)]
    })
    .with_domain(|x| x[1] > 0.1);
    let w = radial_warped(name, base, f.clone())?;
    let base_pts = [[1.0, 2.0], [0.5, 3.0], [1.5, 4.0], [2.0, 2.5], [0.8, 1.5]];
    let bx = vec![(0.2, 3.0), (1.0, 6.0), (0.3, PI - 0.3), (0.0, 2.0 * PI)];
    let mut e = warped_entry(name, w, sphere_points(&base_pts), bx);
    let mut ex = radial_expectations(&f);
    let (fs, fc, fp) = (f.clone(), f.clone(), f.clone());
    ex.extend([
        component("S_vv", Which::Ricci, &[0, 0], Stated, move |a| {
            let (v, r) = (a.point[0], a.point[1]);
            let (f0, fv, fr, frr) = f_derivs(&fs, v, r);
            f0 * (0.5 * frr + fr / r) - sgn * fv / r
        }),
        component("C_vrrv = tau3/(3r^2)", Which::Weyl, &[0, 1, 1, 0], Stated, move |a| {
            let (v, r) = (a.point[0], a.point[1]);
            tau3(&fc, v, r) / (3.0 * r * r)
        }),
        holds(C::Thm71Identity06, Stated),
        Expectation::new(
            "PSEUDO fails",
            Expect::Fails { id: C::Pseudo, min_residual: 1e-2 },
            Stated,
        )
        .when(move |a| f_derivs(&fp, a.point[0], a.point[1]).1.abs() > 1e-8),
    ]);
    let tau2_ids = [C::Thm62RdotS, C::Thm71WeylDecomp, C::Thm71Cr, C::Thm71Rc];
    if matches!(name, "vaidya_rn" | "vaidya_bonnor") {
        ex.extend(tau2_ids.map(|id| holds(id, Stated)));
    } else {
        // A = S - τ₁g is the null-dust part, of rank one, so τ₂ is undefined
        ex.extend(tau2_ids.map(|id| {
            Expectation::new(format!("{id} degenerate (tau2 undefined)"), Expect::Degenerate(id), Derived)
        }));
        let fl = f.clone();
        ex.push(fitted(C::Cor36L2, "L_2", "L + L_C", Derived, 1e-9, move |a| {
            let (v, r) = (a.point[0], a.point[1]);
            let (f0, _, fr, frr) = f_derivs(&fl, v, r);
            let t3 = tau3(&fl, v, r);
            ((f0 - 1.0) * frr - 0.5 * fr * fr) / t3 + t3 / (6.0 * r * r)
        }));
    }
    e.expectations = ex;
    Ok(e)
}

fn goedel(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let a = args.real("a")?;
    if !(a > 0.0) {
        return Err(Args::invalid("a", "scale must be positive"));
    }
    let a2 = a * a;
    let spec = FnMetric::new("goedel", vec![-1, 1, 1, 1], move |x| {
        let ex = x[1].exp();
        let z = j(0.0);
        vec![
            j(-a2), z, -ex * a2, z,
            z, j(a2), z, z,
            -ex * a2, z, -(ex * ex) * (a2 / 2.0), z,
            z, z, z, j(a2),
        ]
    });
    let pts = vec![
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.5, 0.3, -0.2, 1.0],
        vec![1.0, -0.4, 0.7, -1.0],
    ];
    let mut e = plain("goedel", Arc::new(spec), pts, vec![(-1.0, 1.0); 4]);
    // the Ricci tensor must be κ ω⊗ω before any expectation is meaningful
    let pkg = crate::engine::curvature_package(&*e.spec, &e.default_points[0])?;
    let rank = numerical_rank(&pkg.s, DEFAULT_RANK_TOL);
    let dev = pkg.s2.axpy(-pkg.kappa, &pkg.s);
    if rank != 1 || rel(dev.norm(), pkg.s2.norm().max(pkg.s.norm() * pkg.kappa.abs())) > 1e-10 {
        return Err(CurvError::Precondition(format!(
            "Ricci tensor is not of the form kappa w(x)w (rank {rank})"
        )));
    }
    e.expectations = vec![
        custom("rank S = 1", Stated, |a| Ok((a.class.rank_s as f64, a.class.rank_s == 1))),
        custom("S^S = 0", Stated, |a| {
            let ctx = Context::new(&a.pkg);
            let ss = ctx.ss().map_err(|e| e.to_string())?;
            let s = a.pkg.s.norm();
            let m = rel(ss.norm(), s * s * a.pkg.metric.g_inv.norm().max(1.0));
            Ok((m, m < 1e-10))
        }),
        custom("S^2 = kappa S", Stated, |a| {
            let d = a.pkg.s2.axpy(-a.pkg.kappa, &a.pkg.s);
            let m = rel(d.norm(), a.pkg.s2.norm().max((a.pkg.kappa * a.pkg.s.norm()).abs()));
            Ok((m, m < 1e-10))
        }),
        holds(C::GoedelId, Stated),
        fitted(C::CcPseudo, "L_C", "kappa/6", Derived, 1e-9, |a| a.pkg.kappa / 6.0),
        holds(C::Identity05Quasi, Stated),
    ];
    Ok(e)
}

/// `α = κ/(n-1) - L_S` with `L_S = -tr T/(2F)`, and `rank(S - αg) = 1`.
fn einstein_fibre_rw_expectations() -> Vec<Expectation> {
    vec![
        fitted(C::RicciPseudo, "L_S", "-tr T/(2F)", Stated, 1e-9, |a| {
            a.aux.as_ref().map_or(f64::NAN, |x| -x.tr_t / (2.0 * x.f))
        }),
        custom("rank(S - alpha g) = 1", Stated, |a| {
            let x = aux_of(a)?;
            let nf = a.pkg.n() as f64;
            let alpha = a.pkg.kappa / (nf - 1.0) + x.tr_t / (2.0 * x.f);
            let m = a.pkg.s.axpy(-alpha, a.pkg.g());
            let rk = numerical_rank(&m, DEFAULT_RANK_TOL);
            Ok((rk as f64, rk == 1))
        }),
    ]
}

fn robertson_walker(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let fw = args.func("F")?;
    let k = args.real("k")?;
    let eps = args.real("eps")?;
    let sig = if eps < 0.0 { -1 } else { 1 };
    let base = FnMetric::diagonal("line", vec![sig], move |_| vec![j(eps)]);
    let f2 = fw.clone();
    let w = WarpedSpec::new("robertson_walker", Arc::new(base), Arc::new(conformal_space_form(3, k)), move |xb| {
        f2.eval(xb[0])
    })?;
    let pts = vec![
        vec![0.5, 0.1, -0.2, 0.3],
        vec![1.0, -0.3, 0.2, 0.1],
        vec![1.7, 0.2, 0.4, -0.1],
        vec![2.3, 0.0, -0.1, -0.4],
        vec![0.8, 0.35, 0.05, 0.2],
    ];
    let bx = vec![(0.2, 2.5), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)];
    let mut e = warped_entry("robertson_walker", w, pts, bx);
    e.expectations = vec![
        weyl_vanishes(),
        custom("quasi-Einstein", Stated, |a| {
            Ok((a.class.rank_s_minus_alpha_g as f64, a.class.quasi_einstein))
        }),
        custom("R = S^S/2 + (1/(n-2) - alpha) g^S + (alpha^2 - kappa/((n-2)(n-1))) G", Stated, |a| {
            let ctx = Context::new(&a.pkg);
            let r = quasi_einstein_decomposition(&ctx).map_err(|e| e.to_string())?;
            Ok((r.residual_rel, r.holds))
        }),
    ];
    e.expectations.extend(einstein_fibre_rw_expectations());
    Ok(e)
}

fn generalized_rw(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let fw = args.func("F")?;
    let eps = args.real("eps")?;
    let sig = if eps < 0.0 { -1 } else { 1 };
    let base = FnMetric::diagonal("line", vec![sig], move |_| vec![j(eps)]);
    let fibre = FnMetric::diagonal("S2xS2", vec![1; 4], |x| {
        let (a, b) = (x[0].sin(), x[2].sin());
        vec![j(1.0), a * a, j(1.0), b * b]
    })
    .with_domain(|x| libm::sin(x[0]) > 0.05 && libm::sin(x[2]) > 0.05);
    let f2 = fw.clone();
    let w = WarpedSpec::new(
        "generalized_robertson_walker",
        Arc::new(base),
        Arc::new(fibre),
        move |xb| f2.eval(xb[0]),
    )?;
    let pts = vec![
        vec![0.5, 1.0, 0.4, 1.2, 2.0],
        vec![1.2, 1.4, 1.0, 2.0, 0.3],
        vec![1.7, 0.8, 2.2, 1.5, 4.0],
        vec![2.3, 2.0, 3.0, 0.9, 1.1],
        vec![0.8, 1.6, 5.0, 2.4, 0.6],
    ];
    let bx = vec![(0.2, 2.5), (0.3, PI - 0.3), (0.0, 2.0 * PI), (0.3, PI - 0.3), (0.0, 2.0 * PI)];
    let mut e = warped_entry("generalized_robertson_walker", w, pts, bx);
    e.expectations = vec![weyl_nonzero(), holds(C::RicciPseudo, Stated), holds(C::Quasi10, Stated)];
    e.expectations.extend(einstein_fibre_rw_expectations());
    Ok(e)
}

fn spherical_symmetric(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let m = args.func2("m")?;
    let beta = args.func2("beta")?;
    let (mb, bb) = (m.clone(), beta.clone());
    let base = FnMetric::new("spherical_symmetric_base", vec![-1, 1], move |x| {
        let (u, r) = (x[0], x[1]);
        let eb = bb.eval(u, r).exp();
        let f = -(mb.eval(u, r) * 2.0 / r) + 1.0;
        vec![-(eb * eb * f), eb, eb, j(0.0)]
    })
    .with_domain({
        let m = m.clone();
        move |x| x[1] > 0.1 && (x[1] - 2.0 * m.eval(j(x[0]), j(x[1])).value).abs() > 0.1
    });
    let w = WarpedSpec::new("spherical_symmetric", Arc::new(base), unit_sphere2(), |xb| xb[1] * xb[1])?;
    let base_pts = [[0.5, 3.0], [1.0, 4.0], [0.2, 5.0], [1.5, 6.0], [0.8, 3.5]];
    let bx = vec![(0.0, 2.0), (3.0, 7.0), (0.3, PI - 0.3), (0.0, 2.0 * PI)];
    let mut e = warped_entry("spherical_symmetric", w, sphere_points(&base_pts), bx);
    let mb = m.clone();
    let bb = beta.clone();
    let bb2 = beta.clone();
    let db = move |b: &Profile2, u: f64, r: f64| {
        let x = Jet::seed(&[u, r]);
        b.eval(x[0], x[1])
    };
    let beta_r_nonzero = {
        let b = beta.clone();
        move |a: &PointAnalysis| db(&b, a.point[0], a.point[1]).d(1).abs() > 1e-8
    };
    e.expectations = vec![
        component("S_rr = 2 beta_r / r", Which::Ricci, &[1, 1], Stated, move |a| {
            2.0 * db(&bb, a.point[0], a.point[1]).d(1) / a.point[1]
        }),
        scalar_check(
            "tau1 = (2 m_r - (r - 2m) beta_r)/r^2",
            Stated,
            |a| aux_of(a)?.tau1.ok_or_else(|| "tau1 undefined".into()),
            move |a| {
                let (u, r) = (a.point[0], a.point[1]);
                let mj = db(&mb, u, r);
                let bj = db(&bb2, u, r);
                (2.0 * mj.d(1) - (r - 2.0 * mj.value) * bj.d(1)) / (r * r)
            },
            1e-9,
        ),
        custom("not Einstein", Stated, |a| Ok((a.class.s_traceless_rel, a.class.in_us)))
            .when(beta_r_nonzero.clone()),
        custom("S_ab not proportional to g_ab", Stated, |a| {
            let (r, p) = crate::conditions::s_base_proportional(&a.pkg, 2).map_err(|e| e.to_string())?;
            Ok((r, !p))
        })
        .when(beta_r_nonzero.clone()),
        holds(C::Thm71Cc, Stated),
        holds(C::Thm71Genpseudo, Stated),
        holds(C::Thm71Identity05, Stated),
        holds(C::Thm71WeylDecomp, Stated).when(beta_r_nonzero.clone()),
        holds(C::Thm71Identity06, Stated).when(beta_r_nonzero.clone()),
        holds(C::Thm71Cr, Stated).when(beta_r_nonzero.clone()),
        holds(C::Thm71Rc, Stated).when(beta_r_nonzero.clone()),
        holds(C::Thm62RdotS, Stated).when(beta_r_nonzero),
    ];
    Ok(e)
}

fn rt_warped_sphere(args: &mut Args<'_>) -> Result<CatalogEntry> {
    let f = args.func("f")?;
    let rt = args.func("R")?;
    let r2 = rt.clone();
    let base = FnMetric::diagonal("rt_base", vec![1, 1], move |x| {
        let rv = r2.eval(x[0]);
        vec![j(1.0), rv * rv]
    })
    .with_domain(|x| x[0] > 0.0 && x[1] > 0.0);
    let (f2, r3) = (f.clone(), rt.clone());
    let w = WarpedSpec::new("rt_warped_sphere", Arc::new(base), unit_sphere2(), move |xb| {
        let v = f2.eval(xb[1]) * r3.eval(xb[0]);
        v * v
    })?;
    let base_pts = [[0.5, 0.7], [1.0, 1.5], [1.6, 2.2], [0.8, 2.9], [1.9, 0.4]];
    let bx = vec![(0.3, 2.0), (0.3, 3.0), (0.3, PI - 0.3), (0.0, 2.0 * PI)];
    let mut e = warped_entry("rt_warped_sphere", w, sphere_points(&base_pts), bx);
    let rho0 = {
        let (f, rt) = (f.clone(), rt.clone());
        Arc::new(move |t: f64, r: f64| {
            let (fv, f1, f2) = f.derivs(r);
            let rv = rt.value(t);
            (fv * f2 - f1 * f1 + 1.0) / (fv * rv * fv * rv)
        })
    };
    let lambda = {
        let (f, rt) = (f.clone(), rt.clone());
        Arc::new(move |t: f64, r: f64| {
            let (fv, _, f2) = f.derivs(r);
            let (rv, r1, r2) = rt.derivs(t);
            (-3.0 * r2 / rv, -(fv * rv * r2 + 2.0 * fv * r1 * r1 + 2.0 * f2) / (fv * rv * rv))
        })
    };
    let (p0, p1, p3, p4) = (rho0.clone(), rho0.clone(), rho0.clone(), rho0.clone());
    let rt2 = rt.clone();
    let (l1, l2, l3) = (lambda.clone(), lambda.clone(), lambda.clone());
    e.expectations = vec![
        scalar_check(
            "rho0 = (f f_rr - f_r^2 + 1)/(fR)^2",
            Stated,
            |a| aux_of(a)?.rho0.ok_or_else(|| "rho0 undefined".into()),
            move |a| p0(a.point[0], a.point[1]),
            1e-9,
        ),
        component("S_tt = lambda1 g_tt", Which::Ricci, &[0, 0], Stated, move |a| l1(a.point[0], a.point[1]).0),
        component("S_rr = lambda2 g_rr", Which::Ricci, &[1, 1], Stated, move |a| {
            l2(a.point[0], a.point[1]).1 * a.pkg.g().at(1, 1)
        }),
        component("S_33 = (lambda2 + rho0) g_33", Which::Ricci, &[2, 2], Stated, move |a| {
            (l3(a.point[0], a.point[1]).1 + p1(a.point[0], a.point[1])) * a.pkg.g().at(2, 2)
        }),
        fitted(C::Genpseudo01, "L", "2 R_tt / R", Derived, 1e-8, move |a| {
            let (rv, _, r2) = rt2.derivs(a.point[0]);
            2.0 * r2 / rv
        }),
        fitted(C::CcPseudo, "L_C", "-rho0/6", Stated, 1e-8, move |a| -p3(a.point[0], a.point[1]) / 6.0),
        custom("R.C + C.R = Q(S,C) - (kappa + 2 rho0)/6 Q(g,C)", Stated, move |a| {
            let ctx = Context::new(&a.pkg);
            let k = a.pkg.kappa;
            let r0 = p4(a.point[0], a.point[1]);
            let res = (|| -> Result<f64> {
                let sym = ctx.rc()? + ctx.cr()?;
                let b = crate::tensor::Balance::new()
                    .plus(&sym)
                    .minus(ctx.qsc()?)
                    .term((k + 2.0 * r0) / 6.0, ctx.qgc()?);
                Ok(b.residual_floor(ctx.floor6()))
            })()
            .map_err(|e| e.to_string())?;
            Ok((res, res < 1e-8))
        })
        .when(|a| a.class.in_uc),
        holds(C::Thm71Cc, Stated),
        holds(C::Thm71Genpseudo, Stated),
        holds(C::Thm71Identity05, Stated),
    ];
    Ok(e)
}
