//! Generic curvature pipeline: metric jets to Γ, ∂Γ, R, S, κ, C.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CurvError, Result};
use crate::jet::{Jet, MAX_DIM};
use crate::metric::{MetricAtPoint, MetricSpec};
use crate::tensor::{
    kulkarni_nomizu, power, ricci_from, trace, Components, CurvTensor4, SymTensor2, Tensor4,
    SYMMETRY_TOL,
};

/// Christoffel symbols of the second kind and their first partials.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub metric: MetricAtPoint,
    /// `gamma[(h*n + i)*n + j] = Γ^h_ij`.
    pub gamma: Vec<f64>,
    /// `dgamma[((h*n + i)*n + j)*n + k] = ∂_k Γ^h_ij`.
    pub dgamma: Vec<f64>,
    /// Magnitude of the terms entering `R`, used as a round-off floor.
    pub scale: f64,
}

impl Christoffel {
    pub fn n(&self) -> usize {
        self.metric.n()
    }

    #[inline]
    pub fn at(&self, h: usize, i: usize, j: usize) -> f64 {
        let n = self.n();
        self.gamma[(h * n + i) * n + j]
    }

    #[inline]
    pub fn d_at(&self, h: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.n();
        self.dgamma[((h * n + i) * n + j) * n + k]
    }
}

/// Evaluates the metric jets at `x` and checks their symmetry.
pub fn metric_jets(spec: &dyn MetricSpec, x: &[f64]) -> Result<Vec<Jet>> {
    let n = spec.dim();
    if n == 0 || n > MAX_DIM {
        return Err(CurvError::UnsupportedDimension(n));
    }
    if x.len() != n {
        return Err(CurvError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if !spec.in_domain(x) {
        return Err(CurvError::OutsideDomain(spec.name().into()));
    }
    let comps = spec.components(&Jet::seed(x));
    if comps.len() != n * n {
        return Err(CurvError::DimensionMismatch {
            expected: n * n,
            got: comps.len(),
        });
    }
    let mut gap = 0.0f64;
    let mut size = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&comps[i * n + j], &comps[j * n + i]);
            gap = gap.max((a.value - b.value).abs());
            size = size.max(a.value.abs());
            for k in 0..n {
                gap = gap.max((a.d(k) - b.d(k)).abs());
                size = size.max(a.d(k).abs());
                for l in 0..n {
                    gap = gap.max((a.dd(k, l) - b.dd(k, l)).abs());
                    size = size.max(a.dd(k, l).abs());
                }
            }
        }
    }
    if gap > SYMMETRY_TOL * size.max(f64::MIN_POSITIVE) {
        return Err(CurvError::SymmetryDefect {
            what: "metric components",
            defect: gap / size,
        });
    }
    if comps.iter().any(|c| !c.value.is_finite()) {
        return Err(CurvError::SingularMetric(f64::NAN));
    }
    Ok(comps)
}

/// Γ^h_ij and ∂_k Γ^h_ij at `x`.
pub fn christoffel(spec: &dyn MetricSpec, x: &[f64]) -> Result<Christoffel> {
    let comps = metric_jets(spec, x)?;
    christoffel_from_jets(spec.dim(), &comps, spec.signature())
}

/// Γ and ∂Γ from already evaluated component jets (row-major `n x n`).
pub fn christoffel_from_jets(n: usize, comps: &[Jet], signature: &[i8]) -> Result<Christoffel> {
    let g = SymTensor2::from_fn(n, |i, j| 0.5 * (comps[i * n + j].value + comps[j * n + i].value));
    let metric = MetricAtPoint::new(g, signature)?;
    let gi = |a: usize, b: usize| metric.g_inv.at(a, b);
    // dg[(s*n + i)*n + j] = ∂_s g_ij
    let mut dg = vec![0.0; n * n * n];
    let mut ddg = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            let c = &comps[i * n + j];
            for s in 0..n {
                dg[(s * n + i) * n + j] = c.d(s);
                for t in 0..n {
                    ddg[((s * n + t) * n + i) * n + j] = c.dd(s, t);
                }
            }
        }
    }
    let dgv = |s: usize, i: usize, j: usize| dg[(s * n + i) * n + j];
    let ddgv = |s: usize, t: usize, i: usize, j: usize| ddg[((s * n + t) * n + i) * n + j];

    // first kind Γ_sij and its derivative
    let mut g1 = vec![0.0; n * n * n];
    let mut dg1 = vec![0.0; n * n * n * n];
    for s in 0..n {
        for i in 0..n {
            for j in 0..n {
                g1[(s * n + i) * n + j] = 0.5 * (dgv(i, j, s) + dgv(j, i, s) - dgv(s, i, j));
                for k in 0..n {
                    dg1[((s * n + i) * n + j) * n + k] =
                        0.5 * (ddgv(k, i, j, s) + ddgv(k, j, i, s) - ddgv(k, s, i, j));
                }
            }
        }
    }
    // ∂_k g^{hs} = -g^{ha} ∂_k g_ab g^{bs}
    let mut dginv = vec![0.0; n * n * n];
    for k in 0..n {
        for h in 0..n {
            for s in 0..n {
                let mut acc = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        acc -= gi(h, a) * dgv(k, a, b) * gi(b, s);
                    }
                }
                dginv[(k * n + h) * n + s] = acc;
            }
        }
    }
    let mut gamma = vec![0.0; n * n * n];
    let mut dgamma = vec![0.0; n * n * n * n];
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for s in 0..n {
                    v += gi(h, s) * g1[(s * n + i) * n + j];
                }
                gamma[(h * n + i) * n + j] = v;
                for k in 0..n {
                    let mut d = 0.0;
                    for s in 0..n {
                        d += dginv[(k * n + h) * n + s] * g1[(s * n + i) * n + j]
                            + gi(h, s) * dg1[((s * n + i) * n + j) * n + k];
                    }
                    dgamma[((h * n + i) * n + j) * n + k] = d;
                }
            }
        }
    }
    // exact symmetry in the lower pair
    for h in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                let a = (h * n + i) * n + j;
                let b = (h * n + j) * n + i;
                let m = 0.5 * (gamma[a] + gamma[b]);
                gamma[a] = m;
                gamma[b] = m;
                for k in 0..n {
                    let m = 0.5 * (dgamma[a * n + k] + dgamma[b * n + k]);
                    dgamma[a * n + k] = m;
                    dgamma[b * n + k] = m;
                }
            }
        }
    }
    let gmax = gamma.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dmax = dgamma.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = (dmax + gmax * gmax) * metric.g.max_abs();
    Ok(Christoffel {
        metric,
        gamma,
        dgamma,
        scale,
    })
}

/// `R_hijk = g_hs (∂_k Γ^s_ij - ∂_j Γ^s_ik + Γ^r_ij Γ^s_rk - Γ^r_ik Γ^s_rj)`.
pub fn riemann(ch: &Christoffel) -> Result<CurvTensor4> {
    let n = ch.n();
    let g = &ch.metric.g;
    let mut up = vec![0.0; n * n * n * n];
    for s in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = ch.d_at(s, i, j, k) - ch.d_at(s, i, k, j);
                    for r in 0..n {
                        v += ch.at(r, i, j) * ch.at(s, r, k) - ch.at(r, i, k) * ch.at(s, r, j);
                    }
                    up[((s * n + i) * n + j) * n + k] = v;
                }
            }
        }
    }
    let raw = Tensor4::from_fn(n, |[h, i, j, k]| {
        (0..n)
            .map(|s| g.at(h, s) * up[((s * n + i) * n + j) * n + k])
            .sum()
    });
    CurvTensor4::from_tensor_scaled(raw, ch.scale)
}

/// Riemann, Ricci, scalar and Weyl tensors at a point, plus `S²`, `S³`, `G`.
#[derive(Clone, Debug)]
pub struct CurvaturePackage {
    pub point: Vec<f64>,
    pub metric: MetricAtPoint,
    /// `Γ^h_ij`, row-major; empty when the package came from closed forms
    /// that do not carry the connection.
    pub gamma: Vec<f64>,
    pub r: CurvTensor4,
    pub s: SymTensor2,
    pub kappa: f64,
    pub s2: SymTensor2,
    pub s3: SymTensor2,
    /// Produced only for `n >= 4`; in dimension 3 it vanishes identically.
    pub c: Option<CurvTensor4>,
    /// `G = ½ g∧g`.
    pub big_g: CurvTensor4,
}

impl CurvaturePackage {
    /// Derives everything downstream of `R`.
    pub fn from_riemann(
        point: Vec<f64>,
        metric: MetricAtPoint,
        gamma: Vec<f64>,
        r: CurvTensor4,
    ) -> Result<Self> {
        let s = ricci_from(&r, &metric)?;
        let kappa = trace(&s, &metric);
        Self::from_parts(point, metric, gamma, r, s, kappa)
    }

    /// Assembles a package from `R`, `S` and `κ` obtained elsewhere.
    pub fn from_parts(
        point: Vec<f64>,
        metric: MetricAtPoint,
        gamma: Vec<f64>,
        r: CurvTensor4,
        s: SymTensor2,
        kappa: f64,
    ) -> Result<Self> {
        let n = metric.n();
        if r.n() != n || s.n() != n {
            return Err(CurvError::DimensionMismatch {
                expected: n,
                got: if r.n() != n { r.n() } else { s.n() },
            });
        }
        let s2 = power(&s, &metric, 2)?;
        let s3 = power(&s, &metric, 3)?;
        let big_g = kulkarni_nomizu(&metric.g, &metric.g)?.scale(0.5);
        let c = if n >= 4 {
            let nf = n as f64;
            let gs = kulkarni_nomizu(&metric.g, &s)?;
            Some(
                r.axpy(-1.0 / (nf - 2.0), &gs)
                    .axpy(kappa / ((nf - 2.0) * (nf - 1.0)), &big_g),
            )
        } else {
            None
        };
        Ok(Self {
            point,
            metric,
            gamma,
            r,
            s,
            kappa,
            s2,
            s3,
            c,
            big_g,
        })
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn g(&self) -> &SymTensor2 {
        &self.metric.g
    }

    pub fn weyl(&self) -> Result<&CurvTensor4> {
        self.c.as_ref().ok_or(CurvError::WeylUndefined(self.n()))
    }
}

/// The full curvature package of `spec` at `x`.
pub fn curvature_package(spec: &dyn MetricSpec, x: &[f64]) -> Result<CurvaturePackage> {
    let ch = christoffel(spec, x)?;
    let r = riemann(&ch)?;
    CurvaturePackage::from_riemann(x.to_vec(), ch.metric, ch.gamma, r)
}

/// Maximum of `|g^{hk} C_hijk|` and `|g^{ij} C_hijk|` relative to `max|C|`.
pub fn weyl_trace_defect(pkg: &CurvaturePackage) -> Result<f64> {
    let c = pkg.weyl()?;
    let n = pkg.n();
    let gi = &pkg.metric.g_inv;
    let scale = c.max_abs().max(pkg.r.max_abs()).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let mut t1 = 0.0;
            let mut t2 = 0.0;
            for p in 0..n {
                for q in 0..n {
                    t1 += gi.at(p, q) * c.get([p, a, b, q]);
                    t2 += gi.at(p, q) * c.get([a, p, q, b]);
                }
            }
            worst = worst.max(t1.abs()).max(t2.abs());
        }
    }
    Ok(worst / scale)
}
