//! The metric cone over a chart and its identity checks.
//!
//! The cone over `(M, g)` is the chart `(r, x^1, ..., x^n)` with metric
//! `dr^2 + r^2 g`.  A positive lower bound on `r` keeps the apex and its
//! floating-point blowup out of every sample, and the identities under test
//! are scale-covariant, so the default annulus `r in [0.5, 2]` loses nothing.
//!
//! The checks implemented here compare two independent computation paths:
//! the generic covariant machinery applied to the cone metric on one side,
//! and closed-form expressions assembled from base-chart data on the other.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::fields::{JetTensor, MetricField, ScalarField, Symmetry, TensorData, TensorField};
use crate::geometry;
use crate::jet::Jet;
use crate::linalg;
use crate::report::PointMax;

/// Default radial annulus.
pub const DEFAULT_R_RANGE: (f64, f64) = (0.5, 2.0);

/// The `(r, x)` chart over a base chart, carrying `dr^2 + r^2 g`.
#[derive(Clone)]
pub struct ConeChart {
    pub base_chart: Chart,
    pub base_metric: MetricField,
    pub chart: Chart,
    pub metric: MetricField,
    pub r_range: (f64, f64),
}

impl ConeChart {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Split a cone point into `(r, base point)`.
    pub fn split<'p>(&self, p: &'p [f64]) -> (f64, &'p [f64]) {
        (p[0], &p[1..])
    }
}

/// Build the cone chart and metric over a base chart.
pub fn build_cone(
    base_chart: &Chart,
    g: &MetricField,
    r_range: (f64, f64),
) -> Result<ConeChart> {
    if !(r_range.0 > 0.0 && r_range.1 > r_range.0) {
        return Err(Error::Argument(format!(
            "cone radius range {r_range:?} must be a positive interval bounded away from 0"
        )));
    }
    let n = base_chart.dim();
    let mut sample_box = Vec::with_capacity(n + 1);
    sample_box.push(r_range);
    sample_box.extend_from_slice(base_chart.sample_box());
    let base_for_domain = base_chart.clone();
    let chart = Chart::new(
        format!("cone({})", base_chart.name()),
        sample_box,
        move |p| p[0] > 0.0 && base_for_domain.contains(&p[1..]),
    );
    let base_g = g.clone();
    let (p_sig, q_sig) = g.signature();
    let metric = MetricField::new(chart.clone(), (p_sig + 1, q_sig), move |seeds: &[Jet]| {
        let dim = seeds[0].dim();
        let r = &seeds[0];
        let r2 = r.mul(r)?;
        let base = base_g.eval_jets(&seeds[1..])?;
        let n = base.len();
        let mut rows = Vec::with_capacity(n + 1);
        let mut top = vec![Jet::constant(0.0, dim); n + 1];
        top[0] = Jet::constant(1.0, dim);
        rows.push(top);
        for i in 0..n {
            let mut row = Vec::with_capacity(n + 1);
            row.push(Jet::constant(0.0, dim));
            for j in 0..n {
                row.push(r2.mul(&base[i][j])?);
            }
            rows.push(row);
        }
        Ok(rows)
    });
    Ok(ConeChart {
        base_chart: base_chart.clone(),
        base_metric: g.clone(),
        chart,
        metric,
        r_range,
    })
}

/// A base scalar together with its quadratic lift `A(r, m) = r^2 a(m)`.
#[derive(Clone)]
pub struct LiftedFunction {
    pub base: ScalarField,
    pub lifted: ScalarField,
}

pub fn lift_scalar(cone: &ConeChart, alpha: &ScalarField) -> LiftedFunction {
    let base = alpha.clone();
    let inner = alpha.clone();
    let lifted = ScalarField::new(cone.chart.clone(), move |seeds: &[Jet]| {
        let r = &seeds[0];
        let a = inner.eval_jets(&seeds[1..])?;
        r.mul(r)?.mul(&a)
    });
    LiftedFunction {
        base,
        lifted,
    }
}

/// Two-path check of the cone connection: Christoffel symbols of the cone
/// metric against the closed forms
/// `Γ^0_ab = -r g_ab`, `Γ^b_0a = δ^b_a / r`, `Γ^c_ab = Γ^c_ab(base)`,
/// all radial-only symbols zero.
pub fn verify_cone_connection(cone: &ConeChart, points: &[Vec<f64>]) -> Result<PointMax> {
    let n = cone.base_chart.dim();
    let mut dev = PointMax::new();
    for p in points {
        let (r, x) = cone.split(p);
        let hat = geometry::christoffel_at(&cone.metric, p)?.values();
        let base = geometry::christoffel_at(&cone.base_metric, x)?.values();
        let gm = cone.base_metric.matrix_at(x)?;
        let mut worst = 0.0_f64;
        for k in 0..=n {
            for i in 0..=n {
                for j in 0..=n {
                    let expect = match (k, i, j) {
                        // All symbols touching only the radial slot vanish,
                        // and so do mixed upper-radial ones.
                        (0, 0, _) | (0, _, 0) | (_, 0, 0) => 0.0,
                        (0, _, _) => -r * gm[(i - 1, j - 1)],
                        // Γ^c_0a = Γ^c_a0 = δ^c_a / r
                        (_, 0, _) => {
                            if k == j {
                                1.0 / r
                            } else {
                                0.0
                            }
                        }
                        (_, _, 0) => {
                            if k == i {
                                1.0 / r
                            } else {
                                0.0
                            }
                        }
                        _ => base.get(&[k - 1, i - 1, j - 1]),
                    };
                    worst = worst.max((hat.get(&[k, i, j]) - expect).abs());
                }
            }
        }
        dev.observe(p, worst);
    }
    Ok(dev)
}

/// Cone Hessian of a lift at one point, with the residuals of the three
/// slot identities it must satisfy:
/// `DDA(∂_r, Z/r) = Da(Z)`, `DDA(∂_r, ∂_r) = 2a`,
/// `DDA(Y/r, Z/r) = DDa(Y,Z) + 2 g(Y,Z) a`.
pub struct HessianOfLift {
    pub hessian: TensorData,
    pub radial_mixed: f64,
    pub radial_radial: f64,
    pub base_block: f64,
}

pub fn hessian_of_lift(
    lf: &LiftedFunction,
    cone: &ConeChart,
    p: &[f64],
) -> Result<HessianOfLift> {
    let (r, x) = cone.split(p);
    let hess = geometry::covariant_derivative(&geometry::gradient(&lf.lifted), &cone.metric)
        .values_at(p)?;
    let base = geometry::scalar_derivatives(&lf.base, &cone.base_metric, x)?;
    let gm = cone.base_metric.matrix_at(x)?;
    let n = cone.base_chart.dim();

    let mut radial_mixed = 0.0_f64;
    for a in 0..n {
        radial_mixed =
            radial_mixed.max((hess.get(&[0, a + 1]) / r - base.grad.get(&[a])).abs());
        radial_mixed =
            radial_mixed.max((hess.get(&[a + 1, 0]) / r - base.grad.get(&[a])).abs());
    }
    let radial_radial = (hess.get(&[0, 0]) - 2.0 * base.value).abs();
    let mut base_block = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let lhs = hess.get(&[a + 1, b + 1]) / (r * r);
            let rhs = base.hessian.get(&[a, b]) + 2.0 * gm[(a, b)] * base.value;
            base_block = base_block.max((lhs - rhs).abs());
        }
    }
    Ok(HessianOfLift {
        hessian: hess,
        radial_mixed,
        radial_radial,
        base_block,
    })
}

/// Max over the sample, and over all index triples, of the third covariant
/// derivative of the lift.  Small iff the base scalar solves the
/// third-order equation with c = 1.
pub fn parallel_hessian_residual(
    lf: &LiftedFunction,
    cone: &ConeChart,
    points: &[Vec<f64>],
) -> Result<PointMax> {
    let third = geometry::covariant_derivative(
        &geometry::covariant_derivative(&geometry::gradient(&lf.lifted), &cone.metric),
        &cone.metric,
    );
    let mut dev = PointMax::new();
    for p in points {
        dev.observe(p, third.values_at(p)?.max_abs());
    }
    Ok(dev)
}

/// Everything `extract_from_parallel` measures.
pub struct Extraction {
    pub alpha: ScalarField,
    pub alpha_values: Vec<f64>,
    pub alpha_spread: f64,
    pub parallel_defect: PointMax,
    pub r_spread: f64,
    pub identity1: PointMax,
    pub identity2: PointMax,
    /// False when the tensor's jets do not support differentiating the
    /// recovered scalar twice (identity 2 needs its Hessian); closed-form
    /// inputs always support it.
    pub identity2_checked: bool,
    pub identity3: PointMax,
    /// Pointwise proportionality defect `max |T - a(m) g|`; large somewhere
    /// iff the tensor is not proportional to the cone metric.
    pub proportionality_defect: PointMax,
}

/// Recover the base function from a parallel symmetric (0,2)-tensor on the
/// cone (`a := T(∂_r, ∂_r)`) and verify the slot identities that tie the
/// tensor to the derivatives of `a`:
///
/// 1. `2 T(∂_r, X) = r Da(X)`
/// 2. `2 T(X, Y) = r^2 (2 a g(X,Y) + DDa(X,Y))`
/// 3. `2 DT(X,Y,Z) = -Da(Y) g(X,Z) - Da(Z) g(X,Y)` on the slice `r = 1`
///
/// plus `a` not depending on `r` and `a` constant iff `T` is proportional
/// to the cone metric.  Parallelity of the input is verified first; if it
/// fails the stated tolerance no extraction is attempted.
pub fn extract_from_parallel(
    t_hat: &TensorField,
    cone: &ConeChart,
    seed: u64,
    sample: usize,
    parallel_tol: f64,
) -> Result<Extraction> {
    let cone_points = cone.chart.sample(seed, sample);
    let base_points = cone.base_chart.sample(seed ^ 0x5eed, sample);
    let n = cone.base_chart.dim();

    let mut parallel_defect = PointMax::new();
    let dt = geometry::covariant_derivative(t_hat, &cone.metric);
    for p in &cone_points {
        parallel_defect.observe(p, dt.values_at(p)?.max_abs());
    }
    if parallel_defect.max > parallel_tol {
        return Err(Error::Precondition(format!(
            "tensor is not parallel: max |DT| = {:.3e} at {:?} exceeds {parallel_tol:.1e}",
            parallel_defect.max, parallel_defect.worst
        )));
    }

    // a(m) := T(∂_r, ∂_r) evaluated on the slice r = 1.
    let inner = t_hat.clone();
    let alpha = ScalarField::new(cone.base_chart.clone(), move |seeds: &[Jet]| {
        let dim = seeds[0].dim();
        let mut full = Vec::with_capacity(seeds.len() + 1);
        full.push(Jet::constant(1.0, dim));
        full.extend_from_slice(seeds);
        Ok(inner.eval_jets(&full)?.get(&[0, 0]).clone())
    });

    // r-independence of a across the annulus.
    let r_grid: Vec<f64> = (0..5)
        .map(|k| cone.r_range.0 + (cone.r_range.1 - cone.r_range.0) * k as f64 / 4.0)
        .collect();
    let mut r_spread = 0.0_f64;
    for x in &base_points {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &r in &r_grid {
            let mut p = vec![r];
            p.extend_from_slice(x);
            let v = t_hat.values_at(&p)?.get(&[0, 0]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        r_spread = r_spread.max(hi - lo);
    }

    // What the recovered scalar's jets can support: the radial identity
    // needs one derivative, the base-block identity needs its Hessian.
    let alpha_order = alpha.jet_at(&base_points[0])?.order();
    if alpha_order < 1 {
        return Err(Error::Capability(
            "recovered scalar carries no derivatives; tensor jets are too shallow".to_string(),
        ));
    }
    let identity2_checked = alpha_order >= 2;
    let grad_field = geometry::gradient(&alpha);
    let hess_field = geometry::covariant_derivative(&grad_field, &cone.base_metric);

    let mut identity1 = PointMax::new();
    let mut identity2 = PointMax::new();
    let mut proportionality = PointMax::new();
    let mut alpha_values = Vec::with_capacity(base_points.len());
    for p in &cone_points {
        let (r, x) = cone.split(p);
        let t = t_hat.values_at(p)?;
        let value = alpha.value_at(x)?;
        let grad = grad_field.values_at(x)?;
        let gm = cone.base_metric.matrix_at(x)?;
        let ghat = cone.metric.matrix_at(p)?;
        let mut worst1 = 0.0_f64;
        for a in 0..n {
            worst1 = worst1.max((2.0 * t.get(&[0, a + 1]) - r * grad.get(&[a])).abs());
        }
        identity1.observe(p, worst1);
        if identity2_checked {
            let hessian = hess_field.values_at(x)?;
            let mut worst2 = 0.0_f64;
            for a in 0..n {
                for b in 0..n {
                    let rhs = r * r * (2.0 * value * gm[(a, b)] + hessian.get(&[a, b]));
                    worst2 = worst2.max((2.0 * t.get(&[a + 1, b + 1])).sub_checked(rhs));
                }
            }
            identity2.observe(p, worst2);
        }
        let mut prop = 0.0_f64;
        for i in 0..=n {
            for j in 0..=n {
                prop = prop.max((t.get(&[i, j]) - value * ghat[(i, j)]).abs());
            }
        }
        proportionality.observe(p, prop);
    }

    let mut alpha_lo = f64::INFINITY;
    let mut alpha_hi = f64::NEG_INFINITY;
    for x in &base_points {
        let v = alpha.value_at(x)?;
        alpha_values.push(v);
        alpha_lo = alpha_lo.min(v);
        alpha_hi = alpha_hi.max(v);
    }

    // Identity (3) on the slice r = 1.
    let slice = t_hat.clone();
    let base_t = TensorField::new(
        cone.base_chart.clone(),
        2,
        Symmetry::Symmetric,
        move |seeds: &[Jet]| {
            let dim = seeds[0].dim();
            let mut full = Vec::with_capacity(seeds.len() + 1);
            full.push(Jet::constant(1.0, dim));
            full.extend_from_slice(seeds);
            let t = slice.eval_jets(&full)?;
            JetTensor::from_fn(seeds.len(), 2, |idx| {
                Ok(t.get(&[idx[0] + 1, idx[1] + 1]).clone())
            })
        },
    );
    let dt_base = geometry::covariant_derivative(&base_t, &cone.base_metric);
    let mut identity3 = PointMax::new();
    for x in &base_points {
        let dt = dt_base.values_at(x)?;
        let grad = grad_field.values_at(x)?;
        let gm = cone.base_metric.matrix_at(x)?;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = 2.0 * dt.get(&[a, b, c]);
                    let rhs = -grad.get(&[a]) * gm[(c, b)] - grad.get(&[b]) * gm[(c, a)];
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        identity3.observe(x, worst);
    }

    Ok(Extraction {
        alpha,
        alpha_values,
        alpha_spread: alpha_hi - alpha_lo,
        parallel_defect,
        r_spread,
        identity1,
        identity2,
        identity2_checked,
        identity3,
        proportionality_defect: proportionality,
    })
}

/// Newton descent on the coordinate gradient of a scalar, with a
/// pseudo-inverse step so degenerate Hessians (critical submanifolds) still
/// converge.  Returns the refined point and its gradient norm when the
/// descent lands below the cut inside the chart domain.
fn refine_critical_point(
    alpha: &ScalarField,
    start: &[f64],
    cut: f64,
) -> Result<Option<(Vec<f64>, f64)>> {
    let n = start.len();
    let mut x = start.to_vec();
    for _ in 0..40 {
        if !alpha.chart().contains(&x) {
            return Ok(None);
        }
        let jet = alpha.jet_at(&x)?;
        let grad = jet.gradient();
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < cut.min(1e-9) {
            return Ok(Some((x, norm)));
        }
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut mi = vec![0u8; n];
                mi[i] += 1;
                mi[j] += 1;
                hess[(i, j)] = jet.extract_partial(&mi)?;
            }
        }
        let svd = hess.svd(true, true);
        let rhs = nalgebra::DVector::from_vec(grad);
        let Ok(step) = svd.solve(&rhs, 1e-8) else {
            return Ok(None);
        };
        let mut step_norm = 0.0_f64;
        for i in 0..n {
            x[i] -= step[i];
            step_norm += step[i] * step[i];
        }
        if step_norm.sqrt() > 2.0 {
            // Diverging; this candidate is not near a critical point.
            return Ok(None);
        }
    }
    let jet = alpha.jet_at(&x)?;
    let norm = jet.gradient().iter().map(|g| g * g).sum::<f64>().sqrt();
    if alpha.chart().contains(&x) && norm < cut {
        Ok(Some((x, norm)))
    } else {
        Ok(None)
    }
}

trait SubChecked {
    fn sub_checked(self, rhs: f64) -> f64;
}

impl SubChecked for f64 {
    fn sub_checked(self, rhs: f64) -> f64 {
        (self - rhs).abs()
    }
}

/// Two-path curvature check on the cone: the curvature of the cone metric
/// against `R(X,Y)Z - g(Y,Z)X + g(X,Z)Y` assembled from base data (zero in
/// every slot touching `∂_r`).  Also reports the size of the cone curvature
/// itself, so constant-curvature-1 bases certify flat cones.
pub struct ConeCurvature {
    pub identity_dev: PointMax,
    pub rhat_norm: PointMax,
}

pub fn cone_curvature_check(cone: &ConeChart, points: &[Vec<f64>]) -> Result<ConeCurvature> {
    let n = cone.base_chart.dim();
    let mut identity_dev = PointMax::new();
    let mut rhat_norm = PointMax::new();
    for p in points {
        let (_r, x) = cone.split(p);
        let hat = geometry::riemann_at(&cone.metric, p)?;
        let base = geometry::riemann_at(&cone.base_metric, x)?;
        let gm = &base.metric;
        let mut worst = 0.0_f64;
        for l in 0..=n {
            for k in 0..=n {
                for i in 0..=n {
                    for j in 0..=n {
                        let expect = if l == 0 || k == 0 || i == 0 || j == 0 {
                            0.0
                        } else {
                            let (l, k, i, j) = (l - 1, k - 1, i - 1, j - 1);
                            let mut v = base.up.get(&[l, k, i, j]);
                            if l == i {
                                v -= gm[(k, j)];
                            }
                            if l == j {
                                v += gm[(k, i)];
                            }
                            v
                        };
                        worst = worst.max((hat.up.get(&[l, k, i, j]) - expect).abs());
                    }
                }
            }
        }
        identity_dev.observe(p, worst);
        rhat_norm.observe(p, hat.up.max_abs());
    }
    Ok(ConeCurvature {
        identity_dev,
        rhat_norm,
    })
}

/// Field of projector matrices in cone coordinates (a (1,1)-tensor).
pub type ProjectorField = Arc<dyn Fn(&[Jet]) -> Result<Vec<Vec<Jet>>> + Send + Sync>;

pub struct SplittingOptions {
    pub seed: u64,
    pub cone_points: usize,
    /// Sample size of the critical-point scan over the base chart.
    pub critical_scan: usize,
    /// Keep base points with gradient norm below this as critical candidates.
    pub gradient_cut: f64,
}

impl Default for SplittingOptions {
    fn default() -> Self {
        SplittingOptions {
            seed: 42,
            cone_points: 100,
            critical_scan: 5000,
            gradient_cut: 1e-5,
        }
    }
}

/// Splitting tensors of a distribution pair on the cone.
pub struct Splitting {
    pub t1: TensorField,
    pub t2: TensorField,
    pub alpha1: ScalarField,
    pub alpha2: ScalarField,
    /// `max |T1 + T2 - g|` over the sample (zero by construction, verified).
    pub sum_defect: f64,
    /// `max |a1 + a2 - 1|` over the sample.
    pub alpha_sum_defect: f64,
    /// Worst defect of `P^2 = P` and cone-metric self-adjointness.
    pub projector_defect: f64,
    pub t1_parallel: PointMax,
    pub t2_parallel: PointMax,
    pub alpha1_range: (f64, f64),
    /// `(base point, |Da1|, a1)` at near-critical samples.
    pub near_critical: Vec<(Vec<f64>, f64, f64)>,
    /// Max distance of near-critical values of `a1` from {0, 1}.
    pub critical_value_defect: f64,
    /// Min eigenvalue of either splitting tensor over the sample.
    pub psd_min_eigenvalue: f64,
}

/// Build `T_i(u, v) = g(P_i u, v)` for a projector field and its complement
/// and verify the algebraic and spectral properties the pair must satisfy.
pub fn splitting_tensors(
    cone: &ConeChart,
    projector: ProjectorField,
    opts: &SplittingOptions,
) -> Result<Splitting> {
    let dim = cone.dim();
    let cone_points = cone.chart.sample(opts.seed, opts.cone_points);

    // Projector sanity: idempotent, cone-metric self-adjoint, nondegenerate
    // range.
    let mut projector_defect = 0.0_f64;
    for p in &cone_points {
        let seeds = cone.chart.seeds_at(p)?;
        let pj = projector(&seeds)?;
        let pv = DMatrix::from_fn(dim, dim, |i, j| pj[i][j].value());
        let idem = &pv * &pv - &pv;
        projector_defect = projector_defect.max(linalg::max_abs(&idem));
        let gm = cone.metric.matrix_at(p)?;
        let gp = &gm * &pv;
        projector_defect = projector_defect.max(linalg::max_abs(&(&gp - gp.transpose())));
        let rank = pv.trace().round() as usize;
        if rank == 0 || rank > dim {
            return Err(Error::Argument(format!(
                "projector trace {} is not a valid rank",
                pv.trace()
            )));
        }
        // Nondegeneracy of the range with respect to the cone metric.
        let qr = pv.clone().qr();
        let q = qr.q();
        let basis = q.columns(0, rank).into_owned();
        let gram = basis.transpose() * &gm * &basis;
        let cond = linalg::condition_number(&gram);
        if cond > 1e8 {
            return Err(Error::DegenerateMetric {
                point: p.clone(),
                cond,
            });
        }
    }
    if projector_defect > 1e-10 {
        return Err(Error::Argument(format!(
            "projector field is not a metric-orthogonal idempotent (defect {projector_defect:.3e})"
        )));
    }

    let ghat = cone.metric.clone();
    let proj = projector.clone();
    let t1 = TensorField::new(
        cone.chart.clone(),
        2,
        Symmetry::Symmetric,
        move |seeds: &[Jet]| {
            let g = ghat.eval_jets(seeds)?;
            let pj = proj(seeds)?;
            let n = g.len();
            // T1_{mu nu} = g_{lam nu} P^lam_mu
            JetTensor::from_fn(n, 2, |idx| {
                let (mu, nu) = (idx[0], idx[1]);
                let mut acc = Jet::constant(0.0, seeds[0].dim());
                for lam in 0..n {
                    acc = acc.add(&g[lam][nu].mul(&pj[lam][mu])?)?;
                }
                Ok(acc)
            })
        },
    );
    let t2 = TensorField::from_metric(&cone.metric).combine(1.0, &t1, -1.0)?;

    let alpha_of = |t: &TensorField| -> ScalarField {
        let inner = t.clone();
        ScalarField::new(cone.base_chart.clone(), move |seeds: &[Jet]| {
            let dim = seeds[0].dim();
            let mut full = Vec::with_capacity(seeds.len() + 1);
            full.push(Jet::constant(1.0, dim));
            full.extend_from_slice(seeds);
            Ok(inner.eval_jets(&full)?.get(&[0, 0]).clone())
        })
    };
    let alpha1 = alpha_of(&t1);
    let alpha2 = alpha_of(&t2);

    let mut sum_defect = 0.0_f64;
    let mut alpha_sum_defect = 0.0_f64;
    let mut psd_min = f64::INFINITY;
    let mut t1_parallel = PointMax::new();
    let mut t2_parallel = PointMax::new();
    let dt1 = geometry::covariant_derivative(&t1, &cone.metric);
    let dt2 = geometry::covariant_derivative(&t2, &cone.metric);
    for p in &cone_points {
        let v1 = t1.matrix_at(p)?;
        let v2 = t2.matrix_at(p)?;
        let gm = cone.metric.matrix_at(p)?;
        sum_defect = sum_defect.max(linalg::max_abs(&(&v1 + &v2 - gm)));
        for m in [&v1, &v2] {
            let ev = linalg::sym_eigenvalues(m);
            psd_min = psd_min.min(ev[0]);
        }
        t1_parallel.observe(p, dt1.values_at(p)?.max_abs());
        t2_parallel.observe(p, dt2.values_at(p)?.max_abs());
        let x = &p[1..];
        let sum = alpha1.value_at(x)? + alpha2.value_at(x)?;
        alpha_sum_defect = alpha_sum_defect.max((sum - 1.0).abs());
    }

    // Range of a1 over a dense base scan; the best scan points seed a
    // Newton descent towards genuine critical points (the raw sample alone
    // essentially never lands below the gradient cut).
    let scan = cone.base_chart.sample(opts.seed ^ 0xa1fa, opts.critical_scan);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for x in &scan {
        let jet = alpha1.jet_at(x)?;
        lo = lo.min(jet.value());
        hi = hi.max(jet.value());
        let norm = jet.gradient().iter().map(|g| g * g).sum::<f64>().sqrt();
        candidates.push((norm, x.clone()));
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    candidates.truncate(60);
    let mut near_critical = Vec::new();
    let mut critical_value_defect = 0.0_f64;
    for (_, start) in &candidates {
        if let Some((x, norm)) = refine_critical_point(&alpha1, start, opts.gradient_cut)? {
            let v = alpha1.value_at(&x)?;
            let dist = v.abs().min((v - 1.0).abs());
            critical_value_defect = critical_value_defect.max(dist);
            near_critical.push((x, norm, v));
        }
    }

    Ok(Splitting {
        t1,
        t2,
        alpha1,
        alpha2,
        sum_defect,
        alpha_sum_defect,
        projector_defect,
        t1_parallel,
        t2_parallel,
        alpha1_range: (lo, hi),
        near_critical,
        critical_value_defect,
        psd_min_eigenvalue: psd_min,
    })
}
