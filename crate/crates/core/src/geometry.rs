//! Covariant calculus on a chart: Christoffel symbols, curvature, covariant
//! derivatives of scalars and low-valence tensors, Lie derivatives of the
//! metric, and the Einstein/Killing residuals.
//!
//! Index conventions, fixed once for the whole crate:
//!
//! * `gamma[k][i][j] = Γ^k_ij`, symmetric in `(i, j)`;
//! * curvature `up[l][k][i][j] = R^l_{kij}` with
//!   `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l`; on the unit round sphere this makes
//!   `R(X,Y)Z = g(Y,Z)X - g(X,Z)Y` hold with positive sectional curvature;
//! * covariant derivatives append the differentiation index LAST, so
//!   `ddd[i][j][k]` is `α_{,ijk}` (differentiate in `i` first, `k` last) and
//!   the Hessian is `dd[i][j]`.

use nalgebra::DMatrix;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::fields::{JetTensor, MetricField, ScalarField, Symmetry, TensorData, TensorField,
                    VectorFieldOnChart};
use crate::jet::{seed_positions, Jet};
use crate::linalg;

/// Condition number beyond which a metric matrix is treated as degenerate
/// instead of being silently inverted.
pub const DEGENERACY_COND: f64 = 1e12;

/// Metric component jets together with their inverse, at one seed set.
pub struct MetricJets {
    pub g: Vec<Vec<Jet>>,
    pub g_inv: Vec<Vec<Jet>>,
    pub cond: f64,
}

/// Evaluate the metric on seeds, guard against degeneracy, and invert.
pub fn metric_with_inverse(g: &MetricField, seeds: &[Jet]) -> Result<MetricJets> {
    let jets = g.eval_jets(seeds)?;
    let n = jets.len();
    let values = DMatrix::from_fn(n, n, |i, j| jets[i][j].value());
    let cond = linalg::condition_number(&values);
    if !cond.is_finite() || cond > DEGENERACY_COND {
        let point: Vec<f64> = seeds.iter().map(|s| s.value()).collect();
        return Err(Error::DegenerateMetric { point, cond });
    }
    let g_inv = linalg::invert_jet_matrix(&jets)?;
    Ok(MetricJets {
        g: jets,
        g_inv,
        cond,
    })
}

/// Christoffel symbols `Γ^k_ij` as jets, from caller-provided seeds.
///
/// The seeds must be coordinate jets; their variable ids are recovered from
/// the seeds themselves so the computation stays valid inside a larger
/// variable space.
pub fn christoffel_from_seeds(g: &MetricField, seeds: &[Jet]) -> Result<JetTensor> {
    let vars = seed_positions(seeds)?;
    let mj = metric_with_inverse(g, seeds)?;
    let n = seeds.len();
    if mj.g[0][0].order() < 1 {
        return Err(Error::Capability(
            "metric jets carry no first derivatives".to_string(),
        ));
    }
    // dg[i][j][l] = ∂_l g_ij
    let mut dg = vec![vec![Vec::with_capacity(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                dg[i][j].push(mj.g[i][j].partial(vars[l])?);
            }
        }
    }
    JetTensor::from_fn(n, 3, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let mut acc = Jet::constant(0.0, seeds[0].dim());
        for l in 0..n {
            let inner = dg[j][l][i].add(&dg[i][l][j])?.sub(&dg[i][j][l])?;
            acc = acc.add(&mj.g_inv[k][l].mul(&inner)?)?;
        }
        Ok(acc.scale(0.5))
    })
}

/// Christoffel symbols at a point, with enough jet order left to form their
/// first derivatives.
pub fn christoffel_at(g: &MetricField, p: &[f64]) -> Result<JetTensor> {
    let seeds = g.chart().seeds_at(p)?;
    christoffel_from_seeds(g, &seeds)
}

/// Curvature data at a point.
pub struct CurvatureAt {
    /// `R^l_{kij}`
    pub up: TensorData,
    /// `R_{lkij} = g_{lm} R^m_{kij}`
    pub lowered: TensorData,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub metric: DMatrix<f64>,
}

impl CurvatureAt {
    /// `g(R(X,Y)Z, W)`
    pub fn pairing(&self, w: &[f64], z: &[f64], x: &[f64], y: &[f64]) -> f64 {
        let n = self.lowered.n;
        let mut acc = 0.0;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        acc += self.lowered.get(&[l, k, i, j]) * w[l] * z[k] * x[i] * y[j];
                    }
                }
            }
        }
        acc
    }

    /// Sectional curvature of the plane spanned by `x`, `y`; errors when the
    /// plane is close to degenerate.
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let gxx = quad(&self.metric, x, x);
        let gyy = quad(&self.metric, y, y);
        let gxy = quad(&self.metric, x, y);
        let denom = gxx * gyy - gxy * gxy;
        let scale: f64 = x.iter().map(|v| v * v).sum::<f64>() * y.iter().map(|v| v * v).sum::<f64>();
        if denom.abs() < 1e-4 * scale.max(1e-300) {
            return Err(Error::Argument(
                "sectional curvature of a (nearly) degenerate plane".to_string(),
            ));
        }
        Ok(self.pairing(x, y, x, y) / denom)
    }

    /// Max of the cyclic sum `R^l_{kij} + R^l_{ijk} + R^l_{jki}`.
    pub fn first_bianchi_defect(&self) -> f64 {
        let n = self.up.n;
        let mut worst = 0.0_f64;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let s = self.up.get(&[l, k, i, j])
                            + self.up.get(&[l, i, j, k])
                            + self.up.get(&[l, j, k, i]);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Max of `Ric_ij - Ric_ji`.
    pub fn ricci_asymmetry(&self) -> f64 {
        linalg::max_abs(&(&self.ricci - self.ricci.transpose()))
    }
}

fn quad(m: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += m[(i, j)] * x[i] * y[j];
        }
    }
    acc
}

/// Riemann curvature, Ricci tensor and scalar curvature at a point.
pub fn riemann_at(g: &MetricField, p: &[f64]) -> Result<CurvatureAt> {
    let seeds = g.chart().seeds_at(p)?;
    let vars = seed_positions(&seeds)?;
    let n = seeds.len();
    let gamma = christoffel_from_seeds(g, &seeds)?;
    if gamma.min_order() < 1 {
        return Err(Error::Capability(
            "metric does not carry second derivatives; curvature unavailable".to_string(),
        ));
    }
    // dgamma[k][i][j][l] = ∂_l Γ^k_ij (values)
    let mut dgamma = TensorData::zeros(n, 4);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let jet = gamma.get(&[k, i, j]);
                for l in 0..n {
                    dgamma.set(&[k, i, j, l], jet.partial(vars[l])?.value());
                }
            }
        }
    }
    let gv = gamma.values();
    let up = TensorData::from_fn(n, 4, |idx| {
        let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = dgamma.get(&[l, j, k, i]) - dgamma.get(&[l, i, k, j]);
        for m in 0..n {
            acc += gv.get(&[l, i, m]) * gv.get(&[m, j, k]) - gv.get(&[l, j, m]) * gv.get(&[m, i, k]);
        }
        acc
    });
    let metric = g.matrix_at(p)?;
    let lowered = TensorData::from_fn(n, 4, |idx| {
        let (l, k, i, j) = (idx[0], idx[1], idx[2], idx[3]);
        (0..n).map(|m| metric[(l, m)] * up.get(&[m, k, i, j])).sum()
    });
    let ricci = DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| up.get(&[i, k, i, j])).sum());
    let ginv = metric.clone().try_inverse().ok_or_else(|| Error::DegenerateMetric {
        point: p.to_vec(),
        cond: f64::INFINITY,
    })?;
    let scalar = (0..n)
        .map(|k| (0..n).map(|j| ginv[(k, j)] * ricci[(k, j)]).sum::<f64>())
        .sum();
    Ok(CurvatureAt {
        up,
        lowered,
        ricci,
        scalar,
        metric,
    })
}

/// Gradient of a scalar as a valence-1 tensor field (no connection needed).
pub fn gradient(alpha: &ScalarField) -> TensorField {
    let inner = alpha.clone();
    TensorField::new(
        alpha.chart().clone(),
        1,
        Symmetry::None,
        move |seeds: &[Jet]| {
            let vars = seed_positions(seeds)?;
            let jet = inner.eval_jets(seeds)?;
            if jet.order() < 1 {
                return Err(Error::Capability(
                    "scalar jet carries no first derivatives".to_string(),
                ));
            }
            JetTensor::from_fn(seeds.len(), 1, |idx| jet.partial(vars[idx[0]]))
        },
    )
}

/// Levi-Civita covariant derivative of a covariant tensor field; the new
/// (differentiation) index is appended last.
pub fn covariant_derivative(t: &TensorField, g: &MetricField) -> TensorField {
    let inner = t.clone();
    let metric = g.clone();
    let valence = t.valence();
    TensorField::new(
        t.chart().clone(),
        valence + 1,
        Symmetry::None,
        move |seeds: &[Jet]| {
            let vars = seed_positions(seeds)?;
            let tj = inner.eval_jets(seeds)?;
            if tj.min_order() < 1 {
                return Err(Error::Capability(format!(
                    "valence-{valence} tensor jets carry no derivatives; \
                     covariant derivative unavailable"
                )));
            }
            let gamma = christoffel_from_seeds(&metric, seeds)?;
            let n = seeds.len();
            JetTensor::from_fn(n, valence + 1, |idx| {
                let (head, m) = idx.split_at(valence);
                let m = m[0];
                let mut acc = tj.get(head).partial(vars[m])?;
                let mut swapped = head.to_vec();
                for a in 0..valence {
                    let orig = swapped[a];
                    for lam in 0..n {
                        swapped[a] = lam;
                        acc = acc.sub(&gamma.get(&[lam, m, orig]).mul(tj.get(&swapped))?)?;
                    }
                    swapped[a] = orig;
                }
                Ok(acc)
            })
        },
    )
}

/// First, second and third covariant derivatives of a scalar at a point.
pub struct ScalarDerivatives {
    pub value: f64,
    pub grad: TensorData,
    pub hessian: TensorData,
    pub third: TensorData,
}

pub fn scalar_derivatives(
    alpha: &ScalarField,
    g: &MetricField,
    p: &[f64],
) -> Result<ScalarDerivatives> {
    let d1 = gradient(alpha);
    let d2 = covariant_derivative(&d1, g);
    let d3 = covariant_derivative(&d2, g);
    Ok(ScalarDerivatives {
        value: alpha.value_at(p)?,
        grad: d1.values_at(p)?,
        hessian: d2.values_at(p)?,
        third: d3.values_at(p)?,
    })
}

/// Trace of the covariant Hessian: the Laplace-Beltrami operator, with the
/// sign for which degree-1 sphere harmonics have eigenvalue `-n`.
pub fn laplacian(alpha: &ScalarField, g: &MetricField, p: &[f64]) -> Result<f64> {
    let hess = covariant_derivative(&gradient(alpha), g).values_at(p)?;
    let ginv = g
        .matrix_at(p)?
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric {
            point: p.to_vec(),
            cond: f64::INFINITY,
        })?;
    let n = hess.n;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += ginv[(i, j)] * hess.get(&[i, j]);
        }
    }
    Ok(acc)
}

/// Lie derivative of the metric along `x`, as jets:
/// `(L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k`.
pub fn lie_metric_jets(
    x: &VectorFieldOnChart,
    g: &MetricField,
    seeds: &[Jet],
) -> Result<Vec<Vec<Jet>>> {
    let vars = seed_positions(seeds)?;
    let n = seeds.len();
    let gj = g.eval_jets(seeds)?;
    let xj = x.eval_jets(seeds)?;
    if xj.iter().any(|j| j.order() < 1) || gj[0][0].order() < 1 {
        return Err(Error::Capability(
            "Lie derivative needs first derivatives of both the field and the metric".to_string(),
        ));
    }
    let mut out = vec![vec![Jet::constant(0.0, seeds[0].dim()); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::constant(0.0, seeds[0].dim());
            for k in 0..n {
                acc = acc.add(&xj[k].mul(&gj[i][j].partial(vars[k])?)?)?;
                acc = acc.add(&gj[k][j].mul(&xj[k].partial(vars[i])?)?)?;
                acc = acc.add(&gj[i][k].mul(&xj[k].partial(vars[j])?)?)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Lie derivative of the metric at a point, as a value matrix.
pub fn lie_derivative_metric(
    x: &VectorFieldOnChart,
    g: &MetricField,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    let seeds = g.chart().seeds_at(p)?;
    let jets = lie_metric_jets(x, g, &seeds)?;
    let n = jets.len();
    Ok(DMatrix::from_fn(n, n, |i, j| jets[i][j].value()))
}

/// Max-norm of `Ric - (scal/n) g` at a point; zero iff `g` is Einstein there.
pub fn einstein_residual(g: &MetricField, p: &[f64]) -> Result<f64> {
    let curv = riemann_at(g, p)?;
    let n = g.dim() as f64;
    let dev = &curv.ricci - curv.metric.scale(curv.scalar / n);
    Ok(linalg::max_abs(&dev))
}

/// Max over the sample of the max-norm of `L_X g`.
pub fn killing_residual(
    x: &VectorFieldOnChart,
    g: &MetricField,
    points: &[Vec<f64>],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for p in points {
        worst = worst.max(linalg::max_abs(&lie_derivative_metric(x, g, p)?));
    }
    Ok(worst)
}

/// Metric sanity over a sample: symmetry defect, worst condition number and
/// whether the eigenvalue signs match the declared signature everywhere.
pub struct MetricValidation {
    pub max_asymmetry: f64,
    pub worst_condition: f64,
    pub signature_ok: bool,
}

pub fn validate_metric(g: &MetricField, points: &[Vec<f64>]) -> Result<MetricValidation> {
    let mut max_asym = 0.0_f64;
    let mut worst_cond = 0.0_f64;
    let mut signature_ok = true;
    for p in points {
        let m = g.matrix_at(p)?;
        max_asym = max_asym.max(linalg::max_abs(&(&m - m.transpose())));
        let cond = linalg::condition_number(&m);
        worst_cond = worst_cond.max(cond);
        if cond > DEGENERACY_COND {
            return Err(Error::DegenerateMetric {
                point: p.clone(),
                cond,
            });
        }
        if linalg::signature_of(&m, 0.0) != g.signature() {
            signature_ok = false;
        }
    }
    Ok(MetricValidation {
        max_asymmetry: max_asym,
        worst_condition: worst_cond,
        signature_ok,
    })
}

/// Flat metric of signature `(p, q)` on a chart.
pub fn flat_metric(chart: Chart, p: usize, q: usize) -> MetricField {
    let n = p + q;
    assert_eq!(chart.dim(), n);
    MetricField::new(chart, (p, q), move |seeds| {
        let dim = seeds[0].dim();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = if i != j {
                            0.0
                        } else if i < p {
                            1.0
                        } else {
                            -1.0
                        };
                        Jet::constant(v, dim)
                    })
                    .collect()
            })
            .collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn flat_plane() -> MetricField {
        flat_metric(Chart::boxed("plane", vec![(-5.0, 5.0), (-5.0, 5.0)]), 2, 0)
    }

    #[test]
    fn flat_christoffel_vanishes() {
        let g = flat_plane();
        let gamma = christoffel_at(&g, &[1.3, -0.4]).unwrap().values();
        assert_eq!(gamma.max_abs(), 0.0);
    }

    #[test]
    fn sphere_christoffel_at_origin_and_axis_point() {
        let case = corpus::round_sphere(2).unwrap();
        let gamma0 = christoffel_at(&case.metric, &[0.0, 0.0]).unwrap().values();
        assert!(gamma0.max_abs() < 1e-14);
        // At (1, 0) the conformal factor gives Γ^x_xx = ∂_x log λ = -1.
        let gamma = christoffel_at(&case.metric, &[1.0, 0.0]).unwrap().values();
        assert!((gamma.get(&[0, 0, 0]) + 1.0).abs() < 1e-12);
        // Independent conformal-metric oracle: for g = λ²δ,
        // Γ^k_ij = δ^k_i φ_j + δ^k_j φ_i - δ_ij φ^k with φ = log λ.
        let p = [0.7, -0.3];
        let rho: f64 = p.iter().map(|v| v * v).sum();
        let phi = |i: usize| -2.0 * p[i] / (1.0 + rho);
        let gamma = christoffel_at(&case.metric, &p).unwrap().values();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut expect = 0.0;
                    if k == i {
                        expect += phi(j);
                    }
                    if k == j {
                        expect += phi(i);
                    }
                    if i == j {
                        expect -= phi(k);
                    }
                    assert!(
                        (gamma.get(&[k, i, j]) - expect).abs() < 1e-12,
                        "Γ^{k}_{i}{j}"
                    );
                }
            }
        }
    }

    #[test]
    fn flat_curvature_vanishes() {
        let g = flat_plane();
        let curv = riemann_at(&g, &[0.2, 0.4]).unwrap();
        assert_eq!(curv.up.max_abs(), 0.0);
        assert_eq!(curv.scalar, 0.0);
    }

    #[test]
    fn sphere_sectional_curvature_is_one() {
        let case = corpus::round_sphere(2).unwrap();
        let points = case.chart.sample(7, 50);
        for p in &points {
            let curv = riemann_at(&case.metric, p).unwrap();
            let k = curv.sectional(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
            assert!((k - 1.0).abs() < 1e-9, "K = {k} at {p:?}");
        }
    }

    #[test]
    fn pseudo_sphere_sectional_curvature_is_one() {
        let case = corpus::pseudo_sphere(1, 1).unwrap();
        let points = case.chart.sample(11, 60);
        let dirs = [
            (vec![1.0, 0.0], vec![0.0, 1.0]),
            (vec![1.0, 0.3], vec![-0.2, 1.0]),
        ];
        for p in &points {
            let curv = riemann_at(&case.metric, p).unwrap();
            for (x, y) in &dirs {
                match curv.sectional(x, y) {
                    Ok(k) => assert!((k - 1.0).abs() < 1e-8, "K = {k} at {p:?}"),
                    // Degenerate planes are skipped.
                    Err(_) => continue,
                }
            }
        }
    }

    #[test]
    fn hessian_of_square_on_flat_chart() {
        let g = flat_plane();
        let alpha = ScalarField::new(g.chart().clone(), |s| s[0].mul(&s[0]));
        let hess = covariant_derivative(&gradient(&alpha), &g)
            .values_at(&[0.8, -2.0])
            .unwrap();
        assert_eq!(hess.get(&[0, 0]), 2.0);
        assert_eq!(hess.get(&[0, 1]), 0.0);
        assert_eq!(hess.get(&[1, 1]), 0.0);
    }

    #[test]
    fn constant_scalar_has_zero_gradient() {
        let case = corpus::round_sphere(2).unwrap();
        let alpha = ScalarField::constant(case.chart.clone(), 3.5);
        let grad = gradient(&alpha).values_at(&[0.4, 1.2]).unwrap();
        assert_eq!(grad.max_abs(), 0.0);
    }

    #[test]
    fn obata_identity_for_degree_one_harmonic() {
        let case = corpus::round_sphere(2).unwrap();
        let alpha = &case.scalars["harmonic_deg1"];
        let points = case.chart.sample(42, 200);
        for p in &points {
            let d = scalar_derivatives(alpha, &case.metric, p).unwrap();
            let gm = case.metric.matrix_at(p).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let r = d.hessian.get(&[i, j]) + d.value * gm[(i, j)];
                    assert!(r.abs() < 1e-9, "residual {r} at {p:?}");
                }
            }
        }
    }

    #[test]
    fn hessian_is_symmetric_on_corpus_scalars() {
        let case = corpus::round_sphere(2).unwrap();
        let points = case.chart.sample(3, 50);
        for name in ["harmonic_deg1", "harmonic_deg2"] {
            let alpha = &case.scalars[name];
            let hess = covariant_derivative(&gradient(alpha), &case.metric);
            for p in &points {
                let h = hess.values_at(p).unwrap();
                for i in 0..2 {
                    for j in 0..i {
                        assert!((h.get(&[i, j]) - h.get(&[j, i])).abs() < 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn metric_compatibility_across_the_corpus() {
        let mut metrics: Vec<(String, Chart, MetricField)> = Vec::new();
        for case in [
            corpus::round_sphere(2).unwrap(),
            corpus::bumpy_sphere(2, 0.2).unwrap(),
            corpus::pseudo_sphere(1, 1).unwrap(),
            corpus::flat(1, 1).unwrap(),
        ] {
            metrics.push((case.id.clone(), case.chart.clone(), case.metric.clone()));
        }
        let pair = corpus::beltrami_pair(2, &corpus::default_beltrami_map(2)).unwrap();
        metrics.push((
            "beltrami pullback".to_string(),
            pair.chart.clone(),
            pair.extra_metrics["pullback"].clone(),
        ));
        for (id, chart, metric) in &metrics {
            let dg = covariant_derivative(&TensorField::from_metric(metric), metric);
            for p in chart.sample(5, 100) {
                let defect = dg.values_at(&p).unwrap().max_abs();
                assert!(defect < 1e-11, "{id}: Dg = {defect:.3e} at {p:?}");
            }
        }
    }

    #[test]
    fn shallow_jets_raise_capability_errors() {
        let case = corpus::round_sphere(2).unwrap();
        // A scalar that only vouches for one derivative order: the Hessian
        // needs two, so the second covariant derivative must refuse.
        let shallow = ScalarField::new(case.chart.clone(), |s| {
            Ok(s[0].mul(&s[1])?.with_order(1))
        });
        let grad = gradient(&shallow);
        assert!(grad.values_at(&[0.2, 0.4]).is_ok());
        let hess = covariant_derivative(&grad, &case.metric);
        match hess.values_at(&[0.2, 0.4]) {
            Err(Error::Capability(_)) => {}
            other => panic!("expected a capability error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn lie_derivative_rotation_and_dilation() {
        let g = flat_plane();
        let rot = VectorFieldOnChart::new(g.chart().clone(), |s| {
            Ok(vec![s[1].neg(), s[0].clone()])
        });
        let l = lie_derivative_metric(&rot, &g, &[0.7, 0.2]).unwrap();
        assert!(linalg::max_abs(&l) < 1e-15);

        let dil = VectorFieldOnChart::new(g.chart().clone(), |s| Ok(vec![s[0].clone(), s[1].clone()]));
        let l = lie_derivative_metric(&dil, &g, &[0.7, 0.2]).unwrap();
        let gm = g.matrix_at(&[0.7, 0.2]).unwrap();
        assert!(linalg::max_abs(&(&l - gm.scale(2.0))) < 1e-14);
    }

    #[test]
    fn lie_derivative_matches_flow_pullback() {
        // Independent oracle: pull the metric back along the numerically
        // integrated flow of the field and difference in the flow time,
        // (φ_t^* g - φ_{-t}^* g) / 2t with t = 1e-4; flow-map Jacobians by
        // central differences.
        let case = corpus::round_sphere(2).unwrap();
        let x_field = &case.vectors["sl3_projective"];
        let g = &case.metric;
        let t = 1e-4;
        let flow = |start: &[f64], time: f64| -> Vec<f64> {
            // A few classical steps are plenty over such a short time.
            let mut y = start.to_vec();
            let steps = 4;
            let h = time / steps as f64;
            for _ in 0..steps {
                let f = |p: &Vec<f64>| x_field.values_at(p).unwrap();
                let k1 = f(&y);
                let y2: Vec<f64> = (0..2).map(|i| y[i] + 0.5 * h * k1[i]).collect();
                let k2 = f(&y2);
                let y3: Vec<f64> = (0..2).map(|i| y[i] + 0.5 * h * k2[i]).collect();
                let k3 = f(&y3);
                let y4: Vec<f64> = (0..2).map(|i| y[i] + h * k3[i]).collect();
                let k4 = f(&y4);
                for i in 0..2 {
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            y
        };
        let pullback = |p: &[f64], time: f64| -> DMatrix<f64> {
            let delta = 1e-5;
            let mut jac = DMatrix::zeros(2, 2);
            for col in 0..2 {
                let mut plus = p.to_vec();
                plus[col] += delta;
                let mut minus = p.to_vec();
                minus[col] -= delta;
                let fp = flow(&plus, time);
                let fm = flow(&minus, time);
                for row in 0..2 {
                    jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * delta);
                }
            }
            let gm = g.matrix_at(&flow(p, time)).unwrap();
            jac.transpose() * gm * jac
        };
        for p in case.chart.sample(31, 10) {
            let oracle = (pullback(&p, t) - pullback(&p, -t)).scale(1.0 / (2.0 * t));
            let exact = lie_derivative_metric(x_field, g, &p).unwrap();
            let scale = linalg::max_abs(&exact).max(1.0);
            let dev = linalg::max_abs(&(&exact - &oracle));
            assert!(dev < 1e-5 * scale, "flow-pullback mismatch {dev:.3e} at {p:?}");
            assert!(linalg::max_abs(&exact) > 1e-2, "field should not be Killing");
        }
    }

    #[test]
    fn einstein_residuals() {
        let s3 = corpus::round_sphere(3).unwrap();
        for p in s3.chart.sample(9, 20) {
            assert!(einstein_residual(&s3.metric, &p).unwrap() < 1e-9);
        }
        let flat = flat_plane();
        assert!(einstein_residual(&flat, &[0.1, 0.2]).unwrap() < 1e-15);
        let bumpy = corpus::bumpy_sphere(3, 0.15).unwrap();
        let worst = bumpy
            .chart
            .sample(5, 40)
            .iter()
            .map(|p| einstein_residual(&bumpy.metric, p).unwrap())
            .fold(0.0_f64, f64::max);
        assert!(worst > 1e-3, "bumpy sphere looked Einstein: {worst}");
    }

    #[test]
    fn killing_residuals() {
        let s2 = corpus::round_sphere(2).unwrap();
        let points = s2.chart.sample(21, 60);
        let rot = &s2.vectors["rotation_xy"];
        assert!(killing_residual(rot, &s2.metric, &points).unwrap() < 1e-10);
        let proj = &s2.vectors["sl3_projective"];
        assert!(killing_residual(proj, &s2.metric, &points).unwrap() > 1e-2);

        let flat = flat_plane();
        let dil =
            VectorFieldOnChart::new(flat.chart().clone(), |s| Ok(vec![s[0].clone(), s[1].clone()]));
        for p in flat.chart().sample(3, 10) {
            let l = lie_derivative_metric(&dil, &flat, &p).unwrap();
            assert!((linalg::max_abs(&l) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_metric_reports_condition_number() {
        let chart = Chart::boxed("strip", vec![(-1.0, 1.0), (-1.0, 1.0)]);
        let g = MetricField::new(chart, (2, 0), |seeds| {
            let dim = seeds[0].dim();
            // g = diag(x^2 + tiny, 1): near-singular at x ~ 0.
            Ok(vec![
                vec![seeds[0].mul(&seeds[0])?.add_scalar(1e-16), Jet::constant(0.0, dim)],
                vec![Jet::constant(0.0, dim), Jet::constant(1.0, dim)],
            ])
        });
        match christoffel_at(&g, &[1e-9, 0.0]) {
            Err(Error::DegenerateMetric { cond, .. }) => assert!(cond > DEGENERACY_COND),
            other => panic!("expected degeneracy error, got {other:?}"),
        }
    }

    #[test]
    fn bianchi_and_ricci_symmetry_on_bumpy_sphere() {
        let bumpy = corpus::bumpy_sphere(2, 0.2).unwrap();
        for p in bumpy.chart.sample(13, 30) {
            let curv = riemann_at(&bumpy.metric, &p).unwrap();
            assert!(curv.first_bianchi_defect() < 1e-10);
            assert!(curv.ricci_asymmetry() < 1e-10);
        }
    }

    #[test]
    fn convention_lock_positive_sectional_pairing() {
        // R(X,Y,Y,X) > 0 for orthonormal X, Y on the round sphere pins the
        // curvature sign convention used by the cone identity.
        let case = corpus::round_sphere(2).unwrap();
        let p = [0.3, -0.8];
        let curv = riemann_at(&case.metric, &p).unwrap();
        let lambda = curv.metric[(0, 0)].sqrt();
        let x = [1.0 / lambda, 0.0];
        let y = [0.0, 1.0 / lambda];
        // g(R(X,Y)Y, X) with the pairing signature (W, Z, X, Y).
        assert!(curv.pairing(&x, &y, &x, &y) > 0.9);
    }
}
