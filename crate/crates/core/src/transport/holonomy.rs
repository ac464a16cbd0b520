//! Parallel transport along curves and holonomy of loops.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fields::MetricField;
use crate::geometry;
use crate::linalg;
use crate::transport::curves::CurveSegment;

/// What can be carried by parallel transport.
#[derive(Clone, Debug)]
pub enum TransportedObject {
    Vector(Vec<f64>),
    /// Covariant symmetric or general (0,2)-tensor components.
    Bilinear(DMatrix<f64>),
    /// (1,1)-tensor components (e.g. a projector).
    Endomorphism(DMatrix<f64>),
}

/// Connection coefficient matrix `A^k_j(t) = -Γ^k_{ij}(x(t)) ẋ^i(t)`; the
/// transport equations read `u' = A u`, `T' = -(AᵀT + TA)`, `P' = AP - PA`.
fn connection_matrix(g: &MetricField, curve: &CurveSegment, t: f64) -> Result<DMatrix<f64>> {
    let (x, v) = curve.point_and_velocity(t);
    let gamma = geometry::christoffel_at(g, &x)?.values();
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |k, j| {
        -(0..n).map(|i| gamma.get(&[k, i, j]) * v[i]).sum::<f64>()
    }))
}

fn transport_derivative(a: &DMatrix<f64>, u: &DMatrix<f64>, obj: &TransportedObject) -> DMatrix<f64> {
    match obj {
        TransportedObject::Vector(_) => a * u,
        TransportedObject::Bilinear(_) => -(a.transpose() * u + u * a),
        TransportedObject::Endomorphism(_) => a * u - u * a,
    }
}

fn as_matrix(obj: &TransportedObject) -> DMatrix<f64> {
    match obj {
        TransportedObject::Vector(v) => DMatrix::from_column_slice(v.len(), 1, v),
        TransportedObject::Bilinear(m) | TransportedObject::Endomorphism(m) => m.clone(),
    }
}

fn from_matrix(template: &TransportedObject, m: DMatrix<f64>) -> TransportedObject {
    match template {
        TransportedObject::Vector(_) => {
            TransportedObject::Vector(m.column(0).iter().copied().collect())
        }
        TransportedObject::Bilinear(_) => TransportedObject::Bilinear(m),
        TransportedObject::Endomorphism(_) => TransportedObject::Endomorphism(m),
    }
}

/// Transport the components of `start` along the curve, returning the raw
/// matrix state.
pub fn transport_matrix(
    g: &MetricField,
    curve: &CurveSegment,
    start: &TransportedObject,
    steps: usize,
) -> Result<DMatrix<f64>> {
    transport_matrix_from(g, curve, start, as_matrix(start), steps)
}

/// The integrator behind all transports: classical 4th-order steps on the
/// linear equation selected by the `template` kind, starting from `u0`.
///
/// Stage times are clamped strictly inside each breakpoint window: curve
/// evaluation exactly at a corner parameter is side-ambiguous in floating
/// point, and one wrong-sided velocity in a boundary stage costs O(h)
/// accuracy.  The clamp perturbs the stage time by ~1e-12 of the window,
/// far below the integration error.
fn transport_matrix_from(
    g: &MetricField,
    curve: &CurveSegment,
    template: &TransportedObject,
    u0: DMatrix<f64>,
    steps: usize,
) -> Result<DMatrix<f64>> {
    if steps == 0 {
        return Err(Error::Argument("transport needs at least one step".into()));
    }
    let start = template;
    let mut u = u0;
    let breaks = curve.breakpoints().to_vec();
    for window in breaks.windows(2) {
        let (t0, t1) = (window[0], window[1]);
        let span = t1 - t0;
        if span <= 0.0 {
            continue;
        }
        let local_steps = ((steps as f64 * span).ceil() as usize).max(1);
        let h = span / local_steps as f64;
        let inset = 1e-12 * span;
        let stage = |t: f64| -> Result<DMatrix<f64>> {
            connection_matrix(g, curve, t.clamp(t0 + inset, t1 - inset))
        };
        for s in 0..local_steps {
            let t = t0 + s as f64 * h;
            let a1 = stage(t)?;
            let a2 = stage(t + 0.5 * h)?;
            let a4 = stage(t + h)?;
            let k1 = transport_derivative(&a1, &u, start);
            let k2 = transport_derivative(&a2, &(&u + &k1 * (0.5 * h)), start);
            let k3 = transport_derivative(&a2, &(&u + &k2 * (0.5 * h)), start);
            let k4 = transport_derivative(&a4, &(&u + &k3 * h), start);
            u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
    }
    Ok(u)
}

/// The coordinate frame transported along a curve: columns transport like
/// vectors, so the whole frame integrates in one pass.
fn transport_identity_frame(
    g: &MetricField,
    curve: &CurveSegment,
    n: usize,
    steps: usize,
) -> Result<DMatrix<f64>> {
    let template = TransportedObject::Vector(Vec::new());
    transport_matrix_from(g, curve, &template, DMatrix::identity(n, n), steps)
}

/// Parallel transport of a vector or tensor along a curve.
pub fn parallel_transport(
    g: &MetricField,
    curve: &CurveSegment,
    start: TransportedObject,
    steps: usize,
) -> Result<TransportedObject> {
    let m = transport_matrix(g, curve, &start, steps)?;
    Ok(from_matrix(&start, m))
}

/// Transport operator of the coordinate basis around a closed loop.
#[derive(Clone, Debug)]
pub struct HolonomySample {
    pub matrix: DMatrix<f64>,
    pub step_count: usize,
    /// Step-halving error estimate (difference against a half-resolution
    /// run), floored at 1e-13.
    pub est_error: f64,
    /// `max |HᵀgH - g|` at the base point.
    pub isometry_defect: f64,
    pub base_point: Vec<f64>,
}

/// Holonomy of a loop: the loop must close to 1e-12 in coordinates.
pub fn holonomy_loop(
    g: &MetricField,
    loop_curve: &CurveSegment,
    steps: usize,
) -> Result<HolonomySample> {
    let gap = loop_curve.closure_gap();
    if gap > 1e-12 {
        return Err(Error::Argument(format!(
            "loop endpoints differ by {gap:.3e}; holonomy needs a closed loop"
        )));
    }
    let base = loop_curve.start();
    let n = base.len();
    let full = transport_identity_frame(g, loop_curve, n, steps)?;
    let half = transport_identity_frame(g, loop_curve, n, (steps / 2).max(1))?;
    let est_error = linalg::max_abs(&(&full - &half)).max(1e-13);
    let gm = g.matrix_at(&base)?;
    let isometry_defect = linalg::max_abs(&(full.transpose() * &gm * &full - &gm));
    Ok(HolonomySample {
        matrix: full,
        step_count: steps,
        est_error,
        isometry_defect,
        base_point: base,
    })
}

/// Rotation angle of a 2x2 holonomy operator, measured in a g-orthonormal
/// frame at the base point.
pub fn rotation_angle_2d(g_base: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<f64> {
    if g_base.nrows() != 2 || h.nrows() != 2 {
        return Err(Error::Argument("rotation angle is a 2d notion".into()));
    }
    let eig = (g_base + g_base.transpose()).scale(0.5).symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Argument(
            "rotation angle needs a positive-definite metric".into(),
        ));
    }
    let scale = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let frame = &eig.eigenvectors * scale;
    let inv = frame.clone().try_inverse().expect("frame is invertible");
    let hf = inv * h * &frame;
    Ok(hf[(1, 0)].atan2(hf[(0, 0)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::cone;
    use crate::corpus;
    use crate::geometry::flat_metric;

    #[test]
    fn flat_transport_is_identity() {
        let chart = Chart::boxed("plane", vec![(-3.0, 3.0), (-3.0, 3.0)]);
        let g = flat_metric(chart.clone(), 2, 0);
        let loop_curve = CurveSegment::closed_polyline(
            chart,
            vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![-0.3, 1.1]],
        )
        .unwrap();
        let h = holonomy_loop(&g, &loop_curve, 256).unwrap();
        let defect = linalg::max_abs(&(&h.matrix - DMatrix::identity(2, 2)));
        assert!(defect < 1e-10);
        assert!(h.isometry_defect <= 10.0 * h.est_error);
    }

    #[test]
    fn metric_is_transport_invariant() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let a = vec![1.0, 0.3, -0.2];
        let b = vec![1.5, -0.4, 0.6];
        let curve = CurveSegment::line(cone.chart.clone(), a.clone(), b.clone());
        let ga = cone.metric.matrix_at(&a).unwrap();
        let out = parallel_transport(&cone.metric, &curve, TransportedObject::Bilinear(ga), 512)
            .unwrap();
        let gb = cone.metric.matrix_at(&b).unwrap();
        if let TransportedObject::Bilinear(m) = out {
            assert!(linalg::max_abs(&(&m - gb)) < 1e-9, "metric moved under transport");
        } else {
            unreachable!()
        }
    }

    #[test]
    fn cartesian_tensor_transports_to_coordinate_change() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let t = corpus::cone_cartesian_tensor(&cone, &[0]).unwrap();
        // Transport the tensor's components along a path and compare with
        // pointwise evaluation at the endpoint: a parallel tensor is its own
        // transport.
        let a = vec![0.8, 0.5, 0.1];
        let b = vec![1.7, -0.3, 0.9];
        let mid = vec![1.2, 0.9, -0.4];
        let chart = cone.chart.clone();
        let path = CurveSegment::from_fn(
            chart,
            {
                let (a, mid, b) = (a.clone(), mid.clone(), b.clone());
                move |s| {
                    // Piecewise-linear through mid.
                    if s < 0.5 {
                        let u = 2.0 * s;
                        (
                            (0..3).map(|i| a[i] + u * (mid[i] - a[i])).collect(),
                            (0..3).map(|i| 2.0 * (mid[i] - a[i])).collect(),
                        )
                    } else {
                        let u = 2.0 * s - 1.0;
                        (
                            (0..3).map(|i| mid[i] + u * (b[i] - mid[i])).collect(),
                            (0..3).map(|i| 2.0 * (b[i] - mid[i])).collect(),
                        )
                    }
                }
            },
            vec![0.0, 0.5, 1.0],
        );
        let start = t.matrix_at(&a).unwrap();
        let out =
            parallel_transport(&cone.metric, &path, TransportedObject::Bilinear(start), 1024)
                .unwrap();
        let expect = t.matrix_at(&b).unwrap();
        if let TransportedObject::Bilinear(m) = out {
            assert!(
                linalg::max_abs(&(&m - &expect)) < 1e-7,
                "transport disagrees with the coordinate change: {}",
                linalg::max_abs(&(&m - &expect))
            );
        } else {
            unreachable!()
        }
    }

    #[test]
    fn transport_is_linear() {
        let sphere = corpus::round_sphere(2).unwrap();
        let curve = CurveSegment::line(sphere.chart.clone(), vec![0.1, 0.2], vec![-0.8, 1.0]);
        let u = vec![1.0, -0.5];
        let v = vec![0.3, 0.7];
        let (a, b) = (1.7, -0.9);
        let tr = |w: &[f64]| -> Vec<f64> {
            match parallel_transport(
                &sphere.metric,
                &curve,
                TransportedObject::Vector(w.to_vec()),
                256,
            )
            .unwrap()
            {
                TransportedObject::Vector(out) => out,
                _ => unreachable!(),
            }
        };
        let combo: Vec<f64> = (0..2).map(|i| a * u[i] + b * v[i]).collect();
        let lhs = tr(&combo);
        let (tu, tv) = (tr(&u), tr(&v));
        for i in 0..2 {
            assert!((lhs[i] - (a * tu[i] + b * tv[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn octant_loop_rotates_by_quarter_turn() {
        let sphere = corpus::round_sphere(2).unwrap();
        let loop_curve = corpus::octant_loop(&sphere.chart);
        assert!(loop_curve.closure_gap() < 1e-12);
        let h = holonomy_loop(&sphere.metric, &loop_curve, 4096).unwrap();
        let gm = sphere.metric.matrix_at(&h.base_point).unwrap();
        let angle = rotation_angle_2d(&gm, &h.matrix).unwrap();
        assert!(
            (angle.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-4,
            "octant angle {angle}"
        );
        assert!(h.isometry_defect <= 10.0 * h.est_error);
    }

    #[test]
    fn contractible_loop_on_flat_cone_is_trivial() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let loop_curve = CurveSegment::closed_polyline(
            cone.chart.clone(),
            vec![
                vec![1.0, 0.2, 0.1],
                vec![1.4, -0.5, 0.3],
                vec![0.8, 0.4, -0.6],
            ],
        )
        .unwrap();
        let h = holonomy_loop(&cone.metric, &loop_curve, 1024).unwrap();
        let defect = linalg::max_abs(&(&h.matrix - DMatrix::identity(3, 3)));
        assert!(defect < 1e-6, "flat cone holonomy defect {defect}");
    }

    #[test]
    fn open_curve_is_rejected() {
        let sphere = corpus::round_sphere(2).unwrap();
        let open = CurveSegment::line(sphere.chart.clone(), vec![0.0, 0.0], vec![1.0, 0.0]);
        assert!(holonomy_loop(&sphere.metric, &open, 64).is_err());
    }
}
