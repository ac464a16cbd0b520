//! Geodesic integration with the classical 4th-order one-step method on the
//! state `(x, v)`, fixed step.  Fixed stepping keeps reports deterministic;
//! the step-halving comparison in the holonomy code supplies the error
//! estimate instead of an adaptive controller.

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::fields::MetricField;
use crate::geometry;
use crate::transport::curves::CurveSegment;

/// One node of an integrated geodesic: curve parameter in `[0, 1]`, point,
/// and velocity with respect to that normalized parameter.
#[derive(Clone, Debug)]
pub struct GeodesicNode {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// An integrated geodesic, with cubic-Hermite evaluation between nodes.
#[derive(Clone)]
pub struct Geodesic {
    pub nodes: Vec<GeodesicNode>,
    chart: Chart,
}

impl Geodesic {
    pub fn start(&self) -> &GeodesicNode {
        &self.nodes[0]
    }

    pub fn endpoint(&self) -> &GeodesicNode {
        self.nodes.last().expect("geodesic has nodes")
    }

    /// Hermite-interpolated curve over the stored nodes.
    pub fn curve(&self) -> CurveSegment {
        let nodes = self.nodes.clone();
        CurveSegment::from_fn(
            self.chart.clone(),
            move |t| hermite_eval(&nodes, t),
            vec![0.0, 1.0],
        )
    }
}

fn hermite_eval(nodes: &[GeodesicNode], t: f64) -> (Vec<f64>, Vec<f64>) {
    let m = nodes.len() - 1;
    let scaled = (t.clamp(0.0, 1.0) * m as f64).min(m as f64 - 1e-12);
    let k = scaled.floor() as usize;
    let h = 1.0 / m as f64;
    let u = scaled - k as f64;
    let (a, b) = (&nodes[k], &nodes[k + 1]);
    let n = a.x.len();
    let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
    let h10 = u * u * u - 2.0 * u * u + u;
    let h01 = -2.0 * u * u * u + 3.0 * u * u;
    let h11 = u * u * u - u * u;
    let d00 = 6.0 * u * u - 6.0 * u;
    let d10 = 3.0 * u * u - 4.0 * u + 1.0;
    let d01 = -6.0 * u * u + 6.0 * u;
    let d11 = 3.0 * u * u - 2.0 * u;
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    for i in 0..n {
        p[i] = h00 * a.x[i] + h10 * h * a.v[i] + h01 * b.x[i] + h11 * h * b.v[i];
        v[i] = (d00 * a.x[i] + d10 * h * a.v[i] + d01 * b.x[i] + d11 * h * b.v[i]) / h;
    }
    (p, v)
}

fn geodesic_rhs(g: &MetricField, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let gamma = geometry::christoffel_at(g, x)?.values();
    let n = x.len();
    let mut acc = vec![0.0; n];
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += gamma.get(&[k, i, j]) * v[i] * v[j];
            }
        }
        acc[k] = -s;
    }
    Ok(acc)
}

/// Integrate the geodesic from `p0` with initial velocity `v0` over affine
/// parameter `length`.  Leaving the chart domain reports the exit parameter.
pub fn geodesic_integrate(
    g: &MetricField,
    p0: &[f64],
    v0: &[f64],
    length: f64,
    steps: usize,
) -> Result<Geodesic> {
    if steps < 16 {
        return Err(Error::Argument(format!(
            "geodesic integration needs >= 16 steps, got {steps}"
        )));
    }
    g.chart().check_point(p0)?;
    let n = p0.len();
    let h = length / steps as f64;
    let mut x = p0.to_vec();
    let mut v = v0.to_vec();
    let mut nodes = Vec::with_capacity(steps + 1);
    nodes.push(GeodesicNode {
        t: 0.0,
        x: x.clone(),
        v: v.iter().map(|c| c * length).collect(),
    });
    for step in 0..steps {
        // A substep wandering outside the chart is reported as truncation at
        // the current parameter, like a node exit.
        let exit = |e: Error| match e {
            Error::Domain(_) => Error::LeftDomain {
                parameter: step as f64 / steps as f64,
            },
            other => other,
        };
        // Classical 4th-order step on (x, v).
        let a1 = geodesic_rhs(g, &x, &v).map_err(exit)?;
        let x2: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * v[i]).collect();
        let v2: Vec<f64> = (0..n).map(|i| v[i] + 0.5 * h * a1[i]).collect();
        let a2 = geodesic_rhs(g, &x2, &v2).map_err(exit)?;
        let x3: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * v2[i]).collect();
        let v3: Vec<f64> = (0..n).map(|i| v[i] + 0.5 * h * a2[i]).collect();
        let a3 = geodesic_rhs(g, &x3, &v3).map_err(exit)?;
        let x4: Vec<f64> = (0..n).map(|i| x[i] + h * v3[i]).collect();
        let v4: Vec<f64> = (0..n).map(|i| v[i] + h * a3[i]).collect();
        let a4 = geodesic_rhs(g, &x4, &v4).map_err(exit)?;
        for i in 0..n {
            x[i] += h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            v[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        let t = (step + 1) as f64 / steps as f64;
        if !g.chart().contains(&x) {
            return Err(Error::LeftDomain { parameter: t });
        }
        nodes.push(GeodesicNode {
            t,
            x: x.clone(),
            v: v.iter().map(|c| c * length).collect(),
        });
    }
    Ok(Geodesic {
        nodes,
        chart: g.chart().clone(),
    })
}

/// Relative drift of `g(v, v)` along the integrated nodes.
pub fn energy_drift(g: &MetricField, geo: &Geodesic) -> Result<f64> {
    let mut first = None;
    let mut worst = 0.0_f64;
    for node in &geo.nodes {
        let gm = g.matrix_at(&node.x)?;
        let mut e = 0.0;
        for i in 0..node.v.len() {
            for j in 0..node.v.len() {
                e += gm[(i, j)] * node.v[i] * node.v[j];
            }
        }
        match first {
            None => first = Some(e),
            Some(e0) => worst = worst.max((e - e0).abs() / e0.abs().max(1.0)),
        }
    }
    Ok(worst)
}

/// Connect two points by a geodesic via shooting (Newton on the initial
/// velocity with a finite-difference Jacobian).
pub fn geodesic_between(
    g: &MetricField,
    a: &[f64],
    b: &[f64],
    steps: usize,
) -> Result<Geodesic> {
    let n = a.len();
    let mut v: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| y - x).collect();
    let shoot = |v: &[f64]| -> Result<Vec<f64>> {
        let geo = geodesic_integrate(g, a, v, 1.0, steps)?;
        Ok(geo.endpoint().x.clone())
    };
    for _ in 0..30 {
        let hit = shoot(&v)?;
        let miss: Vec<f64> = hit.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
        let err = miss.iter().map(|m| m.abs()).fold(0.0, f64::max);
        if err < 1e-12 {
            return geodesic_integrate(g, a, &v, 1.0, steps);
        }
        // Finite-difference Jacobian of endpoint(v).
        let eps = 1e-7;
        let mut jac = nalgebra::DMatrix::zeros(n, n);
        for col in 0..n {
            let mut vp = v.clone();
            vp[col] += eps;
            let hp = shoot(&vp)?;
            for row in 0..n {
                jac[(row, col)] = (hp[row] - hit[row]) / eps;
            }
        }
        let rhs = nalgebra::DVector::from_vec(miss);
        let delta = jac.lu().solve(&rhs).ok_or_else(|| {
            Error::Argument("shooting Jacobian is singular".to_string())
        })?;
        for i in 0..n {
            v[i] -= delta[i];
        }
    }
    Err(Error::Argument(format!(
        "geodesic shooting between {a:?} and {b:?} did not converge"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::geometry::flat_metric;

    #[test]
    fn flat_geodesics_are_straight_lines() {
        let chart = Chart::boxed("plane", vec![(-5.0, 5.0), (-5.0, 5.0)]);
        let g = flat_metric(chart, 2, 0);
        assert!(geodesic_integrate(&g, &[0.0, 0.0], &[1.0, 0.0], 1.0, 8).is_err());
        let geo = geodesic_integrate(&g, &[0.0, 0.0], &[0.3, -0.2], 2.0, 64).unwrap();
        let end = geo.endpoint();
        assert!((end.x[0] - 0.6).abs() < 1e-13);
        assert!((end.x[1] + 0.4).abs() < 1e-13);
        // Interpolated curve matches the line everywhere.
        let c = geo.curve();
        let p = c.point(0.37);
        assert!((p[0] - 0.37 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn equator_great_circle_returns_to_start() {
        let sphere = corpus::round_sphere(2).unwrap();
        // Chart point (1, 0) is the ambient point (1, 0, 0) on the equator;
        // the metric there is the identity, so (0, 1) is unit.
        let start = [1.0, 0.0];
        let geo = geodesic_integrate(
            &sphere.metric,
            &start,
            &[0.0, 1.0],
            2.0 * std::f64::consts::PI,
            2048,
        )
        .unwrap();
        let end = geo.endpoint();
        let err = (end.x[0] - 1.0).abs().max(end.x[1].abs());
        assert!(err < 1e-7, "great circle closure error {err}");
        // Closed-form check along the way: the great circle through (1,0,0)
        // with tangent (0,1,0) is (cos t, sin t, 0).
        let quarter = &geo.nodes[512].x;
        let expect = corpus::sphere_chart_point(&[0.0, 1.0, 0.0]);
        assert!((quarter[0] - expect[0]).abs() < 1e-7);
        assert!((quarter[1] - expect[1]).abs() < 1e-7);
    }

    #[test]
    fn null_direction_stays_null() {
        let ps = corpus::pseudo_sphere(1, 1).unwrap();
        let p0 = [0.05, -0.1];
        let gm = ps.metric.matrix_at(&p0).unwrap();
        // Solve g(v, v) = 0 with v = (1, s): g00 + 2 g01 s + g11 s^2 = 0.
        let (a, b, c) = (gm[(1, 1)], 2.0 * gm[(0, 1)], gm[(0, 0)]);
        let s = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        let v0 = [1.0, s];
        let e0: f64 = (0..2)
            .map(|i| (0..2).map(|j| gm[(i, j)] * v0[i] * v0[j]).sum::<f64>())
            .sum();
        assert!(e0.abs() < 1e-12);
        let geo = geodesic_integrate(&ps.metric, &p0, &v0, 0.4, 256).unwrap();
        for node in &geo.nodes {
            let gm = ps.metric.matrix_at(&node.x).unwrap();
            let e: f64 = (0..2)
                .map(|i| (0..2).map(|j| gm[(i, j)] * node.v[i] * node.v[j]).sum::<f64>())
                .sum();
            assert!(e.abs() < 1e-9, "null condition drifted to {e}");
        }
    }

    #[test]
    fn energy_conservation_and_fourth_order_drift() {
        let sphere = corpus::round_sphere(2).unwrap();
        let start = [0.4, -0.7];
        let v0 = [0.8, 0.3];
        let geo = geodesic_integrate(&sphere.metric, &start, &v0, 1.0, 1024).unwrap();
        let drift_fine = energy_drift(&sphere.metric, &geo).unwrap();
        assert!(drift_fine < 1e-8, "drift {drift_fine}");
        // Convergence: compare endpoint errors at 64 vs 128 steps against a
        // 4096-step reference; the ratio should be about 2^4.
        let reference = geodesic_integrate(&sphere.metric, &start, &v0, 1.0, 4096)
            .unwrap()
            .endpoint()
            .x
            .clone();
        let err = |steps: usize| -> f64 {
            let e = geodesic_integrate(&sphere.metric, &start, &v0, 1.0, steps)
                .unwrap()
                .endpoint()
                .x
                .clone();
            e.iter()
                .zip(reference.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(
            (8.0..32.0).contains(&ratio),
            "endpoint error ratio {ratio} not 4th order"
        );
    }

    #[test]
    fn leaving_the_chart_reports_exit_parameter() {
        let ps = corpus::pseudo_sphere(1, 1).unwrap();
        match geodesic_integrate(&ps.metric, &[0.0, 0.0], &[1.0, 0.0], 3.0, 128) {
            Err(Error::LeftDomain { parameter }) => {
                assert!(parameter > 0.0 && parameter <= 1.0)
            }
            other => panic!("expected domain exit, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn shooting_connects_nearby_points() {
        let sphere = corpus::round_sphere(2).unwrap();
        let a = [0.3, 0.3];
        let b = [-0.5, 0.9];
        let geo = geodesic_between(&sphere.metric, &a, &b, 64).unwrap();
        let end = geo.endpoint();
        assert!((end.x[0] - b[0]).abs() < 1e-10);
        assert!((end.x[1] - b[1]).abs() < 1e-10);
    }
}
