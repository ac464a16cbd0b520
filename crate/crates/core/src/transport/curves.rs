//! Piecewise-smooth parametrized curves on a chart.

use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{Error, Result};

type CurveFn = Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// A curve `[0, 1] -> chart` returning point and velocity, smooth between
/// its breakpoints.
#[derive(Clone)]
pub struct CurveSegment {
    chart: Chart,
    eval: CurveFn,
    breakpoints: Vec<f64>,
}

impl CurveSegment {
    /// Wrap a closure `t -> (point, dpoint/dt)` with the given breakpoint
    /// list (0 and 1 are added when missing).
    pub fn from_fn(
        chart: Chart,
        eval: impl Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
        mut breakpoints: Vec<f64>,
    ) -> CurveSegment {
        if breakpoints.first() != Some(&0.0) {
            breakpoints.insert(0, 0.0);
        }
        if breakpoints.last() != Some(&1.0) {
            breakpoints.push(1.0);
        }
        CurveSegment {
            chart,
            eval: Arc::new(eval),
            breakpoints,
        }
    }

    /// Straight coordinate segment from `a` to `b`.
    pub fn line(chart: Chart, a: Vec<f64>, b: Vec<f64>) -> CurveSegment {
        let vel: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| y - x).collect();
        CurveSegment::from_fn(
            chart,
            move |t| {
                let p: Vec<f64> = a.iter().zip(vel.iter()).map(|(x, v)| x + t * v).collect();
                (p, vel.clone())
            },
            vec![0.0, 1.0],
        )
    }

    /// Closed polyline through the given vertices (the last edge returns to
    /// the first vertex).
    pub fn closed_polyline(chart: Chart, vertices: Vec<Vec<f64>>) -> Result<CurveSegment> {
        let k = vertices.len();
        if k < 2 {
            return Err(Error::Argument("polyline needs at least two vertices".into()));
        }
        let breakpoints: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
        Ok(CurveSegment::from_fn(
            chart,
            move |t| {
                let scaled = t * k as f64;
                let leg = (scaled.floor() as usize).min(k - 1);
                let s = scaled - leg as f64;
                let a = &vertices[leg];
                let b = &vertices[(leg + 1) % k];
                // Endpoint evaluations return the vertices verbatim so the
                // loop closes exactly.
                let p: Vec<f64> = if s <= 0.0 {
                    a.clone()
                } else if s >= 1.0 {
                    b.clone()
                } else {
                    a.iter().zip(b.iter()).map(|(x, y)| x + s * (y - x)).collect()
                };
                let v: Vec<f64> = a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| (y - x) * k as f64)
                    .collect();
                (p, v)
            },
            breakpoints,
        ))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        (self.eval)(t).0
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        (self.eval)(t).1
    }

    pub fn point_and_velocity(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        (self.eval)(t)
    }

    pub fn start(&self) -> Vec<f64> {
        self.point(0.0)
    }

    pub fn end(&self) -> Vec<f64> {
        self.point(1.0)
    }

    /// Max coordinate gap between the two endpoints.
    pub fn closure_gap(&self) -> f64 {
        self.start()
            .iter()
            .zip(self.end().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
