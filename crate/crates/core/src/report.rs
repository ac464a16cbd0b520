//! Verification records shared by the library, the acceptance battery and
//! the command-line front end.

use serde::Serialize;

/// Outcome of a single check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Only produced by checks with a declared dead zone between their
    /// acceptance and rejection thresholds.
    Inconclusive,
}

/// Worst offender recorded while scanning a point sample.
#[derive(Clone, Debug, Serialize)]
pub struct WorstPoint {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Running max of an absolute residual over sampled points.
#[derive(Clone, Debug, Default)]
pub struct PointMax {
    pub count: usize,
    pub max: f64,
    pub worst: Vec<f64>,
}

impl PointMax {
    pub fn new() -> PointMax {
        PointMax::default()
    }

    pub fn observe(&mut self, point: &[f64], value: f64) {
        self.count += 1;
        if value.abs() >= self.max {
            self.max = value.abs();
            self.worst = point.to_vec();
        }
    }

    pub fn worst_point(&self) -> WorstPoint {
        WorstPoint {
            point: self.worst.clone(),
            value: self.max,
        }
    }
}

/// Per-case verification record; the JSON shape emitted by the CLI.
///
/// `runtime_ms` is measured but not serialized: reports double as test
/// fixtures and must be byte-identical for identical command + seed.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub case_id: String,
    pub check: String,
    pub points_sampled: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub seed: u64,
    #[serde(skip)]
    pub runtime_ms: u64,
    pub details: Vec<WorstPoint>,
}

impl ResidualReport {
    /// Plain check: pass iff `max_residual <= tolerance`.
    pub fn simple(
        case_id: impl Into<String>,
        check: impl Into<String>,
        points: usize,
        max_residual: f64,
        tolerance: f64,
        seed: u64,
    ) -> ResidualReport {
        let verdict = if max_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        ResidualReport {
            case_id: case_id.into(),
            check: check.into(),
            points_sampled: points,
            max_residual,
            tolerance,
            verdict,
            seed,
            runtime_ms: 0,
            details: Vec::new(),
        }
    }

    /// Two-sided check: pass below `tolerance`, fail above `reject`, and
    /// inconclusive in the dead zone between them.
    pub fn banded(
        case_id: impl Into<String>,
        check: impl Into<String>,
        points: usize,
        max_residual: f64,
        tolerance: f64,
        reject: f64,
        seed: u64,
    ) -> ResidualReport {
        let verdict = if max_residual <= tolerance {
            Verdict::Pass
        } else if max_residual >= reject {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        };
        ResidualReport {
            case_id: case_id.into(),
            check: check.into(),
            points_sampled: points,
            max_residual,
            tolerance,
            verdict,
            seed,
            runtime_ms: 0,
            details: Vec::new(),
        }
    }

    pub fn with_detail(mut self, w: WorstPoint) -> ResidualReport {
        self.details.push(w);
        self
    }

    pub fn with_runtime(mut self, ms: u64) -> ResidualReport {
        self.runtime_ms = ms;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_matches_tolerance() {
        let r = ResidualReport::simple("c", "k", 10, 1e-10, 1e-9, 42);
        assert_eq!(r.verdict, Verdict::Pass);
        let r = ResidualReport::simple("c", "k", 10, 1e-8, 1e-9, 42);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn dead_zone_is_inconclusive() {
        let r = ResidualReport::banded("c", "k", 10, 1e-6, 1e-9, 1e-3, 42);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = ResidualReport::banded("c", "k", 10, 1e-2, 1e-9, 1e-3, 42);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn point_max_tracks_worst() {
        let mut pm = PointMax::new();
        pm.observe(&[0.0], 0.5);
        pm.observe(&[1.0], -2.0);
        pm.observe(&[2.0], 1.0);
        assert_eq!(pm.count, 3);
        assert_eq!(pm.max, 2.0);
        assert_eq!(pm.worst, vec![1.0]);
    }
}
