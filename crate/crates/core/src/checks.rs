//! Named checks over corpus cases: the shared vocabulary of the CLI, the
//! corpus verdict tests and the acceptance battery.

use crate::cone;
use crate::corpus::{Case, GeometryCase};
use crate::equations::{self, GTProblem, MobilityCandidate};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry;
use crate::report::{PointMax, ResidualReport, WorstPoint};

/// A check invocation: name plus the knobs the CLI exposes.
#[derive(Clone, Debug)]
pub struct CheckRequest {
    pub name: String,
    /// Which attached field to use (scalar, vector, tensor or extra metric,
    /// depending on the check).
    pub field: Option<String>,
    /// Equation constant (`gt_residual`) or expected eigenvalue
    /// (`laplace_eigen`).
    pub constant: Option<f64>,
    pub points: usize,
    pub seed: u64,
    pub tolerance: Option<f64>,
}

impl CheckRequest {
    pub fn new(name: &str) -> CheckRequest {
        CheckRequest {
            name: name.to_string(),
            field: None,
            constant: None,
            points: 200,
            seed: 42,
            tolerance: None,
        }
    }

    pub fn with_field(mut self, field: Option<String>) -> Self {
        self.field = field;
        self
    }

    pub fn with_constant(mut self, c: Option<f64>) -> Self {
        self.constant = c;
        self
    }
}

/// Pass tolerance and optional rejection threshold (checks with a dead zone).
pub fn default_tolerance(name: &str) -> (f64, Option<f64>) {
    match name {
        "gt_residual" => (1e-9, None),
        "obata_residual" => (1e-9, None),
        "laplace_eigen" => (1e-9, None),
        "c0_parallel" => (1e-9, None),
        "basic1_candidate" => (1e-9, None),
        "einstein_residual" => (1e-9, None),
        "killing_residual" => (1e-10, None),
        "metric_valid" => (1e-14, None),
        "parallel_hessian" => (1e-9, Some(1e-3)),
        "cone_connection" => (1e-10, None),
        "cone_curvature_identity" => (1e-9, None),
        "cone_flat" => (1e-8, None),
        _ => (1e-9, None),
    }
}

/// All check names `run_check` understands.
pub const CHECK_NAMES: &[&str] = &[
    "gt_residual",
    "obata_residual",
    "laplace_eigen",
    "c0_parallel",
    "basic1_candidate",
    "einstein_residual",
    "killing_residual",
    "metric_valid",
    "parallel_hessian",
    "cone_connection",
    "cone_curvature_identity",
    "cone_flat",
];

fn scalar_for(case: &GeometryCase, req: &CheckRequest) -> Result<ScalarField> {
    let name = req.field.as_deref().unwrap_or("alpha");
    if name == "const" {
        if let Some(f) = case.scalars.get("const") {
            return Ok(f.clone());
        }
        return Ok(ScalarField::constant(case.chart.clone(), 1.0));
    }
    case.scalars.get(name).cloned().ok_or_else(|| {
        Error::Argument(format!(
            "case {} has no scalar `{name}` (available: {:?})",
            case.id,
            case.scalars.keys().collect::<Vec<_>>()
        ))
    })
}

fn candidate_for(case: &GeometryCase, req: &CheckRequest) -> Result<MobilityCandidate> {
    let name = req.field.as_deref().unwrap_or("pullback");
    if let Some(gbar) = case.extra_metrics.get(name) {
        return equations::metric_to_candidate(&case.metric, gbar);
    }
    if let Some(t) = case.tensors.get(name) {
        return MobilityCandidate::new(case.metric.clone(), t.clone());
    }
    if let Some(x) = case.vectors.get(name) {
        let t = equations::projective_tensor(x, &case.metric)?;
        return MobilityCandidate::new(case.metric.clone(), t);
    }
    Err(Error::Argument(format!(
        "case {} has no metric/tensor/vector named `{name}` to build a candidate from",
        case.id
    )))
}

/// Run a named check on a case, producing the standard report.
pub fn run_check(case: &Case, req: &CheckRequest) -> Result<ResidualReport> {
    let started = std::time::Instant::now();
    let geometry_case = case.geometry()?;
    let (default_tol, reject) = default_tolerance(&req.name);
    let tol = req.tolerance.unwrap_or(default_tol);
    let points = geometry_case.chart.sample(req.seed, req.points);

    let mut check_label = req.name.clone();
    if let Some(f) = &req.field {
        check_label = format!("{check_label}[{f}]");
    }
    if let Some(c) = req.constant {
        check_label = format!("{check_label}(c={c})");
    }

    let mut dev = PointMax::new();
    match req.name.as_str() {
        "gt_residual" => {
            let alpha = scalar_for(geometry_case, req)?;
            let problem = GTProblem {
                metric: geometry_case.metric.clone(),
                alpha,
                c: req.constant.unwrap_or(1.0),
            };
            for p in &points {
                dev.observe(p, equations::gt_residual(&problem, p)?);
            }
        }
        "obata_residual" => {
            let alpha = scalar_for(geometry_case, req)?;
            for p in &points {
                dev.observe(p, equations::obata_residual(&geometry_case.metric, &alpha, p)?);
            }
        }
        "laplace_eigen" => {
            let alpha = scalar_for(geometry_case, req)?;
            let lambda = req.constant.ok_or_else(|| {
                Error::Argument("laplace_eigen needs the expected eigenvalue".into())
            })?;
            for p in &points {
                let lap = geometry::laplacian(&alpha, &geometry_case.metric, p)?;
                let val = alpha.value_at(p)?;
                dev.observe(p, (lap - lambda * val).abs());
            }
        }
        "c0_parallel" => {
            let alpha = scalar_for(geometry_case, req)?;
            let report =
                equations::c0_parallel_check(&geometry_case.metric, &alpha, &points, tol)?;
            dev = report.third_derivative;
        }
        "basic1_candidate" => {
            let cand = candidate_for(geometry_case, req)?;
            for p in &points {
                dev.observe(p, equations::basic1_residual(&cand, p)?);
            }
        }
        "einstein_residual" => {
            for p in &points {
                dev.observe(p, geometry::einstein_residual(&geometry_case.metric, p)?);
            }
        }
        "killing_residual" => {
            let name = req.field.as_deref().unwrap_or("rotation_xy");
            let x = geometry_case.vectors.get(name).ok_or_else(|| {
                Error::Argument(format!("case {} has no vector `{name}`", geometry_case.id))
            })?;
            for p in &points {
                let l = geometry::lie_derivative_metric(x, &geometry_case.metric, p)?;
                dev.observe(p, crate::linalg::max_abs(&l));
            }
        }
        "metric_valid" => {
            let v = geometry::validate_metric(&geometry_case.metric, &points)?;
            let residual = if v.signature_ok {
                v.max_asymmetry
            } else {
                f64::INFINITY
            };
            dev.observe(&points[0], residual);
        }
        "parallel_hessian" => {
            let alpha = scalar_for(geometry_case, req)?;
            let cone = cone::build_cone(
                &geometry_case.chart,
                &geometry_case.metric,
                cone::DEFAULT_R_RANGE,
            )?;
            let lf = cone::lift_scalar(&cone, &alpha);
            let cone_points = cone.chart.sample(req.seed, req.points.min(100));
            dev = cone::parallel_hessian_residual(&lf, &cone, &cone_points)?;
        }
        "cone_connection" => {
            let cone = cone::build_cone(
                &geometry_case.chart,
                &geometry_case.metric,
                cone::DEFAULT_R_RANGE,
            )?;
            let cone_points = cone.chart.sample(req.seed, req.points.min(100));
            dev = cone::verify_cone_connection(&cone, &cone_points)?;
        }
        "cone_curvature_identity" | "cone_flat" => {
            let cone = cone::build_cone(
                &geometry_case.chart,
                &geometry_case.metric,
                cone::DEFAULT_R_RANGE,
            )?;
            let cone_points = cone.chart.sample(req.seed, req.points.min(100));
            let cc = cone::cone_curvature_check(&cone, &cone_points)?;
            dev = if req.name == "cone_flat" {
                cc.rhat_norm
            } else {
                cc.identity_dev
            };
        }
        other => {
            return Err(Error::Argument(format!(
                "unknown check `{other}` (known: {CHECK_NAMES:?})"
            )))
        }
    }

    let mut report = match reject {
        Some(reject) => ResidualReport::banded(
            case.id(),
            check_label,
            dev.count,
            dev.max,
            tol,
            req.tolerance.map(|t| t * 1e6).unwrap_or(reject),
            req.seed,
        ),
        None => ResidualReport::simple(case.id(), check_label, dev.count, dev.max, tol, req.seed),
    };
    if !dev.worst.is_empty() {
        report = report.with_detail(WorstPoint {
            point: dev.worst.clone(),
            value: dev.max,
        });
    }
    Ok(report.with_runtime(started.elapsed().as_millis() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::report::Verdict;

    #[test]
    fn corpus_expected_verdicts_reproduce() {
        let ids: &[(&str, &[f64])] = &[
            ("round_sphere", &[2.0]),
            ("round_sphere", &[3.0]),
            ("flat", &[2.0, 0.0]),
            ("flat_torus_chart", &[]),
            ("bumpy_sphere", &[3.0, 0.15]),
            ("pseudo_sphere", &[1.0, 1.0]),
            ("beltrami_pair", &[2.0]),
        ];
        for (id, params) in ids {
            let case = corpus::make_case(id, params).unwrap();
            let geo = case.geometry().unwrap();
            for expectation in &geo.expected {
                // Keep runtime sane: a reduced sample still separates pass
                // from fail by several orders of magnitude.
                let req = CheckRequest {
                    points: 60,
                    ..CheckRequest::new(&expectation.check)
                        .with_field(expectation.field.clone())
                        .with_constant(expectation.constant)
                };
                let report = run_check(&case, &req).unwrap_or_else(|e| {
                    panic!("{}/{} errored: {e}", geo.id, expectation.check)
                });
                let expected = match expectation.expect {
                    corpus::Expected::Pass => Verdict::Pass,
                    corpus::Expected::Fail => Verdict::Fail,
                };
                assert_eq!(
                    report.verdict, expected,
                    "{} / {} gave {:?} (max residual {:.3e}, tol {:.1e})",
                    geo.id, report.check, report.verdict, report.max_residual, report.tolerance
                );
            }
        }
    }

    #[test]
    fn unknown_names_error() {
        let case = corpus::make_case("round_sphere", &[2.0]).unwrap();
        assert!(run_check(&case, &CheckRequest::new("no_such_check")).is_err());
        let req = CheckRequest::new("gt_residual").with_field(Some("missing".into()));
        assert!(run_check(&case, &req).is_err());
    }
}
