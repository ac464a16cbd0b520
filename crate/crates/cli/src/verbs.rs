//! Implementations of the CLI verbs on top of the core library.

use std::path::Path;

use serde::Serialize;

use conecheck_core::acceptance;
use conecheck_core::casefile;
use conecheck_core::checks::{run_check, CheckRequest};
use conecheck_core::cone;
use conecheck_core::corpus::{self, Case, GeometryCase};
use conecheck_core::equations;
use conecheck_core::error::{Error, Result};
use conecheck_core::fields::TensorField;
use conecheck_core::linalg;
use conecheck_core::report::{ResidualReport, Verdict, WorstPoint};
use conecheck_core::transport;

use crate::output::{json_line, print_report};
use crate::{Common, Format};

fn is_json(common: &Common) -> bool {
    matches!(common.format, Format::Json)
}

/// Parse `id[:p1,p2,...][+field]` or load a JSON case file.
fn resolve_case(addr: &str) -> Result<(Case, Option<String>)> {
    if addr.ends_with(".json") || Path::new(addr).is_file() {
        let geo = casefile::load_case(addr)?;
        return Ok((Case::Geometry(Box::new(geo)), None));
    }
    let (head, field) = match addr.split_once('+') {
        Some((head, field)) => (head, Some(field.to_string())),
        None => (addr, None),
    };
    let (id, params) = match head.split_once(':') {
        Some((id, tail)) => {
            let params: Result<Vec<f64>> = tail
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        Error::Argument(format!("bad case parameter `{s}` in `{addr}`"))
                    })
                })
                .collect();
            (id, params?)
        }
        None => (head, Vec::new()),
    };
    Ok((corpus::make_case(id, &params)?, field))
}

fn passed(reports: &[ResidualReport]) -> bool {
    reports.iter().all(|r| r.verdict == Verdict::Pass)
}

fn emit(reports: &[ResidualReport], common: &Common) {
    for r in reports {
        print_report(r, is_json(common));
    }
}

pub fn check(
    addr: &str,
    check_name: &str,
    field: Option<String>,
    constant: Option<f64>,
    common: &Common,
) -> Result<bool> {
    let (case, suffix) = resolve_case(addr)?;
    let req = CheckRequest {
        name: check_name.to_string(),
        field: field.or(suffix),
        constant,
        points: common.points,
        seed: common.seed,
        tolerance: common.tol,
    };
    let report = run_check(&case, &req)?;
    emit(std::slice::from_ref(&report), common);
    Ok(report.verdict == Verdict::Pass)
}

fn sphere_like(case: &GeometryCase) -> bool {
    case.id.starts_with("round_sphere")
}

fn default_alpha(case: &GeometryCase, requested: Option<String>) -> Option<String> {
    requested
        .or_else(|| case.scalars.contains_key("alpha").then(|| "alpha".to_string()))
        .or_else(|| {
            case.scalars
                .contains_key("harmonic_deg2")
                .then(|| "harmonic_deg2".to_string())
        })
}

pub fn cone(addr: &str, alpha: Option<String>, common: &Common) -> Result<bool> {
    let (case, suffix) = resolve_case(addr)?;
    let geo = case.geometry()?;
    let mut reports = Vec::new();
    for name in ["cone_connection", "cone_curvature_identity"] {
        let req = CheckRequest {
            name: name.to_string(),
            field: None,
            constant: None,
            points: common.points,
            seed: common.seed,
            tolerance: common.tol,
        };
        reports.push(run_check(&case, &req)?);
    }

    let built = cone::build_cone(&geo.chart, &geo.metric, cone::DEFAULT_R_RANGE)?;
    if let Some(alpha_name) = default_alpha(geo, alpha.or(suffix)) {
        let field = geo.scalars.get(&alpha_name).ok_or_else(|| {
            Error::Argument(format!("case {} has no scalar `{alpha_name}`", geo.id))
        })?;
        let lf = cone::lift_scalar(&built, field);
        let pts = built.chart.sample(common.seed, common.points.min(100));
        let mut worst = 0.0_f64;
        for p in &pts {
            let h = cone::hessian_of_lift(&lf, &built, p)?;
            worst = worst.max(h.radial_mixed).max(h.radial_radial).max(h.base_block);
        }
        reports.push(ResidualReport::simple(
            geo.id.clone(),
            format!("lift_hessian_identities[{alpha_name}]"),
            pts.len(),
            worst,
            1e-10,
            common.seed,
        ));
        let req = CheckRequest {
            name: "parallel_hessian".to_string(),
            field: Some(alpha_name),
            constant: None,
            points: common.points,
            seed: common.seed,
            tolerance: common.tol,
        };
        reports.push(run_check(&case, &req)?);
    }

    if sphere_like(geo) {
        let t = corpus::cone_cartesian_tensor(&built, &[0])?;
        let ex = cone::extract_from_parallel(&t, &built, common.seed, common.points.min(100), 1e-9)?;
        let worst = ex
            .identity1
            .max
            .max(ex.identity2.max)
            .max(ex.identity3.max)
            .max(ex.r_spread);
        reports.push(
            ResidualReport::simple(
                geo.id.clone(),
                "parallel_tensor_extraction",
                ex.identity1.count,
                worst,
                1e-9,
                common.seed,
            )
            .with_detail(WorstPoint {
                point: vec![ex.alpha_spread],
                value: ex.parallel_defect.max,
            }),
        );
    }

    emit(&reports, common);
    Ok(passed(&reports))
}

pub fn split(addr: &str, axes: &[usize], common: &Common) -> Result<bool> {
    let (case, _) = resolve_case(addr)?;
    let geo = case.geometry()?;
    if !sphere_like(geo) {
        return Err(Error::Argument(format!(
            "split needs a round_sphere base (got {}): the parallel distributions \
             are spans of constant ambient axes",
            geo.id
        )));
    }
    let built = cone::build_cone(&geo.chart, &geo.metric, cone::DEFAULT_R_RANGE)?;
    let projector = corpus::cone_axis_projector(&built, axes)?;
    let opts = cone::SplittingOptions {
        seed: common.seed,
        cone_points: common.points.min(100),
        critical_scan: 5000,
        gradient_cut: 1e-5,
    };
    let s = cone::splitting_tensors(&built, projector, &opts)?;
    let id = format!("cone({})+axes{:?}", geo.id, axes);
    let mut reports = vec![
        ResidualReport::simple(
            id.clone(),
            "projector_orthogonal_idempotent",
            opts.cone_points,
            s.projector_defect,
            1e-10,
            common.seed,
        ),
        ResidualReport::simple(
            id.clone(),
            "sum_equals_metric",
            opts.cone_points,
            s.sum_defect,
            4.0 * f64::EPSILON,
            common.seed,
        ),
        ResidualReport::simple(
            id.clone(),
            "alpha_sum_equals_one",
            opts.cone_points,
            s.alpha_sum_defect,
            1e-12,
            common.seed,
        ),
        ResidualReport::simple(
            id.clone(),
            "splitting_tensors_parallel",
            s.t1_parallel.count,
            s.t1_parallel.max.max(s.t2_parallel.max),
            1e-10,
            common.seed,
        ),
        ResidualReport::simple(
            id.clone(),
            "alpha_in_unit_interval",
            opts.critical_scan,
            (-s.alpha1_range.0).max(s.alpha1_range.1 - 1.0).max(0.0),
            1e-9,
            common.seed,
        ),
        ResidualReport::simple(
            id.clone(),
            "critical_values_near_0_or_1",
            s.near_critical.len(),
            s.critical_value_defect,
            1e-4,
            common.seed,
        ),
        ResidualReport::simple(
            id.clone(),
            "splitting_tensors_psd",
            opts.cone_points,
            (-s.psd_min_eigenvalue).max(0.0),
            1e-10,
            common.seed,
        ),
    ];

    // Decomposability probe on the same parallel distribution, via the
    // constant ambient tensor it induces.
    let t = corpus::cone_cartesian_tensor(&built, axes)?;
    let probe = transport::decomposability_probe(
        &built,
        &t,
        &transport::ProbeOptions {
            seed: common.seed,
            sample: common.points.min(40),
            loops: 10,
            transport_steps: common.steps.min(512),
            ..transport::ProbeOptions::default()
        },
    )?;
    let (label, ok) = match &probe.verdict {
        transport::ProbeVerdict::Decomposable => (
            format!("decomposability=decomposable ranks={:?}", probe.ranks),
            true,
        ),
        transport::ProbeVerdict::TrivialTensor => {
            ("decomposability=trivial_tensor_no_splitting".to_string(), true)
        }
        transport::ProbeVerdict::Inconclusive(why) => {
            (format!("decomposability=inconclusive ({why})"), false)
        }
    };
    reports.push(
        ResidualReport::simple(
            id.clone(),
            label,
            probe.parallel_defect.count,
            if ok { probe.eigenvalue_spread } else { f64::INFINITY },
            1e-6,
            common.seed,
        )
        .with_detail(WorstPoint {
            point: probe.eigenvalues.clone(),
            value: probe.transport_deviation,
        }),
    );

    emit(&reports, common);
    Ok(passed(&reports))
}

pub fn holonomy(
    addr: &str,
    loops: usize,
    named: Option<&str>,
    common: &Common,
) -> Result<bool> {
    let (case, _) = resolve_case(addr)?;
    let geo = case.geometry()?;
    let mut reports = Vec::new();

    match named {
        Some("octant") => {
            if geo.chart.dim() != 2 || !sphere_like(geo) {
                return Err(Error::Argument(
                    "the octant loop is defined on round_sphere:2".to_string(),
                ));
            }
            let loop_curve = corpus::octant_loop(&geo.chart);
            let h = transport::holonomy_loop(&geo.metric, &loop_curve, common.steps)?;
            let gm = geo.metric.matrix_at(&h.base_point)?;
            let angle = transport::rotation_angle_2d(&gm, &h.matrix)?;
            reports.push(
                ResidualReport::simple(
                    geo.id.clone(),
                    "octant_rotation_angle_pi_over_2",
                    1,
                    (angle.abs() - std::f64::consts::FRAC_PI_2).abs(),
                    1e-4,
                    common.seed,
                )
                .with_detail(WorstPoint {
                    point: h.base_point.clone(),
                    value: angle,
                }),
            );
            reports.push(ResidualReport::simple(
                geo.id.clone(),
                "octant_isometry_defect",
                1,
                h.isometry_defect,
                10.0 * h.est_error,
                common.seed,
            ));
        }
        Some(other) => {
            return Err(Error::Argument(format!(
                "unknown loop `{other}` (known: octant)"
            )))
        }
        None => {}
    }

    if loops > 0 {
        let vertices = geo.chart.sample(common.seed, 3 * loops);
        for (k, tri) in vertices.chunks(3).take(loops).enumerate() {
            let loop_curve = transport::CurveSegment::closed_polyline(
                geo.chart.clone(),
                tri.to_vec(),
            )?;
            let h = transport::holonomy_loop(&geo.metric, &loop_curve, common.steps)?;
            reports.push(
                ResidualReport::simple(
                    geo.id.clone(),
                    format!("loop_{k}_isometry_defect"),
                    1,
                    h.isometry_defect,
                    10.0 * h.est_error,
                    common.seed,
                )
                .with_detail(WorstPoint {
                    point: h.base_point.clone(),
                    value: h.est_error,
                }),
            );
        }
    }

    if reports.is_empty() {
        return Err(Error::Argument(
            "nothing to do: pass --loops N and/or --loop octant".to_string(),
        ));
    }
    emit(&reports, common);
    Ok(passed(&reports))
}

pub fn mobility(addr: &str, common: &Common) -> Result<bool> {
    let (case, _) = resolve_case(addr)?;
    let geo = case.geometry()?;
    let mut candidates = vec![TensorField::from_metric(&geo.metric)];
    let mut names = vec!["metric".to_string()];
    for (name, gbar) in &geo.extra_metrics {
        candidates.push(equations::metric_to_candidate(&geo.metric, gbar)?.tensor);
        names.push(name.clone());
    }
    if sphere_like(geo) && geo.chart.dim() == 2 {
        for (label, map) in [
            ("pullback_x", corpus::default_beltrami_map(2)),
            ("pullback_y", corpus::second_beltrami_map(2)),
        ] {
            let pair = corpus::beltrami_pair(2, &map)?;
            candidates
                .push(equations::metric_to_candidate(&geo.metric, &pair.extra_metrics["pullback"])?.tensor);
            names.push(label.to_string());
        }
    }
    let points = geo.chart.sample(common.seed, common.points.min(50));
    let rank = equations::mobility_rank(&geo.metric, &candidates, &points)?;
    let worst_rejected = rank
        .rejected
        .iter()
        .map(|&(_, r)| r)
        .fold(0.0_f64, f64::max);
    let report = ResidualReport::simple(
        geo.id.clone(),
        format!("mobility_rank={} candidates=[{}]", rank.rank, names.join(",")),
        points.len(),
        worst_rejected,
        1e-8,
        common.seed,
    );
    emit(std::slice::from_ref(&report), common);
    Ok(report.verdict == Verdict::Pass)
}

pub fn matrices(addr: &str, common: &Common) -> Result<bool> {
    let (case, _) = resolve_case(addr)?;
    let mat = case.matrices()?;
    let mut reports = Vec::new();

    let mut form_defect = 0.0_f64;
    for m in &mat.generators {
        form_defect =
            form_defect.max(linalg::max_abs(&(m.transpose() * &mat.form * m - &mat.form)));
    }
    reports.push(ResidualReport::simple(
        mat.id.clone(),
        "form_preserved",
        mat.generators.len(),
        form_defect,
        1e-10,
        common.seed,
    ));

    let outcome = transport::invariant_splitting_search(
        &mat.generators,
        &mat.form,
        &transport::SearchOptions {
            seed: common.seed,
            ..transport::SearchOptions::default()
        },
    )?;
    let expect_splitting = mat.id.starts_with("o2xo2");
    let consistent = if expect_splitting {
        outcome.splitting.is_some()
    } else {
        outcome.certified_none && outcome.splitting.is_none()
    };
    let label = match (&outcome.splitting, outcome.certified_none) {
        (Some(s), _) => format!("splitting_found_ranks_{}_{}", s.ranks.0, s.ranks.1),
        (None, true) => "no_nondegenerate_splitting_certified".to_string(),
        (None, false) => "none_found_up_to_search_depth".to_string(),
    };
    reports.push(
        ResidualReport::simple(
            mat.id.clone(),
            label,
            outcome.samples_tried.max(1),
            if consistent { 0.0 } else { f64::INFINITY },
            0.0,
            common.seed,
        )
        .with_detail(WorstPoint {
            point: vec![
                outcome.commutant_dim as f64,
                outcome.selfadjoint_commutant_dim as f64,
            ],
            value: outcome.samples_tried as f64,
        }),
    );

    let mut plane_defect = 0.0_f64;
    for basis in &mat.degenerate_invariant {
        plane_defect =
            plane_defect.max(transport::subspace_invariance_defect(&mat.generators, basis));
        let gram = basis.transpose() * &mat.form * basis;
        plane_defect = plane_defect.max(linalg::max_abs(&gram));
    }
    if !mat.degenerate_invariant.is_empty() {
        reports.push(ResidualReport::simple(
            mat.id.clone(),
            "degenerate_planes_invariant",
            mat.degenerate_invariant.len(),
            plane_defect,
            1e-12,
            common.seed,
        ));
    }

    emit(&reports, common);
    Ok(passed(&reports))
}

#[derive(Serialize)]
struct CheckLine<'a> {
    expected: Verdict,
    #[serde(flatten)]
    report: &'a ResidualReport,
}

#[derive(Serialize)]
struct CriterionLine<'a> {
    criterion: usize,
    name: &'a str,
    passed: bool,
    checks: Vec<CheckLine<'a>>,
}

pub fn suite(common: &Common) -> Result<bool> {
    let reports = acceptance::run_all(common.seed)?;
    let mut all = true;
    for criterion in &reports {
        all &= criterion.passed;
        if is_json(common) {
            let line = CriterionLine {
                criterion: criterion.number,
                name: &criterion.name,
                passed: criterion.passed,
                checks: criterion
                    .reports
                    .iter()
                    .map(|(report, expected)| CheckLine {
                        expected: *expected,
                        report,
                    })
                    .collect(),
            };
            println!("{}", json_line(&line));
        } else {
            println!("{}", criterion.summary());
            for note in &criterion.notes {
                println!("    note: {note}");
            }
            for (report, expected) in &criterion.reports {
                if report.verdict != *expected {
                    println!(
                        "    offending: {} / {} verdict {:?} (expected {:?}), \
                         max residual {:.6e} vs tol {:.1e}",
                        report.case_id,
                        report.check,
                        report.verdict,
                        expected,
                        report.max_residual,
                        report.tolerance
                    );
                }
            }
        }
    }
    Ok(all)
}
