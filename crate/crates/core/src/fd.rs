//! Central finite-difference stencils: the independent cross-check path for
//! jet-computed derivatives.
//!
//! This module is deliberately ignorant of jets internally — it only ever
//! evaluates fields at points — so agreement between the two paths checks
//! the jet arithmetic, not itself.  It lives in the library (rather than
//! test-only code) because the acceptance battery and the `suite` command
//! both run the cross-check.
//!
//! Accuracy model: with step `h`, an order-`d` central stencil on a field
//! of magnitude `F` carries
//!
//! * truncation error `~ C·h^2` scaled by the `(d+2)`-th derivative, and
//! * cancellation noise `~ eps·F / h^d` from the rounded evaluations.
//!
//! Agreement is therefore judged per derivative order against the field's
//! own scale of that order over the sample (relative tolerance
//! [`FD_REL_TOL`], floored at [`FD_SCALE_FLOOR`]) with the noise floor
//! added.  Example of why the floor is not optional: the third-derivative
//! stencil at `h = 1e-3` divides by `2e-9`, so one ulp of a unit-sized
//! field is already `~1e-7` of irreducible absolute noise even when the
//! true derivative is exactly zero.

use crate::error::Result;
use crate::fields::MetricField;
use crate::fields::ScalarField;
use crate::jet::JET_ORDER;
use crate::report::PointMax;

/// Default step of the oracle.
pub const FD_STEP: f64 = 1e-3;

/// Relative tolerance of the jets-vs-stencils comparison.
pub const FD_REL_TOL: f64 = 1e-5;

/// Scale floor: below this magnitude, errors are measured against the floor
/// (giving the absolute tolerance `FD_REL_TOL * FD_SCALE_FLOOR`).
pub const FD_SCALE_FLOOR: f64 = 1e-2;

/// Central finite-difference partial derivative for a multi-index of total
/// degree <= 3, second-order stencils throughout.
pub fn fd_partial(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    p: &[f64],
    multi_index: &[u8],
    h: f64,
) -> Result<f64> {
    let var = multi_index.iter().position(|&k| k > 0);
    let Some(var) = var else {
        return f(p);
    };
    let order = multi_index[var];
    let mut rest = multi_index.to_vec();
    rest[var] = 0;
    // Snap the step to the representable grid so the evaluation offsets are
    // exact; otherwise coordinate rounding feeds f' * ulp(x) noise through
    // the h^3 denominator.
    let x = p[var];
    let h_eff = {
        let up = x + h;
        up - x
    };
    let shifted = |steps: f64| -> Vec<f64> {
        let mut q = p.to_vec();
        q[var] = x + steps * h_eff;
        q
    };
    let g = |q: &[f64]| fd_partial(f, q, &rest, h);
    match order {
        1 => Ok((g(&shifted(1.0))? - g(&shifted(-1.0))?) / (2.0 * h_eff)),
        2 => Ok((g(&shifted(1.0))? - 2.0 * g(p)? + g(&shifted(-1.0))?) / (h_eff * h_eff)),
        3 => Ok(
            (g(&shifted(2.0))? - 2.0 * g(&shifted(1.0))? + 2.0 * g(&shifted(-1.0))?
                - g(&shifted(-2.0))?)
                / (2.0 * h_eff * h_eff * h_eff),
        ),
        _ => Err(crate::error::Error::Argument(format!(
            "finite differences implemented up to order 3, requested {order}"
        ))),
    }
}

/// Noise-floor constant of the stencil error model.
pub const FD_NOISE_C: f64 = 4.0;

/// Worst normalized deviation between jet partials and finite differences.
/// A value of 1.0 means "exactly at the oracle's documented tolerance".
#[derive(Debug, Clone, Default)]
pub struct FdComparison {
    /// Max over points and indices of `|jet - fd| / tol`, with
    /// `tol = max(FD_REL_TOL * field scale of the order, noise floor)`.
    pub worst: f64,
    pub worst_point: Vec<f64>,
    pub worst_index: Vec<u8>,
    pub checks: usize,
}

fn multi_indices(dim: usize, max_degree: u8) -> Vec<Vec<u8>> {
    fn rec(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, budget: u8) {
        if var == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=budget {
            cur[var] = k;
            rec(out, cur, var + 1, budget - k);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    rec(&mut out, &mut vec![0; dim], 0, max_degree);
    out.retain(|m| m.iter().sum::<u8>() > 0);
    out
}

type PartialFn<'a> = &'a dyn Fn(&[f64], &[u8]) -> Result<f64>;

fn compare_partials(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    jet_partial: PartialFn<'_>,
    dim: usize,
    max_degree: u8,
    points: &[Vec<f64>],
    h: f64,
    acc: &mut FdComparison,
) -> Result<()> {
    let indices = multi_indices(dim, max_degree);
    // Per-degree scale of the field over the whole sample: each derivative
    // order has its own natural magnitude (third derivatives of the corpus
    // fields dwarf the values), and the stencil truncation scales with the
    // order, not with the pointwise value.
    let mut scale = [0.0_f64; JET_ORDER + 1];
    let mut value_scale = 0.0_f64;
    for p in points {
        value_scale = value_scale.max(f(p)?.abs());
        for mi in &indices {
            let deg: usize = mi.iter().map(|&k| k as usize).sum();
            scale[deg] = scale[deg].max(jet_partial(p, mi)?.abs());
        }
    }
    let tol_for = |deg: usize| -> f64 {
        let rel = FD_REL_TOL * scale[deg].max(FD_SCALE_FLOOR);
        let noise = FD_NOISE_C * f64::EPSILON * value_scale.max(1.0) / h.powi(deg as i32);
        rel.max(noise)
    };
    for p in points {
        for mi in &indices {
            let deg: usize = mi.iter().map(|&k| k as usize).sum();
            let exact = jet_partial(p, mi)?;
            let approx = fd_partial(f, p, mi, h)?;
            let dev = (exact - approx).abs() / tol_for(deg);
            acc.checks += 1;
            if dev > acc.worst {
                acc.worst = dev;
                acc.worst_point = p.clone();
                acc.worst_index = mi.clone();
            }
        }
    }
    Ok(())
}

/// Cross-check all partials (degree 1..=3) of a scalar field.
pub fn check_scalar(
    alpha: &ScalarField,
    points: &[Vec<f64>],
    h: f64,
    acc: &mut FdComparison,
) -> Result<()> {
    let dim = alpha.chart().dim();
    let value = alpha.clone();
    let jets = alpha.clone();
    compare_partials(
        &move |p: &[f64]| value.value_at(p),
        &move |p: &[f64], mi: &[u8]| jets.jet_at(p)?.extract_partial(mi),
        dim,
        JET_ORDER as u8,
        points,
        h,
        acc,
    )
}

/// Cross-check the partials of every metric component, up to the order the
/// metric jets actually carry.
pub fn check_metric(
    g: &MetricField,
    points: &[Vec<f64>],
    h: f64,
    acc: &mut FdComparison,
) -> Result<()> {
    let dim = g.dim();
    let order = {
        let probe = points
            .first()
            .ok_or_else(|| crate::error::Error::Argument("no points".into()))?;
        g.jets_at(probe)?[0][0].order()
    };
    for i in 0..dim {
        for j in 0..dim {
            let value = g.clone();
            let jets = g.clone();
            compare_partials(
                &move |p: &[f64]| Ok(value.jets_at(p)?[i][j].value()),
                &move |p: &[f64], mi: &[u8]| jets.jets_at(p)?[i][j].extract_partial(mi),
                dim,
                order,
                points,
                h,
                acc,
            )?;
        }
    }
    Ok(())
}

/// Run the whole-corpus cross-check: scalars and metric components of the
/// given cases, reporting the worst normalized deviation.
pub fn corpus_cross_check(
    cases: &[&crate::corpus::GeometryCase],
    seed: u64,
    points_per_case: usize,
) -> Result<(FdComparison, PointMax)> {
    let mut acc = FdComparison::default();
    let mut per_case = PointMax::new();
    for case in cases {
        let points = case.chart.sample(seed, points_per_case);
        let before = acc.worst;
        check_metric(&case.metric, &points, FD_STEP, &mut acc)?;
        for field in case.scalars.values() {
            check_scalar(field, &points, FD_STEP, &mut acc)?;
        }
        per_case.observe(&[case.id.len() as f64], acc.worst.max(before));
    }
    Ok((acc, per_case))
}
