//! Built-in model geometries with closed-form fields and known verdicts.
//!
//! Spheres use stereographic coordinates (`g = 4/(1+|x|^2)^2 δ`): one chart
//! covers everything but a single point, and the conformal form keeps jets
//! cheap.  Samplers stay well away from the missing point (the domain is cut
//! at `|x| < 10`).  Pseudo-spheres use a graph chart over the unit level set
//! of the ambient quadratic form, with the box kept small enough that the
//! induced metric stays well conditioned.
//!
//! The flat torus is represented by its covering chart; periodic fields
//! (sines/cosines of 2π-multiples) stand in for functions on the closed
//! torus, and the case carries a note saying so.  No lens-space chart is
//! built: the quotient story is mirrored only at the matrix level by the
//! invariant-splitting search, and the case notes flag that gap.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::cone::ConeChart;
use crate::error::{Error, Result};
use crate::fields::{JetTensor, MetricField, ScalarField, Symmetry, TensorField,
                    VectorFieldOnChart};
use crate::jet::{jet_sum, seed_positions, Jet};
use crate::transport::CurveSegment;

/// Expected outcome of a named check on a corpus case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct Expectation {
    pub check: String,
    pub field: Option<String>,
    pub constant: Option<f64>,
    pub expect: Expected,
}

impl Expectation {
    fn new(check: &str, field: Option<&str>, constant: Option<f64>, expect: Expected) -> Self {
        Expectation {
            check: check.to_string(),
            field: field.map(str::to_string),
            constant,
            expect,
        }
    }
}

/// A chart-based corpus case: metric plus attached fields and verdicts.
pub struct GeometryCase {
    pub id: String,
    pub chart: Chart,
    pub metric: MetricField,
    pub scalars: BTreeMap<String, ScalarField>,
    pub vectors: BTreeMap<String, VectorFieldOnChart>,
    pub tensors: BTreeMap<String, TensorField>,
    pub extra_metrics: BTreeMap<String, MetricField>,
    pub expected: Vec<Expectation>,
    pub notes: Vec<String>,
}

impl GeometryCase {
    fn new(id: impl Into<String>, chart: Chart, metric: MetricField) -> GeometryCase {
        GeometryCase {
            id: id.into(),
            chart,
            metric,
            scalars: BTreeMap::new(),
            vectors: BTreeMap::new(),
            tensors: BTreeMap::new(),
            extra_metrics: BTreeMap::new(),
            expected: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// A linear-algebra corpus case: a bilinear form and matrices preserving it.
pub struct MatrixCase {
    pub id: String,
    pub form: DMatrix<f64>,
    pub generators: Vec<DMatrix<f64>>,
    /// Bases (as column matrices) of known invariant totally degenerate
    /// subspaces, when the case has them.
    pub degenerate_invariant: Vec<DMatrix<f64>>,
    pub notes: Vec<String>,
}

pub enum Case {
    Geometry(Box<GeometryCase>),
    Matrices(Box<MatrixCase>),
}

impl Case {
    pub fn id(&self) -> &str {
        match self {
            Case::Geometry(c) => &c.id,
            Case::Matrices(c) => &c.id,
        }
    }

    pub fn geometry(&self) -> Result<&GeometryCase> {
        match self {
            Case::Geometry(c) => Ok(c),
            Case::Matrices(c) => Err(Error::Argument(format!(
                "case {} is a matrix case, not a chart case",
                c.id
            ))),
        }
    }

    pub fn matrices(&self) -> Result<&MatrixCase> {
        match self {
            Case::Matrices(c) => Ok(c),
            Case::Geometry(c) => Err(Error::Argument(format!(
                "case {} is a chart case, not a matrix case",
                c.id
            ))),
        }
    }
}

/// Inverse stereographic embedding of a chart point into the unit sphere:
/// `S_i = 2 x_i / (1+|x|^2)`, `S_{n+1} = (|x|^2 - 1)/(|x|^2 + 1)`.
pub fn stereo_embedding(seeds: &[Jet]) -> Result<Vec<Jet>> {
    let dim = seeds[0].dim();
    let mut rho = Jet::constant(0.0, dim);
    for s in seeds {
        rho = rho.add(&s.mul(s)?)?;
    }
    let denom = rho.add_scalar(1.0).recip()?;
    let mut out = Vec::with_capacity(seeds.len() + 1);
    for s in seeds {
        out.push(s.scale(2.0).mul(&denom)?);
    }
    out.push(rho.add_scalar(-1.0).mul(&denom)?);
    Ok(out)
}

/// Chart point of an ambient unit-sphere point (stereographic projection);
/// defined away from the missing pole `X_{n+1} = 1`.
pub fn sphere_chart_point(ambient: &[f64]) -> Vec<f64> {
    let last = ambient[ambient.len() - 1];
    ambient[..ambient.len() - 1]
        .iter()
        .map(|&v| v / (1.0 - last))
        .collect()
}

fn sphere_chart(n: usize) -> Chart {
    let half = 2.2;
    Chart::new(
        format!("round_sphere_{n}"),
        vec![(-half, half); n],
        |p| p.iter().map(|v| v * v).sum::<f64>() < 100.0,
    )
}

fn round_metric(chart: &Chart, n: usize) -> MetricField {
    MetricField::new(chart.clone(), (n, 0), move |seeds: &[Jet]| {
        let dim = seeds[0].dim();
        let mut rho = Jet::constant(0.0, dim);
        for s in seeds {
            rho = rho.add(&s.mul(s)?)?;
        }
        let conf = rho.add_scalar(1.0).recip()?.powi(2).scale(4.0);
        let n = seeds.len();
        let zero = Jet::constant(0.0, dim);
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { conf.clone() } else { zero.clone() })
                    .collect()
            })
            .collect())
    })
}

fn linear_harmonic(chart: &Chart, direction: Vec<f64>) -> ScalarField {
    ScalarField::new(chart.clone(), move |seeds: &[Jet]| {
        let emb = stereo_embedding(seeds)?;
        let terms: Vec<Jet> = emb
            .iter()
            .zip(direction.iter())
            .map(|(e, &a)| e.scale(a))
            .collect();
        jet_sum(&terms)
    })
}

fn quadratic_harmonic(chart: &Chart, q: DMatrix<f64>) -> ScalarField {
    ScalarField::new(chart.clone(), move |seeds: &[Jet]| {
        let emb = stereo_embedding(seeds)?;
        let m = emb.len();
        let mut acc = Jet::constant(0.0, seeds[0].dim());
        for i in 0..m {
            for j in 0..m {
                if q[(i, j)] != 0.0 {
                    acc = acc.add(&emb[i].mul(&emb[j])?.scale(q[(i, j)]))?;
                }
            }
        }
        Ok(acc)
    })
}

/// Traceless quadratic form `e_k e_k^T - I/(n+1)`.  For the shipped sphere
/// dimensions (n = 2, 3) the diagonal cancels exactly in sequential
/// summation: the leading entry is an exact doubling/power-of-two multiple
/// of the others.
fn traceless_axis_form(n: usize, axis: usize) -> DMatrix<f64> {
    let m = n + 1;
    let inv = 1.0 / m as f64;
    let mut q = DMatrix::from_diagonal_element(m, m, -inv);
    q[(axis, axis)] = n as f64 * inv;
    q
}

/// Vector field on the sphere chart induced by an ambient linear map:
/// the tangent projection of `X -> E X` pushed through the chart.
fn ambient_linear_field(chart: &Chart, e: DMatrix<f64>) -> VectorFieldOnChart {
    VectorFieldOnChart::new(chart.clone(), move |seeds: &[Jet]| {
        let emb = stereo_embedding(seeds)?;
        let m = emb.len();
        let dim = seeds[0].dim();
        // v = E S - <E S, S> S  (tangent projection of the linear flow)
        let mut es = vec![Jet::constant(0.0, dim); m];
        for i in 0..m {
            for j in 0..m {
                if e[(i, j)] != 0.0 {
                    es[i] = es[i].add(&emb[j].scale(e[(i, j)]))?;
                }
            }
        }
        let mut pairing = Jet::constant(0.0, dim);
        for i in 0..m {
            pairing = pairing.add(&es[i].mul(&emb[i])?)?;
        }
        let v: Vec<Jet> = es
            .iter()
            .zip(emb.iter())
            .map(|(a, s)| a.sub(&pairing.mul(s)?))
            .collect::<Result<_>>()?;
        // Push through the chart: x_i = X_i / (1 - X_{n+1}).
        let last = &emb[m - 1];
        let denom = last.neg().add_scalar(1.0).recip()?;
        let denom2 = denom.mul(&denom)?;
        (0..m - 1)
            .map(|i| {
                let first = v[i].mul(&denom)?;
                let second = emb[i].mul(&v[m - 1])?.mul(&denom2)?;
                first.add(&second)
            })
            .collect()
    })
}

/// Round sphere of dimension `n >= 2` with its standard attached fields:
/// degree-1 and degree-2 eigenfunctions, an ambient rotation (Killing) and,
/// for `n = 2`, the trace-free-symmetric projective field.
pub fn round_sphere(n: usize) -> Result<GeometryCase> {
    if n < 2 {
        return Err(Error::Argument(format!("round_sphere needs n >= 2, got {n}")));
    }
    let chart = sphere_chart(n);
    let metric = round_metric(&chart, n);
    let mut case = GeometryCase::new(format!("round_sphere:{n}"), chart.clone(), metric);

    let mut e1 = vec![0.0; n + 1];
    e1[0] = 1.0;
    case.scalars
        .insert("harmonic_deg1".to_string(), linear_harmonic(&chart, e1));
    case.scalars.insert(
        "harmonic_deg2".to_string(),
        quadratic_harmonic(&chart, traceless_axis_form(n, 0)),
    );
    case.scalars
        .insert("const".to_string(), ScalarField::constant(chart.clone(), 1.0));

    let mut rot = DMatrix::zeros(n + 1, n + 1);
    rot[(0, 1)] = -1.0;
    rot[(1, 0)] = 1.0;
    case.vectors
        .insert("rotation_xy".to_string(), ambient_linear_field(&chart, rot));
    if n + 1 >= 3 {
        let mut rot2 = DMatrix::zeros(n + 1, n + 1);
        rot2[(1, 2)] = -1.0;
        rot2[(2, 1)] = 1.0;
        case.vectors
            .insert("rotation_yz".to_string(), ambient_linear_field(&chart, rot2));
    }
    let mut sym = DMatrix::zeros(n + 1, n + 1);
    sym[(0, 0)] = 1.0;
    sym[(1, 1)] = -1.0;
    case.vectors
        .insert("sl3_projective".to_string(), ambient_linear_field(&chart, sym));

    let nf = n as f64;
    case.expected = vec![
        Expectation::new("laplace_eigen", Some("harmonic_deg1"), Some(-nf), Expected::Pass),
        Expectation::new(
            "laplace_eigen",
            Some("harmonic_deg2"),
            Some(-2.0 * (nf + 1.0)),
            Expected::Pass,
        ),
        Expectation::new("obata_residual", Some("harmonic_deg1"), None, Expected::Pass),
        Expectation::new("obata_residual", Some("harmonic_deg2"), None, Expected::Fail),
        Expectation::new("gt_residual", Some("harmonic_deg2"), Some(1.0), Expected::Pass),
        Expectation::new("gt_residual", Some("harmonic_deg1"), Some(1.0), Expected::Fail),
        Expectation::new("gt_residual", Some("const"), Some(1.0), Expected::Pass),
        Expectation::new("killing_residual", Some("rotation_xy"), None, Expected::Pass),
        Expectation::new("killing_residual", Some("sl3_projective"), None, Expected::Fail),
        Expectation::new("einstein_residual", None, None, Expected::Pass),
        Expectation::new("parallel_hessian", Some("harmonic_deg2"), None, Expected::Pass),
        Expectation::new("parallel_hessian", Some("harmonic_deg1"), None, Expected::Fail),
        Expectation::new("cone_connection", None, None, Expected::Pass),
        Expectation::new("cone_curvature_identity", None, None, Expected::Pass),
        Expectation::new("cone_flat", None, None, Expected::Pass),
        Expectation::new("metric_valid", None, None, Expected::Pass),
    ];
    Ok(case)
}

/// Round sphere with the scalar `alpha` set to a degree-1 eigenfunction in a
/// chosen ambient direction.
pub fn harmonic_deg1_case(n: usize, direction: &[f64]) -> Result<GeometryCase> {
    if direction.len() != n + 1 || direction.iter().all(|&v| v == 0.0) {
        return Err(Error::Argument(format!(
            "harmonic_deg1 direction must be a nonzero vector of length {}",
            n + 1
        )));
    }
    let norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit: Vec<f64> = direction.iter().map(|v| v / norm).collect();
    let mut case = round_sphere(n)?;
    case.id = format!("harmonic_deg1:{n}");
    let field = linear_harmonic(&case.chart, unit);
    case.scalars.insert("alpha".to_string(), field);
    Ok(case)
}

/// Round sphere with the scalar `alpha` set to a degree-2 eigenfunction of a
/// caller-provided symmetric form (its traceless part is used).
pub fn harmonic_deg2_case(n: usize, form: &DMatrix<f64>) -> Result<GeometryCase> {
    let m = n + 1;
    if form.nrows() != m || form.ncols() != m {
        return Err(Error::Argument(format!(
            "harmonic_deg2 form must be {m}x{m}"
        )));
    }
    let sym = (form + form.transpose()).scale(0.5);
    let trace = sym.trace();
    let q = &sym - DMatrix::from_diagonal_element(m, m, trace / m as f64);
    let mut case = round_sphere(n)?;
    case.id = format!("harmonic_deg2:{n}");
    let field = quadratic_harmonic(&case.chart, q);
    case.scalars.insert("alpha".to_string(), field);
    Ok(case)
}

/// Pseudo-sphere `{<x,x> = 1}` in signature `(p+1, q)`, as a graph chart
/// over the tangent plane at `(1, 0, ..., 0)`.  Constant curvature 1 with
/// induced signature `(p, q)`.
pub fn pseudo_sphere(p: usize, q: usize) -> Result<GeometryCase> {
    let n = p + q;
    if n < 2 {
        return Err(Error::Argument(format!(
            "pseudo_sphere needs p + q >= 2, got ({p}, {q})"
        )));
    }
    let half = (0.6 / n as f64).sqrt().min(0.6);
    let radicand = move |z: &[f64]| {
        let mut acc = 1.0;
        for (i, v) in z.iter().enumerate() {
            if i < p {
                acc -= v * v;
            } else {
                acc += v * v;
            }
        }
        acc
    };
    let chart = Chart::new(
        format!("pseudo_sphere_{p}_{q}"),
        vec![(-half, half); n],
        move |z| radicand(z) > 0.3 && z.iter().all(|v| v.abs() < 1.0),
    );
    let metric = MetricField::new(chart.clone(), (p, q), move |seeds: &[Jet]| {
        let vars = seed_positions(seeds)?;
        let dim = seeds[0].dim();
        let n = seeds.len();
        // X^0 = sqrt(1 - sum u^2 + sum w^2), X^{a+1} = z_a.
        let mut rad = Jet::constant(1.0, dim);
        for (i, s) in seeds.iter().enumerate() {
            let sq = s.mul(s)?;
            rad = if i < p { rad.sub(&sq)? } else { rad.add(&sq)? };
        }
        let x0 = rad.sqrt()?;
        // eta = (+ for X^0 and first p graph coords, - for the rest)
        let mut rows = Vec::with_capacity(n);
        for a in 0..n {
            let dx0_a = x0.partial(vars[a])?;
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                let dx0_b = x0.partial(vars[b])?;
                let mut acc = dx0_a.mul(&dx0_b)?;
                if a == b {
                    let sign = if a < p { 1.0 } else { -1.0 };
                    acc = acc.add_scalar(sign);
                }
                row.push(acc);
            }
            rows.push(row);
        }
        Ok(rows)
    });
    let mut case = GeometryCase::new(format!("pseudo_sphere:{p},{q}"), chart, metric);
    case.expected = vec![
        Expectation::new("metric_valid", None, None, Expected::Pass),
        Expectation::new("cone_connection", None, None, Expected::Pass),
        Expectation::new("cone_flat", None, None, Expected::Pass),
    ];
    Ok(case)
}

/// Flat chart of signature `(p, q)`.
pub fn flat(p: usize, q: usize) -> Result<GeometryCase> {
    let n = p + q;
    if n == 0 {
        return Err(Error::Argument("flat chart needs a positive dimension".into()));
    }
    let chart = Chart::new(format!("flat_{p}_{q}"), vec![(-3.0, 3.0); n], |z| {
        z.iter().all(|v| v.abs() < 10.0)
    });
    let metric = crate::geometry::flat_metric(chart.clone(), p, q);
    let mut case = GeometryCase::new(format!("flat:{p},{q}"), chart.clone(), metric);
    case.scalars
        .insert("const".to_string(), ScalarField::constant(chart.clone(), 1.0));
    case.scalars.insert(
        "linear".to_string(),
        ScalarField::new(chart.clone(), |s| Ok(s[0].clone())),
    );
    if n >= 2 {
        case.vectors.insert(
            "rotation".to_string(),
            VectorFieldOnChart::new(chart.clone(), |s| Ok(vec![s[1].neg(), s[0].clone()])),
        );
        case.vectors.insert(
            "dilation".to_string(),
            VectorFieldOnChart::new(chart.clone(), |s| Ok(s.to_vec())),
        );
    }
    case.expected = vec![
        Expectation::new("gt_residual", Some("const"), Some(0.0), Expected::Pass),
        Expectation::new("gt_residual", Some("linear"), Some(0.0), Expected::Pass),
        Expectation::new("gt_residual", Some("linear"), Some(1.0), Expected::Fail),
        Expectation::new("einstein_residual", None, None, Expected::Pass),
        Expectation::new("metric_valid", None, None, Expected::Pass),
    ];
    Ok(case)
}

/// Covering chart of the flat square 2-torus, with periodic test functions.
pub fn flat_torus_chart() -> Result<GeometryCase> {
    let chart = Chart::new("flat_torus", vec![(0.0, 1.0), (0.0, 1.0)], |_| true);
    let metric = crate::geometry::flat_metric(chart.clone(), 2, 0);
    let mut case = GeometryCase::new("flat_torus_chart", chart.clone(), metric);
    case.scalars.insert(
        "sin2pix".to_string(),
        ScalarField::new(chart.clone(), |s| {
            s[0].scale(2.0 * std::f64::consts::PI).sin()
        }),
    );
    case.scalars.insert(
        "linear".to_string(),
        ScalarField::new(chart.clone(), |s| s[0].scale(0.7).add(&s[1].scale(-0.3))),
    );
    case.scalars
        .insert("const".to_string(), ScalarField::constant(chart.clone(), 2.0));
    case.notes.push(
        "covering chart of the closed torus; periodic fields (sines/cosines of \
         2π-multiples) stand in for functions on the quotient, linear fields are \
         chart-level only"
            .to_string(),
    );
    case.expected = vec![
        Expectation::new("gt_residual", Some("sin2pix"), Some(0.0), Expected::Fail),
        Expectation::new("gt_residual", Some("linear"), Some(0.0), Expected::Pass),
        Expectation::new("c0_parallel", Some("linear"), None, Expected::Pass),
    ];
    Ok(case)
}

/// Conformally perturbed round sphere: `exp(2 eps S_1) g_round`.  Not
/// Einstein for `n >= 3`, not of constant curvature for any `n >= 2`.
pub fn bumpy_sphere(n: usize, eps: f64) -> Result<GeometryCase> {
    if n < 2 {
        return Err(Error::Argument("bumpy_sphere needs n >= 2".into()));
    }
    if !(eps.abs() > 0.0 && eps.abs() <= 0.5) {
        return Err(Error::Argument(format!(
            "bumpy_sphere perturbation {eps} outside (0, 0.5]"
        )));
    }
    let chart = sphere_chart(n);
    let round = round_metric(&chart, n);
    let metric = MetricField::new(chart.clone(), (n, 0), move |seeds: &[Jet]| {
        let base = round.eval_jets(seeds)?;
        let bump = stereo_embedding(seeds)?[0].scale(2.0 * eps).exp()?;
        base.into_iter()
            .map(|row| row.into_iter().map(|g| g.mul(&bump)).collect())
            .collect()
    });
    let mut case = GeometryCase::new(format!("bumpy_sphere:{n}"), chart, metric);
    case.expected = vec![
        Expectation::new("metric_valid", None, None, Expected::Pass),
        Expectation::new("cone_connection", None, None, Expected::Pass),
        Expectation::new("cone_curvature_identity", None, None, Expected::Pass),
        Expectation::new("cone_flat", None, None, Expected::Fail),
    ];
    if n >= 3 {
        case.expected.push(Expectation::new(
            "einstein_residual",
            None,
            None,
            Expected::Fail,
        ));
    }
    Ok(case)
}

fn ambient_map_values(l: &DMatrix<f64>, x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    let rho: f64 = x.iter().map(|v| v * v).sum();
    let mut s = vec![0.0; n + 1];
    for i in 0..n {
        s[i] = 2.0 * x[i] / (1.0 + rho);
    }
    s[n] = (rho - 1.0) / (rho + 1.0);
    let mut y = vec![0.0; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            y[i] += l[(i, j)] * s[j];
        }
    }
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return None;
    }
    let last = y[n] / norm;
    if 1.0 - last < 0.02 {
        return None;
    }
    Some(y.iter().map(|v| v / norm).collect())
}

/// Round sphere together with its pullback under the projective map
/// `X -> L X / |L X|`.  The two metrics share unparametrized geodesics but
/// are not affinely equivalent when `L` is not orthogonal-times-scalar.
/// The pullback metric is attached as `extra_metrics["pullback"]`.
pub fn beltrami_pair(n: usize, l: &DMatrix<f64>) -> Result<GeometryCase> {
    let m = n + 1;
    if l.nrows() != m || l.ncols() != m {
        return Err(Error::Argument(format!("beltrami map must be {m}x{m}")));
    }
    if l.determinant().abs() < 1e-9 {
        return Err(Error::Argument("beltrami map must be invertible".into()));
    }
    let base = round_sphere(n)?;
    let l_dom = l.clone();
    let chart = Chart::new(
        format!("beltrami_{n}"),
        base.chart.sample_box().to_vec(),
        move |x| {
            x.iter().map(|v| v * v).sum::<f64>() < 100.0
                && ambient_map_values(&l_dom, x).is_some()
        },
    );
    let round = round_metric(&chart, n);
    let l_jet = l.clone();
    let pullback = MetricField::new(chart.clone(), (n, 0), move |seeds: &[Jet]| {
        let vars = seed_positions(seeds)?;
        let dim = seeds[0].dim();
        let nn = seeds.len();
        let emb = stereo_embedding(seeds)?;
        let m = emb.len();
        // Y = L S, then normalize and project back to the chart.
        let mut y = vec![Jet::constant(0.0, dim); m];
        for i in 0..m {
            for j in 0..m {
                if l_jet[(i, j)] != 0.0 {
                    y[i] = y[i].add(&emb[j].scale(l_jet[(i, j)]))?;
                }
            }
        }
        let mut norm2 = Jet::constant(0.0, dim);
        for v in &y {
            norm2 = norm2.add(&v.mul(v)?)?;
        }
        let inv_norm = norm2.sqrt()?.recip()?;
        let yhat: Vec<Jet> = y.iter().map(|v| v.mul(&inv_norm)).collect::<Result<_>>()?;
        let denom = yhat[m - 1].neg().add_scalar(1.0).recip()?;
        let phi: Vec<Jet> = (0..m - 1)
            .map(|i| yhat[i].mul(&denom))
            .collect::<Result<_>>()?;
        // Conformal factor of the round metric at phi.
        let mut rho = Jet::constant(0.0, dim);
        for c in &phi {
            rho = rho.add(&c.mul(c)?)?;
        }
        let conf = rho.add_scalar(1.0).recip()?.powi(2).scale(4.0);
        // Pullback: 4/(1+|phi|^2)^2 sum_k d_a phi^k d_b phi^k.
        let mut dphi = vec![Vec::with_capacity(nn); m - 1];
        for (k, c) in phi.iter().enumerate() {
            for a in 0..nn {
                dphi[k].push(c.partial(vars[a])?);
            }
        }
        let mut rows = Vec::with_capacity(nn);
        for a in 0..nn {
            let mut row = Vec::with_capacity(nn);
            for b in 0..nn {
                let mut acc = Jet::constant(0.0, dim);
                for dk in dphi.iter() {
                    acc = acc.add(&dk[a].mul(&dk[b])?)?;
                }
                row.push(acc.mul(&conf)?);
            }
            rows.push(row);
        }
        Ok(rows)
    });
    let mut case = GeometryCase::new(format!("beltrami_pair:{n}"), chart, round);
    case.extra_metrics.insert("pullback".to_string(), pullback);
    case.expected = vec![
        Expectation::new("metric_valid", None, None, Expected::Pass),
        Expectation::new("basic1_candidate", Some("pullback"), None, Expected::Pass),
    ];
    Ok(case)
}

/// Default non-isometric projective element for the Beltrami pair.
pub fn default_beltrami_map(n: usize) -> DMatrix<f64> {
    let mut l = DMatrix::identity(n + 1, n + 1);
    l[(0, 0)] = 2.0;
    l
}

/// Second independent projective element (stretch along the second axis).
pub fn second_beltrami_map(n: usize) -> DMatrix<f64> {
    let mut l = DMatrix::identity(n + 1, n + 1);
    l[(1, 1)] = 2.0;
    l
}

/// Round 2-sphere with `alpha`-independent projective field induced by an
/// ambient trace-free map.
pub fn sl3_projective_case(e: &DMatrix<f64>) -> Result<GeometryCase> {
    if e.nrows() != 3 || e.ncols() != 3 {
        return Err(Error::Argument("sl3 element must be 3x3".into()));
    }
    let traceless = e - DMatrix::from_diagonal_element(3, 3, e.trace() / 3.0);
    let mut case = round_sphere(2)?;
    case.id = "sl3_projective_field".to_string();
    let field = ambient_linear_field(&case.chart, traceless);
    case.vectors.insert("field".to_string(), field);
    Ok(case)
}

// ---------------------------------------------------------------------------
// Matrix cases
// ---------------------------------------------------------------------------

/// Polarized determinant form on 2x2 matrices, coordinates
/// `(m11, m12, m21, m22)`: `B(M, N) = (det(M+N) - det M - det N)/2`.
pub fn determinant_form() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, 0.5, //
            0.0, 0.0, -0.5, 0.0, //
            0.0, -0.5, 0.0, 0.0, //
            0.5, 0.0, 0.0, 0.0,
        ],
    )
}

/// Matrix of left multiplication by `a` on 2x2 matrices.
pub fn left_multiplication(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                l[(2 * i + j, 2 * k + j)] = a[(i, k)];
            }
        }
    }
    l
}

/// Seeded sample of unimodular 2x2 matrices.
pub fn sl2_sample(seed: u64, count: usize) -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 =
                rng.random_range(0.5..1.5) * if rng.random_range(0.0..1.0) < 0.5 { -1.0 } else { 1.0 };
            let b: f64 = rng.random_range(-1.2..1.2);
            let c: f64 = rng.random_range(-1.2..1.2);
            let d = (1.0 + b * c) / a;
            DMatrix::from_row_slice(2, 2, &[a, b, c, d])
        })
        .collect()
}

/// Basis (columns) of the annihilator `{M : M v = 0}`, a 2-dimensional
/// totally degenerate subspace of the determinant-form space.
pub fn annihilator_basis(v: [f64; 2]) -> DMatrix<f64> {
    // Rows of M must be orthogonal to v: row = t (v2, -v1).
    DMatrix::from_row_slice(
        4,
        2,
        &[
            v[1], 0.0, //
            -v[0], 0.0, //
            0.0, v[1], //
            0.0, -v[0],
        ],
    )
}

/// The 2x2-matrix space with its determinant form, sample unimodular left
/// multiplications and the two standard invariant degenerate planes.
pub fn m2r_determinant_space(seed: u64, count: usize) -> Result<MatrixCase> {
    if count == 0 {
        return Err(Error::Argument("need at least one sample element".into()));
    }
    let generators = sl2_sample(seed, count)
        .iter()
        .map(left_multiplication)
        .collect();
    Ok(MatrixCase {
        id: "m2r_determinant_space".to_string(),
        form: determinant_form(),
        generators,
        degenerate_invariant: vec![annihilator_basis([1.0, 0.0]), annihilator_basis([0.0, 1.0])],
        notes: vec![
            "left multiplication preserves the determinant form and each \
             annihilator plane; no nondegenerate invariant splitting exists"
                .to_string(),
        ],
    })
}

fn quaternion_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let (w1, x1, y1, z1) = (a[0], a[1], a[2], a[3]);
    let (w2, x2, y2, z2) = (b[0], b[1], b[2], b[3]);
    [
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ]
}

/// Matrix of left quaternion multiplication on coordinates `(1, i, j, k)`.
pub fn quaternion_left_matrix(q: [f64; 4]) -> DMatrix<f64> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            w, -x, -y, -z, //
            x, w, -z, y, //
            y, z, w, -x, //
            z, -y, x, w,
        ],
    )
}

/// Close a set of unit quaternions under multiplication.
pub fn quaternion_group_closure(generators: &[[f64; 4]], cap: usize) -> Result<Vec<[f64; 4]>> {
    let key = |q: &[f64; 4]| -> [i64; 4] {
        let mut k = [0i64; 4];
        for (slot, v) in k.iter_mut().zip(q.iter()) {
            *slot = (v * 1e9).round() as i64;
        }
        k
    };
    let mut elements: Vec<[f64; 4]> = vec![[1.0, 0.0, 0.0, 0.0]];
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(key(&elements[0]));
    for g in generators {
        if seen.insert(key(g)) {
            elements.push(*g);
        }
    }
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in generators {
                let prod = quaternion_mul(*f, *g);
                if seen.insert(key(&prod)) {
                    elements.push(prod);
                    next.push(prod);
                    if elements.len() > cap {
                        return Err(Error::Argument(format!(
                            "group closure exceeded cap {cap}; generators do not \
                             generate a small finite group"
                        )));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(elements)
}

/// Generators of the binary icosahedral group (order 120) acting on R^4 by
/// left quaternion multiplication.
pub fn icosahedral_group() -> Result<MatrixCase> {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let generators_q: Vec<[f64; 4]> = vec![
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.5, 0.5, 0.5, 0.5],
        [phi / 2.0, 1.0 / (2.0 * phi), 0.5, 0.0],
    ];
    let generators = generators_q
        .iter()
        .map(|&q| quaternion_left_matrix(q))
        .collect();
    Ok(MatrixCase {
        id: "icosahedral_group".to_string(),
        form: DMatrix::identity(4, 4),
        generators,
        degenerate_invariant: Vec::new(),
        notes: vec![
            "unit-quaternion generators; the generated group has order 120 and \
             acts irreducibly on R^4"
                .to_string(),
        ],
    })
}

fn rotation2(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

fn block_rotation(theta: f64, phi: f64) -> DMatrix<f64> {
    let a = rotation2(theta);
    let b = rotation2(phi);
    let mut m = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = a[i][j];
            m[(2 + i, 2 + j)] = b[i][j];
        }
    }
    m
}

/// Two block rotations generating a subgroup of O(2) x O(2) on R^4; the
/// block splitting is invariant and nondegenerate.
pub fn o2xo2_group() -> Result<MatrixCase> {
    Ok(MatrixCase {
        id: "o2xo2_group".to_string(),
        form: DMatrix::identity(4, 4),
        generators: vec![block_rotation(0.7, 1.3), block_rotation(2.1, 0.4)],
        degenerate_invariant: Vec::new(),
        notes: vec!["block rotations; the coordinate 2+2 splitting is invariant".to_string()],
    })
}

// ---------------------------------------------------------------------------
// Cone helpers for the sphere corpus
// ---------------------------------------------------------------------------

/// Constant ambient tensor `sum_{i in axes} dX^i ⊗ dX^i` written in cone
/// coordinates over a stereographic sphere chart (the cone is the punctured
/// ambient space, `X = r S(x)`).  Parallel by construction.
pub fn cone_cartesian_tensor(cone: &ConeChart, axes: &[usize]) -> Result<TensorField> {
    let n = cone.base_chart.dim();
    for &a in axes {
        if a > n {
            return Err(Error::Argument(format!(
                "ambient axis {a} out of range for the {n}-sphere"
            )));
        }
    }
    let axes = axes.to_vec();
    Ok(TensorField::new(
        cone.chart.clone(),
        2,
        Symmetry::Symmetric,
        move |seeds: &[Jet]| {
            let dim = seeds[0].dim();
            let r = &seeds[0];
            let x_seeds = &seeds[1..];
            let vars = seed_positions(x_seeds)?;
            let emb = stereo_embedding(x_seeds)?;
            let nn = x_seeds.len();
            // dX^i has cone components (S_i, r ∂_a S_i).
            let mut grads: Vec<Vec<Jet>> = Vec::with_capacity(axes.len());
            for &i in &axes {
                let mut row = Vec::with_capacity(nn + 1);
                row.push(emb[i].clone());
                for a in 0..nn {
                    row.push(r.mul(&emb[i].partial(vars[a])?)?);
                }
                grads.push(row);
            }
            JetTensor::from_fn(nn + 1, 2, |idx| {
                let mut acc = Jet::constant(0.0, dim);
                for row in &grads {
                    acc = acc.add(&row[idx[0]].mul(&row[idx[1]])?)?;
                }
                Ok(acc)
            })
        },
    ))
}

/// Projector field (in cone coordinates) onto the span of constant ambient
/// axes, over the cone of a stereographic sphere chart.
pub fn cone_axis_projector(
    cone: &ConeChart,
    axes: &[usize],
) -> Result<crate::cone::ProjectorField> {
    let n = cone.base_chart.dim();
    for &a in axes {
        if a > n {
            return Err(Error::Argument(format!(
                "ambient axis {a} out of range for the {n}-sphere"
            )));
        }
    }
    let axes = axes.to_vec();
    Ok(std::sync::Arc::new(move |seeds: &[Jet]| {
        let dim = seeds[0].dim();
        let r = &seeds[0];
        let x_seeds = &seeds[1..];
        let vars = seed_positions(x_seeds)?;
        let emb = stereo_embedding(x_seeds)?;
        let nn = x_seeds.len();
        let m = nn + 1;
        // Jacobian J of X = r S(x): rows are ambient coordinates, columns
        // are (r, x) coordinates.
        let mut jac = vec![vec![Jet::constant(0.0, dim); m]; m];
        for (i, e) in emb.iter().enumerate() {
            jac[i][0] = e.clone();
            for a in 0..nn {
                jac[i][a + 1] = r.mul(&e.partial(vars[a])?)?;
            }
        }
        let jac_inv = crate::linalg::invert_jet_matrix(&jac)?;
        // P_cone = J^{-1} P_ambient J with P_ambient = sum e_i e_i^T.
        let mut out = vec![vec![Jet::constant(0.0, dim); m]; m];
        for row in 0..m {
            for col in 0..m {
                let mut acc = Jet::constant(0.0, dim);
                for &i in &axes {
                    acc = acc.add(&jac_inv[row][i].mul(&jac[i][col])?)?;
                }
                out[row][col] = acc;
            }
        }
        Ok(out)
    }))
}

/// Boundary of the first octant on the round 2-sphere: three quarter
/// great-circle arcs through `(1,0,0)`, `(0,1,0)` and the chart origin
/// `(0,0,-1)`, traversed as a closed loop.  Encloses area π/2.
pub fn octant_loop(chart: &Chart) -> CurveSegment {
    let verts = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, -1.0],
    ];
    let eval = move |t: f64| -> (Vec<f64>, Vec<f64>) {
        let leg = ((t * 3.0).floor() as usize).min(2);
        let s = (t * 3.0 - leg as f64) * std::f64::consts::FRAC_PI_2;
        let a = verts[leg];
        let b = verts[(leg + 1) % 3];
        let (sin, cos) = s.sin_cos();
        let speed = 3.0 * std::f64::consts::FRAC_PI_2;
        let x: Vec<f64> = (0..3).map(|i| cos * a[i] + sin * b[i]).collect();
        let dx: Vec<f64> = (0..3).map(|i| speed * (-sin * a[i] + cos * b[i])).collect();
        // Chart projection u_i = X_i / (1 - X_3) and its derivative.
        let denom = 1.0 - x[2];
        let point = vec![x[0] / denom, x[1] / denom];
        let vel = vec![
            (dx[0] * denom + x[0] * dx[2]) / (denom * denom),
            (dx[1] * denom + x[1] * dx[2]) / (denom * denom),
        ];
        (point, vel)
    };
    CurveSegment::from_fn(chart.clone(), eval, vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0])
}

// ---------------------------------------------------------------------------
// String-addressed construction (the CLI vocabulary)
// ---------------------------------------------------------------------------

/// Build a case from its id and numeric parameters.
///
/// Known ids: `round_sphere(n)`, `harmonic_deg1(n)`, `harmonic_deg2(n)`,
/// `pseudo_sphere(p, q)`, `flat(p, q)`, `flat_torus_chart`,
/// `bumpy_sphere(n, eps)`, `beltrami_pair(n)`, `sl3_projective_field`,
/// `m2r_determinant_space(count?)`, `icosahedral_group`, `o2xo2_group`.
pub fn make_case(id: &str, params: &[f64]) -> Result<Case> {
    let int = |v: f64| -> Result<usize> {
        if v.fract() == 0.0 && v >= 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::Argument(format!("expected a nonnegative integer, got {v}")))
        }
    };
    let geometry = |c: GeometryCase| Ok(Case::Geometry(Box::new(c)));
    match id {
        "round_sphere" => {
            let n = int(*params.first().unwrap_or(&2.0))?;
            geometry(round_sphere(n)?)
        }
        "harmonic_deg1" => {
            let n = int(*params.first().unwrap_or(&2.0))?;
            let mut dir = vec![0.0; n + 1];
            dir[0] = 1.0;
            geometry(harmonic_deg1_case(n, &dir)?)
        }
        "harmonic_deg2" => {
            let n = int(*params.first().unwrap_or(&2.0))?;
            let mut form = DMatrix::zeros(n + 1, n + 1);
            form[(0, 0)] = 1.0;
            geometry(harmonic_deg2_case(n, &form)?)
        }
        "pseudo_sphere" => {
            let p = int(*params.first().unwrap_or(&1.0))?;
            let q = int(*params.get(1).unwrap_or(&1.0))?;
            geometry(pseudo_sphere(p, q)?)
        }
        "flat" => {
            let p = int(*params.first().unwrap_or(&2.0))?;
            let q = int(*params.get(1).unwrap_or(&0.0))?;
            geometry(flat(p, q)?)
        }
        "flat_torus_chart" => geometry(flat_torus_chart()?),
        "bumpy_sphere" => {
            let n = int(*params.first().unwrap_or(&2.0))?;
            let eps = *params.get(1).unwrap_or(&0.15);
            geometry(bumpy_sphere(n, eps)?)
        }
        "beltrami_pair" => {
            let n = int(*params.first().unwrap_or(&2.0))?;
            geometry(beltrami_pair(n, &default_beltrami_map(n))?)
        }
        "sl3_projective_field" => {
            let e = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
            geometry(sl3_projective_case(&e)?)
        }
        "m2r_determinant_space" => {
            let count = int(*params.first().unwrap_or(&10.0))?;
            Ok(Case::Matrices(Box::new(m2r_determinant_space(42, count.max(1))?)))
        }
        "icosahedral_group" => Ok(Case::Matrices(Box::new(icosahedral_group()?))),
        "o2xo2_group" => Ok(Case::Matrices(Box::new(o2xo2_group()?))),
        other => Err(Error::Argument(format!("unknown case id `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;

    #[test]
    fn sphere_eigenfunction_laws() {
        for n in [2usize, 3] {
            let case = round_sphere(n).unwrap();
            let points = case.chart.sample(42, 60);
            for (name, lam) in [
                ("harmonic_deg1", -(n as f64)),
                ("harmonic_deg2", -2.0 * (n as f64 + 1.0)),
            ] {
                let alpha = &case.scalars[name];
                for p in &points {
                    let lap = geometry::laplacian(alpha, &case.metric, p).unwrap();
                    let val = alpha.value_at(p).unwrap();
                    assert!(
                        (lap - lam * val).abs() < 1e-9 * lap.abs().max(1.0),
                        "{name} on S^{n}: Δα = {lap}, λα = {}",
                        lam * val
                    );
                }
            }
        }
    }

    #[test]
    fn degree_two_form_is_traceless_exactly() {
        for n in [2usize, 3] {
            let q = traceless_axis_form(n, 0);
            let mut trace = 0.0;
            for i in 0..=n {
                trace += q[(i, i)];
            }
            assert_eq!(trace, 0.0);
        }
    }

    #[test]
    fn pseudo_sphere_matches_round_sphere_curvature() {
        for p in [2usize, 3] {
            let ps = pseudo_sphere(p, 0).unwrap();
            let rs = round_sphere(p).unwrap();
            let expect = (p * (p - 1)) as f64;
            for x in ps.chart.sample(5, 20) {
                let scal = geometry::riemann_at(&ps.metric, &x).unwrap().scalar;
                assert!((scal - expect).abs() < 1e-9, "pseudo {} vs {expect}", scal);
            }
            for x in rs.chart.sample(5, 20) {
                let scal = geometry::riemann_at(&rs.metric, &x).unwrap().scalar;
                assert!((scal - expect).abs() < 1e-9, "round {} vs {expect}", scal);
            }
        }
    }

    #[test]
    fn metric_signatures_validate() {
        let cases = [
            round_sphere(2).unwrap(),
            pseudo_sphere(1, 1).unwrap(),
            pseudo_sphere(2, 1).unwrap(),
            flat(1, 1).unwrap(),
            bumpy_sphere(2, 0.2).unwrap(),
        ];
        for case in &cases {
            let pts = case.chart.sample(17, 40);
            let v = geometry::validate_metric(&case.metric, &pts).unwrap();
            assert!(v.signature_ok, "{} signature drift", case.id);
            assert!(v.max_asymmetry < 1e-14, "{} asymmetry", case.id);
        }
    }

    #[test]
    fn beltrami_pullback_is_a_metric() {
        let case = beltrami_pair(2, &default_beltrami_map(2)).unwrap();
        let pullback = &case.extra_metrics["pullback"];
        let pts = case.chart.sample(23, 30);
        let v = geometry::validate_metric(pullback, &pts).unwrap();
        assert!(v.signature_ok);
        assert!(v.max_asymmetry < 1e-12);
        // The pullback differs from the round metric somewhere.
        let mut differs = false;
        for p in &pts {
            let a = case.metric.matrix_at(p).unwrap();
            let b = pullback.matrix_at(p).unwrap();
            if crate::linalg::max_abs(&(&a - &b)) > 1e-3 {
                differs = true;
            }
        }
        assert!(differs);
    }

    #[test]
    fn determinant_form_signature_and_preservation() {
        let f = determinant_form();
        assert_eq!(crate::linalg::signature_of(&f, 1e-12), (2, 2));
        for l in sl2_sample(7, 100).iter().map(left_multiplication) {
            let defect = crate::linalg::max_abs(&(l.transpose() * &f * &l - &f));
            assert!(defect < 1e-12, "determinant form not preserved: {defect}");
        }
    }

    #[test]
    fn annihilator_planes_are_degenerate_and_invariant() {
        let f = determinant_form();
        for v in [[1.0, 0.0], [0.0, 1.0], [0.7, -0.4]] {
            let basis = annihilator_basis(v);
            let gram = basis.transpose() * &f * &basis;
            assert!(crate::linalg::max_abs(&gram) < 1e-15, "plane not degenerate");
            for a in sl2_sample(11, 20) {
                let l = left_multiplication(&a);
                let image = &l * &basis;
                // rank([basis, image]) must stay 2: the plane maps into itself.
                let mut stacked = DMatrix::zeros(4, 4);
                stacked.view_mut((0, 0), (4, 2)).copy_from(&basis);
                stacked.view_mut((0, 2), (4, 2)).copy_from(&image);
                assert_eq!(crate::linalg::numerical_rank(&stacked, 1e-10), 2);
            }
        }
    }

    #[test]
    fn icosahedral_closure_has_order_120() {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let gens = [
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.5, 0.5, 0.5, 0.5],
            [phi / 2.0, 1.0 / (2.0 * phi), 0.5, 0.0],
        ];
        let group = quaternion_group_closure(&gens, 1000).unwrap();
        assert_eq!(group.len(), 120);
        // All elements act orthogonally.
        for q in &group {
            let m = quaternion_left_matrix(*q);
            let defect = crate::linalg::max_abs(&(m.transpose() * &m - DMatrix::identity(4, 4)));
            assert!(defect < 1e-12);
        }
    }

    #[test]
    fn make_case_dispatch() {
        assert!(make_case("round_sphere", &[2.0]).is_ok());
        assert!(make_case("flat", &[2.0, 0.0]).is_ok());
        assert!(make_case("pseudo_sphere", &[1.0, 1.0]).is_ok());
        assert!(make_case("no_such_case", &[]).is_err());
        assert!(make_case("round_sphere", &[1.5]).is_err());
        let c = make_case("m2r_determinant_space", &[]).unwrap();
        assert!(c.matrices().is_ok());
        assert!(c.geometry().is_err());
    }

    #[test]
    fn construction_is_reproducible() {
        let a = round_sphere(2).unwrap();
        let b = round_sphere(2).unwrap();
        let pa = a.chart.sample(99, 10);
        let pb = b.chart.sample(99, 10);
        assert_eq!(pa, pb);
        for (x, y) in pa.iter().zip(pb.iter()) {
            let ma = a.metric.matrix_at(x).unwrap();
            let mb = b.metric.matrix_at(y).unwrap();
            assert_eq!(ma, mb);
        }
    }
}
