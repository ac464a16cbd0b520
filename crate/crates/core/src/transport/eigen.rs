//! Spectral analysis of metric-self-adjoint endomorphisms and the
//! decomposability probe for parallel tensors on a cone.
//!
//! In indefinite signature the endomorphism `g^{-1}T` of a symmetric tensor
//! need not be diagonalizable, so the analysis works with characteristic
//! spaces (generalized eigenspaces) and reports geometric vs algebraic
//! multiplicities instead of assuming a clean eigenbasis.

use nalgebra::DMatrix;

use crate::cone::ConeChart;
use crate::error::{Error, Result};
use crate::fields::TensorField;
use crate::geometry;
use crate::linalg;
use crate::report::PointMax;
use crate::transport::curves::CurveSegment;
use crate::transport::holonomy::{parallel_transport, TransportedObject};

/// Default eigenvalue clustering threshold.
pub const CLUSTER_GAP: f64 = 1e-6;

/// One eigenvalue cluster of an endomorphism.
#[derive(Clone, Debug)]
pub struct EigenCluster {
    /// Mean of the clustered eigenvalue real parts.
    pub value: f64,
    pub algebraic: usize,
    pub geometric: usize,
    /// Columns span the characteristic space.
    pub basis: DMatrix<f64>,
    /// Projector onto the characteristic space along the others.
    pub projector: DMatrix<f64>,
    /// Condition number of the metric restricted to the space.
    pub gram_condition: f64,
    pub gram_nondegenerate: bool,
    /// True when the cluster came from a conjugate pair with a
    /// non-negligible imaginary part.
    pub complex_pair: bool,
}

#[derive(Clone, Debug)]
pub struct EigenStructure {
    pub clusters: Vec<EigenCluster>,
    /// Smallest gap between distinct cluster values.
    pub min_gap: f64,
    /// Some cluster has geometric < algebraic multiplicity.
    pub defective: bool,
}

impl EigenStructure {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.algebraic).collect()
    }
}

/// Characteristic-space decomposition of an arbitrary real endomorphism,
/// with nondegeneracy of `form` on each space.
pub fn endomorphism_spectrum(
    endo: &DMatrix<f64>,
    form: &DMatrix<f64>,
    gap: f64,
) -> Result<EigenStructure> {
    let n = endo.nrows();
    let eigs = endo.clone().complex_eigenvalues();
    let scale = eigs
        .iter()
        .map(|c| c.norm())
        .fold(0.0_f64, f64::max)
        .max(1.0);

    // Cluster by real part; track imaginary magnitude per cluster.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigs[a].re.partial_cmp(&eigs[b].re).unwrap());
    let mut clusters: Vec<(Vec<usize>, f64)> = Vec::new();
    for &idx in &order {
        match clusters.last_mut() {
            Some((members, _)) if {
                let last = *members.last().unwrap();
                (eigs[idx].re - eigs[last].re).abs() <= gap * scale.max(1.0)
            } =>
            {
                clusters.last_mut().unwrap().0.push(idx);
            }
            _ => clusters.push((vec![idx], 0.0)),
        }
    }
    for (members, max_im) in clusters.iter_mut() {
        *max_im = members
            .iter()
            .map(|&i| eigs[i].im.abs())
            .fold(0.0, f64::max);
    }

    let mut out_clusters = Vec::with_capacity(clusters.len());
    let mut basis_all = DMatrix::<f64>::zeros(n, n);
    let mut col_cursor = 0usize;
    let mut spans = Vec::new();
    for (members, max_im) in &clusters {
        let m_alg = members.len();
        let mean: f64 = members.iter().map(|&i| eigs[i].re).sum::<f64>() / m_alg as f64;
        let complex_pair = *max_im > gap * scale;
        // Characteristic space = kernel of K^m with K linear (real cluster)
        // or quadratic (conjugate pair cluster).
        let k_mat = if complex_pair {
            let mean_im: f64 =
                members.iter().map(|&i| eigs[i].im.abs()).sum::<f64>() / m_alg as f64;
            let modulus2 = mean * mean + mean_im * mean_im;
            endo * endo - endo.scale(2.0 * mean) + DMatrix::identity(n, n).scale(modulus2)
        } else {
            endo - DMatrix::identity(n, n).scale(mean)
        };
        let mut power = DMatrix::identity(n, n);
        for _ in 0..m_alg {
            power = &power * &k_mat;
        }
        // Absolute thresholds relative to the endomorphism scale: the power
        // of a near-zero factor is rounding noise, and a relative cutoff on
        // noise would keep phantom nonzero directions.
        let kernel_tol = 1e-8 * scale.powi(m_alg as i32).max(f64::MIN_POSITIVE);
        let kernel = linalg::null_space_abs(&power, kernel_tol);
        if kernel.len() < m_alg {
            return Err(Error::Argument(format!(
                "characteristic space of eigenvalue {mean:.6} resolved rank {} < {m_alg}; \
                 clusters too close for the requested gap {gap:.1e}",
                kernel.len()
            )));
        }
        // Prefer the directions with the smallest singular values (they sit
        // at the end of V^T).
        let basis = DMatrix::from_columns(&kernel[kernel.len() - m_alg..]);
        let geometric = n - linalg::rank_abs(&k_mat, 1e-8 * scale);
        let gram = basis.transpose() * form * &basis;
        let gram_condition = linalg::condition_number(&gram);
        out_clusters.push(EigenCluster {
            value: mean,
            algebraic: m_alg,
            geometric: geometric.min(m_alg),
            basis: basis.clone(),
            projector: DMatrix::zeros(n, n),
            gram_condition,
            gram_nondegenerate: gram_condition < 1e8,
            complex_pair,
        });
        basis_all.view_mut((0, col_cursor), (n, m_alg)).copy_from(&basis);
        spans.push((col_cursor, m_alg));
        col_cursor += m_alg;
    }
    if col_cursor != n {
        return Err(Error::Argument(
            "characteristic spaces do not fill the whole space".to_string(),
        ));
    }
    let inv = basis_all.clone().try_inverse().ok_or_else(|| {
        Error::Argument("characteristic bases are numerically dependent".to_string())
    })?;
    for (cluster, &(start, len)) in out_clusters.iter_mut().zip(spans.iter()) {
        let mut selector = DMatrix::<f64>::zeros(n, n);
        for i in start..start + len {
            selector[(i, i)] = 1.0;
        }
        cluster.projector = &basis_all * selector * &inv;
    }
    let mut min_gap = f64::INFINITY;
    for i in 1..out_clusters.len() {
        min_gap = min_gap.min(out_clusters[i].value - out_clusters[i - 1].value);
    }
    let defective = out_clusters.iter().any(|c| c.geometric < c.algebraic);
    Ok(EigenStructure {
        clusters: out_clusters,
        min_gap,
        defective,
    })
}

/// Real-Jordan eigenstructure of `g^{-1} T` for a symmetric tensor `T` at a
/// point, with nondegeneracy of `g` restricted to each characteristic space.
pub fn eigen_structure(
    g: &DMatrix<f64>,
    t: &DMatrix<f64>,
    gap: f64,
) -> Result<EigenStructure> {
    let cond = linalg::condition_number(g);
    if cond > geometry::DEGENERACY_COND {
        return Err(Error::DegenerateMetric {
            point: vec![],
            cond,
        });
    }
    let ginv = g.clone().try_inverse().ok_or(Error::DegenerateMetric {
        point: vec![],
        cond: f64::INFINITY,
    })?;
    endomorphism_spectrum(&(ginv * t), g, gap)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    /// Nontrivial parallel orthogonal decomposition exhibited.
    Decomposable,
    /// Single eigenvalue: the tensor is a multiple of the metric, nothing
    /// to split.
    TrivialTensor,
    /// Some probe failed; see the diagnostics.
    Inconclusive(String),
}

pub struct ProbeOptions {
    pub seed: u64,
    pub sample: usize,
    pub loops: usize,
    pub transport_steps: usize,
    pub gap: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            seed: 42,
            sample: 40,
            loops: 10,
            transport_steps: 512,
            gap: CLUSTER_GAP,
        }
    }
}

pub struct DecomposabilityReport {
    pub verdict: ProbeVerdict,
    pub eigenvalues: Vec<f64>,
    pub ranks: Vec<usize>,
    /// Max spread of each matched eigenvalue cluster across the sample.
    pub eigenvalue_spread: f64,
    /// Worst deviation between a transported projector and its pointwise
    /// recomputation.
    pub transport_deviation: f64,
    pub parallel_defect: PointMax,
    pub defective_anywhere: bool,
}

/// Probe decomposability of the cone from a parallel symmetric tensor: the
/// eigenvalues must be constant over the sample, the characteristic-space
/// projectors must agree with their own parallel transport, and the cone
/// metric must be nondegenerate on each space.
pub fn decomposability_probe(
    cone: &ConeChart,
    t_hat: &TensorField,
    opts: &ProbeOptions,
) -> Result<DecomposabilityReport> {
    let points = cone.chart.sample(opts.seed, opts.sample);

    let mut parallel_defect = PointMax::new();
    let dt = geometry::covariant_derivative(t_hat, &cone.metric);
    for p in &points {
        parallel_defect.observe(p, dt.values_at(p)?.max_abs());
    }
    if parallel_defect.max > 1e-9 {
        return Err(Error::Precondition(format!(
            "tensor is not parallel (max |DT| = {:.3e}); decomposability probe \
             needs a parallel tensor",
            parallel_defect.max
        )));
    }

    // Eigenstructure at every sample point; clusters matched by sort order.
    let mut reference: Option<EigenStructure> = None;
    let mut spread = 0.0_f64;
    let mut defective_anywhere = false;
    let mut structures = Vec::with_capacity(points.len());
    for p in &points {
        let gm = cone.metric.matrix_at(p)?;
        let tm = t_hat.matrix_at(p)?;
        let es = eigen_structure(&gm, &tm, opts.gap)?;
        defective_anywhere |= es.defective;
        match &reference {
            None => reference = Some(es.clone()),
            Some(r) => {
                if r.clusters.len() != es.clusters.len()
                    || r.ranks() != es.ranks()
                {
                    return Ok(DecomposabilityReport {
                        verdict: ProbeVerdict::Inconclusive(format!(
                            "cluster structure changed across the sample at {p:?}"
                        )),
                        eigenvalues: r.eigenvalues(),
                        ranks: r.ranks(),
                        eigenvalue_spread: f64::INFINITY,
                        transport_deviation: f64::NAN,
                        parallel_defect,
                        defective_anywhere,
                    });
                }
                for (a, b) in r.clusters.iter().zip(es.clusters.iter()) {
                    spread = spread.max((a.value - b.value).abs());
                }
            }
        }
        structures.push(es);
    }
    let reference = reference.expect("nonempty sample");

    if reference.clusters.len() < 2 {
        return Ok(DecomposabilityReport {
            verdict: ProbeVerdict::TrivialTensor,
            eigenvalues: reference.eigenvalues(),
            ranks: reference.ranks(),
            eigenvalue_spread: spread,
            transport_deviation: 0.0,
            parallel_defect,
            defective_anywhere,
        });
    }

    // Projector parallelity along random in-chart segments.
    let mut transport_dev = 0.0_f64;
    let path_points = cone.chart.sample(opts.seed ^ 0x70a7, 2 * opts.loops);
    for pair in path_points.chunks(2).take(opts.loops) {
        let (a, b) = (&pair[0], &pair[1]);
        let curve = CurveSegment::line(cone.chart.clone(), a.clone(), b.clone());
        let ga = cone.metric.matrix_at(a)?;
        let ta = t_hat.matrix_at(a)?;
        let gb = cone.metric.matrix_at(b)?;
        let tb = t_hat.matrix_at(b)?;
        let es_a = eigen_structure(&ga, &ta, opts.gap)?;
        let es_b = eigen_structure(&gb, &tb, opts.gap)?;
        for (ca, cb) in es_a.clusters.iter().zip(es_b.clusters.iter()) {
            let moved = parallel_transport(
                &cone.metric,
                &curve,
                TransportedObject::Endomorphism(ca.projector.clone()),
                opts.transport_steps,
            )?;
            if let TransportedObject::Endomorphism(m) = moved {
                transport_dev = transport_dev.max(linalg::max_abs(&(&m - &cb.projector)));
            }
        }
    }

    let nondegenerate = structures
        .iter()
        .all(|es| es.clusters.iter().all(|c| c.gram_nondegenerate));

    let verdict = if spread < opts.gap && transport_dev < 1e-5 && nondegenerate {
        ProbeVerdict::Decomposable
    } else {
        ProbeVerdict::Inconclusive(format!(
            "spread {spread:.3e}, transport deviation {transport_dev:.3e}, \
             nondegenerate: {nondegenerate}"
        ))
    };
    Ok(DecomposabilityReport {
        verdict,
        eigenvalues: reference.eigenvalues(),
        ranks: reference.ranks(),
        eigenvalue_spread: spread,
        transport_deviation: transport_dev,
        parallel_defect,
        defective_anywhere,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone;
    use crate::corpus;
    use crate::fields::TensorField;

    #[test]
    fn metric_itself_has_single_unit_eigenvalue() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let es = eigen_structure(&g, &g, CLUSTER_GAP).unwrap();
        assert_eq!(es.clusters.len(), 1);
        assert!((es.clusters[0].value - 1.0).abs() < 1e-12);
        let id_defect = linalg::max_abs(&(&es.clusters[0].projector - DMatrix::identity(2, 2)));
        assert!(id_defect < 1e-12);
        assert!(!es.defective);
    }

    #[test]
    fn cartesian_tensor_has_rank_one_and_two_clusters() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let t = corpus::cone_cartesian_tensor(&cone, &[0]).unwrap();
        let p = vec![1.1, 0.6, -0.3];
        let gm = cone.metric.matrix_at(&p).unwrap();
        let tm = t.matrix_at(&p).unwrap();
        let es = eigen_structure(&gm, &tm, CLUSTER_GAP).unwrap();
        assert_eq!(es.clusters.len(), 2);
        assert!((es.clusters[0].value - 0.0).abs() < 1e-9);
        assert!((es.clusters[1].value - 1.0).abs() < 1e-9);
        assert_eq!(es.clusters[0].algebraic, 2);
        assert_eq!(es.clusters[1].algebraic, 1);
        assert!(es.clusters.iter().all(|c| c.gram_nondegenerate));
        assert!(!es.defective);
    }

    #[test]
    fn null_aligned_tensor_is_defective() {
        // Minkowski plane, T = l ⊗ l with l the covector of a null vector.
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let t = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let es = eigen_structure(&g, &t, CLUSTER_GAP).unwrap();
        assert_eq!(es.clusters.len(), 1, "nilpotent block must cluster together");
        assert_eq!(es.clusters[0].algebraic, 2);
        assert_eq!(es.clusters[0].geometric, 1);
        assert!(es.defective, "Jordan block not reported");
    }

    #[test]
    fn probe_splits_the_flat_cone() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let t = corpus::cone_cartesian_tensor(&cone, &[0]).unwrap();
        let opts = ProbeOptions {
            sample: 25,
            loops: 10,
            ..ProbeOptions::default()
        };
        let report = decomposability_probe(&cone, &t, &opts).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::Decomposable);
        let mut ranks = report.ranks.clone();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![1, 2]);
        assert!(report.eigenvalue_spread < 1e-8);
    }

    #[test]
    fn probe_calls_metric_trivial() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let t = TensorField::from_metric(&cone.metric);
        let opts = ProbeOptions {
            sample: 10,
            loops: 2,
            ..ProbeOptions::default()
        };
        let report = decomposability_probe(&cone, &t, &opts).unwrap();
        assert_eq!(report.verdict, ProbeVerdict::TrivialTensor);
    }

    #[test]
    fn probe_rejects_non_parallel_input() {
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let ghat = cone.metric.clone();
        let t = TensorField::new(
            cone.chart.clone(),
            2,
            crate::fields::Symmetry::Symmetric,
            move |seeds| {
                let g = ghat.eval_jets(seeds)?;
                let w = seeds[0].clone();
                crate::fields::JetTensor::from_fn(g.len(), 2, |idx| g[idx[0]][idx[1]].mul(&w))
            },
        );
        assert!(matches!(
            decomposability_probe(&cone, &t, &ProbeOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lift_hessian_probe_matches_cartesian_case() {
        // T = DDA/2 for the degree-2 harmonic lift is, up to an affine
        // shift, the rank-one Cartesian tensor: eigenvalues at the doubled
        // critical values of the harmonic, clusters of rank 1 and 2.
        let sphere = corpus::round_sphere(2).unwrap();
        let cone = cone::build_cone(&sphere.chart, &sphere.metric, cone::DEFAULT_R_RANGE).unwrap();
        let lf = cone::lift_scalar(&cone, &sphere.scalars["harmonic_deg2"]);
        let hess = geometry::covariant_derivative(
            &geometry::gradient(&lf.lifted),
            &cone.metric,
        );
        let p = vec![1.2, 0.4, 0.7];
        let gm = cone.metric.matrix_at(&p).unwrap();
        let hm = hess.matrix_at(&p).unwrap().scale(0.5);
        let es = eigen_structure(&gm, &hm, CLUSTER_GAP).unwrap();
        let mut values = es.eigenvalues();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Critical values of (S_1)^2 - 1/3 are -1/3 and 2/3.
        assert_eq!(values.len(), 2);
        assert!((values[0] + 1.0 / 3.0).abs() < 1e-9);
        assert!((values[1] - 2.0 / 3.0).abs() < 1e-9);
    }
}
