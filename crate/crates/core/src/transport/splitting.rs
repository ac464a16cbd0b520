//! Invariant-subspace search for finite sets of form-preserving matrices.
//!
//! A nondegenerate form-orthogonal invariant splitting exists iff the
//! commutant of the matrix set contains a form-self-adjoint idempotent other
//! than 0 and 1.  The search side samples self-adjoint elements of the
//! generated algebra and inspects their characteristic spaces; the
//! certificate side computes the form-self-adjoint commutant exactly as a
//! null space — when that space is spanned by the identity alone, no
//! nondegenerate splitting exists, full stop, and "none found" is upgraded
//! to a proof.  A bare "none found" without the certificate is only a
//! bounded-search outcome.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::transport::eigen::{endomorphism_spectrum, CLUSTER_GAP};

/// Column-stacked kron-based matrix of `X -> X M - M X`.
fn commutator_operator(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    m.transpose().kronecker(&id) - id.kronecker(m)
}

/// Permutation matrix sending `vec(X)` to `vec(X^T)` (column stacking).
fn transpose_permutation(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            // vec index of (i, j) is j*n + i.
            p[(i * n + j, j * n + i)] = 1.0;
        }
    }
    p
}

/// Dimension of the commutant `{X : X M_k = M_k X for all k}`.
pub fn commutant_dimension(mats: &[DMatrix<f64>]) -> usize {
    let n = mats[0].nrows();
    let rows: Vec<DMatrix<f64>> = mats.iter().map(commutator_operator).collect();
    let mut stacked = DMatrix::zeros(rows.len() * n * n, n * n);
    for (k, r) in rows.iter().enumerate() {
        stacked.view_mut((k * n * n, 0), (n * n, n * n)).copy_from(r);
    }
    linalg::null_space(&stacked, 1e-10).len()
}

/// Dimension of the form-self-adjoint part of the commutant:
/// `{X : X M_k = M_k X, F^{-1} X^T F = X}`.
pub fn selfadjoint_commutant_dimension(mats: &[DMatrix<f64>], form: &DMatrix<f64>) -> Result<usize> {
    let n = mats[0].nrows();
    let f_inv = form.clone().try_inverse().ok_or_else(|| {
        Error::Argument("the bilinear form must be nondegenerate".to_string())
    })?;
    let perm = transpose_permutation(n);
    // vec(F^{-1} X^T F) = (F^T ⊗ F^{-1}) vec(X^T) = (F^T ⊗ F^{-1}) P vec(X)
    let adj_op = form.transpose().kronecker(&f_inv) * perm;
    let selfadj = DMatrix::identity(n * n, n * n) - adj_op;
    let mut blocks: Vec<DMatrix<f64>> = mats.iter().map(commutator_operator).collect();
    blocks.push(selfadj);
    let mut stacked = DMatrix::zeros(blocks.len() * n * n, n * n);
    for (k, b) in blocks.iter().enumerate() {
        stacked.view_mut((k * n * n, 0), (n * n, n * n)).copy_from(b);
    }
    Ok(linalg::null_space(&stacked, 1e-10).len())
}

/// Max residual of `M W ⊆ W` over the matrix set, for `W` spanned by the
/// columns of `basis` (orthonormalized internally).
pub fn subspace_invariance_defect(mats: &[DMatrix<f64>], basis: &DMatrix<f64>) -> f64 {
    let n = basis.nrows();
    let k = basis.ncols();
    let q = basis.clone().qr().q().columns(0, k).into_owned();
    let proj = &q * q.transpose();
    let complement = DMatrix::identity(n, n) - proj;
    mats.iter()
        .map(|m| linalg::max_abs(&(&complement * m * &q)))
        .fold(0.0, f64::max)
}

pub struct SearchOptions {
    pub seed: u64,
    /// Number of random self-adjoint algebra elements to inspect.
    pub samples: usize,
    /// Maximum word length of generator products.
    pub max_word_len: usize,
    pub invariance_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 42,
            samples: 64,
            max_word_len: 4,
            invariance_tol: 1e-8,
        }
    }
}

/// A splitting found by the search: bases of the two complementary
/// invariant, form-nondegenerate subspaces.
#[derive(Clone, Debug)]
pub struct FoundSplitting {
    pub basis1: DMatrix<f64>,
    pub basis2: DMatrix<f64>,
    pub ranks: (usize, usize),
}

pub struct SearchOutcome {
    pub splitting: Option<FoundSplitting>,
    pub commutant_dim: usize,
    pub selfadjoint_commutant_dim: usize,
    /// True when the certificate (self-adjoint commutant spanned by the
    /// identity alone) proves no nondegenerate splitting exists.
    pub certified_none: bool,
    pub samples_tried: usize,
}

/// Search for a common invariant form-orthogonal nondegenerate subspace
/// pair of a set of form-preserving matrices.
pub fn invariant_splitting_search(
    mats: &[DMatrix<f64>],
    form: &DMatrix<f64>,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if mats.is_empty() {
        return Err(Error::Argument("no matrices supplied".to_string()));
    }
    let n = mats[0].nrows();
    for (k, m) in mats.iter().enumerate() {
        let defect = linalg::max_abs(&(m.transpose() * form * m - form));
        if defect > 1e-10 {
            return Err(Error::Argument(format!(
                "matrix {k} does not preserve the form (defect {defect:.3e})"
            )));
        }
    }
    let f_inv = form.clone().try_inverse().ok_or_else(|| {
        Error::Argument("the bilinear form must be nondegenerate".to_string())
    })?;

    let commutant_dim = commutant_dimension(mats);
    let selfadjoint_dim = selfadjoint_commutant_dimension(mats, form)?;
    let certified_none = selfadjoint_dim == 1;

    let mut splitting = None;
    let mut samples_tried = 0usize;
    if !certified_none {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        'search: for _ in 0..opts.samples {
            samples_tried += 1;
            // Random word(s) in the generators, then form-symmetrize.
            let mut word = DMatrix::<f64>::identity(n, n);
            let len = rng.random_range(1..=opts.max_word_len);
            for _ in 0..len {
                let pick = rng.random_range(0..mats.len());
                word = &word * &mats[pick];
            }
            let coeff: f64 = rng.random_range(0.25..1.0);
            let raw = word.scale(coeff);
            let selfadj = &raw + &f_inv * raw.transpose() * form;
            // Skip near-scalar samples.
            let trace_part = DMatrix::identity(n, n).scale(selfadj.trace() / n as f64);
            if linalg::max_abs(&(&selfadj - trace_part)) < 1e-10 {
                continue;
            }
            let Ok(spectrum) = endomorphism_spectrum(&selfadj, form, CLUSTER_GAP) else {
                continue;
            };
            if spectrum.clusters.len() < 2 {
                continue;
            }
            for cluster in &spectrum.clusters {
                if cluster.algebraic == n {
                    continue;
                }
                let basis1 = cluster.basis.clone();
                if subspace_invariance_defect(mats, &basis1) > opts.invariance_tol {
                    continue;
                }
                // Complement = span of the other characteristic spaces.
                let others: Vec<&DMatrix<f64>> = spectrum
                    .clusters
                    .iter()
                    .filter(|c| (c.value - cluster.value).abs() > 1e-12)
                    .map(|c| &c.basis)
                    .collect();
                let total: usize = others.iter().map(|b| b.ncols()).sum();
                let mut basis2 = DMatrix::zeros(n, total);
                let mut cursor = 0;
                for b in others {
                    basis2.view_mut((0, cursor), (n, b.ncols())).copy_from(b);
                    cursor += b.ncols();
                }
                if subspace_invariance_defect(mats, &basis2) > opts.invariance_tol {
                    continue;
                }
                // Both sides must be nondegenerate for the form.
                let gram1 = basis1.transpose() * form * &basis1;
                let gram2 = basis2.transpose() * form * &basis2;
                if linalg::condition_number(&gram1) > 1e8
                    || linalg::condition_number(&gram2) > 1e8
                {
                    continue;
                }
                let ranks = (basis1.ncols(), basis2.ncols());
                splitting = Some(FoundSplitting {
                    basis1,
                    basis2,
                    ranks,
                });
                break 'search;
            }
        }
    }

    Ok(SearchOutcome {
        splitting,
        commutant_dim,
        selfadjoint_commutant_dim: selfadjoint_dim,
        certified_none,
        samples_tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn block_rotations_split() {
        let case = corpus::o2xo2_group().unwrap();
        let outcome =
            invariant_splitting_search(&case.generators, &case.form, &SearchOptions::default())
                .unwrap();
        assert!(!outcome.certified_none);
        let s = outcome.splitting.expect("block splitting must be found");
        assert_eq!(s.ranks, (2, 2));
        // Each basis spans one coordinate block.
        let top = s.basis1.view((0, 0), (2, 2)).amax().max(s.basis1.view((2, 0), (2, 2)).amax());
        assert!(top > 0.1);
    }

    #[test]
    fn icosahedral_generators_certified_irreducible() {
        let case = corpus::icosahedral_group().unwrap();
        let outcome =
            invariant_splitting_search(&case.generators, &case.form, &SearchOptions::default())
                .unwrap();
        assert!(outcome.certified_none, "expected a commutant certificate");
        assert!(outcome.splitting.is_none());
        // The commutant is the quaternion algebra of right multiplications,
        // but only the identity is symmetric inside it.
        assert_eq!(outcome.commutant_dim, 4);
        assert_eq!(outcome.selfadjoint_commutant_dim, 1);
    }

    #[test]
    fn unimodular_left_actions_have_no_nondegenerate_splitting() {
        let case = corpus::m2r_determinant_space(42, 8).unwrap();
        let outcome =
            invariant_splitting_search(&case.generators, &case.form, &SearchOptions::default())
                .unwrap();
        assert!(outcome.certified_none);
        assert!(outcome.splitting.is_none());
        // The known degenerate planes ARE invariant; they are just not
        // form-nondegenerate, so the certificate does not contradict them.
        for basis in &case.degenerate_invariant {
            assert!(subspace_invariance_defect(&case.generators, basis) < 1e-12);
            let gram = basis.transpose() * &case.form * basis;
            assert!(linalg::max_abs(&gram) < 1e-15, "plane must be totally degenerate");
        }
    }

    #[test]
    fn form_violation_is_an_argument_error() {
        let mats = vec![DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])];
        let form = DMatrix::identity(2, 2);
        assert!(matches!(
            invariant_splitting_search(&mats, &form, &SearchOptions::default()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn commutant_of_full_rotation_group_sample() {
        // A single generic rotation in the plane commutes with rotations
        // only: commutant dim 2 (span of I and J), self-adjoint part dim 1.
        let theta = 0.9_f64;
        let (s, c) = theta.sin_cos();
        let mats = vec![DMatrix::from_row_slice(2, 2, &[c, -s, s, c])];
        let form = DMatrix::identity(2, 2);
        assert_eq!(commutant_dimension(&mats), 2);
        assert_eq!(selfadjoint_commutant_dimension(&mats, &form).unwrap(), 1);
    }
}
