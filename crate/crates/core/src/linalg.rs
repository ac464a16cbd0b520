//! Small numeric helpers: jet-valued Gaussian elimination and wrappers
//! around nalgebra decompositions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Condition number from singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Eigenvalues of a (symmetrized) matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let s = (m + m.transpose()).scale(0.5);
    let mut ev: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Count of (positive, negative) eigenvalues above `tol` in magnitude.
pub fn signature_of(m: &DMatrix<f64>, tol: f64) -> (usize, usize) {
    let ev = sym_eigenvalues(m);
    let p = ev.iter().filter(|&&v| v > tol).count();
    let q = ev.iter().filter(|&&v| v < -tol).count();
    (p, q)
}

/// Numerical rank with a cutoff relative to the largest singular value.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    if max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max)
        .count()
}

/// Orthonormal basis of the (numerical) null space, via SVD.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let max = m.clone().svd(false, false).singular_values.max();
    null_space_abs(m, rel_tol * max.max(f64::MIN_POSITIVE))
}

/// Null space against an absolute singular-value threshold; needed when the
/// matrix itself may be pure rounding noise (a relative cutoff would then
/// keep noise directions as "nonzero").
pub fn null_space_abs(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let ncols = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            out.push(vt.row(i).transpose());
        }
    }
    // Singular values only cover min(nrows, ncols); trailing rows of V^T are
    // null directions too.
    for i in svd.singular_values.len()..ncols {
        out.push(vt.row(i).transpose());
    }
    out
}

/// Rank against an absolute singular-value threshold.
pub fn rank_abs(m: &DMatrix<f64>, tol: f64) -> usize {
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}

/// Inverse of a square jet matrix by Gauss-Jordan elimination with value
/// pivoting.
pub fn invert_jet_matrix(a: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let n = a.len();
    let dim = a[0][0].dim();
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, dim))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                m[r][col]
                    .value()
                    .abs()
                    .partial_cmp(&m[s][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        if m[pivot_row][col].value().abs() < 1e-300 {
            return Err(Error::DegenerateMetric {
                point: vec![],
                cond: f64::INFINITY,
            });
        }
        m.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = m[col][col].recip()?;
        for j in 0..n {
            m[col][j] = m[col][j].mul(&pivot)?;
            inv[col][j] = inv[col][j].mul(&pivot)?;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r][col].clone();
            if factor.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for j in 0..n {
                m[r][j] = m[r][j].sub(&factor.mul(&m[col][j])?)?;
                inv[r][j] = inv[r][j].sub(&factor.mul(&inv[col][j])?)?;
            }
        }
    }
    Ok(inv)
}

/// Determinant of a square jet matrix by LU elimination.
pub fn jet_determinant(a: &[Vec<Jet>]) -> Result<Jet> {
    let n = a.len();
    let dim = a[0][0].dim();
    let mut m: Vec<Vec<Jet>> = a.to_vec();
    let mut det = Jet::constant(1.0, dim);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                m[r][col]
                    .value()
                    .abs()
                    .partial_cmp(&m[s][col].value().abs())
                    .unwrap()
            })
            .unwrap();
        if m[pivot_row][col].value().abs() < 1e-300 {
            return Ok(Jet::constant(0.0, dim));
        }
        if pivot_row != col {
            m.swap(col, pivot_row);
            det = det.neg();
        }
        det = det.mul(&m[col][col])?;
        let pivot = m[col][col].recip()?;
        for r in col + 1..n {
            let factor = m[r][col].mul(&pivot)?;
            for j in col..n {
                m[r][j] = m[r][j].sub(&factor.mul(&m[col][j])?)?;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_mat(vals: &[&[f64]], dim: usize) -> Vec<Vec<Jet>> {
        vals.iter()
            .map(|row| row.iter().map(|&v| Jet::constant(v, dim)).collect())
            .collect()
    }

    #[test]
    fn jet_inverse_matches_numeric() {
        let x = Jet::variable(0.3, 0, 1).unwrap();
        // m = [[1 + x^2, x], [x, 2]]
        let m = vec![
            vec![x.mul(&x).unwrap().add_scalar(1.0), x.clone()],
            vec![x.clone(), Jet::constant(2.0, 1)],
        ];
        let inv = invert_jet_matrix(&m).unwrap();
        // m * inv = identity as jets.
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Jet::constant(0.0, 1);
                for k in 0..2 {
                    acc = acc.add(&m[i][k].mul(&inv[k][j]).unwrap()).unwrap();
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc.value() - expect).abs() < 1e-14);
                for &c in &acc.coeffs()[1..] {
                    assert!(c.abs() < 1e-12, "nonzero derivative {c}");
                }
            }
        }
    }

    #[test]
    fn jet_determinant_of_product_metric() {
        let m = jet_mat(&[&[2.0, 0.0], &[0.0, -3.0]], 1);
        let d = jet_determinant(&m).unwrap();
        assert!((d.value() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((v[0] + v[1]).abs() < 1e-12);
    }

    #[test]
    fn signature_counts() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 5.0]);
        assert_eq!(signature_of(&m, 1e-12), (2, 1));
    }
}
