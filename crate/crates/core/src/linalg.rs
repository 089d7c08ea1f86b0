//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Numerical rank via singular values.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let cutoff = tol * smax.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the kernel of `m`: eigenvectors of the Gram matrix
/// `m^T m` whose singular value falls below `tol * s_max`. (The Gram route
/// gives the full right factor; nalgebra's SVD is thin.)
pub fn nullspace(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max).max(1.0);
    // squaring pushes true zeros into the eigensolver noise floor, so the
    // cutoff carries an epsilon-scaled floor
    let cutoff = ((tol * tol) * lmax).max(1e3 * f64::EPSILON * lmax);
    let mut basis = Vec::new();
    for i in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[i].max(0.0) <= cutoff {
            basis.push(eig.eigenvectors.column(i).clone_owned());
        }
    }
    basis
}

/// Descending sort, returning a new vector.
pub fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.partial_cmp(a).expect("no NaN in probability data"));
    out
}

/// Unitary whose first column is `first` (assumed unit norm): the remaining
/// columns complete it by Gram-Schmidt over the standard basis.
pub fn complete_unitary(first: &DVector<Complex64>) -> DMatrix<Complex64> {
    let d = first.len();
    let mut cols: Vec<DVector<Complex64>> = vec![first.clone()];
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut cand = DVector::<Complex64>::zeros(d);
        cand[k] = Complex64::new(1.0, 0.0);
        for c in &cols {
            let overlap = c.dotc(&cand);
            cand -= c * overlap;
        }
        let norm = cand.norm();
        if norm > 1e-8 {
            cols.push(cand / Complex64::new(norm, 0.0));
        }
    }
    assert_eq!(cols.len(), d, "basis completion ran out of candidates");
    DMatrix::from_columns(&cols)
}

/// Householder reflection in R^k taking unit vector `from` to unit vector
/// `to` (identity when they already coincide).
pub fn reflection_between(from: &DVector<f64>, to: &DVector<f64>) -> DMatrix<f64> {
    let k = from.len();
    let diff = from - to;
    let n = diff.norm();
    if n < 1e-14 {
        return DMatrix::identity(k, k);
    }
    let a = diff / n;
    DMatrix::identity(k, k) - 2.0 * &a * a.transpose()
}

/// Max absolute entry of a matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rank_and_nullspace_of_projection() {
        // rank-2 projector onto the xy-plane in R^3
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(rank(&m, 1e-12), 2);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert_relative_eq!(ns[0][2].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reflection_maps_between_unit_vectors() {
        let from = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let to = DVector::from_vec(vec![0.0, 0.6, 0.8]);
        let r = reflection_between(&from, &to);
        let image = &r * &from;
        assert_relative_eq!((image - to).norm(), 0.0, epsilon = 1e-12);
        // reflections are orthogonal
        let rtr = r.transpose() * &r;
        assert_relative_eq!((rtr - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn completed_unitary_is_unitary() {
        let first = DVector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ]);
        let u = complete_unitary(&first);
        let prod = u.adjoint() * &u;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(prod[(i, j)].re, expect, epsilon = 1e-12);
                assert_relative_eq!(prod[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }
}
