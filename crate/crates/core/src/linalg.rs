//! Small dense eigen/SVD helpers over nalgebra.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4};
use num_complex::Complex64;

/// Hermitian eigendecomposition with eigenvalues sorted descending.
/// Column `k` of the returned matrix is the eigenvector of eigenvalue `k`.
pub fn hermitian_eigen(h: &Matrix4<Complex64>) -> ([f64; 4], Matrix4<Complex64>) {
    let sym = h.scale(0.5) + h.adjoint().scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.map(|k| eig.eigenvalues[k]);
    let vectors = Matrix4::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Real symmetric 3×3 eigendecomposition with eigenvalues sorted ascending.
pub fn symmetric_eigen3(a: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let sym = (a + a.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.map(|k| eig.eigenvalues[k]);
    let vectors = Matrix3::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values sorted descending, with the matching right singular vectors.
pub fn svd_sorted(m: &Matrix4<f64>) -> ([f64; 4], [Vector4<f64>; 4], [Vector4<f64>; 4]) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.map(|k| svd.singular_values[k]);
    let left = order.map(|k| u.column(k).into_owned());
    let right = order.map(|k| v_t.row(k).transpose());
    (values, left, right)
}

pub fn spectral_norm(m: &Matrix4<f64>) -> f64 {
    svd_sorted(m).0[0]
}

/// Orthonormal basis of the numerical null space: right singular vectors
/// whose singular value is at most `threshold`.
pub fn null_space(m: &Matrix4<f64>, threshold: f64) -> Vec<Vector4<f64>> {
    let (values, _, right) = svd_sorted(m);
    values
        .iter()
        .zip(right)
        .filter(|(s, _)| **s <= threshold)
        .map(|(_, v)| v)
        .collect()
}

/// Numerical rank with singular values above `threshold`.
pub fn rank(m: &Matrix4<f64>, threshold: f64) -> usize {
    svd_sorted(m).0.iter().filter(|&&s| s > threshold).count()
}

pub fn unit_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        fallback
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigen_sorted_and_reconstructs() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = Matrix4::new(
            c(2.0, 0.0), c(0.5, 0.1), c(0.0, 0.3), c(0.2, 0.0),
            c(0.5, -0.1), c(1.0, 0.0), c(0.1, 0.1), c(0.0, 0.0),
            c(0.0, -0.3), c(0.1, -0.1), c(-1.0, 0.0), c(0.4, 0.2),
            c(0.2, 0.0), c(0.0, 0.0), c(0.4, -0.2), c(0.3, 0.0),
        );
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let diag = Matrix4::from_diagonal(&Vector4::from(vals.map(|x| c(x, 0.0))));
        let rec = vecs * diag * vecs.adjoint();
        assert!((rec - h).norm() < 1e-13);
    }

    #[test]
    fn null_space_of_projector() {
        let m = Matrix4::from_diagonal(&Vector4::new(1.0, 0.0, 2.0, 0.0));
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((m * v).norm() < 1e-12);
        }
        assert_eq!(rank(&m, 1e-12), 2);
    }
}
