//! Small dense complex linear algebra on top of nalgebra's SVD.

use nalgebra::{ComplexField, DMatrix, DVector, SVD};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// SVD with singular values sorted descending and U, V columns permuted to match.
///
/// Returns V itself (not its adjoint). Sorting is done here rather than relying
/// on the in-place permutation of the decomposition.
pub fn svd_sorted<T: ComplexField<RealField = f64>>(
    m: DMatrix<T>,
    want_u: bool,
    want_v: bool,
) -> (Vec<f64>, Option<DMatrix<T>>, Option<DMatrix<T>>) {
    let svd = SVD::new_unordered(m, want_u, want_v);
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).expect("singular value is NaN"));
    let sorted: Vec<f64> = order.iter().map(|&k| s[k]).collect();
    let u = svd.u.map(|u| {
        DMatrix::from_columns(
            &order
                .iter()
                .map(|&k| u.column(k).into_owned())
                .collect::<Vec<_>>(),
        )
    });
    let v = svd.v_t.map(|vt| {
        let v = vt.adjoint();
        DMatrix::from_columns(
            &order
                .iter()
                .map(|&k| v.column(k).into_owned())
                .collect::<Vec<_>>(),
        )
    });
    (sorted, u, v)
}

/// Singular values (descending) and the right singular vectors as columns of V.
///
/// Wide matrices are padded with zero rows so that the full V is available.
pub fn svd_full(m: &CMat) -> (Vec<f64>, CMat) {
    let (r, n) = m.shape();
    let padded = if r < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (r, n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let (mut s, _, v) = svd_sorted(padded, false, true);
    s.truncate(r.min(n));
    (s, v.expect("v requested"))
}

/// Numerical rank with threshold `tol * sigma_max`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    let (s, _) = svd_full(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol * smax).count()
}

/// Orthonormal basis of the (right) null space of `m`.
pub fn null_space(m: &CMat, tol: f64) -> Vec<CVec> {
    let n = m.ncols();
    let (s, v) = svd_full(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let rk = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > tol * smax).count()
    };
    (rk..n).map(|k| v.column(k).into_owned()).collect()
}

/// Orthonormal basis of the column space, keeping the `k` dominant directions.
pub fn dominant_columns(m: &CMat, k: usize) -> CMat {
    let (_, u, _) = svd_sorted(m.clone(), true, false);
    u.expect("u requested").columns(0, k).into_owned()
}

/// Ratio of the smallest to the largest singular value over the first `k` of them.
pub fn sv_ratio(m: &CMat, k: usize) -> f64 {
    let (s, _, _) = svd_sorted(m.clone(), false, false);
    if k == 0 || k > s.len() || s[0] == 0.0 {
        return 0.0;
    }
    s[k - 1] / s[0]
}

/// Least-squares solution of `m x = b` via SVD.
pub fn lstsq(m: &CMat, b: &CVec) -> CVec {
    let svd = SVD::new_unordered(m.clone(), true, true);
    svd.solve(b, 1e-14).expect("u and v computed")
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(cols: &[CVec]) -> CMat {
    CMat::from_columns(cols)
}

/// Hermitian eigenvalues, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// (positive, negative) eigenvalue counts of a real symmetric matrix, ignoring |ev| <= tol.
pub fn signature(m: &DMatrix<f64>, tol: f64) -> (usize, usize) {
    let ev = m.clone().symmetric_eigen().eigenvalues;
    let p = ev.iter().filter(|&&x| x > tol).count();
    let n = ev.iter().filter(|&&x| x < -tol).count();
    (p, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(
            2,
            4,
            &[
                c(1., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 1.),
                c(0., 0.),
                c(0., 0.),
            ],
        );
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_detects_dependence() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                c(1., 0.),
                c(2., 0.),
                c(3., 1.),
                c(2., 0.),
                c(4., 0.),
                c(6., 2.),
                c(0., 1.),
                c(1., 0.),
                c(0., 0.),
            ],
        );
        assert_eq!(rank(&m, 1e-10), 2);
    }

    #[test]
    fn signature_counts() {
        let m = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., -2.]);
        assert_eq!(signature(&m, 1e-12), (1, 2));
    }
}
