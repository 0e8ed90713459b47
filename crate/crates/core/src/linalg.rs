//! Small dense helpers: leading-minor definiteness, pivoted inversion, and a
//! cyclic Jacobi eigensolver for the symmetric 2n×2n chart matrices.

use nalgebra::DMatrix;

pub type Matrix = DMatrix<f64>;

/// Leading principal minors `det(M[..k, ..k])` for `k = 1..=n`.
pub fn leading_minors(m: &Matrix) -> Vec<f64> {
    (1..=m.nrows())
        .map(|k| m.view((0, 0), (k, k)).into_owned().determinant())
        .collect()
}

/// Sylvester's criterion.
pub fn is_positive_definite(m: &Matrix) -> bool {
    leading_minors(m).iter().all(|&d| d > 0.0)
}

/// Inverse by LU with partial pivoting; `None` when a pivot vanishes or falls
/// below `pivot_floor`.
pub fn pivoted_inverse(m: &Matrix, pivot_floor: f64) -> Option<Matrix> {
    let lu = m.clone().lu();
    let u = lu.u();
    if (0..u.nrows()).any(|i| u[(i, i)].abs() <= pivot_floor) {
        return None;
    }
    lu.try_inverse()
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
/// until the off-diagonal Frobenius norm drops below `tol` times the full norm.
pub fn jacobi_eigenvalues(m: &Matrix, tol: f64) -> Vec<f64> {
    let n = m.nrows();
    let mut a = symmetrize(m);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Spectral norm of a symmetric matrix: largest absolute eigenvalue.
pub fn symmetric_operator_norm(m: &Matrix) -> f64 {
    jacobi_eigenvalues(m, 1e-12)
        .into_iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}
