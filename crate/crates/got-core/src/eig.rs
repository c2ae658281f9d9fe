//! Symmetric eigendecomposition by the cyclic Jacobi method.
//!
//! Jacobi iteration annihilates one off-diagonal pair per plane rotation
//! and converges quadratically once the off-diagonal mass is small. For
//! the matrix sizes this crate works with (tens to a few hundred rows) it
//! is simple, accurate to machine precision, and has no failure modes
//! beyond an iteration cap.

use alloc::vec::Vec;

use crate::float;
use crate::matrix::Mat;

/// Hard cap on Jacobi sweeps. Convergence is quadratic; well-conditioned
/// problems finish in fewer than 15 sweeps even at n = 512.
const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix: `A = V diag(values) V^T`.
///
/// Eigenvalues are sorted ascending; column `j` of `vectors` is the unit
/// eigenvector for `values[j]`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

/// The Jacobi sweep limit was exhausted before the off-diagonal mass
/// became negligible. This does not occur for finite symmetric input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoConvergence;

impl core::fmt::Display for NoConvergence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "eigensolver did not converge within {MAX_SWEEPS} Jacobi sweeps")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NoConvergence {}

/// Off-diagonal Frobenius mass, `sqrt(2 * sum_{i<j} a_ij^2)`.
fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += a[(i, j)] * a[(i, j)];
        }
    }
    float::sqrt(2.0 * sum)
}

/// Eigendecomposition of a symmetric matrix.
///
/// Only the upper triangle participates in the rotations, so mild
/// asymmetry in the input is ignored rather than amplified; callers that
/// care validate symmetry beforehand.
pub fn sym_eigen(m: &Mat) -> Result<SymEigen, NoConvergence> {
    assert!(m.is_square(), "eigendecomposition of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let mut a = m.symmetrized();
    let mut v = Mat::identity(n);
    if n == 1 {
        return Ok(SymEigen {
            values: a.diag(),
            vectors: v,
        });
    }

    let scale = a.frob_norm().max(1.0);
    let tol = 1e-15 * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if float::abs(apq) == 0.0 {
                    continue;
                }
                // Rotation angle that annihilates a[p][q]: the smaller
                // root of t^2 + 2*t*theta - 1 = 0 keeps |t| <= 1 and the
                // rotation well conditioned.
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + float::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + float::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / float::sqrt(1.0 + t * t);
                let s = t * c;

                // A <- J^T A J with J the rotation in the (p, q) plane.
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
                // The rotation zeroes this pair analytically; do it exactly.
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(NoConvergence);
    }

    // Sort eigenpairs ascending, ties by original position for determinism.
    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.diag();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap().then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymEigen { values, vectors })
}

impl SymEigen {
    /// Reconstructs `V f(values) V^T` for a scalar function `f`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.values.len();
        let mut scaled = Mat::zeros(n, n);
        // scaled = V diag(f(values)), then multiply by V^T.
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] = self.vectors[(i, j)] * f(self.values[j]);
            }
        }
        scaled.matmul_transpose(&self.vectors)
    }

    /// Smallest eigenvalue (the spectrum is sorted ascending).
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_by_two_hand_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3 with eigenvectors
        // (1,-1)/sqrt(2) and (1,1)/sqrt(2).
        let m = Mat::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = sym_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        // Eigenvectors are defined up to sign.
        assert!((e.vectors[(0, 0)].abs() - inv_sqrt2).abs() < 1e-14);
        assert!((e.vectors[(0, 1)] - e.vectors[(1, 1)]).abs() < 1e-14);
        assert!((e.vectors[(0, 0)] + e.vectors[(1, 0)]).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_is_already_solved() {
        let m = Mat::from_diag(&[3.0, -1.0, 2.0]);
        let e = sym_eigen(&m).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        // Columns must be signed unit coordinate vectors.
        for j in 0..3 {
            let col: Vec<f64> = (0..3).map(|i| e.vectors[(i, j)]).collect();
            let nrm: f64 = col.iter().map(|x| x * x).sum();
            assert!((nrm - 1.0).abs() < 1e-14);
        }
    }

    fn random_symmetric(n: usize, seed: u64) -> Mat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        raw.symmetrized()
    }

    #[test]
    fn reconstruction_and_orthogonality_on_random_input() {
        for (i, &n) in [1usize, 2, 3, 5, 8, 16, 32].iter().enumerate() {
            let m = random_symmetric(n, 100 + i as u64);
            let e = sym_eigen(&m).unwrap();
            let rebuilt = e.apply(|x| x);
            assert!(
                rebuilt.max_abs_diff(&m) < 1e-12,
                "reconstruction failed at n = {n}"
            );
            let vtv = e.vectors.transpose().matmul(&e.vectors);
            assert!(
                vtv.max_abs_diff(&Mat::identity(n)) < 1e-12,
                "eigenvectors not orthonormal at n = {n}"
            );
            for w in e.values.windows(2) {
                assert!(w[0] <= w[1], "eigenvalues not sorted at n = {n}");
            }
        }
    }

    #[test]
    fn eigenvalues_match_characteristic_roots_on_3x3() {
        // det(A - x I) for A = [[4,1,0],[1,3,1],[0,1,2]] has roots that
        // also satisfy trace and determinant identities; check those.
        let m = Mat::from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let e = sym_eigen(&m).unwrap();
        let sum: f64 = e.values.iter().sum();
        let prod: f64 = e.values.iter().product();
        assert!((sum - 9.0).abs() < 1e-12); // trace
        assert!((prod - 18.0).abs() < 1e-11); // determinant: 4*(6-1) - 1*(2-0) = 18
    }

    #[test]
    fn apply_computes_matrix_function() {
        let m = Mat::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = sym_eigen(&m).unwrap();
        // Squaring through the spectrum must match the matrix product.
        let squared = e.apply(|x| x * x);
        assert!(squared.max_abs_diff(&m.matmul(&m)) < 1e-13);
    }

    #[test]
    fn repeated_eigenvalues_still_give_orthonormal_basis() {
        let m = Mat::from_diag(&[2.0, 2.0, 2.0, 5.0]);
        let e = sym_eigen(&m).unwrap();
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        assert!(vtv.max_abs_diff(&Mat::identity(4)) < 1e-13);
        assert!((e.values[2] - 2.0).abs() < 1e-14);
        assert!((e.values[3] - 5.0).abs() < 1e-14);
    }
}
