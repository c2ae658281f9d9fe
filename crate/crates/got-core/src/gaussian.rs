//! Zero-mean Gaussian distributions induced on graph signals.
//!
//! Smooth signals on a graph concentrate where the Laplacian quadratic
//! form is small, which corresponds to a zero-mean Gaussian whose
//! covariance is a (pseudo-)inverse of the Laplacian. This crate uses the
//! shifted inverse `(L + alpha*I)^-1`: the shift makes the covariance
//! positive definite on the whole signal space while barely perturbing
//! the smooth directions, and keeps every downstream quantity
//! differentiable.

use crate::eig::{sym_eigen, SymEigen};
use crate::float;
use crate::matrix::Mat;

/// Symmetry tolerance for matrices entering spectral routines.
const INPUT_SYMMETRY_TOL: f64 = 1e-8;
/// Eigenvalues of the shifted Laplacian below this are treated as
/// singular rather than inverted.
const SINGULAR_TOL: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_CLAMP_TOL, 0)` are rounded to zero when a
/// PSD square root is taken; anything more negative is a real error.
const NEGATIVE_CLAMP_TOL: f64 = 1e-10;
/// Largest size accepted by the exact pseudo-inverse reference path.
const PSEUDO_INVERSE_MAX_N: usize = 64;

/// Failures in spectral constructions.
#[derive(Clone, Debug, PartialEq)]
pub enum GaussianError {
    /// Input matrix deviates from symmetry by more than `1e-8`.
    NonSymmetric { max_dev: f64 },
    /// `(L + alpha*I)` has an eigenvalue below `1e-12`; the shift is too
    /// small (or negative) for this Laplacian.
    SingularAfterShift { eigenvalue: f64 },
    /// The eigensolver failed, or the matrix handed to a PSD square root
    /// has an eigenvalue below `-1e-10` (it is genuinely not PSD, not
    /// just rounded).
    EigenFailure { min_eigenvalue: Option<f64> },
    /// The exact pseudo-inverse reference path is limited to small
    /// matrices.
    PseudoInverseTooLarge { n: usize },
}

impl core::fmt::Display for GaussianError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GaussianError::NonSymmetric { max_dev } => {
                write!(f, "matrix asymmetric by {max_dev:e} (tolerance {INPUT_SYMMETRY_TOL:e})")
            }
            GaussianError::SingularAfterShift { eigenvalue } => write!(
                f,
                "shifted Laplacian nearly singular: eigenvalue {eigenvalue:e} below {SINGULAR_TOL:e}"
            ),
            GaussianError::EigenFailure { min_eigenvalue: Some(ev) } => {
                write!(f, "matrix not positive semidefinite: eigenvalue {ev:e}")
            }
            GaussianError::EigenFailure { min_eigenvalue: None } => {
                write!(f, "symmetric eigensolver did not converge")
            }
            GaussianError::PseudoInverseTooLarge { n } => {
                write!(f, "pseudo-inverse reference path supports n <= {PSEUDO_INVERSE_MAX_N}, got {n}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GaussianError {}

/// The zero-mean Gaussian a graph induces on signals, with covariance
/// `(L + alpha*I)^-1` and its cached symmetric square root.
#[derive(Clone, Debug)]
pub struct GaussianGraphDistribution {
    covariance: Mat,
    sqrt_covariance: Mat,
    source_shift: f64,
}

impl GaussianGraphDistribution {
    /// Covariance matrix (symmetric positive definite).
    pub fn covariance(&self) -> &Mat {
        &self.covariance
    }

    /// Symmetric PSD square root of the covariance.
    pub fn sqrt_covariance(&self) -> &Mat {
        &self.sqrt_covariance
    }

    /// The diagonal shift `alpha` applied to the Laplacian this
    /// distribution came from.
    pub fn source_shift(&self) -> f64 {
        self.source_shift
    }

    /// Signal dimension.
    pub fn n(&self) -> usize {
        self.covariance.rows()
    }

    /// Builds a distribution from an explicit covariance matrix,
    /// recording `source_shift` verbatim. The covariance must be
    /// symmetric within `1e-8` and positive semidefinite within the
    /// clamping tolerance.
    pub fn from_covariance(covariance: Mat, source_shift: f64) -> Result<Self, GaussianError> {
        let sqrt_covariance = matrix_sqrt_psd(&covariance)?;
        Ok(GaussianGraphDistribution {
            covariance: covariance.symmetrized(),
            sqrt_covariance,
            source_shift,
        })
    }
}

fn checked_eigen(m: &Mat) -> Result<SymEigen, GaussianError> {
    let max_dev = m.asymmetry();
    if max_dev > INPUT_SYMMETRY_TOL {
        return Err(GaussianError::NonSymmetric { max_dev });
    }
    sym_eigen(m).map_err(|_| GaussianError::EigenFailure { min_eigenvalue: None })
}

/// The Gaussian graph-signal distribution of a Laplacian: covariance
/// `(L + alpha*I)^-1`, computed spectrally so the square root comes from
/// the same decomposition.
///
/// Errors with [`GaussianError::SingularAfterShift`] when the shifted
/// spectrum dips below `1e-12` — the signal distribution would not be
/// normalizable.
pub fn distribution_from_laplacian(
    laplacian: &Mat,
    alpha: f64,
) -> Result<GaussianGraphDistribution, GaussianError> {
    let eigen = checked_eigen(laplacian)?;
    if let Some(&min) = eigen.values.first() {
        if min + alpha < SINGULAR_TOL {
            return Err(GaussianError::SingularAfterShift { eigenvalue: min + alpha });
        }
    }
    let covariance = eigen.apply(|x| 1.0 / (x + alpha)).symmetrized();
    let sqrt_covariance = eigen.apply(|x| 1.0 / float::sqrt(x + alpha)).symmetrized();
    Ok(GaussianGraphDistribution {
        covariance,
        sqrt_covariance,
        source_shift: alpha,
    })
}

/// Symmetric PSD square root via eigendecomposition.
///
/// Negative eigenvalues above `-1e-10` are clamped to zero (roundoff on a
/// PSD matrix); anything more negative raises
/// [`GaussianError::EigenFailure`] because the input was not PSD.
pub fn matrix_sqrt_psd(m: &Mat) -> Result<Mat, GaussianError> {
    let eigen = checked_eigen(m)?;
    let min = eigen.min_value();
    if min < -NEGATIVE_CLAMP_TOL {
        return Err(GaussianError::EigenFailure { min_eigenvalue: Some(min) });
    }
    Ok(eigen.apply(|x| float::sqrt(x.max(0.0))).symmetrized())
}

/// Exact Moore-Penrose pseudo-inverse of a graph Laplacian, deflating the
/// null space (the constant vector, plus one direction per extra
/// connected component). A reference implementation for small problems;
/// sizes above 64 are rejected.
pub fn laplacian_pseudoinverse(laplacian: &Mat) -> Result<Mat, GaussianError> {
    let n = laplacian.rows();
    if n > PSEUDO_INVERSE_MAX_N {
        return Err(GaussianError::PseudoInverseTooLarge { n });
    }
    let eigen = checked_eigen(laplacian)?;
    let max = eigen.values.last().copied().unwrap_or(0.0);
    let cutoff = 1e-9 * max.max(1.0);
    Ok(eigen
        .apply(|x| if x > cutoff { 1.0 / x } else { 0.0 })
        .symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent linear-solve oracle: Gaussian elimination with partial
    /// pivoting, `A X = I`. Shares nothing with the eigensolver path.
    fn invert_by_elimination(a: &Mat) -> Mat {
        let n = a.rows();
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = a[(i, j)];
            }
            aug[(i, n + i)] = 1.0;
        }
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&p, &q| aug[(p, col)].abs().partial_cmp(&aug[(q, col)].abs()).unwrap())
                .unwrap();
            if pivot_row != col {
                for j in 0..2 * n {
                    let tmp = aug[(col, j)];
                    aug[(col, j)] = aug[(pivot_row, j)];
                    aug[(pivot_row, j)] = tmp;
                }
            }
            let pivot = aug[(col, col)];
            assert!(pivot.abs() > 1e-12, "oracle matrix singular");
            for j in 0..2 * n {
                aug[(col, j)] /= pivot;
            }
            for row in 0..n {
                if row != col {
                    let factor = aug[(row, col)];
                    for j in 0..2 * n {
                        aug[(row, j)] -= factor * aug[(col, j)];
                    }
                }
            }
        }
        Mat::from_fn(n, n, |i, j| aug[(i, n + j)])
    }

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn covariance_matches_elimination_oracle() {
        let l = path3().laplacian();
        let d = distribution_from_laplacian(&l, 0.1).unwrap();
        let mut shifted = l.clone();
        shifted.shift_diag(0.1);
        let oracle = invert_by_elimination(&shifted);
        assert!(d.covariance().max_abs_diff(&oracle) < 1e-10);
    }

    #[test]
    fn covariance_inverts_the_shifted_laplacian() {
        let l = path3().laplacian();
        let d = distribution_from_laplacian(&l, 0.1).unwrap();
        let mut shifted = l;
        shifted.shift_diag(0.1);
        let prod = d.covariance().matmul(&shifted);
        assert!(prod.max_abs_diff(&Mat::identity(3)) < 1e-12);
    }

    #[test]
    fn cached_sqrt_squares_to_covariance() {
        let l = path3().laplacian();
        let d = distribution_from_laplacian(&l, 0.1).unwrap();
        let squared = d.sqrt_covariance().matmul(d.sqrt_covariance());
        assert!(squared.max_abs_diff(d.covariance()) < 1e-12);
        assert_eq!(d.source_shift(), 0.1);
    }

    #[test]
    fn zero_shift_on_a_laplacian_is_singular() {
        // Every Laplacian annihilates constants, so alpha = 0 puts an
        // exact zero in the shifted spectrum.
        let l = path3().laplacian();
        assert!(matches!(
            distribution_from_laplacian(&l, 0.0),
            Err(GaussianError::SingularAfterShift { .. })
        ));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut m = Mat::identity(2);
        m[(0, 1)] = 1e-3;
        assert!(matches!(
            distribution_from_laplacian(&m, 0.1),
            Err(GaussianError::NonSymmetric { .. })
        ));
        assert!(matches!(
            matrix_sqrt_psd(&m),
            Err(GaussianError::NonSymmetric { .. })
        ));
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let id = Mat::identity(4);
        assert!(matrix_sqrt_psd(&id).unwrap().max_abs_diff(&id) < 1e-13);
        let d = Mat::from_diag(&[4.0, 9.0, 0.25]);
        let s = matrix_sqrt_psd(&d).unwrap();
        assert!(s.max_abs_diff(&Mat::from_diag(&[2.0, 3.0, 0.5])) < 1e-13);
    }

    #[test]
    fn sqrt_squares_back_on_random_psd_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..1000 {
            let n = rng.gen_range(1..=32);
            let b = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            // B B^T is PSD by construction (often rank deficient when a
            // row direction repeats, which exercises the zero clamp).
            let psd = b.matmul_transpose(&b);
            let s = matrix_sqrt_psd(&psd).unwrap();
            let err = s.matmul(&s).sub(&psd).frob_norm();
            let scale = psd.frob_norm().max(1e-12);
            assert!(err / scale < 1e-8, "relative error {} at trial {trial}", err / scale);
            assert!(s.asymmetry() == 0.0);
        }
    }

    #[test]
    fn sqrt_rejects_indefinite_input() {
        let m = Mat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]); // eigenvalues -1, 1
        assert!(matches!(
            matrix_sqrt_psd(&m),
            Err(GaussianError::EigenFailure { min_eigenvalue: Some(ev) }) if ev < -0.9
        ));
    }

    #[test]
    fn from_covariance_records_shift_and_sqrt() {
        let cov = Mat::from_diag(&[1.0, 4.0]);
        let d = GaussianGraphDistribution::from_covariance(cov.clone(), 0.0).unwrap();
        assert_eq!(d.covariance(), &cov);
        assert!(d.sqrt_covariance().max_abs_diff(&Mat::from_diag(&[1.0, 2.0])) < 1e-13);
    }

    #[test]
    fn pseudoinverse_inverts_off_the_null_space() {
        let l = path3().laplacian();
        let pinv = laplacian_pseudoinverse(&l).unwrap();
        // L L+ must be the projector onto the complement of the constant
        // vector: I - J/n.
        let projector = Mat::from_fn(3, 3, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) - 1.0 / 3.0
        });
        assert!(l.matmul(&pinv).max_abs_diff(&projector) < 1e-12);
        // The null space is annihilated.
        let ones = vec![1.0; 3];
        for v in pinv.matvec(&ones) {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn pseudoinverse_handles_disconnected_components() {
        let g = Graph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let l = g.laplacian();
        let pinv = laplacian_pseudoinverse(&l).unwrap();
        // L L+ L = L is the defining Moore-Penrose identity we rely on.
        let back = l.matmul(&pinv).matmul(&l);
        assert!(back.max_abs_diff(&l) < 1e-12);
    }

    #[test]
    fn pseudoinverse_size_limit() {
        let big = Mat::identity(65);
        assert_eq!(
            laplacian_pseudoinverse(&big).unwrap_err(),
            GaussianError::PseudoInverseTooLarge { n: 65 }
        );
    }

    #[test]
    fn shifted_inverse_approaches_pseudoinverse_as_shift_shrinks() {
        // On the complement of the null space, (L + aI)^-1 -> L+ as
        // a -> 0. Compare after projecting the constant direction out.
        let l = path3().laplacian();
        let pinv = laplacian_pseudoinverse(&l).unwrap();
        let alpha = 1e-7;
        let d = distribution_from_laplacian(&l, alpha).unwrap();
        let proj = Mat::from_fn(3, 3, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) - 1.0 / 3.0
        });
        let projected = proj.matmul(d.covariance()).matmul(&proj);
        assert!(projected.max_abs_diff(&pinv) < 1e-5);
    }

    /// Collects eigenvalues of a distribution covariance; helper for the
    /// positive-definiteness check below.
    fn covariance_spectrum(d: &GaussianGraphDistribution) -> Vec<f64> {
        crate::eig::sym_eigen(d.covariance()).unwrap().values
    }

    #[test]
    fn covariance_is_positive_definite_for_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(2..=12);
            let raw = Mat::from_fn(n, n, |i, j| {
                if i < j && rng.gen_bool(0.4) {
                    rng.gen_range(0.2..3.0)
                } else {
                    0.0
                }
            });
            let g = Graph::from_weights(raw.add(&raw.transpose())).unwrap();
            let d = distribution_from_laplacian(&g.laplacian(), 0.1).unwrap();
            for ev in covariance_spectrum(&d) {
                assert!(ev > 0.0);
            }
        }
    }
}
