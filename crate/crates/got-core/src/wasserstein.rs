//! Closed-form 2-Wasserstein geometry between graph-signal Gaussians,
//! and the alignment costs built on it.
//!
//! For zero-mean Gaussians the squared 2-Wasserstein distance has the
//! closed form
//!
//! ```text
//! W2^2 = Tr(S1) + Tr(S2) - 2 Tr( sqrt( S1^{1/2} S2 S1^{1/2} ) )
//! ```
//!
//! with `S1`, `S2` the covariances, and the optimal transport plan is the
//! linear map `T = S1^{-1/2} sqrt(S1^{1/2} S2 S1^{1/2}) S1^{-1/2}`,
//! which pushes the first Gaussian onto the second: `T S1 T^T = S2`.
//!
//! Aligning graphs of different sizes replaces the second graph's
//! Laplacian `L2` by its projection `P L2 P^T` through a soft assignment
//! `P`, so both distributions live on the smaller vertex set and the
//! distance becomes a differentiable function of `P`.

use crate::eig::sym_eigen;
use crate::float;
use crate::gaussian::{
    distribution_from_laplacian, matrix_sqrt_psd, GaussianError, GaussianGraphDistribution,
};
use crate::graph::Graph;
use crate::matrix::Mat;

/// Eigenvalues of a covariance below this make a transport map
/// numerically meaningless.
const SINGULAR_TOL: f64 = 1e-12;
/// Same clamping rule as PSD square roots: roundoff negatives above this
/// magnitude are zeroed, anything worse is an error.
const NEGATIVE_CLAMP_TOL: f64 = 1e-10;

/// Failures in Wasserstein computations.
#[derive(Clone, Debug, PartialEq)]
pub enum WassersteinError {
    /// Two objects that must agree in size do not.
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    /// The source covariance of a transport map is numerically singular.
    SingularSource { eigenvalue: f64 },
    /// A spectral subroutine failed.
    Gaussian(GaussianError),
}

impl core::fmt::Display for WassersteinError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WassersteinError::DimensionMismatch { what, left, right } => {
                write!(f, "dimension mismatch: {what} ({left} vs {right})")
            }
            WassersteinError::SingularSource { eigenvalue } => write!(
                f,
                "transport source covariance is singular: eigenvalue {eigenvalue:e} below {SINGULAR_TOL:e}"
            ),
            WassersteinError::Gaussian(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WassersteinError {}

impl From<GaussianError> for WassersteinError {
    fn from(e: GaussianError) -> Self {
        WassersteinError::Gaussian(e)
    }
}

/// Eigenvalues of the symmetrized cross term `S1^{1/2} S2 S1^{1/2}`.
/// PSD up to roundoff; clamped like every PSD square root in this crate.
fn cross_term_spectrum(
    a: &GaussianGraphDistribution,
    b: &GaussianGraphDistribution,
) -> Result<alloc::vec::Vec<f64>, WassersteinError> {
    let m = a
        .sqrt_covariance()
        .matmul(b.covariance())
        .matmul(a.sqrt_covariance())
        .symmetrized();
    let eigen = sym_eigen(&m).map_err(|_| GaussianError::EigenFailure { min_eigenvalue: None })?;
    let min = eigen.min_value();
    if min < -NEGATIVE_CLAMP_TOL {
        return Err(GaussianError::EigenFailure {
            min_eigenvalue: Some(min),
        }
        .into());
    }
    Ok(eigen.values.iter().map(|&x| x.max(0.0)).collect())
}

/// Squared 2-Wasserstein distance between two zero-mean Gaussians.
///
/// Symmetric in its arguments and zero exactly when the covariances
/// coincide. Tiny negative results from roundoff are clamped to zero.
pub fn w2_squared(
    a: &GaussianGraphDistribution,
    b: &GaussianGraphDistribution,
) -> Result<f64, WassersteinError> {
    if a.n() != b.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "distribution dimensions",
            left: a.n(),
            right: b.n(),
        });
    }
    let bures: f64 = cross_term_spectrum(a, b)?
        .iter()
        .map(|&x| float::sqrt(x))
        .sum();
    let raw = a.covariance().trace() + b.covariance().trace() - 2.0 * bures;
    debug_assert!(raw > -1e-9, "W2^2 came out {raw}, beyond roundoff");
    Ok(raw.max(0.0))
}

/// The optimal transport map between two Gaussians, with its endpoints.
///
/// The matrix is symmetric positive definite and satisfies the
/// push-forward identity `T S1 T^T = S2`.
#[derive(Clone, Debug)]
pub struct TransportMap {
    matrix: Mat,
    source: GaussianGraphDistribution,
    target: GaussianGraphDistribution,
}

impl TransportMap {
    /// The linear map itself.
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn source(&self) -> &GaussianGraphDistribution {
        &self.source
    }

    pub fn target(&self) -> &GaussianGraphDistribution {
        &self.target
    }
}

/// Computes the optimal transport map from `a` to `b`:
/// `T = S1^{-1/2} sqrt(S1^{1/2} S2 S1^{1/2}) S1^{-1/2}`.
///
/// Errors with [`WassersteinError::SingularSource`] when `a`'s covariance
/// has an eigenvalue below `1e-12` (the inverse square root would blow
/// up).
pub fn transport_map(
    a: &GaussianGraphDistribution,
    b: &GaussianGraphDistribution,
) -> Result<TransportMap, WassersteinError> {
    if a.n() != b.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "distribution dimensions",
            left: a.n(),
            right: b.n(),
        });
    }
    let eigen_a = sym_eigen(a.covariance())
        .map_err(|_| GaussianError::EigenFailure { min_eigenvalue: None })?;
    let min = eigen_a.min_value();
    if min < SINGULAR_TOL {
        return Err(WassersteinError::SingularSource { eigenvalue: min });
    }
    let inv_sqrt_a = eigen_a.apply(|x| 1.0 / float::sqrt(x)).symmetrized();
    let cross = a
        .sqrt_covariance()
        .matmul(b.covariance())
        .matmul(a.sqrt_covariance())
        .symmetrized();
    let middle = matrix_sqrt_psd(&cross)?;
    let matrix = inv_sqrt_a.matmul(&middle).matmul(&inv_sqrt_a).symmetrized();
    Ok(TransportMap {
        matrix,
        source: a.clone(),
        target: b.clone(),
    })
}

/// The Gaussian distribution of the larger graph after projection through
/// an assignment: covariance `(P L2 P^T + alpha I)^-1`.
///
/// `p` has one row per vertex of the smaller graph and one column per
/// vertex of `g2`.
pub fn aligned_distribution(
    p: &Mat,
    g2: &Graph,
    alpha: f64,
) -> Result<GaussianGraphDistribution, WassersteinError> {
    if p.cols() != g2.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment columns vs g2 vertices",
            left: p.cols(),
            right: g2.n(),
        });
    }
    let projected = p.congruence(&g2.laplacian()).symmetrized();
    Ok(distribution_from_laplacian(&projected, alpha)?)
}

/// Squared Wasserstein alignment cost: the distance between `g1`'s signal
/// distribution and `g2`'s distribution projected through `p`.
pub fn graph_alignment_cost(
    g1: &Graph,
    g2: &Graph,
    p: &Mat,
    alpha: f64,
) -> Result<f64, WassersteinError> {
    if p.rows() != g1.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment rows vs g1 vertices",
            left: p.rows(),
            right: g1.n(),
        });
    }
    let d1 = distribution_from_laplacian(&g1.laplacian(), alpha)?;
    let d2 = aligned_distribution(p, g2, alpha)?;
    w2_squared(&d1, &d2)
}

/// Frobenius alignment cost `||L1 - P L2 P^T||_F^2`, the baseline
/// objective that compares Laplacians directly instead of through their
/// signal distributions.
pub fn l2_alignment_cost(g1: &Graph, g2: &Graph, p: &Mat) -> Result<f64, WassersteinError> {
    if p.rows() != g1.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment rows vs g1 vertices",
            left: p.rows(),
            right: g1.n(),
        });
    }
    if p.cols() != g2.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment columns vs g2 vertices",
            left: p.cols(),
            right: g2.n(),
        });
    }
    let diff = g1.laplacian().sub(&p.congruence(&g2.laplacian()));
    let norm = diff.frob_norm();
    Ok(norm * norm)
}
