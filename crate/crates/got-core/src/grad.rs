//! Reverse-mode gradients of the alignment objectives.
//!
//! The optimizer minimizes a cost of the form `cost(project(scores))`,
//! where `project` is the alternating entropic projection of
//! [`crate::assignment`] and `cost` is one of the alignment costs of
//! [`crate::wasserstein`].  This module provides the two adjoint pieces:
//!
//! * [`wasserstein_cost_gradient`] / [`l2_cost_gradient`] — the gradient
//!   of the cost with respect to the projected assignment matrix;
//! * [`dykstra_backward`] — the pull-back of such a cotangent through a
//!   recorded projection run ([`DykstraTape`]) onto the score matrix.
//!
//! Matrix-function derivatives go through the symmetric eigendecomposition
//! ([`spectral_function_vjp`]): the adjoint of `X -> f(X)` contracts the
//! upstream cotangent against the matrix of divided differences
//! `(f(a) - f(b)) / (a - b)`, replaced by the analytic limit `f'(a)` when
//! two eigenvalues are closer than `1e-12`.

use crate::assignment::{DykstraTape, Region, StepKind, UNDERFLOW_FLOOR};
use crate::eig::{sym_eigen, SymEigen};
use crate::float;
use crate::gaussian::{distribution_from_laplacian, GaussianError, GaussianGraphDistribution};
use crate::graph::Graph;
use crate::matrix::Mat;
use crate::wasserstein::{aligned_distribution, WassersteinError};

/// Eigenvalue gap below which divided differences switch to the analytic
/// limit `f'`.
const DEGENERATE_GAP: f64 = 1e-12;

/// Smallest eigenvalue for which the square-root derivative is still
/// considered accurate; below this the gradient is refused.
const SQRT_DERIVATIVE_FLOOR: f64 = 1e-12;

/// Failure modes of a gradient evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum GradError {
    /// The matrix under the square root has an eigenvalue so close to
    /// zero that its spectral derivative (`1/(2*sqrt(lambda))`) is no
    /// longer trustworthy.
    DegenerateSpectrum { min_eigenvalue: f64 },
    /// The eigensolver did not converge on a matrix in the reverse pass.
    EigenFailure,
    /// Evaluating the forward cost failed.
    Cost(WassersteinError),
}

impl core::fmt::Display for GradError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GradError::DegenerateSpectrum { min_eigenvalue } => write!(
                f,
                "spectral derivative is unreliable: eigenvalue {min_eigenvalue:e} is too close to zero"
            ),
            GradError::EigenFailure => write!(f, "eigendecomposition failed in the reverse pass"),
            GradError::Cost(e) => write!(f, "forward cost evaluation failed: {e}"),
        }
    }
}

impl From<WassersteinError> for GradError {
    fn from(e: WassersteinError) -> Self {
        GradError::Cost(e)
    }
}

impl From<GaussianError> for GradError {
    fn from(e: GaussianError) -> Self {
        GradError::Cost(WassersteinError::Gaussian(e))
    }
}

/// Adjoint of the symmetric matrix function `X -> f(X)` at a decomposed
/// point, applied to the cotangent `upstream`.
///
/// With `X = V diag(lambda) V^T`, the derivative of `f(X)` contracts
/// against the divided-difference matrix `F[i][j] = (f(l_i) - f(l_j)) /
/// (l_i - l_j)`; pairs closer than `1e-12` (the diagonal in particular)
/// use the analytic limit `f'` at the pair midpoint.  The returned matrix
/// is `V (F . (V^T upstream V)) V^T`, the gradient of
/// `<upstream, f(X)>` with respect to `X` for symmetric `upstream`.
pub fn spectral_function_vjp(
    eigen: &SymEigen,
    upstream: &Mat,
    f: impl Fn(f64) -> f64,
    f_prime: impl Fn(f64) -> f64,
) -> Mat {
    let n = eigen.values.len();
    assert_eq!(upstream.rows(), n, "cotangent rows match decomposition");
    assert_eq!(upstream.cols(), n, "cotangent cols match decomposition");
    let v = &eigen.vectors;
    // W = V^T upstream V.
    let w = v.transpose().congruence(upstream);
    let mut inner = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (eigen.values[i], eigen.values[j]);
            let coeff = if (a - b).abs() < DEGENERATE_GAP {
                f_prime(0.5 * (a + b))
            } else {
                (f(a) - f(b)) / (a - b)
            };
            inner[(i, j)] = coeff * w[(i, j)];
        }
    }
    v.congruence(&inner)
}

/// Gradient of the squared Wasserstein alignment cost with respect to the
/// assignment matrix, with the source distribution precomputed.
pub(crate) fn wasserstein_cost_gradient_with(
    d1: &GaussianGraphDistribution,
    g2: &Graph,
    p: &Mat,
    alpha: f64,
) -> Result<Mat, GradError> {
    if p.rows() != d1.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment rows vs g1 vertices",
            left: p.rows(),
            right: d1.n(),
        }
        .into());
    }
    let d2 = aligned_distribution(p, g2, alpha)?;
    let s1 = d1.sqrt_covariance();
    let sigma_p = d2.covariance();

    // cost = tr(S1^2) + tr(sigma_p) - 2 tr(sqrt(M)), M = S1 sigma_p S1.
    // d cost / d sigma_p = I - S1 M^{-1/2} S1, pulled back through
    // sigma_p = (K + alpha I)^{-1} and K = sym(P L2 P^T).
    let m = s1.congruence(sigma_p).symmetrized();
    let eigen_m = sym_eigen(&m).map_err(|_| GradError::EigenFailure)?;
    if eigen_m.min_value() < SQRT_DERIVATIVE_FLOOR {
        return Err(GradError::DegenerateSpectrum {
            min_eigenvalue: eigen_m.min_value(),
        });
    }
    let n1 = p.rows();
    // Adjoint of tr(sqrt(M)) is f'(M) = (1/2) M^{-1/2}.
    let half_inv_sqrt = spectral_function_vjp(
        &eigen_m,
        &Mat::identity(n1),
        float::sqrt,
        |l| 0.5 / float::sqrt(l),
    );
    // g_sigma = I - 2 * S1 (M^{-1/2}/2) S1.
    let mut g_sigma = s1.congruence(&half_inv_sqrt).scale(-2.0);
    g_sigma.shift_diag(1.0);
    // Through the inverse: K_bar = -sigma_p g_sigma sigma_p.
    let k_bar = sigma_p.congruence(&g_sigma).scale(-1.0);
    // Through the congruence: P_bar = 2 K_bar P L2.
    Ok(k_bar.matmul(p).matmul(&g2.laplacian()).scale(2.0))
}

/// Gradient of the squared Wasserstein alignment cost
/// (see [`crate::wasserstein::graph_alignment_cost`]) with respect to the
/// assignment matrix entries.
pub fn wasserstein_cost_gradient(
    g1: &Graph,
    g2: &Graph,
    p: &Mat,
    alpha: f64,
) -> Result<Mat, GradError> {
    let d1 = distribution_from_laplacian(&g1.laplacian(), alpha)?;
    wasserstein_cost_gradient_with(&d1, g2, p, alpha)
}

/// Gradient of the Frobenius alignment cost `||L1 - P L2 P^T||_F^2`
/// (see [`crate::wasserstein::l2_alignment_cost`]) with respect to the
/// assignment matrix entries.
pub fn l2_cost_gradient(g1: &Graph, g2: &Graph, p: &Mat) -> Result<Mat, GradError> {
    if p.rows() != g1.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment rows vs g1 vertices",
            left: p.rows(),
            right: g1.n(),
        }
        .into());
    }
    if p.cols() != g2.n() {
        return Err(WassersteinError::DimensionMismatch {
            what: "assignment columns vs g2 vertices",
            left: p.cols(),
            right: g2.n(),
        }
        .into());
    }
    let l2 = g2.laplacian();
    let diff = g1.laplacian().sub(&p.congruence(&l2));
    // cost = <D, D>, D = L1 - P L2 P^T; P_bar = -2 (D + D^T) P L2.
    Ok(diff.symmetrized().scale(-4.0).matmul(p).matmul(&l2))
}

/// Pulls a cotangent of the projected matrix back through a recorded
/// projection run, producing the gradient with respect to the score
/// matrix that was projected.
///
/// The walk reverses each recorded step.  A step computed
/// `A = P_prev . Q_old`, `P_next = project(A)`, `Q_new = A / max(P_next,
/// floor)`; its adjoint first consumes the cotangent of `Q_new` held for
/// the step's constraint family, then routes the combined cotangent of
/// `P_next` through the projection (row scaling toward the clamped band,
/// or column normalization), and finally splits the result between
/// `P_prev` and `Q_old`.  The head of the chain converts the cotangent of
/// the exponentiated start matrix into score space: the subtracted global
/// maximum contributes the negated total mass at its own position, which
/// keeps every gradient orthogonal to uniform score shifts.
pub fn dykstra_backward(tape: &DykstraTape, output_cotangent: &Mat) -> Mat {
    let rows = tape.x0.rows();
    let cols = tape.x0.cols();
    assert_eq!(output_cotangent.rows(), rows, "cotangent rows match tape");
    assert_eq!(output_cotangent.cols(), cols, "cotangent cols match tape");

    let mut p_bar = output_cotangent.clone();
    let mut q_row_bar = Mat::zeros(rows, cols);
    let mut q_col_bar = Mat::zeros(rows, cols);
    let hi = tape.k_max as f64;

    for t in (0..tape.steps.len()).rev() {
        let step = &tape.steps[t];
        let q_bar = match step.kind {
            StepKind::Row => &mut q_row_bar,
            StepKind::Col => &mut q_col_bar,
        };

        // Q_new = A / max(P_next, floor): direct term into A_bar, clamp
        // branch into P_bar wherever the projection output is above the
        // floor.
        let mut a_bar = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let out = step.p_next[(i, j)];
                let denom = out.max(UNDERFLOW_FLOOR);
                let qb = q_bar[(i, j)];
                a_bar[(i, j)] = qb / denom;
                if out > UNDERFLOW_FLOOR {
                    p_bar[(i, j)] -= qb * step.a[(i, j)] / (denom * denom);
                }
            }
        }

        // P_next = project(A): route P_bar through the projection.
        match step.kind {
            StepKind::Row => {
                for i in 0..rows {
                    let s = step.sums[i];
                    let (gain, band_slope) = match step.regions[i] {
                        Region::Below => (1.0 / s, 0.0),
                        Region::Inside => (1.0, 1.0),
                        Region::Above => (hi / s, 0.0),
                    };
                    let mut dot = 0.0;
                    for j in 0..cols {
                        dot += p_bar[(i, j)] * step.a[(i, j)];
                    }
                    let sum_coeff = dot * (band_slope - gain) / s;
                    for j in 0..cols {
                        a_bar[(i, j)] += p_bar[(i, j)] * gain + sum_coeff;
                    }
                }
            }
            StepKind::Col => {
                for j in 0..cols {
                    let s = step.sums[j];
                    let mut dot = 0.0;
                    for i in 0..rows {
                        dot += p_bar[(i, j)] * step.p_next[(i, j)];
                    }
                    for i in 0..rows {
                        a_bar[(i, j)] += (p_bar[(i, j)] - dot) / s;
                    }
                }
            }
        }

        // A = P_prev . Q_old: split A_bar between the previous iterate
        // and the correction that was consumed.
        let p_prev = if t == 0 {
            &tape.x0
        } else {
            &tape.steps[t - 1].p_next
        };
        *q_bar = a_bar.hadamard(p_prev);
        p_bar = a_bar.hadamard(&step.q_old);
    }

    // x0 = exp((scores - shift) / tau) with shift = scores[shift_pos].
    let weighted = p_bar.hadamard(&tape.x0);
    let total: f64 = weighted.as_slice().iter().sum();
    let mut grad = weighted.scale(1.0 / tape.tau);
    grad[tape.shift_pos] -= total / tape.tau;
    grad
}
