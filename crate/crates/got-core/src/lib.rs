//! Alignment of weighted graphs of different sizes by optimal transport
//! between the Gaussian distributions their Laplacians induce on smooth
//! graph signals.
//!
//! The pipeline, bottom to top:
//!
//! * [`matrix`] / [`eig`] — dense row-major matrices and a Jacobi
//!   eigensolver for symmetric matrices; everything above is built on these.
//! * [`graph`] — weighted undirected graphs and their Laplacians.
//! * [`gaussian`] — the zero-mean Gaussian a graph induces on signals,
//!   with covariance `(L + alpha*I)^-1` (the shift makes the Laplacian
//!   invertible), plus symmetric PSD square roots.
//! * [`wasserstein`] — closed-form 2-Wasserstein distance between those
//!   Gaussians, optimal transport maps, and the alignment costs obtained
//!   by pushing the larger graph's Laplacian through a soft assignment.
//! * [`assignment`] — one-to-many soft assignments between vertex sets:
//!   the feasible polytope, its entropic (Dykstra) projection, the
//!   Sinkhorn special case, and greedy hard rounding.
//! * [`grad`] — hand-derived reverse-mode gradients of the alignment
//!   costs through the Dykstra projection.
//! * [`optimizer`] — stochastic optimization of the soft assignment with
//!   a reparameterized Gaussian relaxation and AMSGrad updates.
//! * [`eval`] — spectral clustering, normalized mutual information,
//!   nearest-neighbor classification, and distance matrices.
//! * [`datagen`] — stochastic block model graphs, edge collapses that
//!   produce ground-truth one-to-many alignments, and permutations.
//!
//! The crate is `no_std` (with `alloc`); enable the `std` feature (default)
//! or the `libm` feature to provide scalar math kernels.

#![no_std]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("got-core needs a math backend: enable the `std` feature (default) or `libm`");

pub mod assignment;
pub mod datagen;
pub mod eig;
pub mod eval;
mod float;
pub mod gaussian;
pub mod grad;
pub mod graph;
pub mod matrix;
pub mod optimizer;
pub mod seed;
pub mod wasserstein;

pub use matrix::Mat;
