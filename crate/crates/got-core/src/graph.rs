//! Weighted undirected graphs and their Laplacians.
//!
//! A [`Graph`] is a validated symmetric nonnegative weight matrix with a
//! zero diagonal, plus optional per-vertex labels (e.g. planted
//! communities) and an optional whole-graph label (e.g. a class for
//! classification benchmarks).

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Mat;

/// Largest tolerated asymmetry in a weight matrix.
const SYMMETRY_TOL: f64 = 1e-12;

/// Ways a weight matrix can fail validation.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    /// The matrix is not square.
    NotSquare { rows: usize, cols: usize },
    /// The graph has no vertices.
    Empty,
    /// `max |W - W^T|` exceeds the symmetry tolerance.
    Asymmetric { max_dev: f64 },
    /// A weight is negative.
    NegativeWeight { row: usize, col: usize, value: f64 },
    /// A diagonal entry (self-loop) is nonzero.
    NonzeroDiagonal { index: usize, value: f64 },
    /// A weight is NaN or infinite.
    NonFinite { row: usize, col: usize },
    /// The label vector length does not match the vertex count.
    LabelCount { expected: usize, got: usize },
}

impl core::fmt::Display for GraphError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GraphError::NotSquare { rows, cols } => {
                write!(f, "weight matrix is {rows}x{cols}, expected square")
            }
            GraphError::Empty => write!(f, "graph must have at least one vertex"),
            GraphError::Asymmetric { max_dev } => {
                write!(f, "weight matrix asymmetric by {max_dev:e} (tolerance {SYMMETRY_TOL:e})")
            }
            GraphError::NegativeWeight { row, col, value } => {
                write!(f, "negative weight {value} at ({row}, {col})")
            }
            GraphError::NonzeroDiagonal { index, value } => {
                write!(f, "self-loop weight {value} at vertex {index}")
            }
            GraphError::NonFinite { row, col } => {
                write!(f, "non-finite weight at ({row}, {col})")
            }
            GraphError::LabelCount { expected, got } => {
                write!(f, "{got} node labels for {expected} vertices")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// A weighted undirected graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    weights: Mat,
    node_labels: Option<Vec<usize>>,
    graph_label: Option<usize>,
}

impl Graph {
    /// Validates a weight matrix and wraps it.
    ///
    /// The matrix must be square with at least one row, symmetric within
    /// `1e-12`, entrywise finite and nonnegative, with a zero diagonal.
    /// It is symmetrized exactly on acceptance.
    pub fn from_weights(weights: Mat) -> Result<Self, GraphError> {
        if !weights.is_square() {
            return Err(GraphError::NotSquare {
                rows: weights.rows(),
                cols: weights.cols(),
            });
        }
        let n = weights.rows();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() {
                    return Err(GraphError::NonFinite { row: i, col: j });
                }
                if w < 0.0 {
                    return Err(GraphError::NegativeWeight { row: i, col: j, value: w });
                }
            }
            let d = weights[(i, i)];
            if d != 0.0 {
                return Err(GraphError::NonzeroDiagonal { index: i, value: d });
            }
        }
        let max_dev = weights.asymmetry();
        if max_dev > SYMMETRY_TOL {
            return Err(GraphError::Asymmetric { max_dev });
        }
        Ok(Graph {
            weights: weights.symmetrized(),
            node_labels: None,
            graph_label: None,
        })
    }

    /// Builds a graph on `n` vertices from an undirected edge list.
    /// Each `(u, v, w)` sets both `W[u][v]` and `W[v][u]`.
    ///
    /// Panics if an endpoint is out of range; errors on self-loops or
    /// invalid weights like [`from_weights`](Self::from_weights).
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut w = Mat::zeros(n, n);
        for &(u, v, weight) in edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            w[(u, v)] = weight;
            w[(v, u)] = weight;
        }
        Graph::from_weights(w)
    }

    /// Attaches one label per vertex (consumed builder-style).
    pub fn with_node_labels(mut self, labels: Vec<usize>) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::LabelCount {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    /// Attaches a whole-graph label (consumed builder-style).
    pub fn with_graph_label(mut self, label: usize) -> Self {
        self.graph_label = Some(label);
        self
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    /// The symmetric weight matrix.
    pub fn weights(&self) -> &Mat {
        &self.weights
    }

    pub fn node_labels(&self) -> Option<&[usize]> {
        self.node_labels.as_deref()
    }

    pub fn graph_label(&self) -> Option<usize> {
        self.graph_label
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        self.weights.row_sums()
    }

    /// Undirected edges `(u, v, w)` with `u < v` and `w != 0`,
    /// in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let w = self.weights[(u, v)];
                if w != 0.0 {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Graph Laplacian `L = D - W` with `D` the diagonal degree matrix.
    ///
    /// `L` is symmetric positive semidefinite and annihilates the
    /// constant vector: every row sums to zero.
    pub fn laplacian(&self) -> Mat {
        let n = self.n();
        let degrees = self.degrees();
        let mut l = self.weights.scale(-1.0);
        for i in 0..n {
            l[(i, i)] = degrees[i];
        }
        l
    }

    /// True when every vertex is reachable from vertex 0 through nonzero
    /// weights. A single-vertex graph is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && self.weights[(u, v)] != 0.0 {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Path graph 0 - 1 - 2 with unit weights.
    pub(crate) fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn laplacian_of_path3() {
        let l = path3().laplacian();
        let expected = Mat::from_rows(&[
            &[1.0, -1.0, 0.0],
            &[-1.0, 2.0, -1.0],
            &[0.0, -1.0, 1.0],
        ]);
        assert_eq!(l, expected);
    }

    #[test]
    fn laplacian_of_single_vertex() {
        let g = Graph::from_weights(Mat::zeros(1, 1)).unwrap();
        assert_eq!(g.laplacian(), Mat::zeros(1, 1));
    }

    #[test]
    fn laplacian_annihilates_constants_and_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 9, 17] {
            let raw = Mat::from_fn(n, n, |i, j| {
                if i < j && rng.gen_bool(0.5) {
                    rng.gen_range(0.1..2.0)
                } else {
                    0.0
                }
            });
            let g = Graph::from_weights(raw.add(&raw.transpose())).unwrap();
            let l = g.laplacian();
            for s in l.row_sums() {
                assert!(s.abs() < 1e-12, "row sum {s} at n = {n}");
            }
            let e = crate::eig::sym_eigen(&l).unwrap();
            assert!(e.min_value() > -1e-10, "Laplacian not PSD at n = {n}");
        }
    }

    #[test]
    fn rejects_invalid_weight_matrices() {
        assert_eq!(
            Graph::from_weights(Mat::zeros(2, 3)).unwrap_err(),
            GraphError::NotSquare { rows: 2, cols: 3 }
        );
        assert_eq!(Graph::from_weights(Mat::zeros(0, 0)).unwrap_err(), GraphError::Empty);

        let mut loop_w = Mat::zeros(2, 2);
        loop_w[(1, 1)] = 0.5;
        assert_eq!(
            Graph::from_weights(loop_w).unwrap_err(),
            GraphError::NonzeroDiagonal { index: 1, value: 0.5 }
        );

        let mut neg = Mat::zeros(2, 2);
        neg[(0, 1)] = -1.0;
        neg[(1, 0)] = -1.0;
        assert!(matches!(
            Graph::from_weights(neg).unwrap_err(),
            GraphError::NegativeWeight { row: 0, col: 1, .. }
        ));

        let mut asym = Mat::zeros(2, 2);
        asym[(0, 1)] = 1.0;
        asym[(1, 0)] = 1.0 + 1e-6;
        assert!(matches!(
            Graph::from_weights(asym).unwrap_err(),
            GraphError::Asymmetric { .. }
        ));

        let mut nan = Mat::zeros(2, 2);
        nan[(0, 1)] = f64::NAN;
        assert!(matches!(
            Graph::from_weights(nan).unwrap_err(),
            GraphError::NonFinite { row: 0, col: 1 }
        ));
    }

    #[test]
    fn label_length_is_checked() {
        let g = path3();
        assert_eq!(
            g.clone().with_node_labels(vec![0, 1]).unwrap_err(),
            GraphError::LabelCount { expected: 3, got: 2 }
        );
        let labeled = g.with_node_labels(vec![0, 0, 1]).unwrap();
        assert_eq!(labeled.node_labels(), Some(&[0, 0, 1][..]));
    }

    #[test]
    fn connectivity() {
        assert!(path3().is_connected());
        let split = Graph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!split.is_connected());
        let singleton = Graph::from_weights(Mat::zeros(1, 1)).unwrap();
        assert!(singleton.is_connected());
    }

    #[test]
    fn edges_round_trip() {
        let g = Graph::from_edges(4, &[(0, 2, 1.5), (1, 3, 0.5), (0, 1, 2.0)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1, 2.0), (0, 2, 1.5), (1, 3, 0.5)]);
        let rebuilt = Graph::from_edges(4, &g.edges()).unwrap();
        assert_eq!(rebuilt.weights(), g.weights());
    }
}
