//! Random graph generators for benchmarks: stochastic block models,
//! edge-collapse distortion with its ground-truth one-to-many map, and
//! vertex relabeling by a random permutation.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{AssignmentError, SoftAssignment};
use crate::float;
use crate::graph::{Graph, GraphError};
use crate::matrix::Mat;

/// How many independent redraws [`generate_sbm`] makes looking for a
/// connected sample before giving up.
const CONNECTIVITY_ATTEMPTS: usize = 100;

/// Ways generation can fail.
#[derive(Clone, Debug, PartialEq)]
pub enum DatagenError {
    /// The block-size list is empty or contains a zero.
    BadBlockSizes,
    /// Probabilities must satisfy `0 <= p_out <= p_in <= 1`.
    BadProbabilities { p_in: f64, p_out: f64 },
    /// No connected sample in [`CONNECTIVITY_ATTEMPTS`] redraws.
    DisconnectedAfterRetries { attempts: usize },
    /// Edge collapse would leave fewer than two vertices.
    TooFewVertices { final_n: usize },
    /// The fuse fraction is outside `[0, 1)` or not finite.
    BadFuseFraction { value: f64 },
    /// Edge collapse requires a connected input graph.
    DisconnectedInput,
    /// A generated weight matrix failed graph validation.
    Graph(GraphError),
    /// The recorded ground-truth map failed assignment validation.
    Assignment(AssignmentError),
}

impl core::fmt::Display for DatagenError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DatagenError::BadBlockSizes => {
                write!(f, "block sizes must be a nonempty list of positive counts")
            }
            DatagenError::BadProbabilities { p_in, p_out } => {
                write!(f, "need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")
            }
            DatagenError::DisconnectedAfterRetries { attempts } => {
                write!(
                    f,
                    "no connected sample in {attempts} attempts; raise p_out or \
                     disable the connectivity requirement"
                )
            }
            DatagenError::TooFewVertices { final_n } => {
                write!(f, "collapse target of {final_n} vertices is below the minimum of 2")
            }
            DatagenError::BadFuseFraction { value } => {
                write!(f, "fuse fraction must lie in [0, 1), got {value}")
            }
            DatagenError::DisconnectedInput => {
                write!(f, "edge collapse requires a connected graph")
            }
            DatagenError::Graph(e) => write!(f, "generated graph invalid: {e}"),
            DatagenError::Assignment(e) => write!(f, "ground-truth map invalid: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DatagenError {}

impl From<GraphError> for DatagenError {
    fn from(e: GraphError) -> Self {
        DatagenError::Graph(e)
    }
}

impl From<AssignmentError> for DatagenError {
    fn from(e: AssignmentError) -> Self {
        DatagenError::Assignment(e)
    }
}

/// Parameters of a stochastic block model draw.
///
/// Vertices are grouped into consecutive blocks of the given sizes; each
/// intra-block pair is joined independently with probability `p_in` and
/// each inter-block pair with probability `p_out`, all edges with unit
/// weight.  `p_out == p_in` is allowed (it degenerates to an
/// Erdős–Rényi graph; with both equal to 1, a complete graph).
///
/// By default samples are redrawn until connected; clear
/// `require_connected` to accept the first draw as-is, which is the only
/// way to obtain disconnected families such as `p_out = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
    pub require_connected: bool,
}

impl SbmSpec {
    pub fn new(block_sizes: Vec<usize>, p_in: f64, p_out: f64, seed: u64) -> Self {
        SbmSpec { block_sizes, p_in, p_out, seed, require_connected: true }
    }

    /// Accept the first draw even if it is disconnected.
    pub fn without_connectivity_requirement(mut self) -> Self {
        self.require_connected = false;
        self
    }

    fn validate(&self) -> Result<(), DatagenError> {
        if self.block_sizes.is_empty() || self.block_sizes.iter().any(|&s| s == 0) {
            return Err(DatagenError::BadBlockSizes);
        }
        let ok = self.p_out.is_finite()
            && self.p_in.is_finite()
            && 0.0 <= self.p_out
            && self.p_out <= self.p_in
            && self.p_in <= 1.0;
        if !ok {
            return Err(DatagenError::BadProbabilities { p_in: self.p_in, p_out: self.p_out });
        }
        Ok(())
    }
}

/// Draws a stochastic block model graph with block ids as node labels.
///
/// Deterministic per `spec.seed`.  When `require_connected` is set, up to
/// [`CONNECTIVITY_ATTEMPTS`] independent redraws (each from its own seed
/// stream derived from `spec.seed`) are made until a connected sample
/// appears.
pub fn generate_sbm(spec: &SbmSpec) -> Result<Graph, DatagenError> {
    spec.validate()?;
    let n: usize = spec.block_sizes.iter().sum();
    let mut labels = Vec::with_capacity(n);
    for (block, &size) in spec.block_sizes.iter().enumerate() {
        for _ in 0..size {
            labels.push(block);
        }
    }

    let attempts = if spec.require_connected { CONNECTIVITY_ATTEMPTS } else { 1 };
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive(spec.seed, attempt as u64));
        let mut w = Mat::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if labels[i] == labels[j] { spec.p_in } else { spec.p_out };
                if rng.gen::<f64>() < p {
                    w[(i, j)] = 1.0;
                    w[(j, i)] = 1.0;
                }
            }
        }
        let g = Graph::from_weights(w)?.with_node_labels(labels.clone())?;
        if !spec.require_connected || g.is_connected() {
            return Ok(g);
        }
    }
    Err(DatagenError::DisconnectedAfterRetries { attempts })
}

/// The ground truth produced alongside an edge-collapsed graph.
#[derive(Clone, Debug)]
pub struct CollapseRecord {
    /// Vertex count before collapsing.
    pub original_n: usize,
    /// Vertex count after collapsing.
    pub final_n: usize,
    /// Binary `final_n x original_n` map sending each original vertex
    /// (column) to the surviving vertex (row) that absorbed it.  Satisfies
    /// the assignment polytope with the realized largest group size as the
    /// row-sum cap.
    pub assignment: SoftAssignment,
    /// The merges in order, as pairs `(kept, absorbed)` of representative
    /// original vertex ids (the smallest id in each group at merge time).
    pub merge_sequence: Vec<(usize, usize)>,
}

/// Distorts a connected graph by repeatedly collapsing a uniformly random
/// edge — merging its endpoints, summing parallel edge weights, dropping
/// the self-loop — until `ceil(fuse_fraction * n)` vertices are gone.
///
/// The kept endpoint is the smaller-indexed one, and removing the other
/// shifts later indices down by one.  Node labels, when present, follow
/// each surviving vertex by majority vote over the original vertices it
/// absorbed (ties to the smallest label).  Returns the collapsed graph and
/// the ground-truth one-to-many map from surviving to original vertices;
/// the map `P` reproduces the collapsed Laplacian exactly as
/// `P L2 Pᵀ` from the original Laplacian `L2`.
///
/// Deterministic per `seed`.
pub fn collapse_edges(
    g: &Graph,
    fuse_fraction: f64,
    seed: u64,
) -> Result<(Graph, CollapseRecord), DatagenError> {
    if !(fuse_fraction.is_finite() && (0.0..1.0).contains(&fuse_fraction)) {
        return Err(DatagenError::BadFuseFraction { value: fuse_fraction });
    }
    if !g.is_connected() {
        return Err(DatagenError::DisconnectedInput);
    }
    let n = g.n();
    // The 1e-9 backoff keeps binary round-off in `fuse_fraction * n` (for
    // example 0.1 * 30 = 3.0000000000000004) from inflating the ceiling by
    // a whole vertex.
    let remove = float::ceil(fuse_fraction * n as f64 - 1e-9).max(0.0) as usize;
    let final_n = n - remove;
    if final_n < 2 {
        return Err(DatagenError::TooFewVertices { final_n });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<Vec<f64>> = (0..n).map(|i| g.weights().row(i).to_vec()).collect();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merge_sequence = Vec::with_capacity(remove);

    for _ in 0..remove {
        let m = w.len();
        let mut edges = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                if w[i][j] > 0.0 {
                    edges.push((i, j));
                }
            }
        }
        // A connected graph on >= 2 vertices always has an edge, and
        // merging preserves connectivity, so `edges` is never empty here.
        let (a, b) = edges[rng.gen_range(0..edges.len())];
        merge_sequence.push((groups[a][0], groups[b][0]));
        for x in 0..m {
            if x != a && x != b {
                let add = w[b][x];
                w[a][x] += add;
                w[x][a] += add;
            }
        }
        w[a][a] = 0.0;
        w.remove(b);
        for row in w.iter_mut() {
            row.remove(b);
        }
        let absorbed = groups.remove(b);
        groups[a].extend(absorbed);
        groups[a].sort_unstable();
    }

    let collapsed_w = Mat::from_fn(final_n, final_n, |i, j| w[i][j]);
    let mut collapsed = Graph::from_weights(collapsed_w)?;
    if let Some(orig_labels) = g.node_labels() {
        let labels = groups.iter().map(|members| majority_label(members, orig_labels)).collect();
        collapsed = collapsed.with_node_labels(labels)?;
    }

    let mut owners = vec![0usize; n];
    let mut k_max = 1;
    for (row, members) in groups.iter().enumerate() {
        k_max = k_max.max(members.len());
        for &v in members {
            owners[v] = row;
        }
    }
    let assignment = SoftAssignment::from_owners(final_n, &owners, k_max)?;
    let record = CollapseRecord { original_n: n, final_n, assignment, merge_sequence };
    Ok((collapsed, record))
}

/// The most frequent label among `members`, ties to the smallest label.
pub(crate) fn majority_label(members: &[usize], labels: &[usize]) -> usize {
    let mut best = labels[members[0]];
    let mut best_count = 0;
    for &cand in members {
        let label = labels[cand];
        let count = members.iter().filter(|&&v| labels[v] == label).count();
        if count > best_count || (count == best_count && label < best) {
            best = label;
            best_count = count;
        }
    }
    best
}

/// Relabels the vertices of `g` by a uniformly random permutation.
///
/// Returns the permuted graph and the permutation `perm`, oriented so that
/// vertex `i` of the result is vertex `perm[i]` of the input:
/// `out.weights[(i, j)] == g.weights[(perm[i], perm[j])]`.  Node labels
/// move with their vertices; the graph label is preserved.  Deterministic
/// per `seed`.
pub fn permute_graph(g: &Graph, seed: u64) -> (Graph, Vec<usize>) {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let w = Mat::from_fn(n, n, |i, j| g.weights()[(perm[i], perm[j])]);
    let mut out = Graph::from_weights(w).expect("permuting preserves graph validity");
    if let Some(labels) = g.node_labels() {
        let permuted = perm.iter().map(|&p| labels[p]).collect();
        out = out.with_node_labels(permuted).expect("label count unchanged");
    }
    if let Some(label) = g.graph_label() {
        out = out.with_graph_label(label);
    }
    (out, perm)
}
