//! Quality metrics for alignments: spectral clustering, normalized mutual
//! information, community transfer through an assignment, and
//! leave-one-out nearest-neighbor classification over a distance matrix.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assignment::{round_to_hard, AssignmentError, SoftAssignment};
use crate::datagen::majority_label;
use crate::eig::sym_eigen;
use crate::float;
use crate::graph::Graph;
use crate::matrix::Mat;

/// Independent k-means runs per clustering call; the lowest-inertia run
/// wins (first winner on ties, so results are reproducible).
const KMEANS_RESTARTS: usize = 50;

/// Cap on Lloyd iterations within one k-means run.
const KMEANS_MAX_ITERS: usize = 100;

/// Largest asymmetry and diagonal magnitude a distance matrix may carry
/// before construction rejects it; values inside the band are repaired
/// (symmetrized, diagonal and negative round-off zeroed).
const DISTANCE_TOL: f64 = 1e-8;

/// Ways evaluation can fail.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    /// Fewer than two clusters requested.
    KTooSmall { k: usize },
    /// More clusters than vertices requested.
    KTooLarge { k: usize, n: usize },
    /// The label vectors have different lengths.
    LengthMismatch { a: usize, b: usize },
    /// A label vector is empty.
    EmptyLabels,
    /// Nearest-neighbor accuracy needs at least two graphs of at least
    /// two distinct classes.
    DegenerateLabels,
    /// The distance matrix is not square.
    NotSquare { rows: usize, cols: usize },
    /// The distance matrix has no entries.
    Empty,
    /// One class label per graph is required.
    LabelCount { expected: usize, got: usize },
    /// A distance is negative beyond round-off.
    NegativeDistance { row: usize, col: usize, value: f64 },
    /// A distance is NaN or infinite.
    NonFiniteDistance { row: usize, col: usize },
    /// A diagonal entry is nonzero beyond round-off.
    NonzeroDiagonal { index: usize, value: f64 },
    /// The assignment shape does not match the two graphs.
    ShapeMismatch { rows: usize, cols: usize, n1: usize, n2: usize },
    /// The eigensolver did not converge.
    EigenFailure,
    /// Rounding the assignment failed.
    Assignment(AssignmentError),
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::KTooSmall { k } => write!(f, "need at least 2 clusters, got {k}"),
            EvalError::KTooLarge { k, n } => {
                write!(f, "cannot split {n} vertices into {k} clusters")
            }
            EvalError::LengthMismatch { a, b } => {
                write!(f, "label vectors have lengths {a} and {b}")
            }
            EvalError::EmptyLabels => write!(f, "label vectors must be nonempty"),
            EvalError::DegenerateLabels => {
                write!(f, "need at least two graphs spanning at least two classes")
            }
            EvalError::NotSquare { rows, cols } => {
                write!(f, "distance matrix is {rows}x{cols}, expected square")
            }
            EvalError::Empty => write!(f, "distance matrix must have at least one entry"),
            EvalError::LabelCount { expected, got } => {
                write!(f, "{got} class labels for {expected} graphs")
            }
            EvalError::NegativeDistance { row, col, value } => {
                write!(f, "negative distance {value} at ({row}, {col})")
            }
            EvalError::NonFiniteDistance { row, col } => {
                write!(f, "non-finite distance at ({row}, {col})")
            }
            EvalError::NonzeroDiagonal { index, value } => {
                write!(f, "self-distance {value} at graph {index}")
            }
            EvalError::ShapeMismatch { rows, cols, n1, n2 } => {
                write!(f, "assignment is {rows}x{cols} but the graphs have {n1} and {n2} vertices")
            }
            EvalError::EigenFailure => write!(f, "eigendecomposition did not converge"),
            EvalError::Assignment(e) => write!(f, "assignment rounding failed: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

impl From<AssignmentError> for EvalError {
    fn from(e: AssignmentError) -> Self {
        EvalError::Assignment(e)
    }
}

/// Pairwise distances between graphs plus one class label per graph.
///
/// Construction symmetrizes the values to `(D + Dᵀ)/2`, forces the
/// diagonal to zero, and snaps negative round-off to zero; anything
/// beyond the `1e-8` repair band is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    values: Mat,
    labels: Vec<usize>,
}

impl DistanceMatrix {
    pub fn new(values: Mat, labels: Vec<usize>) -> Result<Self, EvalError> {
        let (rows, cols) = (values.rows(), values.cols());
        if rows != cols {
            return Err(EvalError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(EvalError::Empty);
        }
        if labels.len() != rows {
            return Err(EvalError::LabelCount { expected: rows, got: labels.len() });
        }
        for i in 0..rows {
            for j in 0..cols {
                if !values[(i, j)].is_finite() {
                    return Err(EvalError::NonFiniteDistance { row: i, col: j });
                }
            }
        }
        let mut sym = values.symmetrized();
        for i in 0..rows {
            let d = sym[(i, i)];
            if float::abs(d) > DISTANCE_TOL {
                return Err(EvalError::NonzeroDiagonal { index: i, value: d });
            }
            sym[(i, i)] = 0.0;
            for j in 0..cols {
                let v = sym[(i, j)];
                if v < -DISTANCE_TOL {
                    return Err(EvalError::NegativeDistance { row: i, col: j, value: v });
                }
                if v < 0.0 {
                    sym[(i, j)] = 0.0;
                }
            }
        }
        Ok(DistanceMatrix { values: sym, labels })
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of graphs.
    pub fn size(&self) -> usize {
        self.values.rows()
    }
}

/// Clusters the vertices of `g` into `k` groups.
///
/// Embeds each vertex by the `k` eigenvectors of smallest eigenvalue of
/// the symmetric normalized Laplacian `I - D^{-1/2} W D^{-1/2}` (isolated
/// vertices contribute a zero degree term), row-normalizes the embedding
/// to unit length (all-zero rows stay zero), and runs k-means++-seeded
/// k-means with [`KMEANS_RESTARTS`] restarts.  Deterministic per `seed`.
pub fn spectral_clustering(g: &Graph, k: usize, seed: u64) -> Result<Vec<usize>, EvalError> {
    let n = g.n();
    if k < 2 {
        return Err(EvalError::KTooSmall { k });
    }
    if k > n {
        return Err(EvalError::KTooLarge { k, n });
    }

    let scale: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / float::sqrt(d) } else { 0.0 })
        .collect();
    let w = g.weights();
    let lsym = Mat::from_fn(n, n, |i, j| {
        let off = -w[(i, j)] * scale[i] * scale[j];
        if i == j {
            1.0 + off
        } else {
            off
        }
    });
    let eig = sym_eigen(&lsym).map_err(|_| EvalError::EigenFailure)?;

    let mut points = vec![vec![0.0; k]; n];
    for (i, point) in points.iter_mut().enumerate() {
        for (c, coord) in point.iter_mut().enumerate() {
            *coord = eig.vectors[(i, c)];
        }
    }
    for point in points.iter_mut() {
        let norm = float::sqrt(point.iter().map(|v| v * v).sum());
        if norm > 1e-12 {
            for v in point.iter_mut() {
                *v /= norm;
            }
        }
    }
    Ok(kmeans(&points, k, seed))
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best-of-[`KMEANS_RESTARTS`] k-means over `points`; `k <= points.len()`.
fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..KMEANS_RESTARTS {
        let centers = plus_plus_centers(points, k, &mut rng);
        let (labels, inertia) = lloyd(points, k, centers);
        if best.as_ref().map_or(true, |(best_inertia, _)| inertia < *best_inertia) {
            best = Some((inertia, labels));
        }
    }
    best.expect("at least one restart ran").1
}

/// k-means++ seeding: after a uniform first pick, each further center is
/// drawn with probability proportional to the squared distance to the
/// nearest center chosen so far (uniform fallback once every point
/// coincides with a center).
fn plus_plus_centers(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)].clone());
    let mut nearest: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &mass) in nearest.iter().enumerate() {
                if target < mass {
                    pick = i;
                    break;
                }
                target -= mass;
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centers.push(points[chosen].clone());
        for (i, p) in points.iter().enumerate() {
            let d = dist2(p, centers.last().expect("just pushed"));
            if d < nearest[i] {
                nearest[i] = d;
            }
        }
    }
    centers
}

/// Lloyd iterations from the given centers; returns labels and inertia.
///
/// Ties in the nearest-center search go to the lowest center index.  A
/// cluster left empty seizes the point farthest from its current center
/// (among clusters that can spare one), so all `k` labels stay in use
/// whenever the points allow it.
fn lloyd(points: &[Vec<f64>], k: usize, mut centers: Vec<Vec<f64>>) -> (Vec<usize>, f64) {
    let n = points.len();
    let dim = points[0].len();
    let mut labels = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = dist2(p, center);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }

        loop {
            let mut counts = vec![0usize; k];
            for &l in &labels {
                counts[l] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else { break };
            let mut farthest: Option<(usize, f64)> = None;
            for (i, p) in points.iter().enumerate() {
                if counts[labels[i]] > 1 {
                    let d = dist2(p, &centers[labels[i]]);
                    if farthest.map_or(true, |(_, best)| d > best) {
                        farthest = Some((i, d));
                    }
                }
            }
            match farthest {
                Some((i, _)) => {
                    labels[i] = empty;
                    changed = true;
                }
                None => break,
            }
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[labels[i]] += 1;
            for (s, &v) in sums[labels[i]].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        for (center, (sum, &count)) in centers.iter_mut().zip(sums.iter().zip(counts.iter())) {
            if count > 0 {
                for (c, &s) in center.iter_mut().zip(sum.iter()) {
                    *c = s / count as f64;
                }
            }
        }

        if !changed {
            break;
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| dist2(p, &centers[l])).sum();
    (labels, inertia)
}

/// Relabels `labels` with contiguous ids and counts each class.
fn class_counts(labels: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut ids = BTreeMap::new();
    let mut compact = Vec::with_capacity(labels.len());
    let mut counts = Vec::new();
    for &l in labels {
        let next = ids.len();
        let id = *ids.entry(l).or_insert(next);
        if id == counts.len() {
            counts.push(0);
        }
        counts[id] += 1;
        compact.push(id);
    }
    (compact, counts)
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * float::ln(p)
        })
        .sum()
}

/// Normalized mutual information `I(a;b) / sqrt(H(a) H(b))` of two
/// labelings of the same items, using natural logarithms.
///
/// Identical labelings up to renaming score 1 (in particular, two
/// constant labelings).  When exactly one side has zero entropy the score
/// is 0 by convention.  Symmetric, in `[0, 1]`, and invariant to
/// renaming the labels on either side.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { a: a.len(), b: b.len() });
    }
    if a.is_empty() {
        return Err(EvalError::EmptyLabels);
    }
    let n = a.len() as f64;
    let (ca, counts_a) = class_counts(a);
    let (cb, counts_b) = class_counts(b);
    let ha = entropy(&counts_a, n);
    let hb = entropy(&counts_b, n);
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }

    let mut joint = vec![vec![0usize; counts_b.len()]; counts_a.len()];
    for (&i, &j) in ca.iter().zip(cb.iter()) {
        joint[i][j] += 1;
    }
    let mut info = 0.0;
    for (i, row) in joint.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let p = c as f64 / n;
                let pa = counts_a[i] as f64 / n;
                let pb = counts_b[j] as f64 / n;
                info += p * float::ln(p / (pa * pb));
            }
        }
    }
    Ok((info / float::sqrt(ha * hb)).clamp(0.0, 1.0))
}

/// Leave-one-out nearest-neighbor accuracy over a distance matrix.
///
/// Each graph is predicted to carry the class of its nearest other graph
/// (ties to the lowest index); returns the fraction predicted correctly.
/// Any strictly increasing transform of the distances leaves the result
/// unchanged.
pub fn one_nn_accuracy(d: &DistanceMatrix) -> Result<f64, EvalError> {
    let m = d.size();
    let classes: BTreeSet<usize> = d.labels.iter().copied().collect();
    if m < 2 || classes.len() < 2 {
        return Err(EvalError::DegenerateLabels);
    }
    let mut correct = 0usize;
    for i in 0..m {
        let mut nearest: Option<usize> = None;
        for j in 0..m {
            if j == i {
                continue;
            }
            if nearest.map_or(true, |best| d.values[(i, j)] < d.values[(i, best)]) {
                nearest = Some(j);
            }
        }
        let j = nearest.expect("m >= 2 guarantees a neighbor");
        if d.labels[j] == d.labels[i] {
            correct += 1;
        }
    }
    Ok(correct as f64 / m as f64)
}

/// How well an alignment carries `g2`'s communities onto `g1`'s.
///
/// Clusters `g2` spectrally, sends each `g2` vertex to the `g1` vertex
/// owning its column in the hard-rounded assignment, labels each `g1`
/// vertex by the majority label among the `g2` vertices it received (ties
/// to the smallest label — every vertex receives at least one by the
/// row-sum floor), and scores that induced labeling against `g1`'s own
/// spectral clustering with [`nmi`].  Both clusterings use the same
/// `seed`.
pub fn community_transfer_nmi(
    g1: &Graph,
    g2: &Graph,
    p: &SoftAssignment,
    k: usize,
    seed: u64,
) -> Result<f64, EvalError> {
    if p.rows() != g1.n() || p.cols() != g2.n() {
        return Err(EvalError::ShapeMismatch {
            rows: p.rows(),
            cols: p.cols(),
            n1: g1.n(),
            n2: g2.n(),
        });
    }
    let labels2 = spectral_clustering(g2, k, seed)?;
    let hard = round_to_hard(p.matrix(), p.k_max())?;
    let owners = hard.owners().expect("rounding yields one owner per column");
    let mut received: Vec<Vec<usize>> = vec![Vec::new(); g1.n()];
    for (col, &row) in owners.iter().enumerate() {
        received[row].push(col);
    }
    let induced: Vec<usize> =
        received.iter().map(|cols| majority_label(cols, &labels2)).collect();
    let labels1 = spectral_clustering(g1, k, seed)?;
    nmi(&induced, &labels1)
}
