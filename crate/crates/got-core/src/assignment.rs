//! One-to-many soft assignments between vertex sets and their entropic
//! projections.
//!
//! An assignment from a graph with `r` vertices to a larger graph with
//! `c` vertices is an `r x c` matrix in the polytope
//!
//! ```text
//! C = { P : P >= 0, every column sums to 1, every row sum in [1, k_max] }
//! ```
//!
//! so each large-graph vertex distributes exactly one unit of mass, and
//! each small-graph vertex receives between 1 and `k_max` units. The
//! entropic projection operator maps an unconstrained score matrix into
//! `C` by exponentiating and then alternating KL projections onto the row
//! and column constraint families with Dykstra corrections; it is smooth
//! in the scores, which is what makes gradient-based alignment work. With
//! square inputs and `k_max = 1` the same operator reduces to the classic
//! Sinkhorn scaling onto doubly stochastic matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::matrix::Mat;

/// Products below this are treated as numerical zero: `exp` of a deeply
/// negative score underflows and must not poison divisions.
pub(crate) const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Tolerances baked into [`SoftAssignment`] validation.
const ENTRY_UPPER_TOL: f64 = 1e-6;
const SUM_TOL: f64 = 1e-4;

/// Failures in assignment construction and projection.
#[derive(Clone, Debug, PartialEq)]
pub enum AssignmentError {
    /// `k_max` is outside `[1, 1 + cols - rows]` (or `rows > cols`).
    InvalidKMax { rows: usize, cols: usize, k_max: usize },
    /// An entry lies outside `[0, 1 + 1e-6]`.
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    /// A column sum differs from 1 by more than `1e-4`.
    ColumnSumOff { col: usize, sum: f64 },
    /// A row sum lies outside `[1 - 1e-4, k_max + 1e-4]`.
    RowSumOff { row: usize, sum: f64 },
    /// An entire row of the exponentiated scores underflowed to zero.
    ZeroRow { row: usize },
    /// An entire column of the exponentiated scores underflowed to zero.
    ZeroColumn { col: usize },
    /// A projection produced a non-finite value.
    Overflow,
    /// Sinkhorn projection needs a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Hard rounding ran out of row capacity (cannot happen for a valid
    /// soft assignment; reported rather than silently mis-assigning).
    Infeasible,
}

impl core::fmt::Display for AssignmentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AssignmentError::InvalidKMax { rows, cols, k_max } => write!(
                f,
                "k_max = {k_max} infeasible for a {rows}->{cols} assignment: need 1 <= k_max <= {}",
                if cols >= rows { 1 + cols - rows } else { 0 }
            ),
            AssignmentError::EntryOutOfRange { row, col, value } => {
                write!(f, "assignment entry ({row}, {col}) = {value} outside [0, 1]")
            }
            AssignmentError::ColumnSumOff { col, sum } => {
                write!(f, "column {col} sums to {sum}, expected 1")
            }
            AssignmentError::RowSumOff { row, sum } => {
                write!(f, "row {row} sums to {sum}, outside [1, k_max]")
            }
            AssignmentError::ZeroRow { row } => {
                write!(f, "row {row} of the exponentiated scores underflowed to zero")
            }
            AssignmentError::ZeroColumn { col } => {
                write!(f, "column {col} of the exponentiated scores underflowed to zero")
            }
            AssignmentError::Overflow => write!(f, "projection produced a non-finite value"),
            AssignmentError::NotSquare { rows, cols } => {
                write!(f, "Sinkhorn projection needs a square matrix, got {rows}x{cols}")
            }
            AssignmentError::Infeasible => {
                write!(f, "hard rounding could not place every column within k_max per row")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AssignmentError {}

/// True when `k_max` satisfies the feasibility bound
/// `1 <= k_max <= 1 + cols - rows` for an assignment from `rows` small
/// vertices onto `cols` large vertices.
///
/// This is the bound under which one vertex may absorb `k_max` merges
/// while every other vertex still receives at least one column. Note it
/// does not by itself guarantee enough total capacity; see
/// [`feasible_kmax`] for the sufficient condition.
pub fn validate_kmax(rows: usize, cols: usize, k_max: usize) -> bool {
    rows >= 1 && cols >= rows && k_max >= 1 && k_max <= 1 + cols - rows
}

/// True when the assignment polytope is actually nonempty: the bound of
/// [`validate_kmax`] plus total capacity `rows * k_max >= cols` (the `r`
/// row sums, each at most `k_max`, must add up to the `c` column sums of
/// one each).
pub fn feasible_kmax(rows: usize, cols: usize, k_max: usize) -> bool {
    validate_kmax(rows, cols, k_max) && rows * k_max >= cols
}

/// A validated member of the assignment polytope.
///
/// Entries lie in `[0, 1]`, columns sum to 1 within `1e-4`, and row sums
/// lie in `[1, k_max]` within `1e-4` (all up to the stated tolerances, to
/// admit converged-but-inexact projection output).
#[derive(Clone, Debug, PartialEq)]
pub struct SoftAssignment {
    matrix: Mat,
    k_max: usize,
}

impl SoftAssignment {
    /// Validates `matrix` against the polytope constraints for `k_max`.
    pub fn new(matrix: Mat, k_max: usize) -> Result<Self, AssignmentError> {
        let (rows, cols) = (matrix.rows(), matrix.cols());
        if !validate_kmax(rows, cols, k_max) {
            return Err(AssignmentError::InvalidKMax { rows, cols, k_max });
        }
        for i in 0..rows {
            for (j, &v) in matrix.row(i).iter().enumerate() {
                if !(0.0..=1.0 + ENTRY_UPPER_TOL).contains(&v) {
                    return Err(AssignmentError::EntryOutOfRange { row: i, col: j, value: v });
                }
            }
        }
        for (j, &s) in matrix.col_sums().iter().enumerate() {
            if float::abs(s - 1.0) > SUM_TOL {
                return Err(AssignmentError::ColumnSumOff { col: j, sum: s });
            }
        }
        for (i, &s) in matrix.row_sums().iter().enumerate() {
            if s < 1.0 - SUM_TOL || s > k_max as f64 + SUM_TOL {
                return Err(AssignmentError::RowSumOff { row: i, sum: s });
            }
        }
        Ok(SoftAssignment { matrix, k_max })
    }

    /// The square identity assignment (`k_max = 1`).
    pub fn identity(n: usize) -> Self {
        SoftAssignment {
            matrix: Mat::identity(n),
            k_max: 1,
        }
    }

    /// The binary assignment sending column `j` to row `owners[j]`.
    ///
    /// Panics if an owner index is out of range; errors if the resulting
    /// matrix violates the polytope (some row gets 0 or more than `k_max`
    /// columns).
    pub fn from_owners(rows: usize, owners: &[usize], k_max: usize) -> Result<Self, AssignmentError> {
        let mut m = Mat::zeros(rows, owners.len());
        for (j, &i) in owners.iter().enumerate() {
            assert!(i < rows, "owner row out of range");
            m[(i, j)] = 1.0;
        }
        SoftAssignment::new(m, k_max)
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// True when every entry is exactly 0 or 1.
    pub fn is_hard(&self) -> bool {
        self.matrix.as_slice().iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// For a hard assignment: the owning row of each column.
    /// Returns `None` if any column does not have exactly one unit entry.
    pub fn owners(&self) -> Option<Vec<usize>> {
        if !self.is_hard() {
            return None;
        }
        let mut owners = Vec::with_capacity(self.cols());
        for j in 0..self.cols() {
            let mut owner = None;
            for i in 0..self.rows() {
                if self.matrix[(i, j)] == 1.0 {
                    if owner.is_some() {
                        return None;
                    }
                    owner = Some(i);
                }
            }
            owners.push(owner?);
        }
        Some(owners)
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }
}

/// Settings for the iterative projections.
#[derive(Clone, Debug, PartialEq)]
pub struct DykstraConfig {
    /// Entropic temperature: scores are exponentiated as
    /// `exp(scores / tau)`. Smaller values sharpen the projection toward
    /// a vertex of the polytope.
    pub tau: f64,
    /// Iteration budget. For Dykstra this counts single alternating
    /// projections (row, column, row, ...); for Sinkhorn it counts full
    /// row+column sweeps.
    pub max_iter: usize,
    /// Early-stop threshold on the max-norm change between successive
    /// iterates.
    pub tol: f64,
}

impl Default for DykstraConfig {
    fn default() -> Self {
        DykstraConfig {
            tau: 3.0,
            max_iter: 20,
            tol: 1e-9,
        }
    }
}

/// KL projection of a nonnegative matrix onto the row family
/// `{ row sums in [1, k_max] }`: each row is rescaled by
/// `clamp(s, 1, k_max) / s` where `s` is its sum. Rows already inside
/// the band are untouched.
pub fn kl_project_rows(a: &Mat, k_max: usize) -> Result<Mat, AssignmentError> {
    project_rows(a, k_max).map(|(m, _, _)| m)
}

/// KL projection of a nonnegative matrix onto the column family
/// `{ column sums = 1 }`: each column is divided by its sum.
pub fn kl_project_cols(a: &Mat) -> Result<Mat, AssignmentError> {
    project_cols(a).map(|(m, _)| m)
}

/// Where each row sum fell relative to the clamp band; the projection's
/// derivative differs per region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Region {
    Below,
    Inside,
    Above,
}

fn project_rows(a: &Mat, k_max: usize) -> Result<(Mat, Vec<f64>, Vec<Region>), AssignmentError> {
    let sums = a.row_sums();
    let mut regions = Vec::with_capacity(sums.len());
    let mut out = a.clone();
    let hi = k_max as f64;
    for (i, &s) in sums.iter().enumerate() {
        if s < UNDERFLOW_FLOOR {
            return Err(AssignmentError::ZeroRow { row: i });
        }
        let (target, region) = if s <= 1.0 {
            (1.0, Region::Below)
        } else if s >= hi {
            (hi, Region::Above)
        } else {
            (s, Region::Inside)
        };
        if region != Region::Inside {
            let g = target / s;
            for v in out.row_mut(i) {
                *v *= g;
            }
        }
        regions.push(region);
    }
    Ok((out, sums, regions))
}

fn project_cols(a: &Mat) -> Result<(Mat, Vec<f64>), AssignmentError> {
    let sums = a.col_sums();
    for (j, &s) in sums.iter().enumerate() {
        if s < UNDERFLOW_FLOOR {
            return Err(AssignmentError::ZeroColumn { col: j });
        }
    }
    let mut out = a.clone();
    for i in 0..a.rows() {
        for (v, &s) in out.row_mut(i).iter_mut().zip(&sums) {
            *v /= s;
        }
    }
    Ok((out, sums))
}

/// Which constraint family a recorded projection hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum StepKind {
    Row,
    Col,
}

/// One recorded alternating-projection step.
pub(crate) struct TapeStep {
    pub(crate) kind: StepKind,
    /// Projection input: previous iterate times the consumed correction.
    pub(crate) a: Mat,
    /// The correction that was consumed (all ones for the first visit).
    pub(crate) q_old: Mat,
    /// Row or column sums of `a`, depending on `kind`.
    pub(crate) sums: Vec<f64>,
    /// Clamp regions (row steps only; empty for column steps).
    pub(crate) regions: Vec<Region>,
    /// Projection output.
    pub(crate) p_next: Mat,
}

/// Everything the reverse pass needs to differentiate a projection run:
/// the exponentiated start matrix, the position of the subtracted score
/// maximum, and each alternating step.
pub struct DykstraTape {
    pub(crate) tau: f64,
    pub(crate) k_max: usize,
    pub(crate) shift_pos: (usize, usize),
    pub(crate) x0: Mat,
    pub(crate) steps: Vec<TapeStep>,
}

/// Position of the first maximal entry in row-major order.
fn max_entry_position(m: &Mat) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..m.rows() {
        for (j, &v) in m.row(i).iter().enumerate() {
            if v > best_val {
                best_val = v;
                best = (i, j);
            }
        }
    }
    best
}

/// When the alternating projection may declare itself done.
#[derive(Clone, Copy, PartialEq)]
enum StopRule {
    /// Stop once two consecutive steps both move less than the tolerance
    /// (or the budget runs out). The truncated in-loop operator uses this:
    /// its output is allowed to sit slightly outside the polytope.
    Stall,
    /// Additionally require every row sum within `margin` of `[1, k_max]`
    /// before the stall exit fires, so a slowly-contracting instance
    /// cannot stop early with a row still outside the validation band.
    /// The iteration budget remains a hard cap either way.
    StallInBand { margin: f64 },
}

/// Row-sum check backing [`StopRule::StallInBand`].
fn rows_within(p: &Mat, k_max: usize, margin: f64) -> bool {
    p.row_sums()
        .iter()
        .all(|&s| s >= 1.0 - margin && s <= k_max as f64 + margin)
}

/// Core alternating-projection loop. When `trace` is set, every step is
/// recorded for the reverse pass.
fn dykstra_core(
    scores: &Mat,
    k_max: usize,
    cfg: &DykstraConfig,
    trace: bool,
    stop: StopRule,
) -> Result<(Mat, Option<DykstraTape>), AssignmentError> {
    let (rows, cols) = (scores.rows(), scores.cols());
    if !validate_kmax(rows, cols, k_max) {
        return Err(AssignmentError::InvalidKMax { rows, cols, k_max });
    }
    assert!(cfg.max_iter >= 1, "projection needs at least one iteration");
    assert!(cfg.tau > 0.0, "temperature must be positive");

    // Subtracting the global maximum leaves the projection unchanged (the
    // polytope fixes the total mass, so a constant score offset cancels)
    // but keeps every exponential in (0, 1].
    let shift_pos = max_entry_position(scores);
    let shift = scores[shift_pos];
    let x0 = scores.map(|v| float::exp((v - shift) / cfg.tau));

    let mut p = x0.clone();
    let mut q_row = Mat::filled(rows, cols, 1.0);
    let mut q_col = Mat::filled(rows, cols, 1.0);
    let mut steps: Vec<TapeStep> = Vec::new();

    let run_step = |p: &mut Mat,
                        q_row: &mut Mat,
                        q_col: &mut Mat,
                        steps: &mut Vec<TapeStep>,
                        kind: StepKind|
     -> Result<f64, AssignmentError> {
        let q = match kind {
            StepKind::Row => &mut *q_row,
            StepKind::Col => &mut *q_col,
        };
        let a = p.hadamard(q);
        let (p_next, sums, regions) = match kind {
            StepKind::Row => project_rows(&a, k_max)?,
            StepKind::Col => {
                let (m, sums) = project_cols(&a)?;
                (m, sums, Vec::new())
            }
        };
        if !p_next.all_finite() {
            return Err(AssignmentError::Overflow);
        }
        // Dykstra correction: remember how much the projection moved this
        // iterate, to be re-applied on the next visit to the same family.
        let q_new = Mat::from_fn(a.rows(), a.cols(), |i, j| {
            a[(i, j)] / p_next[(i, j)].max(UNDERFLOW_FLOOR)
        });
        if !q_new.all_finite() {
            return Err(AssignmentError::Overflow);
        }
        let diff = p_next.max_abs_diff(p);
        if trace {
            steps.push(TapeStep {
                kind,
                a,
                q_old: q.clone(),
                sums,
                regions,
                p_next: p_next.clone(),
            });
        }
        *q = q_new;
        *p = p_next;
        Ok(diff)
    };

    let mut t = 0;
    // A single step can be an exact no-op while the other constraint set is
    // still far from satisfied (a row pass leaves the iterate untouched
    // whenever every row sum already lies inside its band), so convergence is
    // declared only when two consecutive steps -- one of each kind -- both
    // stall below the tolerance.
    let mut prev_diff = f64::INFINITY;
    loop {
        let kind = if t % 2 == 0 { StepKind::Row } else { StepKind::Col };
        let diff = run_step(&mut p, &mut q_row, &mut q_col, &mut steps, kind)?;
        t += 1;
        let stalled = prev_diff.max(diff) < cfg.tol;
        let done = match stop {
            StopRule::Stall => stalled,
            // Only consider stopping right after a column projection, so
            // the band is checked on the matrix that would actually be
            // returned (column sums exact, no trailing step to disturb
            // the rows again).
            StopRule::StallInBand { margin } => {
                stalled && kind == StepKind::Col && rows_within(&p, k_max, margin)
            }
        };
        if done || t >= cfg.max_iter {
            // Always finish on a column projection so column sums are
            // exact in the returned matrix.
            if kind == StepKind::Row {
                run_step(&mut p, &mut q_row, &mut q_col, &mut steps, StepKind::Col)?;
            }
            break;
        }
        prev_diff = diff;
    }

    let tape = trace.then_some(DykstraTape {
        tau: cfg.tau,
        k_max,
        shift_pos,
        x0,
        steps,
    });
    Ok((p, tape))
}

/// Projects a score matrix into the assignment polytope by alternating
/// entropic projections with Dykstra corrections, and validates the
/// result.
pub fn dykstra_project(
    scores: &Mat,
    k_max: usize,
    cfg: &DykstraConfig,
) -> Result<SoftAssignment, AssignmentError> {
    let (p, _) = dykstra_core(
        scores,
        k_max,
        cfg,
        false,
        // Half the validation band: the stall exit may not fire while any
        // row sum could still fail [`SoftAssignment::new`].
        StopRule::StallInBand { margin: SUM_TOL / 2.0 },
    )?;
    SoftAssignment::new(p, k_max)
}

/// Like [`dykstra_project`] but also returns the step tape consumed by
/// the reverse pass, and leaves the raw matrix unvalidated (intermediate
/// optimizer iterates may sit slightly outside the polytope tolerances).
pub fn dykstra_project_traced(
    scores: &Mat,
    k_max: usize,
    cfg: &DykstraConfig,
) -> Result<(Mat, DykstraTape), AssignmentError> {
    let (p, tape) = dykstra_core(scores, k_max, cfg, true, StopRule::Stall)?;
    Ok((p, tape.expect("tape requested")))
}

/// Raw projection without validation or tape, for hot loss-only paths.
pub(crate) fn dykstra_project_raw(
    scores: &Mat,
    k_max: usize,
    cfg: &DykstraConfig,
) -> Result<Mat, AssignmentError> {
    dykstra_core(scores, k_max, cfg, false, StopRule::Stall).map(|(p, _)| p)
}

/// Sinkhorn scaling of a square score matrix onto the doubly stochastic
/// polytope: alternately normalize rows and columns of
/// `exp(scores / tau)` until the iterate settles.
///
/// This is the `k_max = 1` special case of [`dykstra_project`]: with both
/// families being pure normalizations, the Dykstra corrections cancel and
/// the classic two-sided scaling emerges. `cfg.max_iter` counts full
/// row+column sweeps here.
pub fn sinkhorn_project(scores: &Mat, cfg: &DykstraConfig) -> Result<SoftAssignment, AssignmentError> {
    let (rows, cols) = (scores.rows(), scores.cols());
    if rows != cols {
        return Err(AssignmentError::NotSquare { rows, cols });
    }
    assert!(cfg.max_iter >= 1, "projection needs at least one iteration");
    assert!(cfg.tau > 0.0, "temperature must be positive");

    let shift = scores[max_entry_position(scores)];
    let mut p = scores.map(|v| float::exp((v - shift) / cfg.tau));
    for (j, &s) in p.col_sums().iter().enumerate() {
        if s < UNDERFLOW_FLOOR {
            return Err(AssignmentError::ZeroColumn { col: j });
        }
    }
    for _ in 0..cfg.max_iter {
        // Row scaling by the left diagonal, then column scaling by the
        // right diagonal; after the pair, columns sum to exactly 1.
        let (row_scaled, _, _) = project_rows_to_one(&p)?;
        let (next, _) = project_cols(&row_scaled)?;
        if !next.all_finite() {
            return Err(AssignmentError::Overflow);
        }
        let diff = next.max_abs_diff(&p);
        p = next;
        if diff < cfg.tol {
            break;
        }
    }
    SoftAssignment::new(p, 1)
}

/// Row normalization to sum exactly 1 (the `k_max = 1` row projection).
fn project_rows_to_one(a: &Mat) -> Result<(Mat, Vec<f64>, Vec<Region>), AssignmentError> {
    project_rows(a, 1)
}

/// Greedy rounding of a soft assignment matrix to a binary member of the
/// polytope.
///
/// Columns are visited in descending order of their largest entry (ties
/// by column index) and assigned to their highest-valued row that still
/// has spare capacity (ties by row index). Any row left empty then steals
/// a column from the most-loaded owner, preferring the column it values
/// most.
///
/// The input only needs the right shape — it may sit outside the polytope
/// (e.g. a half-converged projection); the output always satisfies the
/// hard constraints when `rows * k_max >= cols`.
pub fn round_to_hard(p: &Mat, k_max: usize) -> Result<SoftAssignment, AssignmentError> {
    let (rows, cols) = (p.rows(), p.cols());
    if !validate_kmax(rows, cols, k_max) {
        return Err(AssignmentError::InvalidKMax { rows, cols, k_max });
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let col_max = |j: usize| (0..rows).fold(f64::NEG_INFINITY, |m, i| m.max(p[(i, j)]));
    order.sort_by(|&a, &b| {
        col_max(b)
            .partial_cmp(&col_max(a))
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut owner = vec![usize::MAX; cols];
    let mut count = vec![0usize; rows];
    for &j in &order {
        let mut best: Option<usize> = None;
        for i in 0..rows {
            if count[i] >= k_max {
                continue;
            }
            match best {
                Some(b) if p[(i, j)] <= p[(b, j)] => {}
                _ => best = Some(i),
            }
        }
        let i = best.ok_or(AssignmentError::Infeasible)?;
        owner[j] = i;
        count[i] += 1;
    }

    // Give every starved row one column, taken from the heaviest owner.
    for i in 0..rows {
        if count[i] > 0 {
            continue;
        }
        let heaviest = *count.iter().max().unwrap();
        debug_assert!(heaviest >= 2, "pigeonhole guarantees a donor with >= 2 columns");
        let mut steal: Option<usize> = None;
        for j in 0..cols {
            if count[owner[j]] != heaviest {
                continue;
            }
            match steal {
                Some(s) if p[(i, j)] <= p[(i, s)] => {}
                _ => steal = Some(j),
            }
        }
        let j = steal.ok_or(AssignmentError::Infeasible)?;
        count[owner[j]] -= 1;
        owner[j] = i;
        count[i] += 1;
    }

    let mut hard = Mat::zeros(rows, cols);
    for (j, &i) in owner.iter().enumerate() {
        hard[(i, j)] = 1.0;
    }
    SoftAssignment::new(hard, k_max)
}
