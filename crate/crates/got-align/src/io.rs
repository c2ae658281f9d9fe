//! Reading and writing graphs: a plain edge-list format for single
//! graphs, and the TU-collection convention (`<name>_A.txt` plus
//! indicator and label files) for classification datasets.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use got_core::graph::{Graph, GraphError};
use got_core::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Ways reading or writing can fail.
#[derive(Clone, Debug, PartialEq)]
pub enum IoError {
    /// The underlying filesystem operation failed.
    Io { path: PathBuf, message: String },
    /// A required file does not exist.
    MissingFile { path: PathBuf },
    /// A line could not be parsed (1-based line number).
    Parse { path: PathBuf, line: usize, message: String },
    /// A vertex index is outside `[0, n)`.
    IndexOutOfRange { path: PathBuf, line: usize, index: usize, n: usize },
    /// An edge joins vertices of two different graphs (1-based line
    /// number in the `_A.txt` file).
    InconsistentIndicator { line: usize, u: usize, v: usize },
    /// The parsed weights do not form a valid graph.
    Graph(GraphError),
    /// More graphs requested than the collection holds.
    SubsampleTooLarge { requested: usize, available: usize },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            IoError::MissingFile { path } => write!(f, "missing file {}", path.display()),
            IoError::Parse { path, line, message } => {
                write!(f, "{}:{line}: {message}", path.display())
            }
            IoError::IndexOutOfRange { path, line, index, n } => {
                write!(f, "{}:{line}: vertex {index} outside [0, {n})", path.display())
            }
            IoError::InconsistentIndicator { line, u, v } => {
                write!(f, "edge list line {line}: nodes {u} and {v} belong to different graphs")
            }
            IoError::Graph(e) => write!(f, "invalid graph: {e}"),
            IoError::SubsampleTooLarge { requested, available } => {
                write!(f, "cannot subsample {requested} of {available} graphs")
            }
        }
    }
}

impl std::error::Error for IoError {}

impl From<GraphError> for IoError {
    fn from(e: GraphError) -> Self {
        IoError::Graph(e)
    }
}

fn read_file(path: &Path) -> Result<String, IoError> {
    if !path.exists() {
        return Err(IoError::MissingFile { path: path.to_path_buf() });
    }
    fs::read_to_string(path)
        .map_err(|e| IoError::Io { path: path.to_path_buf(), message: e.to_string() })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents)
        .map_err(|e| IoError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Reads a graph from the edge-list format.
///
/// The first line must be `# n=<count>`; every other line is either blank,
/// a `#` comment, or an edge `u v w` with 0-based endpoints and a finite
/// nonnegative decimal weight.  Each undirected edge appears once (either
/// orientation); if a pair repeats, the last line wins.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, IoError> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let parse = |line: usize, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let n = match lines.next() {
        Some((_, first)) => {
            let rest = first
                .strip_prefix("# n=")
                .ok_or_else(|| parse(1, format!("expected '# n=<count>', got '{first}'")))?;
            rest.trim()
                .parse::<usize>()
                .map_err(|_| parse(1, format!("bad vertex count '{}'", rest.trim())))?
        }
        None => return Err(parse(1, "empty file".into())),
    };

    let mut weights = Mat::zeros(n, n);
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (u, v, w) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), Some(w), None) => (u, v, w),
            _ => return Err(parse(line_no, format!("expected 'u v w', got '{line}'"))),
        };
        let u: usize = u
            .parse()
            .map_err(|_| parse(line_no, format!("bad vertex index '{u}'")))?;
        let v: usize = v
            .parse()
            .map_err(|_| parse(line_no, format!("bad vertex index '{v}'")))?;
        let w: f64 = w
            .parse()
            .map_err(|_| parse(line_no, format!("bad weight '{w}'")))?;
        for &index in &[u, v] {
            if index >= n {
                return Err(IoError::IndexOutOfRange {
                    path: path.to_path_buf(),
                    line: line_no,
                    index,
                    n,
                });
            }
        }
        if !w.is_finite() {
            return Err(parse(line_no, format!("weight '{w}' is not finite")));
        }
        if u == v && w != 0.0 {
            return Err(parse(line_no, format!("self-loop at vertex {u}")));
        }
        weights[(u, v)] = w;
        weights[(v, u)] = w;
    }
    Ok(Graph::from_weights(weights)?)
}

/// Writes a graph in the edge-list format, with optional extra comment
/// lines (written as `# <line>`) after the vertex-count header.
pub fn write_edge_list_with_comments(
    g: &Graph,
    path: impl AsRef<Path>,
    comments: &[String],
) -> Result<(), IoError> {
    let mut out = format!("# n={}\n", g.n());
    for comment in comments {
        out.push_str("# ");
        out.push_str(comment);
        out.push('\n');
    }
    for (u, v, w) in g.edges() {
        out.push_str(&format!("{u} {v} {w}\n"));
    }
    write_file(path.as_ref(), &out)
}

/// Writes a graph in the edge-list format.
pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_edge_list_with_comments(g, path, &[])
}

/// A classification dataset: one class label per graph.
#[derive(Clone, Debug)]
pub struct GraphCollection {
    pub graphs: Vec<Graph>,
    pub labels: Vec<usize>,
    pub name: String,
}

impl GraphCollection {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// A random size-`m` subset, chosen by seeded partial shuffle; the
    /// selected graphs keep their original relative order.
    pub fn subsample(&self, m: usize, seed: u64) -> Result<GraphCollection, IoError> {
        if m > self.len() {
            return Err(IoError::SubsampleTooLarge { requested: m, available: self.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut indices: Vec<usize> = (0..self.len()).collect();
        for i in 0..m {
            let j = rng.gen_range(i..indices.len());
            indices.swap(i, j);
        }
        let mut chosen = indices[..m].to_vec();
        chosen.sort_unstable();
        Ok(GraphCollection {
            graphs: chosen.iter().map(|&i| self.graphs[i].clone()).collect(),
            labels: chosen.iter().map(|&i| self.labels[i]).collect(),
            name: self.name.clone(),
        })
    }
}

fn parse_int_lines(path: &Path) -> Result<Vec<i64>, IoError> {
    let text = read_file(path)?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v: i64 = line.parse().map_err(|_| IoError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("expected an integer, got '{line}'"),
        })?;
        values.push(v);
    }
    Ok(values)
}

/// Loads a dataset stored in the TU-collection convention.
///
/// `dir` must contain `<name>_A.txt` (comma-separated, 1-based global
/// node-id pairs, one edge per line), `<name>_graph_indicator.txt` (the
/// 1-based graph id of each global node), and `<name>_graph_labels.txt`
/// (one class per graph).  Edges get unit weight; duplicate and reversed
/// pairs collapse into one undirected edge; self-loops are dropped (the
/// alignment model has none).  Class labels are renumbered to contiguous
/// 0-based ids in ascending order of the raw values, and each graph also
/// carries its class as its graph label.
pub fn read_tu_collection(dir: impl AsRef<Path>, name: &str) -> Result<GraphCollection, IoError> {
    let dir = dir.as_ref();
    let a_path = dir.join(format!("{name}_A.txt"));
    let indicator_path = dir.join(format!("{name}_graph_indicator.txt"));
    let labels_path = dir.join(format!("{name}_graph_labels.txt"));

    let indicator = parse_int_lines(&indicator_path)?;
    let graph_count = indicator.iter().copied().max().unwrap_or(0);
    if graph_count < 1 {
        return Err(IoError::Parse {
            path: indicator_path.clone(),
            line: 1,
            message: "indicator lists no graphs".into(),
        });
    }
    let graph_count = graph_count as usize;
    // Global 1-based node id -> (graph index, local index).
    let mut node_home = Vec::with_capacity(indicator.len());
    let mut sizes = vec![0usize; graph_count];
    for (idx, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > graph_count {
            return Err(IoError::Parse {
                path: indicator_path.clone(),
                line: idx + 1,
                message: format!("graph id {gid} outside [1, {graph_count}]"),
            });
        }
        let graph = gid as usize - 1;
        node_home.push((graph, sizes[graph]));
        sizes[graph] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(IoError::Parse {
            path: indicator_path.clone(),
            line: 1,
            message: format!("graph {} has no vertices", empty + 1),
        });
    }

    let mut weight_mats: Vec<Mat> = sizes.iter().map(|&s| Mat::zeros(s, s)).collect();
    let a_text = read_file(&a_path)?;
    for (idx, raw) in a_text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parse = |message: String| IoError::Parse {
            path: a_path.to_path_buf(),
            line: line_no,
            message,
        };
        let mut parts = line.split(',');
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), None) => (u.trim(), v.trim()),
            _ => return Err(parse(format!("expected 'u, v', got '{line}'"))),
        };
        let u: usize = u.parse().map_err(|_| parse(format!("bad node id '{u}'")))?;
        let v: usize = v.parse().map_err(|_| parse(format!("bad node id '{v}'")))?;
        for &id in &[u, v] {
            if id < 1 || id > node_home.len() {
                return Err(IoError::IndexOutOfRange {
                    path: a_path.to_path_buf(),
                    line: line_no,
                    index: id,
                    n: node_home.len(),
                });
            }
        }
        if u == v {
            continue;
        }
        let (gu, lu) = node_home[u - 1];
        let (gv, lv) = node_home[v - 1];
        if gu != gv {
            return Err(IoError::InconsistentIndicator { line: line_no, u, v });
        }
        weight_mats[gu][(lu, lv)] = 1.0;
        weight_mats[gu][(lv, lu)] = 1.0;
    }

    let raw_labels = parse_int_lines(&labels_path)?;
    if raw_labels.len() != graph_count {
        return Err(IoError::Parse {
            path: labels_path.clone(),
            line: raw_labels.len().max(1),
            message: format!("{} labels for {graph_count} graphs", raw_labels.len()),
        });
    }
    let mut classes: Vec<i64> = raw_labels.clone();
    classes.sort_unstable();
    classes.dedup();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label is in its own class list"))
        .collect();

    let mut graphs = Vec::with_capacity(graph_count);
    for (mat, &label) in weight_mats.into_iter().zip(labels.iter()) {
        graphs.push(Graph::from_weights(mat)?.with_graph_label(label));
    }
    Ok(GraphCollection { graphs, labels, name: name.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use got_core::datagen::{generate_sbm, SbmSpec};

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn edge_list_round_trips_random_graphs_exactly() {
        let dir = tmp();
        for seed in 0..100 {
            let spec = SbmSpec::new(vec![3, 4], 0.8, 0.3, seed);
            let g = generate_sbm(&spec).unwrap();
            let path = dir.path().join(format!("g{seed}.txt"));
            write_edge_list(&g, &path).unwrap();
            let back = read_edge_list(&path).unwrap();
            assert_eq!(back.weights(), g.weights(), "seed {seed}");
        }
    }

    #[test]
    fn fractional_weights_round_trip_bit_exactly() {
        let dir = tmp();
        let g = Graph::from_edges(
            3,
            &[(0, 1, 0.1 + 0.2), (1, 2, 1.5e-17), (0, 2, 12345.678901234567)],
        )
        .unwrap();
        let path = dir.path().join("frac.txt");
        write_edge_list(&g, &path).unwrap();
        let back = read_edge_list(&path).unwrap();
        assert_eq!(back.weights(), g.weights());
    }

    #[test]
    fn a_two_node_edge_parses() {
        let dir = tmp();
        let path = dir.path().join("pair.txt");
        write_file(&path, "# n=2\n0 1 1.5\n").unwrap();
        let g = read_edge_list(&path).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weights()[(0, 1)], 1.5);
        assert_eq!(g.weights()[(1, 0)], 1.5);
    }

    #[test]
    fn comment_lines_after_the_header_are_ignored() {
        let dir = tmp();
        let path = dir.path().join("c.txt");
        write_file(&path, "# n=2\n# generated by a tool\n\n0 1 2\n").unwrap();
        assert_eq!(read_edge_list(&path).unwrap().weights()[(0, 1)], 2.0);
    }

    #[test]
    fn malformed_lines_name_their_line_number() {
        let dir = tmp();
        let path = dir.path().join("bad.txt");
        write_file(&path, "# n=2\n0 x 1\n").unwrap();
        match read_edge_list(&path).unwrap_err() {
            IoError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }

        write_file(&path, "# n=2\n0 1 nan\n").unwrap();
        assert!(matches!(read_edge_list(&path).unwrap_err(), IoError::Parse { line: 2, .. }));

        write_file(&path, "# n=2\n0 5 1.0\n").unwrap();
        assert!(matches!(
            read_edge_list(&path).unwrap_err(),
            IoError::IndexOutOfRange { line: 2, index: 5, n: 2, .. }
        ));

        write_file(&path, "0 1 1.0\n").unwrap();
        assert!(matches!(read_edge_list(&path).unwrap_err(), IoError::Parse { line: 1, .. }));
    }

    #[test]
    fn missing_files_are_reported_as_such() {
        let dir = tmp();
        assert!(matches!(
            read_edge_list(dir.path().join("absent.txt")).unwrap_err(),
            IoError::MissingFile { .. }
        ));
        assert!(matches!(
            read_tu_collection(dir.path(), "NOPE").unwrap_err(),
            IoError::MissingFile { .. }
        ));
    }

    fn write_tu(
        dir: &Path,
        name: &str,
        a: &str,
        indicator: &str,
        labels: &str,
    ) {
        write_file(&dir.join(format!("{name}_A.txt")), a).unwrap();
        write_file(&dir.join(format!("{name}_graph_indicator.txt")), indicator).unwrap();
        write_file(&dir.join(format!("{name}_graph_labels.txt")), labels).unwrap();
    }

    #[test]
    fn minimal_collection_loads_an_edge_and_a_triangle() {
        let dir = tmp();
        write_tu(
            dir.path(),
            "MINI",
            "1, 2\n2, 1\n3, 4\n4, 5\n5, 3\n",
            "1\n1\n2\n2\n2\n",
            "-1\n1\n",
        );
        let c = read_tu_collection(dir.path(), "MINI").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.name, "MINI");
        assert_eq!(c.graphs[0].n(), 2);
        assert_eq!(c.graphs[1].n(), 3);
        assert_eq!(c.labels, vec![0, 1]);
        assert_eq!(c.graphs[0].graph_label(), Some(0));
        assert_eq!(c.graphs[1].graph_label(), Some(1));
        // The duplicate (1,2)/(2,1) lines collapse to one unit edge.
        assert_eq!(c.graphs[0].weights()[(0, 1)], 1.0);
        // The triangle is complete.
        assert_eq!(c.graphs[1].edges().len(), 3);
    }

    #[test]
    fn edges_spanning_two_graphs_are_rejected() {
        let dir = tmp();
        write_tu(dir.path(), "SPAN", "1, 2\n2, 3\n", "1\n1\n2\n", "0\n1\n");
        assert_eq!(
            read_tu_collection(dir.path(), "SPAN").unwrap_err(),
            IoError::InconsistentIndicator { line: 2, u: 2, v: 3 }
        );
    }

    #[test]
    fn self_loops_in_tu_data_are_dropped() {
        let dir = tmp();
        write_tu(dir.path(), "LOOP", "1, 1\n1, 2\n", "1\n1\n", "0\n");
        let c = read_tu_collection(dir.path(), "LOOP").unwrap();
        assert_eq!(c.graphs[0].weights()[(0, 0)], 0.0);
        assert_eq!(c.graphs[0].weights()[(0, 1)], 1.0);
    }

    #[test]
    fn subsample_is_seeded_and_bounded() {
        let dir = tmp();
        write_tu(
            dir.path(),
            "SUB",
            "1, 2\n3, 4\n5, 6\n7, 8\n",
            "1\n1\n2\n2\n3\n3\n4\n4\n",
            "0\n1\n0\n1\n",
        );
        let c = read_tu_collection(dir.path(), "SUB").unwrap();
        let a = c.subsample(2, 9).unwrap();
        let b = c.subsample(2, 9).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.len(), 2);
        assert!(matches!(
            c.subsample(5, 0).unwrap_err(),
            IoError::SubsampleTooLarge { requested: 5, available: 4 }
        ));
    }
}
