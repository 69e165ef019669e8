//! Graph ingestion: whitespace-separated edge lists and dense CSV
//! adjacency/correlation matrices, plus the edge-list writer used when
//! emitting generated datasets.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::Array2;

use super::Graph;
use crate::error::{Error, Result};

/// On-disk graph representations understood by [`read_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `u v [w]` per line, 1-based ids, `#` comments, weight defaults to 1.
    EdgeList,
    /// Dense numeric CSV without header; symmetrized and clamped on load.
    DenseCsv,
    /// Pick by file extension: `.csv` is dense, anything else an edge list.
    Auto,
}

/// Reads a graph from `path`, dispatching on `format`.
pub fn read_graph(path: &Path, format: GraphFormat) -> Result<Graph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let label = path.display().to_string();
    let dense = match format {
        GraphFormat::EdgeList => false,
        GraphFormat::DenseCsv => true,
        GraphFormat::Auto => path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv")),
    };
    if dense {
        load_dense_matrix(reader, &label)
    } else {
        load_edge_list(reader, &label)
    }
}

/// Parses a whitespace-separated edge list.
///
/// Each non-empty line is `u v` or `u v w` with 1-based node ids; text from
/// `#` to the end of the line is a comment. The weight defaults to 1 and
/// must be finite and strictly positive. Node count is the largest id seen,
/// or larger if a `# N nodes` comment declares trailing isolated nodes.
/// Repeated pairs (in either orientation) keep the last weight. An input
/// with no edges and no node-count comment is an error, since the node
/// count would be undefined.
pub fn load_edge_list(reader: impl BufRead, source: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let (text, comment) = match line.split_once('#') {
            Some((t, c)) => (t, c),
            None => (line.as_str(), ""),
        };
        // A comment of the form `# N nodes ...` (as written by
        // [`write_edge_list`]) declares the node count, so graphs whose
        // highest-numbered nodes are isolated survive a round trip.
        let mut declared = comment.split_whitespace();
        if let (Some(count), Some(word)) = (declared.next(), declared.next()) {
            if word.trim_end_matches(',') == "nodes" {
                if let Ok(count) = count.parse::<usize>() {
                    n = n.max(count);
                }
            }
        }
        let mut tokens = text.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            if text.split_whitespace().next().is_some() {
                return Err(parse(source, lineno, "expected 'u v' or 'u v w'"));
            }
            continue; // blank or comment-only line
        };
        let w = tokens.next();
        if tokens.next().is_some() {
            return Err(parse(source, lineno, "too many fields"));
        }
        let u: usize = a
            .parse()
            .map_err(|_| parse(source, lineno, &format!("bad node id '{a}'")))?;
        let v: usize = b
            .parse()
            .map_err(|_| parse(source, lineno, &format!("bad node id '{b}'")))?;
        if u == 0 || v == 0 {
            return Err(parse(source, lineno, "node ids are 1-based"));
        }
        let w: f64 = match w {
            None => 1.0,
            Some(t) => t
                .parse()
                .map_err(|_| parse(source, lineno, &format!("bad weight '{t}'")))?,
        };
        if !w.is_finite() || w <= 0.0 {
            return Err(parse(
                source,
                lineno,
                &format!("weight must be finite and positive, got {w}"),
            ));
        }
        n = n.max(u).max(v);
        edges.push((u - 1, v - 1, w));
    }
    if edges.is_empty() && n == 0 {
        return Err(Error::Domain(format!(
            "{source}: edge list contains no edges and no node-count comment"
        )));
    }
    Graph::from_weighted_edges(n, edges)
}

/// Parses a dense adjacency (or correlation) matrix from headerless CSV.
///
/// The matrix must be square with finite entries. It is symmetrized as
/// `(M + Mᵀ)/2` — the diagonal is therefore kept as read — and negative
/// entries are then clamped to 0, so correlation matrices load directly.
pub fn load_dense_matrix(reader: impl BufRead, source: &str) -> Result<Graph> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    for (r, record) in csv.records().enumerate() {
        let record = record.map_err(|e| parse(source, r + 1, &e.to_string()))?;
        let mut row = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let x: f64 = field.trim().parse().map_err(|_| {
                parse(source, r + 1, &format!("bad number '{field}' in column {}", c + 1))
            })?;
            if !x.is_finite() {
                return Err(Error::Domain(format!(
                    "{source}: non-finite entry at row {}, column {}",
                    r + 1,
                    c + 1
                )));
            }
            row.push(x);
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Domain(format!("{source}: matrix is empty")));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!(
            "{source}: matrix is not square ({n} rows, ragged or mismatched columns)"
        )));
    }
    let mut m = Array2::zeros((n, n));
    for u in 0..n {
        for v in 0..n {
            let sym = 0.5 * (rows[u][v] + rows[v][u]);
            m[(u, v)] = sym.max(0.0);
        }
    }
    Graph::from_dense(&m)
}

/// Writes `g` in the edge-list format read by [`load_edge_list`]: one
/// `u v w` line per edge with 1-based ids, sorted, shortest-roundtrip float
/// weights. Output is byte-stable for a given graph.
pub fn write_edge_list(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# {} nodes, {} edges", g.node_count(), g.edge_count())?;
    for (u, v, w) in g.edges() {
        writeln!(out, "{} {} {}", u + 1, v + 1, w)?;
    }
    Ok(())
}

fn parse(source: &str, line: usize, msg: &str) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        msg: msg.to_string(),
    }
}
