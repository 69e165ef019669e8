//! Undirected weighted graphs and the operations the embedding pipeline
//! needs from them: construction from edge data or dense matrices, node
//! relabeling, sparse matrix-vector products and a cached spectral norm.
//!
//! Graphs are simple in structure (one entry per unordered node pair) but
//! may carry self-loops and arbitrary positive weights. The adjacency is
//! stored as sorted per-node neighbor lists, which keeps multiplication by
//! the adjacency matrix at O(|E|) and avoids materializing dense n×n
//! matrices for sparse inputs.

mod generate;
mod io;
mod spectral;

pub use generate::{generate, GeneratorSpec, Model};
pub use io::{load_dense_matrix, load_edge_list, read_graph, write_edge_list, GraphFormat};
pub use spectral::{dominant_eigenvector, matrix_norm};

use std::sync::OnceLock;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Undirected weighted graph with nodes `0..n`.
///
/// Symmetry is enforced by construction: an edge `{u, v}` is stored in both
/// `u`'s and `v`'s neighbor lists (once, in `v`'s, when `u == v`), so the
/// dense adjacency is always symmetric and non-negative.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    /// Per-node `(neighbor, weight)` lists, sorted by neighbor id.
    adj: Vec<Vec<(usize, f64)>>,
    /// Undirected edge count, self-loops included.
    edges: usize,
    /// Lazily computed spectral norm (see [`matrix_norm`]).
    norm: OnceLock<f64>,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("graph must have at least one node".into()));
        }
        Ok(Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: 0,
            norm: OnceLock::new(),
        })
    }

    /// Builds a graph from 0-based `(u, v, w)` triples.
    ///
    /// Edges are undirected: `(u, v, w)` and `(v, u, w)` describe the same
    /// edge. A pair listed more than once keeps the last weight seen.
    /// Weights must be finite and strictly positive.
    pub fn from_weighted_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Domain(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            map.insert((u.min(v), u.max(v)), w);
        }
        let mut g = Graph::empty(n)?;
        for (&(u, v), &w) in &map {
            g.adj[u].push((v, w));
            if u != v {
                g.adj[v].push((u, w));
            }
        }
        for list in &mut g.adj {
            list.sort_unstable_by_key(|&(u, _)| u);
        }
        g.edges = map.len();
        Ok(g)
    }

    /// Builds a graph from a dense adjacency matrix.
    ///
    /// The matrix must be square, symmetric and non-negative; strictly
    /// positive entries become edges (diagonal entries become self-loops).
    pub fn from_dense(m: &Array2<f64>) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::Shape(format!("adjacency matrix is {r}×{c}")));
        }
        let mut edges = Vec::new();
        for u in 0..r {
            for v in u..r {
                let w = m[(u, v)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Domain(format!(
                        "adjacency entry ({u}, {v}) = {w} is negative or non-finite"
                    )));
                }
                if (m[(v, u)] - w).abs() > 0.0 {
                    return Err(Error::Domain(format!(
                        "adjacency matrix is not symmetric at ({u}, {v})"
                    )));
                }
                if w > 0.0 {
                    edges.push((u, v, w));
                }
            }
        }
        Graph::from_weighted_edges(r, edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// `(neighbor, weight)` list of `v`, sorted by neighbor id. A self-loop
    /// appears once, as `(v, w)`.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Weight of edge `{u, v}`, or 0 when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .map(|i| self.adj[u][i].1)
            .unwrap_or(0.0)
    }

    /// Row sum of the adjacency matrix at `v` (self-loop counted once).
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum()
    }

    /// All edges as 0-based `(u, v, w)` with `u <= v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edges);
        for u in 0..self.n {
            for &(v, w) in &self.adj[u] {
                if v >= u {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Dense adjacency matrix copy.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.n, self.n));
        for u in 0..self.n {
            for &(v, w) in &self.adj[u] {
                m[(u, v)] = w;
            }
        }
        m
    }

    /// Spectral norm of the adjacency matrix, computed once per graph and
    /// cached. See [`matrix_norm`] for the algorithm and conventions.
    pub fn spectral_norm(&self) -> f64 {
        *self.norm.get_or_init(|| spectral::power_norm(self))
    }

    /// `y = A·x` using the sparse neighbor lists.
    pub(crate) fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (v, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(u, w) in &self.adj[v] {
                acc += w * x[u];
            }
            *out = acc;
        }
    }

    /// `out = A·p` for a row-major n×k matrix, using the neighbor lists.
    pub(crate) fn mul_mat_into(&self, p: &Array2<f64>, out: &mut Array2<f64>) {
        let k = p.ncols();
        debug_assert_eq!(p.nrows(), self.n);
        debug_assert_eq!(out.dim(), p.dim());
        let ps = p.as_slice().expect("propagation buffers are standard layout");
        let os = out
            .as_slice_mut()
            .expect("propagation buffers are standard layout");
        os.fill(0.0);
        for v in 0..self.n {
            let row = &mut os[v * k..(v + 1) * k];
            for &(u, w) in &self.adj[v] {
                let src = &ps[u * k..(u + 1) * k];
                for (o, s) in row.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
    }
}

/// Relabels nodes: node `u` of `g` becomes node `perm[u]` of the result, so
/// the new adjacency is `A'[perm[u]][perm[v]] = A[u][v]`.
///
/// `perm` must be a permutation of `0..n`.
pub fn permute(g: &Graph, perm: &[usize]) -> Result<Graph> {
    let n = g.node_count();
    if perm.len() != n {
        return Err(Error::Shape(format!(
            "permutation has length {} for {n} nodes",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Domain(
                "permutation is not a bijection over the node set".into(),
            ));
        }
        seen[p] = true;
    }
    let edges = g
        .edges()
        .into_iter()
        .map(|(u, v, w)| (perm[u], perm[v], w));
    Graph::from_weighted_edges(n, edges)
}
