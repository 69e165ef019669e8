//! Randomized node embeddings.
//!
//! Both embeddings start from the same propagation scheme. Given a color
//! indicator `H` (n×k) and the adjacency `A` with spectral norm ‖A‖, the
//! level matrices are
//!
//! ```text
//! P₀ = H,    Pᵢ₊₁ = A·Pᵢ / ‖A‖
//! ```
//!
//! so row `v` of `Pᵢ` counts the color mass reachable from `v` in exactly
//! `i` hops, tamed by the norm so deep levels stay bounded. A node's
//! embedding stacks its rows from levels 0..=d into one vector of dimension
//! `k·(d+1)`, normalized to unit length.
//!
//! The two schemes differ in the colorings they draw and in one structural
//! step:
//!
//! * **CCB** colors contiguous node-index blocks (random cut points) and
//!   concatenates the level rows as they are. The embedding distribution is
//!   deliberately sensitive to node order.
//! * **CNP** colors nodes i.i.d. uniformly and, per node, sorts the k
//!   columns of its (d+1)×k level stack lexicographically before
//!   flattening. Sorting erases color identities, which makes the per-node
//!   embedding distribution invariant under graph isomorphism.
//!
//! [`sample_embeddings`] draws many colorings and embeds every node under
//! each, producing the per-node sample clouds the mixture stage consumes.
//! Each sample uses its own counter-derived RNG stream, so results are
//! identical whether samples are computed sequentially or in parallel, and
//! two graphs with the same node count see the same coloring sequence.

mod color;

pub use color::{sample_ccb_partition, sample_cnp_coloring, ColorMatrix};

use ndarray::{Array2, Array3, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Which embedding scheme to draw samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ccb,
    Cnp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ccb => "ccb",
            Method::Cnp => "cnp",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ccb" => Ok(Method::Ccb),
            "cnp" => Ok(Method::Cnp),
            other => Err(Error::Domain(format!("unknown embedding method '{other}'"))),
        }
    }
}

/// Parameters of the sampling stage.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EmbeddingConfig {
    pub method: Method,
    /// Number of colorings drawn (the per-node sample count).
    pub samples: usize,
    /// Number of colors k.
    pub colors: usize,
    /// Propagation depth d; the embedding dimension is k·(d+1).
    pub depth: usize,
    pub seed: u64,
}

impl EmbeddingConfig {
    pub fn new(
        method: Method,
        samples: usize,
        colors: usize,
        depth: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = EmbeddingConfig {
            method,
            samples,
            colors,
            depth,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The defaults used throughout: 1000 samples, 10 colors, depth 5.
    pub fn defaults(method: Method) -> Self {
        EmbeddingConfig {
            method,
            samples: 1000,
            colors: 10,
            depth: 5,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Domain(
                "need at least two samples to fit a covariance".into(),
            ));
        }
        if self.colors == 0 {
            return Err(Error::Domain("need at least one color".into()));
        }
        Ok(())
    }

    /// Embedding dimension k·(d+1).
    pub fn dim(&self) -> usize {
        self.colors * (self.depth + 1)
    }
}

/// Per-node embedding sample clouds: `data[v][i]` is the i-th sample of
/// node `v`, a unit vector of dimension k·(d+1).
#[derive(Debug, Clone)]
pub struct EmbeddingSamples {
    /// Shape (n, s, dim); each node's s×dim block is contiguous.
    pub data: Array3<f64>,
}

impl EmbeddingSamples {
    pub fn node_count(&self) -> usize {
        self.data.shape()[0]
    }

    pub fn sample_count(&self) -> usize {
        self.data.shape()[1]
    }

    pub fn dim(&self) -> usize {
        self.data.shape()[2]
    }

    /// The s×dim sample matrix of one node.
    pub fn node(&self, v: usize) -> ndarray::ArrayView2<'_, f64> {
        self.data.index_axis(Axis(0), v)
    }
}

/// Level matrices P₀..P_d for one coloring (see module docs).
fn propagate(g: &Graph, colors: &ColorMatrix, depth: usize) -> Vec<Array2<f64>> {
    let n = g.node_count();
    let k = colors.color_count();
    let norm = g.spectral_norm();
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(colors.to_dense());
    for _ in 0..depth {
        let mut next = Array2::zeros((n, k));
        g.mul_mat_into(levels.last().unwrap(), &mut next);
        next.mapv_inplace(|x| x / norm);
        levels.push(next);
    }
    levels
}

fn unit_normalize_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|x| x / norm);
        }
    }
}

fn check_coloring(g: &Graph, colors: &ColorMatrix) -> Result<()> {
    if colors.node_count() != g.node_count() {
        return Err(Error::Shape(format!(
            "coloring has {} nodes, graph has {}",
            colors.node_count(),
            g.node_count()
        )));
    }
    Ok(())
}

/// Order-aware embedding: concatenates each node's level rows 0..=d in
/// color order and normalizes. `colors` is typically a contiguous block
/// partition from [`sample_ccb_partition`].
pub fn ccb_embed(g: &Graph, colors: &ColorMatrix, depth: usize) -> Result<Array2<f64>> {
    check_coloring(g, colors)?;
    let (n, k) = (g.node_count(), colors.color_count());
    let levels = propagate(g, colors, depth);
    let mut out = Array2::zeros((n, k * (depth + 1)));
    for v in 0..n {
        for (i, level) in levels.iter().enumerate() {
            out.row_mut(v)
                .slice_mut(ndarray::s![i * k..(i + 1) * k])
                .assign(&level.row(v));
        }
    }
    unit_normalize_rows(&mut out);
    Ok(out)
}

/// Order-free embedding: per node, the k columns of the (d+1)×k level
/// stack are sorted lexicographically ascending (level-0 entry first, exact
/// float comparison, stable for ties) before flattening row-major and
/// normalizing. `colors` is typically an i.i.d. coloring from
/// [`sample_cnp_coloring`].
pub fn cnp_embed(g: &Graph, colors: &ColorMatrix, depth: usize) -> Result<Array2<f64>> {
    check_coloring(g, colors)?;
    let (n, k) = (g.node_count(), colors.color_count());
    let levels = propagate(g, colors, depth);
    let mut out = Array2::zeros((n, k * (depth + 1)));
    let mut order: Vec<usize> = Vec::with_capacity(k);
    for v in 0..n {
        order.clear();
        order.extend(0..k);
        // Stable sort: tied columns keep their original color order.
        order.sort_by(|&a, &b| {
            for level in &levels {
                match level[(v, a)].total_cmp(&level[(v, b)]) {
                    std::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            std::cmp::Ordering::Equal
        });
        let mut row = out.row_mut(v);
        for (i, level) in levels.iter().enumerate() {
            for (c, &col) in order.iter().enumerate() {
                row[i * k + c] = level[(v, col)];
            }
        }
    }
    unit_normalize_rows(&mut out);
    Ok(out)
}

/// RNG for one sample: derived from the user seed and the node count, with
/// the sample index as the ChaCha stream.
///
/// Keying on (seed, n) rather than on graph identity means two graphs with
/// the same node count are embedded under the *same* coloring sequence —
/// identical graphs then get identical sample clouds and zero distance —
/// while graphs of different sizes draw from unrelated streams.
fn sample_rng(seed: u64, n: usize, sample: usize) -> ChaCha8Rng {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(sample as u64);
    rng
}

/// Draws `cfg.samples` colorings and embeds every node under each.
///
/// Sample `i` is a pure function of `(cfg.seed, n, i)`, so the result is
/// reproducible and independent of evaluation order or thread count.
pub fn sample_embeddings(g: &Graph, cfg: &EmbeddingConfig) -> Result<EmbeddingSamples> {
    cfg.validate()?;
    let n = g.node_count();
    if cfg.method == Method::Ccb && cfg.colors > n {
        return Err(Error::Domain(format!(
            "CCB needs k ≤ n: {} colors but {} nodes",
            cfg.colors, n
        )));
    }
    g.spectral_norm(); // warm the cache outside the parallel region
    let mut data = Array3::zeros((n, cfg.samples, cfg.dim()));
    data.axis_iter_mut(Axis(1))
        .into_par_iter()
        .enumerate()
        .try_for_each(|(i, mut slot)| -> Result<()> {
            let mut rng = sample_rng(cfg.seed, n, i);
            let colors = match cfg.method {
                Method::Ccb => sample_ccb_partition(n, cfg.colors, &mut rng)?,
                Method::Cnp => sample_cnp_coloring(n, cfg.colors, &mut rng)?,
            };
            let emb = match cfg.method {
                Method::Ccb => ccb_embed(g, &colors, cfg.depth)?,
                Method::Cnp => cnp_embed(g, &colors, cfg.depth)?,
            };
            slot.assign(&emb);
            Ok(())
        })?;
    Ok(EmbeddingSamples { data })
}
