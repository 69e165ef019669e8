//! Random node colorings: the source of randomness behind the embeddings.
//!
//! A coloring assigns each of `n` nodes one of `k` colors; as a matrix it
//! is the n×k row-indicator `H` with `H[v][c] = 1` iff node `v` has color
//! `c`. Two samplers are provided: contiguous blocks (for the order-aware
//! embedding) and i.i.d. uniform colors (for the order-free one).

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};

/// A color assignment for `n` nodes over `k` colors, stored compactly as
/// one color index per node rather than the dense indicator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMatrix {
    assignments: Vec<usize>,
    colors: usize,
}

impl ColorMatrix {
    pub fn new(assignments: Vec<usize>, colors: usize) -> Result<Self> {
        if assignments.is_empty() || colors == 0 {
            return Err(Error::Domain(
                "coloring needs at least one node and one color".into(),
            ));
        }
        if let Some(&bad) = assignments.iter().find(|&&c| c >= colors) {
            return Err(Error::Domain(format!(
                "color {bad} out of range for {colors} colors"
            )));
        }
        Ok(ColorMatrix {
            assignments,
            colors,
        })
    }

    pub fn node_count(&self) -> usize {
        self.assignments.len()
    }

    pub fn color_count(&self) -> usize {
        self.colors
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Dense n×k indicator matrix; every row sums to exactly 1.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut h = Array2::zeros((self.node_count(), self.colors));
        for (v, &c) in self.assignments.iter().enumerate() {
            h[(v, c)] = 1.0;
        }
        h
    }
}

/// Samples a contiguous block partition: k−1 distinct cut points drawn
/// uniformly without replacement from the n−1 gaps between consecutive
/// nodes split `0..n` into k non-empty blocks, one color per block.
///
/// Requires `k ≤ n`. With `k = n` the only possible partition is the
/// identity (every node its own color).
pub fn sample_ccb_partition(
    n: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<ColorMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("partition needs n ≥ 1 and k ≥ 1".into()));
    }
    if k > n {
        return Err(Error::Domain(format!(
            "cannot split {n} nodes into {k} non-empty blocks"
        )));
    }
    // Cut points live in {1, .., n−1}; cut c separates node c−1 from node c.
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, k - 1)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    cuts.sort_unstable();
    let mut assignments = Vec::with_capacity(n);
    let mut color = 0;
    for v in 0..n {
        while color < cuts.len() && cuts[color] <= v {
            color += 1;
        }
        assignments.push(color);
    }
    ColorMatrix::new(assignments, k)
}

/// Samples i.i.d. uniform colors: each node independently gets one of the
/// `k` colors with probability 1/k.
pub fn sample_cnp_coloring(
    n: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<ColorMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("coloring needs n ≥ 1 and k ≥ 1".into()));
    }
    let assignments = (0..n).map(|_| rng.gen_range(0..k)).collect();
    ColorMatrix::new(assignments, k)
}
