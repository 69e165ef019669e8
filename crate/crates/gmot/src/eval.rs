//! Dataset-level evaluation: pairwise distance matrices, two cheap
//! structural baselines, weighted kNN cross-validation, silhouette
//! scoring, and hierarchical leaf ordering for heatmaps.
//!
//! The entry point is [`pairwise_distances`], which turns a list of graphs
//! into a [`DistanceMatrix`] (symmetric, zero diagonal, per-pair wall-clock
//! recorded). The matrix then feeds the label-aware evaluators: [`knn_cv`]
//! produces an [`EvalReport`], [`silhouette`] measures cluster density and
//! [`hierarchical_order`] emits the dendrogram leaf order used to sort
//! heatmap rows.
//!
//! Distances here are metrics, not squared objectives: mixture methods
//! report √(transport cost), the baselines report Euclidean distances.

use std::io::{BufRead, Write};
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{sample_embeddings, EmbeddingConfig, Method};
use crate::error::{Error, Result};
use crate::gmm::{fit_mixture, GaussianMixture, DEFAULT_RIDGE};
use crate::graph::{dominant_eigenvector, Graph};
use crate::ot::{mixture_w2, Variant};

/// Floor applied to distances before inverting them into kNN weights, so a
/// zero-distance neighbor gets overwhelming (but finite) weight.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Symmetry and zero-diagonal tolerance for a valid [`DistanceMatrix`].
const MATRIX_TOL: f64 = 1e-9;

/// How pairwise distances over a dataset are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalMethod {
    /// Randomized-embedding mixtures compared by optimal transport.
    Mixture { method: Method, variant: Variant },
    /// Euclidean distance between coarse degree-count histograms.
    Degree,
    /// Euclidean distance between sorted dominant eigenvectors.
    Ev,
}

impl EvalMethod {
    /// Canonical name, e.g. `ccb-tied`, `degree`, `ev`.
    pub fn name(&self) -> String {
        match self {
            EvalMethod::Mixture { method, variant } => format!("{method}-{variant}"),
            EvalMethod::Degree => "degree".into(),
            EvalMethod::Ev => "ev".into(),
        }
    }

    /// Builds a method from the CLI's `--method` and `--variant` flags.
    pub fn from_flags(method: &str, variant: Variant) -> Result<Self> {
        match method.to_ascii_lowercase().as_str() {
            "degree" => Ok(EvalMethod::Degree),
            "ev" => Ok(EvalMethod::Ev),
            other => Ok(EvalMethod::Mixture {
                method: other.parse()?,
                variant,
            }),
        }
    }
}

impl std::fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

/// Provenance for a computed distance matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceMeta {
    /// Method name as produced by [`EvalMethod::name`].
    pub method: String,
    /// Embedding configuration; absent for the structural baselines.
    pub config: Option<EmbeddingConfig>,
    /// Input file names in row order, when known.
    pub files: Vec<String>,
    /// Wall-clock milliseconds per pair, upper triangle in row-major
    /// (i, j) order with i < j.
    pub pair_ms: Vec<f64>,
    /// Mean of `pair_ms`.
    pub mean_pair_ms: f64,
}

/// Pairwise distances over a dataset of N graphs with class labels.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    /// N×N symmetric non-negative matrix with zero diagonal.
    pub d: Array2<f64>,
    /// One class label per graph; may be empty strings when unlabeled.
    pub labels: Vec<String>,
    pub meta: DistanceMeta,
}

impl DistanceMatrix {
    /// Checks squareness, label count, symmetry and zero diagonal
    /// (both within 1e−9), and that entries are finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.d.dim();
        if r != c {
            return Err(Error::Shape(format!("distance matrix is {r}×{c}")));
        }
        if self.labels.len() != r {
            return Err(Error::Shape(format!(
                "{} labels for a {r}×{r} matrix",
                self.labels.len()
            )));
        }
        for i in 0..r {
            if self.d[(i, i)].abs() > MATRIX_TOL {
                return Err(Error::Domain(format!(
                    "diagonal entry ({i},{i}) = {} is not zero",
                    self.d[(i, i)]
                )));
            }
            for j in 0..r {
                let v = self.d[(i, j)];
                if !v.is_finite() || v < -MATRIX_TOL {
                    return Err(Error::Domain(format!(
                        "distance ({i},{j}) = {v} is not a valid distance"
                    )));
                }
                if (v - self.d[(j, i)]).abs() > MATRIX_TOL {
                    return Err(Error::Domain(format!(
                        "asymmetry at ({i},{j}): {v} vs {}",
                        self.d[(j, i)]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }
}

/// Cross-validation and clustering summary for one distance matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    /// Mean weighted-kNN accuracy over folds, in [0, 1].
    pub knn_mean: f64,
    /// Population standard deviation of the fold accuracies.
    pub knn_std: f64,
    pub knn_k: usize,
    pub folds: usize,
    pub test_frac: f64,
    pub seed: u64,
    /// Seeds of splits that were discarded because some class had no
    /// training member; each discarded split was retried with the next seed.
    pub regenerated_fold_seeds: Vec<u64>,
    /// Mean silhouette score over all points, in [−1, 1].
    pub silhouette: f64,
    /// Classes with a single member; their points score 0 by convention.
    pub singleton_classes: Vec<String>,
    /// Mean per-pair distance time in milliseconds.
    pub time_ms: f64,
}

/// Computes all N(N−1)/2 pairwise distances over `graphs`.
///
/// Mixture methods embed and fit every graph once, then compare mixtures
/// pairwise (each pair computed exactly once; the matrix is symmetric by
/// construction). Wall-clock time is recorded around each pair comparison —
/// the per-graph embedding/fitting stage is amortized and excluded. The
/// structural baselines ignore `cfg`. Pairs are evaluated in parallel.
pub fn pairwise_distances(
    graphs: &[Graph],
    labels: &[String],
    method: EvalMethod,
    cfg: &EmbeddingConfig,
) -> Result<DistanceMatrix> {
    let n = graphs.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "need at least two graphs to compare, got {n}"
        )));
    }
    if labels.len() != n {
        return Err(Error::Shape(format!(
            "{} labels for {n} graphs",
            labels.len()
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();

    enum Prepared {
        Mixtures(Vec<GaussianMixture>, Variant),
        Degrees(Vec<Vec<f64>>),
        Eigen(Vec<Vec<f64>>),
    }

    let (prepared, config) = match method {
        EvalMethod::Mixture {
            method: embed_method,
            variant,
        } => {
            // The embedding method named in `method` wins over whatever the
            // config carries, so one config can drive several methods.
            let cfg = EmbeddingConfig {
                method: embed_method,
                ..*cfg
            };
            cfg.validate()?;
            let mixtures = graphs
                .par_iter()
                .map(|g| fit_mixture(&sample_embeddings(g, &cfg)?, DEFAULT_RIDGE))
                .collect::<Result<Vec<_>>>()?;
            (Prepared::Mixtures(mixtures, variant), Some(cfg))
        }
        EvalMethod::Degree => (
            Prepared::Degrees(graphs.iter().map(degree_histogram).collect()),
            None,
        ),
        EvalMethod::Ev => (
            Prepared::Eigen(graphs.iter().map(ev_profile).collect()),
            None,
        ),
    };

    let results: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(f64, f64)> {
            let start = Instant::now();
            let dist = match &prepared {
                Prepared::Mixtures(mixtures, variant) => {
                    let (cost, _) = mixture_w2(&mixtures[i], &mixtures[j], *variant)?;
                    cost.max(0.0).sqrt()
                }
                Prepared::Degrees(hists) => padded_euclidean(&hists[i], &hists[j]),
                Prepared::Eigen(profiles) => padded_euclidean(&profiles[i], &profiles[j]),
            };
            Ok((dist, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut d = Array2::zeros((n, n));
    let mut pair_ms = Vec::with_capacity(pairs.len());
    for (&(i, j), &(dist, ms)) in pairs.iter().zip(&results) {
        d[(i, j)] = dist;
        d[(j, i)] = dist;
        pair_ms.push(ms);
    }
    let mean_pair_ms = pair_ms.iter().sum::<f64>() / pair_ms.len() as f64;
    let dm = DistanceMatrix {
        d,
        labels: labels.to_vec(),
        meta: DistanceMeta {
            method: method.name(),
            config,
            files: Vec::new(),
            pair_ms,
            mean_pair_ms,
        },
    };
    dm.validate()?;
    Ok(dm)
}

/// Number of equal-width slices in the degree histogram.
pub const DEGREE_BINS: usize = 5;

/// Coarse degree histogram: node counts over [`DEGREE_BINS`] equal-width
/// slices of the graph's possible degree range [0, n−1].
///
/// The counts are kept raw (they sum to n) and the bins scale with the
/// graph's own size, so comparisons between graphs are dominated by how
/// many nodes they have rather than by the shape of their degree
/// distributions. That is intentional: this baseline is the weak control
/// of the evaluation harness, expected to score near chance on datasets
/// whose classes are all drawn at the same size range and density.
pub fn degree_histogram(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let width = (n.saturating_sub(1)) as f64 / DEGREE_BINS as f64;
    let mut hist = vec![0.0; DEGREE_BINS];
    for v in 0..n {
        let d = g.weighted_degree(v);
        let bin = if width > 0.0 {
            ((d / width) as usize).min(DEGREE_BINS - 1)
        } else {
            0
        };
        hist[bin] += 1.0;
    }
    hist
}

/// Euclidean distance between coarse degree histograms.
pub fn baseline_degree(g1: &Graph, g2: &Graph) -> f64 {
    padded_euclidean(&degree_histogram(g1), &degree_histogram(g2))
}

/// Dominant eigenvector with the largest-magnitude entry made positive and
/// entries sorted descending — a node-order-invariant spectral signature.
pub fn ev_profile(g: &Graph) -> Vec<f64> {
    let mut v = dominant_eigenvector(g);
    let lead = v
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if v[lead] < 0.0 {
        for x in &mut v {
            *x = -*x;
        }
    }
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Euclidean distance between sorted dominant eigenvectors, the shorter
/// one zero-padded.
pub fn baseline_ev(g1: &Graph, g2: &Graph) -> f64 {
    padded_euclidean(&ev_profile(g1), &ev_profile(g2))
}

fn padded_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0.0);
            let y = b.get(i).copied().unwrap_or(0.0);
            (x - y) * (x - y)
        })
        .sum::<f64>()
        .sqrt()
}

/// Weighted kNN cross-validation over a precomputed distance matrix.
///
/// Runs `folds` stratified splits (per class, `test_frac` of the members
/// rounded, at least one test point and at least one training point per
/// class with two or more members; singleton classes stay in training).
/// Each test point is classified by its `k` nearest training points
/// weighted by 1/max(distance, 1e−12). If a split leaves some class without
/// training members it is discarded and retried with the next seed; the
/// discarded seeds appear in the report. The result also carries the
/// silhouette score and the matrix's mean per-pair time, making it a full
/// evaluation summary. Deterministic given (matrix, labels, seed).
pub fn knn_cv(
    dm: &DistanceMatrix,
    k: usize,
    folds: usize,
    test_frac: f64,
    seed: u64,
) -> Result<EvalReport> {
    dm.validate()?;
    if k < 1 {
        return Err(Error::Domain("kNN needs k ≥ 1".into()));
    }
    if folds < 2 {
        return Err(Error::Domain(format!(
            "cross-validation needs at least 2 folds, got {folds}"
        )));
    }
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::Domain(format!(
            "test fraction must lie strictly between 0 and 1, got {test_frac}"
        )));
    }
    let classes = class_index(&dm.labels);
    let by_class: Vec<Vec<usize>> = classes
        .names
        .iter()
        .enumerate()
        .map(|(c, _)| {
            (0..dm.len())
                .filter(|&i| classes.of_point[i] == c)
                .collect()
        })
        .collect();

    let mut accuracies = Vec::with_capacity(folds);
    let mut regenerated = Vec::new();
    let mut next_seed = seed;
    while accuracies.len() < folds {
        let split_seed = next_seed;
        next_seed = next_seed.wrapping_add(1);
        let (train, test) = stratified_split(&by_class, test_frac, split_seed);
        let covered = by_class
            .iter()
            .all(|members| members.iter().any(|i| train.contains(i)));
        if !covered || test.is_empty() {
            regenerated.push(split_seed);
            if regenerated.len() > 16 * folds {
                return Err(Error::Domain(
                    "could not build folds where every class has training members; \
                     too few labeled graphs per class"
                        .into(),
                ));
            }
            continue;
        }
        accuracies.push(fold_accuracy(dm, &classes.of_point, &train, &test, k));
    }
    let mean = accuracies.iter().sum::<f64>() / folds as f64;
    let var = accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / folds as f64;
    let sil = silhouette(dm)?;
    Ok(EvalReport {
        method: dm.meta.method.clone(),
        knn_mean: mean,
        knn_std: var.sqrt(),
        knn_k: k,
        folds,
        test_frac,
        seed,
        regenerated_fold_seeds: regenerated,
        silhouette: sil.score,
        singleton_classes: sil.singleton_classes,
        time_ms: dm.meta.mean_pair_ms,
    })
}

struct ClassIndex {
    /// Sorted distinct class names.
    names: Vec<String>,
    /// Class id of each point, indexing into `names`.
    of_point: Vec<usize>,
}

fn class_index(labels: &[String]) -> ClassIndex {
    let mut names: Vec<String> = labels.to_vec();
    names.sort();
    names.dedup();
    let of_point = labels
        .iter()
        .map(|l| names.binary_search(l).expect("label vanished after sort"))
        .collect();
    ClassIndex { names, of_point }
}

/// One stratified train/test split. Classes with a single member stay
/// entirely in training; larger classes contribute
/// clamp(round(frac·size), 1, size−1) test points.
fn stratified_split(
    by_class: &[Vec<usize>],
    test_frac: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for members in by_class {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        let m = shuffled.len();
        let n_test = if m < 2 {
            0
        } else {
            ((test_frac * m as f64).round() as usize).clamp(1, m - 1)
        };
        test.extend_from_slice(&shuffled[..n_test]);
        train.extend_from_slice(&shuffled[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn fold_accuracy(
    dm: &DistanceMatrix,
    class_of: &[usize],
    train: &[usize],
    test: &[usize],
    k: usize,
) -> f64 {
    let n_classes = class_of.iter().max().map_or(0, |c| c + 1);
    let mut correct = 0usize;
    for &i in test {
        let mut neighbors: Vec<(f64, usize)> =
            train.iter().map(|&j| (dm.d[(i, j)], j)).collect();
        neighbors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0.0f64; n_classes];
        for &(dist, j) in neighbors.iter().take(k) {
            votes[class_of[j]] += 1.0 / dist.max(WEIGHT_FLOOR);
        }
        let predicted = votes
            .iter()
            .enumerate()
            .max_by(|(ca, a), (cb, b)| a.total_cmp(b).then(cb.cmp(ca)))
            .map(|(c, _)| c)
            .unwrap_or(0);
        if predicted == class_of[i] {
            correct += 1;
        }
    }
    correct as f64 / test.len() as f64
}

/// Silhouette score plus the names of single-member classes whose points
/// were scored 0 by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Silhouette {
    pub score: f64,
    pub singleton_classes: Vec<String>,
}

/// Mean silhouette over all points with precomputed distances:
/// s(i) = (b(i) − a(i)) / max(a(i), b(i)), where a is the mean distance to
/// the point's own class (excluding itself) and b the smallest mean
/// distance to any other class. Needs at least two distinct classes.
pub fn silhouette(dm: &DistanceMatrix) -> Result<Silhouette> {
    dm.validate()?;
    let classes = class_index(&dm.labels);
    if classes.names.len() < 2 {
        return Err(Error::Domain(
            "silhouette needs at least two distinct classes".into(),
        ));
    }
    let n = dm.len();
    let sizes: Vec<usize> = classes
        .names
        .iter()
        .enumerate()
        .map(|(c, _)| classes.of_point.iter().filter(|&&x| x == c).count())
        .collect();
    let mut total = 0.0;
    for i in 0..n {
        let own = classes.of_point[i];
        if sizes[own] < 2 {
            continue; // s(i) = 0 by convention
        }
        let mut sums = vec![0.0f64; classes.names.len()];
        for j in 0..n {
            if j != i {
                sums[classes.of_point[j]] += dm.d[(i, j)];
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = sums
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != own && sizes[c] > 0)
            .map(|(c, s)| s / sizes[c] as f64)
            .min_by(|x, y| x.total_cmp(y))
            .expect("at least one other class");
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    let singleton_classes = classes
        .names
        .iter()
        .zip(&sizes)
        .filter(|&(_, &s)| s == 1)
        .map(|(name, _)| name.clone())
        .collect();
    Ok(Silhouette {
        score: total / n as f64,
        singleton_classes,
    })
}

/// Dendrogram leaf order from average-linkage agglomerative clustering.
///
/// Merges the pair of clusters with the smallest average inter-cluster
/// distance; exact ties are broken toward the smaller cluster index (the
/// merged cluster keeps the smaller of the two indices). Returns the leaf
/// order (0-based) for sorting heatmap rows. Since every linkage value is
/// an average of off-diagonal entries, adding a constant to all
/// off-diagonal entries shifts all linkage values equally and leaves the
/// order unchanged.
pub fn hierarchical_order(d: &Array2<f64>) -> Result<Vec<usize>> {
    let (n, c) = d.dim();
    if n != c {
        return Err(Error::Shape(format!("distance matrix is {n}×{c}")));
    }
    if n == 0 {
        return Err(Error::Shape("cannot cluster an empty matrix".into()));
    }
    // Working copy of cluster-to-cluster linkage values; only entries for
    // active clusters are meaningful.
    let mut link = d.clone();
    let mut members: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    let mut sizes = vec![1usize; n];
    for _ in 1..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if members[i].is_none() {
                continue;
            }
            for j in (i + 1)..n {
                if members[j].is_none() {
                    continue;
                }
                let v = link[(i, j)];
                let better = match best {
                    None => true,
                    Some((bv, bi, bj)) => {
                        v < bv || (v == bv && (i, j) < (bi, bj))
                    }
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("at least two active clusters");
        // Lance–Williams update for average linkage.
        let (ni, nj) = (sizes[i] as f64, sizes[j] as f64);
        for k in 0..n {
            if k != i && k != j && members[k].is_some() {
                let merged = (ni * link[(i, k)] + nj * link[(j, k)]) / (ni + nj);
                link[(i, k)] = merged;
                link[(k, i)] = merged;
            }
        }
        let tail = members[j].take().expect("j is active");
        members[i].as_mut().expect("i is active").extend(tail);
        sizes[i] += sizes[j];
    }
    let order = members
        .into_iter()
        .flatten()
        .next()
        .expect("one cluster remains");
    Ok(order)
}

/// Writes an N×N matrix as headerless CSV, one row per line, full float
/// precision.
pub fn write_distance_csv(d: &Array2<f64>, w: &mut impl Write) -> std::io::Result<()> {
    for row in d.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a square headerless CSV matrix written by [`write_distance_csv`].
pub fn read_distance_csv(r: impl BufRead, source: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: source.into(),
                    line: idx + 1,
                    msg: format!("not a number: '{}'", f.trim()),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    path: source.into(),
                    line: idx + 1,
                    msg: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse {
            path: source.into(),
            line: 0,
            msg: "empty matrix".into(),
        });
    }
    if rows[0].len() != n {
        return Err(Error::Shape(format!(
            "matrix in {source} is {n}×{}, expected square",
            rows[0].len()
        )));
    }
    Ok(Array2::from_shape_vec(
        (n, n),
        rows.into_iter().flatten().collect(),
    )
    .expect("shape checked above"))
}

/// JSON sidecar stored next to a distance CSV: method, config, labels,
/// input files and per-pair times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceSidecar {
    pub method: String,
    pub config: Option<EmbeddingConfig>,
    pub labels: Vec<String>,
    pub files: Vec<String>,
    pub pair_ms: Vec<f64>,
    pub mean_pair_ms: f64,
}

impl DistanceSidecar {
    pub fn of(dm: &DistanceMatrix) -> Self {
        DistanceSidecar {
            method: dm.meta.method.clone(),
            config: dm.meta.config,
            labels: dm.labels.clone(),
            files: dm.meta.files.clone(),
            pair_ms: dm.meta.pair_ms.clone(),
            mean_pair_ms: dm.meta.mean_pair_ms,
        }
    }

    /// Reassembles a validated [`DistanceMatrix`] from a loaded CSV matrix
    /// and this sidecar.
    pub fn into_matrix(self, d: Array2<f64>) -> Result<DistanceMatrix> {
        let dm = DistanceMatrix {
            d,
            labels: self.labels,
            meta: DistanceMeta {
                method: self.method,
                config: self.config,
                files: self.files,
                pair_ms: self.pair_ms,
                mean_pair_ms: self.mean_pair_ms,
            },
        };
        dm.validate()?;
        Ok(dm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, permute, GeneratorSpec, Model};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_weighted_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn triangle() -> Graph {
        Graph::from_weighted_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn labeled(d: Array2<f64>, labels: &[&str]) -> DistanceMatrix {
        DistanceMatrix {
            d,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            meta: DistanceMeta {
                method: "test".into(),
                config: None,
                files: vec![],
                pair_ms: vec![],
                mean_pair_ms: 0.0,
            },
        }
    }

    /// Symmetric matrix with zero diagonal from a closure over i < j.
    fn sym_from(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Array2<f64> {
        let mut d = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        d
    }

    #[test]
    fn degree_baseline_hand_values() {
        // Both graphs have n=3, so the bin width is (3−1)/5 = 0.4. Path
        // degrees (1,2,1) land in bins 2,4,2 → counts (0,0,2,0,1); the
        // triangle's (2,2,2) all clamp into the last bin → (0,0,0,0,3).
        // Euclidean distance: √(2² + (1−3)²) = √8.
        let d = baseline_degree(&path3(), &triangle());
        assert_abs_diff_eq!(d, &8.0f64.sqrt(), epsilon = 1e-12);
        assert_eq!(baseline_degree(&path3(), &path3()), 0.0);
        // Degree histograms ignore node identity.
        let relabeled = permute(&triangle(), &[2, 0, 1]).unwrap();
        assert_eq!(baseline_degree(&triangle(), &relabeled), 0.0);
    }

    #[test]
    fn degree_histogram_counts_nodes_per_degree_slice() {
        // n=6 → bin width 1. Degrees above the top slice clamp into it
        // (possible with edge weights above 1).
        let g = Graph::from_weighted_edges(
            6,
            [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 9.0)],
        )
        .unwrap();
        // Degrees: node 0 → 12 (clamped), nodes 1-3 → 1, node 4 → 9
        // (clamped), node 5 → 0.
        assert_eq!(degree_histogram(&g), vec![1.0, 3.0, 0.0, 0.0, 2.0]);
        // An edgeless graph puts every node in the lowest slice, and a
        // single-node graph has a degenerate range.
        assert_eq!(degree_histogram(&Graph::empty(4).unwrap()), vec![4.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(degree_histogram(&Graph::empty(1).unwrap()), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        // Counts always sum to the node count.
        let sum: f64 = degree_histogram(&path3()).iter().sum();
        assert_eq!(sum, 3.0);
    }

    #[test]
    fn ev_baseline_matches_a_dense_eigensolver() {
        // Oracle: dense symmetric eigendecomposition of both adjacencies.
        let oracle_profile = |g: &Graph| -> Vec<f64> {
            let a = g.to_dense();
            let n = g.node_count();
            let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
            let eig = m.symmetric_eigen();
            let top = (0..n)
                .max_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
                .unwrap();
            let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
            let lead = (0..n)
                .max_by(|&x, &y| v[x].abs().total_cmp(&v[y].abs()))
                .unwrap();
            if v[lead] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        let (k3, p3) = (triangle(), path3());
        let want = padded_euclidean(&oracle_profile(&k3), &oracle_profile(&p3));
        let got = baseline_ev(&k3, &p3);
        assert_abs_diff_eq!(got, &want, epsilon = 1e-4);
        assert!(got > 0.1, "K3 and P3 have distinct spectra");
    }

    #[test]
    fn ev_baseline_is_permutation_invariant() {
        let g = generate(&GeneratorSpec {
            model: Model::Ba,
            nodes: 24,
            expected_degree: 4.0,
            seed: 5,
        })
        .unwrap();
        let perm: Vec<usize> = (0..24).map(|v| (v * 7 + 3) % 24).collect();
        let h = permute(&g, &perm).unwrap();
        assert!(baseline_ev(&g, &h) < 1e-7);
        assert_eq!(baseline_ev(&g, &g), 0.0);
    }

    #[test]
    fn ev_baseline_pads_different_sizes() {
        let small = triangle();
        let big = generate(&GeneratorSpec {
            model: Model::Er,
            nodes: 9,
            expected_degree: 3.0,
            seed: 2,
        })
        .unwrap();
        let d = baseline_ev(&small, &big);
        assert!(d.is_finite() && d > 0.0);
    }

    #[test]
    fn pairwise_matrix_is_valid_and_counts_each_pair_once() {
        let twin_spec = GeneratorSpec {
            model: Model::Er,
            nodes: 7,
            expected_degree: 3.0,
            seed: 40,
        };
        let graphs = vec![
            generate(&twin_spec).unwrap(),
            generate(&twin_spec).unwrap(),
            generate(&GeneratorSpec {
                model: Model::Ba,
                nodes: 9,
                expected_degree: 4.0,
                seed: 41,
            })
            .unwrap(),
        ];
        let labels: Vec<String> = ["a", "a", "b"].iter().map(|s| s.to_string()).collect();
        let cfg = EmbeddingConfig::new(Method::Ccb, 60, 4, 2, 3).unwrap();
        let dm = pairwise_distances(
            &graphs,
            &labels,
            EvalMethod::Mixture {
                method: Method::Ccb,
                variant: Variant::Tied,
            },
            &cfg,
        )
        .unwrap();
        dm.validate().unwrap();
        // Three graphs → exactly three pair computations.
        assert_eq!(dm.meta.pair_ms.len(), 3);
        assert_eq!(dm.meta.method, "ccb-tied");
        // Identical twin graphs share colorings, so their distance is 0.
        assert!(dm.d[(0, 1)].abs() <= 1e-9, "twin distance {}", dm.d[(0, 1)]);
        assert!(dm.d[(0, 2)] > 1e-3, "distinct graphs at {}", dm.d[(0, 2)]);
    }

    #[test]
    fn pairwise_baselines_need_no_embedding_config() {
        let graphs = vec![path3(), triangle(), path3()];
        let labels: Vec<String> = ["p", "t", "p"].iter().map(|s| s.to_string()).collect();
        let cfg = EmbeddingConfig::defaults(Method::Ccb);
        for method in [EvalMethod::Degree, EvalMethod::Ev] {
            let dm = pairwise_distances(&graphs, &labels, method, &cfg).unwrap();
            dm.validate().unwrap();
            assert!(dm.meta.config.is_none());
            assert_abs_diff_eq!(dm.d[(0, 2)], &0.0, epsilon = 1e-12);
        }
        let one = vec![path3()];
        let l1 = vec!["p".to_string()];
        assert!(pairwise_distances(&one, &l1, EvalMethod::Degree, &cfg).is_err());
    }

    #[test]
    fn knn_separated_classes_score_perfectly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = sym_from(12, |i, j| {
            let same = (i < 6) == (j < 6);
            if same {
                rng.gen_range(0.05..0.15)
            } else {
                rng.gen_range(9.0..11.0)
            }
        });
        let labels: Vec<&str> = (0..12).map(|i| if i < 6 { "x" } else { "y" }).collect();
        let dm = labeled(d, &labels);
        let report = knn_cv(&dm, 3, 10, 0.25, 1).unwrap();
        assert_eq!(report.knn_mean, 1.0);
        assert_eq!(report.knn_std, 0.0);
        assert!(report.regenerated_fold_seeds.is_empty());
        assert_eq!(report.folds, 10);
        assert_eq!(report.test_frac, 0.25);
    }

    #[test]
    fn knn_on_unstructured_distances_sits_near_chance() {
        // 4 balanced classes with iid random distances: accuracy should
        // hover around 0.25.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = sym_from(40, |_, _| rng.gen_range(1.0..2.0));
        let labels: Vec<String> = (0..40).map(|i| format!("c{}", i % 4)).collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let dm = labeled(d, &refs);
        let report = knn_cv(&dm, 5, 20, 0.2, 3).unwrap();
        assert!(
            report.knn_mean > 0.05 && report.knn_mean < 0.45,
            "chance-level accuracy came out {}",
            report.knn_mean
        );
    }

    #[test]
    fn knn_is_deterministic_in_the_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = sym_from(15, |_, _| rng.gen_range(0.5..1.5));
        let labels: Vec<&str> = (0..15).map(|i| if i % 3 == 0 { "a" } else { "b" }).collect();
        let dm = labeled(d, &labels);
        let r1 = knn_cv(&dm, 3, 8, 0.3, 42).unwrap();
        let r2 = knn_cv(&dm, 3, 8, 0.3, 42).unwrap();
        assert_eq!(r1.knn_mean, r2.knn_mean);
        assert_eq!(r1.knn_std, r2.knn_std);
        let r3 = knn_cv(&dm, 3, 8, 0.3, 43).unwrap();
        assert!(r3.knn_mean.is_finite());
    }

    #[test]
    fn knn_zero_distance_neighbor_dominates() {
        // Each class is a pair at distance 0, and the two classes sit a
        // hair apart (0.001). Every fold tests one point per class against
        // a training set holding its zero-distance twin plus the other
        // class. With k=3 the single floored-weight twin (1e12) must
        // outvote the two closer-in-count wrong-class neighbors (1e3
        // each); plain majority voting would get every point wrong.
        let mut d = sym_from(4, |_, _| 0.001);
        d[(0, 1)] = 0.0;
        d[(1, 0)] = 0.0;
        d[(2, 3)] = 0.0;
        d[(3, 2)] = 0.0;
        let dm = labeled(d, &["a", "a", "b", "b"]);
        let report = knn_cv(&dm, 3, 6, 0.5, 5).unwrap();
        assert_eq!(report.knn_mean, 1.0, "zero-distance twin must dominate");
        // Control: without the zero-distance twin the nearer wrong-class
        // points win and accuracy collapses.
        let mut far = sym_from(4, |_, _| 0.001);
        far[(0, 1)] = 0.002;
        far[(1, 0)] = 0.002;
        far[(2, 3)] = 0.002;
        far[(3, 2)] = 0.002;
        let control = knn_cv(&labeled(far, &["a", "a", "b", "b"]), 3, 6, 0.5, 5).unwrap();
        assert_eq!(control.knn_mean, 0.0);
    }

    #[test]
    fn knn_rejects_bad_parameters() {
        let dm = labeled(sym_from(4, |_, _| 1.0), &["a", "a", "b", "b"]);
        assert!(knn_cv(&dm, 0, 5, 0.2, 1).is_err());
        assert!(knn_cv(&dm, 1, 1, 0.2, 1).is_err());
        assert!(knn_cv(&dm, 1, 5, 0.0, 1).is_err());
        assert!(knn_cv(&dm, 1, 5, 1.0, 1).is_err());
    }

    #[test]
    fn silhouette_tight_far_clusters_score_high() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let d = sym_from(10, |i, j| {
            if (i < 5) == (j < 5) {
                rng.gen_range(0.01..0.05)
            } else {
                rng.gen_range(5.0..6.0)
            }
        });
        let labels: Vec<&str> = (0..10).map(|i| if i < 5 { "x" } else { "y" }).collect();
        let s = silhouette(&labeled(d, &labels)).unwrap();
        assert!(s.score > 0.9, "score {}", s.score);
        assert!(s.singleton_classes.is_empty());
    }

    #[test]
    fn silhouette_of_equal_distances_is_zero() {
        let d = sym_from(6, |_, _| 2.5);
        let labels = ["a", "a", "a", "b", "b", "b"];
        let s = silhouette(&labeled(d, &labels)).unwrap();
        assert_abs_diff_eq!(s.score, &0.0, epsilon = 1e-12);
    }

    #[test]
    fn silhouette_records_singletons_and_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let d = sym_from(7, |_, _| rng.gen_range(0.1..3.0));
        let labels = ["a", "a", "a", "b", "b", "b", "lone"];
        let s = silhouette(&labeled(d, &labels)).unwrap();
        assert_eq!(s.singleton_classes, vec!["lone".to_string()]);
        assert!(s.score >= -1.0 && s.score <= 1.0);
        // A single class is not enough.
        let same = labeled(sym_from(3, |_, _| 1.0), &["a", "a", "a"]);
        assert!(silhouette(&same).is_err());
    }

    #[test]
    fn silhouette_is_bounded_on_random_inputs() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..12);
            let d = sym_from(n, |_, _| rng.gen_range(0.0..5.0));
            let labels: Vec<String> = (0..n).map(|i| format!("c{}", i % 3)).collect();
            let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
            let s = silhouette(&labeled(d, &refs)).unwrap();
            assert!(s.score >= -1.0 && s.score <= 1.0, "seed {seed}: {}", s.score);
        }
    }

    #[test]
    fn leaf_order_keeps_separated_clusters_contiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let d = sym_from(8, |i, j| {
            if (i < 4) == (j < 4) {
                rng.gen_range(0.1..0.5)
            } else {
                rng.gen_range(8.0..9.0)
            }
        });
        let order = hierarchical_order(&d).unwrap();
        let mut seen = order.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..8).collect::<Vec<_>>(), "must be a permutation");
        let first_half: Vec<bool> = order.iter().map(|&i| i < 4).collect();
        let switches = first_half.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(switches, 1, "clusters interleaved: {order:?}");
    }

    #[test]
    fn leaf_order_of_two_points_is_identity() {
        let d = sym_from(2, |_, _| 1.0);
        assert_eq!(hierarchical_order(&d).unwrap(), vec![0, 1]);
        assert!(hierarchical_order(&Array2::zeros((2, 3))).is_err());
    }

    #[test]
    fn leaf_order_breaks_ties_toward_smaller_indices() {
        // d(0,1) = d(2,3) exactly; the (0,1) merge must happen first and
        // the final order keep both pairs adjacent in index order.
        let mut d = sym_from(4, |_, _| 5.0);
        for &(i, j) in &[(0usize, 1usize), (2, 3)] {
            d[(i, j)] = 1.0;
            d[(j, i)] = 1.0;
        }
        assert_eq!(hierarchical_order(&d).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn leaf_order_is_invariant_to_constant_shifts() {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let base = sym_from(9, |_, _| rng.gen_range(0.5..4.0));
            let reference = hierarchical_order(&base).unwrap();
            for shift in [0.25, 3.0, 50.0] {
                let shifted = sym_from(9, |i, j| base[(i, j)] + shift);
                assert_eq!(
                    hierarchical_order(&shifted).unwrap(),
                    reference,
                    "seed {seed}, shift {shift}"
                );
            }
        }
    }

    #[test]
    fn distance_csv_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let d = sym_from(5, |_, _| rng.gen_range(0.0..2.0));
        let mut buf = Vec::new();
        write_distance_csv(&d, &mut buf).unwrap();
        let back = read_distance_csv(buf.as_slice(), "mem").unwrap();
        assert_eq!(d, back);
        assert!(read_distance_csv("1,2\n3".as_bytes(), "mem").is_err());
        assert!(read_distance_csv("1,2,3\n4,5,6".as_bytes(), "mem").is_err());
        assert!(read_distance_csv("".as_bytes(), "mem").is_err());
    }

    #[test]
    fn sidecar_round_trips_through_json() {
        let graphs = vec![path3(), triangle()];
        let labels = vec!["p".to_string(), "t".to_string()];
        let cfg = EmbeddingConfig::new(Method::Cnp, 50, 3, 2, 8).unwrap();
        let dm = pairwise_distances(
            &graphs,
            &labels,
            EvalMethod::Mixture {
                method: Method::Cnp,
                variant: Variant::Scaled,
            },
            &cfg,
        )
        .unwrap();
        let sidecar = DistanceSidecar::of(&dm);
        let json = serde_json::to_string_pretty(&sidecar).unwrap();
        let parsed: DistanceSidecar = serde_json::from_str(&json).unwrap();
        let rebuilt = parsed.into_matrix(dm.d.clone()).unwrap();
        assert_eq!(rebuilt.labels, dm.labels);
        assert_eq!(rebuilt.meta.method, "cnp-scaled");
        assert_eq!(rebuilt.meta.config.unwrap().samples, 50);
        // A tampered matrix no longer validates.
        let mut bad = dm.d.clone();
        bad[(0, 1)] += 1.0;
        assert!(DistanceSidecar::of(&dm).into_matrix(bad).is_err());
    }

    #[test]
    fn matrix_validation_rejects_bad_inputs() {
        let mut d = sym_from(3, |_, _| 1.0);
        d[(0, 0)] = 0.5;
        assert!(labeled(d, &["a", "b", "c"]).validate().is_err());
        let mut asym = sym_from(3, |_, _| 1.0);
        asym[(0, 1)] = 2.0;
        assert!(labeled(asym, &["a", "b", "c"]).validate().is_err());
        let wrong_labels = labeled(sym_from(3, |_, _| 1.0), &["a", "b"]);
        assert!(wrong_labels.validate().is_err());
        let mut neg = sym_from(3, |_, _| 1.0);
        neg[(0, 1)] = -1.0;
        neg[(1, 0)] = -1.0;
        assert!(labeled(neg, &["a", "b", "c"]).validate().is_err());
    }
}
