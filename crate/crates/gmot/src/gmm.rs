//! Gaussian-mixture summaries of embedding sample clouds.
//!
//! Each node's s embedding samples are condensed into one Gaussian
//! (maximum-likelihood mean and covariance, biased 1/s normalization, plus
//! a small ridge so downstream matrix square roots stay well conditioned).
//! A graph is then a uniformly weighted mixture with one component per
//! node.
//!
//! [`scale_project`] produces the reduced representation used by the
//! scaled distance variant: a shared covariance spectrum plus one positive
//! scale per node. Writing Σ̄ for the arithmetic mean of the node
//! covariances and rᵥ = trace(Σᵥ)/trace(Σ̄), node v is assigned the scalar
//! dᵥ = 1/max(rᵥ, 1e−12), which realizes Σᵥ ≈ Dᵥ^{-1/2} Σ̄ Dᵥ^{-1/2} with
//! Dᵥ = dᵥ·I. When every covariance is an exact scalar multiple of a
//! common matrix the realization is exact, and the scaled distance formula
//! reproduces the full closed form; otherwise it is the minimal projection
//! of that shape. Distances between two graphs project both mixtures
//! jointly ([`scale_project_joint`]) so they share one spectrum.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayView2, Axis};
use rayon::prelude::*;

use crate::embed::EmbeddingSamples;
use crate::error::{Error, Result};

/// Default covariance ridge ε added to every fitted covariance diagonal.
pub const DEFAULT_RIDGE: f64 = 1e-9;

/// Floor for the per-node trace ratio, guarding against division by zero
/// for (near-)zero-covariance components.
const SCALE_FLOOR: f64 = 1e-12;

/// One Gaussian component: mean vector and symmetric PSD covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianComponent {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// A graph as a uniformly weighted Gaussian mixture, one component per
/// node in node order. Weights are implicit (1/n each).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, GaussianComponent::dim)
    }
}

/// The scaled-variant view of a mixture: per-node means, the eigenvalues
/// of the shared covariance, and one positive scale per node (stored as a
/// constant-per-node vector, one entry per coordinate).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMixture {
    pub mus: Vec<DVector<f64>>,
    /// Eigenvalues of the shared covariance Σ̄, descending, clamped ≥ 0.
    pub shared_eigs: DVector<f64>,
    /// node_scales[v][x] = dᵥ > 0 (constant across coordinates x).
    pub node_scales: Vec<DVector<f64>>,
}

impl ScaledMixture {
    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn dim(&self) -> usize {
        self.shared_eigs.len()
    }
}

/// Maximum-likelihood Gaussian for one node's sample matrix (s×D):
/// mean = sample mean, covariance = (1/s)·Σᵢ(xᵢ−μ̂)(xᵢ−μ̂)ᵀ + ridge·I.
pub fn fit_gaussian(samples: ArrayView2<'_, f64>, ridge: f64) -> Result<GaussianComponent> {
    let (s, d) = samples.dim();
    if s < 2 {
        return Err(Error::Domain(format!(
            "covariance needs at least 2 samples, got {s}"
        )));
    }
    if !(ridge >= 0.0) {
        return Err(Error::Domain(format!("ridge must be ≥ 0, got {ridge}")));
    }
    let mean = samples.mean_axis(Axis(0)).expect("s ≥ 2");
    let centered = &samples - &mean;
    let cov = centered.t().dot(&centered) / s as f64;
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = 0.5 * (cov[(i, j)] + cov[(j, i)]);
        }
        out[(i, i)] += ridge;
    }
    Ok(GaussianComponent {
        mean: DVector::from_iterator(d, mean.iter().copied()),
        cov: out,
    })
}

/// Fits one Gaussian per node. Component order matches node order; nodes
/// are fitted in parallel with results identical to sequential fitting.
pub fn fit_mixture(es: &EmbeddingSamples, ridge: f64) -> Result<GaussianMixture> {
    let components = (0..es.node_count())
        .into_par_iter()
        .map(|v| fit_gaussian(es.node(v), ridge))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianMixture { components })
}

/// Shared spectrum of a set of components: eigenvalues of the arithmetic
/// mean covariance, descending, clamped at zero.
struct SharedSpectrum {
    eigs: DVector<f64>,
    trace: f64,
}

fn shared_spectrum(components: &[&GaussianComponent]) -> Result<SharedSpectrum> {
    let dim = components
        .first()
        .ok_or_else(|| Error::Domain("cannot project an empty mixture".into()))?
        .dim();
    let mut mean = DMatrix::zeros(dim, dim);
    for c in components {
        if c.dim() != dim {
            return Err(Error::Shape(format!(
                "mixed component dimensions {} and {}",
                dim,
                c.dim()
            )));
        }
        mean += &c.cov;
    }
    mean /= components.len() as f64;
    let trace = mean.trace();
    let eigs = if trace > 0.0 {
        let mut values: Vec<f64> = mean
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0))
            .collect();
        values.sort_by(|a, b| b.total_cmp(a));
        DVector::from_vec(values)
    } else {
        DVector::zeros(dim)
    };
    Ok(SharedSpectrum { eigs, trace })
}

fn project_with(m: &GaussianMixture, spectrum: &SharedSpectrum) -> ScaledMixture {
    let dim = m.dim();
    let node_scales = m
        .components
        .iter()
        .map(|c| {
            let d = if spectrum.trace > 0.0 {
                1.0 / (c.cov.trace() / spectrum.trace).max(SCALE_FLOOR)
            } else {
                1.0
            };
            DVector::from_element(dim, d)
        })
        .collect();
    ScaledMixture {
        mus: m.components.iter().map(|c| c.mean.clone()).collect(),
        shared_eigs: spectrum.eigs.clone(),
        node_scales,
    }
}

/// Projects one mixture onto the shared-spectrum form (see module docs).
/// A zero mean covariance (trace(Σ̄) = 0) degenerates to all scales 1.
pub fn scale_project(m: &GaussianMixture) -> Result<ScaledMixture> {
    let refs: Vec<&GaussianComponent> = m.components.iter().collect();
    let spectrum = shared_spectrum(&refs)?;
    Ok(project_with(m, &spectrum))
}

/// Projects two mixtures against one spectrum computed from the union of
/// both component sets, so that their scaled distances compare like for
/// like.
pub fn scale_project_joint(
    a: &GaussianMixture,
    b: &GaussianMixture,
) -> Result<(ScaledMixture, ScaledMixture)> {
    let refs: Vec<&GaussianComponent> = a
        .components
        .iter()
        .chain(b.components.iter())
        .collect();
    let spectrum = shared_spectrum(&refs)?;
    Ok((project_with(a, &spectrum), project_with(b, &spectrum)))
}

const MIXTURE_MAGIC: &str = "gmot-mixture";
const MIXTURE_VERSION: u32 = 1;

/// Writes a mixture as a versioned CSV dump.
///
/// Line 1 is `gmot-mixture,1,<n>,<dim>`; each component v contributes a
/// `mean,<v>,…` line followed by `cov,<v>,<row>,…` lines. Floats use the
/// shortest round-trip decimal form, so a write/read cycle is lossless.
pub fn write_mixture_csv(m: &GaussianMixture, w: &mut impl Write) -> std::io::Result<()> {
    let dim = m.dim();
    writeln!(w, "{MIXTURE_MAGIC},{MIXTURE_VERSION},{},{dim}", m.len())?;
    for (v, c) in m.components.iter().enumerate() {
        write!(w, "mean,{v}")?;
        for x in c.mean.iter() {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
        for r in 0..dim {
            write!(w, "cov,{v},{r}")?;
            for j in 0..dim {
                write!(w, ",{}", c.cov[(r, j)])?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Reads a mixture written by [`write_mixture_csv`]. `source` names the
/// origin (file path or "<stdin>") for error messages.
pub fn read_mixture_csv(r: impl BufRead, source: &str) -> Result<GaussianMixture> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: source.to_string(),
        line,
        msg,
    };
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty mixture file".into()))?;
    let header = header.map_err(|e| Error::io(source, e))?;
    let head: Vec<&str> = header.trim().split(',').collect();
    if head.len() != 4 || head[0] != MIXTURE_MAGIC {
        return Err(parse_err(1, "not a mixture dump (bad header)".into()));
    }
    let version: u32 = head[1]
        .parse()
        .map_err(|_| parse_err(1, format!("bad version field '{}'", head[1])))?;
    if version != MIXTURE_VERSION {
        return Err(Error::Domain(format!(
            "unsupported mixture dump version {version} (expected {MIXTURE_VERSION})"
        )));
    }
    let n: usize = head[2]
        .parse()
        .map_err(|_| parse_err(1, format!("bad component count '{}'", head[2])))?;
    let dim: usize = head[3]
        .parse()
        .map_err(|_| parse_err(1, format!("bad dimension '{}'", head[3])))?;

    let mut components = Vec::with_capacity(n);
    for v in 0..n {
        let mut expect = |kind: &str, want_prefix: usize| -> Result<Vec<f64>> {
            let (idx, line) = lines.next().ok_or_else(|| {
                parse_err(0, format!("truncated dump: missing {kind} row of component {v}"))
            })?;
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(source, e))?;
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != want_prefix + dim {
                return Err(parse_err(
                    lineno,
                    format!(
                        "expected {} fields, got {}",
                        want_prefix + dim,
                        fields.len()
                    ),
                ));
            }
            if fields[0] != kind {
                return Err(parse_err(
                    lineno,
                    format!("expected a '{kind}' row, got '{}'", fields[0]),
                ));
            }
            fields[want_prefix..]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| parse_err(lineno, format!("bad float '{f}'")))
                })
                .collect()
        };
        let mean = DVector::from_vec(expect("mean", 2)?);
        let mut cov = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            let row = expect("cov", 3)?;
            for (j, x) in row.into_iter().enumerate() {
                cov[(r, j)] = x;
            }
        }
        components.push(GaussianComponent { mean, cov });
    }
    Ok(GaussianMixture { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{sample_embeddings, EmbeddingConfig, Method};
    use crate::graph::{generate, GeneratorSpec, Graph, Model};
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn fit_of_identical_points_is_degenerate() {
        let samples = array![[1.5, -2.0, 0.0], [1.5, -2.0, 0.0]];
        let c = fit_gaussian(samples.view(), 0.0).unwrap();
        assert_eq!(c.mean.as_slice(), &[1.5, -2.0, 0.0]);
        assert!(c.cov.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn fit_matches_hand_arithmetic() {
        // {(0,0),(2,0)}: mean (1,0); biased covariance [[1,0],[0,0]].
        let samples = array![[0.0, 0.0], [2.0, 0.0]];
        let c = fit_gaussian(samples.view(), 0.0).unwrap();
        assert_eq!(c.mean.as_slice(), &[1.0, 0.0]);
        assert_eq!(c.cov[(0, 0)], 1.0);
        assert_eq!(c.cov[(0, 1)], 0.0);
        assert_eq!(c.cov[(1, 0)], 0.0);
        assert_eq!(c.cov[(1, 1)], 0.0);
    }

    #[test]
    fn fit_rejects_tiny_sample_sets_and_bad_ridge() {
        let one = array![[1.0, 2.0]];
        assert!(fit_gaussian(one.view(), 0.0).is_err());
        let two = array![[1.0, 2.0], [3.0, 4.0]];
        assert!(fit_gaussian(two.view(), -1.0).is_err());
        assert!(fit_gaussian(two.view(), f64::NAN).is_err());
    }

    #[test]
    fn covariance_is_psd_without_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = Array2::from_shape_fn((40, 6), |_| rng.gen_range(-1.0..1.0));
        let c = fit_gaussian(samples.view(), 0.0).unwrap();
        let eigs = c.cov.clone().symmetric_eigen().eigenvalues;
        for &l in eigs.iter() {
            assert!(l >= -1e-10, "covariance eigenvalue {l} below PSD floor");
        }
    }

    #[test]
    fn monte_carlo_recovery_of_known_gaussian() {
        // x = μ* + L·z with z standard normal, so Σ* = L·Lᵀ.
        let mu_star = [1.0, -2.0, 0.5];
        let l = [
            [1.0, 0.0, 0.0],
            [0.5, 1.0, 0.0],
            [-0.3, 0.2, 0.8],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let s = 100_000;
        let mut samples = Array2::zeros((s, 3));
        for mut row in samples.rows_mut() {
            let z: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            for i in 0..3 {
                row[i] = mu_star[i] + (0..3).map(|j| l[i][j] * z[j]).sum::<f64>();
            }
        }
        let c = fit_gaussian(samples.view(), 0.0).unwrap();
        let mean_err: f64 = (0..3)
            .map(|i| (c.mean[i] - mu_star[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(mean_err < 0.02, "mean error {mean_err}");
        let mut frob = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let sigma_star: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                frob += (c.cov[(i, j)] - sigma_star).powi(2);
            }
        }
        assert!(frob.sqrt() < 0.05, "covariance error {}", frob.sqrt());
    }

    #[test]
    fn mixture_shape_follows_the_graph() {
        let g = generate(&GeneratorSpec {
            model: Model::Er,
            nodes: 7,
            expected_degree: 3.0,
            seed: 1,
        })
        .unwrap();
        let cfg = EmbeddingConfig::new(Method::Cnp, 30, 4, 2, 11).unwrap();
        let m = fit_mixture(&sample_embeddings(&g, &cfg).unwrap(), DEFAULT_RIDGE).unwrap();
        assert_eq!(m.len(), 7);
        assert_eq!(m.dim(), cfg.dim());

        let single = Graph::empty(1).unwrap();
        let m1 = fit_mixture(
            &sample_embeddings(&single, &cfg).unwrap(),
            DEFAULT_RIDGE,
        )
        .unwrap();
        assert_eq!(m1.len(), 1);
    }

    #[test]
    fn indistinguishable_nodes_get_equal_components() {
        // On an edgeless graph every node's sorted embedding is the same
        // deterministic vector, so all fitted components coincide.
        let g = Graph::empty(4).unwrap();
        let cfg = EmbeddingConfig::new(Method::Cnp, 25, 3, 2, 5).unwrap();
        let m = fit_mixture(&sample_embeddings(&g, &cfg).unwrap(), 0.0).unwrap();
        for c in &m.components[1..] {
            assert_eq!(c, &m.components[0]);
        }
    }

    fn component(mean: &[f64], cov: DMatrix<f64>) -> GaussianComponent {
        GaussianComponent {
            mean: DVector::from_row_slice(mean),
            cov,
        }
    }

    #[test]
    fn equal_covariances_project_to_unit_scales() {
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let m = GaussianMixture {
            components: vec![
                component(&[0.0, 0.0], sigma.clone()),
                component(&[1.0, 2.0], sigma.clone()),
            ],
        };
        let p = scale_project(&m).unwrap();
        for s in &p.node_scales {
            for &d in s.iter() {
                assert_abs_diff_eq!(d, &1.0, epsilon = 1e-12);
            }
        }
        // Spectrum of Σ̄ = Σ: eigenvalues of [[2,.5],[.5,1]] are (3±√2)/2.
        let r2 = 2.0f64.sqrt();
        assert_abs_diff_eq!(p.shared_eigs[0], &((3.0 + r2) / 2.0), epsilon = 1e-12);
        assert_abs_diff_eq!(p.shared_eigs[1], &((3.0 - r2) / 2.0), epsilon = 1e-12);
    }

    #[test]
    fn trace_ratio_scales_for_a_doubled_covariance() {
        // Σ₁ = 2Σ₂ ⇒ Σ̄ = 1.5Σ₂; trace ratios 4/3 and 2/3 give node scales
        // d = 3/4 and 3/2, so Σ̄/d recovers each input covariance exactly.
        let sigma2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 2.0]);
        let sigma1 = &sigma2 * 2.0;
        let m = GaussianMixture {
            components: vec![
                component(&[0.0, 0.0], sigma1.clone()),
                component(&[0.0, 1.0], sigma2.clone()),
            ],
        };
        let p = scale_project(&m).unwrap();
        assert_abs_diff_eq!(p.node_scales[0][0], &0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(p.node_scales[1][0], &1.5, epsilon = 1e-12);
        let mean = (&sigma1 + &sigma2) * 0.5;
        for (scale, sigma) in p.node_scales.iter().zip([&sigma1, &sigma2]) {
            let rec = &mean / scale[0];
            assert!((&rec - sigma).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_scaled_family_round_trips() {
        // Σᵥ = cᵥ·B satisfies the shared-spectrum shape exactly, so
        // Σ̄/dᵥ must reconstruct every input covariance, and the stored
        // spectrum must be the spectrum of Σ̄.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = 6;
        let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        let b = &a * a.transpose();
        let cs = [0.3, 0.9, 1.4, 2.7, 3.3];
        let m = GaussianMixture {
            components: cs
                .iter()
                .map(|&c| component(&vec![0.0; d], &b * c))
                .collect(),
        };
        let p = scale_project(&m).unwrap();
        let mean = &b * (cs.iter().sum::<f64>() / cs.len() as f64);
        for (i, &c) in cs.iter().enumerate() {
            let rec = &mean / p.node_scales[i][0];
            let target = &b * c;
            let rel = (&rec - &target).norm() / (1.0 + target.norm());
            assert!(rel < 1e-8, "component {i} reconstruction error {rel}");
        }
        let mut want: Vec<f64> = mean
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        want.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in p.shared_eigs.iter().zip(want) {
            assert_abs_diff_eq!(got, &want.max(0.0), epsilon = 1e-10);
        }
        assert_abs_diff_eq!(
            p.shared_eigs.sum(),
            &mean.trace(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn zero_covariance_mixture_projects_to_ones() {
        let zero = DMatrix::zeros(3, 3);
        let m = GaussianMixture {
            components: vec![
                component(&[1.0, 0.0, 0.0], zero.clone()),
                component(&[0.0, 1.0, 0.0], zero.clone()),
            ],
        };
        let p = scale_project(&m).unwrap();
        assert!(p.shared_eigs.iter().all(|&l| l == 0.0));
        assert!(p
            .node_scales
            .iter()
            .all(|s| s.iter().all(|&d| d == 1.0)));
    }

    #[test]
    fn joint_projection_shares_one_spectrum() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]);
        let ma = GaussianMixture {
            components: vec![component(&[0.0, 0.0], b.clone())],
        };
        let mb = GaussianMixture {
            components: vec![component(&[1.0, 1.0], &b * 3.0)],
        };
        let (pa, pb) = scale_project_joint(&ma, &mb).unwrap();
        assert_eq!(pa.shared_eigs, pb.shared_eigs);
        // Joint Σ̄ = 2B: trace ratios 1/2 and 3/2 invert to scales 2, 2/3.
        assert_abs_diff_eq!(pa.node_scales[0][0], &2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pb.node_scales[0][0], &(2.0 / 3.0), epsilon = 1e-12);
        let single = scale_project(&ma).unwrap();
        assert!(single.shared_eigs != pa.shared_eigs);
    }

    #[test]
    fn projection_rejects_mixed_dimensions() {
        let m = GaussianMixture {
            components: vec![
                component(&[0.0], DMatrix::identity(1, 1)),
                component(&[0.0, 0.0], DMatrix::identity(2, 2)),
            ],
        };
        assert!(scale_project(&m).is_err());
    }

    #[test]
    fn mean_estimates_tighten_as_samples_grow() {
        // Sample means converge at the Monte-Carlo rate, so comparing the
        // s-sample estimate against a 10s-sample reference, quadrupling s
        // should roughly halve the worst-coordinate deviation.
        let g = generate(&GeneratorSpec {
            model: Model::Ws,
            nodes: 8,
            expected_degree: 4.0,
            seed: 2,
        })
        .unwrap();
        let means = |s: usize| {
            let cfg = EmbeddingConfig::new(Method::Cnp, s, 3, 2, 17).unwrap();
            fit_mixture(&sample_embeddings(&g, &cfg).unwrap(), 0.0).unwrap()
        };
        let dev = |s: usize| {
            let a = means(s);
            let b = means(10 * s);
            a.components
                .iter()
                .zip(&b.components)
                .flat_map(|(x, y)| {
                    x.mean
                        .iter()
                        .zip(y.mean.iter())
                        .map(|(p, q)| (p - q).abs())
                        .collect::<Vec<_>>()
                })
                .fold(0.0f64, f64::max)
        };
        let d250 = dev(250);
        let d1000 = dev(1000);
        let d4000 = dev(4000);
        assert!(
            d1000 <= 0.75 * d250,
            "s=250→1000 deviation went {d250} → {d1000}"
        );
        assert!(
            d4000 <= 0.75 * d1000,
            "s=1000→4000 deviation went {d1000} → {d4000}"
        );
    }

    #[test]
    fn mixture_csv_round_trips_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let samples = Array2::from_shape_fn((20, 4), |_| rng.gen_range(-2.0..2.0));
        let m = GaussianMixture {
            components: vec![
                fit_gaussian(samples.view(), DEFAULT_RIDGE).unwrap(),
                fit_gaussian(samples.slice(ndarray::s![..10, ..]).view(), 0.0).unwrap(),
            ],
        };
        let mut buf = Vec::new();
        write_mixture_csv(&m, &mut buf).unwrap();
        let back = read_mixture_csv(buf.as_slice(), "<memory>").unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn mixture_csv_rejects_bad_headers_and_truncation() {
        assert!(read_mixture_csv(&b"nonsense,1,1,2\n"[..], "<memory>").is_err());
        assert!(read_mixture_csv(&b"gmot-mixture,9,1,2\nmean,0,0,0\n"[..], "<memory>").is_err());
        // Truncated: header promises one 2-D component, body has no cov rows.
        let truncated = b"gmot-mixture,1,1,2\nmean,0,1.0,2.0\n";
        assert!(read_mixture_csv(&truncated[..], "<memory>").is_err());
        // Wrong field count inside a row.
        let short_row = b"gmot-mixture,1,1,2\nmean,0,1.0\n";
        assert!(read_mixture_csv(&short_row[..], "<memory>").is_err());
    }
}
