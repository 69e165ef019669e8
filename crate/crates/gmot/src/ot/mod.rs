//! Optimal transport between Gaussian mixtures.
//!
//! The distance between two graphs is the cost of an exact discrete
//! optimal-transport problem: ground cost = pairwise squared Wasserstein-2
//! between mixture components (one per node), marginals uniform. The
//! minimizing coupling is returned alongside the cost — it is a soft
//! alignment saying how much of node i's distribution maps onto node j's.
//!
//! [`mixture_distance`] runs the whole pipeline for two graphs; the
//! lower-level pieces ([`build_cost`], [`solve_discrete_ot`]) operate on
//! already-fitted mixtures.

mod gaussian;
mod simplex;

pub use gaussian::{gaussian_w2_full, gaussian_w2_scaled, gaussian_w2_tied, sqrtm_psd};

use std::io::Write;

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::embed::{sample_embeddings, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::gmm::{
    fit_mixture, scale_project_joint, GaussianMixture, ScaledMixture, DEFAULT_RIDGE,
};
use crate::graph::Graph;

/// Which component-distance formula grounds the transport problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Exact closed form with per-component covariances.
    Full,
    /// Shared spectrum with one scale per node.
    Scaled,
    /// Means only.
    Tied,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::Scaled, Variant::Tied];
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::Scaled => "scaled",
            Variant::Tied => "tied",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "scaled" => Ok(Variant::Scaled),
            "tied" => Ok(Variant::Tied),
            other => Err(Error::Domain(format!("unknown distance variant '{other}'"))),
        }
    }
}

/// Pairwise component distances between two mixtures.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    /// n₁×n₂ non-negative finite entries.
    pub c: Array2<f64>,
    pub variant: Variant,
}

/// An optimal coupling between two mixtures.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    /// n₁×n₂ non-negative mass matrix; rows sum to 1/n₁, columns to 1/n₂,
    /// and at most n₁+n₂−1 entries are positive (vertex solution).
    pub mass: Array2<f64>,
    /// Σᵢⱼ C[i][j]·mass[i][j] — the squared mixture distance.
    pub cost: f64,
}

impl TransportPlan {
    /// Writes the plan as CSV with header `i,j,mass`, row-major, 1-based
    /// indices (matching edge-list node ids).
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        write_coo_csv(&self.mass, w)
    }
}

/// Row-major coordinate dump of a matrix with header `i,j,mass`, 1-based.
pub fn write_coo_csv(m: &Array2<f64>, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "i,j,mass")?;
    for ((i, j), v) in m.indexed_iter() {
        writeln!(w, "{},{},{v}", i + 1, j + 1)?;
    }
    Ok(())
}

fn check_cost_entries(c: &Array2<f64>) -> Result<()> {
    if let Some(bad) = c.iter().find(|x| !x.is_finite()) {
        return Err(Error::Numerical(format!(
            "component distance came out non-finite ({bad})"
        )));
    }
    Ok(())
}

/// Pairwise squared component distances between two fitted mixtures.
///
/// The scaled variant projects both mixtures jointly (one spectrum over
/// the union of all components) before applying its per-coordinate
/// formula, so it needs only the mixtures themselves, like the other
/// variants.
pub fn build_cost(
    m1: &GaussianMixture,
    m2: &GaussianMixture,
    variant: Variant,
) -> Result<CostMatrix> {
    if m1.is_empty() || m2.is_empty() {
        return Err(Error::Shape("cannot compare an empty mixture".into()));
    }
    if m1.dim() != m2.dim() {
        return Err(Error::Shape(format!(
            "mixture dimensions differ: {} vs {}",
            m1.dim(),
            m2.dim()
        )));
    }
    let (n1, n2) = (m1.len(), m2.len());
    let mut c = Array2::zeros((n1, n2));
    match variant {
        Variant::Tied => {
            c.axis_iter_mut(Axis(0))
                .into_par_iter()
                .enumerate()
                .try_for_each(|(i, mut row)| -> Result<()> {
                    for j in 0..n2 {
                        row[j] = gaussian_w2_tied(
                            &m1.components[i].mean,
                            &m2.components[j].mean,
                        )?;
                    }
                    Ok(())
                })?;
        }
        Variant::Scaled => {
            let (p1, p2) = scale_project_joint(m1, m2)?;
            return scaled_cost(&p1, &p2);
        }
        Variant::Full => {
            let sqrts = m1
                .components
                .par_iter()
                .map(|comp| gaussian::sqrtm_psd(&comp.cov))
                .collect::<Result<Vec<_>>>()?;
            c.axis_iter_mut(Axis(0))
                .into_par_iter()
                .enumerate()
                .try_for_each(|(i, mut row)| -> Result<()> {
                    let a = &m1.components[i];
                    let trace_a = a.cov.trace();
                    for j in 0..n2 {
                        let b = &m2.components[j];
                        // Identical components are exactly at distance 0;
                        // short-circuiting keeps self-comparison diagonals
                        // clean of eigensolver residue.
                        row[j] = if a == b {
                            0.0
                        } else {
                            gaussian::w2_full_from_sqrt(&a.mean, trace_a, &sqrts[i], b)?
                        };
                    }
                    Ok(())
                })?;
        }
    }
    check_cost_entries(&c)?;
    Ok(CostMatrix { c, variant })
}

/// Scaled-variant cost matrix from two jointly projected mixtures. Both
/// sides must carry the same shared spectrum.
pub fn scaled_cost(p1: &ScaledMixture, p2: &ScaledMixture) -> Result<CostMatrix> {
    if p1.shared_eigs != p2.shared_eigs {
        return Err(Error::Domain(
            "scaled mixtures must come from one joint projection".into(),
        ));
    }
    let (n1, n2) = (p1.len(), p2.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::Shape("cannot compare an empty mixture".into()));
    }
    let mut c = Array2::zeros((n1, n2));
    c.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .try_for_each(|(i, mut row)| -> Result<()> {
            for j in 0..n2 {
                row[j] = gaussian_w2_scaled(
                    &p1.mus[i],
                    &p2.mus[j],
                    &p1.shared_eigs,
                    &p1.node_scales[i],
                    &p2.node_scales[j],
                )?;
            }
            Ok(())
        })?;
    check_cost_entries(&c)?;
    Ok(CostMatrix {
        c,
        variant: Variant::Scaled,
    })
}

/// Exact optimum of the transportation LP with uniform marginals.
pub fn solve_discrete_ot(cost: &CostMatrix) -> Result<TransportPlan> {
    let mass = simplex::solve_uniform(cost.c.view())?;
    let total: f64 = cost
        .c
        .iter()
        .zip(mass.iter())
        .map(|(c, p)| c * p)
        .sum();
    Ok(TransportPlan { mass, cost: total })
}

/// Squared mixture distance between two fitted mixtures, with its plan.
pub fn mixture_w2(
    m1: &GaussianMixture,
    m2: &GaussianMixture,
    variant: Variant,
) -> Result<(f64, TransportPlan)> {
    let cost = build_cost(m1, m2, variant)?;
    let plan = solve_discrete_ot(&cost)?;
    Ok((plan.cost, plan))
}

/// End-to-end distance between two graphs: embed every node of both
/// graphs, fit one Gaussian per node, and solve the transport problem
/// between the two mixtures. Graphs of different sizes are fine. Equal
/// node counts share the per-sample colorings (so identical graphs get
/// identical mixtures and distance 0); different node counts draw
/// independent colorings with the same parameters.
pub fn mixture_distance(
    g1: &Graph,
    g2: &Graph,
    cfg: &EmbeddingConfig,
    variant: Variant,
) -> Result<(f64, TransportPlan)> {
    let m1 = fit_mixture(&sample_embeddings(g1, cfg)?, DEFAULT_RIDGE)?;
    let m2 = fit_mixture(&sample_embeddings(g2, cfg)?, DEFAULT_RIDGE)?;
    mixture_w2(&m1, &m2, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Method;
    use crate::graph::{generate, GeneratorSpec, Model};
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mixture(n: usize, d: usize, rng: &mut ChaCha8Rng) -> GaussianMixture {
        use crate::gmm::GaussianComponent;
        let components = (0..n)
            .map(|_| {
                let b = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-0.5..0.5));
                GaussianComponent {
                    mean: DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0)),
                    cov: &b * b.transpose(),
                }
            })
            .collect();
        GaussianMixture { components }
    }

    fn fitted_mixture(seed: u64, nodes: usize) -> GaussianMixture {
        let g = generate(&GeneratorSpec {
            model: Model::Er,
            nodes,
            expected_degree: 3.0,
            seed,
        })
        .unwrap();
        let cfg = EmbeddingConfig::new(Method::Cnp, 40, 3, 2, seed).unwrap();
        fit_mixture(&sample_embeddings(&g, &cfg).unwrap(), DEFAULT_RIDGE).unwrap()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
        assert!("frobenius".parse::<Variant>().is_err());
    }

    #[test]
    fn cost_matrix_shape_and_self_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m1 = random_mixture(2, 4, &mut rng);
        let m2 = random_mixture(3, 4, &mut rng);
        for variant in Variant::ALL {
            let c = build_cost(&m1, &m2, variant).unwrap();
            assert_eq!(c.c.dim(), (2, 3));
            let self_c = build_cost(&m1, &m1, variant).unwrap();
            for i in 0..2 {
                assert!(
                    self_c.c[(i, i)].abs() < 1e-9,
                    "{variant} self-distance {}",
                    self_c.c[(i, i)]
                );
            }
        }
    }

    #[test]
    fn tied_cost_is_the_squared_distance_matrix_of_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m1 = random_mixture(3, 5, &mut rng);
        let m2 = random_mixture(4, 5, &mut rng);
        let c = build_cost(&m1, &m2, Variant::Tied).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let want: f64 = (&m1.components[i].mean - &m2.components[j].mean)
                    .iter()
                    .map(|x| x * x)
                    .sum();
                assert_abs_diff_eq!(c.c[(i, j)], &want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn build_cost_rejects_mismatched_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m1 = random_mixture(2, 3, &mut rng);
        let m2 = random_mixture(2, 4, &mut rng);
        assert!(build_cost(&m1, &m2, Variant::Tied).is_err());
        let empty = GaussianMixture { components: vec![] };
        assert!(build_cost(&m1, &empty, Variant::Full).is_err());
    }

    #[test]
    fn scaled_cost_requires_a_joint_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m1 = random_mixture(2, 3, &mut rng);
        let m2 = random_mixture(3, 3, &mut rng);
        let solo1 = crate::gmm::scale_project(&m1).unwrap();
        let solo2 = crate::gmm::scale_project(&m2).unwrap();
        assert!(scaled_cost(&solo1, &solo2).is_err());
        let (j1, j2) = scale_project_joint(&m1, &m2).unwrap();
        assert!(scaled_cost(&j1, &j2).is_ok());
    }

    #[test]
    fn identical_graphs_have_zero_distance_and_identity_plan() {
        let g = generate(&GeneratorSpec {
            model: Model::Er,
            nodes: 8,
            expected_degree: 3.0,
            seed: 14,
        })
        .unwrap();
        let cfg = EmbeddingConfig::new(Method::Ccb, 60, 4, 2, 9).unwrap();
        let (d, plan) = mixture_distance(&g, &g, &cfg, Variant::Full).unwrap();
        assert!(d.abs() < 1e-9, "self distance {d}");
        // Distinct nodes of this graph have visibly different embedding
        // distributions, so the only zero-cost coupling is the identity
        // matching with 1/n per node.
        for i in 0..8 {
            assert_abs_diff_eq!(plan.mass[(i, i)], &(1.0 / 8.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn distance_is_symmetric_across_all_variants() {
        let a = generate(&GeneratorSpec {
            model: Model::Ws,
            nodes: 10,
            expected_degree: 4.0,
            seed: 3,
        })
        .unwrap();
        let b = generate(&GeneratorSpec {
            model: Model::Ba,
            nodes: 10,
            expected_degree: 4.0,
            seed: 4,
        })
        .unwrap();
        let cfg = EmbeddingConfig::new(Method::Cnp, 80, 4, 2, 2).unwrap();
        for variant in Variant::ALL {
            let (dab, _) = mixture_distance(&a, &b, &cfg, variant).unwrap();
            let (dba, _) = mixture_distance(&b, &a, &cfg, variant).unwrap();
            assert!(
                (dab - dba).abs() < 1e-9,
                "{variant}: {dab} vs {dba}"
            );
            assert!(dab > 0.0);
        }
    }

    #[test]
    fn different_sizes_compare_cleanly() {
        let a = generate(&GeneratorSpec {
            model: Model::Er,
            nodes: 6,
            expected_degree: 3.0,
            seed: 1,
        })
        .unwrap();
        let b = generate(&GeneratorSpec {
            model: Model::Er,
            nodes: 9,
            expected_degree: 3.0,
            seed: 2,
        })
        .unwrap();
        let cfg = EmbeddingConfig::new(Method::Cnp, 50, 3, 2, 7).unwrap();
        let (d, plan) = mixture_distance(&a, &b, &cfg, Variant::Scaled).unwrap();
        assert!(d >= 0.0);
        assert_eq!(plan.mass.dim(), (6, 9));
        for row in plan.mass.rows() {
            assert_abs_diff_eq!(row.sum(), &(1.0 / 6.0), epsilon = 1e-9);
        }
        for col in plan.mass.columns() {
            assert_abs_diff_eq!(col.sum(), &(1.0 / 9.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn metric_axioms_hold_on_fitted_mixtures() {
        // √(mixture W₂²) is a metric on mixtures: spot-check symmetry,
        // self-distance and the triangle inequality on fitted triples.
        for seed in 0..6u64 {
            let a = fitted_mixture(seed * 3 + 1, 5);
            let b = fitted_mixture(seed * 3 + 2, 7);
            let c = fitted_mixture(seed * 3 + 3, 6);
            let d = |x: &GaussianMixture, y: &GaussianMixture| {
                mixture_w2(x, y, Variant::Full).unwrap().0.max(0.0).sqrt()
            };
            let (ab, ba) = (d(&a, &b), d(&b, &a));
            assert!((ab - ba).abs() <= 1e-9);
            assert!(d(&a, &a) <= 1e-9);
            let (bc, ac) = (d(&b, &c), d(&a, &c));
            assert!(
                ac <= ab + bc + 1e-7,
                "triangle violated: {ac} > {ab} + {bc}"
            );
        }
    }

    #[test]
    fn plan_csv_uses_one_based_coordinates() {
        let plan = TransportPlan {
            mass: ndarray::array![[0.5, 0.0], [0.25, 0.25]],
            cost: 1.0,
        };
        let mut buf = Vec::new();
        plan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i,j,mass");
        assert_eq!(lines[1], "1,1,0.5");
        assert_eq!(lines[4], "2,2,0.25");
        assert_eq!(lines.len(), 5);
    }
}
