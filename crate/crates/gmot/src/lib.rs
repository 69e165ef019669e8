//! Unsupervised distances between graphs of possibly different sizes.
//!
//! The pipeline: each node of a graph is embedded many times under random
//! colorings of the node set, the per-node samples are summarized as a
//! Gaussian, the graph becomes a uniform Gaussian mixture, and the distance
//! between two graphs is the exact discrete optimal-transport cost between
//! their mixtures under the closed-form W₂² between Gaussian components.
//! The optimal coupling doubles as a soft node alignment.
//!
//! ```
//! use gmot::embed::{EmbeddingConfig, Method};
//! use gmot::graph::{generate, GeneratorSpec, Model};
//! use gmot::ot::{mixture_distance, Variant};
//!
//! let spec = GeneratorSpec {
//!     model: Model::Er,
//!     nodes: 24,
//!     expected_degree: 5.0,
//!     seed: 7,
//! };
//! let a = generate(&spec).unwrap();
//! let b = generate(&GeneratorSpec { seed: 8, ..spec }).unwrap();
//! let cfg = EmbeddingConfig::new(Method::Cnp, 64, 4, 2, 1).unwrap();
//! let (dist, plan) = mixture_distance(&a, &b, &cfg, Variant::Tied).unwrap();
//! assert!(dist > 0.0);
//! assert_eq!(plan.mass.dim(), (24, 24));
//! ```
//!
//! Modules mirror the pipeline stages: [`graph`] (loading, generation,
//! relabeling, spectral norm), [`embed`] (randomized node embeddings),
//! [`gmm`] (Gaussian mixture fitting and covariance scaling), [`ot`]
//! (component distances, cost matrices, exact transport), [`eval`]
//! (pairwise distance matrices, baselines, classification and clustering
//! metrics) and [`run`] (the dataset/distance/eval commands behind the
//! `gmot` binary).

pub mod embed;
mod error;
pub mod eval;
pub mod gmm;
pub mod graph;
pub mod ot;
pub mod run;

pub use error::{Error, Result};
