//! Desk-scale benchmark: classify random-graph models by distance alone.
//!
//! Generates a few graphs from each of four random-graph models, computes
//! the pairwise mixture distances, and checks how well nearest-neighbour
//! classification and cluster structure recover the generating model.
//! A degree-histogram baseline runs on the same graphs for comparison.
//! The full protocol (20 graphs per model, up to 200 nodes) lives in the
//! `gmot eval` subcommand; this is a trimmed version that finishes in
//! about half a minute.
//!
//! Run: cargo run --release -p gmot --example synthetic_benchmark

use gmot::embed::{EmbeddingConfig, Method};
use gmot::eval::{hierarchical_order, knn_cv, pairwise_distances, EvalMethod};
use gmot::graph::{generate, GeneratorSpec, Model};
use gmot::ot::Variant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> gmot::Result<()> {
    let per_model = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut graphs = Vec::new();
    let mut labels = Vec::new();
    for model in Model::ALL {
        for _ in 0..per_model {
            let nodes = rng.gen_range(20..=80);
            let seed = rng.gen::<u64>();
            graphs.push(generate(&GeneratorSpec {
                model,
                nodes,
                expected_degree: 6.0,
                seed,
            })?);
            labels.push(model.to_string());
        }
    }
    println!(
        "{} graphs, {} per model, 20-80 nodes, expected degree 6\n",
        graphs.len(),
        per_model
    );

    let cfg = EmbeddingConfig::new(Method::Ccb, 600, 10, 5, 0)?;
    let mixture = EvalMethod::Mixture {
        method: Method::Ccb,
        variant: Variant::Tied,
    };
    let baseline = EvalMethod::Degree;

    println!("method      knn accuracy   silhouette");
    let mut leaf_order = Vec::new();
    for method in [mixture, baseline] {
        let dm = pairwise_distances(&graphs, &labels, method, &cfg)?;
        let report = knn_cv(&dm, 3, 10, 0.25, 1)?;
        println!(
            "{:<10}  {:.3} ± {:.3}  {:>9.3}",
            method.name(),
            report.knn_mean,
            report.knn_std,
            report.silhouette
        );
        if matches!(method, EvalMethod::Mixture { .. }) {
            leaf_order = hierarchical_order(&dm.d)?;
        }
    }

    // Average-linkage clustering on the mixture distances should keep each
    // model's graphs mostly contiguous in the leaf order.
    println!("\nleaf order from average-linkage clustering:");
    let row: Vec<&str> = leaf_order.iter().map(|&i| labels[i].as_str()).collect();
    println!("{}", row.join(" "));
    let breaks = row.windows(2).filter(|w| w[0] != w[1]).count();
    println!(
        "{} label changes along the order (minimum possible is {})",
        breaks,
        Model::ALL.len() - 1
    );
    Ok(())
}
