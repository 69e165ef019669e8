//! Build graphs in memory and load them from the two supported file
//! formats: whitespace edge lists (`u v [w]`, 1-based, `#` comments) and
//! dense CSV matrices (symmetrized, negatives clamped — correlation
//! matrices load directly).
//!
//! Run: cargo run --release -p gmot --example load_and_inspect

use gmot::graph::{load_dense_matrix, load_edge_list, Graph};

fn main() -> gmot::Result<()> {
    // A weighted 5-cycle with one chord, built programmatically.
    let cycle = Graph::from_weighted_edges(
        5,
        [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 3, 2.0),
            (3, 4, 1.0),
            (4, 0, 1.0),
            (1, 3, 0.5),
        ],
    )?;
    println!(
        "5-cycle with a chord: {} nodes, {} edges, spectral norm {:.4}",
        cycle.node_count(),
        cycle.edge_count(),
        cycle.spectral_norm()
    );
    for v in 0..cycle.node_count() {
        println!("  node {v}: weighted degree {:.1}", cycle.weighted_degree(v));
    }

    // The same structure as an edge-list file (node ids are 1-based).
    let edge_text = "\
# 5 nodes, 6 edges
1 2 1
2 3 1
3 4 2
4 5 1
5 1 1
2 4 0.5
";
    let from_text = load_edge_list(edge_text.as_bytes(), "inline")?;
    assert_eq!(from_text.edges(), cycle.edges());
    println!("edge-list round trip matches the in-memory graph");

    // A correlation-style dense matrix: symmetrized, negatives dropped.
    let csv = "0,0.8,-0.2\n0.8,0,0.4\n-0.2,0.4,0\n";
    let from_csv = load_dense_matrix(csv.as_bytes(), "inline")?;
    println!(
        "dense CSV: {} nodes, {} edges (negative correlation dropped)",
        from_csv.node_count(),
        from_csv.edge_count()
    );
    assert_eq!(from_csv.weight(0, 2), 0.0);
    assert_eq!(from_csv.weight(1, 2), 0.4);

    Ok(())
}
