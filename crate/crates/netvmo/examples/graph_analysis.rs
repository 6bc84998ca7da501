//! Communication-graph analysis: neighbor sets, connectivity, diameter, the
//! exact spanning-tree count, and the tree path-load constant W with an
//! achieving rooted tree.
//!
//! ```text
//! cargo run --release -p netvmo --example graph_analysis
//! ```

use netvmo::graph::{tree_cost, CommGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = CommGraph::new(5, &[(1, 2), (1, 3), (1, 5), (2, 3), (3, 4), (4, 5)])?;

    println!("nodes: {}, edges: {}", g.node_count(), g.edge_count());
    for i in 1..=g.node_count() {
        let n: Vec<String> = g.neighbors(i).iter().map(|j| j.to_string()).collect();
        println!("  neighbors({i}) = {{{}}}", n.join(", "));
    }
    println!("connected: {}", g.is_connected());
    println!("diameter:  {}", g.diameter()?);
    println!("spanning trees: {}", g.spanning_tree_count());

    let w = g.compute_w()?;
    println!("\ntree path-load constant W = {} (achieved from root {})", w.w, w.root);
    println!("witness tree edges (parent -> child), with per-edge load:");
    for (parent, child) in w.tree.edges() {
        println!("  {parent} -> {child}  (child depth {})", w.tree.depth(child));
    }
    println!("worst edge load of the witness: {}", tree_cost(&w.tree));

    println!("\nper-root optimum:");
    for root in 1..=g.node_count() {
        let best = g
            .enumerate_spanning_trees(root)?
            .iter()
            .map(tree_cost)
            .min()
            .unwrap();
        println!("  root {root}: {best}");
    }
    Ok(())
}
