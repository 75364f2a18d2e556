//! Build a large fan-out two ways — a conventional splitter tree and trees of
//! rank-1-to-8 amplifying chain blocks — and compare JJ budgets.
//!
//!     cargo run --example fanout_tree -- [fanout]

use icrank::config::RunConfig;
use icrank::cost::savings_pct;
use icrank::tree::{ranked_tree, splitter_tree, StageOrder, TreeMode};
use icrank::AmplifierPolicy;

fn main() {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1024);
    let ladder = RunConfig::default().ladder().expect("default ladder");
    let policy = AmplifierPolicy::sqrt2();

    let conventional = splitter_tree(n).expect("fanout >= 1");
    println!(
        "FO{n} conventional: {} splitters, {} JJs, {} stages",
        conventional.node_count, conventional.jj_cost, conventional.depth
    );

    for (label, mode) in [
        ("modular-uniform", TreeMode::RankedModularUniform),
        ("right-sized", TreeMode::RankedRightSized),
    ] {
        for (order_label, order) in [
            ("balanced", StageOrder::Balanced),
            ("min-cost", StageOrder::MinCost),
        ] {
            let tree = ranked_tree(n, &ladder, &policy, mode, order).expect("fanout >= 1");
            println!(
                "FO{n} ranked {label}/{order_label}: {} blocks, {} JJs, {} stages, savings {:.1}%",
                tree.node_count,
                tree.jj_cost,
                tree.depth,
                savings_pct(conventional.jj_cost, tree.jj_cost)
            );
        }
    }
}
