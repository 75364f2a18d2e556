//! Export the chain topology of a ranked fan-out tree — every JTL stage with
//! its two JJ critical currents — for hand-translation to an analog deck.
//!
//!     cargo run --example export_chain -- [fanout]

use icrank::config::RunConfig;
use icrank::tree::{export_tree_netlist, ranked_tree, StageOrder, TreeMode};
use icrank::AmplifierPolicy;

fn main() {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    let ladder = RunConfig::default().ladder().expect("default ladder");
    let tree = ranked_tree(
        n,
        &ladder,
        &AmplifierPolicy::sqrt2(),
        TreeMode::RankedRightSized,
        StageOrder::Balanced,
    )
    .expect("fanout >= 1");
    print!(
        "{}",
        export_tree_netlist(&tree, &ladder).expect("ranked tree")
    );
}
