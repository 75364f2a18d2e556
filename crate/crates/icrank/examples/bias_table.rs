//! Estimate bias-current savings of rank-based fan-out over splitter trees for
//! basic cells at FO2/FO4/FO8, in both ranking styles. Uses the bundled
//! calibration library; swap in process-characterized numbers for real use.
//!
//!     cargo run --example bias_table

use icrank::config::RunConfig;
use icrank::cost::{bias_comparison, BiasMode, CellLibrary};
use icrank::netlist::CellKind;
use icrank::AmplifierPolicy;

fn main() {
    let ladder = RunConfig::default().ladder().expect("default ladder");
    let policy = AmplifierPolicy::sqrt2();
    let lib = CellLibrary::default();
    println!("cell library: {}\n", lib.label);
    println!("| cell | fan-out | flexible rank | matched rank |");
    println!("|------|---------|--------------:|-------------:|");
    for kind in [
        CellKind::And,
        CellKind::Or,
        CellKind::Xor,
        CellKind::Not,
        CellKind::Dff,
    ] {
        for n in [2u32, 4, 8] {
            let flex = bias_comparison(kind, n, BiasMode::Flexible, &lib, &ladder, &policy)
                .expect("feasible");
            let matched = bias_comparison(kind, n, BiasMode::Matched, &lib, &ladder, &policy)
                .expect("feasible");
            println!(
                "| {} | FO{} | {:.1}% | {:.1}% |",
                kind.name(),
                n,
                flex.savings_pct,
                matched.savings_pct
            );
        }
    }
}
