//! Parse a gate-level netlist (.bench or structural .v), profile its fan-out
//! and stages, and compare splitter-based vs rank-based JJ budgets.
//!
//!     cargo run --example analyze_netlist -- [path/to/netlist]

use icrank::config::{ReportFormat, RunConfig};
use icrank::report::{analyze_netlist, parse_netlist_file, render_analyze};
use std::path::PathBuf;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/netlists/c17.bench")
        });
    let netlist = match parse_netlist_file(&path) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let report = analyze_netlist(&netlist, &RunConfig::default()).expect("analysis");
    print!("{}", render_analyze(&report, ReportFormat::Md));
}
