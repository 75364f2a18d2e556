//! Reproduce the ISCAS'85 savings table over the bundled corpus: per-benchmark
//! JJ savings for data splitting at both amplification step sizes, clock
//! distribution, and whole-netlist totals.
//!
//!     cargo run --example corpus_table -- [corpus_dir]

use icrank::config::{ReportFormat, RunConfig};
use icrank::report::{render_bench_table, run_corpus};
use std::path::PathBuf;

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/iscas85"));
    let config = RunConfig::default();
    let outcome = run_corpus(&dir, &config).expect("corpus directory");
    for (file, err) in &outcome.failures {
        eprintln!("skipping {}: {}", file.display(), err);
    }
    let label = config.cell_library().expect("library").label;
    print!(
        "{}",
        render_bench_table(&outcome.rows, ReportFormat::Md, &label)
    );
}
