//! Print the rank-to-rank connection-rule table for the default ladder:
//! fan-out capacity to the lower-left of the FO1 diagonal, amplifying-JTL
//! counts to the upper-right.
//!
//!     cargo run --example rule_table

use icrank::chain::connection_rule_table;
use icrank::config::{ReportFormat, RunConfig};
use icrank::report::render_rule_table;

fn main() {
    let config = RunConfig::default();
    let ladder = config.ladder().expect("default ladder");
    println!(
        "ladder: {:?} µA (step {:.4})\n",
        ladder.currents(),
        ladder.step_ratio()
    );
    let table = connection_rule_table(&ladder, &config.policy());
    print!("{}", render_rule_table(&ladder, &table, ReportFormat::Md));

    // The same table under the alternate chain-count model: even rank
    // distances drop to half the JTLs.
    let eq2 = config.policy().with_model(icrank::ChainModel::Eq2);
    let table = connection_rule_table(&ladder, &eq2);
    println!("\nwith the eq2 chain model:\n");
    print!("{}", render_rule_table(&ladder, &table, ReportFormat::Md));
}
