//! Walk the five-step rank assignment over the bundled fully-synchronous
//! 2-bit Kogge-Stone adder: seed the widest stage from the clock root,
//! propagate ranks, insert amplifying chains, plan the clock tree, verify.
//!
//!     cargo run --example rank_ksa

use icrank::config::RunConfig;
use icrank::{
    assign_ranks, ksa_example, plan_clock_tree, verify_assignment, AmplifierPolicy,
    AssignmentOptions,
};

fn main() {
    let netlist = ksa_example();
    let ladder = RunConfig::default().ladder().expect("default ladder");
    let policy = AmplifierPolicy::sqrt2();
    let opts = AssignmentOptions::default();

    let stages = netlist.levelize().expect("acyclic");
    println!("stages (clocked cells): {:?}", stages.stage_sizes);

    let mut assignment = assign_ranks(&netlist, &ladder, &policy, &opts).expect("feasible");
    println!(
        "\nstep 1 seed: stage {} -> {}",
        assignment.seed_stage, assignment.seed_rank
    );
    println!("\nranks after steps 2-4:");
    for stage_idx in stages.stage_sizes.keys() {
        let mut cells: Vec<&String> = stages
            .per_cell
            .iter()
            .filter(|(_, s)| *s == stage_idx)
            .map(|(c, _)| c)
            .collect();
        cells.sort();
        let ranks: Vec<String> = cells
            .iter()
            .map(|c| format!("{c}={}", assignment.per_cell_rank[*c]))
            .collect();
        println!("  stage {stage_idx}: {}", ranks.join(" "));
    }

    println!("\ninserted amplifying chains:");
    for (net, chain) in &assignment.inserted_chains {
        println!("  after {net}: {chain} ({} JTLs)", chain.num_jtls());
    }
    println!("\nrequired input driving ranks:");
    for (input, rank) in &assignment.input_source_ranks {
        println!("  {input}: {rank}");
    }

    let plan = plan_clock_tree(&netlist, &assignment, &ladder, &policy, &opts).expect("clock");
    println!(
        "\nstep 5 clock tree: root {} fans {}, {} expander(s), {} lines, {} JJs (vs {} with splitters)",
        plan.root_rank,
        plan.root_fanout,
        plan.expanders.len(),
        plan.lines.len(),
        plan.jj_cost,
        plan.conventional_jj_cost
    );
    for line in &plan.lines {
        let chain = line
            .chain
            .as_ref()
            .map(|c| c.to_string())
            .unwrap_or_else(|| "direct".into());
        println!(
            "  {} -> {} cells at {}: {}",
            chain,
            line.cells.len(),
            line.target_rank,
            line.cells.join(" ")
        );
    }
    assignment.clock_plan = Some(plan);

    let violations = verify_assignment(&netlist, &assignment, &ladder, &policy);
    println!("\nrule check: {} violations", violations.len());
    for v in &violations {
        println!("  {v}");
    }
}
