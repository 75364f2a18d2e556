//! Command-line front end: rule tables, fan-out trees, netlist analyses, rank
//! assignment, corpus benchmarking, and chain-topology export.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 parse error(s),
//! 3 infeasibility.

use clap::{Args, Parser, Subcommand, ValueEnum};
use icrank::chain::connection_rule_table;
use icrank::config::{ReportFormat, RunConfig};
use icrank::cost::ClockMode;
use icrank::report;
use icrank::tree::{ranked_tree, splitter_tree, StageOrder, TreeMode};
use icrank::{assign_ranks, cost, export_tree_netlist, plan_clock_tree, verify_assignment};
use icrank::{AssignmentOptions, ChainModel};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "icrank",
    version,
    about = "SFQ fan-out synthesis with critical-current ranks"
)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Globals {
    /// TOML run configuration; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Amplification step size inside a JTL.
    #[arg(long, global = true, value_enum)]
    step: Option<StepArg>,
    /// JTL-count model for amplifying chains.
    #[arg(long, global = true, value_enum)]
    chain_model: Option<ChainModelArg>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Cell-library TOML (bundled calibration data when omitted).
    #[arg(long, global = true)]
    cell_lib: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Per-stage fan-out of the clock tree.
    #[arg(long, global = true)]
    clock_arity: Option<u32>,
    /// Clock-tree block sizing.
    #[arg(long, global = true, value_enum)]
    clock_mode: Option<ClockModeArg>,
    /// Ignore primary-output reads when counting fan-out.
    #[arg(long, global = true)]
    no_output_taps: bool,
    /// Count DC-to-SFQ input converters as clock sinks.
    #[arg(long, global = true)]
    clock_input_converters: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StepArg {
    Sqrt2,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainModelArg {
    Gap,
    Eq2,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockModeArg {
    RightSized,
    ModularUniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Balanced,
    MinCost,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rank-to-rank connection-rule table.
    Table,
    /// Compare conventional vs ranked trees for one fan-out.
    Tree {
        n: u64,
        /// Stage ordering of the ranked tree.
        #[arg(long, value_enum, default_value = "balanced")]
        order: OrderArg,
    },
    /// Fan-out, stage, and cost analysis of one netlist file.
    Analyze { file: PathBuf },
    /// Run the five-step rank assignment and clock planning on a netlist.
    Assign {
        file: PathBuf,
        /// Verify a previously saved assignment (JSON) instead of solving.
        #[arg(long)]
        load: Option<PathBuf>,
    },
    /// Analyze every .bench/.v netlist in a directory.
    Bench { dir: Option<PathBuf> },
    /// Export chain topology: a fan-out count builds a ranked tree; a netlist
    /// path exports the chains of its rank assignment.
    Export {
        target: String,
        /// Block sizing for fan-out trees.
        #[arg(long, value_enum, default_value = "right-sized")]
        mode: ClockModeArg,
        #[arg(long, value_enum, default_value = "balanced")]
        order: OrderArg,
    },
}

fn load_config(globals: &Globals) -> Result<RunConfig, icrank::Error> {
    let mut config = match &globals.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(step) = globals.step {
        config.p_a = match step {
            StepArg::Sqrt2 => std::f64::consts::SQRT_2,
            StepArg::Two => 2.0,
        };
    }
    if let Some(model) = globals.chain_model {
        config.chain_model = match model {
            ChainModelArg::Gap => ChainModel::Gap,
            ChainModelArg::Eq2 => ChainModel::Eq2,
        };
    }
    if let Some(format) = globals.format {
        config.format = match format {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Md => ReportFormat::Md,
            FormatArg::Json => ReportFormat::Json,
        };
    }
    if let Some(path) = &globals.cell_lib {
        config.cell_library = Some(path.clone());
    }
    if let Some(arity) = globals.clock_arity {
        config.clock_arity = arity;
    }
    if let Some(mode) = globals.clock_mode {
        config.clock_mode = match mode {
            ClockModeArg::RightSized => ClockMode::RightSized,
            ClockModeArg::ModularUniform => ClockMode::ModularUniform,
        };
    }
    if globals.no_output_taps {
        config.count_output_taps = false;
    }
    if globals.clock_input_converters {
        config.clock_input_converters = true;
    }
    Ok(config.validated()?)
}

fn emit(globals: &Globals, text: &str) -> std::io::Result<()> {
    match &globals.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_code_for(err: &icrank::Error) -> u8 {
    use icrank::Error;
    match err {
        Error::Parse(_) => 2,
        Error::Netlist(_) => 2,
        Error::Chain(icrank::chain::ChainError::InfeasibleFanout { .. }) => 3,
        Error::Cost(cost::CostError::InfeasibleFanout { .. }) => 3,
        Error::Assign(e) => match e {
            icrank::assign::AssignError::StageInfeasible { .. }
            | icrank::assign::AssignError::InfeasibleNet { .. } => 3,
            icrank::assign::AssignError::Netlist(_) => 2,
            _ => 1,
        },
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<u8, icrank::Error> {
    let config = load_config(&cli.globals)?;
    let ladder = config.ladder()?;
    let policy = config.policy();
    match &cli.command {
        Command::Table => {
            let table = connection_rule_table(&ladder, &policy);
            emit(
                &cli.globals,
                &report::render_rule_table(&ladder, &table, config.format),
            )
            .map_err(io_err)?;
            Ok(0)
        }
        Command::Tree { n, order } => {
            let order = match order {
                OrderArg::Balanced => StageOrder::Balanced,
                OrderArg::MinCost => StageOrder::MinCost,
            };
            let conventional = splitter_tree(*n)?;
            let right_sized = ranked_tree(*n, &ladder, &policy, TreeMode::RankedRightSized, order)?;
            let modular = ranked_tree(*n, &ladder, &policy, TreeMode::RankedModularUniform, order)?;
            let savings = cost::savings_pct(conventional.jj_cost, modular.jj_cost);
            let text = format!(
                "fan-out {n}\n\
                 conventional: {} splitters, {} JJs, depth {}\n\
                 ranked modular-uniform: {} blocks, {} JJs, depth {}, savings {:.1}%\n\
                 ranked right-sized: {} blocks, {} JJs, depth {}, savings {:.1}%\n",
                conventional.node_count,
                conventional.jj_cost,
                conventional.depth,
                modular.node_count,
                modular.jj_cost,
                modular.depth,
                savings,
                right_sized.node_count,
                right_sized.jj_cost,
                right_sized.depth,
                cost::savings_pct(conventional.jj_cost, right_sized.jj_cost),
            );
            emit(&cli.globals, &text).map_err(io_err)?;
            Ok(0)
        }
        Command::Analyze { file } => {
            let netlist = report::parse_netlist_file(file)?;
            let analysis = report::analyze_netlist(&netlist, &config)?;
            emit(
                &cli.globals,
                &report::render_analyze(&analysis, config.format),
            )
            .map_err(io_err)?;
            Ok(0)
        }
        Command::Assign { file, load } => {
            let netlist = report::parse_netlist_file(file)?;
            let opts = AssignmentOptions {
                count_output_taps: config.count_output_taps,
                count_forward_tap: config.count_forward_tap,
                clock_arity: config.clock_arity,
                ..AssignmentOptions::default()
            };
            let assignment = match load {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(io_err)?;
                    serde_json::from_str(&text).map_err(|e| {
                        icrank::Error::Config(icrank::config::ConfigError::Parse {
                            path: path.clone(),
                            msg: e.to_string(),
                        })
                    })?
                }
                None => {
                    let mut a = assign_ranks(&netlist, &ladder, &policy, &opts)?;
                    a.clock_plan = Some(plan_clock_tree(&netlist, &a, &ladder, &policy, &opts)?);
                    a
                }
            };
            let violations = verify_assignment(&netlist, &assignment, &ladder, &policy);
            let text = match config.format {
                ReportFormat::Json => {
                    serde_json::to_string_pretty(&assignment).expect("serializable") + "\n"
                }
                _ => render_assignment_text(&assignment, &violations),
            };
            emit(&cli.globals, &text).map_err(io_err)?;
            Ok(if violations.is_empty() { 0 } else { 3 })
        }
        Command::Bench { dir } => {
            let dir = dir
                .clone()
                .or_else(|| config.corpus_dir.clone())
                .ok_or_else(|| {
                    icrank::Error::Config(icrank::config::ConfigError::Invalid {
                        field: "corpus_dir".into(),
                        msg: "no corpus directory given (argument or config)".into(),
                    })
                })?;
            let outcome = report::run_corpus(&dir, &config)?;
            let lib_label = config.cell_library()?.label;
            let mut text = report::render_bench_table(&outcome.rows, config.format, &lib_label);
            for (file, err) in &outcome.failures {
                text.push_str(&format!("parse failure: {}: {}\n", file.display(), err));
            }
            emit(&cli.globals, &text).map_err(io_err)?;
            if !outcome.failures.is_empty() {
                Ok(2)
            } else if outcome.rows.is_empty() {
                Ok(1)
            } else {
                Ok(0)
            }
        }
        Command::Export {
            target,
            mode,
            order,
        } => {
            let text = if let Ok(n) = target.parse::<u64>() {
                let mode = match mode {
                    ClockModeArg::RightSized => TreeMode::RankedRightSized,
                    ClockModeArg::ModularUniform => TreeMode::RankedModularUniform,
                };
                let order = match order {
                    OrderArg::Balanced => StageOrder::Balanced,
                    OrderArg::MinCost => StageOrder::MinCost,
                };
                let tree = ranked_tree(n, &ladder, &policy, mode, order)?;
                export_tree_netlist(&tree, &ladder)?
            } else {
                let netlist = report::parse_netlist_file(&PathBuf::from(target))?;
                let opts = AssignmentOptions {
                    count_output_taps: config.count_output_taps,
                    count_forward_tap: config.count_forward_tap,
                    clock_arity: config.clock_arity,
                    ..AssignmentOptions::default()
                };
                let mut a = assign_ranks(&netlist, &ladder, &policy, &opts)?;
                a.clock_plan = Some(plan_clock_tree(&netlist, &a, &ladder, &policy, &opts)?);
                render_chain_export(&a, &ladder)
            };
            emit(&cli.globals, &text).map_err(io_err)?;
            Ok(0)
        }
    }
}

fn render_assignment_text(
    assignment: &icrank::RankAssignment,
    violations: &[icrank::assign::AssignViolation],
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# rank assignment: {}\n\n",
        assignment.netlist_name
    ));
    out.push_str(&format!(
        "seed stage {} -> rank {}\n\n",
        assignment.seed_stage, assignment.seed_rank
    ));
    out.push_str("## cell ranks\n");
    for (cell, rank) in &assignment.per_cell_rank {
        out.push_str(&format!("{cell} {rank}\n"));
    }
    out.push_str("\n## inserted chains\n");
    if assignment.inserted_chains.is_empty() {
        out.push_str("(none)\n");
    }
    for (net, chain) in &assignment.inserted_chains {
        let stages: Vec<String> = chain
            .stages
            .iter()
            .map(|s| format!("({},{})", s.input_rank.0, s.output_rank.0))
            .collect();
        out.push_str(&format!(
            "net {net}: {chain}, {} JTLs, stages {}\n",
            chain.num_jtls(),
            stages.join(" ")
        ));
    }
    out.push_str("\n## input source ranks\n");
    for (input, rank) in &assignment.input_source_ranks {
        out.push_str(&format!("{input} {rank}\n"));
    }
    if let Some(plan) = &assignment.clock_plan {
        out.push_str(&format!(
            "\n## clock plan\nroot {} fans {} (line rank {}), {} expanders, {} lines\n",
            plan.root_rank,
            plan.root_fanout,
            plan.line_rank,
            plan.expanders.len(),
            plan.lines.len()
        ));
        for line in &plan.lines {
            let chain = line
                .chain
                .as_ref()
                .map(|c| format!("{c}"))
                .unwrap_or_else(|| "direct".to_string());
            out.push_str(&format!(
                "line {} -> {} cells at {}: {}\n",
                chain,
                line.cells.len(),
                line.target_rank,
                line.cells.join(" ")
            ));
        }
        out.push_str(&format!(
            "clock JJs: ranked {} vs conventional {}\n",
            plan.jj_cost, plan.conventional_jj_cost
        ));
    }
    out.push_str(&format!(
        "\n## verification\nviolations: {}\n",
        violations.len()
    ));
    for v in violations {
        out.push_str(&format!("- {v}\n"));
    }
    out
}

fn render_chain_export(assignment: &icrank::RankAssignment, ladder: &icrank::RankLadder) -> String {
    let mut out = String::new();
    out.push_str("chain-topology v1\n");
    let mut chains: Vec<(&String, &icrank::JtlChainPlan)> =
        assignment.inserted_chains.iter().collect();
    if let Some(plan) = &assignment.clock_plan {
        out.push_str(&format!(
            "clock root {} fan {} expanders {}\n",
            plan.root_rank,
            plan.root_fanout,
            plan.expanders.len()
        ));
        chains.extend(
            plan.lines
                .iter()
                .filter_map(|l| l.chain.as_ref().map(|c| (&l.cells[0], c))),
        );
    }
    for (site, chain) in chains {
        let stages: Vec<String> = chain
            .stages
            .iter()
            .map(|s| {
                format!(
                    "({},{})",
                    ladder.rank_to_current(s.input_rank).unwrap_or(0),
                    ladder.rank_to_current(s.output_rank).unwrap_or(0)
                )
            })
            .collect();
        out.push_str(&format!(
            "chain {chain} at {site} stages_ua [{}]\n",
            stages.join(",")
        ));
    }
    out
}

fn io_err(e: std::io::Error) -> icrank::Error {
    icrank::Error::Config(icrank::config::ConfigError::Io {
        path: PathBuf::from("<output>"),
        source: e,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
