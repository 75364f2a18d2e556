//! Fan-out synthesis and resource estimation for single-flux-quantum (SFQ) logic
//! built on discrete critical-current "ranks".
//!
//! SFQ cells drive pulses, and a cell's baseline critical current decides how many
//! inputs it can switch downstream. Conventional designs buy fan-out with trees of
//! three-JJ splitters. This crate instead discretizes critical currents onto a
//! geometric ladder (default 46..500 µA, step √2), labels each rung with a rank,
//! and plans chains of two-JJ amplifying JTLs that climb the ladder ahead of each
//! fan-out point. On top of the rank algebra it provides:
//!
//! - gate-level netlist parsing (`.bench` and a structural Verilog subset) with
//!   fan-out and stage analysis,
//! - splitter-tree vs. amplifying-chain tree synthesis with JJ cost accounting,
//! - a five-step rank-assignment pass with clock-tree planning and a rule checker,
//! - corpus-level reporting (CSV / markdown / JSON) of JJ and bias-current savings.
//!
//! The `icrank` binary exposes the same functionality as subcommands; the
//! `examples/` directory has one runnable example per capability.

pub mod assign;
pub mod chain;
pub mod config;
pub mod cost;
pub mod ladder;
pub mod netlist;
pub mod report;
pub mod tree;

pub use assign::{assign_ranks, ksa_example, plan_clock_tree, verify_assignment};
pub use assign::{AssignmentOptions, ClockPlan, RankAssignment, StagePolicy};
pub use chain::{
    connection_rule_table, fanout_capacity, plan_chain, required_source_rank, AmplifierPolicy,
    ChainModel, ConnectionRule, JtlChainPlan, JtlStage,
};
pub use config::RunConfig;
pub use cost::{
    bias_savings, clock_tree_cost, net_split_cost, total_cost, BiasMode, CellLibrary, ClockMode,
    CostReport,
};
pub use ladder::{build_ladder, Rank, RankLadder};
pub use netlist::{
    parse_bench, parse_verilog_subset, Cell, CellKind, FanoutProfile, Netlist, StageMap,
};
pub use tree::{export_tree_netlist, ranked_tree, splitter_tree, FanoutTree, StageOrder, TreeMode};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Ladder(#[from] ladder::LadderError),
    #[error("{0}")]
    Chain(#[from] chain::ChainError),
    #[error("{0}")]
    Parse(#[from] netlist::ParseError),
    #[error("{0}")]
    Netlist(#[from] netlist::NetlistError),
    #[error("{0}")]
    Tree(#[from] tree::TreeError),
    #[error("{0}")]
    Cost(#[from] cost::CostError),
    #[error("{0}")]
    Assign(#[from] assign::AssignError),
    #[error("{0}")]
    Config(#[from] config::ConfigError),
}

pub type Result<T> = std::result::Result<T, Error>;
