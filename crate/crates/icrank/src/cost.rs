//! JJ and bias-current cost models: conventional splitters versus rank-based
//! amplifying chains.
//!
//! Data splitting assumes logic cells sit at rank 1 and are amplified only in
//! advance of fan-out: a net with fan-out `n ≤ 8` costs one chain R1:n, larger
//! nets stage through FO8 blocks. Clock distribution uses arity-limited chain
//! blocks (FO3 by default, the fan-out with the widest simulated bias margins)
//! over all clocked cells. Bias estimates charge each splitter or JTL JJ a
//! fixed fraction β of its critical current and scale cell bias linearly with
//! the rank current ratio.

use crate::chain::{plan_chain, required_source_rank, AmplifierPolicy};
use crate::ladder::{Rank, RankLadder};
use crate::netlist::{CellKind, Netlist, StageMap};
use crate::tree::{even_split_tree, saturated_tree, TreeMode};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SPLITTER_JJS: u64 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CostError {
    #[error("cell kind '{0}' missing from the cell library")]
    UnknownCellKind(String),
    #[error("fan-out {fanout} infeasible: needs rank {needed} above the {top}-rung ladder")]
    InfeasibleFanout { fanout: u32, needed: u32, top: u32 },
    #[error("cell library: {0}")]
    Library(String),
    #[error("bad fan-out {0} (must be >= 1)")]
    BadFanout(u32),
}

/// How the ranked clock tree sizes its chain blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ClockMode {
    /// Last partial block uses the shortest chain that still covers its fan-out.
    #[default]
    RightSized,
    /// Every block is the full chain for the configured arity.
    ModularUniform,
}

/// Default per-stage fan-out of the clock tree. FO3 carries the widest
/// simulated bias margins of the chain-block configurations.
pub const DEFAULT_CLOCK_ARITY: u32 = 3;

/// Conventional-vs-ranked cost comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub jj_conventional: u64,
    pub jj_ranked: u64,
    pub jj_logic: Option<u64>,
    pub savings_pct: f64,
    /// Per-category (conventional, ranked) JJ counts.
    pub breakdown: BTreeMap<String, (u64, u64)>,
    /// Free-form report annotations (stage sizes, modes, library label).
    pub details: BTreeMap<String, String>,
}

pub fn savings_pct(conventional: u64, ranked: u64) -> f64 {
    if conventional == 0 {
        0.0
    } else {
        100.0 * (conventional as f64 - ranked as f64) / conventional as f64
    }
}

impl CostReport {
    pub fn new(conventional: u64, ranked: u64) -> Self {
        CostReport {
            jj_conventional: conventional,
            jj_ranked: ranked,
            jj_logic: None,
            savings_pct: savings_pct(conventional, ranked),
            breakdown: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    /// Recompute the savings percentage from the stored counts.
    pub fn recomputed_savings_pct(&self) -> f64 {
        savings_pct(self.jj_conventional, self.jj_ranked)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CellEntry {
    pub jj_count: u32,
    /// Total bias current (µA) of the cell at the library reference rank.
    pub bias_current_ua: f64,
}

/// Cell library: JJ counts and bias currents per kind, plus the biasing rule.
/// The bundled values are calibration estimates, not measurements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellLibrary {
    /// Keyed by cell-kind name (AND, OR, …).
    pub cells: BTreeMap<String, CellEntry>,
    /// Bias current per JJ as a fraction of its critical current.
    pub bias_per_jj: f64,
    /// Splitter leg current I_X (µA).
    pub splitter_bias_ua: f64,
    /// Baseline critical current (µA) at which the cell biases are
    /// characterized; must sit on the ladder. Bias scales linearly with the
    /// rank current ratio from this rung.
    #[serde(default = "default_reference_current")]
    pub reference_current_ua: f64,
    /// Free-form provenance label, echoed into reports.
    #[serde(default)]
    pub label: String,
}

fn default_reference_current() -> f64 {
    250.0
}

impl Default for CellLibrary {
    fn default() -> Self {
        let toml = include_str!("../data/cell_library.toml");
        CellLibrary::from_toml_str(toml).expect("bundled cell library")
    }
}

impl CellLibrary {
    pub fn from_toml_str(text: &str) -> Result<Self, CostError> {
        let lib: CellLibrary =
            toml::from_str(text).map_err(|e| CostError::Library(e.to_string()))?;
        if lib.bias_per_jj <= 0.0 || lib.bias_per_jj > 1.5 {
            return Err(CostError::Library(format!(
                "bias_per_jj {} outside (0, 1.5]",
                lib.bias_per_jj
            )));
        }
        if lib.splitter_bias_ua <= 0.0 {
            return Err(CostError::Library(
                "splitter_bias_ua must be positive".into(),
            ));
        }
        if let Some((kind, e)) = lib
            .cells
            .iter()
            .find(|(_, e)| e.jj_count == 0 || e.bias_current_ua <= 0.0)
        {
            return Err(CostError::Library(format!(
                "cell {kind}: jj_count {} / bias {} must be positive",
                e.jj_count, e.bias_current_ua
            )));
        }
        Ok(lib)
    }

    pub fn entry(&self, kind: CellKind) -> Result<CellEntry, CostError> {
        self.cells
            .get(kind.name())
            .copied()
            .ok_or_else(|| CostError::UnknownCellKind(kind.name().to_string()))
    }

    pub fn jj_count(&self, kind: CellKind) -> Result<u64, CostError> {
        Ok(self.entry(kind)?.jj_count as u64)
    }
}

/// JJ cost of splitting one net with fan-out `n`, conventional vs ranked
/// (rank-1 logic baseline, amplify before fan-out, per-stage fan-out capped by
/// the ladder).
pub fn net_split_cost(
    n: u32,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
) -> Result<CostReport, CostError> {
    if n == 0 {
        return Err(CostError::BadFanout(n));
    }
    let conventional = SPLITTER_JJS * (n as u64 - 1);
    let ranked = ranked_split_jjs(n, ladder, policy);
    let mut report = CostReport::new(conventional, ranked);
    report
        .breakdown
        .insert("data_splitting".into(), (conventional, ranked));
    Ok(report)
}

pub(crate) fn ranked_split_jjs(n: u32, ladder: &RankLadder, policy: &AmplifierPolicy) -> u64 {
    if n <= 1 {
        return 0;
    }
    let arity = ladder.len();
    if n <= arity {
        let top = required_source_rank(n, Rank(1), ladder).expect("n <= ladder len");
        plan_chain(Rank(1), top, policy).expect("uphill").jj_count as u64
    } else {
        even_split_tree(n as u64, ladder, policy, arity)
            .expect("fanout >= 1")
            .jj_cost
    }
}

/// Clock-tree cost over all clocked cells of a stage map. `extra_sinks`
/// covers clocked periphery outside the stage map, such as DC-to-SFQ input
/// converters when a flow counts them on the clock tree.
pub fn clock_tree_cost(
    stages: &StageMap,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    mode: ClockMode,
    arity: u32,
    extra_sinks: u32,
) -> Result<CostReport, CostError> {
    let sinks = stages.total_clocked() as u64 + extra_sinks as u64;
    let conventional = SPLITTER_JJS * sinks.saturating_sub(1);
    let tree_mode = match mode {
        ClockMode::RightSized => TreeMode::RankedRightSized,
        ClockMode::ModularUniform => TreeMode::RankedModularUniform,
    };
    let ranked = if sinks <= 1 {
        0
    } else {
        saturated_tree(sinks, ladder, policy, arity, tree_mode)
            .map_err(|e| CostError::Library(e.to_string()))?
            .jj_cost
    };
    let alternate = if sinks <= 1 {
        0
    } else {
        let other = match mode {
            ClockMode::RightSized => TreeMode::RankedModularUniform,
            ClockMode::ModularUniform => TreeMode::RankedRightSized,
        };
        saturated_tree(sinks, ladder, policy, arity, other)
            .map_err(|e| CostError::Library(e.to_string()))?
            .jj_cost
    };
    let mut report = CostReport::new(conventional, ranked);
    report
        .breakdown
        .insert("clock".into(), (conventional, ranked));
    report.details.insert(
        "clock_mode".into(),
        match mode {
            ClockMode::RightSized => format!("right_sized (modular_uniform: {alternate} JJs)"),
            ClockMode::ModularUniform => format!("modular_uniform (right_sized: {alternate} JJs)"),
        },
    );
    report
        .details
        .insert("clock_arity".into(), arity.to_string());
    report.details.insert(
        "stage_sizes".into(),
        stages
            .stage_sizes
            .iter()
            .map(|(s, c)| format!("{s}:{c}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    Ok(report)
}

/// Options for netlist-level cost accounting.
#[derive(Debug, Clone, Copy)]
pub struct CostOptions {
    pub count_output_taps: bool,
    pub clock_mode: ClockMode,
    pub clock_arity: u32,
    /// Count DC-to-SFQ converters at primary inputs as clock sinks.
    pub clock_input_converters: bool,
}

impl Default for CostOptions {
    fn default() -> Self {
        CostOptions {
            count_output_taps: true,
            clock_mode: ClockMode::RightSized,
            clock_arity: DEFAULT_CLOCK_ARITY,
            clock_input_converters: false,
        }
    }
}

/// Whole-netlist JJ totals: logic + data splitting + clock distribution.
pub fn total_cost(
    netlist: &Netlist,
    lib: &CellLibrary,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    opts: &CostOptions,
) -> Result<CostReport, CostError> {
    let mut logic = 0u64;
    for (kind, count) in netlist.kind_counts() {
        logic += lib.jj_count(kind)? * count as u64;
    }
    let profile = netlist.fanout_profile(opts.count_output_taps);
    let mut data_conv = 0u64;
    let mut data_ranked = 0u64;
    for &fo in profile.per_net.values() {
        if fo >= 2 {
            data_conv += SPLITTER_JJS * (fo as u64 - 1);
            data_ranked += ranked_split_jjs(fo, ladder, policy);
        }
    }
    let stages = netlist
        .levelize()
        .map_err(|e| CostError::Library(e.to_string()))?;
    let converters = if opts.clock_input_converters {
        netlist.primary_inputs.len() as u32
    } else {
        0
    };
    let clock = clock_tree_cost(
        &stages,
        ladder,
        policy,
        opts.clock_mode,
        opts.clock_arity,
        converters,
    )?;

    let conventional = logic + data_conv + clock.jj_conventional;
    let ranked = logic + data_ranked + clock.jj_ranked;
    let mut report = CostReport::new(conventional, ranked);
    report.jj_logic = Some(logic);
    report.breakdown.insert("logic".into(), (logic, logic));
    report
        .breakdown
        .insert("data_splitting".into(), (data_conv, data_ranked));
    report
        .breakdown
        .insert("clock".into(), (clock.jj_conventional, clock.jj_ranked));
    report.details.extend(clock.details);
    if !lib.label.is_empty() {
        report
            .details
            .insert("cell_library".into(), lib.label.clone());
    }
    Ok(report)
}

/// Ranking option for the bias comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasMode {
    /// Source at the reference rank, targets take whatever rank the fan-out
    /// capacity dictates (lower bias, bespoke target cells).
    Flexible,
    /// Source and targets both at the reference rank; chains climb between.
    Matched,
}

/// Bias-current totals for one cell driving `n` copies of itself.
#[derive(Debug, Clone, Serialize)]
pub struct BiasComparison {
    pub conventional_ua: f64,
    pub ranked_ua: f64,
    pub savings_pct: f64,
}

/// Percent bias-current savings of rank-based fan-out over a conventional
/// splitter tree, for a `kind` cell fanning out to `n` identical cells.
pub fn bias_savings(
    kind: CellKind,
    n: u32,
    mode: BiasMode,
    lib: &CellLibrary,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
) -> Result<f64, CostError> {
    Ok(bias_comparison(kind, n, mode, lib, ladder, policy)?.savings_pct)
}

pub fn bias_comparison(
    kind: CellKind,
    n: u32,
    mode: BiasMode,
    lib: &CellLibrary,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
) -> Result<BiasComparison, CostError> {
    if n == 0 {
        return Err(CostError::BadFanout(n));
    }
    let entry = lib.entry(kind)?;
    let ref_rank = ladder
        .current_to_rank(lib.reference_current_ua)
        .map_err(|e| CostError::Library(format!("reference_current_ua off ladder: {e}")))?;
    let ref_current = ladder.rank_to_current(ref_rank).unwrap() as f64;
    let cell_bias = |rank: Rank| -> f64 {
        let i = ladder.rank_to_current(rank).unwrap() as f64;
        entry.bias_current_ua * i / ref_current
    };
    let jj_bias = |rank: Rank| -> f64 {
        let i = ladder.rank_to_current(rank).unwrap() as f64;
        lib.bias_per_jj * lib.splitter_bias_ua * i / ref_current
    };
    let chain_bias = |from: Rank, to: Rank| -> f64 {
        plan_chain(from, to, policy)
            .expect("uphill")
            .stages
            .iter()
            .map(|s| jj_bias(s.input_rank) + jj_bias(s.output_rank))
            .sum()
    };

    // Conventional: source + (n-1) splitters + n targets, all at the reference
    // rank. Each splitter biases one √2-scaled input JJ and two output JJs.
    let splitter_bias = lib.bias_per_jj * lib.splitter_bias_ua * (2.0 + std::f64::consts::SQRT_2);
    let conventional =
        cell_bias(ref_rank) + (n as f64 - 1.0) * splitter_bias + n as f64 * cell_bias(ref_rank);

    let ranked = match mode {
        BiasMode::Flexible => {
            let direct_cap = ref_rank.0; // capacity down to rank 1
            let (source, target) = if n == 1 {
                (ref_rank, ref_rank)
            } else if n <= direct_cap {
                (ref_rank, Rank(ref_rank.0 - n + 1))
            } else {
                let source = required_source_rank(n, Rank(1), ladder).map_err(|_| {
                    CostError::InfeasibleFanout {
                        fanout: n,
                        needed: n,
                        top: ladder.len(),
                    }
                })?;
                (source, Rank(1))
            };
            cell_bias(ref_rank) + chain_bias(ref_rank, source) + n as f64 * cell_bias(target)
        }
        BiasMode::Matched => {
            // Source and targets stay at the reference rank; fan-out comes
            // from a binary tree of n−1 single-step amplifying JTLs, each
            // climbing one rank and fanning out to two reference-rank lines.
            if ref_rank == ladder.top() && n > 1 {
                return Err(CostError::InfeasibleFanout {
                    fanout: n,
                    needed: ref_rank.0 + 1,
                    top: ladder.len(),
                });
            }
            let jtl_splitter = jj_bias(ref_rank) + jj_bias(Rank(ref_rank.0 + 1));
            cell_bias(ref_rank) + (n as f64 - 1.0) * jtl_splitter + n as f64 * cell_bias(ref_rank)
        }
    };

    let savings = if conventional == 0.0 {
        0.0
    } else {
        100.0 * (conventional - ranked) / conventional
    };
    Ok(BiasComparison {
        conventional_ua: conventional,
        ranked_ua: ranked,
        savings_pct: savings,
    })
}
