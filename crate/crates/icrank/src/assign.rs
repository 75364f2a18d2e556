//! Five-step rank assignment over a netlist, amplifying-chain insertion, clock
//! planning, and rule verification.
//!
//! 1. Seed the stage with the most clocked cells so one clock line from the
//!    root rank covers it (plus the forwarding tap when the clock daisy-chains
//!    to further stages).
//! 2. Propagate ranks across FO1 connections (driver and lone sink unify).
//! 3. Unify the ranks of sinks sharing a driver.
//! 4. Resolve remaining cells to the smallest rank that needs no chain, then
//!    insert amplifying chains wherever a source still comes up short; derive
//!    the required driving rank of every primary input.
//! 5. Plan the clock tree (`plan_clock_tree`).

use crate::chain::{fanout_capacity, plan_chain, AmplifierPolicy, ChainModel, JtlChainPlan};
use crate::ladder::{Rank, RankLadder};
use crate::netlist::{CellKind, Netlist};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum AssignError {
    #[error("netlist: {0}")]
    Netlist(#[from] crate::netlist::NetlistError),
    #[error("clock root rank {root} not on the {top}-rung ladder")]
    BadRootRank { root: u32, top: u32 },
    #[error(
        "stage {stage} with {size} clocked cells (+{tap} tap) exceeds clock capacity from rank {root}"
    )]
    StageInfeasible {
        stage: u32,
        size: u32,
        tap: u32,
        root: u32,
    },
    #[error(
        "net '{net}' infeasible: fan-out {fanout} to rank-{target} sinks needs rank {needed}, ladder top is {top}"
    )]
    InfeasibleNet {
        net: String,
        fanout: u32,
        target: u32,
        needed: u32,
        top: u32,
    },
    #[error("cells '{cell_a}' and '{cell_b}' are rank-coupled but seeded {rank_a} vs {rank_b}")]
    ConflictingRanks {
        cell_a: String,
        cell_b: String,
        rank_a: Rank,
        rank_b: Rank,
    },
}

/// Which end of the feasible range Step 1 assigns to the widest stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StagePolicy {
    /// Highest rank the clock can still cover; keeps fan-out headroom.
    #[default]
    HighestRank,
    /// Rank 1; favors speed and energy at the cost of clock-line chains.
    LowestRank,
}

#[derive(Debug, Clone)]
pub struct AssignmentOptions {
    pub stage_policy: StagePolicy,
    /// Clock source rank; defaults to the ladder top.
    pub clock_root_rank: Option<Rank>,
    /// Downgrade infeasibilities to notes instead of erroring.
    pub allow_infeasible: bool,
    /// Count one extra clock sink for the widest stage when the clock
    /// daisy-chains onward (netlists with more than one stage).
    pub count_forward_tap: bool,
    /// Primary-output reads count as net sinks.
    pub count_output_taps: bool,
    /// Per-line fan-out cap of the clock tree.
    pub clock_arity: u32,
    /// Override Step 1's argmax stage (testing and what-if runs).
    pub seed_stage: Option<u32>,
}

impl Default for AssignmentOptions {
    fn default() -> Self {
        AssignmentOptions {
            stage_policy: StagePolicy::HighestRank,
            clock_root_rank: None,
            allow_infeasible: false,
            count_forward_tap: true,
            count_output_taps: true,
            clock_arity: crate::cost::DEFAULT_CLOCK_ARITY,
            seed_stage: None,
        }
    }
}

/// One clock line: an optional amplifying chain feeding a fan-out group of
/// same-rank cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClockLine {
    pub line_rank: Rank,
    pub chain: Option<JtlChainPlan>,
    pub target_rank: Rank,
    pub cells: Vec<String>,
}

/// Clock tree: the root fans out to lines (expanding through extra chain
/// blocks when it runs out of direct fan-out), each line feeds one group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClockPlan {
    pub root_rank: Rank,
    pub root_fanout: u32,
    pub line_rank: Rank,
    pub expanders: Vec<JtlChainPlan>,
    pub lines: Vec<ClockLine>,
    pub jj_cost: u64,
    pub conventional_jj_cost: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankAssignment {
    pub netlist_name: String,
    pub per_cell_rank: BTreeMap<String, Rank>,
    /// Chains inserted after a driving cell, keyed by the driven net.
    pub inserted_chains: BTreeMap<String, JtlChainPlan>,
    /// Required driving rank per primary input (reported, not synthesized).
    pub input_source_ranks: BTreeMap<String, Rank>,
    pub clock_plan: Option<ClockPlan>,
    /// Stage seeded in Step 1 and the rank it received.
    pub seed_stage: u32,
    pub seed_rank: Rank,
    pub count_output_taps: bool,
    /// Infeasibilities downgraded by `allow_infeasible`.
    pub notes: Vec<String>,
}

/// A rank-rule violation. Violations are data, not errors.
#[derive(Debug, Clone, Serialize)]
pub enum AssignViolation {
    UnrankedCell {
        cell: String,
    },
    /// Effective drive (cell rank or chain output) cannot cover the net.
    CapacityExceeded {
        net: String,
        effective_rank: Rank,
        fanout: u32,
        max_target: Rank,
        required_rank: u32,
        required_jtls: Option<u32>,
    },
    SinkRankMismatch {
        net: String,
        ranks: Vec<(String, Rank)>,
    },
    Fo1RankMismatch {
        net: String,
        driver_rank: Rank,
        sink: String,
        sink_rank: Rank,
    },
    ChainMalformed {
        net: String,
        reason: String,
    },
    InputUnderRanked {
        net: String,
        recorded: Option<Rank>,
        required: Rank,
    },
    ClockInvalid {
        reason: String,
    },
}

impl std::fmt::Display for AssignViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AssignViolation::UnrankedCell { cell } => write!(f, "unranked cell {cell}"),
            AssignViolation::CapacityExceeded {
                net,
                effective_rank,
                fanout,
                max_target,
                required_rank,
                required_jtls,
            } => {
                write!(
                    f,
                    "net {net}: fan-out {fanout} to {max_target} from {effective_rank} needs rank {required_rank}"
                )?;
                if let Some(n) = required_jtls {
                    write!(f, " ({n} amplifying JTLs)")?;
                }
                Ok(())
            }
            AssignViolation::SinkRankMismatch { net, ranks } => {
                write!(f, "net {net}: sinks sharing a source differ in rank: ")?;
                let parts: Vec<String> =
                    ranks.iter().map(|(c, r)| format!("{c}={r}")).collect();
                f.write_str(&parts.join(", "))
            }
            AssignViolation::Fo1RankMismatch {
                net,
                driver_rank,
                sink,
                sink_rank,
            } => write!(
                f,
                "net {net}: FO1 connection must share rank ({driver_rank} drives {sink}={sink_rank})"
            ),
            AssignViolation::ChainMalformed { net, reason } => {
                write!(f, "net {net}: malformed chain: {reason}")
            }
            AssignViolation::InputUnderRanked {
                net,
                recorded,
                required,
            } => match recorded {
                Some(r) => write!(f, "input {net}: recorded source rank {r} below required {required}"),
                None => write!(f, "input {net}: no source rank recorded (required {required})"),
            },
            AssignViolation::ClockInvalid { reason } => write!(f, "clock plan: {reason}"),
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Deterministic: smaller index wins as representative.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Run Steps 1–4 of the rank-assignment methodology.
pub fn assign_ranks(
    netlist: &Netlist,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    opts: &AssignmentOptions,
) -> Result<RankAssignment, AssignError> {
    assign_ranks_seeded(netlist, ladder, policy, opts, &BTreeMap::new())
}

/// `assign_ranks` with extra per-cell rank seeds (pinned library cells,
/// incremental reruns). Seeds that end up rank-coupled with different values
/// are a conflict error.
pub fn assign_ranks_seeded(
    netlist: &Netlist,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    opts: &AssignmentOptions,
    extra_seeds: &BTreeMap<String, Rank>,
) -> Result<RankAssignment, AssignError> {
    let stages = netlist.levelize()?;
    let top = ladder.top();
    let root = opts.clock_root_rank.unwrap_or(top);
    if !ladder.contains(root) {
        return Err(AssignError::BadRootRank {
            root: root.0,
            top: top.0,
        });
    }
    let mut notes = Vec::new();

    // Step 1: widest stage, covered by one clock line from the root.
    let seed_stage = match opts.seed_stage {
        Some(s) => s,
        None => stages
            .stage_sizes
            .iter()
            .max_by(|(sa, ca), (sb, cb)| ca.cmp(cb).then(sb.cmp(sa)))
            .map(|(s, _)| *s)
            .unwrap_or(1),
    };
    let seed_size = stages.stage_sizes.get(&seed_stage).copied().unwrap_or(0);
    let tap = u32::from(opts.count_forward_tap && stages.depth() > 1);
    let covered = seed_size + tap;
    let seed_rank = match opts.stage_policy {
        StagePolicy::HighestRank => {
            if covered > root.0 {
                if !opts.allow_infeasible {
                    return Err(AssignError::StageInfeasible {
                        stage: seed_stage,
                        size: seed_size,
                        tap,
                        root: root.0,
                    });
                }
                notes.push(format!(
                    "stage {seed_stage}: {covered} clock sinks exceed capacity {} from {root}; clamped to rank 1",
                    root.0
                ));
                Rank(1)
            } else {
                Rank(root.0 - covered + 1)
            }
        }
        StagePolicy::LowestRank => Rank(1),
    };

    // Union-find over cell indices; inputs participate as isolated nodes.
    let cells = netlist.cells();
    let mut uf = UnionFind::new(cells.len());
    let index_of: BTreeMap<&str, usize> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();

    for (net, info) in netlist.nets() {
        let driver = &cells[info.driver];
        let fanout = netlist.net_fanout(net, opts.count_output_taps);
        // Step 2: FO1 driver-sink propagation (logic cells only).
        if driver.kind != CellKind::Input && fanout == 1 && info.sinks.len() == 1 {
            uf.union(info.driver, info.sinks[0]);
        }
        // Step 3: sinks sharing a source share a rank.
        for pair in info.sinks.windows(2) {
            uf.union(pair[0], pair[1]);
        }
    }

    // Seed components. The widest stage seeds with seed_rank; extra seeds may
    // only agree with whatever their component already carries.
    let mut comp_seed: BTreeMap<usize, (Rank, String)> = BTreeMap::new();
    let seed = |uf: &mut UnionFind,
                idx: usize,
                rank: Rank,
                comp_seed: &mut BTreeMap<usize, (Rank, String)>| {
        let root = uf.find(idx);
        let id = cells[idx].id.clone();
        match comp_seed.get(&root) {
            Some((existing, holder)) if *existing != rank => Err(AssignError::ConflictingRanks {
                cell_a: holder.clone(),
                cell_b: id,
                rank_a: *existing,
                rank_b: rank,
            }),
            Some(_) => Ok(()),
            None => {
                comp_seed.insert(root, (rank, id));
                Ok(())
            }
        }
    };
    for (i, cell) in cells.iter().enumerate() {
        if cell.kind == CellKind::Input {
            continue;
        }
        if stages.per_cell.get(&cell.id) == Some(&seed_stage) {
            seed(&mut uf, i, seed_rank, &mut comp_seed)?;
        }
    }
    for (id, rank) in extra_seeds {
        if let Some(&idx) = index_of.get(id.as_str()) {
            if !ladder.contains(*rank) {
                return Err(AssignError::BadRootRank {
                    root: rank.0,
                    top: top.0,
                });
            }
            seed(&mut uf, idx, *rank, &mut comp_seed)?;
        }
    }

    // Step 4: resolve the rest. Reverse-topological pass; each cell demands
    // the smallest rank that covers its output net without a chain, and a
    // component takes the max demand over its members.
    let mut topo: Vec<usize> = (0..cells.len())
        .filter(|&i| cells[i].kind != CellKind::Input)
        .collect();
    topo.sort_by(|&a, &b| {
        let sa = stages.per_cell[&cells[a].id];
        let sb = stages.per_cell[&cells[b].id];
        sa.cmp(&sb).then_with(|| cells[a].id.cmp(&cells[b].id))
    });

    let mut comp_req: BTreeMap<usize, u32> = BTreeMap::new();
    // Upper bounds: a net whose sinks are rank-coupled to its own driver can
    // only be amplified top − rank steps, so the component rank is capped.
    let mut comp_cap: BTreeMap<usize, (u32, String)> = BTreeMap::new();
    for &ci in topo.iter().rev() {
        let cell = &cells[ci];
        let comp = uf.find(ci);
        let mut demand = 1u32;
        if let Some(info) = netlist.nets().get(&cell.output) {
            let fanout = netlist.net_fanout(&cell.output, opts.count_output_taps);
            if fanout > 0 {
                let mut max_t = if fanout > info.sinks.len() as u32 {
                    1
                } else {
                    0
                };
                let mut coupled = false;
                for &s in &info.sinks {
                    let s_comp = uf.find(s);
                    if s_comp == comp {
                        coupled = true;
                        continue;
                    }
                    let t = comp_seed
                        .get(&s_comp)
                        .map(|(r, _)| r.0)
                        .or_else(|| comp_req.get(&s_comp).copied())
                        .unwrap_or(1);
                    max_t = max_t.max(t);
                }
                if coupled && fanout >= 2 {
                    if fanout > top.0 {
                        if !opts.allow_infeasible {
                            return Err(AssignError::InfeasibleNet {
                                net: cell.output.clone(),
                                fanout,
                                target: 1,
                                needed: fanout,
                                top: top.0,
                            });
                        }
                        notes.push(format!(
                            "net {}: fan-out {fanout} within one rank group exceeds the ladder",
                            cell.output
                        ));
                    }
                    let cap = (top.0 + 1).saturating_sub(fanout).max(1);
                    let entry = comp_cap.entry(comp).or_insert((cap, cell.output.clone()));
                    if cap < entry.0 {
                        *entry = (cap, cell.output.clone());
                    }
                }
                if max_t > 0 {
                    let needed = max_t + fanout - 1;
                    demand = demand.max(needed.min(top.0));
                }
            }
        }
        let entry = comp_req.entry(comp).or_insert(1);
        *entry = (*entry).max(demand);
    }

    let mut per_cell_rank = BTreeMap::new();
    for (i, cell) in cells.iter().enumerate() {
        if cell.kind == CellKind::Input {
            continue;
        }
        let comp = uf.find(i);
        let cap = comp_cap.get(&comp);
        let rank = match comp_seed.get(&comp) {
            Some((seed, _)) => {
                if let Some((cap, net)) = cap {
                    if seed.0 > *cap {
                        if !opts.allow_infeasible {
                            return Err(AssignError::InfeasibleNet {
                                net: net.clone(),
                                fanout: top.0 + 1 - cap,
                                target: seed.0,
                                needed: seed.0 + top.0 - cap,
                                top: top.0,
                            });
                        }
                        notes.push(format!(
                            "net {net}: rank group pinned at {seed} cannot absorb its own fan-out"
                        ));
                    }
                }
                *seed
            }
            None => {
                let demand = comp_req.get(&comp).copied().unwrap_or(1);
                Rank(demand.min(cap.map(|(c, _)| *c).unwrap_or(u32::MAX)).max(1))
            }
        };
        per_cell_rank.insert(cell.id.clone(), rank);
    }

    // Chain insertion: wherever the assigned rank undershoots the demand.
    let mut inserted_chains = BTreeMap::new();
    let mut input_source_ranks = BTreeMap::new();
    for (net, info) in netlist.nets() {
        let driver = &cells[info.driver];
        let fanout = netlist.net_fanout(net, opts.count_output_taps);
        if fanout == 0 {
            if driver.kind == CellKind::Input {
                input_source_ranks.insert(net.clone(), Rank(1));
            }
            continue;
        }
        let mut max_t = 1u32;
        for &s in &info.sinks {
            max_t = max_t.max(per_cell_rank[&cells[s].id].0);
        }
        let needed = max_t + fanout - 1;
        if needed > top.0 {
            if !opts.allow_infeasible {
                return Err(AssignError::InfeasibleNet {
                    net: net.clone(),
                    fanout,
                    target: max_t,
                    needed,
                    top: top.0,
                });
            }
            notes.push(format!(
                "net {net}: fan-out {fanout} to rank {max_t} needs rank {needed} > top {}",
                top.0
            ));
        }
        let needed = needed.min(top.0);
        if driver.kind == CellKind::Input {
            input_source_ranks.insert(net.clone(), Rank(needed));
            continue;
        }
        let r = per_cell_rank[&driver.id];
        if r.0 < needed {
            let chain = plan_chain(r, Rank(needed), policy).expect("uphill chain");
            inserted_chains.insert(net.clone(), chain);
        }
    }

    Ok(RankAssignment {
        netlist_name: netlist.name.clone(),
        per_cell_rank,
        inserted_chains,
        input_source_ranks,
        clock_plan: None,
        seed_stage,
        seed_rank,
        count_output_taps: opts.count_output_taps,
        notes,
    })
}

/// Step 5: build the clock tree for a ranked netlist. Cells group by rank
/// (pooled across stages, in stage order); each group hangs off one line from
/// the root, with lines multiplied through expander blocks when the root's
/// direct fan-out runs out.
pub fn plan_clock_tree(
    netlist: &Netlist,
    assignment: &RankAssignment,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    opts: &AssignmentOptions,
) -> Result<ClockPlan, AssignError> {
    let stages = netlist.levelize()?;
    let top = ladder.top();
    let root = opts.clock_root_rank.unwrap_or(top);
    if !ladder.contains(root) {
        return Err(AssignError::BadRootRank {
            root: root.0,
            top: top.0,
        });
    }

    // Clocked cells in (stage, id) order, grouped by rank.
    let mut ordered: Vec<(&String, u32)> = assignment
        .per_cell_rank
        .keys()
        .map(|id| (id, stages.per_cell.get(id).copied().unwrap_or(0)))
        .collect();
    ordered.sort_by(|(ida, sa), (idb, sb)| sa.cmp(sb).then_with(|| ida.cmp(idb)));
    let mut by_rank: BTreeMap<Rank, Vec<String>> = BTreeMap::new();
    for (id, _) in ordered {
        let rank = assignment.per_cell_rank[id];
        by_rank.entry(rank).or_default().push(id.clone());
    }

    let sinks: u64 = by_rank.values().map(|v| v.len() as u64).sum();
    let conventional_jj_cost = 3 * sinks.saturating_sub(1);
    let mut lines = Vec::new();
    for (rank, cells) in &by_rank {
        let group_cap = opts
            .clock_arity
            .min(fanout_capacity(top, *rank).unwrap_or(1))
            .max(1);
        for chunk in cells.chunks(group_cap as usize) {
            lines.push((*rank, chunk.to_vec()));
        }
    }

    // Root fans directly when it can; otherwise it fans to rank-1 lines and
    // expander blocks multiply them.
    let needed = lines.len() as u32;
    let mut expanders = Vec::new();
    let (root_fanout, line_rank) = if needed == 0 {
        (0, root)
    } else if needed <= root.0 {
        (needed, Rank(root.0 - needed + 1))
    } else {
        let mut available = root.0;
        while available < needed {
            let e = opts.clock_arity.min(top.0).max(2);
            expanders.push(plan_chain(Rank(1), Rank(e), policy).expect("uphill"));
            available += e - 1;
        }
        (root.0, Rank(1))
    };

    let mut jj_cost: u64 = expanders.iter().map(|c| c.jj_count as u64).sum();
    let clock_lines: Vec<ClockLine> = lines
        .into_iter()
        .map(|(rank, cells)| {
            let k = cells.len() as u32;
            let needed_rank = rank.0 + k - 1;
            let chain = if line_rank.0 >= needed_rank {
                None
            } else {
                Some(plan_chain(line_rank, Rank(needed_rank), policy).expect("uphill"))
            };
            if let Some(c) = &chain {
                jj_cost += c.jj_count as u64;
            }
            ClockLine {
                line_rank,
                chain,
                target_rank: rank,
                cells,
            }
        })
        .collect();

    Ok(ClockPlan {
        root_rank: root,
        root_fanout,
        line_rank,
        expanders,
        lines: clock_lines,
        jj_cost,
        conventional_jj_cost,
    })
}

fn check_chain(
    net: &str,
    chain: &JtlChainPlan,
    source: Rank,
    policy: &AmplifierPolicy,
    out: &mut Vec<AssignViolation>,
) {
    let mut bad = |reason: String| {
        out.push(AssignViolation::ChainMalformed {
            net: net.to_string(),
            reason,
        });
    };
    if chain.source_rank != source {
        bad(format!(
            "chain starts at {} but the driver is {}",
            chain.source_rank, source
        ));
        return;
    }
    let Some(first) = chain.stages.first() else {
        if chain.target_rank != chain.source_rank {
            bad("empty chain with differing endpoint ranks".into());
        }
        return;
    };
    if first.input_rank != chain.source_rank {
        bad(format!(
            "first JTL input {} != source {}",
            first.input_rank, chain.source_rank
        ));
    }
    let last = chain.stages.last().unwrap();
    if last.output_rank != chain.target_rank {
        bad(format!(
            "last JTL output {} != target {}",
            last.output_rank, chain.target_rank
        ));
    }
    let (climb, gap) = match policy.chain_model {
        ChainModel::Gap => (policy.intra_step_ranks, policy.inter_gap_ranks),
        ChainModel::Eq2 => (2 * policy.intra_step_ranks, 0),
    };
    let mut prev: Option<Rank> = None;
    for s in &chain.stages {
        if s.output_rank < s.input_rank || s.output_rank.0 - s.input_rank.0 > climb {
            bad(format!(
                "JTL {}→{} exceeds the {}-rank step",
                s.input_rank, s.output_rank, climb
            ));
        }
        if let Some(p) = prev {
            if s.input_rank < p || s.input_rank.0 - p.0 > gap {
                bad(format!(
                    "gap {}→{} exceeds the {}-rank inter-JTL gain",
                    p, s.input_rank, gap
                ));
            }
        }
        prev = Some(s.output_rank);
    }
}

/// Check every data and clock connection of an assignment against the
/// capacity and amplification rules. Empty result means compliant.
pub fn verify_assignment(
    netlist: &Netlist,
    assignment: &RankAssignment,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
) -> Vec<AssignViolation> {
    let mut out = Vec::new();
    let top = ladder.top();

    for cell in netlist.logic_cells() {
        if !assignment.per_cell_rank.contains_key(&cell.id) {
            out.push(AssignViolation::UnrankedCell {
                cell: cell.id.clone(),
            });
        }
    }

    for (net, info) in netlist.nets() {
        let driver = &netlist.cells()[info.driver];
        let fanout = netlist.net_fanout(net, assignment.count_output_taps);
        if fanout == 0 {
            continue;
        }
        let sink_ranks: Vec<(String, Rank)> = info
            .sinks
            .iter()
            .filter_map(|&s| {
                let id = &netlist.cells()[s].id;
                assignment.per_cell_rank.get(id).map(|r| (id.clone(), *r))
            })
            .collect();
        let max_t = sink_ranks
            .iter()
            .map(|(_, r)| r.0)
            .max()
            .unwrap_or(1)
            .max(1);
        let required = max_t + fanout - 1;

        // Sinks sharing a source share a rank.
        if sink_ranks.windows(2).any(|w| w[0].1 != w[1].1) {
            out.push(AssignViolation::SinkRankMismatch {
                net: net.clone(),
                ranks: sink_ranks.clone(),
            });
        }

        if driver.kind == CellKind::Input {
            match assignment.input_source_ranks.get(net) {
                Some(r) if r.0 >= required || required > top.0 => {}
                recorded => out.push(AssignViolation::InputUnderRanked {
                    net: net.clone(),
                    recorded: recorded.copied(),
                    required: Rank(required.min(top.0)),
                }),
            }
            continue;
        }

        let Some(&rank) = assignment.per_cell_rank.get(&driver.id) else {
            continue; // already reported as unranked
        };
        let chain = assignment.inserted_chains.get(net);
        if let Some(c) = chain {
            check_chain(net, c, rank, policy, &mut out);
        }
        let effective = chain.map(|c| c.target_rank).unwrap_or(rank);
        let capacity = fanout_capacity(effective, Rank(max_t)).unwrap_or(0);
        if capacity < fanout {
            let required_jtls = (required <= top.0).then(|| {
                plan_chain(rank, Rank(required), policy)
                    .map(|c| c.num_jtls())
                    .unwrap_or(0)
            });
            out.push(AssignViolation::CapacityExceeded {
                net: net.clone(),
                effective_rank: effective,
                fanout,
                max_target: Rank(max_t),
                required_rank: required,
                required_jtls,
            });
        }
        // FO1 connections share a rank unless a chain intervenes.
        if fanout == 1 && chain.is_none() {
            if let Some((sink, sink_rank)) = sink_ranks.first() {
                if *sink_rank != rank {
                    out.push(AssignViolation::Fo1RankMismatch {
                        net: net.clone(),
                        driver_rank: rank,
                        sink: sink.clone(),
                        sink_rank: *sink_rank,
                    });
                }
            }
        }
    }

    if let Some(plan) = &assignment.clock_plan {
        verify_clock_plan(netlist, assignment, plan, ladder, policy, &mut out);
    }
    out
}

fn verify_clock_plan(
    netlist: &Netlist,
    assignment: &RankAssignment,
    plan: &ClockPlan,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    out: &mut Vec<AssignViolation>,
) {
    let mut covered: BTreeMap<&str, u32> = BTreeMap::new();
    for line in &plan.lines {
        let k = line.cells.len() as u32;
        if let Some(chain) = &line.chain {
            check_chain("<clock>", chain, line.line_rank, policy, out);
        }
        let effective = line
            .chain
            .as_ref()
            .map(|c| c.target_rank)
            .unwrap_or(line.line_rank);
        if fanout_capacity(effective, line.target_rank).unwrap_or(0) < k {
            out.push(AssignViolation::ClockInvalid {
                reason: format!(
                    "line at {effective} cannot fan {k} ways to rank {}",
                    line.target_rank
                ),
            });
        }
        for cell in &line.cells {
            *covered.entry(cell.as_str()).or_default() += 1;
            match assignment.per_cell_rank.get(cell) {
                Some(r) if *r == line.target_rank => {}
                Some(r) => out.push(AssignViolation::ClockInvalid {
                    reason: format!(
                        "cell {cell} is {r} but its line targets {}",
                        line.target_rank
                    ),
                }),
                None => out.push(AssignViolation::ClockInvalid {
                    reason: format!("cell {cell} on the clock tree has no rank"),
                }),
            }
        }
    }
    for cell in netlist.logic_cells() {
        if cell.kind.is_clocked() {
            match covered.get(cell.id.as_str()) {
                Some(1) => {}
                Some(n) => out.push(AssignViolation::ClockInvalid {
                    reason: format!("cell {} clocked {n} times", cell.id),
                }),
                None => out.push(AssignViolation::ClockInvalid {
                    reason: format!("cell {} not clocked", cell.id),
                }),
            }
        }
    }
    // Lines plus expander consumption must fit the root fan-out.
    let produced: u32 = plan.root_fanout
        + plan
            .expanders
            .iter()
            .map(|e| e.target_rank.0 - 1)
            .sum::<u32>();
    if (plan.lines.len() as u32) > produced {
        out.push(AssignViolation::ClockInvalid {
            reason: format!(
                "{} lines but root+expanders provide {produced}",
                plan.lines.len()
            ),
        });
    }
    if plan.root_fanout > ladder.top().0 {
        out.push(AssignViolation::ClockInvalid {
            reason: format!("root fan-out {} exceeds capacity", plan.root_fanout),
        });
    }
}

/// The bundled fully-synchronous 2-bit Kogge-Stone adder used as the
/// walkthrough example: 23 cells in 5 stages, stage 3 the widest with 6.
pub fn ksa_example() -> Netlist {
    crate::netlist::parse_bench(include_str!("../data/netlists/ksa2.bench"), "ksa2")
        .expect("bundled KSA netlist")
}
