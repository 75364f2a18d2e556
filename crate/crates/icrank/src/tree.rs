//! Fan-out structures: conventional splitter trees and rank-based trees built
//! from amplifying-JTL chain blocks.
//!
//! A chain block amplifies a rank-1 line up the ladder and fans out from the
//! top of its chain; the lines it produces are back at rank 1, so blocks
//! compose into trees of arbitrary fan-out. Three constructions are provided:
//!
//! - `splitter_tree`: the conventional binary tree of three-JJ splitters,
//! - `ranked_tree`: stage-factored trees (fan-out factored into per-stage
//!   fan-outs ≤ the ladder's top capacity) in right-sized or modular-uniform
//!   block flavors, with two stage orderings,
//! - `even_split_tree` / `saturated_tree`: recursive decompositions used by
//!   the net-splitting and clock cost models.

use crate::chain::{plan_chain, AmplifierPolicy, JtlChainPlan};
use crate::ladder::{Rank, RankLadder};
use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TreeError {
    #[error("fan-out must be at least 1, got {0}")]
    ZeroFanout(u64),
    #[error("chain-topology export needs a ranked tree; this tree is conventional")]
    UnsupportedMode,
    #[error("ladder too short to fan out (single rank supports FO1 only)")]
    LadderTooShort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeMode {
    Conventional,
    RankedRightSized,
    RankedModularUniform,
}

/// Ordering of the per-stage fan-out factors in a stage-factored tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StageOrder {
    /// Descending factors with the smallest placed second-to-last; matches the
    /// published FO1024 tree layout (stage fan-outs 8, 8, 2, 8).
    #[default]
    Balanced,
    /// Cheapest ordering: factors sorted by descending chain cost per added
    /// line, which is plain ascending when every block costs the same.
    MinCost,
}

#[derive(Debug, Clone, Serialize)]
pub enum TreeNode {
    Leaf,
    /// A three-JJ FO2 splitter.
    Splitter {
        children: Vec<TreeNode>,
    },
    /// An amplifying chain followed by a fan-out from the chain top.
    Block {
        chain: JtlChainPlan,
        children: Vec<TreeNode>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct FanoutTree {
    pub mode: TreeMode,
    pub root: TreeNode,
    pub leaves: u64,
    pub jj_cost: u64,
    /// Splitters or chain blocks, depending on mode.
    pub node_count: u64,
    pub depth: u32,
}

const SPLITTER_JJS: u64 = 3;

impl FanoutTree {
    fn from_root(mode: TreeMode, root: TreeNode) -> Self {
        let mut tree = FanoutTree {
            mode,
            root,
            leaves: 0,
            jj_cost: 0,
            node_count: 0,
            depth: 0,
        };
        let (leaves, cost, nodes, depth) = measure(&tree.root);
        tree.leaves = leaves;
        tree.jj_cost = cost;
        tree.node_count = nodes;
        tree.depth = depth;
        tree
    }

    /// Blocks in breadth-first order (ranked trees).
    pub fn blocks(&self) -> Vec<&JtlChainPlan> {
        let mut out = Vec::new();
        let mut queue = vec![&self.root];
        let mut head = 0;
        while head < queue.len() {
            let node = queue[head];
            head += 1;
            match node {
                TreeNode::Leaf => {}
                TreeNode::Splitter { children } => queue.extend(children.iter()),
                TreeNode::Block { chain, children } => {
                    out.push(chain);
                    queue.extend(children.iter());
                }
            }
        }
        out
    }
}

fn measure(node: &TreeNode) -> (u64, u64, u64, u32) {
    match node {
        TreeNode::Leaf => (1, 0, 0, 0),
        TreeNode::Splitter { children } | TreeNode::Block { children, .. } => {
            let own_cost = match node {
                TreeNode::Splitter { .. } => SPLITTER_JJS,
                TreeNode::Block { chain, .. } => chain.jj_count as u64,
                TreeNode::Leaf => 0,
            };
            let mut leaves = 0;
            let mut cost = own_cost;
            let mut nodes = 1;
            let mut depth = 0;
            for child in children {
                let (l, c, n, d) = measure(child);
                leaves += l;
                cost += c;
                nodes += n;
                depth = depth.max(d);
            }
            (leaves, cost, nodes, depth + 1)
        }
    }
}

/// Conventional splitter tree: `n − 1` FO2 splitters, `3(n − 1)` JJs,
/// `⌈log₂ n⌉` stages. `n = 1` is a bare wire.
pub fn splitter_tree(n: u64) -> Result<FanoutTree, TreeError> {
    if n == 0 {
        return Err(TreeError::ZeroFanout(n));
    }
    fn build(n: u64) -> TreeNode {
        if n == 1 {
            TreeNode::Leaf
        } else {
            let left = n / 2;
            TreeNode::Splitter {
                children: vec![build(n - left), build(left)],
            }
        }
    }
    Ok(FanoutTree::from_root(TreeMode::Conventional, build(n)))
}

fn block_chain(fanout: u32, mode: TreeMode, policy: &AmplifierPolicy, arity: u32) -> JtlChainPlan {
    let top = match mode {
        TreeMode::RankedModularUniform => Rank(arity),
        _ => Rank(fanout),
    };
    plan_chain(Rank(1), top, policy).expect("uphill chain")
}

/// Greedy factorization of `n` into factors within `2..=arity`.
fn factor_stages(n: u64, arity: u32) -> Option<Vec<u32>> {
    if n <= arity as u64 {
        return Some(vec![n as u32]);
    }
    let mut rem = n;
    let mut factors = Vec::new();
    while rem > arity as u64 {
        let f = (2..=arity).rev().find(|f| rem.is_multiple_of(*f as u64))?;
        factors.push(f);
        rem /= f as u64;
    }
    if rem >= 2 {
        factors.push(rem as u32);
    }
    Some(factors)
}

fn order_stages(
    mut factors: Vec<u32>,
    order: StageOrder,
    mode: TreeMode,
    policy: &AmplifierPolicy,
    arity: u32,
) -> Vec<u32> {
    match order {
        StageOrder::MinCost => {
            // Total cost is Σ (blocks so far)·c(fᵢ); the adjacent-exchange
            // argument puts f with larger c(f)/(f−1) first. For uniform block
            // cost this degenerates to ascending fan-outs (fewest blocks).
            let cost = |f: u32| block_chain(f, mode, policy, arity).jj_count as u64;
            factors.sort_unstable_by(|&a, &b| {
                let lhs = cost(a) * (b as u64 - 1);
                let rhs = cost(b) * (a as u64 - 1);
                rhs.cmp(&lhs).then(a.cmp(&b))
            });
            factors
        }
        StageOrder::Balanced => {
            factors.sort_unstable_by(|a, b| b.cmp(a));
            let smallest = factors.pop().unwrap();
            let pos = factors.len().saturating_sub(1);
            factors.insert(pos, smallest);
            factors
        }
    }
}

/// Rank-based fan-out tree with per-stage fan-outs bounded by the ladder's
/// top-to-bottom capacity. Exactly factorable fan-outs use the stage
/// factorization under the requested ordering; the rest fall back to the
/// even-split decomposition (which absorbs remainders via unequal branch
/// loads, so construction never fails for a ladder with two or more ranks).
pub fn ranked_tree(
    n: u64,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    mode: TreeMode,
    order: StageOrder,
) -> Result<FanoutTree, TreeError> {
    let arity = ladder.len();
    ranked_tree_with_arity(n, ladder, policy, mode, order, arity)
}

/// `ranked_tree` with an explicit per-stage fan-out cap (≤ the ladder length).
pub fn ranked_tree_with_arity(
    n: u64,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    mode: TreeMode,
    order: StageOrder,
    arity: u32,
) -> Result<FanoutTree, TreeError> {
    if n == 0 {
        return Err(TreeError::ZeroFanout(n));
    }
    if mode == TreeMode::Conventional {
        return splitter_tree(n);
    }
    let arity = arity.min(ladder.len());
    if n == 1 {
        return Ok(FanoutTree::from_root(mode, TreeNode::Leaf));
    }
    if arity < 2 {
        return Err(TreeError::LadderTooShort);
    }
    let root = match factor_stages(n, arity) {
        Some(factors) => {
            let stages = order_stages(factors, order, mode, policy, arity);
            build_staged(&stages, mode, policy, arity)
        }
        None => build_even_split(n, mode, policy, arity),
    };
    Ok(FanoutTree::from_root(mode, root))
}

fn build_staged(stages: &[u32], mode: TreeMode, policy: &AmplifierPolicy, arity: u32) -> TreeNode {
    let Some((&fanout, rest)) = stages.split_first() else {
        return TreeNode::Leaf;
    };
    let child = build_staged(rest, mode, policy, arity);
    let children = std::iter::repeat_with(|| clone_node(&child))
        .take(fanout as usize)
        .collect();
    TreeNode::Block {
        chain: block_chain(fanout, mode, policy, arity),
        children,
    }
}

fn clone_node(node: &TreeNode) -> TreeNode {
    node.clone()
}

fn build_even_split(n: u64, mode: TreeMode, policy: &AmplifierPolicy, arity: u32) -> TreeNode {
    if n == 1 {
        return TreeNode::Leaf;
    }
    if n <= arity as u64 {
        return TreeNode::Block {
            chain: block_chain(n as u32, mode, policy, arity),
            children: vec![TreeNode::Leaf; n as usize],
        };
    }
    // First stage takes the full fan-out; the remainder spreads evenly.
    let base = n / arity as u64;
    let extra = n % arity as u64;
    let children = (0..arity as u64)
        .map(|i| build_even_split(base + u64::from(i < extra), mode, policy, arity))
        .collect();
    TreeNode::Block {
        chain: block_chain(arity, mode, policy, arity),
        children,
    }
}

/// Right-sized tree for one split point: fan-outs above `arity` decompose with
/// a full first stage and evenly-loaded branches. This is the data-splitting
/// construction.
pub fn even_split_tree(
    n: u64,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    arity: u32,
) -> Result<FanoutTree, TreeError> {
    if n == 0 {
        return Err(TreeError::ZeroFanout(n));
    }
    let arity = arity.min(ladder.len());
    if n > 1 && arity < 2 {
        return Err(TreeError::LadderTooShort);
    }
    Ok(FanoutTree::from_root(
        TreeMode::RankedRightSized,
        build_even_split(n, TreeMode::RankedRightSized, policy, arity),
    ))
}

/// Arity-limited expansion with the minimum block count
/// `⌈(n − 1)/(arity − 1)⌉`: every block fans the full arity except a final
/// partial one. This is the clock-distribution construction.
pub fn saturated_tree(
    n: u64,
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
    arity: u32,
    mode: TreeMode,
) -> Result<FanoutTree, TreeError> {
    if n == 0 {
        return Err(TreeError::ZeroFanout(n));
    }
    let arity = arity.min(ladder.len());
    if n > 1 && arity < 2 {
        return Err(TreeError::LadderTooShort);
    }
    fn build(n: u64, mode: TreeMode, policy: &AmplifierPolicy, arity: u32) -> TreeNode {
        if n == 1 {
            return TreeNode::Leaf;
        }
        if n <= arity as u64 {
            return TreeNode::Block {
                chain: block_chain(n as u32, mode, policy, arity),
                children: vec![TreeNode::Leaf; n as usize],
            };
        }
        // Fan the full arity; give each branch a full subtree while the
        // remaining branches can still take one leaf each. At most one block
        // in the whole tree ends up under-full.
        let a = arity as u64;
        let mut cap = 1u64;
        while cap * a < n {
            cap *= a;
        }
        let mut sizes = Vec::with_capacity(arity as usize);
        let mut rem = n;
        for i in 0..a {
            let slots_left = a - i - 1;
            let take = cap.min(rem - slots_left).max(1);
            sizes.push(take);
            rem -= take;
        }
        debug_assert_eq!(rem, 0);
        let children = sizes
            .into_iter()
            .map(|s| build(s, mode, policy, arity))
            .collect();
        TreeNode::Block {
            chain: block_chain(arity, mode, policy, arity),
            children,
        }
    }
    Ok(FanoutTree::from_root(mode, build(n, mode, policy, arity)))
}

/// Render a ranked tree as a chain-topology document: one line per block with
/// the two JJ critical currents of every JTL stage, suitable for
/// hand-translation to an analog simulator deck.
pub fn export_tree_netlist(tree: &FanoutTree, ladder: &RankLadder) -> Result<String, TreeError> {
    if tree.mode == TreeMode::Conventional {
        return Err(TreeError::UnsupportedMode);
    }
    let mut out = String::new();
    out.push_str("chain-topology v1\n");
    out.push_str(&format!(
        "leaves {} blocks {} jjs {}\n",
        tree.leaves, tree.node_count, tree.jj_cost
    ));
    // Breadth-first walk with parent indices for connectivity.
    let mut queue: Vec<(&TreeNode, usize)> = vec![(&tree.root, 0)];
    let mut head = 0;
    let mut block_no = 0usize;
    while head < queue.len() {
        let (node, parent) = queue[head];
        head += 1;
        if let TreeNode::Block { chain, children } = node {
            block_no += 1;
            let stages: Vec<String> = chain
                .stages
                .iter()
                .map(|s| {
                    let i_in = ladder.rank_to_current(s.input_rank).unwrap_or(0);
                    let i_out = ladder.rank_to_current(s.output_rank).unwrap_or(0);
                    format!("({i_in},{i_out})")
                })
                .collect();
            let fanout = children.len();
            out.push_str(&format!(
                "block {block_no} parent {parent} chain {chain} fanout {fanout} stages_ua [{}]\n",
                stages.join(",")
            ));
            for child in children {
                queue.push((child, block_no));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> RankLadder {
        RankLadder::default_sqrt2()
    }

    #[test]
    fn splitter_tree_examples() {
        let t = splitter_tree(2).unwrap();
        assert_eq!((t.leaves, t.jj_cost, t.node_count), (2, 3, 1));
        let t = splitter_tree(1024).unwrap();
        assert_eq!((t.leaves, t.jj_cost, t.node_count), (1024, 3069, 1023));
        assert_eq!(t.depth, 10);
        let t = splitter_tree(1).unwrap();
        assert_eq!((t.leaves, t.jj_cost), (1, 0));
    }

    #[test]
    fn splitter_cost_law_exhaustive() {
        for n in 1..=4096u64 {
            let t = splitter_tree(n).unwrap();
            assert_eq!(t.leaves, n);
            assert_eq!(t.jj_cost, 3 * (n - 1));
            if n > 1 {
                assert_eq!(t.depth, (n as f64).log2().ceil() as u32);
            }
        }
    }

    #[test]
    fn fo1024_balanced_modular() {
        let t = ranked_tree(
            1024,
            &ladder(),
            &AmplifierPolicy::sqrt2(),
            TreeMode::RankedModularUniform,
            StageOrder::Balanced,
        )
        .unwrap();
        assert_eq!(t.leaves, 1024);
        assert_eq!(t.node_count, 201);
        assert_eq!(t.jj_cost, 1608);
        let conventional = splitter_tree(1024).unwrap().jj_cost;
        let savings = 100.0 * (conventional - t.jj_cost) as f64 / conventional as f64;
        assert!((savings - 47.6).abs() < 0.1, "savings {savings}");
    }

    #[test]
    fn fo1024_min_cost_modular() {
        // Oracle: enumerate all orderings of the factors {8,8,8,2} and take the
        // minimum sum of prefix products.
        let factors = [8u64, 8, 8, 2];
        let mut best = u64::MAX;
        let mut perms = vec![factors.to_vec()];
        // distinct orderings: position of the 2
        for pos in 0..4 {
            let mut f = vec![8u64; 4];
            f[pos] = 2;
            perms.push(f);
        }
        for p in &perms {
            let mut blocks = 1;
            let mut prefix = 1;
            for f in &p[..p.len() - 1] {
                prefix *= f;
                blocks += prefix;
            }
            best = best.min(blocks);
        }
        assert_eq!(best, 147);
        let t = ranked_tree(
            1024,
            &ladder(),
            &AmplifierPolicy::sqrt2(),
            TreeMode::RankedModularUniform,
            StageOrder::MinCost,
        )
        .unwrap();
        assert_eq!(t.node_count, 147);
        assert_eq!(t.jj_cost, 1176);
    }

    #[test]
    fn min_cost_never_more_expensive() {
        let ladder = ladder();
        let policy = AmplifierPolicy::sqrt2();
        for n in [4u64, 8, 12, 16, 24, 64, 96, 128, 512, 1024, 2048] {
            for mode in [TreeMode::RankedRightSized, TreeMode::RankedModularUniform] {
                let balanced =
                    ranked_tree(n, &ladder, &policy, mode, StageOrder::Balanced).unwrap();
                let min_cost = ranked_tree(n, &ladder, &policy, mode, StageOrder::MinCost).unwrap();
                assert!(
                    min_cost.jj_cost <= balanced.jj_cost,
                    "n={n} {mode:?}: {} > {}",
                    min_cost.jj_cost,
                    balanced.jj_cost
                );
            }
        }
    }

    #[test]
    fn single_block_right_sized() {
        let t = ranked_tree(
            8,
            &ladder(),
            &AmplifierPolicy::sqrt2(),
            TreeMode::RankedRightSized,
            StageOrder::Balanced,
        )
        .unwrap();
        assert_eq!(t.node_count, 1);
        assert_eq!(t.jj_cost, 8);
        assert_eq!(splitter_tree(8).unwrap().jj_cost, 21);
    }

    #[test]
    fn leaf_count_conserved_all_modes() {
        let ladder = ladder();
        let policy = AmplifierPolicy::sqrt2();
        for n in 1..=200u64 {
            for mode in [TreeMode::RankedRightSized, TreeMode::RankedModularUniform] {
                for order in [StageOrder::Balanced, StageOrder::MinCost] {
                    let t = ranked_tree(n, &ladder, &policy, mode, order).unwrap();
                    assert_eq!(t.leaves, n, "n={n} {mode:?} {order:?}");
                }
            }
            let t = even_split_tree(n, &ladder, &policy, 8).unwrap();
            assert_eq!(t.leaves, n);
            let t = saturated_tree(n, &ladder, &policy, 3, TreeMode::RankedModularUniform).unwrap();
            assert_eq!(t.leaves, n);
        }
    }

    #[test]
    fn modular_cost_is_blocks_times_full_chain() {
        let ladder = ladder();
        let policy = AmplifierPolicy::sqrt2();
        for n in [2u64, 7, 16, 40, 100, 1024] {
            let t = ranked_tree(
                n,
                &ladder,
                &policy,
                TreeMode::RankedModularUniform,
                StageOrder::Balanced,
            )
            .unwrap();
            assert_eq!(t.jj_cost, 8 * t.node_count);
        }
    }

    #[test]
    fn block_count_is_prefix_product_sum() {
        // For stage factors f1..fm: 1 + f1 + f1f2 + …
        let cases: &[(&[u64], u64)] = &[
            (&[8, 8, 2, 8], 1 + 8 + 64 + 128),
            (&[2, 8, 8, 8], 1 + 2 + 16 + 128),
            (&[8, 4, 5], 1 + 8 + 32),
        ];
        for (factors, want) in cases {
            let mut blocks = 1u64;
            let mut prefix = 1u64;
            for f in &factors[..factors.len() - 1] {
                prefix *= f;
                blocks += prefix;
            }
            assert_eq!(blocks, *want);
        }
    }

    #[test]
    fn saturated_tree_minimum_blocks() {
        let ladder = ladder();
        let policy = AmplifierPolicy::sqrt2();
        for n in 2..=500u64 {
            let t = saturated_tree(n, &ladder, &policy, 3, TreeMode::RankedRightSized).unwrap();
            assert_eq!(t.node_count, (n - 1).div_ceil(2), "n={n}");
        }
        // arity 8: matches the FO1024 min-cost block count
        let t = saturated_tree(1024, &ladder, &policy, 8, TreeMode::RankedModularUniform).unwrap();
        assert_eq!(t.node_count, 147);
    }

    #[test]
    fn export_r1_to_8_chain() {
        let ladder = ladder();
        let t = ranked_tree(
            8,
            &ladder,
            &AmplifierPolicy::sqrt2(),
            TreeMode::RankedRightSized,
            StageOrder::Balanced,
        )
        .unwrap();
        let doc = export_tree_netlist(&t, &ladder).unwrap();
        assert!(doc.contains("stages_ua [(46,66),(88,125),(180,250),(353,500)]"));
    }

    #[test]
    fn export_empty_and_conventional() {
        let ladder = ladder();
        let t = ranked_tree(
            1,
            &ladder,
            &AmplifierPolicy::sqrt2(),
            TreeMode::RankedRightSized,
            StageOrder::Balanced,
        )
        .unwrap();
        let doc = export_tree_netlist(&t, &ladder).unwrap();
        assert!(doc.contains("blocks 0"));
        assert!(!doc.contains("block 1"));
        assert_eq!(
            export_tree_netlist(&splitter_tree(4).unwrap(), &ladder),
            Err(TreeError::UnsupportedMode)
        );
    }

    #[test]
    fn export_fo1024_block_inventory() {
        let ladder = ladder();
        let t = ranked_tree(
            1024,
            &ladder,
            &AmplifierPolicy::sqrt2(),
            TreeMode::RankedModularUniform,
            StageOrder::Balanced,
        )
        .unwrap();
        let doc = export_tree_netlist(&t, &ladder).unwrap();
        assert_eq!(doc.matches("\nblock ").count(), 201);
        assert_eq!(
            doc.matches("stages_ua [(46,66),(88,125),(180,250),(353,500)]")
                .count(),
            201
        );
    }
}
