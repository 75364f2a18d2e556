//! Randomized property tests over the rank algebra, parsers, trees, and the
//! assignment pass.

use icrank::chain::{plan_chain, AmplifierPolicy, ChainModel};
use icrank::config::RunConfig;
use icrank::cost::CellLibrary;
use icrank::ladder::{build_ladder, Rank};
use icrank::netlist::{parse_bench, CellKind};
use icrank::tree::{ranked_tree, StageOrder, TreeMode};
use icrank::{assign_ranks, plan_clock_tree, verify_assignment, AssignmentOptions, BiasMode};
use proptest::prelude::*;

fn sqrt2() -> AmplifierPolicy {
    AmplifierPolicy::sqrt2()
}

proptest! {
    #[test]
    fn ladder_round_trips_on_random_ranges(i_min in 20.0f64..200.0, span in 1.5f64..12.0) {
        let i_max = i_min * span;
        let ladder = build_ladder(i_min, i_max, std::f64::consts::SQRT_2, 2.0).unwrap();
        prop_assert!(ladder.check().is_empty(), "{:?}", ladder.check());
        for r in 1..=ladder.len() {
            let current = ladder.rank_to_current(Rank(r)).unwrap();
            prop_assert_eq!(ladder.current_to_rank(current as f64).unwrap(), Rank(r));
        }
    }

    #[test]
    fn chain_plans_cover_the_distance(s in 1u32..=8, d in 0u32..=7, step2 in proptest::bool::ANY, eq2 in proptest::bool::ANY) {
        prop_assume!(s + d <= 8);
        let mut policy = if step2 { AmplifierPolicy::step2() } else { sqrt2() };
        if eq2 {
            policy = policy.with_model(ChainModel::Eq2);
        }
        let plan = plan_chain(Rank(s), Rank(s + d), &policy).unwrap();
        prop_assert_eq!(plan.jj_count, 2 * plan.num_jtls());
        if d == 0 {
            prop_assert!(plan.is_empty());
        } else {
            prop_assert_eq!(plan.stages.first().unwrap().input_rank, Rank(s));
            prop_assert_eq!(plan.stages.last().unwrap().output_rank, Rank(s + d));
            // Monotone, and never a cheaper plan at a shorter distance.
            let shorter = plan_chain(Rank(s), Rank(s + d - 1), &policy).unwrap();
            prop_assert!(shorter.num_jtls() <= plan.num_jtls());
        }
    }

    #[test]
    fn tree_leaves_conserved(n in 1u64..2500, modular in proptest::bool::ANY, min_cost in proptest::bool::ANY) {
        let ladder = RunConfig::default().ladder().unwrap();
        let mode = if modular { TreeMode::RankedModularUniform } else { TreeMode::RankedRightSized };
        let order = if min_cost { StageOrder::MinCost } else { StageOrder::Balanced };
        let tree = ranked_tree(n, &ladder, &sqrt2(), mode, order).unwrap();
        prop_assert_eq!(tree.leaves, n);
        let min = ranked_tree(n, &ladder, &sqrt2(), mode, StageOrder::MinCost).unwrap();
        let balanced = ranked_tree(n, &ladder, &sqrt2(), mode, StageOrder::Balanced).unwrap();
        prop_assert!(min.jj_cost <= balanced.jj_cost);
    }

    #[test]
    fn bias_savings_scale_invariant(factor in 0.05f64..40.0, n in prop::sample::select(vec![2u32, 4, 8]), matched in proptest::bool::ANY) {
        let ladder = RunConfig::default().ladder().unwrap();
        let lib = CellLibrary::default();
        let mut scaled = lib.clone();
        for entry in scaled.cells.values_mut() {
            entry.bias_current_ua *= factor;
        }
        scaled.splitter_bias_ua *= factor;
        let mode = if matched { BiasMode::Matched } else { BiasMode::Flexible };
        let a = icrank::bias_savings(CellKind::Xor, n, mode, &lib, &ladder, &sqrt2()).unwrap();
        let b = icrank::bias_savings(CellKind::Xor, n, mode, &scaled, &ladder, &sqrt2()).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn bench_parse_is_order_insensitive(seed in any::<u64>()) {
        let mut statements = vec![
            "INPUT(N1)", "INPUT(N2)", "INPUT(N3)", "INPUT(N6)", "INPUT(N7)",
            "OUTPUT(N22)", "OUTPUT(N23)",
            "N10 = NAND(N1, N3)", "N11 = NAND(N3, N6)", "N16 = NAND(N2, N11)",
            "N19 = NAND(N11, N7)", "N22 = NAND(N10, N16)", "N23 = NAND(N16, N19)",
        ];
        // Deterministic shuffle from the seed.
        let mut state = seed;
        for i in (1..statements.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            statements.swap(i, j);
        }
        let shuffled = statements.join("\n");
        let a = parse_bench(&shuffled, "c17").unwrap();
        let b = parse_bench(include_str!("../data/netlists/c17.bench"), "c17").unwrap();
        prop_assert_eq!(a.fanout_profile(true).per_net, b.fanout_profile(true).per_net);
        prop_assert_eq!(a.levelize().unwrap().per_cell, b.levelize().unwrap().per_cell);
    }
}

/// Random layered DAG netlists in `.bench` text form. Layer widths stay small
/// enough for the default ladder to cover every stage and chain.
fn random_dag() -> impl Strategy<Value = String> {
    let layer = prop::collection::vec(0u8..4, 1..=4);
    let layers = prop::collection::vec(layer, 2..=4);
    (layers, prop::collection::vec(any::<u32>(), 64)).prop_map(|(layers, picks)| {
        let kinds = ["AND", "OR", "XOR", "DFF"];
        let mut text = String::new();
        let mut pick = picks.into_iter().cycle();
        let inputs = ["a", "b", "c"];
        for i in &inputs {
            text.push_str(&format!("INPUT({i})\n"));
        }
        let mut prev: Vec<String> = inputs.iter().map(|s| s.to_string()).collect();
        let mut last = Vec::new();
        for (li, layer) in layers.iter().enumerate() {
            let mut current = Vec::new();
            for (ci, kind_idx) in layer.iter().enumerate() {
                let id = format!("l{li}c{ci}");
                let kind = kinds[*kind_idx as usize % kinds.len()];
                if kind == "DFF" {
                    let src = &prev[pick.next().unwrap() as usize % prev.len()];
                    text.push_str(&format!("{id} = DFF({src})\n"));
                } else {
                    let x = &prev[pick.next().unwrap() as usize % prev.len()];
                    let y = &prev[pick.next().unwrap() as usize % prev.len()];
                    text.push_str(&format!("{id} = {kind}({x}, {y})\n"));
                }
                current.push(id);
            }
            prev = current.clone();
            last = current;
        }
        for id in &last {
            text.push_str(&format!("OUTPUT({id})\n"));
        }
        text
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_dags_assign_clean(text in random_dag()) {
        let ladder = RunConfig::default().ladder().unwrap();
        let policy = sqrt2();
        let opts = AssignmentOptions::default();
        let netlist = parse_bench(&text, "random").unwrap();
        let Ok(mut assignment) = assign_ranks(&netlist, &ladder, &policy, &opts) else {
            // Random fan-out may legitimately exceed the ladder; those runs
            // are the infeasibility path, covered elsewhere.
            return Ok(());
        };
        assignment.clock_plan =
            Some(plan_clock_tree(&netlist, &assignment, &ladder, &policy, &opts).unwrap());
        let violations = verify_assignment(&netlist, &assignment, &ladder, &policy);
        prop_assert!(violations.is_empty(), "{violations:?}\n{text}");

        // Determinism: a rerun reproduces the assignment bit for bit.
        let again = assign_ranks(&netlist, &ladder, &policy, &opts).unwrap();
        prop_assert_eq!(&assignment.per_cell_rank, &again.per_cell_rank);
        let keys: Vec<_> = assignment.inserted_chains.keys().collect();
        let keys_again: Vec<_> = again.inserted_chains.keys().collect();
        prop_assert_eq!(keys, keys_again);

        // Chains are minimal: dropping any JTL breaks verification.
        for (net, chain) in &assignment.inserted_chains {
            for drop in 0..chain.stages.len() {
                let mut mutated = assignment.clone();
                let mut shorter = chain.clone();
                shorter.stages.remove(drop);
                shorter.jj_count -= 2;
                mutated.inserted_chains.insert(net.clone(), shorter);
                prop_assert!(
                    !verify_assignment(&netlist, &mutated, &ladder, &policy).is_empty(),
                    "dropping a JTL on {net} went unnoticed"
                );
            }
        }
    }
}
