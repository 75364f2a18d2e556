//! Ladders and policies beyond the defaults: narrower current ranges, a step
//! of 2, and the eq2 chain-count model.
//!
//!     cargo run --example custom_ladder

use icrank::chain::{plan_chain, ChainModel};
use icrank::ladder::{build_ladder, Rank};
use icrank::AmplifierPolicy;

fn main() {
    // The default range, then a conservative sub-range that stops at 88 µA to
    // dodge the thermal floor with margin.
    for (lo, hi) in [(46.0, 500.0), (88.0, 500.0)] {
        let ladder = build_ladder(lo, hi, std::f64::consts::SQRT_2, 2.0).expect("ladder");
        println!(
            "[{lo}, {hi}] µA -> {} ranks: {:?}",
            ladder.len(),
            ladder.currents()
        );
    }

    // A coarse ladder with step 2.
    let coarse = build_ladder(46.0, 500.0, 2.0, 2.0).expect("ladder");
    println!(
        "step-2 ladder -> {} ranks: {:?}\n",
        coarse.len(),
        coarse.currents()
    );

    // Chain plans for the full climb under each policy/model combination.
    for (label, policy) in [
        ("sqrt2 / gap", AmplifierPolicy::sqrt2()),
        ("step2 / gap", AmplifierPolicy::step2()),
        (
            "sqrt2 / eq2",
            AmplifierPolicy::sqrt2().with_model(ChainModel::Eq2),
        ),
        (
            "step2 / eq2",
            AmplifierPolicy::step2().with_model(ChainModel::Eq2),
        ),
    ] {
        let plan = plan_chain(Rank(1), Rank(8), &policy).expect("uphill");
        let stages: Vec<String> = plan
            .stages
            .iter()
            .map(|s| format!("({},{})", s.input_rank.0, s.output_rank.0))
            .collect();
        println!(
            "R1:8 under {label}: {} JTLs, {} JJs, stages {}",
            plan.num_jtls(),
            plan.jj_count,
            stages.join(" ")
        );
    }
}
