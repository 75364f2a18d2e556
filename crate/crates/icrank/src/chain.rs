//! Rank-to-rank connection rules: direct fan-out capacity downhill, amplifying
//! JTL chains uphill.
//!
//! A source of rank `s` drives up to `s − t + 1` targets of rank `t ≤ s` with no
//! extra hardware. Going up from `s` to `t > s` takes a chain of two-JJ
//! amplifying JTLs. Under the default ("gap") model each JTL climbs
//! `intra_step_ranks` ranks and one more rank is gained for free between
//! consecutive JTLs, so the chain R3:6 is two JTLs: (3→4), free step to 5,
//! (5→6). The alternate ("eq2") model charges each of the two JJs in a JTL one
//! amplification step and allows no free inter-JTL gain; the two models differ
//! at even rank distances.

use crate::ladder::{Rank, RankLadder};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChainError {
    #[error("chain source {src} above target {dst}; plan_chain needs source <= target")]
    SourceAboveTarget { src: Rank, dst: Rank },
    #[error("rank {rank} not on the {count}-rung ladder")]
    RankOffLadder { rank: Rank, count: u32 },
    #[error(
        "fan-out {fanout} from targets at {target} needs source rank {needed}, above the ladder top {top}"
    )]
    InfeasibleFanout {
        fanout: u32,
        target: Rank,
        needed: u32,
        top: Rank,
    },
}

/// Which closed form decides the number of JTLs in an amplifying chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChainModel {
    /// `N·j + (N−1)·g ≥ d`: each JTL climbs `j` ranks, `g` more gained between JTLs.
    #[default]
    Gap,
    /// `N ≥ d / (2·j)`: both JJs of a JTL amplify, no inter-JTL gain.
    Eq2,
}

/// How amplifying JTLs climb the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifierPolicy {
    /// Ranks gained inside one JTL (1 for a √2 amplification step, 2 for a step of 2).
    pub intra_step_ranks: u32,
    /// Ranks gained between consecutive JTLs (gap model only).
    pub inter_gap_ranks: u32,
    /// JJs per JTL. Two in every design considered here.
    pub jjs_per_jtl: u32,
    pub chain_model: ChainModel,
}

impl Default for AmplifierPolicy {
    fn default() -> Self {
        Self::sqrt2()
    }
}

impl AmplifierPolicy {
    /// √2 amplification step: one rank per JTL.
    pub fn sqrt2() -> Self {
        AmplifierPolicy {
            intra_step_ranks: 1,
            inter_gap_ranks: 1,
            jjs_per_jtl: 2,
            chain_model: ChainModel::Gap,
        }
    }

    /// Step of 2 inside each JTL, √2 (one rank) between JTLs.
    pub fn step2() -> Self {
        AmplifierPolicy {
            intra_step_ranks: 2,
            inter_gap_ranks: 1,
            jjs_per_jtl: 2,
            chain_model: ChainModel::Gap,
        }
    }

    pub fn with_model(mut self, model: ChainModel) -> Self {
        self.chain_model = model;
        self
    }

    /// Number of JTLs needed to climb `d` ranks.
    pub fn jtls_for_distance(&self, d: u32) -> u32 {
        if d == 0 {
            return 0;
        }
        let j = self.intra_step_ranks.max(1);
        match self.chain_model {
            ChainModel::Gap => {
                let g = self.inter_gap_ranks;
                // smallest N with N*j + (N-1)*g >= d
                (d + g).div_ceil(j + g)
            }
            ChainModel::Eq2 => d.div_ceil(2 * j),
        }
    }
}

/// One amplifying JTL: input and output rank. `input == output` marks a
/// non-amplifying (buffer) JTL at the tail of a truncated chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JtlStage {
    pub input_rank: Rank,
    pub output_rank: Rank,
}

/// A planned chain of amplifying JTLs from `source_rank` up to `target_rank`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JtlChainPlan {
    pub source_rank: Rank,
    pub target_rank: Rank,
    pub stages: Vec<JtlStage>,
    pub jj_count: u32,
}

impl JtlChainPlan {
    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn num_jtls(&self) -> u32 {
        self.stages.len() as u32
    }
}

impl std::fmt::Display for JtlChainPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "R{}:{}", self.source_rank.0, self.target_rank.0)
    }
}

/// Maximum direct fan-out from rank `s` to targets of rank `t`, or `None` when
/// the connection is fan-out negative (`s < t`).
pub fn fanout_capacity(s: Rank, t: Rank) -> Option<u32> {
    if s >= t {
        Some(s.0 - t.0 + 1)
    } else {
        None
    }
}

/// Smallest source rank that drives `n` targets of rank `t` directly.
pub fn required_source_rank(n: u32, t: Rank, ladder: &RankLadder) -> Result<Rank, ChainError> {
    assert!(n >= 1, "fan-out must be at least 1");
    if !ladder.contains(t) {
        return Err(ChainError::RankOffLadder {
            rank: t,
            count: ladder.len(),
        });
    }
    let needed = t.0 + n - 1;
    if needed > ladder.len() {
        return Err(ChainError::InfeasibleFanout {
            fanout: n,
            target: t,
            needed,
            top: ladder.top(),
        });
    }
    Ok(Rank(needed))
}

/// Plan the amplifying-JTL chain from `s` up to `t`. Equal ranks give an empty
/// chain. The final JTL is truncated so its output lands exactly on `t`.
pub fn plan_chain(s: Rank, t: Rank, policy: &AmplifierPolicy) -> Result<JtlChainPlan, ChainError> {
    if s > t {
        return Err(ChainError::SourceAboveTarget { src: s, dst: t });
    }
    let d = t.0 - s.0;
    let n = policy.jtls_for_distance(d);
    let mut stages = Vec::with_capacity(n as usize);
    let j = policy.intra_step_ranks.max(1);
    let (climb, gap) = match policy.chain_model {
        ChainModel::Gap => (j, policy.inter_gap_ranks),
        ChainModel::Eq2 => (2 * j, 0),
    };
    let mut cur = s.0;
    for i in 0..n {
        if i > 0 {
            cur = (cur + gap).min(t.0);
        }
        let out = (cur + climb).min(t.0);
        stages.push(JtlStage {
            input_rank: Rank(cur),
            output_rank: Rank(out),
        });
        cur = out;
    }
    debug_assert!(stages.last().map_or(s == t, |l| l.output_rank == t));
    Ok(JtlChainPlan {
        source_rank: s,
        target_rank: t,
        jj_count: n * policy.jjs_per_jtl,
        stages,
    })
}

/// Connection rule from a source rank (row) to a target rank (column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectionRule {
    /// Direct connection; up to `max_fanout` targets with no extra hardware.
    FanoutPositive { max_fanout: u32 },
    /// Fan-out negative; `num_jtls` amplifying JTLs bridge the rank gap.
    NeedsAmplification { num_jtls: u32 },
}

/// The full N×N rule table for a ladder. Entry `[s-1][t-1]` is the rule for a
/// rank-`s` source driving rank-`t` targets.
pub fn connection_rule_table(
    ladder: &RankLadder,
    policy: &AmplifierPolicy,
) -> Vec<Vec<ConnectionRule>> {
    let n = ladder.len();
    (1..=n)
        .map(|s| {
            (1..=n)
                .map(|t| match fanout_capacity(Rank(s), Rank(t)) {
                    Some(cap) => ConnectionRule::FanoutPositive { max_fanout: cap },
                    None => ConnectionRule::NeedsAmplification {
                        num_jtls: policy.jtls_for_distance(t - s),
                    },
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stage(a: u32, b: u32) -> JtlStage {
        JtlStage {
            input_rank: Rank(a),
            output_rank: Rank(b),
        }
    }

    #[test]
    fn capacity_worked_examples() {
        assert_eq!(fanout_capacity(Rank(6), Rank(3)), Some(4));
        assert_eq!(fanout_capacity(Rank(8), Rank(2)), Some(7));
        assert_eq!(fanout_capacity(Rank(4), Rank(2)), Some(3));
        assert_eq!(fanout_capacity(Rank(5), Rank(5)), Some(1));
        assert_eq!(fanout_capacity(Rank(3), Rank(6)), None);
    }

    #[test]
    fn capacity_unit_increment() {
        for t in 1..=8u32 {
            for s in t..8 {
                let a = fanout_capacity(Rank(s), Rank(t)).unwrap();
                let b = fanout_capacity(Rank(s + 1), Rank(t)).unwrap();
                assert_eq!(b, a + 1);
            }
        }
    }

    #[test]
    fn required_rank_examples() {
        let ladder = RankLadder::default_sqrt2();
        assert_eq!(required_source_rank(4, Rank(3), &ladder).unwrap(), Rank(6));
        assert_eq!(required_source_rank(1, Rank(5), &ladder).unwrap(), Rank(5));
        assert!(matches!(
            required_source_rank(9, Rank(1), &ladder),
            Err(ChainError::InfeasibleFanout { needed: 9, .. })
        ));
    }

    #[test]
    fn chain_r3_to_r6() {
        let plan = plan_chain(Rank(3), Rank(6), &AmplifierPolicy::sqrt2()).unwrap();
        assert_eq!(plan.stages, vec![stage(3, 4), stage(5, 6)]);
        assert_eq!(plan.jj_count, 4);
    }

    #[test]
    fn chain_full_ladder_sqrt2() {
        let plan = plan_chain(Rank(1), Rank(8), &AmplifierPolicy::sqrt2()).unwrap();
        assert_eq!(plan.num_jtls(), 4);
        assert_eq!(plan.jj_count, 8);
        assert_eq!(
            plan.stages,
            vec![stage(1, 2), stage(3, 4), stage(5, 6), stage(7, 8)]
        );
    }

    #[test]
    fn chain_full_ladder_step2() {
        let plan = plan_chain(Rank(1), Rank(8), &AmplifierPolicy::step2()).unwrap();
        assert_eq!(plan.num_jtls(), 3);
        assert_eq!(plan.stages, vec![stage(1, 3), stage(4, 6), stage(7, 8)]);
    }

    #[test]
    fn chain_single_step_and_identity() {
        let plan = plan_chain(Rank(2), Rank(3), &AmplifierPolicy::sqrt2()).unwrap();
        assert_eq!(plan.num_jtls(), 1);
        let idle = plan_chain(Rank(4), Rank(4), &AmplifierPolicy::sqrt2()).unwrap();
        assert!(idle.is_empty());
        assert_eq!(idle.jj_count, 0);
    }

    #[test]
    fn chain_truncates_even_distance() {
        // d=2 under the gap model costs two JTLs, the second non-amplifying.
        let plan = plan_chain(Rank(2), Rank(4), &AmplifierPolicy::sqrt2()).unwrap();
        assert_eq!(plan.stages, vec![stage(2, 3), stage(4, 4)]);
    }

    #[test]
    fn eq2_model_even_distance() {
        let policy = AmplifierPolicy::sqrt2().with_model(ChainModel::Eq2);
        let plan = plan_chain(Rank(2), Rank(4), &policy).unwrap();
        assert_eq!(plan.num_jtls(), 1);
        assert_eq!(plan.stages, vec![stage(2, 4)]);
        // d=7 costs the same four JTLs as the gap model.
        assert_eq!(policy.jtls_for_distance(7), 4);
    }

    #[test]
    fn chain_rejects_downhill() {
        assert!(plan_chain(Rank(6), Rank(3), &AmplifierPolicy::sqrt2()).is_err());
    }

    /// Brute force: fewest JTLs such that some legal sequence of climbs
    /// (≤ `climb` per JTL) and gaps (≤ `gap` between JTLs) covers `d`.
    fn oracle_min_jtls(d: u32, climb: u32, gap: u32) -> u32 {
        if d == 0 {
            return 0;
        }
        for n in 1..=64 {
            if n * climb + (n - 1) * gap >= d {
                return n;
            }
        }
        unreachable!()
    }

    #[test]
    fn chain_length_matches_oracle_both_models() {
        for (policy, climb, gap) in [
            (AmplifierPolicy::sqrt2(), 1, 1),
            (AmplifierPolicy::step2(), 2, 1),
            (AmplifierPolicy::sqrt2().with_model(ChainModel::Eq2), 2, 0),
            (AmplifierPolicy::step2().with_model(ChainModel::Eq2), 4, 0),
        ] {
            for s in 1..=8u32 {
                for t in s..=8u32 {
                    let plan = plan_chain(Rank(s), Rank(t), &policy).unwrap();
                    assert_eq!(
                        plan.num_jtls(),
                        oracle_min_jtls(t - s, climb, gap),
                        "s={s} t={t} policy={policy:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn chain_count_monotone_in_distance() {
        for policy in [AmplifierPolicy::sqrt2(), AmplifierPolicy::step2()] {
            let mut prev = 0;
            for d in 0..=16 {
                let n = policy.jtls_for_distance(d);
                assert!(n >= prev);
                prev = n;
            }
        }
    }

    #[test]
    fn rule_table_entries() {
        let ladder = RankLadder::default_sqrt2();
        let table = connection_rule_table(&ladder, &AmplifierPolicy::sqrt2());
        assert_eq!(table.len(), 8);
        assert_eq!(
            table[5][2],
            ConnectionRule::FanoutPositive { max_fanout: 4 }
        );
        assert_eq!(
            table[2][5],
            ConnectionRule::NeedsAmplification { num_jtls: 2 }
        );
        for (k, row) in table.iter().enumerate() {
            assert_eq!(row[k], ConnectionRule::FanoutPositive { max_fanout: 1 });
        }
    }

    #[test]
    fn rule_table_consistent_with_chains() {
        // Amplifying s→t then fanning out uses the capacity of t itself.
        let ladder = RankLadder::default_sqrt2();
        let policy = AmplifierPolicy::sqrt2();
        for s in 1..8u32 {
            for t in (s + 1)..=8 {
                let plan = plan_chain(Rank(s), Rank(t), &policy).unwrap();
                assert_eq!(plan.target_rank, Rank(t));
                for t2 in 1..=t {
                    assert_eq!(
                        fanout_capacity(plan.target_rank, Rank(t2)),
                        Some(t - t2 + 1)
                    );
                }
            }
        }
        let _ = ladder;
    }
}
