//! The critical-current ladder: a geometric grid of baseline critical currents,
//! each rung labeled with an integer rank (1 = lowest current).
//!
//! Rung values are anchored at 250 µA (the common SFQ library baseline) whenever
//! that value lies inside the requested range, and snapped to the customary
//! nominal series {…, 46, 66, 88, 125, 180, 250, 353, 500, …} for √2 ladders.
//! The nominals are hand-rounded rather than pure `round(250·√2^k)` — 66 µA sits
//! 5.6% above the exact grid point — so snapping is what makes round-trips with
//! published cell currents work.

use serde::{Deserialize, Serialize};

/// Relative tolerance used when snapping exact grid values to the nominal series.
const NOMINAL_SNAP_TOL: f64 = 0.06;

/// Published nominal rung currents (µA) for the √2 ladder.
const SQRT2_NOMINALS: [u32; 8] = [46, 66, 88, 125, 180, 250, 353, 500];

/// 1-based rank label on a ladder. Rank 1 is the lowest baseline critical current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rank(pub u32);

impl Rank {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for Rank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "R{}", self.0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LadderError {
    #[error("degenerate ladder: no rung fits in [{i_min} µA, {i_max} µA] with step {p_r}")]
    Degenerate { i_min: f64, i_max: f64, p_r: f64 },
    #[error("invalid ladder bounds: i_min={i_min} µA, i_max={i_max} µA (need 0 < i_min <= i_max)")]
    BadBounds { i_min: f64, i_max: f64 },
    #[error("invalid step ratio p_r={0} (need p_r > 1)")]
    BadStep(f64),
    #[error("rank {rank} out of range 1..={count}")]
    RankOutOfRange { rank: u32, count: u32 },
    #[error(
        "no rung within {tol_pct:.1}% of {current} µA (nearest {nearest} µA, gap {gap_pct:.1}%)"
    )]
    NoMatchingRung {
        current: f64,
        nearest: u32,
        gap_pct: f64,
        tol_pct: f64,
    },
}

/// An ordered set of discrete baseline critical currents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankLadder {
    /// Rung currents in µA, strictly increasing. Index 0 is rank 1.
    currents: Vec<u32>,
    /// Step ratio between adjacent rungs.
    step_ratio: f64,
    i_min: f64,
    i_max: f64,
    /// Relative tolerance (fraction) for matching a current to a rung.
    rounding_tolerance: f64,
}

/// Number of ranks needed to span `[i_min, i_max]` with step `p_r`
/// (`⌈log(i_max/i_min)/log(p_r) + 1⌉`). The ladder itself is clipped to the
/// bounds and may hold fewer rungs when the range is not an exact power of
/// the step; see `build_ladder`.
pub fn ranks_to_span(i_min: f64, i_max: f64, p_r: f64) -> u32 {
    let n = (i_max / i_min).ln() / p_r.ln() + 1.0;
    (n - 1e-9).ceil() as u32
}

/// Build a ladder of discrete critical currents over `[i_min, i_max]` µA with
/// step ratio `p_r`, anchored at 250 µA when in range. `rounding_pct` is the
/// relative match tolerance (in percent) used by `current_to_rank`.
pub fn build_ladder(
    i_min: f64,
    i_max: f64,
    p_r: f64,
    rounding_pct: f64,
) -> Result<RankLadder, LadderError> {
    if !i_min.is_finite() || i_min <= 0.0 || i_min > i_max {
        return Err(LadderError::BadBounds { i_min, i_max });
    }
    if !p_r.is_finite() || p_r <= 1.0 {
        return Err(LadderError::BadStep(p_r));
    }
    let anchored_at_nominal = (i_min..=i_max).contains(&250.0);
    let anchor = if anchored_at_nominal { 250.0 } else { i_min };
    // The published nominal series only lines up with the 250 µA anchor grid;
    // off-grid anchors round plainly so adjacent ratios stay consistent.
    let sqrt2_like = anchored_at_nominal && (p_r - std::f64::consts::SQRT_2).abs() < 0.01;
    let nominals = nominal_series();

    let mut currents = Vec::new();
    // Scan grid exponents well past the bounds; snapping decides membership.
    let k_lo = ((i_min / anchor).ln() / p_r.ln()).floor() as i32 - 2;
    let k_hi = ((i_max / anchor).ln() / p_r.ln()).ceil() as i32 + 2;
    for k in k_lo..=k_hi {
        let raw = anchor * p_r.powi(k);
        let v = if sqrt2_like {
            snap_to_nominal(raw, &nominals)
        } else {
            raw.round() as u32
        };
        if (v as f64) >= i_min - 0.5 && (v as f64) <= i_max + 0.5 && currents.last() != Some(&v) {
            currents.push(v);
        }
    }
    if currents.is_empty() {
        return Err(LadderError::Degenerate { i_min, i_max, p_r });
    }
    debug_assert!(currents.windows(2).all(|w| w[0] < w[1]));
    Ok(RankLadder {
        currents,
        step_ratio: p_r,
        i_min,
        i_max,
        rounding_tolerance: rounding_pct / 100.0,
    })
}

fn nominal_series() -> Vec<u32> {
    let mut series = Vec::new();
    // extend downwards from the lowest published value
    let mut v = SQRT2_NOMINALS[0] as f64;
    let mut below = Vec::new();
    while v > 2.0 {
        v /= std::f64::consts::SQRT_2;
        below.push(v.round() as u32);
    }
    below.reverse();
    series.extend(below);
    series.extend_from_slice(&SQRT2_NOMINALS);
    // and upwards from the highest
    let mut v = *SQRT2_NOMINALS.last().unwrap() as f64;
    while v < 2_000_000.0 {
        v *= std::f64::consts::SQRT_2;
        series.push(v.round() as u32);
    }
    series
}

fn snap_to_nominal(raw: f64, nominals: &[u32]) -> u32 {
    let nearest = nominals
        .iter()
        .copied()
        .min_by(|a, b| {
            let da = (*a as f64 - raw).abs();
            let db = (*b as f64 - raw).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    if ((nearest as f64) - raw).abs() / raw <= NOMINAL_SNAP_TOL {
        nearest
    } else {
        raw.round() as u32
    }
}

impl RankLadder {
    /// The stock ladder: 46..500 µA, step √2, 2% match tolerance.
    pub fn default_sqrt2() -> Self {
        build_ladder(46.0, 500.0, std::f64::consts::SQRT_2, 2.0).expect("default ladder")
    }

    /// Number of ranks.
    pub fn len(&self) -> u32 {
        self.currents.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.currents.is_empty()
    }

    /// Rung currents in µA, lowest first.
    pub fn currents(&self) -> &[u32] {
        &self.currents
    }

    pub fn step_ratio(&self) -> f64 {
        self.step_ratio
    }

    pub fn rounding_tolerance(&self) -> f64 {
        self.rounding_tolerance
    }

    /// Highest rank on the ladder.
    pub fn top(&self) -> Rank {
        Rank(self.len())
    }

    pub fn bottom(&self) -> Rank {
        Rank(1)
    }

    pub fn contains(&self, r: Rank) -> bool {
        r.0 >= 1 && r.0 <= self.len()
    }

    /// Current (µA) of rung `r`.
    pub fn rank_to_current(&self, r: Rank) -> Result<u32, LadderError> {
        if !self.contains(r) {
            return Err(LadderError::RankOutOfRange {
                rank: r.0,
                count: self.len(),
            });
        }
        Ok(self.currents[(r.0 - 1) as usize])
    }

    /// Rank of the rung matching `current` µA within the ladder's match
    /// tolerance. The nearest rung is chosen by geometric distance; the gap in
    /// the error is relative to the smaller of the two values.
    pub fn current_to_rank(&self, current: f64) -> Result<Rank, LadderError> {
        if current <= 0.0 {
            return Err(LadderError::BadBounds {
                i_min: current,
                i_max: current,
            });
        }
        let (idx, nearest) = self
            .currents
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = (current / **a as f64).ln().abs();
                let db = (current / **b as f64).ln().abs();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, v)| (i, *v))
            .unwrap();
        let lo = current.min(nearest as f64);
        let hi = current.max(nearest as f64);
        let gap = hi / lo - 1.0;
        if gap <= self.rounding_tolerance {
            Ok(Rank(idx as u32 + 1))
        } else {
            Err(LadderError::NoMatchingRung {
                current,
                nearest,
                gap_pct: gap * 100.0,
                tol_pct: self.rounding_tolerance * 100.0,
            })
        }
    }

    /// Check the ladder invariants; returns human-readable violations.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.currents.is_empty() {
            out.push("ladder has no rungs".into());
            return out;
        }
        if (self.currents[0] as f64) < self.i_min - 0.5 {
            out.push(format!(
                "first rung {} µA below i_min {}",
                self.currents[0], self.i_min
            ));
        }
        if (*self.currents.last().unwrap() as f64) > self.i_max + 0.5 {
            out.push(format!(
                "last rung {} µA above i_max {}",
                self.currents.last().unwrap(),
                self.i_max
            ));
        }
        for w in self.currents.windows(2) {
            if w[0] >= w[1] {
                out.push(format!("rungs not increasing: {} then {}", w[0], w[1]));
            }
            let ratio = w[1] as f64 / w[0] as f64;
            if (ratio / self.step_ratio - 1.0).abs() > NOMINAL_SNAP_TOL.max(self.rounding_tolerance)
            {
                out.push(format!(
                    "adjacent ratio {}/{} = {:.3} deviates from step {:.3}",
                    w[1], w[0], ratio, self.step_ratio
                ));
            }
        }
        out
    }
}
