//! Single-carrier TTI scheduling: max throughput, blind equal
//! throughput and proportional fair.
//!
//! Per UE the scheduler tracks the instantaneous achievable rate `d`
//! (from the current MCS decision), the rate `r` actually served in the
//! last TTI (zero when not scheduled or on block error) and an
//! exponentially weighted moving average `R` of `r`:
//!
//! ```text
//! R(t) = (1 - alpha) * R(t-1) + alpha * r(t)
//! ```
//!
//! applied to every UE on every TTI. `alpha` is the inverse of the
//! averaging window in TTIs. Priorities are `d` (max throughput),
//! `1/R` (blind equal throughput) and `d/R` (proportional fair); the
//! highest priority wins, ties go to the least recently scheduled UE
//! and then to the lowest id.
//!
//! `R` starts at a small positive constant (the CQI-1 rate on a single
//! PRB) because two of the policies divide by it. If an average ever
//! decays to exactly zero, which happens with `alpha = 1`, selection
//! treats the UE as having an infinite claim and serves it at the next
//! opportunity; a negative average is a caller bug and panics.

use crate::linkadapt::{achievable_rate, transport_block_size, CqiTable, McsDecision};
use crate::scalar::Scalar;
use thiserror::Error;

/// Averaging weight used when the policy itself does not carry one
/// (max throughput tracks `R` for reporting only).
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Scheduler selection errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedError {
    #[error("cannot select from an empty UE set")]
    NoCandidates,
    #[error("alpha {0} is outside (0, 1]")]
    AlphaOutOfRange(f64),
}

/// Identifier of one UE within a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UeId(pub u32);

impl std::fmt::Display for UeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Scheduling policy. `alpha` is the moving-average weight in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchedulerKind<F> {
    /// Serve the UE with the highest achievable rate.
    MaxThroughput,
    /// Serve the UE with the lowest average throughput.
    BlindEqualThroughput { alpha: F },
    /// Serve the UE with the highest `d / R` ratio.
    ProportionalFair { alpha: F },
}

impl<F: Scalar> SchedulerKind<F> {
    /// Proportional fair with an averaging window of `window` TTIs.
    pub fn pf_with_window(window: u64) -> Self {
        assert!(window > 0, "window must be at least one TTI");
        Self::ProportionalFair { alpha: F::one() / F::of(window as f64) }
    }

    /// Blind equal throughput with an averaging window of `window` TTIs.
    pub fn bet_with_window(window: u64) -> Self {
        assert!(window > 0, "window must be at least one TTI");
        Self::BlindEqualThroughput { alpha: F::one() / F::of(window as f64) }
    }

    /// The policy's averaging weight, if it carries one.
    pub fn alpha(&self) -> Option<F> {
        match *self {
            Self::MaxThroughput => None,
            Self::BlindEqualThroughput { alpha } | Self::ProportionalFair { alpha } => Some(alpha),
        }
    }

    /// Checks the averaging weight is in (0, 1].
    pub fn validate(&self) -> Result<(), SchedError> {
        match self.alpha() {
            None => Ok(()),
            Some(a) if a > F::zero() && a <= F::one() => Ok(()),
            Some(a) => Err(SchedError::AlphaOutOfRange(a.widen())),
        }
    }
}

/// Per-UE scheduler state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeSchedState<F> {
    pub ue_id: UeId,
    /// Instantaneous achievable rate `d`, bit/s.
    pub achievable_bps: F,
    /// Rate served in the last completed TTI `r`, bit/s.
    pub achieved_bps: F,
    /// Moving average `R`, bit/s.
    pub avg_bps: F,
    /// TTI index at which this UE was last scheduled.
    pub last_scheduled: Option<u64>,
}

impl<F: Scalar> UeSchedState<F> {
    /// Fresh state with the moving average seeded at `initial_avg`.
    pub fn new(ue_id: UeId, initial_avg_bps: F) -> Self {
        assert!(initial_avg_bps > F::zero(), "initial average must be positive");
        Self {
            ue_id,
            achievable_bps: F::zero(),
            achieved_bps: F::zero(),
            avg_bps: initial_avg_bps,
            last_scheduled: None,
        }
    }
}

/// Moving-average seed: the rate of CQI 1 on a single PRB, clamped to
/// at least one bit per TTI so divisions by `R` stay defined.
pub fn initial_avg_throughput<F: Scalar>(table: &CqiTable<F>, re_per_prb: u32, tti_s: F) -> F {
    let bits = transport_block_size(table.entry(1), 1, re_per_prb).max(1);
    F::of(bits as f64) / tti_s
}

/// Priority of one UE under a policy. Contract: `R > 0` for the two
/// average-based policies; violating it panics.
pub fn priority<F: Scalar>(kind: &SchedulerKind<F>, state: &UeSchedState<F>) -> F {
    if !matches!(kind, SchedulerKind::MaxThroughput) {
        assert!(
            state.avg_bps > F::zero(),
            "average throughput must be positive for UE {}",
            state.ue_id
        );
    }
    priority_value(kind, state)
}

/// Priority without the positivity check. A zero average maps to an
/// infinite claim (IEEE division), so starved UEs win immediately.
fn priority_value<F: Scalar>(kind: &SchedulerKind<F>, state: &UeSchedState<F>) -> F {
    assert!(
        state.avg_bps >= F::zero(),
        "negative average throughput for UE {}",
        state.ue_id
    );
    match kind {
        SchedulerKind::MaxThroughput => state.achievable_bps,
        SchedulerKind::BlindEqualThroughput { .. } => F::one() / state.avg_bps,
        SchedulerKind::ProportionalFair { .. } => state.achievable_bps / state.avg_bps,
    }
}

/// Picks the UE to serve: highest priority, ties to the least recently
/// scheduled, then to the lowest id.
pub fn select_ue<F: Scalar>(
    kind: &SchedulerKind<F>,
    states: &[UeSchedState<F>],
) -> Result<UeId, SchedError> {
    select_index(kind, states, |_| true).map(|i| states[i].ue_id)
}

fn select_index<F: Scalar>(
    kind: &SchedulerKind<F>,
    states: &[UeSchedState<F>],
    eligible: impl Fn(usize) -> bool,
) -> Result<usize, SchedError> {
    let mut best: Option<(usize, F)> = None;
    for (i, state) in states.iter().enumerate() {
        if !eligible(i) {
            continue;
        }
        let pri = priority_value(kind, state);
        assert!(!pri.is_nan(), "priority is NaN for UE {}", state.ue_id);
        let replace = match best {
            None => true,
            Some((j, best_pri)) => {
                if pri != best_pri {
                    pri > best_pri
                } else {
                    let age = |s: &UeSchedState<F>| s.last_scheduled;
                    // None sorts before Some, which is exactly
                    // "never scheduled counts as oldest".
                    match age(state).cmp(&age(&states[j])) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => state.ue_id < states[j].ue_id,
                    }
                }
            }
        };
        if replace {
            best = Some((i, pri));
        }
    }
    best.map(|(i, _)| i).ok_or(SchedError::NoCandidates)
}

/// Moving-average step: `(1 - alpha) * prev + alpha * achieved`.
pub fn update_avg<F: Scalar>(avg_prev_bps: F, achieved_bps: F, alpha: F) -> F {
    debug_assert!(alpha > F::zero() && alpha <= F::one(), "alpha outside (0, 1]");
    debug_assert!(achieved_bps >= F::zero(), "negative achieved rate");
    (F::one() - alpha) * avg_prev_bps + alpha * achieved_bps
}

/// Link-adaptation input for one UE in one TTI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeTtiInput<F> {
    pub cqi: u8,
    pub decision: McsDecision<F>,
}

/// What happened in one TTI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtiRecord {
    pub t: u64,
    /// Scheduled UE; `None` when no UE could transmit.
    pub ue_id: Option<UeId>,
    pub cqi: u8,
    pub mcs_index: Option<u8>,
    pub tbs_bits: u64,
    pub error: bool,
    pub delivered_bits: u64,
}

/// Runs one TTI: selects among UEs that can transmit, draws the block
/// error for the winner, then advances every UE's moving average.
///
/// `inputs[i]` belongs to `states[i]`. `draw_error` receives the
/// winner's expected BLER and returns true on a block error. UEs whose
/// decision carries no data (CQI 0) are not candidates; if nobody can
/// transmit the TTI idles and only the averages advance.
pub fn run_tti<F: Scalar>(
    kind: &SchedulerKind<F>,
    t: u64,
    states: &mut [UeSchedState<F>],
    inputs: &[UeTtiInput<F>],
    tti_s: F,
    mut draw_error: impl FnMut(F) -> bool,
) -> TtiRecord {
    assert_eq!(states.len(), inputs.len(), "one input per UE state");
    for (state, input) in states.iter_mut().zip(inputs) {
        state.achievable_bps = achievable_rate(&input.decision, tti_s);
        state.achieved_bps = F::zero();
    }

    let selected = select_index(kind, states, |i| inputs[i].decision.tbs_bits > 0).ok();
    let record = match selected {
        None => TtiRecord {
            t,
            ue_id: None,
            cqi: 0,
            mcs_index: None,
            tbs_bits: 0,
            error: false,
            delivered_bits: 0,
        },
        Some(i) => {
            let input = &inputs[i];
            let error = draw_error(input.decision.expected_bler);
            let delivered_bits = if error { 0 } else { input.decision.tbs_bits };
            states[i].achieved_bps =
                if error { F::zero() } else { states[i].achievable_bps };
            states[i].last_scheduled = Some(t);
            TtiRecord {
                t,
                ue_id: Some(states[i].ue_id),
                cqi: input.cqi,
                mcs_index: input.decision.mcs_index,
                tbs_bits: input.decision.tbs_bits,
                error,
                delivered_bits,
            }
        }
    };

    let alpha = kind.alpha().unwrap_or_else(|| F::of(DEFAULT_ALPHA));
    for state in states.iter_mut() {
        state.avg_bps = update_avg(state.avg_bps, state.achieved_bps, alpha);
    }
    record
}
