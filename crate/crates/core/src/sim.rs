//! Scenario driver: a mobile cell rides a straight path while fixed
//! UEs on the ground are served from it, evaluated one cell position
//! at a time.
//!
//! At each position the channel to every UE is static, so the link is
//! evaluated once (distance, path loss, RSRP, SINR, CQI, block size)
//! and the TTI loop only plays out scheduling and block errors. Two
//! modes exist:
//!
//! * [`ScenarioMode::SingleUe`]: each UE gets its own hypothetical run
//!   in which it is alone in the cell. This isolates what the channel
//!   offers each UE from what the scheduler grants it.
//! * [`ScenarioMode::AllUes`]: all UEs compete in one run per position
//!   and the configured scheduler splits the TTIs among them.
//!
//! The cell's own wireless backhaul to the overlay gNB is evaluated
//! with the same link chain; when capping is enabled, per-UE access
//! throughput is scaled down proportionally so the lane total never
//! exceeds what the backhaul link carries.
//!
//! Failed blocks are retransmitted at the UE's next scheduled TTI, up
//! to a per-block retransmission budget, after which the block is
//! dropped. Every random draw comes from a counter-based generator
//! keyed by (seed, position, lane), so runs are reproducible and
//! positions are independent of each other.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arch::ArchKind;
use crate::channel::{self, distance_3d, umi_path_loss, ChannelError, LinkState, Position, RadioConfig};
use crate::linkadapt::{achievable_rate, select_mcs, CqiTable, DEFAULT_RE_PER_PRB};
use crate::sched::{
    initial_avg_throughput, run_tti, SchedError, SchedulerKind, UeId, UeSchedState, UeTtiInput,
};
pub use crate::sched::TtiRecord;

/// TTIs simulated at each cell position.
pub const DEFAULT_TTIS_PER_POSITION: u64 = 10_000;
/// TTI duration at 30 kHz subcarrier spacing, seconds.
pub const DEFAULT_TTI_S: f64 = 0.0005;
/// Retransmissions allowed per block before it is dropped.
pub const DEFAULT_MAX_RETX: u32 = 4;
/// Default RNG seed.
pub const DEFAULT_SEED: u64 = 1;

/// Scenario-level configuration or input problems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a path needs at least two positions, got {0}")]
    TooFewPositions(usize),
    #[error("scenario has no UEs")]
    NoUes,
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sched(#[from] SchedError),
}

/// How UEs share each position's run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioMode {
    /// One isolated run per UE per position.
    SingleUe,
    /// One shared run per position, scheduler arbitrates.
    AllUes,
}

/// How block errors are drawn from the predicted error probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlerMode {
    /// Bernoulli draw per transmission.
    Random,
    /// Error exactly when the predicted probability exceeds the
    /// table's target, which never happens on a correctly selected
    /// MCS. Useful for noise-free golden runs.
    Deterministic,
}

/// Everything a scenario run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Deployment option the cell represents. Does not change the
    /// access throughput model; carried for the comparison outputs.
    pub arch_kind: ArchKind,
    pub scheduler: SchedulerKind<f64>,
    pub radio: RadioConfig<f64>,
    pub cqi_table: CqiTable<f64>,
    /// Resource elements per PRB available to data in one TTI.
    pub re_per_prb: u32,
    /// Cell positions along the path, evaluated in order.
    pub mc_positions: Vec<Position<f64>>,
    pub ue_positions: Vec<Position<f64>>,
    /// Overlay gNB that terminates the cell's wireless backhaul.
    pub on_gnb_position: Position<f64>,
    pub ttis_per_position: u64,
    pub tti_s: f64,
    pub seed: u64,
    pub mode: ScenarioMode,
    /// Retransmissions allowed per block before it is dropped.
    pub max_retx: u32,
    pub bler_mode: BlerMode,
    /// Scale access throughput down to the backhaul capacity.
    pub backhaul_capped: bool,
    /// Contention-resolution window for attachment checks, seconds.
    pub crt_limit_s: f64,
}

impl Default for ScenarioConfig {
    /// The evaluation drive: the cell moves in a straight line from
    /// (1000, 25) to (1990, 1225) at 15 m height over 21 positions,
    /// serving three UEs placed at the start, middle and far end of
    /// the path, with the overlay gNB at the origin.
    fn default() -> Self {
        let start = Position::new(1000.0, 25.0, 15.0);
        let end = Position::new(1990.0, 1225.0, 15.0);
        Self {
            arch_kind: ArchKind::GnbDuRelay,
            scheduler: SchedulerKind::ProportionalFair { alpha: 0.01 },
            radio: RadioConfig::default(),
            cqi_table: CqiTable::default(),
            re_per_prb: DEFAULT_RE_PER_PRB,
            mc_positions: mc_positions(start, end, 21).expect("21 positions"),
            ue_positions: vec![
                Position::new(1000.0, 0.0, 2.0),
                Position::new(1495.0, 625.0, 2.0),
                Position::new(2050.0, 1250.0, 2.0),
            ],
            on_gnb_position: Position::new(0.0, 0.0, 15.0),
            ttis_per_position: DEFAULT_TTIS_PER_POSITION,
            tti_s: DEFAULT_TTI_S,
            seed: DEFAULT_SEED,
            mode: ScenarioMode::SingleUe,
            max_retx: DEFAULT_MAX_RETX,
            bler_mode: BlerMode::Random,
            backhaul_capped: true,
            crt_limit_s: crate::arch::DEFAULT_CRT_LIMIT_S,
        }
    }
}

impl ScenarioConfig {
    /// Checks the pieces agree before a run.
    pub fn validate(&self) -> Result<(), SimError> {
        self.radio.validate()?;
        self.scheduler.validate()?;
        if self.ue_positions.is_empty() {
            return Err(SimError::NoUes);
        }
        if self.mc_positions.is_empty() {
            return Err(SimError::TooFewPositions(0));
        }
        for p in self.mc_positions.iter().chain(&self.ue_positions) {
            p.validate()?;
        }
        self.on_gnb_position.validate()?;
        assert!(self.tti_s > 0.0, "TTI must be positive");
        assert!(self.ttis_per_position > 0, "need at least one TTI per position");
        Ok(())
    }
}

/// Evenly spaced positions from `start` to `end` inclusive, keeping
/// the start height. Needs at least two positions.
pub fn mc_positions(
    start: Position<f64>,
    end: Position<f64>,
    n: usize,
) -> Result<Vec<Position<f64>>, SimError> {
    if n < 2 {
        return Err(SimError::TooFewPositions(n));
    }
    let steps = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let f = i as f64 / steps;
            Position::new(
                start.x + (end.x - start.x) * f,
                start.y + (end.y - start.y) * f,
                start.h,
            )
        })
        .collect())
}

/// Link chain with the distance floored at the model's 1 m validity
/// limit. Inside a scenario, closer than that means "colocated", not
/// "out of model range".
fn link_with_floor(
    radio: &RadioConfig<f64>,
    a: Position<f64>,
    b: Position<f64>,
) -> Result<LinkState<f64>, ChannelError> {
    let distance_3d_m = distance_3d(a, b).max(1.0);
    let path_loss_db = umi_path_loss(distance_3d_m, radio.carrier_freq_hz)?;
    let rsrp_dbm = channel::rsrp(radio, path_loss_db);
    let sinr_db = channel::sinr(rsrp_dbm, radio.noise_dbm, None);
    Ok(LinkState { distance_3d_m, path_loss_db, rsrp_dbm, sinr_db })
}

/// Throughput the cell's wireless backhaul carries from position `mc`,
/// bit/s: the full grid at the MCS the backhaul SINR supports.
pub fn backhaul_capacity(cfg: &ScenarioConfig, mc: Position<f64>) -> Result<f64, ChannelError> {
    let link = link_with_floor(&cfg.radio, mc, cfg.on_gnb_position)?;
    let (_, decision) = select_mcs(link.sinr_db, &cfg.cqi_table, cfg.radio.n_prb, cfg.re_per_prb);
    Ok(achievable_rate(&decision, cfg.tti_s))
}

/// Steady-state result of one UE at one cell position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub position_index: usize,
    pub ue_id: UeId,
    pub distance_m: f64,
    pub rsrp_dbm: f64,
    pub sinr_db: f64,
    pub mean_cqi: f64,
    /// Delivered bits over simulated time, after the backhaul share
    /// when capping is on.
    pub throughput_bps: f64,
    /// Fraction of the lane's TTIs in which this UE transmitted.
    pub tti_share: f64,
}

/// Column header of the results CSV.
pub const RESULTS_CSV_HEADER: &str =
    "position_index,ue_id,distance_m,rsrp_dbm,sinr_db,mean_cqi,throughput_bps,tti_share";

impl ResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.6}",
            self.position_index,
            self.ue_id,
            self.distance_m,
            self.rsrp_dbm,
            self.sinr_db,
            self.mean_cqi,
            self.throughput_bps,
            self.tti_share
        )
    }
}

/// Column header of the TTI trace CSV.
pub const TRACE_CSV_HEADER: &str = "t,ue_id,cqi,mcs,tbs,error,delivered_bits";

/// One trace row. Empty `ue_id`/`mcs` mean an idle TTI. In single-UE
/// mode the lanes of one position share the same `t` range and are
/// written lane after lane.
pub fn trace_csv_line(rec: &TtiRecord) -> String {
    let ue = rec.ue_id.map(|u| u.to_string()).unwrap_or_default();
    let mcs = rec.mcs_index.map(|m| m.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{}",
        rec.t, ue, rec.cqi, mcs, rec.tbs_bits, rec.error, rec.delivered_bits
    )
}

/// Everything a scenario run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// One row per (position, UE), positions outermost, UEs in input
    /// order.
    pub rows: Vec<ResultRow>,
    /// Per-TTI records; empty unless trace collection was requested.
    pub trace: Vec<TtiRecord>,
}

/// What one lane (one scheduling run at one position) produced per UE.
struct LaneOutcome {
    delivered_bits: Vec<u64>,
    scheduled_ttis: Vec<u64>,
    #[allow(dead_code)]
    dropped_blocks: Vec<u64>,
}

/// Plays one scheduling run for one set of competing UEs. `inputs[i]`
/// is the fixed link-adaptation outcome of `ue_ids[i]` at this
/// position.
fn run_lane(
    cfg: &ScenarioConfig,
    inputs: &[UeTtiInput<f64>],
    ue_ids: &[UeId],
    t_offset: u64,
    mut draw_error: impl FnMut(f64) -> bool,
    mut trace: Option<&mut Vec<TtiRecord>>,
) -> LaneOutcome {
    let initial_avg_bps = initial_avg_throughput(&cfg.cqi_table, cfg.re_per_prb, cfg.tti_s);
    let n = ue_ids.len();
    let mut states: Vec<UeSchedState<f64>> =
        ue_ids.iter().map(|&id| UeSchedState::new(id, initial_avg_bps)).collect();
    // Failed transmissions of the UE's in-flight block, if one is
    // parked for retransmission. The link is static within a lane, so
    // the parked block is the same size as every fresh one and only
    // the failure count needs tracking.
    let mut failed_tx: Vec<Option<u32>> = vec![None; n];
    let mut outcome = LaneOutcome {
        delivered_bits: vec![0; n],
        scheduled_ttis: vec![0; n],
        dropped_blocks: vec![0; n],
    };

    for k in 0..cfg.ttis_per_position {
        let rec =
            run_tti(&cfg.scheduler, t_offset + k, &mut states, inputs, cfg.tti_s, &mut draw_error);
        if let Some(id) = rec.ue_id {
            let i = ue_ids.iter().position(|&u| u == id).expect("winner is a lane UE");
            outcome.scheduled_ttis[i] += 1;
            outcome.delivered_bits[i] += rec.delivered_bits;
            if rec.error {
                let failures = failed_tx[i].unwrap_or(0) + 1;
                // The initial transmission plus max_retx retries all
                // failed: give the block up.
                if failures > cfg.max_retx {
                    outcome.dropped_blocks[i] += 1;
                    failed_tx[i] = None;
                } else {
                    failed_tx[i] = Some(failures);
                }
            } else {
                failed_tx[i] = None;
            }
        }
        if let Some(sink) = trace.as_deref_mut() {
            sink.push(rec);
        }
    }
    outcome
}

fn error_draw(cfg: &ScenarioConfig, mut rng: ChaCha8Rng) -> impl FnMut(f64) -> bool {
    let target = cfg.cqi_table.target_bler();
    let deterministic = cfg.bler_mode == BlerMode::Deterministic;
    move |bler: f64| {
        if deterministic {
            bler > target
        } else {
            rng.gen::<f64>() < bler
        }
    }
}

fn lane_rng(seed: u64, position_index: usize, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(position_index as u64 * 1000 + lane);
    rng
}

/// Stream id of the shared lane in all-UE mode.
const ALL_UES_LANE: u64 = 999;

fn run_position_impl(
    cfg: &ScenarioConfig,
    index: usize,
    mut trace: Option<&mut Vec<TtiRecord>>,
) -> Result<Vec<ResultRow>, SimError> {
    let mc = cfg.mc_positions[index];
    let links: Vec<LinkState<f64>> = cfg
        .ue_positions
        .iter()
        .map(|&ue| link_with_floor(&cfg.radio, mc, ue))
        .collect::<Result<_, _>>()?;
    let ue_ids: Vec<UeId> = (1..=cfg.ue_positions.len() as u32).map(UeId).collect();
    let inputs: Vec<UeTtiInput<f64>> = links
        .iter()
        .map(|l| {
            let (cqi, decision) =
                select_mcs(l.sinr_db, &cfg.cqi_table, cfg.radio.n_prb, cfg.re_per_prb);
            UeTtiInput { cqi, decision }
        })
        .collect();
    let capacity_bps = backhaul_capacity(cfg, mc)?;
    let t_offset = index as u64 * cfg.ttis_per_position;
    let simulated_s = cfg.ttis_per_position as f64 * cfg.tti_s;

    // Raw (uncapped) throughput and TTI share per UE.
    let mut throughput = vec![0.0; ue_ids.len()];
    let mut share = vec![0.0; ue_ids.len()];
    match cfg.mode {
        ScenarioMode::SingleUe => {
            for i in 0..ue_ids.len() {
                let draw = error_draw(cfg, lane_rng(cfg.seed, index, i as u64));
                let out =
                    run_lane(cfg, &inputs[i..=i], &ue_ids[i..=i], t_offset, draw, trace.as_deref_mut());
                throughput[i] = out.delivered_bits[0] as f64 / simulated_s;
                share[i] = out.scheduled_ttis[0] as f64 / cfg.ttis_per_position as f64;
                // Each lane rides the backhaul alone.
                if cfg.backhaul_capped {
                    throughput[i] = throughput[i].min(capacity_bps);
                }
            }
        }
        ScenarioMode::AllUes => {
            let draw = error_draw(cfg, lane_rng(cfg.seed, index, ALL_UES_LANE));
            let out = run_lane(cfg, &inputs, &ue_ids, t_offset, draw, trace);
            for i in 0..ue_ids.len() {
                throughput[i] = out.delivered_bits[i] as f64 / simulated_s;
                share[i] = out.scheduled_ttis[i] as f64 / cfg.ttis_per_position as f64;
            }
            // One backhaul carries all UEs: scale shares proportionally.
            let total: f64 = throughput.iter().sum();
            if cfg.backhaul_capped && total > capacity_bps {
                let scale = capacity_bps / total;
                for t in &mut throughput {
                    *t *= scale;
                }
            }
        }
    }

    Ok(ue_ids
        .iter()
        .enumerate()
        .map(|(i, &ue_id)| ResultRow {
            position_index: index,
            ue_id,
            distance_m: links[i].distance_3d_m,
            rsrp_dbm: links[i].rsrp_dbm,
            sinr_db: links[i].sinr_db,
            mean_cqi: f64::from(inputs[i].cqi),
            throughput_bps: throughput[i],
            tti_share: share[i],
        })
        .collect())
}

/// Runs one cell position and returns its per-UE rows.
pub fn run_position(cfg: &ScenarioConfig, index: usize) -> Result<Vec<ResultRow>, SimError> {
    cfg.validate()?;
    assert!(index < cfg.mc_positions.len(), "position index out of range");
    run_position_impl(cfg, index, None)
}

/// Runs the whole path. With `collect_trace` the per-TTI records of
/// every lane are returned as well.
pub fn run_scenario(cfg: &ScenarioConfig, collect_trace: bool) -> Result<RunOutput, SimError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.mc_positions.len() * cfg.ue_positions.len());
    let mut trace = Vec::new();
    for index in 0..cfg.mc_positions.len() {
        let sink = collect_trace.then_some(&mut trace);
        rows.extend(run_position_impl(cfg, index, sink)?);
    }
    Ok(RunOutput { rows, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fast(cfg: &mut ScenarioConfig) {
        cfg.ttis_per_position = 50;
    }

    #[test]
    fn path_positions_hit_both_endpoints_with_even_spacing() {
        let start = Position::new(1000.0, 25.0, 15.0);
        let end = Position::new(1990.0, 1225.0, 15.0);
        let path = mc_positions(start, end, 21).unwrap();
        assert_eq!(path.len(), 21);
        assert_eq!((path[0].x, path[0].y, path[0].h), (1000.0, 25.0, 15.0));
        assert_eq!((path[20].x, path[20].y, path[20].h), (1990.0, 1225.0, 15.0));
        for w in path.windows(2) {
            assert_relative_eq!(w[1].x - w[0].x, 49.5, max_relative = 1e-12);
            assert_relative_eq!(w[1].y - w[0].y, 60.0, max_relative = 1e-12);
            assert_eq!(w[1].h, 15.0);
        }
    }

    #[test]
    fn a_path_needs_two_positions() {
        let p = Position::new(0.0, 0.0, 10.0);
        assert_eq!(mc_positions(p, p, 1), Err(SimError::TooFewPositions(1)));
        assert_eq!(mc_positions(p, p, 0), Err(SimError::TooFewPositions(0)));
    }

    #[test]
    fn default_scenario_shape() {
        let cfg = ScenarioConfig::default();
        assert_eq!(cfg.mc_positions.len(), 21);
        assert_eq!(cfg.ue_positions.len(), 3);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn validate_rejects_bad_pieces() {
        let mut cfg = ScenarioConfig::default();
        cfg.ue_positions.clear();
        assert_eq!(cfg.validate(), Err(SimError::NoUes));

        let mut cfg = ScenarioConfig::default();
        cfg.mc_positions.clear();
        assert_eq!(cfg.validate(), Err(SimError::TooFewPositions(0)));

        let cfg = ScenarioConfig {
            scheduler: SchedulerKind::ProportionalFair { alpha: 2.0 },
            ..ScenarioConfig::default()
        };
        assert_eq!(cfg.validate(), Err(SimError::Sched(SchedError::AlphaOutOfRange(2.0))));
    }

    #[test]
    fn backhaul_capacity_at_the_first_position() {
        let cfg = ScenarioConfig::default();
        let cap = backhaul_capacity(&cfg, cfg.mc_positions[0]).unwrap();
        // 1000.31 m to the overlay gNB lands on CQI 8: 14056 bits per
        // half-millisecond TTI over the 51-PRB grid.
        assert_relative_eq!(cap, 28_112_000.0, max_relative = 1e-12);
    }

    #[test]
    fn backhaul_capacity_floors_the_distance() {
        let mut cfg = ScenarioConfig::default();
        cfg.on_gnb_position = cfg.mc_positions[0];
        assert!(backhaul_capacity(&cfg, cfg.mc_positions[0]).is_ok());
    }

    #[test]
    fn first_position_rows_match_a_hand_built_link_chain() {
        let mut cfg =
            ScenarioConfig { bler_mode: BlerMode::Deterministic, ..ScenarioConfig::default() };
        fast(&mut cfg);
        let rows = run_position(&cfg, 0).unwrap();
        assert_eq!(rows.len(), 3);

        // UE 1 sits 28.2 m away (sqrt of 625 + 169), runs at CQI 15
        // and is clipped by the 28.112 Mb/s backhaul.
        let ue1 = &rows[0];
        assert_eq!(ue1.ue_id, UeId(1));
        assert_relative_eq!(ue1.distance_m, 794.0_f64.sqrt(), max_relative = 1e-12);
        assert_eq!(ue1.mean_cqi, 15.0);
        assert_relative_eq!(ue1.throughput_bps, 28_112_000.0, max_relative = 1e-12);
        assert_eq!(ue1.tti_share, 1.0);

        // UE 3 is 1.6 km out at CQI 5; its own rate is under the cap.
        let ue3 = &rows[2];
        assert_eq!(ue3.mean_cqi, 5.0);
        assert_relative_eq!(ue3.throughput_bps, 6_440.0 / 0.0005, max_relative = 1e-12);

        // The chain agrees with the channel module evaluated directly.
        let link = LinkState::between(&cfg.radio, cfg.mc_positions[0], cfg.ue_positions[0], None)
            .unwrap();
        assert_eq!(ue1.sinr_db, link.sinr_db);
        assert_eq!(ue1.rsrp_dbm, link.rsrp_dbm);
    }

    #[test]
    fn uncapped_single_ue_throughput_is_the_access_rate() {
        let mut cfg = ScenarioConfig {
            bler_mode: BlerMode::Deterministic,
            backhaul_capped: false,
            ..ScenarioConfig::default()
        };
        fast(&mut cfg);
        let rows = run_position(&cfg, 0).unwrap();
        assert_relative_eq!(rows[0].throughput_bps, 40_793.0 / 0.0005, max_relative = 1e-12);
    }

    #[test]
    fn shared_lane_splits_ttis_and_the_backhaul() {
        let cfg = ScenarioConfig {
            mode: ScenarioMode::AllUes,
            bler_mode: BlerMode::Deterministic,
            ttis_per_position: 300,
            ..ScenarioConfig::default()
        };
        let rows = run_position(&cfg, 0).unwrap();
        assert_eq!(rows.len(), 3);

        // Someone transmits every TTI: all three have data to send.
        let share_sum: f64 = rows.iter().map(|r| r.tti_share).sum();
        assert_relative_eq!(share_sum, 1.0, max_relative = 1e-12);

        // The scaled total sits exactly at the backhaul capacity.
        let cap = backhaul_capacity(&cfg, cfg.mc_positions[0]).unwrap();
        let total: f64 = rows.iter().map(|r| r.throughput_bps).sum();
        assert_relative_eq!(total, cap, max_relative = 1e-12);
    }

    #[test]
    fn retransmission_delivers_the_parked_block_on_the_next_chance() {
        let inputs = [UeTtiInput {
            cqi: 9,
            decision: crate::linkadapt::McsDecision {
                mcs_index: Some(9),
                tbs_bits: 17_671,
                expected_bler: 0.0,
            },
        }];
        let ids = [UeId(1)];
        let cfg = ScenarioConfig {
            scheduler: SchedulerKind::MaxThroughput,
            ttis_per_position: 2,
            ..ScenarioConfig::default()
        };
        let mut seq = [true, false].into_iter();
        let out = run_lane(&cfg, &inputs, &ids, 0, move |_| seq.next().unwrap(), None);
        assert_eq!(out.delivered_bits[0], 17_671);
        assert_eq!(out.dropped_blocks[0], 0);
        assert_eq!(out.scheduled_ttis[0], 2);
    }

    #[test]
    fn a_block_is_dropped_after_its_retransmission_budget() {
        let inputs = [UeTtiInput {
            cqi: 9,
            decision: crate::linkadapt::McsDecision {
                mcs_index: Some(9),
                tbs_bits: 17_671,
                expected_bler: 0.0,
            },
        }];
        let ids = [UeId(1)];
        let cfg = ScenarioConfig {
            scheduler: SchedulerKind::MaxThroughput,
            ttis_per_position: 5,
            max_retx: 2,
            ..ScenarioConfig::default()
        };
        // Success, then three failures of one block (initial try plus
        // two retransmissions = budget), then a fresh success.
        let mut seq = [false, true, true, true, false].into_iter();
        let out = run_lane(&cfg, &inputs, &ids, 0, move |_| seq.next().unwrap(), None);
        assert_eq!(out.delivered_bits[0], 2 * 17_671);
        assert_eq!(out.dropped_blocks[0], 1);
        assert_eq!(out.scheduled_ttis[0], 5);
    }

    #[test]
    fn scenario_output_shape_and_order() {
        let mut cfg = ScenarioConfig::default();
        fast(&mut cfg);
        let out = run_scenario(&cfg, false).unwrap();
        assert_eq!(out.rows.len(), 63);
        assert!(out.trace.is_empty());
        for (i, row) in out.rows.iter().enumerate() {
            assert_eq!(row.position_index, i / 3);
            assert_eq!(row.ue_id, UeId((i % 3) as u32 + 1));
        }
    }

    #[test]
    fn trace_covers_every_lane_tti() {
        let mut cfg = ScenarioConfig::default();
        fast(&mut cfg);
        cfg.mc_positions.truncate(2);
        let out = run_scenario(&cfg, true).unwrap();
        // Single-UE mode: one lane per UE per position.
        assert_eq!(out.trace.len(), 2 * 3 * 50);

        cfg.mode = ScenarioMode::AllUes;
        let out = run_scenario(&cfg, true).unwrap();
        assert_eq!(out.trace.len(), 2 * 50);
        // Global TTI indices continue across positions.
        assert_eq!(out.trace.first().unwrap().t, 0);
        assert_eq!(out.trace.last().unwrap().t, 99);
    }

    #[test]
    fn identical_seeds_reproduce_identical_runs() {
        let mut cfg = ScenarioConfig::default();
        fast(&mut cfg);
        cfg.mc_positions.truncate(3);
        let a = run_scenario(&cfg, true).unwrap();
        let b = run_scenario(&cfg, true).unwrap();
        assert_eq!(a, b);

        cfg.seed = 2;
        let c = run_scenario(&cfg, true).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn positions_are_independent_of_how_many_came_before() {
        let mut cfg = ScenarioConfig::default();
        fast(&mut cfg);
        let full = run_scenario(&cfg, false).unwrap();
        let alone = run_position(&cfg, 7).unwrap();
        assert_eq!(&full.rows[21..24], &alone[..]);
    }

    #[test]
    fn csv_lines_have_the_documented_shape() {
        let row = ResultRow {
            position_index: 4,
            ue_id: UeId(2),
            distance_m: 28.178005,
            rsrp_dbm: -53.8424,
            sinr_db: 47.15757,
            mean_cqi: 15.0,
            throughput_bps: 28_112_000.0,
            tti_share: 1.0 / 3.0,
        };
        assert_eq!(
            row.csv_line(),
            "4,2,28.178,-53.842,47.158,15.000,28112000.000,0.333333"
        );
        let rec = TtiRecord {
            t: 17,
            ue_id: Some(UeId(3)),
            cqi: 9,
            mcs_index: Some(9),
            tbs_bits: 17_671,
            error: false,
            delivered_bits: 17_671,
        };
        assert_eq!(trace_csv_line(&rec), "17,3,9,9,17671,false,17671");
        let idle = TtiRecord {
            t: 18,
            ue_id: None,
            cqi: 0,
            mcs_index: None,
            tbs_bits: 0,
            error: false,
            delivered_bits: 0,
        };
        assert_eq!(trace_csv_line(&idle), "18,,0,,0,false,0");
    }

    #[test]
    fn random_mode_errors_at_roughly_the_predicted_rate() {
        // Put the UE exactly on a threshold-ish SINR by running the
        // default scenario at a position where BLER is non-negligible,
        // then compare the realized error fraction with the predicted
        // probability.
        let mut cfg = ScenarioConfig::default();
        cfg.backhaul_capped = false;
        cfg.ttis_per_position = 4000;
        cfg.ue_positions = vec![cfg.ue_positions[2]];
        let out = run_scenario(&cfg, true).unwrap();
        let link =
            LinkState::between(&cfg.radio, cfg.mc_positions[0], cfg.ue_positions[0], None).unwrap();
        let (_, decision) =
            select_mcs(link.sinr_db, &cfg.cqi_table, cfg.radio.n_prb, cfg.re_per_prb);
        let first: Vec<_> = out.trace.iter().filter(|r| r.t < 4000).collect();
        let observed =
            first.iter().filter(|r| r.error).count() as f64 / first.len() as f64;
        assert!(
            (observed - decision.expected_bler).abs() < 0.03,
            "observed {observed}, predicted {}",
            decision.expected_bler
        );
    }
}
