//! Simulation library for vehicle-mounted 5G cells.
//!
//! The crate covers the full chain from geometry to delivered bits:
//!
//! * [`channel`]: distance, urban-microcell path loss, received power
//!   and SINR.
//! * [`linkadapt`]: CQI tables, SINR thresholds, block sizes and the
//!   block-error curve.
//! * [`sched`]: max-throughput, blind-equal-throughput and
//!   proportional-fair TTI scheduling.
//! * [`arch`]: protocol-stack models of three ways to integrate a
//!   moving cell, with overhead and control-plane timing.
//! * [`sim`]: the position-stepped scenario driver tying it together.
//!
//! Numeric code in [`channel`], [`linkadapt`] and [`sched`] is generic
//! over the float width via [`scalar::Scalar`]; the aliases below fix
//! `f64` for everyday use. The scenario layer is `f64` only.

pub mod arch;
pub mod channel;
pub mod linkadapt;
pub mod scalar;
pub mod sched;
pub mod sim;

/// A point in space with `f64` coordinates.
pub type Position = channel::Position<f64>;
/// Cell radio parameters with `f64` fields.
pub type RadioConfig = channel::RadioConfig<f64>;
/// Link-quality snapshot with `f64` fields.
pub type LinkState = channel::LinkState<f64>;
/// CQI table with `f64` thresholds.
pub type CqiTable = linkadapt::CqiTable<f64>;
/// CQI row with `f64` fields.
pub type CqiEntry = linkadapt::CqiEntry<f64>;
/// Link-adaptation outcome with `f64` fields.
pub type McsDecision = linkadapt::McsDecision<f64>;
/// Scheduling policy with an `f64` averaging weight.
pub type SchedulerKind = sched::SchedulerKind<f64>;
/// Per-UE scheduler state with `f64` rates.
pub type UeSchedState = sched::UeSchedState<f64>;
