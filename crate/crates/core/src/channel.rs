//! Geometry and urban-microcell propagation.
//!
//! Positions are Cartesian coordinates in meters, `h` being antenna
//! height above ground. Powers are dBm, losses dB, frequencies Hz.
//! Path loss uses the street-canyon line-of-sight fit
//! `32.4 + 21 log10(d3d) + 20 log10(fc_GHz)`, valid from 1 m out to the
//! breakpoint distance, for carriers between 0.5 and 100 GHz. RSRP is
//! per resource element: the configured transmit power is spread evenly
//! over the `12 * n_prb` subcarriers of the grid.

use crate::scalar::Scalar;
use thiserror::Error;

/// Input outside the propagation model's domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    /// The path-loss fit is not defined below 1 m.
    #[error("3D distance {0} m is below the 1 m model floor")]
    DistanceBelowModelFloor(f64),
    /// Carrier outside the 0.5-100 GHz fit range.
    #[error("carrier frequency {0} GHz is outside the 0.5-100 GHz model range")]
    CarrierOutOfRange(f64),
    /// Non-finite coordinate or negative height.
    #[error("invalid position ({0}, {1}, {2})")]
    InvalidPosition(f64, f64, f64),
    /// Radio parameter that fails validation.
    #[error("invalid radio config: {field} = {value}")]
    InvalidRadioConfig { field: &'static str, value: f64 },
}

/// A point in the deployment plane, plus antenna height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position<F> {
    pub x: F,
    pub y: F,
    /// Antenna height above ground, meters.
    pub h: F,
}

impl<F: Scalar> Position<F> {
    pub fn new(x: F, y: F, h: F) -> Self {
        Self { x, y, h }
    }

    /// Checks coordinates are finite and the height non-negative.
    pub fn validate(&self) -> Result<(), ChannelError> {
        let ok = self.x.is_finite() && self.y.is_finite() && self.h.is_finite()
            && self.h >= F::zero();
        if ok {
            Ok(())
        } else {
            Err(ChannelError::InvalidPosition(
                self.x.widen(),
                self.y.widen(),
                self.h.widen(),
            ))
        }
    }
}

/// Carrier, grid and power figures for one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig<F> {
    /// Carrier frequency, Hz.
    pub carrier_freq_hz: F,
    /// Channel bandwidth, Hz.
    pub bandwidth_hz: F,
    /// Subcarrier spacing, Hz. One of 15, 30, 60 or 120 kHz.
    pub subcarrier_spacing_hz: F,
    /// Transmit power, dBm.
    pub tx_power_dbm: F,
    /// Thermal noise over the channel bandwidth, dBm.
    pub noise_dbm: F,
    /// Number of physical resource blocks in the grid.
    pub n_prb: u32,
}

impl<F: Scalar> Default for RadioConfig<F> {
    /// 3.6 GHz carrier, 20 MHz channel at 30 kHz spacing (51 PRB),
    /// 48 dBm transmit power over a -101 dBm noise floor.
    fn default() -> Self {
        Self {
            carrier_freq_hz: F::of(3.6e9),
            bandwidth_hz: F::of(20e6),
            subcarrier_spacing_hz: F::of(30e3),
            tx_power_dbm: F::of(48.0),
            noise_dbm: F::of(-101.0),
            n_prb: 51,
        }
    }
}

impl<F: Scalar> RadioConfig<F> {
    /// Checks the grid parameters are usable.
    pub fn validate(&self) -> Result<(), ChannelError> {
        let ghz = self.carrier_freq_hz.widen() / 1e9;
        if !(0.5..=100.0).contains(&ghz) {
            return Err(ChannelError::CarrierOutOfRange(ghz));
        }
        if !self.bandwidth_hz.is_finite() || self.bandwidth_hz <= F::zero() {
            return Err(ChannelError::InvalidRadioConfig {
                field: "bandwidth_hz",
                value: self.bandwidth_hz.widen(),
            });
        }
        let scs_khz = self.subcarrier_spacing_hz.widen() / 1e3;
        if ![15.0, 30.0, 60.0, 120.0].contains(&scs_khz) {
            return Err(ChannelError::InvalidRadioConfig {
                field: "subcarrier_spacing_hz",
                value: self.subcarrier_spacing_hz.widen(),
            });
        }
        if self.n_prb == 0 {
            return Err(ChannelError::InvalidRadioConfig { field: "n_prb", value: 0.0 });
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_dbm.is_finite() {
            return Err(ChannelError::InvalidRadioConfig {
                field: "power_dbm",
                value: f64::NAN,
            });
        }
        Ok(())
    }
}

/// Snapshot of one radio link: geometry in, quality figures out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState<F> {
    pub distance_3d_m: F,
    pub path_loss_db: F,
    pub rsrp_dbm: F,
    pub sinr_db: F,
}

impl<F: Scalar> LinkState<F> {
    /// Evaluates the full chain between two endpoints.
    ///
    /// Distances below 1 m are rejected, not clamped; clamping is a
    /// scenario-level policy.
    pub fn between(
        cfg: &RadioConfig<F>,
        a: Position<F>,
        b: Position<F>,
        interference_dbm: Option<F>,
    ) -> Result<Self, ChannelError> {
        let distance_3d_m = distance_3d(a, b);
        let path_loss_db = umi_path_loss(distance_3d_m, cfg.carrier_freq_hz)?;
        let rsrp_dbm = rsrp(cfg, path_loss_db);
        let sinr_db = sinr(rsrp_dbm, cfg.noise_dbm, interference_dbm);
        Ok(Self { distance_3d_m, path_loss_db, rsrp_dbm, sinr_db })
    }
}

/// Euclidean distance between two antennas, meters.
pub fn distance_3d<F: Scalar>(a: Position<F>, b: Position<F>) -> F {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dh = a.h - b.h;
    (dx * dx + dy * dy + dh * dh).sqrt()
}

/// Street-canyon line-of-sight path loss, dB.
///
/// `32.4 + 21 log10(d3d_m) + 20 log10(fc_GHz)`. Fails for distances
/// under 1 m or carriers outside 0.5-100 GHz.
pub fn umi_path_loss<F: Scalar>(distance_3d_m: F, carrier_freq_hz: F) -> Result<F, ChannelError> {
    if distance_3d_m.is_nan() || distance_3d_m < F::one() {
        return Err(ChannelError::DistanceBelowModelFloor(distance_3d_m.widen()));
    }
    let fc_ghz = carrier_freq_hz / F::of(1e9);
    if fc_ghz.is_nan() || fc_ghz < F::of(0.5) || fc_ghz > F::of(100.0) {
        return Err(ChannelError::CarrierOutOfRange(fc_ghz.widen()));
    }
    Ok(F::of(32.4) + F::of(21.0) * distance_3d_m.log10() + F::of(20.0) * fc_ghz.log10())
}

/// Reference-signal received power per resource element, dBm.
///
/// Transmit power is split evenly across the `12 * n_prb` subcarriers,
/// then attenuated by the path loss.
pub fn rsrp<F: Scalar>(cfg: &RadioConfig<F>, path_loss_db: F) -> F {
    let subcarriers = F::of(12.0) * F::of(f64::from(cfg.n_prb));
    cfg.tx_power_dbm - F::of(10.0) * subcarriers.log10() - path_loss_db
}

/// Signal to interference-plus-noise ratio, dB.
///
/// Without interference this is plain `rsrp - noise`. With it, the
/// denominator is summed in the linear domain.
pub fn sinr<F: Scalar>(rsrp_dbm: F, noise_dbm: F, interference_dbm: Option<F>) -> F {
    match interference_dbm {
        None => rsrp_dbm - noise_dbm,
        Some(i_dbm) => {
            let ten = F::of(10.0);
            let noise_lin = ten.powf(noise_dbm / ten);
            let interf_lin = ten.powf(i_dbm / ten);
            rsrp_dbm - ten * (noise_lin + interf_lin).log10()
        }
    }
}
