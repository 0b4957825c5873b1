//! Flat `key = value` configuration for the command-line front end.
//!
//! A config file holds one assignment per line; `#` starts a comment
//! and blank lines are skipped. The same assignments can be given on
//! the command line via repeated `--set key=value`, which are applied
//! after the file and therefore win. The key set is closed: anything
//! unrecognized is an error carrying the exact file line or `--set`
//! position, so typos fail loudly instead of silently running the
//! defaults.
//!
//! Keys:
//!
//! | key                 | value                                     |
//! |---------------------|-------------------------------------------|
//! | `arch`              | `mobile-gnb` \| `gnb-du-relay` \| `iab-node` |
//! | `scheduler`         | `mt` \| `bet` \| `pf`                     |
//! | `alpha`             | averaging weight in (0, 1]                |
//! | `tx_power_dbm`      | transmit power                            |
//! | `noise_dbm`         | noise floor over the channel bandwidth    |
//! | `carrier_ghz`       | carrier frequency                         |
//! | `bandwidth_mhz`     | channel bandwidth                         |
//! | `scs_khz`           | subcarrier spacing                        |
//! | `n_prb`             | resource blocks in the grid               |
//! | `tti_ms`            | TTI duration                              |
//! | `positions_n`       | cell positions along the path (>= 2)      |
//! | `path_start`        | `x y h` of the first cell position        |
//! | `path_end`          | `x y h` of the last cell position         |
//! | `ue<i>_pos`         | `x y h` of UE `i` (1-based, contiguous)   |
//! | `on_gnb_pos`        | `x y h` of the overlay gNB                |
//! | `ttis_per_position` | TTIs simulated per position               |
//! | `seed`              | RNG seed                                  |
//! | `scenario`          | `single-ue` \| `all-ues`                  |
//! | `max_retx`          | retransmissions per block                 |
//! | `gap_db`            | SINR gap used to place the CQI thresholds |
//! | `crt_ms`            | contention-resolution window              |

use mcell_core::arch::ArchKind;
use mcell_core::channel::Position;
use mcell_core::linkadapt::CqiTable;
use mcell_core::sched::{SchedulerKind, DEFAULT_ALPHA};
use mcell_core::sim::{mc_positions, ScenarioConfig, ScenarioMode};
use std::fmt;
use thiserror::Error;

/// Where an assignment came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line in the config file.
    File(usize),
    /// 1-based position among the `--set` arguments.
    Set(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::File(n) => write!(f, "line {n}"),
            Location::Set(n) => write!(f, "--set #{n}"),
        }
    }
}

/// Configuration parsing problems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{location}: expected \"key = value\", got {got:?}")]
    MalformedLine { location: Location, got: String },
    #[error("{location}: unknown key {key:?}")]
    UnknownKey { location: Location, key: String },
    #[error("{location}: invalid value {value:?} for {key}: expected {expected}")]
    InvalidValue { location: Location, key: String, value: String, expected: &'static str },
    #[error("{location}: {key} skips ahead, the next free UE slot is ue{expected}_pos")]
    NonContiguousUe { location: Location, key: String, expected: usize },
    #[error("alpha was set but the mt scheduler has no averaging window")]
    AlphaWithoutAverage,
}

/// Deferred values that interact with each other and are resolved in
/// [`ConfigBuilder::finalize`], so assignment order never matters.
#[derive(Debug, Clone, Default)]
struct Staged {
    scheduler: Option<SchedulerChoice>,
    alpha: Option<f64>,
    gap_db: Option<f64>,
    path_start: Option<Position<f64>>,
    path_end: Option<Position<f64>>,
    positions_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SchedulerChoice {
    Mt,
    Bet,
    Pf,
}

/// Accumulates assignments on top of the default scenario.
#[derive(Debug, Clone)]
pub struct ConfigBuilder {
    cfg: ScenarioConfig,
    staged: Staged,
}

impl Default for ConfigBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self { cfg: ScenarioConfig::default(), staged: Staged::default() }
    }

    /// Applies one `key = value` assignment.
    pub fn apply(&mut self, key: &str, value: &str, location: Location) -> Result<(), ConfigError> {
        let invalid = |expected: &'static str| ConfigError::InvalidValue {
            location,
            key: key.to_string(),
            value: value.to_string(),
            expected,
        };

        if let Some(index) = ue_pos_index(key) {
            let pos = parse_position(value).ok_or_else(|| invalid("three numbers \"x y h\""))?;
            let next = self.cfg.ue_positions.len() + 1;
            return match index {
                i if i < next => {
                    self.cfg.ue_positions[i - 1] = pos;
                    Ok(())
                }
                i if i == next => {
                    self.cfg.ue_positions.push(pos);
                    Ok(())
                }
                _ => Err(ConfigError::NonContiguousUe {
                    location,
                    key: key.to_string(),
                    expected: next,
                }),
            };
        }

        match key {
            "arch" => {
                self.cfg.arch_kind = ArchKind::from_str_exact(value)
                    .ok_or_else(|| invalid("mobile-gnb | gnb-du-relay | iab-node"))?;
            }
            "scheduler" => {
                self.staged.scheduler = Some(match value {
                    "mt" => SchedulerChoice::Mt,
                    "bet" => SchedulerChoice::Bet,
                    "pf" => SchedulerChoice::Pf,
                    _ => return Err(invalid("mt | bet | pf")),
                });
            }
            "alpha" => {
                let a: f64 = value.parse().map_err(|_| invalid("a number in (0, 1]"))?;
                if !(a > 0.0 && a <= 1.0) {
                    return Err(invalid("a number in (0, 1]"));
                }
                self.staged.alpha = Some(a);
            }
            "tx_power_dbm" => {
                self.cfg.radio.tx_power_dbm =
                    parse_finite(value).ok_or_else(|| invalid("a finite number"))?;
            }
            "noise_dbm" => {
                self.cfg.radio.noise_dbm =
                    parse_finite(value).ok_or_else(|| invalid("a finite number"))?;
            }
            "carrier_ghz" => {
                let v = parse_positive(value).ok_or_else(|| invalid("a positive number"))?;
                self.cfg.radio.carrier_freq_hz = v * 1e9;
            }
            "bandwidth_mhz" => {
                let v = parse_positive(value).ok_or_else(|| invalid("a positive number"))?;
                self.cfg.radio.bandwidth_hz = v * 1e6;
            }
            "scs_khz" => {
                let v = parse_positive(value).ok_or_else(|| invalid("a positive number"))?;
                self.cfg.radio.subcarrier_spacing_hz = v * 1e3;
            }
            "n_prb" => {
                let v: u32 = value.parse().map_err(|_| invalid("an integer >= 1"))?;
                if v == 0 {
                    return Err(invalid("an integer >= 1"));
                }
                self.cfg.radio.n_prb = v;
            }
            "tti_ms" => {
                let v = parse_positive(value).ok_or_else(|| invalid("a positive number"))?;
                self.cfg.tti_s = v / 1e3;
            }
            "positions_n" => {
                let v: usize = value.parse().map_err(|_| invalid("an integer >= 2"))?;
                if v < 2 {
                    return Err(invalid("an integer >= 2"));
                }
                self.staged.positions_n = Some(v);
            }
            "path_start" => {
                self.staged.path_start =
                    Some(parse_position(value).ok_or_else(|| invalid("three numbers \"x y h\""))?);
            }
            "path_end" => {
                self.staged.path_end =
                    Some(parse_position(value).ok_or_else(|| invalid("three numbers \"x y h\""))?);
            }
            "on_gnb_pos" => {
                self.cfg.on_gnb_position =
                    parse_position(value).ok_or_else(|| invalid("three numbers \"x y h\""))?;
            }
            "ttis_per_position" => {
                let v: u64 = value.parse().map_err(|_| invalid("an integer >= 1"))?;
                if v == 0 {
                    return Err(invalid("an integer >= 1"));
                }
                self.cfg.ttis_per_position = v;
            }
            "seed" => {
                self.cfg.seed = value.parse().map_err(|_| invalid("an unsigned integer"))?;
            }
            "scenario" => {
                self.cfg.mode = match value {
                    "single-ue" => ScenarioMode::SingleUe,
                    "all-ues" => ScenarioMode::AllUes,
                    _ => return Err(invalid("single-ue | all-ues")),
                };
            }
            "max_retx" => {
                self.cfg.max_retx = value.parse().map_err(|_| invalid("an unsigned integer"))?;
            }
            "gap_db" => {
                let v = parse_finite(value)
                    .filter(|v| *v >= 0.0)
                    .ok_or_else(|| invalid("a number >= 0"))?;
                self.staged.gap_db = Some(v);
            }
            "crt_ms" => {
                let v = parse_positive(value).ok_or_else(|| invalid("a positive number"))?;
                self.cfg.crt_limit_s = v / 1e3;
            }
            _ => {
                return Err(ConfigError::UnknownKey { location, key: key.to_string() });
            }
        }
        Ok(())
    }

    /// Resolves the staged values into a runnable scenario.
    pub fn finalize(mut self) -> Result<ScenarioConfig, ConfigError> {
        let choice = self.staged.scheduler.unwrap_or(match self.cfg.scheduler {
            SchedulerKind::MaxThroughput => SchedulerChoice::Mt,
            SchedulerKind::BlindEqualThroughput { .. } => SchedulerChoice::Bet,
            SchedulerKind::ProportionalFair { .. } => SchedulerChoice::Pf,
        });
        self.cfg.scheduler = match choice {
            SchedulerChoice::Mt => {
                if self.staged.alpha.is_some() {
                    return Err(ConfigError::AlphaWithoutAverage);
                }
                SchedulerKind::MaxThroughput
            }
            SchedulerChoice::Bet => SchedulerKind::BlindEqualThroughput {
                alpha: self.staged.alpha.unwrap_or(DEFAULT_ALPHA),
            },
            SchedulerChoice::Pf => SchedulerKind::ProportionalFair {
                alpha: self.staged.alpha.unwrap_or(DEFAULT_ALPHA),
            },
        };

        if let Some(gap) = self.staged.gap_db {
            self.cfg.cqi_table = CqiTable::qam64(gap);
        }

        let start = self.staged.path_start.unwrap_or(self.cfg.mc_positions[0]);
        let end = self.staged.path_end.unwrap_or(*self.cfg.mc_positions.last().unwrap());
        let n = self.staged.positions_n.unwrap_or(self.cfg.mc_positions.len());
        self.cfg.mc_positions = mc_positions(start, end, n).expect("n was validated >= 2");

        Ok(self.cfg)
    }
}

/// Parses config-file text and `--set` assignments into a scenario.
/// `--set` entries are applied last, so they override the file.
pub fn load(file_text: Option<&str>, sets: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let mut builder = ConfigBuilder::new();
    if let Some(text) = file_text {
        for (idx, raw) in text.lines().enumerate() {
            let location = Location::File(idx + 1);
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::MalformedLine { location, got: raw.to_string() })?;
            builder.apply(key.trim(), value.trim(), location)?;
        }
    }
    for (idx, assignment) in sets.iter().enumerate() {
        let location = Location::Set(idx + 1);
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            ConfigError::MalformedLine { location, got: assignment.clone() }
        })?;
        builder.apply(key.trim(), value.trim(), location)?;
    }
    builder.finalize()
}

/// `ue<i>_pos` keys address the UE list; `i` is 1-based.
fn ue_pos_index(key: &str) -> Option<usize> {
    let digits = key.strip_prefix("ue")?.strip_suffix("_pos")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i >= 1)
}

fn parse_position(value: &str) -> Option<Position<f64>> {
    let parts: Vec<f64> = value
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .ok()?;
    match parts[..] {
        [x, y, h] if x.is_finite() && y.is_finite() && h.is_finite() => {
            Some(Position::new(x, y, h))
        }
        _ => None,
    }
}

fn parse_finite(value: &str) -> Option<f64> {
    value.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_positive(value: &str) -> Option<f64> {
    parse_finite(value).filter(|v| *v > 0.0)
}
