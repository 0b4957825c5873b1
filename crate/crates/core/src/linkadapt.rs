//! CQI-driven link adaptation: MCS lookup, transport block sizing and
//! block-error prediction.
//!
//! A [`CqiTable`] holds 16 rows (CQI 0 through 15). Row 0 means "out of
//! range", no transmission. Rows 1..=15 carry a modulation order and a
//! code rate transcribed from the standard downlink CQI tables, plus a
//! SINR decision threshold. Thresholds are generated by inverting the
//! gapped Shannon bound: the threshold for row k is the SINR where
//! `log2(1 + sinr_lin / gap_lin)` equals the row's spectral efficiency,
//! i.e. `10 log10((2^eff - 1) * gap_lin)`. A fixed gap of 10 dB is the
//! default and reproduces conventional operating points for the 0.1
//! block-error target.
//!
//! Block errors follow a logistic curve in the dB domain, anchored so
//! that the probability at the decision threshold equals the table's
//! target BLER and falling off with a configurable slope (0.5 dB by
//! default).

use crate::scalar::Scalar;
use thiserror::Error;

/// Default Shannon gap, dB.
pub const DEFAULT_GAP_DB: f64 = 10.0;
/// Default logistic BLER slope, dB.
pub const DEFAULT_BLER_SLOPE_DB: f64 = 0.5;
/// Default number of usable resource elements per PRB per slot
/// (12 subcarriers x 14 symbols minus reference-signal overhead).
pub const DEFAULT_RE_PER_PRB: u32 = 144;

/// Modulation order and code rate (x1024) for CQI 1..=15 of the 64QAM
/// downlink table, 0.1 block-error target.
const QAM64_ROWS: [(u8, u16); 15] = [
    (2, 78),
    (2, 120),
    (2, 193),
    (2, 308),
    (2, 449),
    (2, 602),
    (4, 378),
    (4, 490),
    (4, 616),
    (6, 466),
    (6, 567),
    (6, 666),
    (6, 772),
    (6, 873),
    (6, 948),
];

/// Same, 256QAM table, 0.1 block-error target.
const QAM256_ROWS: [(u8, u16); 15] = [
    (2, 78),
    (2, 193),
    (2, 449),
    (4, 378),
    (4, 490),
    (4, 616),
    (6, 466),
    (6, 567),
    (6, 666),
    (6, 772),
    (6, 873),
    (8, 711),
    (8, 797),
    (8, 885),
    (8, 948),
];

/// Same, low spectral-efficiency table, 1e-5 block-error target.
const LOW_BLER_ROWS: [(u8, u16); 15] = [
    (2, 30),
    (2, 50),
    (2, 78),
    (2, 120),
    (2, 193),
    (2, 308),
    (2, 449),
    (2, 602),
    (4, 378),
    (4, 490),
    (4, 616),
    (6, 466),
    (6, 567),
    (6, 666),
    (6, 772),
];

/// Problems constructing or overriding a [`CqiTable`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("line {line}: expected \"cqi<TAB>threshold_db\", got {got:?}")]
    MalformedOverrideLine { line: usize, got: String },
    #[error("line {line}: CQI index {cqi} is outside 1..=15")]
    OverrideIndexOutOfRange { line: usize, cqi: i64 },
    #[error("line {line}: duplicate override for CQI {cqi}")]
    DuplicateOverride { line: usize, cqi: u8 },
    #[error("thresholds must be strictly increasing, violated at CQI {cqi}")]
    ThresholdsNotIncreasing { cqi: u8 },
}

/// One CQI row. Row 0 has no modulation and no threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqiEntry<F> {
    pub cqi: u8,
    /// Bits per modulation symbol: 2, 4, 6 or 8. Zero for CQI 0.
    pub modulation_order: u8,
    /// Effective code rate in (0, 1). Zero for CQI 0.
    pub code_rate: F,
    /// Minimum SINR at which this row is selected. `None` for CQI 0.
    pub sinr_threshold_db: Option<F>,
}

impl<F: Scalar> CqiEntry<F> {
    /// Bits per resource element for this row.
    pub fn spectral_efficiency(&self) -> F {
        F::of(f64::from(self.modulation_order)) * self.code_rate
    }
}

/// A full CQI table with its block-error target and curve slope.
#[derive(Debug, Clone, PartialEq)]
pub struct CqiTable<F> {
    entries: Vec<CqiEntry<F>>,
    target_bler: F,
    bler_slope_db: F,
}

impl<F: Scalar> Default for CqiTable<F> {
    fn default() -> Self {
        Self::qam64(F::of(DEFAULT_GAP_DB))
    }
}

impl<F: Scalar> CqiTable<F> {
    /// 64QAM table, 0.1 block-error target.
    pub fn qam64(gap_db: F) -> Self {
        Self::from_rows(&QAM64_ROWS, F::of(0.1), gap_db)
    }

    /// 256QAM table, 0.1 block-error target.
    pub fn qam256(gap_db: F) -> Self {
        Self::from_rows(&QAM256_ROWS, F::of(0.1), gap_db)
    }

    /// Low spectral-efficiency table, 1e-5 block-error target.
    pub fn low_bler(gap_db: F) -> Self {
        Self::from_rows(&LOW_BLER_ROWS, F::of(1e-5), gap_db)
    }

    fn from_rows(rows: &[(u8, u16); 15], target_bler: F, gap_db: F) -> Self {
        let gap_lin = F::of(10.0).powf(gap_db / F::of(10.0));
        let mut entries = Vec::with_capacity(16);
        entries.push(CqiEntry {
            cqi: 0,
            modulation_order: 0,
            code_rate: F::zero(),
            sinr_threshold_db: None,
        });
        for (i, &(modulation_order, rate_x1024)) in rows.iter().enumerate() {
            let code_rate = F::of(f64::from(rate_x1024)) / F::of(1024.0);
            let eff = F::of(f64::from(modulation_order)) * code_rate;
            let sinr_lin = (F::of(2.0).powf(eff) - F::one()) * gap_lin;
            entries.push(CqiEntry {
                cqi: (i + 1) as u8,
                modulation_order,
                code_rate,
                sinr_threshold_db: Some(F::of(10.0) * sinr_lin.log10()),
            });
        }
        let table = Self { entries, target_bler, bler_slope_db: F::of(DEFAULT_BLER_SLOPE_DB) };
        debug_assert!(table.check_increasing().is_ok());
        table
    }

    /// All 16 rows, CQI 0 first.
    pub fn entries(&self) -> &[CqiEntry<F>] {
        &self.entries
    }

    /// Row for one CQI value. Panics if `cqi > 15`.
    pub fn entry(&self, cqi: u8) -> &CqiEntry<F> {
        &self.entries[usize::from(cqi)]
    }

    /// Block-error probability targeted at each row's threshold.
    pub fn target_bler(&self) -> F {
        self.target_bler
    }

    /// Logistic slope of the block-error curve, dB.
    pub fn bler_slope_db(&self) -> F {
        self.bler_slope_db
    }

    /// Returns the same table with a different block-error slope.
    pub fn with_bler_slope_db(mut self, slope_db: F) -> Self {
        assert!(slope_db > F::zero(), "BLER slope must be positive");
        self.bler_slope_db = slope_db;
        self
    }

    /// Replaces decision thresholds with values from an override file.
    ///
    /// Format: one `cqi<TAB>threshold_db` pair per line, CQI in 1..=15,
    /// `#` comments and blank lines ignored. Rows not mentioned keep
    /// their generated thresholds. The merged thresholds must remain
    /// strictly increasing.
    pub fn with_threshold_overrides(mut self, text: &str) -> Result<Self, TableError> {
        let mut seen = [false; 16];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let mut parts = content.split('\t');
            let (k_str, v_str) = match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(v), None) => (k.trim(), v.trim()),
                _ => {
                    return Err(TableError::MalformedOverrideLine { line, got: raw.to_string() })
                }
            };
            let k: i64 = k_str
                .parse()
                .map_err(|_| TableError::MalformedOverrideLine { line, got: raw.to_string() })?;
            if !(1..=15).contains(&k) {
                return Err(TableError::OverrideIndexOutOfRange { line, cqi: k });
            }
            let k = k as usize;
            if seen[k] {
                return Err(TableError::DuplicateOverride { line, cqi: k as u8 });
            }
            seen[k] = true;
            let v: f64 = v_str
                .parse()
                .map_err(|_| TableError::MalformedOverrideLine { line, got: raw.to_string() })?;
            self.entries[k].sinr_threshold_db = Some(F::of(v));
        }
        self.check_increasing()?;
        Ok(self)
    }

    fn check_increasing(&self) -> Result<(), TableError> {
        for pair in self.entries[1..].windows(2) {
            let lo = pair[0].sinr_threshold_db.expect("rows 1..=15 carry thresholds");
            let hi = pair[1].sinr_threshold_db.expect("rows 1..=15 carry thresholds");
            if hi.is_nan() || lo.is_nan() || hi <= lo {
                return Err(TableError::ThresholdsNotIncreasing { cqi: pair[1].cqi });
            }
        }
        Ok(())
    }
}

/// What the link adaptation decided for one TTI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsDecision<F> {
    /// Index into the MCS table; `None` means no transmission (CQI 0).
    pub mcs_index: Option<u8>,
    /// Transport block size, bits. Zero when there is no transmission.
    pub tbs_bits: u64,
    /// Predicted block-error probability at the current SINR.
    pub expected_bler: F,
}

/// Highest CQI whose threshold the SINR meets; 0 if below all of them.
pub fn cqi_from_sinr<F: Scalar>(sinr_db: F, table: &CqiTable<F>) -> u8 {
    let mut best = 0;
    for entry in &table.entries()[1..] {
        let thr = entry.sinr_threshold_db.expect("rows 1..=15 carry thresholds");
        if sinr_db >= thr {
            best = entry.cqi;
        } else {
            break;
        }
    }
    best
}

/// Maps a reported CQI to an MCS index. The mapping is the identity on
/// this table family; CQI 0 yields no transmission. Panics if `cqi > 15`.
pub fn mcs_from_cqi<F: Scalar>(cqi: u8, table: &CqiTable<F>) -> Option<u8> {
    assert!(cqi <= 15, "CQI {cqi} out of range");
    if cqi == 0 {
        None
    } else {
        Some(table.entry(cqi).cqi)
    }
}

/// Transport block size in bits for one TTI on `n_prb` blocks:
/// `floor(n_prb * re_per_prb * modulation_order * code_rate)`.
pub fn transport_block_size<F: Scalar>(entry: &CqiEntry<F>, n_prb: u32, re_per_prb: u32) -> u64 {
    let re = F::of(f64::from(n_prb)) * F::of(f64::from(re_per_prb));
    let bits = re * F::of(f64::from(entry.modulation_order)) * entry.code_rate;
    bits.floor().widen() as u64
}

/// Block-error probability of `entry` at `sinr_db`.
///
/// Logistic in the dB domain with slope `table.bler_slope_db()`,
/// shifted so the value at the entry's decision threshold equals the
/// table's target BLER. Tends to 1 far below the threshold and to 0
/// far above it. Panics on CQI 0 (no threshold, nothing transmitted).
pub fn bler<F: Scalar>(sinr_db: F, entry: &CqiEntry<F>, table: &CqiTable<F>) -> F {
    let thr = entry
        .sinr_threshold_db
        .expect("bler is defined only for rows with a threshold");
    let p = table.target_bler();
    let shift = table.bler_slope_db() * ((F::one() - p) / p).ln();
    F::one() / (F::one() + ((sinr_db - thr + shift) / table.bler_slope_db()).exp())
}

/// Achievable rate of a decision over one TTI, bits per second.
pub fn achievable_rate<F: Scalar>(decision: &McsDecision<F>, tti_s: F) -> F {
    assert!(tti_s > F::zero(), "TTI must be positive");
    F::of(decision.tbs_bits as f64) / tti_s
}

/// Runs the whole chain for one SINR: CQI report, MCS choice, block
/// size and error prediction. Returns the CQI with the decision.
pub fn select_mcs<F: Scalar>(
    sinr_db: F,
    table: &CqiTable<F>,
    n_prb: u32,
    re_per_prb: u32,
) -> (u8, McsDecision<F>) {
    let cqi = cqi_from_sinr(sinr_db, table);
    match mcs_from_cqi(cqi, table) {
        None => (0, McsDecision { mcs_index: None, tbs_bits: 0, expected_bler: F::one() }),
        Some(mcs) => {
            let entry = table.entry(cqi);
            (
                cqi,
                McsDecision {
                    mcs_index: Some(mcs),
                    tbs_bits: transport_block_size(entry, n_prb, re_per_prb),
                    expected_bler: bler(sinr_db, entry, table),
                },
            )
        }
    }
}
