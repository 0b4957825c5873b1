//! Randomized invariants of the numeric layers.

use mcell_core::arch::{
    build_arch, crt_check, ArchKind, HeaderTable, Layer, LatencyConfig,
};
use mcell_core::channel::{rsrp, umi_path_loss, RadioConfig};
use mcell_core::linkadapt::{
    bler, cqi_from_sinr, select_mcs, transport_block_size, CqiTable,
};
use mcell_core::sched::{
    run_tti, select_ue, update_avg, SchedulerKind, UeId, UeSchedState, UeTtiInput,
};
use proptest::prelude::*;

fn table() -> CqiTable<f64> {
    CqiTable::default()
}

proptest! {
    #[test]
    fn path_loss_increases_with_distance(
        d1 in 1.0f64..5000.0,
        extra in 0.1f64..5000.0,
        fc_ghz in 0.5f64..100.0,
    ) {
        let fc = fc_ghz * 1e9;
        let near = umi_path_loss(d1, fc).unwrap();
        let far = umi_path_loss(d1 + extra, fc).unwrap();
        prop_assert!(far > near);
    }

    #[test]
    fn path_loss_increases_with_carrier(
        d in 1.0f64..5000.0,
        f1 in 0.5f64..99.0,
        extra in 0.01f64..1.0,
    ) {
        let low = umi_path_loss(d, f1 * 1e9).unwrap();
        let high = umi_path_loss(d, (f1 + extra) * 1e9).unwrap();
        prop_assert!(high > low);
    }

    #[test]
    fn more_prbs_mean_less_power_per_resource_element(
        n1 in 1u32..270,
        extra in 1u32..100,
        pl in 40.0f64..160.0,
    ) {
        let cfg = |n_prb| RadioConfig::<f64> { n_prb, ..RadioConfig::default() };
        prop_assert!(rsrp(&cfg(n1 + extra), pl) < rsrp(&cfg(n1), pl));
    }

    #[test]
    fn cqi_is_monotone_in_sinr(s1 in -20.0f64..50.0, extra in 0.0f64..70.0) {
        let t = table();
        prop_assert!(cqi_from_sinr(s1 + extra, &t) >= cqi_from_sinr(s1, &t));
    }

    #[test]
    fn reported_cqi_brackets_the_sinr(s in -20.0f64..50.0) {
        let t = table();
        let cqi = cqi_from_sinr(s, &t);
        if cqi > 0 {
            prop_assert!(s >= t.entry(cqi).sinr_threshold_db.unwrap());
        }
        if cqi < 15 {
            prop_assert!(s < t.entry(cqi + 1).sinr_threshold_db.unwrap());
        }
    }

    #[test]
    fn bler_decreases_with_sinr_and_stays_a_probability(
        cqi in 1u8..=15,
        s in -30.0f64..60.0,
        extra in 0.01f64..30.0,
    ) {
        let t = table();
        let e = t.entry(cqi);
        let worse = bler(s, e, &t);
        let better = bler(s + extra, e, &t);
        prop_assert!((0.0..=1.0).contains(&worse));
        prop_assert!((0.0..=1.0).contains(&better));
        prop_assert!(better <= worse);
        // Strictness holds wherever the curve is clear of its f64
        // saturation at 1.
        if worse < 1.0 - 1e-9 {
            prop_assert!(better < worse);
        }
    }

    #[test]
    fn block_size_matches_integer_arithmetic(
        cqi in 1u8..=15,
        n_prb in 1u32..=273,
        re in 1u32..=1000,
    ) {
        // Code rates are multiples of 1/1024, so the float floor must
        // agree with exact integer arithmetic.
        let t = table();
        let e = t.entry(cqi);
        let rate_x1024 = (e.code_rate * 1024.0).round() as u128;
        let exact = u128::from(n_prb) * u128::from(re)
            * u128::from(e.modulation_order) * rate_x1024 / 1024;
        prop_assert_eq!(u128::from(transport_block_size(e, n_prb, re)), exact);
    }

    #[test]
    fn selection_is_invariant_to_rate_scaling(
        rates in prop::collection::vec(1.0f64..1e6, 2..6),
        avgs in prop::collection::vec(1.0f64..1e6, 2..6),
        exp in -3i32..=3,
        policy in 0u8..3,
    ) {
        // Powers of two keep the scaling exact in float arithmetic.
        let n = rates.len().min(avgs.len());
        let scale = 2.0f64.powi(exp);
        let kind = match policy {
            0 => SchedulerKind::MaxThroughput,
            1 => SchedulerKind::BlindEqualThroughput { alpha: 0.01 },
            _ => SchedulerKind::ProportionalFair { alpha: 0.01 },
        };
        let build = |s: f64| -> Vec<UeSchedState<f64>> {
            (0..n)
                .map(|i| UeSchedState {
                    ue_id: UeId(i as u32),
                    achievable_bps: rates[i] * s,
                    achieved_bps: 0.0,
                    avg_bps: avgs[i] * s,
                    last_scheduled: None,
                })
                .collect()
        };
        prop_assert_eq!(
            select_ue(&kind, &build(1.0)).unwrap(),
            select_ue(&kind, &build(scale)).unwrap()
        );
    }

    #[test]
    fn selection_is_invariant_to_ue_order(
        rates in prop::collection::vec(1.0f64..1e6, 2..6),
        avgs in prop::collection::vec(1.0f64..1e6, 2..6),
        rot in 0usize..6,
        policy in 0u8..3,
    ) {
        let n = rates.len().min(avgs.len());
        let kind = match policy {
            0 => SchedulerKind::MaxThroughput,
            1 => SchedulerKind::BlindEqualThroughput { alpha: 0.01 },
            _ => SchedulerKind::ProportionalFair { alpha: 0.01 },
        };
        let mut states: Vec<UeSchedState<f64>> = (0..n)
            .map(|i| UeSchedState {
                ue_id: UeId(i as u32),
                achievable_bps: rates[i],
                achieved_bps: 0.0,
                avg_bps: avgs[i],
                last_scheduled: None,
            })
            .collect();
        let before = select_ue(&kind, &states).unwrap();
        states.rotate_left(rot % n);
        prop_assert_eq!(select_ue(&kind, &states).unwrap(), before);
    }

    #[test]
    fn a_tti_with_data_always_serves_someone(
        tbs in prop::collection::vec(0u64..50_000, 1..6),
        policy in 0u8..3,
    ) {
        let kind = match policy {
            0 => SchedulerKind::MaxThroughput,
            1 => SchedulerKind::BlindEqualThroughput { alpha: 0.01 },
            _ => SchedulerKind::ProportionalFair { alpha: 0.01 },
        };
        let mut states: Vec<UeSchedState<f64>> =
            (0..tbs.len()).map(|i| UeSchedState::new(UeId(i as u32), 42_000.0)).collect();
        let inputs: Vec<UeTtiInput<f64>> = tbs
            .iter()
            .map(|&b| UeTtiInput {
                cqi: if b == 0 { 0 } else { 9 },
                decision: mcell_core::linkadapt::McsDecision {
                    mcs_index: if b == 0 { None } else { Some(9) },
                    tbs_bits: b,
                    expected_bler: 0.0,
                },
            })
            .collect();
        let rec = run_tti(&kind, 0, &mut states, &inputs, 0.0005, |_| false);
        let has_data = tbs.iter().any(|&b| b > 0);
        prop_assert_eq!(rec.ue_id.is_some(), has_data);
        if let Some(UeId(id)) = rec.ue_id {
            prop_assert!(tbs[id as usize] > 0);
        }
    }

    #[test]
    fn moving_average_matches_its_closed_form(
        r0 in 1.0f64..1e8,
        rates in prop::collection::vec(0.0f64..1e8, 1..64),
        alpha in 0.001f64..=1.0,
    ) {
        let folded = rates.iter().fold(r0, |acc, &r| update_avg(acc, r, alpha));
        let t = rates.len();
        let mut closed = (1.0 - alpha).powi(t as i32) * r0;
        for (k, &r) in rates.iter().enumerate() {
            closed += alpha * (1.0 - alpha).powi((t - 1 - k) as i32) * r;
        }
        prop_assert!(
            (folded - closed).abs() <= 1e-9 * folded.abs().max(closed.abs()).max(1.0),
            "folded {folded}, closed {closed}"
        );
    }

    #[test]
    fn attachment_outcome_agrees_with_the_rtt_bound(
        backhaul_ms in 0.0f64..60.0,
        processing_ms in 0.0f64..10.0,
        kind_idx in 0usize..3,
    ) {
        let kind = ArchKind::ALL[kind_idx];
        let lat = LatencyConfig {
            backhaul_s: Some(backhaul_ms / 1e3),
            processing_s: processing_ms / 1e3,
            ..LatencyConfig::default()
        };
        let arch = build_arch(kind, &HeaderTable::default(), &lat);
        let outcome = crt_check(&arch, 0.064, lat.processing_s);
        prop_assert_eq!(outcome.success, outcome.rtt_s <= 0.064);
    }

    #[test]
    fn header_overrides_land_on_the_right_layer(
        layer_idx in 0usize..13,
        bytes in 0u32..500,
    ) {
        let layer = Layer::ALL[layer_idx];
        let text = format!("{}\t{}", layer.as_str(), bytes);
        let t = HeaderTable::default().with_overrides(&text).unwrap();
        prop_assert_eq!(t.bytes(layer), bytes);
        for other in Layer::ALL {
            if other != layer {
                prop_assert_eq!(t.bytes(other), HeaderTable::default().bytes(other));
            }
        }
    }

    #[test]
    fn full_link_adaptation_chain_is_consistent(s in -20.0f64..60.0) {
        let t = table();
        let (cqi, decision) = select_mcs(s, &t, 51, 144);
        prop_assert_eq!(cqi == 0, decision.tbs_bits == 0);
        prop_assert_eq!(cqi == 0, decision.mcs_index.is_none());
        prop_assert!((0.0..=1.0).contains(&decision.expected_bler));
        if cqi > 0 {
            // Selected at or above threshold, so the predicted error
            // probability cannot exceed the table's design target.
            prop_assert!(decision.expected_bler <= t.target_bler() + 1e-12);
        }
    }
}
