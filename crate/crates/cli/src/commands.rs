//! The three subcommands behind the `mcell` binary, usable as library
//! functions so tests can drive them without spawning processes.

use anyhow::{bail, Context, Result};
use mcell_core::arch::{
    build_arch, compare_table, crt_check, ArchKind, ArchModel, HeaderTable, LatencyConfig,
    COMPARISON_CSV_HEADER,
};
use mcell_core::sched::SchedulerKind;
use mcell_core::sim::{
    backhaul_capacity, run_scenario, trace_csv_line, ScenarioConfig, ScenarioMode,
    RESULTS_CSV_HEADER, TRACE_CSV_HEADER,
};
use std::fs;
use std::path::Path;

use crate::config;

fn load_config(config_path: Option<&Path>, sets: &[String]) -> Result<ScenarioConfig> {
    let text = match config_path {
        None => None,
        Some(path) => Some(
            fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?,
        ),
    };
    Ok(config::load(text.as_deref(), sets)?)
}

fn describe_scheduler(kind: &SchedulerKind<f64>) -> String {
    match kind {
        SchedulerKind::MaxThroughput => "mt".to_string(),
        SchedulerKind::BlindEqualThroughput { alpha } => format!("bet(alpha={alpha})"),
        SchedulerKind::ProportionalFair { alpha } => format!("pf(alpha={alpha})"),
    }
}

fn mbps(bps: f64) -> f64 {
    bps / 1e6
}

/// Runs the scenario and writes `results.csv` (and `trace.csv` when
/// asked) under `out`.
pub fn cmd_run(
    config_path: Option<&Path>,
    out: &Path,
    sets: &[String],
    trace: bool,
) -> Result<()> {
    let cfg = load_config(config_path, sets)?;
    let output = run_scenario(&cfg, trace)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let results_path = out.join("results.csv");
    let mut csv = String::from(RESULTS_CSV_HEADER);
    for row in &output.rows {
        csv.push('\n');
        csv.push_str(&row.csv_line());
    }
    csv.push('\n');
    fs::write(&results_path, csv)
        .with_context(|| format!("writing {}", results_path.display()))?;

    println!(
        "scenario: {} positions, {} UEs, {}, {}, seed {}",
        cfg.mc_positions.len(),
        cfg.ue_positions.len(),
        match cfg.mode {
            ScenarioMode::SingleUe => "single-ue",
            ScenarioMode::AllUes => "all-ues",
        },
        describe_scheduler(&cfg.scheduler),
        cfg.seed,
    );
    let ues = cfg.ue_positions.len();
    for (index, &mc) in cfg.mc_positions.iter().enumerate() {
        let cap = backhaul_capacity(&cfg, mc)?;
        let mut line = format!("pos {index:>2} | backhaul {:7.3} Mb/s |", mbps(cap));
        for row in &output.rows[index * ues..(index + 1) * ues] {
            line.push_str(&format!(" ue{} {:7.3}", row.ue_id, mbps(row.throughput_bps)));
        }
        println!("{line}");
    }
    println!("wrote {} ({} rows)", results_path.display(), output.rows.len());

    if trace {
        let trace_path = out.join("trace.csv");
        let mut csv = String::from(TRACE_CSV_HEADER);
        for rec in &output.trace {
            csv.push('\n');
            csv.push_str(&trace_csv_line(rec));
        }
        csv.push('\n');
        fs::write(&trace_path, csv)
            .with_context(|| format!("writing {}", trace_path.display()))?;
        println!("wrote {} ({} records)", trace_path.display(), output.trace.len());
    }
    Ok(())
}

/// Builds all three architectures, prints the comparison and the
/// attachment verdicts, and writes `comparison.csv` under `out`.
pub fn cmd_compare(
    config_path: Option<&Path>,
    out: &Path,
    sets: &[String],
    headers_path: Option<&Path>,
    latencies_path: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config_path, sets)?;
    let headers = match headers_path {
        None => HeaderTable::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading header sizes {}", path.display()))?;
            HeaderTable::default().with_overrides(&text)?
        }
    };
    let latencies = match latencies_path {
        None => LatencyConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading latencies {}", path.display()))?;
            LatencyConfig::default().with_overrides(&text)?
        }
    };

    let archs: Vec<ArchModel> =
        ArchKind::ALL.iter().map(|&kind| build_arch(kind, &headers, &latencies)).collect();
    let rows = compare_table(&archs, latencies.processing_s);

    println!(
        "{:<13} {:>5} {:>4} {:>6} {:>5} {:>5} {:>10}  {:<3} {:<4} {:<6} {:<3}",
        "arch", "radio", "wire", "tunnel", "up-oh", "cp-oh", "cp-rtt(ms)", "upf", "roam", "bh-agn", "qos"
    );
    let yn = |b: bool| if b { "yes" } else { "no" };
    for row in &rows {
        println!(
            "{:<13} {:>5} {:>4} {:>6} {:>5} {:>5} {:>10.3}  {:<3} {:<4} {:<6} {:<3}",
            row.arch.to_string(),
            row.radio_hops,
            row.wire_hops,
            row.tunnel_depth,
            row.up_overhead_bytes,
            row.cp_overhead_bytes,
            row.cp_rtt_ms,
            yn(row.capabilities.onboard_upf),
            yn(row.capabilities.roaming_free),
            yn(row.capabilities.backhaul_agnostic),
            yn(row.capabilities.e2e_qos),
        );
    }
    for arch in &archs {
        let outcome = crt_check(arch, cfg.crt_limit_s, latencies.processing_s);
        println!(
            "{}: cp rtt {:.3} ms {} limit {:.3} ms -> attach {}",
            arch.kind,
            outcome.rtt_s * 1e3,
            if outcome.success { "<=" } else { ">" },
            outcome.crt_limit_s * 1e3,
            if outcome.success { "ok" } else { "fails" },
        );
    }

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("comparison.csv");
    let mut csv = String::from(COMPARISON_CSV_HEADER);
    for row in &rows {
        csv.push('\n');
        csv.push_str(&row.csv_line());
    }
    csv.push('\n');
    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Reruns the scenario once per value of `key` and stacks all result
/// rows, prefixed with the swept value, into `sweep_<key>.csv`.
pub fn cmd_sweep(
    config_path: Option<&Path>,
    out: &Path,
    sets: &[String],
    key: &str,
    values: &[String],
) -> Result<()> {
    if values.is_empty() {
        bail!("sweep needs at least one value for {key}");
    }

    let mut csv = format!("{key},{RESULTS_CSV_HEADER}");
    let mut total_rows = 0usize;
    for value in values {
        let mut run_sets = sets.to_vec();
        run_sets.push(format!("{key}={value}"));
        let cfg = load_config(config_path, &run_sets)
            .with_context(|| format!("sweep value {key}={value}"))?;
        let output = run_scenario(&cfg, false)?;
        for row in &output.rows {
            csv.push('\n');
            csv.push_str(value);
            csv.push(',');
            csv.push_str(&row.csv_line());
        }
        total_rows += output.rows.len();
    }
    csv.push('\n');

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(format!("sweep_{key}.csv"));
    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {} ({} rows across {} values)", path.display(), total_rows, values.len());
    Ok(())
}
