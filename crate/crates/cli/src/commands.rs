use std::fmt::Write as _;

use iumps_core::bounds::{decay_bound, jordan_constants, sufficient_b};
use iumps_core::experiments::{
    analytic_gaps, benchmark_report, distinct_magnitudes, gap_statistics, run_ensemble_with, scan_instance,
    second_family_slope, HISTOGRAM_BINS,
};
use iumps_core::mps::{transfer_matrix, AnalyticFamily};
use iumps_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, DEFAULT_GAPSTATS_N};
use crate::error::CliError;
use crate::output::{opt_real, real, write_json, Csv};

fn prepare_out(config: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&config.output_dir).map_err(|e| CliError::io(&config.output_dir, e))
}

#[derive(Serialize)]
struct GapRecord {
    instance_id: usize,
    nu_gap: Option<f64>,
    peripheral_count: usize,
    error: Option<String>,
}

/// `spectrum.csv` and `gap.json` for each instance.
pub fn spectrum(config: &RunConfig) -> Result<String, CliError> {
    prepare_out(config)?;
    let explicit = config.load_kraus()?;
    let mut csv = Csv::new(&["instance_id", "eig_index", "re", "im", "abs", "is_peripheral"]);
    let mut gaps = Vec::new();
    for id in 0..config.single_count() {
        let kraus = config.kraus_for(id, explicit.as_ref())?;
        let t = transfer_matrix(&kraus, config.peripheral_tol)?;
        for (i, v) in t.spectrum.values.iter().enumerate() {
            csv.row(&[
                id.to_string(),
                i.to_string(),
                real(v.re),
                real(v.im),
                real(v.norm()),
                t.is_peripheral(i).to_string(),
            ]);
        }
        gaps.push(GapRecord {
            instance_id: id,
            nu_gap: t.nu_gap,
            peripheral_count: t.peripheral_indices.len(),
            error: t.nu_gap.is_none().then(|| Error::DegenerateSpectrum.to_string()),
        });
    }
    csv.write(&config.output_dir.join("spectrum.csv"))?;
    write_json(&config.output_dir.join("gap.json"), &gaps)?;
    Ok(format!("wrote spectra of {} instance(s)\n", gaps.len()))
}

/// `curve_<id>.csv` for each instance.
pub fn scan(config: &RunConfig) -> Result<String, CliError> {
    prepare_out(config)?;
    let explicit = config.load_kraus()?;
    let mut report = String::new();
    for id in 0..config.single_count() {
        let mps = config.instance(id, explicit.as_ref())?;
        let curve = scan_instance(&mps, config.region(), config.b_max_limit, config.k, config.threshold)?;
        let constants = jordan_constants(&mps).ok();
        let mut csv = Csv::new(&["b_len", "qmi", "qcmi", "f", "bound"]);
        for p in &curve.points {
            csv.row(&[
                p.b_len.to_string(),
                real(p.qmi),
                real(p.qcmi),
                real(p.f),
                opt_real(constants.as_ref().map(|c| decay_bound(c, p.b_len))),
            ]);
        }
        csv.write(&config.output_dir.join(format!("curve_{id}.csv")))?;
        let _ = writeln!(
            report,
            "instance {id}: {} points, b_max {}, nu_gap {}",
            curve.points.len(),
            curve.b_max,
            real(curve.nu_gap)
        );
    }
    Ok(report)
}

/// Ensemble rates, histogram, CDFs and summary.
pub fn ensemble(config: &RunConfig) -> Result<String, CliError> {
    prepare_out(config)?;
    let explicit = config.load_kraus()?;
    let ens = config.ensemble();
    let run = run_ensemble_with(&ens, |id| config.instance(id, explicit.as_ref()))?;
    let s = &run.summary;
    if s.records.is_empty() {
        return Err(CliError::AllFailed);
    }
    let dir = &config.output_dir;

    let mut rates = Csv::new(&["instance_id", "nu_gap", "b_max", "rate", "n_points"]);
    for r in &s.records {
        rates.row(&[
            r.instance_id.to_string(),
            real(r.nu_gap),
            r.b_max.to_string(),
            opt_real(r.rate),
            r.n_points.to_string(),
        ]);
    }
    rates.write(&dir.join("rates.csv"))?;

    let mut hist = Csv::new(&["i", "j", "count"]);
    for i in 0..HISTOGRAM_BINS {
        for j in 0..HISTOGRAM_BINS {
            hist.row(&[i.to_string(), j.to_string(), s.histogram.counts[i][j].to_string()]);
        }
    }
    hist.write(&dir.join("histogram.csv"))?;

    for (name, values) in [("cdf_all.csv", &s.cdf_all), ("cdf_full.csv", &s.cdf_full)] {
        let mut csv = Csv::new(&["rate", "cumulative_fraction"]);
        let n = values.len() as f64;
        for (i, v) in values.iter().enumerate() {
            csv.row(&[real(*v), real((i + 1) as f64 / n)]);
        }
        csv.write(&dir.join(name))?;
    }

    let summary = json!({
        "config": config,
        "n_instances": s.n_instances,
        "n_failed": s.failures.len(),
        "failures": s.failures,
        "rate_skips": s.rate_skips,
        "n_rates": s.cdf_all.len(),
        "n_full": s.cdf_full.len(),
        "total_shifted_points": s.total_shifted_points,
        "binned_points": s.histogram.binned(),
        "out_of_range": s.histogram.out_of_range,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(format!(
        "{} instances, {} failed, {} rates ({} with b_max = {})\n",
        s.n_instances,
        s.failures.len(),
        s.cdf_all.len(),
        s.cdf_full.len(),
        config.b_max_limit
    ))
}

/// Human-readable benchmark report; fails on the first failed check.
pub fn benchmark(reference_qmi: f64) -> Result<String, CliError> {
    let report = benchmark_report(reference_qmi)?;
    let text = report.to_string();
    match report.first_failure() {
        None => Ok(text + "benchmark passed\n"),
        Some(c) => {
            print!("{text}");
            Err(CliError::Benchmark(format!(
                "{}: expected {}, got {}",
                c.quantity,
                real(c.expected),
                real(c.actual)
            )))
        }
    }
}

/// Bound constants and sufficient `|B|` per instance, as a JSON array.
pub fn bound(config: &RunConfig) -> Result<String, CliError> {
    let explicit = config.load_kraus()?;
    let mut out = Vec::new();
    for id in 0..config.single_count() {
        let mps = config.instance(id, explicit.as_ref())?;
        let constants = jordan_constants(&mps)?;
        let b = sufficient_b(&constants, mps.d_s());
        out.push(json!({
            "instance_id": id,
            "constants": constants,
            "sufficient_b": b.as_ref().ok(),
            "sufficient_b_error": b.err().map(|e| e.to_string()),
        }));
    }
    serde_json::to_string_pretty(&out)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Sorted spectral differences of Case-1 samples plus the analytic families.
pub fn gapstats(config: &RunConfig) -> Result<String, CliError> {
    prepare_out(config)?;
    let n = config.n_instances.unwrap_or(DEFAULT_GAPSTATS_N);
    let stats = gap_statistics(n, config.master_seed)?;
    let mut csv = Csv::new(&["rank", "unit_defect", "first_gap", "second_gap"]);
    for i in 0..n {
        csv.row(&[
            i.to_string(),
            real(stats.unit_defect.values[i]),
            real(stats.first_gap.values[i]),
            real(stats.second_gap.values[i]),
        ]);
    }
    csv.write(&config.output_dir.join("gapstats.csv"))?;

    let mut first = Vec::new();
    for beta in [0.1, 0.01] {
        let (g1, g2) = analytic_gaps(AnalyticFamily::First, beta)?;
        let m = distinct_magnitudes(AnalyticFamily::First, beta)?;
        first.push(json!({"beta": beta, "gap_12": g1, "gap_23": g2, "magnitudes": m}));
    }
    let mut second = Vec::new();
    for beta in [1e-3, 1e-4] {
        let (g1, g2) = analytic_gaps(AnalyticFamily::Second, beta)?;
        second.push(json!({
            "beta": beta,
            "gap_12": g1,
            "gap_23": g2,
            "first_order": second_family_slope() * beta,
        }));
    }
    let summary = json!({
        "n": n,
        "master_seed": config.master_seed,
        "unit_defect": {"min": stats.unit_defect.min, "max": stats.unit_defect.max},
        "first_gap": {"min": stats.first_gap.min, "max": stats.first_gap.max},
        "second_gap": {"min": stats.second_gap.min, "max": stats.second_gap.max},
        "first_family": first,
        "second_family": second,
    });
    write_json(&config.output_dir.join("gapstats.json"), &summary)?;
    Ok(format!(
        "{n} samples: max |1 - |nu1|| = {}\n",
        real(stats.unit_defect.max)
    ))
}
