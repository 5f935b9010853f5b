use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::info;

use super::config::{ExperimentConfig, Scenario};
use super::report::{emit_plot_data, PlotTarget, ProcessResult, RunReport, SkrResult, StateRow};
use super::seeds::{named_rng, named_seed};
use crate::cow::{
    calibrate_excess_loss, cutoff_attenuation, run_field_trial, skr_sweep, write_sift_report, FieldTrialConfig,
    SkrParams,
};
use crate::error::Result;
use crate::photonics::{expected_in_basis, measure_in_basis};
use crate::qmath::{process_fidelity, FidelityReport, ProcessMatrix, SixState};
use crate::tomography::io::{write_chi, CountsTable};
use crate::tomography::{
    bootstrap_processes, reconstruct_process_from_counts, reconstruct_state, sample_std, Basis, MeasurementRecord,
};

/// Scenario results plus the files that still need writing.
struct Outcome {
    report: RunReport,
    tables: Vec<(String, Table)>,
}

enum Table {
    Counts(CountsTable),
    Chi(Box<ProcessMatrix<f64>>),
    Sift,
}

fn simulate_counts(
    cfg: &ExperimentConfig,
    channel: &ProcessMatrix<f64>,
    states: &[SixState],
    stream: &str,
) -> Result<CountsTable> {
    let t = &cfg.tomography;
    let mut rng = named_rng(cfg.seed, stream);
    let mut table = CountsTable::new();
    for &state in states {
        for basis in Basis::ALL {
            let rec = if t.exact_counts {
                expected_in_basis(state, basis, t.shots_per_basis, &cfg.link, channel)?
            } else {
                measure_in_basis(state, basis, t.shots_per_basis, &cfg.link, channel, &mut rng)?
            };
            table.insert(state, rec);
        }
    }
    Ok(table)
}

fn state_rows(cfg: &ExperimentConfig, table: &CountsTable, prefix: &str) -> Result<Vec<StateRow>> {
    table
        .states()
        .into_iter()
        .map(|state| {
            let recs: [MeasurementRecord; 3] = table.records(state)?;
            let seed = named_seed(cfg.seed, &format!("{prefix}/bootstrap/{}", state.label()));
            let est = reconstruct_state::<f64>(&recs, &state.ket(), cfg.tomography.mc_samples, seed)?;
            Ok(StateRow {
                state,
                fidelity: est.fidelity_to_ideal,
                std: est.fidelity_std,
                bloch: est.rho.bloch_vector(),
            })
        })
        .collect()
}

fn headline(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn run_qst(cfg: &ExperimentConfig) -> Result<(RunReport, Vec<(String, Table)>)> {
    let channel = cfg.tomography.channel.process()?;
    let table = simulate_counts(cfg, &channel, &SixState::ALL, "qst/detection")?;
    let rows = state_rows(cfg, &table, "qst")?;
    let mean = rows.iter().map(|r| r.fidelity).sum::<f64>() / rows.len() as f64;
    let min = rows.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    let mut report = blank(cfg)?;
    report.headline = headline(&[("mean_state_fidelity", mean), ("min_state_fidelity", min)]);
    report.states = Some(rows);
    Ok((report, vec![("counts.csv".into(), Table::Counts(table))]))
}

fn run_qpt(cfg: &ExperimentConfig) -> Result<(RunReport, Vec<(String, Table)>)> {
    let t = &cfg.tomography;
    let out_chan = t.channel.process()?;
    let in_chan = t.back_to_back.process()?;
    let out_table = simulate_counts(cfg, &out_chan, &SixState::ALL, "qpt/output")?;
    let in_table = simulate_counts(cfg, &in_chan, &SixState::PROCESS_INPUTS, "qpt/input")?;
    let rows = state_rows(cfg, &out_table, "qpt")?;

    let (s_out, s_in) = (
        named_seed(cfg.seed, "qpt/bootstrap/output"),
        named_seed(cfg.seed, "qpt/bootstrap/input"),
    );
    let out_counts = out_table.process_counts()?;
    let in_counts = in_table.process_counts()?;
    let est_out = reconstruct_process_from_counts::<f64>(&out_counts, t.mc_samples, s_out)?;
    let est_in = reconstruct_process_from_counts::<f64>(&in_counts, t.mc_samples, s_in)?;
    // Output relative to input: overlap of the two process matrices.
    let f2 = process_fidelity(&est_out.chi, &est_in.chi);
    let boot_out = bootstrap_processes::<f64>(&out_counts, t.mc_samples, s_out)?;
    let boot_in = bootstrap_processes::<f64>(&in_counts, t.mc_samples, s_in)?;
    let f2s: Vec<f64> = boot_out
        .iter()
        .zip(&boot_in)
        .map(|(o, i)| process_fidelity(o, i))
        .collect();
    let fidelities = FidelityReport {
        f0: est_out.f_proc,
        f1: est_in.f_proc,
        f2,
        uncertainties: [est_out.f_proc_std, est_in.f_proc_std, sample_std(&f2s)],
    };
    let chi = est_out.chi.chi();
    let process = ProcessResult {
        fidelities,
        chi_real: std::array::from_fn(|i| std::array::from_fn(|j| chi[(i, j)].re)),
        chi_imag: std::array::from_fn(|i| std::array::from_fn(|j| chi[(i, j)].im)),
        affine_m: est_out.affine_map.m,
        affine_c: est_out.affine_map.c,
        clipped_weight: est_out.corrections.clipped_weight,
        tp_deviation: est_out.corrections.tp_deviation,
    };
    let mut report = blank(cfg)?;
    report.headline = headline(&[("f0", fidelities.f0), ("f1", fidelities.f1), ("f2", fidelities.f2)]);
    report.states = Some(rows);
    report.process = Some(process);
    Ok((
        report,
        vec![
            ("counts_output.csv".into(), Table::Counts(out_table)),
            ("counts_input.csv".into(), Table::Counts(in_table)),
            ("chi.txt".into(), Table::Chi(Box::new(est_out.chi))),
        ],
    ))
}

fn run_cow(cfg: &ExperimentConfig) -> Result<(RunReport, Vec<(String, Table)>)> {
    let trial = FieldTrialConfig {
        protocol: cfg.protocol,
        link: cfg.link,
        drift: cfg.drift,
        feedback: cfg.feedback,
        duration_s: cfg.field_trial.duration_s,
        substeps: cfg.field_trial.substeps,
    };
    let mut drift_rng = named_rng(cfg.seed, "cow/drift");
    let mut count_rng = named_rng(cfg.seed, "cow/detection");
    let res = run_field_trial(&trial, &mut drift_rng, &mut count_rng)?;
    let mut report = blank(cfg)?;
    report.headline = headline(&[
        ("mean_qber", res.mean_qber),
        ("mean_visibility", res.mean_visibility),
        ("min_visibility", res.min_visibility),
        ("windows", res.windows.len() as f64),
    ]);
    report.time_series = Some(res.windows);
    Ok((report, vec![("sift_report.csv".into(), Table::Sift)]))
}

fn run_skr(cfg: &ExperimentConfig) -> Result<(RunReport, Vec<(String, Table)>)> {
    let mut base = SkrParams {
        config: cfg.protocol,
        link: cfg.link,
        qber: cfg.sweep.qber,
        visibility: cfg.sweep.visibility,
    };
    if let Some(anchor) = cfg.sweep.calibrate {
        base.link.system_excess_loss_db = calibrate_excess_loss(&base, anchor.channel_db, anchor.bits_per_pulse)?;
        info!("fitted excess loss {:.4} dB", base.link.system_excess_loss_db);
    }
    let points = skr_sweep(&base, &cfg.sweep.grid())?;
    let cutoff_db = cutoff_attenuation(&base, 200.0);
    let mut report = blank(cfg)?;
    let mut h = vec![("excess_loss_db", base.link.system_excess_loss_db)];
    if let Some(c) = cutoff_db {
        h.push(("cutoff_db", c));
    }
    report.headline = headline(&h);
    report.skr = Some(SkrResult {
        excess_loss_db: base.link.system_excess_loss_db,
        cutoff_db,
        points,
    });
    Ok((report, vec![]))
}

fn blank(cfg: &ExperimentConfig) -> Result<RunReport> {
    Ok(RunReport {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: cfg.scenario,
        seed: cfg.seed,
        config_hash: cfg.hash()?,
        headline: BTreeMap::new(),
        states: None,
        process: None,
        time_series: None,
        skr: None,
        config: cfg.clone(),
    })
}

fn execute_inner(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    info!("running {} with seed {}", cfg.scenario, cfg.seed);
    let (report, tables) = match cfg.scenario {
        Scenario::Qst => run_qst(cfg)?,
        Scenario::Qpt => run_qpt(cfg)?,
        Scenario::Cow => run_cow(cfg)?,
        Scenario::SkrSweep => run_skr(cfg)?,
    };
    Ok(Outcome { report, tables })
}

/// Runs the scenario without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunReport> {
    Ok(execute_inner(cfg)?.report)
}

/// Runs the scenario and writes `report.json`, `config.toml`, the scenario
/// tables and every applicable plot file into `out_dir`. Returns the paths
/// written.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(RunReport, Vec<PathBuf>)> {
    let outcome = execute_inner(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let report = outcome.report;
    let mut written = Vec::new();

    let path = out_dir.join("report.json");
    report.write_json(&path)?;
    written.push(path);
    let path = out_dir.join("config.toml");
    std::fs::write(&path, cfg.to_toml_string()?)?;
    written.push(path);

    for (name, table) in &outcome.tables {
        let path = out_dir.join(name);
        let w = BufWriter::new(File::create(&path)?);
        match table {
            Table::Counts(t) => t.write_csv(w)?,
            Table::Chi(chi) => write_chi(w, chi)?,
            Table::Sift => write_sift_report(w, report.time_series.as_deref().unwrap_or_default())?,
        }
        written.push(path);
    }
    if let Some(skr) = &report.skr {
        let path = out_dir.join("skr_curve.csv");
        crate::cow::write_skr_csv(BufWriter::new(File::create(&path)?), &skr.points)?;
        written.push(path);
    }
    for target in PlotTarget::ALL {
        if target.available(&report) {
            written.push(emit_plot_data(&report, target, out_dir)?);
        }
    }
    Ok((report, written))
}
