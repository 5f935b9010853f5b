use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Scenario};
use crate::cow::{write_skr_csv, SkrPoint, WindowStats};
use crate::error::{Error, Result};
use crate::qmath::{FidelityReport, Mat4, ProcessMatrix, SixState};
use crate::tomography::bloch_ellipsoid;
use crate::tomography::io::write_mesh_csv;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub state: SixState,
    pub fidelity: f64,
    pub std: f64,
    pub bloch: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessResult {
    pub fidelities: FidelityReport,
    pub chi_real: [[f64; 4]; 4],
    pub chi_imag: [[f64; 4]; 4],
    pub affine_m: [[f64; 3]; 3],
    pub affine_c: [f64; 3],
    pub clipped_weight: f64,
    pub tp_deviation: f64,
}

impl ProcessResult {
    pub fn chi(&self) -> Result<ProcessMatrix<f64>> {
        let mut m = Mat4::<f64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = Complex64::new(self.chi_real[i][j], self.chi_imag[i][j]);
            }
        }
        ProcessMatrix::new(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkrResult {
    pub excess_loss_db: f64,
    pub cutoff_db: Option<f64>,
    pub points: Vec<SkrPoint>,
}

/// Everything a run produced, keyed to the config that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub config_hash: String,
    pub headline: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_series: Option<Vec<WindowStats>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skr: Option<SkrResult>,
    pub config: ExperimentConfig,
}

impl RunReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotTarget {
    Fig2b,
    Fig2e,
    Fig3,
    Fig4,
}

impl PlotTarget {
    pub const ALL: [PlotTarget; 4] = [PlotTarget::Fig2b, PlotTarget::Fig2e, PlotTarget::Fig3, PlotTarget::Fig4];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotTarget::Fig2b => "fig2b.csv",
            PlotTarget::Fig2e => "fig2e.csv",
            PlotTarget::Fig3 => "fig3.csv",
            PlotTarget::Fig4 => "fig4.csv",
        }
    }

    /// Whether `report` carries the table this target needs.
    pub fn available(self, report: &RunReport) -> bool {
        match self {
            PlotTarget::Fig2b => report.states.is_some(),
            PlotTarget::Fig2e => report.process.is_some(),
            PlotTarget::Fig3 => report.time_series.is_some(),
            PlotTarget::Fig4 => report.skr.is_some(),
        }
    }
}

fn missing(what: &str, scenario: &str) -> Error {
    Error::MissingTable(format!("report has no {what} table; run the `{scenario}` scenario"))
}

fn create(out_dir: &Path, target: PlotTarget) -> Result<(PathBuf, BufWriter<File>)> {
    let path = out_dir.join(target.file_name());
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9e}")).unwrap_or_default()
}

/// Writes the CSV behind one figure into `out_dir`.
pub fn emit_plot_data(report: &RunReport, target: PlotTarget, out_dir: &Path) -> Result<PathBuf> {
    match target {
        PlotTarget::Fig2b => {
            let rows = report.states.as_ref().ok_or_else(|| missing("state fidelity", "qst"))?;
            let (path, w) = create(out_dir, target)?;
            let mut w = csv::Writer::from_writer(w);
            w.write_record(["state", "fidelity", "std"])?;
            for r in rows {
                w.write_record([r.state.label().to_string(), format!("{:.9e}", r.fidelity), format!("{:.9e}", r.std)])?;
            }
            w.flush()?;
            Ok(path)
        }
        PlotTarget::Fig2e => {
            let p = report.process.as_ref().ok_or_else(|| missing("process", "qpt"))?;
            let t = &report.config.tomography;
            let mesh = bloch_ellipsoid(&p.chi()?, t.mesh_theta, t.mesh_phi)?;
            let (path, w) = create(out_dir, target)?;
            write_mesh_csv(w, &mesh)?;
            Ok(path)
        }
        PlotTarget::Fig3 => {
            let ws = report.time_series.as_ref().ok_or_else(|| missing("time-series", "cow"))?;
            let (path, w) = create(out_dir, target)?;
            let mut w = csv::Writer::from_writer(w);
            w.write_record(["time", "qber", "visibility"])?;
            for s in ws {
                w.write_record([format!("{:.2}", s.window_start_s), cell(s.qber), cell(s.visibility)])?;
            }
            w.flush()?;
            Ok(path)
        }
        PlotTarget::Fig4 => {
            let skr = report.skr.as_ref().ok_or_else(|| missing("key-rate", "skr_sweep"))?;
            let (path, w) = create(out_dir, target)?;
            write_skr_csv(w, &skr.points)?;
            Ok(path)
        }
    }
}
