//! File formats: tomography counts CSV, χ text blocks, Bloch mesh CSV.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Deserialize;

use super::ellipsoid::MeshPoint;
use super::process::ProcessInputCounts;
use super::state::{Basis, MeasurementRecord};
use crate::error::{Error, Result};
use crate::qmath::{ProcessMatrix, SixState};

/// Counts per prepared state and basis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CountsTable {
    entries: BTreeMap<(SixState, Basis), (Option<u64>, Option<u64>)>,
}

#[derive(Deserialize)]
struct CountsRow {
    input_state: String,
    basis: String,
    outcome: String,
    count: u64,
}

impl CountsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, state: SixState, rec: MeasurementRecord) {
        self.entries
            .insert((state, rec.basis), (Some(rec.n_plus), Some(rec.n_minus)));
    }

    pub fn states(&self) -> Vec<SixState> {
        let mut out: Vec<_> = self.entries.keys().map(|(s, _)| *s).collect();
        out.dedup();
        out
    }

    /// The Z, X, Y records of one prepared state.
    pub fn records(&self, state: SixState) -> Result<[MeasurementRecord; 3]> {
        let mut out = [MeasurementRecord::new(Basis::Z, 0, 0); 3];
        for (slot, basis) in out.iter_mut().zip(Basis::ALL) {
            let (p, m) = self.entries.get(&(state, basis)).copied().ok_or_else(|| {
                Error::arg(format!("no counts for state {state} in basis {basis}"))
            })?;
            let (p, m) = p.zip(m).ok_or_else(|| {
                Error::arg(format!("state {state} basis {basis} is missing an outcome"))
            })?;
            *slot = MeasurementRecord::new(basis, p, m);
        }
        Ok(out)
    }

    pub fn process_counts(&self) -> Result<ProcessInputCounts> {
        let mut records = [[MeasurementRecord::new(Basis::Z, 0, 0); 3]; 4];
        for (slot, state) in records.iter_mut().zip(SixState::PROCESS_INPUTS) {
            *slot = self.records(state)?;
        }
        Ok(ProcessInputCounts { records })
    }

    /// Parses `input_state,basis,outcome,count` rows.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut table = Self::new();
        let headers = rdr.headers()?.clone();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let row: CountsRow = rec.deserialize(Some(&headers)).map_err(|e| Error::Input {
                line,
                message: e.to_string(),
            })?;
            let bad = |message: String| Error::Input { line, message };
            let state: SixState = row.input_state.parse().map_err(|e: Error| bad(e.to_string()))?;
            let basis: Basis = row.basis.parse().map_err(|e: Error| bad(e.to_string()))?;
            let entry = table.entries.entry((state, basis)).or_default();
            let slot = match row.outcome.as_str() {
                "+" => &mut entry.0,
                "-" => &mut entry.1,
                other => return Err(bad(format!("outcome must be + or -, got `{other}`"))),
            };
            if slot.replace(row.count).is_some() {
                return Err(bad(format!(
                    "duplicate row for state {state}, basis {basis}, outcome {}",
                    row.outcome
                )));
            }
        }
        Ok(table)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["input_state", "basis", "outcome", "count"])?;
        for ((state, basis), (p, m)) in &self.entries {
            for (label, n) in [("+", p), ("-", m)] {
                if let Some(n) = n {
                    w.write_record([state.label(), &basis.to_string(), label, &n.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// χ as two labeled 4×4 comma-separated blocks, real part then imaginary.
pub fn write_chi<W: Write>(mut w: W, chi: &ProcessMatrix<f64>) -> Result<()> {
    let m = chi.chi();
    for (label, part) in [("real", 0), ("imag", 1)] {
        writeln!(w, "# chi {label} (rows/cols: I, X, Y, Z)")?;
        for i in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|j| {
                    let z = m[(i, j)];
                    format!("{:.12e}", if part == 0 { z.re } else { z.im })
                })
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
    }
    Ok(())
}

/// Mesh CSV with columns `theta,phi,x,y,z`.
pub fn write_mesh_csv<W: Write>(writer: W, mesh: &[MeshPoint<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["theta", "phi", "x", "y", "z"])?;
    for p in mesh {
        w.write_record(
            [p.theta, p.phi, p.image[0], p.image[1], p.image[2]].map(|v| format!("{v:.12e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}
