use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Detector {
    /// Data line, arrival time.
    Ds,
    /// Monitor interferometer, constructive port.
    D1,
    /// Monitor interferometer, destructive port.
    D2,
}

/// Arrival bin within a slot. On the monitor line, `Interference` is the
/// overlap of the slot's own early and late pulses, and `Early` the overlap
/// of the previous slot's late pulse with this slot's early one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TimeBin {
    Early,
    Late,
    Interference,
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detector::Ds => "Ds",
            Detector::D1 => "D1",
            Detector::D2 => "D2",
        })
    }
}

impl fmt::Display for TimeBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeBin::Early => "early",
            TimeBin::Late => "late",
            TimeBin::Interference => "interference",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub slot: u64,
    pub detector: Detector,
    pub bin: TimeBin,
}

/// Click log over `n_slots` clock slots, ordered by slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DetectionRecord {
    n_slots: u64,
    events: Vec<DetectionEvent>,
}

impl DetectionRecord {
    pub fn new(n_slots: u64) -> Self {
        Self {
            n_slots,
            events: Vec::new(),
        }
    }

    pub fn n_slots(&self) -> u64 {
        self.n_slots
    }

    pub fn push(&mut self, ev: DetectionEvent) -> Result<()> {
        if ev.slot >= self.n_slots {
            return Err(Error::arg(format!(
                "slot {} outside a {}-slot record",
                ev.slot, self.n_slots
            )));
        }
        if let Some(last) = self.events.last() {
            if ev.slot < last.slot {
                return Err(Error::arg(format!(
                    "slot {} after slot {}: events must be non-decreasing",
                    ev.slot, last.slot
                )));
            }
        }
        self.events.push(ev);
        Ok(())
    }

    pub fn events(&self) -> &[DetectionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["slot", "detector", "bin"])?;
        for e in &self.events {
            w.write_record([e.slot.to_string(), e.detector.to_string(), e.bin.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
