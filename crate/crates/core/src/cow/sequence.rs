use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ProtocolConfig;
use crate::photonics::PulsePair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotKind {
    /// μ then 0.
    Signal0,
    /// 0 then μ.
    Signal1,
    /// μ then μ.
    Decoy,
    Empty,
}

impl SlotKind {
    pub const ALL: [SlotKind; 4] = [SlotKind::Signal0, SlotKind::Signal1, SlotKind::Decoy, SlotKind::Empty];

    pub fn bit(self) -> Option<bool> {
        match self {
            SlotKind::Signal0 => Some(false),
            SlotKind::Signal1 => Some(true),
            _ => None,
        }
    }

    pub fn early_lit(self) -> bool {
        matches!(self, SlotKind::Signal0 | SlotKind::Decoy)
    }

    pub fn late_lit(self) -> bool {
        matches!(self, SlotKind::Signal1 | SlotKind::Decoy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slot {
    pub kind: SlotKind,
    pub pair: PulsePair,
}

impl Slot {
    /// All pulses come from one continuous laser, so lit pulses share the
    /// same optical phase.
    pub fn new(kind: SlotKind, mu: f64) -> Self {
        let level = |lit: bool| if lit { mu } else { 0.0 };
        Self {
            kind,
            pair: PulsePair {
                mu_early: level(kind.early_lit()),
                mu_late: level(kind.late_lit()),
                phase: 0.0,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SlotSequence {
    pub slots: Vec<Slot>,
}

impl SlotSequence {
    pub fn from_kinds(kinds: &[SlotKind], mu: f64) -> Self {
        Self {
            slots: kinds.iter().map(|&k| Slot::new(k, mu)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Sent bits with their slot index.
    pub fn bits(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.kind.bit().map(|b| (i, b)))
    }

    pub fn count(&self, kind: SlotKind) -> usize {
        self.slots.iter().filter(|s| s.kind == kind).count()
    }
}

/// Maps each bit to a signal slot, interleaving decoy and empty slots drawn
/// independently with probabilities `p_decoy` and `p_empty`.
pub fn encode<R: Rng + ?Sized>(bits: &[bool], config: &ProtocolConfig, rng: &mut R) -> SlotSequence {
    let mut slots = Vec::with_capacity((bits.len() as f64 / config.p_signal.max(1e-3)) as usize + 1);
    let mut next = bits.iter();
    let mut pending = next.next();
    while let Some(&bit) = pending {
        let u: f64 = rng.random();
        let kind = if u < config.p_decoy {
            SlotKind::Decoy
        } else if u < config.p_decoy + config.p_empty {
            SlotKind::Empty
        } else {
            pending = next.next();
            if bit {
                SlotKind::Signal1
            } else {
                SlotKind::Signal0
            }
        };
        slots.push(Slot::new(kind, config.mu));
    }
    SlotSequence { slots }
}

/// `n` slots with i.i.d. kinds and uniformly random bits.
pub fn random_sequence<R: Rng + ?Sized>(n: usize, config: &ProtocolConfig, rng: &mut R) -> SlotSequence {
    let slots = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let kind = if u < config.p_decoy {
                SlotKind::Decoy
            } else if u < config.p_decoy + config.p_empty {
                SlotKind::Empty
            } else if rng.random::<bool>() {
                SlotKind::Signal1
            } else {
                SlotKind::Signal0
            };
            Slot::new(kind, config.mu)
        })
        .collect();
    SlotSequence { slots }
}
