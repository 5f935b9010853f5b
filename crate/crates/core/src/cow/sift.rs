use serde::{Deserialize, Serialize};

use super::sequence::{SlotKind, SlotSequence};
use crate::error::{Error, Result};
use crate::photonics::{DetectionRecord, Detector, TimeBin};

/// `(c₁ − c₂)/(c₁ + c₂)`; `None` when no counts.
pub fn visibility(c_d1: u64, c_d2: u64) -> Option<f64> {
    let total = c_d1 + c_d2;
    (total > 0).then(|| (c_d1 as f64 - c_d2 as f64) / total as f64)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SiftStats {
    pub n_sifted: u64,
    pub n_errors: u64,
    pub qber: Option<f64>,
    pub visibility: Option<f64>,
    pub c_d1: u64,
    pub c_d2: u64,
    /// `(slot, bit)` of every sifted detection as Bob decoded it.
    #[serde(skip)]
    pub raw_bits: Vec<(u64, bool)>,
}

/// Sifts data-line clicks on signal slots and accumulates monitor counts
/// over positions where two lit pulses overlap.
pub fn decode_and_sift(sent: &SlotSequence, detections: &DetectionRecord) -> Result<SiftStats> {
    if detections.n_slots() != sent.len() as u64 {
        return Err(Error::arg(format!(
            "clock mismatch: {} slots sent, detections span {}",
            sent.len(),
            detections.n_slots()
        )));
    }
    let mut out = SiftStats::default();
    let events = detections.events();
    let mut i = 0;
    while i < events.len() {
        let slot = events[i].slot;
        let mut j = i;
        let (mut early, mut late) = (false, false);
        while j < events.len() && events[j].slot == slot {
            let ev = events[j];
            let k = slot as usize;
            match ev.detector {
                Detector::Ds => match ev.bin {
                    TimeBin::Early => early = true,
                    TimeBin::Late => late = true,
                    TimeBin::Interference => {}
                },
                Detector::D1 | Detector::D2 => {
                    let kind = sent.slots[k].kind;
                    let monitored = match ev.bin {
                        TimeBin::Interference => kind == SlotKind::Decoy,
                        TimeBin::Early => k > 0 && sent.slots[k - 1].kind.late_lit() && kind.early_lit(),
                        TimeBin::Late => false,
                    };
                    if monitored {
                        if ev.detector == Detector::D1 {
                            out.c_d1 += 1;
                        } else {
                            out.c_d2 += 1;
                        }
                    }
                }
            }
            j += 1;
        }
        if let Some(sent_bit) = sent.slots[slot as usize].kind.bit() {
            if early != late {
                out.n_sifted += 1;
                if late != sent_bit {
                    out.n_errors += 1;
                }
                out.raw_bits.push((slot, late));
            }
        }
        i = j;
    }
    out.qber = (out.n_sifted > 0).then(|| out.n_errors as f64 / out.n_sifted as f64);
    out.visibility = visibility(out.c_d1, out.c_d2);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cow::sequence::{encode, random_sequence};
    use crate::cow::sim::transmit;
    use crate::cow::ProtocolConfig;
    use crate::photonics::{DetectionEvent, LinkBudget};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn visibility_values() {
        assert_eq!(visibility(100, 0), Some(1.0));
        assert_eq!(visibility(50, 50), Some(0.0));
        assert_eq!(visibility(996, 4), Some(0.992));
        assert_eq!(visibility(0, 0), None);
    }

    proptest! {
        #[test]
        fn visibility_bounded(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            match visibility(a, b) {
                None => prop_assert!(a + b == 0),
                Some(v) => {
                    prop_assert!((-1.0..=1.0).contains(&v));
                    prop_assert_eq!(v == 1.0, b == 0);
                }
            }
        }
    }

    fn lossless() -> LinkBudget {
        LinkBudget::ideal()
    }

    #[test]
    fn noiseless_lossless_bits() {
        // A large μ makes every lit pulse click on an ideal link.
        let cfg = ProtocolConfig {
            mu: 60.0,
            p_signal: 1.0,
            p_decoy: 0.0,
            p_empty: 0.0,
            optical_error: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bits = [false, true, false];
        let seq = encode(&bits, &cfg, &mut rng);
        let rec = transmit(&seq, &cfg, &lossless(), 0.0, &mut rng).unwrap();
        let s = decode_and_sift(&seq, &rec).unwrap();
        let got: Vec<bool> = s.raw_bits.iter().map(|&(_, b)| b).collect();
        assert_eq!(got, bits);
        assert_eq!(s.qber, Some(0.0));
    }

    #[test]
    fn full_stack_identity() {
        let cfg = ProtocolConfig {
            mu: 60.0,
            optical_error: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<bool> = (0..20_000).map(|_| rng.random()).collect();
        let seq = encode(&bits, &cfg, &mut rng);
        let rec = transmit(&seq, &cfg, &lossless(), 0.0, &mut rng).unwrap();
        let s = decode_and_sift(&seq, &rec).unwrap();
        let got: Vec<bool> = s.raw_bits.iter().map(|&(_, b)| b).collect();
        assert_eq!(got, bits);
        // Locked interferometer: D2 never fires on monitored positions.
        assert_eq!(s.c_d2, 0);
        assert_eq!(s.visibility, Some(1.0));
    }

    #[test]
    fn forced_d1_gives_unit_visibility() {
        let seq = SlotSequence::from_kinds(&[SlotKind::Decoy; 4], 0.29);
        let mut rec = DetectionRecord::new(4);
        for slot in 0..4 {
            rec.push(DetectionEvent {
                slot,
                detector: Detector::D1,
                bin: TimeBin::Interference,
            })
            .unwrap();
        }
        let s = decode_and_sift(&seq, &rec).unwrap();
        assert_eq!((s.c_d1, s.c_d2), (4, 0));
        assert_eq!(s.visibility, Some(1.0));
        assert_eq!(s.qber, None);
    }

    #[test]
    fn monitor_positions_follow_sent_pattern() {
        use SlotKind::*;
        // Boundary into slot 1 is 1→0 (lit/lit); into slot 2 is 0→1 (dark).
        let seq = SlotSequence::from_kinds(&[Signal1, Signal0, Signal1, Empty], 0.29);
        let mut rec = DetectionRecord::new(4);
        for (slot, bin) in [(1, TimeBin::Early), (2, TimeBin::Early), (2, TimeBin::Interference)] {
            rec.push(DetectionEvent {
                slot,
                detector: Detector::D2,
                bin,
            })
            .unwrap();
        }
        let s = decode_and_sift(&seq, &rec).unwrap();
        assert_eq!((s.c_d1, s.c_d2), (0, 1));
    }

    #[test]
    fn double_clicks_dropped_and_clock_checked() {
        let seq = SlotSequence::from_kinds(&[SlotKind::Signal0], 0.29);
        let mut rec = DetectionRecord::new(1);
        for bin in [TimeBin::Early, TimeBin::Late] {
            rec.push(DetectionEvent {
                slot: 0,
                detector: Detector::Ds,
                bin,
            })
            .unwrap();
        }
        assert_eq!(decode_and_sift(&seq, &rec).unwrap().n_sifted, 0);
        assert!(decode_and_sift(&seq, &DetectionRecord::new(2)).is_err());
    }

    #[test]
    fn qber_is_unbiased() {
        let e = 0.03;
        let cfg = ProtocolConfig {
            mu: 2.0,
            optical_error: e,
            ..Default::default()
        };
        let link = LinkBudget {
            dark_count_rate_per_ns: 0.0,
            ..LinkBudget::default()
        };
        let (mut errs, mut total) = (0u64, 0u64);
        let mut qbers = Vec::new();
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq = random_sequence(20_000, &cfg, &mut rng);
            let rec = transmit(&seq, &cfg, &link, 0.0, &mut rng).unwrap();
            let s = decode_and_sift(&seq, &rec).unwrap();
            errs += s.n_errors;
            total += s.n_sifted;
            qbers.push(s.qber.unwrap());
        }
        let mean = qbers.iter().sum::<f64>() / qbers.len() as f64;
        let sigma = (e * (1.0 - e) / total as f64).sqrt();
        assert!((mean - e).abs() < 3.0 * sigma, "mean {mean}, σ {sigma}, pooled {}", errs as f64 / total as f64);
    }
}
