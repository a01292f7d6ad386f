use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasor::{Phasor, Polar};

/// Voltage and entering current of one terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalEntry {
    pub v: Phasor,
    pub i: Phasor,
}

/// Terminal phasors of one solve with complex and Joule power.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalReport {
    pub frequency_hz: f64,
    /// Terminals `1..N`; the last one is the ground (`V_N = 0`).
    pub terminals: Vec<TerminalEntry>,
    /// `½ Σ V_k conj(I_k)`, VA.
    pub s: Complex64,
    /// Joule power from the volume integral, W.
    pub p_h: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerminal {
    #[serde(rename = "V")]
    v: Polar,
    #[serde(rename = "I")]
    i: Polar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    frequency_hz: f64,
    terminals: Vec<RawTerminal>,
    #[serde(rename = "S")]
    s: RawComplex,
    #[serde(rename = "P_h")]
    p_h: f64,
}

fn bad(reason: impl Into<String>) -> Error {
    Error::Document {
        what: "terminal report",
        reason: reason.into(),
    }
}

impl TerminalReport {
    pub fn n_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn voltages(&self) -> Vec<Phasor> {
        self.terminals.iter().map(|t| t.v).collect()
    }

    pub fn currents(&self) -> Vec<Phasor> {
        self.terminals.iter().map(|t| t.i).collect()
    }

    pub fn to_json(&self) -> String {
        let raw = RawReport {
            frequency_hz: self.frequency_hz,
            terminals: self
                .terminals
                .iter()
                .map(|t| RawTerminal {
                    v: t.v.to_polar(),
                    i: t.i.to_polar(),
                })
                .collect(),
            s: RawComplex {
                re: self.s.re,
                im: self.s.im,
            },
            p_h: self.p_h,
        };
        serde_json::to_string_pretty(&raw).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawReport = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if !(raw.frequency_hz > 0.0) || !raw.frequency_hz.is_finite() {
            return Err(bad(format!("frequency_hz must be > 0, got {}", raw.frequency_hz)));
        }
        if raw.terminals.len() < 2 {
            return Err(bad(format!(
                "at least two terminals required, found {}",
                raw.terminals.len()
            )));
        }
        let mut terminals = Vec::with_capacity(raw.terminals.len());
        for (k, t) in raw.terminals.iter().enumerate() {
            let conv =
                |p: Polar, name: &str| Phasor::try_from(p).map_err(|e| bad(format!("terminals[{k}].{name}: {e}")));
            terminals.push(TerminalEntry {
                v: conv(t.v, "V")?,
                i: conv(t.i, "I")?,
            });
        }
        if !raw.s.re.is_finite() || !raw.s.im.is_finite() || !raw.p_h.is_finite() {
            return Err(bad("S and P_h must be finite"));
        }
        Ok(Self {
            frequency_hz: raw.frequency_hz,
            terminals,
            s: Complex64::new(raw.s.re, raw.s.im),
            p_h: raw.p_h,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TerminalReport {
        TerminalReport {
            frequency_hz: 50.0,
            terminals: vec![
                TerminalEntry {
                    v: Phasor::from_polar(64.3, -1.41).unwrap(),
                    i: Phasor::from_polar(3116.0, 0.1).unwrap(),
                },
                TerminalEntry {
                    v: Phasor::from_polar(20.0, 2.0).unwrap(),
                    i: Phasor::from_polar(3116.0, 0.1 - 2.0944).unwrap(),
                },
                TerminalEntry {
                    v: Phasor::ZERO,
                    i: Phasor::from_polar(3116.0, 0.1 + 2.0944).unwrap(),
                },
            ],
            s: Complex64::new(1.0e5, 2.0e4),
            p_h: 1.0e5,
        }
    }

    #[test]
    fn json_round_trip_and_key_names() {
        let r = sample();
        let text = r.to_json();
        for key in [
            "\"frequency_hz\"",
            "\"terminals\"",
            "\"V\"",
            "\"I\"",
            "\"mag\"",
            "\"phase\"",
            "\"S\"",
            "\"re\"",
            "\"im\"",
            "\"P_h\"",
        ] {
            assert!(text.contains(key), "{key} missing in {text}");
        }
        let back = TerminalReport::from_json(&text).unwrap();
        assert_eq!(back.n_terminals(), 3);
        assert_eq!(back.frequency_hz, 50.0);
        assert_eq!(back.s, r.s);
        for (a, b) in back.terminals.iter().zip(&r.terminals) {
            assert!((a.v.0 - b.v.0).norm() < 1e-12 * (1.0 + b.v.magnitude()));
            assert!((a.i.0 - b.i.0).norm() < 1e-12 * b.i.magnitude());
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(TerminalReport::from_json("{").is_err());
        let one = r#"{"frequency_hz":50,"terminals":[{"V":{"mag":1,"phase":0},"I":{"mag":1,"phase":0}}],"S":{"re":0,"im":0},"P_h":0}"#;
        assert!(TerminalReport::from_json(one)
            .unwrap_err()
            .to_string()
            .contains("two terminals"));
        let neg = sample().to_json().replacen("\"mag\": 64.3", "\"mag\": -64.3", 1);
        assert!(TerminalReport::from_json(&neg).is_err());
        let extra = sample().to_json().replacen("\"P_h\"", "\"extra\": 1, \"P_h\"", 1);
        assert!(TerminalReport::from_json(&extra).is_err());
    }
}
