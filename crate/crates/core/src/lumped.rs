//! Three-terminal reduction to a single impedance and the operating-point
//! planner built on it.
//!
//! For a balanced drive `I_2 = I_1 e^{i2π/3}`, `I_3 = I_1 e^{−i2π/3}` the
//! absorbed complex power is `S = ½ V^R conj(I_1)` with
//! `V^R = (V_1 − V_3) + (V_2 − V_3) e^{−i2π/3}`, so `Z^R = V^R / I_1`
//! summarizes the furnace and `P = ½ Re(Z^R) I²` for current amplitude `I`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::TerminalReport;
use crate::phasor::{Phasor, Polar, PHASE_SHIFT_120};

/// Relative KCL tolerance accepted by [`complex_power`].
pub const KCL_TOLERANCE: f64 = 1e-6;

/// `S = ½ Σ V_k conj(I_k)`; the currents must sum to zero within
/// [`KCL_TOLERANCE`] of the largest one.
pub fn complex_power(voltages: &[Phasor], currents: &[Phasor]) -> Result<Complex64> {
    if voltages.len() != currents.len() {
        return Err(Error::Lumped(format!(
            "{} voltages but {} currents",
            voltages.len(),
            currents.len()
        )));
    }
    if voltages.len() < 2 {
        return Err(Error::Lumped("at least two terminals required".into()));
    }
    let sum: Complex64 = currents.iter().map(|i| i.0).sum();
    let imax = currents.iter().map(|i| i.magnitude()).fold(0.0, f64::max);
    if sum.norm() > KCL_TOLERANCE * imax {
        return Err(Error::Lumped(format!(
            "terminal currents violate KCL: |Σ I_k| = {:.3e} A (max |I_k| = {imax:.3e} A)",
            sum.norm()
        )));
    }
    Ok(voltages.iter().zip(currents).map(|(v, i)| 0.5 * v.0 * i.0.conj()).sum())
}

/// `V^R = (V_1 − V_3) + (V_2 − V_3) e^{−i2π/3}`.
pub fn reduced_voltage(v1: Phasor, v2: Phasor, v3: Phasor) -> Phasor {
    (v1 - v3) + (v2 - v3).rotate(-PHASE_SHIFT_120)
}

/// Reduced impedance of a three-terminal furnace at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    z_r: Phasor,
    frequency_hz: f64,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(rename = "Z_R")]
    z_r: Polar,
    frequency_hz: f64,
    provenance: String,
}

fn bad_doc(reason: impl Into<String>) -> Error {
    Error::Document {
        what: "reduced model",
        reason: reason.into(),
    }
}

impl ReducedModel {
    /// A model from a known impedance, e.g. plant measurements.
    pub fn from_impedance(z_r: Phasor, frequency_hz: f64, provenance: impl Into<String>) -> Result<Self> {
        if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
            return Err(Error::invalid(
                "frequency_hz",
                format!("must be > 0, got {frequency_hz}"),
            ));
        }
        if !z_r.0.is_finite() {
            return Err(Error::invalid("z_r", "must be finite"));
        }
        Ok(Self {
            z_r,
            frequency_hz,
            provenance: provenance.into(),
        })
    }

    pub fn impedance(&self) -> Phasor {
        self.z_r
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// `Re(Z^R) > 0`.
    pub fn is_passive(&self) -> bool {
        self.z_r.re() > 0.0
    }

    fn require_passive(&self) -> Result<f64> {
        let r = self.z_r.re();
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::Lumped(format!(
                "Re(Z_R) = {r:e} ohm is not positive; a passive furnace must absorb power"
            )))
        }
    }

    pub fn to_json(&self) -> String {
        let raw = RawModel {
            z_r: self.z_r.to_polar(),
            frequency_hz: self.frequency_hz,
            provenance: self.provenance.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("model serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| bad_doc(e.to_string()))?;
        let z = Phasor::try_from(raw.z_r).map_err(|e| bad_doc(format!("Z_R: {e}")))?;
        Self::from_impedance(z, raw.frequency_hz, raw.provenance).map_err(|e| bad_doc(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// `Z^R = V^R / I_1` from a three-terminal report. Non-passive results are
/// rejected unless `allow_nonpassive`.
pub fn reduce(report: &TerminalReport, allow_nonpassive: bool) -> Result<ReducedModel> {
    if report.n_terminals() != 3 {
        return Err(Error::Lumped(format!(
            "reduction needs exactly 3 terminals, report has {}",
            report.n_terminals()
        )));
    }
    let v = report.voltages();
    let i1 = report.terminals[0].i;
    if !(i1.magnitude() > 0.0) {
        return Err(Error::Lumped("I_1 is zero; the reduced impedance is undefined".into()));
    }
    let z = Phasor(reduced_voltage(v[0], v[1], v[2]).0 / i1.0);
    let provenance = format!(
        "terminal report at {} Hz, |I_1| = {} A",
        report.frequency_hz,
        i1.magnitude()
    );
    let model = ReducedModel::from_impedance(z, report.frequency_hz, provenance)?;
    if !allow_nonpassive {
        model.require_passive()?;
    }
    Ok(model)
}

fn check_amplitude(name: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {x}")))
    }
}

/// `P = ½ Re(Z^R) I²` for common current amplitude `current` (peak, A).
pub fn predict_power(model: &ReducedModel, current: f64) -> Result<f64> {
    check_amplitude("current", current)?;
    Ok(0.5 * model.z_r.re() * current * current)
}

/// Current amplitude that dissipates `power`: `I = sqrt(2P / Re(Z^R))`.
pub fn required_current(model: &ReducedModel, power: f64) -> Result<f64> {
    check_amplitude("power", power)?;
    let r = model.require_passive()?;
    Ok((2.0 * power / r).sqrt())
}

/// Power versus current samples of a reduced model.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    /// `(I, P)` pairs, strictly increasing in `I`.
    pub samples: Vec<(f64, f64)>,
    pub model: ReducedModel,
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("I_amp_A,P_watts\n");
        for (i, p) in &self.samples {
            writeln!(out, "{i},{p}").unwrap();
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// `n` evenly spaced currents from `i_min` to `i_max` inclusive.
pub fn characteristic_curve(model: &ReducedModel, i_min: f64, i_max: f64, n: usize) -> Result<CurveTable> {
    check_amplitude("imin", i_min)?;
    check_amplitude("imax", i_max)?;
    if !(i_min < i_max) {
        return Err(Error::invalid("imax", format!("empty range {i_min}..{i_max}")));
    }
    if n < 2 {
        return Err(Error::invalid("n", format!("at least 2 samples required, got {n}")));
    }
    model.require_passive()?;
    let step = (i_max - i_min) / (n - 1) as f64;
    let samples = (0..n)
        .map(|k| {
            let i = if k + 1 == n { i_max } else { i_min + k as f64 * step };
            (i, 0.5 * model.z_r.re() * i * i)
        })
        .collect();
    Ok(CurveTable {
        samples,
        model: model.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::TerminalEntry;
    use crate::phasor::balanced_drive;

    fn p(m: f64, a: f64) -> Phasor {
        Phasor::from_polar(m, a).unwrap()
    }

    fn report(v: [Phasor; 3], i: [Phasor; 3]) -> TerminalReport {
        TerminalReport {
            frequency_hz: 50.0,
            terminals: v.iter().zip(i).map(|(v, i)| TerminalEntry { v: *v, i }).collect(),
            s: Complex64::new(0.0, 0.0),
            p_h: 0.0,
        }
    }

    #[test]
    fn complex_power_examples() {
        let i = balanced_drive(1.0, 0.0).unwrap();
        let s = complex_power(&[p(10.0, 0.0); 3], &i).unwrap();
        assert!(s.norm() < 1e-12);
        let s = complex_power(
            &[Phasor::new(1.0, 0.0), Phasor::ZERO, Phasor::ZERO],
            &[Phasor::new(2.0, 0.0), Phasor::new(-1.0, 0.0), Phasor::new(-1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(s, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn complex_power_rejects_kcl_violation_and_shape() {
        let e = complex_power(&[Phasor::ZERO; 2], &[Phasor::new(1.0, 0.0), Phasor::new(-0.9, 0.0)]).unwrap_err();
        assert!(e.to_string().contains("KCL"), "{e}");
        assert!(complex_power(&[Phasor::ZERO; 2], &[Phasor::ZERO; 3]).is_err());
        assert!(complex_power(&[Phasor::ZERO], &[Phasor::ZERO]).is_err());
    }

    #[test]
    fn reduced_voltage_examples() {
        let v = p(3.0, 0.4);
        assert!(reduced_voltage(v, v, v).magnitude() < 1e-15);
        let vr = reduced_voltage(p(37.14, -0.89), p(37.13, 0.15), Phasor::ZERO);
        assert!((vr.magnitude() - 64.19).abs() < 0.01, "{vr}");
        assert!((vr.phase() + 1.4171).abs() < 1e-3, "{vr}");
    }

    #[test]
    fn resistive_star_reduces_to_its_power() {
        let r = 0.01;
        let i = balanced_drive(100.0, 0.3).unwrap();
        // star with common point floating: node potentials R I_k, referenced to terminal 3
        let v = i.map(|ik| ik.scale(r) - i[2].scale(r));
        let m = reduce(&report(v, i), false).unwrap();
        let star: f64 = i.iter().map(|ik| 0.5 * r * ik.magnitude().powi(2)).sum();
        let planned = predict_power(&m, 100.0).unwrap();
        assert!((planned / star - 1.0).abs() < 1e-12, "{planned} vs {star}");
        assert!((m.impedance().re() - 3.0 * r).abs() < 1e-14);
    }

    #[test]
    fn reduce_errors() {
        let i = balanced_drive(100.0, 0.0).unwrap();
        let zero = [Phasor::ZERO, i[1], i[2]];
        assert!(reduce(&report([p(1.0, 0.0); 3], zero), false).is_err());
        let mut two = report([p(1.0, 0.0); 3], i);
        two.terminals.pop();
        assert!(reduce(&two, false).unwrap_err().to_string().contains("3 terminals"));
        // Re(Z) < 0
        let v = [p(1.0, 0.0).scale(-1.0), Phasor::ZERO, Phasor::ZERO];
        let rep = report(v, i);
        assert!(reduce(&rep, false).unwrap_err().to_string().contains("passive"));
        let m = reduce(&rep, true).unwrap();
        assert!(!m.is_passive());
        assert!(required_current(&m, 1.0).is_err());
    }

    #[test]
    fn planner_examples() {
        let m = ReducedModel::from_impedance(Phasor::new(0.02, 0.0), 50.0, "test").unwrap();
        assert_eq!(predict_power(&m, 0.0).unwrap(), 0.0);
        assert_eq!(required_current(&m, 0.0).unwrap(), 0.0);
        assert!((predict_power(&m, 3162.28).unwrap() - 100_000.0).abs() < 1.0);
        let p1 = predict_power(&m, 1234.5).unwrap();
        assert_eq!(predict_power(&m, 2469.0).unwrap(), 4.0 * p1);
        assert!(predict_power(&m, -1.0).is_err());
        assert!(required_current(&m, f64::NAN).is_err());
    }

    #[test]
    fn curve_samples() {
        let m = ReducedModel::from_impedance(p(0.0206, 0.01), 50.0, "test").unwrap();
        let c = characteristic_curve(&m, 0.0, 4500.0, 10).unwrap();
        assert_eq!(c.samples.len(), 10);
        assert_eq!(c.samples[0].0, 0.0);
        assert_eq!(c.samples[9].0, 4500.0);
        for w in c.samples.windows(2) {
            assert!(w[1].0 > w[0].0 && w[1].1 > w[0].1);
        }
        for (i, pw) in &c.samples {
            assert_eq!(*pw, 0.5 * m.impedance().re() * i * i);
        }
        let two = characteristic_curve(&m, 10.0, 20.0, 2).unwrap();
        assert_eq!(two.samples.iter().map(|s| s.0).collect::<Vec<_>>(), vec![10.0, 20.0]);
        let csv = two.to_csv();
        assert!(csv.starts_with("I_amp_A,P_watts\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(characteristic_curve(&m, 5.0, 5.0, 3).is_err());
        assert!(characteristic_curve(&m, 0.0, 5.0, 1).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let m = ReducedModel::from_impedance(p(0.0206, 0.044), 50.0, "plant measurement").unwrap();
        let text = m.to_json();
        assert!(text.contains("\"Z_R\"") && text.contains("\"provenance\"") && text.contains("\"frequency_hz\""));
        let back = ReducedModel::from_json(&text).unwrap();
        assert!((back.impedance().0 - m.impedance().0).norm() < 1e-15);
        assert_eq!(back.provenance(), "plant measurement");
        assert!(ReducedModel::from_json(&text.replace("50.0", "-50.0")).is_err());
        assert!(ReducedModel::from_json("{}").is_err());
    }
}
