//! Complex amplitudes of time-harmonic quantities.
//!
//! A physical signal `f(t)` is represented by the phasor `F` with
//! `f(t) = Re[F e^{iωt}]`, so magnitudes are peak values and every power
//! formula carries an explicit factor ½.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 120° in radians.
pub const PHASE_SHIFT_120: f64 = 2.0 * PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Phasor(pub Complex64);

/// Polar serialization form `{mag, phase}` used by the report and reduced-model files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polar {
    pub mag: f64,
    pub phase: f64,
}

impl Phasor {
    pub const ZERO: Phasor = Phasor(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        Phasor(Complex64::new(re, im))
    }

    /// Builds a phasor from a peak magnitude and a phase in radians.
    pub fn from_polar(magnitude: f64, phase: f64) -> Result<Self> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() {
            return Err(Error::invalid(
                "magnitude",
                format!("must be finite and >= 0, got {magnitude}"),
            ));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", format!("must be finite, got {phase}")));
        }
        Ok(Phasor(Complex64::new(magnitude * phase.cos(), magnitude * phase.sin())))
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn magnitude(self) -> f64 {
        self.0.norm()
    }

    /// Phase in (−π, π].
    pub fn phase(self) -> f64 {
        normalize_phase(self.0.im.atan2(self.0.re))
    }

    pub fn conj(self) -> Self {
        Phasor(self.0.conj())
    }

    pub fn scale(self, factor: f64) -> Self {
        Phasor(self.0 * factor)
    }

    /// Rotates by `angle` radians.
    pub fn rotate(self, angle: f64) -> Self {
        Phasor(self.0 * Complex64::from_polar(1.0, angle))
    }

    pub fn to_polar(self) -> Polar {
        Polar {
            mag: self.magnitude(),
            phase: self.phase(),
        }
    }
}

impl From<Complex64> for Phasor {
    fn from(c: Complex64) -> Self {
        Phasor(c)
    }
}

impl From<Phasor> for Complex64 {
    fn from(p: Phasor) -> Self {
        p.0
    }
}

impl TryFrom<Polar> for Phasor {
    type Error = Error;

    fn try_from(p: Polar) -> Result<Self> {
        Phasor::from_polar(p.mag, p.phase)
    }
}

impl Add for Phasor {
    type Output = Phasor;
    fn add(self, rhs: Phasor) -> Phasor {
        Phasor(self.0 + rhs.0)
    }
}

impl Sub for Phasor {
    type Output = Phasor;
    fn sub(self, rhs: Phasor) -> Phasor {
        Phasor(self.0 - rhs.0)
    }
}

impl Mul for Phasor {
    type Output = Phasor;
    fn mul(self, rhs: Phasor) -> Phasor {
        Phasor(self.0 * rhs.0)
    }
}

impl Div for Phasor {
    type Output = Phasor;
    fn div(self, rhs: Phasor) -> Phasor {
        Phasor(self.0 / rhs.0)
    }
}

impl Neg for Phasor {
    type Output = Phasor;
    fn neg(self) -> Phasor {
        Phasor(-self.0)
    }
}

impl fmt::Display for Phasor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}∠{} rad", self.magnitude(), self.phase())
    }
}

/// Maps an angle onto (−π, π].
pub fn normalize_phase(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Balanced three-phase currents `(I_1, I_1 e^{i2π/3}, I_1 e^{−i2π/3})` with `|I_1| = amplitude`.
pub fn balanced_drive(amplitude: f64, base_phase: f64) -> Result<[Phasor; 3]> {
    let i1 = Phasor::from_polar(amplitude, base_phase)?;
    Ok([i1, i1.rotate(PHASE_SHIFT_120), i1.rotate(-PHASE_SHIFT_120)])
}
