//! Closed-form and 1D reference solutions for a straight round rod.
//!
//! Current enters one end cap and leaves the other; with the tangential
//! vector potential fixed on the lateral surface only the internal
//! impedance of the rod is seen, which is what [`ac_rod_internal_impedance`]
//! returns.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Geometry, material and angular frequency of a test rod.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodSpec {
    pub length: f64,
    pub radius: f64,
    pub sigma: f64,
    pub mu: f64,
    pub omega: f64,
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {x}")))
    }
}

impl RodSpec {
    pub fn new(length: f64, radius: f64, sigma: f64, mu: f64, omega: f64) -> Result<Self> {
        positive("length", length)?;
        positive("radius", radius)?;
        positive("sigma", sigma)?;
        positive("mu", mu)?;
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::invalid("omega", format!("must be finite and >= 0, got {omega}")));
        }
        Ok(Self {
            length,
            radius,
            sigma,
            mu,
            omega,
        })
    }

    /// Same rod at the frequency giving `radius / δ = ratio`.
    pub fn at_skin_ratio(self, ratio: f64) -> Result<Self> {
        positive("ratio", ratio)?;
        let delta = self.radius / ratio;
        Ok(Self {
            omega: 2.0 / (self.mu * self.sigma * delta * delta),
            ..self
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    /// `radius / δ`, 0 at DC.
    pub fn skin_ratio(&self) -> f64 {
        self.radius * (0.5 * self.omega * self.mu * self.sigma).sqrt()
    }

    /// `k a` with `k = sqrt(−iωμσ) = (1 − i)/δ`.
    fn ka(&self) -> Complex64 {
        let x = self.skin_ratio();
        Complex64::new(x, -x)
    }
}

/// `δ = sqrt(2 / (ωμσ))`.
pub fn skin_depth(sigma: f64, mu: f64, omega: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    positive("mu", mu)?;
    positive("omega", omega)?;
    Ok((2.0 / (omega * mu * sigma)).sqrt())
}

/// `R = L / (σ π a²)`.
pub fn dc_rod_resistance(rod: &RodSpec) -> f64 {
    rod.length / (rod.sigma * PI * rod.radius * rod.radius)
}

/// Largest `|z|` evaluated by the power series; beyond it the Hankel
/// expansion is used.
pub const SERIES_LIMIT: f64 = 25.0;

/// `J_n(z)` for n = 0, 1 by the ascending series, summed until the term
/// falls below 1e-17 of the running maximum term. For `|z| ≤ 25` on the
/// ray `arg z = −π/4` cancellation costs at most ~e^{0.41|z|} ≈ 3e4, so the
/// result keeps about 11 significant digits.
fn bessel_series(n: u32, z: Complex64) -> Complex64 {
    let q = -0.25 * z * z;
    let mut term = if n == 0 { Complex64::new(1.0, 0.0) } else { 0.5 * z };
    let mut sum = term;
    let mut biggest = term.norm();
    for m in 1..400 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        biggest = biggest.max(term.norm());
        if term.norm() < 1e-17 * biggest {
            break;
        }
    }
    sum
}

/// `J_0(z) / J_1(z)` for `|z| > SERIES_LIMIT`, `Im z < 0`, where
/// `J_n ≈ H⁽¹⁾_n / 2` up to a relative error of order `e^{−2|Im z|}`. Hankel
/// expansion truncated at its smallest term.
fn bessel_ratio_asymptotic(z: Complex64) -> Complex64 {
    let sum = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let i = Complex64::i();
        let mut term = Complex64::new(1.0, 0.0);
        let mut total = term;
        for k in 1..30 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            let next = term * i * (mu - odd * odd) / (8.0 * kf * z);
            if next.norm() >= term.norm() {
                break;
            }
            term = next;
            total += term;
        }
        total
    };
    // H_0 / H_1 = e^{iπ/2} P_0 / P_1
    Complex64::i() * sum(0.0) / sum(1.0)
}

/// `J_0(z) / J_1(z)` for `arg z = −π/4`.
fn bessel_ratio(z: Complex64) -> Complex64 {
    if z.norm() <= SERIES_LIMIT {
        bessel_series(0, z) / bessel_series(1, z)
    } else {
        bessel_ratio_asymptotic(z)
    }
}

/// Internal impedance `Z = L k J_0(ka) / (2π a σ J_1(ka))`. At DC this is
/// [`dc_rod_resistance`].
pub fn ac_rod_internal_impedance(rod: &RodSpec) -> Complex64 {
    let r_dc = dc_rod_resistance(rod);
    let ka = rod.ka();
    if ka.norm() < 1e-8 {
        return Complex64::new(r_dc, 0.0);
    }
    // Z / R_dc = (ka / 2) J0(ka) / J1(ka)
    r_dc * 0.5 * ka * bessel_ratio(ka)
}

/// Current density at radius `r` relative to the axis, `J_0(k r)`.
/// Restricted to `r·|k| ≤ SERIES_LIMIT`.
pub fn rod_current_profile(rod: &RodSpec, r: f64) -> Result<Complex64> {
    if !(0.0..=rod.radius).contains(&r) {
        return Err(Error::invalid("r", format!("must lie in [0, {}], got {r}", rod.radius)));
    }
    let kr = rod.ka() * (r / rod.radius);
    if kr.norm() > SERIES_LIMIT {
        return Err(Error::invalid(
            "r",
            format!("|kr| = {} exceeds the series range", kr.norm()),
        ));
    }
    Ok(bessel_series(0, kr))
}

/// Internal impedance from a finite-volume discretization of
/// `(1/r)(r J')' = iωμσ J` on `n` uniform radial cells with `J(a) = 1`,
/// `Z = L / (σ ∫ 2π r J dr)`.
pub fn fd_rod_internal_impedance(rod: &RodSpec, n: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::invalid("n", format!("at least 2 cells required, got {n}")));
    }
    let a = rod.radius;
    let h = a / n as f64;
    let s = Complex64::new(0.0, rod.omega * rod.mu * rod.sigma);
    // control volumes ∫ r dr around node i = 0..n
    let vol = |i: usize| -> f64 {
        let lo = if i == 0 { 0.0 } else { (i as f64 - 0.5) * h };
        let hi = if i == n { a } else { (i as f64 + 0.5) * h };
        0.5 * (hi * hi - lo * lo)
    };
    // unknowns J_0..J_{n-1}; row i: -r_{i-½} J_{i-1} + (r_{i-½} + r_{i+½} + s h V_i) J_i - r_{i+½} J_{i+1} = 0
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    let mut sup = vec![Complex64::new(0.0, 0.0); n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let rm = if i == 0 { 0.0 } else { (i as f64 - 0.5) * h };
        let rp = (i as f64 + 0.5) * h;
        sub[i] = Complex64::new(-rm, 0.0);
        diag[i] = Complex64::new(rm + rp, 0.0) + s * h * vol(i);
        if i + 1 < n {
            sup[i] = Complex64::new(-rp, 0.0);
        } else {
            rhs[i] = Complex64::new(rp, 0.0);
        }
    }
    // Thomas elimination
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] = rhs[i] - w * rhs[i - 1];
    }
    let mut j = vec![Complex64::new(0.0, 0.0); n + 1];
    j[n] = Complex64::new(1.0, 0.0);
    j[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        j[i] = (rhs[i] - sup[i] * j[i + 1]) / diag[i];
    }
    let current: Complex64 = (0..=n).map(|i| 2.0 * PI * vol(i) * j[i]).sum();
    Ok(rod.length / (rod.sigma * current))
}

/// Richardson extrapolation of [`fd_rod_internal_impedance`] from `n` and
/// `2n` cells, assuming second-order convergence.
pub fn fd_rod_impedance_extrapolated(rod: &RodSpec, n: usize) -> Result<Complex64> {
    let coarse = fd_rod_internal_impedance(rod, n)?;
    let fine = fd_rod_internal_impedance(rod, 2 * n)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Leading terms of the large-`a/δ` resistance ratio, `a/(2δ) + 1/4`.
pub fn asymptotic_resistance_ratio(skin_ratio: f64) -> f64 {
    0.5 * skin_ratio + 0.25
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MU_0;

    fn rod() -> RodSpec {
        RodSpec::new(1.0, 0.01, 1e6, MU_0, 0.0).unwrap()
    }

    fn ratio(r: &RodSpec, z: Complex64) -> Complex64 {
        z / dc_rod_resistance(r)
    }

    #[test]
    fn skin_depth_examples() {
        let d = skin_depth(5.8e7, MU_0, 2.0 * PI * 50.0).unwrap();
        assert!((d - 9.35e-3).abs() < 0.01e-3, "{d}");
        let d4 = skin_depth(5.8e7, MU_0, 8.0 * PI * 50.0).unwrap();
        assert!((d4 / d - 0.5).abs() < 1e-14);
        let mut last = f64::INFINITY;
        for e in 0..12 {
            let d = skin_depth(10f64.powi(e), MU_0, 1.0).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(skin_depth(0.0, MU_0, 1.0).is_err());
        assert!(skin_depth(1.0, MU_0, -1.0).is_err());
    }

    #[test]
    fn dc_resistance_examples() {
        let r = rod();
        assert!((dc_rod_resistance(&r) - 3.1831e-3).abs() < 1e-7);
        let long = RodSpec { length: 2.0, ..r };
        assert!((dc_rod_resistance(&long) / dc_rod_resistance(&r) - 2.0).abs() < 1e-14);
        let fat = RodSpec { radius: 0.02, ..r };
        assert!((dc_rod_resistance(&fat) / dc_rod_resistance(&r) - 0.25).abs() < 1e-14);
        assert!(RodSpec::new(1.0, 0.0, 1.0, MU_0, 0.0).is_err());
        assert!(RodSpec::new(1.0, 1.0, 1.0, MU_0, -1.0).is_err());
    }

    #[test]
    fn skin_ratio_round_trip() {
        let r = rod().at_skin_ratio(2.0).unwrap();
        assert!((r.skin_ratio() - 2.0).abs() < 1e-12);
        let d = skin_depth(r.sigma, r.mu, r.omega).unwrap();
        assert!((r.radius / d - 2.0).abs() < 1e-12);
        // f = 1 / (π μ σ δ²) with δ = 5 mm
        assert!((r.frequency_hz() - 1.0 / (PI * MU_0 * 1e6 * 2.5e-5)).abs() < 1e-6);
    }

    #[test]
    fn series_matches_known_values() {
        // J0(1) and J1(1)
        assert!((bessel_series(0, Complex64::new(1.0, 0.0)).re - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_series(1, Complex64::new(1.0, 0.0)).re - 0.440_050_585_744_933_5).abs() < 1e-15);
        // first zero of J0
        assert!(bessel_series(0, Complex64::new(2.404_825_557_695_773, 0.0)).norm() < 1e-14);
        // ber(2) + i bei(2) = J0(2 e^{3πi/4}) = J0(2 e^{−πi/4})
        let kelvin = bessel_series(0, Complex64::from_polar(2.0, -PI / 4.0));
        assert!((kelvin.re - 0.751_734_182_6).abs() < 1e-9, "{kelvin}");
        assert!((kelvin.im - 0.972_291_627_2).abs() < 1e-9, "{kelvin}");
    }

    #[test]
    fn dc_limit() {
        let r = rod().at_skin_ratio(0.01).unwrap();
        let z = ratio(&r, ac_rod_internal_impedance(&r));
        assert!((z.re - 1.0).abs() < 1e-4, "{z}");
        assert_eq!(
            ac_rod_internal_impedance(&rod()),
            Complex64::new(dc_rod_resistance(&rod()), 0.0)
        );
    }

    #[test]
    fn series_agrees_with_radial_finite_differences() {
        for x in [0.01, 0.3, 1.0, 2.0, 3.5, 6.0, 10.0] {
            let r = rod().at_skin_ratio(x).unwrap();
            let series = ac_rod_internal_impedance(&r);
            let fd = fd_rod_impedance_extrapolated(&r, 800).unwrap();
            let rel = (series - fd).norm() / series.norm();
            assert!(rel < 1e-3, "a/δ = {x}: series {series} fd {fd}");
            assert!((series.re - fd.re).abs() < 1e-3 * series.re, "a/δ = {x}");
        }
    }

    #[test]
    fn two_skin_depths() {
        let r = rod().at_skin_ratio(2.0).unwrap();
        let z = ratio(&r, ac_rod_internal_impedance(&r));
        assert!((z.re - 1.26464).abs() < 1e-4, "{z}");
        assert!((z.im - 0.87048).abs() < 1e-4, "{z}");
    }

    #[test]
    fn asymptotic_regime() {
        for x in [20.0, 40.0] {
            let r = rod().at_skin_ratio(x).unwrap();
            let z = ratio(&r, ac_rod_internal_impedance(&r));
            let asym = asymptotic_resistance_ratio(x);
            assert!((z.re / asym - 1.0).abs() < 0.02, "a/δ = {x}: {z} vs {asym}");
        }
        // series and Hankel branches meet continuously at the switch
        let below = rod().at_skin_ratio(SERIES_LIMIT / 2f64.sqrt() * (1.0 - 1e-9)).unwrap();
        let above = rod().at_skin_ratio(SERIES_LIMIT / 2f64.sqrt() * (1.0 + 1e-9)).unwrap();
        let (zb, za) = (ac_rod_internal_impedance(&below), ac_rod_internal_impedance(&above));
        assert!((zb - za).norm() < 1e-8 * zb.norm(), "{zb} vs {za}");
    }

    #[test]
    fn resistance_grows_and_reactance_is_inductive() {
        let r_dc = dc_rod_resistance(&rod());
        let mut last = 0.0;
        for k in 0..=400 {
            let x = 0.01 * 1.02f64.powi(k);
            let r = rod().at_skin_ratio(x).unwrap();
            let z = ac_rod_internal_impedance(&r);
            assert!(z.re >= r_dc * (1.0 - 1e-12), "a/δ = {x}");
            assert!(z.re >= last * (1.0 - 1e-12), "a/δ = {x}");
            assert!(z.im >= 0.0, "a/δ = {x}");
            last = z.re;
        }
    }

    #[test]
    fn current_crowds_towards_the_surface() {
        let r = rod().at_skin_ratio(2.0).unwrap();
        assert_eq!(rod_current_profile(&r, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let mut last = 0.0;
        for i in 0..=10 {
            let m = rod_current_profile(&r, 0.001 * i as f64).unwrap().norm();
            assert!(m >= last);
            last = m;
        }
        assert!(rod_current_profile(&r, 0.011).is_err());
    }
}
