//! Post-processing of a [`FieldSolution`]: elementwise J and B, Joule power,
//! terminal currents and complex power, field-file export.
//!
//! Integral quantities are evaluated with the element matrices used in
//! assembly, so they are exact for the discrete fields and consistent with
//! the weak form: `Re(S)` and the Joule power agree up to the solver residual.

mod report;
mod vtk;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fem::FieldSolution;
use crate::phasor::Phasor;

pub use report::{TerminalEntry, TerminalReport};
pub use vtk::{export_vtk, write_vtk};

pub type CVec3 = [Complex64; 3];

/// Elementwise-constant fields, one entry per tet.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    /// Current density at the centroid, A/m²; zero on dielectric tets.
    pub j: Vec<CVec3>,
    /// Flux density `curl A`, T.
    pub b: Vec<CVec3>,
    /// `B / μ`, A/m.
    pub h: Vec<CVec3>,
    /// `|J|² / (2σ)` at the centroid, W/m³.
    pub joule_density: Vec<f64>,
}

fn zero3() -> CVec3 {
    [Complex64::new(0.0, 0.0); 3]
}

/// Edge coefficients (global orientation) and node potentials of tet `t`.
/// The element matrices carry the orientation signs.
fn local_values(sol: &FieldSolution, t: usize) -> ([Complex64; 6], [Complex64; 4]) {
    let disc = sol.discretization();
    let a = disc.edges.tet_edges(t).map(|e| sol.edge_coefficients()[e]);
    let v = disc.mesh.tets()[t].vertices.map(|n| sol.node_potentials()[n]);
    (a, v)
}

fn tet_fields(sol: &FieldSolution, t: usize) -> (CVec3, CVec3, f64) {
    let disc = sol.discretization();
    let g = crate::fem::TetGeometry::new(&disc.mesh.tet_points(t));
    let signs = disc.edges.tet_signs(t);
    let (a, v) = local_values(sol, t);
    let curls = g.edge_curls();
    let w = g.edge_values([0.25; 4]);
    let mut b = zero3();
    let mut a_c = zero3();
    for k in 0..6 {
        let ak = a[k] * signs[k];
        for d in 0..3 {
            b[d] += ak * curls[k][d];
            a_c[d] += ak * w[k][d];
        }
    }
    let sigma = disc.sigma(t);
    if sigma == 0.0 {
        return (zero3(), b, 0.0);
    }
    let mut grad_v = zero3();
    for (n, vn) in v.iter().enumerate() {
        for d in 0..3 {
            grad_v[d] += vn * g.grads[n][d];
        }
    }
    let iw = Complex64::new(0.0, sol.omega());
    let j: CVec3 = std::array::from_fn(|d| -sigma * (iw * a_c[d] + grad_v[d]));
    let density = j.iter().map(|c| c.norm_sqr()).sum::<f64>() / (2.0 * sigma);
    (j, b, density)
}

/// Centroid values of J, B, H and the Joule density on every tet.
pub fn element_fields(sol: &FieldSolution) -> ElementField {
    let disc = sol.discretization();
    let per_tet: Vec<(CVec3, CVec3, f64)> = (0..disc.mesh.tets().len())
        .into_par_iter()
        .map(|t| tet_fields(sol, t))
        .collect();
    let mut out = ElementField {
        j: Vec::with_capacity(per_tet.len()),
        b: Vec::with_capacity(per_tet.len()),
        h: Vec::with_capacity(per_tet.len()),
        joule_density: Vec::with_capacity(per_tet.len()),
    };
    for (t, (j, b, p)) in per_tet.into_iter().enumerate() {
        let nu = disc.nu(t);
        out.h.push(b.map(|c| c * nu));
        out.j.push(j);
        out.b.push(b);
        out.joule_density.push(p);
    }
    out
}

/// `½ ∫ σ |iωA + ∇V|² dV` of tet `t`, integrated exactly.
fn tet_joule(sol: &FieldSolution, t: usize) -> f64 {
    let disc = sol.discretization();
    if disc.sigma(t) == 0.0 {
        return 0.0;
    }
    let blocks = disc.element_blocks(t);
    let (a, v) = local_values(sol, t);
    let omega = sol.omega();
    let iw = Complex64::new(0.0, omega);
    // with u = V / iω the integrand is ω² σ |A + ∇u|²
    let u = v.map(|x| x / iw);
    let mut q = 0.0;
    for p in 0..6 {
        for r in 0..6 {
            q += blocks.m[p][r] * (a[p].conj() * a[r]).re;
        }
        for n in 0..4 {
            q += 2.0 * blocks.c[p][n] * (a[p].conj() * u[n]).re;
        }
    }
    for m in 0..4 {
        for n in 0..4 {
            q += blocks.l[m][n] * (u[m].conj() * u[n]).re;
        }
    }
    0.5 * omega * omega * q
}

/// Time-averaged Joule power in all conductors, W.
pub fn joule_power(sol: &FieldSolution) -> f64 {
    let disc = sol.discretization();
    let parts: Vec<f64> = disc
        .partition
        .conductor_tets
        .par_iter()
        .map(|&t| tet_joule(sol, t))
        .collect();
    parts.iter().sum()
}

/// Joule power in the tets listed in `tets` (for example the heater region), W.
pub fn joule_power_in(sol: &FieldSolution, tets: &[usize]) -> f64 {
    let parts: Vec<f64> = tets.par_iter().map(|&t| tet_joule(sol, t)).collect();
    parts.iter().sum()
}

/// Currents entering every terminal (ground included), from the volume
/// lift `I_k = ∫ σ (iωA + ∇V) · ∇w_k dV`.
pub fn terminal_currents(sol: &FieldSolution) -> Vec<Phasor> {
    let disc = sol.discretization();
    let n_term = disc.partition.n_terminals();
    let mut terminal_of = vec![usize::MAX; disc.mesh.n_vertices()];
    for (k, nodes) in disc.partition.terminal_nodes.iter().enumerate() {
        for &n in nodes {
            terminal_of[n] = k;
        }
    }
    let iw = Complex64::new(0.0, sol.omega());
    let contributions: Vec<Vec<(usize, Complex64)>> = disc
        .partition
        .conductor_tets
        .par_iter()
        .map(|&t| {
            let verts = disc.mesh.tets()[t].vertices;
            if verts.iter().all(|v| terminal_of[*v] == usize::MAX) {
                return Vec::new();
            }
            let blocks = disc.element_blocks(t);
            let (a, v) = local_values(sol, t);
            let u = v.map(|x| x / iw);
            let mut out = Vec::new();
            for (n, vert) in verts.iter().enumerate() {
                let k = terminal_of[*vert];
                if k == usize::MAX {
                    continue;
                }
                let mut s = Complex64::new(0.0, 0.0);
                for p in 0..6 {
                    s += blocks.c[p][n] * a[p];
                }
                for m in 0..4 {
                    s += blocks.l[n][m] * u[m];
                }
                out.push((k, iw * s));
            }
            out
        })
        .collect();
    let mut currents = vec![Complex64::new(0.0, 0.0); n_term];
    for (k, c) in contributions.into_iter().flatten() {
        currents[k] += c;
    }
    currents.into_iter().map(Phasor).collect()
}

/// Terminal voltages, recomputed currents, complex power and Joule power.
pub fn terminal_report(sol: &FieldSolution) -> TerminalReport {
    let voltages = sol.terminal_voltages();
    let currents = terminal_currents(sol);
    let s: Complex64 = voltages
        .iter()
        .zip(&currents)
        .map(|(v, i)| 0.5 * v.0 * i.0.conj())
        .sum();
    TerminalReport {
        frequency_hz: sol.drive().frequency_hz(),
        terminals: voltages
            .iter()
            .zip(currents)
            .map(|(v, i)| TerminalEntry { v: *v, i })
            .collect(),
        s,
        p_h: joule_power(sol),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::config::DriveSpec;
    use crate::fem::testing::{rod_disc, star_disc};
    use crate::fem::{solve_fields, SolverKind, SolverOptions};

    fn dc_rod() -> FieldSolution {
        let disc = Arc::new(rod_disc(2, 8, 16, 1.0, 0.01, 1e6));
        let drive = DriveSpec::new(0.01, vec![Phasor::new(100.0, 0.0)]).unwrap();
        solve_fields(disc, &drive, &SolverOptions::default()).unwrap()
    }

    fn star(seed: u64, drive: &DriveSpec) -> FieldSolution {
        solve_fields(Arc::new(star_disc(seed)), drive, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn dc_rod_current_density_and_power() {
        let sol = dc_rod();
        let f = element_fields(&sol);
        let j0 = 100.0 / (PI * 1e-4);
        for j in &f.j {
            let mag = j.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((mag / j0 - 1.0).abs() < 0.02, "{mag} vs {j0}");
        }
        let r = 1.0 / (1e6 * PI * 1e-4);
        let p = joule_power(&sol);
        assert!((p / (0.5 * 100.0 * 100.0 * r) - 1.0).abs() < 0.02);
        assert!(f.joule_density.iter().all(|d| *d >= 0.0));
    }

    #[test]
    fn dc_rod_report() {
        let sol = dc_rod();
        let rep = terminal_report(&sol);
        let r = 1.0 / (1e6 * PI * 1e-4);
        assert!((rep.terminals[0].v.magnitude() / (100.0 * r) - 1.0).abs() < 0.02);
        assert!(rep.terminals[0].v.phase().abs() < 1e-3);
        assert!((rep.terminals[1].i.0 + Complex64::new(100.0, 0.0)).norm() < 1e-6);
        assert_eq!(rep.terminals[1].v, Phasor::ZERO);
        assert!((rep.s.re - rep.p_h).abs() <= 1e-6 * rep.p_h);
    }

    #[test]
    fn star_balance_kcl_and_prescribed_currents() {
        let drive = DriveSpec::balanced(50.0, 1000.0, 0.4).unwrap();
        let sol = star(0, &drive);
        let rep = terminal_report(&sol);
        assert!(
            (rep.s.re - rep.p_h).abs() <= 1e-6 * rep.p_h,
            "{} vs {}",
            rep.s.re,
            rep.p_h
        );
        let imax = rep.terminals.iter().map(|t| t.i.magnitude()).fold(0.0, f64::max);
        let sum: Complex64 = rep.terminals.iter().map(|t| t.i.0).sum();
        assert!(sum.norm() <= 1e-8 * imax);
        for (k, i) in drive.terminal_currents().iter().enumerate() {
            assert!((rep.terminals[k].i.0 - i.0).norm() <= 1e-8 * i.magnitude());
        }
        // the floating load picks up eddy currents and losses
        let load = &sol.discretization().partition.components[1].tets;
        assert!(joule_power_in(&sol, load) > 0.0);
        let f = element_fields(&sol);
        for t in &sol.discretization().partition.dielectric_tets {
            assert!(f.j[*t].iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn gauge_seed_does_not_change_observables() {
        let drive = DriveSpec::balanced(50.0, 1000.0, 0.0).unwrap();
        let a = star(0, &drive);
        let b = star(12345, &drive);
        assert_ne!(
            a.discretization().dofmap.tree_edges(),
            b.discretization().dofmap.tree_edges()
        );
        let (ra, rb) = (terminal_report(&a), terminal_report(&b));
        assert!((ra.p_h - rb.p_h).abs() <= 1e-8 * ra.p_h);
        for (x, y) in ra.terminals.iter().zip(&rb.terminals) {
            assert!((x.v.0 - y.v.0).norm() <= 1e-8 * x.v.magnitude().max(1e-300));
        }
        let (fa, fb) = (element_fields(&a), element_fields(&b));
        let jmax = fa.j.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        for (x, y) in fa.j.iter().zip(&fb.j) {
            for d in 0..3 {
                assert!((x[d] - y[d]).norm() <= 1e-8 * jmax);
            }
        }
    }

    #[test]
    fn quadratic_power_scaling_and_zero_drive() {
        let drive = DriveSpec::balanced(50.0, 100.0, 0.0).unwrap();
        let alpha = Complex64::from_polar(2.5, -1.1);
        let p1 = joule_power(&star(0, &drive));
        let p2 = joule_power(&star(0, &drive.scaled(alpha)));
        assert!((p2 / (p1 * alpha.norm_sqr()) - 1.0).abs() < 1e-8);
        let zero = drive.scaled(Complex64::new(0.0, 0.0));
        let rep = terminal_report(&star(0, &zero));
        assert_eq!(rep.p_h, 0.0);
        assert!(rep
            .terminals
            .iter()
            .all(|t| t.v.magnitude() == 0.0 && t.i.magnitude() == 0.0));
    }

    #[test]
    fn iterative_balance_within_solver_tolerance() {
        let drive = DriveSpec::balanced(50.0, 1000.0, 0.0).unwrap();
        let opts = SolverOptions {
            kind: SolverKind::Iterative,
            tol: 1e-10,
            ..Default::default()
        };
        let sol = solve_fields(Arc::new(star_disc(0)), &drive, &opts).unwrap();
        let rep = terminal_report(&sol);
        assert!((rep.s.re - rep.p_h).abs() <= 10.0 * opts.tol * rep.p_h);
    }
}
