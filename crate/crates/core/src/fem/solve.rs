use std::sync::Arc;

use num_complex::Complex64;

use super::assemble::{assemble, AssemblyMode, Discretization, LinearSystem};
use super::dofmap::NodeDof;
use super::krylov::cocg;
use super::ldl::{nested_dissection, LdlFactor};
use super::sparse::relative_residual;
use crate::config::DriveSpec;
use crate::error::{Error, Result};
use crate::phasor::Phasor;

/// Systems with more unknowns than this go to the iterative solver under
/// [`SolverKind::Auto`].
pub const DIRECT_DOF_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Direct up to [`DIRECT_DOF_LIMIT`] unknowns, iterative above.
    #[default]
    Auto,
    /// Sparse `L D Lᵀ` with nested-dissection ordering and iterative refinement.
    Direct,
    /// Jacobi-scaled COCG.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Bound on `‖Ax − b‖ / ‖b‖`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Refinement sweeps after a direct solve.
    pub refinement_steps: usize,
    pub assembly: AssemblyMode,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::Auto,
            tol: 1e-10,
            max_iterations: 10_000,
            refinement_steps: 3,
            assembly: AssemblyMode::Deterministic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    /// Strategy actually used (never `Auto`).
    pub kind: SolverKind,
    pub n_dofs: usize,
    /// Stored entries of `L` (direct) or 0.
    pub factor_nnz: usize,
    /// Krylov iterations or refinement sweeps.
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `system` according to `options`.
pub fn solve(system: &LinearSystem, options: &SolverOptions) -> Result<(Vec<Complex64>, SolveStats)> {
    if !(options.tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {}", options.tol)));
    }
    let n = system.matrix.n();
    let kind = match options.kind {
        SolverKind::Auto if n > DIRECT_DOF_LIMIT => SolverKind::Iterative,
        SolverKind::Auto => SolverKind::Direct,
        k => k,
    };
    if system.rhs.iter().all(|b| b.norm() == 0.0) {
        let stats = SolveStats {
            kind,
            n_dofs: n,
            factor_nnz: 0,
            iterations: 0,
            relative_residual: 0.0,
        };
        return Ok((vec![Complex64::new(0.0, 0.0); n], stats));
    }
    match kind {
        SolverKind::Iterative => {
            let (x, out) = cocg(&system.matrix, &system.rhs, options.tol, options.max_iterations)?;
            let stats = SolveStats {
                kind,
                n_dofs: n,
                factor_nnz: 0,
                iterations: out.iterations,
                relative_residual: out.relative_residual,
            };
            Ok((x, stats))
        }
        _ => {
            let order = nested_dissection(&system.matrix, &system.coordinates);
            let factor = LdlFactor::factorize(&system.matrix, order)?;
            let a = &system.matrix;
            let mut x = factor.solve(&system.rhs);
            let mut res = relative_residual(a, &x, &system.rhs);
            let mut sweeps = 0;
            while sweeps < options.refinement_steps && res > 1e-14 {
                let ax = a.mul_vec(&x);
                let r: Vec<Complex64> = system.rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
                let dx = factor.solve(&r);
                let cand: Vec<Complex64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
                let cand_res = relative_residual(a, &cand, &system.rhs);
                sweeps += 1;
                if cand_res >= res {
                    break;
                }
                x = cand;
                res = cand_res;
            }
            if !(res <= options.tol) {
                return Err(Error::Solve {
                    reason: "direct solve missed the residual tolerance".into(),
                    iterations: sweeps,
                    residual: res,
                });
            }
            let stats = SolveStats {
                kind,
                n_dofs: n,
                factor_nnz: factor.nnz(),
                iterations: sweeps,
                relative_residual: res,
            };
            Ok((x, stats))
        }
    }
}

/// Solved potentials on a discretization. Immutable; cheap to share.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    disc: Arc<Discretization>,
    drive: DriveSpec,
    unknowns: Vec<Complex64>,
    edge_a: Vec<Complex64>,
    node_v: Vec<Complex64>,
    terminal_voltages: Vec<Phasor>,
    stats: SolveStats,
}

impl FieldSolution {
    /// Wraps the raw unknown vector `x` of the system assembled on `disc`.
    pub fn new(disc: Arc<Discretization>, drive: DriveSpec, x: Vec<Complex64>, stats: SolveStats) -> Self {
        assert_eq!(x.len(), disc.n_dofs());
        let iw = Complex64::new(0.0, drive.omega());
        let edge_a = (0..disc.edges.len())
            .map(|e| disc.dofmap.edge_dof(e).map_or(Complex64::new(0.0, 0.0), |d| x[d]))
            .collect();
        let node_v = (0..disc.mesh.n_vertices())
            .map(|v| {
                disc.dofmap
                    .node_unknown(v)
                    .map_or(Complex64::new(0.0, 0.0), |d| iw * x[d])
            })
            .collect();
        let n_term = disc.partition.n_terminals();
        let terminal_voltages = (0..n_term)
            .map(|k| {
                if k + 1 == n_term {
                    Phasor::ZERO
                } else {
                    Phasor(iw * x[disc.dofmap.terminal_unknown(k)])
                }
            })
            .collect();
        Self {
            disc,
            drive,
            unknowns: x,
            edge_a,
            node_v,
            terminal_voltages,
            stats,
        }
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn drive(&self) -> &DriveSpec {
        &self.drive
    }

    pub fn omega(&self) -> f64 {
        self.drive.omega()
    }

    /// Raw solution vector, `v = V / iω` in the node block.
    pub fn unknowns(&self) -> &[Complex64] {
        &self.unknowns
    }

    /// Line integral of A along every edge, Wb (0 on Γ and on the gauge tree).
    pub fn edge_coefficients(&self) -> &[Complex64] {
        &self.edge_a
    }

    /// Electric scalar potential V at every vertex; 0 outside the conductors,
    /// on the ground and at pinned nodes.
    pub fn node_potentials(&self) -> &[Complex64] {
        &self.node_v
    }

    /// `true` where the vertex belongs to a conductor.
    pub fn is_conductor_node(&self, v: usize) -> bool {
        self.disc.dofmap.node_dof(v) != NodeDof::Inactive
    }

    /// Terminal voltages `V_1..V_N` with `V_N = 0`.
    pub fn terminal_voltages(&self) -> &[Phasor] {
        &self.terminal_voltages
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }
}

/// Assembles and solves `drive` on `disc`.
pub fn solve_fields(disc: Arc<Discretization>, drive: &DriveSpec, options: &SolverOptions) -> Result<FieldSolution> {
    let system = assemble(&disc, drive, options.assembly)?;
    let (x, stats) = solve(&system, options)?;
    Ok(FieldSolution::new(disc, drive.clone(), x, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::testing::{rod_disc, star_disc};

    #[test]
    fn zero_drive_gives_zero_solution() {
        let disc = Arc::new(star_disc(0));
        let drive = DriveSpec::new(50.0, vec![Phasor::ZERO; 2]).unwrap();
        let sol = solve_fields(disc, &drive, &SolverOptions::default()).unwrap();
        assert!(sol.unknowns().iter().all(|x| x.norm() == 0.0));
        assert!(sol.terminal_voltages().iter().all(|v| v.magnitude() == 0.0));
    }

    #[test]
    fn direct_and_iterative_agree() {
        let disc = Arc::new(star_disc(0));
        let drive = DriveSpec::balanced(50.0, 100.0, 0.2).unwrap();
        let d = solve_fields(
            disc.clone(),
            &drive,
            &SolverOptions {
                kind: SolverKind::Direct,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(d.stats().relative_residual <= 1e-10);
        assert_eq!(d.stats().kind, SolverKind::Direct);
        let it = solve_fields(
            disc,
            &drive,
            &SolverOptions {
                kind: SolverKind::Iterative,
                tol: 1e-12,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(it.stats().kind, SolverKind::Iterative);
        for (a, b) in d.terminal_voltages().iter().zip(it.terminal_voltages()) {
            assert!((a.0 - b.0).norm() <= 1e-6 * a.magnitude().max(1e-30), "{a} vs {b}");
        }
    }

    #[test]
    fn linear_in_complex_drive() {
        let disc = Arc::new(star_disc(2));
        let drive = DriveSpec::balanced(50.0, 10.0, 0.0).unwrap();
        let alpha = Complex64::from_polar(3.5, 0.7);
        let opts = SolverOptions::default();
        let a = solve_fields(disc.clone(), &drive, &opts).unwrap();
        let b = solve_fields(disc, &drive.scaled(alpha), &opts).unwrap();
        let scale = a.unknowns().iter().map(|x| x.norm()).fold(0.0, f64::max);
        for (x, y) in a.unknowns().iter().zip(b.unknowns()) {
            assert!((x * alpha - y).norm() <= 1e-9 * scale * alpha.norm());
        }
    }

    #[test]
    fn terminal_nodes_carry_terminal_voltage() {
        let disc = Arc::new(rod_disc(2, 8, 6, 1.0, 0.01, 1e6));
        let drive = DriveSpec::new(1000.0, vec![Phasor::new(10.0, 0.0)]).unwrap();
        let sol = solve_fields(disc.clone(), &drive, &SolverOptions::default()).unwrap();
        let v1 = sol.terminal_voltages()[0].0;
        for &n in &disc.partition.terminal_nodes[0] {
            assert_eq!(sol.node_potentials()[n], v1);
        }
        for &n in &disc.partition.terminal_nodes[1] {
            assert_eq!(sol.node_potentials()[n], Complex64::new(0.0, 0.0));
        }
        assert_eq!(sol.terminal_voltages()[1], Phasor::ZERO);
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        let disc = Arc::new(star_disc(0));
        let drive = DriveSpec::balanced(50.0, 1.0, 0.0).unwrap();
        let sys = assemble(&disc, &drive, AssemblyMode::Deterministic).unwrap();
        assert!(solve(
            &sys,
            &SolverOptions {
                tol: 0.0,
                ..Default::default()
            }
        )
        .is_err());
    }
}
