//! Edge-element discretization and solution of the A/V eddy-current problem.

mod assemble;
mod dofmap;
mod element;
mod krylov;
mod ldl;
mod solve;
mod sparse;

pub use assemble::{assemble, AssemblyMode, Discretization, LinearSystem};
pub use dofmap::{build_dofmap, gauge_tree, DofCounts, DofMap, GaugeTree, NodeDof};
pub use element::TetGeometry;
pub use krylov::{cocg, KrylovOutcome};
pub use ldl::{nested_dissection, LdlFactor};
pub use solve::{solve, solve_fields, FieldSolution, SolveStats, SolverKind, SolverOptions, DIRECT_DOF_LIMIT};
pub use sparse::{relative_residual, CsrMatrix};

#[cfg(test)]
pub(crate) mod testing {
    use super::Discretization;
    use crate::config::{Material, MaterialTable, MU_0};
    use crate::mesh::{
        generate_rod_mesh, generate_star_mesh, rod_region_map, star_region_map, ROD_VOLUME_TAG, STAR_AIR_TAG,
        STAR_HEATER_TAG, STAR_LOAD_TAG,
    };

    /// Star heater (σ = 1e5) with a floating load (σ = 5e5) in air.
    pub fn star_disc(seed: u64) -> Discretization {
        let mut mats = MaterialTable::new();
        mats.insert(STAR_HEATER_TAG, Material { sigma: 1e5, mu: MU_0 }).unwrap();
        mats.insert(STAR_LOAD_TAG, Material { sigma: 5e5, mu: MU_0 }).unwrap();
        mats.insert(STAR_AIR_TAG, Material { sigma: 0.0, mu: MU_0 }).unwrap();
        Discretization::new(generate_star_mesh(0.05).unwrap(), &star_region_map(), mats, seed).unwrap()
    }

    pub fn rod_disc(n_r: usize, n_theta: usize, n_z: usize, length: f64, radius: f64, sigma: f64) -> Discretization {
        let mut mats = MaterialTable::new();
        mats.insert(ROD_VOLUME_TAG, Material { sigma, mu: MU_0 }).unwrap();
        let m = generate_rod_mesh(length, radius, n_r, n_theta, n_z).unwrap();
        Discretization::new(m, &rod_region_map(), mats, 0).unwrap()
    }
}
