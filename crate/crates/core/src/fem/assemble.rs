//! Complex-symmetric assembly of the A/v system.
//!
//! With `V = iω v`, each tet contributes
//!
//! ```text
//! [ K + iω M    iω C ] [a]
//! [ iω Cᵀ       iω L ] [v]
//! ```
//!
//! where `K = (ν curl w, curl w)`, `M = (σ w, w)`, `C = (σ w, ∇λ)` and
//! `L = (σ ∇λ, ∇λ)`. Test functions of nodes on terminal `k` are summed into
//! the lift `w_k`, whose row carries the entering current `I_k`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::dofmap::{build_dofmap, DofMap};
use super::element::TetGeometry;
use super::sparse::CsrMatrix;
use crate::config::{DriveSpec, Material, MaterialTable, RegionMap};
use crate::error::{Error, Result};
use crate::mesh::{partition, DomainPartition, EdgeSet, Mesh, Point};

/// Mesh plus everything derived from it that does not depend on the drive.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub partition: DomainPartition,
    pub edges: EdgeSet,
    pub dofmap: DofMap,
    pub materials: MaterialTable,
    /// Per tet: conductivity used in assembly (0 on dielectrics) and 1/μ.
    coefficients: Vec<(f64, f64)>,
}

impl Discretization {
    pub fn new(mesh: Mesh, regions: &RegionMap, materials: MaterialTable, gauge_seed: u64) -> Result<Self> {
        let partition = partition(&mesh, regions)?;
        let mut coefficients = Vec::with_capacity(mesh.tets().len());
        for (i, t) in mesh.tets().iter().enumerate() {
            let Material { sigma, mu } = *materials
                .get(t.tag)
                .ok_or_else(|| Error::Assembly(format!("no material for region tag {} (tet {i})", t.tag)))?;
            let conductor = partition.is_conductor(i);
            if conductor && sigma <= 0.0 {
                return Err(Error::Assembly(format!(
                    "conductor region tag {} has zero conductivity",
                    t.tag
                )));
            }
            if !conductor && sigma != 0.0 {
                return Err(Error::Assembly(format!(
                    "dielectric region tag {} has nonzero conductivity {sigma}",
                    t.tag
                )));
            }
            coefficients.push((if conductor { sigma } else { 0.0 }, 1.0 / mu));
        }
        let edges = EdgeSet::extract(&mesh);
        let dofmap = build_dofmap(&mesh, &partition, &edges, gauge_seed)?;
        Ok(Self {
            mesh,
            partition,
            edges,
            dofmap,
            materials,
            coefficients,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs()
    }

    /// Assembly conductivity of tet `t` (0 outside the conductors).
    pub fn sigma(&self, t: usize) -> f64 {
        self.coefficients[t].0
    }

    pub fn nu(&self, t: usize) -> f64 {
        self.coefficients[t].1
    }

    /// Global unknowns of the six edges and four vertices of tet `t`.
    pub(crate) fn local_dofs(&self, t: usize) -> ([Option<usize>; 6], [Option<usize>; 4]) {
        let e = self.edges.tet_edges(t).map(|e| self.dofmap.edge_dof(e));
        let n = self.mesh.tets()[t].vertices.map(|v| self.dofmap.node_unknown(v));
        (e, n)
    }

    /// Element blocks of tet `t` with edge orientation signs applied.
    pub(crate) fn element_blocks(&self, t: usize) -> ElementBlocks {
        let g = TetGeometry::new(&self.mesh.tet_points(t));
        let s = self.edges.tet_signs(t);
        let (sigma, nu) = self.coefficients[t];
        let mut k = g.curl_curl();
        let mut m = g.edge_mass();
        let mut c = g.edge_grad();
        let mut l = g.laplacian();
        for a in 0..6 {
            for b in 0..6 {
                k[a][b] *= nu * s[a] * s[b];
                m[a][b] *= sigma * s[a] * s[b];
            }
            for n in 0..4 {
                c[a][n] *= sigma * s[a];
            }
        }
        for row in l.iter_mut() {
            for v in row.iter_mut() {
                *v *= sigma;
            }
        }
        ElementBlocks { k, m, c, l }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ElementBlocks {
    pub k: [[f64; 6]; 6],
    pub m: [[f64; 6]; 6],
    pub c: [[f64; 4]; 6],
    pub l: [[f64; 4]; 4],
}

/// How element contributions are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssemblyMode {
    /// Duplicates summed in tet order: bit-identical across runs and thread counts.
    #[default]
    Deterministic,
    /// Parallel unstable merge; the summation order of coincident entries may vary.
    Fast,
}

#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<Complex64>,
    pub omega: f64,
    /// Location of each unknown, used for fill-reducing ordering.
    pub coordinates: Vec<Option<Point>>,
}

type Triplet = (usize, usize, Complex64);

fn element_triplets(disc: &Discretization, t: usize, omega: f64) -> Vec<Triplet> {
    let (ed, nd) = disc.local_dofs(t);
    let b = disc.element_blocks(t);
    let iw = Complex64::new(0.0, omega);
    let conductor = disc.sigma(t) > 0.0;
    let mut out = Vec::with_capacity(if conductor { 100 } else { 36 });
    for a in 0..6 {
        let Some(ra) = ed[a] else { continue };
        for e in 0..6 {
            if let Some(cb) = ed[e] {
                let v = Complex64::new(b.k[a][e], 0.0) + iw * b.m[a][e];
                out.push((ra, cb, v));
            }
        }
        if conductor {
            for n in 0..4 {
                if let Some(cn) = nd[n] {
                    let v = iw * b.c[a][n];
                    out.push((ra, cn, v));
                    out.push((cn, ra, v));
                }
            }
        }
    }
    if conductor {
        for m in 0..4 {
            let Some(rm) = nd[m] else { continue };
            for n in 0..4 {
                if let Some(cn) = nd[n] {
                    out.push((rm, cn, iw * b.l[m][n]));
                }
            }
        }
    }
    out
}

/// Assembles the system for `drive` on `disc`.
pub fn assemble(disc: &Discretization, drive: &DriveSpec, mode: AssemblyMode) -> Result<LinearSystem> {
    let n_term = disc.partition.n_terminals();
    if drive.n_terminals() != n_term {
        return Err(Error::Assembly(format!(
            "drive prescribes {} terminal currents but the mesh has {} terminals (N − 1 = {} expected)",
            drive.terminal_currents().len(),
            n_term,
            n_term - 1
        )));
    }
    let omega = drive.omega();
    let n = disc.n_dofs();
    let per_tet: Vec<Vec<Triplet>> = (0..disc.mesh.tets().len())
        .into_par_iter()
        .map(|t| element_triplets(disc, t, omega))
        .collect();
    let matrix = match mode {
        AssemblyMode::Deterministic => CsrMatrix::from_triplets(n, per_tet.into_iter().flatten().collect()),
        AssemblyMode::Fast => {
            let mut all: Vec<Triplet> = per_tet.into_par_iter().flatten().collect();
            all.par_sort_unstable_by_key(|t| (t.0, t.1));
            CsrMatrix::from_triplets(n, all)
        }
    };
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for (k, i) in drive.terminal_currents().iter().enumerate() {
        rhs[disc.dofmap.terminal_unknown(k)] = i.0;
    }
    Ok(LinearSystem {
        matrix,
        rhs,
        omega,
        coordinates: disc.dofmap.coordinates(&disc.mesh, &disc.edges),
    })
}
