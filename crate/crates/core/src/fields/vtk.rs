//! Legacy ASCII VTK (3.0) unstructured-grid export of the elementwise fields.

use std::fmt::Write as _;
use std::path::Path;

use super::{element_fields, CVec3};
use crate::error::{Error, Result};
use crate::fem::FieldSolution;

/// VTK cell type of a linear tetrahedron.
const VTK_TETRA: u8 = 10;

fn vectors(out: &mut String, name: &str, data: &[CVec3], part: fn(&num_complex::Complex64) -> f64) {
    writeln!(out, "VECTORS {name} double").unwrap();
    for v in data {
        writeln!(out, "{:e} {:e} {:e}", part(&v[0]), part(&v[1]), part(&v[2])).unwrap();
    }
}

fn scalars(out: &mut String, name: &str, data: impl Iterator<Item = f64>) {
    writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
    for x in data {
        writeln!(out, "{x:e}").unwrap();
    }
}

/// Renders the mesh with cell arrays `J_real`, `J_imag`, `J_abs`,
/// `joule_density`, `B_real`, `B_imag` and the integer `region` tag.
pub fn write_vtk(sol: &FieldSolution) -> String {
    let disc = sol.discretization();
    let mesh = &disc.mesh;
    let f = element_fields(sol);
    let n_cells = mesh.tets().len();
    let mut out = String::with_capacity(200 * n_cells);
    out.push_str("# vtk DataFile Version 3.0\n");
    writeln!(out, "furnace fields, f = {:e} Hz", sol.drive().frequency_hz()).unwrap();
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    writeln!(out, "POINTS {} double", mesh.n_vertices()).unwrap();
    for p in mesh.vertices() {
        writeln!(out, "{:e} {:e} {:e}", p[0], p[1], p[2]).unwrap();
    }
    writeln!(out, "CELLS {n_cells} {}", 5 * n_cells).unwrap();
    for t in mesh.tets() {
        let [a, b, c, d] = t.vertices;
        writeln!(out, "4 {a} {b} {c} {d}").unwrap();
    }
    writeln!(out, "CELL_TYPES {n_cells}").unwrap();
    for _ in 0..n_cells {
        writeln!(out, "{VTK_TETRA}").unwrap();
    }
    writeln!(out, "CELL_DATA {n_cells}").unwrap();
    vectors(&mut out, "J_real", &f.j, |c| c.re);
    vectors(&mut out, "J_imag", &f.j, |c| c.im);
    scalars(
        &mut out,
        "J_abs",
        f.j.iter().map(|j| j.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()),
    );
    scalars(&mut out, "joule_density", f.joule_density.iter().copied());
    vectors(&mut out, "B_real", &f.b, |c| c.re);
    vectors(&mut out, "B_imag", &f.b, |c| c.im);
    out.push_str("SCALARS region int 1\nLOOKUP_TABLE default\n");
    for t in mesh.tets() {
        writeln!(out, "{}", t.tag).unwrap();
    }
    out
}

/// Writes [`write_vtk`] output to `path`.
pub fn export_vtk(sol: &FieldSolution, path: &Path) -> Result<()> {
    std::fs::write(path, write_vtk(sol)).map_err(|e| Error::io(path, e))
}
