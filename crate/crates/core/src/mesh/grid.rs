//! Structured box meshes: an `nx × ny × nz` grid of cubes, each cut into six
//! tets sharing the main diagonal (Kuhn split, conforming across cells).
//!
//! Also provides a small three-terminal furnace fixture: a star-connected
//! heater with three legs reaching the top face, and a floating load block,
//! all in air.

use std::collections::BTreeSet;

use super::{Mesh, Point, Tet, Tri};
use crate::config::{RegionMap, Tag};
use crate::error::{Error, Result};

/// Axis-aligned grid of `cells` cubes of size `spacing` starting at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    pub origin: Point,
    pub spacing: [f64; 3],
    pub cells: [usize; 3],
}

/// Boundary face of cell `cell`, normal to `axis`, on the high side if `high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellFace {
    pub cell: [usize; 3],
    pub axis: usize,
    pub high: bool,
}

/// Meshes `grid`, tagging tets by `cell_tag` and outer faces by `face_tag`.
pub fn generate_box_mesh(
    grid: &BoxGrid,
    cell_tag: impl Fn([usize; 3]) -> Tag,
    face_tag: impl Fn(CellFace) -> Tag,
) -> Result<Mesh> {
    let [nx, ny, nz] = grid.cells;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::invalid("cells", "every grid dimension must be at least 1"));
    }
    if grid.spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::invalid("spacing", "must be positive and finite"));
    }
    let vid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([
                    grid.origin[0] + i as f64 * grid.spacing[0],
                    grid.origin[1] + j as f64 * grid.spacing[1],
                    grid.origin[2] + k as f64 * grid.spacing[2],
                ]);
            }
        }
    }

    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let tag = cell_tag([i, j, k]);
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut vs = [vid(i, j, k); 4];
                    for (s, axis) in perm.iter().enumerate() {
                        c[*axis] += 1;
                        vs[s + 1] = vid(c[0], c[1], c[2]);
                    }
                    tets.push(Tet { vertices: vs, tag });
                }
            }
        }
    }

    let mut tris = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for high in [false, true] {
            let mut cell = [0usize; 3];
            for a in 0..grid.cells[u] {
                for b in 0..grid.cells[v] {
                    cell[u] = a;
                    cell[v] = b;
                    cell[axis] = if high { grid.cells[axis] - 1 } else { 0 };
                    let tag = face_tag(CellFace { cell, axis, high });
                    let mut lo = cell;
                    lo[axis] += high as usize;
                    let corner = |du: usize, dv: usize| {
                        let mut p = lo;
                        p[u] += du;
                        p[v] += dv;
                        vid(p[0], p[1], p[2])
                    };
                    tris.push(Tri {
                        vertices: [corner(0, 0), corner(1, 0), corner(1, 1)],
                        tag,
                    });
                    tris.push(Tri {
                        vertices: [corner(0, 0), corner(0, 1), corner(1, 1)],
                        tag,
                    });
                }
            }
        }
    }
    Mesh::new(vertices, tets, tris)
}

pub const STAR_HEATER_TAG: Tag = 1;
pub const STAR_LOAD_TAG: Tag = 2;
pub const STAR_AIR_TAG: Tag = 3;
pub const STAR_OUTER_TAG: Tag = 30;
/// Top faces of the three legs, terminals 1, 2, 3 (ground).
pub const STAR_TERMINAL_TAGS: [Tag; 3] = [21, 22, 23];

const STAR_CELLS: [usize; 3] = [11, 6, 8];
const STAR_LEG_X: [usize; 3] = [2, 5, 8];
const STAR_LEG_Y: usize = 2;
const STAR_BAR_Z: usize = 2;

/// Three-leg star heater with a floating load, meshed on cubes of edge `h`.
///
/// Legs run in z from the bar layer to the top face; the bar joins their
/// feet. The load block sits beside the legs without touching them.
pub fn generate_star_mesh(h: f64) -> Result<Mesh> {
    let grid = BoxGrid {
        origin: [0.0; 3],
        spacing: [h; 3],
        cells: STAR_CELLS,
    };
    generate_box_mesh(
        &grid,
        |[i, j, k]| {
            let leg = j == STAR_LEG_Y && k >= STAR_BAR_Z && STAR_LEG_X.contains(&i);
            let bar = j == STAR_LEG_Y && k == STAR_BAR_Z && (STAR_LEG_X[0]..=STAR_LEG_X[2]).contains(&i);
            let load = j == 4 && (4..=5).contains(&k) && (3..=7).contains(&i);
            if leg || bar {
                STAR_HEATER_TAG
            } else if load {
                STAR_LOAD_TAG
            } else {
                STAR_AIR_TAG
            }
        },
        |f| {
            let top = f.axis == 2 && f.high && f.cell[1] == STAR_LEG_Y;
            match STAR_LEG_X.iter().position(|x| *x == f.cell[0]) {
                Some(p) if top => STAR_TERMINAL_TAGS[p],
                _ => STAR_OUTER_TAG,
            }
        },
    )
}

/// Region map for [`generate_star_mesh`].
pub fn star_region_map() -> RegionMap {
    RegionMap {
        conductor_tags: BTreeSet::from([STAR_HEATER_TAG, STAR_LOAD_TAG]),
        dielectric_tags: BTreeSet::from([STAR_AIR_TAG]),
        heater_tags: BTreeSet::from([STAR_HEATER_TAG]),
        outer_tags: BTreeSet::from([STAR_OUTER_TAG]),
        terminal_tags: STAR_TERMINAL_TAGS.iter().map(|t| BTreeSet::from([*t])).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{partition, EdgeSet};

    #[test]
    fn box_counts_and_volume() {
        let grid = BoxGrid {
            origin: [1.0, -2.0, 0.5],
            spacing: [0.5, 0.25, 2.0],
            cells: [3, 2, 4],
        };
        let m = generate_box_mesh(&grid, |_| 1, |_| 10).unwrap();
        assert_eq!(m.n_vertices(), 4 * 3 * 5);
        assert_eq!(m.tets().len(), 6 * 24);
        // every boundary face is tagged once
        assert_eq!(m.boundary_faces().len(), m.boundary_tris().len());
        assert_eq!(m.boundary_tris().len(), 4 * (3 * 2 + 2 * 4 + 3 * 4));
        assert!((m.total_volume() - 1.5 * 0.5 * 8.0).abs() < 1e-12);
        // Euler characteristic of a ball
        let e = EdgeSet::extract(&m).len() as i64;
        let f = m.face_incidence().len() as i64;
        assert_eq!(m.n_vertices() as i64 - e + f - m.tets().len() as i64, 1);
    }

    #[test]
    fn star_fixture_partition() {
        let m = generate_star_mesh(0.05).unwrap();
        let p = partition(&m, &star_region_map()).unwrap();
        assert_eq!(p.n_terminals(), 3);
        assert_eq!(p.components.len(), 2);
        let with_terminals: Vec<usize> = p.components.iter().map(|c| c.terminals.len()).collect();
        assert_eq!(with_terminals, vec![3, 0]);
        for faces in &p.terminal_faces {
            assert_eq!(faces.len(), 2);
        }
        assert!(!p.dielectric_tets.is_empty());
        assert_eq!(p.heater_tets.len(), p.components[0].tets.len());
    }
}
