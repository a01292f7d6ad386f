//! Tetrahedral meshes: storage, validation, MSH I/O, edges, domain partition
//! and the structured generators used by the verification cases.

mod edges;
mod grid;
mod msh;
pub(crate) mod partition;
mod rod;

use std::collections::HashMap;

pub use edges::{EdgeSet, LOCAL_EDGES};
pub use grid::{
    generate_box_mesh, generate_star_mesh, star_region_map, BoxGrid, CellFace, STAR_AIR_TAG, STAR_HEATER_TAG,
    STAR_LOAD_TAG, STAR_OUTER_TAG, STAR_TERMINAL_TAGS,
};
pub use msh::{load_msh, write_msh};
pub use partition::{partition, ConductorComponent, DomainPartition};
pub use rod::{
    generate_rod_mesh, rod_aspect_bound, rod_counts, rod_region_map, tet_aspect_ratio, RodCounts, ROD_GROUND_TAG,
    ROD_LATERAL_TAG, ROD_TERMINAL_TAG, ROD_VOLUME_TAG,
};

use crate::config::Tag;
use crate::error::{Error, Result};

pub type Point = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tet {
    pub vertices: [usize; 4],
    pub tag: Tag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tri {
    pub vertices: [usize; 3],
    pub tag: Tag,
}

/// A validated tetrahedral mesh. Every tet has positive signed volume and
/// every tagged triangle is a boundary face of exactly one tet.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    tets: Vec<Tet>,
    boundary_tris: Vec<Tri>,
}

pub(crate) fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

/// The four faces of a tet, vertex-sorted.
pub(crate) fn tet_faces(v: &[usize; 4]) -> [[usize; 3]; 4] {
    [
        sorted3([v[1], v[2], v[3]]),
        sorted3([v[0], v[2], v[3]]),
        sorted3([v[0], v[1], v[3]]),
        sorted3([v[0], v[1], v[2]]),
    ]
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

/// Signed volume of the tet `(p0, p1, p2, p3)`.
pub fn signed_volume(p: &[Point; 4]) -> f64 {
    dot(sub(p[1], p[0]), cross(sub(p[2], p[0]), sub(p[3], p[0]))) / 6.0
}

impl Mesh {
    /// Validates and canonicalizes: negatively oriented tets get two
    /// vertices swapped, degenerate tets are rejected.
    pub fn new(vertices: Vec<Point>, mut tets: Vec<Tet>, boundary_tris: Vec<Tri>) -> Result<Self> {
        let nv = vertices.len();
        for (i, t) in tets.iter_mut().enumerate() {
            if let Some(bad) = t.vertices.iter().find(|v| **v >= nv) {
                return Err(Error::Mesh(format!("tet {i} references missing vertex {bad}")));
            }
            let p = t.vertices.map(|v| vertices[v]);
            let vol = signed_volume(&p);
            let scale = (0..3).map(|k| norm(sub(p[k + 1], p[0]))).fold(0.0, f64::max).powi(3);
            if !(vol.abs() > 1e-14 * scale) {
                return Err(Error::Mesh(format!("tet {i} has non-positive volume {vol:e}")));
            }
            if vol < 0.0 {
                t.vertices.swap(2, 3);
            }
        }
        let mut face_count: HashMap<[usize; 3], u32> = HashMap::with_capacity(tets.len() * 2);
        for t in &tets {
            for f in tet_faces(&t.vertices) {
                *face_count.entry(f).or_insert(0) += 1;
            }
        }
        if let Some((f, c)) = face_count.iter().find(|(_, c)| **c > 2) {
            return Err(Error::Mesh(format!("face {f:?} is shared by {c} tets")));
        }
        for (i, tri) in boundary_tris.iter().enumerate() {
            if let Some(bad) = tri.vertices.iter().find(|v| **v >= nv) {
                return Err(Error::Mesh(format!("triangle {i} references missing vertex {bad}")));
            }
            match face_count.get(&sorted3(tri.vertices)) {
                Some(1) => {}
                Some(_) => {
                    return Err(Error::Mesh(format!(
                        "triangle {i} (tag {}) is an interior face",
                        tri.tag
                    )))
                }
                None => {
                    return Err(Error::Mesh(format!(
                        "triangle {i} (tag {}) is not a face of any tet",
                        tri.tag
                    )))
                }
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(boundary_tris.len());
        for tri in &boundary_tris {
            if !seen.insert(sorted3(tri.vertices)) {
                return Err(Error::Mesh(format!(
                    "boundary face {:?} carries more than one surface tag",
                    tri.vertices
                )));
            }
        }
        Ok(Self {
            vertices,
            tets,
            boundary_tris,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn tets(&self) -> &[Tet] {
        &self.tets
    }

    pub fn boundary_tris(&self) -> &[Tri] {
        &self.boundary_tris
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn tet_points(&self, t: usize) -> [Point; 4] {
        self.tets[t].vertices.map(|v| self.vertices[v])
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        signed_volume(&self.tet_points(t))
    }

    pub fn tet_centroid(&self, t: usize) -> Point {
        let p = self.tet_points(t);
        let mut c = [0.0; 3];
        for q in p {
            for k in 0..3 {
                c[k] += 0.25 * q[k];
            }
        }
        c
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.tet_volume(t)).sum()
    }

    /// Every face of the tet complex with its number of incident tets, sorted.
    pub fn face_incidence(&self) -> Vec<([usize; 3], u32)> {
        let mut faces: Vec<[usize; 3]> = self.tets.iter().flat_map(|t| tet_faces(&t.vertices)).collect();
        faces.sort_unstable();
        let mut out: Vec<([usize; 3], u32)> = Vec::with_capacity(faces.len() / 2 + 1);
        for f in faces {
            match out.last_mut() {
                Some((g, c)) if *g == f => *c += 1,
                _ => out.push((f, 1)),
            }
        }
        out
    }

    /// Faces belonging to exactly one tet.
    pub fn boundary_faces(&self) -> Vec<[usize; 3]> {
        self.face_incidence()
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(f, _)| f)
            .collect()
    }

    /// Disjoint union with `other`; vertices of `other` are renumbered after ours.
    pub fn merged(&self, other: &Mesh) -> Result<Mesh> {
        let off = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut tets = self.tets.clone();
        tets.extend(other.tets.iter().map(|t| Tet {
            vertices: t.vertices.map(|v| v + off),
            tag: t.tag,
        }));
        let mut tris = self.boundary_tris.clone();
        tris.extend(other.boundary_tris.iter().map(|t| Tri {
            vertices: t.vertices.map(|v| v + off),
            tag: t.tag,
        }));
        Mesh::new(vertices, tets, tris)
    }

    /// Copy with every tet and triangle tag passed through `f`.
    pub fn retagged(&self, f: impl Fn(Tag) -> Tag) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            tets: self
                .tets
                .iter()
                .map(|t| Tet {
                    vertices: t.vertices,
                    tag: f(t.tag),
                })
                .collect(),
            boundary_tris: self
                .boundary_tris
                .iter()
                .map(|t| Tri {
                    vertices: t.vertices,
                    tag: f(t.tag),
                })
                .collect(),
        }
    }

    /// Copy translated by `offset`.
    pub fn translated(&self, offset: Point) -> Mesh {
        Mesh {
            vertices: self
                .vertices
                .iter()
                .map(|p| [p[0] + offset[0], p[1] + offset[1], p[2] + offset[2]])
                .collect(),
            tets: self.tets.clone(),
            boundary_tris: self.boundary_tris.clone(),
        }
    }

    /// Copy with tets reordered by `order` (a permutation of tet indices).
    pub fn with_tet_order(&self, order: &[usize]) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            tets: order.iter().map(|&i| self.tets[i]).collect(),
            boundary_tris: self.boundary_tris.clone(),
        }
    }
}
