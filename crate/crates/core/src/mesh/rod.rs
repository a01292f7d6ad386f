//! Structured tetrahedral mesh of a solid cylinder along z.
//!
//! Cross-section: a centre node plus `n_r` rings of `n_θ` nodes each; the
//! centre fan gives `n_θ` triangles and every ring band `2 n_θ`, so a layer
//! has `T = n_θ (2 n_r − 1)` triangles. Each triangular prism between two
//! layers is cut into 3 tets by sorting its bottom vertices `v0 < v1 < v2`
//! (global index) and taking `(v0,v1,v2,v2')`, `(v0,v1,v1',v2')`,
//! `(v0,v0',v1',v2')`. Every side quad then gets the diagonal from its
//! lower-index bottom vertex to the higher-index top vertex, which is the
//! same from both neighbouring prisms, so the mesh is conforming.
//!
//! Ring radii are `s·a·i/n_r` with `s² = (2π/n_θ) / sin(2π/n_θ)`: the
//! outer polygon then has exactly the disc area `πa²`, and the mesh volume
//! equals `πa²L` up to rounding.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use super::{cross, norm, signed_volume, sub, Mesh, Point, Tet, Tri};
use crate::config::{RegionMap, Tag};
use crate::error::{Error, Result};

pub const ROD_VOLUME_TAG: Tag = 1;
pub const ROD_LATERAL_TAG: Tag = 10;
/// End cap at z = L, terminal 1.
pub const ROD_TERMINAL_TAG: Tag = 11;
/// End cap at z = 0, terminal 2 (ground).
pub const ROD_GROUND_TAG: Tag = 12;

/// Region map matching the tags written by [`generate_rod_mesh`].
pub fn rod_region_map() -> RegionMap {
    RegionMap {
        conductor_tags: BTreeSet::from([ROD_VOLUME_TAG]),
        heater_tags: BTreeSet::from([ROD_VOLUME_TAG]),
        outer_tags: BTreeSet::from([ROD_LATERAL_TAG]),
        terminal_tags: vec![BTreeSet::from([ROD_TERMINAL_TAG]), BTreeSet::from([ROD_GROUND_TAG])],
        ..Default::default()
    }
}

/// Closed-form simplex counts of the generated mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RodCounts {
    pub vertices: usize,
    pub edges: usize,
    /// All triangular faces, interior and boundary.
    pub faces: usize,
    pub tets: usize,
    pub boundary_tris: usize,
}

pub fn rod_counts(n_r: usize, n_theta: usize, n_z: usize) -> RodCounts {
    let v2 = 1 + n_r * n_theta;
    let t2 = n_theta * (2 * n_r - 1);
    let e2 = 3 * n_r * n_theta - n_theta;
    RodCounts {
        vertices: (n_z + 1) * v2,
        edges: (2 * n_z + 1) * e2 + n_z * v2,
        faces: (n_z + 1) * t2 + 2 * n_z * e2 + 2 * n_z * t2,
        tets: 3 * n_z * t2,
        boundary_tris: 2 * t2 + 2 * n_theta * n_z,
    }
}

struct CrossSection {
    points: Vec<[f64; 2]>,
    tris: Vec<[usize; 3]>,
    /// Outer ring indices in angular order.
    rim: Vec<usize>,
}

fn cross_section(a: f64, n_r: usize, n_theta: usize) -> CrossSection {
    let wedge = 2.0 * PI / n_theta as f64;
    let s = (wedge / wedge.sin()).sqrt();
    let ring = |i: usize, j: usize| 1 + (i - 1) * n_theta + (j % n_theta);
    let mut points = vec![[0.0, 0.0]];
    for i in 1..=n_r {
        let r = s * a * i as f64 / n_r as f64;
        for j in 0..n_theta {
            let th = wedge * j as f64;
            points.push([r * th.cos(), r * th.sin()]);
        }
    }
    let mut tris = Vec::with_capacity(n_theta * (2 * n_r - 1));
    for j in 0..n_theta {
        tris.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..n_r {
        for j in 0..n_theta {
            let (q00, q01, q10, q11) = (ring(i, j), ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1));
            tris.push([q00, q10, q11]);
            tris.push([q00, q11, q01]);
        }
    }
    let rim = (0..n_theta).map(|j| ring(n_r, j)).collect();
    CrossSection { points, tris, rim }
}

fn check_params(length: f64, radius: f64, n_r: usize, n_theta: usize, n_z: usize) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::invalid("length", format!("must be > 0, got {length}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("radius", format!("must be > 0, got {radius}")));
    }
    if n_r < 1 {
        return Err(Error::invalid("n_r", "must be >= 1"));
    }
    if n_theta < 3 {
        return Err(Error::invalid("n_theta", "must be >= 3"));
    }
    if n_z < 1 {
        return Err(Error::invalid("n_z", "must be >= 1"));
    }
    Ok(())
}

/// Tetrahedralizes the cylinder `r ≤ a, 0 ≤ z ≤ L`. The cap at z = L is
/// tagged [`ROD_TERMINAL_TAG`], the cap at z = 0 [`ROD_GROUND_TAG`], the
/// lateral surface [`ROD_LATERAL_TAG`] and the volume [`ROD_VOLUME_TAG`].
pub fn generate_rod_mesh(length: f64, radius: f64, n_r: usize, n_theta: usize, n_z: usize) -> Result<Mesh> {
    check_params(length, radius, n_r, n_theta, n_z)?;
    let cs = cross_section(radius, n_r, n_theta);
    let per_layer = cs.points.len();
    let id = |layer: usize, local: usize| layer * per_layer + local;

    let mut vertices: Vec<Point> = Vec::with_capacity(per_layer * (n_z + 1));
    for l in 0..=n_z {
        let z = length * l as f64 / n_z as f64;
        vertices.extend(cs.points.iter().map(|p| [p[0], p[1], z]));
    }

    let mut tets = Vec::with_capacity(3 * n_z * cs.tris.len());
    for l in 0..n_z {
        for tri in &cs.tris {
            let mut b = *tri;
            b.sort_unstable();
            let [v0, v1, v2] = b.map(|v| id(l, v));
            let [w0, w1, w2] = b.map(|v| id(l + 1, v));
            for vs in [[v0, v1, v2, w2], [v0, v1, w1, w2], [v0, w0, w1, w2]] {
                tets.push(Tet {
                    vertices: vs,
                    tag: ROD_VOLUME_TAG,
                });
            }
        }
    }

    let mut tris = Vec::new();
    for tri in &cs.tris {
        tris.push(Tri {
            vertices: tri.map(|v| id(0, v)),
            tag: ROD_GROUND_TAG,
        });
        tris.push(Tri {
            vertices: tri.map(|v| id(n_z, v)),
            tag: ROD_TERMINAL_TAG,
        });
    }
    for l in 0..n_z {
        for j in 0..n_theta {
            let (a, b) = (cs.rim[j], cs.rim[(j + 1) % n_theta]);
            let (p, q) = (a.min(b), a.max(b));
            let (p0, q0, p1, q1) = (id(l, p), id(l, q), id(l + 1, p), id(l + 1, q));
            tris.push(Tri {
                vertices: [p0, q0, q1],
                tag: ROD_LATERAL_TAG,
            });
            tris.push(Tri {
                vertices: [p0, q1, p1],
                tag: ROD_LATERAL_TAG,
            });
        }
    }
    Mesh::new(vertices, tets, tris)
}

/// Shape measure `h_max / (2√6 r_in)`: 1 for the regular tet, growing as
/// the element degenerates.
pub fn tet_aspect_ratio(p: &[Point; 4]) -> f64 {
    let mut h_max: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            h_max = h_max.max(norm(sub(p[j], p[i])));
        }
    }
    let area = |a: Point, b: Point, c: Point| 0.5 * norm(cross(sub(b, a), sub(c, a)));
    let s = area(p[1], p[2], p[3]) + area(p[0], p[2], p[3]) + area(p[0], p[1], p[3]) + area(p[0], p[1], p[2]);
    let r_in = 3.0 * signed_volume(p).abs() / s;
    h_max / (2.0 * 6f64.sqrt() * r_in)
}

/// Upper bound on [`tet_aspect_ratio`] over a generated rod.
///
/// Each tet of a prism with base triangle area `A`, longest base edge `t`
/// and height `dz` has volume `A dz / 3`, edges no longer than
/// `e = √(t² + dz²)` and faces no larger than `√3 e² / 4`, hence
/// `r_in ≥ A dz / (√3 e²)` and the ratio is at most `e³ / (2√2 A dz)`.
pub fn rod_aspect_bound(length: f64, radius: f64, n_r: usize, n_theta: usize, n_z: usize) -> Result<f64> {
    check_params(length, radius, n_r, n_theta, n_z)?;
    let cs = cross_section(radius, n_r, n_theta);
    let dz = length / n_z as f64;
    let mut bound: f64 = 0.0;
    for tri in &cs.tris {
        let p = tri.map(|v| cs.points[v]);
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let t = d(p[0], p[1]).max(d(p[1], p[2])).max(d(p[0], p[2]));
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs();
        let e = (t * t + dz * dz).sqrt();
        bound = bound.max(e.powi(3) / (2.0 * 2f64.sqrt() * area * dz));
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::EdgeSet;

    fn euler(m: &Mesh) -> i64 {
        let e = EdgeSet::extract(m).len();
        let f = m.face_incidence().len();
        m.n_vertices() as i64 - e as i64 + f as i64 - m.tets().len() as i64
    }

    #[test]
    fn smallest_rod_counts() {
        // n_r=1, n_θ=4, n_z=1: 5 nodes per layer, 4 triangles, 8 in-plane edges.
        let c = rod_counts(1, 4, 1);
        assert_eq!(
            c,
            RodCounts {
                vertices: 10,
                edges: 29,
                faces: 32,
                tets: 12,
                boundary_tris: 16
            }
        );
        let m = generate_rod_mesh(1.0, 0.01, 1, 4, 1).unwrap();
        assert_eq!(m.n_vertices(), c.vertices);
        assert_eq!(m.tets().len(), c.tets);
        assert_eq!(m.boundary_tris().len(), c.boundary_tris);
        assert_eq!(EdgeSet::extract(&m).len(), c.edges);
        assert_eq!(m.face_incidence().len(), c.faces);
        assert_eq!(euler(&m), 1);
    }

    #[test]
    fn counts_and_euler_over_parameters() {
        for (nr, nt, nz) in [(1, 3, 1), (2, 5, 3), (3, 8, 2), (4, 16, 5)] {
            let m = generate_rod_mesh(0.3, 0.02, nr, nt, nz).unwrap();
            let c = rod_counts(nr, nt, nz);
            assert_eq!(m.n_vertices(), c.vertices);
            assert_eq!(m.tets().len(), c.tets);
            assert_eq!(EdgeSet::extract(&m).len(), c.edges);
            assert_eq!(m.face_incidence().len(), c.faces);
            assert_eq!(euler(&m), 1, "({nr},{nt},{nz})");
            // all boundary faces are tagged
            assert_eq!(m.boundary_faces().len(), m.boundary_tris().len());
        }
    }

    #[test]
    fn all_tets_positive() {
        let m = generate_rod_mesh(1.0, 0.01, 2, 7, 3).unwrap();
        for t in 0..m.tets().len() {
            assert!(m.tet_volume(t) > 0.0);
        }
    }

    #[test]
    fn volume_matches_disc() {
        for (nr, nt) in [(8, 8), (8, 12), (10, 32)] {
            let m = generate_rod_mesh(1.0, 0.01, nr, nt, 2).unwrap();
            let exact = PI * 0.01 * 0.01;
            assert!((m.total_volume() - exact).abs() < 0.005 * exact);
            assert!((m.total_volume() - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn aspect_ratio_below_bound() {
        let (l, a, nr, nt, nz) = (1.0, 0.01, 4, 16, 20);
        let m = generate_rod_mesh(l, a, nr, nt, nz).unwrap();
        let bound = rod_aspect_bound(l, a, nr, nt, nz).unwrap();
        let worst = (0..m.tets().len())
            .map(|t| tet_aspect_ratio(&m.tet_points(t)))
            .fold(0.0, f64::max);
        assert!(worst <= bound, "{worst} > {bound}");
        assert!(worst > 1.0);
    }

    #[test]
    fn regular_tet_ratio_is_one() {
        let p = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        assert!((tet_aspect_ratio(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_parameters() {
        assert!(generate_rod_mesh(0.0, 0.01, 1, 4, 1).is_err());
        assert!(generate_rod_mesh(1.0, 0.01, 0, 4, 1).is_err());
        assert!(generate_rod_mesh(1.0, 0.01, 1, 2, 1).is_err());
        assert!(generate_rod_mesh(1.0, 0.01, 1, 4, 0).is_err());
    }
}
