use std::collections::{BTreeSet, HashMap};

use super::{sorted3, tet_faces, Mesh};
use crate::config::{RegionMap, SurfaceRole, VolumeRole};
use crate::error::{Error, Result};

/// A face-connected piece of the conducting region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConductorComponent {
    /// Tet indices, ascending.
    pub tets: Vec<usize>,
    /// Zero-based indices of the terminals touching this component.
    pub terminals: BTreeSet<usize>,
}

impl ConductorComponent {
    pub fn has_terminal(&self) -> bool {
        !self.terminals.is_empty()
    }
}

/// Split of the mesh into conductors, dielectrics and boundary pieces.
/// Faces are vertex-sorted triples; all lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPartition {
    pub conductor_tets: Vec<usize>,
    pub dielectric_tets: Vec<usize>,
    pub heater_tets: Vec<usize>,
    /// Whole mesh boundary Γ (terminal surfaces included).
    pub boundary_faces: Vec<[usize; 3]>,
    /// Terminal surfaces, index `k` = terminal `k+1`; the last is the ground.
    pub terminal_faces: Vec<Vec<[usize; 3]>>,
    /// Vertices of each terminal surface.
    pub terminal_nodes: Vec<Vec<usize>>,
    /// Conductor boundary faces that are not terminal faces.
    pub insulated_conductor_faces: Vec<[usize; 3]>,
    pub components: Vec<ConductorComponent>,
    is_conductor: Vec<bool>,
}

impl DomainPartition {
    pub fn n_terminals(&self) -> usize {
        self.terminal_faces.len()
    }

    pub fn is_conductor(&self, tet: usize) -> bool {
        self.is_conductor[tet]
    }

    /// Ground terminal index (zero-based).
    pub fn ground(&self) -> usize {
        self.n_terminals() - 1
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// Splits a validated mesh according to `regions`.
pub fn partition(mesh: &Mesh, regions: &RegionMap) -> Result<DomainPartition> {
    regions.validate()?;
    let n_term = regions.n_terminals();

    let mut is_conductor = vec![false; mesh.tets().len()];
    let mut conductor_tets = Vec::new();
    let mut dielectric_tets = Vec::new();
    let mut heater_tets = Vec::new();
    for (i, t) in mesh.tets().iter().enumerate() {
        match regions.volume_role(t.tag) {
            Some(VolumeRole::Conductor) => {
                is_conductor[i] = true;
                conductor_tets.push(i);
                if regions.heater_tags.contains(&t.tag) {
                    heater_tets.push(i);
                }
            }
            Some(VolumeRole::Dielectric) => dielectric_tets.push(i),
            None => {
                return Err(Error::Partition(format!(
                    "tet {i} has volume tag {} missing from the region map",
                    t.tag
                )))
            }
        }
    }

    // face -> owning tets
    let mut owners: HashMap<[usize; 3], (usize, Option<usize>)> = HashMap::with_capacity(mesh.tets().len() * 2);
    for (i, t) in mesh.tets().iter().enumerate() {
        for f in tet_faces(&t.vertices) {
            owners.entry(f).and_modify(|o| o.1 = Some(i)).or_insert((i, None));
        }
    }

    let mut boundary_faces: Vec<[usize; 3]> = owners.iter().filter(|(_, o)| o.1.is_none()).map(|(f, _)| *f).collect();
    boundary_faces.sort_unstable();

    let mut terminal_faces: Vec<Vec<[usize; 3]>> = vec![Vec::new(); n_term];
    let mut terminal_of_face: HashMap<[usize; 3], usize> = HashMap::new();
    for tri in mesh.boundary_tris() {
        let f = sorted3(tri.vertices);
        match regions.surface_role(tri.tag) {
            Some(SurfaceRole::Terminal(k)) => {
                let owner = owners[&f].0;
                if !is_conductor[owner] {
                    return Err(Error::Partition(format!(
                        "terminal {} surface (tag {}) touches dielectric tet {owner}",
                        k + 1,
                        tri.tag
                    )));
                }
                terminal_faces[k].push(f);
                terminal_of_face.insert(f, k);
            }
            Some(SurfaceRole::Outer) => {}
            None => {
                return Err(Error::Partition(format!(
                    "surface tag {} missing from the region map",
                    tri.tag
                )))
            }
        }
    }
    let mut terminal_nodes = Vec::with_capacity(n_term);
    for (k, faces) in terminal_faces.iter_mut().enumerate() {
        faces.sort_unstable();
        if faces.is_empty() {
            return Err(Error::Partition(format!("terminal {} has no faces in the mesh", k + 1)));
        }
        let mut nodes: Vec<usize> = faces.iter().flatten().copied().collect();
        nodes.sort_unstable();
        nodes.dedup();
        terminal_nodes.push(nodes);
    }
    let mut node_terminal: HashMap<usize, usize> = HashMap::new();
    for (k, nodes) in terminal_nodes.iter().enumerate() {
        for &n in nodes {
            if let Some(prev) = node_terminal.insert(n, k) {
                return Err(Error::Partition(format!(
                    "terminal surfaces {} and {} are not disjoint (shared vertex {n})",
                    prev + 1,
                    k + 1
                )));
            }
        }
    }

    let mut insulated_conductor_faces = Vec::new();
    let mut uf = UnionFind::new(mesh.tets().len());
    let mut sorted_owners: Vec<_> = owners.iter().collect();
    sorted_owners.sort_unstable_by_key(|(f, _)| **f);
    for (f, (a, b)) in sorted_owners {
        match b {
            Some(b) => match (is_conductor[*a], is_conductor[*b]) {
                (true, true) => {
                    uf.union(*a, *b);
                }
                (true, false) | (false, true) => insulated_conductor_faces.push(*f),
                _ => {}
            },
            None => {
                if is_conductor[*a] && !terminal_of_face.contains_key(f) {
                    insulated_conductor_faces.push(*f);
                }
            }
        }
    }

    let mut comp_index: HashMap<usize, usize> = HashMap::new();
    let mut components: Vec<ConductorComponent> = Vec::new();
    for &t in &conductor_tets {
        let r = uf.find(t);
        let c = *comp_index.entry(r).or_insert_with(|| {
            components.push(ConductorComponent {
                tets: Vec::new(),
                terminals: BTreeSet::new(),
            });
            components.len() - 1
        });
        components[c].tets.push(t);
        for f in tet_faces(&mesh.tets()[t].vertices) {
            if let Some(k) = terminal_of_face.get(&f) {
                components[c].terminals.insert(*k);
            }
        }
    }

    Ok(DomainPartition {
        conductor_tets,
        dielectric_tets,
        heater_tets,
        boundary_faces,
        terminal_faces,
        terminal_nodes,
        insulated_conductor_faces,
        components,
        is_conductor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_rod_mesh, rod_region_map, ROD_GROUND_TAG, ROD_LATERAL_TAG, ROD_VOLUME_TAG};

    #[test]
    fn rod_is_one_terminal_component() {
        let m = generate_rod_mesh(1.0, 0.01, 2, 8, 4).unwrap();
        let p = partition(&m, &rod_region_map()).unwrap();
        assert_eq!(p.components.len(), 1);
        assert!(p.components[0].has_terminal());
        assert!(p.dielectric_tets.is_empty());
        assert_eq!(p.conductor_tets.len(), m.tets().len());
        assert_eq!(p.n_terminals(), 2);
        // lateral faces are insulated conductor boundary
        assert_eq!(p.insulated_conductor_faces.len(), 2 * 8 * 4);
    }

    #[test]
    fn lateral_as_terminal_is_rejected() {
        let m = generate_rod_mesh(1.0, 0.01, 1, 6, 2).unwrap();
        let mut map = rod_region_map();
        map.outer_tags.clear();
        map.terminal_tags[0].insert(ROD_LATERAL_TAG);
        let e = partition(&m, &map).unwrap_err().to_string();
        assert!(e.contains("not disjoint"), "{e}");
    }

    #[test]
    fn terminal_on_dielectric_is_rejected() {
        let m = generate_rod_mesh(1.0, 0.01, 1, 6, 2).unwrap();
        let mut map = rod_region_map();
        map.conductor_tags.clear();
        map.heater_tags.clear();
        map.dielectric_tags.insert(ROD_VOLUME_TAG);
        let e = partition(&m, &map).unwrap_err().to_string();
        assert!(e.contains("dielectric"), "{e}");
    }

    #[test]
    fn two_rods_one_floating() {
        let a = generate_rod_mesh(1.0, 0.01, 1, 6, 2).unwrap();
        // second rod: same volume tag, all its surfaces outer
        let b = generate_rod_mesh(1.0, 0.01, 1, 6, 2)
            .unwrap()
            .translated([0.1, 0.0, 0.0])
            .retagged(|t| if t == ROD_VOLUME_TAG { t } else { ROD_LATERAL_TAG });
        let m = a.merged(&b).unwrap();
        let p = partition(&m, &rod_region_map()).unwrap();
        let flags: Vec<bool> = p.components.iter().map(|c| c.has_terminal()).collect();
        assert_eq!(flags, vec![true, false]);
        assert!(p.terminal_nodes[1].iter().all(|n| *n < a.n_vertices()));
        let _ = ROD_GROUND_TAG;
    }

    #[test]
    fn independent_of_tet_order() {
        let m = generate_rod_mesh(1.0, 0.01, 2, 6, 3).unwrap();
        let n = m.tets().len();
        let order: Vec<usize> = (0..n).rev().collect();
        let shuffled = m.with_tet_order(&order);
        let p1 = partition(&m, &rod_region_map()).unwrap();
        let p2 = partition(&shuffled, &rod_region_map()).unwrap();
        assert_eq!(p1.boundary_faces, p2.boundary_faces);
        assert_eq!(p1.terminal_faces, p2.terminal_faces);
        assert_eq!(p1.insulated_conductor_faces, p2.insulated_conductor_faces);
        let map_back =
            |p: &DomainPartition| -> BTreeSet<usize> { p.conductor_tets.iter().map(|t| order[*t]).collect() };
        assert_eq!(map_back(&p2), p1.conductor_tets.iter().copied().collect());
        // idempotent
        assert_eq!(partition(&m, &rod_region_map()).unwrap(), p1);
    }
}
