//! Unknown numbering: gauged edge DOFs for A, nodal DOFs for v on the
//! conductors, one lifted unknown per non-ground terminal.
//!
//! Global order is `[A edges | free v nodes | terminals 1..N−1]`.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::mesh::partition::UnionFind;
use crate::mesh::{DomainPartition, EdgeSet, Mesh, Point};

/// Role of a mesh vertex in the scalar potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeDof {
    /// Not a conductor node; v is undefined there.
    Inactive,
    /// Free unknown, index among the v block.
    Free(usize),
    /// Lies on non-ground terminal `k` (zero-based) and carries its unknown.
    Terminal(usize),
    /// Lies on the ground terminal, v = 0.
    Ground,
    /// Reference node of a floating conductor, v = 0.
    Pinned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofCounts {
    pub edges: usize,
    pub boundary_edges: usize,
    pub tree_edges: usize,
    pub free_edges: usize,
    pub conductor_nodes: usize,
    pub terminal_nodes: usize,
    pub pinned_nodes: usize,
    pub free_nodes: usize,
    pub terminal_unknowns: usize,
}

#[derive(Debug, Clone)]
pub struct DofMap {
    edge_dof: Vec<Option<usize>>,
    node_dof: Vec<NodeDof>,
    tree_edges: Vec<usize>,
    pinned: Vec<usize>,
    gauge_root: usize,
    counts: DofCounts,
}

impl DofMap {
    pub fn n_dofs(&self) -> usize {
        self.counts.free_edges + self.counts.free_nodes + self.counts.terminal_unknowns
    }

    pub fn counts(&self) -> DofCounts {
        self.counts
    }

    /// Global unknown of edge `e`, `None` on Γ and on the gauge tree.
    pub fn edge_dof(&self, e: usize) -> Option<usize> {
        self.edge_dof[e]
    }

    pub fn node_dof(&self, v: usize) -> NodeDof {
        self.node_dof[v]
    }

    /// Global unknown carrying the potential of vertex `v`, if any.
    pub fn node_unknown(&self, v: usize) -> Option<usize> {
        match self.node_dof[v] {
            NodeDof::Free(i) => Some(self.counts.free_edges + i),
            NodeDof::Terminal(k) => Some(self.terminal_unknown(k)),
            _ => None,
        }
    }

    /// Global unknown of non-ground terminal `k` (zero-based).
    pub fn terminal_unknown(&self, k: usize) -> usize {
        assert!(k < self.counts.terminal_unknowns);
        self.counts.free_edges + self.counts.free_nodes + k
    }

    /// Interior edges removed by the gauge, ascending.
    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    /// Pinned reference nodes of floating conductors, ascending.
    pub fn pinned_nodes(&self) -> &[usize] {
        &self.pinned
    }

    pub fn gauge_root(&self) -> usize {
        self.gauge_root
    }

    /// Representative location of every unknown (edge midpoints, node
    /// positions); terminal unknowns have none.
    pub fn coordinates(&self, mesh: &Mesh, edges: &EdgeSet) -> Vec<Option<Point>> {
        let mut out = vec![None; self.n_dofs()];
        let p = mesh.vertices();
        for (e, [u, v]) in edges.edges().iter().enumerate() {
            if let Some(d) = self.edge_dof[e] {
                out[d] = Some([
                    0.5 * (p[*u][0] + p[*v][0]),
                    0.5 * (p[*u][1] + p[*v][1]),
                    0.5 * (p[*u][2] + p[*v][2]),
                ]);
            }
        }
        for (v, nd) in self.node_dof.iter().enumerate() {
            if let NodeDof::Free(i) = nd {
                out[self.counts.free_edges + i] = Some(p[v]);
            }
        }
        out
    }
}

/// Edges fixed by the gauge: those on Γ and those on the spanning tree.
#[derive(Debug, Clone)]
pub struct GaugeTree {
    pub on_boundary: Vec<bool>,
    pub in_tree: Vec<bool>,
    pub root: usize,
}

/// Grows the gauge tree breadth-first from vertex
/// `gauge_seed mod (number of used vertices)` over the vertex graph in which
/// every face of `boundary_faces` has been collapsed to one node, so edges
/// already fixed by `A × n = 0` never enter the tree.
pub fn gauge_tree(
    n_vertices: usize,
    edges: &EdgeSet,
    boundary_faces: &[[usize; 3]],
    gauge_seed: u64,
) -> Result<GaugeTree> {
    let nv = n_vertices;
    let ne = edges.len();
    let mut on_boundary = vec![false; ne];
    for f in boundary_faces {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let e = edges.find(f[a], f[b]).expect("boundary face edge in edge set");
            on_boundary[e] = true;
        }
    }

    // vertex → incident edges, in edge order
    let mut adj_ptr = vec![0usize; nv + 1];
    for [u, v] in edges.edges() {
        adj_ptr[u + 1] += 1;
        adj_ptr[v + 1] += 1;
    }
    for i in 0..nv {
        adj_ptr[i + 1] += adj_ptr[i];
    }
    let mut fill = adj_ptr.clone();
    let mut adj = vec![(0usize, 0usize); adj_ptr[nv]];
    for (e, [u, v]) in edges.edges().iter().enumerate() {
        adj[fill[*u]] = (e, *v);
        fill[*u] += 1;
        adj[fill[*v]] = (e, *u);
        fill[*v] += 1;
    }

    let used: Vec<usize> = (0..nv).filter(|v| adj_ptr[v + 1] > adj_ptr[*v]).collect();
    if used.is_empty() {
        return Err(Error::Assembly("mesh has no edges".into()));
    }
    let root = used[(gauge_seed % used.len() as u64) as usize];

    let mut uf = UnionFind::new(nv);
    for (e, [u, v]) in edges.edges().iter().enumerate() {
        if on_boundary[e] {
            uf.union(*u, *v);
        }
    }
    let mut in_tree = vec![false; ne];
    let mut visited = vec![false; nv];
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    let mut n_visited = 1;
    while let Some(u) = queue.pop_front() {
        for &(e, w) in &adj[adj_ptr[u]..adj_ptr[u + 1]] {
            if !on_boundary[e] && uf.union(u, w) {
                in_tree[e] = true;
            }
            if !visited[w] {
                visited[w] = true;
                n_visited += 1;
                queue.push_back(w);
            }
        }
    }
    if n_visited != used.len() {
        return Err(Error::Assembly(format!(
            "mesh vertex graph is disconnected ({n_visited} of {} vertices reachable)",
            used.len()
        )));
    }
    Ok(GaugeTree {
        on_boundary,
        in_tree,
        root,
    })
}

/// Numbers the unknowns of `mesh` under `partition`, gauging A with
/// [`gauge_tree`].
pub fn build_dofmap(mesh: &Mesh, partition: &DomainPartition, edges: &EdgeSet, gauge_seed: u64) -> Result<DofMap> {
    let nv = mesh.n_vertices();
    let ne = edges.len();
    let GaugeTree {
        on_boundary,
        in_tree,
        root,
    } = gauge_tree(nv, edges, &partition.boundary_faces, gauge_seed)?;

    let mut edge_dof = vec![None; ne];
    let mut free_edges = 0;
    for e in 0..ne {
        if !on_boundary[e] && !in_tree[e] {
            edge_dof[e] = Some(free_edges);
            free_edges += 1;
        }
    }
    let tree_edges: Vec<usize> = (0..ne).filter(|e| in_tree[*e]).collect();

    // scalar potential
    let n_term = partition.n_terminals();
    let ground = n_term.checked_sub(1);
    let mut node_dof = vec![NodeDof::Inactive; nv];
    let mut conductor_nodes = 0;
    let mut node_groups = UnionFind::new(nv);
    for &t in &partition.conductor_tets {
        let vs = mesh.tets()[t].vertices;
        for v in vs {
            if node_dof[v] == NodeDof::Inactive {
                node_dof[v] = NodeDof::Free(0);
                conductor_nodes += 1;
            }
        }
        for v in &vs[1..] {
            node_groups.union(vs[0], *v);
        }
    }
    let mut terminal_nodes = 0;
    for (k, nodes) in partition.terminal_nodes.iter().enumerate() {
        for &v in nodes {
            debug_assert!(node_dof[v] != NodeDof::Inactive);
            node_dof[v] = if Some(k) == ground {
                NodeDof::Ground
            } else {
                NodeDof::Terminal(k)
            };
            terminal_nodes += 1;
        }
    }

    // Conductor groups joined through shared terminals must reach ground;
    // groups touching no terminal are pinned at their lowest node.
    let mut links = UnionFind::new(nv + n_term);
    let mut group_terminals: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
    for (k, nodes) in partition.terminal_nodes.iter().enumerate() {
        for &v in nodes {
            let g = node_groups.find(v);
            links.union(g, nv + k);
            group_terminals[g].insert(k);
        }
    }
    let mut pinned = Vec::new();
    let mut seen_group = vec![false; nv];
    for v in 0..nv {
        if node_dof[v] == NodeDof::Inactive {
            continue;
        }
        let g = node_groups.find(v);
        if seen_group[g] {
            continue;
        }
        seen_group[g] = true;
        if group_terminals[g].is_empty() {
            node_dof[v] = NodeDof::Pinned;
            pinned.push(v);
        } else {
            let reaches_ground = ground.is_some_and(|gt| links.find(g) == links.find(nv + gt));
            if !reaches_ground {
                let ts: Vec<String> = group_terminals[g].iter().map(|k| (k + 1).to_string()).collect();
                return Err(Error::Assembly(format!(
                    "conductor carrying terminal(s) {} has no path to the ground terminal",
                    ts.join(", ")
                )));
            }
        }
    }

    let mut free_nodes = 0;
    for nd in node_dof.iter_mut() {
        if let NodeDof::Free(i) = nd {
            *i = free_nodes;
            free_nodes += 1;
        }
    }

    let counts = DofCounts {
        edges: ne,
        boundary_edges: on_boundary.iter().filter(|b| **b).count(),
        tree_edges: tree_edges.len(),
        free_edges,
        conductor_nodes,
        terminal_nodes,
        pinned_nodes: pinned.len(),
        free_nodes,
        terminal_unknowns: n_term.saturating_sub(1),
    };
    Ok(DofMap {
        edge_dof,
        node_dof,
        tree_edges,
        pinned,
        gauge_root: root,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RegionMap;
    use crate::mesh::fixtures::single_tet;
    use crate::mesh::{
        generate_box_mesh, generate_rod_mesh, generate_star_mesh, partition, rod_region_map, star_region_map, BoxGrid,
        ROD_LATERAL_TAG, ROD_VOLUME_TAG,
    };

    fn rod_dofmap(n_r: usize, n_theta: usize, n_z: usize, seed: u64) -> (Mesh, DomainPartition, EdgeSet, DofMap) {
        let m = generate_rod_mesh(1.0, 0.01, n_r, n_theta, n_z).unwrap();
        let p = partition(&m, &rod_region_map()).unwrap();
        let e = EdgeSet::extract(&m);
        let d = build_dofmap(&m, &p, &e, seed).unwrap();
        (m, p, e, d)
    }

    #[test]
    fn single_tet_has_no_free_edges() {
        let m = single_tet(1, [10; 4]);
        let e = EdgeSet::extract(&m);
        let g = gauge_tree(m.n_vertices(), &e, &m.boundary_faces(), 3).unwrap();
        assert!(g.on_boundary.iter().all(|b| *b));
        assert!(g.in_tree.iter().all(|t| !*t));
    }

    #[test]
    fn smallest_rod_counts_by_enumeration() {
        // n_r=1, n_θ=4, n_z=1: every vertex lies on Γ, so the collapsed
        // graph is a single node and the tree is empty. The surface is a
        // sphere with 10 vertices and 16 triangles, hence 24 edges; the
        // interior ones are the axis and one diagonal per radial quad.
        let (m, p, e, d) = rod_dofmap(1, 4, 1, 0);
        let mut boundary = BTreeSet::new();
        for f in &p.boundary_faces {
            boundary.insert(e.find(f[0], f[1]).unwrap());
            boundary.insert(e.find(f[0], f[2]).unwrap());
            boundary.insert(e.find(f[1], f[2]).unwrap());
        }
        let c = d.counts();
        assert_eq!(c.edges, 29);
        assert_eq!(boundary.len(), 24);
        assert_eq!(c.boundary_edges, 24);
        assert_eq!(c.tree_edges, 0);
        assert_eq!(c.free_edges, 5);
        // both end layers are terminals: no free nodes, one terminal unknown
        assert_eq!(c.conductor_nodes, m.n_vertices());
        assert_eq!(c.terminal_nodes, 10);
        assert_eq!(c.free_nodes, 0);
        assert_eq!(c.pinned_nodes, 0);
        assert_eq!(c.terminal_unknowns, 1);
        assert_eq!(d.n_dofs(), 6);
    }

    #[test]
    fn tree_size_matches_interior_vertices() {
        let (m, p, _, d) = rod_dofmap(2, 6, 4, 0);
        // Γ is connected, so the tree has one edge per interior vertex
        let mut on_gamma = vec![false; m.n_vertices()];
        for f in &p.boundary_faces {
            for v in f {
                on_gamma[*v] = true;
            }
        }
        let interior = on_gamma.iter().filter(|b| !**b).count();
        assert!(interior > 0);
        let c = d.counts();
        assert_eq!(c.tree_edges, interior);
        assert_eq!(c.free_edges, c.edges - c.boundary_edges - c.tree_edges);
        assert_eq!(c.free_nodes, c.conductor_nodes - c.terminal_nodes);
    }

    #[test]
    fn seeds_change_tree_not_counts() {
        let (_, _, _, a) = rod_dofmap(2, 6, 6, 0);
        let (_, _, _, b) = rod_dofmap(2, 6, 6, 17);
        assert_eq!(a.counts(), b.counts());
        assert_ne!(a.gauge_root(), b.gauge_root());
        assert_ne!(a.tree_edges(), b.tree_edges());
    }

    #[test]
    fn floating_load_gets_one_pin() {
        let m = generate_star_mesh(0.05).unwrap();
        let p = partition(&m, &star_region_map()).unwrap();
        let e = EdgeSet::extract(&m);
        let d = build_dofmap(&m, &p, &e, 0).unwrap();
        assert_eq!(d.pinned_nodes().len(), 1);
        let pin = d.pinned_nodes()[0];
        let load_nodes: BTreeSet<usize> = p.components[1]
            .tets
            .iter()
            .flat_map(|t| m.tets()[*t].vertices)
            .collect();
        assert_eq!(pin, *load_nodes.iter().next().unwrap());
        assert_eq!(d.counts().terminal_unknowns, 2);
        // Γ is connected here as well
        assert_eq!(d.node_dof(pin), NodeDof::Pinned);
    }

    #[test]
    fn disconnected_mesh_is_rejected() {
        let a = generate_rod_mesh(1.0, 0.01, 1, 6, 2).unwrap();
        let b = generate_rod_mesh(1.0, 0.01, 1, 6, 2)
            .unwrap()
            .translated([0.1, 0.0, 0.0])
            .retagged(|t| if t == ROD_VOLUME_TAG { t } else { ROD_LATERAL_TAG });
        let m = a.merged(&b).unwrap();
        let p = partition(&m, &rod_region_map()).unwrap();
        let e = EdgeSet::extract(&m);
        let err = build_dofmap(&m, &p, &e, 0).unwrap_err().to_string();
        assert!(err.contains("disconnected"), "{err}");
    }

    #[test]
    fn terminal_without_ground_is_rejected() {
        // two separate columns in air, each reaching the top face with one terminal
        let grid = BoxGrid {
            origin: [0.0; 3],
            spacing: [0.1; 3],
            cells: [5, 3, 3],
        };
        let column = |c: [usize; 3]| c[1] == 1 && c[2] >= 1 && (c[0] == 1 || c[0] == 3);
        let m = generate_box_mesh(
            &grid,
            |c| if column(c) { 1 } else { 2 },
            |f| match (f.axis, f.high, column(f.cell)) {
                (2, true, true) => 20 + f.cell[0] as u32,
                _ => 10,
            },
        )
        .unwrap();
        let map = RegionMap {
            conductor_tags: BTreeSet::from([1]),
            dielectric_tags: BTreeSet::from([2]),
            outer_tags: BTreeSet::from([10]),
            terminal_tags: vec![BTreeSet::from([21]), BTreeSet::from([23])],
            ..Default::default()
        };
        let p = partition(&m, &map).unwrap();
        let e = EdgeSet::extract(&m);
        let err = build_dofmap(&m, &p, &e, 0).unwrap_err().to_string();
        assert!(err.contains("ground"), "{err}");
    }
}
