use super::Mesh;

/// Local vertex pairs of the six tet edges.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Unique undirected edges, each stored low→high global vertex index and
/// sorted lexicographically, plus the tet→edge incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSet {
    edges: Vec<[usize; 2]>,
    tet_edges: Vec<[usize; 6]>,
    tet_signs: Vec<[f64; 6]>,
}

impl EdgeSet {
    pub fn extract(mesh: &Mesh) -> Self {
        let mut edges: Vec<[usize; 2]> = mesh
            .tets()
            .iter()
            .flat_map(|t| {
                LOCAL_EDGES.map(|(a, b)| {
                    let (u, v) = (t.vertices[a], t.vertices[b]);
                    [u.min(v), u.max(v)]
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let mut tet_edges = Vec::with_capacity(mesh.tets().len());
        let mut tet_signs = Vec::with_capacity(mesh.tets().len());
        for t in mesh.tets() {
            let mut idx = [0usize; 6];
            let mut sgn = [0.0; 6];
            for (k, (a, b)) in LOCAL_EDGES.iter().enumerate() {
                let (u, v) = (t.vertices[*a], t.vertices[*b]);
                let key = [u.min(v), u.max(v)];
                idx[k] = edges.binary_search(&key).expect("edge present");
                sgn[k] = if u < v { 1.0 } else { -1.0 };
            }
            tet_edges.push(idx);
            tet_signs.push(sgn);
        }
        Self {
            edges,
            tet_edges,
            tet_signs,
        }
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Global edge indices of tet `t` in [`LOCAL_EDGES`] order.
    pub fn tet_edges(&self, t: usize) -> &[usize; 6] {
        &self.tet_edges[t]
    }

    /// +1 where the local traversal runs low→high global index, −1 otherwise.
    pub fn tet_signs(&self, t: usize) -> &[f64; 6] {
        &self.tet_signs[t]
    }

    pub fn find(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&[u.min(v), u.max(v)]).ok()
    }
}
