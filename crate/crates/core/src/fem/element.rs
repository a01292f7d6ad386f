//! Lowest-order edge (Whitney) and nodal basis functions on a tet.
//!
//! Edge `k = (i, j)` of [`LOCAL_EDGES`] carries `w_k = λ_i ∇λ_j − λ_j ∇λ_i`
//! oriented from local vertex `i` to `j`; `curl w_k = 2 ∇λ_i × ∇λ_j`.
//! All integrals below are closed forms based on
//! `∫ λ_a λ_b dV = vol (1 + δ_ab) / 20`, exact for the products assembled.

use crate::mesh::{cross, dot, sub, Point, LOCAL_EDGES};

#[derive(Debug, Clone, Copy)]
pub struct TetGeometry {
    pub volume: f64,
    /// Gradients of the barycentric coordinates.
    pub grads: [Point; 4],
}

impl TetGeometry {
    pub fn new(p: &[Point; 4]) -> Self {
        let e1 = sub(p[1], p[0]);
        let e2 = sub(p[2], p[0]);
        let e3 = sub(p[3], p[0]);
        let det = dot(e1, cross(e2, e3));
        let g1 = cross(e2, e3).map(|c| c / det);
        let g2 = cross(e3, e1).map(|c| c / det);
        let g3 = cross(e1, e2).map(|c| c / det);
        let g0 = [
            -(g1[0] + g2[0] + g3[0]),
            -(g1[1] + g2[1] + g3[1]),
            -(g1[2] + g2[2] + g3[2]),
        ];
        TetGeometry {
            volume: det / 6.0,
            grads: [g0, g1, g2, g3],
        }
    }

    /// `curl w_k` for each local edge (constant on the tet).
    pub fn edge_curls(&self) -> [Point; 6] {
        LOCAL_EDGES.map(|(i, j)| cross(self.grads[i], self.grads[j]).map(|c| 2.0 * c))
    }

    /// `w_k` evaluated at barycentric coordinates `lambda`.
    pub fn edge_values(&self, lambda: [f64; 4]) -> [Point; 6] {
        let g = &self.grads;
        LOCAL_EDGES.map(|(i, j)| {
            [
                lambda[i] * g[j][0] - lambda[j] * g[i][0],
                lambda[i] * g[j][1] - lambda[j] * g[i][1],
                lambda[i] * g[j][2] - lambda[j] * g[i][2],
            ]
        })
    }

    /// `∫ curl w_k · curl w_l`.
    pub fn curl_curl(&self) -> [[f64; 6]; 6] {
        let c = self.edge_curls();
        let mut k = [[0.0; 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                k[a][b] = self.volume * dot(c[a], c[b]);
            }
        }
        k
    }

    /// `∫ w_k · w_l`.
    pub fn edge_mass(&self) -> [[f64; 6]; 6] {
        let g = &self.grads;
        let gg = |a: usize, b: usize| dot(g[a], g[b]);
        let ll = |a: usize, b: usize| if a == b { self.volume / 10.0 } else { self.volume / 20.0 };
        let mut m = [[0.0; 6]; 6];
        for (k, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
            for (l, &(p, q)) in LOCAL_EDGES.iter().enumerate() {
                m[k][l] = ll(i, p) * gg(j, q) - ll(i, q) * gg(j, p) - ll(j, p) * gg(i, q) + ll(j, q) * gg(i, p);
            }
        }
        m
    }

    /// `∫ w_k · ∇λ_n`.
    pub fn edge_grad(&self) -> [[f64; 4]; 6] {
        let g = &self.grads;
        let mut c = [[0.0; 4]; 6];
        for (k, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
            let d = sub(g[j], g[i]);
            for n in 0..4 {
                c[k][n] = 0.25 * self.volume * dot(d, g[n]);
            }
        }
        c
    }

    /// `∫ ∇λ_m · ∇λ_n`.
    pub fn laplacian(&self) -> [[f64; 4]; 4] {
        let mut l = [[0.0; 4]; 4];
        for m in 0..4 {
            for n in 0..4 {
                l[m][n] = self.volume * dot(self.grads[m], self.grads[n]);
            }
        }
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_tet() -> [Point; 4] {
        [[0.1, -0.2, 0.05], [1.3, 0.1, -0.2], [0.2, 0.9, 0.3], [-0.1, 0.4, 1.1]]
    }

    /// Four-point degree-2 rule; exact for the quadratic products w_k · w_l.
    fn quad_points() -> [[f64; 4]; 4] {
        let a = 0.585_410_196_624_968_5;
        let b = 0.138_196_601_125_010_5;
        [[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]]
    }

    #[test]
    fn barycentric_gradients_reproduce_coordinates() {
        let p = sample_tet();
        let g = TetGeometry::new(&p);
        // ∇λ_i · (p_j − p_0) = δ_ij − δ_i0
        for i in 0..4 {
            for j in 1..4 {
                let v = dot(g.grads[i], sub(p[j], p[0]));
                let expected = (i == j) as i32 as f64 - (i == 0) as i32 as f64;
                assert!((v - expected).abs() < 1e-12);
            }
        }
        assert!(g.volume > 0.0);
    }

    #[test]
    fn mass_matches_quadrature() {
        let g = TetGeometry::new(&sample_tet());
        let m = g.edge_mass();
        let mut q = [[0.0; 6]; 6];
        for lam in quad_points() {
            let w = g.edge_values(lam);
            for a in 0..6 {
                for b in 0..6 {
                    q[a][b] += 0.25 * g.volume * dot(w[a], w[b]);
                }
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                assert!((m[a][b] - q[a][b]).abs() < 1e-12 * (1.0 + m[a][a].abs()));
            }
        }
    }

    #[test]
    fn edge_tangential_moments_are_unit() {
        // ∫_edge w_k · t ds = 1 along its own edge, 0 along the others.
        let p = sample_tet();
        let g = TetGeometry::new(&p);
        for (k, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
            let t = sub(p[j], p[i]);
            // w is linear along the edge; midpoint rule is exact.
            let mut lam = [0.0; 4];
            lam[i] = 0.5;
            lam[j] = 0.5;
            let w = g.edge_values(lam);
            for (l, wl) in w.iter().enumerate() {
                let v = dot(*wl, t);
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-12, "edge {k} basis {l}: {v}");
            }
        }
    }

    #[test]
    fn gradients_lie_in_curl_kernel() {
        // ∇λ_n = Σ_k (∇λ_n · t_k) w_k  so curl-curl applied to it vanishes.
        let p = sample_tet();
        let g = TetGeometry::new(&p);
        let k = g.curl_curl();
        for n in 0..4 {
            let coeffs: Vec<f64> = LOCAL_EDGES
                .iter()
                .map(|&(i, j)| (j == n) as i32 as f64 - (i == n) as i32 as f64)
                .collect();
            for row in k.iter() {
                let v: f64 = row.iter().zip(&coeffs).map(|(a, b)| a * b).sum();
                assert!(v.abs() < 1e-10);
            }
            // and the coupling reproduces the Laplacian: Σ_k c_k C_kn' = L_nn'
            let c = g.edge_grad();
            let l = g.laplacian();
            for m in 0..4 {
                let v: f64 = (0..6).map(|e| coeffs[e] * c[e][m]).sum();
                assert!((v - l[n][m]).abs() < 1e-10);
            }
        }
    }
}
