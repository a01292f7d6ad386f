//! Conjugate orthogonal conjugate gradients (COCG) with Jacobi scaling for
//! complex-symmetric systems. Uses the unconjugated bilinear form `xᵀy`.

use num_complex::Complex64;

use super::sparse::{norm2, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn bilinear(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Solves `A x = b` starting from `x = 0`.
pub fn cocg(a: &CsrMatrix, b: &[Complex64], tol: f64, max_iter: usize) -> Result<(Vec<Complex64>, KrylovOutcome)> {
    let n = a.n();
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let nb = norm2(b);
    if nb == 0.0 {
        return Ok((
            x,
            KrylovOutcome {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let inv_diag: Vec<Complex64> = a
        .diagonal()
        .iter()
        .map(|d| {
            if d.norm() > 0.0 {
                1.0 / d
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();

    let mut r = b.to_vec();
    let mut z: Vec<Complex64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut q = vec![zero; n];
    let mut rho = bilinear(&r, &z);
    let mut res = 1.0;
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut q);
        let pq = bilinear(&p, &q);
        if pq.norm() == 0.0 || !pq.is_finite() {
            return Err(Error::Solve {
                reason: "COCG breakdown (pᵀAp = 0)".into(),
                iterations: it,
                residual: res,
            });
        }
        let alpha = rho / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res = norm2(&r) / nb;
        if res <= tol {
            return Ok((
                x,
                KrylovOutcome {
                    iterations: it,
                    relative_residual: res,
                },
            ));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rho_new = bilinear(&r, &z);
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solve {
        reason: "COCG did not converge".into(),
        iterations: max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::sparse::relative_residual;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, Complex64::new(2.5, 0.3 + 0.01 * i as f64)));
            if i + 1 < n {
                t.push((i, i + 1, Complex64::new(-1.0, -0.1)));
                t.push((i + 1, i, Complex64::new(-1.0, -0.1)));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn converges_on_symmetric_system() {
        let a = tridiag(200);
        let b: Vec<Complex64> = (0..200).map(|i| Complex64::new((i as f64).sin(), 1.0)).collect();
        let (x, out) = cocg(&a, &b, 1e-12, 1000).unwrap();
        assert!(out.relative_residual <= 1e-12);
        assert!(relative_residual(&a, &x, &b) < 1e-11);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = tridiag(5);
        let (x, out) = cocg(&a, &[Complex64::new(0.0, 0.0); 5], 1e-10, 10).unwrap();
        assert!(x.iter().all(|v| v.norm() == 0.0));
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn reports_non_convergence() {
        let a = tridiag(100);
        let b = vec![Complex64::new(1.0, 0.0); 100];
        match cocg(&a, &b, 1e-14, 2) {
            Err(Error::Solve { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("{other:?}"),
        }
    }
}
