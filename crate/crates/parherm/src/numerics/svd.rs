//! One-sided Jacobi SVD for complex matrices.
//!
//! Rotations orthogonalize column pairs of a working copy; the accumulated
//! right factor stays unitary by construction, so singular values come out
//! with high relative accuracy. Both factors are returned square (the left
//! factor is completed to a full basis), which the Hankel compression step
//! needs for its null-space blocks.

use super::{c64, CMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Svd {
    /// Full unitary, rows x rows.
    pub u: CMatrix,
    /// Descending, length min(rows, cols).
    pub sigma: Vec<f64>,
    /// Full unitary, cols x cols.
    pub v: CMatrix,
}

const MAX_SWEEPS: usize = 64;
const OFF_TOL: f64 = 1e-14;

pub fn svd(a: &CMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite entries in SVD input".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Ok(Svd {
            u: CMatrix::identity(m),
            sigma: vec![],
            v: CMatrix::identity(n),
        });
    }
    if m < n {
        let t = svd(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }

    let mut b = a.clone();
    let mut v = CMatrix::identity(n);
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (app, aqq, apq) = gram_entries(&b, p, q);
                let r = apq.norm();
                if r <= OFF_TOL * (app * aqq).sqrt() || r == 0.0 {
                    continue;
                }
                rotated = true;
                // Phase-align the off-diagonal entry, then a real Jacobi rotation.
                let phase = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c0 = 1.0 / (1.0 + t * t).sqrt();
                let s0 = c0 * t;
                let w = phase.conj(); // e^{-i phi}
                rotate_cols(&mut b, p, q, c0, s0, w);
                rotate_cols(&mut v, p, q, c0, s0, w);
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();

    let mut v_sorted = CMatrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        for i in 0..n {
            v_sorted[(i, jj)] = v[(i, j)];
        }
    }

    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for (jj, &j) in order.iter().enumerate() {
        if sigma[jj] > 0.0 {
            let inv = 1.0 / sigma[jj];
            u_cols.push((0..m).map(|i| b[(i, j)] * inv).collect());
        }
    }
    complete_basis(&mut u_cols, m);
    let mut u = CMatrix::zeros(m, m);
    for (j, col) in u_cols.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = col[i];
        }
    }

    Ok(Svd { u, sigma, v: v_sorted })
}

fn gram_entries(b: &CMatrix, p: usize, q: usize) -> (f64, f64, Complex64) {
    let m = b.rows();
    let mut app = 0.0;
    let mut aqq = 0.0;
    let mut apq = Complex64::default();
    for i in 0..m {
        let x = b[(i, p)];
        let y = b[(i, q)];
        app += x.norm_sqr();
        aqq += y.norm_sqr();
        apq += x.conj() * y;
    }
    (app, aqq, apq)
}

/// Right-multiply columns (p, q) by [[c, s],[-s w, c w]] with w = e^{-i phi}.
fn rotate_cols(b: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, w: Complex64) {
    let m = b.rows();
    for i in 0..m {
        let x = b[(i, p)];
        let y = b[(i, q)] * w;
        b[(i, p)] = x * c - y * s;
        b[(i, q)] = x * s + y * c;
    }
}

/// Extend an orthonormal column set to a full basis of dimension `dim` by
/// re-orthogonalized Gram-Schmidt over the canonical vectors.
fn complete_basis(cols: &mut Vec<Vec<Complex64>>, dim: usize) {
    let mut cand = 0usize;
    while cols.len() < dim {
        assert!(cand < dim, "basis completion exhausted candidates");
        let mut r: Vec<Complex64> = vec![Complex64::default(); dim];
        r[cand] = c64(1.0, 0.0);
        for _pass in 0..2 {
            for col in cols.iter() {
                let dot: Complex64 = col.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
                for (ri, ci) in r.iter_mut().zip(col) {
                    *ri -= dot * ci;
                }
            }
        }
        let nrm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            let inv = 1.0 / nrm;
            cols.push(r.into_iter().map(|z| z * inv).collect());
        }
        cand += 1;
    }
}
