//! LU factorization with partial pivoting: linear solves and determinants.

use super::{sigma_min, CMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

struct Lu {
    /// Combined L (unit lower) and U factors.
    lu: CMatrix,
    /// Row permutation applied to the input.
    perm: Vec<usize>,
    sign_flips: usize,
}

fn factor(a: &CMatrix) -> Result<Option<Lu>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite entries in solve".into()));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign_flips = 0usize;
    // Pivot collapse is judged relative to the matrix's own scale; a tiny
    // well-conditioned matrix (norm near the underflow range) still factors.
    let scale = a.max_norm();
    if scale == 0.0 {
        return Ok(None);
    }
    for k in 0..n {
        let (mut pivot_row, mut pivot_mag) = (k, lu[(k, k)].norm());
        for i in (k + 1)..n {
            let mag = lu[(i, k)].norm();
            if mag > pivot_mag {
                pivot_row = i;
                pivot_mag = mag;
            }
        }
        if pivot_mag <= f64::EPSILON * scale * n as f64 {
            return Ok(None);
        }
        if pivot_row != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = t;
            }
            perm.swap(k, pivot_row);
            sign_flips += 1;
        }
        let inv = lu[(k, k)].finv();
        for i in (k + 1)..n {
            let factor = lu[(i, k)] * inv;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok(Some(Lu {
        lu,
        perm,
        sign_flips,
    }))
}

/// Solve A X = B. On a matrix singular to working precision the error carries
/// the smallest singular value of A.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeError(format!(
            "solve: A is {}x{}, B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let Some(f) = factor(a)? else {
        return Err(Error::SingularSolve {
            sigma_min: sigma_min(a)?,
        });
    };
    let n = a.rows();
    let k = b.cols();
    // Apply the row permutation to B, then forward/back substitution.
    let mut x = CMatrix::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            x[(i, j)] = b[(f.perm[i], j)];
        }
    }
    for col in 0..k {
        for i in 1..n {
            let mut acc = x[(i, col)];
            for j in 0..i {
                acc -= f.lu[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[(i, col)];
            for j in (i + 1)..n {
                acc -= f.lu[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc * f.lu[(i, i)].finv();
        }
    }
    if !x.is_finite() {
        return Err(Error::Numerical("non-finite solve result".into()));
    }
    Ok(x)
}

/// Determinant via LU (0 when the factorization finds no usable pivot).
pub fn determinant(a: &CMatrix) -> Result<Complex64> {
    let Some(f) = factor(a)? else {
        return Ok(Complex64::default());
    };
    let mut det = if f.sign_flips % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    };
    for i in 0..a.rows() {
        det *= f.lu[(i, i)];
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn solve_matches_worked_two_by_two() {
        // A = [[0, -1], [1, 0]], B = [1, 0]^T -> X = [0, -1]^T
        let a = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let b = CMatrix::from_real_rows(&[&[1.0], &[0.0]]);
        let x = solve(&a, &b).unwrap();
        assert!((x[(0, 0)] - c64(0.0, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - c64(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn residual_contract_on_random_system() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 12;
        let a = CMatrix::from_fn(n, n, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let b = CMatrix::from_fn(n, 3, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let x = solve(&a, &b).unwrap();
        let resid = (&(&a * &x) - &b).fro_norm();
        assert!(resid <= 1e-12 * a.fro_norm() * x.fro_norm().max(1.0));
    }

    #[test]
    fn singular_matrix_reports_sigma_min() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let b = CMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        match solve(&a, &b) {
            Err(Error::SingularSolve { sigma_min }) => assert!(sigma_min < 1e-12),
            other => panic!("expected SingularSolve, got {other:?}"),
        }
    }

    #[test]
    fn determinant_of_worked_pencil_coefficient() {
        // M1 of the scalar Laurent worked pencil; det = -1 by cofactor expansion.
        let m1 = CMatrix::from_real_rows(&[&[0.0, -1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 1.0, 2.0]]);
        let d = determinant(&m1).unwrap();
        assert!((d - c64(-1.0, 0.0)).norm() < 1e-14);
    }
}
