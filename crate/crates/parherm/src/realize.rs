//! Taylor expansion at infinity of strictly proper rational matrices and the
//! block-Hankel route to a strongly minimal realization
//! R_in(z) = B (z A1 - A0)^{-1} C.
//!
//! The Hankel order k is grown until the rank of the block Hankel matrix
//! stagnates; that rank r_f is the total polar degree and becomes the state
//! dimension. All factors come from one SVD so the invertible core
//! H_hat = U1^* H V1 doubles as the leading pencil coefficient.

use crate::error::{Error, Result};
use crate::numerics::{c64, pencil_eigenvalues, svd, svd_rank, CMatrix, PencilEigs, RankDecision};
use crate::rmatrix::{sample_points, Pencil, Realization, RationalMatrix};

/// Hankel order cap for the stagnation rule.
pub const MAX_HANKEL_ORDER: usize = 64;

/// Coefficients R_{-1}, R_{-2}, ... of the expansion at infinity,
/// R_in(z) = sum_j R_{-j} z^{-j}. Closed form per pole term:
/// A_i/(z-lambda)^i contributes C(j-1, i-1) lambda^(j-i) A_i to R_{-j}.
pub fn taylor_coeffs(r_in: &RationalMatrix, count: usize) -> Result<Vec<CMatrix>> {
    if !r_in.is_strictly_proper() {
        return Err(Error::NotStrictlyProper);
    }
    let mut out = vec![CMatrix::zeros(r_in.m, r_in.n); count];
    for t in &r_in.terms {
        for (im1, a) in t.coeffs.iter().enumerate() {
            let i = im1 + 1;
            let mut binom = 1.0f64; // C(j-1, i-1) at j = i
            let mut lampow = c64(1.0, 0.0); // lambda^(j-i)
            for j in i..=count {
                if j > i {
                    binom = binom * (j - 1) as f64 / (j - i) as f64;
                    lampow *= t.lambda;
                }
                out[j - 1] = &out[j - 1] + &a.scale(lampow * binom);
            }
        }
    }
    Ok(out)
}

/// Block Hankel data at order k with the SVD-derived factors of the
/// realization formula.
#[derive(Debug, Clone)]
pub struct HankelPair {
    pub k: usize,
    pub h: CMatrix,
    pub h_sigma: CMatrix,
    pub r_f: usize,
    /// km x r_f and kn x r_f orthonormal-column factors of H.
    pub u1: CMatrix,
    pub v1: CMatrix,
    /// First block rows of u1 / v1 (m x r_f, n x r_f).
    pub u11: CMatrix,
    pub v11: CMatrix,
    /// r_f x r_f invertible core U1^* H V1.
    pub h_hat: CMatrix,
    pub rank_decision: RankDecision,
}

pub fn build_hankel(coeffs: &[CMatrix], k: usize) -> Result<HankelPair> {
    build_hankel_with(coeffs, k, 1e-10)
}

pub fn build_hankel_with(coeffs: &[CMatrix], k: usize, rel_tol: f64) -> Result<HankelPair> {
    if coeffs.len() < 2 * k {
        return Err(Error::NeedMoreCoeffs {
            need: 2 * k,
            got: coeffs.len(),
        });
    }
    if k == 0 || coeffs.is_empty() {
        return Err(Error::InvalidInput("Hankel order must be positive".into()));
    }
    let (m, n) = (coeffs[0].rows(), coeffs[0].cols());
    let mut h = CMatrix::zeros(k * m, k * n);
    let mut h_sigma = CMatrix::zeros(k * m, k * n);
    for bi in 0..k {
        for bj in 0..k {
            h.set_block(bi * m, bj * n, &coeffs[bi + bj]);
            h_sigma.set_block(bi * m, bj * n, &coeffs[bi + bj + 1]);
        }
    }
    let dec = svd_rank(&h, rel_tol)?;
    let r_f = dec.rank;
    let fac = svd(&h)?;
    let u1 = fac.u.block(0, k * m, 0, r_f);
    let v1 = fac.v.block(0, k * n, 0, r_f);
    let u11 = u1.block(0, m, 0, r_f);
    let v11 = v1.block(0, n, 0, r_f);
    let h_hat = &(&u1.adjoint() * &h) * &v1;
    Ok(HankelPair {
        k,
        h,
        h_sigma,
        r_f,
        u1,
        v1,
        u11,
        v11,
        h_hat,
        rank_decision: dec,
    })
}

impl HankelPair {
    /// Realization blocks read straight off the factors:
    /// A1 = H_hat, A0 = U1^* H_sigma V1, B = U11 H_hat, C = H_hat V11^*.
    pub fn realization(&self) -> Result<Realization> {
        let a0 = &(&self.u1.adjoint() * &self.h_sigma) * &self.v1;
        Realization::new(
            self.h_hat.clone(),
            a0,
            &self.u11 * &self.h_hat,
            &self.h_hat * &self.v11.adjoint(),
        )
    }
}

/// System pencil wrapping a realization with zero feedthrough:
/// [[-(z A1 - A0), C], [B, 0]].
pub fn realization_pencil(real: &Realization) -> Result<Pencil> {
    let s = real.state_dim();
    let (mo, ni) = (real.io_rows(), real.io_cols());
    let mut m1 = CMatrix::zeros(s + mo, s + ni);
    let mut m0 = CMatrix::zeros(s + mo, s + ni);
    m1.set_block(0, 0, &real.a1.scale(c64(-1.0, 0.0)));
    m0.set_block(0, 0, &real.a0);
    m0.set_block(0, s, &real.c);
    m0.set_block(s, 0, &real.b);
    Pencil::new(m1, m0, s, mo, ni)
}

/// Eigenvalues of the state pencil z A1 - A0 (the pole locations realized).
pub fn realization_poles(real: &Realization) -> Result<PencilEigs> {
    pencil_eigenvalues(&real.a1, &real.a0.scale(c64(-1.0, 0.0)))
}

/// Grow k until rank(H_k) = rank(H_{k+1}), then realize from the stagnated
/// pair and certify the transfer at sample points.
pub fn minimal_realization(r_in: &RationalMatrix, rel_tol: f64) -> Result<(Realization, Pencil)> {
    if !r_in.is_strictly_proper() {
        return Err(Error::NotStrictlyProper);
    }
    if r_in.terms.is_empty() {
        let real = Realization::new(
            CMatrix::zeros(0, 0),
            CMatrix::zeros(0, 0),
            CMatrix::zeros(r_in.m, 0),
            CMatrix::zeros(0, r_in.n),
        )?;
        let pencil = realization_pencil(&real)?;
        return Ok((real, pencil));
    }
    let scale = r_in.eval_scale();
    let mut prev_rank: Option<usize> = None;
    for k in 1..=MAX_HANKEL_ORDER {
        let coeffs = taylor_coeffs(r_in, 2 * k)?;
        let pair = build_hankel_with(&coeffs, k, rel_tol)?;
        if prev_rank == Some(pair.r_f) {
            let real = pair.realization()?;
            let pencil = realization_pencil(&real)?;
            let certified = sample_points(10).into_iter().all(|z0| {
                match (pencil.transfer(z0), r_in.eval(z0)) {
                    (Ok(lhs), Ok(rhs)) => (&lhs - &rhs).fro_norm() <= 1e-9 * scale,
                    _ => true, // a system pole under the sample point: skip
                }
            });
            if certified {
                return Ok((real, pencil));
            }
        }
        prev_rank = Some(pair.r_f);
    }
    Err(Error::NoConvergence {
        cap: MAX_HANKEL_ORDER,
    })
}
