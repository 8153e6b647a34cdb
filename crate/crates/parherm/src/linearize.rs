//! The palindromic / anti-palindromic linearization constructors.
//!
//! Every route produces a system pencil L(z) = z M1 + M0 whose transfer is
//! (1+z) R(z) and whose stored coefficients satisfy M0 = +-M1^* exactly: each
//! constructor assembles M1 (and the blocks that mathematically determine M0)
//! and then stores M0 as the conjugate transpose, so the structure deviation
//! is identically zero rather than rounding-small.
//!
//! Routes:
//! - stable split: Hankel realization of the stable part in a 3x3-block frame
//!   whose anti-stable half is the adjoint of the stable one;
//! - Taylor: same frame, but the realization blocks are used verbatim from the
//!   Hankel SVD factors (no leading-coefficient standardization);
//! - one-pole family: bidiagonal K_lambda frames per pole, optionally pushed
//!   through the block-Hankel congruence, with an SVD compression that trims
//!   the state to twice the Hankel rank when the top coefficient is singular;
//! - Möbius: palindromization of a caller-supplied Hermitian / *-even pencil
//!   for the transformed matrix (covers unit-circle poles).

use crate::decompose::{polar_sections, split_stability, StabilitySplit, DEFAULT_BAND};
use crate::error::{Error, Result};
use crate::moebius::{palindromize_pencil, substitute, Direction, MoebiusMap};
use crate::numerics::{c64, pencil_eigenvalues, sigma_min, svd, svd_rank, CMatrix};
use crate::rmatrix::{
    sample_points, ParaKind, Pencil, PoleTerm, Realization, RationalMatrix, POLE_MERGE_TOL,
};
use num_complex::Complex64;

/// Relative threshold on sigma_min(R_d) deciding plain vs compressed routing.
pub const RD_INVERTIBILITY_RTOL: f64 = 1e-8;
/// Structure tolerance applied to inputs before construction.
pub const STRUCTURE_TOL: f64 = 1e-9;

fn finish(m1: CMatrix, state_dim: usize, io: usize, kind: ParaKind) -> Result<Pencil> {
    let m0 = if kind.sign() > 0.0 {
        m1.adjoint()
    } else {
        m1.adjoint().scale(c64(-1.0, 0.0))
    };
    Pencil::new(m1, m0, state_dim, io, io)
}

/// Symmetrize the constant block to the exact (skew-)Hermitian part after
/// checking it was already there to tolerance.
fn certified_constant(r0: &CMatrix, kind: ParaKind) -> Result<CMatrix> {
    if !r0.is_square() {
        return Err(Error::NotSquare {
            rows: r0.rows(),
            cols: r0.cols(),
        });
    }
    let (sym, identity) = match kind {
        ParaKind::Hermitian => (r0.hermitian_part(), "Hermitian constant part"),
        ParaKind::Skew => (r0.skew_hermitian_part(), "skew-Hermitian constant part"),
    };
    let dev = (&sym - r0).max_norm();
    let tol = STRUCTURE_TOL * r0.max_norm().max(1.0);
    if dev > tol {
        return Err(Error::StructureMismatch {
            identity,
            deviation: dev,
            tol,
        });
    }
    Ok(sym)
}

// ---------------------------------------------------------- split frames --

/// The 3x3-block frame around a stable realization (A1, A0, B, C):
///
/// ```text
/// [ 0              A0 - z A1      C          ]
/// [ s(z A0* - A1*) 0              s B*(1+z)  ]
/// [ s z C*         B(1+z)         R0(1+z)    ]
/// ```
///
/// with s = +1 (Hermitian kind) or -1 (skew); transfer is
/// (1+z)(B(zA1-A0)^{-1}C + s z C*(A1* - z A0*)^{-1} B* + R0).
fn split_frame(real: &Realization, r0: &CMatrix, kind: ParaKind) -> Result<Pencil> {
    let nr = real.state_dim();
    let m = r0.rows();
    if real.io_rows() != m || real.io_cols() != m {
        return Err(Error::ShapeError(format!(
            "realization IO {}x{} against constant block {}x{}",
            real.io_rows(),
            real.io_cols(),
            m,
            m
        )));
    }
    let r0 = certified_constant(r0, kind)?;
    let s = kind.sign();
    let total = 2 * nr + m;
    let mut m1 = CMatrix::zeros(total, total);
    m1.set_block(0, nr, &real.a1.scale(c64(-1.0, 0.0)));
    m1.set_block(nr, 0, &real.a0.adjoint().scale(c64(s, 0.0)));
    m1.set_block(nr, 2 * nr, &real.b.adjoint().scale(c64(s, 0.0)));
    m1.set_block(2 * nr, 0, &real.c.adjoint().scale(c64(s, 0.0)));
    m1.set_block(2 * nr, nr, &real.b);
    m1.set_block(2 * nr, 2 * nr, &r0);
    // M0 = +-M1^* fills in A0, C, -A1^*, and the constant border halves.
    finish(m1, 2 * nr, m, kind)
}

fn check_input_structure(r: &RationalMatrix, kind: ParaKind) -> Result<()> {
    let tag = r.is_structured(kind.rational_kind(), STRUCTURE_TOL)?;
    if !tag.passes() {
        return Err(Error::StructureMismatch {
            identity: match kind {
                ParaKind::Hermitian => "para-Hermitian input",
                ParaKind::Skew => "para-skew-Hermitian input",
            },
            deviation: tag.deviation,
            tol: STRUCTURE_TOL * r.coeff_scale().max(1.0),
        });
    }
    Ok(())
}

fn split_without_circle(r: &RationalMatrix, kind: ParaKind, band: f64) -> Result<StabilitySplit> {
    check_input_structure(r, kind)?;
    let split = split_stability(r, band);
    if split.has_unit_circle_part() {
        return Err(Error::NeedsMoebiusRoute);
    }
    Ok(split)
}

/// Stable-split route: Hankel-realize the stable part, standardize the
/// leading coefficient to the identity, and wrap in the 3x3-block frame.
pub fn linearize_stable_split(r: &RationalMatrix, kind: ParaKind) -> Result<Pencil> {
    linearize_stable_split_with(r, kind, DEFAULT_BAND)
}

pub fn linearize_stable_split_with(
    r: &RationalMatrix,
    kind: ParaKind,
    band: f64,
) -> Result<Pencil> {
    let split = split_without_circle(r, kind, band)?;
    let (real, _) = crate::realize::minimal_realization(&split.r_in, 1e-10)?;
    let real = standardize_leading(&real)?;
    split_frame(&real, &split.r0, kind)
}

/// Rescale a realization so A1 = I: (I, A0 A1^{-1}, B A1^{-1}, C).
fn standardize_leading(real: &Realization) -> Result<Realization> {
    let n = real.state_dim();
    if n == 0 {
        return Ok(real.clone());
    }
    // Right division X A1 = Y via the transposed system.
    let a1t = real.a1.transpose();
    let a0 = crate::numerics::solve(&a1t, &real.a0.transpose())?.transpose();
    let b = crate::numerics::solve(&a1t, &real.b.transpose())?.transpose();
    Realization::new(CMatrix::identity(n), a0, b, real.c.clone())
}

/// Taylor route: identical frame, Hankel SVD factors used verbatim
/// (A1 = H_hat stays a general invertible core).
pub fn linearize_taylor(r: &RationalMatrix, kind: ParaKind) -> Result<Pencil> {
    linearize_taylor_with(r, kind, DEFAULT_BAND)
}

pub fn linearize_taylor_with(r: &RationalMatrix, kind: ParaKind, band: f64) -> Result<Pencil> {
    let split = split_without_circle(r, kind, band)?;
    let (real, _) = crate::realize::minimal_realization(&split.r_in, 1e-10)?;
    split_frame(&real, &split.r0, kind)
}

// ------------------------------------------------------------- anti-stable --

/// Closed-form description of the anti-stable companion of a stable
/// realization: evaluates to s z C^*(A1^* - z A0^*)^{-1} B^*.
#[derive(Debug, Clone)]
pub struct AntistableSide {
    pub real: Realization,
    pub kind: ParaKind,
}

pub fn realization_antistable(real_in: &Realization, kind: ParaKind) -> Result<AntistableSide> {
    let n = real_in.state_dim();
    let dec = svd_rank(&real_in.a1, 1e-10)?;
    if dec.rank < n {
        return Err(Error::NotMinimalAtInfinity {
            row_rank: dec.rank,
            col_rank: dec.rank,
            state: n,
        });
    }
    Ok(AntistableSide {
        real: real_in.clone(),
        kind,
    })
}

impl AntistableSide {
    pub fn eval(&self, z0: Complex64) -> Result<CMatrix> {
        let r = &self.real;
        if r.state_dim() == 0 {
            return Ok(CMatrix::zeros(r.io_cols(), r.io_rows()));
        }
        let a = &r.a1.adjoint() - &r.a0.adjoint().scale(z0);
        let x = crate::numerics::solve(&a, &r.b.adjoint())?;
        Ok((&r.c.adjoint() * &x).scale(z0 * self.kind.sign()))
    }
}

// ---------------------------------------------------------- one-pole family --

/// All intermediate data of a one-pole construction with a zero constant
/// corner; combinable across poles.
#[derive(Debug, Clone)]
pub struct OnePoleBlock {
    pub lambda: Complex64,
    /// K_lambda(z) = z k1 + k0: block lower bidiagonal, diagonal (lambda - z)I,
    /// subdiagonal I.
    pub k1: CMatrix,
    pub k0: CMatrix,
    /// Stacked numerators (R_d; ...; R_1).
    pub f: CMatrix,
    /// Stacked adjoints (R_d^*; ...; R_1^*) (Hankel/compressed routes).
    pub g: Option<CMatrix>,
    /// Block anti-triangular Hankel of the numerators (Hankel/compressed).
    pub h_pole: Option<CMatrix>,
    /// Assembled pencil, corner D = 0.
    pub pencil: Pencil,
    pub kind: ParaKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnePoleRoute {
    Plain,
    Hankel,
    Compressed,
}

fn pole_term_checked(term: &PoleTerm, m: usize) -> Result<(usize, Complex64)> {
    let d = term.coeffs.len();
    if d == 0 || term.coeffs.iter().all(|c| c.max_norm() == 0.0) {
        return Err(Error::InvalidTerm("pole term with all-zero numerators".into()));
    }
    for c in &term.coeffs {
        if c.rows() != m || c.cols() != m {
            return Err(Error::ShapeError("pole numerators must be square blocks".into()));
        }
    }
    let rho = term.lambda.norm();
    if (rho - 1.0).abs() <= POLE_MERGE_TOL {
        return Err(Error::NeedsMoebiusRoute);
    }
    if rho > 1.0 {
        return Err(Error::InvalidInput(
            "one-pole frames take poles inside the unit circle; pass the stable part".into(),
        ));
    }
    Ok((d, term.lambda))
}

fn bidiagonal_k(term: &PoleTerm, m: usize) -> (CMatrix, CMatrix) {
    let d = term.coeffs.len();
    let k1 = CMatrix::identity(d * m).scale(c64(-1.0, 0.0));
    let mut k0 = CMatrix::zeros(d * m, d * m);
    let eye = CMatrix::identity(m);
    let lam_eye = eye.scale(term.lambda);
    for i in 0..d {
        k0.set_block(i * m, i * m, &lam_eye);
        if i + 1 < d {
            k0.set_block((i + 1) * m, i * m, &eye);
        }
    }
    (k1, k0)
}

fn stacked_f(term: &PoleTerm, m: usize) -> CMatrix {
    let d = term.coeffs.len();
    let mut f = CMatrix::zeros(d * m, m);
    for (i, j) in (1..=d).rev().enumerate() {
        f.set_block(i * m, 0, term.coeff(j));
    }
    f
}

/// Block anti-triangular Hankel: block (i, j) (1-based) holds R_{2d+1-i-j}
/// when that index lies in 1..=d, zero otherwise.
fn pole_hankel(term: &PoleTerm, m: usize) -> CMatrix {
    let d = term.coeffs.len();
    let mut h = CMatrix::zeros(d * m, d * m);
    for i in 1..=d {
        for j in 1..=d {
            let s = 2 * d + 1 - i - j;
            if (1..=d).contains(&s) {
                h.set_block((i - 1) * m, (j - 1) * m, term.coeff(s));
            }
        }
    }
    h
}

/// Shared frame assembly from the state-strip pencil pair (a1, a0), the
/// border factors, and the kind-dependent signs; corner D is zero.
///
/// ```text
/// [ 0            z a1 + a0     F     ]
/// [ s rev(.)^*   0             s(1+z)G ]
/// [ s z F^*      (1+z)G^*      0     ]
/// ```
fn one_pole_frame(
    a1: &CMatrix,
    a0: &CMatrix,
    f: &CMatrix,
    g: &CMatrix,
    m: usize,
    kind: ParaKind,
) -> Result<Pencil> {
    let w = a1.rows();
    let s = c64(kind.sign(), 0.0);
    let total = 2 * w + m;
    let mut m1 = CMatrix::zeros(total, total);
    m1.set_block(0, w, a1);
    m1.set_block(w, 0, &a0.adjoint().scale(s));
    m1.set_block(w, 2 * w, &g.scale(s));
    m1.set_block(2 * w, 0, &f.adjoint().scale(s));
    m1.set_block(2 * w, w, &g.adjoint());
    finish(m1, 2 * w, m, kind)
}

/// One-pole construction with a zero corner on the chosen route.
pub fn one_pole_block(term: &PoleTerm, kind: ParaKind, route: OnePoleRoute) -> Result<OnePoleBlock> {
    let m = term.coeffs.first().map_or(0, |c| c.rows());
    let (d, lambda) = pole_term_checked(term, m)?;
    let (k1, k0) = bidiagonal_k(term, m);
    let f = stacked_f(term, m);
    let rd = term.coeff(d);
    let rd_scale = rd.max_norm();
    let rd_sigma = sigma_min(rd)?;
    match route {
        OnePoleRoute::Plain | OnePoleRoute::Hankel => {
            if rd_sigma <= RD_INVERTIBILITY_RTOL * rd_scale {
                return Err(Error::UseCompressedRoute {
                    sigma_min: rd_sigma,
                });
            }
        }
        OnePoleRoute::Compressed => {}
    }
    match route {
        OnePoleRoute::Plain => {
            // Borders are the last-slot selectors e_d (x) I.
            let mut e = CMatrix::zeros(d * m, m);
            e.set_block((d - 1) * m, 0, &CMatrix::identity(m));
            let pencil = one_pole_frame(&k1, &k0, &f, &e, m, kind)?;
            Ok(OnePoleBlock {
                lambda,
                k1,
                k0,
                f,
                g: None,
                h_pole: None,
                pencil,
                kind,
            })
        }
        OnePoleRoute::Hankel => {
            let h = pole_hankel(term, m);
            let a1 = &k1 * &h;
            let a0 = &k0 * &h;
            // G = H^*(e_d (x) I) = (R_d^*; ...; R_1^*).
            let mut g = CMatrix::zeros(d * m, m);
            for (i, j) in (1..=d).rev().enumerate() {
                g.set_block(i * m, 0, &term.coeff(j).adjoint());
            }
            let pencil = one_pole_frame(&a1, &a0, &f, &g, m, kind)?;
            Ok(OnePoleBlock {
                lambda,
                k1,
                k0,
                f,
                g: Some(g),
                h_pole: Some(h),
                pencil,
                kind,
            })
        }
        OnePoleRoute::Compressed => {
            let h = pole_hankel(term, m);
            let dec = svd_rank(&h, 1e-10)?;
            let r = dec.rank;
            if r == 0 {
                return Err(Error::InvalidTerm("Hankel of the pole term is zero".into()));
            }
            let fac = svd(&h)?;
            // Range singular vectors; the discarded null block leads in the
            // reordered basis and is trimmed away entirely.
            let u2 = fac.u.block(0, d * m, 0, r);
            let v2 = fac.v.block(0, d * m, 0, r);
            let h_core = &(&u2.adjoint() * &h) * &v2;
            let a1 = h_core.scale(c64(-1.0, 0.0));
            let a0 = &(&u2.adjoint() * &(&k0 * &h)) * &v2;
            let mut g_full = CMatrix::zeros(d * m, m);
            for (i, j) in (1..=d).rev().enumerate() {
                g_full.set_block(i * m, 0, &term.coeff(j).adjoint());
            }
            let f_c = &u2.adjoint() * &f;
            let g_c = &v2.adjoint() * &g_full;
            let pencil = one_pole_frame(&a1, &a0, &f_c, &g_c, m, kind)?;
            certify_compression(&pencil, &a1, &a0, lambda, r)?;
            Ok(OnePoleBlock {
                lambda,
                k1,
                k0,
                f: f_c,
                g: Some(g_c),
                h_pole: Some(h),
                pencil,
                kind,
            })
        }
    }
}

/// Compressed-route certification: the state strip is regular with its whole
/// spectrum at lambda, hence disjoint from the reversed strip at 1/conj(lambda).
fn certify_compression(
    pencil: &Pencil,
    a1: &CMatrix,
    a0: &CMatrix,
    lambda: Complex64,
    r: usize,
) -> Result<()> {
    let _ = pencil;
    let core_sigma = sigma_min(a1)?;
    if core_sigma <= 1e-12 * a1.max_norm().max(1.0) {
        return Err(Error::CompressionFailed {
            check: "compressed core invertibility",
            residual: core_sigma,
        });
    }
    let eigs = pencil_eigenvalues(a1, a0).map_err(|_| Error::CompressionFailed {
        check: "compressed strip regularity",
        residual: f64::NAN,
    })?;
    let finite = eigs.finite_expanded();
    if finite.len() != r {
        return Err(Error::CompressionFailed {
            check: "compressed strip has spurious infinite eigenvalues",
            residual: (r - finite.len()) as f64,
        });
    }
    let spread = finite
        .iter()
        .map(|z| (z - lambda).norm())
        .fold(0.0, f64::max);
    if spread > 1e-3 * (1.0 + lambda.norm()) {
        return Err(Error::CompressionFailed {
            check: "compressed strip spectrum off the pole",
            residual: spread,
        });
    }
    // Separation of lambda from its circle partner 1/conj(lambda).
    let partner_gap = if lambda.norm() == 0.0 {
        f64::INFINITY
    } else {
        (lambda - lambda.conj().finv()).norm()
    };
    if partner_gap <= 2e-6 * (1.0 + lambda.norm()) {
        return Err(Error::CompressionFailed {
            check: "pole too close to the unit circle for spectrum separation",
            residual: partner_gap,
        });
    }
    Ok(())
}

fn add_corner(block_pencil: &Pencil, r0: &CMatrix, kind: ParaKind) -> Result<Pencil> {
    let r0 = certified_constant(r0, kind)?;
    let s = block_pencil.state_dim;
    let mut m1 = block_pencil.m1.clone();
    let corner = &m1.block(s, s + block_pencil.io_rows, s, s + block_pencil.io_cols) + &r0;
    m1.set_block(s, s, &corner);
    finish(m1, s, block_pencil.io_rows, kind)
}

/// Bidiagonal one-pole linearization (top numerator must be invertible).
pub fn linearize_one_pole(term: &PoleTerm, r0: &CMatrix, kind: ParaKind) -> Result<Pencil> {
    let block = one_pole_block(term, kind, OnePoleRoute::Plain)?;
    add_corner(&block.pencil, r0, kind)
}

/// Hankel-congruence variant of the one-pole linearization.
pub fn linearize_one_pole_hankel(term: &PoleTerm, r0: &CMatrix, kind: ParaKind) -> Result<Pencil> {
    let block = one_pole_block(term, kind, OnePoleRoute::Hankel)?;
    add_corner(&block.pencil, r0, kind)
}

/// Compressed variant: state dimension 2 rank(H) instead of 2dm.
pub fn linearize_one_pole_compressed(
    term: &PoleTerm,
    r0: &CMatrix,
    kind: ParaKind,
) -> Result<Pencil> {
    let block = one_pole_block(term, kind, OnePoleRoute::Compressed)?;
    add_corner(&block.pencil, r0, kind)
}

/// Block-diagonal combination of per-pole blocks (each with zero corner)
/// sharing one IO border, plus a single constant corner.
pub fn combine_poles(blocks: &[OnePoleBlock], r0: &CMatrix, kind: ParaKind) -> Result<Pencil> {
    let m = r0.rows();
    for (i, a) in blocks.iter().enumerate() {
        if a.pencil.io_rows != m || a.pencil.io_cols != m {
            return Err(Error::ShapeError(format!(
                "block {i} has IO {}x{}, constant corner is {}x{}",
                a.pencil.io_rows, a.pencil.io_cols, m, m
            )));
        }
        if a.kind != kind {
            return Err(Error::StructureMismatch {
                identity: "uniform structure kind across combined blocks",
                deviation: f64::INFINITY,
                tol: 0.0,
            });
        }
        for b in &blocks[i + 1..] {
            if (a.lambda - b.lambda).norm() <= POLE_MERGE_TOL {
                return Err(Error::DuplicatePole {
                    pole: (a.lambda.re, a.lambda.im),
                });
            }
        }
    }
    let r0 = certified_constant(r0, kind)?;
    let states: Vec<usize> = blocks.iter().map(|b| b.pencil.state_dim).collect();
    let total_state: usize = states.iter().sum();
    let total = total_state + m;
    let mut m1 = CMatrix::zeros(total, total);
    let mut off = 0;
    for b in blocks {
        let s = b.pencil.state_dim;
        let bm1 = &b.pencil.m1;
        m1.set_block(off, off, &bm1.block(0, s, 0, s));
        m1.set_block(off, total_state, &bm1.block(0, s, s, s + m));
        m1.set_block(total_state, off, &bm1.block(s, s + m, 0, s));
        off += s;
    }
    m1.set_block(total_state, total_state, &r0);
    finish(m1, total_state, m, kind)
}

/// Laurent route: a para-structured matrix with poles only at 0/infinity goes
/// through the lambda = 0 one-pole frame (compressed when the top coefficient
/// is singular).
pub fn linearize_laurent(r: &RationalMatrix, kind: ParaKind) -> Result<Pencil> {
    let sections = polar_sections(r, kind)?;
    if sections.degree() == 0 {
        let m = sections.r0.rows();
        let r0 = certified_constant(&sections.r0, kind)?;
        let mut m1 = CMatrix::zeros(m, m);
        m1.set_block(0, 0, &r0);
        return finish(m1, 0, m, kind);
    }
    let term = PoleTerm::new(c64(0.0, 0.0), sections.neg.clone());
    let d = sections.degree();
    let rd = term.coeff(d);
    if sigma_min(rd)? > RD_INVERTIBILITY_RTOL * rd.max_norm() {
        linearize_one_pole(&term, &sections.r0, kind)
    } else {
        linearize_one_pole_compressed(&term, &sections.r0, kind)
    }
}

/// Partial-fraction route: one block per stable pole (auto-routing the
/// compressed variant), combined with the shared constant corner.
pub fn linearize_pfd(r: &RationalMatrix, kind: ParaKind) -> Result<Pencil> {
    linearize_pfd_with(r, kind, DEFAULT_BAND)
}

pub fn linearize_pfd_with(r: &RationalMatrix, kind: ParaKind, band: f64) -> Result<Pencil> {
    let split = split_without_circle(r, kind, band)?;
    let mut blocks = Vec::new();
    for term in &split.r_in.terms {
        let d = term.coeffs.len();
        let rd = term.coeff(d);
        let route = if sigma_min(rd)? > RD_INVERTIBILITY_RTOL * rd.max_norm() {
            OnePoleRoute::Plain
        } else {
            OnePoleRoute::Compressed
        };
        blocks.push(one_pole_block(term, kind, route)?);
    }
    combine_poles(&blocks, &split.r0, kind)
}

/// Möbius route: certify that S linearizes the substituted matrix, then
/// palindromize. The output linearizes (alpha + conj(alpha) z) R(z).
pub fn linearize_via_moebius(
    r: &RationalMatrix,
    s: &Pencil,
    map: &MoebiusMap,
) -> Result<Pencil> {
    let g = substitute(r, map, Direction::Forward)?;
    let scale = g.eval_scale();
    for t0 in sample_points(12) {
        let (Ok(lhs), Ok(rhs)) = (s.transfer(t0), g.eval(t0)) else {
            continue;
        };
        let gap = (&lhs - &rhs).fro_norm();
        if gap > 1e-9 * scale {
            return Err(Error::BadInputLinearization(format!(
                "supplied pencil deviates from the transformed matrix by {gap:.3e} at {t0}"
            )));
        }
    }
    palindromize_pencil(s, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::StructureKind;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_real_rows(&[&[v]])
    }

    fn laurent() -> RationalMatrix {
        RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(2.0), scalar(1.0)],
            vec![PoleTerm::new(c64(0.0, 0.0), vec![scalar(1.0)])],
        )
        .unwrap()
    }

    fn two_pole() -> RationalMatrix {
        RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(-1.0)],
            vec![
                PoleTerm::new(c64(0.5, 0.0), vec![scalar(1.0)]),
                PoleTerm::new(c64(2.0, 0.0), vec![scalar(-4.0)]),
            ],
        )
        .unwrap()
    }

    fn assert_same_multiset(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        let mut used = vec![false; b.len()];
        for x in a {
            let best = b
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|(_, p), (_, q)| (x - *p).norm().partial_cmp(&(x - *q).norm()).unwrap())
                .map(|(i, y)| (i, (x - y).norm()))
                .unwrap();
            assert!(best.1 < tol, "{x} unmatched by {best:?} in {b:?}");
            used[best.0] = true;
        }
    }

    fn expect_transfer(p: &Pencil, r: &RationalMatrix, tol: f64) {
        let scale = r.eval_scale();
        for z0 in sample_points(20) {
            let (Ok(lhs), Ok(rhs)) = (p.transfer(z0), r.eval(z0)) else {
                continue;
            };
            let rhs = rhs.scale(c64(1.0, 0.0) + z0);
            assert!(
                (&lhs - &rhs).fro_norm() <= tol * scale * (1.0 + z0.norm()),
                "transfer gap {} at {z0}",
                (&lhs - &rhs).fro_norm()
            );
        }
    }

    #[test]
    fn laurent_route_reproduces_worked_three_by_three() {
        let l = linearize_laurent(&laurent(), ParaKind::Hermitian).unwrap();
        let m1 = CMatrix::from_real_rows(&[&[0.0, -1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 1.0, 2.0]]);
        let m0 = CMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[-1.0, 0.0, 1.0], &[0.0, 1.0, 2.0]]);
        assert!((&l.m1 - &m1).max_norm() == 0.0, "M1 = {:?}", l.m1);
        assert!((&l.m0 - &m0).max_norm() == 0.0);
        assert_eq!(l.state_dim, 2);
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
        expect_transfer(&l, &laurent(), 1e-10);
    }

    #[test]
    fn one_pole_at_half_matches_worked_pencil() {
        let term = PoleTerm::new(c64(0.5, 0.0), vec![scalar(1.0)]);
        let l = linearize_one_pole(&term, &scalar(1.0), ParaKind::Hermitian).unwrap();
        let m1 = CMatrix::from_real_rows(&[&[0.0, -1.0, 0.0], &[0.5, 0.0, 1.0], &[1.0, 1.0, 1.0]]);
        assert!((&l.m1 - &m1).max_norm() == 0.0);
        // L(1) = [[0, -1/2, 1], [-1/2, 0, 2], [1, 2, 2]]; transfer 2 R(1).
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(1.0)],
            vec![
                PoleTerm::new(c64(0.5, 0.0), vec![scalar(1.0)]),
                PoleTerm::new(c64(2.0, 0.0), vec![scalar(-4.0)]),
            ],
        )
        .unwrap()
        .add(&RationalMatrix::constant(scalar(-2.0)))
        .unwrap();
        // r above is 1/(z-1/2) - 2z/(z-2) + 1 in canonical form.
        expect_transfer(&l, &r, 1e-10);
        let t1 = l.transfer(c64(1.0, 0.0)).unwrap();
        assert!((t1[(0, 0)] - c64(10.0, 0.0)).norm() < 1e-12, "2 R(1) = 10");
    }

    #[test]
    fn double_pole_five_by_five_frame() {
        // R_2 = 1, R_1 = 0, lambda = 0: transfer (1+z)(z^2 + 1/z^2).
        let term = PoleTerm::new(c64(0.0, 0.0), vec![scalar(0.0), scalar(1.0)]);
        let l = linearize_one_pole(&term, &scalar(0.0), ParaKind::Hermitian).unwrap();
        assert_eq!(l.size(), (5, 5));
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(0.0), scalar(0.0), scalar(1.0)],
            vec![PoleTerm::new(c64(0.0, 0.0), vec![scalar(0.0), scalar(1.0)])],
        )
        .unwrap();
        expect_transfer(&l, &r, 1e-10);
        let t1 = l.transfer(c64(1.0, 0.0)).unwrap();
        assert!((t1[(0, 0)] - c64(4.0, 0.0)).norm() < 1e-12, "2 (1 + 1) = 4");
    }

    #[test]
    fn hankel_route_is_middle_strip_congruence() {
        let term = PoleTerm::new(c64(0.5, 0.0), vec![scalar(2.0)]);
        let lh = linearize_one_pole_hankel(&term, &scalar(0.0), ParaKind::Hermitian).unwrap();
        let m1 = CMatrix::from_real_rows(&[&[0.0, -2.0, 0.0], &[1.0, 0.0, 2.0], &[2.0, 2.0, 0.0]]);
        assert!((&lh.m1 - &m1).max_norm() == 0.0);
        // Same eigenvalues as the plain route.
        let lp = linearize_one_pole(&term, &scalar(0.0), ParaKind::Hermitian).unwrap();
        let eh = pencil_eigenvalues(&lh.m1, &lh.m0).unwrap();
        let ep = pencil_eigenvalues(&lp.m1, &lp.m0).unwrap();
        assert_same_multiset(&eh.finite_expanded(), &ep.finite_expanded(), 1e-8);
    }

    #[test]
    fn five_by_five_hankel_congruence_spectrum() {
        let term = PoleTerm::new(c64(0.3, 0.0), vec![scalar(0.5), scalar(1.0)]);
        let lp = linearize_one_pole(&term, &scalar(0.0), ParaKind::Hermitian).unwrap();
        let lh = linearize_one_pole_hankel(&term, &scalar(0.0), ParaKind::Hermitian).unwrap();
        assert_same_multiset(
            &pencil_eigenvalues(&lp.m1, &lp.m0).unwrap().finite_expanded(),
            &pencil_eigenvalues(&lh.m1, &lh.m0).unwrap().finite_expanded(),
            1e-7,
        );
    }

    #[test]
    fn compressed_route_trims_to_twice_rank() {
        let r1 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let term = PoleTerm::new(c64(0.0, 0.0), vec![r1]);
        let l =
            linearize_one_pole_compressed(&term, &CMatrix::identity(2), ParaKind::Hermitian)
                .unwrap();
        assert_eq!(l.size(), (4, 4), "state 2r = 2 with rank 1");
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
        // L(z) = [[0, -z, 1, 0], [-1, 0, 1+z, 0], [z, 1+z, 1+z, 0],
        //         [0, 0, 0, 1+z]]: the numerator border sits in M0 only.
        let expect_m1 = CMatrix::from_real_rows(&[
            &[0.0, -1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[1.0, 1.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(
            (&l.m1 - &expect_m1).max_norm() < 1e-14,
            "diagonal Hankel keeps canonical vectors: {:?}",
            l.m1
        );
        // Transfer 2 (R_1 + R_1^* + I) at z = 1.
        let t1 = l.transfer(c64(1.0, 0.0)).unwrap();
        let want = CMatrix::from_real_rows(&[&[6.0, 0.0], &[0.0, 2.0]]);
        assert!((&t1 - &want).max_norm() < 1e-12);
        // Zeros: -1 twice plus the primitive cube roots of unity.
        let eigs = pencil_eigenvalues(&l.m1, &l.m0).unwrap();
        assert_eq!(eigs.infinite_count, 0);
        let mut found = eigs.clusters.clone();
        found.sort_by(|a, b| {
            let (x, y) = (a.0.finite().unwrap(), b.0.finite().unwrap());
            (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap()
        });
        let omega = c64(-0.5, 0.75f64.sqrt());
        assert_eq!(found.len(), 3);
        assert_eq!(found[0].1, 2);
        assert!((found[0].0.finite().unwrap() - c64(-1.0, 0.0)).norm() < 1e-10);
        assert_eq!(found[1].1, 1);
        assert!((found[1].0.finite().unwrap() - omega.conj()).norm() < 1e-10);
        assert_eq!(found[2].1, 1);
        assert!((found[2].0.finite().unwrap() - omega).norm() < 1e-10);
    }

    #[test]
    fn compressed_full_rank_matches_hankel_route() {
        let term = PoleTerm::new(c64(0.4, 0.1), vec![CMatrix::identity(2)]);
        let lc = linearize_one_pole_compressed(&term, &CMatrix::zeros(2, 2), ParaKind::Hermitian)
            .unwrap();
        let lh =
            linearize_one_pole_hankel(&term, &CMatrix::zeros(2, 2), ParaKind::Hermitian).unwrap();
        assert_eq!(lc.size(), lh.size());
        assert_same_multiset(
            &pencil_eigenvalues(&lc.m1, &lc.m0).unwrap().finite_expanded(),
            &pencil_eigenvalues(&lh.m1, &lh.m0).unwrap().finite_expanded(),
            1e-8,
        );
    }

    #[test]
    fn one_pole_routing_errors() {
        let r1 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let term = PoleTerm::new(c64(0.0, 0.0), vec![r1]);
        assert!(matches!(
            linearize_one_pole(&term, &CMatrix::identity(2), ParaKind::Hermitian),
            Err(Error::UseCompressedRoute { .. })
        ));
        let zero_term = PoleTerm::new(c64(0.0, 0.0), vec![CMatrix::zeros(1, 1)]);
        assert!(matches!(
            linearize_one_pole_compressed(&zero_term, &scalar(0.0), ParaKind::Hermitian),
            Err(Error::InvalidTerm(_))
        ));
        let circle_term = PoleTerm::new(c64(1.0, 0.0), vec![scalar(1.0)]);
        assert!(matches!(
            linearize_one_pole(&circle_term, &scalar(0.0), ParaKind::Hermitian),
            Err(Error::NeedsMoebiusRoute)
        ));
    }

    #[test]
    fn stable_split_reproduces_laurent_worked_case() {
        let l = linearize_stable_split(&laurent(), ParaKind::Hermitian).unwrap();
        let m1 = CMatrix::from_real_rows(&[&[0.0, -1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 1.0, 2.0]]);
        assert!((&l.m1 - &m1).max_norm() == 0.0, "{:?}", l.m1);
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
    }

    #[test]
    fn stable_split_two_pole_transfer_and_spectrum() {
        let r = two_pole();
        let l = linearize_stable_split(&r, ParaKind::Hermitian).unwrap();
        expect_transfer(&l, &r, 1e-9);
        let t1 = l.transfer(c64(1.0, 0.0)).unwrap();
        assert!((t1[(0, 0)] - c64(10.0, 0.0)).norm() < 1e-10);
        let eigs = pencil_eigenvalues(&l.m1, &l.m0).unwrap();
        let mut finite = eigs.finite_expanded();
        finite.sort_by(|x, y| (x.im, x.re).partial_cmp(&(y.im, y.re)).unwrap());
        assert_eq!(finite.len(), 3);
        let s15 = 15f64.sqrt() / 4.0;
        assert!((finite[0] - c64(-0.25, -s15)).norm() < 1e-10);
        assert!((finite[1] - c64(-1.0, 0.0)).norm() < 1e-10);
        assert!((finite[2] - c64(-0.25, s15)).norm() < 1e-10);
        for z in &finite {
            assert!((z.norm() - 1.0).abs() < 1e-10, "all roots unimodular");
        }
    }

    #[test]
    fn taylor_route_matches_split_route_spectrum() {
        let r = two_pole();
        let ls = linearize_stable_split(&r, ParaKind::Hermitian).unwrap();
        let lt = linearize_taylor(&r, ParaKind::Hermitian).unwrap();
        assert_eq!(lt.structure_deviation(StructureKind::Palindromic), 0.0);
        expect_transfer(&lt, &r, 1e-9);
        assert_same_multiset(
            &pencil_eigenvalues(&ls.m1, &ls.m0).unwrap().finite_expanded(),
            &pencil_eigenvalues(&lt.m1, &lt.m0).unwrap().finite_expanded(),
            1e-8,
        );
        // The routes are genuinely different pencils (state scaling differs).
        assert!((&ls.m1 - &lt.m1).max_norm() > 1e-3);
    }

    #[test]
    fn pfd_route_combines_and_matches() {
        let r = two_pole();
        let l = linearize_pfd(&r, ParaKind::Hermitian).unwrap();
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
        expect_transfer(&l, &r, 1e-10);
    }

    #[test]
    fn antistable_closed_forms() {
        let real = Realization::new(
            CMatrix::identity(1),
            scalar(0.5),
            CMatrix::identity(1),
            CMatrix::identity(1),
        )
        .unwrap();
        let out = realization_antistable(&real, ParaKind::Hermitian).unwrap();
        // z/(1 - z/2) at z = 1 is 2.
        let v = out.eval(c64(1.0, 0.0)).unwrap();
        assert!((v[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-14);
        let skew = realization_antistable(&real, ParaKind::Skew).unwrap();
        let v = skew.eval(c64(1.0, 0.0)).unwrap();
        assert!((v[(0, 0)] - c64(-2.0, 0.0)).norm() < 1e-14);

        // 1/z realization: anti-stable side is z.
        let rz = Realization::new(
            CMatrix::identity(1),
            scalar(0.0),
            CMatrix::identity(1),
            CMatrix::identity(1),
        )
        .unwrap();
        let out = realization_antistable(&rz, ParaKind::Hermitian).unwrap();
        let v = out.eval(c64(3.0, -1.0)).unwrap();
        assert!((v[(0, 0)] - c64(3.0, -1.0)).norm() < 1e-14);

        let bad = Realization::new(
            CMatrix::zeros(1, 1),
            scalar(1.0),
            CMatrix::identity(1),
            CMatrix::identity(1),
        )
        .unwrap();
        assert!(matches!(
            realization_antistable(&bad, ParaKind::Hermitian),
            Err(Error::NotMinimalAtInfinity { .. })
        ));
    }

    #[test]
    fn combine_two_scalar_poles() {
        let t0 = PoleTerm::new(c64(0.0, 0.0), vec![scalar(1.0)]);
        let t1 = PoleTerm::new(c64(0.5, 0.0), vec![scalar(1.0)]);
        let b0 = one_pole_block(&t0, ParaKind::Hermitian, OnePoleRoute::Plain).unwrap();
        let b1 = one_pole_block(&t1, ParaKind::Hermitian, OnePoleRoute::Plain).unwrap();
        let l = combine_poles(&[b0.clone(), b1], &scalar(0.0), ParaKind::Hermitian).unwrap();
        assert_eq!(l.state_dim, 4);
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
        let t = l.transfer(c64(1.0, 0.0)).unwrap();
        // 2 [1/z + z + 1/(z-1/2) + (-2 - 4/(z-2))] at z = 1: 2(1+1+2+2) = 12.
        assert!((t[(0, 0)] - c64(12.0, 0.0)).norm() < 1e-12);

        // Duplicate poles refused.
        let b0b = one_pole_block(&t0, ParaKind::Hermitian, OnePoleRoute::Plain).unwrap();
        assert!(matches!(
            combine_poles(&[b0, b0b], &scalar(0.0), ParaKind::Hermitian),
            Err(Error::DuplicatePole { .. })
        ));

        // No blocks: just the weighted constant.
        let l = combine_poles(&[], &scalar(3.0), ParaKind::Hermitian).unwrap();
        assert_eq!(l.state_dim, 0);
        let v = l.transfer(c64(2.0, 0.0)).unwrap();
        assert!((v[(0, 0)] - c64(9.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn skew_laurent_route() {
        // R = z - 1/z is para-skew-Hermitian.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(0.0), scalar(1.0)],
            vec![PoleTerm::new(c64(0.0, 0.0), vec![scalar(-1.0)])],
        )
        .unwrap();
        let l = linearize_laurent(&r, ParaKind::Skew).unwrap();
        assert_eq!(l.structure_deviation(StructureKind::AntiPalindromic), 0.0);
        expect_transfer(&l, &r, 1e-10);
    }

    #[test]
    fn moebius_route_round_trip() {
        // R = z/(1+z)^2 (double pole on the circle); G = R о B = (1-s^2)/4,
        // linearized by the hand-built *-even S below.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![],
            vec![PoleTerm::new(
                c64(-1.0, 0.0),
                vec![scalar(0.0), scalar(-1.0)],
            )],
        )
        .unwrap();
        // z/(1+z)^2 = 1/(1+z) - 1/(1+z)^2.
        let r = r
            .add(&RationalMatrix::from_parts(
                1,
                1,
                vec![],
                vec![PoleTerm::new(c64(-1.0, 0.0), vec![scalar(1.0)])],
            )
            .unwrap())
            .unwrap();
        let g = substitute(&r, &MoebiusMap::BilinearB, Direction::Forward).unwrap();
        // G should be (1 - s^2)/4.
        let gv = g.eval(c64(0.0, 0.0)).unwrap();
        assert!((gv[(0, 0)] - c64(0.25, 0.0)).norm() < 1e-12);

        let s1 = CMatrix::from_real_rows(&[&[0.0, 0.5], &[-0.5, 0.0]]);
        let s0 = CMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 0.25]]);
        let s = Pencil::new(s1, s0, 1, 1, 1).unwrap();
        let l = linearize_via_moebius(&r, &s, &MoebiusMap::BilinearB).unwrap();
        assert_eq!(l.structure_deviation(StructureKind::Palindromic), 0.0);
        expect_transfer(&l, &r, 1e-10);
        // det L(z) = -z: the single zero of (1+z) R(z) = z/(1+z).
        let eigs = pencil_eigenvalues(&l.m1, &l.m0).unwrap();
        let finite = eigs.finite_expanded();
        assert_eq!(finite.len(), 1);
        assert!(finite[0].norm() < 1e-10);

        // A wrong S is rejected.
        let bad = Pencil::new(CMatrix::identity(2), CMatrix::zeros(2, 2), 1, 1, 1).unwrap();
        assert!(matches!(
            linearize_via_moebius(&r, &bad, &MoebiusMap::BilinearB),
            Err(Error::BadInputLinearization(_))
        ));
    }

    #[test]
    fn structure_and_route_gates() {
        // Non-para-Hermitian input.
        let bad = RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(2.0), scalar(1.0)],
            vec![PoleTerm::new(c64(0.0, 0.0), vec![scalar(-1.0)])],
        )
        .unwrap();
        assert!(matches!(
            linearize_stable_split(&bad, ParaKind::Hermitian),
            Err(Error::StructureMismatch { .. })
        ));

        // Unit-circle pole forces the Möbius route: 2i/(z-1) + i is
        // para-Hermitian with its only pole at 1.
        let circle = RationalMatrix::from_parts(
            1,
            1,
            vec![CMatrix::from_rows(vec![vec![c64(0.0, 1.0)]]).unwrap()],
            vec![PoleTerm::new(
                c64(1.0, 0.0),
                vec![CMatrix::from_rows(vec![vec![c64(0.0, 2.0)]]).unwrap()],
            )],
        )
        .unwrap();
        assert!(matches!(
            linearize_stable_split(&circle, ParaKind::Hermitian),
            Err(Error::NeedsMoebiusRoute)
        ));

        // Constant Hermitian input: state-free weighted pencil.
        let c = RationalMatrix::constant(CMatrix::identity(2));
        let l = linearize_stable_split(&c, ParaKind::Hermitian).unwrap();
        assert_eq!(l.state_dim, 0);
        assert_eq!(l.size(), (2, 2));
    }
}
