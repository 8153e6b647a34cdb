//! Structural data of pencils: partial multiplicities, invariant-order
//! recovery, strong-minimality certification, and eigenvalue symmetry
//! reports. The exact-arithmetic oracle lives in [`exact`].

pub mod exact;

use crate::error::{Error, Result};
use crate::numerics::{
    c64, pencil_eigenvalues, sigma_min, svd_rank, svd_rank_strict, CMatrix, Eigenvalue,
};
use crate::rmatrix::{sample_points, Pencil};
use serde::Serialize;

/// Invariant orders or partial multiplicities attached to one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralIndices {
    pub point: Eigenvalue,
    /// Nondecreasing; negative entries are pole orders, positive zero orders.
    pub orders: Vec<i64>,
}

/// Outcome of the strong-minimality rank checks.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub finite_ok: bool,
    pub infinity_ok: bool,
    /// Finite point with the smallest strip rank margin, and that margin
    /// (s-th singular value over the strip scale).
    pub worst_finite: Option<((f64, f64), f64)>,
    pub tested_points: Vec<(f64, f64)>,
    pub row_rank_infinity: usize,
    pub col_rank_infinity: usize,
    pub state_dim: usize,
}

impl MinimalityReport {
    pub fn passes(&self) -> bool {
        self.finite_ok && self.infinity_ok
    }
}

/// Reciprocal-pairing classification of a spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// Matched pairs (lambda, partner near 1/conj(lambda), gap).
    pub pairs: Vec<(Eigenvalue, Eigenvalue, f64)>,
    /// Self-paired eigenvalues on the unit circle.
    pub unimodular: Vec<(f64, f64)>,
    pub unpaired: Vec<Eigenvalue>,
    pub tolerance: f64,
}

impl SymmetryReport {
    pub fn passes(&self) -> bool {
        self.unpaired.is_empty()
    }
}

fn ensure_regular(m1: &CMatrix, m0: &CMatrix) -> Result<()> {
    let scale = m1.fro_norm() + m0.fro_norm();
    if scale == 0.0 {
        return Err(Error::SingularPencil);
    }
    for c in sample_points(12) {
        let p = m0 + &m1.scale(c);
        if sigma_min(&p)? > 1e-12 * scale {
            return Ok(());
        }
    }
    Err(Error::SingularPencil)
}

/// Partial multiplicities of an eigenvalue of a regular pencil, from the
/// nullity sequence of the block-Toeplitz matrices stacking P(z0) over the
/// z-derivative M1. The count of Jordan chains of length >= k is
/// nu_k - nu_{k-1}; the returned orders list the chain lengths ascending.
pub fn partial_multiplicities(
    pencil_m1: &CMatrix,
    pencil_m0: &CMatrix,
    at: Eigenvalue,
    tol: f64,
) -> Result<StructuralIndices> {
    ensure_regular(pencil_m1, pencil_m0)?;
    // The point at infinity is the point 0 of the reversed pencil.
    let (m1, m0, z0) = match at {
        Eigenvalue::Finite(z) => (pencil_m1.clone(), pencil_m0.clone(), z),
        Eigenvalue::Infinite => (pencil_m0.clone(), pencil_m1.clone(), c64(0.0, 0.0)),
    };
    let n = m1.rows();
    let p0 = &m0 + &m1.scale(z0);
    let p1 = m1;
    let mut nullities = vec![0usize];
    let mut chains_ge = Vec::new();
    for k in 1..=(n + 1) {
        let mut t = CMatrix::zeros(k * n, k * n);
        for b in 0..k {
            t.set_block(b * n, b * n, &p0);
            if b + 1 < k {
                t.set_block((b + 1) * n, b * n, &p1);
            }
        }
        let dec = svd_rank_strict(&t, tol)?;
        let nu = k * n - dec.rank;
        let ge = nu - nullities.last().unwrap();
        nullities.push(nu);
        if ge == 0 {
            break;
        }
        chains_ge.push(ge);
        if k == n + 1 {
            return Err(Error::Numerical(
                "partial multiplicity iteration exceeded the pencil size".into(),
            ));
        }
    }
    // chains_ge[k-1] counts chains of length >= k; expand to block sizes.
    let mut orders = Vec::new();
    for (k, ge) in chains_ge.iter().enumerate() {
        let longer = chains_ge.get(k + 1).copied().unwrap_or(0);
        for _ in 0..(ge - longer) {
            orders.push((k + 1) as i64);
        }
    }
    orders.sort_unstable();
    Ok(StructuralIndices { point: at, orders })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPoint {
    MinusOne,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderTarget {
    /// Orders of the weighted matrix (1+z) R(z) the pencil linearizes.
    OfWeighted,
    /// Orders of R itself.
    OfR,
}

/// Invariant-order recovery at -1 or infinity from the partial
/// multiplicities of the A-block (poles) and of the whole pencil (zeros):
/// base list (-d_s, ..., -d_1, 0 x (r-s-u), e_1, ..., e_u); the weight (1+z)
/// shifts every order by one, up at -1 and down at infinity.
pub fn recover_invariant_orders(
    a_mults: &StructuralIndices,
    l_mults: &StructuralIndices,
    normal_rank: usize,
    point: OrderPoint,
    want: OrderTarget,
) -> Result<StructuralIndices> {
    let s = a_mults.orders.len();
    let u = l_mults.orders.len();
    if s + u > normal_rank {
        return Err(Error::InconsistentInput(format!(
            "{s} pole blocks + {u} zero blocks exceed normal rank {normal_rank}"
        )));
    }
    let mut orders: Vec<i64> = Vec::with_capacity(normal_rank);
    for d in a_mults.orders.iter().rev() {
        orders.push(-d);
    }
    orders.extend(std::iter::repeat(0).take(normal_rank - s - u));
    orders.extend(l_mults.orders.iter().copied());
    let shift = match (point, want) {
        (OrderPoint::MinusOne, OrderTarget::OfR) => -1,
        (OrderPoint::Infinity, OrderTarget::OfWeighted) => -1,
        _ => 0,
    };
    for o in &mut orders {
        *o += shift;
    }
    let point = match point {
        OrderPoint::MinusOne => Eigenvalue::Finite(c64(-1.0, 0.0)),
        OrderPoint::Infinity => Eigenvalue::Infinite,
    };
    Ok(StructuralIndices { point, orders })
}

/// Strong minimality of a system pencil: at every finite eigenvalue of the
/// A-block the strips [-A(z0) B(z0)] and [-A(z0); C(z0)] keep full state
/// rank, and the leading-coefficient strips of M1 do the same at infinity.
pub fn check_strong_minimality(l: &Pencil, tol: f64) -> Result<MinimalityReport> {
    let s = l.state_dim;
    let (rows, cols) = l.size();
    if s == 0 {
        return Ok(MinimalityReport {
            finite_ok: true,
            infinity_ok: true,
            worst_finite: None,
            tested_points: Vec::new(),
            row_rank_infinity: 0,
            col_rank_infinity: 0,
            state_dim: 0,
        });
    }
    let (a1, a0) = l.a_blocks();
    ensure_regular(&a1, &a0)?;
    let eigs = pencil_eigenvalues(&a1, &a0)?;
    let mut finite_ok = true;
    let mut worst: Option<((f64, f64), f64)> = None;
    let mut tested = Vec::new();
    for (ev, _) in &eigs.clusters {
        let Some(z0) = ev.finite() else { continue };
        tested.push((z0.re, z0.im));
        let p = l.at(z0);
        let row_strip = p.block(0, s, 0, cols);
        let col_strip = p.block(0, rows, 0, s);
        let mut margin = f64::INFINITY;
        for strip in [&row_strip, &col_strip] {
            let dec = svd_rank(strip, tol)?;
            let sig = dec
                .singular_values
                .get(s - 1)
                .copied()
                .unwrap_or(0.0);
            margin = margin.min(sig / strip.fro_norm().max(1e-300));
            if dec.rank < s {
                finite_ok = false;
            }
        }
        if worst.map_or(true, |(_, w)| margin < w) {
            worst = Some(((z0.re, z0.im), margin));
        }
    }
    let row_inf = svd_rank(&l.m1.block(0, s, 0, cols), tol)?.rank;
    let col_inf = svd_rank(&l.m1.block(0, rows, 0, s), tol)?.rank;
    Ok(MinimalityReport {
        finite_ok,
        infinity_ok: row_inf == s && col_inf == s,
        worst_finite: worst,
        tested_points: tested,
        row_rank_infinity: row_inf,
        col_rank_infinity: col_inf,
        state_dim: s,
    })
}

/// Greedy minimal-gap pairing of a spectrum against its reflection through
/// the unit circle. Eigenvalues within tol of the circle are self-paired;
/// infinite eigenvalues pair with zeros.
pub fn symmetry_report(eigs: &[Eigenvalue], tol: f64) -> SymmetryReport {
    let mut pairs = Vec::new();
    let mut unimodular = Vec::new();
    let mut unpaired = Vec::new();
    let mut used = vec![false; eigs.len()];
    // Unimodular pass.
    for (i, ev) in eigs.iter().enumerate() {
        if let Eigenvalue::Finite(z) = ev {
            if (z.norm() - 1.0).abs() <= tol {
                unimodular.push((z.re, z.im));
                used[i] = true;
            }
        }
    }
    // Greedy reciprocal pass, smallest index first.
    for i in 0..eigs.len() {
        if used[i] {
            continue;
        }
        let (target, target_is_infinite) = match eigs[i] {
            Eigenvalue::Infinite => (c64(0.0, 0.0), false),
            Eigenvalue::Finite(z) if z.norm() <= tol => (c64(0.0, 0.0), true),
            Eigenvalue::Finite(z) => (z.conj().finv(), false),
        };
        let mut best: Option<(usize, f64)> = None;
        for (j, cand) in eigs.iter().enumerate() {
            if used[j] || j == i {
                continue;
            }
            let gap = match (cand, target_is_infinite) {
                (Eigenvalue::Infinite, true) => 0.0,
                (Eigenvalue::Infinite, false) => continue,
                (Eigenvalue::Finite(w), true) => {
                    // Partner of a zero must be infinite; a huge finite value
                    // does not qualify.
                    let _ = w;
                    continue;
                }
                (Eigenvalue::Finite(w), false) => (w - target).norm() / (1.0 + target.norm()),
            };
            if best.map_or(true, |(_, g)| gap < g) {
                best = Some((j, gap));
            }
        }
        match best {
            Some((j, gap)) if gap <= tol => {
                used[i] = true;
                used[j] = true;
                pairs.push((eigs[i], eigs[j], gap));
            }
            _ => {
                used[i] = true;
                unpaired.push(eigs[i]);
            }
        }
    }
    SymmetryReport {
        pairs,
        unimodular,
        unpaired,
        tolerance: tol,
    }
}
