//! Dense complex eigenvalues and pencil (generalized) eigenvalues.
//!
//! Standard route: Householder reduction to Hessenberg form, explicit
//! single-shift QR with Wilkinson shifts and occasional exceptional shifts.
//! The pencil routine maps z M1 + M0 through a well-conditioned shift point c
//! to the single matrix (c M1 + M0)^{-1} M1, whose eigenvalues theta give
//! lambda = c - 1/theta; theta near 0 marks an infinite eigenvalue.
//!
//! Multiplicities are decided by single-linkage clustering and reported at the
//! cluster mean. A defective k-fold eigenvalue is computed by any backward
//! stable solver with spread ~eps^(1/k), but first-order errors cancel in the
//! mean, which restores near-machine accuracy for the representative value.

use super::{c64, sigma_min, solve, CMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

/// A pencil eigenvalue: finite location or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Eigenvalue {
    Finite(#[serde(with = "crate::numerics::complex_pair")] Complex64),
    Infinite,
}

impl Eigenvalue {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            Eigenvalue::Finite(z) => Some(*z),
            Eigenvalue::Infinite => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigOptions {
    /// Residual certificate: sigma_min(M0 + lambda M1) <= residual_tol * scale.
    pub residual_tol: f64,
    /// Relative single-linkage radius for multiplicity clustering.
    pub cluster_radius: f64,
    /// |theta| <= inf_threshold * max(1, |theta|_max) classifies as infinite.
    pub inf_threshold: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions {
            residual_tol: 1e-8,
            cluster_radius: 1e-4,
            inf_threshold: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PencilEigs {
    /// (representative value, algebraic multiplicity), finite sorted by
    /// (re, im), infinity last.
    pub clusters: Vec<(Eigenvalue, usize)>,
    /// Unclustered finite values as computed.
    pub raw_finite: Vec<Complex64>,
    pub infinite_count: usize,
    /// Shift point used for the reduction to a standard problem.
    pub shift_point: Complex64,
}

impl PencilEigs {
    /// Finite cluster representatives expanded by multiplicity.
    pub fn finite_expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for (ev, mult) in &self.clusters {
            if let Some(z) = ev.finite() {
                out.extend(std::iter::repeat(z).take(*mult));
            }
        }
        out
    }
}

// ---------------------------------------------------------------- standard --

/// Eigenvalues of a square complex matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite entries in eig input".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    qr_eigenvalues(&mut h)
}

fn hessenberg(h: &mut CMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut nrm2 = 0.0;
        for i in (k + 1)..n {
            nrm2 += h[(i, k)].norm_sqr();
        }
        let nrm = nrm2.sqrt();
        if nrm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * nrm
        } else {
            c64(-nrm, 0.0)
        };
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let beta: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if beta == 0.0 {
            continue;
        }
        let two_over = 2.0 / beta;
        // Rows k+1..n from the left.
        for j in k..n {
            let mut dot = Complex64::default();
            for (vi, i) in v.iter().zip((k + 1)..n) {
                dot += vi.conj() * h[(i, j)];
            }
            let t = dot * two_over;
            for (vi, i) in v.iter().zip((k + 1)..n) {
                let sub = *vi * t;
                h[(i, j)] -= sub;
            }
        }
        // Columns k+1..n from the right.
        for i in 0..n {
            let mut dot = Complex64::default();
            for (vj, j) in v.iter().zip((k + 1)..n) {
                dot += h[(i, j)] * *vj;
            }
            let t = dot * two_over;
            for (vj, j) in v.iter().zip((k + 1)..n) {
                let sub = t * vj.conj();
                h[(i, j)] -= sub;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::default();
        }
    }
}

/// Rotation [[c, s], [-conj(s), c]] with real c mapping (f, g) to (r, 0).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::default());
    }
    let fn_ = f.norm();
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    ((fn_ / d), (f / fn_) * g.conj() / d)
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) + b * c * 4.0).sqrt() * 0.5;
    (half_tr + disc, half_tr - disc)
}

fn qr_eigenvalues(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let overall = h.max_norm().max(1.0);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n;
    let mut stalled = 0usize;
    let mut total = 0usize;
    let budget = 60 * n + 200;
    while hi > 0 {
        // Deflation scan: smallest active block [lo, hi).
        let mut lo = 0;
        for q in (1..hi).rev() {
            let denom = h[(q - 1, q - 1)].norm() + h[(q, q)].norm();
            let denom = if denom == 0.0 { overall } else { denom };
            if h[(q, q - 1)].norm() <= f64::EPSILON * denom {
                h[(q, q - 1)] = Complex64::default();
                lo = q;
                break;
            }
        }
        if lo == hi - 1 {
            eigs.push(h[(lo, lo)]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if lo == hi - 2 {
            let (e1, e2) = eig2(h[(lo, lo)], h[(lo, lo + 1)], h[(lo + 1, lo)], h[(lo + 1, lo + 1)]);
            eigs.push(e1);
            eigs.push(e2);
            hi -= 2;
            stalled = 0;
            continue;
        }
        total += 1;
        stalled += 1;
        if total > budget {
            return Err(Error::Numerical("QR iteration exceeded budget".into()));
        }
        let mu = if stalled % 13 == 0 {
            // Exceptional shift to break limit cycles.
            let kick = h[(hi - 1, hi - 2)].norm();
            h[(hi - 1, hi - 1)] + c64(0.7519, 0.4003) * kick
        } else {
            let (e1, e2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            let target = h[(hi - 1, hi - 1)];
            if (e1 - target).norm() <= (e2 - target).norm() {
                e1
            } else {
                e2
            }
        };
        qr_step(h, lo, hi, mu);
    }
    Ok(eigs)
}

fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, mu: Complex64) {
    for i in lo..hi {
        h[(i, i)] -= mu;
    }
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo - 1);
    for k in lo..(hi - 1) {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, (c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        for i in lo..(k + 2).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * *c + y * s.conj();
            h[(i, k + 1)] = -x * *s + y * *c;
        }
    }
    for i in lo..hi {
        h[(i, i)] += mu;
    }
}

// ------------------------------------------------------------------ pencil --

/// Eigenvalues of the pencil z M1 + M0 with defaults.
pub fn pencil_eigenvalues(m1: &CMatrix, m0: &CMatrix) -> Result<PencilEigs> {
    pencil_eigenvalues_with(m1, m0, &EigOptions::default())
}

pub fn pencil_eigenvalues_with(
    m1: &CMatrix,
    m0: &CMatrix,
    opts: &EigOptions,
) -> Result<PencilEigs> {
    if !m1.is_square() || !m0.is_square() || m1.rows() != m0.rows() {
        return Err(Error::ShapeError(format!(
            "pencil blocks {}x{} and {}x{}",
            m1.rows(),
            m1.cols(),
            m0.rows(),
            m0.cols()
        )));
    }
    let n = m1.rows();
    if n == 0 {
        return Ok(PencilEigs {
            clusters: vec![],
            raw_finite: vec![],
            infinite_count: 0,
            shift_point: Complex64::default(),
        });
    }
    let norm1 = m1.fro_norm();
    let norm0 = m0.fro_norm();
    if norm1 == 0.0 && norm0 == 0.0 {
        return Err(Error::SingularPencil);
    }

    // Shift point: best-conditioned c M1 + M0 over a fixed candidate spread.
    let candidates = shift_candidates();
    let mut best: Option<(Complex64, f64)> = None;
    for &cand in &candidates {
        let p = &m1.scale(cand) + m0;
        let quality = sigma_min(&p)? / (norm0 + cand.norm() * norm1);
        if best.map_or(true, |(_, q)| quality > q) {
            best = Some((cand, quality));
        }
    }
    let (c, quality) = best.unwrap();
    if quality <= 1e-12 {
        return Err(Error::SingularPencil);
    }

    let p_c = &m1.scale(c) + m0;
    let k = solve(&p_c, m1)?;
    let thetas = eigenvalues(&k)?;
    let theta_max = thetas.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let inf_cut = opts.inf_threshold * theta_max.max(1.0);

    let mut raw_finite = Vec::new();
    let mut infinite_count = 0usize;
    for theta in &thetas {
        if theta.norm() <= inf_cut {
            infinite_count += 1;
        } else {
            raw_finite.push(c - theta.finv());
        }
    }

    let mut clusters = cluster(&raw_finite, opts.cluster_radius);
    // Residual certificate at each representative, with a short polish pass as
    // fallback before declaring failure.
    let scale_at = |z: Complex64| norm0 + z.norm() * norm1;
    for (value, mult) in clusters.iter_mut() {
        let ok = |z: Complex64| -> Result<bool> {
            let p = &m1.scale(z) + m0;
            Ok(sigma_min(&p)? <= opts.residual_tol * scale_at(z))
        };
        if ok(*value)? {
            continue;
        }
        let mut z = *value;
        for _ in 0..6 {
            let p = &m1.scale(z) + m0;
            let Ok(x) = solve(&p, m1) else { break };
            let trace: Complex64 = (0..n).map(|i| x[(i, i)]).sum();
            if trace.norm() == 0.0 {
                break;
            }
            z -= (trace.finv()) * (*mult as f64);
            if ok(z)? {
                *value = z;
                break;
            }
        }
        if !ok(*value)? {
            return Err(Error::Numerical(format!(
                "pencil eigenvalue residual certification failed near {value:?}"
            )));
        }
    }

    clusters.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<(Eigenvalue, usize)> = clusters
        .into_iter()
        .map(|(z, m)| (Eigenvalue::Finite(z), m))
        .collect();
    if infinite_count > 0 {
        out.push((Eigenvalue::Infinite, infinite_count));
    }
    Ok(PencilEigs {
        clusters: out,
        raw_finite,
        infinite_count,
        shift_point: c,
    })
}

fn shift_candidates() -> Vec<Complex64> {
    // Golden-angle spread over several radii off the unit circle, where
    // palindromic pencils like to place eigenvalues.
    let radii = [
        0.9371, 1.2743, 0.7109, 1.5831, 0.8413, 1.1289, 0.6317, 1.8479, 0.9833, 1.0517, 0.5531,
        2.1143,
    ];
    radii
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let th = 2.399963 * (j as f64) + 0.7;
            c64(r * th.cos(), r * th.sin())
        })
        .collect()
}

/// Single-linkage clustering with relative radius; returns (mean, size).
fn cluster(points: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let link = radius * (1.0 + points[i].norm().min(points[j].norm()));
            if (points[i] - points[j]).norm() <= link {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::HashMap<usize, Vec<Complex64>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(points[i]);
    }
    let mut out: Vec<(Complex64, usize)> = groups
        .into_values()
        .map(|pts| {
            let sum: Complex64 = pts.iter().sum();
            (sum / pts.len() as f64, pts.len())
        })
        .collect();
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}
