//! Rational matrices in partial-fraction form, block pencils, realizations,
//! and the structure predicates built on paraconjugation.
//!
//! A rational matrix is stored as a polynomial part plus one term per distinct
//! finite pole, R(z) = sum_k P_k z^k + sum_i sum_j A_{i,j}/(z - lambda_i)^j.
//! This is the canonical form every constructor consumes and produces; all
//! symmetry transformations (paraconjugate, Hermitian conjugate and friends)
//! are closed-form maps on the coefficients, never sampled.

use crate::error::{Error, Result};
use crate::numerics::{c64, sigma_min, solve, svd_rank, CMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Two pole locations closer than this are the same pole.
pub const POLE_MERGE_TOL: f64 = 1e-8;
/// Trailing coefficient blocks below this relative size are representation noise.
const TRIM_REL: f64 = 1e-12;
/// Guard against runaway expansions: max polynomial degree and max pole order.
pub const DEGREE_CAP: usize = 64;

// -------------------------------------------------------------- structure --

/// Structure kinds for rational matrices and pencils.
///
/// The para-* and (skew-)Hermitian/even/odd kinds apply to rational matrices;
/// palindromic kinds apply to degree-1 pencils. `None` marks a failed test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Palindromic,
    AntiPalindromic,
    ParaHermitian,
    ParaSkewHermitian,
    Hermitian,
    SkewHermitian,
    Even,
    Odd,
    None,
}

/// Which para-structure a pipeline run targets; selects the sign conventions
/// of every constructor (palindromic vs anti-palindromic output).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParaKind {
    Hermitian,
    Skew,
}

impl ParaKind {
    /// +1 for the Hermitian conventions, -1 for the skew ones.
    pub fn sign(self) -> f64 {
        match self {
            ParaKind::Hermitian => 1.0,
            ParaKind::Skew => -1.0,
        }
    }

    pub fn rational_kind(self) -> StructureKind {
        match self {
            ParaKind::Hermitian => StructureKind::ParaHermitian,
            ParaKind::Skew => StructureKind::ParaSkewHermitian,
        }
    }

    pub fn pencil_kind(self) -> StructureKind {
        match self {
            ParaKind::Hermitian => StructureKind::Palindromic,
            ParaKind::Skew => StructureKind::AntiPalindromic,
        }
    }
}

/// Result of a structure test: the confirmed kind (or `None`) together with
/// the measured max-norm deviation of the defining identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureTag {
    pub kind: StructureKind,
    pub deviation: f64,
}

impl StructureTag {
    pub fn passes(&self) -> bool {
        self.kind != StructureKind::None
    }
}

// ------------------------------------------------------------- pole terms --

/// All partial-fraction numerators attached to one finite pole:
/// coeffs[j-1] = A_j is the numerator of (z - lambda)^{-j}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    #[serde(with = "crate::numerics::complex_pair")]
    pub lambda: Complex64,
    pub coeffs: Vec<CMatrix>,
}

impl PoleTerm {
    pub fn new(lambda: Complex64, coeffs: Vec<CMatrix>) -> Self {
        PoleTerm { lambda, coeffs }
    }

    /// Pole order d (length of the coefficient list after canonicalization).
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Numerator of (z - lambda)^{-j}, 1-based.
    pub fn coeff(&self, j: usize) -> &CMatrix {
        &self.coeffs[j - 1]
    }

    fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.max_norm()).fold(0.0, f64::max)
    }
}

// -------------------------------------------------------- rational matrix --

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMatrix {
    pub m: usize,
    pub n: usize,
    /// poly[k] is the coefficient of z^k; empty means zero polynomial part.
    pub poly: Vec<CMatrix>,
    #[serde(rename = "poles")]
    pub terms: Vec<PoleTerm>,
}

fn add_slot(slots: &mut Vec<CMatrix>, idx: usize, m: &CMatrix, rows: usize, cols: usize) {
    while slots.len() <= idx {
        slots.push(CMatrix::zeros(rows, cols));
    }
    slots[idx] = &slots[idx] + m;
}

impl RationalMatrix {
    pub fn zero(m: usize, n: usize) -> Self {
        RationalMatrix {
            m,
            n,
            poly: vec![],
            terms: vec![],
        }
    }

    pub fn constant(c: CMatrix) -> Self {
        let (m, n) = (c.rows(), c.cols());
        RationalMatrix {
            m,
            n,
            poly: vec![c],
            terms: vec![],
        }
        .canonical()
    }

    pub fn from_parts(
        m: usize,
        n: usize,
        poly: Vec<CMatrix>,
        terms: Vec<PoleTerm>,
    ) -> Result<Self> {
        let r = RationalMatrix { m, n, poly, terms };
        r.validate()?;
        Ok(r.canonical())
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.poly {
            if p.rows() != self.m || p.cols() != self.n {
                return Err(Error::ShapeError(format!(
                    "polynomial block {}x{} in a {}x{} rational matrix",
                    p.rows(),
                    p.cols(),
                    self.m,
                    self.n
                )));
            }
            if !p.is_finite() {
                return Err(Error::InvalidInput("non-finite polynomial block".into()));
            }
        }
        for t in &self.terms {
            if !t.lambda.is_finite() {
                return Err(Error::InvalidInput("non-finite pole location".into()));
            }
            for c in &t.coeffs {
                if c.rows() != self.m || c.cols() != self.n {
                    return Err(Error::ShapeError(format!(
                        "pole block {}x{} in a {}x{} rational matrix",
                        c.rows(),
                        c.cols(),
                        self.m,
                        self.n
                    )));
                }
                if !c.is_finite() {
                    return Err(Error::InvalidInput("non-finite pole block".into()));
                }
            }
        }
        if self.poly.len() > DEGREE_CAP + 1 {
            return Err(Error::DegreeCap {
                got: self.poly.len() - 1,
                cap: DEGREE_CAP,
            });
        }
        if let Some(t) = self.terms.iter().find(|t| t.coeffs.len() > DEGREE_CAP) {
            return Err(Error::DegreeCap {
                got: t.coeffs.len(),
                cap: DEGREE_CAP,
            });
        }
        Ok(())
    }

    /// Merge near-identical poles, drop trailing noise blocks, sort poles.
    pub fn canonical(mut self) -> Self {
        let scale = self.coeff_scale();
        let trim = if scale == 0.0 { 0.0 } else { TRIM_REL * scale };

        let mut merged: Vec<(Vec<Complex64>, Vec<CMatrix>)> = Vec::new();
        for t in self.terms.drain(..) {
            let mut hit = None;
            for (i, (lams, _)) in merged.iter().enumerate() {
                if (lams[0] - t.lambda).norm() <= POLE_MERGE_TOL {
                    hit = Some(i);
                    break;
                }
            }
            match hit {
                Some(i) => {
                    merged[i].0.push(t.lambda);
                    for (j, c) in t.coeffs.iter().enumerate() {
                        add_slot(&mut merged[i].1, j, c, self.m, self.n);
                    }
                }
                None => merged.push((vec![t.lambda], t.coeffs)),
            }
        }
        for (lams, mut coeffs) in merged {
            while coeffs.last().map_or(false, |c| c.max_norm() <= trim) {
                coeffs.pop();
            }
            if coeffs.is_empty() {
                continue;
            }
            let lambda = lams.iter().sum::<Complex64>() / lams.len() as f64;
            self.terms.push(PoleTerm { lambda, coeffs });
        }
        self.terms.sort_by(|a, b| {
            (a.lambda.re, a.lambda.im)
                .partial_cmp(&(b.lambda.re, b.lambda.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        while self.poly.last().map_or(false, |c| c.max_norm() <= trim) {
            self.poly.pop();
        }
        self
    }

    pub fn is_square(&self) -> bool {
        self.m == self.n
    }

    /// Largest entry across every stored coefficient block.
    pub fn coeff_scale(&self) -> f64 {
        let p = self.poly.iter().map(|c| c.max_norm()).fold(0.0, f64::max);
        let t = self
            .terms
            .iter()
            .map(|t| t.max_coeff_norm())
            .fold(0.0, f64::max);
        p.max(t)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff_scale() == 0.0
    }

    /// No polynomial part at all (value -> 0 as z -> infinity).
    pub fn is_strictly_proper(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn poly_degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    /// Sum of all pole orders (finite poles only).
    pub fn total_polar_degree(&self) -> usize {
        self.terms.iter().map(|t| t.order()).sum()
    }

    pub fn pole_locations(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.lambda).collect()
    }

    pub fn nearest_pole_distance(&self, z0: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|t| (z0 - t.lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }

    // --------------------------------------------------------- evaluation --

    pub fn eval(&self, z0: Complex64) -> Result<CMatrix> {
        for t in &self.terms {
            let dist = (z0 - t.lambda).norm();
            if dist <= POLE_MERGE_TOL {
                return Err(Error::EvalAtPole {
                    pole: (t.lambda.re, t.lambda.im),
                    dist,
                });
            }
        }
        let mut acc = CMatrix::zeros(self.m, self.n);
        let mut zp = c64(1.0, 0.0);
        for p in &self.poly {
            acc = &acc + &p.scale(zp);
            zp *= z0;
        }
        for t in &self.terms {
            let base = (z0 - t.lambda).finv();
            let mut wp = base;
            for a in &t.coeffs {
                acc = &acc + &a.scale(wp);
                wp *= base;
            }
        }
        Ok(acc)
    }

    /// max(1, sup of ||R(z)||_F over the standard sample points); the scale
    /// used in relative transfer-accuracy tests.
    pub fn eval_scale(&self) -> f64 {
        let mut s: f64 = 1.0;
        for z0 in sample_points(12) {
            if let Ok(v) = self.eval(z0) {
                s = s.max(v.fro_norm());
            }
        }
        s
    }

    /// Normal rank: max rank of R(z0) over the standard sample points.
    pub fn normal_rank(&self, rel_tol: f64) -> Result<usize> {
        let mut best = 0;
        for z0 in sample_points(12) {
            match self.eval(z0) {
                Ok(v) => best = best.max(svd_rank(&v, rel_tol)?.rank),
                Err(Error::EvalAtPole { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(best)
    }

    // --------------------------------------------------------- arithmetic --

    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::ShapeError(format!(
                "adding {}x{} and {}x{} rational matrices",
                self.m, self.n, other.m, other.n
            )));
        }
        let mut poly = self.poly.clone();
        for (k, p) in other.poly.iter().enumerate() {
            add_slot(&mut poly, k, p, self.m, self.n);
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RationalMatrix::from_parts(self.m, self.n, poly, terms)
    }

    pub fn scale(&self, w: Complex64) -> RationalMatrix {
        RationalMatrix {
            m: self.m,
            n: self.n,
            poly: self.poly.iter().map(|p| p.scale(w)).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    lambda: t.lambda,
                    coeffs: t.coeffs.iter().map(|c| c.scale(w)).collect(),
                })
                .collect(),
        }
        .canonical()
    }

    pub fn neg(&self) -> RationalMatrix {
        self.scale(c64(-1.0, 0.0))
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        self.add(&other.neg())
    }

    /// (alpha + conj(alpha) z) R(z), re-expanded to canonical form.
    /// Per pole: (alpha + conj(alpha) z) = conj(alpha)(z - lambda) + (alpha + conj(alpha) lambda).
    pub fn scale_by_linear(&self, alpha: Complex64) -> Result<RationalMatrix> {
        if alpha.norm() == 0.0 {
            return Err(Error::InvalidAlpha);
        }
        let ac = alpha.conj();
        let mut poly: Vec<CMatrix> = vec![];
        for (k, p) in self.poly.iter().enumerate() {
            add_slot(&mut poly, k, &p.scale(alpha), self.m, self.n);
            add_slot(&mut poly, k + 1, &p.scale(ac), self.m, self.n);
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let aff = alpha + ac * t.lambda;
            let d = t.coeffs.len();
            let mut coeffs = Vec::with_capacity(d);
            for j in 1..=d {
                let mut c = t.coeffs[j - 1].scale(aff);
                if j < d {
                    c = &c + &t.coeffs[j].scale(ac);
                }
                coeffs.push(c);
            }
            // The order-lowered piece of the j=1 term is a constant.
            add_slot(&mut poly, 0, &t.coeffs[0].scale(ac), self.m, self.n);
            terms.push(PoleTerm {
                lambda: t.lambda,
                coeffs,
            });
        }
        RationalMatrix::from_parts(self.m, self.n, poly, terms)
    }

    // ----------------------------------------------- symmetry coefficient maps --

    /// Paraconjugate z -> [R(1/conj(z))]^* as a closed-form coefficient map:
    /// z^k -> P_k^* z^{-k}; a pole at 0 of order j -> degree-j polynomial;
    /// a pole at lambda != 0 maps to 1/conj(lambda) plus a constant:
    /// A_j/(z-lambda)^j -> (-mu)^j A_j^* [1 + sum_k C(j,k) mu^k/(z-mu)^k].
    pub fn paraconjugate(&self) -> Result<RationalMatrix> {
        let (m, n) = (self.n, self.m);
        let mut poly: Vec<CMatrix> = vec![];
        let mut zero_pole: Vec<CMatrix> = vec![];
        let mut terms: Vec<PoleTerm> = vec![];
        for (k, p) in self.poly.iter().enumerate() {
            let pa = p.adjoint();
            if k == 0 {
                add_slot(&mut poly, 0, &pa, m, n);
            } else {
                add_slot(&mut zero_pole, k - 1, &pa, m, n);
            }
        }
        for t in &self.terms {
            if t.lambda.norm() == 0.0 {
                for (jm1, a) in t.coeffs.iter().enumerate() {
                    add_slot(&mut poly, jm1 + 1, &a.adjoint(), m, n);
                }
                continue;
            }
            let mu = t.lambda.conj().finv();
            let d = t.coeffs.len();
            let mut coeffs = vec![CMatrix::zeros(m, n); d];
            for (jm1, a) in t.coeffs.iter().enumerate() {
                let j = jm1 + 1;
                let aa = a.adjoint().scale((-mu).powu(j as u32));
                add_slot(&mut poly, 0, &aa, m, n);
                let mut binom = 1.0f64;
                let mut mupow = c64(1.0, 0.0);
                for k in 1..=j {
                    binom = binom * ((j - k + 1) as f64) / (k as f64);
                    mupow *= mu;
                    coeffs[k - 1] = &coeffs[k - 1] + &aa.scale(mupow * binom);
                }
            }
            terms.push(PoleTerm { lambda: mu, coeffs });
        }
        if !zero_pole.is_empty() {
            terms.push(PoleTerm {
                lambda: c64(0.0, 0.0),
                coeffs: zero_pole,
            });
        }
        RationalMatrix::from_parts(m, n, poly, terms)
    }

    /// z -> [R(conj(z))]^*: conjugate poles, adjoint coefficients.
    fn hermitian_image(&self) -> RationalMatrix {
        RationalMatrix {
            m: self.n,
            n: self.m,
            poly: self.poly.iter().map(|p| p.adjoint()).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| PoleTerm {
                    lambda: t.lambda.conj(),
                    coeffs: t.coeffs.iter().map(|c| c.adjoint()).collect(),
                })
                .collect(),
        }
        .canonical()
    }

    /// z -> [R(-conj(z))]^*: the image tested against R for *-even/odd.
    fn even_image(&self) -> RationalMatrix {
        let h = self.hermitian_image();
        RationalMatrix {
            m: h.m,
            n: h.n,
            poly: h
                .poly
                .iter()
                .enumerate()
                .map(|(k, p)| if k % 2 == 1 { p.scale(c64(-1.0, 0.0)) } else { p.clone() })
                .collect(),
            terms: h
                .terms
                .iter()
                .map(|t| PoleTerm {
                    lambda: -t.lambda,
                    coeffs: t
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(jm1, c)| {
                            if jm1 % 2 == 0 {
                                c.scale(c64(-1.0, 0.0))
                            } else {
                                c.clone()
                            }
                        })
                        .collect(),
                })
                .collect(),
        }
        .canonical()
    }

    /// Test R against the defining identity of `kind`; the returned tag
    /// carries the measured deviation and `kind` itself only when the
    /// deviation is within tol * max(1, coefficient scale).
    pub fn is_structured(&self, kind: StructureKind, tol: f64) -> Result<StructureTag> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.m,
                cols: self.n,
            });
        }
        let image = match kind {
            StructureKind::ParaHermitian | StructureKind::ParaSkewHermitian => {
                self.paraconjugate()?
            }
            StructureKind::Hermitian | StructureKind::SkewHermitian => self.hermitian_image(),
            StructureKind::Even | StructureKind::Odd => self.even_image(),
            StructureKind::Palindromic | StructureKind::AntiPalindromic | StructureKind::None => {
                return Err(Error::InvalidInput(
                    "palindromic tests apply to pencils, not rational matrices".into(),
                ))
            }
        };
        let target = match kind {
            StructureKind::ParaHermitian | StructureKind::Hermitian | StructureKind::Even => {
                self.clone().canonical()
            }
            _ => self.neg(),
        };
        let deviation = coeff_distance(&image, &target);
        let scale = self.coeff_scale().max(1.0);
        Ok(StructureTag {
            kind: if deviation <= tol * scale {
                kind
            } else {
                StructureKind::None
            },
            deviation,
        })
    }
}

/// Coefficient-wise distance of two canonical rational matrices: max over
/// polynomial slots and nearest-matched pole terms; an unmatched pole counts
/// as its own largest coefficient.
pub fn coeff_distance(a: &RationalMatrix, b: &RationalMatrix) -> f64 {
    if a.m != b.m || a.n != b.n {
        return f64::INFINITY;
    }
    let zero = CMatrix::zeros(a.m, a.n);
    let mut dev = 0.0f64;
    for k in 0..a.poly.len().max(b.poly.len()) {
        let pa = a.poly.get(k).unwrap_or(&zero);
        let pb = b.poly.get(k).unwrap_or(&zero);
        dev = dev.max((pa - pb).max_norm());
    }
    let mut used = vec![false; b.terms.len()];
    for ta in &a.terms {
        let mut best: Option<(usize, f64)> = None;
        for (i, tb) in b.terms.iter().enumerate() {
            if used[i] {
                continue;
            }
            let g = (ta.lambda - tb.lambda).norm();
            if best.map_or(true, |(_, bg)| g < bg) {
                best = Some((i, g));
            }
        }
        match best {
            Some((i, g)) if g <= 1e-6 * (1.0 + ta.lambda.norm()) => {
                used[i] = true;
                let tb = &b.terms[i];
                for j in 0..ta.coeffs.len().max(tb.coeffs.len()) {
                    let ca = ta.coeffs.get(j).unwrap_or(&zero);
                    let cb = tb.coeffs.get(j).unwrap_or(&zero);
                    dev = dev.max((ca - cb).max_norm());
                }
                let cscale = ta.max_coeff_norm().max(tb.max_coeff_norm());
                dev = dev.max(g * (1.0 + cscale));
            }
            _ => dev = dev.max(ta.max_coeff_norm()),
        }
    }
    for (i, tb) in b.terms.iter().enumerate() {
        if !used[i] {
            dev = dev.max(tb.max_coeff_norm());
        }
    }
    dev
}

/// Deterministic non-special evaluation points spread over an annulus around
/// the unit circle (golden-angle spiral, radii bounded away from 0, 1, inf).
pub fn sample_points(count: usize) -> Vec<Complex64> {
    let radii = [0.93, 1.21, 0.74, 1.53, 0.87, 1.13, 0.66, 1.77];
    (0..count)
        .map(|j| {
            let r = radii[j % radii.len()] + 0.0173 * (j / radii.len()) as f64;
            let th = 2.399963 * j as f64 + 0.45;
            c64(r * th.cos(), r * th.sin())
        })
        .collect()
}

// ------------------------------------------------------------ realization --

/// Generalized state-space quadruple for a strictly proper transfer
/// B (z A1 - A0)^{-1} C, with B io_rows x state and C state x io_cols.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Realization {
    #[serde(rename = "A1")]
    pub a1: CMatrix,
    #[serde(rename = "A0")]
    pub a0: CMatrix,
    #[serde(rename = "B")]
    pub b: CMatrix,
    #[serde(rename = "C")]
    pub c: CMatrix,
}

impl Realization {
    pub fn new(a1: CMatrix, a0: CMatrix, b: CMatrix, c: CMatrix) -> Result<Self> {
        let s = a1.rows();
        if !a1.is_square() || !a0.is_square() || a0.rows() != s {
            return Err(Error::ShapeError("realization A-blocks must be square and equal-sized".into()));
        }
        if b.cols() != s || c.rows() != s {
            return Err(Error::ShapeError(
                "realization border blocks must match the state dimension".into(),
            ));
        }
        Ok(Realization { a1, a0, b, c })
    }

    pub fn state_dim(&self) -> usize {
        self.a1.rows()
    }

    pub fn io_rows(&self) -> usize {
        self.b.rows()
    }

    pub fn io_cols(&self) -> usize {
        self.c.cols()
    }

    /// B (z0 A1 - A0)^{-1} C.
    pub fn eval(&self, z0: Complex64) -> Result<CMatrix> {
        if self.state_dim() == 0 {
            return Ok(CMatrix::zeros(self.io_rows(), self.io_cols()));
        }
        let a = &self.a1.scale(z0) - &self.a0;
        let x = solve(&a, &self.c).map_err(|e| match e {
            Error::SingularSolve { sigma_min } => Error::EvalAtSystemPole { sigma_min },
            other => other,
        })?;
        Ok(&self.b * &x)
    }
}

// ----------------------------------------------------------------- pencil --

/// Degree-1 system pencil z M1 + M0 with block partition
/// [[-A(z), B(z)], [C(z), D(z)]]; the stored top-left block is -A(z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pencil {
    #[serde(rename = "M1")]
    pub m1: CMatrix,
    #[serde(rename = "M0")]
    pub m0: CMatrix,
    pub state_dim: usize,
    pub io_rows: usize,
    pub io_cols: usize,
}

impl Pencil {
    pub fn new(
        m1: CMatrix,
        m0: CMatrix,
        state_dim: usize,
        io_rows: usize,
        io_cols: usize,
    ) -> Result<Self> {
        let rows = state_dim + io_rows;
        let cols = state_dim + io_cols;
        for (name, m) in [("M1", &m1), ("M0", &m0)] {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::ShapeError(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite entries in {name}")));
            }
        }
        Ok(Pencil {
            m1,
            m0,
            state_dim,
            io_rows,
            io_cols,
        })
    }

    pub fn size(&self) -> (usize, usize) {
        (self.m1.rows(), self.m1.cols())
    }

    pub fn is_square(&self) -> bool {
        self.m1.is_square()
    }

    /// z0 M1 + M0.
    pub fn at(&self, z0: Complex64) -> CMatrix {
        &self.m1.scale(z0) + &self.m0
    }

    /// Reversal swap: rev (z M1 + M0) = z M0 + M1.
    pub fn rev(&self) -> Pencil {
        Pencil {
            m1: self.m0.clone(),
            m0: self.m1.clone(),
            state_dim: self.state_dim,
            io_rows: self.io_rows,
            io_cols: self.io_cols,
        }
    }

    /// The A-block pencil coefficients (A1, A0) with A(z) = z A1 + A0
    /// (sign convention already folded in: stored top-left is -A).
    pub fn a_blocks(&self) -> (CMatrix, CMatrix) {
        let s = self.state_dim;
        (
            self.m1.block(0, s, 0, s).scale(c64(-1.0, 0.0)),
            self.m0.block(0, s, 0, s).scale(c64(-1.0, 0.0)),
        )
    }

    /// Schur complement transfer D(z0) + C(z0) A(z0)^{-1} B(z0).
    pub fn transfer(&self, z0: Complex64) -> Result<CMatrix> {
        let s = self.state_dim;
        let p = self.at(z0);
        let d = p.block(s, s + self.io_rows, s, s + self.io_cols);
        if s == 0 {
            return Ok(d);
        }
        let a = p.block(0, s, 0, s).scale(c64(-1.0, 0.0));
        let b = p.block(0, s, s, s + self.io_cols);
        let c = p.block(s, s + self.io_rows, 0, s);
        let x = solve(&a, &b).map_err(|e| match e {
            Error::SingularSolve { sigma_min } => Error::EvalAtSystemPole { sigma_min },
            other => other,
        })?;
        Ok(&d + &(&c * &x))
    }

    /// Max-norm deviation of the defining identity of one structure kind.
    pub fn structure_deviation(&self, kind: StructureKind) -> f64 {
        let m1a = self.m1.adjoint();
        let m0a = self.m0.adjoint();
        match kind {
            StructureKind::Palindromic => (&self.m0 - &m1a).max_norm(),
            StructureKind::AntiPalindromic => (&self.m0 + &m1a).max_norm(),
            StructureKind::Hermitian => (&self.m1 - &m1a)
                .max_norm()
                .max((&self.m0 - &m0a).max_norm()),
            StructureKind::Even => (&self.m1 + &m1a)
                .max_norm()
                .max((&self.m0 - &m0a).max_norm()),
            StructureKind::Odd => (&self.m1 - &m1a)
                .max_norm()
                .max((&self.m0 + &m0a).max_norm()),
            _ => f64::INFINITY,
        }
    }

    /// Detect the pencil's structure. Checked in a fixed priority order
    /// (palindromic, anti-palindromic, Hermitian, even, odd) because the
    /// classes overlap; constructors in this crate always produce pencils
    /// whose primary tag is one of the first two.
    pub fn structure(&self, tol: f64) -> StructureTag {
        let scale = self.m1.max_norm().max(self.m0.max_norm()).max(1.0);
        let order = [
            StructureKind::Palindromic,
            StructureKind::AntiPalindromic,
            StructureKind::Hermitian,
            StructureKind::Even,
            StructureKind::Odd,
        ];
        let mut min_dev = f64::INFINITY;
        for kind in order {
            let dev = self.structure_deviation(kind);
            if dev <= tol * scale {
                return StructureTag {
                    kind,
                    deviation: dev,
                };
            }
            min_dev = min_dev.min(dev);
        }
        StructureTag {
            kind: StructureKind::None,
            deviation: min_dev,
        }
    }

    /// sigma_min of the A-block at z0 (system-pole proximity indicator).
    pub fn a_sigma_min(&self, z0: Complex64) -> Result<f64> {
        let s = self.state_dim;
        if s == 0 {
            return Ok(f64::INFINITY);
        }
        let p = self.at(z0);
        sigma_min(&p.block(0, s, 0, s))
    }
}
