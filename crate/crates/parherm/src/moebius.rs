//! The three Möbius families exchanging the unit circle with the real line
//! (Cayley-type T), or with the imaginary axis (bilinear B and its weighted
//! generalization B_alpha), acting on points, rational matrices, and pencils.
//!
//! Substitution is a closed-form coefficient map: a pole of R travels to its
//! preimage with the same order, with numerators re-expanded through binomial
//! identities. Nothing is sampled or interpolated, so multiplicities survive
//! exactly.

use crate::error::{Error, Result};
use crate::numerics::{c64, sigma_min, CMatrix, Eigenvalue};
use crate::rmatrix::{PoleTerm, Pencil, RationalMatrix, StructureKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// One of the map families; `alpha` is used only by `GeneralBalpha` and is
/// normalized to the unit circle on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoebiusMap {
    /// z = (i - x)/(i + x): real axis <-> unit circle.
    CayleyT,
    /// z = (1 + s)/(1 - s): imaginary axis <-> unit circle.
    BilinearB,
    /// z = (alpha + alpha s)/(conj(alpha) - conj(alpha) s).
    GeneralBalpha {
        #[serde(with = "crate::numerics::complex_pair")]
        alpha: Complex64,
    },
}

impl MoebiusMap {
    pub fn balpha(alpha: Complex64) -> Result<Self> {
        let n = alpha.norm();
        if n == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidAlpha);
        }
        Ok(MoebiusMap::GeneralBalpha { alpha: alpha / n })
    }

    /// The weight parameter: the output pencil linearizes
    /// (alpha + conj(alpha) z) R(z); T and B use alpha = 1.
    pub fn weight_alpha(&self) -> Complex64 {
        match self {
            MoebiusMap::CayleyT | MoebiusMap::BilinearB => c64(1.0, 0.0),
            MoebiusMap::GeneralBalpha { alpha } => *alpha,
        }
    }

    /// Projective coefficients (a, b, c, d) with z = (a t + b)/(c t + d).
    pub fn quadruple(&self, dir: Direction) -> (Complex64, Complex64, Complex64, Complex64) {
        let i = c64(0.0, 1.0);
        let one = c64(1.0, 0.0);
        match (self, dir) {
            (MoebiusMap::CayleyT, Direction::Forward) => (-one, i, one, i),
            (MoebiusMap::CayleyT, Direction::Inverse) => (-i, i, one, one),
            (MoebiusMap::BilinearB, Direction::Forward) => (one, one, -one, one),
            (MoebiusMap::BilinearB, Direction::Inverse) => (one, -one, one, one),
            (MoebiusMap::GeneralBalpha { alpha }, Direction::Forward) => {
                (*alpha, *alpha, -alpha.conj(), alpha.conj())
            }
            (MoebiusMap::GeneralBalpha { alpha }, Direction::Inverse) => {
                (alpha.conj(), -*alpha, alpha.conj(), *alpha)
            }
        }
    }

    /// Projective evaluation; a vanishing denominator maps to infinity.
    pub fn map_point(&self, t0: Eigenvalue, dir: Direction) -> Eigenvalue {
        let (a, b, c, d) = self.quadruple(dir);
        let (num, den) = match t0 {
            Eigenvalue::Finite(t) => (a * t + b, c * t + d),
            Eigenvalue::Infinite => (a, c),
        };
        if den.norm() == 0.0 {
            Eigenvalue::Infinite
        } else {
            Eigenvalue::Finite(num / den)
        }
    }

    pub fn map_finite(&self, t0: Complex64, dir: Direction) -> Eigenvalue {
        self.map_point(Eigenvalue::Finite(t0), dir)
    }
}

// ------------------------------------------------------------ substitution --

/// G(t) := R(f(t)) for f the map in the given direction, as a closed-form
/// re-expansion. With f(t) = (a t + b)/(c t + d) and Delta = ad - bc:
///
/// - pole lambda, u := a - lambda c != 0, mu := -(b - lambda d)/u:
///   (f - lambda)^{-j} = sum_{i=0..j} C(j,i) c^i Delta^{j-i} u^{i-2j+...}
///   collected below as a constant plus poles of order 1..j at mu = f^{-1}(lambda);
/// - u = 0 (lambda is the image of t = infinity): (f - lambda)^{-j} becomes the
///   polynomial v^{-j} (c t + d)^j with v = b - lambda d;
/// - polynomial term P_k z^k maps to a constant plus a pole of order <= k at
///   nu = -d/c (or stays polynomial when c = 0).
pub fn substitute(r: &RationalMatrix, map: &MoebiusMap, dir: Direction) -> Result<RationalMatrix> {
    let (a, b, c, d) = map.quadruple(dir);
    let delta = a * d - b * c;
    if delta.norm() == 0.0 {
        return Err(Error::InvalidInput("degenerate Möbius map".into()));
    }
    let (m, n) = (r.m, r.n);
    let zero = CMatrix::zeros(m, n);
    let mut poly: Vec<CMatrix> = vec![];
    let mut terms: Vec<PoleTerm> = vec![];
    let push_poly = |poly: &mut Vec<CMatrix>, k: usize, blk: &CMatrix| {
        while poly.len() <= k {
            poly.push(zero.clone());
        }
        poly[k] = &poly[k] + blk;
    };

    // Polynomial part.
    if let Some(p0) = r.poly.first() {
        push_poly(&mut poly, 0, p0);
    }
    for (k, pk) in r.poly.iter().enumerate().skip(1) {
        if c.norm() == 0.0 {
            // Affine map: (a t + b)^k / d^k stays polynomial.
            let mut binom = 1.0f64;
            for i in 0..=k {
                if i > 0 {
                    binom = binom * ((k - i + 1) as f64) / (i as f64);
                }
                let w = a.powu(i as u32) * b.powu((k - i) as u32) / d.powu(k as u32);
                push_poly(&mut poly, i, &pk.scale(w * binom));
            }
            continue;
        }
        let nu = -d / c;
        push_poly(&mut poly, 0, &pk.scale((a / c).powu(k as u32)));
        let mut coeffs = vec![zero.clone(); k];
        let mut binom = 1.0f64;
        for q in 1..=k {
            binom = binom * ((k - q + 1) as f64) / (q as f64);
            let w = a.powu((k - q) as u32) * (-delta).powu(q as u32) / c.powu((k + q) as u32);
            coeffs[q - 1] = pk.scale(w * binom);
        }
        terms.push(PoleTerm::new(nu, coeffs));
    }

    // Pole terms.
    for t in &r.terms {
        let u = a - t.lambda * c;
        let v = b - t.lambda * d;
        let u_scale = a.norm() + t.lambda.norm() * c.norm() + 1.0;
        if u.norm() <= 1e-12 * u_scale {
            // Pole at the image of t = infinity: becomes polynomial content.
            if v.norm() == 0.0 {
                return Err(Error::InvalidInput("degenerate Möbius map".into()));
            }
            for (jm1, aj) in t.coeffs.iter().enumerate() {
                let j = jm1 + 1;
                let vinv = v.powu(j as u32).finv();
                let mut binom = 1.0f64;
                for i in 0..=j {
                    if i > 0 {
                        binom = binom * ((j - i + 1) as f64) / (i as f64);
                    }
                    let w = vinv * c.powu(i as u32) * d.powu((j - i) as u32);
                    push_poly(&mut poly, i, &aj.scale(w * binom));
                }
            }
            continue;
        }
        let mu = -v / u;
        let dmax = t.coeffs.len();
        let mut coeffs = vec![zero.clone(); dmax];
        for (jm1, aj) in t.coeffs.iter().enumerate() {
            let j = jm1 + 1;
            push_poly(&mut poly, 0, &aj.scale((c / u).powu(j as u32)));
            let mut binom = 1.0f64;
            for k in 1..=j {
                binom = binom * ((j - k + 1) as f64) / (k as f64);
                let w = c.powu((j - k) as u32) * delta.powu(k as u32)
                    / u.powu((j + k) as u32);
                coeffs[k - 1] = &coeffs[k - 1] + &aj.scale(w * binom);
            }
        }
        terms.push(PoleTerm::new(mu, coeffs));
    }

    RationalMatrix::from_parts(m, n, poly, terms)
}

// ---------------------------------------------------------- palindromization --

/// Turn a Hermitian pencil (route T) or a *-even pencil (routes B / B_alpha)
/// into an exactly palindromic one:
///
/// - T:       M1 = S0 - i S1, and L(z) = (1+z)S0 + i(1-z)S1;
/// - B_alpha: M1 = conj(alpha)(S0 + S1), and L(z) = z conj(alpha)(S0+S1) + alpha(S0-S1).
///
/// In both cases M0 is stored as M1 conjugate-transposed, which the structure
/// of the (symmetrized) input makes mathematically equal to the displayed
/// formula while keeping the stored palindromic deviation identically zero.
pub fn palindromize_pencil(s: &Pencil, map: &MoebiusMap) -> Result<Pencil> {
    let tol = 1e-9;
    let scale = s.m1.max_norm().max(s.m0.max_norm()).max(1.0);
    let (s1, s0) = match map {
        MoebiusMap::CayleyT => {
            let dev = s.structure_deviation(StructureKind::Hermitian);
            if dev > tol * scale {
                return Err(Error::StructureMismatch {
                    identity: "Hermitian pencil (S1 = S1^*, S0 = S0^*)",
                    deviation: dev,
                    tol: tol * scale,
                });
            }
            (s.m1.hermitian_part(), s.m0.hermitian_part())
        }
        MoebiusMap::BilinearB | MoebiusMap::GeneralBalpha { .. } => {
            let dev = s.structure_deviation(StructureKind::Even);
            if dev > tol * scale {
                return Err(Error::StructureMismatch {
                    identity: "*-even pencil (S1 = -S1^*, S0 = S0^*)",
                    deviation: dev,
                    tol: tol * scale,
                });
            }
            (s.m1.skew_hermitian_part(), s.m0.hermitian_part())
        }
    };
    let m1 = match map {
        MoebiusMap::CayleyT => &s0 - &s1.scale(c64(0.0, 1.0)),
        _ => (&s0 + &s1).scale(map.weight_alpha().conj()),
    };
    let m0 = m1.adjoint();
    Pencil::new(m1, m0, s.state_dim, s.io_rows, s.io_cols)
}

// ------------------------------------------------------------- pick alpha --

/// Search for a unimodular alpha whose excluded point -alpha^2 keeps the
/// stated margins from every pole of R and from R's zero set (smallest
/// singular value of an evaluation). alpha = 1 is always tried first.
pub fn pick_alpha(r: &RationalMatrix, trials: usize, seed: u64) -> Result<Complex64> {
    pick_alpha_with(r, trials, seed, 1e-3, 1e-6)
}

pub fn pick_alpha_with(
    r: &RationalMatrix,
    trials: usize,
    seed: u64,
    pole_margin: f64,
    zero_margin: f64,
) -> Result<Complex64> {
    if r.is_zero() {
        return Err(Error::InvalidInput("cannot pick alpha for the zero matrix".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidate = c64(1.0, 0.0);
    for _ in 0..trials.max(1) {
        let z_alpha = -candidate * candidate; // |alpha| = 1
        let pole_ok = r.nearest_pole_distance(z_alpha) >= pole_margin;
        let zero_ok = if pole_ok && r.is_square() {
            match r.eval(z_alpha) {
                Ok(v) => sigma_min(&v)? >= zero_margin,
                Err(Error::EvalAtPole { .. }) => false,
                Err(e) => return Err(e),
            }
        } else {
            pole_ok
        };
        if pole_ok && zero_ok {
            return Ok(candidate);
        }
        let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        candidate = c64(phi.cos(), phi.sin());
    }
    Err(Error::NoAlphaFound { trials })
}
