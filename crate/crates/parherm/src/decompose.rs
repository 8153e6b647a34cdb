//! Additive decomposition R = R_in + R_out + R_{S^1} + R_0 by pole location
//! (inside, outside, on the unit circle), plus Laurent polar sections for
//! matrices whose only poles sit at 0 and infinity.
//!
//! The split drives route selection: R_in feeds the Hankel realization,
//! R_out is recovered from R_in by paraconjugation symmetry, and a nonempty
//! R_{S^1} forces the Möbius route.

use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::rmatrix::{coeff_distance, ParaKind, PoleTerm, RationalMatrix};
use num_complex::Complex64;
use serde::Serialize;

/// Classification band: ||lambda| - 1| <= band counts as a unit-circle pole.
pub const DEFAULT_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySplit {
    /// Strictly proper, poles strictly inside the unit circle.
    pub r_in: RationalMatrix,
    /// Poles outside the circle including infinity; normalized to r_out(0) = 0.
    pub r_out: RationalMatrix,
    /// Strictly proper, poles on the unit circle.
    pub r_s1: RationalMatrix,
    /// Constant part.
    pub r0: CMatrix,
}

impl StabilitySplit {
    pub fn has_unit_circle_part(&self) -> bool {
        !self.r_s1.terms.is_empty()
    }

    /// r_s1 + r0, the proper para-structured remainder of the split.
    pub fn proper_part(&self) -> Result<RationalMatrix> {
        self.r_s1.add(&RationalMatrix::constant(self.r0.clone()))
    }

    /// Reassemble the original matrix.
    pub fn sum(&self) -> Result<RationalMatrix> {
        self.r_in
            .add(&self.r_out)?
            .add(&self.r_s1)?
            .add(&RationalMatrix::constant(self.r0.clone()))
    }
}

/// Pole-location split. Pole terms with |lambda| < 1 - band go to r_in,
/// those with ||lambda| - 1| <= band to r_s1; the rest plus the polynomial
/// part form S(z), split as r0 = S(0) and r_out = S - r0.
pub fn split_stability(r: &RationalMatrix, band: f64) -> StabilitySplit {
    let (m, n) = (r.m, r.n);
    let mut in_terms: Vec<PoleTerm> = vec![];
    let mut s1_terms: Vec<PoleTerm> = vec![];
    let mut out_terms: Vec<PoleTerm> = vec![];
    for t in &r.terms {
        let rho = t.lambda.norm();
        if (rho - 1.0).abs() <= band {
            s1_terms.push(t.clone());
        } else if rho < 1.0 {
            in_terms.push(t.clone());
        } else {
            out_terms.push(t.clone());
        }
    }
    // S(0) = P(0) + sum over outer poles of A_j (-lambda)^{-j}.
    let mut s_at_zero = r
        .poly
        .first()
        .cloned()
        .unwrap_or_else(|| CMatrix::zeros(m, n));
    for t in &out_terms {
        let mut w = Complex64::new(1.0, 0.0);
        for a in &t.coeffs {
            w /= -t.lambda;
            s_at_zero = &s_at_zero + &a.scale(w);
        }
    }
    // r_out = S - S(0): outer pole terms plus the polynomial part with the
    // constant slot replaced so the whole thing vanishes at 0.
    let mut out_poly = r.poly.clone();
    if out_poly.is_empty() && !out_terms.is_empty() {
        out_poly.push(CMatrix::zeros(m, n));
    }
    if !out_poly.is_empty() {
        out_poly[0] = &out_poly[0] - &s_at_zero;
    }
    let mk = |poly: Vec<CMatrix>, terms: Vec<PoleTerm>| {
        RationalMatrix {
            m,
            n,
            poly,
            terms,
        }
        .canonical()
    };
    StabilitySplit {
        r_in: mk(vec![], in_terms),
        r_out: mk(out_poly, out_terms),
        r_s1: mk(vec![], s1_terms),
        r0: s_at_zero,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSymmetryReport {
    /// Coefficient distance between paraconjugate(r_in) and +-r_out.
    pub inout_deviation: f64,
    /// Structure deviation of the proper part r_s1 + r0.
    pub proper_deviation: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Symmetry of a split of a para-(skew-)Hermitian matrix:
/// paraconjugate(R_in) must equal +-R_out and the proper remainder must be
/// para-(skew-)Hermitian on its own.
pub fn check_split_symmetry(split: &StabilitySplit, kind: ParaKind) -> Result<SplitSymmetryReport> {
    let image = split.r_in.paraconjugate()?;
    let target = if kind.sign() > 0.0 {
        split.r_out.clone()
    } else {
        split.r_out.neg()
    };
    let inout_deviation = coeff_distance(&image, &target);
    let proper = split.proper_part()?;
    let proper_deviation = if proper.is_square() {
        proper.is_structured(kind.rational_kind(), 1e-9)?.deviation
    } else {
        f64::INFINITY
    };
    let scale = split
        .r_in
        .coeff_scale()
        .max(split.r_out.coeff_scale())
        .max(proper.coeff_scale())
        .max(1.0);
    let tolerance = 1e-9 * scale;
    Ok(SplitSymmetryReport {
        inout_deviation,
        proper_deviation,
        tolerance,
        passes: inout_deviation <= tolerance && proper_deviation <= tolerance,
    })
}

/// Laurent coefficients of a para-structured matrix with poles only at 0 and
/// infinity: R(z) = sum_j R_{-j} z^{-j} + R_0 + sum_j R_j z^j.
#[derive(Debug, Clone, Serialize)]
pub struct PolarSections {
    /// neg[j-1] = R_{-j}.
    pub neg: Vec<CMatrix>,
    pub r0: CMatrix,
    /// pos[j-1] = R_j.
    pub pos: Vec<CMatrix>,
}

impl PolarSections {
    pub fn degree(&self) -> usize {
        self.pos.len()
    }
}

/// Extract and verify the polar sections: the pole order at 0 must equal the
/// polynomial degree, and R_{-j} = +-R_j^* within 1e-10 of the coefficient
/// scale (+ for the Hermitian kind, - for skew, likewise for R_0 itself).
pub fn polar_sections(r: &RationalMatrix, kind: ParaKind) -> Result<PolarSections> {
    if !r.is_square() {
        return Err(Error::NotSquare {
            rows: r.m,
            cols: r.n,
        });
    }
    let r = r.clone().canonical();
    for t in &r.terms {
        if t.lambda.norm() > 0.0 {
            return Err(Error::NotLaurentForm {
                pole: (t.lambda.re, t.lambda.im),
            });
        }
    }
    let neg = r
        .terms
        .first()
        .map(|t| t.coeffs.clone())
        .unwrap_or_default();
    let r0 = r
        .poly
        .first()
        .cloned()
        .unwrap_or_else(|| CMatrix::zeros(r.m, r.n));
    let pos: Vec<CMatrix> = r.poly.iter().skip(1).cloned().collect();
    if neg.len() != pos.len() {
        return Err(Error::SymmetryViolation(format!(
            "pole order at 0 is {} but polynomial degree is {}",
            neg.len(),
            pos.len()
        )));
    }
    let scale = r.coeff_scale().max(1.0);
    let sign = kind.sign();
    for (j, (lo, hi)) in neg.iter().zip(&pos).enumerate() {
        let dev = (lo - &hi.adjoint().scale(Complex64::new(sign, 0.0))).max_norm();
        if dev > 1e-10 * scale {
            return Err(Error::SymmetryViolation(format!(
                "R_(-{j1}) deviates from {s}R_{j1}^* by {dev:.3e}",
                j1 = j + 1,
                s = if sign > 0.0 { "" } else { "-" },
            )));
        }
    }
    let r0_dev = (&r0 - &r0.adjoint().scale(Complex64::new(sign, 0.0))).max_norm();
    if r0_dev > 1e-10 * scale {
        return Err(Error::SymmetryViolation(format!(
            "constant section deviates from its {} by {r0_dev:.3e}",
            if sign > 0.0 { "adjoint" } else { "negated adjoint" },
        )));
    }
    Ok(PolarSections { neg, r0, pos })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;
    use crate::rmatrix::sample_points;

    fn laurent() -> RationalMatrix {
        RationalMatrix::from_parts(
            1,
            1,
            vec![
                CMatrix::from_real_rows(&[&[2.0]]),
                CMatrix::from_real_rows(&[&[1.0]]),
            ],
            vec![PoleTerm::new(
                c64(0.0, 0.0),
                vec![CMatrix::from_real_rows(&[&[1.0]])],
            )],
        )
        .unwrap()
    }

    fn two_pole() -> RationalMatrix {
        RationalMatrix::from_parts(
            1,
            1,
            vec![CMatrix::from_real_rows(&[&[-1.0]])],
            vec![
                PoleTerm::new(c64(0.5, 0.0), vec![CMatrix::from_real_rows(&[&[1.0]])]),
                PoleTerm::new(c64(2.0, 0.0), vec![CMatrix::from_real_rows(&[&[-4.0]])]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn split_of_laurent_fixture() {
        let s = split_stability(&laurent(), DEFAULT_BAND);
        assert_eq!(s.r_in.terms.len(), 1);
        assert_eq!(s.r_in.terms[0].lambda, c64(0.0, 0.0));
        assert!(s.r_s1.is_zero());
        assert!((s.r0[(0, 0)] - c64(2.0, 0.0)).norm() == 0.0);
        // r_out = z.
        assert_eq!(s.r_out.poly.len(), 2);
        assert!(s.r_out.poly[0].max_norm() == 0.0);
        assert!((s.r_out.poly[1][(0, 0)] - c64(1.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn split_of_two_pole_fixture() {
        let s = split_stability(&two_pole(), DEFAULT_BAND);
        assert_eq!(s.r_in.terms.len(), 1);
        assert!((s.r_in.terms[0].lambda - c64(0.5, 0.0)).norm() < 1e-15);
        assert!((s.r0[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        // r_out = -2 - 4/(z-2) = -2z/(z-2), value 0 at z = 0.
        let at0 = s.r_out.eval(c64(0.0, 0.0)).unwrap();
        assert!(at0.max_norm() < 1e-14);
        let at1 = s.r_out.eval(c64(1.0, 0.0)).unwrap();
        assert!((at1[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-14, "-2*1/(1-2) = 2");
    }

    #[test]
    fn split_unimodular_pole_goes_to_s1() {
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![],
            vec![PoleTerm::new(
                c64(1.0, 0.0),
                vec![CMatrix::from_real_rows(&[&[1.0]])],
            )],
        )
        .unwrap();
        let s = split_stability(&r, DEFAULT_BAND);
        assert!(s.r_in.is_zero() && s.r_out.is_zero());
        assert_eq!(s.r_s1.terms.len(), 1);
        assert!(s.r0.max_norm() == 0.0);
    }

    #[test]
    fn split_sum_reconstruction_and_projection() {
        let r = two_pole();
        let s = split_stability(&r, DEFAULT_BAND);
        let back = s.sum().unwrap();
        for z0 in sample_points(10) {
            let (Ok(lhs), Ok(rhs)) = (back.eval(z0), r.eval(z0)) else { continue };
            assert!((&lhs - &rhs).max_norm() < 1e-10);
        }
        // Projection: each part re-splits into itself.
        let again = split_stability(&s.r_in, DEFAULT_BAND);
        assert!(coeff_distance(&again.r_in, &s.r_in) < 1e-12);
        assert!(again.r_out.is_zero() && again.r_s1.is_zero());
        let again = split_stability(&s.r_out, DEFAULT_BAND);
        assert!(coeff_distance(&again.r_out, &s.r_out) < 1e-12);
        assert!(again.r_in.is_zero() && again.r_s1.is_zero());
        assert!(again.r0.max_norm() < 1e-12, "r_out(0) = 0 already");
    }

    #[test]
    fn symmetry_check_passes_on_para_hermitian_splits() {
        for r in [laurent(), two_pole()] {
            let s = split_stability(&r, DEFAULT_BAND);
            let rep = check_split_symmetry(&s, ParaKind::Hermitian).unwrap();
            assert!(rep.passes, "{rep:?}");
            assert!(rep.inout_deviation < 1e-12);
        }
    }

    #[test]
    fn symmetry_check_fails_on_one_sided_and_perturbed() {
        // R = 1/z alone: paraconjugate(r_in) = z but r_out = 0.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![],
            vec![PoleTerm::new(
                c64(0.0, 0.0),
                vec![CMatrix::from_real_rows(&[&[1.0]])],
            )],
        )
        .unwrap();
        let rep = check_split_symmetry(&split_stability(&r, DEFAULT_BAND), ParaKind::Hermitian)
            .unwrap();
        assert!(!rep.passes);

        // Perturb one pole coefficient of the two-pole fixture by 1e-3.
        let mut r = two_pole();
        r.terms[1].coeffs[0][(0, 0)] += c64(1e-3, 0.0);
        let rep = check_split_symmetry(&split_stability(&r, DEFAULT_BAND), ParaKind::Hermitian)
            .unwrap();
        assert!(!rep.passes);
        assert!(rep.inout_deviation > 1e-4);
    }

    #[test]
    fn skew_split_symmetry() {
        // R = z - 1/z is para-skew-Hermitian.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![
                CMatrix::zeros(1, 1),
                CMatrix::from_real_rows(&[&[1.0]]),
            ],
            vec![PoleTerm::new(
                c64(0.0, 0.0),
                vec![CMatrix::from_real_rows(&[&[-1.0]])],
            )],
        )
        .unwrap();
        let rep = check_split_symmetry(&split_stability(&r, DEFAULT_BAND), ParaKind::Skew).unwrap();
        assert!(rep.passes, "{rep:?}");
    }

    #[test]
    fn polar_sections_of_laurent_fixture() {
        let p = polar_sections(&laurent(), ParaKind::Hermitian).unwrap();
        assert_eq!(p.degree(), 1);
        assert!((p.neg[0][(0, 0)] - c64(1.0, 0.0)).norm() == 0.0);
        assert!((p.pos[0][(0, 0)] - c64(1.0, 0.0)).norm() == 0.0);
        assert!((p.r0[(0, 0)] - c64(2.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn polar_sections_imaginary_coefficients() {
        // R = i z - i/z: R_{-1} = -i = (i)^* = R_1^*, R_0 = 0.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![
                CMatrix::zeros(1, 1),
                CMatrix::from_rows(vec![vec![c64(0.0, 1.0)]]).unwrap(),
            ],
            vec![PoleTerm::new(
                c64(0.0, 0.0),
                vec![CMatrix::from_rows(vec![vec![c64(0.0, -1.0)]]).unwrap()],
            )],
        )
        .unwrap();
        let p = polar_sections(&r, ParaKind::Hermitian).unwrap();
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn polar_sections_rejections() {
        // Degree mismatch: z^2 + 1/z.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![
                CMatrix::zeros(1, 1),
                CMatrix::zeros(1, 1),
                CMatrix::from_real_rows(&[&[1.0]]),
            ],
            vec![PoleTerm::new(
                c64(0.0, 0.0),
                vec![CMatrix::from_real_rows(&[&[1.0]])],
            )],
        )
        .unwrap();
        assert!(matches!(
            polar_sections(&r, ParaKind::Hermitian),
            Err(Error::SymmetryViolation(_))
        ));

        // Extra finite pole.
        assert!(matches!(
            polar_sections(&two_pole(), ParaKind::Hermitian),
            Err(Error::NotLaurentForm { .. })
        ));

        // Sign mismatch for the skew kind: z + 1/z is para-Hermitian, not skew.
        assert!(matches!(
            polar_sections(&laurent(), ParaKind::Skew),
            Err(Error::SymmetryViolation(_))
        ));
    }
}
