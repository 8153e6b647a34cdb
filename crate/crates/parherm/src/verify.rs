//! Certification battery for linearization claims.
//!
//! A claim bundles a pencil `L`, the source rational matrix `R`, the weight
//! parameter `alpha`, and the target structure kind. [`certify`] runs four
//! independent checks and returns a serializable [`Certificate`]:
//!
//! 1. structure: `M0 = +/- M1^*` holds in the stored entries (constructed
//!    pencils satisfy it exactly; the tolerance only matters for pencils read
//!    back from disk or produced elsewhere),
//! 2. transfer: `transfer(L, z0) = (alpha + conj(alpha) z0) R(z0)` at sample
//!    points away from the poles,
//! 3. strong minimality: full-rank border strips at every A-block eigenvalue
//!    and at infinity,
//! 4. symmetry: the spectrum of `L` is closed under `lambda -> 1/conj(lambda)`.
//!
//! The CLI `verify` subcommand and the batch sweep both consume this module;
//! a claim whose transfer equals `R` itself rather than the weighted function
//! fails here, which is the runtime face of the fact that no structured pencil
//! can linearize `R` directly.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{pencil_eigenvalues, Eigenvalue};
use crate::rmatrix::{sample_points, ParaKind, Pencil, RationalMatrix};
use crate::structural::{
    check_strong_minimality, symmetry_report, MinimalityReport, SymmetryReport,
};

/// Tolerances and sampling effort for one certification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Relative bound on the structure deviation `|M0 -/+ M1^*|`.
    pub structure_tol: f64,
    /// Relative bound on the worst transfer residual.
    pub transfer_tol: f64,
    /// Rank tolerance for the strong-minimality strips.
    pub minimality_tol: f64,
    /// Relative gap for reciprocal eigenvalue pairing.
    pub symmetry_tol: f64,
    /// Number of transfer sample points to test.
    pub transfer_points: usize,
    /// Weight parameter: the claim is transfer = (alpha + conj(alpha) z) R.
    pub alpha: Complex64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            structure_tol: 1e-9,
            transfer_tol: 1e-9,
            minimality_tol: 1e-8,
            symmetry_tol: 1e-8,
            transfer_points: 20,
            alpha: Complex64::new(1.0, 0.0),
        }
    }
}

/// Structure check outcome: deviation against the pencil's own scale.
#[derive(Debug, Clone, Serialize)]
pub struct StructureCheck {
    pub deviation: f64,
    pub scale: f64,
    pub passed: bool,
}

/// Transfer check outcome: worst per-point relative residual.
#[derive(Debug, Clone, Serialize)]
pub struct TransferCheck {
    pub worst_residual: f64,
    pub points_tested: usize,
    pub passed: bool,
}

/// Combined report of all four checks.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub kind: ParaKind,
    pub structure: StructureCheck,
    pub transfer: TransferCheck,
    pub minimality: MinimalityReport,
    pub symmetry: SymmetryReport,
}

impl Certificate {
    pub fn passes(&self) -> bool {
        self.structure.passed
            && self.transfer.passed
            && self.minimality.passes()
            && self.symmetry.passes()
    }

    /// Names of the failed checks, empty iff `passes()`.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.structure.passed {
            out.push("structure");
        }
        if !self.transfer.passed {
            out.push("transfer");
        }
        if !self.minimality.passes() {
            out.push("minimality");
        }
        if !self.symmetry.passes() {
            out.push("symmetry");
        }
        out
    }
}

/// Run the full battery on the claim that `l` is a structured strongly
/// minimal linearization of `(alpha + conj(alpha) z) r` of the given kind.
pub fn certify(
    l: &Pencil,
    r: &RationalMatrix,
    kind: ParaKind,
    opts: &VerifyOptions,
) -> Result<Certificate> {
    if l.io_rows != r.m || l.io_cols != r.n {
        return Err(Error::ShapeError(format!(
            "pencil transfer is {}x{} but the rational matrix is {}x{}",
            l.io_rows, l.io_cols, r.m, r.n
        )));
    }
    if opts.alpha.norm() == 0.0 {
        return Err(Error::InvalidInput("weight parameter alpha must be nonzero".into()));
    }

    let scale = l.m1.max_norm().max(l.m0.max_norm()).max(1.0);
    let deviation = l.structure_deviation(kind.pencil_kind());
    let structure = StructureCheck {
        deviation,
        scale,
        passed: deviation <= opts.structure_tol * scale,
    };

    let transfer = transfer_check(l, r, opts)?;
    let minimality = check_strong_minimality(l, opts.minimality_tol)?;

    let eigs = pencil_eigenvalues(&l.m1, &l.m0)?;
    let mut spectrum: Vec<Eigenvalue> = eigs
        .finite_expanded()
        .into_iter()
        .map(Eigenvalue::Finite)
        .collect();
    spectrum.extend(std::iter::repeat(Eigenvalue::Infinite).take(eigs.infinite_count));
    let symmetry = symmetry_report(&spectrum, opts.symmetry_tol);

    Ok(Certificate {
        kind,
        structure,
        transfer,
        minimality,
        symmetry,
    })
}

fn transfer_check(l: &Pencil, r: &RationalMatrix, opts: &VerifyOptions) -> Result<TransferCheck> {
    let want_points = opts.transfer_points.max(1);
    let candidates = sample_points(8 * want_points + 16);
    let mut tested = 0;
    let mut worst = 0.0f64;
    for z in candidates {
        if tested >= want_points {
            break;
        }
        // Stay clear of poles of R; for structured inputs these cover the
        // A-block singularities of every constructor in this crate.
        if r.terms.iter().any(|t| (z - t.lambda).norm() < 1e-3) {
            continue;
        }
        let rv = match r.eval(z) {
            Ok(v) => v,
            Err(Error::EvalAtPole { .. }) => continue,
            Err(e) => return Err(e),
        };
        let lv = match l.transfer(z) {
            Ok(v) => v,
            Err(Error::EvalAtSystemPole { .. }) => continue,
            Err(e) => return Err(e),
        };
        let want = rv.scale(opts.alpha + opts.alpha.conj() * z);
        let dev = (&lv - &want).fro_norm();
        let point_scale = 1.0 + want.fro_norm().max(lv.fro_norm());
        worst = worst.max(dev / point_scale);
        tested += 1;
    }
    if tested == 0 {
        return Err(Error::InvalidInput(
            "all transfer sample points fell onto poles or system singularities".into(),
        ));
    }
    Ok(TransferCheck {
        worst_residual: worst,
        points_tested: tested,
        passed: worst <= opts.transfer_tol,
    })
}

/// Strip the `(1 + z)` weight from a pencil built by the constructors in this
/// crate. A border or corner entry carries the weight exactly when its two
/// coefficients coincide (the entry is `c (1 + z)`); zeroing the `z`-part of
/// those entries turns the transfer from `(1 + z) R` into `R` itself. Used as
/// the negative control: the result is no longer structured and its transfer
/// no longer matches the weighted claim, so [`certify`] rejects it.
pub fn strip_weight(l: &Pencil) -> Result<Pencil> {
    let s = l.state_dim;
    let (rows, cols) = l.size();
    let mut m1 = l.m1.clone();
    for i in 0..rows {
        for j in 0..cols {
            if i < s && j < s {
                continue;
            }
            if m1[(i, j)] == l.m0[(i, j)] {
                m1[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Pencil::new(m1, l.m0.clone(), l.state_dim, l.io_rows, l.io_cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::{linearize_laurent, linearize_stable_split};
    use crate::numerics::{c64, CMatrix};
    use crate::rmatrix::{PoleTerm, StructureKind};

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_rows(vec![vec![c64(v, 0.0)]]).unwrap()
    }

    /// 1/z + 2 + z, para-Hermitian with poles at 0 and infinity.
    fn laurent() -> RationalMatrix {
        RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(2.0), scalar(1.0)],
            vec![PoleTerm::new(c64(0.0, 0.0), vec![scalar(1.0)])],
        )
        .unwrap()
    }

    #[test]
    fn worked_pencil_certifies() {
        let r = laurent();
        let l = linearize_laurent(&r, ParaKind::Hermitian).unwrap();
        let cert = certify(&l, &r, ParaKind::Hermitian, &VerifyOptions::default()).unwrap();
        assert!(cert.passes(), "failures: {:?}", cert.failures());
        assert_eq!(cert.structure.deviation, 0.0);
        assert!(cert.transfer.worst_residual <= 1e-10);
        assert_eq!(cert.transfer.points_tested, 20);
        assert!(cert.symmetry.unpaired.is_empty());
        let json = serde_json::to_string(&cert).unwrap();
        assert!(json.contains("\"minimality\""));
    }

    #[test]
    fn stripped_weight_is_rejected() {
        let r = laurent();
        let l = linearize_laurent(&r, ParaKind::Hermitian).unwrap();
        let bad = strip_weight(&l).unwrap();
        // Sanity: the stripped pencil's transfer really is R itself.
        let z = c64(0.7, 0.4);
        let dev = (&bad.transfer(z).unwrap() - &r.eval(z).unwrap()).max_norm();
        assert!(dev <= 1e-12, "stripped transfer deviates by {dev}");
        let cert = certify(&bad, &r, ParaKind::Hermitian, &VerifyOptions::default()).unwrap();
        assert!(!cert.passes());
        assert!(cert.failures().contains(&"transfer"));
        assert!(cert.failures().contains(&"structure"));
    }

    #[test]
    fn scaled_pencil_fails_transfer_only() {
        let r = laurent();
        let l = linearize_laurent(&r, ParaKind::Hermitian).unwrap();
        let doubled = Pencil::new(
            l.m1.scale(c64(2.0, 0.0)),
            l.m0.scale(c64(2.0, 0.0)),
            l.state_dim,
            l.io_rows,
            l.io_cols,
        )
        .unwrap();
        let cert = certify(&doubled, &r, ParaKind::Hermitian, &VerifyOptions::default()).unwrap();
        assert_eq!(cert.failures(), vec!["transfer"]);
    }

    #[test]
    fn decoupled_state_fails_minimality_only() {
        // Direct-sum an uncoupled state slot carrying -(z + 1): structure and
        // transfer are untouched, but the strip ranks collapse at z = -1.
        let r = laurent();
        let l = linearize_laurent(&r, ParaKind::Hermitian).unwrap();
        let s = l.state_dim;
        let (rows, cols) = l.size();
        let embed = |m: &CMatrix, extra: Complex64| {
            let mut out = CMatrix::zeros(rows + 1, cols + 1);
            for i in 0..rows {
                for j in 0..cols {
                    let (ii, jj) = (i + usize::from(i >= s), j + usize::from(j >= s));
                    out[(ii, jj)] = m[(i, j)];
                }
            }
            out[(s, s)] = extra;
            out
        };
        let padded = Pencil::new(
            embed(&l.m1, c64(-1.0, 0.0)),
            embed(&l.m0, c64(-1.0, 0.0)),
            s + 1,
            l.io_rows,
            l.io_cols,
        )
        .unwrap();
        assert_eq!(padded.structure_deviation(StructureKind::Palindromic), 0.0);
        let cert = certify(&padded, &r, ParaKind::Hermitian, &VerifyOptions::default()).unwrap();
        assert_eq!(cert.failures(), vec!["minimality"]);
        assert!(!cert.minimality.finite_ok);
    }

    #[test]
    fn two_pole_split_certifies() {
        // 1/(z - 1/4) + paraconjugate + 1: two off-circle poles.
        let r = RationalMatrix::from_parts(
            1,
            1,
            vec![scalar(-3.0)],
            vec![
                PoleTerm::new(c64(0.25, 0.0), vec![scalar(1.0)]),
                PoleTerm::new(c64(4.0, 0.0), vec![scalar(-16.0)]),
            ],
        )
        .unwrap();
        let l = linearize_stable_split(&r, ParaKind::Hermitian).unwrap();
        let cert = certify(&l, &r, ParaKind::Hermitian, &VerifyOptions::default()).unwrap();
        assert!(cert.passes(), "failures: {:?}", cert.failures());
        assert_eq!(cert.structure.deviation, 0.0);
    }

    #[test]
    fn shape_and_alpha_gates() {
        let r = laurent();
        let l = linearize_laurent(&r, ParaKind::Hermitian).unwrap();
        let wide = RationalMatrix::zero(1, 2);
        assert!(matches!(
            certify(&l, &wide, ParaKind::Hermitian, &VerifyOptions::default()),
            Err(Error::ShapeError(_))
        ));
        let opts = VerifyOptions {
            alpha: c64(0.0, 0.0),
            ..VerifyOptions::default()
        };
        assert!(matches!(
            certify(&l, &r, ParaKind::Hermitian, &opts),
            Err(Error::InvalidInput(_))
        ));
    }
}
