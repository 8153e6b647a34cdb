//! Crate-wide error type. Variants are named after the contract they break,
//! not after the call site; several carry the measurement that tripped them.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Non-finite entries, empty dimensions where forbidden, or malformed input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Coefficient matrix singular to working tolerance; carries sigma_min.
    #[error("linear solve on a singular matrix (sigma_min = {sigma_min:.3e})")]
    SingularSolve { sigma_min: f64 },

    /// The pencil z*M1 + M0 (or an A-block) has identically singular determinant.
    #[error("singular pencil: determinant vanishes at every sample point")]
    SingularPencil,

    /// Operation requires a square matrix.
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    /// Evaluation point within pole-merge distance of a pole.
    #[error("evaluation point within {dist:.3e} of pole {pole:?}")]
    EvalAtPole { pole: (f64, f64), dist: f64 },

    /// Transfer evaluation at a point where the A-block is singular.
    #[error("transfer evaluation at a system pole (sigma_min = {sigma_min:.3e})")]
    EvalAtSystemPole { sigma_min: f64 },

    /// alpha = 0 or otherwise unusable for the linear weight alpha + conj(alpha) z.
    #[error("invalid alpha for linear weight")]
    InvalidAlpha,

    /// Pole order or polynomial degree beyond the representation cap.
    #[error("degree {got} exceeds cap {cap}")]
    DegreeCap { got: usize, cap: usize },

    /// Input fails the structural identity required by the construction.
    #[error("structure mismatch: {identity} deviates by {deviation:.3e} (tol {tol:.3e})")]
    StructureMismatch {
        identity: &'static str,
        deviation: f64,
        tol: f64,
    },

    /// No admissible alpha found within the trial budget.
    #[error("no alpha found in {trials} trials clearing poles/zeros at the stated margins")]
    NoAlphaFound { trials: usize },

    /// Matrix is not a Laurent form in z (poles other than 0 present).
    #[error("not a Laurent form: pole at ({0}, {1}) other than the origin", .pole.0, .pole.1)]
    NotLaurentForm { pole: (f64, f64) },

    /// Coefficient symmetry required by the structure is violated.
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    /// Taylor expansion at infinity requires a strictly proper input.
    #[error("input is not strictly proper (nonzero polynomial part)")]
    NotStrictlyProper,

    /// Hankel construction needs more Taylor coefficients than supplied.
    #[error("need at least {need} Taylor coefficients, got {got}")]
    NeedMoreCoeffs { need: usize, got: usize },

    /// Hankel rank failed to stagnate within the block-size cap.
    #[error("Hankel rank did not stagnate by block size {cap}")]
    NoConvergence { cap: usize },

    /// Poles on the unit circle: the split route does not apply.
    #[error("unit-circle poles present; use the Moebius route")]
    NeedsMoebiusRoute,

    /// Leading-coefficient block ranks fail at infinity.
    #[error("pencil not minimal at infinity (row rank {row_rank}, col rank {col_rank}, state {state})")]
    NotMinimalAtInfinity {
        row_rank: usize,
        col_rank: usize,
        state: usize,
    },

    /// Incompatible dimensions between combined blocks.
    #[error("shape mismatch: {0}")]
    ShapeError(String),

    /// Two per-pole blocks share a pole location.
    #[error("duplicate pole at ({0}, {1}) across combined blocks", .pole.0, .pole.1)]
    DuplicatePole { pole: (f64, f64) },

    /// Leading coefficient singular: the invertible-R_d constructor does not apply.
    #[error("leading coefficient singular to tolerance (sigma_min = {sigma_min:.3e}); use the compressed route")]
    UseCompressedRoute { sigma_min: f64 },

    /// Pole term with zero leading coefficient or otherwise malformed.
    #[error("invalid pole term: {0}")]
    InvalidTerm(String),

    /// Compressed-route certification failed; carries the residual that failed.
    #[error("compression certification failed: {check} residual {residual:.3e}")]
    CompressionFailed { check: &'static str, residual: f64 },

    /// Caller-supplied pencil fails its claimed contract.
    #[error("supplied linearization fails certification: {0}")]
    BadInputLinearization(String),

    /// A rank decision fell inside the ambiguity band around the threshold.
    #[error("rank ambiguous: sigma = {sigma:.3e} within factor 10 of threshold {threshold:.3e}")]
    RankAmbiguous { sigma: f64, threshold: f64 },

    /// Multiplicity lists inconsistent with the stated normal rank.
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    /// Exact-arithmetic oracle size cap exceeded.
    #[error("exact oracle limited to sizes <= {cap}, got {got}")]
    TooLarge { cap: usize, got: usize },

    /// Random draw degenerate beyond the resample budget.
    #[error("degenerate draw persisted for {attempts} attempts")]
    DegenerateDraw { attempts: usize },

    /// Iterative kernel exceeded its budget or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Stable variant name for machine-readable reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::SingularSolve { .. } => "SingularSolve",
            Error::SingularPencil => "SingularPencil",
            Error::NotSquare { .. } => "NotSquare",
            Error::EvalAtPole { .. } => "EvalAtPole",
            Error::EvalAtSystemPole { .. } => "EvalAtSystemPole",
            Error::InvalidAlpha => "InvalidAlpha",
            Error::DegreeCap { .. } => "DegreeCap",
            Error::StructureMismatch { .. } => "StructureMismatch",
            Error::NoAlphaFound { .. } => "NoAlphaFound",
            Error::NotLaurentForm { .. } => "NotLaurentForm",
            Error::SymmetryViolation(_) => "SymmetryViolation",
            Error::NotStrictlyProper => "NotStrictlyProper",
            Error::NeedMoreCoeffs { .. } => "NeedMoreCoeffs",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NeedsMoebiusRoute => "NeedsMoebiusRoute",
            Error::NotMinimalAtInfinity { .. } => "NotMinimalAtInfinity",
            Error::ShapeError(_) => "ShapeError",
            Error::DuplicatePole { .. } => "DuplicatePole",
            Error::UseCompressedRoute { .. } => "UseCompressedRoute",
            Error::InvalidTerm(_) => "InvalidTerm",
            Error::CompressionFailed { .. } => "CompressionFailed",
            Error::BadInputLinearization(_) => "BadInputLinearization",
            Error::RankAmbiguous { .. } => "RankAmbiguous",
            Error::InconsistentInput(_) => "InconsistentInput",
            Error::TooLarge { .. } => "TooLarge",
            Error::DegenerateDraw { .. } => "DegenerateDraw",
            Error::Numerical(_) => "Numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
