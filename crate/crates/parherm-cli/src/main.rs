//! Command line front end over the JSON interchange format.
//!
//! Exit codes: 0 on success, 1 on a mathematical failure (the module error is
//! serialized to stdout) or a failed verification, 2 on usage errors and
//! malformed input files. All floating-point output is printed with 17
//! significant digits so that emitted JSON re-parses bit-exactly.

use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use parherm::battery::{sweep, SweepConfig};
use parherm::decompose::{polar_sections, split_stability};
use parherm::genesis::random_para_structured;
use parherm::linearize::{
    linearize_laurent, linearize_pfd_with, linearize_stable_split_with, linearize_taylor_with,
    linearize_via_moebius,
};
use parherm::moebius::MoebiusMap;
use parherm::numerics::{pencil_eigenvalues, Eigenvalue};
use parherm::rmatrix::{ParaKind, Pencil, RationalMatrix, StructureKind};
use parherm::structural::{
    partial_multiplicities, recover_invariant_orders, OrderPoint, OrderTarget, StructuralIndices,
};
use parherm::verify::{certify, VerifyOptions};
use parherm::Error;

const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_BAND: f64 = 1e-8;
const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "parherm",
    version,
    about = "Palindromic pencil linearizations of para-Hermitian rational matrices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hermitian,
    Skew,
}

impl From<KindArg> for ParaKind {
    fn from(k: KindArg) -> ParaKind {
        match k {
            KindArg::Hermitian => ParaKind::Hermitian,
            KindArg::Skew => ParaKind::Skew,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum MethodArg {
    Split,
    Taylor,
    #[default]
    Pfd,
    Laurent,
    Moebius,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    /// Cayley map between the real axis and the unit circle.
    T,
    /// Bilinear map between the imaginary axis and the unit circle.
    B,
    /// The alpha-parametrized circle map; requires --alpha.
    BAlpha,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    /// Invariant orders of the weighted function linearized by the pencil.
    OfWeighted,
    /// Invariant orders of the underlying rational matrix R.
    OfR,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a random structured instance and its pencil linearization.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Weight parameter alpha as "re" or "re,im"; nonzero.
        #[arg(long, value_parser = parse_complex, default_value = "1", allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, value_enum, default_value = "hermitian")]
        kind: KindArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split a rational matrix by pole stability class, or into polar sections.
    Decompose {
        /// Rational matrix JSON file.
        input: PathBuf,
        /// Half-width of the unit-circle band.
        #[arg(long)]
        band: Option<f64>,
        /// Emit the Laurent polar sections instead of the stability split.
        #[arg(long)]
        polar: bool,
        /// Structure kind; detected from the input when omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Minimal state-space realization of a strictly proper rational matrix.
    Realize {
        input: PathBuf,
        /// Relative rank tolerance for the Hankel factorization.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Construct a structured pencil linearization of (1+z) R(z).
    Linearize {
        /// Rational matrix JSON file.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "pfd")]
        method: MethodArg,
        /// Structure kind; detected from the input when omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Half-width of the unit-circle pole band.
        #[arg(long)]
        band: Option<f64>,
        /// Structure-detection tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Hermitian or *-even pencil file for --method moebius.
        #[arg(long)]
        spencil: Option<PathBuf>,
        /// Moebius family for --method moebius.
        #[arg(long, value_enum)]
        map: Option<MapArg>,
        /// Map parameter for --map b-alpha.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Option<Complex64>,
    },
    /// Eigenvalues of a pencil: clustered representatives and raw values.
    Eigs {
        /// Pencil JSON file.
        input: PathBuf,
    },
    /// Partial multiplicities of a pencil at one point, with optional
    /// recovery of the invariant orders of the transfer function.
    Orders {
        /// Pencil JSON file.
        input: PathBuf,
        /// Point: "re", "re,im", or "inf".
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        tol: Option<f64>,
        /// Recover invariant orders at --at -1 or inf.
        #[arg(long, value_enum)]
        recover: Option<TargetArg>,
        /// Normal rank of the transfer function; measured when omitted.
        #[arg(long)]
        normal_rank: Option<usize>,
    },
    /// Run the certification battery on a pencil against its source matrix.
    Verify {
        /// Pencil JSON file.
        pencil: PathBuf,
        /// Rational matrix JSON file.
        r: PathBuf,
        /// Structure kind; detected from the rational matrix when omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Weight parameter: the claim is transfer = (alpha + conj(alpha) z) R.
        #[arg(long, value_parser = parse_complex, default_value = "1", allow_hyphen_values = true)]
        alpha: Complex64,
        /// Structure and transfer tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Rank tolerance for the minimality strips.
        #[arg(long)]
        rank_tol: Option<f64>,
        /// Number of transfer sample points.
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Generate and certify a batch of random instances.
    Sweep {
        #[arg(long, default_value_t = 32)]
        instances: usize,
        #[arg(long, default_value_t = 8)]
        max_state: usize,
        #[arg(long, default_value_t = 4)]
        max_io: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_complex, default_value = "1", allow_hyphen_values = true)]
        alpha: Complex64,
    },
}

enum Failure {
    /// Module error: serialized to stdout, exit 1.
    Math(Error),
    /// Checks ran and failed; the report is already printed, exit 1.
    Reject,
    /// Bad files or arguments: diagnostic to stderr, exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Math(e)
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad float {t:?}: {e}"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err("expected \"re\" or \"re,im\"".into()),
    }
}

/// Default tolerance, overridable through the PARHERM_TOL environment variable.
fn default_tol() -> f64 {
    std::env::var("PARHERM_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOL)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("malformed JSON in {}: {e}", path.display())))
}

// 17 significant digits: every finite double round-trips bit-exactly.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Failure::Usage(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    io::stdout()
        .write_all(&buf)
        .map_err(|e| Failure::Usage(format!("stdout write failed: {e}")))?;
    Ok(())
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    context: Option<&'a str>,
}

fn detect_kind(r: &RationalMatrix, tol: f64) -> Result<ParaKind, Error> {
    for kind in [ParaKind::Hermitian, ParaKind::Skew] {
        if let Ok(tag) = r.is_structured(kind.rational_kind(), tol) {
            if tag.passes() {
                return Ok(kind);
            }
        }
    }
    let dev = r
        .is_structured(StructureKind::ParaHermitian, tol)
        .map(|t| t.deviation)
        .unwrap_or(f64::INFINITY);
    Err(Error::StructureMismatch {
        identity: "para-Hermitian or para-skew-Hermitian input",
        deviation: dev,
        tol,
    })
}

fn resolve_kind(flag: Option<KindArg>, r: &RationalMatrix, tol: f64) -> Result<ParaKind, Error> {
    match flag {
        Some(k) => Ok(k.into()),
        None => detect_kind(r, tol),
    }
}

fn parse_point(s: &str) -> Result<Eigenvalue, Failure> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(Eigenvalue::Infinite);
    }
    parse_complex(s)
        .map(Eigenvalue::Finite)
        .map_err(Failure::Usage)
}

#[derive(Serialize)]
struct ClusterOut {
    /// None marks the eigenvalue at infinity.
    value: Option<[f64; 2]>,
    multiplicity: usize,
}

#[derive(Serialize)]
struct EigsOut {
    clusters: Vec<ClusterOut>,
    raw_finite: Vec<[f64; 2]>,
    infinite_count: usize,
}

#[derive(Serialize)]
struct OrdersOut {
    multiplicities: StructuralIndices,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_block_multiplicities: Option<StructuralIndices>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recovered: Option<StructuralIndices>,
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Generate {
            n,
            m,
            alpha,
            kind,
            seed,
        } => {
            let kind: ParaKind = kind.into();
            let (r, pencil) = random_para_structured(n, m, alpha, kind, seed)?;
            #[derive(Serialize)]
            struct GenerateOut {
                r: RationalMatrix,
                pencil: Pencil,
                kind: ParaKind,
                alpha: [f64; 2],
                seed: u64,
            }
            print_json(&GenerateOut {
                r,
                pencil,
                kind,
                alpha: [alpha.re, alpha.im],
                seed,
            })
        }
        Cmd::Decompose {
            input,
            band,
            polar,
            kind,
        } => {
            let r: RationalMatrix = read_json(&input)?;
            if polar {
                let kind = resolve_kind(kind, &r, default_tol())?;
                print_json(&polar_sections(&r, kind)?)
            } else {
                print_json(&split_stability(&r, band.unwrap_or(DEFAULT_BAND)))
            }
        }
        Cmd::Realize { input, tol } => {
            let r: RationalMatrix = read_json(&input)?;
            let (realization, pencil) =
                parherm::realize::minimal_realization(&r, tol.unwrap_or(1e-10))?;
            #[derive(Serialize)]
            struct RealizeOut {
                realization: parherm::rmatrix::Realization,
                pencil: Pencil,
            }
            print_json(&RealizeOut {
                realization,
                pencil,
            })
        }
        Cmd::Linearize {
            input,
            method,
            kind,
            band,
            tol,
            spencil,
            map,
            alpha,
        } => {
            let r: RationalMatrix = read_json(&input)?;
            let tol = tol.unwrap_or_else(default_tol);
            let band = band.unwrap_or(DEFAULT_BAND);
            let pencil = match method {
                MethodArg::Split => {
                    linearize_stable_split_with(&r, resolve_kind(kind, &r, tol)?, band)?
                }
                MethodArg::Taylor => linearize_taylor_with(&r, resolve_kind(kind, &r, tol)?, band)?,
                MethodArg::Pfd => linearize_pfd_with(&r, resolve_kind(kind, &r, tol)?, band)?,
                MethodArg::Laurent => linearize_laurent(&r, resolve_kind(kind, &r, tol)?)?,
                MethodArg::Moebius => {
                    let spath = spencil.ok_or_else(|| {
                        Failure::Usage("--method moebius requires --spencil".into())
                    })?;
                    let s: Pencil = read_json(&spath)?;
                    let map = match map {
                        Some(MapArg::T) => MoebiusMap::CayleyT,
                        Some(MapArg::B) => MoebiusMap::BilinearB,
                        Some(MapArg::BAlpha) => MoebiusMap::balpha(alpha.ok_or_else(|| {
                            Failure::Usage("--map b-alpha requires --alpha".into())
                        })?)?,
                        None => {
                            return Err(Failure::Usage("--method moebius requires --map".into()))
                        }
                    };
                    linearize_via_moebius(&r, &s, &map)?
                }
            };
            print_json(&pencil)
        }
        Cmd::Eigs { input } => {
            let p: Pencil = read_json(&input)?;
            let eigs = pencil_eigenvalues(&p.m1, &p.m0)?;
            let out = EigsOut {
                clusters: eigs
                    .clusters
                    .iter()
                    .map(|(ev, mult)| ClusterOut {
                        value: ev.finite().map(|z| [z.re, z.im]),
                        multiplicity: *mult,
                    })
                    .collect(),
                raw_finite: eigs.raw_finite.iter().map(|z| [z.re, z.im]).collect(),
                infinite_count: eigs.infinite_count,
            };
            print_json(&out)
        }
        Cmd::Orders {
            input,
            at,
            tol,
            recover,
            normal_rank,
        } => {
            let p: Pencil = read_json(&input)?;
            let tol = tol.unwrap_or_else(default_tol);
            let point = parse_point(&at)?;
            let mults = partial_multiplicities(&p.m1, &p.m0, point, tol)?;
            let mut out = OrdersOut {
                multiplicities: mults,
                a_block_multiplicities: None,
                recovered: None,
            };
            if let Some(target) = recover {
                let order_point = match point {
                    Eigenvalue::Infinite => OrderPoint::Infinity,
                    Eigenvalue::Finite(z) if (z - Complex64::new(-1.0, 0.0)).norm() == 0.0 => {
                        OrderPoint::MinusOne
                    }
                    _ => {
                        return Err(Failure::Usage(
                            "--recover applies only at the points -1 and inf".into(),
                        ))
                    }
                };
                let want = match target {
                    TargetArg::OfWeighted => OrderTarget::OfWeighted,
                    TargetArg::OfR => OrderTarget::OfR,
                };
                let (a1, a0) = p.a_blocks();
                let a_mults = if p.state_dim == 0 {
                    StructuralIndices {
                        point,
                        orders: vec![],
                    }
                } else {
                    partial_multiplicities(&a1, &a0, point, tol)?
                };
                let rank = match normal_rank {
                    Some(k) => k,
                    None => transfer_normal_rank(&p, tol)?,
                };
                let recovered = recover_invariant_orders(
                    &a_mults,
                    &out.multiplicities,
                    rank,
                    order_point,
                    want,
                )?;
                out.a_block_multiplicities = Some(a_mults);
                out.recovered = Some(recovered);
            }
            print_json(&out)
        }
        Cmd::Verify {
            pencil,
            r,
            kind,
            alpha,
            tol,
            rank_tol,
            points,
        } => {
            let p: Pencil = read_json(&pencil)?;
            let rm: RationalMatrix = read_json(&r)?;
            let tol = tol.unwrap_or_else(default_tol);
            let kind = resolve_kind(kind, &rm, tol.max(DEFAULT_TOL))?;
            let opts = VerifyOptions {
                structure_tol: tol,
                transfer_tol: tol,
                minimality_tol: rank_tol.unwrap_or(DEFAULT_RANK_TOL),
                transfer_points: points,
                alpha,
                ..VerifyOptions::default()
            };
            let cert = certify(&p, &rm, kind, &opts)?;
            print_json(&cert)?;
            if cert.passes() {
                Ok(())
            } else {
                Err(Failure::Reject)
            }
        }
        Cmd::Sweep {
            instances,
            max_state,
            max_io,
            seed,
            alpha,
        } => {
            let cfg = SweepConfig {
                instances,
                max_state,
                max_io,
                base_seed: seed,
                alpha,
                ..SweepConfig::default()
            };
            let summary = sweep(&cfg);
            print_json(&summary)?;
            if summary.all_passed() {
                Ok(())
            } else {
                Err(Failure::Reject)
            }
        }
    }
}

/// Normal rank of the pencil's transfer function, measured by sampling.
fn transfer_normal_rank(p: &Pencil, tol: f64) -> Result<usize, Error> {
    let mut best = 0;
    for z0 in parherm::rmatrix::sample_points(12) {
        let Ok(t) = p.transfer(z0) else { continue };
        if let Ok(decision) = parherm::numerics::svd_rank(&t, tol.max(1e-12)) {
            best = best.max(decision.rank);
        }
    }
    Ok(best)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(e)) => {
            let _ = print_json(&ErrorOut {
                kind: e.kind(),
                message: e.to_string(),
                context: None,
            });
            ExitCode::from(1)
        }
        Err(Failure::Reject) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
