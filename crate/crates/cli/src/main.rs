//! Command-line front end: every pipeline of the library behind one binary
//! with JSON output. Exit code 0 means all checks passed, 1 means a
//! mathematical check failed (a counterexample or invalid certificate),
//! 2 means a usage or I/O error.

use clap::{Parser, Subcommand, ValueEnum};
use framecert::certify::{self, detour_verify, noninjectivity_report, ChainTerm, SymbolChain};
use framecert::complexes::{self, build_complex, ComplexKind};
use framecert::geometry::{sweep_lemma, SweepLemma};
use framecert::homology::reduced_homology;
use framecert::lattice::Vector;
use framecert::quadring::{
    generated_by_units, make_ring, norm_euclidean_classification, RingDescriptor,
    DEFAULT_UNIT_SEARCH_BOUND,
};
use serde::Deserialize;
use serde_json::json;
use std::fmt::Display;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "framecert",
    version,
    about = "Frame complexes, homology, and certificates over quadratic integer rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ring descriptor and unit-group data
    Ring {
        #[command(subcommand)]
        sub: RingCmd,
    },
    /// Norm-Euclidean / unit-generation classification over a range of d
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, allow_negative_numbers = true)]
        to: i64,
    },
    /// Exhaustive lemma sweeps over rational grids
    Verify {
        #[arg(value_enum)]
        lemma: LemmaArg,
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        /// Grid denominator (for lem0: the norm bound)
        #[arg(long, default_value_t = 12)]
        grid: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Build and dump truncated frame complexes
    Complex {
        #[command(subcommand)]
        sub: ComplexCmd,
    },
    /// Reduced homology of a dumped complex
    Homology {
        #[arg(long = "in")]
        input: String,
    },
    /// Detour certificates
    Detour {
        #[command(subcommand)]
        sub: DetourCmd,
    },
    /// Bykovskii symbol chains
    Byk {
        #[command(subcommand)]
        sub: BykCmd,
    },
    /// End-to-end certificates
    Certify {
        #[command(subcommand)]
        sub: CertifyCmd,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    Info {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
    },
}

#[derive(Subcommand)]
enum ComplexCmd {
    Build {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
        #[arg(long)]
        bound: u64,
        #[arg(long = "unit-window", default_value_t = 3)]
        unit_window: u32,
        /// Output file; the full dump goes to stdout when absent
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum DetourCmd {
    /// The built-in imaginary detours (d = -2, -7, -11)
    Builtin {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
    },
    /// Construct a detour for a non-unit-generated norm-Euclidean ring
    Construct {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
    },
    /// Verify a user-supplied detour path from a JSON file
    Verify {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        path: String,
    },
}

#[derive(Subcommand)]
enum BykCmd {
    /// Normalize a symbol chain and compute its apartment image
    Check {
        #[arg(long = "in")]
        input: String,
    },
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// Non-injectivity bundle (or NoCertificate) for the rank-2 symbol map
    Noninj {
        #[arg(short, allow_negative_numbers = true)]
        d: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaArg {
    Lem0,
    Lem1,
    Lem2,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "BA", alias = "ba")]
    Ba,
}

#[derive(Deserialize)]
struct DetourInput {
    r1: framecert::quadring::RingElement,
    r2: framecert::quadring::RingElement,
    path: Vec<Vector>,
}

#[derive(Deserialize)]
struct ChainFile {
    ring: String,
    terms: Vec<ChainTerm>,
}

fn usage_err(msg: impl Display) -> String {
    msg.to_string()
}

fn ring_of(d: i64) -> Result<RingDescriptor, String> {
    make_ring(d).map_err(usage_err)
}

fn emit(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

/// Ok(true) = checks passed (exit 0), Ok(false) = a mathematical check
/// failed (exit 1), Err = usage/IO (exit 2).
fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Ring { sub: RingCmd::Info { d } } => {
            let ring = ring_of(d)?;
            let ug = ring.unit_group(DEFAULT_UNIT_SEARCH_BOUND).map_err(usage_err)?;
            emit(&json!({
                "ring": ring.spec_string(),
                "d": ring.d,
                "mode": format!("{:?}", ring.mode),
                "delta_sq": [ring.delta_sq.0, ring.delta_sq.1],
                "norm_form": [ring.norm_form.0, ring.norm_form.1, ring.norm_form.2],
                "norm_euclidean": ring.norm_euclidean,
                "units_finite": ring.units_finite,
                "torsion_units": ug.torsion,
                "fundamental_unit": ug.fundamental,
                "span_modulus": ug.span_modulus.to_string(),
                "generated_by_units": generated_by_units(ring.d),
            }));
            Ok(true)
        }
        Command::Classify { from, to } => {
            if from > to {
                return Err("--from must not exceed --to".into());
            }
            let rows: Vec<serde_json::Value> = norm_euclidean_classification(from, to)
                .into_iter()
                .map(|(d, ne, gu)| json!({"d": d, "norm_euclidean": ne, "generated_by_units": gu}))
                .collect();
            emit(&json!({"from": from, "to": to, "rows": rows}));
            Ok(true)
        }
        Command::Verify { lemma, d, grid, jobs } => {
            let ring = ring_of(d)?;
            let lemma = match lemma {
                LemmaArg::Lem0 => SweepLemma::Lem0,
                LemmaArg::Lem1 => SweepLemma::Lem1,
                LemmaArg::Lem2 => SweepLemma::Lem2,
            };
            let report = sweep_lemma(&ring, lemma, grid, jobs).map_err(usage_err)?;
            emit(&serde_json::to_value(&report).map_err(usage_err)?);
            Ok(report.passed())
        }
        Command::Complex { sub: ComplexCmd::Build { kind, d, n, m, bound, unit_window, out } } => {
            let ring = ring_of(d)?;
            let kind = match kind {
                KindArg::B => ComplexKind::B,
                KindArg::Ba => ComplexKind::BA,
            };
            let cx = build_complex(&ring, n, m, bound, kind, unit_window).map_err(usage_err)?;
            let dump = complexes::dump_json(&cx);
            match out {
                Some(path) => {
                    std::fs::write(&path, &dump).map_err(usage_err)?;
                    emit(&json!({
                        "ring": cx.ring.spec_string(),
                        "kind": cx.kind.wire_name(),
                        "n": cx.n,
                        "m": cx.m,
                        "bound": cx.bound,
                        "vertices": cx.vertices.len(),
                        "edges": cx.edge_list().len(),
                        "out": path,
                    }));
                }
                None => println!("{dump}"),
            }
            Ok(true)
        }
        Command::Homology { input } => {
            let text = std::fs::read_to_string(&input).map_err(usage_err)?;
            let cx = complexes::load_json(&text).map_err(usage_err)?;
            let profile = reduced_homology(&cx.chain_data()).map_err(usage_err)?;
            let degrees: serde_json::Map<String, serde_json::Value> = profile
                .degrees
                .iter()
                .enumerate()
                .map(|(k, dh)| {
                    (
                        k.to_string(),
                        json!({
                            "betti": dh.betti,
                            "torsion":
                                dh.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                        }),
                    )
                })
                .collect();
            emit(&json!({"ring": cx.ring.spec_string(), "reduced": true, "degrees": degrees}));
            Ok(true)
        }
        Command::Detour { sub } => {
            let (ring, dp) = match sub {
                DetourCmd::Builtin { d } => {
                    let ring = ring_of(d)?;
                    let dp = certify::builtin_detour(d)
                        .ok_or_else(|| format!("no built-in detour for d = {d}"))?;
                    (ring, dp)
                }
                DetourCmd::Construct { d } => {
                    let ring = ring_of(d)?;
                    let dp = certify::detour_construct(&ring).map_err(usage_err)?;
                    (ring, dp)
                }
                DetourCmd::Verify { d, path } => {
                    let ring = ring_of(d)?;
                    let text = std::fs::read_to_string(&path).map_err(usage_err)?;
                    let input: DetourInput = serde_json::from_str(&text).map_err(usage_err)?;
                    (ring, certify::DetourPath { path: input.path, r1: input.r1, r2: input.r2 })
                }
            };
            let cert = detour_verify(&ring, &dp.path, &dp.r1, &dp.r2).map_err(usage_err)?;
            emit(&serde_json::to_value(&cert).map_err(usage_err)?);
            Ok(cert.valid)
        }
        Command::Byk { sub: BykCmd::Check { input } } => {
            let text = std::fs::read_to_string(&input).map_err(usage_err)?;
            let file: ChainFile = serde_json::from_str(&text).map_err(usage_err)?;
            let ring = complexes::parse_ring_spec(&file.ring)
                .ok_or_else(|| format!("bad ring spec {:?}", file.ring))?;
            let chain = SymbolChain { terms: file.terms };
            let normalized = match chain.normalize(&ring) {
                Ok(c) => c,
                Err(e) => {
                    emit(&json!({"ring": file.ring, "error": e.to_string()}));
                    return Ok(false);
                }
            };
            let image = certify::apartment_image_2(&ring, &normalized).map_err(usage_err)?;
            emit(&json!({
                "ring": file.ring,
                "normalized": serde_json::to_value(&normalized).map_err(usage_err)?,
                "apartment_image": serde_json::to_value(image.to_terms()).map_err(usage_err)?,
                "image_is_zero": image.is_zero(),
            }));
            Ok(true)
        }
        Command::Certify { sub: CertifyCmd::Noninj { d } } => {
            let ring = ring_of(d)?;
            let report = noninjectivity_report(&ring).map_err(usage_err)?;
            emit(&serde_json::to_value(&report).map_err(usage_err)?);
            Ok(report.valid)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
