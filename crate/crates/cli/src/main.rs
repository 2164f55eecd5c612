mod input;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Args, Parser, Subcommand};
use torus_orbits::biquotient::{
    circle_bundle_total_space, default_extension_bound, extend_circle_to_t2, is_free_circle,
    realize_dim4, realize_dim5, BiquotientError, Extension, NoExtensionReason,
};
use torus_orbits::census::census;
use torus_orbits::classify::{classify_dim4, classify_dim5, pi1_dim5_exact, ClassifyError};
use torus_orbits::lattice::format_vector;
use torus_orbits::orbit_space::{
    are_equivalent_with, canonicalize_with, is_legal, pi1_bound, OrbitSpaceError, Orientation,
    WeightedOrbitSpace,
};

use input::ParseError;
use output::{emit, emit_census, Format, Record};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_ILLEGAL: u8 = 3;
const EXIT_PROVED_NEGATIVE: u8 = 4;
const EXIT_SEARCH_EXHAUSTED: u8 = 5;

/// Weighted orbit spaces of torus actions on 4- and 5-manifolds and their
/// realization on biquotients of S3xS3.
#[derive(Parser)]
#[command(name = "torus-orbits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpaceArgs {
    /// Orbit space as a JSON file or inline JSON; alternative to --weights.
    input: Option<String>,
    /// Weights as a tuple list, e.g. "(1,0),(0,1),(1,0),(2,1)".
    #[arg(long)]
    weights: Option<String>,
    /// Torus rank; inferred from the weights when omitted.
    #[arg(long)]
    rank: Option<usize>,
}

impl SpaceArgs {
    fn load(&self) -> anyhow::Result<WeightedOrbitSpace> {
        match (&self.input, &self.weights) {
            (Some(text), None) | (None, Some(text)) => input::orbit_space(text, self.rank),
            (Some(_), Some(_)) => Err(anyhow!(ParseError(
                "give either an input file or --weights, not both".into()
            ))),
            (None, None) => Err(anyhow!(ParseError(
                "no orbit space given (use --weights or an input file)".into()
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that adjacent weights are legal and report simple connectivity.
    Legal(SpaceArgs),
    /// Canonical representative of the equivalence class.
    Canon {
        #[command(flatten)]
        space: SpaceArgs,
        /// Do not identify an orbit space with its reversal.
        #[arg(long)]
        oriented: bool,
    },
    /// Decide whether two orbit spaces are equivalent.
    Equiv {
        /// First orbit space (file, inline JSON or tuple list).
        a: String,
        /// Second orbit space.
        b: String,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        oriented: bool,
    },
    /// Fundamental group of the encoded manifold.
    Pi1(SpaceArgs),
    /// Manifold type of the encoded 4- or 5-manifold.
    Classify(SpaceArgs),
    /// Free action on S3xS3 whose quotient carries the given torus action.
    Realize(SpaceArgs),
    /// Try to extend a free circle action to a free T2 action.
    Extend {
        /// Circle exponents "(a,b,c,d)", JSON, or a JSON file.
        #[arg(long)]
        circle: String,
        /// Search radius; defaults to 4(|a|+|b|+|c|+|d|)+4.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Total space of the circle bundle S3xS3 // S1_{p,q} over S3xS3 // T2.
    Bundle {
        /// T2 parameters "(a,b,c,d,n,k,m,l)", JSON, or a JSON file.
        #[arg(long)]
        t2: String,
        /// Circle subgroup "(p,q)" of the T2.
        #[arg(long)]
        slope: String,
    },
    /// Table of all legal, simply connected four-weight orbit spaces.
    Census {
        #[arg(long)]
        rank: usize,
        /// Largest absolute value of a weight entry.
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
}

fn orientation(oriented: bool) -> Orientation {
    if oriented {
        Orientation::Oriented
    } else {
        Orientation::Unoriented
    }
}

fn write_record(cli: &Cli, out: &mut dyn Write, record: Record) -> anyhow::Result<()> {
    emit(out, cli.format, &record)
}

fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Legal(args) => {
            let s = args.load()?;
            let report = is_legal(&s)?;
            let pairs: Vec<String> = report
                .failing_pairs
                .iter()
                .map(|(i, j)| format!("({i},{j})"))
                .collect();
            let record = Record::new()
                .field("weights", s.to_string())
                .field("legal", report.legal)
                .field("failing_pairs", pairs.join(" "))
                .field("spans", report.spans)
                .field(
                    "certificate",
                    report
                        .simply_connected_certificate
                        .map(|c| format_vector(&c.iter().map(|&i| i as i64).collect::<Vec<_>>())),
                );
            write_record(cli, out, record)?;
            Ok(if report.legal { 0 } else { EXIT_ILLEGAL })
        }
        Command::Canon { space, oriented } => {
            let s = space.load()?;
            let c = canonicalize_with(&s, orientation(*oriented))?;
            let transform: Vec<String> = c
                .transform
                .to_rows()
                .iter()
                .map(|r| format_vector(r))
                .collect();
            let record = Record::new()
                .field("canonical", c.space.to_string())
                .field("transform", transform.join(""))
                .field("reversed", c.reversed)
                .field("rotation", c.rotation);
            write_record(cli, out, record)?;
            Ok(0)
        }
        Command::Equiv {
            a,
            b,
            rank,
            oriented,
        } => {
            let sa = input::orbit_space(a, *rank)?;
            let sb = input::orbit_space(b, *rank)?;
            let eq = are_equivalent_with(&sa, &sb, orientation(*oriented))?;
            write_record(cli, out, Record::new().field("equivalent", eq))?;
            Ok(0)
        }
        Command::Pi1(args) => {
            let s = args.load()?;
            let bound = pi1_bound(&s)?;
            let mut record = Record::new()
                .field("weights", s.to_string())
                .field("pi1_bound", bound.to_string());
            if s.rank() == 3 && s.len() == 4 {
                torus_orbits::orbit_space::ensure_legal(&s)?;
                let exact = pi1_dim5_exact(&canonicalize_with(&s, Orientation::Unoriented)?.space)?;
                record = record.field("pi1", exact.to_string());
            }
            write_record(cli, out, record)?;
            Ok(0)
        }
        Command::Classify(args) => {
            let s = args.load()?;
            let kind = match s.rank() {
                2 => classify_dim4(&s)?,
                3 => classify_dim5(&s)?,
                r => return Err(OrbitSpaceError::UnsupportedRank(r).into()),
            };
            write_record(
                cli,
                out,
                Record::new()
                    .field("weights", s.to_string())
                    .field("type", kind.to_string()),
            )?;
            Ok(0)
        }
        Command::Realize(args) => {
            let s = args.load()?;
            let record = match s.rank() {
                2 => {
                    let p = realize_dim4(&s)?;
                    Record::new()
                        .field("type", classify_dim4(&s)?.to_string())
                        .field("action", torus_orbits::biquotient::ActionParams::T2(p))
                }
                3 => {
                    let p = realize_dim5(&s)?;
                    Record::new()
                        .field("type", classify_dim5(&s)?.to_string())
                        .field("action", p)
                }
                r => return Err(OrbitSpaceError::UnsupportedRank(r).into()),
            };
            write_record(cli, out, record)?;
            Ok(0)
        }
        Command::Extend { circle, bound } => {
            let p = input::circle(circle)?;
            if !is_free_circle(&p)? {
                bail!(BiquotientError::NotFree);
            }
            let bound = bound.unwrap_or_else(|| default_extension_bound(&p));
            let record = Record::new().field("circle", p.to_string());
            match extend_circle_to_t2(&p, bound)? {
                Extension::Witness(w) => {
                    let record = record
                        .field("result", "Extends")
                        .field("slope", format_vector(&[w.p, w.q, 1]))
                        .field(
                            "shears",
                            format!("(k,l,m,n)=({},{},{},{})", w.k, w.l, w.m, w.n),
                        )
                        .field("t2", torus_orbits::biquotient::ActionParams::T2(w.t2));
                    write_record(cli, out, record)?;
                    Ok(0)
                }
                Extension::NoExtension(NoExtensionReason::NecessaryConditionFails) => {
                    write_record(
                        cli,
                        out,
                        record.field("result", "NoExtension(NecessaryConditionFails)"),
                    )?;
                    Ok(EXIT_PROVED_NEGATIVE)
                }
                Extension::NoExtension(NoExtensionReason::SearchExhausted { bound }) => {
                    write_record(
                        cli,
                        out,
                        record.field(
                            "result",
                            format!("NoExtension(SearchExhausted, bound={bound})"),
                        ),
                    )?;
                    Ok(EXIT_SEARCH_EXHAUSTED)
                }
            }
        }
        Command::Bundle { t2, slope } => {
            let base = input::t2(t2)?;
            let pq = input::tuple(slope, 2)?;
            let kind = circle_bundle_total_space(&base, pq[0], pq[1])?;
            let record = Record::new()
                .field("circle", base.sub_circle(pq[0], pq[1]).to_string())
                .field("type", kind.to_string());
            write_record(cli, out, record)?;
            Ok(0)
        }
        Command::Census { rank, bound } => {
            let rows = census(*rank, *bound)?;
            emit_census(out, cli.format, *rank, *bound, &rows)?;
            if cli.out.is_some() {
                eprintln!("{} rows written", rows.len());
            }
            Ok(if rows.iter().all(|r| r.verified) {
                0
            } else {
                EXIT_OTHER
            })
        }
    }
}

fn is_illegal(e: &anyhow::Error) -> bool {
    let orbit = |o: &OrbitSpaceError| matches!(o, OrbitSpaceError::IllegalOrbitSpace(_));
    let classify = |c: &ClassifyError| matches!(c, ClassifyError::OrbitSpace(o) if orbit(o));
    if let Some(o) = e.downcast_ref::<OrbitSpaceError>() {
        return orbit(o);
    }
    if let Some(c) = e.downcast_ref::<ClassifyError>() {
        return classify(c);
    }
    if let Some(BiquotientError::Classify(c)) = e.downcast_ref::<BiquotientError>() {
        return classify(c);
    }
    if let Some(torus_orbits::census::CensusError::OrbitSpace(o)) = e.downcast_ref() {
        return orbit(o);
    }
    false
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ParseError>().is_some() {
        EXIT_PARSE
    } else if is_illegal(e) {
        EXIT_ILLEGAL
    } else {
        EXIT_OTHER
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.out {
        Some(path) => File::create(path)
            .map_err(anyhow::Error::from)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                let code = run(&cli, &mut w)?;
                w.flush()?;
                Ok(code)
            }),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            run(&cli, &mut w).and_then(|code| {
                w.flush()?;
                Ok(code)
            })
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
