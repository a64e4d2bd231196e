//! Command-line front end.
//!
//! Exit codes: 0 definitive answer (including NotRealizable), 3 Unknown,
//! 1 verification mismatch, 2 resource or parse error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use unitgroup::classify::{classify, classify_cyclic, ditor_cardinality};
use unitgroup::config::parse_count;
use unitgroup::density::{density_scan, to_csv, DensitySet};
use unitgroup::poly::{finite_field, zmod};
use unitgroup::{
    evaluate, verify_certificate, AbelianGroup, Config, Error, RingClass, RingPresentation, RuleSet, Status,
    Verdict, WitnessCertificate,
};

const EXIT_OK: u8 = 0;
const EXIT_MISMATCH: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(name = "unitgroup", version, about = "Realizability of finite abelian groups as unit groups of commutative rings")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Config file of `key = value` lines (oracle_bound, an_bound, density_limit, search_bound).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest ring or unit set the brute-force oracle enumerates [default: 2^20].
    #[arg(long, global = true, value_parser = count)]
    oracle_bound: Option<u64>,
    /// Largest A_n index the linear-algebra verifier accepts [default: 6].
    #[arg(long, global = true, value_parser = count)]
    an_bound: Option<u64>,
    /// Largest N for the density scan [default: 1e8].
    #[arg(long, global = true, value_parser = count)]
    density_limit: Option<u64>,
    /// Largest group order searched exhaustively by the classifier [default: 2^16].
    #[arg(long, global = true, value_parser = count)]
    search_bound: Option<u64>,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a group such as "C4 x C11^2".
    ClassifyGroup {
        group: String,
        /// domain, torsion-free, reduced, char0 or any.
        #[arg(long, default_value = "char0")]
        ring_class: String,
        /// Enable an extra necessary rule (F2).
        #[arg(long)]
        enable_rule: Vec<String>,
    },
    /// Is Z/n the unit group of a commutative ring?
    ClassifyCyclic {
        #[arg(value_parser = count)]
        n: u64,
    },
    /// Is n the order of the unit group of a commutative ring?
    Ditor {
        #[arg(value_parser = count)]
        n: u64,
    },
    /// Emit a witness certificate for a realizable group.
    Witness {
        group: String,
        #[arg(long, default_value = "any")]
        ring_class: String,
        #[arg(long)]
        enable_rule: Vec<String>,
    },
    /// Replay a certificate through the oracle.
    Verify {
        /// Certificate file, or `-` for stdin.
        #[arg(long)]
        cert: String,
    },
    /// Unit group of a presented ring.
    Units {
        /// Presentation JSON: a file, `-` for stdin, or inline JSON.
        ring: Option<String>,
        /// Shortcut for Z/nZ.
        #[arg(long, conflicts_with_all = ["ring", "field"])]
        zmod: Option<u64>,
        /// Shortcut for the field with q elements.
        #[arg(long, conflicts_with = "ring")]
        field: Option<u64>,
    },
    /// Densities of realizable cardinalities up to N.
    Density {
        #[arg(long, value_parser = count)]
        max: u64,
        /// Comma-separated checkpoints, e.g. 1e3,1e4,1e5,1e6 [default: N].
        #[arg(long, value_delimiter = ',', value_parser = count)]
        checkpoints: Vec<u64>,
        /// Restrict the CSV to one set: all, odd or reduced.
        #[arg(long)]
        set: Option<String>,
        /// Write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn count(s: &str) -> Result<u64, String> {
    parse_count(s).ok_or_else(|| format!("`{s}` is not a count (examples: 1000, 1e6, 2^20)"))
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::Verification(_)) => EXIT_MISMATCH,
            _ => EXIT_ERROR,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn load_config(g: &Global) -> anyhow::Result<Config> {
    let mut config = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            text.parse::<Config>()?
        }
        None => Config::default(),
    };
    if let Some(v) = g.oracle_bound {
        config.oracle_bound = v;
    }
    if let Some(v) = g.an_bound {
        config.an_bound = u32::try_from(v).map_err(|_| anyhow!("--an-bound too large"))?;
    }
    if let Some(v) = g.density_limit {
        config.density_limit = v;
    }
    if let Some(v) = g.search_bound {
        config.search_bound = v;
    }
    Ok(config)
}

fn read_input(source: &str) -> anyhow::Result<String> {
    if source == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else if source.trim_start().starts_with('{') {
        Ok(source.to_string())
    } else {
        fs::read_to_string(source).with_context(|| format!("reading {source}"))
    }
}

fn rules_from(names: &[String]) -> anyhow::Result<RuleSet> {
    let mut rules = RuleSet::default();
    for n in names {
        rules.enable(n)?;
    }
    Ok(rules)
}

fn emit<T: Serialize>(value: &T, pretty: bool, human: impl FnOnce() -> String) -> anyhow::Result<()> {
    let text = if pretty { human() } else { serde_json::to_string_pretty(value)? };
    match writeln!(io::stdout().lock(), "{text}") {
        // a closed reader (e.g. `| head`) is not an error
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn verdict_text(subject: &str, v: &Verdict) -> String {
    let mut lines = vec![format!("{subject}: {:?}", v.status)];
    if let Some(c) = &v.witness_class {
        lines.push(format!("  witness ring: {c}"));
    }
    if let Some(w) = &v.witness {
        lines.push(format!("  witness family: {} over {} ({})", w.presentation.family_name(), w.presentation.base, w.citation));
    }
    for o in &v.obstructions {
        lines.push(format!("  [{}] {}", o.rule, o.detail));
    }
    if !v.notes.is_empty() {
        lines.push(format!("  note: {}", v.notes));
    }
    lines.join("\n")
}

fn verdict_code(v: &Verdict) -> u8 {
    match v.status {
        Status::Unknown => EXIT_UNKNOWN,
        _ => EXIT_OK,
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let config = load_config(&cli.global)?;
    let pretty = cli.global.pretty;
    match cli.command {
        Command::ClassifyGroup { group, ring_class, enable_rule } => {
            let g: AbelianGroup = group.parse()?;
            let class: RingClass = ring_class.parse()?;
            let rules = rules_from(&enable_rule)?;
            let v = classify(&g, class, &rules, &config);
            emit(&v, pretty, || verdict_text(&format!("{g} ({class})"), &v))?;
            Ok(verdict_code(&v))
        }
        Command::ClassifyCyclic { n } => {
            let v = classify_cyclic(n as u128)?;
            emit(&v, pretty, || verdict_text(&format!("C{n}"), &v))?;
            Ok(verdict_code(&v))
        }
        Command::Ditor { n } => {
            let v = ditor_cardinality(n as u128)?;
            emit(&v, pretty, || verdict_text(&format!("order {n}"), &v))?;
            Ok(verdict_code(&v))
        }
        Command::Witness { group, ring_class, enable_rule } => {
            let g: AbelianGroup = group.parse()?;
            let class: RingClass = ring_class.parse()?;
            let v = classify(&g, class, &rules_from(&enable_rule)?, &config);
            match &v.witness {
                Some(cert) => {
                    emit(cert, pretty, || {
                        format!(
                            "{} via {:?} ({})\n{}",
                            cert.claimed_group,
                            cert.verification,
                            cert.citation,
                            serde_json::to_string_pretty(&cert.presentation).unwrap_or_default()
                        )
                    })?;
                    Ok(EXIT_OK)
                }
                None => {
                    emit(&v, pretty, || verdict_text(&g.to_string(), &v))?;
                    Ok(match v.status {
                        Status::Realizable => EXIT_ERROR,
                        _ => verdict_code(&v),
                    })
                }
            }
        }
        Command::Verify { cert } => {
            let text = read_input(&cert)?;
            let cert: WitnessCertificate = serde_json::from_str(&text).context("parsing certificate")?;
            let out = verify_certificate(&cert, &config)?;
            emit(&out, pretty, || {
                format!(
                    "claimed {}, oracle {} ({} units): {}",
                    cert.claimed_group,
                    out.report.structure,
                    out.report.unit_count,
                    if out.matches { "match" } else { "MISMATCH" }
                )
            })?;
            Ok(if out.matches { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Units { ring, zmod: n, field } => {
            let p: RingPresentation = match (ring, n, field) {
                (_, Some(n), _) => zmod(n)?,
                (_, _, Some(q)) => finite_field(q)?,
                (Some(src), _, _) => serde_json::from_str(&read_input(&src)?).context("parsing presentation")?,
                _ => return Err(anyhow!("give a presentation, --zmod or --field").into()),
            };
            let report = evaluate(&p, &config)?;
            emit(&report, pretty, || {
                format!(
                    "units: {} ({} elements); nilradical {}; units mod nilradical {}; exact sequence {}",
                    report.structure,
                    report.unit_count,
                    report.nilradical_size,
                    report.quotient_unit_count,
                    if report.exact_sequence_ok { "ok" } else { "FAILS" }
                )
            })?;
            Ok(EXIT_OK)
        }
        Command::Density { max, checkpoints, set, out } => {
            let set: Option<DensitySet> = set.map(|s| s.parse()).transpose()?;
            let report = density_scan(max, &checkpoints, &config)?;
            let csv = to_csv(&report, set);
            if let Some(path) = out {
                fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&report, pretty, || csv.trim_end().to_string())?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
