//! `matchkit` — generate, solve, verify, and benchmark stable-matching
//! instances over succinct preference models.
//!
//! Exit codes follow the same three-way convention throughout:
//! 0 for "yes/stable/success", 1 for a clean negative answer
//! ("unstable"/"no"), and 2 for any usage, parse, or runtime error.

mod bench;
mod gen;
mod sampling;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use matchkit::{
    find_one_sided, find_small_universe, fixture, fixture_names, gale_shapley, in_all_stable,
    in_some_stable, verify_attribute, verify_boolean_bitset, verify_brute, verify_geometric,
    verify_list, verify_single_peaked, Market, Matching, Side, SolveReport, VerifyReport,
};

use crate::gen::infer_universe;
use crate::sampling::rng;

#[derive(Parser)]
#[command(name = "matchkit", version, about = "Stable matchings under succinct preferences")]
struct Cli {
    /// Seed for every randomized draw (a ChaCha8 stream per invocation).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the primary artifact to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress informational report lines on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file: a random market, a certified reduction
    /// instance, or a named fixture.
    Gen {
        /// Random market model (attribute, boolean_attribute, one_sided,
        /// list, single_peaked, geometric, explicit).
        #[arg(long, conflicts_with_all = ["reduction", "fixture"])]
        model: Option<String>,
        /// Reduction family (finding, verify-hardness, stable-pair,
        /// stable-pair-co, geo-finding, geo-verify, geo-stable-pair,
        /// geo-stable-pair-co).
        #[arg(long, conflicts_with = "fixture")]
        reduction: Option<String>,
        /// Named fixture (see `matchkit fixture --list`).
        #[arg(long)]
        fixture: Option<String>,
        /// Market size (or vector-set size for reductions).
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Dimension / list count (ignored by dimensionless models).
        #[arg(long)]
        d: Option<usize>,
        /// Threshold for the reduction families that take one.
        #[arg(long)]
        l: Option<usize>,
        /// Single-peaked flavour: distance or custom.
        #[arg(long, default_value = "distance")]
        relation: String,
    },
    /// Compute a stable matching for an instance file.
    Solve {
        instance: PathBuf,
        /// gs-men, gs-women, small-universe, or one-sided.
        #[arg(long, default_value = "gs-men")]
        algo: String,
    },
    /// Check a matching file against an instance file.
    Verify {
        instance: PathBuf,
        matching: PathBuf,
        /// brute, attribute, list, single-peaked, geometric, or
        /// boolean-bitset.
        #[arg(long, default_value = "brute")]
        algo: String,
    },
    /// Decide whether the pair (MAN, WOMAN) belongs to all (or some)
    /// stable matchings of a small instance.
    Pair {
        instance: PathBuf,
        man: usize,
        woman: usize,
        /// all (every stable matching) or some (at least one; n <= 10).
        #[arg(long, default_value = "all")]
        mode: String,
    },
    /// Run the benchmark harness over a JSON grid config and emit CSV.
    Bench { config: PathBuf },
    /// Print a named fixture with its annotations, or list the names.
    Fixture {
        name: Option<String>,
        /// List the available fixture names, one per line.
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Writes the primary artifact to `--out`, or to standard output.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_market(path: &PathBuf) -> Result<Market> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read instance {}", path.display()))?;
    Market::from_instance_str(&text)
        .with_context(|| format!("cannot parse instance {}", path.display()))
}

fn read_matching(path: &PathBuf) -> Result<Matching> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read matching {}", path.display()))?;
    Matching::from_json_str(&text)
        .with_context(|| format!("cannot parse matching {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen { model, reduction, fixture: fix, n, d, l, relation } => {
            let mut r = rng(cli.seed);
            let market = match (model, reduction, fix) {
                (Some(model), None, None) => {
                    if l.is_some() {
                        bail!("--l only applies to reduction families");
                    }
                    gen::random_market(&mut r, &model, n, d.unwrap_or(2), &relation)?
                }
                (None, Some(family), None) => {
                    let inst = gen::random_reduction(&mut r, &family, n, d.unwrap_or(4), l)?;
                    if !cli.quiet {
                        eprintln!(
                            "family={family} n={n} d={} oracle_answer={}",
                            inst.params.d, inst.oracle_answer
                        );
                    }
                    inst.market
                }
                (None, None, Some(name)) => fixture(&name)?.market,
                (None, None, None) => bail!("pass one of --model, --reduction, or --fixture"),
                _ => unreachable!("clap rejects conflicting selectors"),
            };
            emit(&cli.out, &(market.to_instance_string() + "\n"))?;
            Ok(0)
        }
        Command::Solve { instance, algo } => {
            let market = read_market(&instance)?;
            let report: SolveReport = match algo.as_str() {
                "gs-men" => gale_shapley(&market, Side::Men),
                "gs-women" => gale_shapley(&market, Side::Women),
                "small-universe" => {
                    let Market::Attribute(am) = &market else {
                        bail!(
                            "algorithm small-universe is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    find_small_universe(am, &infer_universe(am))?
                }
                "one-sided" => {
                    let Market::OneSided(osm) = &market else {
                        bail!(
                            "algorithm one-sided is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    find_one_sided(osm)
                }
                other => bail!(
                    "unknown solver {other:?}; use gs-men, gs-women, small-universe, or one-sided"
                ),
            };
            if !cli.quiet {
                eprintln!(
                    "algorithm={} model={} n={} proposals={} runtime_nanos={}",
                    report.algorithm,
                    market.model_name(),
                    market.n(),
                    report.proposals,
                    report.runtime_nanos
                );
            }
            emit(&cli.out, &(report.matching.to_json_string() + "\n"))?;
            Ok(0)
        }
        Command::Verify { instance, matching, algo } => {
            let market = read_market(&instance)?;
            let mu = read_matching(&matching)?;
            let report: VerifyReport = match algo.as_str() {
                "brute" => verify_brute(&market, &mu)?,
                "attribute" => {
                    let Market::Attribute(am) = &market else {
                        bail!(
                            "verifier attribute is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    verify_attribute(am, &mu)?
                }
                "boolean-bitset" => {
                    let Market::Attribute(am) = &market else {
                        bail!(
                            "verifier boolean-bitset is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    verify_boolean_bitset(am, &mu)?
                }
                "list" => {
                    let Market::List(lm) = &market else {
                        bail!(
                            "verifier list is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    verify_list(lm, &mu)?
                }
                "single-peaked" => {
                    let Market::SinglePeaked(spm) = &market else {
                        bail!(
                            "verifier single-peaked is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    verify_single_peaked(spm, &mu)?
                }
                "geometric" => {
                    let Market::Geometric(gm) = &market else {
                        bail!(
                            "verifier geometric is incompatible with the {} model",
                            market.model_name()
                        );
                    };
                    verify_geometric(gm, &mu)?
                }
                other => bail!(
                    "unknown verifier {other:?}; use brute, attribute, list, single-peaked, \
                     geometric, or boolean-bitset"
                ),
            };
            if !cli.quiet {
                eprintln!(
                    "comparisons={} runtime_nanos={}",
                    report.comparisons, report.runtime_nanos
                );
            }
            if report.stable {
                emit(&cli.out, "stable\n")?;
                Ok(0)
            } else {
                let line = match report.witness {
                    Some((m, w)) => format!("unstable {m} {w}\n"),
                    None => "unstable\n".to_string(),
                };
                emit(&cli.out, &line)?;
                Ok(1)
            }
        }
        Command::Pair { instance, man, woman, mode } => {
            let market = read_market(&instance)?;
            let member = match mode.as_str() {
                "all" => in_all_stable(&market, man, woman)?,
                "some" => in_some_stable(&market, man, woman)?,
                other => bail!("unknown mode {other:?}; use all or some"),
            };
            emit(&cli.out, if member { "yes\n" } else { "no\n" })?;
            Ok(if member { 0 } else { 1 })
        }
        Command::Bench { config } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("cannot read config {}", config.display()))?;
            let cells = bench::parse_config(&text)?;
            let csv = bench::run(&cells)?;
            emit(&cli.out, &csv)?;
            Ok(0)
        }
        Command::Fixture { name, list } => {
            if list {
                let mut text = String::new();
                for name in fixture_names() {
                    text.push_str(name);
                    text.push('\n');
                }
                emit(&cli.out, &text)?;
                return Ok(0);
            }
            let Some(name) = name else {
                bail!("pass a fixture name or --list");
            };
            let fix = fixture(&name)?;
            let text = serde_json::to_string_pretty(&fix).expect("fixtures serialize") + "\n";
            emit(&cli.out, &text)?;
            Ok(0)
        }
    }
}
