//! The benchmark harness: a JSON list of grid cells in, one sorted CSV out.
//!
//! Config format — a JSON array of cells:
//!
//! ```json
//! [{
//!   "model": "list",
//!   "n": [1024, 2048],
//!   "d": [4],
//!   "algorithms": ["gs-men", "verify-list"],
//!   "repetitions": 3,
//!   "seed": 42,
//!   "oracle_check": 0.25
//! }]
//! ```
//!
//! Every (n, d, repetition) triple seeds its own ChaCha8 stream with
//! `cell.seed + repetition`, so reruns reproduce the same instances and the
//! whole CSV is identical across runs except for the `runtime_nanos` column.
//! `oracle_check` is the fraction of rows rechecked against the brute-force
//! verifier; rows are selected by a deterministic FNV lottery over
//! `"{instance_id}:{algorithm}"` rather than by a random draw, so the set of
//! checked rows is also reproducible. A failed recheck aborts the run.

use anyhow::{bail, Context, Result};
use matchkit::{
    find_one_sided, find_small_universe, gale_shapley, verify_attribute, verify_boolean_bitset,
    verify_brute, verify_geometric, verify_list, verify_single_peaked, Market, Matching, Side,
};
use serde::Deserialize;

use crate::gen::{infer_universe, random_market};
use crate::sampling::{fnv1a_64, matching_hash, rng};

pub const SOLVERS: &[&str] = &["gs-men", "gs-women", "small-universe", "one-sided"];
pub const VERIFIERS: &[&str] = &[
    "verify-brute",
    "verify-attribute",
    "verify-list",
    "verify-single-peaked",
    "verify-geometric",
    "verify-boolean-bitset",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchCell {
    pub model: String,
    pub n: Vec<usize>,
    #[serde(default)]
    pub d: Vec<usize>,
    pub algorithms: Vec<String>,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default)]
    pub oracle_check: f64,
}

struct Row {
    instance_id: String,
    model: String,
    n: usize,
    d: usize,
    algorithm: String,
    seed: u64,
    runtime_nanos: u64,
    verdict_or_hash: String,
    oracle_checked: bool,
}

pub const CSV_HEADER: &str =
    "instance_id,model,n,d,algorithm,seed,runtime_nanos,verdict_or_hash,oracle_checked";

/// The `d` a model reports in the CSV when it has no intrinsic dimension.
fn csv_d(model: &str, d: usize) -> usize {
    match model {
        "single_peaked" => 1,
        "explicit" => 0,
        _ => d,
    }
}

fn d_grid(cell: &BenchCell) -> Result<Vec<usize>> {
    if matches!(cell.model.as_str(), "single_peaked" | "explicit") {
        // Dimensionless models get a single placeholder grid entry.
        Ok(vec![0])
    } else if cell.d.is_empty() {
        bail!("cell for model {:?} needs a d grid", cell.model)
    } else {
        Ok(cell.d.clone())
    }
}

/// Deterministic lottery: check this row iff the low 32 bits of the FNV hash
/// of `"{instance_id}:{algorithm}"` fall below `fraction` of the 32-bit range.
fn lottery(instance_id: &str, algorithm: &str, fraction: f64) -> bool {
    let key = format!("{instance_id}:{algorithm}");
    let ticket = fnv1a_64(key.bytes()) % (1u64 << 32);
    ticket < (fraction * (1u64 << 32) as f64) as u64
}

fn run_solver(market: &Market, algorithm: &str) -> Result<(Matching, u64)> {
    match algorithm {
        "gs-men" => {
            let rep = gale_shapley(market, Side::Men);
            Ok((rep.matching, rep.runtime_nanos))
        }
        "gs-women" => {
            let rep = gale_shapley(market, Side::Women);
            Ok((rep.matching, rep.runtime_nanos))
        }
        "small-universe" => {
            let Market::Attribute(am) = market else {
                bail!("small-universe is incompatible with the {} model", market.model_name());
            };
            let rep = find_small_universe(am, &infer_universe(am))?;
            Ok((rep.matching, rep.runtime_nanos))
        }
        "one-sided" => {
            let Market::OneSided(osm) = market else {
                bail!("one-sided is incompatible with the {} model", market.model_name());
            };
            let rep = find_one_sided(osm);
            Ok((rep.matching, rep.runtime_nanos))
        }
        other => bail!("unknown solver {other:?}"),
    }
}

fn run_verifier(market: &Market, mu: &Matching, algorithm: &str) -> Result<(bool, u64)> {
    let rep = match algorithm {
        "verify-brute" => verify_brute(market, mu)?,
        "verify-attribute" => {
            let Market::Attribute(am) = market else {
                bail!("verify-attribute is incompatible with the {} model", market.model_name());
            };
            verify_attribute(am, mu)?
        }
        "verify-boolean-bitset" => {
            let Market::Attribute(am) = market else {
                bail!(
                    "verify-boolean-bitset is incompatible with the {} model",
                    market.model_name()
                );
            };
            verify_boolean_bitset(am, mu)?
        }
        "verify-list" => {
            let Market::List(lm) = market else {
                bail!("verify-list is incompatible with the {} model", market.model_name());
            };
            verify_list(lm, mu)?
        }
        "verify-single-peaked" => {
            let Market::SinglePeaked(spm) = market else {
                bail!(
                    "verify-single-peaked is incompatible with the {} model",
                    market.model_name()
                );
            };
            verify_single_peaked(spm, mu)?
        }
        "verify-geometric" => {
            let Market::Geometric(gm) = market else {
                bail!("verify-geometric is incompatible with the {} model", market.model_name());
            };
            verify_geometric(gm, mu)?
        }
        other => bail!("unknown verifier {other:?}"),
    };
    Ok((rep.stable, rep.runtime_nanos))
}

/// Executes a parsed config and renders the full CSV (header included).
pub fn run(cells: &[BenchCell]) -> Result<String> {
    let mut rows: Vec<Row> = Vec::new();
    for cell in cells {
        if !(0.0..=1.0).contains(&cell.oracle_check) {
            bail!("oracle_check must lie in [0, 1], got {}", cell.oracle_check);
        }
        for algorithm in &cell.algorithms {
            let known = SOLVERS.contains(&algorithm.as_str())
                || VERIFIERS.contains(&algorithm.as_str());
            if !known {
                bail!(
                    "unknown algorithm {algorithm:?}; solvers: {}; verifiers: {}",
                    SOLVERS.join(", "),
                    VERIFIERS.join(", ")
                );
            }
        }
        for &n in &cell.n {
            for &d in &d_grid(cell)? {
                for rep in 0..cell.repetitions {
                    let row_seed = cell.seed + rep as u64;
                    let mut r = rng(row_seed);
                    let market = random_market(&mut r, &cell.model, n, d.max(1), "distance")
                        .with_context(|| format!("cell model={} n={n} d={d}", cell.model))?;
                    let d_col = csv_d(&cell.model, d);
                    let instance_id = format!("{}-n{n}-d{d_col}-s{row_seed}-r{rep}", cell.model);
                    // Verifier rows all time the same subject matching: the
                    // man-proposing deferred-acceptance outcome.
                    let subject = gale_shapley(&market, Side::Men).matching;
                    for algorithm in &cell.algorithms {
                        let checked = lottery(&instance_id, algorithm, cell.oracle_check);
                        let (verdict_or_hash, runtime_nanos) =
                            if SOLVERS.contains(&algorithm.as_str()) {
                                let (matching, nanos) = run_solver(&market, algorithm)?;
                                if checked {
                                    let brute = verify_brute(&market, &matching)?;
                                    if !brute.stable {
                                        bail!(
                                            "oracle check failed: {algorithm} on {instance_id} \
                                             produced an unstable matching (witness {:?})",
                                            brute.witness
                                        );
                                    }
                                }
                                (format!("{:016x}", matching_hash(&matching.pairs)), nanos)
                            } else {
                                let (stable, nanos) = run_verifier(&market, &subject, algorithm)?;
                                if checked {
                                    let brute = verify_brute(&market, &subject)?;
                                    if brute.stable != stable {
                                        bail!(
                                            "oracle check failed: {algorithm} on {instance_id} \
                                             disagrees with the brute-force verdict"
                                        );
                                    }
                                }
                                (stable.to_string(), nanos)
                            };
                        rows.push(Row {
                            instance_id: instance_id.clone(),
                            model: cell.model.clone(),
                            n,
                            d: d_col,
                            algorithm: algorithm.clone(),
                            seed: row_seed,
                            runtime_nanos,
                            verdict_or_hash,
                            oracle_checked: checked,
                        });
                    }
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.model, a.n, a.d, &a.algorithm, a.seed).cmp(&(&b.model, b.n, b.d, &b.algorithm, b.seed))
    });
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.instance_id,
            row.model,
            row.n,
            row.d,
            row.algorithm,
            row.seed,
            row.runtime_nanos,
            row.verdict_or_hash,
            row.oracle_checked
        ));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<Vec<BenchCell>> {
    serde_json::from_str(text).context("bench config must be a JSON array of cells")
}
