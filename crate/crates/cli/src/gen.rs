//! Random instance construction for `gen` and the bench harness.

use anyhow::{bail, Context, Result};
use matchkit::{
    gen_finding_hardness, gen_geo_finding, gen_geo_stable_pair, gen_geo_verify, gen_stable_pair,
    gen_stable_pair_co, gen_verify_hardness, AttributeMarket, ExplicitMarket, GeometricMarket,
    ListMarket, Market, OneSidedMarket, PeakRelation, ReductionInstance, SinglePeakedMarket,
};
use rand_chacha::ChaCha8Rng;

use crate::sampling::{below, coin, permutation, signed_f64, unit_f64};

pub const MODELS: &[&str] = &[
    "attribute",
    "boolean_attribute",
    "one_sided",
    "list",
    "single_peaked",
    "geometric",
    "explicit",
];

pub const REDUCTIONS: &[&str] = &[
    "finding",
    "verify-hardness",
    "stable-pair",
    "stable-pair-co",
    "geo-finding",
    "geo-verify",
    "geo-stable-pair",
    "geo-stable-pair-co",
];

fn unit_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| unit_f64(r)).collect()).collect()
}

fn signed_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| signed_f64(r)).collect()).collect()
}

fn bool_rows_f(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| if coin(r) { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn bool_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<u8>> {
    (0..n).map(|_| (0..d).map(|_| coin(r) as u8).collect()).collect()
}

/// Sorted strictly increasing positions with uniform gaps.
fn increasing(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            x += 0.05 + unit_f64(r);
            x
        })
        .collect()
}

/// A strict rank row over n candidates, unimodal along index order.
fn unimodal_rank_row(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let peak = below(r, n);
    let (mut lo, mut hi) = (peak, peak);
    let mut rank = vec![0usize; n];
    for pos in 1..n {
        let go_left = hi == n - 1 || (lo > 0 && coin(r));
        if go_left {
            lo -= 1;
            rank[lo] = pos;
        } else {
            hi += 1;
            rank[hi] = pos;
        }
    }
    rank
}

fn rank_row(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let order = permutation(r, n);
    let mut rank = vec![0usize; n];
    for (pos, &c) in order.iter().enumerate() {
        rank[c] = pos;
    }
    rank
}

/// A random market of the named model. `d` means: attributes for the
/// attribute/one-sided/geometric families, number of shared lists for the
/// list model; the single-peaked and explicit models have no dimension and
/// ignore it.
pub fn random_market(
    r: &mut ChaCha8Rng,
    model: &str,
    n: usize,
    d: usize,
    relation: &str,
) -> Result<Market> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let needs_d = !matches!(model, "single_peaked" | "explicit");
    if needs_d && d == 0 {
        bail!("--d must be at least 1 for the {model} model");
    }
    let market = match model {
        "attribute" => Market::Attribute(AttributeMarket {
            n,
            d,
            men_attrs: unit_rows(r, n, d),
            men_weights: signed_rows(r, n, d),
            women_attrs: unit_rows(r, n, d),
            women_weights: signed_rows(r, n, d),
            provenance: None,
        }),
        "boolean_attribute" => Market::Attribute(AttributeMarket {
            n,
            d,
            men_attrs: bool_rows_f(r, n, d),
            men_weights: bool_rows_f(r, n, d),
            women_attrs: bool_rows_f(r, n, d),
            women_weights: bool_rows_f(r, n, d),
            provenance: None,
        }),
        "one_sided" => Market::OneSided(OneSidedMarket {
            n,
            d,
            women_attrs: unit_rows(r, n, d),
            men_weights: signed_rows(r, n, d),
            men_attr: (0..n).map(|_| unit_f64(r)).collect(),
            women_sign: (0..n).map(|_| if coin(r) { 1.0 } else { -1.0 }).collect(),
            provenance: None,
        }),
        "list" => Market::List(ListMarket {
            n,
            d,
            women_orders: (0..d).map(|_| permutation(r, n)).collect(),
            men_orders: (0..d).map(|_| permutation(r, n)).collect(),
            men_choice: (0..n).map(|_| below(r, d)).collect(),
            women_choice: (0..n).map(|_| below(r, d)).collect(),
            provenance: None,
        }),
        "single_peaked" => {
            let men_pos = increasing(r, n);
            let women_pos = increasing(r, n);
            let custom = match relation {
                "distance" => false,
                "custom" => true,
                other => bail!("unknown --relation {other:?}; use distance or custom"),
            };
            let span = |pos: &[f64], r: &mut ChaCha8Rng| -> Vec<f64> {
                let lo = pos[0] - 0.5;
                let hi = pos[n - 1] + 0.5;
                (0..n).map(|_| lo + (hi - lo) * unit_f64(r)).collect()
            };
            let men_ideal = span(&women_pos, r);
            let women_ideal = span(&men_pos, r);
            Market::SinglePeaked(SinglePeakedMarket {
                n,
                men_pos,
                women_pos,
                men_ideal,
                women_ideal,
                relation: if custom { PeakRelation::Custom } else { PeakRelation::Distance },
                men_rank: custom.then(|| (0..n).map(|_| unimodal_rank_row(r, n)).collect()),
                women_rank: custom.then(|| (0..n).map(|_| unimodal_rank_row(r, n)).collect()),
                provenance: None,
            })
        }
        "geometric" => Market::Geometric(GeometricMarket {
            n,
            d,
            men_loc: signed_rows(r, n, d),
            men_ideal: signed_rows(r, n, d),
            women_loc: signed_rows(r, n, d),
            women_ideal: signed_rows(r, n, d),
            provenance: None,
        }),
        "explicit" => Market::Explicit(ExplicitMarket {
            n,
            men_rank: (0..n).map(|_| rank_row(r, n)).collect(),
            women_rank: (0..n).map(|_| rank_row(r, n)).collect(),
            provenance: None,
        }),
        other => bail!("unknown model {other:?}; known models: {}", MODELS.join(", ")),
    };
    market.validate().context("generated market failed validation")?;
    Ok(market)
}

/// A reduction instance of the named family over random boolean vector sets
/// with |U| = |V| = n in dimension d.
pub fn random_reduction(
    r: &mut ChaCha8Rng,
    family: &str,
    n: usize,
    d: usize,
    l: Option<usize>,
) -> Result<ReductionInstance> {
    if n == 0 || d == 0 {
        bail!("--n and --d must be at least 1");
    }
    let u = bool_rows(r, n, d);
    let v = bool_rows(r, n, d);
    let need_l = || l.with_context(|| format!("--l is required for the {family} family"));
    let forbid_l = |what: &str| -> Result<()> {
        if l.is_some() {
            bail!("--l is not accepted for the {what} family (its threshold is fixed)");
        }
        Ok(())
    };
    let inst = match family {
        "finding" => {
            forbid_l("finding")?;
            gen_finding_hardness(&u, &v)?
        }
        "verify-hardness" => gen_verify_hardness(&u, &v, need_l()?)?,
        "stable-pair" => gen_stable_pair(&u, &v, need_l()?)?,
        "stable-pair-co" => gen_stable_pair_co(&u, &v, need_l()?)?,
        "geo-finding" => {
            forbid_l("geo-finding")?;
            gen_geo_finding(&u, &v)?
        }
        "geo-verify" => gen_geo_verify(&u, &v, need_l()?)?,
        "geo-stable-pair" => {
            forbid_l("geo-stable-pair")?;
            gen_geo_stable_pair(&u, &v, false)?
        }
        "geo-stable-pair-co" => {
            forbid_l("geo-stable-pair-co")?;
            gen_geo_stable_pair(&u, &v, true)?
        }
        other => bail!(
            "unknown reduction family {other:?}; known families: {}",
            REDUCTIONS.join(", ")
        ),
    };
    Ok(inst)
}

/// The universe handed to the small-universe solver when none is given
/// explicitly: every distinct value appearing in the women's attribute and
/// weight vectors, in increasing order.
pub fn infer_universe(am: &AttributeMarket) -> Vec<f64> {
    let mut vals: Vec<f64> = am
        .women_attrs
        .iter()
        .chain(am.women_weights.iter())
        .flatten()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup_by(|a, b| a == b);
    vals
}
