//! Seeded random-market builders shared by the integration suites. All
//! randomness flows through ChaCha8 so every failure replays exactly.
#![allow(dead_code)]

use matchkit::{
    AttributeMarket, ExplicitMarket, GeometricMarket, ListMarket, Market, Matching,
    OneSidedMarket, PeakRelation, SinglePeakedMarket,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1) with 53 random bits.
pub fn unit(r: &mut ChaCha8Rng) -> f64 {
    (r.next_u64() >> 11) as f64 * 2f64.powi(-53)
}

/// Uniform in [-1, 1).
pub fn signed(r: &mut ChaCha8Rng) -> f64 {
    2.0 * unit(r) - 1.0
}

pub fn below(r: &mut ChaCha8Rng, n: usize) -> usize {
    assert!(n > 0);
    (r.next_u64() % n as u64) as usize
}

pub fn coin(r: &mut ChaCha8Rng) -> bool {
    r.next_u64() & 1 == 1
}

pub fn permutation(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, below(r, i + 1));
    }
    p
}

pub fn random_matching(r: &mut ChaCha8Rng, n: usize) -> Matching {
    Matching { pairs: permutation(r, n) }
}

pub fn bool_row(r: &mut ChaCha8Rng, d: usize) -> Vec<u8> {
    (0..d).map(|_| (r.next_u64() & 1) as u8).collect()
}

pub fn bool_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<u8>> {
    (0..n).map(|_| bool_row(r, d)).collect()
}

fn real_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| unit(r)).collect()).collect()
}

fn signed_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| signed(r)).collect()).collect()
}

/// Strictly increasing positions with random gaps.
fn increasing(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x = signed(r);
    (0..n)
        .map(|_| {
            x += 0.05 + unit(r);
            x
        })
        .collect()
}

/// A strict rank row (0 = best) from a random order.
fn rank_row(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let order = permutation(r, n);
    let mut rank = vec![0usize; n];
    for (pos, &c) in order.iter().enumerate() {
        rank[c] = pos;
    }
    rank
}

/// A strict rank row that is unimodal along candidate index order: pick a
/// peak, then repeatedly extend the visited interval left or right.
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

pub fn attribute_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
    Market::Attribute(AttributeMarket {
        n,
        d,
        men_attrs: real_rows(r, n, d),
        men_weights: signed_rows(r, n, d),
        women_attrs: real_rows(r, n, d),
        women_weights: signed_rows(r, n, d),
        provenance: None,
    })
}

pub fn boolean_attribute_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
    let f = |rows: Vec<Vec<u8>>| -> Vec<Vec<f64>> {
        rows.into_iter()
            .map(|row| row.into_iter().map(f64::from).collect())
            .collect()
    };
    Market::Attribute(AttributeMarket {
        n,
        d,
        men_attrs: f(bool_rows(r, n, d)),
        men_weights: f(bool_rows(r, n, d)),
        women_attrs: f(bool_rows(r, n, d)),
        women_weights: f(bool_rows(r, n, d)),
        provenance: None,
    })
}

/// One-sided market with pairwise-distinct men attributes and a random
/// mixture of positive and negative women.
pub fn one_sided_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
    let order = permutation(r, n);
    let men_attr: Vec<f64> = order.iter().map(|&i| i as f64 + unit(r) * 0.5).collect();
    Market::OneSided(OneSidedMarket {
        n,
        d,
        women_attrs: real_rows(r, n, d),
        men_weights: signed_rows(r, n, d),
        men_attr,
        women_sign: (0..n).map(|_| if coin(r) { 1.0 } else { -1.0 }).collect(),
        provenance: None,
    })
}

pub fn list_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
    Market::List(ListMarket {
        n,
        d,
        women_orders: (0..d).map(|_| permutation(r, n)).collect(),
        men_orders: (0..d).map(|_| permutation(r, n)).collect(),
        men_choice: (0..n).map(|_| below(r, d)).collect(),
        women_choice: (0..n).map(|_| below(r, d)).collect(),
        provenance: None,
    })
}

pub fn distance_single_peaked(r: &mut ChaCha8Rng, n: usize) -> Market {
    let men_pos = increasing(r, n);
    let women_pos = increasing(r, n);
    let spread = |pos: &[f64], r: &mut ChaCha8Rng| -> Vec<f64> {
        let lo = pos[0] - 0.5;
        let hi = pos[n - 1] + 0.5;
        (0..n).map(|_| lo + (hi - lo) * unit(r)).collect()
    };
    let men_ideal = spread(&women_pos, r);
    let women_ideal = spread(&men_pos, r);
    Market::SinglePeaked(SinglePeakedMarket {
        n,
        men_pos,
        women_pos,
        men_ideal,
        women_ideal,
        relation: PeakRelation::Distance,
        men_rank: None,
        women_rank: None,
        provenance: None,
    })
}

pub fn custom_single_peaked(r: &mut ChaCha8Rng, n: usize) -> Market {
    Market::SinglePeaked(SinglePeakedMarket {
        n,
        men_pos: increasing(r, n),
        women_pos: increasing(r, n),
        men_ideal: vec![0.0; n],
        women_ideal: vec![0.0; n],
        relation: PeakRelation::Custom,
        men_rank: Some((0..n).map(|_| unimodal_rank_row(r, n)).collect()),
        women_rank: Some((0..n).map(|_| unimodal_rank_row(r, n)).collect()),
        provenance: None,
    })
}

pub fn geometric_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
    Market::Geometric(GeometricMarket {
        n,
        d,
        men_loc: signed_rows(r, n, d),
        men_ideal: signed_rows(r, n, d),
        women_loc: signed_rows(r, n, d),
        women_ideal: signed_rows(r, n, d),
        provenance: None,
    })
}

pub fn explicit_market(r: &mut ChaCha8Rng, n: usize) -> Market {
    Market::Explicit(ExplicitMarket {
        n,
        men_rank: (0..n).map(|_| rank_row(r, n)).collect(),
        women_rank: (0..n).map(|_| rank_row(r, n)).collect(),
        provenance: None,
    })
}

/// One market of every model, sized n, with small derived dimensions.
pub fn markets_for_all_models(r: &mut ChaCha8Rng, n: usize) -> Vec<Market> {
    let d = 1 + below(r, 3);
    let lists = 1 + below(r, 3);
    vec![
        attribute_market(r, n, d),
        boolean_attribute_market(r, n, d + 1),
        one_sided_market(r, n, d),
        list_market(r, n, lists),
        distance_single_peaked(r, n),
        custom_single_peaked(r, n),
        geometric_market(r, n, d),
        explicit_market(r, n),
    ]
}
