//! The acceptance gate: one test per shipping criterion, named `c1` … `c8`,
//! so the harness emits exactly one pass/fail line for each. Every check in
//! here pins an exact expected value or an explicit numeric tolerance; a
//! failure panics with the offending trial's replay seed.
//!
//! The tests share a lock and therefore run one at a time, keeping the
//! runtime measurements in `c6_scaling_slopes` free of sibling-test noise.

use std::sync::{Mutex, MutexGuard, PoisonError};
use std::time::{Duration, Instant};

use matchkit::geometry::{hmi_build, rei_build, Halfspace};
use matchkit::{
    enumerate_stable, find_one_sided, find_small_universe, fixture, gale_shapley,
    gen_finding_hardness, gen_geo_finding, gen_geo_stable_pair, gen_geo_verify, gen_stable_pair,
    gen_stable_pair_co, gen_verify_hardness, in_all_stable, in_some_stable, lift_geometric,
    verify_attribute, verify_boolean_bitset, verify_brute, verify_geometric, verify_list,
    verify_single_peaked, AttributeMarket, Designated, DeviationEffect, ExplicitMarket,
    GeometricMarket, ListMarket, Market, Matching, OneSidedMarket, PeakRelation,
    SinglePeakedMarket, Side,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

static GATE: Mutex<()> = Mutex::new(());

fn lock() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(PoisonError::into_inner)
}

// ---------------------------------------------------------------------------
// Seeded sampling helpers (self-contained so the gate has no test-only deps).

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit(r: &mut ChaCha8Rng) -> f64 {
    (r.next_u64() >> 11) as f64 * 2f64.powi(-53)
}

fn signed(r: &mut ChaCha8Rng) -> f64 {
    2.0 * unit(r) - 1.0
}

fn below(r: &mut ChaCha8Rng, n: usize) -> usize {
    assert!(n > 0);
    (r.next_u64() % n as u64) as usize
}

fn coin(r: &mut ChaCha8Rng) -> bool {
    r.next_u64() & 1 == 1
}

fn permutation(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, below(r, i + 1));
    }
    p
}

fn random_matching(r: &mut ChaCha8Rng, n: usize) -> Matching {
    Matching { pairs: permutation(r, n) }
}

fn bool_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<u8>> {
    (0..n).map(|_| (0..d).map(|_| (r.next_u64() & 1) as u8).collect()).collect()
}

fn real_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| unit(r)).collect()).collect()
}

fn signed_rows(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| signed(r)).collect()).collect()
}

fn increasing(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x = signed(r);
    (0..n)
        .map(|_| {
            x += 0.05 + unit(r);
            x
        })
        .collect()
}

fn rank_row(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let order = permutation(r, n);
    let mut rank = vec![0usize; n];
    for (pos, &c) in order.iter().enumerate() {
        rank[c] = pos;
    }
    rank
}

/// A strict rank row that is unimodal along candidate index order.
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

fn attribute_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
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

fn boolean_attribute_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
    let f = |rows: Vec<Vec<u8>>| -> Vec<Vec<f64>> {
        rows.into_iter().map(|row| row.into_iter().map(f64::from).collect()).collect()
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

fn one_sided_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> OneSidedMarket {
    OneSidedMarket {
        n,
        d,
        women_attrs: real_rows(r, n, d),
        men_weights: signed_rows(r, n, d),
        men_attr: (0..n).map(|_| unit(r) * 100.0).collect(),
        women_sign: (0..n).map(|_| if coin(r) { 1.0 } else { -1.0 }).collect(),
        provenance: None,
    }
}

fn list_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> Market {
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

fn distance_single_peaked(r: &mut ChaCha8Rng, n: usize) -> Market {
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

fn custom_single_peaked(r: &mut ChaCha8Rng, n: usize) -> Market {
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

fn geometric_market(r: &mut ChaCha8Rng, n: usize, d: usize) -> GeometricMarket {
    GeometricMarket {
        n,
        d,
        men_loc: signed_rows(r, n, d),
        men_ideal: signed_rows(r, n, d),
        women_loc: signed_rows(r, n, d),
        women_ideal: signed_rows(r, n, d),
        provenance: None,
    }
}

fn explicit_market(r: &mut ChaCha8Rng, n: usize) -> Market {
    Market::Explicit(ExplicitMarket {
        n,
        men_rank: (0..n).map(|_| rank_row(r, n)).collect(),
        women_rank: (0..n).map(|_| rank_row(r, n)).collect(),
        provenance: None,
    })
}

fn dot(u: &[u8], v: &[u8]) -> usize {
    u.iter().zip(v).map(|(&a, &b)| (a & b) as usize).sum()
}

fn ham(u: &[u8], v: &[u8]) -> usize {
    u.iter().zip(v).filter(|(a, b)| a != b).count()
}

/// Independent brute-force max inner product over U x V.
fn brute_max_dot(u: &[Vec<u8>], v: &[Vec<u8>]) -> usize {
    u.iter().flat_map(|a| v.iter().map(move |b| dot(a, b))).max().unwrap()
}

/// Independent brute-force min Hamming distance over U x V.
fn brute_min_ham(u: &[Vec<u8>], v: &[Vec<u8>]) -> usize {
    u.iter().flat_map(|a| v.iter().map(move |b| ham(a, b))).min().unwrap()
}

fn pairs(v: &[usize]) -> Matching {
    Matching { pairs: v.to_vec() }
}

/// Least-squares slope of ln(y) against ln(x).
fn loglog_slope(ns: &[usize], nanos: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = nanos.iter().map(|&t| t.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn median(mut v: Vec<u64>) -> f64 {
    v.sort_unstable();
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2] as f64
    } else {
        (v[k / 2 - 1] + v[k / 2]) as f64 / 2.0
    }
}

// ---------------------------------------------------------------------------

#[test]
fn c1_fixture_exactness() {
    let _g = lock();
    let t0 = Instant::now();
    // Frozen expected stable sets, in lexicographic order of `pairs`.
    let table: &[(&str, &[&[usize]])] = &[
        ("two_list_no_top", &[&[1, 2, 4, 3, 0]]),
        ("two_list_greedy", &[&[2, 0, 1]]),
        ("list_strategy", &[&[0, 1, 2, 3], &[1, 2, 0, 3]]),
        ("single_peaked_no_top", &[&[3, 1, 2, 0]]),
        ("geometric_strategy", &[&[2, 0, 1], &[2, 1, 0]]),
    ];
    let mut matchings = 0;
    for (name, expected) in table {
        let fx = fixture(name).unwrap();
        let got = enumerate_stable(&fx.market).unwrap();
        let want: Vec<Matching> = expected.iter().map(|p| pairs(p)).collect();
        assert_eq!(got, want, "{name}: enumerated stable set");
        matchings += want.len();
    }
    // Side-optimal matchings of the two strategy fixtures.
    let ls = fixture("list_strategy").unwrap().market;
    assert_eq!(gale_shapley(&ls, Side::Men).matching, pairs(&[0, 1, 2, 3]));
    assert_eq!(gale_shapley(&ls, Side::Women).matching, pairs(&[1, 2, 0, 3]));
    let gs = fixture("geometric_strategy").unwrap().market;
    assert_eq!(gale_shapley(&gs, Side::Men).matching, pairs(&[2, 0, 1]));
    assert_eq!(gale_shapley(&gs, Side::Women).matching, pairs(&[2, 1, 0]));
    // Manipulation outcomes: each strategy fixture carries one misreport that
    // must leave exactly the frozen matching stable.
    let outcomes: &[(&str, &[usize])] =
        &[("list_strategy", &[1, 2, 0, 3]), ("geometric_strategy", &[2, 1, 0])];
    for (name, out) in outcomes {
        let fx = fixture(name).unwrap();
        let unique: Vec<&matchkit::Deviation> = fx
            .annotations
            .deviations
            .iter()
            .filter(|dev| matches!(dev.expect, DeviationEffect::UniqueStable(_)))
            .collect();
        assert_eq!(unique.len(), 1, "{name} has one manipulation variant");
        assert_eq!(
            enumerate_stable(&unique[0].market).unwrap(),
            vec![pairs(out)],
            "{name}: manipulation outcome"
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "budget exceeded: {elapsed:?} >= 1 s");
    println!(
        "criterion 1 (fixture exactness): PASS — 5 fixtures, {matchings} stable matchings, \
         2 manipulation outcomes, {} ms",
        elapsed.as_millis()
    );
}

#[test]
fn c2_verifier_oracle_equivalence() {
    let _g = lock();
    let t0 = Instant::now();
    const TRIALS: usize = 500;
    let n_grid = [2usize, 3, 5, 9, 17, 33, 64, 129, 256];
    let mut per_verifier = [0usize; 5];
    let mut unstable_seen = [0usize; 5];
    for i in 0..TRIALS {
        let mut r = rng(0xC2_0000 + i as u64);
        let n = n_grid[i % n_grid.len()];
        let real_d = 1 + below(&mut r, 4);
        let bool_d = 1 + below(&mut r, 128);
        let lists = 1 + below(&mut r, 4);
        let geo_d = 1 + below(&mut r, 3);
        let markets: Vec<Market> = vec![
            attribute_market(&mut r, n, real_d),
            boolean_attribute_market(&mut r, n, bool_d),
            list_market(&mut r, n, lists),
            if coin(&mut r) {
                distance_single_peaked(&mut r, n)
            } else {
                custom_single_peaked(&mut r, n)
            },
            Market::Geometric(geometric_market(&mut r, n, geo_d)),
        ];
        for (k, market) in markets.into_iter().enumerate() {
            // Mix deferred-acceptance outputs (stable: full scans) with
            // uniform random matchings (usually unstable: witness paths).
            let mu = if i % 3 == 0 {
                gale_shapley(&market, Side::Men).matching
            } else {
                random_matching(&mut r, n)
            };
            let brute = verify_brute(&market, &mu).unwrap();
            let fast = match (k, &market) {
                (0, Market::Attribute(m)) => verify_attribute(m, &mu).unwrap(),
                (1, Market::Attribute(m)) => verify_boolean_bitset(m, &mu).unwrap(),
                (2, Market::List(m)) => verify_list(m, &mu).unwrap(),
                (3, Market::SinglePeaked(m)) => verify_single_peaked(m, &mu).unwrap(),
                (4, Market::Geometric(m)) => verify_geometric(m, &mu).unwrap(),
                _ => unreachable!(),
            };
            assert_eq!(
                fast.stable, brute.stable,
                "verifier {k} disagrees with brute force at trial {i} (n = {n})"
            );
            if !brute.stable {
                unstable_seen[k] += 1;
            }
            per_verifier[k] += 1;
        }
    }
    assert!(per_verifier.iter().all(|&c| c >= 500), "coverage: {per_verifier:?}");
    assert!(
        unstable_seen.iter().all(|&c| c >= 100),
        "verdict mix must exercise both answers: {unstable_seen:?}"
    );
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(120), "budget exceeded: {elapsed:?} >= 2 min");
    println!(
        "criterion 2 (verifier oracle equivalence): PASS — 5 verifiers x {TRIALS} instances, \
         0 mismatches, {:?} per-verifier unstable counts, {} s",
        unstable_seen,
        elapsed.as_secs()
    );
}

#[test]
fn c3_solver_stability() {
    let _g = lock();
    let t0 = Instant::now();
    let mut instances = 0usize;
    let mut outputs = 0usize;

    // Deferred acceptance on every model, both proposing sides.
    for i in 0..64u64 {
        let mut r = rng(0xC3_0000 + i);
        let n = 1 + below(&mut r, 48);
        let d = 1 + below(&mut r, 3);
        let lists = 1 + below(&mut r, 3);
        let all: Vec<Market> = vec![
            attribute_market(&mut r, n, d),
            boolean_attribute_market(&mut r, n, d + 1),
            Market::OneSided(one_sided_market(&mut r, n, d)),
            list_market(&mut r, n, lists),
            distance_single_peaked(&mut r, n),
            custom_single_peaked(&mut r, n),
            Market::Geometric(geometric_market(&mut r, n, d)),
            explicit_market(&mut r, n),
        ];
        for market in all {
            instances += 1;
            for side in [Side::Men, Side::Women] {
                let mu = gale_shapley(&market, side).matching;
                let rep = verify_brute(&market, &mu).unwrap();
                assert!(rep.stable, "GS output unstable at round {i}, witness {:?}", rep.witness);
                outputs += 1;
            }
        }
    }

    // Small-universe solver on markets whose women draw from a fixed grid.
    let universe = [0.0, 0.25, 0.5, 1.0];
    for i in 0..150u64 {
        let mut r = rng(0xC3_1000 + i);
        let n = 1 + below(&mut r, 64);
        let d = 1 + below(&mut r, 3);
        let from_grid = |r: &mut ChaCha8Rng, n: usize, d: usize| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..d).map(|_| universe[below(r, 4)]).collect()).collect()
        };
        let am = AttributeMarket {
            n,
            d,
            men_attrs: real_rows(&mut r, n, d),
            men_weights: signed_rows(&mut r, n, d),
            women_attrs: from_grid(&mut r, n, d),
            women_weights: from_grid(&mut r, n, d),
            provenance: None,
        };
        let mu = find_small_universe(&am, &universe).unwrap().matching;
        let rep = verify_brute(&Market::Attribute(am), &mu).unwrap();
        assert!(rep.stable, "small-universe output unstable at round {i}: {:?}", rep.witness);
        instances += 1;
        outputs += 1;
    }

    // One-sided solver: stability, equality with woman-proposing deferred
    // acceptance on the materialized market, and top-k sign separation.
    let mut mixed = 0usize;
    for i in 0..150u64 {
        let mut r = rng(0xC3_2000 + i);
        let n = 1 + below(&mut r, 64);
        let d = 1 + below(&mut r, 3);
        let osm = one_sided_market(&mut r, n, d);
        let mu = find_one_sided(&osm).matching;
        let market = Market::OneSided(osm.clone());
        let rep = verify_brute(&market, &mu).unwrap();
        assert!(rep.stable, "one-sided output unstable at round {i}: {:?}", rep.witness);
        let materialized = Market::Explicit(market.materialize());
        let womens = gale_shapley(&materialized, Side::Women).matching;
        assert_eq!(mu, womens, "one-sided must equal woman-proposing GS at round {i}");
        // Top-k separation: the positive-sign women hold exactly the k
        // highest-attribute men.
        let k = osm.women_sign.iter().filter(|&&s| s > 0.0).count();
        if k > 0 && k < n {
            mixed += 1;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            osm.men_attr[b].partial_cmp(&osm.men_attr[a]).unwrap().then(a.cmp(&b))
        });
        let top: std::collections::BTreeSet<usize> = order[..k].iter().copied().collect();
        let matched_to_positive: std::collections::BTreeSet<usize> = (0..n)
            .filter(|&m| osm.women_sign[mu.woman_of(m)] > 0.0)
            .collect();
        assert_eq!(matched_to_positive, top, "top-k separation violated at round {i}");
        instances += 1;
        outputs += 1;
    }

    assert!(instances >= 500, "need >= 500 instances, ran {instances}");
    assert!(mixed >= 100, "need a healthy mixed-sign population, saw {mixed}");
    println!(
        "criterion 3 (solver stability): PASS — {instances} instances, {outputs} solver outputs \
         all brute-stable, one-sided == woman-GS on 150/150, top-k separation on {mixed} \
         mixed-sign instances, {} s",
        t0.elapsed().as_secs()
    );
}

#[test]
fn c4_reduction_iff_theorems() {
    let _g = lock();
    let t0 = Instant::now();
    const DRAWS: usize = 200;
    let mut enumerated = 0usize;
    // Per-family count of (false answers, true answers): the iffs are only
    // meaningful when both branches actually occur.
    let mut mix = [[0usize; 2]; 8];
    for f in 0..8usize {
        for i in 0..DRAWS {
            let mut r = rng(0xC4_0000 + (f * DRAWS + i) as u64);
            // Every fourth draw is tiny so exhaustive enumeration can
            // cross-check the pair-membership families.
            let count = if i % 4 == 0 { 1 + below(&mut r, 4) } else { 1 + below(&mut r, 32) };
            let d = 1 + below(&mut r, 16);
            let l = 1 + below(&mut r, d);
            // The geo pair families fix their threshold near d/2, where random
            // sets almost always contain a close pair; alternate in maximally
            // separated sets (all-x vs all-complement-of-x) so the iffs see
            // both answers.
            let (u, v) = if matches!(f, 6 | 7) && i % 4 == 1 {
                let x: Vec<u8> = (0..d).map(|_| (r.next_u64() & 1) as u8).collect();
                let y: Vec<u8> = x.iter().map(|&b| 1 - b).collect();
                (vec![x; count], vec![y; count])
            } else {
                (bool_rows(&mut r, count, d), bool_rows(&mut r, count, d))
            };
            let ctx = format!("family {f} draw {i} (count={count}, d={d}, l={l})");
            match f {
                0 | 4 => mix[f][usize::from(i % 2 == 0)] += 1, // constant-answer families
                1 | 2 | 3 => mix[f][usize::from(brute_max_dot(&u, &v) >= l)] += 1,
                5 => mix[f][usize::from(brute_min_ham(&u, &v) < l)] += 1,
                _ => {} // geo-stable-pair fixes its own threshold; counted below
            }
            match f {
                // Finding: the GS matching must realize the max inner product.
                0 => {
                    let inst = gen_finding_hardness(&u, &v).unwrap();
                    let best = brute_max_dot(&u, &v);
                    assert_eq!(inst.params.extremum, Some(best), "{ctx}");
                    for side in [Side::Men, Side::Women] {
                        let mu = gale_shapley(&inst.market, side).matching;
                        let achieved =
                            (0..count).any(|m| dot(&u[m], &v[mu.woman_of(m)]) == best);
                        assert!(achieved, "{ctx}: GS output misses the max pair");
                    }
                }
                // Verify-hardness: designated matching stable iff max < l.
                1 => {
                    let inst = gen_verify_hardness(&u, &v, l).unwrap();
                    let Designated::Matching(mu) = &inst.designated else {
                        panic!("{ctx}: wrong designated kind")
                    };
                    let stable = verify_brute(&inst.market, mu).unwrap().stable;
                    assert_eq!(stable, brute_max_dot(&u, &v) < l, "{ctx}");
                    assert_eq!(inst.oracle_answer, brute_max_dot(&u, &v) >= l, "{ctx}");
                }
                // Stable-pair: (m*, w*) in all stable matchings iff max >= l.
                2 | 3 => {
                    let co = f == 3;
                    let inst = if co {
                        gen_stable_pair_co(&u, &v, l).unwrap()
                    } else {
                        gen_stable_pair(&u, &v, l).unwrap()
                    };
                    let Designated::Pair(m, w) = inst.designated else {
                        panic!("{ctx}: wrong designated kind")
                    };
                    let threshold = brute_max_dot(&u, &v) >= l;
                    let expected = if co { !threshold } else { threshold };
                    let member = in_all_stable(&inst.market, m, w).unwrap();
                    assert_eq!(member, expected, "{ctx}");
                    if count <= 4 {
                        let all = enumerate_stable(&inst.market).unwrap();
                        assert!(!all.is_empty(), "{ctx}");
                        let in_every = all.iter().all(|mu| mu.woman_of(m) == w);
                        let in_some = in_some_stable(&inst.market, m, w).unwrap();
                        assert_eq!(in_every, expected, "{ctx}: enumeration cross-check");
                        assert_eq!(in_some, in_every, "{ctx}: all-or-nothing dichotomy");
                        enumerated += 1;
                    }
                }
                // Geo-finding: the GS matching realizes the min Hamming pair.
                4 => {
                    let inst = gen_geo_finding(&u, &v).unwrap();
                    let best = brute_min_ham(&u, &v);
                    assert_eq!(inst.params.extremum, Some(best), "{ctx}");
                    for side in [Side::Men, Side::Women] {
                        let mu = gale_shapley(&inst.market, side).matching;
                        let achieved =
                            (0..count).any(|m| ham(&u[m], &v[mu.woman_of(m)]) == best);
                        assert!(achieved, "{ctx}: GS output misses the min pair");
                    }
                }
                // Geo-verify: designated matching stable iff min Hamming >= l.
                5 => {
                    let inst = gen_geo_verify(&u, &v, l).unwrap();
                    let Designated::Matching(mu) = &inst.designated else {
                        panic!("{ctx}: wrong designated kind")
                    };
                    let stable = verify_brute(&inst.market, mu).unwrap().stable;
                    assert_eq!(stable, brute_min_ham(&u, &v) >= l, "{ctx}");
                }
                // Geo-stable-pair: membership iff min Hamming < its fixed
                // threshold (the co variant is the negation).
                6 | 7 => {
                    let co = f == 7;
                    let inst = gen_geo_stable_pair(&u, &v, co).unwrap();
                    let Designated::Pair(m, w) = inst.designated else {
                        panic!("{ctx}: wrong designated kind")
                    };
                    // The generator may pad vectors to even dimension; its
                    // recorded params are authoritative for the threshold.
                    let lt = inst.params.l.unwrap();
                    let threshold = brute_min_ham(&inst.params.u, &inst.params.v) < lt;
                    assert_eq!(threshold, brute_min_ham(&u, &v) < lt, "{ctx}: padding");
                    mix[f][usize::from(threshold)] += 1;
                    let expected = if co { !threshold } else { threshold };
                    let member = in_all_stable(&inst.market, m, w).unwrap();
                    assert_eq!(member, expected, "{ctx}");
                    if count <= 4 {
                        let all = enumerate_stable(&inst.market).unwrap();
                        assert!(!all.is_empty(), "{ctx}");
                        let in_every = all.iter().all(|mu| mu.woman_of(m) == w);
                        let in_some = in_some_stable(&inst.market, m, w).unwrap();
                        assert_eq!(in_every, expected, "{ctx}: enumeration cross-check");
                        assert_eq!(in_some, in_every, "{ctx}: all-or-nothing dichotomy");
                        enumerated += 1;
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    assert!(enumerated >= 100, "enumeration cross-checks ran {enumerated} times");
    for (f, counts) in mix.iter().enumerate() {
        assert!(
            counts[0] >= 10 && counts[1] >= 10,
            "family {f} answer mix too lopsided: {counts:?}"
        );
    }
    println!(
        "criterion 4 (reduction iff-theorems): PASS — 8 generators x {DRAWS} draws, \
         {enumerated} enumeration cross-checks, answer mixes {mix:?}, 0 violations, {} s",
        t0.elapsed().as_secs()
    );
}

#[test]
fn c5_geometry_exactness() {
    let _g = lock();
    let t0 = Instant::now();
    let mut ops = 0usize;
    for (di, d) in [1usize, 2, 3, 5].into_iter().enumerate() {
        // Halfspace-max index under interleaved queries and deletions.
        for trial in 0..8u64 {
            let mut r = rng(0xC5_0000 + (di as u64) * 100 + trial);
            let n = 120 + below(&mut r, 140);
            let lattice = coin(&mut r);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            if lattice {
                                below(&mut r, 5) as f64 - 2.0
                            } else {
                                signed(&mut r)
                            }
                        })
                        .collect()
                })
                .collect();
            let mut index = hmi_build(&points).unwrap();
            let mut alive = vec![true; n];
            while index.live_count() > 0 {
                let dir: Vec<f64> = match below(&mut r, 4) {
                    0 => vec![0.0; d],
                    1 => (0..d).map(|k| if k == below(&mut r, d) { 1.0 } else { 0.0 }).collect(),
                    _ => (0..d).map(|_| signed(&mut r)).collect(),
                };
                let got = index.query_max(&dir).unwrap();
                let oracle = (0..n)
                    .filter(|&p| alive[p])
                    .map(|p| (points[p].iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>(), p))
                    .fold(None::<(f64, usize)>, |acc, (s, p)| match acc {
                        Some((bs, bp)) if bs >= s => Some((bs, bp)),
                        _ => Some((s, p)),
                    })
                    .unwrap()
                    .1;
                assert_eq!(got, oracle, "query mismatch (d={d}, trial={trial})");
                ops += 1;
                let victim = if coin(&mut r) {
                    got
                } else {
                    let live: Vec<usize> = (0..n).filter(|&p| alive[p]).collect();
                    live[below(&mut r, live.len())]
                };
                index.delete(victim).unwrap();
                alive[victim] = false;
                assert!(index.delete(victim).is_err(), "double delete must fail");
                ops += 2;
            }
            assert!(index.query_max(&vec![1.0; d]).is_err(), "empty index must refuse");
            ops += 1;
        }
        // Range-emptiness index against a full scan.
        for trial in 0..6u64 {
            let mut r = rng(0xC5_8000 + (di as u64) * 100 + trial);
            let n = 150 + below(&mut r, 100);
            let lattice = coin(&mut r);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            if lattice {
                                below(&mut r, 5) as f64 - 2.0
                            } else {
                                signed(&mut r)
                            }
                        })
                        .collect()
                })
                .collect();
            let index = rei_build(&points).unwrap();
            for _ in 0..120 {
                let halfspace = |r: &mut ChaCha8Rng| -> Halfspace {
                    let normal: Vec<f64> = (0..d).map(|_| signed(r)).collect();
                    // Half the thresholds sit exactly on a sample point so the
                    // strict boundary rule is exercised.
                    let t = if coin(r) {
                        let p = &points[below(r, n)];
                        normal.iter().zip(p).map(|(a, b)| a * b).sum::<f64>()
                    } else {
                        signed(r)
                    };
                    Halfspace::new(normal, t)
                };
                let h1 = halfspace(&mut r);
                let h2 = halfspace(&mut r);
                let inside: Vec<usize> =
                    (0..n).filter(|&p| h1.contains(&points[p]) && h2.contains(&points[p])).collect();
                let witness = index.exists(&h1, &h2);
                assert_eq!(witness.is_some(), !inside.is_empty(), "existence (d={d})");
                if let Some(p) = witness {
                    assert!(inside.contains(&p), "witness must lie in the range (d={d})");
                    assert_eq!(index.exists(&h1, &h2), Some(p), "witness must be deterministic");
                }
                assert_eq!(index.count(&h1, &h2), inside.len(), "count (d={d})");
                ops += 2;
            }
        }
    }
    assert!(ops >= 10_000, "ran only {ops} checked operations");
    println!(
        "criterion 5 (geometric index exactness): PASS — {ops} checked operations over \
         d in {{1, 2, 3, 5}}, {} s",
        t0.elapsed().as_secs()
    );
}

#[test]
fn c6_scaling_slopes() {
    let _g = lock();
    let t0 = Instant::now();
    const REPS: usize = 5;
    // Each timed call is preceded by one untimed call on the same input, so
    // the medians measure the algorithms rather than first-touch page faults
    // and cold allocator paths.

    // (a) verify_list, d = 4, n = 2^10 .. 2^14: near-linear.
    let ns_a: Vec<usize> = (10..=14).map(|k| 1usize << k).collect();
    let mut med_a = Vec::new();
    for (ni, &n) in ns_a.iter().enumerate() {
        let mut times = Vec::new();
        for rep in 0..REPS {
            let mut r = rng(0xC6_0A00 + (ni * REPS + rep) as u64);
            let market = list_market(&mut r, n, 4);
            let mu = gale_shapley(&market, Side::Men).matching;
            let Market::List(lm) = &market else { unreachable!() };
            verify_list(lm, &mu).unwrap();
            let rep = verify_list(lm, &mu).unwrap();
            assert!(rep.stable, "GS matchings are stable, so the verifier scans fully");
            times.push(rep.runtime_nanos);
        }
        med_a.push(median(times));
    }
    let slope_list = loglog_slope(&ns_a, &med_a);

    // (b) verify_attribute vs verify_brute, d = 2, n = 2^10 .. 2^13.
    let ns_b: Vec<usize> = (10..=13).map(|k| 1usize << k).collect();
    let (mut med_attr, mut med_brute) = (Vec::new(), Vec::new());
    for (ni, &n) in ns_b.iter().enumerate() {
        let (mut t_attr, mut t_brute) = (Vec::new(), Vec::new());
        for rep in 0..REPS {
            let mut r = rng(0xC6_0B00 + (ni * REPS + rep) as u64);
            let market = attribute_market(&mut r, n, 2);
            let mu = gale_shapley(&market, Side::Men).matching;
            let Market::Attribute(am) = &market else { unreachable!() };
            verify_attribute(am, &mu).unwrap();
            let fast = verify_attribute(am, &mu).unwrap();
            assert!(fast.stable);
            t_attr.push(fast.runtime_nanos);
            verify_brute(&market, &mu).unwrap();
            let brute = verify_brute(&market, &mu).unwrap();
            assert!(brute.stable);
            t_brute.push(brute.runtime_nanos);
        }
        med_attr.push(median(t_attr));
        med_brute.push(median(t_brute));
    }
    let slope_attr = loglog_slope(&ns_b, &med_attr);
    let slope_brute = loglog_slope(&ns_b, &med_brute);

    // (c) verify_single_peaked over the same grid: near n log n.
    let mut med_sp = Vec::new();
    for (ni, &n) in ns_b.iter().enumerate() {
        let mut times = Vec::new();
        for rep in 0..REPS {
            let mut r = rng(0xC6_0C00 + (ni * REPS + rep) as u64);
            let market = distance_single_peaked(&mut r, n);
            let mu = gale_shapley(&market, Side::Men).matching;
            let Market::SinglePeaked(spm) = &market else { unreachable!() };
            verify_single_peaked(spm, &mu).unwrap();
            let rep = verify_single_peaked(spm, &mu).unwrap();
            assert!(rep.stable);
            times.push(rep.runtime_nanos);
        }
        med_sp.push(median(times));
    }
    let slope_sp = loglog_slope(&ns_b, &med_sp);

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(600), "budget exceeded: {elapsed:?} >= 10 min");
    assert!(slope_list <= 1.15, "verify_list slope {slope_list:.3} > 1.15 (medians {med_a:?})");
    assert!(slope_attr <= 1.9, "verify_attribute slope {slope_attr:.3} > 1.9 ({med_attr:?})");
    assert!(slope_brute >= 1.9, "verify_brute slope {slope_brute:.3} < 1.9 ({med_brute:?})");
    assert!(slope_sp <= 1.2, "verify_single_peaked slope {slope_sp:.3} > 1.2 ({med_sp:?})");
    println!(
        "criterion 6 (scaling slopes): PASS — verify_list {slope_list:.3} <= 1.15, \
         verify_attribute {slope_attr:.3} <= 1.9, verify_brute {slope_brute:.3} >= 1.9, \
         verify_single_peaked {slope_sp:.3} <= 1.2 (medians of {REPS} reps, {} s)",
        elapsed.as_secs()
    );
}

#[test]
fn c7_lifting_correctness() {
    let _g = lock();
    let t0 = Instant::now();
    const MARKETS: usize = 100;
    let mut triples = 0u64;
    for i in 0..MARKETS {
        let mut r = rng(0xC7_0000 + i as u64);
        let n = 1 + below(&mut r, 64);
        let d = 1 + below(&mut r, 3);
        let mut gm = geometric_market(&mut r, n, d);
        if coin(&mut r) {
            // Integer lattice coordinates force exact distance ties, the
            // regime where the lift must agree tie-for-tie.
            for rows in [&mut gm.men_loc, &mut gm.men_ideal, &mut gm.women_loc, &mut gm.women_ideal]
            {
                for row in rows.iter_mut() {
                    for x in row.iter_mut() {
                        *x = (below(&mut r, 7) as f64) - 3.0;
                    }
                }
            }
        }
        let geo = Market::Geometric(gm.clone());
        let lifted = Market::Attribute(lift_geometric(&gm));
        for side in [Side::Men, Side::Women] {
            for chooser in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        if a == b {
                            continue;
                        }
                        assert_eq!(
                            geo.prefers(side, chooser, a, b).unwrap(),
                            lifted.prefers(side, chooser, a, b).unwrap(),
                            "market {i}, side {side:?}, chooser {chooser}, ({a}, {b})"
                        );
                        triples += 1;
                    }
                }
            }
        }
    }
    println!(
        "criterion 7 (lifting correctness): PASS — {MARKETS} markets, {triples} ordered \
         comparisons, 0 mismatches, {} s",
        t0.elapsed().as_secs()
    );
}

#[test]
fn c8_cli_contract() {
    let _g = lock();
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_matchkit");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let run = |args: &[&str]| -> (i32, String) {
        let out = std::process::Command::new(bin).args(args).output().expect("binary runs");
        (out.status.code().expect("no signal"), String::from_utf8(out.stdout).unwrap())
    };

    // Determinism: byte-identical generation for a fixed seed.
    let (c, first) = run(&["gen", "--model", "geometric", "--n", "10", "--d", "2", "--seed", "11"]);
    assert_eq!(c, 0);
    let (_, second) = run(&["gen", "--model", "geometric", "--n", "10", "--d", "2", "--seed", "11"]);
    assert_eq!(first, second, "gen must be reproducible");
    let (_, other) = run(&["gen", "--model", "geometric", "--n", "10", "--d", "2", "--seed", "12"]);
    assert_ne!(first, other, "gen must respect the seed");

    // Round-trip: the generated file parses to a market that reserializes to
    // the same bytes, and the solved matching verifies stable (exit 0).
    let inst = path("inst.json");
    std::fs::write(&inst, &first).unwrap();
    let market = Market::from_instance_str(&first).unwrap();
    assert_eq!(market.to_instance_string() + "\n", first, "serialization round-trip");
    let mu_path = path("mu.json");
    let (c, _) = run(&["solve", &inst, "--algo", "gs-men", "--quiet", "--out", &mu_path]);
    assert_eq!(c, 0);
    let mu = Matching::from_json_str(&std::fs::read_to_string(&mu_path).unwrap()).unwrap();
    assert!(verify_brute(&market, &mu).unwrap().stable, "solved matching is stable in-process");
    for algo in ["geometric", "brute"] {
        let (c, text) = run(&["verify", &inst, &mu_path, "--algo", algo, "--quiet"]);
        assert_eq!((c, text.as_str()), (0, "stable\n"), "{algo}");
    }

    // Exit 1 plus a genuine witness on an unstable matching.
    let fx = path("fixture.json");
    assert_eq!(run(&["gen", "--fixture", "two_list_no_top", "--out", &fx]).0, 0);
    let bad = path("bad.json");
    std::fs::write(&bad, "{\"pairs\": [0, 1, 2, 3, 4]}").unwrap();
    let (c, text) = run(&["verify", &fx, &bad, "--algo", "list", "--quiet"]);
    assert_eq!(c, 1);
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[0], "unstable");
    let (m, w): (usize, usize) = (fields[1].parse().unwrap(), fields[2].parse().unwrap());
    let fxm = Market::from_instance_str(&std::fs::read_to_string(&fx).unwrap()).unwrap();
    let idmu = Matching::new(vec![0, 1, 2, 3, 4]).unwrap();
    assert!(fxm.prefers(Side::Men, m, w, idmu.woman_of(m)).unwrap());
    assert!(fxm.prefers(Side::Women, w, m, idmu.inverse()[w]).unwrap());

    // Pair membership: exit 0 yes / 1 no / 2 over the enumeration limit.
    let greedy = path("greedy.json");
    assert_eq!(run(&["gen", "--fixture", "two_list_greedy", "--out", &greedy]).0, 0);
    assert_eq!(run(&["pair", &greedy, "0", "2", "--mode", "all"]), (0, "yes\n".into()));
    assert_eq!(run(&["pair", &greedy, "0", "0", "--mode", "some"]), (1, "no\n".into()));
    let big = path("big.json");
    assert_eq!(run(&["gen", "--model", "explicit", "--n", "12", "--seed", "1", "--out", &big]).0, 0);
    assert_eq!(run(&["pair", &big, "0", "0", "--mode", "some"]).0, 2);

    // Bench: exact header, sorted rows, reproducible modulo runtimes.
    let cfg = path("bench.json");
    std::fs::write(
        &cfg,
        r#"[{"model":"list","n":[16,8],"d":[2],"algorithms":["gs-men","verify-list"],
            "repetitions":2,"seed":6,"oracle_check":1.0}]"#,
    )
    .unwrap();
    let (c, csv_a) = run(&["bench", &cfg]);
    assert_eq!(c, 0);
    let (_, csv_b) = run(&["bench", &cfg]);
    let strip = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|line| {
                let mut cols: Vec<&str> = line.split(',').collect();
                if cols.len() == 9 && cols[6] != "runtime_nanos" {
                    cols[6] = "-";
                }
                cols.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&csv_a), strip(&csv_b), "bench must be reproducible modulo runtimes");
    let lines: Vec<&str> = csv_a.lines().collect();
    assert_eq!(
        lines[0],
        "instance_id,model,n,d,algorithm,seed,runtime_nanos,verdict_or_hash,oracle_checked"
    );
    assert_eq!(lines.len(), 9, "2 sizes x 2 algorithms x 2 repetitions plus header");
    let keys: Vec<Vec<String>> = lines[1..]
        .iter()
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .map(|c| vec![c[1].clone(), format!("{:0>8}", c[2]), c[4].clone(), c[5].clone()])
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted, "rows sorted by (model, n, d, algorithm, seed)");
    std::fs::write(
        &cfg,
        r#"[{"model":"list","n":[4],"d":[2],"algorithms":["gs-men"],"repetitions":0,"seed":0}]"#,
    )
    .unwrap();
    let (c, header_only) = run(&["bench", &cfg]);
    assert_eq!((c, header_only.trim_end()), (0, lines[0]), "zero repetitions");

    // Usage and parse failures exit 2.
    assert_eq!(run(&["solve", &inst, "--algo", "one-sided"]).0, 2);
    assert_eq!(run(&["gen", "--model", "nonsense"]).0, 2);
    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(run(&["bench", &cfg]).0, 2);

    println!(
        "criterion 8 (CLI contract): PASS — gen/solve/verify/pair/bench exercised end to end, \
         determinism and exit codes hold, {} ms",
        t0.elapsed().as_millis()
    );
}
