//! Stability verification: a brute-force oracle plus specialized verifiers
//! for each succinct preference model.
//!
//! A matching is *weakly stable* when no man and woman both strictly prefer
//! each other to their assigned partners. [`verify_brute`] checks all n²
//! pairs directly and is the reference oracle. The specialized verifiers
//! reach the same verdict faster:
//!
//! * [`verify_attribute`] — partitions women into classes by the position and
//!   sign of their last nonzero weight, normalizes each woman's weight vector
//!   so that entry is ±1, and reduces blocking-pair existence per man to a
//!   two-halfspace emptiness query over the class's point set.
//! * [`verify_list`] — for list markets, one two-pointer sweep per ordered
//!   pair of preference lists; O(dn + d²) total.
//! * [`verify_single_peaked`] — computes, per participant, the contiguous
//!   interval of candidates strictly preferred to the assigned partner (two
//!   binary searches around the peak), then sweeps women left to right with
//!   an ordered set of currently interested men.
//! * [`verify_geometric`] — lifts the geometric market to an attribute market
//!   (preserving all strict preferences) and delegates to
//!   [`verify_attribute`].
//! * [`verify_boolean_bitset`] — for boolean attribute markets, packs rows
//!   into machine words so a pair check is a handful of masked popcounts.
//!
//! Floating-point caveat: the attribute verifier evaluates the women's side
//! of each pair check in *normalized* coordinates (weights divided by the
//! last nonzero entry's magnitude). On values that are exactly tied — or tied
//! to within about one part in 10¹⁵ — that rescaled comparison can round
//! differently from the brute-force oracle's unscaled one. Every *witness* is
//! rechecked against the unscaled definition before being reported, so
//! reported blocking pairs are always genuine; only the stable/unstable
//! verdict on adversarially near-tied inputs can differ from [`verify_brute`].
//! The other verifiers compare the exact same floating-point quantities as
//! the oracle and agree with it bit-for-bit.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{rei_build, Halfspace};
use crate::prefs::{
    dot, lift_geometric, AttributeMarket, GeometricMarket, ListMarket, Market,
    Matching, PeakRelation, PrefScorer, Side, SinglePeakedMarket,
};

/// Outcome of a verification run.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// True iff no blocking pair exists (equivalently, `witness` is `None`).
    pub stable: bool,
    /// A genuine blocking pair `(man, woman)` when one was found.
    pub witness: Option<(usize, usize)>,
    /// Number of pair checks / comparator calls / index queries issued.
    pub comparisons: u64,
    /// Wall-clock time of the verification, in nanoseconds.
    pub runtime_nanos: u64,
}

impl VerifyReport {
    fn finish(witness: Option<(usize, usize)>, comparisons: u64, start: Instant) -> VerifyReport {
        VerifyReport {
            stable: witness.is_none(),
            witness,
            comparisons,
            runtime_nanos: start.elapsed().as_nanos() as u64,
        }
    }
}

/// Reference oracle: scan all n² pairs.
///
/// The witness, when present, is the lexicographically smallest blocking pair
/// in (man, woman) order.
pub fn verify_brute(market: &Market, mu: &Matching) -> Result<VerifyReport> {
    mu.check_for(market.n())?;
    let start = Instant::now();
    let n = market.n();
    let men = PrefScorer::new(market, Side::Men);
    let women = PrefScorer::new(market, Side::Women);
    let inv = mu.inverse();
    let base_m: Vec<f64> = (0..n).map(|m| men.score(m, mu.pairs[m])).collect();
    let base_w: Vec<f64> = (0..n).map(|w| women.score(w, inv[w])).collect();
    let mut comparisons = 0u64;
    let mut witness = None;
    'scan: for m in 0..n {
        for w in 0..n {
            comparisons += 1;
            if men.score(m, w) < base_m[m] && women.score(w, m) < base_w[w] {
                witness = Some((m, w));
                break 'scan;
            }
        }
    }
    Ok(VerifyReport::finish(witness, comparisons, start))
}

/// True iff (m, w) is a blocking pair of `mu` under the plain dot-product
/// definition (no normalization).
fn attribute_blocking(am: &AttributeMarket, mu: &Matching, inv: &[usize], m: usize, w: usize) -> bool {
    let better_for_m = dot(&am.men_weights[m], &am.women_attrs[w])
        > dot(&am.men_weights[m], &am.women_attrs[mu.pairs[m]]);
    let better_for_w = dot(&am.women_weights[w], &am.men_attrs[m])
        > dot(&am.women_weights[w], &am.men_attrs[inv[w]]);
    better_for_m && better_for_w
}

/// Range-search verifier for attribute markets.
///
/// Women are grouped into classes by `(d′, s)` where `d′` is the index (1-
/// based) of the last nonzero entry of the woman's weight vector and `s` its
/// sign; all-zero-weight women can never strictly prefer anyone and are
/// skipped. Within a class each woman becomes the point
/// `(A(w), β₁..β_{d′−1}, val^β_w(μ(w)))` where β is her weight vector divided
/// by |α_{d′}(w)| and `val^β` is her partner's value under β. For every man
/// two halfspaces then express "m strictly prefers w" and "w strictly prefers
/// m", and a blocking pair with this class exists iff their intersection
/// contains a class point.
pub fn verify_attribute(am: &AttributeMarket, mu: &Matching) -> Result<VerifyReport> {
    mu.check_for(am.n)?;
    let start = Instant::now();
    let n = am.n;
    let d = am.d;
    let inv = mu.inverse();
    let mut comparisons = 0u64;

    // classes[(d′−1)·2 + (s>0)] = women with that last-nonzero position and sign.
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); 2 * d];
    for w in 0..n {
        if let Some(last) = am.women_weights[w].iter().rposition(|&x| x != 0.0) {
            let s_pos = am.women_weights[w][last] > 0.0;
            classes[last * 2 + usize::from(s_pos)].push(w);
        }
    }

    for dprime in 1..=d {
        for s_pos in [false, true] {
            let members = &classes[(dprime - 1) * 2 + usize::from(s_pos)];
            if members.is_empty() {
                continue;
            }
            let s = if s_pos { 1.0 } else { -1.0 };
            let pdim = d + dprime;
            let mut points = Vec::with_capacity(members.len());
            for &w in members {
                let scale = am.women_weights[w][dprime - 1].abs();
                let beta: Vec<f64> = am.women_weights[w].iter().map(|x| x / scale).collect();
                let z = dot(&beta, &am.men_attrs[inv[w]]);
                let mut p = Vec::with_capacity(pdim);
                p.extend_from_slice(&am.women_attrs[w]);
                p.extend_from_slice(&beta[..dprime - 1]);
                p.push(z);
                points.push(p);
            }
            let index = rei_build(&points)?;
            for m in 0..n {
                comparisons += 1;
                // H1: ⟨α(m), A(w)⟩ > val_m(μ(m))  — m strictly prefers w.
                let mut n1 = vec![0.0; pdim];
                n1[..d].copy_from_slice(&am.men_weights[m]);
                let h1 = Halfspace::new(
                    n1,
                    dot(&am.men_weights[m], &am.women_attrs[mu.pairs[m]]),
                );
                // H2: Σ_{i<d′} A_i(m)·β_i − z > −s·A_{d′}(m)  — w strictly
                // prefers m, in w's normalized coordinates.
                let mut n2 = vec![0.0; pdim];
                n2[d..d + dprime - 1].copy_from_slice(&am.men_attrs[m][..dprime - 1]);
                n2[pdim - 1] = -1.0;
                let h2 = Halfspace::new(n2, -s * am.men_attrs[m][dprime - 1]);
                if index.exists(&h1, &h2).is_some() {
                    // Recheck under the unscaled definition; on the off
                    // chance normalization rounding promoted a near-tie,
                    // fall back to scanning the class.
                    for &w in members.iter() {
                        if attribute_blocking(am, mu, &inv, m, w) {
                            return Ok(VerifyReport::finish(Some((m, w)), comparisons, start));
                        }
                    }
                }
            }
        }
    }
    Ok(VerifyReport::finish(None, comparisons, start))
}

/// Two-pointer sweep verifier for list markets; O(dn + d²).
///
/// For each ordered pair of lists (πᵢ, σⱼ) the sweep walks the women using σⱼ
/// in πᵢ-order and the men using πᵢ in σⱼ-order. When the current woman is
/// not strictly better than the current man's partner she can block with no
/// remaining man either (they are all worse for her), so the man advances —
/// and symmetrically for the woman. Note the comparisons are non-strict: a
/// participant's own partner (equal rank) must not count as an improvement,
/// otherwise a matched pair would be reported as blocking.
pub fn verify_list(lm: &ListMarket, mu: &Matching) -> Result<VerifyReport> {
    mu.check_for(lm.n)?;
    let start = Instant::now();
    let n = lm.n;
    let d = lm.d;
    debug_assert!(n <= u32::MAX as usize);

    // Inverse matching, inv[w] = the man matched to w.
    let mut inv = vec![0u32; n];
    for (m, &w) in mu.pairs.iter().enumerate() {
        inv[w] = m as u32;
    }

    // Partner ranks, each in the owner's chosen list: pr_m[m] is the
    // position of μ(m) in the list m uses, pr_w[w] symmetrically. One
    // sequential sweep per list fills them without materializing full
    // n × d rank tables, which would dominate the memory traffic.
    let mut pr_m = vec![0u32; n];
    for i in 0..d {
        for (pos, &w) in lm.women_orders[i].iter().enumerate() {
            let m = inv[w] as usize;
            if lm.men_choice[m] == i {
                pr_m[m] = pos as u32;
            }
        }
    }
    let mut pr_w = vec![0u32; n];
    for j in 0..d {
        for (pos, &m) in lm.men_orders[j].iter().enumerate() {
            let w = mu.pairs[m];
            if lm.women_choice[w] == j {
                pr_w[w] = pos as u32;
            }
        }
    }

    // Bucket every list by the adopters on the opposite side:
    // women_by[i][j] holds (position in πᵢ, partner rank, w) for the women
    // adopting σⱼ, ascending in πᵢ; men_by[j][i] symmetrically. The (i, j)
    // merges below then stream packed arrays front to back — the same walk a
    // per-id linked structure would do, but without chasing data-dependent
    // pointers through n-sized tables, which is what keeps the scan linear
    // in memory traffic as well as in steps.
    // Every list contains every participant once, so bucket (i, j) always
    // holds exactly the adopters of j (resp. i); reserving that up front
    // makes the builds single-pass appends.
    let mut cnt_w = vec![0usize; d];
    for &c in &lm.women_choice {
        cnt_w[c] += 1;
    }
    let mut cnt_m = vec![0usize; d];
    for &c in &lm.men_choice {
        cnt_m[c] += 1;
    }
    let mut women_by: Vec<Vec<Vec<(u32, u32, u32)>>> = (0..d)
        .map(|_| cnt_w.iter().map(|&c| Vec::with_capacity(c)).collect())
        .collect();
    for i in 0..d {
        for (pos, &w) in lm.women_orders[i].iter().enumerate() {
            women_by[i][lm.women_choice[w]].push((pos as u32, pr_w[w], w as u32));
        }
    }
    let mut men_by: Vec<Vec<Vec<(u32, u32, u32)>>> = (0..d)
        .map(|_| cnt_m.iter().map(|&c| Vec::with_capacity(c)).collect())
        .collect();
    for j in 0..d {
        for (pos, &m) in lm.men_orders[j].iter().enumerate() {
            men_by[j][lm.men_choice[m]].push((pos as u32, pr_m[m], m as u32));
        }
    }

    let mut comparisons = 0u64;
    for i in 0..d {
        for j in 0..d {
            // Men adopting πᵢ in σⱼ order against women adopting σⱼ in πᵢ
            // order. The current woman is the best remaining one for every
            // remaining man and vice versa, so each comparison retires a
            // man or a woman for good.
            let men = &men_by[j][i];
            let women = &women_by[i][j];
            let (mut a, mut b) = (0, 0);
            while a < men.len() && b < women.len() {
                comparisons += 1;
                let (m_rank, m_partner, m) = men[a];
                let (w_rank, w_partner, w) = women[b];
                if w_rank >= m_partner {
                    a += 1;
                } else if m_rank >= w_partner {
                    b += 1;
                } else {
                    return Ok(VerifyReport::finish(
                        Some((m as usize, w as usize)),
                        comparisons,
                        start,
                    ));
                }
            }
        }
    }
    Ok(VerifyReport::finish(None, comparisons, start))
}

/// First index in [lo, hi) where `pred` is false; `pred` must hold on a
/// (possibly empty) prefix of the range.
fn bisect(mut lo: usize, mut hi: usize, mut pred: impl FnMut(usize) -> bool, count: &mut u64) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        *count += 1;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn interval_counted(
    spm: &SinglePeakedMarket,
    side: Side,
    chooser: usize,
    reference: usize,
    count: &mut u64,
) -> Result<Option<(usize, usize)>> {
    let n = spm.n;
    if chooser >= n {
        return Err(Error::IndexOutOfRange { what: "chooser", index: chooser, size: n });
    }
    if reference >= n {
        return Err(Error::IndexOutOfRange { what: "reference", index: reference, size: n });
    }
    let (s, t) = match spm.relation {
        PeakRelation::Distance => {
            let (q, pos) = match side {
                Side::Men => (spm.men_ideal[chooser], &spm.women_pos),
                Side::Women => (spm.women_ideal[chooser], &spm.men_pos),
            };
            let rd = (q - pos[reference]).abs();
            // Candidates are sorted by position, so distance to q falls
            // monotonically up to q's insertion point and rises after it;
            // both flanks admit binary search with the exact comparator.
            let ip = bisect(0, n, |c| pos[c] < q, count);
            let s = bisect(0, ip, |c| !((q - pos[c]).abs() < rd), count);
            let t = bisect(ip, n, |c| (q - pos[c]).abs() < rd, count);
            (s, t)
        }
        PeakRelation::Custom => {
            let rank = match side {
                Side::Men => spm.men_rank.as_ref(),
                Side::Women => spm.women_rank.as_ref(),
            }
            .expect("validated custom relation carries rank rows");
            let rnk = &rank[chooser];
            let rr = rnk[reference];
            let peak = bisect(0, n - 1, |c| rnk[c] > rnk[c + 1], count);
            let s = bisect(0, peak, |c| rnk[c] >= rr, count);
            let t = bisect(peak, n, |c| rnk[c] < rr, count);
            (s, t)
        }
    };
    Ok(if s == t { None } else { Some((s, t - 1)) })
}

/// The contiguous range of candidates `chooser` strictly prefers to
/// `reference`, as an inclusive index interval over the opposite side
/// (women when `side` is men, men when `side` is women), or `None` when
/// `reference` is already the chooser's top choice.
///
/// Cost: O(log n) comparator evaluations.
pub fn strict_preference_interval(
    spm: &SinglePeakedMarket,
    side: Side,
    chooser: usize,
    reference: usize,
) -> Result<Option<(usize, usize)>> {
    let mut count = 0u64;
    interval_counted(spm, side, chooser, reference, &mut count)
}

/// Sweep verifier for single-peaked markets; O(n log n).
///
/// Every man's strict-preference set against his partner is a contiguous
/// interval of women (in position order), and symmetrically for women. The
/// sweep visits women left to right, keeping the set of men whose interval
/// covers the current woman; the woman then asks whether any of those men
/// lies inside *her* interval over men.
pub fn verify_single_peaked(spm: &SinglePeakedMarket, mu: &Matching) -> Result<VerifyReport> {
    mu.check_for(spm.n)?;
    let start = Instant::now();
    let n = spm.n;
    let inv = mu.inverse();
    let mut comparisons = 0u64;

    let mut begin: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut end: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in 0..n {
        if let Some((s, t)) = interval_counted(spm, Side::Men, m, mu.pairs[m], &mut comparisons)? {
            begin[s].push(m);
            end[t].push(m);
        }
    }

    let mut active: BTreeSet<usize> = BTreeSet::new();
    let mut witness = None;
    'sweep: for w in 0..n {
        for &m in &begin[w] {
            active.insert(m);
        }
        if !active.is_empty() {
            if let Some((ms, mt)) = interval_counted(spm, Side::Women, w, inv[w], &mut comparisons)? {
                comparisons += 1;
                if let Some(&m) = active.range(ms..=mt).next() {
                    witness = Some((m, w));
                    break 'sweep;
                }
            }
        }
        for &m in &end[w] {
            active.remove(&m);
        }
    }
    Ok(VerifyReport::finish(witness, comparisons, start))
}

/// Geometric verifier: lift to an attribute market and delegate.
///
/// The lift maps a squared-distance comparison to an equal-verdict dot-
/// product comparison, so the verdict contract is identical to
/// [`verify_attribute`] on the lifted market.
pub fn verify_geometric(gm: &GeometricMarket, mu: &Matching) -> Result<VerifyReport> {
    let start = Instant::now();
    let lifted = lift_geometric(gm);
    let mut report = verify_attribute(&lifted, mu)?;
    report.runtime_nanos = start.elapsed().as_nanos() as u64;
    Ok(report)
}

/// Bit-parallel exact verifier for boolean attribute markets (d ≤ 4096).
///
/// Attribute and weight rows are packed into 64-bit words; a value is a
/// masked popcount and a pair check is two integer comparisons, so the
/// verdict is exact and matches [`verify_brute`] bit-for-bit. The witness is
/// the lexicographically smallest blocking pair.
pub fn verify_boolean_bitset(am: &AttributeMarket, mu: &Matching) -> Result<VerifyReport> {
    mu.check_for(am.n)?;
    let start = Instant::now();
    if am.d > 4096 {
        return Err(Error::DimensionMismatch(format!(
            "boolean bitset verifier supports d <= 4096, got d = {}",
            am.d
        )));
    }
    let sides: [(&'static str, &Vec<Vec<f64>>); 4] = [
        ("men_attrs", &am.men_attrs),
        ("men_weights", &am.men_weights),
        ("women_attrs", &am.women_attrs),
        ("women_weights", &am.women_weights),
    ];
    for (name, mat) in sides {
        for (row, r) in mat.iter().enumerate() {
            for (col, &x) in r.iter().enumerate() {
                if x != 0.0 && x != 1.0 {
                    return Err(Error::NonBooleanEntry { side: name, row, col, value: x });
                }
            }
        }
    }

    let words = am.d.div_ceil(64).max(1);
    let pack = |mat: &[Vec<f64>]| -> Vec<Vec<u64>> {
        mat.iter()
            .map(|row| {
                let mut bits = vec![0u64; words];
                for (j, &x) in row.iter().enumerate() {
                    if x == 1.0 {
                        bits[j / 64] |= 1u64 << (j % 64);
                    }
                }
                bits
            })
            .collect()
    };
    let ma = pack(&am.men_attrs);
    let mw = pack(&am.men_weights);
    let wa = pack(&am.women_attrs);
    let ww = pack(&am.women_weights);
    let popdot =
        |a: &[u64], b: &[u64]| -> u32 { a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum() };

    let n = am.n;
    let inv = mu.inverse();
    let base_m: Vec<u32> = (0..n).map(|m| popdot(&mw[m], &wa[mu.pairs[m]])).collect();
    let base_w: Vec<u32> = (0..n).map(|w| popdot(&ww[w], &ma[inv[w]])).collect();
    let mut comparisons = 0u64;
    let mut witness = None;
    'scan: for m in 0..n {
        for w in 0..n {
            comparisons += 1;
            if popdot(&mw[m], &wa[w]) > base_m[m] && popdot(&ww[w], &ma[m]) > base_w[w] {
                witness = Some((m, w));
                break 'scan;
            }
        }
    }
    Ok(VerifyReport::finish(witness, comparisons, start))
}
