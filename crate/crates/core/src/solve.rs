//! Algorithms that find a weakly stable matching.
//!
//! Three solvers live here:
//!
//! * [`gale_shapley`] — the deferred-acceptance baseline. It works on every
//!   market model and yields the proposer-optimal stable matching under the
//!   index-refined preference order (ties broken toward smaller indices on
//!   both sides).
//! * [`find_small_universe`] — many-to-one deferred acceptance over woman
//!   *types* for attribute markets whose women's attribute and weight entries
//!   all come from a small value universe. Women with identical
//!   (attributes, weights) rows are interchangeable, so they are grouped into
//!   one capacity-|group| slot keyed by a min-heap of tentatively held men.
//! * [`find_one_sided`] — the greedy algorithm for one-sided attribute
//!   markets, where every woman ranks men by a single shared attribute (up to
//!   sign). Positive-sign women are served by the top men, negative-sign women
//!   by the bottom men, and each man grabs his argmax woman via a
//!   maximum-inner-product index with deletions.
//!
//! All solvers are deterministic: every tie is broken by ascending index, and
//! cardinal scores are compared exactly (no epsilons), so a given market maps
//! to exactly one output matching.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::hmi_build;
use crate::prefs::{dot, AttributeMarket, Market, Matching, OneSidedMarket, PeakRelation, PrefScorer, Side};

/// Outcome of a solver run: the matching plus cheap provenance counters.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// The computed weakly stable matching (`pairs[m] = w`).
    pub matching: Matching,
    /// Number of proposals (or argmax queries) issued.
    pub proposals: u64,
    /// Wall-clock time of the solve, in nanoseconds.
    pub runtime_nanos: u64,
    /// Name of the algorithm that produced the matching.
    pub algorithm: String,
}

/// How many candidates a buffered proposer pre-ranks per refill.
const PROPOSAL_BUFFER: usize = 64;

/// Iterator over one side's preference lists, best candidate first, without
/// ever materializing all `n` lists at once for cardinal models.
enum ProposerQueue<'a> {
    /// List markets: each proposer walks a shared permutation.
    Shared {
        orders: &'a [Vec<usize>],
        choice: &'a [usize],
        cursor: Vec<usize>,
    },
    /// Explicit rank rows (explicit markets and custom single-peaked
    /// relations): each proposer owns a fully materialized list.
    Rows { rows: Vec<Vec<usize>>, cursor: Vec<usize> },
    /// Single-peaked distance relation: two cursors walk outward from the
    /// insertion point of the proposer's ideal among the candidate positions.
    Peaked {
        ideal: &'a [f64],
        pos: &'a [f64],
        left: Vec<isize>,
        right: Vec<usize>,
    },
    /// Cardinal models: keep only the next `PROPOSAL_BUFFER` best candidates
    /// per proposer and re-scan to refill, so memory stays O(n · buffer).
    Buffered {
        scorer: PrefScorer<'a>,
        n: usize,
        buf: Vec<Vec<(f64, usize)>>,
        pos: Vec<usize>,
        exhausted: Vec<bool>,
    },
}

impl<'a> ProposerQueue<'a> {
    fn new(market: &'a Market, proposing: Side) -> ProposerQueue<'a> {
        let n = market.n();
        match (market, proposing) {
            (Market::List(m), Side::Men) => ProposerQueue::Shared {
                orders: &m.women_orders,
                choice: &m.men_choice,
                cursor: vec![0; n],
            },
            (Market::List(m), Side::Women) => ProposerQueue::Shared {
                orders: &m.men_orders,
                choice: &m.women_choice,
                cursor: vec![0; n],
            },
            (Market::Explicit(m), Side::Men) => ProposerQueue::rows_from_ranks(&m.men_rank),
            (Market::Explicit(m), Side::Women) => ProposerQueue::rows_from_ranks(&m.women_rank),
            (Market::SinglePeaked(m), side) => match m.relation {
                PeakRelation::Distance => {
                    let (ideal, pos) = match side {
                        Side::Men => (&m.men_ideal[..], &m.women_pos[..]),
                        Side::Women => (&m.women_ideal[..], &m.men_pos[..]),
                    };
                    let mut left = Vec::with_capacity(n);
                    let mut right = Vec::with_capacity(n);
                    for &q in ideal {
                        let ip = pos.partition_point(|&p| p < q);
                        left.push(ip as isize - 1);
                        right.push(ip);
                    }
                    ProposerQueue::Peaked { ideal, pos, left, right }
                }
                PeakRelation::Custom => {
                    let rank = match side {
                        Side::Men => m.men_rank.as_ref(),
                        Side::Women => m.women_rank.as_ref(),
                    };
                    ProposerQueue::rows_from_ranks(rank.expect("validated custom relation"))
                }
            },
            (market, side) => ProposerQueue::Buffered {
                scorer: PrefScorer::new(market, side),
                n,
                buf: vec![Vec::new(); n],
                pos: vec![0; n],
                exhausted: vec![false; n],
            },
        }
    }

    fn rows_from_ranks(rank: &[Vec<usize>]) -> ProposerQueue<'static> {
        let n = rank.len();
        let mut rows = vec![vec![0usize; n]; n];
        for (p, rr) in rank.iter().enumerate() {
            for (candidate, &r) in rr.iter().enumerate() {
                rows[p][r] = candidate;
            }
        }
        ProposerQueue::Rows { rows, cursor: vec![0; n] }
    }

    /// Next not-yet-proposed candidate of proposer `p`, best first.
    fn next(&mut self, p: usize) -> Option<usize> {
        match self {
            ProposerQueue::Shared { orders, choice, cursor } => {
                let ord = &orders[choice[p]];
                let c = *ord.get(cursor[p])?;
                cursor[p] += 1;
                Some(c)
            }
            ProposerQueue::Rows { rows, cursor } => {
                let c = *rows[p].get(cursor[p])?;
                cursor[p] += 1;
                Some(c)
            }
            ProposerQueue::Peaked { ideal, pos, left, right } => {
                // On an exact distance tie the left candidate goes first: it
                // has the smaller index, matching the index-refined order.
                let q = ideal[p];
                let lc = usize::try_from(left[p]).ok();
                let rc = (right[p] < pos.len()).then_some(right[p]);
                let take_left = match (lc, rc) {
                    (None, None) => return None,
                    (Some(_), None) => true,
                    (None, Some(_)) => false,
                    (Some(lw), Some(rw)) => {
                        let dl = (q - pos[lw]).abs();
                        let dr = (q - pos[rw]).abs();
                        dl.total_cmp(&dr) != Ordering::Greater
                    }
                };
                if take_left {
                    left[p] -= 1;
                    lc
                } else {
                    right[p] += 1;
                    rc
                }
            }
            ProposerQueue::Buffered { scorer, n, buf, pos, exhausted } => {
                if exhausted[p] {
                    return None;
                }
                if pos[p] == buf[p].len() {
                    // Refill with the best PROPOSAL_BUFFER candidates that come
                    // strictly after the last consumed (score, index) key.
                    let last = buf[p].last().copied();
                    let mut cand: Vec<(f64, usize)> = Vec::new();
                    for c in 0..*n {
                        let s = scorer.score(p, c);
                        let fresh = match last {
                            None => true,
                            Some((ls, li)) => match s.total_cmp(&ls) {
                                Ordering::Greater => true,
                                Ordering::Equal => c > li,
                                Ordering::Less => false,
                            },
                        };
                        if fresh {
                            cand.push((s, c));
                        }
                    }
                    if cand.is_empty() {
                        exhausted[p] = true;
                        return None;
                    }
                    let by_key = |a: &(f64, usize), b: &(f64, usize)| {
                        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
                    };
                    let keep = PROPOSAL_BUFFER.min(cand.len());
                    if keep < cand.len() {
                        cand.select_nth_unstable_by(keep - 1, by_key);
                        cand.truncate(keep);
                    }
                    cand.sort_unstable_by(by_key);
                    buf[p] = cand;
                    pos[p] = 0;
                }
                let (_, c) = buf[p][pos[p]];
                pos[p] += 1;
                Some(c)
            }
        }
    }
}

/// Classic deferred acceptance on any market model.
///
/// Proposers walk their preference lists best-first; a receiver holds at most
/// one proposer and trades up whenever a strictly better one (or an equal one
/// with a smaller index) arrives. With `proposing = Side::Men` the result is
/// the man-optimal weakly stable matching under index tie-breaking; with
/// `Side::Women` the woman-optimal one. At most n² proposals are issued.
pub fn gale_shapley(market: &Market, proposing: Side) -> SolveReport {
    let start = Instant::now();
    let n = market.n();
    let mut queue = ProposerQueue::new(market, proposing);
    let receiver_scorer = PrefScorer::new(market, proposing.opposite());

    // partner[r] = proposer currently held by receiver r, with its score.
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut held_score: Vec<f64> = vec![0.0; n];
    let mut free: Vec<usize> = (0..n).rev().collect();
    let mut proposals: u64 = 0;

    while let Some(p) = free.pop() {
        let Some(c) = queue.next(p) else {
            // Unreachable in a complete market; a proposer that somehow runs
            // out of candidates simply stays unmatched.
            continue;
        };
        proposals += 1;
        let s = receiver_scorer.score(c, p);
        match partner[c] {
            None => {
                partner[c] = Some(p);
                held_score[c] = s;
            }
            Some(q) => {
                if s < held_score[c] || (s == held_score[c] && p < q) {
                    partner[c] = Some(p);
                    held_score[c] = s;
                    free.push(q);
                } else {
                    free.push(p);
                }
            }
        }
    }

    let mut pairs = vec![0usize; n];
    match proposing {
        Side::Men => {
            for (w, m) in partner.iter().enumerate() {
                pairs[m.expect("complete market leaves no receiver unmatched")] = w;
            }
        }
        Side::Women => {
            for (m, w) in partner.iter().enumerate() {
                pairs[m] = w.expect("complete market leaves no receiver unmatched");
            }
        }
    }

    SolveReport {
        matching: Matching { pairs },
        proposals,
        runtime_nanos: start.elapsed().as_nanos() as u64,
        algorithm: match proposing {
            Side::Men => "gs-men".to_string(),
            Side::Women => "gs-women".to_string(),
        },
    }
}

/// Eviction key for a type's heap of tentatively held men: the worst held man
/// is the one with the lowest value, ties broken toward the *larger* index so
/// that the surviving man on a tie is the smaller-indexed one.
struct EvictKey {
    val: f64,
    man: usize,
}

impl PartialEq for EvictKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for EvictKey {}
impl PartialOrd for EvictKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for EvictKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.val
            .total_cmp(&other.val)
            .then_with(|| other.man.cmp(&self.man))
    }
}

/// Deferred acceptance over woman types for attribute markets whose women's
/// attribute and weight entries all come from `value_universe`.
///
/// Women with bit-identical (attributes, weights) rows are interchangeable up
/// to index tie-breaking, so they form a single *type* with capacity equal to
/// the group size. Each man ranks the (at most C^2d, in practice at most n)
/// occupied types once, then proposes type-by-type; each type keeps a min-heap
/// of held men keyed by the type's valuation and evicts the worst man when
/// over capacity. Matched men are paired to their type's women in index
/// order. `value_universe` must be sorted, strictly increasing, and finite.
pub fn find_small_universe(am: &AttributeMarket, value_universe: &[f64]) -> Result<SolveReport> {
    let start = Instant::now();
    if value_universe.is_empty()
        || value_universe.iter().any(|v| !v.is_finite())
        || value_universe.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidMarket(
            "value universe must be a nonempty, finite, strictly increasing list".to_string(),
        ));
    }
    // Bitwise search first; the linear fallback only fires for signed-zero
    // mismatches (e.g. looking up -0.0 in a universe that stores +0.0).
    let in_universe = |x: f64| {
        value_universe.binary_search_by(|u| u.total_cmp(&x)).is_ok()
            || value_universe.iter().any(|&u| u == x)
    };
    for (w, row) in am.women_attrs.iter().enumerate() {
        if let Some(&bad) = row.iter().find(|&&x| !in_universe(x)) {
            return Err(Error::UniverseViolation { woman: w, kind: "attribute", value: bad });
        }
    }
    for (w, row) in am.women_weights.iter().enumerate() {
        if let Some(&bad) = row.iter().find(|&&x| !in_universe(x)) {
            return Err(Error::UniverseViolation { woman: w, kind: "weight", value: bad });
        }
    }

    let n = am.n;
    // Group women into types by exact (attributes, weights) row equality.
    let mut type_of = vec![0usize; n];
    let mut types: Vec<usize> = Vec::new(); // representative woman per type
    let mut members: Vec<Vec<usize>> = Vec::new();
    {
        let mut seen: std::collections::HashMap<Vec<u64>, usize> = std::collections::HashMap::new();
        for w in 0..n {
            let key: Vec<u64> = am.women_attrs[w]
                .iter()
                .chain(am.women_weights[w].iter())
                .map(|x| x.to_bits())
                .collect();
            let t = *seen.entry(key).or_insert_with(|| {
                types.push(w);
                members.push(Vec::new());
                types.len() - 1
            });
            type_of[w] = t;
            members[t].push(w);
        }
    }
    let tcount = types.len();

    // heaps[t]: men tentatively held by type t, worst man on top.
    let mut heaps: Vec<BinaryHeap<std::cmp::Reverse<EvictKey>>> =
        (0..tcount).map(|_| BinaryHeap::new()).collect();
    let mut proposals: u64 = 0;
    let mut free: Vec<(usize, usize)> = (0..n).rev().map(|m| (m, 0)).collect();
    // cursor_of[m] = position in m's type order of the type currently holding him.
    let mut cursor_of = vec![0usize; n];

    // Each man's preference order over types: value descending, then the
    // type's first-occurrence id ascending.
    let type_order: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|m| {
            let mut ord: Vec<(usize, f64)> = (0..tcount)
                .map(|t| (t, dot(&am.men_weights[m], &am.women_attrs[types[t]])))
                .collect();
            ord.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            ord
        })
        .collect();

    while let Some((m, next_t)) = free.pop() {
        let Some(&(t, _)) = type_order[m].get(next_t) else {
            continue; // exhausted: unreachable in a complete market
        };
        proposals += 1;
        let key = EvictKey { val: dot(&am.women_weights[types[t]], &am.men_attrs[m]), man: m };
        let cap = members[t].len();
        if heaps[t].len() < cap {
            heaps[t].push(std::cmp::Reverse(key));
            cursor_of[m] = next_t;
        } else {
            let worst = &heaps[t].peek().expect("nonempty heap at capacity").0;
            if key.cmp(worst) == Ordering::Greater {
                let evicted = heaps[t].pop().expect("nonempty heap").0.man;
                heaps[t].push(std::cmp::Reverse(key));
                cursor_of[m] = next_t;
                free.push((evicted, cursor_of[evicted] + 1));
            } else {
                free.push((m, next_t + 1));
            }
        }
    }

    // Pair each type's women (ascending index) with its held men (ascending
    // index) — any within-type pairing is stable, this one is deterministic.
    let mut pairs = vec![usize::MAX; n];
    for (t, heap) in heaps.into_iter().enumerate() {
        let mut men: Vec<usize> = heap.into_iter().map(|r| r.0.man).collect();
        men.sort_unstable();
        debug_assert_eq!(men.len(), members[t].len());
        for (&w, m) in members[t].iter().zip(men) {
            pairs[m] = w;
        }
    }

    Ok(SolveReport {
        matching: Matching { pairs },
        proposals,
        runtime_nanos: start.elapsed().as_nanos() as u64,
        algorithm: "small-universe".to_string(),
    })
}

/// Greedy solver for one-sided attribute markets.
///
/// Every woman ranks men by the shared scalar attribute, either ascending or
/// descending according to her sign. In the woman-optimal stable matching the
/// k positive-sign women match the top k men and the negative-sign women the
/// remaining n−k, with each block served greedily in its women's preference
/// order: best man first in the positive block, worst man first in the
/// negative block. Each man takes his argmax woman among the block's
/// remaining women via a maximum-inner-product index, which is then deleted.
/// Ties in `men_attr` are broken by ascending man index.
pub fn find_one_sided(osm: &OneSidedMarket) -> SolveReport {
    let start = Instant::now();
    let n = osm.n;
    let mut by_attr: Vec<usize> = (0..n).collect();
    by_attr.sort_unstable_by(|&a, &b| {
        osm.men_attr[b]
            .total_cmp(&osm.men_attr[a])
            .then(a.cmp(&b))
    });
    let k = osm.women_sign.iter().filter(|&&s| s > 0.0).count();

    let positive_women: Vec<usize> = (0..n).filter(|&w| osm.women_sign[w] > 0.0).collect();
    let negative_women: Vec<usize> = (0..n).filter(|&w| osm.women_sign[w] <= 0.0).collect();

    // Positive block: top k men, processed best (highest attribute) first.
    let top_men: Vec<usize> = by_attr[..k].to_vec();
    // Negative block: bottom n−k men, processed worst first.
    let mut bottom_men: Vec<usize> = by_attr[k..].to_vec();
    bottom_men.reverse();

    let mut pairs = vec![usize::MAX; n];
    let mut proposals: u64 = 0;
    for (men, women) in [(top_men, positive_women), (bottom_men, negative_women)] {
        if women.is_empty() {
            continue;
        }
        let rows: Vec<Vec<f64>> = women.iter().map(|&w| osm.women_attrs[w].clone()).collect();
        let mut index = hmi_build(&rows).expect("validated market rows are rectangular");
        for m in men {
            let local = index
                .query_max(&osm.men_weights[m])
                .expect("one live woman per remaining man");
            index.delete(local).expect("fresh index from query_max");
            proposals += 1;
            pairs[m] = women[local];
        }
    }

    SolveReport {
        matching: Matching { pairs },
        proposals,
        runtime_nanos: start.elapsed().as_nanos() as u64,
        algorithm: "one-sided".to_string(),
    }
}
