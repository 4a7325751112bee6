//! Stable-pair decision procedures, an exhaustive enumeration oracle,
//! hardness-instance generators, and the counterexample/strategy fixtures.
//!
//! The generators turn a pair of boolean vector sets (U, V) — an instance of
//! the maximum-inner-product or minimum-Hamming-distance problem — into
//! matching markets whose stability properties encode the answer:
//!
//! * [`gen_finding_hardness`] / [`gen_geo_finding`] — symmetric markets in
//!   which every stable matching must contain an extremal (max inner product
//!   / min Hamming) pair.
//! * [`gen_verify_hardness`] / [`gen_geo_verify`] — markets with a designated
//!   matching that is stable iff no pair crosses the threshold `l`.
//! * [`gen_stable_pair`] / [`gen_stable_pair_co`] and their geometric
//!   counterparts — markets with a designated pair (m★, w★) that belongs to
//!   all (equivalently, some) stable matchings iff the threshold predicate
//!   holds (straight variant) or fails (co variant).
//!
//! Every generated [`ReductionInstance`] carries the certified answer,
//! recomputable from its parameters via [`max_inner_product_brute`] /
//! [`min_hamming_brute`], and each construction self-checks the dot products
//! / distances its preference structure relies on, failing loudly with
//! [`Error::Construction`] rather than emitting a subtly wrong market.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefs::{
    AttributeMarket, GeometricMarket, ListMarket, Market, Matching, PeakRelation, PrefScorer,
    Side, SinglePeakedMarket,
};
use crate::solve::gale_shapley;

/// Which generator family produced an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Finding,
    VerifyHardness,
    StablePair,
    StablePairCo,
    GeoFinding,
    GeoVerify,
    GeoStablePair,
    GeoStablePairCo,
}

/// The designated object whose stability status the instance certifies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Designated {
    /// Verification instances designate a full matching.
    Matching(Matching),
    /// Stable-pair instances designate one (man, woman) pair.
    Pair(usize, usize),
    /// Finding instances designate nothing.
    None,
}

/// Everything needed to recompute an instance's certified answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub family: Family,
    /// The boolean vector sets the predicate ranges over (post-padding for
    /// families that pad).
    pub u: Vec<Vec<u8>>,
    pub v: Vec<Vec<u8>>,
    /// Threshold, for the families that have one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Dimension of the vectors in `u` and `v`.
    pub d: usize,
    /// The brute-force extremum (max inner product or min Hamming distance).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremum: Option<usize>,
    /// Lexicographically smallest pair attaining the extremum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremum_pair: Option<(usize, usize)>,
}

/// A generated market bundled with its certificate.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub market: Market,
    pub designated: Designated,
    /// The certified answer of the instance's predicate (see each generator's
    /// documentation for what the predicate is).
    pub oracle_answer: bool,
    pub params: ReductionParams,
}

#[derive(Serialize, Deserialize)]
struct ProvenanceRecord {
    params: ReductionParams,
    designated: Designated,
    oracle_answer: bool,
}

impl ReductionInstance {
    /// JSON string recording params, designated object, and certified answer;
    /// embedded in the generated market's provenance field.
    pub fn provenance_string(&self) -> String {
        serde_json::to_string(&ProvenanceRecord {
            params: self.params.clone(),
            designated: self.designated.clone(),
            oracle_answer: self.oracle_answer,
        })
        .expect("provenance record serializes")
    }

    /// Inverse of [`ReductionInstance::provenance_string`].
    pub fn parse_provenance(s: &str) -> Result<(ReductionParams, Designated, bool)> {
        let rec: ProvenanceRecord =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("provenance: {e}")))?;
        Ok((rec.params, rec.designated, rec.oracle_answer))
    }

    /// Recompute the certified answer from the parameters alone.
    ///
    /// For threshold families this is the threshold predicate; for finding
    /// families (whose answer is the constant `true`) it instead checks that
    /// the recorded extremum and argpair match a fresh brute-force run.
    pub fn recompute_answer(params: &ReductionParams) -> Result<bool> {
        let need_l = || {
            params
                .l
                .ok_or_else(|| Error::Parse("threshold family without l".to_string()))
        };
        match params.family {
            Family::Finding => {
                let (mx, pair) = max_inner_product_brute(&params.u, &params.v)?;
                Ok(params.extremum == Some(mx) && params.extremum_pair == Some(pair))
            }
            Family::VerifyHardness | Family::StablePair | Family::StablePairCo => {
                let (mx, _) = max_inner_product_brute(&params.u, &params.v)?;
                Ok(mx >= need_l()?)
            }
            Family::GeoFinding => {
                let (mn, pair) = min_hamming_brute(&params.u, &params.v)?;
                Ok(params.extremum == Some(mn) && params.extremum_pair == Some(pair))
            }
            Family::GeoVerify | Family::GeoStablePair | Family::GeoStablePairCo => {
                let (mn, _) = min_hamming_brute(&params.u, &params.v)?;
                Ok(mn < need_l()?)
            }
        }
    }

    fn finish(
        mut market: Market,
        designated: Designated,
        oracle_answer: bool,
        params: ReductionParams,
    ) -> ReductionInstance {
        let mut instance = ReductionInstance { market: market.clone(), designated, oracle_answer, params };
        market.set_provenance(Some(instance.provenance_string()));
        instance.market = market;
        instance
    }
}

/// All perfect matchings with no blocking pair, in lexicographic order of
/// their `pairs` vectors. Exhaustive (n! with pruning): refuses n > 10.
pub fn enumerate_stable(market: &Market) -> Result<Vec<Matching>> {
    let n = market.n();
    if n > 10 {
        return Err(Error::TooLarge { what: "enumerate_stable", limit: 10, n });
    }
    let men = PrefScorer::new(market, Side::Men);
    let women = PrefScorer::new(market, Side::Women);
    let sm: Vec<Vec<f64>> = (0..n).map(|m| (0..n).map(|w| men.score(m, w)).collect()).collect();
    let sw: Vec<Vec<f64>> = (0..n).map(|w| (0..n).map(|m| women.score(w, m)).collect()).collect();

    fn extend(
        n: usize,
        sm: &[Vec<f64>],
        sw: &[Vec<f64>],
        pairs: &mut Vec<usize>,
        used: &mut u16,
        out: &mut Vec<Matching>,
    ) {
        let m = pairs.len();
        if m == n {
            out.push(Matching { pairs: pairs.clone() });
            return;
        }
        'women: for w in 0..n {
            if *used & (1 << w) != 0 {
                continue;
            }
            for (mp, &wp) in pairs.iter().enumerate() {
                let earlier_blocks = sm[mp][w] < sm[mp][wp] && sw[w][mp] < sw[w][m];
                let current_blocks = sm[m][wp] < sm[m][w] && sw[wp][m] < sw[wp][mp];
                if earlier_blocks || current_blocks {
                    continue 'women;
                }
            }
            pairs.push(w);
            *used |= 1 << w;
            extend(n, sm, sw, pairs, used, out);
            pairs.pop();
            *used &= !(1 << w);
        }
    }

    let mut out = Vec::new();
    let mut pairs = Vec::with_capacity(n);
    let mut used: u16 = 0;
    extend(n, &sm, &sw, &mut pairs, &mut used, &mut out);
    Ok(out)
}

/// True iff (m, w) is matched in both the man-optimal and the woman-optimal
/// deferred-acceptance outcomes. Each participant's stable partners are
/// bracketed by those two matchings, so agreement there pins the pair in
/// every stable matching.
pub fn in_all_stable(market: &Market, m: usize, w: usize) -> Result<bool> {
    let n = market.n();
    if m >= n {
        return Err(Error::IndexOutOfRange { what: "man", index: m, size: n });
    }
    if w >= n {
        return Err(Error::IndexOutOfRange { what: "woman", index: w, size: n });
    }
    let man_optimal = gale_shapley(market, Side::Men).matching;
    let woman_optimal = gale_shapley(market, Side::Women).matching;
    Ok(man_optimal.pairs[m] == w && woman_optimal.pairs[m] == w)
}

/// True iff (m, w) appears in some stable matching, by exhaustive
/// enumeration; refuses n > 10.
pub fn in_some_stable(market: &Market, m: usize, w: usize) -> Result<bool> {
    let n = market.n();
    if m >= n {
        return Err(Error::IndexOutOfRange { what: "man", index: m, size: n });
    }
    if w >= n {
        return Err(Error::IndexOutOfRange { what: "woman", index: w, size: n });
    }
    Ok(enumerate_stable(market)?.iter().any(|mu| mu.pairs[m] == w))
}

fn check_bool_sets(u: &[Vec<u8>], v: &[Vec<u8>]) -> Result<usize> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::InvalidMarket("vector sets must be nonempty".to_string()));
    }
    let d = u[0].len();
    for (name, set) in [("U", u), ("V", v)] {
        for (row, vec) in set.iter().enumerate() {
            if vec.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{name}[{row}] has dimension {}, expected {d}",
                    vec.len()
                )));
            }
            for (col, &x) in vec.iter().enumerate() {
                if x > 1 {
                    return Err(Error::NonBooleanEntry {
                        side: name,
                        row,
                        col,
                        value: f64::from(x),
                    });
                }
            }
        }
    }
    Ok(d)
}

fn require_equal_counts(u: &[Vec<u8>], v: &[Vec<u8>]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "|U| = {} and |V| = {} must be equal for this family",
            u.len(),
            v.len()
        )));
    }
    Ok(())
}

/// Exact maximum inner product over all |U|·|V| pairs, with the
/// lexicographically smallest pair attaining it.
pub fn max_inner_product_brute(u: &[Vec<u8>], v: &[Vec<u8>]) -> Result<(usize, (usize, usize))> {
    check_bool_sets(u, v)?;
    let mut best: Option<(usize, (usize, usize))> = None;
    for (i, uu) in u.iter().enumerate() {
        for (j, vv) in v.iter().enumerate() {
            let val = dot_bits(uu, vv);
            if best.map_or(true, |(b, _)| val > b) {
                best = Some((val, (i, j)));
            }
        }
    }
    Ok(best.expect("nonempty sets"))
}

/// Exact minimum Hamming distance over all |U|·|V| pairs, with the
/// lexicographically smallest pair attaining it.
pub fn min_hamming_brute(u: &[Vec<u8>], v: &[Vec<u8>]) -> Result<(usize, (usize, usize))> {
    check_bool_sets(u, v)?;
    let mut best: Option<(usize, (usize, usize))> = None;
    for (i, uu) in u.iter().enumerate() {
        for (j, vv) in v.iter().enumerate() {
            let dist = hamming_bits(uu, vv);
            if best.map_or(true, |(b, _)| dist < b) {
                best = Some((dist, (i, j)));
            }
        }
    }
    Ok(best.expect("nonempty sets"))
}

fn dot_bits(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|&(&x, &y)| x == 1 && y == 1).count()
}

fn hamming_bits(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|&(&x, &y)| x != y).count()
}

fn to_f64_rows(rows: &[Vec<u8>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|&x| f64::from(x)).collect()).collect()
}

fn repeated(x: &[u8], times: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(x.len() * times);
    for _ in 0..times {
        out.extend_from_slice(x);
    }
    out
}

fn bits(parts: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::new();
    for p in parts {
        out.extend_from_slice(p);
    }
    out
}

/// Symmetric attribute market on (U, V): attributes equal weights equal the
/// input vectors, so a man's value of a woman is the inner product ⟨u, v⟩ and
/// the women agree. Every stable matching must contain a pair attaining the
/// maximum inner product (otherwise the maximizing pair blocks), which is the
/// certified `extremum` / `extremum_pair`. `oracle_answer` is `true`: the
/// property always holds. Requires |U| = |V|.
pub fn gen_finding_hardness(u: &[Vec<u8>], v: &[Vec<u8>]) -> Result<ReductionInstance> {
    let d = check_bool_sets(u, v)?;
    require_equal_counts(u, v)?;
    let (extremum, pair) = max_inner_product_brute(u, v)?;
    let market = Market::Attribute(AttributeMarket {
        n: u.len(),
        d,
        men_attrs: to_f64_rows(u),
        men_weights: to_f64_rows(u),
        women_attrs: to_f64_rows(v),
        women_weights: to_f64_rows(v),
        provenance: None,
    });
    let params = ReductionParams {
        family: Family::Finding,
        u: u.to_vec(),
        v: v.to_vec(),
        l: None,
        d,
        extremum: Some(extremum),
        extremum_pair: Some(pair),
    };
    Ok(ReductionInstance::finish(market, Designated::None, true, params))
}

/// Symmetric attribute market of |U| + |V| participants per side whose
/// designated identity matching is stable iff max⟨u,v⟩ < l.
///
/// Each u gets a real man `u ∘ 1^{l−1} ∘ 0^{l−1}` matched to a dummy woman
/// `0^d ∘ 1^{l−1} ∘ 0^{l−1}`, and each v a real woman `v ∘ 0^{l−1} ∘ 1^{l−1}`
/// matched to a dummy man `0^d ∘ 0^{l−1} ∘ 1^{l−1}`. All designated pairs
/// have symmetric value l−1 (self-checked), every cross pair except
/// (man of u, woman of v) has value ≤ l−1, and (man of u, woman of v) has
/// value ⟨u, v⟩ — so a blocking pair exists iff some ⟨u, v⟩ ≥ l.
/// `oracle_answer` = (max⟨u,v⟩ ≥ l). |U| and |V| may differ.
pub fn gen_verify_hardness(u: &[Vec<u8>], v: &[Vec<u8>], l: usize) -> Result<ReductionInstance> {
    if l < 1 {
        return Err(Error::InvalidThreshold("l must be at least 1".to_string()));
    }
    let d = check_bool_sets(u, v)?;
    let p = l - 1;
    let ones = vec![1u8; p];
    let zeros = vec![0u8; p];
    let zero_d = vec![0u8; d];

    let mut men: Vec<Vec<u8>> = Vec::with_capacity(u.len() + v.len());
    let mut women: Vec<Vec<u8>> = Vec::with_capacity(u.len() + v.len());
    for uu in u {
        men.push(bits(&[uu, &ones, &zeros]));
        women.push(bits(&[&zero_d, &ones, &zeros]));
    }
    for vv in v {
        men.push(bits(&[&zero_d, &zeros, &ones]));
        women.push(bits(&[vv, &zeros, &ones]));
    }

    for (i, (m_row, w_row)) in men.iter().zip(&women).enumerate() {
        let val = dot_bits(m_row, w_row);
        if val != p {
            return Err(Error::Construction(format!(
                "designated pair {i} has value {val}, expected {p}"
            )));
        }
    }

    let n = men.len();
    let market = Market::Attribute(AttributeMarket {
        n,
        d: d + 2 * p,
        men_attrs: to_f64_rows(&men),
        men_weights: to_f64_rows(&men),
        women_attrs: to_f64_rows(&women),
        women_weights: to_f64_rows(&women),
        provenance: None,
    });
    let (extremum, pair) = max_inner_product_brute(u, v)?;
    let params = ReductionParams {
        family: Family::VerifyHardness,
        u: u.to_vec(),
        v: v.to_vec(),
        l: Some(l),
        d,
        extremum: Some(extremum),
        extremum_pair: Some(pair),
    };
    let designated = Designated::Matching(Matching { pairs: (0..n).collect() });
    Ok(ReductionInstance::finish(market, designated, extremum >= l, params))
}

/// Expected block values of the stable-pair construction, indexed by
/// (man kind, woman kind) with kinds ordered real / dummy / starred.
fn stable_pair_expected(l: usize, co: bool) -> [[usize; 3]; 3] {
    let b = 7 * l;
    [
        // (m_u, ·): the (m_u, w_v) slot holds the *coefficient* applied to
        // ⟨u, v⟩ rather than a constant and is handled separately.
        [7, b - 1, b - 4],
        [b - 1, if co { b - 4 } else { b - 2 }, b - 3],
        [b - 6, b - 7, b - 5],
    ]
}

fn build_stable_pair(u: &[Vec<u8>], v: &[Vec<u8>], l: usize, co: bool) -> Result<ReductionInstance> {
    if l < 1 {
        return Err(Error::InvalidThreshold("l must be at least 1".to_string()));
    }
    let d = check_bool_sets(u, v)?;
    require_equal_counts(u, v)?;
    let n = u.len();
    let p = l - 1;
    let dummies = if co { n } else { n - 1 };

    let on7p = vec![1u8; 7 * p];
    let off7p = vec![0u8; 7 * p];
    let zero7d = vec![0u8; 7 * d];
    let on6 = vec![1u8; 6];
    let off6 = vec![0u8; 6];

    let m_real = |uu: &[u8]| bits(&[&repeated(uu, 7), &on7p, &off7p, &on6, &off6, &off6]);
    let m_dummy = bits(&[&zero7d, &on7p, &on7p, &off6, &on6, &off6]);
    let m_star = bits(&[&zero7d, &on7p, &on7p, &off6, &off6, &on6]);
    let w_real = |vv: &[u8]| {
        bits(&[&repeated(vv, 7), &off7p, &on7p, &off6, &on6, &[1, 0, 0, 0, 0, 0]])
    };
    let w_dummy_tail: &[u8] = if co { &[1, 1, 1, 0, 0, 0] } else { &[1, 1, 1, 1, 1, 0] };
    let w_dummy = bits(&[&zero7d, &on7p, &off7p, &on6, w_dummy_tail, &off6]);
    let w_star = bits(&[
        &zero7d,
        &on7p,
        &off7p,
        &[1, 1, 1, 0, 0, 0],
        &[1, 1, 1, 1, 0, 0],
        &[1, 1, 0, 0, 0, 0],
    ]);

    let mut men: Vec<Vec<u8>> = u.iter().map(|uu| m_real(uu)).collect();
    men.extend(std::iter::repeat_with(|| m_dummy.clone()).take(dummies));
    men.push(m_star);
    let mut women: Vec<Vec<u8>> = v.iter().map(|vv| w_real(vv)).collect();
    women.extend(std::iter::repeat_with(|| w_dummy.clone()).take(dummies));
    women.push(w_star);

    // Self-check: the printed block values, which the whole preference scheme
    // rests on. Representatives suffice for the constant slots; the
    // (m_u, w_v) = 7⟨u,v⟩ identity is checked for every pair.
    let expected = stable_pair_expected(l, co);
    let man_rep = [&men[0], &men[n.min(men.len() - 1)], &men[men.len() - 1]];
    let woman_rep = [&women[0], &women[n.min(women.len() - 1)], &women[women.len() - 1]];
    for (mk, m_row) in man_rep.iter().enumerate() {
        for (wk, w_row) in woman_rep.iter().enumerate() {
            if mk == 0 && wk == 0 {
                continue; // value depends on ⟨u, v⟩; checked below
            }
            // With n = 1 there are no dummies in the straight variant; the
            // "dummy" representative then aliases the starred participant and
            // the starred expectation applies.
            let mk_eff = if !co && n == 1 && mk == 1 { 2 } else { mk };
            let wk_eff = if !co && n == 1 && wk == 1 { 2 } else { wk };
            let got = dot_bits(m_row, w_row);
            let want = expected[mk_eff][wk_eff];
            if got != want {
                return Err(Error::Construction(format!(
                    "stable-pair block value ({mk_eff},{wk_eff}) is {got}, expected {want}"
                )));
            }
        }
    }
    for (i, uu) in u.iter().enumerate() {
        for (j, vv) in v.iter().enumerate() {
            let got = dot_bits(&men[i], &women[j]);
            let want = 7 * dot_bits(uu, vv);
            if got != want {
                return Err(Error::Construction(format!(
                    "stable-pair real-pair value ({i},{j}) is {got}, expected {want}"
                )));
            }
        }
    }

    let count = men.len();
    let market = Market::Attribute(AttributeMarket {
        n: count,
        d: 7 * d + 14 * p + 18,
        men_attrs: to_f64_rows(&men),
        men_weights: to_f64_rows(&men),
        women_attrs: to_f64_rows(&women),
        women_weights: to_f64_rows(&women),
        provenance: None,
    });
    let (extremum, pair) = max_inner_product_brute(u, v)?;
    let params = ReductionParams {
        family: if co { Family::StablePairCo } else { Family::StablePair },
        u: u.to_vec(),
        v: v.to_vec(),
        l: Some(l),
        d,
        extremum: Some(extremum),
        extremum_pair: Some(pair),
    };
    let designated = Designated::Pair(count - 1, count - 1);
    Ok(ReductionInstance::finish(market, designated, extremum >= l, params))
}

/// Stable-pair instance: the designated pair (m★, w★) belongs to all
/// (equivalently, some) stable matchings iff max⟨u,v⟩ ≥ l, which is the
/// certified `oracle_answer`. Uses n−1 dummy participants per side.
/// Requires |U| = |V| = n ≥ 1 and l ≥ 1.
pub fn gen_stable_pair(u: &[Vec<u8>], v: &[Vec<u8>], l: usize) -> Result<ReductionInstance> {
    build_stable_pair(u, v, l, false)
}

/// Co-variant of [`gen_stable_pair`]: n dummies per side and two flipped
/// suffix blocks, so (m★, w★) belongs to all/some stable matchings iff
/// max⟨u,v⟩ < l — the *negation* of the certified `oracle_answer`.
pub fn gen_stable_pair_co(u: &[Vec<u8>], v: &[Vec<u8>], l: usize) -> Result<ReductionInstance> {
    build_stable_pair(u, v, l, true)
}

/// Narcissistic geometric market on (U, V): every participant's location and
/// ideal are their own vector, so preferences follow Hamming distance. Every
/// stable matching must contain a pair attaining the minimum Hamming distance
/// (the certified extremum). `oracle_answer` = `true`. Requires |U| = |V|.
pub fn gen_geo_finding(u: &[Vec<u8>], v: &[Vec<u8>]) -> Result<ReductionInstance> {
    let d = check_bool_sets(u, v)?;
    require_equal_counts(u, v)?;
    let (extremum, pair) = min_hamming_brute(u, v)?;
    let men = to_f64_rows(u);
    let women = to_f64_rows(v);
    let market = Market::Geometric(GeometricMarket {
        n: u.len(),
        d,
        men_loc: men.clone(),
        men_ideal: men,
        women_loc: women.clone(),
        women_ideal: women,
        provenance: None,
    });
    let params = ReductionParams {
        family: Family::GeoFinding,
        u: u.to_vec(),
        v: v.to_vec(),
        l: None,
        d,
        extremum: Some(extremum),
        extremum_pair: Some(pair),
    };
    Ok(ReductionInstance::finish(market, Designated::None, true, params))
}

/// Narcissistic geometric market of |U| + |V| participants per side whose
/// designated identity matching is stable iff min Hamming(u, v) ≥ l.
///
/// Each u gets a real man at `u ∘ 0^l` matched to a dummy woman at
/// `u ∘ 1^l`, and each v a real woman at `v ∘ 0^l` matched to a dummy man at
/// `v ∘ 1^l`. Every designated pair sits at squared distance exactly l
/// (self-checked); real-vs-real and dummy-vs-dummy cross pairs are at
/// distance Hamming(u, v), everything else at ≥ l. `oracle_answer` =
/// (min Hamming < l). |U| and |V| may differ.
pub fn gen_geo_verify(u: &[Vec<u8>], v: &[Vec<u8>], l: usize) -> Result<ReductionInstance> {
    if l < 1 {
        return Err(Error::InvalidThreshold("l must be at least 1".to_string()));
    }
    let d = check_bool_sets(u, v)?;
    let on = vec![1u8; l];
    let off = vec![0u8; l];

    let mut men: Vec<Vec<u8>> = Vec::with_capacity(u.len() + v.len());
    let mut women: Vec<Vec<u8>> = Vec::with_capacity(u.len() + v.len());
    for uu in u {
        men.push(bits(&[uu, &off]));
        women.push(bits(&[uu, &on]));
    }
    for vv in v {
        men.push(bits(&[vv, &on]));
        women.push(bits(&[vv, &off]));
    }
    for (i, (m_row, w_row)) in men.iter().zip(&women).enumerate() {
        let dist = hamming_bits(m_row, w_row);
        if dist != l {
            return Err(Error::Construction(format!(
                "designated pair {i} is at distance {dist}, expected {l}"
            )));
        }
    }

    let n = men.len();
    let men_f = to_f64_rows(&men);
    let women_f = to_f64_rows(&women);
    let market = Market::Geometric(GeometricMarket {
        n,
        d: d + l,
        men_loc: men_f.clone(),
        men_ideal: men_f,
        women_loc: women_f.clone(),
        women_ideal: women_f,
        provenance: None,
    });
    let (extremum, pair) = min_hamming_brute(u, v)?;
    let params = ReductionParams {
        family: Family::GeoVerify,
        u: u.to_vec(),
        v: v.to_vec(),
        l: Some(l),
        d,
        extremum: Some(extremum),
        extremum_pair: Some(pair),
    };
    let designated = Designated::Matching(Matching { pairs: (0..n).collect() });
    Ok(ReductionInstance::finish(market, designated, extremum < l, params))
}

/// Expected suffix-block Hamming distances of the geometric stable-pair
/// construction, indexed like [`stable_pair_expected`]; the base prefix
/// contributes 6d to every constant slot.
fn geo_stable_pair_expected(d: usize, co: bool) -> [[usize; 3]; 3] {
    let b = 6 * d;
    if co {
        [[12, b + 3, b + 4], [b + 1, b + 4, b + 3], [b + 7, b + 10, b + 5]]
    } else {
        [[12, b + 1, b + 4], [b + 1, b + 2, b + 3], [b + 7, b + 8, b + 5]]
    }
}

/// Geometric stable-pair instance over Hamming distance.
///
/// Vectors are zero-padded to even dimension d, only then the threshold is
/// hardwired to l = d/2 + 1 by the construction's constants. Real
/// participants embed as `(x ∘ x̄ ∘ x ∘ x̄)³` plus a constant suffix (9 bits
/// straight, 11 bits co), placing (man of u, woman of v) at distance
/// 12·Hamming(u, v) and every other pair at a constant distance near 6d.
/// The designated pair (m★, w★) belongs to all/some stable matchings iff
/// min Hamming < l (straight) or iff min Hamming ≥ l (co); `oracle_answer` =
/// (min Hamming < l) for both. Requires |U| = |V|.
pub fn gen_geo_stable_pair(u: &[Vec<u8>], v: &[Vec<u8>], co: bool) -> Result<ReductionInstance> {
    check_bool_sets(u, v)?;
    require_equal_counts(u, v)?;
    let n = u.len();

    // Pad to even dimension; a shared constant coordinate leaves all
    // pairwise distances unchanged.
    let (u, v): (Vec<Vec<u8>>, Vec<Vec<u8>>) = if u[0].len() % 2 == 1 {
        (
            u.iter().map(|r| bits(&[r, &[0]])).collect(),
            v.iter().map(|r| bits(&[r, &[0]])).collect(),
        )
    } else {
        (u.to_vec(), v.to_vec())
    };
    let d = u[0].len();
    let l = d / 2 + 1;

    let base = |x: &[u8]| -> Vec<u8> {
        let comp: Vec<u8> = x.iter().map(|&b| 1 - b).collect();
        repeated(&bits(&[x, &comp, x, &comp]), 3)
    };
    let ruler = repeated(&bits(&[&vec![0u8; 2 * d], &vec![1u8; 2 * d]]), 3);
    let zero_base = vec![0u8; 12 * d];

    let (m_dummy_tail, m_star_tail, w_dummy_tail, w_star_tail, blank): (
        &[u8],
        &[u8],
        &[u8],
        &[u8],
        &[u8],
    ) = if co {
        (
            &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 1, 1, 1, 1, 1, 1, 1, 0, 0],
            &[0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 1],
            &[1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0],
            &[0; 11],
        )
    } else {
        (
            &[1, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 1, 1, 1, 1, 1, 1, 1],
            &[0, 1, 0, 0, 0, 0, 0, 0, 0],
            &[1, 0, 1, 1, 1, 0, 0, 0, 0],
            &[0; 9],
        )
    };

    let dummies = if co { n } else { n - 1 };
    let mut men: Vec<Vec<u8>> = u.iter().map(|uu| bits(&[&base(uu), blank])).collect();
    men.extend(std::iter::repeat_with(|| bits(&[&zero_base, m_dummy_tail])).take(dummies));
    men.push(bits(&[&zero_base, m_star_tail]));
    let mut women: Vec<Vec<u8>> = v.iter().map(|vv| bits(&[&base(vv), blank])).collect();
    women.extend(std::iter::repeat_with(|| bits(&[&ruler, w_dummy_tail])).take(dummies));
    women.push(bits(&[&ruler, w_star_tail]));

    let expected = geo_stable_pair_expected(d, co);
    let man_rep = [&men[0], &men[n.min(men.len() - 1)], &men[men.len() - 1]];
    let woman_rep = [&women[0], &women[n.min(women.len() - 1)], &women[women.len() - 1]];
    for (mk, m_row) in man_rep.iter().enumerate() {
        for (wk, w_row) in woman_rep.iter().enumerate() {
            if mk == 0 && wk == 0 {
                continue;
            }
            let mk_eff = if !co && n == 1 && mk == 1 { 2 } else { mk };
            let wk_eff = if !co && n == 1 && wk == 1 { 2 } else { wk };
            let got = hamming_bits(m_row, w_row);
            let want = expected[mk_eff][wk_eff];
            if got != want {
                return Err(Error::Construction(format!(
                    "geo stable-pair block distance ({mk_eff},{wk_eff}) is {got}, expected {want}"
                )));
            }
        }
    }
    for (i, uu) in u.iter().enumerate() {
        for (j, vv) in v.iter().enumerate() {
            let got = hamming_bits(&men[i], &women[j]);
            let want = 12 * hamming_bits(uu, vv);
            if got != want {
                return Err(Error::Construction(format!(
                    "geo stable-pair real-pair distance ({i},{j}) is {got}, expected {want}"
                )));
            }
        }
    }

    let count = men.len();
    let men_f = to_f64_rows(&men);
    let women_f = to_f64_rows(&women);
    let market = Market::Geometric(GeometricMarket {
        n: count,
        d: 12 * d + if co { 11 } else { 9 },
        men_loc: men_f.clone(),
        men_ideal: men_f,
        women_loc: women_f.clone(),
        women_ideal: women_f,
        provenance: None,
    });
    let (extremum, pair) = min_hamming_brute(&u, &v)?;
    let params = ReductionParams {
        family: if co { Family::GeoStablePairCo } else { Family::GeoStablePair },
        u,
        v,
        l: Some(l),
        d,
        extremum: Some(extremum),
        extremum_pair: Some(pair),
    };
    let designated = Designated::Pair(count - 1, count - 1);
    Ok(ReductionInstance::finish(market, designated, extremum < l, params))
}

/// A named example market with its expected stable structure.
#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub market: Market,
    pub annotations: FixtureAnnotations,
}

/// Ground truth for a fixture, verified by tests.
#[derive(Clone, Debug, Serialize)]
pub struct FixtureAnnotations {
    /// Every stable matching, in lexicographic order of `pairs`.
    pub stable_matchings: Vec<Matching>,
    pub man_optimal: Matching,
    pub woman_optimal: Matching,
    /// True when no participant receives their top choice in the unique
    /// stable matching (so any greedy pick-your-favorite pass must fail).
    pub no_top_choice: bool,
    /// Manipulated variants of the market and their expected effect.
    pub deviations: Vec<Deviation>,
}

/// One manipulation of a fixture market.
#[derive(Clone, Debug, Serialize)]
pub struct Deviation {
    pub description: String,
    pub market: Market,
    pub expect: DeviationEffect,
}

/// What the manipulated market is expected to exhibit.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationEffect {
    /// The manipulated market has exactly this one stable matching.
    UniqueStable(Matching),
    /// In the manipulated market this pair blocks the original matching.
    BlocksDesignated((usize, usize)),
}

/// Names accepted by [`fixture`].
pub fn fixture_names() -> &'static [&'static str] {
    &[
        "two_list_no_top",
        "two_list_greedy",
        "list_strategy",
        "single_peaked_no_top",
        "geometric_strategy",
    ]
}

fn matching(pairs: &[usize]) -> Matching {
    Matching { pairs: pairs.to_vec() }
}

/// Look up a built-in example market by name; see [`fixture_names`].
pub fn fixture(name: &str) -> Result<Fixture> {
    let mut fx = match name {
        "two_list_no_top" => {
            // Five participants per side, two lists per side; the unique
            // stable matching gives nobody their top choice.
            let market = Market::List(ListMarket {
                n: 5,
                d: 2,
                women_orders: vec![vec![0, 1, 2, 3, 4], vec![2, 4, 0, 3, 1]],
                men_orders: vec![vec![0, 1, 2, 3, 4], vec![2, 4, 0, 3, 1]],
                men_choice: vec![0, 0, 1, 0, 1],
                women_choice: vec![1, 1, 0, 1, 0],
                provenance: None,
            });
            let unique = matching(&[1, 2, 4, 3, 0]);
            Fixture {
                name: "two_list_no_top",
                market,
                annotations: FixtureAnnotations {
                    stable_matchings: vec![unique.clone()],
                    man_optimal: unique.clone(),
                    woman_optimal: unique,
                    no_top_choice: true,
                    deviations: Vec::new(),
                },
            }
        }
        "two_list_greedy" => {
            // Three participants, two lists. The unique stable matching can
            // be found — but only with knowledge of every man's list choice:
            // flipping either of the first two men's choices makes him form
            // a blocking pair against it, so no commit-as-you-go procedure
            // that fixes a partner before seeing all choices can succeed.
            let base = ListMarket {
                n: 3,
                d: 2,
                women_orders: vec![vec![0, 1, 2], vec![2, 1, 0]],
                men_orders: vec![vec![0, 1, 2], vec![1, 0, 2]],
                men_choice: vec![1, 0, 0],
                women_choice: vec![0, 1, 1],
                provenance: None,
            };
            let unique = matching(&[2, 0, 1]);
            let mut dev1 = base.clone();
            dev1.men_choice[0] = 0;
            let mut dev2 = base.clone();
            dev2.men_choice[1] = 1;
            Fixture {
                name: "two_list_greedy",
                market: Market::List(base),
                annotations: FixtureAnnotations {
                    stable_matchings: vec![unique.clone()],
                    man_optimal: unique.clone(),
                    woman_optimal: unique,
                    no_top_choice: false,
                    deviations: vec![
                        Deviation {
                            description: "man 0 switches to the first list; (m0, w0) then blocks \
                                          the original matching"
                                .to_string(),
                            market: Market::List(dev1),
                            expect: DeviationEffect::BlocksDesignated((0, 0)),
                        },
                        Deviation {
                            description: "man 1 switches to the second list; (m1, w2) then blocks \
                                          the original matching"
                                .to_string(),
                            market: Market::List(dev2),
                            expect: DeviationEffect::BlocksDesignated((1, 2)),
                        },
                    ],
                },
            }
        }
        "list_strategy" => {
            // Four participants, two lists, two stable matchings. If woman 1
            // misreports her list choice, the unique stable matching of the
            // manipulated market is her preferred (woman-optimal) one.
            let base = ListMarket {
                n: 4,
                d: 2,
                women_orders: vec![vec![0, 1, 2, 3], vec![2, 0, 1, 3]],
                men_orders: vec![vec![0, 1, 2, 3], vec![2, 0, 3, 1]],
                men_choice: vec![0, 0, 1, 1],
                women_choice: vec![1, 0, 0, 0],
                provenance: None,
            };
            let man_optimal = matching(&[0, 1, 2, 3]);
            let woman_optimal = matching(&[1, 2, 0, 3]);
            let mut dev = base.clone();
            dev.women_choice[1] = 1;
            Fixture {
                name: "list_strategy",
                market: Market::List(base),
                annotations: FixtureAnnotations {
                    stable_matchings: vec![man_optimal.clone(), woman_optimal.clone()],
                    man_optimal,
                    woman_optimal: woman_optimal.clone(),
                    no_top_choice: false,
                    deviations: vec![Deviation {
                        description: "woman 1 switches to the second list; the woman-optimal \
                                      matching becomes the unique stable matching"
                            .to_string(),
                        market: Market::List(dev),
                        expect: DeviationEffect::UniqueStable(woman_optimal),
                    }],
                },
            }
        }
        "single_peaked_no_top" => {
            // Symmetric single-peaked market whose unique stable matching
            // gives nobody their top choice.
            let market = Market::SinglePeaked(SinglePeakedMarket {
                n: 4,
                men_pos: vec![1.0, 2.0, 3.0, 4.0],
                women_pos: vec![1.0, 2.0, 3.0, 4.0],
                men_ideal: vec![2.75, 2.75, 3.75, 1.6],
                women_ideal: vec![2.75, 2.75, 3.75, 1.6],
                relation: PeakRelation::Distance,
                men_rank: None,
                women_rank: None,
                provenance: None,
            });
            let unique = matching(&[3, 1, 2, 0]);
            Fixture {
                name: "single_peaked_no_top",
                market,
                annotations: FixtureAnnotations {
                    stable_matchings: vec![unique.clone()],
                    man_optimal: unique.clone(),
                    woman_optimal: unique,
                    no_top_choice: true,
                    deviations: Vec::new(),
                },
            }
        }
        "geometric_strategy" => {
            // One-dimensional geometric market with two stable matchings; if
            // woman 1 misreports her ideal as 5/3, the woman-optimal matching
            // becomes the unique stable matching.
            let base = GeometricMarket {
                n: 3,
                d: 1,
                men_loc: vec![vec![1.0], vec![2.0], vec![3.0]],
                men_ideal: vec![vec![7.0 / 3.0], vec![1.0], vec![5.0 / 3.0]],
                women_loc: vec![vec![1.0], vec![2.0], vec![3.0]],
                women_ideal: vec![vec![3.0], vec![7.0 / 3.0], vec![3.0]],
                provenance: None,
            };
            let man_optimal = matching(&[2, 0, 1]);
            let woman_optimal = matching(&[2, 1, 0]);
            let mut dev = base.clone();
            dev.women_ideal[1] = vec![5.0 / 3.0];
            Fixture {
                name: "geometric_strategy",
                market: Market::Geometric(base),
                annotations: FixtureAnnotations {
                    stable_matchings: vec![man_optimal.clone(), woman_optimal.clone()],
                    man_optimal,
                    woman_optimal: woman_optimal.clone(),
                    no_top_choice: false,
                    deviations: vec![Deviation {
                        description: "woman 1 misreports her ideal as 5/3; the woman-optimal \
                                      matching becomes the unique stable matching"
                            .to_string(),
                        market: Market::Geometric(dev),
                        expect: DeviationEffect::UniqueStable(woman_optimal),
                    }],
                },
            }
        }
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    fx.market.set_provenance(Some(format!("fixture {}", fx.name)));
    Ok(fx)
}
