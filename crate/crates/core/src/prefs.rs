//! Preference representations and their comparison semantics.
//!
//! A market always has `n` men and `n` women. Each model represents both
//! sides' preferences succinctly:
//!
//! - **attribute**: every participant has `d` attributes and `d` weights; the
//!   value of a candidate is the dot product of the chooser's weights with the
//!   candidate's attributes.
//! - **one_sided**: women have `d` attributes valued by the men's weight
//!   vectors, while each man has a single scalar attribute valued by each
//!   woman with a `+1`/`-1` sign.
//! - **list**: each side has `d` shared preference orders; every participant
//!   adopts one of the orders on the opposite side.
//! - **single_peaked**: both sides sit on a line; each chooser has an ideal
//!   point and prefers candidates closer to it (or supplies an explicit
//!   unimodal ranking).
//! - **geometric**: locations and ideals in `d` dimensions; candidates whose
//!   location is closer (squared euclidean) to the chooser's ideal are
//!   preferred.
//! - **explicit**: raw rank matrices, the fully general model.
//!
//! All comparisons are strict. Equal values are ties: `prefers` returns
//! `false` in both directions, and a tied pair never blocks a matching (weak
//! stability). When an algorithm needs a total order, ties are broken by
//! ascending candidate index.
//!
//! Values are `f64`. Tie detection is exact bitwise equality of the computed
//! values, which is reliable for integer-valued data (boolean attributes,
//! small rationals) but can be perturbed by rounding noise on arbitrary real
//! inputs; see the crate README for the float-tie caveat.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the market a participant belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Men,
    Women,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Men => Side::Women,
            Side::Women => Side::Men,
        }
    }
}

/// Sequential dot product. Every value computation in the crate funnels
/// through this so that identical inputs always produce bit-identical sums.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Squared euclidean distance, summed in index order (see [`dot`]).
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        let t = a[i] - b[i];
        s += t * t;
    }
    s
}

/// The d-attribute model: `val_m(w) = <men_weights[m], women_attrs[w]>` and
/// symmetrically for women.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeMarket {
    pub n: usize,
    pub d: usize,
    pub men_attrs: Vec<Vec<f64>>,
    pub men_weights: Vec<Vec<f64>>,
    pub women_attrs: Vec<Vec<f64>>,
    pub women_weights: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// The one-sided model: women carry `d` attributes, men carry a single
/// scalar attribute; `val_m(w) = <men_weights[m], women_attrs[w]>` and
/// `val_w(m) = women_sign[w] * men_attr[m]` with `women_sign[w]` in `{+1, -1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedMarket {
    pub n: usize,
    pub d: usize,
    pub women_attrs: Vec<Vec<f64>>,
    pub men_weights: Vec<Vec<f64>>,
    pub men_attr: Vec<f64>,
    pub women_sign: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// The d-list model: `women_orders` holds the `d` candidate orders over women
/// (best first) available to men, `men_orders` the `d` orders over men
/// available to women. `men_choice[m]` indexes into `women_orders`,
/// `women_choice[w]` into `men_orders`. Lists are strict, so this model has
/// no ties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListMarket {
    pub n: usize,
    pub d: usize,
    pub women_orders: Vec<Vec<usize>>,
    pub men_orders: Vec<Vec<usize>>,
    pub men_choice: Vec<usize>,
    pub women_choice: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// How a single-peaked market compares candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakRelation {
    /// Prefer the candidate whose position is closer to the chooser's ideal.
    Distance,
    /// Explicit unimodal rank rows (`men_rank` / `women_rank` must be set).
    Custom,
}

/// The single-peaked model. Positions are strictly increasing on each side,
/// so participant index order equals position order. Under
/// [`PeakRelation::Distance`] a chooser prefers candidates closer to their
/// ideal; under [`PeakRelation::Custom`] the market supplies per-participant
/// strict rank rows (0 = best) that must be unimodal along the position
/// order: strictly improving toward a single peak, strictly worsening after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinglePeakedMarket {
    pub n: usize,
    pub men_pos: Vec<f64>,
    pub women_pos: Vec<f64>,
    pub men_ideal: Vec<f64>,
    pub women_ideal: Vec<f64>,
    pub relation: PeakRelation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub men_rank: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub women_rank: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// The geometric model: every participant has a location and an ideal point
/// in `d` dimensions. A chooser's value of a candidate is the negated squared
/// euclidean distance between the chooser's ideal and the candidate's
/// location, so larger is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricMarket {
    pub n: usize,
    pub d: usize,
    pub men_loc: Vec<Vec<f64>>,
    pub men_ideal: Vec<Vec<f64>>,
    pub women_loc: Vec<Vec<f64>>,
    pub women_ideal: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// The general model: strict preference orders as rank matrices.
/// `men_rank[m][w]` is the position of woman `w` in man `m`'s order (0 = best).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitMarket {
    pub n: usize,
    pub men_rank: Vec<Vec<usize>>,
    pub women_rank: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// A matching market under one of the supported preference representations.
///
/// Serialized form is a JSON object tagged by `"model"`, with the structs'
/// field names as the model-specific arrays and an optional `"provenance"`
/// string. Models without an intrinsic dimension (`single_peaked`,
/// `explicit`) omit `"d"`; an extraneous `"d"` on input is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Market {
    Attribute(AttributeMarket),
    OneSided(OneSidedMarket),
    List(ListMarket),
    SinglePeaked(SinglePeakedMarket),
    Geometric(GeometricMarket),
    Explicit(ExplicitMarket),
}

/// A perfect matching: `pairs[m]` is the woman matched to man `m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<usize>,
}

impl Matching {
    /// Validates that `pairs` is a permutation of `{0..pairs.len()-1}`.
    pub fn new(pairs: Vec<usize>) -> Result<Matching> {
        let m = Matching { pairs };
        m.check()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// The woman matched to man `m`.
    pub fn woman_of(&self, m: usize) -> usize {
        self.pairs[m]
    }

    /// Inverse map: entry `w` is the man matched to woman `w`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.pairs.len()];
        for (m, &w) in self.pairs.iter().enumerate() {
            inv[w] = m;
        }
        inv
    }

    /// Checks the permutation invariant.
    pub fn check(&self) -> Result<()> {
        let n = self.pairs.len();
        let mut seen = vec![false; n];
        for &w in &self.pairs {
            if w >= n {
                return Err(Error::MalformedMatching(format!(
                    "woman index {w} out of range for n = {n}"
                )));
            }
            if seen[w] {
                return Err(Error::MalformedMatching(format!(
                    "woman {w} matched more than once"
                )));
            }
            seen[w] = true;
        }
        Ok(())
    }

    /// Checks the permutation invariant against an expected market size.
    pub fn check_for(&self, n: usize) -> Result<()> {
        if self.pairs.len() != n {
            return Err(Error::MalformedMatching(format!(
                "matching has {} pairs but the market has n = {n}",
                self.pairs.len()
            )));
        }
        self.check()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("matching serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Matching> {
        let m: Matching =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("matching: {e}")))?;
        m.check()?;
        Ok(m)
    }
}

fn check_matrix(name: &str, m: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if m.len() != rows {
        return Err(Error::InvalidMarket(format!(
            "{name} has {} rows, expected {rows}",
            m.len()
        )));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidMarket(format!(
                "{name} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidMarket(format!(
                    "{name}[{i}][{j}] is not finite: {x}"
                )));
            }
        }
    }
    Ok(())
}

fn check_vector(name: &str, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::InvalidMarket(format!(
            "{name} has {} entries, expected {len}",
            v.len()
        )));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::InvalidMarket(format!(
                "{name}[{i}] is not finite: {x}"
            )));
        }
    }
    Ok(())
}

fn check_permutation(name: &str, p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidMarket(format!(
            "{name} has {} entries, expected {n}",
            p.len()
        )));
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::InvalidMarket(format!(
                "{name} is not a permutation of 0..{n}"
            )));
        }
        seen[x] = true;
    }
    Ok(())
}

fn check_strictly_increasing(name: &str, v: &[f64]) -> Result<()> {
    for i in 1..v.len() {
        if !(v[i - 1] < v[i]) {
            return Err(Error::InvalidMarket(format!(
                "{name} must be strictly increasing; entries {} and {} are {} and {}",
                i - 1,
                i,
                v[i - 1],
                v[i]
            )));
        }
    }
    Ok(())
}

/// Checks that a rank row is unimodal along the position order: strictly
/// decreasing to a single peak (rank 0), then strictly increasing.
fn check_unimodal(name: &str, who: usize, rank: &[usize]) -> Result<()> {
    let n = rank.len();
    check_permutation(&format!("{name}[{who}]"), rank, n)?;
    let peak = rank.iter().position(|&r| r == 0).unwrap();
    for i in 1..=peak {
        if rank[i - 1] <= rank[i] {
            return Err(Error::InvalidMarket(format!(
                "{name}[{who}] is not single-peaked: rank does not strictly improve toward the peak at position {i}"
            )));
        }
    }
    for i in peak + 1..n {
        if rank[i] <= rank[i - 1] {
            return Err(Error::InvalidMarket(format!(
                "{name}[{who}] is not single-peaked: rank does not strictly worsen after the peak at position {i}"
            )));
        }
    }
    Ok(())
}

impl Market {
    /// Number of participants per side.
    pub fn n(&self) -> usize {
        match self {
            Market::Attribute(m) => m.n,
            Market::OneSided(m) => m.n,
            Market::List(m) => m.n,
            Market::SinglePeaked(m) => m.n,
            Market::Geometric(m) => m.n,
            Market::Explicit(m) => m.n,
        }
    }

    /// The succinct dimension, for models that have one.
    pub fn d(&self) -> Option<usize> {
        match self {
            Market::Attribute(m) => Some(m.d),
            Market::OneSided(m) => Some(m.d),
            Market::List(m) => Some(m.d),
            Market::Geometric(m) => Some(m.d),
            Market::SinglePeaked(_) | Market::Explicit(_) => None,
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            Market::Attribute(_) => "attribute",
            Market::OneSided(_) => "one_sided",
            Market::List(_) => "list",
            Market::SinglePeaked(_) => "single_peaked",
            Market::Geometric(_) => "geometric",
            Market::Explicit(_) => "explicit",
        }
    }

    pub fn provenance(&self) -> Option<&str> {
        match self {
            Market::Attribute(m) => m.provenance.as_deref(),
            Market::OneSided(m) => m.provenance.as_deref(),
            Market::List(m) => m.provenance.as_deref(),
            Market::SinglePeaked(m) => m.provenance.as_deref(),
            Market::Geometric(m) => m.provenance.as_deref(),
            Market::Explicit(m) => m.provenance.as_deref(),
        }
    }

    pub fn set_provenance(&mut self, p: Option<String>) {
        match self {
            Market::Attribute(m) => m.provenance = p,
            Market::OneSided(m) => m.provenance = p,
            Market::List(m) => m.provenance = p,
            Market::SinglePeaked(m) => m.provenance = p,
            Market::Geometric(m) => m.provenance = p,
            Market::Explicit(m) => m.provenance = p,
        }
    }

    /// Validates all structural invariants of the model.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidMarket("n must be at least 1".into()));
        }
        match self {
            Market::Attribute(m) => {
                if m.d == 0 {
                    return Err(Error::InvalidMarket("d must be at least 1".into()));
                }
                check_matrix("men_attrs", &m.men_attrs, n, m.d)?;
                check_matrix("men_weights", &m.men_weights, n, m.d)?;
                check_matrix("women_attrs", &m.women_attrs, n, m.d)?;
                check_matrix("women_weights", &m.women_weights, n, m.d)?;
            }
            Market::OneSided(m) => {
                if m.d == 0 {
                    return Err(Error::InvalidMarket("d must be at least 1".into()));
                }
                check_matrix("women_attrs", &m.women_attrs, n, m.d)?;
                check_matrix("men_weights", &m.men_weights, n, m.d)?;
                check_vector("men_attr", &m.men_attr, n)?;
                check_vector("women_sign", &m.women_sign, n)?;
                for (w, &s) in m.women_sign.iter().enumerate() {
                    if s != 1.0 && s != -1.0 {
                        return Err(Error::InvalidMarket(format!(
                            "women_sign[{w}] must be +1 or -1, got {s}"
                        )));
                    }
                }
            }
            Market::List(m) => {
                if m.d == 0 {
                    return Err(Error::InvalidMarket("d must be at least 1".into()));
                }
                if m.women_orders.len() != m.d || m.men_orders.len() != m.d {
                    return Err(Error::InvalidMarket(format!(
                        "expected {} orders per side, got {} over women and {} over men",
                        m.d,
                        m.women_orders.len(),
                        m.men_orders.len()
                    )));
                }
                for (i, ord) in m.women_orders.iter().enumerate() {
                    check_permutation(&format!("women_orders[{i}]"), ord, n)?;
                }
                for (j, ord) in m.men_orders.iter().enumerate() {
                    check_permutation(&format!("men_orders[{j}]"), ord, n)?;
                }
                for (p, &c) in m.men_choice.iter().enumerate() {
                    if c >= m.d {
                        return Err(Error::InvalidMarket(format!(
                            "men_choice[{p}] = {c} is not a valid order index"
                        )));
                    }
                }
                for (p, &c) in m.women_choice.iter().enumerate() {
                    if c >= m.d {
                        return Err(Error::InvalidMarket(format!(
                            "women_choice[{p}] = {c} is not a valid order index"
                        )));
                    }
                }
                if m.men_choice.len() != n || m.women_choice.len() != n {
                    return Err(Error::InvalidMarket(
                        "choice vectors must have one entry per participant".into(),
                    ));
                }
            }
            Market::SinglePeaked(m) => {
                check_vector("men_pos", &m.men_pos, n)?;
                check_vector("women_pos", &m.women_pos, n)?;
                check_vector("men_ideal", &m.men_ideal, n)?;
                check_vector("women_ideal", &m.women_ideal, n)?;
                check_strictly_increasing("men_pos", &m.men_pos)?;
                check_strictly_increasing("women_pos", &m.women_pos)?;
                match m.relation {
                    PeakRelation::Distance => {
                        if m.men_rank.is_some() || m.women_rank.is_some() {
                            return Err(Error::InvalidMarket(
                                "rank rows are only valid with relation = custom".into(),
                            ));
                        }
                    }
                    PeakRelation::Custom => {
                        let mr = m.men_rank.as_ref().ok_or_else(|| {
                            Error::InvalidMarket("relation = custom requires men_rank".into())
                        })?;
                        let wr = m.women_rank.as_ref().ok_or_else(|| {
                            Error::InvalidMarket("relation = custom requires women_rank".into())
                        })?;
                        if mr.len() != n || wr.len() != n {
                            return Err(Error::InvalidMarket(
                                "rank matrices must have one row per participant".into(),
                            ));
                        }
                        for (i, row) in mr.iter().enumerate() {
                            check_unimodal("men_rank", i, row)?;
                        }
                        for (i, row) in wr.iter().enumerate() {
                            check_unimodal("women_rank", i, row)?;
                        }
                    }
                }
            }
            Market::Geometric(m) => {
                if m.d == 0 {
                    return Err(Error::InvalidMarket("d must be at least 1".into()));
                }
                check_matrix("men_loc", &m.men_loc, n, m.d)?;
                check_matrix("men_ideal", &m.men_ideal, n, m.d)?;
                check_matrix("women_loc", &m.women_loc, n, m.d)?;
                check_matrix("women_ideal", &m.women_ideal, n, m.d)?;
            }
            Market::Explicit(m) => {
                if m.men_rank.len() != n || m.women_rank.len() != n {
                    return Err(Error::InvalidMarket(
                        "rank matrices must have one row per participant".into(),
                    ));
                }
                for (i, row) in m.men_rank.iter().enumerate() {
                    check_permutation(&format!("men_rank[{i}]"), row, n)?;
                }
                for (i, row) in m.women_rank.iter().enumerate() {
                    check_permutation(&format!("women_rank[{i}]"), row, n)?;
                }
            }
        }
        Ok(())
    }

    fn check_pair(&self, chooser: usize, candidate: usize) -> Result<()> {
        let n = self.n();
        if chooser >= n {
            return Err(Error::IndexOutOfRange {
                what: "chooser",
                index: chooser,
                size: n,
            });
        }
        if candidate >= n {
            return Err(Error::IndexOutOfRange {
                what: "candidate",
                index: candidate,
                size: n,
            });
        }
        Ok(())
    }

    /// The chooser's cardinal value of a candidate on the opposite side.
    /// Defined for the attribute, one_sided and geometric models; the list,
    /// single_peaked and explicit models are ordinal and return
    /// [`Error::OrdinalModel`]. For geometric markets this is the negated
    /// squared distance between the chooser's ideal and the candidate's
    /// location, so that larger values are better in every model.
    pub fn value(&self, side: Side, chooser: usize, candidate: usize) -> Result<f64> {
        self.check_pair(chooser, candidate)?;
        match (self, side) {
            (Market::Attribute(m), Side::Men) => {
                Ok(dot(&m.men_weights[chooser], &m.women_attrs[candidate]))
            }
            (Market::Attribute(m), Side::Women) => {
                Ok(dot(&m.women_weights[chooser], &m.men_attrs[candidate]))
            }
            (Market::OneSided(m), Side::Men) => {
                Ok(dot(&m.men_weights[chooser], &m.women_attrs[candidate]))
            }
            (Market::OneSided(m), Side::Women) => {
                Ok(m.women_sign[chooser] * m.men_attr[candidate])
            }
            (Market::Geometric(m), Side::Men) => {
                Ok(-sq_dist(&m.men_ideal[chooser], &m.women_loc[candidate]))
            }
            (Market::Geometric(m), Side::Women) => {
                Ok(-sq_dist(&m.women_ideal[chooser], &m.men_loc[candidate]))
            }
            (other, _) => Err(Error::OrdinalModel(other.model_name())),
        }
    }

    /// True iff the chooser strictly prefers candidate `a` to candidate `b`.
    /// Ties return `false` in both directions.
    pub fn prefers(&self, side: Side, chooser: usize, a: usize, b: usize) -> Result<bool> {
        self.check_pair(chooser, a)?;
        self.check_pair(chooser, b)?;
        match self {
            Market::Attribute(_) | Market::OneSided(_) | Market::Geometric(_) => {
                Ok(self.value(side, chooser, a)? > self.value(side, chooser, b)?)
            }
            Market::List(m) => {
                let order = match side {
                    Side::Men => &m.women_orders[m.men_choice[chooser]],
                    Side::Women => &m.men_orders[m.women_choice[chooser]],
                };
                // Single scan: whichever of a, b appears first is preferred.
                if a == b {
                    return Ok(false);
                }
                for &c in order {
                    if c == a {
                        return Ok(true);
                    }
                    if c == b {
                        return Ok(false);
                    }
                }
                unreachable!("orders are permutations");
            }
            Market::SinglePeaked(m) => match m.relation {
                PeakRelation::Distance => {
                    let (ideal, pos) = match side {
                        Side::Men => (m.men_ideal[chooser], &m.women_pos),
                        Side::Women => (m.women_ideal[chooser], &m.men_pos),
                    };
                    Ok((ideal - pos[a]).abs() < (ideal - pos[b]).abs())
                }
                PeakRelation::Custom => {
                    let rank = match side {
                        Side::Men => m.men_rank.as_ref().unwrap(),
                        Side::Women => m.women_rank.as_ref().unwrap(),
                    };
                    Ok(rank[chooser][a] < rank[chooser][b])
                }
            },
            Market::Explicit(m) => {
                let rank = match side {
                    Side::Men => &m.men_rank,
                    Side::Women => &m.women_rank,
                };
                Ok(rank[chooser][a] < rank[chooser][b])
            }
        }
    }

    /// Converts any market to explicit rank matrices consistent with
    /// [`Market::prefers`], breaking ties by ascending candidate index.
    /// Runs in `O(n^2 log n)`.
    pub fn materialize(&self) -> ExplicitMarket {
        let n = self.n();
        let rank_for = |side: Side| -> Vec<Vec<usize>> {
            let scorer = PrefScorer::new(self, side);
            (0..n)
                .map(|chooser| {
                    let mut idx: Vec<usize> = (0..n).collect();
                    idx.sort_by(|&a, &b| {
                        scorer
                            .score(chooser, a)
                            .total_cmp(&scorer.score(chooser, b))
                            .then(a.cmp(&b))
                    });
                    let mut rank = vec![0usize; n];
                    for (r, &c) in idx.iter().enumerate() {
                        rank[c] = r;
                    }
                    rank
                })
                .collect()
        };
        ExplicitMarket {
            n,
            men_rank: rank_for(Side::Men),
            women_rank: rank_for(Side::Women),
            provenance: Some(format!("materialized from {} market", self.model_name())),
        }
    }

    pub fn to_instance_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("market serialization cannot fail")
    }

    /// Parses and validates an instance JSON document.
    pub fn from_instance_str(s: &str) -> Result<Market> {
        let m: Market =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("instance: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}

/// Lifts a geometric market into an attribute market with `d + 1` attributes
/// whose strict-preference relation is identical.
///
/// For an ideal `q` the weight vector is `(2 q_1, ..., 2 q_d, -1)`; for a
/// location `a` the attribute vector is `(a_1, ..., a_d, sum a_i^2)`. Then
/// `<weight, attribute> = 2 <q, a> - sum a_i^2 = |q|^2 - |q - a|^2`, a
/// per-chooser constant plus the negated squared distance, so every chooser's
/// order (including ties) is preserved. Integer inputs stay integers.
pub fn lift_geometric(gm: &GeometricMarket) -> AttributeMarket {
    let weights = |ideals: &[Vec<f64>]| -> Vec<Vec<f64>> {
        ideals
            .iter()
            .map(|q| {
                let mut w: Vec<f64> = q.iter().map(|&x| 2.0 * x).collect();
                w.push(-1.0);
                w
            })
            .collect()
    };
    let attrs = |locs: &[Vec<f64>]| -> Vec<Vec<f64>> {
        locs.iter()
            .map(|a| {
                let mut v = a.clone();
                v.push(dot(a, a));
                v
            })
            .collect()
    };
    AttributeMarket {
        n: gm.n,
        d: gm.d + 1,
        men_attrs: attrs(&gm.men_loc),
        men_weights: weights(&gm.men_ideal),
        women_attrs: attrs(&gm.women_loc),
        women_weights: weights(&gm.women_ideal),
        provenance: Some(format!(
            "lifted from geometric market (n = {}, d = {})",
            gm.n, gm.d
        )),
    }
}

/// Internal fast preference accessor: `score(chooser, candidate)` returns a
/// number where *lower is better* and equal scores are exactly the chooser's
/// ties. Construction costs at most `O(d n)`; each call is `O(d)` or `O(1)`.
///
/// Scores are normalized with `+ 0.0` so a negative zero can never diverge
/// from positive zero under `total_cmp`-based sorting.
pub(crate) enum PrefScorer<'a> {
    Linear {
        weights: &'a [Vec<f64>],
        attrs: &'a [Vec<f64>],
    },
    Scalar {
        sign: &'a [f64],
        attr: &'a [f64],
    },
    Nearest {
        ideals: &'a [Vec<f64>],
        locs: &'a [Vec<f64>],
    },
    Ranks {
        rank: &'a [Vec<usize>],
    },
    ListRanks {
        rank: Vec<Vec<usize>>,
        choice: &'a [usize],
    },
    Peaked {
        ideal: &'a [f64],
        pos: &'a [f64],
    },
}

/// Positions of each candidate in each order: `out[i][candidate] = rank`.
pub(crate) fn rank_tables(orders: &[Vec<usize>]) -> Vec<Vec<usize>> {
    orders
        .iter()
        .map(|ord| {
            let mut rank = vec![0usize; ord.len()];
            for (r, &c) in ord.iter().enumerate() {
                rank[c] = r;
            }
            rank
        })
        .collect()
}

impl<'a> PrefScorer<'a> {
    pub fn new(market: &'a Market, side: Side) -> PrefScorer<'a> {
        match (market, side) {
            (Market::Attribute(m), Side::Men) => PrefScorer::Linear {
                weights: &m.men_weights,
                attrs: &m.women_attrs,
            },
            (Market::Attribute(m), Side::Women) => PrefScorer::Linear {
                weights: &m.women_weights,
                attrs: &m.men_attrs,
            },
            (Market::OneSided(m), Side::Men) => PrefScorer::Linear {
                weights: &m.men_weights,
                attrs: &m.women_attrs,
            },
            (Market::OneSided(m), Side::Women) => PrefScorer::Scalar {
                sign: &m.women_sign,
                attr: &m.men_attr,
            },
            (Market::Geometric(m), Side::Men) => PrefScorer::Nearest {
                ideals: &m.men_ideal,
                locs: &m.women_loc,
            },
            (Market::Geometric(m), Side::Women) => PrefScorer::Nearest {
                ideals: &m.women_ideal,
                locs: &m.men_loc,
            },
            (Market::List(m), Side::Men) => PrefScorer::ListRanks {
                rank: rank_tables(&m.women_orders),
                choice: &m.men_choice,
            },
            (Market::List(m), Side::Women) => PrefScorer::ListRanks {
                rank: rank_tables(&m.men_orders),
                choice: &m.women_choice,
            },
            (Market::SinglePeaked(m), side) => match m.relation {
                PeakRelation::Distance => match side {
                    Side::Men => PrefScorer::Peaked {
                        ideal: &m.men_ideal,
                        pos: &m.women_pos,
                    },
                    Side::Women => PrefScorer::Peaked {
                        ideal: &m.women_ideal,
                        pos: &m.men_pos,
                    },
                },
                PeakRelation::Custom => PrefScorer::Ranks {
                    rank: match side {
                        Side::Men => m.men_rank.as_ref().unwrap(),
                        Side::Women => m.women_rank.as_ref().unwrap(),
                    },
                },
            },
            (Market::Explicit(m), Side::Men) => PrefScorer::Ranks { rank: &m.men_rank },
            (Market::Explicit(m), Side::Women) => PrefScorer::Ranks {
                rank: &m.women_rank,
            },
        }
    }

    /// Lower is better; equal scores are exactly the chooser's ties.
    #[inline]
    pub fn score(&self, chooser: usize, candidate: usize) -> f64 {
        let s = match self {
            PrefScorer::Linear { weights, attrs } => -dot(&weights[chooser], &attrs[candidate]),
            PrefScorer::Scalar { sign, attr } => -(sign[chooser] * attr[candidate]),
            PrefScorer::Nearest { ideals, locs } => sq_dist(&ideals[chooser], &locs[candidate]),
            PrefScorer::Ranks { rank } => rank[chooser][candidate] as f64,
            PrefScorer::ListRanks { rank, choice } => rank[choice[chooser]][candidate] as f64,
            PrefScorer::Peaked { ideal, pos } => (ideal[chooser] - pos[candidate]).abs(),
        };
        s + 0.0
    }
}
