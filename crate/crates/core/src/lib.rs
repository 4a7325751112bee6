//! Subquadratic stable matching for succinct preference models.
//!
//! A matching market assigns n men and n women to one another; a matching is
//! *weakly stable* when no man and woman both strictly prefer each other to
//! their assigned partners. For explicit preference lists this takes Θ(n²)
//! space just to write down, but many natural markets are *succinct*: each
//! participant is described by a handful of numbers, and preferences are
//! derived from them. This crate implements solvers and verifiers that
//! exploit that succinctness:
//!
//! * [`prefs`] — the supported market representations (attribute, one-sided,
//!   list, single-peaked, geometric, explicit), matchings, scoring, and
//!   serialization.
//! * [`geometry`] — kd-tree indexes for halfspace maximization and halfspace
//!   range emptiness over point sets, with exact arithmetic discipline.
//! * [`solve`] — deferred acceptance for every model plus specialized
//!   subquadratic solvers for small attribute universes and the one-sided
//!   model.
//! * [`verify`] — blocking-pair detection: a quadratic brute-force oracle
//!   and subquadratic verifiers per model.
//! * [`reductions`] — stable-pair decision procedures, exhaustive
//!   enumeration, hardness-instance generators with certified answers, and
//!   worked fixture markets.
//!
//! Determinism is a design rule throughout: identical inputs produce
//! identical matchings, witnesses, and counters on every run. All cardinal
//! comparisons are exact float comparisons — see the module docs for where
//! (and only where) derived normalized coordinates can diverge from the
//! defining arithmetic by an ulp.

pub mod error;
pub mod geometry;
pub mod prefs;
pub mod reductions;
pub mod solve;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{hmi_build, rei_build, Halfspace, HalfspaceMaxIndex, RangeEmptinessIndex};
pub use prefs::{
    lift_geometric, AttributeMarket, ExplicitMarket, GeometricMarket, ListMarket, Market,
    Matching, OneSidedMarket, PeakRelation, Side, SinglePeakedMarket,
};
pub use reductions::{
    enumerate_stable, fixture, fixture_names, gen_finding_hardness, gen_geo_finding,
    gen_geo_stable_pair, gen_geo_verify, gen_stable_pair, gen_stable_pair_co,
    gen_verify_hardness, in_all_stable, in_some_stable, max_inner_product_brute,
    min_hamming_brute, Designated, Deviation, DeviationEffect, Family, Fixture,
    FixtureAnnotations, ReductionInstance, ReductionParams,
};
pub use solve::{find_one_sided, find_small_universe, gale_shapley, SolveReport};
pub use verify::{
    strict_preference_interval, verify_attribute, verify_boolean_bitset, verify_brute,
    verify_geometric, verify_list, verify_single_peaked, VerifyReport,
};
