//! Exact arithmetic for characterized subgroups of compact abelian groups.
//!
//! The crate is organised around three compact models (the circle with
//! mixed-radix coordinates, the p-adic integers, and products of finite
//! cyclic groups), membership tests for the subgroups
//! `s_u(X) = {x : (u_n, x) -> 1}` they carry, decision procedures for
//! T-characterizability on symbolic descriptions of discrete duals, and
//! certified reconstructions of the witness sequences that show such
//! subgroups can fail to be `F_sigma`.
//!
//! Angles are exact rationals modulo one. Floating point only appears when
//! mapping an angle to `|1 - e^{2 pi i phi}|`, and then always as an outward
//! rounded [`BoundInterval`].

pub mod arith;
pub mod decision;
pub mod error;
pub mod membership;
pub mod models;
pub mod text;
pub mod witness;

pub use arith::{nearest_int_dist, unit_norm, Angle, AngleRange, BoundInterval, Rational};
pub use decision::{
    all_gdelta_tchar, connected_dual, exponent, minap_admissible, select_unbounded_witness,
    socle_rank, tchar_decide, Branch, Decision, Exponent, Factor, FactorKind, GroupDescriptor,
    Multiplicity, SocleRank, WitnessFamily,
};
pub use error::{Error, ParseError, Result};
pub use membership::{
    check_consistency, compute_mk, member, member_padic, member_product, member_torus,
    numeric_oracle, Criterion, OracleOutcome, OracleReport, Outcome, Verdict,
};
pub use models::{
    distance_bounds, encode_torus, metric_d, pair, rho, BaseSequence, CharSequence, Character,
    Element, IndexRule, Model, Pairing, TailRule, DEFAULT_HORIZON,
};
pub use witness::{
    lemma31, lemma32, lemma33, run_theorem13, BudgetCheck, Threshold, WitnessConfig,
    WitnessEntry, WitnessReport,
};
