//! Decision procedures on symbolic descriptions of discrete abelian groups.
//!
//! A [`GroupDescriptor`] is a finite direct sum of `Z`, finite cyclic groups,
//! Prüfer groups and families `sum_n Z(b_n)`, each with a multiplicity in
//! `{1, 2, ...} U {omega}`. Given the annihilator `H^perp` of a closed
//! subgroup `H`, [`tchar_decide`] answers whether `H` is T-characterized.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::models::{is_prime, BaseSequence};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    InfiniteCyclic,
    /// `Z(n)`, `n >= 2`.
    Cyclic(u64),
    /// `Z(p^inf)`.
    Prufer(u64),
    /// `sum_n Z(b_n)` with `1 < b_0 < b_1 < ...`.
    CyclicFamily(BaseSequence),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Omega,
}

impl Multiplicity {
    /// The multiplicity with `omega` read as `k`.
    pub fn truncate(self, k: u64) -> u64 {
        match self {
            Multiplicity::Finite(m) => m,
            Multiplicity::Omega => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub kind: FactorKind,
    pub mult: Multiplicity,
}

impl Factor {
    pub fn new(kind: FactorKind, mult: Multiplicity) -> Self {
        Factor { kind, mult }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    factors: Vec<Factor>,
}

impl GroupDescriptor {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            match &f.kind {
                FactorKind::Cyclic(n) if *n < 2 => {
                    return Err(Error::InvalidRule(format!("cyclic order {n} must be at least 2")))
                }
                FactorKind::Prufer(p) if !is_prime(*p) => {
                    return Err(Error::InvalidRule(format!("Prufer group needs a prime, got {p}")))
                }
                FactorKind::CyclicFamily(b) if !b.is_product_admissible() => {
                    return Err(Error::InvalidRule("cyclic family orders must satisfy 1 < b_0 < b_1 < ...".into()))
                }
                _ => {}
            }
            if f.mult == Multiplicity::Finite(0) {
                return Err(Error::InvalidRule("multiplicities start at 1".into()));
            }
        }
        Ok(GroupDescriptor { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Finite as a set: only finite cyclic factors with finite multiplicity.
    pub fn is_finite(&self) -> bool {
        self.factors
            .iter()
            .all(|f| matches!(f.kind, FactorKind::Cyclic(_)) && matches!(f.mult, Multiplicity::Finite(_)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(BigUint),
    Infinite,
}

/// The least `n` with `n G = 0`, or infinity when orders are unbounded.
pub fn exponent(d: &GroupDescriptor) -> Exponent {
    let mut e = BigUint::one();
    for f in d.factors() {
        match f.kind {
            FactorKind::Cyclic(n) => e = e.lcm(&BigUint::from(n)),
            _ => return Exponent::Infinite,
        }
    }
    Exponent::Finite(e)
}

/// The largest `r` with `Z(e)^r` embedded in the group, `omega` read as `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SocleRank {
    pub rank: u64,
    /// The rank grows without bound in `k`.
    pub omega: bool,
}

fn prime_powers(mut e: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= e {
        if e % q == 0 {
            let mut qa = 1;
            while e % q == 0 {
                e /= q;
                qa *= q;
            }
            out.push(qa);
        }
        q += 1;
    }
    if e > 1 {
        out.push(e);
    }
    out
}

/// `Z(e)^r` embeds into `sum Z(n_i)` iff, for every prime power `q^a`
/// exactly dividing `e`, at least `r` of the `n_i` are divisible by `q^a`.
pub fn socle_rank(d: &GroupDescriptor, e: u64, k: u64) -> Result<SocleRank> {
    if e < 2 {
        return Err(Error::OutOfRange(format!("socle rank needs e >= 2, got {e}")));
    }
    if exponent(d) == Exponent::Infinite {
        return Err(Error::OutOfRange("socle rank is defined for bounded groups only".into()));
    }
    let mut rank = u64::MAX;
    let mut omega = true;
    for qa in prime_powers(e) {
        let mut count = 0u64;
        let mut has_omega = false;
        for f in d.factors() {
            if let FactorKind::Cyclic(n) = f.kind {
                if n % qa == 0 {
                    count += f.mult.truncate(k);
                    has_omega |= f.mult == Multiplicity::Omega;
                }
            }
        }
        rank = rank.min(count);
        omega &= has_omega;
    }
    Ok(SocleRank { rank, omega })
}

/// Which clause settled a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `H = X`, characterized by the zero sequence.
    WholeGroup,
    /// `H` is not a `G_delta`-subgroup, so it is not characterized at all.
    NotGDelta,
    /// `H^perp` has infinite exponent.
    InfiniteExponent,
    /// `H^perp` has finite exponent `e` and contains `Z(e)^(omega)`.
    OmegaSocle,
    /// `H^perp` has finite exponent `e` but no `Z(e)^(omega)`.
    NoOmegaSocle,
    /// `H^perp` is finite, so its only Hausdorff group topology is discrete.
    FiniteGroup,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::WholeGroup => "whole-group",
            Branch::NotGDelta => "not-gdelta",
            Branch::InfiniteExponent => "3a",
            Branch::OmegaSocle => "3b",
            Branch::NoOmegaSocle => "3b-fails",
            Branch::FiniteGroup => "finite",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub answer: bool,
    pub branch: Branch,
    pub reason: String,
}

impl Decision {
    fn new(answer: bool, branch: Branch, reason: impl Into<String>) -> Self {
        Decision { answer, branch, reason: reason.into() }
    }
}

/// Infinite exponent, or finite exponent `e` with `Z(e)^(omega)` inside.
fn clause_three(d: &GroupDescriptor) -> Decision {
    match exponent(d) {
        Exponent::Infinite => Decision::new(true, Branch::InfiniteExponent, "the annihilator has infinite exponent"),
        Exponent::Finite(e) => {
            let e64 = u64::try_from(&e).expect("lcm of u64 orders in range");
            if e64 == 1 {
                return Decision::new(false, Branch::NoOmegaSocle, "the annihilator is trivial");
            }
            let s = socle_rank(d, e64, 1).expect("bounded descriptor");
            if s.omega {
                Decision::new(true, Branch::OmegaSocle, format!("exponent {e} and Z({e})^(omega) embeds"))
            } else {
                Decision::new(false, Branch::NoOmegaSocle, format!("exponent {e} but Z({e})^(omega) does not embed"))
            }
        }
    }
}

/// Is the closed subgroup `H` with annihilator `annihilator` T-characterized?
pub fn tchar_decide(annihilator: &GroupDescriptor, is_gdelta: bool, is_proper: bool) -> Result<Decision> {
    if !is_proper {
        return Ok(Decision::new(true, Branch::WholeGroup, "the whole group is characterized by the zero sequence"));
    }
    if annihilator.is_empty() {
        return Err(Error::Inconsistent("a proper subgroup has a nontrivial annihilator".into()));
    }
    if !is_gdelta {
        return Ok(Decision::new(false, Branch::NotGDelta, "characterized subgroups are G_delta"));
    }
    Ok(clause_three(annihilator))
}

/// Does the countable group admit a Hausdorff minimally almost periodic group topology?
pub fn minap_admissible(d: &GroupDescriptor) -> Decision {
    if d.is_finite() {
        return Decision::new(false, Branch::FiniteGroup, "finite groups admit only the discrete topology");
    }
    clause_three(d)
}

/// The compact dual is connected iff this discrete group is torsion-free.
pub fn connected_dual(d: &GroupDescriptor) -> bool {
    d.factors().iter().all(|f| f.kind == FactorKind::InfiniteCyclic)
}

/// Every closed `G_delta`-subgroup of the dual is T-characterized iff the dual is connected.
pub fn all_gdelta_tchar(d: &GroupDescriptor) -> bool {
    connected_dual(d)
}

/// Countably infinite subgroup driving the dense non-`F_sigma` construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WitnessFamily {
    /// `Z`: the circle construction.
    A,
    /// `Z(p^inf)`: the p-adic construction.
    B(u64),
    /// `sum_n Z(b_n)`: the product construction.
    C(BaseSequence),
}

impl WitnessFamily {
    pub fn letter(&self) -> &'static str {
        match self {
            WitnessFamily::A => "A",
            WitnessFamily::B(_) => "B",
            WitnessFamily::C(_) => "C",
        }
    }
}

/// Picks `Z`, then the smallest-prime `Z(p^inf)`, then a cyclic family.
pub fn select_unbounded_witness(d: &GroupDescriptor) -> Result<WitnessFamily> {
    let mut primes = BTreeMap::new();
    let mut family = None;
    for f in d.factors() {
        match &f.kind {
            FactorKind::InfiniteCyclic => return Ok(WitnessFamily::A),
            FactorKind::Prufer(p) => {
                primes.insert(*p, ());
            }
            FactorKind::CyclicFamily(b) if family.is_none() => family = Some(b.clone()),
            _ => {}
        }
    }
    if let Some((&p, _)) = primes.iter().next() {
        return Ok(WitnessFamily::B(p));
    }
    family
        .map(WitnessFamily::C)
        .ok_or_else(|| Error::Bounded("the descriptor has finite exponent".into()))
}
